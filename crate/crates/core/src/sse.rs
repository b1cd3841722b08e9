//! Elementary strong shift equivalence, column subdivision matrices,
//! imprimitivity graphs, and the construction of a column-subdivision
//! factorization from an explosion witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explosion::{is_explosion_of, vertex_explosion};
use crate::intmatrix::IntMatrix;
use crate::matrix::ZeroOneMatrix;

/// Nonnegative integer factors `R` (n x m) and `S` (m x n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPair {
    pub r: IntMatrix,
    pub s: IntMatrix,
}

impl FactorPair {
    pub fn new(r: IntMatrix, s: IntMatrix) -> Result<Self> {
        if r.cols() != s.rows() || r.rows() != s.cols() {
            return Err(Error::DimensionMismatch {
                expected: format!("S of shape {}x{}", r.cols(), r.rows()),
                found: format!("{}x{}", s.rows(), s.cols()),
            });
        }
        if !r.is_nonnegative() || !s.is_nonnegative() {
            return Err(Error::InvalidMove("factor entries must be nonnegative".into()));
        }
        Ok(Self { r, s })
    }
}

/// `RS == B` and `SR == C`, in exact integer arithmetic.
pub fn verify_esse(b: &ZeroOneMatrix, c: &ZeroOneMatrix, pair: &FactorPair) -> Result<bool> {
    if pair.r.rows() != b.n() || pair.r.cols() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("R of shape {}x{}", b.n(), c.n()),
            found: format!("{}x{}", pair.r.rows(), pair.r.cols()),
        });
    }
    let rs = pair.r.mul(&pair.s)?;
    let sr = pair.s.mul(&pair.r)?;
    Ok(rs == IntMatrix::from(b) && sr == IntMatrix::from(c))
}

/// 0-1 with at most one 1 in every column.
pub fn is_column_subdivision(r: &IntMatrix) -> bool {
    r.is_zero_one() && (0..r.cols()).all(|j| (0..r.rows()).map(|i| r.get(i, j)).sum::<i64>() <= 1)
}

/// The bipartite graph with vertex matrix `[[0, R], [S, 0]]`.
pub fn imprimitivity_graph(pair: &FactorPair) -> Result<ZeroOneMatrix> {
    if !pair.r.is_zero_one() || !pair.s.is_zero_one() {
        return Err(Error::NotZeroOne);
    }
    let (n, m) = (pair.r.rows(), pair.r.cols());
    let mut x = ZeroOneMatrix::zeros(n + m)?;
    for i in 0..n {
        for j in 0..m {
            x.set(i, n + j, pair.r.get(i, j) == 1);
            x.set(n + j, i, pair.s.get(j, i) == 1);
        }
    }
    Ok(x)
}

/// For graphs without sinks of sizes `n` and `n + 1`: a column-subdivision
/// factorization `B = RS`, `C = SR` if `C` is an explosion of `B`, else `None`.
pub fn esse_cs_decide(b: &ZeroOneMatrix, c: &ZeroOneMatrix) -> Result<Option<FactorPair>> {
    if let Some(&v) = b.sinks().first() {
        return Err(Error::SinkPresent { which: "B", vertex: v });
    }
    if let Some(&v) = c.sinks().first() {
        return Err(Error::SinkPresent { which: "C", vertex: v });
    }
    let Some((split, sigma)) = is_explosion_of(b, c)? else {
        return Ok(None);
    };
    let x = vertex_explosion(b, &split)?;
    let (n, v) = (b.n(), split.v);
    // Vertex u of B maps to u (u < v) or u + 1 (u > v); v covers v' = v and v'' = v + 1.
    let owner = |i: usize| if i <= v { i } else { i - 1 };
    let mut r = IntMatrix::zeros(n, n + 1);
    let mut s = IntMatrix::zeros(n + 1, n);
    for i in 0..=n {
        let xi = sigma.apply(i);
        r.set(owner(xi), i, 1);
        for w in 0..n {
            // Column v' of X dropped; column w of S reads X at w's image (v'' for v).
            let col = if w < v { w } else { w + 1 };
            s.set(i, w, x.get(xi, col) as i64);
        }
    }
    let pair = FactorPair { r, s };
    debug_assert!(verify_esse(b, c, &pair)? && is_column_subdivision(&pair.r));
    if !verify_esse(b, c, &pair)? {
        return Err(Error::InvalidMove("constructed factorization failed to verify".into()));
    }
    Ok(Some(pair))
}
