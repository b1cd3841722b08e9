//! Canonical representatives under simultaneous row/column permutation.
//!
//! The canonical form of `B` is the conjugate `P B P^-1` whose row-major bit
//! string (entry `(0,0)` first, `0 < 1`) is lexicographically smallest. It is
//! found by a depth-first search over vertex orderings that prunes any partial
//! ordering whose known entries already compare above the best complete
//! ordering seen so far.

use crate::error::{Error, Result};
use crate::matrix::{Permutation, ZeroOneMatrix};

/// Largest size accepted by [`canonical_form`] (9! orderings in the worst case).
pub const CANON_MAX_N: usize = 9;

struct Search<'a> {
    b: &'a ZeroOneMatrix,
    n: usize,
    order: Vec<usize>,
    assigned: Vec<usize>,
    // partial[i]: row i of the candidate, column j stored at bit n-1-j.
    partial: Vec<u64>,
    best: Option<(Vec<u64>, Vec<usize>)>,
}

impl Search<'_> {
    fn bit(&self, col: usize) -> u64 {
        1 << (self.n - 1 - col)
    }

    /// True when every completion of the current partial ordering compares
    /// greater than or equal to the best complete candidate.
    fn dominated(&self, depth: usize) -> bool {
        let Some((best, _)) = &self.best else {
            return false;
        };
        let n = self.n;
        let low = if depth >= n { 0 } else { (1u64 << (n - depth)) - 1 };
        for i in 0..n {
            if i < depth {
                let known = self.partial[i];
                let top = best[i] & !low;
                if known != top {
                    return known > top;
                }
                if best[i] & low != 0 {
                    return false;
                }
            } else if best[i] != 0 {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, depth: usize) {
        if depth == self.n {
            let better = match &self.best {
                None => true,
                Some((best, _)) => self.partial < *best,
            };
            if better {
                self.best = Some((self.partial.clone(), self.assigned.clone()));
            }
            return;
        }
        for idx in 0..self.n {
            let x = self.order[idx];
            if self.assigned[..depth].contains(&x) {
                continue;
            }
            self.assigned[depth] = x;
            let saved: Vec<u64> = self.partial[..=depth].to_vec();
            let col = self.bit(depth);
            let mut row = 0u64;
            for j in 0..depth {
                let y = self.assigned[j];
                if self.b.get(self.assigned[j], x) {
                    self.partial[j] |= col;
                }
                if self.b.get(x, y) {
                    row |= self.bit(j);
                }
            }
            if self.b.get(x, x) {
                row |= col;
            }
            self.partial[depth] = row;
            if !self.dominated(depth + 1) {
                self.dfs(depth + 1);
            }
            self.partial[..=depth].copy_from_slice(&saved);
        }
    }
}

/// Returns the canonical conjugate of `b` and a permutation `sigma` with
/// `b.permute(sigma) == canonical`.
pub fn canonical_form(b: &ZeroOneMatrix) -> Result<(ZeroOneMatrix, Permutation)> {
    let n = b.n();
    if n > CANON_MAX_N {
        return Err(Error::SizeLimit {
            n,
            limit: CANON_MAX_N,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (b.get(v, v), b.out_degree(v)));
    let mut search = Search {
        b,
        n,
        order,
        assigned: vec![0; n],
        partial: vec![0; n],
        best: None,
    };
    search.dfs(0);
    let (_, images) = search.best.expect("at least one ordering exists");
    let sigma = Permutation::new(images).expect("search yields a bijection");
    let canon = b.permute_unchecked(sigma.images());
    Ok((canon, sigma))
}

/// Canonical matrix only.
pub fn canonical_matrix(b: &ZeroOneMatrix) -> Result<ZeroOneMatrix> {
    canonical_form(b).map(|(c, _)| c)
}

/// A permutation `sigma` with `a.permute(sigma) == b`, if one exists.
pub fn find_conjugacy(a: &ZeroOneMatrix, b: &ZeroOneMatrix) -> Result<Option<Permutation>> {
    if a.n() != b.n() {
        return Ok(None);
    }
    let (ca, sa) = canonical_form(a)?;
    let (cb, sb) = canonical_form(b)?;
    if ca != cb {
        return Ok(None);
    }
    // a.permute(sa) == b.permute(sb)  =>  b == a.permute(sa ∘ sb^-1)
    Ok(Some(sa.compose(&sb.inverse())))
}

/// Row-major lexicographic comparison key, used by tests and enumeration.
pub fn row_major_key(b: &ZeroOneMatrix) -> Vec<u64> {
    let n = b.n();
    (0..n)
        .map(|i| {
            (0..n).fold(0u64, |acc, j| acc | (b.get(i, j) as u64) << (n - 1 - j))
        })
        .collect()
}

/// Every distinct conjugate of `b` (its orbit under vertex relabelling).
pub fn orbit(b: &ZeroOneMatrix) -> Vec<ZeroOneMatrix> {
    let n = b.n();
    let mut images: Vec<usize> = (0..n).collect();
    let mut out = rustc_hash::FxHashSet::default();
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    out.insert(b.permute_unchecked(&images));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                images.swap(0, i);
            } else {
                images.swap(c[i], i);
            }
            out.insert(b.permute_unchecked(&images));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    v
}
