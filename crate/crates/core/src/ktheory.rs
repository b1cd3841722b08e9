//! Smith normal form over the integers, the K0 group `coker(I - B^T)` with the
//! class of the unit, and isomorphism testing of such pointed groups.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intmatrix::IntMatrix;
use crate::matrix::ZeroOneMatrix;

/// `u * m * v == diag(diag)` with `u`, `v` unimodular, `diag` a divisibility
/// chain with zeros last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub diag: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `row_dst -= q * row_src` on every matrix in `ms` (row operation).
fn row_axpy(ms: &mut [&mut Vec<Vec<i128>>], dst: usize, src: usize, q: i128) -> Result<()> {
    for m in ms.iter_mut() {
        for j in 0..m[dst].len() {
            let t = mul(q, m[src][j])?;
            m[dst][j] = add(m[dst][j], -t)?;
        }
    }
    Ok(())
}

fn col_axpy(ms: &mut [&mut Vec<Vec<i128>>], dst: usize, src: usize, q: i128) -> Result<()> {
    for m in ms.iter_mut() {
        for row in m.iter_mut() {
            let t = mul(q, row[src])?;
            row[dst] = add(row[dst], -t)?;
        }
    }
    Ok(())
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithDecomposition> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| m.row(i).iter().map(|&x| x as i128).collect())
        .collect();
    let ident = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    let mut u = ident(rows);
    let mut v = ident(cols);
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        // Smallest nonzero entry of the trailing block.
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].unsigned_abs());
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let p = a[t][t];
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_euclid(p);
            if q != 0 {
                row_axpy(&mut [&mut a, &mut u], i, t, q)?;
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = a[t][j].div_euclid(p);
            if q != 0 {
                col_axpy(&mut [&mut a, &mut v], j, t, q)?;
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // Force the pivot to divide the rest of the block.
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0)) {
            row_axpy(&mut [&mut a, &mut u], t, i, -1)?;
            continue;
        }
        if p < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag = (0..steps).map(|i| a[i][i]).collect();
    let d = SmithDecomposition { diag, u, v };
    debug_assert!(reconstructs(m, &d), "SNF self-check failed for {m:?}");
    Ok(d)
}

/// `U M V` equals the diagonal; checked in debug builds.
fn reconstructs(m: &IntMatrix, d: &SmithDecomposition) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    let mut um = vec![vec![0i128; cols]; rows];
    for i in 0..rows {
        for k in 0..rows {
            for j in 0..cols {
                um[i][j] += d.u[i][k] * m.get(k, j) as i128;
            }
        }
    }
    (0..rows).all(|i| {
        (0..cols).all(|j| {
            let x: i128 = (0..cols).map(|k| um[i][k] * d.v[k][j]).sum();
            x == if i == j { d.diag[i] } else { 0 }
        })
    })
}

/// Order of an element: finite or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u128),
    Infinite,
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(k) => s.serialize_u128(*k),
            Order::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

/// `coker(I - B^T) = Z/d_1 + ... + Z/d_k + Z^r` and the class of the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct K0Invariant {
    /// Invariant factors greater than one, each dividing the next.
    pub torsion_factors: Vec<i128>,
    pub free_rank: usize,
    /// Residues for the torsion factors, then integers for the free part.
    pub identity_class: Vec<i128>,
    pub identity_order: Order,
}

impl K0Invariant {
    /// Group order of the torsion part.
    pub fn torsion_order(&self) -> Option<i128> {
        self.torsion_factors
            .iter()
            .try_fold(1i128, |a, &d| a.checked_mul(d))
    }

    /// Readable group, e.g. `Z2+Z6` or `Z+Z3`; the trivial group is `0`.
    pub fn group_string(&self) -> String {
        let mut parts: Vec<String> = vec!["Z".to_string(); self.free_rank];
        parts.extend(self.torsion_factors.iter().map(|d| format!("Z{d}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn k0_invariant(b: &ZeroOneMatrix) -> Result<K0Invariant> {
    let n = b.n();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            // (I - B^T)(i, j) = delta_ij - B(j, i)
            m.set(i, j, m.get(i, j) - b.get(j, i) as i64);
        }
    }
    let snf = smith_normal_form(&m)?;
    let ones: Vec<i128> = snf
        .u
        .iter()
        .map(|row| row.iter().try_fold(0i128, |a, &x| a.checked_add(x)))
        .collect::<Option<_>>()
        .ok_or(Error::Overflow)?;
    let mut torsion_factors = Vec::new();
    let mut torsion_coords = Vec::new();
    let mut free_coords = Vec::new();
    for (i, &d) in snf.diag.iter().enumerate() {
        match d {
            0 => free_coords.push(ones[i]),
            1 => {}
            _ => {
                torsion_factors.push(d);
                torsion_coords.push(ones[i].rem_euclid(d));
            }
        }
    }
    let free_rank = free_coords.len();
    let identity_order = if free_coords.iter().any(|&x| x != 0) {
        Order::Infinite
    } else {
        let mut l: i128 = 1;
        for (&d, &x) in torsion_factors.iter().zip(&torsion_coords) {
            let o = d / gcd(d, x);
            l = (l / gcd(l, o)).checked_mul(o).ok_or(Error::Overflow)?;
        }
        Order::Finite(l as u128)
    };
    let mut identity_class = torsion_coords;
    identity_class.extend(free_coords);
    Ok(K0Invariant {
        torsion_factors,
        free_rank,
        identity_class,
        identity_order,
    })
}

/// Three-valued answer of [`k0_pairs_isomorphic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairIso {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

impl Serialize for PairIso {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PairIso::Isomorphic => s.serialize_bool(true),
            PairIso::NotIsomorphic => s.serialize_bool(false),
            PairIso::Inconclusive => s.serialize_str("inconclusive"),
        }
    }
}

impl std::fmt::Display for PairIso {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairIso::Isomorphic => "true",
            PairIso::NotIsomorphic => "false",
            PairIso::Inconclusive => "inconclusive",
        })
    }
}

/// Bound on the coset enumerated per prime when the free part forces a
/// search; larger cosets yield [`PairIso::Inconclusive`].
pub const COSET_CAP: u128 = 10_000;

/// Decides whether an isomorphism of the groups carries one unit class to the
/// other.
///
/// Automorphisms of `T + Z^r` (T finite) act on `(t, f)` as
/// `(alpha t + gamma f, delta f)`, so `f` is determined up to its content
/// `d = gcd(f)`, and then `(t, d e_1) ~ (t', d e_1)` iff some automorphism
/// `alpha` of `T` takes `t` into `t' + dT`. On each primary component, orbits
/// of `Aut(T_p)` are classified by the height sequence of the element.
pub fn k0_pairs_isomorphic(a: &K0Invariant, b: &K0Invariant) -> PairIso {
    if a.torsion_factors != b.torsion_factors || a.free_rank != b.free_rank {
        return PairIso::NotIsomorphic;
    }
    if a.identity_order != b.identity_order {
        return PairIso::NotIsomorphic;
    }
    let k = a.torsion_factors.len();
    let (ta, fa) = a.identity_class.split_at(k);
    let (tb, fb) = b.identity_class.split_at(k);
    let content = |f: &[i128]| f.iter().fold(0, |g, &x| gcd(g, x));
    let d = content(fa);
    if d != content(fb) {
        return PairIso::NotIsomorphic;
    }
    let mut inconclusive = false;
    for p in primes_dividing(&a.torsion_factors) {
        let exps: Vec<u32> = a.torsion_factors.iter().map(|&m| valuation(m, p)).collect();
        let pa = primary_part(ta, &a.torsion_factors, p, &exps);
        let pb = primary_part(tb, &a.torsion_factors, p, &exps);
        let target = height_sequence(&pa, p, &exps);
        // dT restricted to the p-part is p^v T_p, v = v_p(d) (d = 0 gives 0).
        let shift = if d == 0 { u32::MAX } else { valuation(d, p) };
        match coset_hits(&pb, p, &exps, shift, &target) {
            Some(true) => {}
            Some(false) => return PairIso::NotIsomorphic,
            None => inconclusive = true,
        }
    }
    if inconclusive {
        PairIso::Inconclusive
    } else {
        PairIso::Isomorphic
    }
}

fn valuation(mut x: i128, p: i128) -> u32 {
    let mut v = 0;
    x = x.abs();
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn primes_dividing(factors: &[i128]) -> Vec<i128> {
    let mut ps = Vec::new();
    // The largest factor is divisible by every prime dividing the others.
    let mut x = factors.last().copied().unwrap_or(1);
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            ps.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        ps.push(x);
    }
    ps
}

/// Coordinates of the p-primary component: `x_i mod p^{e_i}`.
fn primary_part(t: &[i128], factors: &[i128], p: i128, exps: &[u32]) -> Vec<i128> {
    t.iter()
        .zip(factors)
        .zip(exps)
        .map(|((&x, _), &e)| x.rem_euclid(p.pow(e)))
        .collect()
}

/// Heights of `x, px, p^2 x, ...` until zero, in `sum Z/p^{e_i}`.
fn height_sequence(x: &[i128], p: i128, exps: &[u32]) -> Vec<u32> {
    let mut x = x.to_vec();
    let mut out = Vec::new();
    loop {
        let h = x
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| valuation(c, p))
            .min();
        let Some(h) = h else { break };
        out.push(h);
        for (c, &e) in x.iter_mut().zip(exps) {
            *c = (*c * p).rem_euclid(p.pow(e));
        }
    }
    out
}

/// Whether some element of `x + p^shift T_p` has the given height sequence;
/// `None` when the coset exceeds [`COSET_CAP`].
fn coset_hits(x: &[i128], p: i128, exps: &[u32], shift: u32, target: &[u32]) -> Option<bool> {
    // Generators of p^shift T_p: p^s in each coordinate with s < e_i.
    let steps: Vec<(usize, i128, i128)> = exps
        .iter()
        .enumerate()
        .filter(|&(_, &e)| shift < e)
        .map(|(i, &e)| (i, p.pow(shift), p.pow(e - shift)))
        .collect();
    let size = steps
        .iter()
        .try_fold(1u128, |a, &(_, _, cnt)| a.checked_mul(cnt as u128))?;
    if size > COSET_CAP {
        return None;
    }
    let mut counters = vec![0i128; steps.len()];
    loop {
        let mut y = x.to_vec();
        for (&(i, g, _), &k) in steps.iter().zip(&counters) {
            y[i] = (y[i] + g * k).rem_euclid(p.pow(exps[i]));
        }
        if height_sequence(&y, p, exps) == target {
            return Some(true);
        }
        let mut idx = 0;
        loop {
            if idx == steps.len() {
                return Some(false);
            }
            counters[idx] += 1;
            if counters[idx] < steps[idx].2 {
                break;
            }
            counters[idx] = 0;
            idx += 1;
        }
    }
}
