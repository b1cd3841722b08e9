//! Primitive transfers, their inverses, reverse transfers, and enumeration of
//! primitive-equivalence classes.
//!
//! A transfer at row `p` rewrites `B_p = sum_{k in K} E_k + sum_{m in M} B_m`
//! (a disjoint decomposition of the support of `B_p` into unit rows and other
//! nonzero rows of `B`) into the indicator row of `K ∪ M`.

use std::collections::VecDeque;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::cofinal_vertices;
use crate::matrix::{bits, full_mask, Permutation, ZeroOneMatrix};

/// Witness `(p, K, M)` of a decomposition of row `p`. `K` and `M` are stored as
/// vertex bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "MoveRepr", try_from = "MoveRepr")]
pub struct TransferMove {
    pub p: usize,
    pub units: u64,
    pub rows: u64,
}

/// Serialized form with explicit vertex lists.
#[derive(Serialize, Deserialize)]
struct MoveRepr {
    p: usize,
    k: Vec<usize>,
    m: Vec<usize>,
}

impl From<TransferMove> for MoveRepr {
    fn from(mv: TransferMove) -> Self {
        MoveRepr {
            p: mv.p,
            k: mv.k(),
            m: mv.m(),
        }
    }
}

impl TryFrom<MoveRepr> for TransferMove {
    type Error = String;

    fn try_from(r: MoveRepr) -> std::result::Result<Self, String> {
        if r.p >= 64 || r.k.iter().chain(&r.m).any(|&x| x >= 64) {
            return Err("vertex index out of range".into());
        }
        Ok(TransferMove::new(r.p, &r.k, &r.m))
    }
}

impl TransferMove {
    pub fn new(p: usize, units: &[usize], rows: &[usize]) -> Self {
        let mask = |v: &[usize]| v.iter().fold(0u64, |a, &x| a | 1 << x);
        Self {
            p,
            units: mask(units),
            rows: mask(rows),
        }
    }

    /// The unit-row indices `K`.
    pub fn k(&self) -> Vec<usize> {
        bits(self.units).collect()
    }

    /// The copied-row indices `M`.
    pub fn m(&self) -> Vec<usize> {
        bits(self.rows).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.rows == 0
    }

    /// Checks that this move is a legal decomposition of row `p` of `b`.
    pub fn validate(&self, b: &ZeroOneMatrix) -> Result<()> {
        let n = b.n();
        let bad = |msg: String| Err(Error::InvalidMove(msg));
        if self.p >= n {
            return bad(format!("row {} out of range", self.p));
        }
        let mask = full_mask(n);
        if self.units & !mask != 0 || self.rows & !mask != 0 {
            return bad("index out of range".into());
        }
        let target = b.row(self.p);
        if target == 0 {
            return bad(format!("row {} is zero", self.p));
        }
        if self.rows >> self.p & 1 == 1 {
            return bad("p appears among the copied rows".into());
        }
        if self.units & self.rows != 0 {
            return bad("K and M overlap".into());
        }
        if self.units | self.rows == 0 {
            return bad("empty decomposition".into());
        }
        let mut covered = self.units;
        for m in bits(self.rows) {
            let r = b.row(m);
            if r == 0 {
                return bad(format!("row {m} is zero"));
            }
            if covered & r != 0 {
                return bad("summands overlap".into());
            }
            covered |= r;
        }
        if covered != target {
            return bad(format!("summands do not add up to row {}", self.p));
        }
        Ok(())
    }
}

/// All nontrivial transfer moves of `b` (moves with `M` nonempty).
pub fn transfer_moves(b: &ZeroOneMatrix) -> Vec<TransferMove> {
    transfer_moves_with(b, false)
}

/// All transfer moves of `b`; the trivial move `(p, supp B_p, ∅)` of each
/// nonzero row is included when `include_trivial` is set.
pub fn transfer_moves_with(b: &ZeroOneMatrix, include_trivial: bool) -> Vec<TransferMove> {
    let mut out = Vec::new();
    for p in 0..b.n() {
        let target = b.row(p);
        if target == 0 {
            continue;
        }
        let candidates: Vec<usize> = (0..b.n())
            .filter(|&m| m != p && b.row(m) != 0 && b.row(m) & !target == 0)
            .collect();
        cover(b, &candidates, target, 0, 0, &mut |units, rows| {
            if include_trivial || rows != 0 {
                out.push(TransferMove { p, units, rows });
            }
        });
    }
    out
}

/// Exact cover of `uncovered` by unit rows and candidate rows, branching on the
/// lowest uncovered column.
fn cover(
    b: &ZeroOneMatrix,
    candidates: &[usize],
    uncovered: u64,
    units: u64,
    rows: u64,
    emit: &mut impl FnMut(u64, u64),
) {
    if uncovered == 0 {
        emit(units, rows);
        return;
    }
    let j = uncovered.trailing_zeros() as usize;
    for &m in candidates {
        let r = b.row(m);
        if r >> j & 1 == 1 && r & !uncovered == 0 && (units | rows) >> m & 1 == 0 {
            cover(b, candidates, uncovered & !r, units, rows | 1 << m, emit);
        }
    }
    if rows >> j & 1 == 0 {
        cover(b, candidates, uncovered & !(1 << j), units | 1 << j, rows, emit);
    }
}

/// Applies a transfer: row `p` becomes the indicator of `K ∪ M`.
pub fn apply_transfer(b: &ZeroOneMatrix, mv: &TransferMove) -> Result<ZeroOneMatrix> {
    mv.validate(b)?;
    Ok(apply_unchecked(b, mv))
}

fn apply_unchecked(b: &ZeroOneMatrix, mv: &TransferMove) -> ZeroOneMatrix {
    let mut c = b.clone();
    c.set_row(mv.p, mv.units | mv.rows);
    c
}

/// Every `D` such that `b` is a transfer of `D`, paired with the move on `D`
/// that produces `b`. Includes `b` itself (via trivial partitions) when `b`
/// has a nonzero row.
pub fn inverse_transfers(b: &ZeroOneMatrix) -> Vec<(ZeroOneMatrix, TransferMove)> {
    let mut out = Vec::new();
    for p in 0..b.n() {
        let support = b.row(p);
        if support == 0 {
            continue;
        }
        let choosable: Vec<usize> = bits(support & !(1 << p))
            .filter(|&m| b.row(m) != 0)
            .collect();
        split_support(b, &choosable, 0, 0, 0, &mut |rows, union| {
            let units = support & !rows;
            if units & union != 0 {
                return;
            }
            let mv = TransferMove { p, units, rows };
            let mut d = b.clone();
            d.set_row(p, units | union);
            debug_assert!(mv.validate(&d).is_ok());
            if mv.validate(&d).is_ok() {
                out.push((d, mv));
            }
        });
    }
    out
}

fn split_support(
    b: &ZeroOneMatrix,
    choosable: &[usize],
    idx: usize,
    rows: u64,
    union: u64,
    emit: &mut impl FnMut(u64, u64),
) {
    if idx == choosable.len() {
        emit(rows, union);
        return;
    }
    let m = choosable[idx];
    split_support(b, choosable, idx + 1, rows, union, emit);
    let r = b.row(m);
    if r & union == 0 {
        split_support(b, choosable, idx + 1, rows | 1 << m, union | r, emit);
    }
}

/// Distinct matrices `D` of which `b` is a primitive transfer.
pub fn inverse_transfer_neighbors(b: &ZeroOneMatrix) -> Vec<ZeroOneMatrix> {
    let mut v: Vec<_> = inverse_transfers(b).into_iter().map(|(d, _)| d).collect();
    v.sort();
    v.dedup();
    v
}

/// Nontrivial transfer moves of `b^T` at vertices that are cofinal in `b`.
pub fn reverse_transfer_moves(b: &ZeroOneMatrix) -> Vec<TransferMove> {
    let cofinal = cofinal_vertices(b);
    transfer_moves(&b.transpose())
        .into_iter()
        .filter(|mv| cofinal >> mv.p & 1 == 1)
        .collect()
}

/// `C` with `C^T` the transfer of `b^T` by `mv`; `mv.p` must be cofinal in `b`.
pub fn apply_reverse_transfer(b: &ZeroOneMatrix, mv: &TransferMove) -> Result<ZeroOneMatrix> {
    b.check_vertex(mv.p)?;
    if cofinal_vertices(b) >> mv.p & 1 == 0 {
        return Err(Error::NotCofinal { vertex: mv.p });
    }
    Ok(apply_transfer(&b.transpose(), mv)?.transpose())
}

/// How one matrix of a class was reached from its predecessor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    /// `next = apply_transfer(prev, mv)`.
    Forward { mv: TransferMove },
    /// `prev = apply_transfer(next, mv)`.
    Inverse { mv: TransferMove },
    /// `next = prev.permute(sigma)`.
    Permute { sigma: Permutation },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MoveCounts {
    pub forward: u64,
    pub inverse: u64,
    pub permutation: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub size: usize,
    pub exhausted: bool,
    pub representatives: Option<Vec<ZeroOneMatrix>>,
    /// New matrices discovered through each kind of move.
    pub moves_used: MoveCounts,
}

#[derive(Clone, Debug)]
pub struct ClassOptions {
    pub use_permutations: bool,
    pub max_size: usize,
    pub collect_members: bool,
    pub threads: usize,
}

pub const DEFAULT_MAX_CLASS: usize = 1_000_000;

impl Default for ClassOptions {
    fn default() -> Self {
        Self {
            use_permutations: true,
            max_size: DEFAULT_MAX_CLASS,
            collect_members: false,
            threads: 1,
        }
    }
}

fn neighbors(x: &ZeroOneMatrix, use_permutations: bool) -> Vec<(ZeroOneMatrix, Step)> {
    let mut out = Vec::new();
    for mv in transfer_moves(x) {
        out.push((apply_unchecked(x, &mv), Step::Forward { mv }));
    }
    for (d, mv) in inverse_transfers(x) {
        if !mv.is_trivial() {
            out.push((d, Step::Inverse { mv }));
        }
    }
    if use_permutations {
        // Adjacent transpositions generate the symmetric group, so the closure
        // is the same as adding every conjugate.
        for i in 0..x.n().saturating_sub(1) {
            out.push((
                x.swap_vertices(i, i + 1),
                Step::Permute {
                    sigma: Permutation::transposition(x.n(), i, i + 1),
                },
            ));
        }
    }
    out
}

struct Explorer {
    members: Vec<ZeroOneMatrix>,
    index: FxHashMap<ZeroOneMatrix, u32>,
    parent: Option<Vec<(u32, Step)>>,
    counts: MoveCounts,
}

enum Outcome {
    Exhausted,
    Capped,
    Found(u32),
}

impl Explorer {
    fn run(
        start: &ZeroOneMatrix,
        target: Option<&ZeroOneMatrix>,
        opts: &ClassOptions,
        track_parents: bool,
    ) -> (Self, Outcome) {
        let mut ex = Explorer {
            members: vec![start.clone()],
            index: FxHashMap::default(),
            parent: track_parents.then(|| vec![(0, Step::Permute { sigma: Permutation::identity(start.n()) })]),
            counts: MoveCounts::default(),
        };
        ex.index.insert(start.clone(), 0);
        if target == Some(start) {
            return (ex, Outcome::Found(0));
        }
        let pool = (opts.threads > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build().ok())
            .flatten();
        let mut frontier: VecDeque<u32> = VecDeque::from([0]);
        while !frontier.is_empty() {
            let level: Vec<u32> = frontier.drain(..).collect();
            let expand = |&i: &u32| neighbors(&ex.members[i as usize], opts.use_permutations);
            let expanded: Vec<Vec<(ZeroOneMatrix, Step)>> = match &pool {
                Some(pool) => pool.install(|| level.par_iter().map(expand).collect()),
                None => level.iter().map(expand).collect(),
            };
            for (&from, list) in level.iter().zip(expanded) {
                for (y, step) in list {
                    if ex.index.contains_key(&y) {
                        continue;
                    }
                    if ex.members.len() >= opts.max_size {
                        return (ex, Outcome::Capped);
                    }
                    let id = ex.members.len() as u32;
                    match step {
                        Step::Forward { .. } => ex.counts.forward += 1,
                        Step::Inverse { .. } => ex.counts.inverse += 1,
                        Step::Permute { .. } => ex.counts.permutation += 1,
                    }
                    if let Some(parent) = ex.parent.as_mut() {
                        parent.push((from, step));
                    }
                    let hit = target == Some(&y);
                    ex.index.insert(y.clone(), id);
                    ex.members.push(y);
                    if hit {
                        return (ex, Outcome::Found(id));
                    }
                    frontier.push_back(id);
                }
            }
        }
        (ex, Outcome::Exhausted)
    }

    fn path_to(&self, mut id: u32) -> Vec<(Step, ZeroOneMatrix)> {
        let parent = self.parent.as_ref().expect("parents tracked");
        let mut path = Vec::new();
        while id != 0 {
            let (from, step) = &parent[id as usize];
            path.push((step.clone(), self.members[id as usize].clone()));
            id = *from;
        }
        path.reverse();
        path
    }
}

/// Breadth-first closure of `{b}` under forward transfers, inverse transfers
/// and (optionally) relabelling, counting distinct matrices.
pub fn equivalence_class(b: &ZeroOneMatrix, opts: &ClassOptions) -> ClassReport {
    let (ex, outcome) = Explorer::run(b, None, opts, false);
    let exhausted = matches!(outcome, Outcome::Exhausted);
    let representatives = opts.collect_members.then(|| {
        let mut v = ex.members.clone();
        v.sort();
        v
    });
    ClassReport {
        size: ex.members.len(),
        exhausted,
        representatives,
        moves_used: ex.counts,
    }
}

/// All members of the class of `b`, or `None` when `max_size` is exceeded.
pub fn class_members(b: &ZeroOneMatrix, opts: &ClassOptions) -> Option<Vec<ZeroOneMatrix>> {
    let (ex, outcome) = Explorer::run(b, None, opts, false);
    matches!(outcome, Outcome::Exhausted).then_some(ex.members)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Equivalence {
    /// Steps leading from the first matrix to the second; each entry holds the
    /// move and the matrix it produced.
    Equivalent { witness: Vec<(Step, ZeroOneMatrix)> },
    NotEquivalent { class_size: usize },
    Inconclusive { visited: usize },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, Equivalence::NotEquivalent { .. })
    }
}

/// Searches the class of `a` for `b`, with relabelling moves enabled.
pub fn are_primitively_equivalent(
    a: &ZeroOneMatrix,
    b: &ZeroOneMatrix,
    max_size: usize,
) -> Result<Equivalence> {
    let opts = ClassOptions {
        max_size,
        ..ClassOptions::default()
    };
    are_primitively_equivalent_with(a, b, &opts)
}

pub fn are_primitively_equivalent_with(
    a: &ZeroOneMatrix,
    b: &ZeroOneMatrix,
    opts: &ClassOptions,
) -> Result<Equivalence> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", a.n()),
            found: format!("{0}x{0}", b.n()),
        });
    }
    let (ex, outcome) = Explorer::run(a, Some(b), opts, true);
    Ok(match outcome {
        Outcome::Found(id) => Equivalence::Equivalent {
            witness: ex.path_to(id),
        },
        Outcome::Exhausted => Equivalence::NotEquivalent {
            class_size: ex.members.len(),
        },
        Outcome::Capped => Equivalence::Inconclusive {
            visited: ex.members.len(),
        },
    })
}

/// Replays a witness path from `start`, returning the final matrix.
pub fn replay(start: &ZeroOneMatrix, witness: &[(Step, ZeroOneMatrix)]) -> Result<ZeroOneMatrix> {
    let mut cur = start.clone();
    for (step, expected) in witness {
        let next = match step {
            Step::Forward { mv } => apply_transfer(&cur, mv)?,
            Step::Inverse { mv } => {
                if apply_transfer(expected, mv)? != cur {
                    return Err(Error::InvalidMove("inverse step does not reproduce predecessor".into()));
                }
                expected.clone()
            }
            Step::Permute { sigma } => cur.permute(sigma)?,
        };
        if &next != expected {
            return Err(Error::InvalidMove("witness step mismatch".into()));
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> ZeroOneMatrix {
        ZeroOneMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_has_only_trivial_moves() {
        let id = ZeroOneMatrix::identity(2).unwrap();
        assert!(transfer_moves(&id).is_empty());
        let all = transfer_moves_with(&id, true);
        assert_eq!(all, vec![TransferMove::new(0, &[0], &[]), TransferMove::new(1, &[1], &[])]);
        assert_eq!(inverse_transfer_neighbors(&id), vec![id]);
    }

    #[test]
    fn trivial_move_is_identity() {
        let b = m(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 0]]);
        for mv in transfer_moves_with(&b, true).into_iter().filter(|mv| mv.is_trivial()) {
            assert_eq!(apply_transfer(&b, &mv).unwrap(), b);
        }
    }

    #[test]
    fn validate_rejects_bad_moves() {
        let b = m(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 0]]);
        // row 0 = E_0 + B_1 is legal
        assert!(apply_transfer(&b, &TransferMove::new(0, &[0], &[1])).is_ok());
        // zero target row
        assert!(apply_transfer(&b, &TransferMove::new(2, &[], &[1])).is_err());
        // overlap between E_1 and B_1
        assert!(apply_transfer(&b, &TransferMove::new(0, &[0, 1], &[1])).is_err());
        // p among the rows
        assert!(apply_transfer(&b, &TransferMove::new(1, &[], &[1])).is_err());
        // does not cover
        assert!(apply_transfer(&b, &TransferMove::new(0, &[], &[1])).is_err());
        // zero copied row
        assert!(apply_transfer(&b, &TransferMove::new(0, &[0, 1], &[2])).is_err());
    }

    #[test]
    fn single_loop_class() {
        let b = m(&[&[1]]);
        let r = equivalence_class(&b, &ClassOptions::default());
        assert_eq!((r.size, r.exhausted), (1, true));
    }

    #[test]
    fn cap_is_reported() {
        let c = m(&[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 1, 1, 0], &[1, 1, 0, 1]]);
        let opts = ClassOptions {
            max_size: 10,
            ..ClassOptions::default()
        };
        let r = equivalence_class(&c, &opts);
        assert_eq!((r.size, r.exhausted), (10, false));
    }

    #[test]
    fn witness_replays() {
        let a = m(&[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 1, 1, 0], &[1, 1, 0, 1]]);
        let members = class_members(&a, &ClassOptions::default()).unwrap();
        for target in members.iter().step_by(7) {
            match are_primitively_equivalent(&a, target, 10_000).unwrap() {
                Equivalence::Equivalent { witness } => {
                    assert_eq!(&replay(&a, &witness).unwrap(), target);
                }
                other => panic!("expected equivalence, got {other:?}"),
            }
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = ZeroOneMatrix::identity(2).unwrap();
        let b = ZeroOneMatrix::identity(3).unwrap();
        assert!(are_primitively_equivalent(&a, &b, 10).is_err());
    }

    #[test]
    fn threaded_matches_sequential() {
        let c = m(&[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 1, 1, 0], &[1, 1, 0, 1]]);
        let mut opts = ClassOptions {
            collect_members: true,
            ..ClassOptions::default()
        };
        let one = equivalence_class(&c, &opts);
        opts.threads = 4;
        assert_eq!(equivalence_class(&c, &opts), one);
        opts.max_size = 25;
        let capped4 = equivalence_class(&c, &opts);
        opts.threads = 1;
        assert_eq!(equivalence_class(&c, &opts), capped4);
    }
}
