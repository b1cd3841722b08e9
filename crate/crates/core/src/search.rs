//! Exhaustive search for pairs of matrices with isomorphic pointed K0 groups
//! that are not primitively equivalent.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::graph::is_irreducible;
use crate::ktheory::{k0_invariant, k0_pairs_isomorphic, K0Invariant, Order, PairIso};
use crate::matrix::ZeroOneMatrix;
use crate::primeq::{class_members, ClassOptions, DEFAULT_MAX_CLASS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    pub n: usize,
    pub irreducible_only: bool,
    pub exclude_permutation_matrices: bool,
    /// Matrices enumerated at most; beyond it the report is incomplete.
    pub max_matrices: u64,
    /// Class-size cap passed to each class enumeration.
    pub max_class_size: usize,
    pub threads: usize,
}

impl SearchOptions {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            irreducible_only: true,
            exclude_permutation_matrices: false,
            max_matrices: 1 << 16,
            max_class_size: DEFAULT_MAX_CLASS,
            threads: 1,
        }
    }
}

/// The part of the K0 data preserved by pointed-group isomorphism, used to
/// group candidates before pairwise tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BucketKey {
    pub torsion_factors: Vec<i128>,
    pub free_rank: usize,
    pub identity_order: Order,
}

impl From<&K0Invariant> for BucketKey {
    fn from(k: &K0Invariant) -> Self {
        Self {
            torsion_factors: k.torsion_factors.clone(),
            free_rank: k.free_rank,
            identity_order: k.identity_order,
        }
    }
}

/// One primitive-equivalence class met by the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub representative: ZeroOneMatrix,
    /// Canonical forms in the class that passed the search filters.
    pub canonical_members: Vec<ZeroOneMatrix>,
    /// Class size; `None` when the class was not enumerated (a bucket with a
    /// single candidate needs no comparison).
    pub size: Option<usize>,
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bucket {
    pub key: BucketKey,
    pub classes: Vec<ClassSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub matrices_enumerated: u64,
    pub canonical_classes: usize,
    pub candidates: usize,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub buckets: Vec<Bucket>,
    /// Representatives of distinct exhausted classes with isomorphic pointed K0.
    pub counterexample_pairs: Vec<(ZeroOneMatrix, ZeroOneMatrix)>,
    /// Pairs whose K0 comparison was inconclusive or whose class was capped.
    pub undecided_pairs: Vec<(ZeroOneMatrix, ZeroOneMatrix)>,
    pub complete: bool,
    pub stats: SearchStats,
}

impl SearchReport {
    /// The class containing the canonical form of `b`, if it was a candidate.
    pub fn class_of(&self, b: &ZeroOneMatrix) -> Option<&ClassSummary> {
        let c = canonical_form(b).ok()?.0;
        self.buckets
            .iter()
            .flat_map(|bk| &bk.classes)
            .find(|cl| cl.canonical_members.binary_search(&c).is_ok())
    }
}

/// One canonical representative of every conjugacy class of `n x n` 0-1
/// matrices whose code (row-major bits) is below `limit`.
pub fn canonical_representatives(n: usize, limit: u64, threads: usize) -> Result<Vec<ZeroOneMatrix>> {
    let total = total_matrices(n)?;
    let end = total.min(limit);
    let run = || -> Result<Vec<ZeroOneMatrix>> {
        let found: Vec<Option<ZeroOneMatrix>> = (0..end)
            .into_par_iter()
            .map(|code| {
                let b = from_code(n, code);
                let (c, _) = canonical_form(&b)?;
                Ok((c == b).then_some(b))
            })
            .collect::<Result<_>>()?;
        let mut v: Vec<_> = found.into_iter().flatten().collect();
        v.sort();
        Ok(v)
    };
    with_pool(threads, run)
}

fn total_matrices(n: usize) -> Result<u64> {
    if n == 0 || n * n >= 64 {
        return Err(Error::SizeLimit { n, limit: 7 });
    }
    Ok(1u64 << (n * n))
}

fn from_code(n: usize, code: u64) -> ZeroOneMatrix {
    let mask = (1u64 << n) - 1;
    let rows = (0..n).map(|i| code >> (n * i) & mask).collect();
    ZeroOneMatrix::from_bit_rows(rows).expect("size checked")
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn run_search(opts: &SearchOptions) -> Result<SearchReport> {
    let start = Instant::now();
    let total = total_matrices(opts.n)?;
    let enumerated = total.min(opts.max_matrices);
    let reps = canonical_representatives(opts.n, enumerated, opts.threads)?;
    let canonical_classes = reps.len();
    let candidates: Vec<ZeroOneMatrix> = reps
        .into_iter()
        .filter(|b| !opts.irreducible_only || is_irreducible(b))
        .filter(|b| !opts.exclude_permutation_matrices || !b.is_permutation_matrix())
        .collect();
    let candidate_set: FxHashSet<&ZeroOneMatrix> = candidates.iter().collect();

    let mut grouped: BTreeMap<BucketKey, Vec<(ZeroOneMatrix, K0Invariant)>> = BTreeMap::new();
    for b in &candidates {
        let k = k0_invariant(b)?;
        grouped.entry(BucketKey::from(&k)).or_default().push((b.clone(), k));
    }

    let class_opts = ClassOptions {
        use_permutations: true,
        max_size: opts.max_class_size,
        collect_members: true,
        threads: opts.threads,
    };
    let mut complete = enumerated == total;
    let mut buckets = Vec::new();
    let mut counterexample_pairs = Vec::new();
    let mut undecided_pairs = Vec::new();
    for (key, members) in grouped {
        let mut assigned: FxHashSet<ZeroOneMatrix> = FxHashSet::default();
        let mut classes: Vec<(ClassSummary, K0Invariant)> = Vec::new();
        for (b, k) in &members {
            if assigned.contains(b) {
                continue;
            }
            let (canon_members, size, exhausted) = if members.len() == 1 {
                (vec![b.clone()], None, false)
            } else {
                match class_members(b, &class_opts) {
                    Some(all) => {
                        let mut canon: Vec<ZeroOneMatrix> = all
                            .iter()
                            .map(|m| canonical_form(m).map(|(c, _)| c))
                            .collect::<Result<_>>()?;
                        canon.sort();
                        canon.dedup();
                        canon.retain(|c| candidate_set.contains(c));
                        (canon, Some(all.len()), true)
                    }
                    None => {
                        complete = false;
                        (vec![b.clone()], Some(opts.max_class_size), false)
                    }
                }
            };
            assigned.extend(canon_members.iter().cloned());
            classes.push((
                ClassSummary {
                    representative: b.clone(),
                    canonical_members: canon_members,
                    size,
                    exhausted,
                },
                k.clone(),
            ));
        }
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let (ci, ki) = &classes[i];
                let (cj, kj) = &classes[j];
                let pair = (ci.representative.clone(), cj.representative.clone());
                match k0_pairs_isomorphic(ki, kj) {
                    PairIso::Isomorphic if ci.exhausted && cj.exhausted => {
                        counterexample_pairs.push(pair)
                    }
                    PairIso::NotIsomorphic => {}
                    _ => undecided_pairs.push(pair),
                }
            }
        }
        buckets.push(Bucket {
            key,
            classes: classes.into_iter().map(|(c, _)| c).collect(),
        });
    }
    Ok(SearchReport {
        n: opts.n,
        buckets,
        counterexample_pairs,
        undecided_pairs,
        complete,
        stats: SearchStats {
            matrices_enumerated: enumerated,
            canonical_classes,
            candidates: candidates.len(),
            elapsed_ms: start.elapsed().as_millis(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_counts() {
        // Directed graphs with loops allowed, up to isomorphism.
        assert_eq!(canonical_representatives(1, u64::MAX, 1).unwrap().len(), 2);
        assert_eq!(canonical_representatives(2, u64::MAX, 1).unwrap().len(), 10);
        assert_eq!(canonical_representatives(3, u64::MAX, 2).unwrap().len(), 104);
    }

    #[test]
    fn n2_has_no_counterexamples() {
        let r = run_search(&SearchOptions::new(2)).unwrap();
        assert!(r.complete);
        assert!(r.counterexample_pairs.is_empty());
    }

    #[test]
    fn truncated_enumeration_is_incomplete() {
        let mut o = SearchOptions::new(3);
        o.max_matrices = 100;
        let r = run_search(&o).unwrap();
        assert!(!r.complete);
        assert_eq!(r.stats.matrices_enumerated, 100);
    }
}
