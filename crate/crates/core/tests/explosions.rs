use std::collections::BTreeSet;

use gce_core::explosion::*;
use gce_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z(s: &str) -> ZeroOneMatrix {
    ZeroOneMatrix::parse_inline(s, 16).unwrap()
}

fn from_code(n: usize, code: u64) -> ZeroOneMatrix {
    let mask = (1u64 << n) - 1;
    ZeroOneMatrix::from_bit_rows((0..n).map(|i| code >> (n * i) & mask).collect()).unwrap()
}

/// A random matrix with at least one vertex of out-degree two, and a random
/// split of such a vertex.
fn random_split(rng: &mut ChaCha8Rng, max_n: usize) -> (ZeroOneMatrix, VertexSplit) {
    loop {
        let n = rng.gen_range(2..=max_n);
        let mut b = ZeroOneMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                b.set(i, j, rng.gen_bool(0.45));
            }
        }
        let vs: Vec<usize> = (0..n).filter(|&v| b.out_degree(v) > 1).collect();
        if vs.is_empty() {
            continue;
        }
        let v = vs[rng.gen_range(0..vs.len())];
        let splits = VertexSplit::all(&b, v);
        let s = splits[rng.gen_range(0..splits.len())];
        return (b, s);
    }
}

#[test]
fn printed_complete_explosion_steps_are_edge_explosions() {
    let b1 = z("111/000/100");
    let (b2, _) = complete_explosion_steps(&b1, 0, 1).unwrap();
    let (b3, _) = complete_explosion_steps(&b1, 0, 2).unwrap();
    assert_eq!(b2, z("1110/0001/0000/1100"));
    assert_eq!(b3, z("11100/00010/00001/00000/11100"));
    for (prev, next) in [(&b1, &b2), (&b2, &b3)] {
        let (split, sigma) = is_explosion_of(prev, next).unwrap().unwrap();
        assert_eq!(vertex_explosion(prev, &split).unwrap().permute(&sigma).unwrap(), *next);
        // One step peels off exactly one edge: some split has a single edge half.
        let single = VertexSplit::all(prev, 0).into_iter().any(|s| {
            (s.first.count_ones() == 1 || s.second.count_ones() == 1)
                && canonical_matrix(&vertex_explosion(prev, &s).unwrap()).unwrap()
                    == canonical_matrix(next).unwrap()
        });
        assert!(single);
    }
}

#[test]
fn section8_both_matrices_explode_from_a3() {
    let a = z("111/110/101");
    for c in [z("1101/0010/1110/1101"), z("1100/0011/1110/1101")] {
        let (split, sigma) = is_explosion_of(&a, &c).unwrap().expect("explosion");
        assert_eq!(vertex_explosion(&a, &split).unwrap().permute(&sigma).unwrap(), c);
    }
}

#[test]
fn section8_reverse_explosions_of_a4() {
    // The printed 4x4 source has its first-row 1 one column too far right; with
    // it, K0 is trivial while both 5x5 matrices have K0 = Z2, which explosions
    // preserve. Moving that entry gives the unique source up to relabelling.
    let printed = z("0001/0101/0100/1010");
    let a = z("0010/0101/0100/1010");
    assert!(k0_invariant(&printed).unwrap().torsion_factors.is_empty());
    for c in [z("00010/01100/10001/01000/01000"), z("00001/01010/01010/10001/00100")] {
        let (split, sigma) = is_explosion_of(&a.transpose(), &c.transpose())
            .unwrap()
            .expect("transpose is an explosion");
        let r = reverse_explosion(&a, &split).unwrap();
        assert_eq!(r.permute(&sigma).unwrap(), c);
        assert!(is_explosion_of(&printed.transpose(), &c.transpose()).unwrap().is_none());
        assert_eq!(k0_invariant(&c).unwrap().torsion_factors, vec![2]);
    }
}

#[test]
fn remark_pair_is_rejected() {
    assert!(is_explosion_of(&z("11/00"), &z("111/000/000")).unwrap().is_none());
}

#[test]
fn size_mismatch_is_error() {
    assert!(is_explosion_of(&z("11/01"), &z("11/01")).is_err());
}

#[test]
fn recognition_matches_orbit_oracle_2_to_3() {
    for bc in 0..16 {
        let b = from_code(2, bc);
        let mut explosions = BTreeSet::new();
        for v in 0..2 {
            for s in VertexSplit::all(&b, v) {
                explosions.extend(canon::orbit(&vertex_explosion(&b, &s).unwrap()));
            }
        }
        for cc in 0..512 {
            let c = from_code(3, cc);
            let found = is_explosion_of(&b, &c).unwrap();
            assert_eq!(found.is_some(), explosions.contains(&c), "{b:?} {c:?}");
            if let Some((s, sigma)) = found {
                assert_eq!(vertex_explosion(&b, &s).unwrap().permute(&sigma).unwrap(), c);
            }
        }
    }
}

#[test]
fn constructive_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let (b, split) = random_split(&mut rng, 5);
        let c = vertex_explosion(&b, &split).unwrap();
        assert!(explosion_lemma_check(&b, &c, &split, split.v, split.v + 1).unwrap());
        let (s, sigma) = is_explosion_of(&b, &c).unwrap().expect("witness");
        assert_eq!(vertex_explosion(&b, &s).unwrap().permute(&sigma).unwrap(), c);
    }
}

#[test]
fn lemma_check_follows_relabelling() {
    let b = z("0111/1000/1100/1011");
    let split = VertexSplit::new(0, &[1], &[2, 3]);
    let c = vertex_explosion(&b, &split).unwrap();
    // Moving v' and v'' to the end keeps the old vertices in increasing order.
    let sigma = Permutation::new(vec![2, 3, 4, 0, 1]).unwrap();
    let moved = c.permute(&sigma).unwrap();
    assert!(explosion_lemma_check(&b, &moved, &split, 3, 4).unwrap());
    assert!(!explosion_lemma_check(&b, &moved, &split, 4, 3).unwrap());
    assert!(explosion_lemma_check(&b, &c, &split, 0, 5).is_err());
}

#[test]
fn mutated_duplicate_column_fails_lemma() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (b, split) = random_split(&mut rng, 5);
        let mut c = vertex_explosion(&b, &split).unwrap();
        let row = rng.gen_range(0..c.n());
        let col = split.v + rng.gen_range(0..2);
        c.set(row, col, !c.get(row, col));
        let r = explosion_lemma_report(&b, &c, &split, split.v, split.v + 1).unwrap();
        assert!(!r.duplicated_columns);
        assert!(!r.holds());
    }
}

#[test]
fn two_stage_explosion_exhaustive_n3() {
    let mut cases = 0;
    for code in 0..512 {
        let b = from_code(3, code);
        for v in 0..3 {
            for split in VertexSplit::all(&b, v) {
                assert!(two_stage_complete_explosion(&b, &split).unwrap().agrees().unwrap());
                cases += 1;
            }
        }
    }
    assert!(cases > 0);
}

#[test]
fn two_stage_explosion_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let (b, split) = random_split(&mut rng, 5);
        assert!(two_stage_complete_explosion(&b, &split).unwrap().agrees().unwrap(), "{b:?} {split:?}");
    }
}

#[test]
fn literal_two_stage_differs_only_with_loops() {
    // Exploding v' and v'' by their current out-degree over-splits when the
    // loop at v has been copied onto both halves; without a loop it agrees.
    let mut loop_mismatch = 0;
    for code in 0..512 {
        let b = from_code(3, code);
        for v in 0..3 {
            for split in VertexSplit::all(&b, v) {
                let f = vertex_explosion(&b, &split).unwrap();
                let mut g = f.clone();
                let mut v1 = v;
                if g.out_degree(v + 1) > 1 {
                    let (h, pos) =
                        complete_explosion_steps(&g, v + 1, g.out_degree(v + 1) - 1).unwrap();
                    g = h;
                    v1 = pos[v];
                }
                if g.out_degree(v1) > 1 {
                    g = complete_explosion(&g, v1).unwrap();
                }
                let direct = complete_explosion(&b, v).unwrap();
                let same = canonical_matrix(&g).unwrap() == canonical_matrix(&direct).unwrap();
                if !b.get(v, v) {
                    assert!(same, "{b:?} {split:?}");
                } else if !same {
                    loop_mismatch += 1;
                }
            }
        }
    }
    assert!(loop_mismatch > 0);
}

#[test]
fn adjoint_graph_via_explosions() {
    for code in 0..512 {
        let b = from_code(3, code);
        if !b.sinks().is_empty() {
            continue;
        }
        let adj = edge_matrix(&b).unwrap().matrix;
        assert_eq!(
            canonical_matrix(&explode_all(&b).unwrap()).unwrap(),
            canonical_matrix(&adj).unwrap(),
            "{b:?}"
        );
    }
}

#[test]
fn reverse_explosion_is_transposed_explosion_on_irreducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    while done < 100 {
        let (bt, split) = random_split(&mut rng, 5);
        let b = bt.transpose();
        if !is_irreducible(&b) {
            continue;
        }
        let r = reverse_explosion(&b, &split).unwrap();
        assert_eq!(r.transpose(), vertex_explosion(&bt, &split).unwrap());
        done += 1;
    }
}

#[test]
fn edge_matrix_entries() {
    let b = z("110/001/100");
    let em = edge_matrix(&b).unwrap();
    assert_eq!(em.edges, vec![(0, 0), (0, 1), (1, 2), (2, 0)]);
    for (e, &(_, r)) in em.edges.iter().enumerate() {
        for (f, &(s, _)) in em.edges.iter().enumerate() {
            assert_eq!(em.matrix.get(e, f), r == s);
        }
    }
}

proptest! {
    #[test]
    fn explosion_duplicates_columns_and_keeps_sinks(code in 0u64..1 << 25, pick in 0usize..1000) {
        let b = from_code(5, code);
        let splits: Vec<VertexSplit> = (0..5).flat_map(|v| VertexSplit::all(&b, v)).collect();
        prop_assume!(!splits.is_empty());
        let s = splits[pick % splits.len()];
        let c = vertex_explosion(&b, &s).unwrap();
        prop_assert_eq!(c.n(), 6);
        prop_assert_eq!(c.column(s.v), c.column(s.v + 1));
        let report = explosion_lemma_report(&b, &c, &s, s.v, s.v + 1).unwrap();
        prop_assert!(report.holds());
        let old_sinks = b.sinks().len();
        prop_assert_eq!(c.sinks().len(), old_sinks);
    }
}
