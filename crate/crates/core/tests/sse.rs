use gce_core::explosion::VertexSplit;
use gce_core::*;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

fn z(s: &str) -> ZeroOneMatrix {
    ZeroOneMatrix::parse_inline(s, 16).unwrap()
}

fn i(s: &str) -> IntMatrix {
    IntMatrix::parse_inline(s).unwrap()
}

fn from_code(n: usize, code: u64) -> ZeroOneMatrix {
    let mask = (1u64 << n) - 1;
    ZeroOneMatrix::from_bit_rows((0..n).map(|i| code >> (n * i) & mask).collect()).unwrap()
}

/// Whether `B = RS`, `C = SR` for some column-subdivision `R`. Without sinks
/// only `R` can be column subdivision, and every row of `R` is nonzero, so
/// `R` is a map f from the n + 1 columns to rows (or to nothing, when zero
/// columns are allowed) and `S(j, i) = C(j, k)` for any `k` with `f(k) = i`.
fn esse_cs_oracle(b: &ZeroOneMatrix, c: &ZeroOneMatrix, zero_columns: bool) -> bool {
    let n = b.n();
    let m = c.n();
    let choices = if zero_columns { n + 1 } else { n }; // n means "zero column"
    let total = choices.pow(m as u32);
    'maps: for code in 0..total {
        let f: Vec<usize> = (0..m).map(|k| code / choices.pow(k as u32) % choices).collect();
        let mut s = vec![vec![None::<bool>; n]; m];
        for k in 0..m {
            for j in 0..m {
                if f[k] == n {
                    if c.get(j, k) {
                        continue 'maps;
                    }
                    continue;
                }
                match s[j][f[k]] {
                    Some(x) if x != c.get(j, k) => continue 'maps,
                    _ => s[j][f[k]] = Some(c.get(j, k)),
                }
            }
        }
        if s.iter().any(|row| row.iter().any(Option::is_none)) {
            continue;
        }
        let ok = (0..n).all(|r| {
            (0..n).all(|col| {
                let sum: usize = (0..m).filter(|&k| f[k] == r && s[k][col] == Some(true)).count();
                sum == b.get(r, col) as usize
            })
        });
        if ok {
            return true;
        }
    }
    false
}

fn check_pair(b: &ZeroOneMatrix, c: &ZeroOneMatrix) -> bool {
    let decided = esse_cs_decide(b, c).unwrap();
    let explosion = is_explosion_of(b, c).unwrap();
    assert_eq!(decided.is_some(), explosion.is_some(), "{b:?} {c:?}");
    assert_eq!(decided.is_some(), esse_cs_oracle(b, c, false), "{b:?} {c:?}");
    if c.sources().is_empty() {
        // A zero column of R forces a zero column of C = SR.
        assert_eq!(decided.is_some(), esse_cs_oracle(b, c, true), "{b:?} {c:?}");
    }
    if let Some(pair) = decided {
        assert!(verify_esse(b, c, &pair).unwrap());
        assert!(is_column_subdivision(&pair.r));
        true
    } else {
        false
    }
}

#[test]
fn printed_imprimitivity_graph() {
    let pair = FactorPair::new(i("110/001"), i("10/01/01")).unwrap();
    assert_eq!(
        imprimitivity_graph(&pair).unwrap(),
        z("00110/00001/10000/01000/01000")
    );
    assert!(verify_esse(&z("11/01"), &z("110/001/001"), &pair).unwrap());
}

#[test]
fn imprimitivity_graph_squares_to_both_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    while done < 100 {
        let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let r: Vec<Vec<i64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..2)).collect()).collect();
        let s: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
        let pair = FactorPair::new(IntMatrix::from_rows(&r).unwrap(), IntMatrix::from_rows(&s).unwrap())
            .unwrap();
        let (rs, sr) = (pair.r.mul(&pair.s).unwrap(), pair.s.mul(&pair.r).unwrap());
        let x = IntMatrix::from(&imprimitivity_graph(&pair).unwrap());
        let x2 = x.mul(&x).unwrap();
        for a in 0..n + m {
            for b in 0..n + m {
                let want = match (a < n, b < n) {
                    (true, true) => rs.get(a, b),
                    (false, false) => sr.get(a - n, b - n),
                    _ => 0,
                };
                assert_eq!(x2.get(a, b), want);
            }
        }
        done += 1;
    }
}

#[test]
fn remark_pair_needs_no_sinks() {
    let b = z("11/00");
    let c = z("111/000/000");
    let pair = FactorPair::new(i("111/000"), i("10/01/00")).unwrap();
    assert!(verify_esse(&b, &c, &pair).unwrap());
    assert!(is_column_subdivision(&pair.r));
    assert!(is_explosion_of(&b, &c).unwrap().is_none());
    assert!(matches!(esse_cs_decide(&b, &c), Err(Error::SinkPresent { which: "B", .. })));
}

#[test]
fn ashton_counterexample_changes_the_algebra() {
    let pair = FactorPair::new(i("100/100/011"), i("001/100/011")).unwrap();
    let rs = pair.r.mul(&pair.s).unwrap().to_zero_one().unwrap();
    let sr = pair.s.mul(&pair.r).unwrap().to_zero_one().unwrap();
    assert!(verify_esse(&rs, &sr, &pair).unwrap());
    let (a, b) = (k0_invariant(&rs).unwrap(), k0_invariant(&sr).unwrap());
    assert_eq!((a.group_string(), b.group_string()), ("Z2".into(), "Z2".into()));
    assert_eq!(k0_pairs_isomorphic(&a, &b), PairIso::NotIsomorphic);
    assert!(are_primitively_equivalent(&rs, &sr, 1_000_000).unwrap().is_not_equivalent());
}

#[test]
fn oracle_accepts_printed_construction() {
    let b = z("11/01");
    let c = z("110/001/001");
    assert!(esse_cs_oracle(&b, &c, false));
    assert!(check_pair(&b, &c));
}

#[test]
fn zero_column_factor_is_not_an_explosion() {
    // R = [I | 0] up to relabelling: C is B plus a new source pointing at
    // B's source vertex 2. Column subdivision allows the zero column, yet no
    // split of B produces a vertex without incoming edges.
    let b = z("110/100/100");
    let c = z("0001/0001/0100/1001");
    let pair = FactorPair::new(i("0001/1000/0100"), i("100/100/001/110")).unwrap();
    assert!(verify_esse(&b, &c, &pair).unwrap());
    assert!(is_column_subdivision(&pair.r));
    assert!(esse_cs_oracle(&b, &c, true));
    assert!(!esse_cs_oracle(&b, &c, false));
    assert!(is_explosion_of(&b, &c).unwrap().is_none());
    assert!(esse_cs_decide(&b, &c).unwrap().is_none());
}

#[test]
fn decide_matches_explosions_and_oracle_exhaustive_n3() {
    // Every sink-free 3x3 matrix with a splittable vertex against every
    // sink-free 4x4 conjugacy class.
    let targets: Vec<ZeroOneMatrix> = (0..1u64 << 16)
        .map(|code| from_code(4, code))
        .filter(|c| c.sinks().is_empty() && canonical_matrix(c).unwrap() == *c)
        .collect();
    let inputs: Vec<ZeroOneMatrix> = (0..512)
        .map(|code| from_code(3, code))
        .filter(|b| b.sinks().is_empty() && (0..3).any(|v| b.out_degree(v) > 1))
        .collect();
    let positives: usize = inputs
        .par_iter()
        .map(|b| targets.iter().filter(|c| check_pair(b, c)).count())
        .sum();
    let inputs = inputs.len();
    assert!(inputs > 300);
    assert!(positives > inputs);
}

#[test]
fn decide_matches_explosions_and_oracle_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut positive, mut negative) = (0, 0);
    while positive + negative < 300 {
        let n = rng.gen_range(2..=5);
        let mut b = ZeroOneMatrix::zeros(n).unwrap();
        for r in 0..n {
            for c in 0..n {
                b.set(r, c, rng.gen_bool(0.5));
            }
        }
        let vs: Vec<usize> = (0..n).filter(|&v| b.out_degree(v) > 1).collect();
        if !b.sinks().is_empty() || vs.is_empty() {
            continue;
        }
        let v = vs[rng.gen_range(0..vs.len())];
        let splits = VertexSplit::all(&b, v);
        let mut c = vertex_explosion(&b, &splits[rng.gen_range(0..splits.len())]).unwrap();
        let mut p: Vec<usize> = (0..=n).collect();
        for k in (1..=n).rev() {
            p.swap(k, rng.gen_range(0..=k));
        }
        c = c.permute(&Permutation::new(p).unwrap()).unwrap();
        if rng.gen_bool(0.5) {
            let (r, col) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
            c.set(r, col, !c.get(r, col));
            if !c.sinks().is_empty() {
                continue;
            }
        }
        if check_pair(&b, &c) {
            positive += 1;
        } else {
            negative += 1;
        }
    }
    assert!(positive >= 100 && negative >= 50, "{positive} {negative}");
}
