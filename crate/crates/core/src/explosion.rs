//! Vertex, edge, complete and reverse explosions, explosion recognition, and
//! the edge matrix (vertex matrix of the adjoint graph).
//!
//! Index convention: exploding vertex `v` of an `n`-vertex graph produces an
//! `(n+1)`-vertex graph in which `v'` keeps index `v`, `v''` is inserted at
//! `v + 1`, and every old vertex `w > v` moves to `w + 1`.

use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::graph::cofinal_vertices;
use crate::matrix::{bits, Permutation, ZeroOneMatrix, MAX_DIM};

/// Partition of the out-edges of `v` into two nonempty halves, each given as a
/// bitmask of range vertices. A loop at `v` is the bit `v` of one half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SplitRepr", try_from = "SplitRepr")]
pub struct VertexSplit {
    pub v: usize,
    pub first: u64,
    pub second: u64,
}

#[derive(Serialize, Deserialize)]
struct SplitRepr {
    v: usize,
    m1: Vec<usize>,
    m2: Vec<usize>,
}

impl From<VertexSplit> for SplitRepr {
    fn from(s: VertexSplit) -> Self {
        SplitRepr {
            v: s.v,
            m1: bits(s.first).collect(),
            m2: bits(s.second).collect(),
        }
    }
}

impl TryFrom<SplitRepr> for VertexSplit {
    type Error = String;

    fn try_from(r: SplitRepr) -> std::result::Result<Self, String> {
        if r.v >= MAX_DIM || r.m1.iter().chain(&r.m2).any(|&x| x >= MAX_DIM) {
            return Err("vertex index out of range".into());
        }
        Ok(VertexSplit::new(r.v, &r.m1, &r.m2))
    }
}

impl VertexSplit {
    pub fn new(v: usize, first: &[usize], second: &[usize]) -> Self {
        let mask = |s: &[usize]| s.iter().fold(0u64, |a, &x| a | 1 << x);
        Self {
            v,
            first: mask(first),
            second: mask(second),
        }
    }

    pub fn validate(&self, b: &ZeroOneMatrix) -> Result<()> {
        b.check_vertex(self.v)?;
        let row = b.row(self.v);
        let degree = row.count_ones() as usize;
        if degree < 2 {
            return Err(Error::OutDegree {
                vertex: self.v,
                degree,
            });
        }
        if self.first == 0 || self.second == 0 {
            return Err(Error::InvalidSplit("both halves must be nonempty".into()));
        }
        if self.first & self.second != 0 {
            return Err(Error::InvalidSplit("halves overlap".into()));
        }
        if self.first | self.second != row {
            return Err(Error::InvalidSplit(format!(
                "halves do not match the out-edges of vertex {}",
                self.v
            )));
        }
        Ok(())
    }

    /// Every split of `v` in `b`, ordered by the bitmask selecting `first`
    /// among the out-edges (lowest first).
    pub fn all(b: &ZeroOneMatrix, v: usize) -> Vec<VertexSplit> {
        let edges: Vec<usize> = bits(b.row(v)).collect();
        let k = edges.len();
        if k < 2 {
            return Vec::new();
        }
        (1..(1u64 << k) - 1)
            .map(|sel| {
                let first = bits(sel).fold(0u64, |a, i| a | 1 << edges[i]);
                VertexSplit {
                    v,
                    first,
                    second: b.row(v) & !first,
                }
            })
            .collect()
    }
}

/// Inserts a copy of bit `v` at position `v + 1`, shifting higher bits up.
#[inline]
fn spread(r: u64, v: usize) -> u64 {
    let low = r & ((1u64 << (v + 1)) - 1);
    let high = (r >> (v + 1)) << (v + 2);
    let dup = (r >> v & 1) << (v + 1);
    low | dup | high
}

fn check_grow(n: usize) -> Result<()> {
    if n + 1 > MAX_DIM {
        Err(Error::SizeLimit {
            n: n + 1,
            limit: MAX_DIM,
        })
    } else {
        Ok(())
    }
}

/// Splits `v` into `v'` (out-edges `first`) and `v''` (out-edges `second`).
/// Both copies inherit every incoming edge of `v`; a loop at `v` in `first`
/// becomes `v' -> v'` and `v' -> v''`, in `second` it becomes `v'' -> v'` and
/// `v'' -> v''`.
pub fn vertex_explosion(b: &ZeroOneMatrix, split: &VertexSplit) -> Result<ZeroOneMatrix> {
    split.validate(b)?;
    check_grow(b.n())?;
    Ok(explode_unchecked(b, split))
}

fn explode_unchecked(b: &ZeroOneMatrix, split: &VertexSplit) -> ZeroOneMatrix {
    let v = split.v;
    let mut rows = Vec::with_capacity(b.n() + 1);
    for u in 0..b.n() {
        if u == v {
            rows.push(spread(split.first, v));
            rows.push(spread(split.second, v));
        } else {
            rows.push(spread(b.row(u), v));
        }
    }
    ZeroOneMatrix::from_bit_rows(rows).expect("explosion stays within bounds")
}

/// Complete explosion of `b` at `v`: the iterative splitting procedure with `v` moved
/// to index 0 (by swapping it with vertex 0), run `outdeg(v) - 1` times.
pub fn complete_explosion(b: &ZeroOneMatrix, v: usize) -> Result<ZeroOneMatrix> {
    b.check_vertex(v)?;
    let k = b.out_degree(v);
    if k < 2 {
        return Err(Error::OutDegree { vertex: v, degree: k });
    }
    complete_explosion_steps(b, v, k - 1).map(|(m, _)| m)
}

/// Runs `steps` iterations of the complete-explosion procedure at `v`.
///
/// Each iteration takes the largest column `j` with a 1 in row 0, inserts the
/// unit row `E_j` as row 1, duplicates column 0, and clears entry `(0, j+1)`.
/// Returns the matrix and the new index of every old vertex.
pub fn complete_explosion_steps(
    b: &ZeroOneMatrix,
    v: usize,
    steps: usize,
) -> Result<(ZeroOneMatrix, Vec<usize>)> {
    b.check_vertex(v)?;
    if b.n() + steps > MAX_DIM {
        return Err(Error::SizeLimit {
            n: b.n() + steps,
            limit: MAX_DIM,
        });
    }
    let mut cur = b.swap_vertices(0, v);
    for _ in 0..steps {
        let row0 = cur.row(0);
        if row0.count_ones() < 2 {
            return Err(Error::OutDegree {
                vertex: v,
                degree: row0.count_ones() as usize,
            });
        }
        let j = 63 - row0.leading_zeros() as usize;
        let split = VertexSplit {
            v: 0,
            first: row0 & !(1 << j),
            second: 1 << j,
        };
        cur = explode_unchecked(&cur, &split);
    }
    let positions = (0..b.n())
        .map(|w| {
            let p = if w == v {
                0
            } else if w == 0 {
                v
            } else {
                w
            };
            if p == 0 {
                0
            } else {
                p + steps
            }
        })
        .collect();
    Ok((cur, positions))
}

/// Explodes vertex `x` completely with its out-edges grouped by the origin of
/// their targets: every group of targets sharing an origin label stays
/// together in one piece. Labels of `x`'s pieces copy the label of `x`.
///
/// Vertices produced by earlier explosions share their parent's label and
/// have identical incoming columns, so this realises "one piece per original
/// out-edge" on a graph that has already been partly exploded.
pub fn complete_explosion_grouped(
    b: &ZeroOneMatrix,
    origin: &[usize],
    x: usize,
) -> Result<(ZeroOneMatrix, Vec<usize>, Vec<usize>)> {
    b.check_vertex(x)?;
    if origin.len() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} origin labels", b.n()),
            found: format!("{}", origin.len()),
        });
    }
    let mut cur = b.clone();
    let mut labels = origin.to_vec();
    let mut pieces = vec![x];
    loop {
        let row = cur.row(x);
        let Some(top) = bits(row).last() else { break };
        let group: u64 = bits(row)
            .filter(|&w| labels[w] == labels[top])
            .fold(0, |a, w| a | 1 << w);
        if group == row {
            break;
        }
        check_grow(cur.n())?;
        let split = VertexSplit {
            v: x,
            first: row & !group,
            second: group,
        };
        cur = explode_unchecked(&cur, &split);
        labels.insert(x + 1, labels[x]);
        for p in pieces.iter_mut() {
            if *p > x {
                *p += 1;
            }
        }
        pieces.push(x + 1);
    }
    pieces.sort_unstable();
    Ok((cur, labels, pieces))
}

/// Explodes every vertex completely, one piece per out-edge. For a graph
/// without sinks the result is the adjoint graph.
pub fn explode_all(b: &ZeroOneMatrix) -> Result<ZeroOneMatrix> {
    let mut cur = b.clone();
    let mut labels: Vec<usize> = (0..b.n()).collect();
    for v in 0..b.n() {
        let x = labels.iter().position(|&l| l == v).expect("label present");
        let (next, next_labels, _) = complete_explosion_grouped(&cur, &labels, x)?;
        cur = next;
        labels = next_labels;
    }
    Ok(cur)
}

/// Result of comparing a complete explosion of `E` at `v` with the two-stage
/// explosion of `F = vertex_explosion(E, split)` at `v'` and `v''`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoStageComparison {
    pub direct: ZeroOneMatrix,
    pub first_then_second: ZeroOneMatrix,
    pub second_then_first: ZeroOneMatrix,
}

impl TwoStageComparison {
    /// Both orders agree with the direct complete explosion up to relabelling.
    pub fn agrees(&self) -> Result<bool> {
        let d = canonical_form(&self.direct)?.0;
        Ok(canonical_form(&self.first_then_second)?.0 == d
            && canonical_form(&self.second_then_first)?.0 == d)
    }
}

/// Completely explodes `E` at `split.v` directly, and also via the vertex
/// explosion `split` followed by complete explosions of both halves (in each
/// order). Halves are exploded with out-edges grouped by original vertex.
pub fn two_stage_complete_explosion(
    b: &ZeroOneMatrix,
    split: &VertexSplit,
) -> Result<TwoStageComparison> {
    let f = vertex_explosion(b, split)?;
    let v = split.v;
    let direct = complete_explosion(b, v)?;
    let mut labels: Vec<usize> = (0..b.n()).collect();
    labels.insert(v + 1, v);
    let run = |order: [usize; 2]| -> Result<ZeroOneMatrix> {
        // order holds 0 for v' and 1 for v''.
        let (g, l, pieces) = complete_explosion_grouped(&f, &labels, v + order[0])?;
        // The other half is the one piece-free vertex of label v not among `pieces`.
        let other = (0..g.n())
            .find(|w| l[*w] == v && !pieces.contains(w))
            .expect("other half survives");
        Ok(complete_explosion_grouped(&g, &l, other)?.0)
    };
    Ok(TwoStageComparison {
        direct,
        first_then_second: run([0, 1])?,
        second_then_first: run([1, 0])?,
    })
}

/// Searches for a split of `b` and a relabelling `sigma` with
/// `vertex_explosion(b, split).permute(sigma) == c`. Vertices are tried in
/// increasing order, then splits by increasing selection mask.
pub fn is_explosion_of(
    b: &ZeroOneMatrix,
    c: &ZeroOneMatrix,
) -> Result<Option<(VertexSplit, Permutation)>> {
    if c.n() != b.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", b.n() + 1),
            found: format!("{0}x{0}", c.n()),
        });
    }
    let (cc, sc) = canonical_form(c)?;
    let edges = c.edge_count();
    let sc_inv = sc.inverse();
    for v in 0..b.n() {
        for split in VertexSplit::all(b, v) {
            let x = explode_unchecked(b, &split);
            if x.edge_count() != edges {
                continue;
            }
            let (cx, sx) = canonical_form(&x)?;
            if cx == cc {
                return Ok(Some((split, sx.compose(&sc_inv))));
            }
        }
    }
    Ok(None)
}

/// `transpose(vertex_explosion(transpose(b), split))`; `split.v` must be
/// cofinal in `b`.
pub fn reverse_explosion(b: &ZeroOneMatrix, split: &VertexSplit) -> Result<ZeroOneMatrix> {
    b.check_vertex(split.v)?;
    if cofinal_vertices(b) >> split.v & 1 == 0 {
        return Err(Error::NotCofinal { vertex: split.v });
    }
    Ok(vertex_explosion(&b.transpose(), split)?.transpose())
}

/// Which of the matrix conditions characterising a vertex explosion hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// Entries between old vertices are unchanged.
    pub old_block: bool,
    /// Columns `v'` and `v''` are equal.
    pub duplicated_columns: bool,
    /// Rows `v'`, `v''` restricted to old columns are the two halves.
    pub split_rows: bool,
    /// Column `v'` restricted to old rows is column `v` of `B`.
    pub incoming: bool,
    /// The 2x2 block on `{v', v''}` encodes the loop at `v`, if any.
    pub loop_block: bool,
}

impl LemmaReport {
    /// The three printed conditions.
    pub fn printed_conditions(&self) -> bool {
        self.old_block && self.duplicated_columns && self.split_rows
    }

    pub fn holds(&self) -> bool {
        self.printed_conditions() && self.incoming && self.loop_block
    }
}

/// Evaluates the explosion conditions for `C` against `B` with `v'`, `v''` at
/// the given indices of `C`; old vertices fill the remaining indices of `C`
/// in increasing order.
pub fn explosion_lemma_report(
    b: &ZeroOneMatrix,
    c: &ZeroOneMatrix,
    split: &VertexSplit,
    v1: usize,
    v2: usize,
) -> Result<LemmaReport> {
    if c.n() != b.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", b.n() + 1),
            found: format!("{0}x{0}", c.n()),
        });
    }
    c.check_vertex(v1)?;
    c.check_vertex(v2)?;
    if v1 == v2 {
        return Err(Error::InvalidSplit("v' and v'' must differ".into()));
    }
    split.validate(b)?;
    let v = split.v;
    let slots: Vec<usize> = (0..c.n()).filter(|&x| x != v1 && x != v2).collect();
    let olds: Vec<usize> = (0..b.n()).filter(|&u| u != v).collect();
    let pos = |u: usize| slots[olds.iter().position(|&o| o == u).unwrap()];

    let old_block = olds
        .iter()
        .all(|&u| olds.iter().all(|&w| b.get(u, w) == c.get(pos(u), pos(w))));
    let duplicated_columns = (0..c.n()).all(|x| c.get(x, v1) == c.get(x, v2));
    let split_rows = olds.iter().all(|&w| {
        c.get(v1, pos(w)) == (split.first >> w & 1 == 1)
            && c.get(v2, pos(w)) == (split.second >> w & 1 == 1)
    });
    let incoming = olds.iter().all(|&u| c.get(pos(u), v1) == b.get(u, v));
    let in_first = split.first >> v & 1 == 1;
    let in_second = split.second >> v & 1 == 1;
    let loop_block = c.get(v1, v1) == in_first
        && c.get(v1, v2) == in_first
        && c.get(v2, v1) == in_second
        && c.get(v2, v2) == in_second;
    Ok(LemmaReport {
        old_block,
        duplicated_columns,
        split_rows,
        incoming,
        loop_block,
    })
}

/// True when `C` is the explosion of `B` described by `split` with `v'`, `v''`
/// at indices `v1`, `v2` of `C`.
pub fn explosion_lemma_check(
    b: &ZeroOneMatrix,
    c: &ZeroOneMatrix,
    split: &VertexSplit,
    v1: usize,
    v2: usize,
) -> Result<bool> {
    explosion_lemma_report(b, c, split, v1, v2).map(|r| r.holds())
}

/// Vertex matrix of the adjoint graph, edges listed in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeMatrix {
    pub matrix: ZeroOneMatrix,
    /// `(source, range)` of each edge, in index order.
    pub edges: Vec<(usize, usize)>,
}

pub fn edge_matrix(b: &ZeroOneMatrix) -> Result<EdgeMatrix> {
    let edges: Vec<(usize, usize)> = (0..b.n())
        .flat_map(|s| bits(b.row(s)).map(move |r| (s, r)))
        .collect();
    if edges.is_empty() {
        return Err(Error::Empty);
    }
    if edges.len() > MAX_DIM {
        return Err(Error::SizeLimit {
            n: edges.len(),
            limit: MAX_DIM,
        });
    }
    let rows = edges
        .iter()
        .map(|&(_, r)| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(s, _))| s == r)
                .fold(0u64, |a, (f, _)| a | 1 << f)
        })
        .collect();
    Ok(EdgeMatrix {
        matrix: ZeroOneMatrix::from_bit_rows(rows)?,
        edges,
    })
}
