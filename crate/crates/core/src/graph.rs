//! Reachability, strongly connected components, irreducibility and cofinality.

use serde::Serialize;

use crate::error::Result;
use crate::matrix::{bits, full_mask, ZeroOneMatrix};

/// `reach[i]` holds every vertex reachable from `i` by a path of length >= 1.
pub fn transitive_closure(b: &ZeroOneMatrix) -> Vec<u64> {
    let n = b.n();
    let mut reach: Vec<u64> = b.rows().to_vec();
    // Warshall on bit rows.
    for k in 0..n {
        let rk = reach[k];
        for r in reach.iter_mut() {
            if *r >> k & 1 == 1 {
                *r |= rk;
            }
        }
    }
    reach
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SccDecomposition {
    /// Component id of each vertex; ids follow the order of first appearance.
    pub component_of: Vec<usize>,
    /// Whether the component contains an edge inside it (a cycle or self-loop).
    pub has_cycle: Vec<bool>,
    /// Edges of the condensation, without self-pairs, sorted.
    pub condensation_edges: Vec<(usize, usize)>,
}

impl SccDecomposition {
    pub fn component_count(&self) -> usize {
        self.has_cycle.len()
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.component_of.len())
            .filter(|&v| self.component_of[v] == c)
            .collect()
    }
}

pub fn scc(b: &ZeroOneMatrix) -> SccDecomposition {
    let n = b.n();
    let reach = transitive_closure(b);
    let mut component_of = vec![usize::MAX; n];
    let mut has_cycle = Vec::new();
    for v in 0..n {
        if component_of[v] != usize::MAX {
            continue;
        }
        let id = has_cycle.len();
        component_of[v] = id;
        for w in (v + 1)..n {
            if reach[v] >> w & 1 == 1 && reach[w] >> v & 1 == 1 {
                component_of[w] = id;
            }
        }
        has_cycle.push(reach[v] >> v & 1 == 1);
    }
    let mut condensation_edges = Vec::new();
    for u in 0..n {
        for w in bits(b.row(u)) {
            let (cu, cw) = (component_of[u], component_of[w]);
            if cu != cw {
                condensation_edges.push((cu, cw));
            }
        }
    }
    condensation_edges.sort_unstable();
    condensation_edges.dedup();
    SccDecomposition {
        component_of,
        has_cycle,
        condensation_edges,
    }
}

/// True when every `(i, j)` entry of some power of `b` is positive: the graph
/// is strongly connected and has at least one edge.
pub fn is_irreducible(b: &ZeroOneMatrix) -> bool {
    let full = full_mask(b.n());
    transitive_closure(b).iter().all(|&r| r == full)
}

/// True when `v` has a path (possibly of length zero) into every strongly
/// connected component that carries a cycle. On a finite graph this is
/// exactly the condition that every infinite path can be intercepted from `v`.
pub fn is_cofinal(b: &ZeroOneMatrix, v: usize) -> Result<bool> {
    b.check_vertex(v)?;
    let reach = transitive_closure(b);
    let from_v = reach[v] | 1 << v;
    // A vertex lies on a cycle iff it reaches itself; cyclic components are
    // intercepted iff every such vertex is reachable.
    let cyclic: u64 = (0..b.n())
        .filter(|&w| reach[w] >> w & 1 == 1)
        .fold(0, |acc, w| acc | 1 << w);
    Ok(cyclic & !from_v == 0)
}

/// Vertices that are cofinal, as a bitmask.
pub fn cofinal_vertices(b: &ZeroOneMatrix) -> u64 {
    let reach = transitive_closure(b);
    let cyclic: u64 = (0..b.n())
        .filter(|&w| reach[w] >> w & 1 == 1)
        .fold(0, |acc, w| acc | 1 << w);
    (0..b.n())
        .filter(|&v| cyclic & !(reach[v] | 1 << v) == 0)
        .fold(0, |acc, v| acc | 1 << v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> ZeroOneMatrix {
        ZeroOneMatrix::from_rows(rows).unwrap()
    }

    fn rpe_b() -> ZeroOneMatrix {
        m(&[&[0, 1, 1, 1], &[1, 0, 0, 0], &[1, 0, 0, 0], &[1, 0, 0, 0]])
    }

    #[test]
    fn irreducibility_examples() {
        let a = m(&[&[1, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0]]);
        assert!(is_irreducible(&a));
        assert!(!is_irreducible(&m(&[&[0]])));
        assert!(is_irreducible(&m(&[&[1]])));
        assert!(!is_irreducible(&m(&[&[1, 1], &[0, 1]])));
    }

    #[test]
    fn cofinality_examples() {
        assert!(is_cofinal(&rpe_b(), 2).unwrap());
        assert_eq!(cofinal_vertices(&rpe_b()), 0b1111);
        let loops = ZeroOneMatrix::identity(2).unwrap();
        assert!(!is_cofinal(&loops, 0).unwrap());
        assert!(!is_cofinal(&loops, 1).unwrap());
        assert!(is_cofinal(&loops, 2).is_err());
        // A path into a sink has no infinite paths at all.
        let acyclic = m(&[&[0, 1], &[0, 0]]);
        assert!(is_cofinal(&acyclic, 1).unwrap());
    }

    #[test]
    fn scc_structure() {
        // 0 <-> 1 -> 2 (loop), 3 isolated
        let b = m(&[&[0, 1, 0, 0], &[1, 0, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 0]]);
        let d = scc(&b);
        assert_eq!(d.component_of, vec![0, 0, 1, 2]);
        assert_eq!(d.has_cycle, vec![true, true, false]);
        assert_eq!(d.condensation_edges, vec![(0, 1)]);
        assert_eq!(d.members(0), vec![0, 1]);
    }
}
