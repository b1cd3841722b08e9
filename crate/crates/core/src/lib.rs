//! Finite 0-1 vertex matrices of directed graphs and the moves between them
//! that preserve the associated graph C*-algebra: primitive transfers,
//! explosions, and elementary strong shift equivalence with column
//! subdivision, together with the K0 invariant used to tell algebras apart.
//!
//! Vertices are 0-indexed throughout.

pub mod canon;
pub mod error;
pub mod explosion;
pub mod graph;
pub mod intmatrix;
pub mod ktheory;
pub mod matrix;
pub mod primeq;
pub mod search;
pub mod sse;

pub use canon::{canonical_form, canonical_matrix, find_conjugacy};
pub use error::{Error, Result};
pub use explosion::{
    complete_explosion, edge_matrix, explosion_lemma_check, is_explosion_of, reverse_explosion,
    vertex_explosion, EdgeMatrix, VertexSplit,
};
pub use intmatrix::IntMatrix;
pub use ktheory::{
    k0_invariant, k0_pairs_isomorphic, smith_normal_form, K0Invariant, Order, PairIso,
    SmithDecomposition,
};
pub use graph::{is_cofinal, is_irreducible, scc, SccDecomposition};
pub use matrix::{Permutation, ZeroOneMatrix};
pub use primeq::{
    apply_transfer, are_primitively_equivalent, equivalence_class, inverse_transfer_neighbors,
    reverse_transfer_moves, transfer_moves, ClassOptions, ClassReport, Equivalence, TransferMove,
};
pub use search::{run_search, SearchOptions, SearchReport};
pub use sse::{
    esse_cs_decide, imprimitivity_graph, is_column_subdivision, verify_esse, FactorPair,
};
