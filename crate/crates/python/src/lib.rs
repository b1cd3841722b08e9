//! Python bindings: a `Matrix` type plus the class, K-theory, explosion and
//! search operations.

use gce_core::explosion::VertexSplit;
use gce_core::ktheory::{K0Invariant, Order};
use gce_core::matrix::MAX_DIM;
use gce_core::primeq::DEFAULT_MAX_CLASS;
use gce_core::{
    self as core, ClassOptions, Equivalence, IntMatrix, SearchOptions, TransferMove,
    ZeroOneMatrix,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A square 0-1 vertex matrix.
#[pyclass(name = "Matrix", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyMatrix(ZeroOneMatrix);

#[pymethods]
impl PyMatrix {
    /// From row strings (`["11", "01"]`) or the inline form `"11/01"`.
    #[new]
    fn new(rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text = match rows.extract::<String>() {
            Ok(s) => s.replace('/', "\n"),
            Err(_) => rows.extract::<Vec<String>>()?.join("\n"),
        };
        ZeroOneMatrix::parse_with_limit(&text, MAX_DIM)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn rows(&self) -> Vec<String> {
        self.0.to_row_strings()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<bool> {
        self.0.check_vertex(i).map_err(err)?;
        self.0.check_vertex(j).map_err(err)?;
        Ok(self.0.get(i, j))
    }

    fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Relabels so that vertex `i` of the result is vertex `sigma[i]` here.
    fn permute(&self, sigma: Vec<usize>) -> PyResult<Self> {
        let p = core::Permutation::new(sigma).map_err(err)?;
        self.0.permute(&p).map(Self).map_err(err)
    }

    /// `(canonical matrix, permutation)`.
    fn canonical(&self) -> PyResult<(Self, Vec<usize>)> {
        let (c, p) = core::canonical_form(&self.0).map_err(err)?;
        Ok((Self(c), p.images().to_vec()))
    }

    fn is_irreducible(&self) -> bool {
        core::is_irreducible(&self.0)
    }

    fn is_cofinal(&self, v: usize) -> PyResult<bool> {
        core::is_cofinal(&self.0, v).map_err(err)
    }

    fn sinks(&self) -> Vec<usize> {
        self.0.sinks()
    }

    /// Primitive transfers as `(p, K, M)` triples.
    fn transfers(&self) -> Vec<(usize, Vec<usize>, Vec<usize>)> {
        core::transfer_moves(&self.0).iter().map(triple).collect()
    }

    fn reverse_transfers(&self) -> Vec<(usize, Vec<usize>, Vec<usize>)> {
        core::reverse_transfer_moves(&self.0).iter().map(triple).collect()
    }

    fn apply_transfer(&self, p: usize, k: Vec<usize>, m: Vec<usize>) -> PyResult<Self> {
        core::apply_transfer(&self.0, &TransferMove::new(p, &k, &m))
            .map(Self)
            .map_err(err)
    }

    fn apply_reverse_transfer(&self, p: usize, k: Vec<usize>, m: Vec<usize>) -> PyResult<Self> {
        core::primeq::apply_reverse_transfer(&self.0, &TransferMove::new(p, &k, &m))
            .map(Self)
            .map_err(err)
    }

    fn explode(&self, v: usize, m1: Vec<usize>, m2: Vec<usize>) -> PyResult<Self> {
        core::vertex_explosion(&self.0, &VertexSplit::new(v, &m1, &m2))
            .map(Self)
            .map_err(err)
    }

    fn complete_explode(&self, v: usize) -> PyResult<Self> {
        core::complete_explosion(&self.0, v).map(Self).map_err(err)
    }

    fn reverse_explode(&self, v: usize, m1: Vec<usize>, m2: Vec<usize>) -> PyResult<Self> {
        core::reverse_explosion(&self.0, &VertexSplit::new(v, &m1, &m2))
            .map(Self)
            .map_err(err)
    }

    fn edge_matrix(&self) -> PyResult<Self> {
        core::edge_matrix(&self.0).map(|e| Self(e.matrix)).map_err(err)
    }

    fn k0(&self) -> PyResult<K0> {
        core::k0_invariant(&self.0).map(K0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Matrix(\"{}\")", self.0.to_row_strings().join("/"))
    }

    fn __str__(&self) -> String {
        self.0.serialize()
    }
}

fn triple(mv: &TransferMove) -> (usize, Vec<usize>, Vec<usize>) {
    (mv.p, mv.k(), mv.m())
}

/// The pointed group `(coker(I - B^T), [1])`.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct K0(K0Invariant);

#[pymethods]
impl K0 {
    #[getter]
    fn group(&self) -> String {
        self.0.group_string()
    }

    #[getter]
    fn torsion_factors(&self) -> Vec<i128> {
        self.0.torsion_factors.clone()
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.0.free_rank
    }

    #[getter]
    fn identity_class(&self) -> Vec<i128> {
        self.0.identity_class.clone()
    }

    /// `None` when the identity has infinite order.
    #[getter]
    fn identity_order(&self) -> Option<u128> {
        match self.0.identity_order {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }

    fn __repr__(&self) -> String {
        format!("K0({}, identity order {})", self.0.group_string(), self.0.identity_order)
    }
}

/// Class size and whether the enumeration finished.
#[pyfunction]
#[pyo3(signature = (m, perms = true, max = DEFAULT_MAX_CLASS, threads = 1))]
fn class_size(py: Python<'_>, m: &PyMatrix, perms: bool, max: usize, threads: usize) -> (usize, bool) {
    let opts = ClassOptions {
        use_permutations: perms,
        max_size: max,
        collect_members: false,
        threads,
    };
    let b = m.0.clone();
    let r = py.detach(move || core::equivalence_class(&b, &opts));
    (r.size, r.exhausted)
}

/// `True`, `False`, or `None` when the class cap was reached first.
#[pyfunction]
#[pyo3(signature = (a, b, perms = true, max = DEFAULT_MAX_CLASS))]
fn are_equivalent(py: Python<'_>, a: &PyMatrix, b: &PyMatrix, perms: bool, max: usize) -> PyResult<Option<bool>> {
    let opts = ClassOptions {
        use_permutations: perms,
        max_size: max,
        ..ClassOptions::default()
    };
    let (a, b) = (a.0.clone(), b.0.clone());
    let r = py
        .detach(move || core::primeq::are_primitively_equivalent_with(&a, &b, &opts))
        .map_err(err)?;
    Ok(match r {
        Equivalence::Equivalent { .. } => Some(true),
        Equivalence::NotEquivalent { .. } => Some(false),
        Equivalence::Inconclusive { .. } => None,
    })
}

/// `True`, `False`, or `None` when undecided.
#[pyfunction]
fn k0_pairs_isomorphic(a: &K0, b: &K0) -> Option<bool> {
    match core::k0_pairs_isomorphic(&a.0, &b.0) {
        core::PairIso::Isomorphic => Some(true),
        core::PairIso::NotIsomorphic => Some(false),
        core::PairIso::Inconclusive => None,
    }
}

/// `((v, M1, M2), sigma)` with `explode(v, M1, M2).permute(sigma) == c`, or `None`.
#[pyfunction]
fn is_explosion_of(
    b: &PyMatrix,
    c: &PyMatrix,
) -> PyResult<Option<((usize, Vec<usize>, Vec<usize>), Vec<usize>)>> {
    let found = core::is_explosion_of(&b.0, &c.0).map_err(err)?;
    Ok(found.map(|(s, p)| {
        let list = |bits: u64| (0..64).filter(|j| bits >> j & 1 == 1).collect();
        ((s.v, list(s.first), list(s.second)), p.images().to_vec())
    }))
}

/// Column-subdivision factors `(R, S)` as lists of integer rows, or `None`.
#[pyfunction]
fn esse_cs_decide(b: &PyMatrix, c: &PyMatrix) -> PyResult<Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)>> {
    let pair = core::esse_cs_decide(&b.0, &c.0).map_err(err)?;
    let rows = |m: &IntMatrix| (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    Ok(pair.map(|p| (rows(&p.r), rows(&p.s))))
}

/// `R S == B` and `S R == C` for integer factor rows.
#[pyfunction]
fn verify_esse(b: &PyMatrix, c: &PyMatrix, r: Vec<Vec<i64>>, s: Vec<Vec<i64>>) -> PyResult<bool> {
    let r = IntMatrix::from_rows(&r).map_err(err)?;
    let s = IntMatrix::from_rows(&s).map_err(err)?;
    let pair = core::FactorPair::new(r, s).map_err(err)?;
    core::verify_esse(&b.0, &c.0, &pair).map_err(err)
}

/// Counterexample pairs found for size `n`, plus a completeness flag.
#[pyfunction]
#[pyo3(signature = (n, irreducible_only = true, exclude_permutation_matrices = false, threads = 1))]
fn search(
    py: Python<'_>,
    n: usize,
    irreducible_only: bool,
    exclude_permutation_matrices: bool,
    threads: usize,
) -> PyResult<(Vec<(PyMatrix, PyMatrix)>, bool)> {
    let opts = SearchOptions {
        irreducible_only,
        exclude_permutation_matrices,
        threads,
        ..SearchOptions::new(n)
    };
    let report = py.detach(move || core::run_search(&opts)).map_err(err)?;
    let pairs = report
        .counterexample_pairs
        .into_iter()
        .map(|(a, b)| (PyMatrix(a), PyMatrix(b)))
        .collect();
    Ok((pairs, report.complete))
}

#[pymodule]
fn gce(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<K0>()?;
    m.add_function(wrap_pyfunction!(class_size, m)?)?;
    m.add_function(wrap_pyfunction!(are_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(k0_pairs_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(is_explosion_of, m)?)?;
    m.add_function(wrap_pyfunction!(esse_cs_decide, m)?)?;
    m.add_function(wrap_pyfunction!(verify_esse, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    Ok(())
}
