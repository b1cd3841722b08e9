//! Bit-packed square 0-1 matrices and vertex permutations.
//!
//! A [`ZeroOneMatrix`] is the vertex matrix of a finite directed graph without
//! multiple edges: entry `(i, j)` is 1 when there is an edge `i -> j`. Each row
//! is stored as one `u64`, bit `j` holding column `j`, so row operations are
//! word operations and the largest representable graph has 64 vertices.
//! Vertices are numbered from 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap imposed by the one-word-per-row representation.
pub const MAX_DIM: usize = 64;

/// Default size limit applied when parsing matrices from text.
pub const DEFAULT_MAX_N: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroOneMatrix {
    n: usize,
    rows: Vec<u64>,
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the set bits of `mask` from lowest to highest.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

impl ZeroOneMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, rows: vec![0; n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        Ok(m)
    }

    /// Builds a matrix from row bitmasks (bit `j` of `rows[i]` is entry `(i, j)`).
    pub fn from_bit_rows(rows: Vec<u64>) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mask = full_mask(n);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::DimensionMismatch {
                expected: format!("row bits below {n}"),
                found: "bit outside the matrix".into(),
            });
        }
        Ok(Self { n, rows })
    }

    /// Builds a matrix from nested rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mut out = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::RaggedRows {
                    line: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            let mut bits = 0u64;
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 => bits |= 1 << j,
                    _ => return Err(Error::NotZeroOne),
                }
            }
            out.push(bits);
        }
        Ok(Self { n, rows: out })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    /// Row `i` as a bitmask over columns.
    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub(crate) fn set_row(&mut self, i: usize, bits: u64) {
        self.rows[i] = bits;
    }

    pub fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | ((r >> j & 1) << i))
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![0u64; self.n];
        for (i, &r) in self.rows.iter().enumerate() {
            for j in bits(r) {
                rows[j] |= 1 << i;
            }
        }
        Self { n: self.n, rows }
    }

    /// Conjugates by `sigma`: `result(i, j) = self(sigma(i), sigma(j))`.
    ///
    /// This is `P B P^-1` for the permutation matrix with `P(i, sigma(i)) = 1`.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("permutation of length {}", self.n),
                found: format!("length {}", sigma.len()),
            });
        }
        Ok(self.permute_unchecked(sigma.images()))
    }

    pub(crate) fn permute_unchecked(&self, images: &[usize]) -> Self {
        let mut rows = vec![0u64; self.n];
        for (i, out) in rows.iter_mut().enumerate() {
            let src = self.rows[images[i]];
            let mut r = 0u64;
            for (j, &sj) in images.iter().enumerate() {
                r |= (src >> sj & 1) << j;
            }
            *out = r;
        }
        Self { n: self.n, rows }
    }

    /// Conjugation by the transposition of vertices `a` and `b`.
    pub(crate) fn swap_vertices(&self, a: usize, b: usize) -> Self {
        let mut rows = self.rows.clone();
        rows.swap(a, b);
        if a != b {
            for r in rows.iter_mut() {
                let ba = *r >> a & 1;
                let bb = *r >> b & 1;
                if ba != bb {
                    *r ^= (1 << a) | (1 << b);
                }
            }
        }
        Self { n: self.n, rows }
    }

    /// Zero-row indices (vertices with no outgoing edge).
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.rows[i] == 0).collect()
    }

    /// Zero-column indices (vertices with no incoming edge).
    pub fn sources(&self) -> Vec<usize> {
        let hit = self.rows.iter().fold(0u64, |a, r| a | r);
        (0..self.n).filter(|&j| hit >> j & 1 == 0).collect()
    }

    pub fn is_permutation_matrix(&self) -> bool {
        let mut seen = 0u64;
        for &r in &self.rows {
            if r.count_ones() != 1 || seen & r != 0 {
                return false;
            }
            seen |= r;
        }
        true
    }

    /// Row strings such as `["011", "100", "100"]`.
    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Serializes in the `.01m` text format: one row per line, no spaces.
    pub fn serialize(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for row in self.to_row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s
    }

    /// Parses the `.01m` text format with the default size limit.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_limit(text, DEFAULT_MAX_N)
    }

    pub fn parse_with_limit(text: &str, limit: usize) -> Result<Self> {
        let limit = limit.min(MAX_DIM);
        let mut rows: Vec<u64> = Vec::new();
        let mut width = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let mut bits = 0u64;
            let mut count = 0usize;
            for ch in line.chars() {
                match ch {
                    '0' | '1' => {
                        if count < MAX_DIM && ch == '1' {
                            bits |= 1 << count;
                        }
                        count += 1;
                    }
                    c if c.is_whitespace() => {}
                    c => return Err(Error::InvalidChar { line: lineno + 1, ch: c }),
                }
            }
            match width {
                None => {
                    if count > limit {
                        return Err(Error::SizeLimit { n: count, limit });
                    }
                    width = Some(count);
                }
                Some(w) if w != count => {
                    return Err(Error::RaggedRows {
                        line: lineno + 1,
                        expected: w,
                        found: count,
                    })
                }
                _ => {}
            }
            rows.push(bits);
        }
        let width = width.ok_or(Error::Empty)?;
        if rows.len() != width {
            return Err(Error::NotSquare {
                rows: rows.len(),
                cols: width,
            });
        }
        Ok(Self { n: width, rows })
    }

    /// Parses the inline form `"11/01"` (rows separated by `/`).
    pub fn parse_inline(text: &str, limit: usize) -> Result<Self> {
        Self::parse_with_limit(&text.replace('/', "\n"), limit)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Empty)
    } else if n > MAX_DIM {
        Err(Error::SizeLimit { n, limit: MAX_DIM })
    } else {
        Ok(())
    }
}

impl fmt::Debug for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_row_strings().join("/"))
    }
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl Serialize for ZeroOneMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_row_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZeroOneMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        Self::parse_with_limit(&rows.join("\n"), MAX_DIM).map_err(serde::de::Error::custom)
    }
}

/// A bijection on `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(images));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// The composite `i -> self(other(i))`.
    ///
    /// With this convention `b.permute(s).permute(t) == b.permute(&s.compose(t))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }
}
