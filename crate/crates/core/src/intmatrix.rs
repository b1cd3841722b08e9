//! Dense integer matrices for factorizations and normal forms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (line, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::RaggedRows {
                    line: line + 1,
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Parses one row per line. A row containing whitespace or commas is read
    /// as separated integers; otherwise every character is one digit. `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rows.push(parse_row(line, idx + 1)?);
        }
        if rows.is_empty() {
            return Err(Error::Empty);
        }
        Self::from_rows(&rows)
    }

    /// Rows separated by `/`.
    pub fn parse_inline(text: &str) -> Result<Self> {
        Self::parse(&text.replace('/', "\n"))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Exact product; fails on overflow.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    pub fn is_zero_one(&self) -> bool {
        self.data.iter().all(|&x| x == 0 || x == 1)
    }

    /// The square 0-1 matrix with the same entries.
    pub fn to_zero_one(&self) -> Result<ZeroOneMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.is_zero_one() {
            return Err(Error::NotZeroOne);
        }
        let rows = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .fold(0u64, |a, (j, &x)| a | (x as u64) << j)
            })
            .collect();
        ZeroOneMatrix::from_bit_rows(rows)
    }

    /// Row strings when every entry is a single digit, otherwise
    /// space-separated integers.
    pub fn to_row_strings(&self) -> Vec<String> {
        let digits = self.data.iter().all(|&x| (0..=9).contains(&x));
        (0..self.rows)
            .map(|i| {
                let parts: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                if digits {
                    parts.concat()
                } else {
                    parts.join(" ")
                }
            })
            .collect()
    }
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<i64>> {
    if line.contains(|c: char| c.is_whitespace() || c == ',') {
        line.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<i64>().map_err(|_| Error::InvalidChar {
                    line: lineno,
                    ch: s.chars().find(|c| !c.is_ascii_digit() && *c != '-').unwrap_or('?'),
                })
            })
            .collect()
    } else {
        line.chars()
            .map(|c| {
                c.to_digit(10).map(i64::from).ok_or(Error::InvalidChar {
                    line: lineno,
                    ch: c,
                })
            })
            .collect()
    }
}

impl From<&ZeroOneMatrix> for IntMatrix {
    fn from(b: &ZeroOneMatrix) -> Self {
        let n = b.n();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, b.get(i, j) as i64);
            }
        }
        m
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_row_strings().join("/"))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_row_strings() {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Serialized as row strings, like [`ZeroOneMatrix`].
impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_row_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        Self::parse(&rows.join("\n")).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let a = IntMatrix::parse("110\n001\n").unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        let b = IntMatrix::parse("1 -2\n3, 4 # note\n").unwrap();
        assert_eq!(b.get(0, 1), -2);
        assert_eq!(b.get(1, 0), 3);
        assert!(IntMatrix::parse("12\n3\n").is_err());
        assert!(IntMatrix::parse("1x\n").is_err());
        assert_eq!(IntMatrix::parse_inline("11/01").unwrap().to_row_strings(), ["11", "01"]);
    }

    #[test]
    fn product_and_overflow() {
        let r = IntMatrix::from_rows(&[[1, 1, 0], [0, 0, 1]]).unwrap();
        let s = IntMatrix::from_rows(&[[1, 0], [0, 1], [0, 1]]).unwrap();
        assert_eq!(r.mul(&s).unwrap(), IntMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap());
        assert!(s.mul(&s).is_err());
        let big = IntMatrix::from_rows(&[[i64::MAX]]).unwrap();
        assert_eq!(big.mul(&big), Err(Error::Overflow));
    }

    #[test]
    fn zero_one_round_trip() {
        let b = ZeroOneMatrix::parse_inline("10/11", 16).unwrap();
        assert_eq!(IntMatrix::from(&b).to_zero_one().unwrap(), b);
        assert_eq!(
            IntMatrix::from_rows(&[[2]]).unwrap().to_zero_one(),
            Err(Error::NotZeroOne)
        );
    }
}

