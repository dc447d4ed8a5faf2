//! Sparse symmetric matrices over the space-time vertex set.
//!
//! Every assembled operator (supra-adjacency, supra-Laplacian, normalised
//! supra-Laplacian) is stored in one format: a sorted coordinate list of the
//! upper triangle with each entry tagged by its origin (spatial edge, temporal
//! edge, or mixed). The tags let downstream code split quadratic forms into
//! spatial and temporal contributions without re-deriving structure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What an assembled matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Adjacency,
    Laplacian,
    NormalisedLaplacian,
}

/// Which layer of the construction an entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    Spatial,
    Temporal,
    /// Entries that combine both contributions (e.g. the unit diagonal of the
    /// normalised Laplacian).
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub part: Part,
    pub value: f64,
}

/// Magnitudes below this are dropped at construction time.
pub const DROP_TOL: f64 = 1e-15;

/// Symmetric sparse matrix in sorted upper-triangular coordinate form.
///
/// Invariants (enforced by [`SupraMatrix::new`]):
/// - entries satisfy `row <= col` and are sorted by `(row, col, part)`,
/// - at most one entry per `(row, col, part)` triple,
/// - every stored magnitude exceeds [`DROP_TOL`],
/// - adjacency matrices have an empty diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupraMatrix {
    n: usize,
    kind: MatrixKind,
    /// Diffusion strength the matrix was assembled at (0 when not applicable).
    a: f64,
    entries: Vec<Entry>,
}

impl SupraMatrix {
    /// Builds a matrix from raw upper-triangular entries.
    ///
    /// Entries may arrive in any order and may repeat a coordinate with
    /// different part tags (the same coordinate with the same tag is summed).
    /// Entries with `row > col` are mirrored into the upper triangle.
    pub fn new(n: usize, kind: MatrixKind, a: f64, raw: Vec<Entry>) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::invalid(format!(
                "diffusion strength must be finite and nonnegative, got {a}"
            )));
        }
        let mut acc: std::collections::BTreeMap<(usize, usize, Part), f64> =
            std::collections::BTreeMap::new();
        for e in raw {
            if e.row >= n || e.col >= n {
                return Err(Error::invalid(format!(
                    "entry ({}, {}) outside a {n}x{n} matrix",
                    e.row, e.col
                )));
            }
            if !e.value.is_finite() {
                return Err(Error::invalid(format!(
                    "entry ({}, {}) has non-finite value {}",
                    e.row, e.col, e.value
                )));
            }
            let (r, c) = if e.row <= e.col {
                (e.row, e.col)
            } else {
                (e.col, e.row)
            };
            *acc.entry((r, c, e.part)).or_insert(0.0) += e.value;
        }
        let mut entries = Vec::with_capacity(acc.len());
        for ((row, col, part), value) in acc {
            if value.abs() < DROP_TOL {
                continue;
            }
            if kind == MatrixKind::Adjacency && row == col {
                return Err(Error::invalid(format!(
                    "adjacency matrix has nonzero diagonal entry at {row}"
                )));
            }
            entries.push(Entry {
                row,
                col,
                part,
                value,
            });
        }
        Ok(SupraMatrix {
            n,
            kind,
            a,
            entries,
        })
    }

    /// Converts a dense symmetric matrix, tagging all entries with one part.
    pub fn from_dense(kind: MatrixKind, a: f64, part: Part, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("matrix must be square"));
        }
        let n = m.nrows();
        let sym_tol = 1e-12 * m.amax().max(1.0);
        let mut raw = Vec::new();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)]).abs() > sym_tol {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
                if m[(i, j)].abs() >= DROP_TOL {
                    raw.push(Entry {
                        row: i,
                        col: j,
                        part,
                        value: m[(i, j)],
                    });
                }
            }
        }
        SupraMatrix::new(n, kind, a, raw)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Total value at `(i, j)` summed over part tags.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.entries
            .iter()
            .filter(|e| e.row == r && e.col == c)
            .map(|e| e.value)
            .sum()
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "dimension mismatch in matvec");
        let mut y = vec![0.0; self.n];
        for e in &self.entries {
            y[e.row] += e.value * x[e.col];
            if e.row != e.col {
                y[e.col] += e.value * x[e.row];
            }
        }
        y
    }

    /// Quadratic form `x^T M x` restricted to entries with a given part tag.
    pub fn quad_form_part(&self, part: Part, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n, "dimension mismatch in quadratic form");
        let mut q = 0.0;
        for e in &self.entries {
            if e.part != part {
                continue;
            }
            if e.row == e.col {
                q += e.value * x[e.row] * x[e.row];
            } else {
                q += 2.0 * e.value * x[e.row] * x[e.col];
            }
        }
        q
    }

    /// Full quadratic form `x^T M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Row sums of the full matrix (for an adjacency matrix these are the
    /// weighted vertex degrees).
    pub fn row_sums(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.entries {
            d[e.row] += e.value;
            if e.row != e.col {
                d[e.col] += e.value;
            }
        }
        d
    }

    /// Row sums restricted to one part tag.
    pub fn row_sums_part(&self, part: Part) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.entries {
            if e.part != part {
                continue;
            }
            d[e.row] += e.value;
            if e.row != e.col {
                d[e.col] += e.value;
            }
        }
        d
    }

    /// Dense copy (tests and small solves).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for e in &self.entries {
            m[(e.row, e.col)] += e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += e.value;
            }
        }
        m
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SupraMatrix {
        SupraMatrix::new(
            3,
            MatrixKind::Adjacency,
            1.0,
            vec![
                Entry {
                    row: 1,
                    col: 0,
                    part: Part::Spatial,
                    value: 2.0,
                },
                Entry {
                    row: 0,
                    col: 2,
                    part: Part::Temporal,
                    value: 3.0,
                },
                Entry {
                    row: 0,
                    col: 1,
                    part: Part::Spatial,
                    value: 0.5,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn duplicate_coordinates_are_summed_and_mirrored() {
        let m = sample();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 2.5);
        assert_eq!(m.get(1, 0), 2.5);
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(1, 2), 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = sample();
        let x = [1.0, -2.0, 0.5];
        let y = m.matvec(&x);
        let dense = m.to_dense();
        let yd = dense * nalgebra::DVector::from_row_slice(&x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn tiny_values_are_dropped() {
        let m = SupraMatrix::new(
            2,
            MatrixKind::Laplacian,
            0.0,
            vec![Entry {
                row: 0,
                col: 1,
                part: Part::Spatial,
                value: 1e-16,
            }],
        )
        .unwrap();
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn adjacency_diagonal_rejected() {
        let r = SupraMatrix::new(
            2,
            MatrixKind::Adjacency,
            0.0,
            vec![Entry {
                row: 0,
                col: 0,
                part: Part::Spatial,
                value: 1.0,
            }],
        );
        assert!(r.is_err());
    }

    #[test]
    fn part_split_quadratic_forms_add_up() {
        let m = sample();
        let x = [0.3, 1.7, -0.9];
        let total = m.quad_form(&x);
        let parts = m.quad_form_part(Part::Spatial, &x)
            + m.quad_form_part(Part::Temporal, &x)
            + m.quad_form_part(Part::Mixed, &x);
        assert!((total - parts).abs() < 1e-12);
    }

    #[test]
    fn row_sums_split_by_part() {
        let m = sample();
        let total = m.row_sums();
        let sp = m.row_sums_part(Part::Spatial);
        let tp = m.row_sums_part(Part::Temporal);
        for i in 0..3 {
            assert!((total[i] - sp[i] - tp[i]).abs() < 1e-14);
        }
        assert_eq!(sp, vec![2.5, 2.5, 0.0]);
        assert_eq!(tp, vec![3.0, 0.0, 3.0]);
    }
}
