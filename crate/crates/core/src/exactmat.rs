//! Dense exact matrices over a [`FieldSpec`]: reduced row echelon form
//! with an accumulated transform, rank, inverse, and the rank of a span
//! of same-shaped matrices.
//!
//! Pivoting is deterministic (first nonzero entry scanning top-to-bottom
//! in the leftmost unresolved column) so every downstream canonical form
//! is reproducible bit for bit.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::Error;
use crate::field::{FieldElement, FieldSpec};

/// A row-major dense matrix with exact entries. Empty shapes are legal;
/// an empty matrix has rank 0 and the 0×0 matrix counts as nonsingular.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl ExactMatrix {
    pub fn zero(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            spec,
            rows,
            cols,
            data: vec![spec.zero(); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Self::zero(spec, n, n);
        for i in 0..n {
            m[(i, i)] = spec.one();
        }
        m
    }

    /// Builds a matrix from rows of entries. Every entry must belong to
    /// `spec`; rows must be rectangular.
    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldElement>>) -> Result<Self, Error> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::shape("ragged rows"));
            }
            for entry in row {
                if entry.spec() != spec {
                    return Err(Error::FieldMismatch(
                        spec.to_string(),
                        entry.spec().to_string(),
                    ));
                }
                data.push(entry);
            }
        }
        Ok(ExactMatrix {
            spec,
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Convenience constructor from signed integers.
    pub fn from_integers(spec: FieldSpec, rows: &[&[i64]]) -> Self {
        let converted = rows
            .iter()
            .map(|row| row.iter().map(|&n| spec.from_integer(n)).collect())
            .collect();
        Self::from_rows(spec, converted).expect("rectangular integer rows")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = &FieldElement> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zero(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        if self.rows != other.rows {
            return Err(Error::shape(format!(
                "hconcat of {}×{} with {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.check_spec(other)?;
        let mut m = ExactMatrix::zero(self.spec, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(m)
    }

    pub fn scale(&self, c: &FieldElement) -> ExactMatrix {
        let mut m = self.clone();
        for entry in &mut m.data {
            *entry = &*entry * c;
        }
        m
    }

    pub fn matmul(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "matmul of {}×{} with {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.check_spec(other)?;
        let mut m = ExactMatrix::zero(self.spec, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] = &m[(i, j)] + &(a * &other[(k, j)]);
                }
            }
        }
        Ok(m)
    }

    fn check_spec(&self, other: &ExactMatrix) -> Result<(), Error> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        Ok(())
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> Vec<FieldElement> {
        self.data.clone()
    }

    /// Reduced row echelon form `E = U·M` with the nonsingular transform
    /// `U` accumulated alongside.
    pub fn rref(&self) -> Rref {
        let mut echelon = self.clone();
        let mut transform = ExactMatrix::identity(self.spec, self.rows);
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..self.cols {
            let Some(pivot_row) =
                (next_row..self.rows).find(|&r| !echelon[(r, col)].is_zero())
            else {
                continue;
            };
            echelon.swap_rows(next_row, pivot_row);
            transform.swap_rows(next_row, pivot_row);
            let inv = echelon[(next_row, col)]
                .inv()
                .expect("pivot entry is nonzero");
            echelon.scale_row(next_row, &inv);
            transform.scale_row(next_row, &inv);
            for r in 0..self.rows {
                if r != next_row && !echelon[(r, col)].is_zero() {
                    let factor = echelon[(r, col)].clone();
                    echelon.subtract_scaled_row(r, next_row, &factor);
                    transform.subtract_scaled_row(r, next_row, &factor);
                }
            }
            pivots.push(col);
            next_row += 1;
            if next_row == self.rows {
                break;
            }
        }
        Rref {
            rank: pivots.len(),
            echelon,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Exact inverse; fails with [`Error::SingularMatrix`] when the rank
    /// falls short.
    pub fn inverse(&self) -> Result<ExactMatrix, Error> {
        if !self.is_square() {
            return Err(Error::shape(format!(
                "inverse of non-square {}×{}",
                self.rows, self.cols
            )));
        }
        let reduced = self.rref();
        if reduced.rank < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(reduced.transform)
    }

    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// A deterministic basis of the null space `{x : M·x = 0}`: one
    /// vector per free column, in ascending column order.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let reduced = self.rref();
        let mut basis = Vec::new();
        for col in 0..self.cols {
            if reduced.pivots.contains(&col) {
                continue;
            }
            let mut v = vec![self.spec.zero(); self.cols];
            v[col] = self.spec.one();
            for (row, &pivot_col) in reduced.pivots.iter().enumerate() {
                v[pivot_col] = -&reduced.echelon[(row, col)];
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &FieldElement) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = &self.data[idx] * c;
        }
    }

    /// row[target] -= factor · row[source]
    fn subtract_scaled_row(&mut self, target: usize, source: usize, factor: &FieldElement) {
        for j in 0..self.cols {
            let s = self.data[source * self.cols + j].clone();
            let idx = target * self.cols + j;
            self.data[idx] = &self.data[idx] - &(&s * factor);
        }
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = FieldElement;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&rhs.data) {
            *a = &*a + b;
        }
        m
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&rhs.data) {
            *a = &*a - b;
        }
        m
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.matmul(rhs).expect("operand shapes must agree")
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}×{} over {}", self.rows, self.cols, self.spec)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of [`ExactMatrix::rref`]: `echelon = transform · M`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub echelon: ExactMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub transform: ExactMatrix,
}

/// Rank of the span of same-shaped matrices, plus the lexicographically
/// first maximal independent subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanRank {
    pub rank: usize,
    pub independent: Vec<usize>,
}

/// Dimension of the linear span of `mats` inside the space of matrices
/// of their common shape, computed by stacking vectorizations as the
/// columns of one matrix. The pivot columns of its echelon form are the
/// lexicographically first maximal independent subset.
pub fn rank_of_span(mats: &[ExactMatrix]) -> Result<SpanRank, Error> {
    let stacked = stack_as_columns(mats)?;
    let reduced = stacked.rref();
    Ok(SpanRank {
        rank: reduced.rank,
        independent: reduced.pivots,
    })
}

/// The (rows·cols)×k matrix whose columns are the vectorizations of the
/// k input matrices.
pub(crate) fn stack_as_columns(mats: &[ExactMatrix]) -> Result<ExactMatrix, Error> {
    let Some(first) = mats.first() else {
        return Ok(ExactMatrix::zero(FieldSpec::rationals(), 0, 0));
    };
    let (rows, cols, spec) = (first.rows, first.cols, first.spec);
    let mut stacked = ExactMatrix::zero(spec, rows * cols, mats.len());
    for (k, m) in mats.iter().enumerate() {
        if (m.rows, m.cols) != (rows, cols) {
            return Err(Error::shape(format!(
                "span of {}×{} and {}×{} matrices",
                rows, cols, m.rows, m.cols
            )));
        }
        m.check_spec(first)?;
        for (idx, entry) in m.vectorize().into_iter().enumerate() {
            stacked[(idx, k)] = entry;
        }
    }
    Ok(stacked)
}
