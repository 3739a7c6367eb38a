//! Dense exact linear algebra over [`Rational`]: row reduction with
//! certificates, inversion, rank, and Kronecker products.
//!
//! Shape mismatches are programming errors and panic.  Singular matrices and
//! inconsistent systems are data, reported as structured results.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Index;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;
use crate::{Error, Result};

/// Column vector with exact entries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector {
    entries: Vec<Rational>,
}

impl Vector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Vector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            entries: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }

    pub fn dot(&self, other: &Vector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "sum of mismatched dimensions");
        Vector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(
            self.dim(),
            other.dim(),
            "difference of mismatched dimensions"
        );
        Vector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Vector {
        Vector::new(self.entries.iter().map(|a| a * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }
}

impl Index<usize> for Vector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

/// Row-major matrix with exact entries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count does not match shape"
        );
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![Rational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "rows of unequal length"
        );
        Matrix::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn from_columns(cols: &[Vector]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vector::dim);
        assert!(
            cols.iter().all(|c| c.dim() == nrows),
            "columns of unequal length"
        );
        let mut m = Matrix::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..nrows {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        assert!(i < self.rows, "row out of range");
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vector(&self, i: usize) -> Vector {
        Vector::new(self.row(i).to_vec())
    }

    pub fn column(&self, j: usize) -> Vector {
        assert!(j < self.cols, "column out of range");
        Vector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        Vector::new(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix-matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    if !self.get(i, k).is_zero() && !other.get(k, j).is_zero() {
                        acc += self.get(i, k) * other.get(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.rows)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        rref(&mut work, None).len()
    }

    /// Exact inverse; a singular input reports its rank.
    pub fn invert(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut work = self.clone();
        let mut tracker = Matrix::identity(self.rows);
        let pivots = rref(&mut work, Some(&mut tracker));
        if pivots.len() == self.rows {
            Ok(tracker)
        } else {
            Err(Error::Singular {
                rank: pivots.len(),
                dim: self.rows,
            })
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: &Rational) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            if !self.entries[idx].is_zero() {
                self.entries[idx] *= c;
            }
        }
    }

    /// row[i] -= factor * row[src]
    fn sub_scaled_row(&mut self, i: usize, src: usize, factor: &Rational) {
        for j in 0..self.cols {
            if !self.entries[src * self.cols + j].is_zero() {
                let delta = &self.entries[src * self.cols + j] * factor;
                self.entries[i * self.cols + j] -= delta;
            }
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.row_iter().map(<[Rational]>::to_vec))
            .finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.row_iter())
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Rational>> = Vec::deserialize(deserializer)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("matrix rows have unequal lengths"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

/// Reduces `a` to reduced row-echelon form in place, replaying every row
/// operation on `tracker`.  Returns the pivot columns in order, so that on
/// return `tracker * original = a`.
fn rref(a: &mut Matrix, mut tracker: Option<&mut Matrix>) -> Vec<usize> {
    let mut pivots = Vec::new();
    for col in 0..a.cols {
        let pivot_row = pivots.len();
        if pivot_row == a.rows {
            break;
        }
        let Some(src) = (pivot_row..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
            continue;
        };
        a.swap_rows(pivot_row, src);
        if let Some(t) = tracker.as_deref_mut() {
            t.swap_rows(pivot_row, src);
        }
        let inv = Rational::one() / a.get(pivot_row, col).clone();
        a.scale_row(pivot_row, &inv);
        if let Some(t) = tracker.as_deref_mut() {
            t.scale_row(pivot_row, &inv);
        }
        for i in 0..a.rows {
            if i != pivot_row && !a.get(i, col).is_zero() {
                let factor = a.get(i, col).clone();
                a.sub_scaled_row(i, pivot_row, &factor);
                if let Some(t) = tracker.as_deref_mut() {
                    t.sub_scaled_row(i, pivot_row, &factor);
                }
            }
        }
        pivots.push(col);
    }
    pivots
}

/// Outcome of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(Vector),
    /// `certificate` is a row combination `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent {
        certificate: Vector,
    },
    /// `particular` solves the system; adding any kernel vector gives another
    /// solution.  The kernel vectors form a basis of the null space.
    Underdetermined {
        particular: Vector,
        kernel: Vec<Vector>,
    },
}

/// Solves `a · x = b` exactly.
pub fn solve(a: &Matrix, b: &Vector) -> SolveOutcome {
    assert_eq!(a.rows, b.dim(), "right-hand side has wrong dimension");
    let mut m = a.clone();
    let mut tracker = Matrix::identity(a.rows);
    let pivots = rref(&mut m, Some(&mut tracker));
    let tb = tracker.mul_vec(b);
    for i in pivots.len()..a.rows {
        if !tb[i].is_zero() {
            return SolveOutcome::Inconsistent {
                certificate: tracker.row_vector(i),
            };
        }
    }
    let mut particular = vec![Rational::zero(); a.cols];
    for (j, &col) in pivots.iter().enumerate() {
        particular[col] = tb[j].clone();
    }
    let particular = Vector::new(particular);
    if pivots.len() == a.cols {
        return SolveOutcome::Unique(particular);
    }
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in (0..a.cols).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![Rational::zero(); a.cols];
        v[free] = Rational::one();
        for (j, &col) in pivots.iter().enumerate() {
            v[col] = -m.get(j, free).clone();
        }
        kernel.push(Vector::new(v));
    }
    SolveOutcome::Underdetermined { particular, kernel }
}

/// Incrementally maintained row space in reduced form, for picking spanning
/// subsets without repeated full eliminations.
#[derive(Clone, Debug)]
pub struct RowSpan {
    cols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl RowSpan {
    pub fn new(cols: usize) -> Self {
        RowSpan {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the span.  A surviving remainder is inserted
    /// (keeping the stored rows mutually reduced) and the call returns true;
    /// a row already in the span returns false.
    pub fn try_insert(&mut self, row: &Vector) -> bool {
        assert_eq!(row.dim(), self.cols, "row has wrong dimension");
        let mut r = row.clone();
        for (stored, &p) in self.rows.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                r = r.sub(&stored.scale(&r[p]));
            }
        }
        let Some(pivot) = (0..self.cols).find(|&j| !r[j].is_zero()) else {
            return false;
        };
        let inv = Rational::one() / r[pivot].clone();
        let r = r.scale(&inv);
        for stored in &mut self.rows {
            if !stored[pivot].is_zero() {
                *stored = stored.sub(&r.scale(&stored[pivot]));
            }
        }
        self.rows.push(r);
        self.pivots.push(pivot);
        true
    }
}

/// Kronecker product of vectors; the first factor is most significant in the
/// flattened index: `(u ⊗ v)[i·dim(v) + j] = u[i]·v[j]`.
pub fn tensor(u: &Vector, v: &Vector) -> Vector {
    let mut entries = Vec::with_capacity(u.dim() * v.dim());
    for a in u.iter() {
        for b in v.iter() {
            entries.push(a * b);
        }
    }
    Vector::new(entries)
}

/// Kronecker product of matrices, index-compatible with [`tensor`].
pub fn tensor_map(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            if a.get(i1, j1).is_zero() {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out.set(
                        i1 * b.rows + i2,
                        j1 * b.cols + j2,
                        a.get(i1, j1) * b.get(i2, j2),
                    );
                }
            }
        }
    }
    out
}
