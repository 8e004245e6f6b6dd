//! Dense exact linear algebra over `ℚ(i)`.
//!
//! [`Matrix`] is always square (an operator on `ℂⁿ`); rectangular systems are
//! handled as slices of rows by [`rref`], [`null_space`] and [`solve`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;
use crate::subspace::Subspace;

type Scalar = GaussianRational;

/// Column vector in `ℂⁿ`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<Scalar>);

/// Row vector (linear functional) on `ℂⁿ`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(Vec<Scalar>);

macro_rules! coordinate_type {
    ($name:ident) => {
        impl $name {
            pub fn new(entries: Vec<Scalar>) -> Self {
                Self(entries)
            }

            pub fn zeros(n: usize) -> Self {
                Self(vec![Scalar::zero(); n])
            }

            /// The `k`-th standard basis element of length `n`.
            pub fn unit(n: usize, k: usize) -> Self {
                let mut v = Self::zeros(n);
                v.0[k] = Scalar::one();
                v
            }

            pub fn from_ints(entries: &[i64]) -> Self {
                Self(entries.iter().map(|&e| Scalar::from_int(e)).collect())
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn entries(&self) -> &[Scalar] {
                &self.0
            }

            pub fn into_entries(self) -> Vec<Scalar> {
                self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(Zero::is_zero)
            }

            pub fn scale(&self, c: &Scalar) -> Self {
                Self(self.0.iter().map(|e| e * c).collect())
            }

            pub fn to_complex(&self) -> DVector<Complex<f64>> {
                DVector::from_iterator(self.0.len(), self.0.iter().map(Scalar::to_complex))
            }

            /// Euclidean norm, in floating point.
            pub fn norm_f64(&self) -> f64 {
                self.0
                    .iter()
                    .map(|e| e.to_complex().norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
        }

        impl Index<usize> for $name {
            type Output = Scalar;
            fn index(&self, k: usize) -> &Scalar {
                &self.0[k]
            }
        }

        impl IndexMut<usize> for $name {
            fn index_mut(&mut self, k: usize) -> &mut Scalar {
                &mut self.0[k]
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|a| -a).collect())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_list().entries(&self.0).finish()
            }
        }
    };
}

coordinate_type!(Vector);
coordinate_type!(Functional);

impl Functional {
    /// `f(x)`.
    pub fn apply(&self, x: &Vector) -> Scalar {
        assert_eq!(self.dim(), x.dim(), "dimension mismatch");
        dot(&self.0, &x.0)
    }
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    Scalar::dot(a, b)
}

/// Square matrix over `ℚ(i)`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Scalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Scalar::one())
    }

    /// `c·I`.
    pub fn scalar(n: usize, c: &Scalar) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m[(k, k)] = c.clone();
        }
        m
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (k, e) in entries.iter().enumerate() {
            m[(k, k)] = e.clone();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            Error::check_dim(n, row.len())?;
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    /// Convenience for tests and examples: integer entries, row-major.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| Scalar::from_int(e)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let n = cols.len();
        for c in cols {
            Error::check_dim(n, c.dim())?;
        }
        Ok(Self::from_fn(n, |i, j| cols[j][i].clone()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::new((0..self.n).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `Some(c)` when the matrix equals `c·I`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        let c = if self.n == 0 {
            Scalar::zero()
        } else {
            self[(0, 0)].clone()
        };
        (*self == Self::scalar(self.n, &c)).then_some(c)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|e| e * c).collect(),
        }
    }

    /// `T − λ·I`.
    pub fn shift(&self, lambda: &Scalar) -> Self {
        let mut m = self.clone();
        for k in 0..self.n {
            m[(k, k)] = &m[(k, k)] - lambda;
        }
        m
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(self.n, x.dim(), "dimension mismatch");
        Vector::new((0..self.n).map(|i| dot(self.row(i), x.entries())).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let augmented: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
                row
            })
            .collect();
        let reduced = rref(&augmented, 2 * n);
        if reduced.pivots.len() < n || reduced.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, |i, j| reduced.rows[i][n + j].clone()))
    }

    pub fn to_complex(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].to_complex())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Mul<&Vector> for &Matrix {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        self.apply(rhs)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| self.row(i)))
            .finish()
    }
}

/// On-disk / wire form of a matrix: `{"dim": n, "entries": [[SCALAR, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixFile {
    /// Validates shape and scalar syntax, reporting the offending position.
    pub fn to_matrix(&self) -> std::result::Result<Matrix, String> {
        if self.entries.len() != self.dim {
            return Err(format!(
                "entries: expected {} rows, found {}",
                self.dim,
                self.entries.len()
            ));
        }
        let mut rows = Vec::with_capacity(self.dim);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(format!(
                    "entries[{i}]: expected {} columns, found {}",
                    self.dim,
                    row.len()
                ));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, s)| s.parse::<Scalar>().map_err(|e| format!("entries[{i}][{j}]: {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        Ok(Matrix::from_rows(rows).expect("shape validated above"))
    }
}

impl From<&Matrix> for MatrixFile {
    fn from(m: &Matrix) -> Self {
        MatrixFile {
            dim: m.n,
            entries: (0..m.n)
                .map(|i| m.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixFile::deserialize(d)?
            .to_matrix()
            .map_err(serde::de::Error::custom)
    }
}

/// Reduced row echelon form of a rectangular system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss–Jordan elimination with leftmost-nonzero pivoting.
///
/// `ncols` is the width of every row; zero rows sink to the bottom.
pub fn rref(rows: &[Vec<Scalar>], ncols: usize) -> Rref {
    let mut a: Vec<Vec<Scalar>> = rows.to_vec();
    for row in &a {
        assert_eq!(row.len(), ncols, "ragged system");
    }
    let m = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].inv().expect("pivot is nonzero");
        if !inv.is_one() {
            for e in a[r][col..].iter_mut() {
                *e *= &inv;
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (e, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                e.sub_mul(&factor, p);
            }
        }
        pivots.push(col);
        r += 1;
    }
    Rref { rows: a, pivots }
}

/// Basis of `{ v : rows · v = 0 }`, one vector per free column.
pub fn null_space(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let reduced = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &reduced.pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Scalar::zero(); ncols];
            v[free] = Scalar::one();
            for (r, &p) in reduced.pivots.iter().enumerate() {
                v[p] = -&reduced.rows[r][free];
            }
            v
        })
        .collect()
}

/// Solves `rows · v = rhs` exactly. Free coordinates are set to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve(rows: &[Vec<Scalar>], ncols: usize, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(rows.len(), rhs.len(), "one right-hand side per row");
    let augmented: Vec<Vec<Scalar>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let reduced = rref(&augmented, ncols + 1);
    if reduced.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut v = vec![Scalar::zero(); ncols];
    for (r, &p) in reduced.pivots.iter().enumerate() {
        v[p] = reduced.rows[r][ncols].clone();
    }
    Some(v)
}

pub fn rank(m: &Matrix) -> usize {
    rref(&m.rows(), m.dim()).rank()
}

/// `N(M)`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let n = m.dim();
    let vecs: Vec<Vector> = null_space(&m.rows(), n).into_iter().map(Vector::new).collect();
    Subspace::span(n, &vecs).expect("kernel vectors live in the ambient space")
}

/// `R(M)`, the column space.
pub fn image_basis(m: &Matrix) -> Subspace {
    Subspace::span(m.dim(), &m.columns()).expect("columns live in the ambient space")
}

/// Finds `f` with `f(vᵢ) = cᵢ` for every constraint; free coordinates are zero.
pub fn solve_functional(dim: usize, constraints: &[(Vector, Scalar)]) -> Result<Functional> {
    for (v, _) in constraints {
        Error::check_dim(dim, v.dim())?;
    }
    let rows: Vec<Vec<Scalar>> = constraints.iter().map(|(v, _)| v.entries().to_vec()).collect();
    let rhs: Vec<Scalar> = constraints.iter().map(|(_, c)| c.clone()).collect();
    solve(&rows, dim, &rhs)
        .map(Functional::new)
        .ok_or(Error::Infeasible)
}

/// Exact rank of the matrix whose columns are `vectors` (any count).
pub fn rank_of_vectors(vectors: &[&Vector]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let rows: Vec<Vec<Scalar>> = vectors.iter().map(|v| v.entries().to_vec()).collect();
    rref(&rows, first.dim()).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = Matrix::identity(3);
        let r = rref(&id.rows(), 3);
        assert_eq!(r.rows, id.rows());
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_rank_one() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let r = rref(&m.rows(), 2);
        assert_eq!(r.rows, Matrix::from_int_rows(&[&[1, 2], &[0, 0]]).rows());
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn zero_matrix_kernel_and_image() {
        let z = Matrix::zeros(3);
        assert_eq!(kernel_basis(&z), Subspace::full(3));
        assert_eq!(image_basis(&z), Subspace::zero(3));
        assert_eq!(rank(&z), 0);
    }

    #[test]
    fn shift_kernel_and_image() {
        let m = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        let e1 = Subspace::span(2, &[Vector::unit(2, 0)]).unwrap();
        assert_eq!(kernel_basis(&m), e1);
        assert_eq!(image_basis(&m), e1);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn functional_from_unit_constraints() {
        let f = solve_functional(
            3,
            &[(Vector::unit(3, 0), q("0")), (Vector::unit(3, 1), q("1"))],
        )
        .unwrap();
        assert_eq!(f, Functional::from_ints(&[0, 1, 0]));
    }

    #[test]
    fn functional_infeasible() {
        let v = Vector::from_ints(&[1, 1, 0]);
        let w = v.scale(&q("2"));
        let err = solve_functional(3, &[(v, q("1")), (w, q("1"))]).unwrap_err();
        assert_eq!(err, Error::Infeasible);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![q("1"), q("i"), q("0")],
            vec![q("2"), q("1/2"), q("-3")],
            vec![q("0"), q("1-1i"), q("4")],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(3));
        assert!(Matrix::from_int_rows(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn matrix_file_positions() {
        let file = MatrixFile {
            dim: 2,
            entries: vec![vec!["1".into(), "0".into()], vec!["x".into(), "1".into()]],
        };
        let err = file.to_matrix().unwrap_err();
        assert!(err.starts_with("entries[1][0]"), "{err}");
        let ragged = MatrixFile {
            dim: 2,
            entries: vec![vec!["1".into()], vec!["0".into(), "1".into()]],
        };
        assert!(ragged.to_matrix().unwrap_err().starts_with("entries[0]"));
    }
}
