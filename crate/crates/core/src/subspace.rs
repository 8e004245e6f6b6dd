//! Subspaces of `ℂⁿ` with a canonical exact basis.
//!
//! The basis is the list of nonzero rows of the reduced row echelon form of
//! any spanning set (equivalently, the reduced column echelon form of the
//! basis as columns). Two subspaces are equal iff their bases are identical.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, rref, Matrix, Vector};
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, Serialize)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.hash(state);
    }
}

#[derive(Deserialize)]
struct RawSubspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl<'de> Deserialize<'de> for Subspace {
    /// Re-canonicalizes, so hand-written bases are accepted.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSubspace::deserialize(d)?;
        Subspace::span(raw.ambient, &raw.basis).map_err(serde::de::Error::custom)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient).map(|k| Vector::unit(ambient, k)).collect();
        Self {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// `span{vectors}` in `ℂ^ambient`.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Result<Self> {
        for v in vectors {
            Error::check_dim(ambient, v.dim())?;
        }
        let rows: Vec<Vec<GaussianRational>> =
            vectors.iter().map(|v| v.entries().to_vec()).collect();
        let reduced = rref(&rows, ambient);
        let rank = reduced.rank();
        let basis = reduced
            .rows
            .into_iter()
            .take(rank)
            .map(Vector::new)
            .collect();
        Ok(Self {
            ambient,
            basis,
            pivots: reduced.pivots,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Coordinates of `x` in the canonical basis, or `None` if `x ∉ self`.
    ///
    /// Because the basis is in reduced echelon form, the coordinate on basis
    /// vector `k` is simply `x[pivot_k]`.
    pub fn coordinates(&self, x: &Vector) -> Result<Option<Vec<GaussianRational>>> {
        Error::check_dim(self.ambient, x.dim())?;
        let coords: Vec<GaussianRational> = self.pivots.iter().map(|&p| x[p].clone()).collect();
        let mut residual = x.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                residual = &residual - &b.scale(c);
            }
        }
        Ok(residual.is_zero().then_some(coords))
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        Ok(self.coordinates(x)?.is_some())
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        Error::check_dim(other.ambient, self.ambient)?;
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `U + V`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        Error::check_dim(self.ambient, other.ambient)?;
        let all: Vec<Vector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.ambient, &all)
    }

    /// `U ∩ V`, from the kernel of the stacked system `[U | −V]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        Error::check_dim(self.ambient, other.ambient)?;
        let k = self.dim();
        let l = other.dim();
        if k == 0 || l == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let rows: Vec<Vec<GaussianRational>> = (0..self.ambient)
            .map(|i| {
                self.basis
                    .iter()
                    .map(|u| u[i].clone())
                    .chain(other.basis.iter().map(|v| -&v[i]))
                    .collect()
            })
            .collect();
        let vectors: Vec<Vector> = null_space(&rows, k + l)
            .into_iter()
            .map(|coeffs| {
                let mut acc = Vector::zeros(self.ambient);
                for (c, u) in coeffs[..k].iter().zip(&self.basis) {
                    if !c.is_zero() {
                        acc = &acc + &u.scale(c);
                    }
                }
                acc
            })
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    /// `T(U)`.
    pub fn image_under(&self, t: &Matrix) -> Result<Subspace> {
        Error::check_dim(self.ambient, t.dim())?;
        let images: Vec<Vector> = self.basis.iter().map(|b| t.apply(b)).collect();
        Subspace::span(self.ambient, &images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize) -> Vector {
        Vector::unit(n, k)
    }

    #[test]
    fn sum_with_zero() {
        let u = Subspace::span(3, &[Vector::from_ints(&[1, 2, 3])]).unwrap();
        assert_eq!(u.sum(&Subspace::zero(3)).unwrap(), u);
    }

    #[test]
    fn coordinate_axes_meet_trivially() {
        let a = Subspace::span(2, &[e(2, 0)]).unwrap();
        let b = Subspace::span(2, &[e(2, 1)]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Subspace::zero(2));
        assert_eq!(a.sum(&b).unwrap(), Subspace::full(2));
    }

    #[test]
    fn canonical_basis_is_independent_of_spanning_set() {
        let a = Subspace::span(3, &[Vector::from_ints(&[1, 1, 0]), Vector::from_ints(&[0, 1, 1])])
            .unwrap();
        let b = Subspace::span(
            3,
            &[
                Vector::from_ints(&[1, 2, 1]),
                Vector::from_ints(&[2, 2, 0]),
                Vector::from_ints(&[1, 0, -1]),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert!(matches!(a.sum(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.contains(&e(3, 0)).is_err());
    }

    #[test]
    fn serde_round_trip_keeps_membership() {
        let a = Subspace::span(3, &[Vector::from_ints(&[0, 2, 1])]).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        let back: Subspace = serde_json::from_str(&text).unwrap();
        assert!(back.contains(&Vector::from_ints(&[0, 4, 2])).unwrap());
        assert!(!back.contains(&e(3, 1)).unwrap());
        assert_eq!(back.basis(), a.basis());
    }
}
