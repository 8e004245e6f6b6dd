//! Floating-point local spectral quantities.
//!
//! Every operator on `ℂⁿ` has the single-valued extension property, so the
//! local spectrum `σ_T(x)` is the set of eigenvalues whose generalized
//! eigenspace carries a nonzero component of `x`. The local spectral radius is
//! the largest modulus in `σ_T(x)` and the inner local spectral radius the
//! smallest. Conventions at `x = 0`: `σ_T(0) = ∅`, `r_T(0) = 0`,
//! `i_T(0) = +∞`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::spectral::core_membership;

pub type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Cluster radius for eigenvalues of the operator scaled to unit
    /// spectral radius.
    pub eig: f64,
    /// Relative threshold for numerical rank and component detection.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: 1e-8,
            rank: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
    /// Basis of `N((T − λ)^m)`, `m` the multiplicity.
    pub basis: Vec<DVector<C64>>,
}

#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub dim: usize,
    pub clusters: Vec<EigenCluster>,
    pub tolerances: Tolerances,
    /// Normalization applied before clustering (spectral-radius estimate).
    pub scale: f64,
    /// Set when two eigenvalues sit at a distance in `(ε, 2ε]`.
    pub ambiguous: bool,
    /// Cluster bases side by side, in cluster order.
    stacked: DMatrix<C64>,
}

fn eigenvalues(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 10_000 * n.max(1))
        .unwrap_or_else(|| nalgebra::linalg::Schur::new(a.clone()));
    let (_, t) = schur.unpack();
    (0..n).map(|k| t[(k, k)]).collect()
}

/// Right singular vectors for the `count` smallest singular values.
fn smallest_right_singular_vectors(m: &DMatrix<C64>, count: usize) -> Vec<DVector<C64>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    order
        .into_iter()
        .take(count)
        .map(|k| DVector::from_iterator(n, v_t.row(k).iter().map(|z| z.conj())))
        .collect()
}

fn smallest_singular_ratio(m: &DMatrix<C64>) -> f64 {
    if m.ncols() == 0 {
        return 1.0;
    }
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Numerical eigenstructure of `T`, with eigenvalues merged by single linkage
/// at distance `ε_eig` after scaling `T` to unit spectral radius.
pub fn eigen_structure(t: &Matrix, tol: Tolerances) -> EigenStructure {
    let n = t.dim();
    let a = t.to_complex();
    let raw = eigenvalues(&a);
    let rho = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let fro = a.norm();
    let scale = if fro == 0.0 {
        1.0
    } else if rho > tol.eig * fro {
        rho
    } else {
        fro
    };
    let mut mu: Vec<C64> = raw.iter().map(|z| z / scale).collect();
    mu.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    // Single linkage via union-find over all pairs.
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    let mut ambiguous = false;
    for i in 0..n {
        for j in i + 1..n {
            let d = (mu[i] - mu[j]).norm();
            if d <= tol.eig {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            } else if d <= 2.0 * tol.eig {
                ambiguous = true;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_root = vec![usize::MAX; n];
    for k in 0..n {
        let r = root(&mut parent, k);
        if group_of_root[r] == usize::MAX {
            group_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of_root[r]].push(k);
    }

    let normalized = a.map(|z| z / scale);
    let mut clusters = Vec::with_capacity(groups.len());
    for members in groups {
        let m = members.len();
        let center: C64 = members.iter().map(|&k| mu[k]).sum::<C64>() / m as f64;
        let shifted = &normalized - DMatrix::<C64>::identity(n, n) * center;
        let mut power = DMatrix::<C64>::identity(n, n);
        for _ in 0..m {
            power = &power * &shifted;
        }
        clusters.push(EigenCluster {
            value: center * scale,
            multiplicity: m,
            basis: smallest_right_singular_vectors(&power, m),
        });
    }

    let columns: Vec<DVector<C64>> = clusters.iter().flat_map(|c| c.basis.iter().cloned()).collect();
    let stacked = if columns.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    EigenStructure {
        dim: n,
        clusters,
        tolerances: tol,
        scale,
        ambiguous,
        stacked,
    }
}

impl EigenStructure {
    /// Problems with the structure's invariants, empty when healthy.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let total: usize = self.clusters.iter().map(|c| c.multiplicity).sum();
        if total != self.dim {
            problems.push(format!("multiplicities sum to {total}, not {}", self.dim));
        }
        for c in &self.clusters {
            if c.basis.len() != c.multiplicity {
                problems.push(format!("cluster {} has a short basis", c.value));
                continue;
            }
            let m = DMatrix::from_columns(&c.basis);
            if smallest_singular_ratio(&m) <= self.tolerances.rank {
                problems.push(format!("cluster {} basis is numerically dependent", c.value));
            }
        }
        if smallest_singular_ratio(&self.stacked) <= self.tolerances.rank {
            problems.push("stacked generalized eigenspaces are not a basis".into());
        }
        problems
    }

    /// Components of `x` in each generalized eigenspace (same order as
    /// `clusters`); they sum to `x`.
    pub fn components(&self, x: &DVector<C64>) -> Vec<DVector<C64>> {
        let coeffs = self
            .stacked
            .clone()
            .lu()
            .solve(x)
            .unwrap_or_else(|| {
                self.stacked
                    .clone()
                    .svd(true, true)
                    .solve(x, 1e-14)
                    .expect("SVD solve with U and V computed")
            });
        let mut offset = 0;
        self.clusters
            .iter()
            .map(|c| {
                let mut comp = DVector::<C64>::zeros(self.dim);
                for (k, b) in c.basis.iter().enumerate() {
                    comp += b * coeffs[offset + k];
                }
                offset += c.basis.len();
                comp
            })
            .collect()
    }

    pub fn local_spectrum(&self, x: &Vector) -> LocalSpectrum {
        let xc = x.to_complex();
        let norm = xc.norm();
        let points = if norm == 0.0 {
            Vec::new()
        } else {
            self.components(&xc)
                .iter()
                .zip(&self.clusters)
                .filter(|(comp, _)| comp.norm() > self.tolerances.rank * norm)
                .map(|(_, c)| c.value)
                .collect()
        };
        LocalSpectrum {
            points,
            ambiguous: self.ambiguous,
        }
    }

    /// Sum of multiplicities of clusters away from zero.
    pub fn nonzero_multiplicity(&self) -> usize {
        self.clusters
            .iter()
            .filter(|c| c.value.norm() / self.scale > self.tolerances.eig)
            .map(|c| c.multiplicity)
            .sum()
    }

    /// Span of the generalized eigenspaces with `|λ| ≥ r`.
    pub fn glocal_outside_disc(&self, r: f64) -> NumericSubspace {
        let eps = self.tolerances.eig;
        let mut boundary = false;
        let mut columns = Vec::new();
        for c in &self.clusters {
            let modulus = c.value.norm();
            if ((modulus - r) / self.scale).abs() <= eps {
                boundary = true;
            }
            if modulus >= r {
                columns.extend(c.basis.iter().cloned());
            }
        }
        NumericSubspace::from_columns(self.dim, &columns, self.tolerances.rank, boundary)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpectrum {
    pub points: Vec<C64>,
    /// Propagated clustering warning.
    pub ambiguous: bool,
}

impl LocalSpectrum {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_zero(&self, tol: Tolerances, scale: f64) -> bool {
        self.points.iter().any(|z| z.norm() / scale <= tol.eig)
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Orthonormal basis of a numerically computed subspace of `ℂⁿ`.
#[derive(Debug, Clone)]
pub struct NumericSubspace {
    pub ambient: usize,
    pub basis: DMatrix<C64>,
    pub boundary_warning: bool,
    tolerance: f64,
}

impl NumericSubspace {
    fn from_columns(ambient: usize, columns: &[DVector<C64>], tol: f64, boundary: bool) -> Self {
        let basis = if columns.is_empty() {
            DMatrix::zeros(ambient, 0)
        } else {
            let m = DMatrix::from_columns(columns);
            let svd = m.svd(true, false);
            let u = svd.u.expect("requested U");
            let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            let keep: Vec<DVector<C64>> = svd
                .singular_values
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > tol * smax && s > 0.0)
                .map(|(k, _)| u.column(k).into_owned())
                .collect();
            if keep.is_empty() {
                DMatrix::zeros(ambient, 0)
            } else {
                DMatrix::from_columns(&keep)
            }
        };
        Self {
            ambient,
            basis,
            boundary_warning: boundary,
            tolerance: tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Relative distance of `x` from the subspace.
    pub fn residual(&self, x: &DVector<C64>) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let projected = &self.basis * (self.basis.adjoint() * x);
        (x - projected).norm() / norm
    }

    pub fn contains(&self, x: &DVector<C64>) -> bool {
        self.residual(x) <= self.tolerance.max(1e-9) * 1e3
    }

    pub fn is_subspace_of(&self, other: &NumericSubspace) -> bool {
        self.basis
            .column_iter()
            .all(|c| other.contains(&c.into_owned()))
    }
}

/// `σ_T(x)`.
pub fn local_spectrum(t: &Matrix, x: &Vector, tol: Tolerances) -> Result<LocalSpectrum> {
    Error::check_dim(t.dim(), x.dim())?;
    Ok(eigen_structure(t, tol).local_spectrum(x))
}

/// `r_T(x)` as the largest modulus in `σ_T(x)`.
pub fn local_spectral_radius_direct(t: &Matrix, x: &Vector, tol: Tolerances) -> Result<f64> {
    Ok(local_spectrum(t, x, tol)?.max_modulus())
}

/// `i_T(x)` as the smallest modulus in `σ_T(x)`; `+∞` at `x = 0`.
pub fn inner_local_spectral_radius(t: &Matrix, x: &Vector, tol: Tolerances) -> Result<f64> {
    Ok(local_spectrum(t, x, tol)?.min_modulus())
}

/// `r_T(x)` from the orbit `‖Tᵏx‖`.
///
/// The estimate is the mean growth rate `(‖Tⁿx‖ / ‖Tᵐx‖)^{1/(n−m)}` over the
/// last quarter of the iterations (`m = n − max(1, ⌊n/4⌋)`). The orbit is
/// renormalized every step and tracked in log space, so it never overflows.
/// Returns `0` as soon as the orbit hits the zero vector.
pub fn local_spectral_radius_power(t: &Matrix, x: &Vector, iterations: usize) -> Result<f64> {
    Error::check_dim(t.dim(), x.dim())?;
    if iterations == 0 {
        return Err(Error::InvalidArgument("power estimate needs at least one iteration".into()));
    }
    let a = t.to_complex();
    let mut v = x.to_complex();
    let norm0 = v.norm();
    if norm0 == 0.0 {
        return Ok(0.0);
    }
    v /= C64::new(norm0, 0.0);
    let window = (iterations / 4).max(1);
    let start = iterations - window;
    let mut log_norm = 0.0;
    let mut log_at_start = 0.0;
    for k in 1..=iterations {
        v = &a * &v;
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        log_norm += norm.ln();
        v /= C64::new(norm, 0.0);
        if k == start {
            log_at_start = log_norm;
        }
    }
    Ok(((log_norm - log_at_start) / window as f64).exp())
}

/// Exact test for `i_T(x) = 0`: `x ≠ 0` and `x ∉ K(T)`.
pub fn izero(t: &Matrix, x: &Vector) -> Result<bool> {
    Ok(!x.is_zero() && !core_membership(t, x)?)
}

/// `𝒳_T(ℂ ∖ D(0, r))`, spanned by generalized eigenspaces with `|λ| ≥ r`.
pub fn glocal_outside_disc(t: &Matrix, r: f64, tol: Tolerances) -> NumericSubspace {
    eigen_structure(t, tol).glocal_outside_disc(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    fn diag(entries: &[i64]) -> Matrix {
        Matrix::diagonal(&entries.iter().map(|&e| GaussianRational::from_int(e)).collect::<Vec<_>>())
    }

    fn close(z: C64, re: f64, im: f64) -> bool {
        (z - C64::new(re, im)).norm() < 1e-9
    }

    #[test]
    fn diagonal_clusters() {
        let es = eigen_structure(&diag(&[2, 3]), Tolerances::default());
        assert_eq!(es.clusters.len(), 2);
        assert!(close(es.clusters[0].value, 2.0, 0.0));
        assert!(close(es.clusters[1].value, 3.0, 0.0));
        assert!(es.clusters.iter().all(|c| c.multiplicity == 1));
        assert!(es.validate().is_empty());
    }

    #[test]
    fn nilpotent_single_cluster() {
        let t = Matrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        let es = eigen_structure(&t, Tolerances::default());
        assert_eq!(es.clusters.len(), 1);
        assert_eq!(es.clusters[0].multiplicity, 2);
        assert!(es.clusters[0].value.norm() < 1e-12);
        assert!(es.validate().is_empty());
        assert_eq!(es.glocal_outside_disc(0.0).dim(), 2);
    }

    #[test]
    fn local_spectrum_examples() {
        let tol = Tolerances::default();
        let s = local_spectrum(&diag(&[2, 3]), &Vector::unit(2, 0), tol).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!(close(s.points[0], 2.0, 0.0));
        assert!(local_spectrum(&diag(&[2, 3]), &Vector::zeros(2), tol)
            .unwrap()
            .is_empty());
        let s = local_spectrum(&diag(&[0, 2]), &Vector::from_ints(&[1, 1]), tol).unwrap();
        assert_eq!(s.points.len(), 2);
    }

    #[test]
    fn radius_examples() {
        let tol = Tolerances::default();
        let e1 = Vector::unit(2, 0);
        let both = Vector::from_ints(&[1, 1]);
        assert!((local_spectral_radius_direct(&diag(&[2, 3]), &e1, tol).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(local_spectral_radius_direct(&diag(&[2, 3]), &Vector::zeros(2), tol).unwrap(), 0.0);
        assert!(local_spectral_radius_direct(&diag(&[0, 2]), &e1, tol).unwrap() < 1e-12);

        assert!((local_spectral_radius_power(&Matrix::scalar(3, &GaussianRational::from_int(2)), &Vector::from_ints(&[1, -2, 5]), 50).unwrap() - 2.0).abs() < 1e-9);
        let nil = Matrix::from_int_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(local_spectral_radius_power(&nil, &Vector::from_ints(&[1, 1, 1]), 10).unwrap(), 0.0);
        assert!((local_spectral_radius_power(&diag(&[2, 3]), &both, 200).unwrap() - 3.0).abs() < 1e-3);
        assert!(local_spectral_radius_power(&nil, &both.clone(), 0).is_err());
    }

    #[test]
    fn inner_radius_examples() {
        let tol = Tolerances::default();
        let both = Vector::from_ints(&[1, 1]);
        assert!(inner_local_spectral_radius(&diag(&[0, 2]), &both, tol).unwrap() < 1e-12);
        assert!((inner_local_spectral_radius(&diag(&[2, 3]), &both, tol).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(inner_local_spectral_radius(&diag(&[2, 3]), &Vector::zeros(2), tol).unwrap(), f64::INFINITY);
    }

    #[test]
    fn izero_examples() {
        assert!(izero(&diag(&[0, 2]), &Vector::unit(2, 0)).unwrap());
        assert!(!izero(&diag(&[1, 2]), &Vector::from_ints(&[3, -1])).unwrap());
        assert!(!izero(&diag(&[0, 0]), &Vector::zeros(2)).unwrap());
    }

    #[test]
    fn glocal_examples() {
        let tol = Tolerances::default();
        let t = diag(&[0, 2]);
        assert_eq!(glocal_outside_disc(&t, 0.0, tol).dim(), 2);
        let outside = glocal_outside_disc(&t, 1.0, tol);
        assert_eq!(outside.dim(), 1);
        assert!(outside.contains(&Vector::unit(2, 1).to_complex()));
        assert!(!outside.contains(&Vector::unit(2, 0).to_complex()));
        assert_eq!(glocal_outside_disc(&t, 2.5, tol).dim(), 0);
        assert!(glocal_outside_disc(&t, 2.0, tol).boundary_warning);
    }

    #[test]
    fn complex_spectrum_of_rotation() {
        let rot = Matrix::from_int_rows(&[&[0, -1], &[1, 0]]);
        let es = eigen_structure(&rot, Tolerances::default());
        assert_eq!(es.clusters.len(), 2);
        assert!(es.clusters.iter().all(|c| (c.value.norm() - 1.0).abs() < 1e-12));
        assert_eq!(es.nonzero_multiplicity(), 2);
    }
}
