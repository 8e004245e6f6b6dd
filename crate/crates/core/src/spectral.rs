//! Exact operator quantities: analytic core, Jordan product, rank-one
//! operators and core-chain certificates.
//!
//! On `ℂⁿ` the analytic core `K(T)` is the stabilized range `R(Tˢ)`, where
//! `s` is the first index with `rank Tˢ = rank Tˢ⁺¹`. It is the part of the
//! space on which `T` acts invertibly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Functional, Matrix, Vector};
use crate::scalar::GaussianRational;
use crate::subspace::Subspace;

/// Relative slack for the floating norm bound in chain certificates.
pub const CHAIN_NORM_SLACK: f64 = 1e-12;

/// `TS + ST`.
pub fn jordan_product(t: &Matrix, s: &Matrix) -> Result<Matrix> {
    Error::check_dim(t.dim(), s.dim())?;
    Ok(&(t * s) + &(s * t))
}

/// `x ⊗ f : z ↦ f(z)·x`.
pub fn rank_one(x: &Vector, f: &Functional) -> Result<Matrix> {
    Error::check_dim(x.dim(), f.dim())?;
    Ok(Matrix::from_fn(x.dim(), |i, j| &x[i] * &f[j]))
}

/// The descending range chain `R(T) ⊇ R(T²) ⊇ …` up to stabilization.
#[derive(Debug, Clone)]
pub struct RangeChain {
    /// Least `s` with `rank Tˢ = rank Tˢ⁺¹`.
    pub index: usize,
    /// `rank T⁰, rank T¹, …, rank Tˢ⁺¹`.
    pub ranks: Vec<usize>,
    pub core: Subspace,
}

pub fn range_chain(t: &Matrix) -> RangeChain {
    let n = t.dim();
    let mut current = Subspace::full(n);
    let mut ranks = vec![n];
    loop {
        let next = current
            .image_under(t)
            .expect("operator acts on its own ambient space");
        ranks.push(next.dim());
        if next.dim() == current.dim() {
            return RangeChain {
                index: ranks.len() - 2,
                ranks,
                core: current,
            };
        }
        current = next;
    }
}

/// `K(T)`.
pub fn analytic_core(t: &Matrix) -> Subspace {
    range_chain(t).core
}

/// `x ∈ K(T)`.
pub fn core_membership(t: &Matrix, x: &Vector) -> Result<bool> {
    Error::check_dim(t.dim(), x.dim())?;
    analytic_core(t).contains(x)
}

/// `N(T − λ)`.
pub fn eig_shift_kernel(t: &Matrix, lambda: &GaussianRational) -> Subspace {
    kernel_basis(&t.shift(lambda))
}

/// Evidence that `x ∈ K(T)` in the sequential sense: a backward orbit
/// `x₀ = x`, `T·xₖ₊₁ = xₖ` with `‖xₖ‖ ≤ δᵏ‖x‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreChainCertificate {
    pub operator: Matrix,
    pub vector: Vector,
    pub delta: f64,
    pub chain: Vec<Vector>,
}

impl CoreChainCertificate {
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Certificate(msg));
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return fail(format!("delta {} is not a positive real", self.delta));
        }
        let Some(first) = self.chain.first() else {
            return fail("empty chain".into());
        };
        if *first != self.vector {
            return fail("chain does not start at the certified vector".into());
        }
        for (k, pair) in self.chain.windows(2).enumerate() {
            if pair[1].dim() != self.operator.dim() {
                return fail(format!("x_{} has the wrong dimension", k + 1));
            }
            if self.operator.apply(&pair[1]) != pair[0] {
                return fail(format!("T·x_{} ≠ x_{}", k + 1, k));
            }
        }
        let base = first.norm_f64();
        for (k, x) in self.chain.iter().enumerate() {
            let bound = self.delta.powi(k as i32) * base * (1.0 + CHAIN_NORM_SLACK);
            if x.norm_f64() > bound {
                return fail(format!("‖x_{k}‖ exceeds δ^{k}‖x‖"));
            }
        }
        Ok(())
    }
}

/// Builds `x₀ … x_N` by inverting `T` restricted to `K(T)`, which `T` maps
/// onto itself.
pub fn core_chain_certificate(t: &Matrix, x: &Vector, length: usize) -> Result<CoreChainCertificate> {
    Error::check_dim(t.dim(), x.dim())?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let core = analytic_core(t);
    let Some(mut coords) = core.coordinates(x)? else {
        return Err(Error::NotInCore);
    };
    let basis = core.basis();
    let d = basis.len();
    // restricted[i][j] = i-th coordinate of T·b_j
    let mut restricted = Matrix::zeros(d);
    for (j, b) in basis.iter().enumerate() {
        let image = core
            .coordinates(&t.apply(b))?
            .expect("T maps its analytic core into itself");
        for (i, c) in image.into_iter().enumerate() {
            restricted[(i, j)] = c;
        }
    }
    let inverse = restricted
        .inverse()
        .expect("T restricted to its analytic core is invertible");

    let mut chain = vec![x.clone()];
    for _ in 0..length {
        let coord_vec = Vector::new(coords);
        coords = inverse.apply(&coord_vec).into_entries();
        let mut next = Vector::zeros(t.dim());
        for (c, b) in coords.iter().zip(basis) {
            next = &next + &b.scale(c);
        }
        chain.push(next);
    }

    let norms: Vec<f64> = chain.iter().map(Vector::norm_f64).collect();
    let delta = norms
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::NAN, f64::max);
    let delta = if delta.is_nan() { 1.0 } else { delta };

    let cert = CoreChainCertificate {
        operator: t.clone(),
        vector: x.clone(),
        delta,
        chain,
    };
    cert.verify()?;
    Ok(cert)
}
