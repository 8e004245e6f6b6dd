//! Recovering `T = λI + μS`.

use serde::{Deserialize, Serialize};

use super::VectorSweep;
use crate::error::{Error, Result};
use crate::linalg::{rank_of_vectors, solve, Matrix, Vector};
use crate::scalar::GaussianRational;

pub const DEFAULT_SWEEP_BUDGET: usize = 512;

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AffineComboResult {
    Coefficients {
        lambda: GaussianRational,
        mu: GaussianRational,
    },
    /// `Tx ∉ span{x, Sx}`; `rank` is the rank of `[x | Sx | Tx]`
    /// (3 unless `x` is an eigenvector of `S`).
    Witness { x: Vector, rank: usize },
    /// Dimension below 3 and no sweep vector violates the span condition.
    SpanConsistent { vectors_checked: usize },
}

impl AffineComboResult {
    pub fn verify(&self, t: &Matrix, s: &Matrix) -> Result<()> {
        Error::check_dim(t.dim(), s.dim())?;
        match self {
            Self::Coefficients { lambda, mu } => {
                let rebuilt = &Matrix::scalar(t.dim(), lambda) + &s.scale(mu);
                if rebuilt != *t {
                    return Err(Error::Certificate("T ≠ λI + μS".into()));
                }
            }
            Self::Witness { x, rank } => {
                let sx = s.apply(x);
                let tx = t.apply(x);
                if !violates_span(x, &sx, &tx) {
                    return Err(Error::Certificate("Tx ∈ span{x, Sx}".into()));
                }
                if rank_of_vectors(&[x, &sx, &tx]) != *rank {
                    return Err(Error::Certificate("recorded rank is wrong".into()));
                }
            }
            Self::SpanConsistent { .. } => {
                if t.dim() >= 3 {
                    return Err(Error::Certificate(
                        "span-consistent verdict is only issued below dimension 3".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn violates_span(x: &Vector, sx: &Vector, tx: &Vector) -> bool {
    rank_of_vectors(&[x, sx, tx]) > rank_of_vectors(&[x, sx])
}

/// Solves `vec(T) = λ·vec(I) + μ·vec(S)` exactly.
fn solve_coefficients(t: &Matrix, s: &Matrix) -> Option<(GaussianRational, GaussianRational)> {
    let n = t.dim();
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let delta = GaussianRational::from_int((i == j) as i64);
            rows.push(vec![delta, s[(i, j)].clone()]);
            rhs.push(t[(i, j)].clone());
        }
    }
    let sol = solve(&rows, 2, &rhs)?;
    let mut it = sol.into_iter();
    Some((it.next().unwrap(), it.next().unwrap()))
}

pub fn affine_combo_recover(t: &Matrix, s: &Matrix) -> Result<AffineComboResult> {
    affine_combo_recover_with(t, s, DEFAULT_SWEEP_BUDGET, 0)
}

/// Exact solve first; otherwise sweep candidate vectors, preferring a witness
/// with `rank [x | Sx | Tx] = 3`.
pub fn affine_combo_recover_with(
    t: &Matrix,
    s: &Matrix,
    budget: usize,
    seed: u64,
) -> Result<AffineComboResult> {
    Error::check_dim(t.dim(), s.dim())?;
    if let Some((lambda, mu)) = solve_coefficients(t, s) {
        return Ok(AffineComboResult::Coefficients { lambda, mu });
    }
    let n = t.dim();
    let sweep = VectorSweep::new(n, seed);
    let budget = budget.max(sweep.structured_len());
    let mut fallback = None;
    for x in sweep.take(budget) {
        let sx = s.apply(&x);
        let tx = t.apply(&x);
        if !violates_span(&x, &sx, &tx) {
            continue;
        }
        let rank = rank_of_vectors(&[&x, &sx, &tx]);
        if rank == 3 {
            return Ok(AffineComboResult::Witness { x, rank });
        }
        fallback.get_or_insert(AffineComboResult::Witness { x, rank });
    }
    if let Some(w) = fallback {
        return Ok(w);
    }
    if n < 3 {
        return Ok(AffineComboResult::SpanConsistent {
            vectors_checked: budget,
        });
    }
    Err(Error::NoWitness(format!(
        "T is not λI + μS but {budget} sweep vectors satisfy Tx ∈ span{{x, Sx}}"
    )))
}
