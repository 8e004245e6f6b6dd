//! Proportionality through cores of Jordan products with rank-one operators.
//!
//! `B = λA` (λ ≠ 0) forces `K(AF + FA) = K(BF + FB)` for every rank-one `F`.
//! Otherwise a rank-one `F = x ⊗ f` separating the two cores is built from
//! the structure of the pair, with a seeded search as last resort.

use serde::{Deserialize, Serialize};

use super::affine::{affine_combo_recover_with, AffineComboResult};
use super::VectorSweep;
use crate::error::{Error, Result};
use crate::linalg::{rank_of_vectors, solve, solve_functional, Functional, Matrix, Vector};
use crate::sample::Sampler;
use crate::scalar::GaussianRational;
use crate::spectral::{analytic_core, jordan_product, rank_one};
use crate::subspace::Subspace;
use num_traits::{One, Zero};

pub const DEFAULT_BUDGET: usize = 5000;

/// Random vectors tried beyond the structured sweep when looking for `x`
/// with a prescribed independence pattern.
const SWEEP_EXTRA: usize = 64;

const STREAM_SEARCH: u64 = 0x5034;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProportionalityCase {
    /// `(x, Ax, Bx)` independent; `f(x) = f(Ax) = 0`, `f(Bx) = 1`.
    Case1Independent,
    /// `Ax ∈ span{x}` but `Bx ∉ span{x}`; `f(x) = 0`, `f(Bx) = 1`.
    Case2Eigenvector,
    /// One operator is scalar, the other is not.
    ScalarVersusNonScalar,
    /// Exactly one operator is zero.
    ZeroVersusNonzero,
    /// `B = αI + λA`, α ≠ 0, `(x, Ax, A²x)` independent; `f(x) = 1`, `f(Ax) = f(A²x) = 0`.
    AlphaIndependentPowers,
    /// `B = αI + λA`, α ≠ 0, `A² = aA + bI`; `f(x) = 1`, `f(Ax) = z` with `z² = az + b`.
    AlphaQuadraticRoot,
    FallbackSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProportionalityResult {
    Proportional {
        lambda: GaussianRational,
    },
    Witness {
        x: Vector,
        f: Functional,
        operator: Matrix,
        case: ProportionalityCase,
        lhs_core: Subspace,
        rhs_core: Subspace,
    },
    Inconclusive {
        tried: usize,
    },
}

impl ProportionalityResult {
    pub fn verify(&self, a: &Matrix, b: &Matrix) -> Result<()> {
        Error::check_dim(a.dim(), b.dim())?;
        match self {
            Self::Proportional { lambda } => {
                if lambda.is_zero() || *b != a.scale(lambda) {
                    return Err(Error::Certificate("B ≠ λA".into()));
                }
            }
            Self::Witness {
                x,
                f,
                operator,
                lhs_core,
                rhs_core,
                ..
            } => {
                if *operator != rank_one(x, f)? || operator.is_zero() {
                    return Err(Error::Certificate("operator is not the nonzero x ⊗ f".into()));
                }
                let (lhs, rhs) = cores(a, b, operator)?;
                if lhs != *lhs_core || rhs != *rhs_core {
                    return Err(Error::Certificate("recorded cores do not match".into()));
                }
                if lhs == rhs {
                    return Err(Error::Certificate("cores coincide".into()));
                }
            }
            Self::Inconclusive { .. } => {}
        }
        Ok(())
    }
}

fn cores(a: &Matrix, b: &Matrix, f: &Matrix) -> Result<(Subspace, Subspace)> {
    Ok((
        analytic_core(&jordan_product(a, f)?),
        analytic_core(&jordan_product(b, f)?),
    ))
}

/// `Some(λ)` with `B = λA` and `λ ≠ 0`.
fn entry_ratio(a: &Matrix, b: &Matrix) -> Option<GaussianRational> {
    let pivot = a.entries().zip(b.entries()).find(|(x, _)| !x.is_zero())?;
    let lambda = pivot.1 / pivot.0;
    (!lambda.is_zero() && *b == a.scale(&lambda)).then_some(lambda)
}

struct Search<'a> {
    a: &'a Matrix,
    b: &'a Matrix,
    tried: usize,
}

impl Search<'_> {
    /// Checks `F = x ⊗ f` and packages it when the cores differ.
    fn check(
        &mut self,
        x: &Vector,
        f: Functional,
        case: ProportionalityCase,
    ) -> Result<Option<ProportionalityResult>> {
        self.tried += 1;
        let operator = rank_one(x, &f)?;
        if operator.is_zero() {
            return Ok(None);
        }
        let (lhs_core, rhs_core) = cores(self.a, self.b, &operator)?;
        Ok((lhs_core != rhs_core).then(|| ProportionalityResult::Witness {
            x: x.clone(),
            f,
            operator,
            case,
            lhs_core,
            rhs_core,
        }))
    }

    /// Functional with prescribed values; `None` when the constraints clash.
    fn with_values(
        &mut self,
        x: &Vector,
        constraints: &[(Vector, GaussianRational)],
        case: ProportionalityCase,
    ) -> Result<Option<ProportionalityResult>> {
        match solve_functional(x.dim(), constraints) {
            Ok(f) => self.check(x, f, case),
            Err(Error::Infeasible) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

pub fn proportionality_test(
    a: &Matrix,
    b: &Matrix,
    budget: usize,
    seed: u64,
) -> Result<ProportionalityResult> {
    Error::check_dim(a.dim(), b.dim())?;
    let n = a.dim();
    if a.is_zero() && b.is_zero() {
        return Ok(ProportionalityResult::Proportional {
            lambda: GaussianRational::one(),
        });
    }
    if let Some(lambda) = entry_ratio(a, b) {
        return Ok(ProportionalityResult::Proportional { lambda });
    }
    let mut search = Search { a, b, tried: 0 };
    let zero = GaussianRational::zero;
    let one = GaussianRational::one;
    let sweep = || {
        let s = VectorSweep::new(n, seed);
        let len = s.structured_len() + SWEEP_EXTRA;
        s.take(len)
    };

    if a.is_zero() || b.is_zero() {
        // The zero side has core {0}; e₁ ⊗ e₁* meets the other side's core
        // unless that side is nilpotent against it, which the search handles.
        let e1 = Vector::unit(n, 0);
        let f = Functional::unit(n, 0);
        if let Some(w) = search.check(&e1, f, ProportionalityCase::ZeroVersusNonzero)? {
            return Ok(w);
        }
        return fallback(search, budget, seed);
    }

    for x in sweep() {
        let (ax, bx) = (a.apply(&x), b.apply(&x));
        if rank_of_vectors(&[&x, &ax, &bx]) == 3 {
            let found = search.with_values(
                &x,
                &[(x.clone(), zero()), (ax, zero()), (bx, one())],
                ProportionalityCase::Case1Independent,
            )?;
            if let Some(w) = found {
                return Ok(w);
            }
        }
    }

    // No x with (x, Ax, Bx) independent in the sweep: recover B = αI + λA.
    match affine_combo_recover_with(b, a, 0, seed) {
        Ok(AffineComboResult::Witness { x, .. }) => {
            let bx = b.apply(&x);
            let found = search.with_values(
                &x,
                &[(x.clone(), zero()), (bx, one())],
                ProportionalityCase::Case2Eigenvector,
            )?;
            if let Some(w) = found {
                return Ok(w);
            }
        }
        Ok(AffineComboResult::Coefficients { lambda: alpha, mu: lambda }) => {
            if let Some(w) = affine_case(&mut search, &alpha, &lambda, sweep())? {
                return Ok(w);
            }
        }
        Ok(AffineComboResult::SpanConsistent { .. }) | Err(Error::NoWitness(_)) => {}
        Err(e) => return Err(e),
    }
    fallback(search, budget, seed)
}

/// `B = αI + λA` with the pair not proportional.
fn affine_case(
    search: &mut Search<'_>,
    alpha: &GaussianRational,
    lambda: &GaussianRational,
    sweep: impl Iterator<Item = Vector>,
) -> Result<Option<ProportionalityResult>> {
    let a = search.a;
    let n = a.dim();
    let zero = GaussianRational::zero;
    let one = GaussianRational::one;

    if let Some(c) = a.as_scalar() {
        // A = cI with B = αI + λcI scalar as well; B ≠ λ'A leaves c = 0 or B = 0,
        // both handled earlier, so any idempotent F separates the cores.
        debug_assert!(!c.is_zero());
        let e1 = Vector::unit(n, 0);
        return search.check(&e1, Functional::unit(n, 0), ProportionalityCase::ScalarVersusNonScalar);
    }
    let candidates: Vec<Vector> = sweep.collect();
    if lambda.is_zero() {
        // B = αI: a nilpotent F with x ∈ N(AF + FA − I).
        for x in &candidates {
            let ax = a.apply(x);
            if rank_of_vectors(&[x, &ax]) == 2 {
                let found = search.with_values(
                    x,
                    &[(x.clone(), zero()), (ax, one())],
                    ProportionalityCase::ScalarVersusNonScalar,
                )?;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        return Ok(None);
    }
    debug_assert!(!alpha.is_zero());
    for x in &candidates {
        let ax = a.apply(x);
        let aax = a.apply(&ax);
        if rank_of_vectors(&[x, &ax, &aax]) == 3 {
            let found = search.with_values(
                x,
                &[(x.clone(), one()), (ax, zero()), (aax, zero())],
                ProportionalityCase::AlphaIndependentPowers,
            )?;
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    // Every swept x has A²x ∈ span{x, Ax}: read off A² = aA + bI from an x
    // with (x, Ax) independent and pick f(Ax)/f(x) = z, a root of z² − az − b.
    for x in &candidates {
        let ax = a.apply(x);
        if rank_of_vectors(&[x, &ax]) != 2 {
            continue;
        }
        let aax = a.apply(&ax);
        let rows: Vec<Vec<GaussianRational>> =
            (0..n).map(|i| vec![ax[i].clone(), x[i].clone()]).collect();
        let Some(ab) = solve(&rows, 2, aax.entries()) else {
            continue;
        };
        let (p, q) = (&ab[0], &ab[1]);
        let disc = &(p * p) + &(q * &GaussianRational::from_int(4));
        let Some(root) = disc.sqrt() else {
            continue;
        };
        let half = GaussianRational::from_fractions(1, 2, 0, 1);
        for z in [&(p + &root) * &half, &(p - &root) * &half] {
            let found = search.with_values(
                x,
                &[(x.clone(), one()), (ax.clone(), z)],
                ProportionalityCase::AlphaQuadraticRoot,
            )?;
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    Ok(None)
}

/// Structured `eᵢ ⊗ eⱼ*` first, then seeded random rank-one operators.
fn fallback(mut search: Search<'_>, budget: usize, seed: u64) -> Result<ProportionalityResult> {
    let n = search.a.dim();
    for i in 0..n {
        for j in 0..n {
            if search.tried >= budget {
                return Ok(ProportionalityResult::Inconclusive {
                    tried: search.tried,
                });
            }
            let found = search.check(
                &Vector::unit(n, i),
                Functional::unit(n, j),
                ProportionalityCase::FallbackSearch,
            )?;
            if let Some(w) = found {
                return Ok(w);
            }
        }
    }
    let mut k = 0u64;
    while search.tried < budget {
        let mut rng = Sampler::for_trial(seed, STREAM_SEARCH, k);
        k += 1;
        let x = rng.small_vector(n);
        let f = rng.functional(n);
        if let Some(w) = search.check(&x, f, ProportionalityCase::FallbackSearch)? {
            return Ok(w);
        }
    }
    Ok(ProportionalityResult::Inconclusive {
        tried: search.tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn diag(d: &[i64]) -> Matrix {
        Matrix::diagonal(&d.iter().map(|&v| v.into()).collect::<Vec<_>>())
    }

    fn witness_case(r: &ProportionalityResult) -> ProportionalityCase {
        match r {
            ProportionalityResult::Witness { case, .. } => *case,
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn planted_multiple() {
        let a = Sampler::new(5).matrix(4);
        let b = a.scale(&q("5"));
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(r, ProportionalityResult::Proportional { lambda: q("5") });
        r.verify(&a, &b).unwrap();
    }

    #[test]
    fn diagonal_shifted_by_identity() {
        let a = diag(&[1, 2, 3]);
        let b = &a + &Matrix::identity(3);
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(witness_case(&r), ProportionalityCase::AlphaIndependentPowers);
        r.verify(&a, &b).unwrap();
    }

    #[test]
    fn case_one_at_first_basis_vector() {
        // A e1 = e2, B e1 = e3.
        let a = Matrix::from_int_rows(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]);
        let b = Matrix::from_int_rows(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(witness_case(&r), ProportionalityCase::Case1Independent);
        let ProportionalityResult::Witness { x, operator, lhs_core, rhs_core, .. } = &r else {
            unreachable!()
        };
        assert_eq!(*x, Vector::unit(3, 0));
        let lhs = jordan_product(&a, operator).unwrap();
        assert!((&lhs * &lhs).is_zero());
        assert!(lhs_core.is_zero());
        assert!(rhs_core.contains(x).unwrap());
        r.verify(&a, &b).unwrap();
    }

    #[test]
    fn scalar_against_non_scalar() {
        let a = diag(&[1, 2, 2]);
        let b = Matrix::scalar(3, &q("3"));
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(witness_case(&r), ProportionalityCase::ScalarVersusNonScalar);
        r.verify(&a, &b).unwrap();
    }

    #[test]
    fn zero_against_nonzero() {
        let a = Matrix::zeros(3);
        let b = Matrix::identity(3);
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(witness_case(&r), ProportionalityCase::ZeroVersusNonzero);
        r.verify(&a, &b).unwrap();
    }

    #[test]
    fn quadratic_minimal_polynomial() {
        // A² = I with both eigenvalues ±1 rational; B = A + 2I.
        let a = diag(&[1, -1, 1]);
        let b = &a + &Matrix::scalar(3, &q("2"));
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        r.verify(&a, &b).unwrap();
        assert!(matches!(r, ProportionalityResult::Witness { .. }));
    }

    #[test]
    fn random_non_proportional_pairs() {
        let mut rng = Sampler::new(9);
        for n in 3..=5 {
            let a = rng.matrix(n);
            let b = rng.matrix(n);
            let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 1).unwrap();
            r.verify(&a, &b).unwrap();
            assert_eq!(witness_case(&r), ProportionalityCase::Case1Independent);
        }
    }

    #[test]
    fn tampered_witness_rejected() {
        let a = diag(&[1, 2, 3]);
        let b = &a + &Matrix::identity(3);
        let r = proportionality_test(&a, &b, DEFAULT_BUDGET, 0).unwrap();
        assert!(r.verify(&a, &a.scale(&q("2"))).is_err());
    }
}
