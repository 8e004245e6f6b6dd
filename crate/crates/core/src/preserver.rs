//! Harness for maps `φ` on operators that should satisfy
//! `K(φ(T)φ(S) + φ(S)φ(T)) = K(TS + ST)`.
//!
//! Scaling maps `φ(T) = γ(T)T` satisfy it exactly, since `K(cM) = K(M)` for
//! `c ≠ 0`. The harness checks that direction on samples, searches for
//! counterexamples against other map families, and runs black-box
//! diagnostics that follow the reduction from the identity to the scaling
//! form: zero is fixed, rank-one operators are preserved, each rank-one `F`
//! is rescaled, and finally every `T` is rescaled.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Functional, Matrix, Vector};
use crate::local::izero;
use crate::sample::Sampler;
use crate::scalar::GaussianRational;
use crate::spectral::{analytic_core, jordan_product, rank_one};
use crate::subspace::Subspace;

const STREAM_FORWARD: u64 = 0x5001;
const STREAM_FALSIFY: u64 = 0x5002;
const STREAM_STEPS: u64 = 0x5003;
const STREAM_COROLLARY: u64 = 0x5004;

/// Sampled pairs live in dimensions `3..=6`.
pub const SAMPLE_DIMS: (usize, usize) = (3, 6);

/// Cap on violations and counterexamples kept in a step report; counts are
/// never truncated.
const MAX_RECORDED: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Gamma {
    Constant { value: GaussianRational },
    /// `γ(T)` is a nonzero scalar drawn from a generator seeded by a hash of
    /// `T` and `seed`, so it varies from operator to operator.
    Hashed { seed: u64 },
}

impl Gamma {
    pub fn of(&self, t: &Matrix) -> GaussianRational {
        match self {
            Self::Constant { value } => value.clone(),
            Self::Hashed { seed } => Sampler::new(fingerprint(t, *seed)).nonzero_scalar(),
        }
    }
}

fn fingerprint(t: &Matrix, salt: u64) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    salt.hash(&mut h);
    h.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapModel {
    Identity,
    Scaling { gamma: Gamma },
    /// `T ↦ U T U⁻¹`.
    Similarity { u: Matrix, u_inv: Matrix },
    Transpose,
    /// `T ↦ T + N` on the zero operator and on operators whose fingerprint
    /// is even; identity elsewhere.
    NilpotentShift { n: Matrix, salt: u64 },
    /// Applied left to right.
    Composite { maps: Vec<MapModel> },
}

impl MapModel {
    pub fn similarity(u: Matrix) -> Result<Self> {
        let u_inv = u
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("similarity matrix is singular".into()))?;
        Ok(Self::Similarity { u, u_inv })
    }

    /// Similarity by a random non-scalar invertible matrix.
    pub fn random_similarity(n: usize, seed: u64) -> Self {
        let mut rng = Sampler::new(seed);
        loop {
            let (u, u_inv) = rng.invertible(n);
            if n < 2 || u.as_scalar().is_none() {
                return Self::Similarity { u, u_inv };
            }
        }
    }

    pub fn random_nilpotent_shift(n: usize, seed: u64) -> Self {
        let mut rng = Sampler::new(seed);
        let shift = loop {
            let m = rng.nilpotent(n, false);
            if !m.is_zero() || n < 2 {
                break m;
            }
        };
        Self::NilpotentShift {
            n: shift,
            salt: seed,
        }
    }

    pub fn is_scaling(&self) -> bool {
        match self {
            Self::Identity | Self::Scaling { .. } => true,
            Self::Composite { maps } => maps.iter().all(Self::is_scaling),
            _ => false,
        }
    }

    /// Dimension the map is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Similarity { u, .. } => Some(u.dim()),
            Self::NilpotentShift { n, .. } => Some(n.dim()),
            Self::Composite { maps } => maps.iter().find_map(Self::dim),
            _ => None,
        }
    }

    /// Structural problems: zero scaling constant, wrong inverse, non-nilpotent shift.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        match self {
            Self::Scaling {
                gamma: Gamma::Constant { value },
            } if value.is_zero() => problems.push("scaling constant is zero".into()),
            Self::Similarity { u, u_inv } => {
                if u.dim() != u_inv.dim() || u * u_inv != Matrix::identity(u.dim()) {
                    problems.push("u_inv is not the inverse of u".into());
                }
            }
            Self::NilpotentShift { n, .. } => {
                if !n.pow(n.dim() as u32).is_zero() {
                    problems.push("shift is not nilpotent".into());
                }
            }
            Self::Composite { maps } => {
                for m in maps {
                    problems.extend(m.validate());
                }
            }
            _ => {}
        }
        problems
    }

    pub fn apply(&self, t: &Matrix) -> Result<Matrix> {
        Ok(match self {
            Self::Identity => t.clone(),
            Self::Scaling { gamma } => t.scale(&gamma.of(t)),
            Self::Similarity { u, u_inv } => {
                Error::check_dim(u.dim(), t.dim())?;
                &(u * t) * u_inv
            }
            Self::Transpose => t.transpose(),
            Self::NilpotentShift { n, salt } => {
                Error::check_dim(n.dim(), t.dim())?;
                if t.is_zero() || fingerprint(t, *salt).is_multiple_of(2) {
                    t + n
                } else {
                    t.clone()
                }
            }
            Self::Composite { maps } => {
                let mut out = t.clone();
                for m in maps {
                    out = m.apply(&out)?;
                }
                out
            }
        })
    }
}

/// A pair whose Jordan-product cores differ before and after the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCounterexample {
    pub t: Matrix,
    pub s: Matrix,
    pub phi_t: Matrix,
    pub phi_s: Matrix,
    pub original_core: Subspace,
    pub image_core: Subspace,
}

impl PairCounterexample {
    fn build(t: &Matrix, s: &Matrix, phi_t: Matrix, phi_s: Matrix) -> Result<Option<Self>> {
        let original_core = analytic_core(&jordan_product(t, s)?);
        let image_core = analytic_core(&jordan_product(&phi_t, &phi_s)?);
        Ok((original_core != image_core).then(|| Self {
            t: t.clone(),
            s: s.clone(),
            phi_t,
            phi_s,
            original_core,
            image_core,
        }))
    }

    /// Re-checks the recorded cores and their mismatch.
    pub fn verify(&self) -> Result<()> {
        let original = analytic_core(&jordan_product(&self.t, &self.s)?);
        let image = analytic_core(&jordan_product(&self.phi_t, &self.phi_s)?);
        if original != self.original_core || image != self.image_core {
            return Err(Error::Certificate("recorded cores do not match".into()));
        }
        if original == image {
            return Err(Error::Certificate("cores coincide".into()));
        }
        Ok(())
    }

    /// Also checks that the recorded images come from `map`.
    pub fn verify_against(&self, map: &MapModel) -> Result<()> {
        if map.apply(&self.t)? != self.phi_t || map.apply(&self.s)? != self.phi_s {
            return Err(Error::Certificate("recorded images differ from the map".into()));
        }
        self.verify()
    }
}

/// `K(φTφS + φSφT) = K(TS + ST)`.
pub fn check_pair(map: &MapModel, t: &Matrix, s: &Matrix) -> Result<bool> {
    Error::check_dim(t.dim(), s.dim())?;
    Ok(PairCounterexample::build(t, s, map.apply(t)?, map.apply(s)?)?.is_none())
}

fn sample_dim(rng: &mut Sampler) -> usize {
    rng.usize_in(SAMPLE_DIMS.0, SAMPLE_DIMS.1)
}

fn sample_pair(seed: u64, stream: u64, k: usize, dim: Option<usize>) -> (Matrix, Matrix) {
    let mut rng = Sampler::for_trial(seed, stream, k as u64);
    let n = dim.unwrap_or_else(|| sample_dim(&mut rng));
    (rng.mixed_operator(n), rng.mixed_operator(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardReport {
    pub trials: usize,
    pub failures: usize,
    pub dims: (usize, usize),
    pub first_failure: Option<PairCounterexample>,
}

/// Samples pairs in dimensions `3..=6` and checks the identity for a scaling map.
pub fn verify_forward(map: &MapModel, trials: usize, seed: u64) -> Result<ForwardReport> {
    if !map.is_scaling() {
        return Err(Error::InvalidArgument(
            "forward verification applies to scaling maps".into(),
        ));
    }
    let mut failures = 0;
    let mut first_failure = None;
    for k in 0..trials {
        let (t, s) = sample_pair(seed, STREAM_FORWARD, k, map.dim());
        if let Some(ce) = PairCounterexample::build(&t, &s, map.apply(&t)?, map.apply(&s)?)? {
            failures += 1;
            first_failure.get_or_insert(ce);
        }
    }
    Ok(ForwardReport {
        trials,
        failures,
        dims: SAMPLE_DIMS,
        first_failure,
    })
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FalsifyOutcome {
    Counterexample {
        certificate: PairCounterexample,
        tried: usize,
    },
    NoneFound {
        tried: usize,
    },
}

/// Rank-one probes `x ⊗ f` with `x`, `f` drawn from `e_i` and `e_i + e_j`.
fn structured_rank_ones(n: usize) -> Vec<Matrix> {
    let mut vs: Vec<Vector> = (0..n).map(|k| Vector::unit(n, k)).collect();
    for i in 0..n {
        for j in i + 1..n {
            vs.push(&Vector::unit(n, i) + &Vector::unit(n, j));
        }
    }
    let mut out = Vec::with_capacity(vs.len() * vs.len());
    for x in &vs {
        for f in &vs {
            let f = Functional::new(f.entries().to_vec());
            out.push(rank_one(x, &f).expect("same dimension"));
        }
    }
    out
}

/// Searches for a pair violating the identity: rank-one probes against `I`
/// and `0`, then pairs of matrix units, then seeded random pairs.
pub fn falsify_map(map: &MapModel, dim: usize, budget: usize, seed: u64) -> Result<FalsifyOutcome> {
    if let Some(d) = map.dim() {
        Error::check_dim(d, dim)?;
    }
    let n = dim;
    let mut tried = 0;
    let identity = Matrix::identity(n);
    let zero = Matrix::zeros(n);
    let units: Vec<Matrix> = (0..n * n)
        .map(|k| Matrix::from_fn(n, |i, j| ((i * n + j == k) as i64).into()))
        .collect();

    let probes = structured_rank_ones(n)
        .into_iter()
        .flat_map(|f| [(f.clone(), identity.clone()), (f, zero.clone())]);
    let unit_pairs = units
        .iter()
        .flat_map(|a| units.iter().map(move |b| (a.clone(), b.clone())));
    let random = (0..).map(|k| sample_pair(seed, STREAM_FALSIFY, k, Some(n)));

    for (t, s) in probes.chain(unit_pairs).chain(random) {
        if tried >= budget {
            break;
        }
        tried += 1;
        if let Some(certificate) =
            PairCounterexample::build(&t, &s, map.apply(&t)?, map.apply(&s)?)?
        {
            return Ok(FalsifyOutcome::Counterexample { certificate, tried });
        }
    }
    Ok(FalsifyOutcome::NoneFound { tried })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `f(x) = 1`.
    Idempotent,
    /// `f(x) = 0`.
    Nilpotent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub tested: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneScalar {
    pub probe: ProbeKind,
    pub operator: Matrix,
    /// `Some(λ)` with `φ(F) = λF`, `None` when `φ(F)` is not a multiple of `F`.
    pub lambda: Option<GaussianRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    ZeroFixed,
    RankOnePreserved,
    RankOneScaled,
    GlobalScaling,
}

/// An input/output pair of the map breaking one step's property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepViolation {
    pub step: Step,
    pub input: Matrix,
    pub image: Matrix,
}

impl StepViolation {
    pub fn verify(&self) -> Result<()> {
        Error::check_dim(self.input.dim(), self.image.dim())?;
        let broken = match self.step {
            Step::ZeroFixed => self.input.is_zero() != self.image.is_zero(),
            Step::RankOnePreserved => (self.input.rank() == 1) != (self.image.rank() == 1),
            Step::RankOneScaled | Step::GlobalScaling => {
                nonzero_ratio(&self.input, &self.image).is_none()
            }
        };
        if broken {
            Ok(())
        } else {
            Err(Error::Certificate(format!("{:?} holds for this input", self.step)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub dim: usize,
    pub step1_zero_fixed: bool,
    pub step1_nonzero_kept: Tally,
    pub step2_rank_one_preserved: Tally,
    pub step3_rank_one_scalars: Vec<RankOneScalar>,
    pub step4_global_scaling: Tally,
    pub violations: Vec<StepViolation>,
    pub counterexamples: Vec<PairCounterexample>,
}

impl StepReport {
    pub fn all_steps_pass(&self) -> bool {
        self.step1_zero_fixed
            && self.step1_nonzero_kept.violations == 0
            && self.step2_rank_one_preserved.violations == 0
            && self.step3_rank_one_scalars.iter().all(|r| r.lambda.is_some())
            && self.step4_global_scaling.violations == 0
    }

    pub fn verify(&self) -> Result<()> {
        for v in &self.violations {
            v.verify()?;
        }
        for c in &self.counterexamples {
            c.verify()?;
        }
        Ok(())
    }
}

/// `Some(λ)` with `image = λ·input`, λ ≠ 0.
fn nonzero_ratio(input: &Matrix, image: &Matrix) -> Option<GaussianRational> {
    let (p, q) = input.entries().zip(image.entries()).find(|(a, _)| !a.is_zero())?;
    let lambda = q / p;
    (!lambda.is_zero() && *image == input.scale(&lambda)).then_some(lambda)
}

/// Random `x ⊗ f` with `f(x) = 1` or `f(x) = 0`.
fn rank_one_probe(rng: &mut Sampler, n: usize, kind: ProbeKind) -> Matrix {
    loop {
        let x = rng.nonzero_vector(n);
        let f = rng.functional(n);
        let fx = f.apply(&x);
        let k = x.entries().iter().position(|c| !c.is_zero()).expect("nonzero");
        let f = match kind {
            ProbeKind::Idempotent => match fx.inv() {
                Some(inv) => f.scale(&inv),
                None => continue,
            },
            ProbeKind::Nilpotent => {
                let correction = Functional::unit(n, k).scale(&(&fx / &x[k]));
                &f - &correction
            }
        };
        if !f.is_zero() {
            return rank_one(&x, &f).expect("same dimension");
        }
    }
}

/// Black-box diagnostics following the reduction to the scaling form.
/// `budget` samples are spent on each step.
pub fn replay_theorem_steps(
    map: &dyn Fn(&Matrix) -> Matrix,
    dim: usize,
    budget: usize,
    seed: u64,
) -> Result<StepReport> {
    let n = dim;
    let mut violations = Vec::new();
    let record = |v: StepViolation, violations: &mut Vec<StepViolation>| {
        if violations.len() < MAX_RECORDED * 4 {
            violations.push(v);
        }
    };
    let rng_for = |step: u64, k: usize| Sampler::for_trial(seed, STREAM_STEPS + (step << 32), k as u64);
    let image_of = |t: &Matrix| -> Result<Matrix> {
        let image = map(t);
        Error::check_dim(t.dim(), image.dim())?;
        Ok(image)
    };

    let zero = Matrix::zeros(n);
    let zero_image = image_of(&zero)?;
    let step1_zero_fixed = zero_image.is_zero();
    if !step1_zero_fixed {
        record(
            StepViolation {
                step: Step::ZeroFixed,
                input: zero.clone(),
                image: zero_image,
            },
            &mut violations,
        );
    }
    let mut step1 = Tally::default();
    for k in 0..budget {
        let t = rng_for(1, k).mixed_operator(n);
        if t.is_zero() {
            continue;
        }
        step1.tested += 1;
        let image = image_of(&t)?;
        if image.is_zero() {
            step1.violations += 1;
            record(StepViolation { step: Step::ZeroFixed, input: t, image }, &mut violations);
        }
    }

    let mut step2 = Tally::default();
    for k in 0..budget {
        let mut rng = rng_for(2, k);
        let t = if k % 2 == 0 {
            let kind = if rng.coin(0.5) { ProbeKind::Idempotent } else { ProbeKind::Nilpotent };
            rank_one_probe(&mut rng, n, kind)
        } else {
            let r = rng.usize_in(2.min(n), n);
            rng.rank_exactly(n, r)
        };
        step2.tested += 1;
        let image = image_of(&t)?;
        if (t.rank() == 1) != (image.rank() == 1) {
            step2.violations += 1;
            record(
                StepViolation { step: Step::RankOnePreserved, input: t, image },
                &mut violations,
            );
        }
    }

    let mut step3 = Vec::with_capacity(budget);
    for k in 0..budget {
        let probe = if k % 2 == 0 { ProbeKind::Idempotent } else { ProbeKind::Nilpotent };
        let f = rank_one_probe(&mut rng_for(3, k), n, probe);
        let image = image_of(&f)?;
        let lambda = nonzero_ratio(&f, &image);
        if lambda.is_none() {
            record(
                StepViolation { step: Step::RankOneScaled, input: f.clone(), image },
                &mut violations,
            );
        }
        step3.push(RankOneScalar { probe, operator: f, lambda });
    }

    let mut step4 = Tally::default();
    for k in 0..budget {
        let t = rng_for(4, k).mixed_operator(n);
        if t.is_zero() {
            continue;
        }
        step4.tested += 1;
        let image = image_of(&t)?;
        if nonzero_ratio(&t, &image).is_none() {
            step4.violations += 1;
            record(StepViolation { step: Step::GlobalScaling, input: t, image }, &mut violations);
        }
    }

    // Turn step failures into pair counterexamples where possible: each
    // violating input against I and 0, then random pairs.
    let mut counterexamples = Vec::new();
    let identity = Matrix::identity(n);
    let violating: Vec<Matrix> = violations.iter().map(|v| v.input.clone()).collect();
    let candidates = violating
        .iter()
        .flat_map(|t| [(t.clone(), identity.clone()), (t.clone(), zero.clone())])
        .chain((0..budget).map(|k| {
            let mut rng = rng_for(5, k);
            (rng.mixed_operator(n), rng.mixed_operator(n))
        }));
    for (t, s) in candidates {
        if counterexamples.len() >= MAX_RECORDED {
            break;
        }
        if let Some(ce) = PairCounterexample::build(&t, &s, image_of(&t)?, image_of(&s)?)? {
            counterexamples.push(ce);
        }
    }

    Ok(StepReport {
        dim: n,
        step1_zero_fixed,
        step1_nonzero_kept: step1,
        step2_rank_one_preserved: step2,
        step3_rank_one_scalars: step3,
        step4_global_scaling: step4,
        violations,
        counterexamples,
    })
}

/// A sampled `x` on which `i(x) = 0` differs between the two Jordan products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryMismatch {
    pub t: Matrix,
    pub s: Matrix,
    pub phi_t: Matrix,
    pub phi_s: Matrix,
    pub x: Vector,
}

impl CorollaryMismatch {
    pub fn verify(&self) -> Result<()> {
        let before = izero(&jordan_product(&self.t, &self.s)?, &self.x)?;
        let after = izero(&jordan_product(&self.phi_t, &self.phi_s)?, &self.x)?;
        if before == after {
            return Err(Error::Certificate("pointwise criterion agrees at x".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub pairs: usize,
    pub triples: usize,
    /// Triples where `i(x) = 0` agrees before and after the map.
    pub triple_agreements: usize,
    /// Pairs where the subspace criterion and the pointwise criterion disagree.
    pub criterion_disagreements: usize,
    /// Pairs whose cores differ.
    pub pair_mismatches: usize,
    pub first_mismatch: Option<CorollaryMismatch>,
}

/// Pointwise version of the identity: `i_{φTφS+φSφT}(x) = 0 ⟺ i_{TS+ST}(x) = 0`.
///
/// Each pair is probed at a random `x`, the zero vector, and the basis
/// vectors of both cores; the last make the pointwise check exactly
/// equivalent to [`check_pair`], and both verdicts are compared.
pub fn corollary_check(map: &MapModel, trials: usize, seed: u64) -> Result<CorollaryReport> {
    let mut report = CorollaryReport {
        pairs: trials,
        triples: 0,
        triple_agreements: 0,
        criterion_disagreements: 0,
        pair_mismatches: 0,
        first_mismatch: None,
    };
    for k in 0..trials {
        let mut rng = Sampler::for_trial(seed, STREAM_COROLLARY, k as u64);
        let n = map.dim().unwrap_or_else(|| sample_dim(&mut rng));
        let (t, s) = (rng.mixed_operator(n), rng.mixed_operator(n));
        let (phi_t, phi_s) = (map.apply(&t)?, map.apply(&s)?);
        let before = jordan_product(&t, &s)?;
        let after = jordan_product(&phi_t, &phi_s)?;
        let (core_before, core_after) = (analytic_core(&before), analytic_core(&after));
        let pair_ok = core_before == core_after;
        if !pair_ok {
            report.pair_mismatches += 1;
        }

        let mut xs = vec![rng.vector(n), Vector::zeros(n)];
        xs.extend(core_before.basis().iter().cloned());
        xs.extend(core_after.basis().iter().cloned());
        let mut all_agree = true;
        for x in xs {
            report.triples += 1;
            if izero(&before, &x)? == izero(&after, &x)? {
                report.triple_agreements += 1;
            } else {
                all_agree = false;
                report.first_mismatch.get_or_insert_with(|| CorollaryMismatch {
                    t: t.clone(),
                    s: s.clone(),
                    phi_t: phi_t.clone(),
                    phi_s: phi_s.clone(),
                    x,
                });
            }
        }
        if all_agree != pair_ok {
            report.criterion_disagreements += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hashed() -> MapModel {
        MapModel::Scaling {
            gamma: Gamma::Hashed { seed: 4 },
        }
    }

    #[test]
    fn hashed_gamma_is_nonzero_and_varies() {
        let g = Gamma::Hashed { seed: 1 };
        let mut rng = Sampler::new(0);
        let values: Vec<_> = (0..20).map(|_| g.of(&rng.matrix(3))).collect();
        assert!(values.iter().all(|v| !v.is_zero()));
        assert!(values.iter().any(|v| *v != values[0]));
        let m = Matrix::identity(3);
        assert_eq!(g.of(&m), g.of(&m));
    }

    #[test]
    fn scaling_and_identity_pass_forward() {
        for map in [hashed(), MapModel::Identity] {
            let r = verify_forward(&map, 60, 3).unwrap();
            assert_eq!(r.failures, 0);
        }
        assert!(verify_forward(&MapModel::Transpose, 1, 0).is_err());
    }

    #[test]
    fn scaling_never_falsified() {
        assert!(matches!(
            falsify_map(&hashed(), 3, 300, 0).unwrap(),
            FalsifyOutcome::NoneFound { tried: 300 }
        ));
    }

    #[test]
    fn transpose_falsified() {
        let out = falsify_map(&MapModel::Transpose, 4, 2000, 7).unwrap();
        let FalsifyOutcome::Counterexample { certificate, .. } = out else {
            panic!("no counterexample")
        };
        certificate.verify_against(&MapModel::Transpose).unwrap();
    }

    #[test]
    fn similarity_and_shift_falsified() {
        for map in [
            MapModel::random_similarity(3, 2),
            MapModel::random_nilpotent_shift(3, 5),
        ] {
            assert!(map.validate().is_empty());
            let out = falsify_map(&map, 3, 2000, 1).unwrap();
            let FalsifyOutcome::Counterexample { certificate, .. } = out else {
                panic!("no counterexample for {map:?}")
            };
            certificate.verify_against(&map).unwrap();
        }
    }

    #[test]
    fn tampered_counterexample_rejected() {
        let FalsifyOutcome::Counterexample { mut certificate, .. } =
            falsify_map(&MapModel::Transpose, 3, 2000, 0).unwrap()
        else {
            panic!()
        };
        certificate.phi_t = certificate.t.clone();
        certificate.phi_s = certificate.s.clone();
        assert!(certificate.verify().is_err());
    }

    #[test]
    fn steps_for_global_scaling() {
        let three: GaussianRational = 3.into();
        let r = replay_theorem_steps(&|t: &Matrix| t.scale(&three), 4, 20, 0).unwrap();
        assert!(r.all_steps_pass());
        assert!(r.step3_rank_one_scalars.iter().all(|s| s.lambda == Some(three.clone())));
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn steps_for_varying_scaling() {
        let map = hashed();
        let r = replay_theorem_steps(&|t: &Matrix| map.apply(t).unwrap(), 4, 20, 0).unwrap();
        assert!(r.all_steps_pass());
        let lambdas: Vec<_> = r.step3_rank_one_scalars.iter().map(|s| s.lambda.clone()).collect();
        assert!(lambdas.iter().any(|l| *l != lambdas[0]));
    }

    #[test]
    fn steps_for_transpose_record_violations() {
        let r = replay_theorem_steps(&|t: &Matrix| t.transpose(), 4, 20, 0).unwrap();
        assert!(!r.all_steps_pass());
        assert!(r.step1_zero_fixed);
        assert_eq!(r.step2_rank_one_preserved.violations, 0);
        assert!(!r.violations.is_empty());
        assert!(!r.counterexamples.is_empty());
        r.verify().unwrap();
    }

    #[test]
    fn corollary_agrees_with_pair_check() {
        let r = corollary_check(&hashed(), 40, 0).unwrap();
        assert_eq!(r.triple_agreements, r.triples);
        assert_eq!(r.criterion_disagreements, 0);

        let r = corollary_check(&MapModel::Transpose, 40, 0).unwrap();
        assert_eq!(r.criterion_disagreements, 0);
        assert!(r.pair_mismatches > 0);
        r.first_mismatch.unwrap().verify().unwrap();
    }
}
