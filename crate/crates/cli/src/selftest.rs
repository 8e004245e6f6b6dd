//! The acceptance suite: seven seeded criteria checked exactly (or at the
//! pinned float tolerances below). `fuzz` runs the same checks at smaller sizes.

use std::collections::BTreeMap;

use locspec::certificate::Certificate;
use locspec::lemma::{
    affine_combo_recover, proportionality_test, rank_one_by_core_criterion, AffineComboResult,
    ProportionalityResult, RankOneVerdict,
};
use locspec::linalg::image_basis;
use locspec::local::{
    eigen_structure, inner_local_spectral_radius, izero, local_spectral_radius_direct,
    local_spectral_radius_power, Tolerances,
};
use locspec::preserver::{
    corollary_check, falsify_map, verify_forward, FalsifyOutcome, Gamma, MapModel,
};
use locspec::sample::Sampler;
use locspec::spectral::{
    analytic_core, core_chain_certificate, core_membership, eig_shift_kernel, jordan_product,
    rank_one,
};
use locspec::{GaussianRational, Matrix, Vector};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Slack on the floating norm bound of chain certificates.
pub const CHAIN_SLACK: f64 = locspec::spectral::CHAIN_NORM_SLACK;
/// `|r_direct − r_power| ≤ RADIUS_TOLERANCE`.
pub const RADIUS_TOLERANCE: f64 = 1e-3;
/// Minimum pairwise eigenvalue gap in the cross-backend ensemble.
pub const SPECTRAL_GAP: f64 = 1e-3;
/// Minimum gap for the radius comparison.
pub const RADIUS_GAP: f64 = 1e-2;
/// Every eigencomponent of `x` must exceed this norm for the radius comparison.
pub const COMPONENT_FLOOR: f64 = 1e-3;
/// Second-largest modulus in `σ_T(x)` at most this fraction of the largest.
pub const DOMINANCE_RATIO: f64 = 0.9;
pub const POWER_ITERATIONS: usize = 200;
pub const CHAIN_LENGTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub core_matrices: usize,
    pub chain_pairs: usize,
    pub rank_one_operators: usize,
    pub rank_one_probes: usize,
    pub higher_rank_operators: usize,
    pub proportional_pairs: usize,
    pub probes_per_pair: usize,
    pub non_proportional_pairs: usize,
    pub proportionality_budget: usize,
    pub affine_planted: usize,
    pub affine_random: usize,
    pub scaling_pairs: usize,
    pub corollary_pairs: usize,
    pub falsify_budget: usize,
    pub spectra: usize,
}

impl SuiteSizes {
    pub fn full() -> Self {
        Self {
            core_matrices: 500,
            chain_pairs: 100,
            rank_one_operators: 50,
            rank_one_probes: 100,
            higher_rank_operators: 50,
            proportional_pairs: 50,
            probes_per_pair: 100,
            non_proportional_pairs: 50,
            proportionality_budget: 5000,
            affine_planted: 100,
            affine_random: 100,
            scaling_pairs: 1000,
            corollary_pairs: 500,
            falsify_budget: 2000,
            spectra: 500,
        }
    }

    /// Every count set to `trials`; budgets stay at full size.
    pub fn uniform(trials: usize) -> Self {
        let full = Self::full();
        Self {
            core_matrices: trials,
            chain_pairs: trials,
            rank_one_operators: trials,
            rank_one_probes: trials,
            higher_rank_operators: trials,
            proportional_pairs: trials,
            probes_per_pair: trials,
            non_proportional_pairs: trials,
            affine_planted: trials,
            affine_random: trials,
            scaling_pairs: trials,
            corollary_pairs: trials,
            spectra: trials,
            ..full
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub details: BTreeMap<String, Value>,
    /// A few representative certificates; all replay.
    pub certificates: Vec<Certificate>,
}

impl CriterionOutcome {
    fn new(id: u8, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            details: BTreeMap::new(),
            certificates: Vec::new(),
        }
    }

    fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("details serialize"),
        );
    }

    /// Records `value` and fails the criterion unless `ok`.
    fn require(&mut self, key: &str, value: impl Serialize, ok: bool) {
        self.detail(key, value);
        self.passed &= ok;
    }

    /// One-line summary used by the acceptance runner.
    pub fn summary(&self) -> String {
        let details: Vec<String> = self.details.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "[{}] criterion {} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            details.join(" ")
        )
    }
}

pub type Criterion = fn(u64, &SuiteSizes) -> CriterionOutcome;

pub const CRITERIA: [(u8, Criterion); 7] = [
    (1, core_properties),
    (2, chain_certificates),
    (3, rank_one_criterion),
    (4, proportionality),
    (5, affine_recovery),
    (6, preserver_harness),
    (7, cross_backend),
];

pub fn run_all(seed: u64, sizes: &SuiteSizes) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|(_, c)| c(seed, sizes)).collect()
}

fn rng(seed: u64, criterion: u64, k: usize) -> Sampler {
    Sampler::for_trial(seed, criterion, k as u64)
}

fn is_proportional(a: &Matrix, b: &Matrix) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    let (p, q) = a
        .entries()
        .zip(b.entries())
        .find(|(x, _)| !x.is_zero())
        .expect("a is nonzero");
    *b == a.scale(&(q / p))
}

/// Jordan blocks of size 1 or 2 filling dimension `n`, the first with eigenvalue `lambda`.
fn planted_blocks(rng: &mut Sampler, n: usize, lambda: GaussianRational) -> Vec<(GaussianRational, usize)> {
    let first = rng.usize_in(1, n.min(2));
    let mut blocks = vec![(lambda, first)];
    let mut left = n - first;
    while left > 0 {
        let size = rng.usize_in(1, left.min(2));
        let value = if rng.coin(0.4) {
            GaussianRational::zero()
        } else {
            rng.scalar()
        };
        blocks.push((value, size));
        left -= size;
    }
    blocks
}

pub fn core_properties(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(1, "analytic core properties");
    let mut violations: BTreeMap<&str, usize> = [
        "core_in_range",
        "scaling_invariance",
        "image_of_core",
        "nilpotent_core",
        "eigenspace_in_core",
    ]
    .into_iter()
    .map(|k| (k, 0))
    .collect();
    let mut bump = |key: &'static str, ok: bool| {
        if !ok {
            *violations.get_mut(key).expect("known key") += 1;
        }
    };
    for k in 0..sizes.core_matrices {
        let mut r = rng(seed, 1, k);
        let n = r.usize_in(2, 7);
        let t = r.mixed_operator(n);
        let core = analytic_core(&t);
        bump("core_in_range", core.is_subspace_of(&image_basis(&t)).expect("same ambient"));
        let c = r.nonzero_scalar();
        bump("scaling_invariance", analytic_core(&t.scale(&c)) == core);
        bump("image_of_core", core.image_under(&t).expect("same ambient") == core);
        let conjugate = r.coin(0.5);
        bump("nilpotent_core", analytic_core(&r.nilpotent(n, conjugate)).is_zero());
        let lambda = r.nonzero_scalar();
        let blocks = planted_blocks(&mut r, n, lambda.clone());
        let (planted, _) = r.planted(&blocks);
        let eigenspace = eig_shift_kernel(&planted, &lambda);
        bump(
            "eigenspace_in_core",
            !eigenspace.is_zero()
                && eigenspace
                    .is_subspace_of(&analytic_core(&planted))
                    .expect("same ambient"),
        );
    }
    out.detail("matrices", sizes.core_matrices);
    let total: usize = violations.values().sum();
    out.detail("violations", &violations);
    out.require("total_violations", total, total == 0);
    out
}

pub fn chain_certificates(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(2, "core chain certificates");
    let mut failures = 0;
    for k in 0..sizes.chain_pairs {
        let mut r = rng(seed, 2, k);
        let n = r.usize_in(2, 7);
        let mut t = r.mixed_operator(n);
        if analytic_core(&t).is_zero() {
            let lambda = r.nonzero_scalar();
            let blocks = planted_blocks(&mut r, n, lambda);
            t = r.planted(&blocks).0;
        }
        let core = analytic_core(&t);
        let mut x = core
            .basis()
            .iter()
            .fold(Vector::zeros(n), |acc, b| &acc + &b.scale(&r.scalar()));
        if x.is_zero() {
            x = core.basis()[0].clone();
        }
        match core_chain_certificate(&t, &x, CHAIN_LENGTH) {
            Ok(cert) if cert.verify().is_ok() && cert.chain.len() == CHAIN_LENGTH + 1 => {
                if out.certificates.is_empty() {
                    out.certificates.push(Certificate::CoreChain(cert));
                }
            }
            _ => failures += 1,
        }
    }
    out.detail("pairs", sizes.chain_pairs);
    out.detail("chain_length", CHAIN_LENGTH);
    out.detail("norm_slack", CHAIN_SLACK);
    out.require("failures", failures, failures == 0);
    out
}

/// Rank ≥ 2 operators on dimensions 6–8 drawn from several structured families.
fn higher_rank_operator(r: &mut Sampler, k: usize) -> Matrix {
    let n = r.usize_in(6, 8);
    let rank = r.usize_in(2, n);
    match k % 5 {
        0 => r.rank_exactly(n, rank),
        1 => Matrix::from_fn(n, |i, j| ((i == j && i < rank) as i64).into()),
        2 => {
            let rank = rank.min(n / 2);
            Matrix::from_fn(n, |i, j| ((j < rank && i == j + rank) as i64).into())
        }
        3 => {
            let shift = Matrix::from_fn(n, |i, j| ((j + 1 == i && j < rank) as i64).into());
            let (p, p_inv) = r.invertible(n);
            &(&p * &shift) * &p_inv
        }
        _ => r.rank_exactly(n, 2),
    }
}

pub fn rank_one_criterion(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(3, "rank-one core criterion");
    let mut forward_violations = 0;
    let mut max_core_dim = 0;
    for k in 0..sizes.rank_one_operators {
        let mut r = rng(seed, 3, k);
        let n = r.usize_in(3, 6);
        let a = r.rank_exactly(n, 1);
        match rank_one_by_core_criterion(&a, sizes.rank_one_probes, r.u64()) {
            Ok(v @ RankOneVerdict::RankOne { max_core_dim: d, .. }) if v.verify(&a).is_ok() => {
                max_core_dim = max_core_dim.max(d);
            }
            _ => forward_violations += 1,
        }
    }
    out.detail("rank_one_operators", sizes.rank_one_operators);
    out.detail("probes_each", sizes.rank_one_probes);
    out.detail("max_core_dim", max_core_dim);
    out.require("forward_violations", forward_violations, forward_violations == 0);

    let mut successes = 0;
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    for k in 0..sizes.higher_rank_operators {
        let mut r = rng(seed, 0x33, k);
        let a = higher_rank_operator(&mut r, k);
        let verdict = rank_one_by_core_criterion(&a, 0, r.u64());
        if let Ok(v @ RankOneVerdict::HigherRank { case, .. }) = &verdict {
            if v.verify(&a).is_ok() {
                successes += 1;
                *cases.entry(case.label()).or_default() += 1;
                if out.certificates.len() < 2 {
                    out.certificates.push(Certificate::RankOne {
                        a: a.clone(),
                        verdict: v.clone(),
                    });
                }
            }
        }
    }
    let rate = successes as f64 / sizes.higher_rank_operators.max(1) as f64;
    out.detail("higher_rank_operators", sizes.higher_rank_operators);
    out.detail("case_distribution", &cases);
    out.require("converse_success_rate", rate, successes == sizes.higher_rank_operators);
    out
}

/// Non-proportional pairs on dimensions 3–6 from several structured families.
fn non_proportional_pair(r: &mut Sampler, k: usize) -> (Matrix, Matrix) {
    let n = r.usize_in(3, 6);
    loop {
        let (a, b) = match k % 5 {
            0 => (r.matrix(n), r.matrix(n)),
            1 => {
                let a = r.matrix(n);
                let b = &a + &Matrix::scalar(n, &r.nonzero_scalar());
                (a, b)
            }
            2 => {
                // A² = I: eigenvalues ±1 under a random similarity.
                let signs: Vec<GaussianRational> =
                    (0..n).map(|i| if i % 2 == 0 { 1.into() } else { (-1).into() }).collect();
                let (p, p_inv) = r.invertible(n);
                let a = &(&p * &Matrix::diagonal(&signs)) * &p_inv;
                let b = &a.scale(&r.nonzero_scalar()) + &Matrix::scalar(n, &r.nonzero_scalar());
                (a, b)
            }
            3 => (r.mixed_operator(n), Matrix::scalar(n, &r.nonzero_scalar())),
            _ => (r.mixed_operator(n), r.mixed_operator(n)),
        };
        if !is_proportional(&a, &b) {
            return (a, b);
        }
    }
}

pub fn proportionality(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(4, "proportionality through rank-one probes");
    let mut forward_violations = 0;
    for k in 0..sizes.proportional_pairs {
        let mut r = rng(seed, 4, k);
        let n = r.usize_in(3, 6);
        let a = loop {
            let a = r.mixed_operator(n);
            if !a.is_zero() {
                break a;
            }
        };
        let lambda = r.nonzero_scalar();
        let b = a.scale(&lambda);
        match proportionality_test(&a, &b, sizes.proportionality_budget, r.u64()) {
            Ok(res @ ProportionalityResult::Proportional { .. }) if res.verify(&a, &b).is_ok() => {}
            _ => forward_violations += 1,
        }
        for _ in 0..sizes.probes_per_pair {
            let f = rank_one(&r.nonzero_vector(n), &r.functional(n)).expect("same dimension");
            let lhs = analytic_core(&jordan_product(&a, &f).expect("same dimension"));
            let rhs = analytic_core(&jordan_product(&b, &f).expect("same dimension"));
            if lhs != rhs {
                forward_violations += 1;
            }
        }
    }
    out.detail("proportional_pairs", sizes.proportional_pairs);
    out.detail("probes_each", sizes.probes_per_pair);
    out.require("forward_violations", forward_violations, forward_violations == 0);

    let mut verified = 0;
    let mut inconclusive = 0;
    let mut wrong = 0;
    let mut cases: BTreeMap<String, usize> = BTreeMap::new();
    for k in 0..sizes.non_proportional_pairs {
        let mut r = rng(seed, 0x44, k);
        let (a, b) = non_proportional_pair(&mut r, k);
        match proportionality_test(&a, &b, sizes.proportionality_budget, r.u64()) {
            Ok(res @ ProportionalityResult::Witness { case, .. }) if res.verify(&a, &b).is_ok() => {
                verified += 1;
                let label = serde_json::to_value(case).expect("case serializes");
                *cases.entry(label.as_str().unwrap_or("?").to_string()).or_default() += 1;
                if out.certificates.len() < 2 {
                    out.certificates.push(Certificate::Proportionality {
                        a: a.clone(),
                        b: b.clone(),
                        result: res.clone(),
                    });
                }
            }
            Ok(ProportionalityResult::Inconclusive { .. }) => inconclusive += 1,
            _ => wrong += 1,
        }
    }
    out.detail("non_proportional_pairs", sizes.non_proportional_pairs);
    out.detail("budget", sizes.proportionality_budget);
    out.detail("case_distribution", &cases);
    out.require("witnesses_verified", verified, verified == sizes.non_proportional_pairs);
    out.require("inconclusive", inconclusive, inconclusive == 0);
    out.require("wrong_verdicts", wrong, wrong == 0);
    out
}

pub fn affine_recovery(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(5, "affine combination recovery");
    let mut recovered = 0;
    for k in 0..sizes.affine_planted {
        let mut r = rng(seed, 5, k);
        let n = r.usize_in(3, 6);
        let s = r.matrix(n);
        let (lambda, mu) = (r.scalar(), r.scalar());
        let t = &Matrix::scalar(n, &lambda) + &s.scale(&mu);
        let expected = AffineComboResult::Coefficients { lambda, mu };
        if affine_combo_recover(&t, &s).ok().as_ref() == Some(&expected) {
            recovered += 1;
        }
    }
    out.detail("planted", sizes.affine_planted);
    out.require("recovered_exactly", recovered, recovered == sizes.affine_planted);

    let mut rank_three = 0;
    for k in 0..sizes.affine_random {
        let mut r = rng(seed, 0x55, k);
        let n = r.usize_in(3, 6);
        let (t, s) = (r.matrix(n), r.matrix(n));
        if let Ok(res @ AffineComboResult::Witness { rank: 3, .. }) = affine_combo_recover(&t, &s) {
            if res.verify(&t, &s).is_ok() {
                rank_three += 1;
                if out.certificates.is_empty() {
                    out.certificates.push(Certificate::AffineCombo { t, s, result: res });
                }
            }
        }
    }
    out.detail("random_pairs", sizes.affine_random);
    out.require("rank_three_witnesses", rank_three, rank_three == sizes.affine_random);
    out
}

pub fn preserver_harness(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(6, "preserver harness");
    let scaling = MapModel::Scaling {
        gamma: Gamma::Hashed { seed },
    };
    let forward = verify_forward(&scaling, sizes.scaling_pairs, seed).expect("scaling map");
    out.detail("scaling_pairs", forward.trials);
    out.require("scaling_failures", forward.failures, forward.failures == 0);

    let corollary = corollary_check(&scaling, sizes.corollary_pairs, seed).expect("no dimension constraint");
    out.detail("corollary_pairs", corollary.pairs);
    out.detail("corollary_triples", corollary.triples);
    out.require(
        "corollary_disagreements",
        corollary.triples - corollary.triple_agreements + corollary.criterion_disagreements,
        corollary.triple_agreements == corollary.triples && corollary.criterion_disagreements == 0,
    );

    let mut budgets: BTreeMap<String, Value> = BTreeMap::new();
    let mut missed = 0;
    for n in 3..=5 {
        let maps = [
            ("transpose", MapModel::Transpose),
            ("similarity", MapModel::random_similarity(n, seed ^ n as u64)),
        ];
        for (name, map) in maps {
            let outcome = falsify_map(&map, n, sizes.falsify_budget, seed).expect("dimension matches");
            let key = format!("{name}.dim{n}");
            match outcome {
                FalsifyOutcome::Counterexample { certificate, tried }
                    if certificate.verify_against(&map).is_ok() =>
                {
                    budgets.insert(key, json!(tried));
                    if out.certificates.len() < 2 {
                        out.certificates.push(Certificate::MapCounterexample {
                            map: map.clone(),
                            pair: certificate,
                        });
                    }
                }
                other => {
                    missed += 1;
                    let tried = match other {
                        FalsifyOutcome::Counterexample { tried, .. } | FalsifyOutcome::NoneFound { tried } => tried,
                    };
                    budgets.insert(key, json!(format!("none found in {tried}")));
                }
            }
        }
    }
    out.detail("falsify_budget", sizes.falsify_budget);
    out.detail("budget_used", &budgets);
    out.require("unfalsified_maps", missed, missed == 0);
    out
}

/// Diagonalizable `P D P⁻¹` with distinct nonzero eigenvalues plus up to two
/// zero eigenvalues. Returns the matrix and its eigenvalues.
fn planted_spectrum(r: &mut Sampler) -> (Matrix, Vec<GaussianRational>) {
    let n = r.usize_in(2, 7);
    let zeros = r.usize_in(0, 2.min(n - 1));
    let mut values: Vec<GaussianRational> = vec![GaussianRational::zero(); zeros];
    while values.len() < n {
        let v = r.nonzero_scalar();
        let fresh = values.iter().filter(|w| !w.is_zero()).all(|w| {
            let gap = (&v - w).abs_f64();
            gap > SPECTRAL_GAP
        });
        if fresh {
            values.push(v);
        }
    }
    let blocks: Vec<_> = values.iter().map(|v| (v.clone(), 1)).collect();
    (r.planted(&blocks).0, values)
}

pub fn cross_backend(seed: u64, sizes: &SuiteSizes) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(7, "exact and numeric backends agree");
    let tol = Tolerances::default();
    let mut membership = 0;
    let mut multiplicity = 0;
    let mut izero_mismatch = 0;
    let mut ambiguous = 0;
    let mut radius_checked = 0;
    let mut radius_failures = 0;
    let mut max_radius_error: f64 = 0.0;
    for k in 0..sizes.spectra {
        let mut r = rng(seed, 7, k);
        let (t, values) = planted_spectrum(&mut r);
        let n = t.dim();
        let core = analytic_core(&t);
        let x = if r.coin(0.5) && !core.is_zero() {
            core.basis()
                .iter()
                .fold(Vector::zeros(n), |acc, b| &acc + &b.scale(&r.nonzero_scalar()))
        } else {
            r.nonzero_vector(n)
        };
        let es = eigen_structure(&t, tol);
        ambiguous += es.ambiguous as usize;
        let spectrum = es.local_spectrum(&x);
        let exact_in_core = core_membership(&t, &x).expect("same dimension");
        if exact_in_core == spectrum.contains_zero(tol, es.scale) {
            membership += 1;
        }
        if core.dim() != es.nonzero_multiplicity() {
            multiplicity += 1;
        }
        let inner = inner_local_spectral_radius(&t, &x, tol).expect("same dimension");
        if izero(&t, &x).expect("same dimension") != (inner / es.scale < tol.eig) {
            izero_mismatch += 1;
        }

        // Radius comparison: gaps above RADIUS_GAP hold by construction
        // (distinct Gaussian rationals with denominators ≤ 5 differ by ≥ 1/25).
        let gap_ok = values.iter().enumerate().all(|(i, v)| {
            values[i + 1..].iter().all(|w| v == w || (v - w).abs_f64() > RADIUS_GAP)
        });
        let components = es.components(&x.to_complex());
        let components_ok = components.iter().all(|c| c.norm() > COMPONENT_FLOOR);
        let mut moduli: Vec<f64> = spectrum.points.iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let dominant = moduli.len() < 2 || moduli[1] <= DOMINANCE_RATIO * moduli[0];
        if gap_ok && components_ok && dominant {
            radius_checked += 1;
            let direct = local_spectral_radius_direct(&t, &x, tol).expect("same dimension");
            let power = local_spectral_radius_power(&t, &x, POWER_ITERATIONS).expect("iterations > 0");
            let err = (direct - power).abs();
            max_radius_error = max_radius_error.max(err);
            if err > RADIUS_TOLERANCE {
                radius_failures += 1;
            }
        }
    }
    out.detail("matrices", sizes.spectra);
    out.detail("clustering_warnings", ambiguous);
    out.require("membership_disagreements", membership, membership == 0);
    out.require("multiplicity_disagreements", multiplicity, multiplicity == 0);
    out.require("izero_disagreements", izero_mismatch, izero_mismatch == 0);
    out.detail("radius_checked", radius_checked);
    out.detail("radius_tolerance", RADIUS_TOLERANCE);
    out.detail("max_radius_error", format!("{max_radius_error:.3e}"));
    out.require("radius_failures", radius_failures, radius_failures == 0 && radius_checked > 0);
    out
}
