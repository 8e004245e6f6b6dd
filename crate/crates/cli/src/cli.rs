//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locspec::certificate::Certificate;
use locspec::lemma::proportional::DEFAULT_BUDGET as PROPORTIONALITY_BUDGET;
use locspec::lemma::rank_one::{construct_core_inflating_operator_with, DEFAULT_SEARCH_BUDGET};
use locspec::lemma::{
    affine_combo_recover, proportionality_test, rank_one_by_core_criterion, AffineComboResult,
    ProportionalityResult, RankOneVerdict,
};
use locspec::local::{
    eigen_structure, inner_local_spectral_radius, izero, local_spectral_radius_direct,
    local_spectral_radius_power, Tolerances,
};
use locspec::preserver::{
    corollary_check, falsify_map, replay_theorem_steps, verify_forward, FalsifyOutcome, Gamma,
    MapModel,
};
use locspec::spectral::{analytic_core, core_chain_certificate, jordan_product, range_chain};
use locspec::{GaussianRational, Matrix};
use serde_json::json;

use crate::error::{CliError, EXIT_COUNTEREXAMPLE, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_VERDICT};
use crate::io::{parse_vector, read_matrix, render_matrix};
use crate::report::RunReport;
use crate::selftest::{self, SuiteSizes};

#[derive(Debug, Parser)]
#[command(name = "locspec", version, about = "Analytic cores, local spectra and preserver checks for exact matrices")]
pub struct Cli {
    /// Replay every certificate in a report (or a single certificate) and exit.
    #[arg(long, value_name = "PATH")]
    pub replay: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Identity,
    Scaling,
    Transpose,
    Similarity,
    NilpotentShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreserverMode {
    Verify,
    Falsify,
    ReplaySteps,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long, env = "LOCSPEC_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic core of T, with a chain certificate when --vec lies in it.
    Core {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        vec: Option<String>,
        #[arg(long, default_value_t = 6)]
        chain: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Jordan product TS + ST and its analytic core.
    Jordan {
        #[arg(long = "in", value_name = "PATH", num_args = 1, required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Local spectrum, local spectral radius and inner radius of T at x.
    Locspec {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        vec: String,
        #[arg(long, value_enum, default_value_t = Backend::Both)]
        backend: Backend,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Rank-one test through dim K(TA + AT) ≤ 2.
    Rank1 {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Operator T with dim K(TA + AT) ≥ 3 for A of rank at least 2.
    Witness {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Recover T = λI + μS or exhibit x with Tx ∉ span{x, Sx}.
    Affine {
        #[arg(long = "in", value_name = "PATH", num_args = 1, required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Decide B = λA or find a rank-one F separating the cores.
    Propcheck {
        #[arg(long = "in", value_name = "PATH", num_args = 1, required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = PROPORTIONALITY_BUDGET)]
        budget: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Check, falsify or diagnose a map against the core identity.
    Preserver {
        #[arg(long, value_enum)]
        map: MapName,
        #[arg(long, value_enum, default_value_t = PreserverMode::Falsify)]
        mode: PreserverMode,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Pointwise form of the core identity through i(x) = 0.
    Corollary {
        #[arg(long, value_enum)]
        map: MapName,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Every invariant of the self-test at reduced size.
    Fuzz {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// The full acceptance suite.
    Selftest {
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// Exit code and the text to print on stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_VERDICT };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let format = cli.format;
    let (name, seed) = describe(&cli);
    let mut report = RunReport::new(name, seed);
    let code = match execute(cli, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.errors.push(e.to_string());
            e.exit_code()
        }
    };
    let stdout = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.render_text(),
    };
    let stderr = report.errors.iter().map(|e| format!("error: {e}\n")).collect();
    Outcome { code, stdout, stderr }
}

fn describe(cli: &Cli) -> (&'static str, u64) {
    let Some(command) = &cli.command else {
        return ("replay", 0);
    };
    match command {
        Command::Core { seed, .. } => ("core", seed.seed),
        Command::Jordan { seed, .. } => ("jordan", seed.seed),
        Command::Locspec { seed, .. } => ("locspec", seed.seed),
        Command::Rank1 { seed, .. } => ("rank1", seed.seed),
        Command::Witness { seed, .. } => ("witness", seed.seed),
        Command::Affine { seed, .. } => ("affine", seed.seed),
        Command::Propcheck { seed, .. } => ("propcheck", seed.seed),
        Command::Preserver { seed, .. } => ("preserver", seed.seed),
        Command::Corollary { seed, .. } => ("corollary", seed.seed),
        Command::Fuzz { seed, .. } => ("fuzz", seed.seed),
        Command::Selftest { seed } => ("selftest", seed.seed),
    }
}

fn two_inputs(inputs: &[PathBuf]) -> Result<(Matrix, Matrix), CliError> {
    match inputs {
        [a, b] => {
            let (a_m, b_m) = (read_matrix(a)?, read_matrix(b)?);
            if a_m.dim() != b_m.dim() {
                return Err(CliError::Usage(format!(
                    "operators have dimensions {} and {}",
                    a_m.dim(),
                    b_m.dim()
                )));
            }
            Ok((a_m, b_m))
        }
        _ => Err(CliError::Usage(format!(
            "expected exactly two --in operators, got {}",
            inputs.len()
        ))),
    }
}

fn build_map(name: MapName, dim: usize, seed: u64) -> MapModel {
    match name {
        MapName::Identity => MapModel::Identity,
        MapName::Scaling => MapModel::Scaling {
            gamma: Gamma::Hashed { seed },
        },
        MapName::Transpose => MapModel::Transpose,
        MapName::Similarity => MapModel::random_similarity(dim, seed),
        MapName::NilpotentShift => MapModel::random_nilpotent_shift(dim, seed),
    }
}

fn execute(cli: Cli, report: &mut RunReport) -> Result<i32, CliError> {
    if cli.replay.is_some() && cli.command.is_some() {
        return Err(CliError::Usage("--replay cannot be combined with a subcommand".into()));
    }
    let Some(command) = cli.command else {
        let path = cli
            .replay
            .ok_or_else(|| CliError::Usage("a subcommand or --replay is required".into()))?;
        return replay(&path, report);
    };
    match command {
        Command::Core { input, vec, chain, .. } => {
            let t = read_matrix(&input)?;
            report.config("in", &input).config("chain", chain);
            let rc = report.timed("core", || range_chain(&t));
            report.verdict(json!({
                "core_dim": rc.core.dim(),
                "stabilization_index": rc.index,
                "ranks": rc.ranks,
                "core_basis": rc.core.basis(),
            }));
            if let Some(text) = vec {
                let x = parse_vector(&text)?;
                locspec_check_dim(t.dim(), x.dim())?;
                let member = rc.core.contains(&x)?;
                report.config("vec", &text);
                report.verdict(json!({ "in_core": member }));
                if member && !x.is_zero() {
                    let cert = core_chain_certificate(&t, &x, chain)?;
                    report.certificates.push(Certificate::CoreChain(cert));
                }
            }
            Ok(EXIT_VERDICT)
        }
        Command::Jordan { inputs, .. } => {
            let (t, s) = two_inputs(&inputs)?;
            report.config("in", &inputs);
            let j = jordan_product(&t, &s)?;
            let core = analytic_core(&j);
            report.verdict(json!({
                "jordan_product": serde_json::from_str::<serde_json::Value>(&render_matrix(&j)).expect("valid json"),
                "core_dim": core.dim(),
                "core_basis": core.basis(),
            }));
            Ok(EXIT_VERDICT)
        }
        Command::Locspec { input, vec, backend, iterations, .. } => {
            let t = read_matrix(&input)?;
            let x = parse_vector(&vec)?;
            locspec_check_dim(t.dim(), x.dim())?;
            report
                .config("in", &input)
                .config("vec", &vec)
                .config("backend", format!("{backend:?}").to_lowercase())
                .config("iterations", iterations);
            if backend != Backend::Float {
                let member = analytic_core(&t).contains(&x)?;
                report.verdict(json!({
                    "backend": "exact",
                    "in_core": member,
                    "izero": izero(&t, &x)?,
                }));
            }
            if backend != Backend::Exact {
                let tol = Tolerances::default();
                let es = eigen_structure(&t, tol);
                let spectrum = es.local_spectrum(&x);
                if spectrum.ambiguous {
                    report.warnings.push("eigenvalue clustering is ambiguous".into());
                }
                let inner = inner_local_spectral_radius(&t, &x, tol)?;
                report.verdict(json!({
                    "backend": "float",
                    "local_spectrum": spectrum.points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "radius_direct": local_spectral_radius_direct(&t, &x, tol)?,
                    "radius_power": local_spectral_radius_power(&t, &x, iterations)?,
                    "inner_radius": if inner.is_finite() { json!(inner) } else { json!("inf") },
                    "zero_in_local_spectrum": spectrum.contains_zero(tol, es.scale),
                }));
            }
            Ok(EXIT_VERDICT)
        }
        Command::Rank1 { input, trials, seed } => {
            let a = read_matrix(&input)?;
            report.config("in", &input).config("trials", trials);
            let verdict = report.timed("rank1", || rank_one_by_core_criterion(&a, trials, seed.seed))?;
            verdict.verify(&a)?;
            match &verdict {
                RankOneVerdict::RankOne { max_core_dim, .. } => {
                    report.verdict(json!({ "verdict": "rank_one", "max_core_dim": max_core_dim }));
                }
                RankOneVerdict::HigherRank { core_dim, case, .. } => {
                    report.verdict(json!({
                        "verdict": "higher_rank",
                        "rank": a.rank(),
                        "core_dim": core_dim,
                        "case": case.label(),
                    }));
                    report.certificates.push(Certificate::RankOne { a, verdict });
                }
            }
            Ok(EXIT_VERDICT)
        }
        Command::Witness { input, budget, seed } => {
            let a = read_matrix(&input)?;
            report.config("in", &input).config("budget", budget);
            let (t, case) = report.timed("witness", || construct_core_inflating_operator_with(&a, budget, seed.seed))?;
            let core_dim = analytic_core(&jordan_product(&t, &a)?).dim();
            report.verdict(json!({ "core_dim": core_dim, "case": case.label() }));
            report.certificates.push(Certificate::RankOne {
                a,
                verdict: RankOneVerdict::HigherRank { witness: t, core_dim, case },
            });
            Ok(EXIT_VERDICT)
        }
        Command::Affine { inputs, .. } => {
            let (t, s) = two_inputs(&inputs)?;
            report.config("in", &inputs);
            let result = affine_combo_recover(&t, &s)?;
            report.verdict(&result);
            if matches!(result, AffineComboResult::SpanConsistent { .. }) {
                report.warnings.push("dimension below 3: span condition holds on every swept vector".into());
            }
            report.certificates.push(Certificate::AffineCombo { t, s, result });
            Ok(EXIT_VERDICT)
        }
        Command::Propcheck { inputs, budget, seed } => {
            let (a, b) = two_inputs(&inputs)?;
            report.config("in", &inputs).config("budget", budget);
            if a.dim() < 3 {
                report.warnings.push("dimension below 3: results are empirical".into());
            }
            let result = report.timed("propcheck", || proportionality_test(&a, &b, budget, seed.seed))?;
            let code = match &result {
                ProportionalityResult::Proportional { lambda } => {
                    report.verdict(json!({ "verdict": "proportional", "lambda": lambda }));
                    EXIT_VERDICT
                }
                ProportionalityResult::Witness { case, lhs_core, rhs_core, .. } => {
                    report.verdict(json!({
                        "verdict": "not_proportional",
                        "case": case,
                        "lhs_core_dim": lhs_core.dim(),
                        "rhs_core_dim": rhs_core.dim(),
                    }));
                    EXIT_VERDICT
                }
                ProportionalityResult::Inconclusive { tried } => {
                    report.verdict(json!({ "verdict": "inconclusive", "tried": tried }));
                    EXIT_INCONCLUSIVE
                }
            };
            if !matches!(result, ProportionalityResult::Inconclusive { .. }) {
                report.certificates.push(Certificate::Proportionality { a, b, result });
            }
            Ok(code)
        }
        Command::Preserver { map, mode, dim, trials, budget, seed } => {
            let model = build_map(map, dim, seed.seed);
            report
                .config("map", &model)
                .config("mode", format!("{mode:?}").to_lowercase())
                .config("dim", dim);
            match mode {
                PreserverMode::Verify => {
                    report.config("trials", trials);
                    if !model.is_scaling() {
                        return Err(CliError::Usage("--mode verify needs a scaling map".into()));
                    }
                    let r = report.timed("verify", || verify_forward(&model, trials, seed.seed))?;
                    report.verdict(json!({ "trials": r.trials, "failures": r.failures, "dims": r.dims }));
                    Ok(match r.first_failure {
                        Some(pair) => {
                            report.certificates.push(Certificate::MapCounterexample { map: model, pair });
                            EXIT_COUNTEREXAMPLE
                        }
                        None => EXIT_VERDICT,
                    })
                }
                PreserverMode::Falsify => {
                    report.config("budget", budget);
                    let outcome = report.timed("falsify", || falsify_map(&model, dim, budget, seed.seed))?;
                    Ok(match outcome {
                        FalsifyOutcome::Counterexample { certificate, tried } => {
                            report.verdict(json!({ "verdict": "counterexample", "tried": tried }));
                            report.certificates.push(Certificate::MapCounterexample {
                                map: model,
                                pair: certificate,
                            });
                            EXIT_COUNTEREXAMPLE
                        }
                        FalsifyOutcome::NoneFound { tried } => {
                            report.verdict(json!({ "verdict": "none_found", "tried": tried }));
                            EXIT_INCONCLUSIVE
                        }
                    })
                }
                PreserverMode::ReplaySteps => {
                    report.config("budget", budget);
                    let apply = |t: &Matrix| model.apply(t).expect("dimension fixed by --dim");
                    let steps = report.timed("replay_steps", || replay_theorem_steps(&apply, dim, budget, seed.seed))?;
                    let lambdas: Vec<Option<GaussianRational>> =
                        steps.step3_rank_one_scalars.iter().map(|s| s.lambda.clone()).collect();
                    report.verdict(json!({
                        "all_steps_pass": steps.all_steps_pass(),
                        "step1_zero_fixed": steps.step1_zero_fixed,
                        "step1_nonzero_kept": steps.step1_nonzero_kept,
                        "step2_rank_one_preserved": steps.step2_rank_one_preserved,
                        "step3_lambdas": lambdas,
                        "step4_global_scaling": steps.step4_global_scaling,
                        "violations": steps.violations.len(),
                        "counterexamples": steps.counterexamples.len(),
                    }));
                    let pass = steps.all_steps_pass();
                    for v in steps.violations {
                        report.certificates.push(Certificate::StepViolation(v));
                    }
                    for pair in steps.counterexamples {
                        report.certificates.push(Certificate::MapCounterexample { map: model.clone(), pair });
                    }
                    Ok(if pass { EXIT_VERDICT } else { EXIT_COUNTEREXAMPLE })
                }
            }
        }
        Command::Corollary { map, dim, trials, seed } => {
            let model = build_map(map, dim, seed.seed);
            report.config("map", &model).config("trials", trials);
            let r = report.timed("corollary", || corollary_check(&model, trials, seed.seed))?;
            report.verdict(json!({
                "pairs": r.pairs,
                "triples": r.triples,
                "triple_agreements": r.triple_agreements,
                "pair_mismatches": r.pair_mismatches,
                "criterion_disagreements": r.criterion_disagreements,
            }));
            if r.criterion_disagreements > 0 {
                report.warnings.push("pointwise and subspace criteria disagree".into());
            }
            Ok(match r.first_mismatch {
                Some(m) => {
                    report.certificates.push(Certificate::CorollaryMismatch(m));
                    EXIT_COUNTEREXAMPLE
                }
                None => EXIT_VERDICT,
            })
        }
        Command::Fuzz { trials, seed } => {
            let sizes = SuiteSizes::uniform(trials);
            report.config("sizes", sizes);
            Ok(run_suite(report, seed.seed, &sizes))
        }
        Command::Selftest { seed } => {
            let sizes = SuiteSizes::full();
            report.config("sizes", sizes);
            Ok(run_suite(report, seed.seed, &sizes))
        }
    }
}

fn locspec_check_dim(expected: usize, found: usize) -> Result<(), CliError> {
    if expected == found {
        Ok(())
    } else {
        Err(locspec::Error::DimensionMismatch { expected, found }.into())
    }
}

fn run_suite(report: &mut RunReport, seed: u64, sizes: &SuiteSizes) -> i32 {
    let mut all = true;
    for (id, criterion) in selftest::CRITERIA {
        let outcome = report.timed(&format!("criterion{id}"), || criterion(seed, sizes));
        all &= outcome.passed;
        report.verdict(json!({
            "criterion": outcome.id,
            "name": outcome.name,
            "passed": outcome.passed,
            "details": outcome.details,
        }));
        report.certificates.extend(outcome.certificates);
    }
    if all {
        EXIT_VERDICT
    } else {
        EXIT_COUNTEREXAMPLE
    }
}

fn replay(path: &PathBuf, report: &mut RunReport) -> Result<i32, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    report.config("replay", path);
    let parse_err = |e: serde_json::Error| CliError::Parse {
        path: path.clone(),
        message: e.to_string(),
    };
    let certificates: Vec<Certificate> = match serde_json::from_str::<RunReport>(&text) {
        Ok(r) => r.certificates,
        Err(_) => match serde_json::from_str::<Vec<Certificate>>(&text) {
            Ok(list) => list,
            Err(_) => vec![serde_json::from_str::<Certificate>(&text).map_err(parse_err)?],
        },
    };
    let mut failed = 0;
    for (k, c) in certificates.iter().enumerate() {
        let result = c.replay();
        failed += result.is_err() as usize;
        report.verdict(json!({
            "index": k,
            "certificate": c.kind(),
            "replayed": result.is_ok(),
            "error": result.err().map(|e| e.to_string()),
        }));
    }
    Ok(if failed == 0 { EXIT_VERDICT } else { EXIT_COUNTEREXAMPLE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn missing_subcommand_is_a_usage_error() {
        let out = run(["locspec"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stdout.contains("required"));
    }
}
