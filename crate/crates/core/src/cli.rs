//! Command-line front end. Every command writes one JSON report to stdout.
//!
//! Exit status: 0 when every reported check passes, 1 when a residual fails,
//! 2 for unreadable or invalid input and failed preconditions.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::Tolerances;
use crate::constructions::{construct_sigma_thm32, construct_sigma_thm33, reduce_general_prop36, reduce_to_hom_prop34};
use crate::derivations::{derivation_space, leibniz_residual, lemma22_residual, sigma_tau_residual, symmetrize};
use crate::error::{LabError, Result};
use crate::example26::{build_example26, AlphaSpec};
use crate::io::{self, SuperMapJson};
use crate::semidirect::{NormBudget, SemidirectContext};
use crate::supermap::SuperMap;

#[derive(Debug, Parser)]
#[command(
    name = "sdlab",
    version,
    about = "Checks and constructions for sigma-derivations on matrix C*-algebras"
)]
pub struct Cli {
    /// Relative tolerance for identity checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Rank cutoff factor for nullspaces and range projections.
    #[arg(long = "rank-tol", global = true)]
    pub rank_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Thm32,
    Thm33,
    Prop34,
    Prop36,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaChoice {
    Zero,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leibniz (or (σ,τ)) residual of d.
    Verify {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        d: PathBuf,
        #[arg(long)]
        tau: Option<PathBuf>,
    },
    /// Basis of all σ-derivations.
    Solve {
        #[arg(long)]
        sigma: PathBuf,
        /// Restrict to *-preserving derivations.
        #[arg(long)]
        star: bool,
    },
    /// Projection construction of Σ (and D).
    Construct {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        d: PathBuf,
    },
    /// (σ+τ)/2 for a *(σ,τ)-derivation.
    Symmetrize {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        d: PathBuf,
    },
    /// Discretized C[0,2] instance with d(f) = f·h.
    Example26 {
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, value_enum, default_value = "zero")]
        alpha: AlphaChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Semidirect embedding a ↦ (a, d(a)) and norm estimates.
    Semidirect {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        d: PathBuf,
        #[arg(long = "norm-budget", default_value_t = 8)]
        norm_budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a JSON suite file naming a command and its inline inputs.
    Run { spec: PathBuf },
}

/// What one invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A fully loaded command, independent of where its inputs came from.
#[derive(Debug)]
pub enum Job {
    Verify {
        sigma: SuperMap,
        d: SuperMap,
        tau: Option<SuperMap>,
    },
    Solve {
        sigma: SuperMap,
        star: bool,
    },
    Construct {
        method: Method,
        sigma: SuperMap,
        d: SuperMap,
    },
    Symmetrize {
        sigma: SuperMap,
        tau: SuperMap,
        d: SuperMap,
    },
    Example26 {
        n: usize,
        alpha: AlphaChoice,
        seed: u64,
    },
    Semidirect {
        sigma: SuperMap,
        d: SuperMap,
        budget: NormBudget,
        seed: u64,
    },
}

impl Job {
    fn name(&self) -> &'static str {
        match self {
            Job::Verify { .. } => "verify",
            Job::Solve { .. } => "solve",
            Job::Construct { .. } => "construct",
            Job::Symmetrize { .. } => "symmetrize",
            Job::Example26 { .. } => "example26",
            Job::Semidirect { .. } => "semidirect",
        }
    }
}

/// Body of a report before the common envelope is added.
pub struct JobReport {
    pub residuals: BTreeMap<String, f64>,
    pub singular_values: Option<Vec<f64>>,
    pub passed: bool,
    pub result: Value,
}

/// Suite spec accepted by `sdlab run`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub command: String,
    pub sigma: Option<SuperMapJson>,
    pub tau: Option<SuperMapJson>,
    pub d: Option<SuperMapJson>,
    pub method: Option<Method>,
    #[serde(default)]
    pub star: bool,
    pub n: Option<usize>,
    pub alpha: Option<AlphaChoice>,
    #[serde(default)]
    pub seed: u64,
    pub norm_budget: Option<usize>,
    pub tolerances: Option<SuiteTolerances>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteTolerances {
    pub identity_tol: Option<f64>,
    pub rank_tol_factor: Option<f64>,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_input(path: &PathBuf, role: &str, inputs: &mut BTreeMap<String, String>) -> Result<Vec<u8>> {
    let bytes =
        std::fs::read(path).map_err(|e| LabError::Parse(format!("{role}: cannot read {}: {e}", path.display())))?;
    inputs.insert(role.to_string(), digest(&bytes));
    Ok(bytes)
}

fn load_map(path: &PathBuf, role: &str, inputs: &mut BTreeMap<String, String>) -> Result<SuperMap> {
    let bytes = read_input(path, role, inputs)?;
    let text = String::from_utf8(bytes).map_err(|e| LabError::Parse(format!("{role}: {e}")))?;
    io::parse_supermap(&text).map_err(|e| match e {
        LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn tolerances(tol: Option<f64>, rank_tol: Option<f64>) -> Result<Tolerances> {
    let def = Tolerances::default();
    Tolerances::new(tol.unwrap_or(def.identity_tol), rank_tol.unwrap_or(def.rank_tol_factor))
}

fn spec_map(m: &Option<SuperMapJson>, role: &str) -> Result<SuperMap> {
    match m {
        Some(j) => SuperMap::try_from(j),
        None => Err(LabError::InvalidSpec(format!("suite file is missing \"{role}\""))),
    }
}

fn job_from_spec(spec: &SuiteSpec) -> Result<Job> {
    Ok(match spec.command.as_str() {
        "verify" => Job::Verify {
            sigma: spec_map(&spec.sigma, "sigma")?,
            d: spec_map(&spec.d, "d")?,
            tau: spec.tau.as_ref().map(SuperMap::try_from).transpose()?,
        },
        "solve" => Job::Solve {
            sigma: spec_map(&spec.sigma, "sigma")?,
            star: spec.star,
        },
        "construct" => Job::Construct {
            method: spec
                .method
                .ok_or_else(|| LabError::InvalidSpec("suite file is missing \"method\"".into()))?,
            sigma: spec_map(&spec.sigma, "sigma")?,
            d: spec_map(&spec.d, "d")?,
        },
        "symmetrize" => Job::Symmetrize {
            sigma: spec_map(&spec.sigma, "sigma")?,
            tau: spec_map(&spec.tau, "tau")?,
            d: spec_map(&spec.d, "d")?,
        },
        "example26" => Job::Example26 {
            n: spec.n.unwrap_or(9),
            alpha: spec.alpha.unwrap_or(AlphaChoice::Zero),
            seed: spec.seed,
        },
        "semidirect" => Job::Semidirect {
            sigma: spec_map(&spec.sigma, "sigma")?,
            d: spec_map(&spec.d, "d")?,
            budget: NormBudget {
                starts: spec.norm_budget.unwrap_or(8),
                ..NormBudget::default()
            },
            seed: spec.seed,
        },
        other => return Err(LabError::InvalidSpec(format!("unknown command \"{other}\""))),
    })
}

fn load(cli: &Cli, inputs: &mut BTreeMap<String, String>) -> Result<(Job, Tolerances)> {
    let tol = tolerances(cli.tol, cli.rank_tol)?;
    let job = match &cli.command {
        Command::Verify { sigma, d, tau } => Job::Verify {
            sigma: load_map(sigma, "sigma", inputs)?,
            d: load_map(d, "d", inputs)?,
            tau: tau.as_ref().map(|t| load_map(t, "tau", inputs)).transpose()?,
        },
        Command::Solve { sigma, star } => Job::Solve {
            sigma: load_map(sigma, "sigma", inputs)?,
            star: *star,
        },
        Command::Construct { method, sigma, d } => Job::Construct {
            method: *method,
            sigma: load_map(sigma, "sigma", inputs)?,
            d: load_map(d, "d", inputs)?,
        },
        Command::Symmetrize { sigma, tau, d } => Job::Symmetrize {
            sigma: load_map(sigma, "sigma", inputs)?,
            tau: load_map(tau, "tau", inputs)?,
            d: load_map(d, "d", inputs)?,
        },
        Command::Example26 { n, alpha, seed } => Job::Example26 {
            n: *n,
            alpha: *alpha,
            seed: *seed,
        },
        Command::Semidirect {
            sigma,
            d,
            norm_budget,
            seed,
        } => Job::Semidirect {
            sigma: load_map(sigma, "sigma", inputs)?,
            d: load_map(d, "d", inputs)?,
            budget: NormBudget {
                starts: *norm_budget,
                ..NormBudget::default()
            },
            seed: *seed,
        },
        Command::Run { spec } => {
            let bytes = read_input(spec, "spec", inputs)?;
            let text = String::from_utf8(bytes).map_err(|e| LabError::Parse(format!("spec: {e}")))?;
            let parsed: SuiteSpec =
                serde_json::from_str(&text).map_err(|e| LabError::Parse(format!("{}: {e}", spec.display())))?;
            let tol = match &parsed.tolerances {
                Some(t) => tolerances(cli.tol.or(t.identity_tol), cli.rank_tol.or(t.rank_tol_factor))?,
                None => tol,
            };
            return Ok((job_from_spec(&parsed)?, tol));
        }
    };
    Ok((job, tol))
}

/// Runs a loaded job.
pub fn execute(job: &Job, tol: &Tolerances) -> Result<JobReport> {
    let mut residuals = BTreeMap::new();
    match job {
        Job::Verify { sigma, d, tau } => {
            let (name, check) = match tau {
                Some(t) => ("sigma_tau", sigma_tau_residual(d, sigma, t, tol)?),
                None => ("leibniz", leibniz_residual(d, sigma, tol)?),
            };
            residuals.insert(name.to_string(), check.residual);
            if tau.is_none() {
                residuals.insert("lemma22".into(), lemma22_residual(d, sigma, tol)?.residual);
            }
            Ok(JobReport {
                residuals,
                singular_values: None,
                passed: check.passed,
                result: json!({ "check": name, "worst": check.worst, "scale": check.scale }),
            })
        }
        Job::Solve { sigma, star } => {
            let space = derivation_space(sigma, *star, tol)?;
            let mut worst = 0.0f64;
            let mut passed = true;
            for b in &space.basis {
                let c = leibniz_residual(b, sigma, tol)?;
                worst = worst.max(c.residual);
                passed &= c.passed;
                if *star {
                    let s = b.is_star_linear(tol);
                    passed &= s.holds;
                    residuals.insert(
                        "max_star".into(),
                        residuals.get("max_star").copied().unwrap_or(0.0).max(s.residual),
                    );
                }
            }
            residuals.insert("max_leibniz".into(), worst);
            let basis: Vec<Value> = space.basis.iter().map(io::supermap_value).collect();
            Ok(JobReport {
                residuals,
                singular_values: Some(space.singular_values.clone()),
                passed,
                result: json!({
                    "dimension": space.dim(),
                    "star_constrained": star,
                    "threshold": space.threshold,
                    "basis": basis,
                }),
            })
        }
        Job::Construct { method, sigma, d } => {
            let report = match method {
                Method::Thm32 => construct_sigma_thm32(d, sigma, tol)?,
                Method::Thm33 => construct_sigma_thm33(d, sigma, tol)?,
                Method::Prop34 => reduce_to_hom_prop34(d, sigma, tol)?,
                Method::Prop36 => reduce_general_prop36(d, sigma, tol)?,
            };
            Ok(JobReport {
                residuals: report.residuals.clone(),
                singular_values: Some(report.singular_values.clone()),
                passed: report.passed,
                result: io::construction_report_value(&report),
            })
        }
        Job::Symmetrize { sigma, tau, d } => {
            let (mid, rep) = symmetrize(d, sigma, tau, tol)?;
            residuals.insert("forward".into(), rep.forward.residual);
            residuals.insert("swapped".into(), rep.swapped.residual);
            residuals.insert("mid".into(), rep.mid.residual);
            // only the swapped and mid rules are claimed, and only for genuine (σ,τ)-derivations
            let passed = rep.passed();
            Ok(JobReport {
                residuals,
                singular_values: None,
                passed,
                result: json!({ "mid": io::supermap_value(&mid) }),
            })
        }
        Job::Example26 { n, alpha, seed } => {
            let spec = match alpha {
                AlphaChoice::Zero => AlphaSpec::Zero,
                AlphaChoice::Random => AlphaSpec::Random { seed: *seed },
            };
            let inst = build_example26(*n, spec)?;
            let leib = leibniz_residual(&inst.d, &inst.sigma, tol)?;
            let half = leibniz_residual(&inst.d, &inst.half_map(), tol)?;
            let report = construct_sigma_thm32(&inst.d, &inst.sigma, tol)?;
            let indicator_gap = (&report.p - &inst.support_projection()).spectral_norm();
            residuals.insert("leibniz".into(), leib.residual);
            residuals.insert("leibniz_half_map".into(), half.residual);
            residuals.insert("projection_vs_indicator".into(), indicator_gap);
            for (k, v) in &report.residuals {
                residuals.insert(format!("thm32_{k}"), *v);
            }
            let passed = leib.passed && half.passed && report.passed && tol.passes(indicator_gap, 1.0);
            let alpha_rows: Vec<Vec<f64>> = inst.alpha.row_iter().map(|r| r.iter().copied().collect()).collect();
            Ok(JobReport {
                residuals,
                singular_values: Some(report.singular_values.clone()),
                passed,
                result: json!({
                    "grid": inst.grid,
                    "h": inst.h,
                    "alpha": alpha_rows,
                    "P": io::matrix_value(&report.p),
                    "Sigma": io::supermap_value(&report.sigma),
                }),
            })
        }
        Job::Semidirect { sigma, d, budget, seed } => {
            let ctx = SemidirectContext::new(sigma, tol)?;
            let phi = ctx.phi_d(d)?;
            residuals.insert("hom_residual".into(), phi.hom_residual);
            let alg = sigma.algebra();
            let mut norms = Vec::with_capacity(alg.dim());
            for i in 0..alg.dim() {
                let mut a = vec![crate::matrix::ZERO; alg.dim()];
                a[i] = crate::matrix::ONE;
                let est = ctx.norm_estimate(&ctx.apply_phi(d, &a), *budget, *seed)?;
                norms.push(json!({
                    "basis": i,
                    "value": est.value,
                    "algebra_norm": est.algebra_norm,
                    "x_norm": est.x_norm,
                    "left": est.left,
                    "right": est.right,
                    "both": est.both,
                    "lower_bound": est.lower_bound,
                }));
            }
            Ok(JobReport {
                residuals,
                singular_values: None,
                passed: phi.passed,
                result: json!({
                    "injective": phi.injective,
                    "norm_budget": { "starts": budget.starts, "iterations": budget.iterations },
                    "phi_d_norms": norms,
                }),
            })
        }
    }
}

fn envelope(
    name: &str,
    args: &[String],
    inputs: &BTreeMap<String, String>,
    tol: &Tolerances,
    body: JobReport,
) -> Value {
    let mut v = json!({
        "command": name,
        "args": args,
        "inputs": inputs,
        "tolerances": { "identity_tol": tol.identity_tol, "rank_tol_factor": tol.rank_tol_factor },
        "residuals": body.residuals,
        "passed": body.passed,
        "result": body.result,
    });
    if let Some(sv) = body.singular_values {
        v["singular_values"] = json!(sv);
    }
    v
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("sdlab".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if status == 0 {
                Outcome {
                    status,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    status,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut inputs = BTreeMap::new();
    let outcome = load(&cli, &mut inputs).and_then(|(job, tol)| {
        let body = execute(&job, &tol)?;
        Ok(envelope(job.name(), &args, &inputs, &tol, body))
    });
    match outcome {
        Ok(report) => {
            let passed = report["passed"].as_bool().unwrap_or(false);
            let mut stdout = serde_json::to_string_pretty(&report).expect("serializable");
            stdout.push('\n');
            Outcome {
                status: if passed { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            status: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
