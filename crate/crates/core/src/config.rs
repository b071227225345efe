//! Run configurations (TOML or JSON) and the batch runner.
//!
//! A run solves the configured problems, evaluates functionals and executes
//! theorem checks. Items run concurrently on a pool of `workers` threads and
//! are collected in configuration order. A failing item is recorded with its
//! error and never aborts the batch.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fields::{catalog, HeinzData, ScalarField, VectorField};
use crate::functionals::{bloch_norm, dirichlet_energy, hardy_norm, oscillation_mean, BlochSampling, DirichletEnergy, NormReport};
use crate::majorants::{BlochWeight, Majorant};
use crate::quadrature::{surface_mean, QuadratureOrders};
use crate::report::{Environment, ItemResult, Outcome, Report};
use crate::sampling::{linspace, sub_seed};
use crate::solver::{solve, Backend, SolveOptions, YukawaProblem};
use crate::verifier::{self, CheckSettings, GrowthParams, SubharmonicTarget, Verdict, THEOREM_IDS};

/// A Yukawa boundary-value problem `Δu = λ|u|^{τ−1}u`, `u = g` on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub id: String,
    pub n: usize,
    #[serde(default = "one")]
    pub tau: f64,
    /// Catalog name of `λ`, e.g. `const:1`.
    #[serde(default = "zero_name")]
    pub lambda: String,
    /// Catalog name of the boundary data.
    #[serde(default = "one_name")]
    pub boundary: String,
    #[serde(default = "default_backend")]
    pub backend: Backend,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn zero_name() -> String {
    "zero".into()
}
fn one_name() -> String {
    "one".into()
}
fn default_backend() -> Backend {
    Backend::PicardIntegral
}
fn identity_name() -> String {
    "id".into()
}

/// Field reference: a solved problem id or a catalog name in dimension `n`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Hardy,
    Bloch,
    /// `M_ν(u, r)` on the radius grid.
    Means,
    Oscillation,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalRequest {
    #[serde(default)]
    pub id: Option<String>,
    pub kind: FunctionalKind,
    #[serde(flatten)]
    pub target: FieldRef,
    #[serde(default = "two")]
    pub nu: f64,
    #[serde(default = "identity_name")]
    pub omega: String,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default)]
    pub r_grid: Option<Vec<f64>>,
    /// Centre of the oscillation ball.
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    /// Radius of the oscillation ball.
    #[serde(default)]
    pub radius: Option<f64>,
}

/// A theorem check. Parameters not used by the theorem are ignored; missing
/// ones take the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRequest {
    #[serde(default)]
    pub id: Option<String>,
    pub theorem: String,
    #[serde(flatten)]
    pub target: FieldRef,
    /// Component names of the planar map (`thm-1.3`).
    #[serde(default)]
    pub components: Vec<String>,
    /// `λ_k` of the map components (`thm-1.3`).
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default = "two")]
    pub nu: f64,
    #[serde(default = "one")]
    pub tau: f64,
    #[serde(default = "identity_name")]
    pub omega: String,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "one")]
    pub mu: f64,
    /// Heinz data `(a₁, b₁, a₂, b₂, a₃)` as constants.
    #[serde(default)]
    pub heinz: Option<[f64; 5]>,
    #[serde(default)]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub shells: Option<Vec<f64>>,
    #[serde(default)]
    pub radius_fraction: Option<f64>,
    /// Random draws for `lem-lemx` and `lem-5`.
    #[serde(default)]
    pub draws: Option<usize>,
    /// Catalog names for `thm-B`; defaults to the polynomial catalog.
    #[serde(default)]
    pub catalog: Option<Vec<String>>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Quadrature orders for this check only.
    #[serde(default)]
    pub orders: Option<QuadratureOrders>,
}

impl CheckRequest {
    pub fn new(theorem: &str) -> Self {
        CheckRequest {
            id: None,
            theorem: theorem.into(),
            target: FieldRef::default(),
            components: Vec::new(),
            lambdas: Vec::new(),
            nu: 2.0,
            tau: 1.0,
            omega: "id".into(),
            alpha: 1.0,
            beta: 0.0,
            mu: 1.0,
            heinz: None,
            r_grid: None,
            shells: None,
            radius_fraction: None,
            draws: None,
            catalog: None,
            samples: None,
            orders: None,
        }
    }

    pub fn on_field(mut self, name: &str, n: usize) -> Self {
        self.target = FieldRef {
            problem: None,
            field: Some(name.into()),
            n: Some(n),
        };
        self
    }

    /// Check with the shipped default test family for `theorem`.
    pub fn preset(theorem: &str) -> Result<Self> {
        let c = CheckRequest::new(theorem);
        Ok(match theorem {
            "prop-1.1" | "lem-2.3" | "lem-2.5" => c.on_field("yukawa:1", 3),
            "thm-1.2" => c.on_field("yukawa:0.5", 3),
            "thm-1.3" => CheckRequest {
                components: vec!["x1".into(), "sinh:0,1".into()],
                lambdas: vec![0.0, 1.0],
                ..c.on_field("x1", 2)
            },
            "thm-1.4" => c.on_field("yukawa:1", 3),
            "thm-1.5" => CheckRequest {
                heinz: Some([0.0, 0.0, 0.3, 1.0, 0.0]),
                ..c.on_field("yukawa:0.3", 3)
            },
            "cor-1.5" => CheckRequest {
                heinz: Some([0.0, 0.0, 0.3, 1.0, 0.0]),
                ..c.on_field("yukawa:0.3", 3)
            },
            "thm-1.6" => c.on_field("yukawa:1", 3),
            "thm-1.7" => CheckRequest {
                alpha: 0.75,
                mu: 1.25,
                ..c.on_field("yukawa:0.5", 3)
            },
            "lem-2.1" => CheckRequest { nu: 3.0, ..c.on_field("yukawa:1", 3) },
            "lem-cw4" | "lem-cw5" => c.on_field("yukawa:1", 3),
            "thm-B" | "lem-lemx" | "lem-5" => c,
            _ => return Err(LabError::Configuration(format!("unknown theorem id {theorem:?}"))),
        })
    }
}

/// Parsed run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub orders: QuadratureOrders,
    #[serde(default)]
    pub solve: SolveOptions,
    /// Base sample count of the checkers.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub problems: Vec<ProblemSpec>,
    #[serde(default)]
    pub functionals: Vec<FunctionalRequest>,
    #[serde(default)]
    pub checks: Vec<CheckRequest>,
}

fn default_out() -> String {
    "out".into()
}
fn default_samples() -> usize {
    200
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: default_out(),
            workers: None,
            orders: QuadratureOrders::default(),
            solve: SolveOptions::default(),
            samples: default_samples(),
            problems: Vec::new(),
            functionals: Vec::new(),
            checks: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| LabError::Parse(format!("JSON config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| LabError::Parse(format!("TOML config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn check_settings(&self, seed: u64, samples: Option<usize>) -> CheckSettings {
        CheckSettings {
            seed,
            samples: samples.unwrap_or(self.samples),
            orders: self.orders,
            local_orders: QuadratureOrders::light(),
        }
    }
}

/// Which parts of a configuration to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunScope {
    pub functionals: bool,
    pub checks: bool,
}

impl RunScope {
    pub const ALL: RunScope = RunScope {
        functionals: true,
        checks: true,
    };
}

type Solved = BTreeMap<String, std::result::Result<ScalarField, String>>;

fn resolve(target: &FieldRef, solved: &Solved) -> Result<ScalarField> {
    match (&target.problem, &target.field) {
        (Some(p), None) => match solved.get(p) {
            Some(Ok(f)) => Ok(f.clone()),
            Some(Err(e)) => Err(LabError::Configuration(format!("problem {p:?} failed: {e}"))),
            None => Err(LabError::Configuration(format!("unknown problem {p:?}"))),
        },
        (None, Some(name)) => catalog::by_name(name, target.n.unwrap_or(2)),
        _ => Err(LabError::Configuration("exactly one of `problem` and `field` is required".into())),
    }
}

fn error_outcome(e: &LabError) -> Outcome {
    let kind = match e {
        LabError::Domain(_) => "domain",
        LabError::Singularity(_) => "singularity",
        LabError::SingularCoefficient(_) => "singular-coefficient",
        LabError::Unreachable => "unreachable",
        LabError::Configuration(_) => "configuration",
        LabError::Divergence { .. } => "divergence",
        LabError::Hypothesis { .. } => "hypothesis",
        LabError::NonFinite { .. } => "non-finite",
        LabError::StepTooSmall(_) => "step-too-small",
        LabError::Unsupported(_) => "unsupported",
        LabError::Io { .. } => "io",
        LabError::Parse(_) => "parse",
    };
    Outcome::Error {
        kind: kind.into(),
        message: e.to_string(),
    }
}

fn build_problem(p: &ProblemSpec) -> Result<YukawaProblem> {
    let lambda = catalog::by_name(&p.lambda, p.n)?;
    let boundary = catalog::by_name(&p.boundary, p.n)?;
    YukawaProblem::new(p.tau, lambda, boundary, p.backend)
}

fn run_functional(req: &FunctionalRequest, solved: &Solved, cfg: &RunConfig) -> Result<Outcome> {
    let u = resolve(&req.target, solved)?;
    let rule = cfg.orders.sphere_rule(u.dimension())?;
    let grid = req.r_grid.clone().unwrap_or_else(|| linspace(0.0, 0.95, 20));
    Ok(match req.kind {
        FunctionalKind::Hardy => Outcome::Norm(hardy_norm(&u, req.nu, &grid, &rule)?),
        FunctionalKind::Bloch => {
            let omega = Majorant::by_name(&req.omega)?;
            let weight = BlochWeight::new(req.alpha, req.beta)?;
            Outcome::Norm(bloch_norm(&u, req.nu, &omega, &weight, &BlochSampling::default(), &rule)?)
        }
        FunctionalKind::Means => {
            let rows = grid
                .iter()
                .map(|&r| Ok((r, surface_mean(&u, r, &rule, req.nu)?)))
                .collect::<Result<Vec<_>>>()?;
            Outcome::Means { nu: req.nu, rows }
        }
        FunctionalKind::Oscillation => {
            let x = req.point.clone().unwrap_or_else(|| vec![0.0; u.dimension()]);
            let r = req.radius.unwrap_or(0.5);
            let value = oscillation_mean(&u, &x, r, &cfg.orders)?;
            Outcome::Norm(NormReport {
                value,
                infinite: !value.is_finite(),
                argmax: x,
                samples: 1,
                resolution: r,
            })
        }
        FunctionalKind::Energy => {
            let e: DirichletEnergy = dirichlet_energy(&u, req.alpha, req.gamma, req.mu, &cfg.orders)?;
            Outcome::Energy(e)
        }
    })
}

/// Runs one theorem check.
pub fn run_check(req: &CheckRequest, solved: &Solved, cfg: &RunConfig, seed: u64) -> Result<Verdict> {
    let mut s = cfg.check_settings(seed, req.samples);
    if let Some(o) = req.orders {
        s.orders = o;
    }
    let field = || resolve(&req.target, solved);
    let growth = || -> Result<GrowthParams> {
        Ok(GrowthParams {
            nu: req.nu,
            omega: Majorant::by_name(&req.omega)?,
            weight: BlochWeight::new(req.alpha, req.beta)?,
            r_grid: req.r_grid.clone().unwrap_or_else(GrowthParams::default_grid),
            bloch: BlochSampling::default(),
        })
    };
    let heinz = |n: usize| -> Result<HeinzData> {
        let [a1, b1, a2, b2, a3] = req
            .heinz
            .ok_or_else(|| LabError::Configuration("`heinz = [a1, b1, a2, b2, a3]` is required".into()))?;
        HeinzData::constants(n, a1, b1, a2, b2, a3)
    };
    let verdict = match req.theorem.as_str() {
        "prop-1.1" => verifier::verify_gradient_bound(&field()?, req.tau, req.nu, req.radius_fraction.unwrap_or(0.5), &s)?,
        "thm-1.2" => verifier::verify_bloch_oscillation(&field()?, &Majorant::by_name(&req.omega)?, req.alpha, &s)?,
        "thm-1.3" => {
            let components = req
                .components
                .iter()
                .map(|c| catalog::by_name(c, 2))
                .collect::<Result<Vec<_>>>()?;
            verifier::verify_metric_equivalence(&VectorField::new(components)?, &req.lambdas, &s)?
        }
        "thm-1.4" => verifier::verify_growth(&field()?, &growth()?, &s)?,
        "thm-1.5" | "cor-1.5" => {
            let u = field()?;
            let data = heinz(u.dimension())?;
            verifier::verify_heinz_growth(&u, &data, &growth()?, req.theorem == "cor-1.5", &s)?
        }
        "thm-1.6" => {
            let shells = req.shells.clone().unwrap_or_else(verifier::default_shells);
            verifier::verify_dirichlet_finiteness(&field()?, req.alpha, req.mu, req.nu, &shells, &s)?
        }
        "thm-1.7" => {
            let r_seq = req.r_grid.clone().unwrap_or_else(|| vec![0.5, 0.9]);
            verifier::verify_harmonic_majorant(&field()?, req.nu, req.alpha, req.mu, &r_seq, &s)?
        }
        "lem-2.1" => verifier::verify_subharmonicity(SubharmonicTarget::AbsPower, &field()?, req.nu, &s)?,
        "lem-cw4" => verifier::verify_subharmonicity(SubharmonicTarget::HessianPower, &field()?, req.nu, &s)?,
        "lem-cw5" => verifier::verify_subharmonicity(SubharmonicTarget::GradientPower, &field()?, req.nu, &s)?,
        "lem-2.3" | "lem-2.5" => {
            let mut v = verifier::verify_mean_bound(&field()?, req.nu, &s)?;
            v.theorem = req.theorem.clone();
            v
        }
        "lem-lemx" => verifier::verify_power_inequality(req.draws.unwrap_or(10_000), seed)?,
        "lem-5" => verifier::verify_majorant_monotonicity(req.draws.unwrap_or(10_000), seed)?,
        "thm-B" => {
            let fields = match &req.catalog {
                Some(names) => {
                    let n = req.target.n.unwrap_or(2);
                    names.iter().map(|c| catalog::by_name(c, n)).collect::<Result<Vec<_>>>()?
                }
                None => [2, 3].into_iter().flat_map(catalog::polynomial_catalog).collect(),
            };
            let r_grid = req.r_grid.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.9]);
            verifier::verify_mean_value(&fields, &r_grid, &req.orders.unwrap_or_else(verifier::mean_value_orders))?
        }
        other => {
            return Err(LabError::Configuration(format!(
                "unknown theorem id {other:?}; expected one of {}",
                THEOREM_IDS.join(", ")
            )))
        }
    };
    Ok(verdict)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64() * 1e3)
}

fn unique_ids<'a>(prefix: &str, ids: impl Iterator<Item = (usize, Option<&'a str>, String)>) -> Vec<String> {
    let mut seen = BTreeMap::<String, usize>::new();
    ids.map(|(i, id, label)| {
        let base = id.map(str::to_string).unwrap_or_else(|| format!("{prefix}-{i}-{label}"));
        let k = seen.entry(base.clone()).or_insert(0);
        *k += 1;
        if *k == 1 {
            base
        } else {
            format!("{base}-{k}")
        }
    })
    .collect()
}

/// Executes the configuration. Never fails on a single item; the error is
/// recorded in that item's result.
pub fn run(cfg: &RunConfig, scope: RunScope) -> Result<Report> {
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Configuration(format!("thread pool: {e}")))?;
    let started = chrono::Utc::now();
    let mut runtimes = BTreeMap::new();
    let mut items = Vec::new();

    let solve_results: Vec<(std::result::Result<crate::solver::SolutionField, LabError>, f64)> = pool.install(|| {
        cfg.problems
            .par_iter()
            .map(|p| {
                timed(|| {
                    let opts = SolveOptions {
                        seed: sub_seed(cfg.seed, &p.id),
                        ..cfg.solve
                    };
                    build_problem(p).and_then(|prob| solve(&prob, &opts))
                })
            })
            .collect()
    });
    let mut solved: Solved = BTreeMap::new();
    for (p, (res, ms)) in cfg.problems.iter().zip(solve_results) {
        let id = format!("solve-{}", p.id);
        runtimes.insert(id.clone(), ms);
        let outcome = match res {
            Ok(sol) => {
                solved.insert(p.id.clone(), Ok(sol.field.clone()));
                Outcome::Solution(sol.meta)
            }
            Err(e) => {
                solved.insert(p.id.clone(), Err(e.to_string()));
                error_outcome(&e)
            }
        };
        items.push(ItemResult { id, outcome });
    }
    let solved = Arc::new(solved);

    if scope.functionals {
        let ids = unique_ids(
            "functional",
            cfg.functionals
                .iter()
                .enumerate()
                .map(|(i, f)| (i, f.id.as_deref(), format!("{:?}", f.kind).to_lowercase())),
        );
        let results: Vec<(Result<Outcome>, f64)> = pool.install(|| {
            cfg.functionals
                .par_iter()
                .map(|f| timed(|| run_functional(f, &solved, cfg)))
                .collect()
        });
        for (id, (res, ms)) in ids.into_iter().zip(results) {
            runtimes.insert(id.clone(), ms);
            let outcome = res.unwrap_or_else(|e| error_outcome(&e));
            items.push(ItemResult { id, outcome });
        }
    }

    if scope.checks {
        let ids = unique_ids(
            "check",
            cfg.checks.iter().enumerate().map(|(i, c)| (i, c.id.as_deref(), c.theorem.clone())),
        );
        let results: Vec<(Result<Verdict>, f64)> = pool.install(|| {
            cfg.checks
                .par_iter()
                .zip(&ids)
                .map(|(c, id)| timed(|| run_check(c, &solved, cfg, sub_seed(cfg.seed, id))))
                .collect()
        });
        for (id, (res, ms)) in ids.into_iter().zip(results) {
            runtimes.insert(id.clone(), ms);
            let outcome = match res {
                Ok(v) => Outcome::Verdict(v),
                Err(e) => error_outcome(&e),
            };
            items.push(ItemResult { id, outcome });
        }
    }

    Ok(Report {
        config: cfg.clone(),
        items,
        environment: Environment {
            timestamp: started.to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").into(),
            workers,
            runtimes_ms: runtimes,
        },
    })
}
