//! Seeded experiment suites, their configuration, and report emission.
//!
//! Every suite turns an [`ExperimentConfig`] into a list of
//! [`CheckRecord`]s. A record asserts `lhs ≤ rhs + tolerance`; heuristic
//! records are kept for review but never gate the outcome.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{mho_membership, minimize_family, three_lines_check, BoundaryGrid, LaurentFamily, Verdict};
use crate::compactness::{theorem_later_transfer_check, truncation_chain_check, CompactProxy, TransferOptions};
use crate::error::{Error, Result};
use crate::fourier::{
    coefficients, family_population, lemma3_diagnostics, parseval_check, sn_family_bound_report, vallee_poussin,
    vallee_poussin_family, vallee_poussin_weight, CircleFunction,
};
use crate::interpolation::{
    closed_form_norm, interpolation_inequality_check, lions_peetre_decompose, InterpolationRequest,
};
use crate::polynomials::{
    diagonal_polynomial_norm, estimate_op_norm, lemma_expansion_check, multilinear_interpolation_check,
    polarize_via_formula, radius_bound_check, random_polynomial, AscentOptions, HomPolynomial, SymMultilinearMap,
    TaylorData,
};
use crate::rng::{complex_normal_vec, derive_seed, instance_rng, log_uniform};
use crate::spaces::{Couple, Exponent, WeightedSpace};
use crate::tolerances::{CALDERON_REL, IDENTITY_REL, OBJECTIVE_TOL};
use crate::C64;

/// Version of the config and report JSON layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "polarization",
        description: "polar recovered by the signed-average formula vs the stored polar",
    },
    SuiteInfo {
        name: "lemma-expansion",
        description: "binomial expansion of T(x0+x1,…) for symmetric multilinear maps",
    },
    SuiteInfo {
        name: "riesz-thorin", description: "M_θ ≤ M_0^{1-θ} M_1^θ for linear maps on (ℓ1, ℓ∞) couples"
    },
    SuiteInfo {
        name: "calderon-crosscheck", description: "optimized analytic-family norm vs the closed-form ℓ2 norm"
    },
    SuiteInfo { name: "parseval", description: "Parseval identity for band-limited vector functions on the circle" },
    SuiteInfo {
        name: "vallee-poussin",
        description: "S_N reproduction, window values and family-norm ratio stability",
    },
    SuiteInfo { name: "lemma3", description: "coefficient decay and counting budget of P∘φ for decaying proxies" },
    SuiteInfo { name: "lions-peetre", description: "K-functional decomposition constants over a log-spaced t grid" },
    SuiteInfo { name: "truncation-chain", description: "‖P − π_n P‖_θ against its endpoint bound along n" },
    SuiteInfo { name: "later-transfer", description: "ε-net transfer from P(B_X0) to P(B_Xθ) at the prescribed t" },
    SuiteInfo { name: "radius-bound", description: "R_θ ≥ R_0^{1-θ} R_1^θ / e for diagonal Taylor families" },
    SuiteInfo { name: "mho", description: "unconditional-sum membership brackets for analytic families" },
    SuiteInfo { name: "three-lines", description: "interpolation inequality and three-circles implied constants" },
];

/// Registered suites in a fixed order.
pub fn list_suites() -> &'static [SuiteInfo] {
    SUITES
}

/// One experiment. Unset fields take per-suite defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub suite: String,
    pub seed: u64,
    /// Instances per configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// Family degree `M` or polynomial degree, depending on the suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Grid size `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    /// Overrides the suite's main tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Fixed couples instead of random ones (lions-peetre, mho, three-lines).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couples: Option<Vec<Couple>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

const OPEN_THETA_SUITES: &[&str] = &["calderon-crosscheck", "truncation-chain", "later-transfer", "lemma3"];
const COUPLE_SUITES: &[&str] = &["lions-peetre", "mho", "three-lines"];

impl ExperimentConfig {
    pub fn new(suite: &str, seed: u64) -> Self {
        ExperimentConfig {
            version: SCHEMA_VERSION,
            suite: suite.to_owned(),
            seed,
            population: None,
            thetas: None,
            degree: None,
            samples: None,
            max_dim: None,
            tolerance: None,
            couples: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.version != SCHEMA_VERSION {
            bad.push(format!("version: expected {SCHEMA_VERSION}, got {}", self.version));
        }
        let known = SUITES.iter().any(|s| s.name == self.suite);
        if !known {
            bad.push(format!("suite: unknown suite `{}`", self.suite));
        }
        if self.population == Some(0) {
            bad.push("population: must be positive".into());
        }
        if let Some(thetas) = &self.thetas {
            if thetas.is_empty() {
                bad.push("thetas: must not be empty".into());
            }
            let open = OPEN_THETA_SUITES.contains(&self.suite.as_str());
            for t in thetas {
                let ok = if open { *t > 0.0 && *t < 1.0 } else { (0.0..=1.0).contains(t) };
                if !ok {
                    bad.push(format!("thetas: {t} outside {}", if open { "(0, 1)" } else { "[0, 1]" }));
                }
            }
        }
        if self.degree == Some(0) {
            bad.push("degree: must be positive".into());
        }
        if let Some(n) = self.samples {
            if n < 8 || !n.is_power_of_two() {
                bad.push(format!("samples: must be a power of two ≥ 8, got {n}"));
            }
        }
        if let Some(d) = self.max_dim {
            if d == 0 || d > 8 {
                bad.push(format!("max_dim: must lie in 1..=8, got {d}"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                bad.push(format!("tolerance: must be positive and finite, got {t}"));
            }
        }
        if let Some(couples) = &self.couples {
            if known && !COUPLE_SUITES.contains(&self.suite.as_str()) {
                bad.push(format!("couples: not used by suite `{}`", self.suite));
            }
            if couples.is_empty() {
                bad.push("couples: must not be empty".into());
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    fn population_or(&self, d: usize) -> usize {
        self.population.unwrap_or(d)
    }

    fn thetas_or(&self, d: &[f64]) -> Vec<f64> {
        self.thetas.clone().unwrap_or_else(|| d.to_vec())
    }

    fn degree_or(&self, d: usize) -> usize {
        self.degree.unwrap_or(d)
    }

    fn samples_or(&self, d: usize) -> usize {
        self.samples.unwrap_or(d)
    }

    fn max_dim_or(&self, d: usize) -> usize {
        self.max_dim.unwrap_or(d)
    }

    fn tolerance_or(&self, d: f64) -> f64 {
        self.tolerance.unwrap_or(d)
    }

    /// Per-purpose master seed.
    fn stream(&self, tag: u64) -> u64 {
        derive_seed(self.seed, tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Heuristic,
}

/// `lhs ≤ rhs + tolerance`, with both sides kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    /// SHA-256 of the JSON description of the inputs.
    pub inputs_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    /// `rhs + tolerance − lhs`.
    pub margin: f64,
    pub status: Status,
}

impl CheckRecord {
    fn bound(check: impl Into<String>, inputs: &impl Serialize, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs + tolerance - lhs;
        let status = if lhs.is_finite() && margin >= 0.0 { Status::Pass } else { Status::Fail };
        CheckRecord { check: check.into(), inputs_digest: digest(inputs), lhs, rhs, tolerance, margin, status }
    }

    /// Same comparison, recorded without gating.
    fn heuristic(check: impl Into<String>, inputs: &impl Serialize, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckRecord { status: Status::Heuristic, ..Self::bound(check, inputs, lhs, rhs, tolerance) }
    }

    fn gated_if(self, certified: bool) -> Self {
        if certified {
            self
        } else {
            CheckRecord { status: Status::Heuristic, ..self }
        }
    }
}

/// Hex SHA-256 of a value's JSON encoding.
pub fn digest(value: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable inputs");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    fn current() -> Self {
        Environment {
            crate_version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: u32,
    pub suite: String,
    pub environment: Environment,
    pub config: ExperimentConfig,
    pub records: Vec<CheckRecord>,
    /// Aggregates that are not assertions.
    pub summary: BTreeMap<String, serde_json::Value>,
    pub passed: usize,
    pub failed: usize,
    pub heuristic: usize,
}

impl SuiteReport {
    /// No gating record failed.
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    /// Records as CSV: `suite,check,lhs,rhs,tolerance,margin,status,inputs_digest`.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            suite: &'a str,
            check: &'a str,
            lhs: f64,
            rhs: f64,
            tolerance: f64,
            margin: f64,
            status: Status,
            inputs_digest: &'a str,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(Row {
                suite: &self.suite,
                check: &r.check,
                lhs: r.lhs,
                rhs: r.rhs,
                tolerance: r.tolerance,
                margin: r.margin,
                status: r.status,
                inputs_digest: &r.inputs_digest,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<suite>.json` and `<suite>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.suite));
        let csv = dir.join(format!("{}.csv", self.suite));
        fs::write(&json, serde_json::to_string_pretty(self)? + "\n")?;
        fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}

type Summary = BTreeMap<String, serde_json::Value>;

struct Outcome {
    records: Vec<CheckRecord>,
    summary: Summary,
}

/// Validates the config and runs its suite.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    let Outcome { records, summary } = match config.suite.as_str() {
        "polarization" => polarization(config)?,
        "lemma-expansion" => lemma_expansion(config)?,
        "riesz-thorin" => riesz_thorin(config)?,
        "calderon-crosscheck" => calderon_crosscheck(config)?,
        "parseval" => parseval(config)?,
        "vallee-poussin" => vallee_poussin_suite(config)?,
        "lemma3" => lemma3(config)?,
        "lions-peetre" => lions_peetre(config)?,
        "truncation-chain" => truncation_chain(config)?,
        "later-transfer" => later_transfer(config)?,
        "radius-bound" => radius_bound(config)?,
        "mho" => mho(config)?,
        "three-lines" => three_lines(config)?,
        other => return Err(Error::UnknownSuite(other.into())),
    };
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    Ok(SuiteReport {
        version: SCHEMA_VERSION,
        suite: config.suite.clone(),
        environment: Environment::current(),
        config: config.clone(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        heuristic: count(Status::Heuristic),
        records,
        summary,
    })
}

fn rel_gap(a: &[C64], b: &[C64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn exponent_pool(i: usize) -> (Exponent, Exponent) {
    const POOL: [(f64, f64); 6] =
        [(1.0, f64::INFINITY), (2.0, 2.0), (1.0, 2.0), (2.0, f64::INFINITY), (1.5, 4.0), (f64::INFINITY, 1.0)];
    let (a, b) = POOL[i % POOL.len()];
    let e = |p: f64| if p.is_infinite() { Exponent::Infinity } else { Exponent::Finite(p) };
    (e(a), e(b))
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| log_uniform(rng, 0.05, 20.0)).collect()
}

fn random_couple<R: Rng + ?Sized>(rng: &mut R, dim: usize, (p0, p1): (Exponent, Exponent)) -> Result<Couple> {
    Couple::new(WeightedSpace::new(p0, random_weights(rng, dim))?, WeightedSpace::new(p1, random_weights(rng, dim))?)
}

/// Configured couples, or `count` random ones cycling through the exponent
/// pool.
fn couples_for(cfg: &ExperimentConfig, count: usize, max_dim: usize) -> Result<Vec<Couple>> {
    if let Some(c) = &cfg.couples {
        return Ok(c.clone());
    }
    (0..count)
        .map(|i| {
            let mut rng = instance_rng(cfg.stream(0xc0), i as u64);
            let dim = 1 + rng.random_range(0..max_dim);
            random_couple(&mut rng, dim, exponent_pool(i))
        })
        .collect()
}

fn polarization(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(1000);
    let max_m = cfg.degree_or(5);
    let max_dim = cfg.max_dim_or(4);
    let tol = cfg.tolerance_or(1e-10);
    let mut records = Vec::new();
    for m in 1..=max_m {
        for n in 1..=max_dim {
            for q in 1..=max_dim {
                let stream = cfg.stream(((m * 16 + n) * 16 + q) as u64);
                let worst = (0..population)
                    .into_par_iter()
                    .map(|i| -> Result<f64> {
                        let p = random_polynomial(stream, 2 * i as u64, m, n, q);
                        let mut rng = instance_rng(stream, 2 * i as u64 + 1);
                        let xs: Vec<Vec<C64>> = (0..m).map(|_| complex_normal_vec(&mut rng, n)).collect();
                        let refs: Vec<&[C64]> = xs.iter().map(|v| v.as_slice()).collect();
                        Ok(rel_gap(&polarize_via_formula(&p, &refs)?, &p.polar().evaluate(&refs)?))
                    })
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let inputs = (cfg.seed, m, n, q, population);
                records.push(CheckRecord::bound(format!("m={m},n={n},q={q}"), &inputs, worst, 0.0, tol));
            }
        }
    }
    Ok(Outcome { records, summary: Summary::new() })
}

fn lemma_expansion(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(1000);
    let max_m = cfg.degree_or(6);
    let max_dim = cfg.max_dim_or(4);
    let tol = cfg.tolerance_or(1e-10);
    let mut records = Vec::new();
    for m in 1..=max_m {
        let stream = cfg.stream(m as u64);
        let worst = (0..population)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut rng = instance_rng(stream, i as u64);
                let n = 1 + rng.random_range(0..max_dim);
                let q = 1 + rng.random_range(0..max_dim);
                let t = SymMultilinearMap::random(&mut rng, m, n, q)?;
                let x0 = complex_normal_vec(&mut rng, n);
                let x1 = complex_normal_vec(&mut rng, n);
                Ok(lemma_expansion_check(&t, &x0, &x1)?.rel_error)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        records.push(CheckRecord::bound(format!("m={m}"), &(cfg.seed, m, population, max_dim), worst, 0.0, tol));
    }
    Ok(Outcome { records, summary: Summary::new() })
}

fn riesz_thorin(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(200);
    let max_dim = cfg.max_dim_or(8);
    let thetas = cfg.thetas_or(&[0.25, 0.5, 0.75]);
    let tol = cfg.tolerance_or(1e-9);
    let stream = cfg.stream(1);
    let opts = AscentOptions::default();
    let rows = (0..population)
        .into_par_iter()
        .map(|i| -> Result<Vec<CheckRecord>> {
            let mut rng = instance_rng(stream, i as u64);
            let n = 1 + rng.random_range(0..max_dim);
            let q = 1 + rng.random_range(0..max_dim);
            let a: Vec<Vec<C64>> = (0..q).map(|_| complex_normal_vec(&mut rng, n)).collect();
            let ends = (Exponent::Finite(1.0), Exponent::Infinity);
            let cx = random_couple(&mut rng, n, ends)?;
            let cy = random_couple(&mut rng, q, ends)?;
            let t = SymMultilinearMap::linear(&a)?;
            thetas
                .iter()
                .enumerate()
                .map(|(j, &theta)| {
                    let r = multilinear_interpolation_check(
                        &t,
                        std::slice::from_ref(&cx),
                        &cy,
                        theta,
                        &opts,
                        derive_seed(stream, (i * 8 + j) as u64),
                    )?;
                    let inputs = (&a, &cx, &cy, theta);
                    Ok(CheckRecord::bound(format!("map={i},theta={theta}"), &inputs, r.theta_lower, r.bound, tol)
                        .gated_if(!r.heuristic))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome { records: rows.into_iter().flatten().collect(), summary: Summary::new() })
}

fn calderon_crosscheck(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(50);
    let max_dim = cfg.max_dim_or(4);
    let degree = cfg.degree_or(32);
    let grid = BoundaryGrid::new(cfg.samples_or(256))?;
    let rel = cfg.tolerance_or(CALDERON_REL);
    let stream = cfg.stream(2);
    let budget = 1000;
    let rows = (0..population)
        .into_par_iter()
        .map(|i| -> Result<(Vec<CheckRecord>, bool, f64)> {
            let mut rng = instance_rng(stream, i as u64);
            let dim = 1 + rng.random_range(0..max_dim);
            let two = Exponent::Finite(2.0);
            let couple = random_couple(&mut rng, dim, (two, two))?;
            let theta = rng.random_range(0.1..0.9);
            let x = complex_normal_vec(&mut rng, dim);
            let closed = closed_form_norm(&InterpolationRequest::new(couple.clone(), theta)?, &x)?;
            let fit = minimize_family(&couple, theta, &x, degree, &grid, budget)?;
            let inputs = (&couple, theta, &x, degree, grid.samples);
            let recs = vec![
                CheckRecord::bound(format!("instance={i},upper"), &inputs, fit.value, closed * (1.0 + rel), 0.0),
                CheckRecord::bound(format!("instance={i},floor"), &inputs, closed - fit.value, 0.0, OBJECTIVE_TOL),
            ];
            Ok((recs, fit.converged, fit.value / closed - 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Summary::new();
    summary.insert("converged".into(), rows.iter().filter(|r| r.1).count().into());
    summary.insert("worst_rel_excess".into(), rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max).into());
    Ok(Outcome { records: rows.into_iter().flat_map(|r| r.0).collect(), summary })
}

fn parseval(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(1000);
    let n = cfg.samples_or(256);
    let max_dim = cfg.max_dim_or(4);
    let tol = cfg.tolerance_or(1e-8);
    let stream = cfg.stream(3);
    let max_band = 64.min(n / 2 - 1);
    let records = (0..population)
        .into_par_iter()
        .map(|i| -> Result<CheckRecord> {
            let mut rng = instance_rng(stream, i as u64);
            let dim = 1 + rng.random_range(0..max_dim);
            let band = rng.random_range(0..=max_band);
            let decay = rng.random_range(0.8..1.0);
            let f = CircleFunction::random(&mut rng, n, dim, band, decay)?;
            let functional = complex_normal_vec(&mut rng, dim);
            let r = parseval_check(&f, &functional)?;
            Ok(CheckRecord::bound(
                format!("instance={i},band={band}"),
                &(stream, i, n, dim, band),
                r.rel_error,
                0.0,
                tol,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome { records, summary: Summary::new() })
}

fn vallee_poussin_suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(1000);
    let samples = cfg.samples_or(256);
    let max_dim = cfg.max_dim_or(3);
    let tol = cfg.tolerance_or(0.05);
    let stream = cfg.stream(4);
    let mut records = Vec::new();

    // reproduction of data of degree ≤ N, on tables and on families
    let max_n = (samples / 4).saturating_sub(1).max(1);
    let reproduce = (0..200)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = instance_rng(stream, i as u64);
            let dim = 1 + rng.random_range(0..max_dim);
            let n = 1 + rng.random_range(0..max_n);
            let band = rng.random_range(0..=n);
            let f = CircleFunction::random(&mut rng, samples, dim, band, 1.0)?;
            let back = vallee_poussin(&coefficients(&f), n)?.synthesize();
            let table_err = f.samples().iter().zip(back.samples()).map(|(a, b)| rel_gap(b, a)).fold(0.0, f64::max);
            let phi = LaurentFamily::random(&mut rng, n, dim);
            let fam = vallee_poussin_family(&phi, n);
            let fam_err = phi.terms().zip(fam.terms()).map(|((_, a), (_, b))| rel_gap(b, a)).fold(0.0, f64::max);
            Ok((table_err, fam_err))
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = (stream, samples, max_dim);
    records.push(CheckRecord::bound(
        "reproduce,table",
        &inputs,
        reproduce.iter().map(|r| r.0).fold(0.0, f64::max),
        0.0,
        1e-12,
    ));
    records.push(CheckRecord::bound(
        "reproduce,family",
        &inputs,
        reproduce.iter().map(|r| r.1).fold(0.0, f64::max),
        0.0,
        1e-12,
    ));

    // the window is exactly 1/2 at |k| = 3N/2
    let window_err = (1..=32usize)
        .map(|h| {
            let n = 2 * h;
            let k = (3 * h) as i64;
            (vallee_poussin_weight(k, n) - 0.5).abs().max((vallee_poussin_weight(-k, n) - 0.5).abs())
        })
        .fold(0.0, f64::max);
    records.push(CheckRecord::bound("window,3N/2", &"N=2..64", window_err, 0.0, 0.0));

    // F-norm ratio sup under population growth
    let degree = cfg.degree_or(16);
    let grid = BoundaryGrid::new(samples)?;
    let ns = [2usize, 4, 8];
    let mut rng = instance_rng(stream, u64::MAX);
    let couple = random_couple(&mut rng, max_dim, (Exponent::Finite(1.0), Exponent::Infinity))?;
    let families = family_population(derive_seed(stream, 7), population, degree, max_dim, None);
    let half = sn_family_bound_report(&families[..population / 2], &couple, &ns, &grid)?;
    let full = sn_family_bound_report(&families, &couple, &ns, &grid)?;
    let drift = (full.sup_ratio - half.sup_ratio).abs() / half.sup_ratio;
    records.push(CheckRecord::bound(
        format!("stability,{}vs{}", population / 2, population),
        &(&couple, degree, population, samples),
        drift,
        tol,
        0.0,
    ));
    let mut summary = Summary::new();
    summary.insert("sup_ratio_half".into(), half.sup_ratio.into());
    summary.insert("sup_ratio_full".into(), full.sup_ratio.into());
    summary.insert("per_n".into(), serde_json::to_value(&full.per_n)?);
    Ok(Outcome { records, summary })
}

fn lemma3(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(200);
    let samples = cfg.samples_or(512);
    let degree = cfg.degree_or(64);
    let thetas = cfg.thetas_or(&[0.5]);
    let tol = cfg.tolerance_or(0.1);
    let k_max = 128;
    let deltas = [0.3, 0.1, 0.03, 0.01];
    let mut records = Vec::new();
    let mut summary = Summary::new();
    for (c, dim) in [2usize, 3].into_iter().enumerate() {
        let stream = cfg.stream(5 + c as u64);
        let mut rng = instance_rng(stream, 0);
        let proxy = CompactProxy::geometric(HomPolynomial::random(&mut rng, 2, dim, dim)?, 0.3)?;
        let two = Exponent::Finite(2.0);
        let cx = random_couple(&mut rng, dim, (two, two))?;
        let cy = random_couple(&mut rng, dim, (Exponent::Finite(1.0), two))?;
        let families = family_population(derive_seed(stream, 1), population, degree, dim, Some(0.9));
        let p = proxy.polynomial();
        for &theta in &thetas {
            let r = lemma3_diagnostics(&p, &families, &cx, &cy, theta, &deltas, k_max, samples, stream)?;
            let inputs = (&proxy, &cx, &cy, theta, population, degree);
            let name = format!("dim={dim},theta={theta}");
            records.push(CheckRecord::bound(
                format!("{name},tail/head"),
                &inputs,
                r.sup_decay.tail,
                tol * r.sup_decay.head,
                0.0,
            ));
            for (delta, count, budget) in &r.counts {
                records.push(CheckRecord::bound(
                    format!("{name},count,delta={delta}"),
                    &inputs,
                    *count as f64,
                    *budget,
                    0.0,
                ));
            }
            records.push(CheckRecord::heuristic(
                format!("{name},theta tail/head"),
                &inputs,
                r.theta_decay.tail,
                tol * r.theta_decay.head,
                0.0,
            ));
            summary.insert(format!("{name},poly_norm"), r.poly_norm.into());
        }
    }
    Ok(Outcome { records, summary })
}

fn lions_peetre(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(100);
    let thetas = cfg.thetas_or(&[0.3, 0.7]);
    let tol = cfg.tolerance_or(0.1);
    let couples = couples_for(cfg, 3, cfg.max_dim_or(3))?;
    let ts: Vec<f64> = (0..13).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let mut records = Vec::new();
    let mut summary = Summary::new();
    for (c, couple) in couples.iter().enumerate() {
        let stream = cfg.stream(0x1000 + c as u64);
        let xs: Vec<Vec<C64>> = (0..2 * population)
            .map(|i| complex_normal_vec(&mut instance_rng(stream, i as u64), couple.dim()))
            .collect();
        for &theta in &thetas {
            let req = InterpolationRequest::new(couple.clone(), theta)?;
            let sups = xs
                .par_iter()
                .map(|x| -> Result<f64> {
                    let mut best = 0.0f64;
                    for &t in &ts {
                        let lp = lions_peetre_decompose(&req, x, t, OBJECTIVE_TOL)?;
                        best = best.max(lp.constant0).max(lp.constant1);
                    }
                    Ok(best)
                })
                .collect::<Result<Vec<f64>>>()?;
            let small = sups[..population].iter().copied().fold(0.0, f64::max);
            let large = sups.iter().copied().fold(0.0, f64::max);
            let name = format!("couple={c},theta={theta}");
            let inputs = (couple, theta, population, stream);
            records.push(CheckRecord::bound(format!("{name},finite"), &inputs, large, f64::INFINITY, 0.0));
            records.push(CheckRecord::bound(
                format!("{name},stability"),
                &inputs,
                (large - small).abs() / small,
                tol,
                0.0,
            ));
            summary.insert(format!("{name},sup"), large.into());
        }
    }
    Ok(Outcome { records, summary })
}

fn truncation_chain(cfg: &ExperimentConfig) -> Result<Outcome> {
    let max_dim = cfg.max_dim_or(6);
    let thetas = cfg.thetas_or(&[0.25, 0.5, 0.75]);
    let per_dim = cfg.population_or(1);
    let tol = cfg.tolerance_or(1e-3);
    let opts = AscentOptions::default();
    let ends = (Exponent::Finite(1.0), Exponent::Infinity);
    let mut records = Vec::new();
    for dim in 2..=max_dim {
        for kind in ["linear", "diagonal-quadratic"] {
            for i in 0..per_dim {
                let stream = cfg.stream((dim * 1000 + i * 2 + usize::from(kind != "linear")) as u64);
                let mut rng = instance_rng(stream, 0);
                let base = if kind == "linear" {
                    let a: Vec<Vec<C64>> = (0..dim).map(|_| complex_normal_vec(&mut rng, dim)).collect();
                    HomPolynomial::from_polar(SymMultilinearMap::linear(&a)?)
                } else {
                    HomPolynomial::diagonal(2, &complex_normal_vec(&mut rng, dim))?
                };
                let proxy = CompactProxy::geometric(base, 0.3)?;
                let cx = random_couple(&mut rng, dim, ends)?;
                let cy = random_couple(&mut rng, dim, ends)?;
                let grid: Vec<usize> = (0..dim).collect();
                for &theta in &thetas {
                    let r = truncation_chain_check(&proxy, &cx, &cy, theta, &grid, &opts, stream)?;
                    let inputs = (&proxy, &cx, &cy, theta);
                    let name = format!("{kind},dim={dim},i={i},theta={theta}");
                    for row in &r.rows {
                        records.push(
                            CheckRecord::bound(
                                format!("{name},n={}", row.n),
                                &inputs,
                                row.lhs,
                                row.rhs,
                                1e-9 * row.rhs.max(1.0),
                            )
                            .gated_if(row.certified),
                        );
                    }
                    records.push(CheckRecord::bound(format!("{name},lhs decay"), &inputs, r.lhs_decay, tol, 0.0));
                    records.push(CheckRecord::bound(format!("{name},rhs decay"), &inputs, r.rhs_decay, tol, 0.0));
                }
            }
        }
    }
    Ok(Outcome { records, summary: Summary::new() })
}

/// `X0 = ℓ2(s)`, `X1 = ℓ1(s·g)` with `g ≥ 1`: `‖·‖_0 ≤ ‖·‖_1` everywhere.
fn dominated_couple<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Couple> {
    let s0: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..1.0)).collect();
    let s1: Vec<f64> = s0.iter().map(|s| s * log_uniform(rng, 1.0, 4.0)).collect();
    Couple::new(
        WeightedSpace::from_scales(Exponent::Finite(2.0), s0)?,
        WeightedSpace::from_scales(Exponent::Finite(1.0), s1)?,
    )
}

fn later_transfer(cfg: &ExperimentConfig) -> Result<Outcome> {
    let max_dim = cfg.max_dim_or(4);
    let thetas = cfg.thetas_or(&[0.5]);
    let epsilon = cfg.tolerance_or(0.1);
    let opts = TransferOptions { epsilon, test_samples: cfg.population_or(500), ..TransferOptions::default() };
    // image radius of the proxies, a few multiples of ε
    let image_radius = 2.5 * epsilon;
    let mut cases: Vec<(String, CompactProxy, Couple, f64)> = Vec::new();
    let mut rng = instance_rng(cfg.stream(9), 0);
    let zero = HomPolynomial::from_polar(SymMultilinearMap::zero(2, 2, 2)?);
    cases.push(("zero".into(), CompactProxy::geometric(zero, 0.3)?, dominated_couple(&mut rng, 2)?, thetas[0]));
    let a: Vec<Vec<C64>> = (0..2).map(|_| complex_normal_vec(&mut rng, 2)).collect();
    let linear = CompactProxy::geometric(HomPolynomial::from_polar(SymMultilinearMap::linear(&a)?), 0.3)?;
    cases.push(("linear,dim=2".into(), linear, dominated_couple(&mut rng, 2)?, 0.9));
    for dim in 2..=max_dim {
        for &theta in &thetas {
            let base = HomPolynomial::random(&mut rng, 2, dim, dim)?;
            cases.push((
                format!("quadratic,dim={dim}"),
                CompactProxy::geometric(base, 0.3)?,
                dominated_couple(&mut rng, dim)?,
                theta,
            ));
        }
    }
    let mut records = Vec::new();
    let mut summary = Summary::new();
    for (c, (name, proxy, couple, theta)) in cases.into_iter().enumerate() {
        let y = WeightedSpace::unweighted(Exponent::Finite(2.0), proxy.base().codomain_dim())?;
        let stream = cfg.stream(0x2000 + c as u64);
        let norm = estimate_op_norm(&proxy.polynomial(), couple.space0(), &y, &AscentOptions::default(), stream)?.lower;
        let proxy = if norm > 0.0 { proxy.scaled(image_radius / norm) } else { proxy };
        let r = theorem_later_transfer_check(&proxy, &couple, &y, theta, &opts, stream)?;
        let name = format!("{name},theta={theta}");
        let inputs = (&proxy, &couple, theta, epsilon);
        records.push(CheckRecord::bound(format!("{name},coverage"), &inputs, 1.0 - r.inflated.coverage_rate, 0.0, 0.0));
        records.push(CheckRecord::heuristic(
            format!("{name},coverage uninflated"),
            &inputs,
            1.0 - r.uninflated.coverage_rate,
            0.0,
            0.0,
        ));
        summary.insert(
            name,
            serde_json::json!({
                "coverage_rate": r.inflated.coverage_rate,
                "t": r.inflated.t,
                "C_prime_used": r.inflated.c_prime,
                "uninflated_coverage_rate": r.uninflated.coverage_rate,
                "net_size": r.net_size,
                "tail_violations": r.inflated.tail_violations,
                "x1_dominated": r.x1_dominated,
            }),
        );
    }
    Ok(Outcome { records, summary })
}

fn radius_bound(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(50);
    let mmax = cfg.degree_or(32);
    let stream = cfg.stream(10);
    let records = (0..population)
        .into_par_iter()
        .map(|i| -> Result<CheckRecord> {
            let mut rng = instance_rng(stream, i as u64);
            let dim = 1 + i % 2;
            let (ex, ey) = (exponent_pool(rng.random_range(0..6)), exponent_pool(rng.random_range(0..6)));
            let cx = random_couple(&mut rng, dim, ex)?;
            let cy = random_couple(&mut rng, dim, ey)?;
            let theta = rng.random_range(0.05..0.95);
            let rho: Vec<f64> = (0..dim).map(|_| log_uniform(&mut rng, 0.2, 5.0)).collect();
            let c0 = complex_normal_vec(&mut rng, dim);
            let coeffs: Vec<Vec<C64>> =
                (0..=mmax).map(|m| c0.iter().zip(&rho).map(|(c, r)| c * r.powi(-(m as i32))).collect()).collect();
            let xt = InterpolationRequest::new(cx.clone(), theta)?.closed_form_space();
            let yt = InterpolationRequest::new(cy.clone(), theta)?.closed_form_space();
            let norms = |x: &WeightedSpace, y: &WeightedSpace| -> Result<TaylorData> {
                TaylorData::new(
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(m, a)| diagonal_polynomial_norm(a, m, x, y))
                        .collect::<Result<_>>()?,
                )
            };
            let r = radius_bound_check(
                &norms(cx.space0(), cy.space0())?,
                &norms(cx.space1(), cy.space1())?,
                &norms(&xt, &yt)?,
                theta,
            )?;
            // R_θ ≥ bound, stated as bound ≤ R_θ
            let inputs = (&cx, &cy, theta, &rho, &c0, mmax);
            Ok(CheckRecord::bound(format!("instance={i},dim={dim}"), &inputs, r.bound, r.r_theta, 1e-12 * r.bound))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome { records, summary: Summary::new() })
}

fn mho(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(500);
    let degree = cfg.degree_or(8);
    let phases = 64;
    let couples = couples_for(cfg, 3, cfg.max_dim_or(3))?;
    let mut records = Vec::new();
    let mut summary = Summary::new();
    for (c, couple) in couples.iter().enumerate() {
        let stream = cfg.stream(0x3000 + c as u64);
        let dim = couple.dim();
        let name = format!("couple={c}");

        let zero = mho_membership(&LaurentFamily::zero(degree, dim), couple, phases, stream)?;
        let zero_ok = zero.verdict == Verdict::Member && zero.upper == 0.0;
        records.push(CheckRecord::bound(
            format!("{name},zero"),
            &(couple, degree),
            zero.upper + f64::from(u8::from(!zero_ok)),
            0.0,
            0.0,
        ));

        let mut rng = instance_rng(stream, u64::MAX);
        let x = complex_normal_vec(&mut rng, dim);
        let size = couple.space0().norm(&x)?.max(couple.space1().norm(&x)?);
        let half: Vec<C64> = x.iter().map(|z| z * (0.5 / size)).collect();
        let single = mho_membership(&LaurentFamily::constant(&half), couple, phases, stream)?;
        let spread = (single.upper - 0.5).abs().max((single.lower - 0.5).abs());
        let single_ok = single.verdict == Verdict::Member;
        records.push(CheckRecord::bound(
            format!("{name},single"),
            &(couple, &half),
            spread + f64::from(u8::from(!single_ok)),
            0.0,
            IDENTITY_REL,
        ));

        let rows = (0..population)
            .into_par_iter()
            .map(|i| -> Result<(f64, f64, Verdict)> {
                let mut rng = instance_rng(stream, i as u64);
                let mut phi = LaurentFamily::random(&mut rng, degree, dim);
                // spread the population across the membership threshold
                let scale = log_uniform(&mut rng, 1e-3, 1.0);
                for k in -(degree as i64)..=degree as i64 {
                    phi.coefficient_mut(k).iter_mut().for_each(|z| *z *= scale);
                }
                let b = mho_membership(&phi, couple, phases, derive_seed(stream, i as u64))?;
                // nonnegative real coefficients collapse the bracket
                let mut pos = LaurentFamily::zero(degree, dim);
                for (k, v) in phi.terms() {
                    pos.coefficient_mut(k).iter_mut().zip(v).for_each(|(d, s)| *d = C64::new(s.norm(), 0.0));
                }
                let p = mho_membership(&pos, couple, phases, derive_seed(stream, i as u64))?;
                Ok((b.lower - b.upper, (p.upper - p.lower) / p.upper.max(f64::MIN_POSITIVE), b.verdict))
            })
            .collect::<Result<Vec<_>>>()?;
        let inputs = (couple, degree, population, stream);
        records.push(CheckRecord::bound(
            format!("{name},bracket"),
            &inputs,
            rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
            0.0,
            0.0,
        ));
        records.push(CheckRecord::bound(
            format!("{name},nonnegative"),
            &inputs,
            rows.iter().map(|r| r.1).fold(0.0, f64::max),
            0.0,
            IDENTITY_REL,
        ));
        for v in [Verdict::Member, Verdict::Nonmember, Verdict::Undecided] {
            let key = format!("{name},{}", serde_json::to_value(v)?.as_str().unwrap_or_default());
            summary.insert(key, rows.iter().filter(|r| r.2 == v).count().into());
        }
    }
    Ok(Outcome { records, summary })
}

fn three_lines(cfg: &ExperimentConfig) -> Result<Outcome> {
    let population = cfg.population_or(10_000);
    let families = 500;
    let degree = cfg.degree_or(8);
    let couples = couples_for(cfg, 4, cfg.max_dim_or(4))?;
    let mut records = Vec::new();
    let mut summary = Summary::new();
    for (c, couple) in couples.iter().enumerate() {
        let stream = cfg.stream(0x4000 + c as u64);
        let name = format!("couple={c}");
        let worst = (0..population)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut rng = instance_rng(stream, i as u64);
                let theta = rng.random_range(0.0..=1.0);
                let x = complex_normal_vec(&mut rng, couple.dim());
                Ok(interpolation_inequality_check(&InterpolationRequest::new(couple.clone(), theta)?, &x)?.implied_c)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let inputs = (couple, population, stream);
        records.push(CheckRecord::bound(format!("{name},inequality"), &inputs, worst, 1.0, 1e-9));

        let theta = 0.5;
        let pop = family_population(derive_seed(stream, 1), families, degree, couple.dim(), None);
        let sup_at = |n: usize| -> Result<f64> {
            let grid = BoundaryGrid::new(n)?;
            Ok(pop
                .par_iter()
                .map(|phi| three_lines_check(phi, couple, theta, &grid).map(|r| r.implied_c))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max))
        };
        let (coarse, fine) = (sup_at(128)?, sup_at(512)?);
        let inputs = (couple, degree, families, theta, stream);
        records.push(CheckRecord::bound(format!("{name},families finite"), &inputs, fine, f64::INFINITY, 0.0));
        records.push(CheckRecord::bound(format!("{name},grid growth"), &inputs, fine / coarse - 1.0, 0.01, 0.0));
        summary.insert(format!("{name},sup_implied_c"), fine.into());
    }
    Ok(Outcome { records, summary })
}
