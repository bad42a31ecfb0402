//! Run configuration, check suites and the JSON report.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{Cover, LineBundle, C64};
use crate::dynsys::{fixed, System, SystemConfig, Tolerances};
use crate::endo::{chart_report, op_norm};
use crate::error::{Error, Result};
use crate::par::{fmax, Exec};
use crate::rep::{corpus, lift::lift_section, psi_inner_product_defect, rsh, Model, Word};
use crate::sections::{orbit_breaking_test, ElementaryTensor};
use crate::towers::{first_return_time, validate_towers, IntervalRow, TowersDescription};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: SystemConfig,
    #[serde(default)]
    pub bundle: BundleConfig,
    #[serde(rename = "Y")]
    pub y: RegionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atlas: Option<AtlasConfig>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub suites: Vec<Suite>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionConfig {
    Arcs { arcs: Vec<ArcConfig> },
    Cylinders { prefixes: Vec<Vec<u32>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcConfig {
    pub a: String,
    pub b: String,
    #[serde(default = "yes")]
    pub left_closed: bool,
    #[serde(default = "yes")]
    pub right_closed: bool,
}

fn yes() -> bool {
    true
}

/// Open arcs `(a, b)` as decimal strings; `a == b` is the full circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasConfig {
    pub charts: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    pub max_return: u32,
    pub samples: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub eps_alg: f64,
    /// Comparison tolerance as a power of two, `2^-eps_cmp_bits`.
    pub eps_cmp_bits: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_return: crate::dynsys::DEFAULT_MAX_RETURN,
            samples: 200,
            seed: 0,
            precision_bits: 128,
            eps_alg: crate::dynsys::DEFAULT_EPS_ALG,
            eps_cmp_bits: crate::dynsys::DEFAULT_EPS_CMP_BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Towers,
    Bundle,
    Covariance,
    Gauge,
    Psi,
    OrbitBreaking,
    Bdp,
    Lift,
    Rsh,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Towers,
        Suite::Bundle,
        Suite::Covariance,
        Suite::Gauge,
        Suite::Psi,
        Suite::OrbitBreaking,
        Suite::Bdp,
        Suite::Lift,
        Suite::Rsh,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Towers,
    CheckBundle,
    CheckRep,
    Decompose,
    Report,
}

impl Command {
    pub fn suites(self, cfg: &RunConfig) -> Vec<Suite> {
        match self {
            Command::Towers => vec![Suite::Towers],
            Command::CheckBundle => vec![Suite::Bundle],
            Command::CheckRep => vec![Suite::Covariance, Suite::Gauge, Suite::Psi, Suite::OrbitBreaking, Suite::Bdp, Suite::Lift],
            Command::Decompose => vec![Suite::Towers, Suite::Rsh],
            Command::Report if cfg.suites.is_empty() => Suite::ALL.to_vec(),
            Command::Report => {
                let mut s = cfg.suites.clone();
                s.sort();
                s.dedup();
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub emit_intervals: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Command,
    pub config: Option<RunConfig>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub towers: Option<TowersDescription>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<IntervalRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rsh: Option<rsh::Rsh>,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exit code for an error that aborts a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::EmptyRegion | Error::Precondition(_) => 2,
        Error::BoundaryAmbiguous { .. }
        | Error::MaxReturnExceeded { .. }
        | Error::BudgetExceeded { .. }
        | Error::DepthExhausted { .. } => 3,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) => "config",
        Error::EmptyRegion => "empty_region",
        Error::Precondition(_) => "precondition",
        Error::BoundaryAmbiguous { .. } => "boundary_ambiguous",
        Error::MaxReturnExceeded { .. } => "max_return_exceeded",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::DepthExhausted { .. } => "depth_exhausted",
        _ => "computation",
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported schema_version {}", cfg.schema_version)));
    }
    let b = &cfg.budgets;
    if b.max_return == 0 || b.samples == 0 || b.precision_bits == 0 || b.eps_cmp_bits == 0 || b.eps_alg.is_nan() || b.eps_alg <= 0.0 {
        return Err(Error::Config("all budgets must be positive".into()));
    }
    Ok(cfg)
}

/// Everything built from a config before any suite runs.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: Model,
    pub samples: usize,
    pub seed: u64,
}

pub fn setup(cfg: &RunConfig) -> Result<Setup> {
    let b = &cfg.budgets;
    let tol = Tolerances {
        eps_cmp: Tolerances::with_eps_cmp_bits(b.eps_cmp_bits),
        eps_alg: b.eps_alg,
        max_return: b.max_return,
    };
    let sys = match &cfg.system {
        SystemConfig::Rotation { theta, theta_cf, precision_bits } => {
            let t = match (theta, theta_cf) {
                (Some(t), None) => fixed::parse_decimal(t)?,
                (None, Some(cf)) => fixed::from_continued_fraction(cf)?,
                _ => return Err(Error::Config("rotation needs exactly one of theta, theta_cf".into())),
            };
            System::rotation(t, precision_bits.unwrap_or(b.precision_bits), tol)?
        }
        SystemConfig::Odometer { radices, depth } => {
            let depth = match (depth, &cfg.y) {
                (Some(d), _) => *d,
                (None, RegionConfig::Cylinders { prefixes }) => auto_depth(radices, prefixes, b.max_return),
                (None, _) => auto_depth(radices, &[], b.max_return),
            };
            System::odometer(radices, depth, tol)?
        }
    };
    let y = match &cfg.y {
        RegionConfig::Arcs { arcs } if sys.is_circle() => {
            let arcs: Vec<_> = arcs.iter().map(|a| (a.a.clone(), a.b.clone(), a.left_closed, a.right_closed)).collect();
            sys.arcs_from_decimals(&arcs)?
        }
        RegionConfig::Cylinders { prefixes } if !sys.is_circle() => sys.cylinders(prefixes)?,
        _ => return Err(Error::Config("Y does not match the system kind".into())),
    };
    let cover = match (&cfg.atlas, sys.is_circle()) {
        (_, false) => Cover::single(&sys),
        (None, true) => Cover::circle_default(),
        (Some(a), true) => {
            let arcs = a
                .charts
                .iter()
                .map(|(x, y)| Ok((fixed::parse_decimal(x)?, fixed::parse_decimal(y)?)))
                .collect::<Result<Vec<_>>>()?;
            Cover::circle(&arcs)?
        }
    };
    let degree = match (&cfg.bundle, sys.is_circle()) {
        (BundleConfig { degree: Some(_), trivial: true }, _) => {
            return Err(Error::Config("bundle takes either degree or trivial".into()))
        }
        (BundleConfig { degree: Some(d), .. }, _) => *d,
        _ => 0,
    };
    let bundle = if degree == 0 {
        LineBundle::trivial(sys, cover)
    } else if !sys.is_circle() {
        return Err(Error::Config("odometer bundles are trivial".into()));
    } else {
        LineBundle::circle_degree(sys, cover, degree)?
    };
    let model = Model::new(bundle, y)?;
    Ok(Setup { model, samples: b.samples, seed: b.seed })
}

/// Stored digits: the longest prefix of `Y`, enough digits to count to
/// `max_return`, and two guard digits.
fn auto_depth(radices: &[u32], prefixes: &[Vec<u32>], max_return: u32) -> usize {
    let longest = prefixes.iter().map(Vec::len).max().unwrap_or(0);
    let min_radix = radices.iter().copied().min().unwrap_or(2).max(2) as f64;
    longest + (max_return as f64).log(min_radix).ceil() as usize + 2
}

fn check(name: &str, value: f64, threshold: f64, samples: usize) -> Check {
    Check { name: name.into(), value, threshold, passed: value < threshold, samples }
}

/// Runs the suites of a command; errors that make the run meaningless abort it.
pub fn run(cmd: Command, cfg: &RunConfig, opts: RunOptions) -> Report {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.budgets.seed = s;
    }
    let seed = cfg.budgets.seed;
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: cmd,
        config: Some(cfg.clone()),
        provenance: Provenance { tool: "orbitrsh", version: env!("CARGO_PKG_VERSION"), seed },
        towers: None,
        intervals: None,
        rsh: None,
        suites: Vec::new(),
        passed: false,
        error: None,
        exit_code: 0,
    };
    let exec = Exec::from_jobs(opts.jobs.unwrap_or(1));
    let outcome = crate::par::with_jobs(opts.jobs.unwrap_or(1), || run_inner(cmd, &cfg, opts, exec, &mut report));
    match outcome {
        Ok(()) => {
            report.passed = report.suites.iter().all(|s| s.passed);
            report.exit_code = if report.passed { 0 } else { 1 };
        }
        Err(e) => {
            report.exit_code = exit_code(&e);
            report.error = Some(ErrorReport { kind: error_kind(&e), message: e.to_string() });
        }
    }
    report
}

/// Report for a config file that could not be read or parsed.
pub fn config_failure(cmd: Command, e: &Error) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: cmd,
        config: None,
        provenance: Provenance { tool: "orbitrsh", version: env!("CARGO_PKG_VERSION"), seed: 0 },
        towers: None,
        intervals: None,
        rsh: None,
        suites: Vec::new(),
        passed: false,
        error: Some(ErrorReport { kind: "config", message: e.to_string() }),
        exit_code: 2,
    }
}

fn run_inner(cmd: Command, cfg: &RunConfig, opts: RunOptions, exec: Exec, report: &mut Report) -> Result<()> {
    let setup = setup(cfg)?;
    let m = &setup.model;
    report.towers = Some(m.towers.describe(m.sys()));
    if opts.emit_intervals {
        report.intervals = Some(m.towers.intervals(m.sys())?);
    }
    for suite in cmd.suites(cfg) {
        let res = run_suite(suite, &setup, exec, report);
        match res {
            Ok(checks) => {
                let passed = checks.iter().all(|c| c.passed);
                report.suites.push(SuiteResult { suite, passed, checks, error: None });
            }
            Err(e) if exit_code(&e) == 1 => {
                report.suites.push(SuiteResult { suite, passed: false, checks: Vec::new(), error: Some(e.to_string()) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn suite_seed(base: u64, suite: Suite) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite as u64 + 1)
}

fn run_suite(suite: Suite, s: &Setup, exec: Exec, report: &mut Report) -> Result<Vec<Check>> {
    let seed = suite_seed(s.seed, suite);
    match suite {
        Suite::Towers => towers_suite(&s.model, s.samples, seed),
        Suite::Bundle => bundle_suite(&s.model, s.samples, seed, exec),
        Suite::Covariance => covariance_suite(&s.model, s.samples, seed, exec),
        Suite::Gauge => gauge_suite(&s.model, s.samples, seed, exec),
        Suite::Psi => psi_suite(&s.model, s.samples, seed, exec),
        Suite::OrbitBreaking => orbit_breaking_suite(&s.model, s.samples, seed, exec),
        Suite::Bdp => bdp_suite(&s.model, s.samples, seed, exec),
        Suite::Lift => lift_suite(&s.model, s.samples, seed, exec),
        Suite::Rsh => {
            let words = corpus::random_words(&s.model, 12, seed);
            let r = rsh::assemble_rsh(&s.model, &words, 8, seed, exec)?;
            let eps = s.model.sys().tol.eps_alg;
            let c = check("pullback_residual", r.max_pullback_residual, eps, r.stages.iter().map(|t| t.boundary_points).sum());
            report.rsh = Some(r);
            Ok(vec![c])
        }
    }
}

/// Covering identity, tower validation, and brute-force return times on `Y`.
pub fn towers_suite(m: &Model, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let sys = m.sys();
    let v = validate_towers(sys, &m.y, &m.towers)?;
    let exact_limit = 2f64.powi(-60);
    let cov = m.towers.covering_residual.to_f64().unwrap_or(f64::INFINITY);
    let structural = [v.bases_in_y, v.returns_in_y, v.prefix_unions_closed].iter().filter(|b| !**b).count();
    let pts = sys.sample(&m.y, samples, seed)?;
    let mut mismatches = 0usize;
    for p in &pts {
        let k = m.towers.tower_of(sys, p)?.ok_or(Error::EmptyRegion)?;
        if first_return_time(sys, &m.y, p)? != m.towers.r(k)? {
            mismatches += 1;
        }
    }
    Ok(vec![
        check("covering_residual", cov, exact_limit, m.towers.K()),
        check("disjointness_violation", v.disjointness_violation, exact_limit, m.towers.K()),
        check("partition_residual", v.partition_residual, exact_limit, m.towers.K()),
        check("structural_failures", structural as f64, 0.5, 3),
        check("return_time_mismatches", mismatches as f64, 0.5, pts.len()),
    ])
}

/// Cocycle identities, and the chart-change law and diagonal invariance of
/// word images on overlaps.
pub fn bundle_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let coc = m.bundle.cocycle_check(samples, seed, exec)?;
    let words = corpus::random_words(m, 6, seed);
    let mut law: f64 = 0.0;
    let mut diag: f64 = 0.0;
    let mut overlap = 0usize;
    for k in 1..=m.towers_k() {
        let pts = m.stage_points(k, samples, seed.wrapping_add(k as u64))?;
        for w in &words {
            let r = chart_report(&m.bundle, &m.word_field(w, k)?, &pts, exec)?;
            law = fmax(law, r.chart_change_residual);
            diag = fmax(diag, r.diagonal_residual);
            overlap += r.overlap_samples;
        }
    }
    Ok(vec![
        check("cocycle_violation", coc.max_violation, 1e-12, coc.samples),
        check("chart_change_residual", law, eps, overlap),
        check("diagonal_invariance", diag, eps, overlap),
    ])
}

pub fn covariance_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let fns = corpus::functions();
    let mut worst = [0.0f64; 4];
    let mut count = 0;
    for (i, (xi, eta)) in corpus::generator_pairs(m).iter().enumerate() {
        let f = &fns[i % fns.len()];
        let r = m.covariance_suite(xi, eta, f, samples, seed.wrapping_add(i as u64), exec)?;
        for (w, v) in worst.iter_mut().zip([r.inner, r.left_action, r.right_action, r.left_inner]) {
            *w = fmax(*w, v);
        }
        count += r.samples;
    }
    Ok(vec![
        check("inner_product", worst[0], eps, count),
        check("left_action", worst[1], eps, count),
        check("right_action", worst[2], eps, count),
        check("left_inner_product", worst[3], eps, count),
    ])
}

/// Gauge conjugation for homogeneous words of degree −2..3 at 16 roots of
/// unity, and exact vanishing once the degree reaches `r_k`.
pub fn gauge_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roots: Vec<C64> = (0..16).map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 16.0)).collect();
    let words: Vec<Word> = (-2..=3).flat_map(|d| [corpus::homogeneous_word(m, d, &mut rng), corpus::homogeneous_word(m, d, &mut rng)]).collect();
    let mut dev: f64 = 0.0;
    let mut high: f64 = 0.0;
    let mut count = 0;
    let mut high_count = 0;
    for k in 1..=m.towers_k() {
        let r = m.r(k)? as i64;
        let pts = m.stage_points(k, samples.min(100), rng.random())?;
        let jobs: Vec<(usize, usize)> = (0..words.len()).flat_map(|w| (0..pts.len()).map(move |p| (w, p))).collect();
        let rows = exec.try_map(&jobs, |&(w, p)| -> Result<(f64, f64)> {
            let u = m.tuple(k, &pts[p])?;
            let mut d: f64 = 0.0;
            for z in &roots {
                d = fmax(d, m.gauge_check(&words[w], *z, &pts[p], k, &u)?);
            }
            let deg = words[w].degree().ok_or(Error::InhomogeneousWord)?;
            let h = if deg.abs() >= r { op_norm(&m.evaluate_word(&words[w], &pts[p], k, &u)?) } else { 0.0 };
            Ok((d, h))
        })?;
        count += rows.len();
        high_count += jobs.iter().filter(|(w, _)| words[*w].degree().is_some_and(|d| d.abs() >= r)).count();
        for (d, h) in rows {
            dev = fmax(dev, d);
            high = fmax(high, h);
        }
    }
    Ok(vec![
        check("gauge_deviation", dev, eps, count * roots.len()),
        Check { name: "high_degree_norm".into(), value: high, threshold: 0.0, passed: high == 0.0, samples: high_count },
    ])
}

/// `⟨ψ(s), ψ(t)⟩` against the iterated contraction for tensor lengths 1..=3.
pub fn psi_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = corpus::raw_generators(m);
    let pts = corpus::full_points(m, samples, rng.random())?;
    let mut out = Vec::new();
    for len in 1..=3usize {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let pick = |rng: &mut ChaCha8Rng| -> Result<ElementaryTensor> {
                ElementaryTensor::product((0..len).map(|_| raw[rng.random_range(0..raw.len())].clone()).collect())
            };
            let (s, t) = (pick(&mut rng)?, pick(&mut rng)?);
            worst = fmax(worst, psi_inner_product_defect(&m.bundle, &s, &t, &pts, exec)?);
        }
        out.push(check(&format!("psi_defect_m{len}"), worst, eps, pts.len() * 3));
    }
    Ok(out)
}

/// Projected generators and their products vanish on the backward orbit of `Y`.
pub fn orbit_breaking_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let g = corpus::generators(m);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for len in 1..=2usize {
        for (i, s) in g.iter().enumerate() {
            let t = ElementaryTensor::product(vec![s.clone(); len])?;
            let r = orbit_breaking_test(&m.bundle, &t, &m.y, samples, seed.wrapping_add(i as u64), exec)?;
            worst = fmax(worst, r.max_residual);
            count += r.samples;
        }
    }
    Ok(vec![check("orbit_breaking_residual", worst, eps, count)])
}

/// Boundary decomposition at every resolvable glue point.
pub fn bdp_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let words = corpus::random_words(m, 50, seed);
    let mut block: f64 = 0.0;
    let mut off: f64 = 0.0;
    let mut count = 0;
    for k in 1..=m.towers_k() {
        let pts = m.towers.glue_points(m.sys(), k, samples.clamp(1, 8), seed)?;
        let jobs: Vec<(usize, usize)> = (0..words.len()).flat_map(|w| (0..pts.len()).map(move |p| (w, p))).collect();
        let rows = exec.try_map(&jobs, |&(w, p)| m.boundary_decomposition_check(&words[w], k, &pts[p]))?;
        count += rows.len();
        for r in rows {
            block = fmax(block, r.block_residual);
            off = fmax(off, r.offblock);
        }
    }
    Ok(vec![check("block_residual", block, eps, count), check("offblock_mass", off, eps, count)])
}

/// Lifts 20 seeded diagonal and subdiagonal targets and evaluates them back.
pub fn lift_suite(m: &Model, samples: usize, seed: u64, exec: Exec) -> Result<Vec<Check>> {
    let eps = m.sys().tol.eps_alg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round: f64 = 0.0;
    let mut earlier: f64 = 0.0;
    let mut count = 0;
    let n = 20;
    for i in 0..n {
        let k = 1 + i % m.towers_k();
        let r = m.r(k)?;
        let deg = rng.random_range(0..r);
        let target = corpus::random_target(m, k, deg, rng.random())?;
        let lift = lift_section(m, k, &target, deg, samples.min(100), rng.random(), exec)?;
        round = fmax(round, lift.report.round_trip);
        earlier = fmax(earlier, lift.report.earlier_stages);
        count += lift.report.samples;
    }
    Ok(vec![check("round_trip", round, eps, count), check("earlier_stages", earlier, eps, count)])
}
