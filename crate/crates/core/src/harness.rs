//! Monte-Carlo coverage experiments, relative-bias diagnostics, sparse-regime
//! pivot checks, the design-ignored conditional experiment and the real-data
//! workflow, with CSV and aligned-table output.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::asymptotics::{clustering_asymptotics, inclusion_probability};
use crate::counting::{count_estimated, count_population, small_counts_estimated, small_counts_population, SmallCounts};
use crate::error::{Error, Result};
use crate::estimation::{estimate, naive_mle_pi, Scenario};
use crate::graph::{BitSet, PopulationGraph};
use crate::inference::{normal_cdf, pi_clustering_with, pi_subgraph, PredictionInterval};
use crate::pattern::{MotifKind, Pattern};
use crate::rng;
use crate::sampling::{bernoulli_select, SampleMask, SampleView, Scheme};
use crate::sbm::{generate, materialize_sparse, SbmModel, SparseSbmSpec};
use crate::sparse::{c_of_h, sparse_variance};

/// A quantity whose population value is predicted.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// Density S_N(H)/N^R of a motif.
    Motif(Pattern),
    /// Global clustering coefficient.
    Clustering,
}

impl Target {
    pub fn name(&self) -> String {
        match self {
            Target::Motif(h) => h.name().to_string(),
            Target::Clustering => "clustering".to_string(),
        }
    }

    /// `clustering`, a motif name (`edge`, `star:4`, ...) or `file:PATH`.
    pub fn parse(s: &str) -> Result<Target> {
        let s = s.trim();
        if s == "clustering" {
            return Ok(Target::Clustering);
        }
        if let Some(path) = s.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)?;
            return Ok(Target::Motif(Pattern::parse_text(&text)?));
        }
        Ok(Target::Motif(Pattern::canonical(MotifKind::from_str(s)?)?))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses "a,b;c,d" into a square matrix (rows separated by `;`).
pub fn parse_matrix(s: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(parse_list)
        .collect::<Result<_>>()?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::Config(format!("matrix `{s}` is not square")));
    }
    Ok(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{x}` is not a number")))
        })
        .collect()
}

fn format_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn format_matrix(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| format_list(&m.row(i).iter().copied().collect::<Vec<_>>()))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

/// Settings shared by the Monte-Carlo experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub ps: Vec<f64>,
    pub reps: usize,
    pub schemes: Vec<Scheme>,
    pub scenarios: Vec<Scenario>,
    pub level: f64,
    pub pi: DMatrix<f64>,
    pub lambda: Vec<f64>,
    pub seed: u64,
    pub targets: Vec<Target>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let model = SbmModel::simulation_default();
        ExperimentConfig {
            n: 2000,
            ps: vec![0.1],
            reps: 500,
            schemes: Scheme::ALL.to_vec(),
            scenarios: vec![Scenario::C1],
            level: 0.95,
            pi: model.pi().clone(),
            lambda: vec![0.25; 4],
            seed: 1,
            targets: ["edge", "wedge", "triangle", "clustering"]
                .iter()
                .map(|t| Target::parse(t).expect("built-in target"))
                .collect(),
        }
    }
}

impl ExperimentConfig {
    /// Applies one `key=value` setting. Keys: n, p, reps, scheme, scenario,
    /// level, pi, lambda, seed, targets (alias motif). List values are
    /// comma-separated; `pi` rows are separated by `;`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "n" => self.n = parse_num(key, value)?,
            "p" | "ps" => self.ps = parse_list(value)?,
            "reps" | "m" => self.reps = parse_num(key, value)?,
            "scheme" | "schemes" => {
                self.schemes = value.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?
            }
            "scenario" | "scenarios" => {
                self.scenarios = value.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?
            }
            "level" => self.level = parse_num(key, value)?,
            "pi" => self.pi = parse_matrix(value)?,
            "lambda" => self.lambda = parse_list(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "targets" | "motif" | "motifs" => {
                self.targets = value.split(',').map(Target::parse).collect::<Result<_>>()?
            }
            other => return Err(Error::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn model(&self) -> Result<SbmModel> {
        SbmModel::with_proportions(self.pi.clone(), self.lambda.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.ps.is_empty() {
            return Err(Error::Config("empty p grid".into()));
        }
        if let Some(&p) = self.ps.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::InvalidProbability(p));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidLevel(self.level));
        }
        if self.schemes.is_empty() || self.scenarios.is_empty() || self.targets.is_empty() {
            return Err(Error::Config("schemes, scenarios and targets must be nonempty".into()));
        }
        for t in &self.targets {
            if let Target::Motif(h) = t {
                if h.r() > self.n {
                    return Err(Error::PatternLargerThanGraph {
                        pattern: h.r(),
                        graph: self.n,
                    });
                }
            }
        }
        self.model().map(|_| ())
    }

    /// `key=value` lines describing the configuration.
    pub fn echo(&self) -> Vec<String> {
        vec![
            format!("n={}", self.n),
            format!("p={}", format_list(&self.ps)),
            format!("reps={}", self.reps),
            format!(
                "scheme={}",
                self.schemes.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")
            ),
            format!(
                "scenario={}",
                self.scenarios.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")
            ),
            format!("level={}", self.level),
            format!("pi={}", format_matrix(&self.pi)),
            format!("lambda={}", format_list(&self.lambda)),
            format!("seed={}", self.seed),
            format!(
                "targets={}",
                self.targets.iter().map(|t| t.name()).collect::<Vec<_>>().join(",")
            ),
        ]
    }
}

/// Interval outcome of one replicate for one target.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalOutcome {
    pub lower: f64,
    pub upper: f64,
    pub covered: bool,
    /// Coverage of the same interval without the bias shift.
    pub uncorrected_covered: bool,
    /// Bias term from the plug-in parameters.
    pub bias_used: f64,
    /// Bias term from the true Π and class proportions.
    pub bias_true: f64,
    pub k_hat: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub m: usize,
    pub p: f64,
    pub scheme: Scheme,
    pub scenario: Scenario,
    pub target: String,
    pub truth: f64,
    pub estimate: f64,
    /// The interval, or the reason the plug-in failed.
    pub outcome: std::result::Result<IntervalOutcome, String>,
}

/// Aggregate over replicates for one (p, scheme, scenario, target).
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageRow {
    pub target: String,
    pub scheme: Scheme,
    pub scenario: Scenario,
    pub p: f64,
    /// Fraction of successful replicates whose interval covers the truth.
    pub coverage: f64,
    pub avg_length: f64,
    /// Replicates with an interval.
    pub m_used: usize,
    /// Replicates whose plug-in failed.
    pub failures: usize,
    /// Mean of point estimate − truth over all replicates.
    pub mean_error: f64,
    /// Monte-Carlo standard error of `mean_error`.
    pub se_error: f64,
    pub mean_bias_used: f64,
    pub bias_true: f64,
    pub uncorrected_coverage: f64,
    /// Average relative bias of the bias term in percent (ego clustering only).
    pub arb_percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub config: ExperimentConfig,
    pub rows: Vec<CoverageRow>,
    pub records: Vec<ReplicateRecord>,
}

/// Runs the coverage experiment. Replicate m draws a fresh population with
/// seed `replicate_seed(seed, m)` and a mask from the mask domain of the same
/// seed; every p, scheme and scenario is evaluated on that pair. Plug-in
/// failures are recorded and excluded from coverage.
pub fn run_coverage(config: &ExperimentConfig) -> Result<CoverageReport> {
    config.validate()?;
    let model = config.model()?;
    let per_rep: Vec<Vec<ReplicateRecord>> = (0..config.reps)
        .into_par_iter()
        .map(|m| run_replicate(config, &model, m))
        .collect::<Result<_>>()?;
    let records: Vec<ReplicateRecord> = per_rep.into_iter().flatten().collect();
    let mut rows = Vec::new();
    for &p in &config.ps {
        for &scheme in &config.schemes {
            for &scenario in &config.scenarios {
                for target in &config.targets {
                    let name = target.name();
                    let sel: Vec<&ReplicateRecord> = records
                        .iter()
                        .filter(|r| r.p == p && r.scheme == scheme && r.scenario == scenario && r.target == name)
                        .collect();
                    rows.push(aggregate(&name, p, scheme, scenario, &sel));
                }
            }
        }
    }
    Ok(CoverageReport {
        config: config.clone(),
        rows,
        records,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn aggregate(target: &str, p: f64, scheme: Scheme, scenario: Scenario, sel: &[&ReplicateRecord]) -> CoverageRow {
    let ok: Vec<&IntervalOutcome> = sel.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let errors: Vec<f64> = sel.iter().map(|r| r.estimate - r.truth).collect();
    let mean_error = mean(errors.iter().copied());
    let se_error = if errors.len() > 1 {
        let var = errors.iter().map(|e| (e - mean_error).powi(2)).sum::<f64>() / (errors.len() - 1) as f64;
        (var / errors.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    let bias_true = ok.first().map_or(f64::NAN, |o| o.bias_true);
    let arb_percent = (scheme == Scheme::Ego && target == "clustering" && !ok.is_empty()).then(|| {
        100.0 * mean(ok.iter().map(|o| (o.bias_used - o.bias_true).abs() / o.bias_true.abs()))
    });
    CoverageRow {
        target: target.to_string(),
        scheme,
        scenario,
        p,
        coverage: mean(ok.iter().map(|o| o.covered as u8 as f64)),
        avg_length: mean(ok.iter().map(|o| o.upper - o.lower)),
        m_used: ok.len(),
        failures: sel.len() - ok.len(),
        mean_error,
        se_error,
        mean_bias_used: mean(ok.iter().map(|o| o.bias_used)),
        bias_true,
        uncorrected_coverage: mean(ok.iter().map(|o| o.uncorrected_covered as u8 as f64)),
        arb_percent,
    }
}

fn run_replicate(config: &ExperimentConfig, model: &SbmModel, m: usize) -> Result<Vec<ReplicateRecord>> {
    let n = config.n;
    let seed = rng::replicate_seed(config.seed, m as u64);
    let g = generate(model, n, seed)?;
    let lambda_true = g.class_proportions();
    let needs_small = config
        .targets
        .iter()
        .any(|t| matches!(t, Target::Clustering) || matches!(t, Target::Motif(h) if h.small_kind().is_some()));
    let pop_small = needs_small.then(|| small_counts_population(&g));
    let truths: Vec<f64> = config
        .targets
        .iter()
        .map(|t| target_value(t, &g, pop_small.as_ref(), None))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for &p in &config.ps {
        let mask = bernoulli_select(n, p, seed)?;
        for &scheme in &config.schemes {
            let view = SampleView::new(&g, &mask, scheme)?;
            let est_small = needs_small.then(|| small_counts_estimated(&view));
            let estimates: Vec<f64> = config
                .targets
                .iter()
                .map(|t| target_value(t, &g, est_small.as_ref(), Some(&view)))
                .collect::<Result<_>>()?;
            let bias_true = if config.targets.contains(&Target::Clustering) {
                clustering_asymptotics(model.pi(), &lambda_true, p, scheme)
                    .map(|c| c.bias)
                    .unwrap_or(f64::NAN)
            } else {
                0.0
            };
            for &scenario in &config.scenarios {
                let params = estimate(&view, scenario, model.pi(), seed);
                for (ti, target) in config.targets.iter().enumerate() {
                    let outcome = params
                        .as_ref()
                        .map_err(|e| e.to_string())
                        .and_then(|est| {
                            let pi = est.pi_complete().map_err(|e| e.to_string())?;
                            interval_for(target, estimates[ti], scheme, pi, &est.lambda_hat, p, n, config.level)
                                .map_err(|e| e.to_string())
                                .map(|(iv, uncorrected)| IntervalOutcome {
                                    lower: iv.lower,
                                    upper: iv.upper,
                                    covered: iv.covers(truths[ti]),
                                    uncorrected_covered: uncorrected.covers(truths[ti]),
                                    bias_used: iv.bias,
                                    bias_true: if matches!(target, Target::Clustering) { bias_true } else { 0.0 },
                                    k_hat: est.k_hat,
                                })
                        });
                    out.push(ReplicateRecord {
                        m,
                        p,
                        scheme,
                        scenario,
                        target: target.name(),
                        truth: truths[ti],
                        estimate: point_estimate(target, estimates[ti], scheme, p)?,
                        outcome,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Population value (no view) or raw sample statistic (with view): motif
/// count divided by N^R, or the clustering coefficient.
fn target_value(t: &Target, g: &PopulationGraph, small: Option<&SmallCounts>, view: Option<&SampleView<'_>>) -> Result<f64> {
    let n = g.n();
    match t {
        Target::Clustering => Ok(small.expect("small counts computed").clustering()),
        Target::Motif(h) => {
            let value = match (h.small_kind(), small) {
                (Some(kind), Some(s)) => s.get(kind),
                _ => match view {
                    None => count_population(g, h)?.value,
                    Some(v) => count_estimated(v, h)?.value,
                },
            };
            Ok(value as f64 / (n as f64).powi(h.r() as i32))
        }
    }
}

/// Ŝ/(f N^R) for motifs, Γ̂ for clustering.
fn point_estimate(t: &Target, stat: f64, scheme: Scheme, p: f64) -> Result<f64> {
    match t {
        Target::Motif(h) => Ok(stat / inclusion_probability(h, scheme, p)?),
        Target::Clustering => Ok(stat),
    }
}

/// Interval for the target from the raw sample statistic: for motifs the
/// statistic is Ŝ/N^R, for clustering Γ̂. The second interval omits the bias.
#[allow(clippy::too_many_arguments)]
fn interval_for(
    target: &Target,
    stat: f64,
    scheme: Scheme,
    pi: &DMatrix<f64>,
    lambda: &[f64],
    p: f64,
    n: usize,
    level: f64,
) -> Result<(PredictionInterval, PredictionInterval)> {
    match target {
        Target::Motif(h) => {
            let scale = (n as f64).powi(h.r() as i32);
            let iv = pi_subgraph(stat * scale, h, scheme, pi, lambda, p, n, level)?.to_density(n, h.r());
            Ok((iv.clone(), iv))
        }
        Target::Clustering => {
            let ca = clustering_asymptotics(pi, lambda, p, scheme)?;
            let tau = ca.tau2.sqrt();
            Ok((
                pi_clustering_with(stat, tau, ca.bias, n, scheme, level)?,
                pi_clustering_with(stat, tau, 0.0, n, scheme, level)?,
            ))
        }
    }
}

/// Average relative bias of the estimated ego clustering bias term.
#[derive(Clone, Debug, PartialEq)]
pub struct ArbRow {
    pub p: f64,
    pub scenario: Scenario,
    pub bias_true: f64,
    pub arb_percent: f64,
    pub m_used: usize,
    pub failures: usize,
}

/// (1/M) Σ |b̂ − b(p)| / |b(p)| in percent, for each p and scenario, under
/// ego sampling with the clustering target.
pub fn arb_bias(config: &ExperimentConfig) -> Result<Vec<ArbRow>> {
    let mut cfg = config.clone();
    cfg.schemes = vec![Scheme::Ego];
    cfg.targets = vec![Target::Clustering];
    let model = cfg.model()?;
    for &p in &cfg.ps {
        let lambda = model.labels_for(cfg.n).map(|l| {
            let mut c = vec![0.0; model.k()];
            for x in l {
                c[x] += 1.0 / cfg.n as f64;
            }
            c
        })?;
        let b = clustering_asymptotics(model.pi(), &lambda, p, Scheme::Ego)?.bias;
        if b == 0.0 {
            return Err(Error::ZeroTrueBias);
        }
    }
    let report = run_coverage(&cfg)?;
    Ok(report
        .rows
        .iter()
        .map(|r| ArbRow {
            p: r.p,
            scenario: r.scenario,
            bias_true: r.bias_true,
            arb_percent: r.arb_percent.unwrap_or(f64::NAN),
            m_used: r.m_used,
            failures: r.failures,
        })
        .collect())
}

/// Settings of the sparse-regime pivot experiment (induced sampling).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCltConfig {
    pub spec: SparseSbmSpec,
    pub n: usize,
    pub p: f64,
    pub pattern: Pattern,
    pub reps: usize,
    pub seed: u64,
    pub bins: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCltSummary {
    pub beta: f64,
    pub c_h: f64,
    /// Set when β lies outside (0, c(H)).
    pub warning: Option<String>,
    pub tau2: f64,
    /// Exponent e of the scaling N^e applied to Ŝ/p^R − S.
    pub exponent: f64,
    pub pivots: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub ks: f64,
    /// `(lower edge, upper edge, count)` over [−4, 4]; outliers go to the end bins.
    pub histogram: Vec<(f64, f64, usize)>,
}

/// Standardized pivots N^{−R+1/2+Tβ}(Ŝ/p^R − S)/τ over independent replicates.
pub fn run_sparse_clt(config: &SparseCltConfig) -> Result<SparseCltSummary> {
    if config.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let h = &config.pattern;
    let beta = config.spec.beta();
    let c_h = c_of_h(h);
    let warning = (beta > 0.0 && beta >= c_h)
        .then(|| format!("beta = {beta} is not below c(H) = {c_h}; the normal limit is not guaranteed"));
    let model = materialize_sparse(&config.spec, config.n)?;
    let labels = model.labels_for(config.n)?;
    let mut lambda = vec![0.0; model.k()];
    for l in labels {
        lambda[l] += 1.0 / config.n as f64;
    }
    let tau2 = sparse_variance(h, config.spec.c(), &lambda, config.p)?.sigma2;
    if !(tau2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let r = h.r() as f64;
    let exponent = -r + 0.5 + h.t() as f64 * beta;
    let scale = (config.n as f64).powf(exponent) / tau2.sqrt();
    let f = config.p.powi(h.r() as i32);
    let pivots: Vec<f64> = (0..config.reps)
        .into_par_iter()
        .map(|m| {
            let seed = rng::replicate_seed(config.seed, m as u64);
            let g = generate(&model, config.n, seed)?;
            let mask = bernoulli_select(config.n, config.p, seed)?;
            let view = SampleView::new(&g, &mask, Scheme::Induced)?;
            let s = count_population(&g, h)?.value as f64;
            let shat = count_estimated(&view, h)?.value as f64;
            Ok((shat / f - s) * scale)
        })
        .collect::<Result<_>>()?;
    let mean_v = mean(pivots.iter().copied());
    let variance = if pivots.len() > 1 {
        pivots.iter().map(|x| (x - mean_v).powi(2)).sum::<f64>() / (pivots.len() - 1) as f64
    } else {
        f64::NAN
    };
    Ok(SparseCltSummary {
        beta,
        c_h,
        warning,
        tau2,
        exponent,
        ks: ks_distance(&pivots),
        histogram: histogram(&pivots, config.bins.max(1), -4.0, 4.0),
        pivots,
        mean: mean_v,
        variance,
    })
}

/// Kolmogorov–Smirnov distance between the empirical distribution of `xs`
/// and the standard normal.
pub fn ks_distance(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = normal_cdf(x);
            ((i + 1) as f64 / m - c).max(c - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// Equal-width bins on [lo, hi]; values outside are counted in the end bins.
pub fn histogram(xs: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<(f64, f64, usize)> {
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let b = ((x - lo) / w).floor();
        let b = if b.is_nan() { 0 } else { b.clamp(0.0, (bins - 1) as f64) as usize };
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * w, lo + (i + 1) as f64 * w, c))
        .collect()
}

/// Monte-Carlo summary of the design-ignored conditional experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalDemo {
    /// Mean of V_N/N².
    pub mean: f64,
    /// Monte-Carlo standard error of `mean`.
    pub mean_se: f64,
    /// Sample variance of V_N/N.
    pub variance: f64,
}

/// Two classes alternating by index (even 0-based indices in class 0);
/// the first ⌊Na/2⌋ class-0 vertices are selected and held fixed while the
/// population is redrawn. Returns moments of V_N = Ŝ^[1](K₂)/p² − S(K₂).
pub fn conditional_demo_mc(a: f64, p: f64, pi: &DMatrix<f64>, n: usize, reps: usize, seed: u64) -> Result<ConditionalDemo> {
    if pi.nrows() != 2 {
        return Err(Error::DimensionMismatch("conditional demo needs a 2×2 Π".into()));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Config(format!("a = {a} outside (0,1)")));
    }
    if reps < 2 {
        return Err(Error::Config("reps must be at least 2".into()));
    }
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let model = SbmModel::with_labels(pi.clone(), labels)?;
    let m_n = (n as f64 * a / 2.0).floor() as usize;
    let mask = SampleMask::from_bits(BitSet::from_indices(n, (0..m_n).map(|j| 2 * j)), p)?;
    let edge = Pattern::canonical(MotifKind::Edge)?;
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|m| {
            let g = generate(&model, n, rng::replicate_seed(seed, m as u64))?;
            let view = SampleView::new(&g, &mask, Scheme::Induced)?;
            let s = count_population(&g, &edge)?.value as f64;
            let shat = count_estimated(&view, &edge)?.value as f64;
            Ok(shat / (p * p) - s)
        })
        .collect::<Result<_>>()?;
    let nf = n as f64;
    let scaled: Vec<f64> = values.iter().map(|v| v / (nf * nf)).collect();
    let mu = mean(scaled.iter().copied());
    let var_scaled = scaled.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (reps - 1) as f64;
    Ok(ConditionalDemo {
        mean: mu,
        mean_se: (var_scaled / reps as f64).sqrt(),
        variance: var_scaled * nf * nf,
    })
}

/// One row of the real-data report.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRow {
    pub target: String,
    pub scheme: Scheme,
    pub truth: f64,
    /// Ŝ/(f N^R) for densities, Γ̂ for clustering.
    pub estimate: f64,
    pub interval: std::result::Result<PredictionInterval, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealReport {
    pub n: usize,
    pub k: usize,
    pub class_sizes: Vec<usize>,
    pub mean_degree: f64,
    pub edge_density: f64,
    pub clustering: f64,
    /// Class-pair edge densities of the full graph.
    pub pi: DMatrix<f64>,
    pub lambda: Vec<f64>,
    pub selected: usize,
    pub rows: Vec<RealRow>,
}

/// Known-parameter analysis of an observed population: Π and λ from the
/// labels of all vertices, one Bernoulli(p) mask, and intervals for the
/// edge, wedge and triangle densities and the clustering coefficient.
pub fn analyze_real(g: &PopulationGraph, p: f64, schemes: &[Scheme], level: f64, seed: u64) -> Result<RealReport> {
    let n = g.n();
    let full = SampleMask::from_bits(BitSet::full(n), p)?;
    let labels: Vec<Option<usize>> = g.labels().iter().map(|&l| Some(l)).collect();
    let pi = naive_mle_pi(&SampleView::new(g, &full, Scheme::Induced)?, &labels, g.k())?;
    let pi = pi.complete()?.clone();
    let lambda = g.class_proportions();
    let mut class_sizes = vec![0; g.k()];
    for &l in g.labels() {
        class_sizes[l] += 1;
    }
    let pop = small_counts_population(g);
    let mask = bernoulli_select(n, p, seed)?;
    let targets: Vec<Target> = ["edge", "wedge", "triangle", "clustering"]
        .iter()
        .map(|t| Target::parse(t))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &scheme in schemes {
        let view = SampleView::new(g, &mask, scheme)?;
        let est = small_counts_estimated(&view);
        for t in &targets {
            let truth = target_value(t, g, Some(&pop), None)?;
            let stat = target_value(t, g, Some(&est), Some(&view))?;
            let estimate = point_estimate(t, stat, scheme, p)?;
            let interval = interval_for(t, stat, scheme, &pi, &lambda, p, n, level)
                .map(|(iv, _)| iv)
                .map_err(|e| e.to_string());
            rows.push(RealRow {
                target: t.name(),
                scheme,
                truth,
                estimate,
                interval,
            });
        }
    }
    Ok(RealReport {
        n,
        k: g.k(),
        class_sizes,
        mean_degree: pop.edge as f64 / n as f64,
        edge_density: pop.edge as f64 / (n as f64 * n as f64),
        clustering: pop.clustering(),
        pi,
        lambda,
        selected: mask.selected_count(),
        rows,
    })
}

/// A rectangular table rendered as CSV or as aligned text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// CSV with `# ` comment lines before the header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// Columns padded to a common width.
    pub fn to_aligned(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "{}", line(&self.header));
        for r in &self.rows {
            let _ = writeln!(s, "{}", line(r));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Shortest round-trip form; `NA` for NaN.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else {
        x.to_string()
    }
}

impl CoverageReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "target",
            "scheme",
            "scenario",
            "p",
            "coverage",
            "avg_length",
            "m",
            "failures",
            "mean_error",
            "se_error",
            "mean_bias",
            "true_bias",
            "uncorrected_coverage",
            "arb_percent",
        ]);
        t.comments = self.config.echo();
        for r in &self.rows {
            t.rows.push(vec![
                r.target.clone(),
                r.scheme.to_string(),
                r.scenario.to_string(),
                fmt_num(r.p),
                fmt_num(r.coverage),
                fmt_num(r.avg_length),
                r.m_used.to_string(),
                r.failures.to_string(),
                fmt_num(r.mean_error),
                fmt_num(r.se_error),
                fmt_num(r.mean_bias_used),
                fmt_num(r.bias_true),
                fmt_num(r.uncorrected_coverage),
                r.arb_percent.map_or("NA".to_string(), fmt_num),
            ]);
        }
        t
    }

    /// One line per replicate, target, p, scheme and scenario.
    pub fn records_table(&self) -> Table {
        let mut t = Table::new(&[
            "m", "p", "scheme", "scenario", "target", "truth", "estimate", "lower", "upper", "covered", "bias", "k_hat",
            "error",
        ]);
        t.comments = self.config.echo();
        for r in &self.records {
            let mut row = vec![
                r.m.to_string(),
                fmt_num(r.p),
                r.scheme.to_string(),
                r.scenario.to_string(),
                r.target.clone(),
                fmt_num(r.truth),
                fmt_num(r.estimate),
            ];
            match &r.outcome {
                Ok(o) => row.extend([
                    fmt_num(o.lower),
                    fmt_num(o.upper),
                    (o.covered as u8).to_string(),
                    fmt_num(o.bias_used),
                    o.k_hat.to_string(),
                    String::new(),
                ]),
                Err(e) => {
                    row.extend(["NA", "NA", "NA", "NA", "NA"].map(String::from));
                    row.push(format!("\"{}\"", e.replace('"', "'")));
                }
            }
            t.rows.push(row);
        }
        t
    }
}

impl SparseCltSummary {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["bin_lower", "bin_upper", "count"]);
        t.comments = vec![
            format!("beta={}", self.beta),
            format!("c_h={}", self.c_h),
            format!("tau2={}", self.tau2),
            format!("exponent={}", self.exponent),
            format!("mean={}", self.mean),
            format!("variance={}", self.variance),
            format!("ks={}", self.ks),
        ];
        if let Some(w) = &self.warning {
            t.comments.push(format!("warning={w}"));
        }
        for &(lo, hi, c) in &self.histogram {
            t.rows.push(vec![fmt_num(lo), fmt_num(hi), c.to_string()]);
        }
        t
    }
}

impl RealReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["target", "scheme", "truth", "estimate", "lower", "upper", "level", "bias", "sigma_or_tau"]);
        t.comments = vec![
            format!("n={}", self.n),
            format!("k={}", self.k),
            format!(
                "class_sizes={}",
                self.class_sizes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            ),
            format!("mean_degree={}", self.mean_degree),
            format!("edge_density={}", self.edge_density),
            format!("clustering={}", self.clustering),
            format!("pi={}", format_matrix(&self.pi)),
            format!("selected={}", self.selected),
        ];
        for r in &self.rows {
            let mut row = vec![r.target.clone(), r.scheme.to_string(), fmt_num(r.truth), fmt_num(r.estimate)];
            match &r.interval {
                Ok(iv) => row.extend([
                    fmt_num(iv.lower),
                    fmt_num(iv.upper),
                    fmt_num(iv.level),
                    fmt_num(iv.bias),
                    fmt_num(iv.sigma_or_tau),
                ]),
                Err(e) => {
                    row.extend(["NA", "NA", "NA", "NA"].map(String::from));
                    row.push(format!("\"{}\"", e.replace('"', "'")));
                }
            }
            t.rows.push(row);
        }
        t
    }
}
