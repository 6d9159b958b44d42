//! Declarative Monte Carlo experiments.
//!
//! An [`ExperimentSpec`] names a standardized statistic, a list of sizes, a
//! sampling/replication budget, and a seed. Running it estimates, for each
//! size and replication, the Kolmogorov-Smirnov distance between the
//! empirical law of the statistic and its reference distribution, then
//! aggregates log-KS means and spreads and fits a log-log line.
//!
//! Work is partitioned by (size, replication); each cell owns the stream
//! `replication * n_sizes + size`, and aggregation runs in index order, so
//! results are a pure function of the spec: the thread budget changes wall
//! time only.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{self, SIGMA2};
use crate::embeddings;
use crate::error::{Error, Result};
use crate::process::GapPartition;
use crate::stream::RandomStream;

/// Sorted sample of a scalar statistic with exact empirical-CDF evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact two-sided KS distance to a reference CDF: the sup over order
    /// statistics of both one-sided candidates
    /// `max(|i/N - F(x_(i))|, |(i-1)/N - F(x_(i))|)`.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, reference: F) -> f64 {
        let n = self.values.len() as f64;
        let mut sup = 0.0f64;
        for (i, &x) in self.values.iter().enumerate() {
            let f = reference(x);
            let hi = ((i + 1) as f64 / n - f).abs();
            let lo = (i as f64 / n - f).abs();
            sup = sup.max(hi).max(lo);
        }
        sup
    }

    /// Empirical survival `#(values > x) / N`.
    pub fn survival(&self, x: f64) -> f64 {
        let above = self.values.len() - self.values.partition_point(|&v| v <= x);
        above as f64 / self.values.len() as f64
    }
}

/// Tail sum of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS distance and asymptotic p-value. Ties (integer-valued
/// samples) are handled by comparing the two empirical CDFs only at pooled
/// jump points, which keeps the p-value conservative for discrete laws.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> (f64, f64) {
    let (va, vb) = (a.values(), b.values());
    let (na, nb) = (va.len() as f64, vb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < va.len() && j < vb.len() {
        let x = va[i].min(vb[j]);
        while i < va.len() && va[i] <= x {
            i += 1;
        }
        while j < vb.len() && vb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// Ordinary least squares for a handful of (x, y) points.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Config("least-squares fit needs at least 2 points".into()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("least-squares fit needs distinct x values".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

/// Mean, sample standard deviation, and standard error of a replication set.
pub fn summarize_ci(values: &[f64]) -> Result<(f64, f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Config("summary needs at least 2 values".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    Ok((mean, sd, sd / n.sqrt()))
}

/// The named standardized statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatisticKind {
    /// `sqrt(n^3 / sigma^2) (M_n - 2/n)` against the standard normal.
    MaxGapClt,
    /// `n^2 m_n / 2` against the unit-mean exponential.
    MinGapExp,
    /// `sqrt(2t / sigma^2) (N_t - 2/t)` against the standard normal
    /// (sizes are thresholds t).
    ThresholdClt,
    /// `sqrt(2 / sigma^2) e^{-tau/2} (T_tau - 2 e^tau)` against the standard
    /// normal (sizes are horizons tau).
    CmjClt,
    /// `r_n - log(n^2 / 2)` against the Gumbel law.
    BrwGumbel,
    /// Placeholder for caller-supplied samplers; `run_experiment` rejects it
    /// (use [`run_experiment_with`]).
    Custom(String),
}

impl StatisticKind {
    /// Reference CDF evaluated at x.
    pub fn reference_cdf(&self, x: f64) -> f64 {
        match self {
            StatisticKind::MaxGapClt | StatisticKind::ThresholdClt | StatisticKind::CmjClt => {
                closed_forms::std_normal_cdf(x)
            }
            StatisticKind::MinGapExp | StatisticKind::Custom(_) => {
                1.0 - closed_forms::exp_survival(x)
            }
            StatisticKind::BrwGumbel => closed_forms::gumbel_cdf(x),
        }
    }

    /// Abscissa used in the log-log fit for a given size.
    pub fn fit_abscissa(&self, size: f64) -> f64 {
        match self {
            StatisticKind::ThresholdClt => (1.0 / size).ln(),
            StatisticKind::CmjClt => size,
            _ => size.ln(),
        }
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StatisticKind::MaxGapClt => "max_gap_clt",
            StatisticKind::MinGapExp => "min_gap_exp",
            StatisticKind::ThresholdClt => "threshold_clt",
            StatisticKind::CmjClt => "cmj_clt",
            StatisticKind::BrwGumbel => "brw_gumbel",
            StatisticKind::Custom(name) => name,
        };
        write!(f, "{}", name)
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_gap_clt" => Ok(StatisticKind::MaxGapClt),
            "min_gap_exp" => Ok(StatisticKind::MinGapExp),
            "threshold_clt" => Ok(StatisticKind::ThresholdClt),
            "cmj_clt" => Ok(StatisticKind::CmjClt),
            "brw_gumbel" => Ok(StatisticKind::BrwGumbel),
            other => Err(Error::Config(format!("unknown statistic name: {}", other))),
        }
    }
}

/// Declarative Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub statistic: StatisticKind,
    /// Sizes n (or thresholds t / horizons tau, depending on the statistic).
    pub sizes: Vec<f64>,
    pub samples_per_estimate: usize,
    pub replications: usize,
    pub seed: u64,
    /// 0 = use the default rayon pool size.
    pub thread_budget: usize,
}

impl ExperimentSpec {
    pub fn new(statistic: StatisticKind, sizes: Vec<f64>) -> Self {
        Self {
            statistic,
            sizes,
            samples_per_estimate: 10_000,
            replications: 1_000,
            seed: DEFAULT_SEED,
            thread_budget: 0,
        }
    }

    pub fn with_budget(mut self, samples: usize, replications: usize) -> Self {
        self.samples_per_estimate = samples;
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.thread_budget = threads;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples_per_estimate < 100 {
            return Err(Error::Config("samples_per_estimate must be >= 100".into()));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must be non-empty".into()));
        }
        Ok(())
    }
}

/// Fixed default seed; all randomness flows from the spec seed, never from
/// the wall clock. The constant spells "KAKUTANI" in ASCII.
pub const DEFAULT_SEED: u64 = 0x4B41_4B55_5441_4E49;

/// Per-size aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub size: f64,
    pub log_size: f64,
    pub mean_log_ks: f64,
    /// Sample standard deviation of log KS across replications.
    pub spread: f64,
    pub stderr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replication_log_ks: Option<Vec<f64>>,
}

/// Least-squares fit of mean log KS against the log-size abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Reproducibility and budget metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub samples_per_estimate: usize,
    pub replications: usize,
    pub thread_budget: usize,
    pub total_paths: u64,
    pub total_draws: u64,
    pub wall_time_secs: f64,
}

/// Aggregated experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub statistic: String,
    pub per_size: Vec<SizeRecord>,
    /// Absent for single-size runs, where a line fit is undefined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    pub metadata: RunMetadata,
}

impl ExperimentResult {
    /// Equality of the statistical content, ignoring wall time and the
    /// thread budget (which reruns are allowed to vary).
    pub fn same_statistics(&self, other: &Self) -> bool {
        self.statistic == other.statistic
            && self.per_size == other.per_size
            && self.fit == other.fit
            && self.metadata.seed == other.metadata.seed
            && self.metadata.total_paths == other.metadata.total_paths
            && self.metadata.total_draws == other.metadata.total_draws
    }
}

fn max_min_after(n: u64, stream: &mut RandomStream) -> Result<(f64, f64)> {
    let mut p = GapPartition::new();
    for _ in 0..n {
        p.split_max(stream.next_open01())?;
    }
    Ok((p.current_max(), p.current_min()))
}

/// One standardized draw of a named statistic.
pub fn sample_statistic(
    kind: &StatisticKind,
    size: f64,
    stream: &mut RandomStream,
) -> Result<f64> {
    match kind {
        StatisticKind::MaxGapClt => {
            let n = size as u64;
            let (max, _) = max_min_after(n, stream)?;
            let nf = n as f64;
            Ok((nf * nf * nf / SIGMA2).sqrt() * (max - 2.0 / nf))
        }
        StatisticKind::MinGapExp => {
            let n = size as u64;
            let (_, min) = max_min_after(n, stream)?;
            let nf = n as f64;
            Ok(nf * nf * min / 2.0)
        }
        StatisticKind::ThresholdClt => {
            let t = size;
            let n = embeddings::threshold_times(&[t], stream)?.times[0] as f64;
            Ok((2.0 * t / SIGMA2).sqrt() * (n - 2.0 / t))
        }
        StatisticKind::CmjClt => {
            let tau = size;
            let count = embeddings::cmj_population(tau, stream)? as f64;
            Ok((2.0 / SIGMA2).sqrt() * (-tau / 2.0).exp() * (count - 2.0 * tau.exp()))
        }
        StatisticKind::BrwGumbel => {
            let n = size as u64;
            let (_, r) = embeddings::brw_extremes(n, stream)?;
            Ok(r - (size * size / 2.0).ln())
        }
        StatisticKind::Custom(name) => {
            Err(Error::Config(format!("unknown statistic name: {}", name)))
        }
    }
}

struct Cell {
    size_id: usize,
    rep_id: usize,
    log_ks: f64,
    draws: u64,
}

/// Run a named experiment.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    if let StatisticKind::Custom(name) = &spec.statistic {
        return Err(Error::Config(format!("unknown statistic name: {}", name)));
    }
    let kind = spec.statistic.clone();
    run_experiment_with(spec, move |size, stream| sample_statistic(&kind, size, stream))
}

/// Run an experiment with a caller-supplied per-path sampler; the route for
/// custom statistics. The reference CDF comes from `spec.statistic`.
pub fn run_experiment_with<F>(spec: &ExperimentSpec, sampler: F) -> Result<ExperimentResult>
where
    F: Fn(f64, &mut RandomStream) -> Result<f64> + Sync,
{
    spec.validate()?;
    let started = Instant::now();
    let n_sizes = spec.sizes.len();
    let total_cells = n_sizes * spec.replications;
    let kind = spec.statistic.clone();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.thread_budget)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let cells: Vec<Result<Cell>> = pool.install(|| {
        (0..total_cells)
            .into_par_iter()
            .map(|idx| {
                let size_id = idx % n_sizes;
                let rep_id = idx / n_sizes;
                let stream_index = (rep_id * n_sizes + size_id) as u64;
                let mut stream = RandomStream::new(spec.seed, stream_index);
                let size = spec.sizes[size_id];
                let mut values = Vec::with_capacity(spec.samples_per_estimate);
                for _ in 0..spec.samples_per_estimate {
                    values.push(sampler(size, &mut stream)?);
                }
                let sample = EmpiricalSample::new(values);
                let ks = sample.ks_distance(|x| kind.reference_cdf(x));
                Ok(Cell { size_id, rep_id, log_ks: ks.ln(), draws: stream.draws() })
            })
            .collect()
    });

    let mut per_rep = vec![vec![0.0f64; spec.replications]; n_sizes];
    let mut total_draws = 0u64;
    for cell in cells {
        let cell = cell?;
        per_rep[cell.size_id][cell.rep_id] = cell.log_ks;
        total_draws += cell.draws;
    }
    assemble(spec, per_rep, total_draws, started.elapsed().as_secs_f64())
}

fn assemble(
    spec: &ExperimentSpec,
    per_rep: Vec<Vec<f64>>,
    total_draws: u64,
    wall_time_secs: f64,
) -> Result<ExperimentResult> {
    let mut per_size = Vec::with_capacity(spec.sizes.len());
    for (size_id, reps) in per_rep.iter().enumerate() {
        let (mean, sd, se) = if reps.len() >= 2 {
            summarize_ci(reps)?
        } else {
            (reps[0], 0.0, 0.0)
        };
        let size = spec.sizes[size_id];
        per_size.push(SizeRecord {
            size,
            log_size: spec.statistic.fit_abscissa(size),
            mean_log_ks: mean,
            spread: sd,
            stderr: se,
            replication_log_ks: None,
        });
    }
    let points: Vec<(f64, f64)> =
        per_size.iter().map(|r| (r.log_size, r.mean_log_ks)).collect();
    let fit = if points.len() >= 2 {
        let (slope, intercept) = fit_loglog(&points)?;
        let residuals =
            points.iter().map(|(x, y)| y - (slope * x + intercept)).collect();
        Some(FitResult { slope, intercept, residuals })
    } else {
        None
    };
    Ok(ExperimentResult {
        statistic: spec.statistic.to_string(),
        per_size,
        fit,
        metadata: RunMetadata {
            seed: spec.seed,
            samples_per_estimate: spec.samples_per_estimate,
            replications: spec.replications,
            thread_budget: spec.thread_budget,
            total_paths: (spec.sizes.len() * spec.samples_per_estimate * spec.replications)
                as u64,
            total_draws,
            wall_time_secs,
        },
    })
}

/// Budget profiles for the extremal-spacings pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure1Profile {
    /// 10^4 samples x 10^3 replications.
    Full,
    /// 10^3 samples x 10^2 replications; wider acceptance tolerances.
    Ci,
}

impl Figure1Profile {
    pub fn samples(&self) -> usize {
        match self {
            Figure1Profile::Full => 10_000,
            Figure1Profile::Ci => 1_000,
        }
    }

    pub fn replications(&self) -> usize {
        match self {
            Figure1Profile::Full => 1_000,
            Figure1Profile::Ci => 100,
        }
    }
}

impl FromStr for Figure1Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Figure1Profile::Full),
            "ci" => Ok(Figure1Profile::Ci),
            other => Err(Error::Config(format!("unknown profile: {}", other))),
        }
    }
}

/// Sizes used by both panels.
pub const FIGURE1_SIZES: [f64; 3] = [100.0, 200.0, 400.0];

/// Both panels of the extremal-spacings pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Output {
    pub left: ExperimentResult,
    pub right: ExperimentResult,
}

/// Run both panels from the same simulated paths: each path of n splits
/// yields one max-gap draw for the left panel and one min-gap draw for the
/// right panel.
pub fn run_figure1(
    profile: Figure1Profile,
    seed: u64,
    thread_budget: usize,
) -> Result<Figure1Output> {
    run_figure1_with(
        &FIGURE1_SIZES,
        profile.samples(),
        profile.replications(),
        seed,
        thread_budget,
    )
}

/// Figure pipeline with explicit budgets.
pub fn run_figure1_with(
    sizes: &[f64],
    samples: usize,
    replications: usize,
    seed: u64,
    thread_budget: usize,
) -> Result<Figure1Output> {
    let left_spec = ExperimentSpec {
        statistic: StatisticKind::MaxGapClt,
        sizes: sizes.to_vec(),
        samples_per_estimate: samples,
        replications,
        seed,
        thread_budget,
    };
    let right_spec =
        ExperimentSpec { statistic: StatisticKind::MinGapExp, ..left_spec.clone() };
    left_spec.validate()?;

    let started = Instant::now();
    let n_sizes = sizes.len();
    let total_cells = n_sizes * replications;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_budget)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let cells: Vec<Result<(usize, usize, f64, f64, u64)>> = pool.install(|| {
        (0..total_cells)
            .into_par_iter()
            .map(|idx| {
                let size_id = idx % n_sizes;
                let rep_id = idx / n_sizes;
                let stream_index = (rep_id * n_sizes + size_id) as u64;
                let mut stream = RandomStream::new(seed, stream_index);
                let n = sizes[size_id] as u64;
                let nf = n as f64;
                let max_scale = (nf * nf * nf / SIGMA2).sqrt();
                let mut max_stats = Vec::with_capacity(samples);
                let mut min_stats = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let (max, min) = max_min_after(n, &mut stream)?;
                    max_stats.push(max_scale * (max - 2.0 / nf));
                    min_stats.push(nf * nf * min / 2.0);
                }
                let ks_left = EmpiricalSample::new(max_stats)
                    .ks_distance(closed_forms::std_normal_cdf);
                let ks_right = EmpiricalSample::new(min_stats)
                    .ks_distance(|x| 1.0 - closed_forms::exp_survival(x));
                Ok((size_id, rep_id, ks_left.ln(), ks_right.ln(), stream.draws()))
            })
            .collect()
    });

    let mut left_rep = vec![vec![0.0f64; replications]; n_sizes];
    let mut right_rep = vec![vec![0.0f64; replications]; n_sizes];
    let mut total_draws = 0u64;
    for cell in cells {
        let (size_id, rep_id, l, r, draws) = cell?;
        left_rep[size_id][rep_id] = l;
        right_rep[size_id][rep_id] = r;
        total_draws += draws;
    }
    let wall = started.elapsed().as_secs_f64();
    Ok(Figure1Output {
        left: assemble(&left_spec, left_rep, total_draws, wall)?,
        right: assemble(&right_spec, right_rep, total_draws, wall)?,
    })
}

/// Pretty JSON for one result (schema = the field names of
/// [`ExperimentResult`] and its components).
pub fn to_json(result: &ExperimentResult) -> String {
    serde_json::to_string_pretty(result).expect("result serializes")
}

/// Parse a result back from JSON.
pub fn result_from_json(text: &str) -> Result<ExperimentResult> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// CSV rows `statistic,n,log_n,mean_log_ks,spread,reps,samples,seed`.
pub fn to_csv(results: &[&ExperimentResult]) -> String {
    let mut out = String::from("statistic,n,log_n,mean_log_ks,spread,reps,samples,seed\n");
    for result in results {
        for record in &result.per_size {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                result.statistic,
                record.size,
                record.log_size,
                record.mean_log_ks,
                record.spread,
                result.metadata.replications,
                result.metadata.samples_per_estimate,
                result.metadata.seed,
            ));
        }
    }
    out
}

/// Two-column TSV (log size, mean log KS) for external plotting.
pub fn to_tsv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    for record in &result.per_size {
        out.push_str(&format!("{}\t{}\n", record.log_size, record.mean_log_ks));
    }
    out
}
