//! Seeded experiment runner behind the `tracerecon` CLI.
//!
//! Every trial draws from its own stream, keyed by (seed, grid index, trial
//! index), so reports do not depend on the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tracerecon::deserts::contains_long_desert;
use tracerecon::lower_bound::{
    decode_prlp_bayes, exact_atomic_failure_prob, monte_carlo_atomic_failure, sample_prlp, simulate_aprlp,
    EmbeddingSpec, EXACT_ENUMERATION_MAX_M,
};
use tracerecon::strings::{edit_distance, edit_distance_within, BitString};
use tracerecon::{
    bma_run, consensus_check, derive_params, reconstruct_with_fallback, transmit, Aligner, Mode, Overrides, StreamKey,
    TraceRecord,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ChannelStats,
    BmaBench,
    AlignBench,
    ReconstructE2e,
    AtomicExact,
    AtomicMc,
    Prlp,
    AprlpEmbedding,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::ChannelStats,
        ExperimentKind::BmaBench,
        ExperimentKind::AlignBench,
        ExperimentKind::ReconstructE2e,
        ExperimentKind::AtomicExact,
        ExperimentKind::AtomicMc,
        ExperimentKind::Prlp,
        ExperimentKind::AprlpEmbedding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ChannelStats => "channel_stats",
            ExperimentKind::BmaBench => "bma_bench",
            ExperimentKind::AlignBench => "align_bench",
            ExperimentKind::ReconstructE2e => "reconstruct_e2e",
            ExperimentKind::AtomicExact => "atomic_exact",
            ExperimentKind::AtomicMc => "atomic_mc",
            ExperimentKind::Prlp => "prlp",
            ExperimentKind::AprlpEmbedding => "aprlp_embedding",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

/// One point of the parameter grid.
///
/// `n` is the source length, except for `bma_bench` where it is the word
/// length `R`, and the lower-bound kinds, which ignore it. `m_traces` is the
/// `M` of every kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub delta: f64,
    pub m_traces: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_const: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// PRLP coordinates `B` (`prlp`, `aprlp_embedding`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    /// Long-desert length `L` that `bma_bench` words avoid; `G = L / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desert_len: Option<usize>,
    /// Monte Carlo draws per trial (`atomic_mc`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
}

impl GridPoint {
    fn overrides(&self, mode: Mode) -> Overrides {
        Overrides { mode, k_const: self.k_const, tau: self.tau, gamma: self.gamma }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: Vec<GridPoint>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(!self.grid.is_empty(), "the grid is empty");
        for (i, p) in self.grid.iter().enumerate() {
            ensure!((0.0..=1.0).contains(&p.delta), "grid point {i}: delta {} outside [0, 1]", p.delta);
            ensure!(p.m_traces >= 1, "grid point {i}: m_traces must be at least 1");
            match self.kind {
                ExperimentKind::ChannelStats | ExperimentKind::ReconstructE2e => {
                    ensure!(p.n >= 1, "grid point {i}: n must be at least 1")
                }
                ExperimentKind::BmaBench => ensure!(p.n >= 1, "grid point {i}: the word length n must be at least 1"),
                ExperimentKind::AlignBench => {
                    derive_params(p.n, p.delta, p.m_traces, p.overrides(self.mode))
                        .with_context(|| format!("grid point {i}"))?;
                }
                ExperimentKind::AtomicExact => ensure!(
                    p.m_traces <= EXACT_ENUMERATION_MAX_M,
                    "grid point {i}: exact enumeration supports M up to {EXACT_ENUMERATION_MAX_M}"
                ),
                ExperimentKind::AtomicMc | ExperimentKind::Prlp | ExperimentKind::AprlpEmbedding => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Num(f64),
    Text(String),
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Num(v) => write!(f, "{v}"),
            MetricValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        MetricValue::Num(v)
    }
}

impl From<usize> for MetricValue {
    fn from(v: usize) -> Self {
        MetricValue::Num(v as f64)
    }
}

impl From<bool> for MetricValue {
    fn from(v: bool) -> Self {
        MetricValue::Num(if v { 1.0 } else { 0.0 })
    }
}

impl From<String> for MetricValue {
    fn from(v: String) -> Self {
        MetricValue::Text(v)
    }
}

impl From<&str> for MetricValue {
    fn from(v: &str) -> Self {
        MetricValue::Text(v.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub kind: ExperimentKind,
    pub mode: Mode,
    pub point: GridPoint,
    /// `K` and `tau` after applying the mode defaults.
    pub k_const: f64,
    pub tau: f64,
    pub gamma: f64,
    pub seed: u64,
    pub grid_index: usize,
    pub trial: usize,
    pub metrics: BTreeMap<String, MetricValue>,
}

impl TrialResult {
    pub fn num(&self, metric: &str) -> Option<f64> {
        match self.metrics.get(metric)? {
            MetricValue::Num(v) => Some(*v),
            MetricValue::Text(_) => None,
        }
    }

    pub fn text(&self, metric: &str) -> Option<&str> {
        match self.metrics.get(metric)? {
            MetricValue::Text(s) => Some(s),
            MetricValue::Num(_) => None,
        }
    }
}

type Metrics = BTreeMap<String, MetricValue>;

fn put(metrics: &mut Metrics, name: &str, value: impl Into<MetricValue>) {
    metrics.insert(name.to_owned(), value.into());
}

/// Run every (grid point, trial) pair on `workers` threads (0 means rayon's
/// default). Results come back ordered by grid index, then trial.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().context("building the worker pool")?;
    let jobs: Vec<(usize, usize)> =
        (0..config.grid.len()).flat_map(|g| (0..trials_per_point(config)).map(move |t| (g, t))).collect();
    Ok(pool.install(|| jobs.par_iter().map(|&(g, t)| run_trial(config, g, t)).collect()))
}

/// Exact enumeration is deterministic, so it runs once per point.
fn trials_per_point(config: &ExperimentConfig) -> usize {
    match config.kind {
        ExperimentKind::AtomicExact => 1,
        _ => config.trials,
    }
}

fn run_trial(config: &ExperimentConfig, grid_index: usize, trial: usize) -> TrialResult {
    let point = config.grid[grid_index];
    let key = StreamKey::new(config.seed).child(grid_index as u64).child(trial as u64);
    let started = Instant::now();
    let mut metrics = Metrics::new();
    let overrides = point.overrides(config.mode);
    let gamma = overrides.gamma.unwrap_or(0.01);
    // The CSV columns are fixed, so these ride along as metrics.
    put(&mut metrics, "mode", config.mode.to_string());
    put(&mut metrics, "gamma", gamma);
    if let Err(e) = trial_metrics(config.kind, config.mode, &point, key, &mut metrics) {
        put(&mut metrics, "error", format!("{e:#}"));
    }
    put(&mut metrics, "runtime_ms", started.elapsed().as_secs_f64() * 1e3);
    TrialResult {
        kind: config.kind,
        mode: config.mode,
        point,
        k_const: overrides.k_const.unwrap_or(config.mode.default_k()),
        tau: overrides.tau.unwrap_or(config.mode.default_tau()),
        gamma,
        seed: config.seed,
        grid_index,
        trial,
        metrics,
    }
}

fn trial_metrics(kind: ExperimentKind, mode: Mode, p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    match kind {
        ExperimentKind::ChannelStats => channel_stats(p, key, out),
        ExperimentKind::BmaBench => bma_bench(p, key, out),
        ExperimentKind::AlignBench => align_bench(mode, p, key, out),
        ExperimentKind::ReconstructE2e => reconstruct_e2e(mode, p, key, out),
        ExperimentKind::AtomicExact => {
            let prob = exact_atomic_failure_prob(p.m_traces, p.delta)?;
            put(out, "p_exact", prob);
            put(out, "floor_cubic", (p.delta * p.m_traces as f64).powi(3 * p.m_traces as i32));
            Ok(())
        }
        ExperimentKind::AtomicMc => {
            let est = monte_carlo_atomic_failure(p.m_traces, p.delta, p.draws.unwrap_or(100_000), key);
            put(out, "draws", est.trials);
            put(out, "failures", est.failures);
            put(out, "p_mc", est.rate());
            put(out, "std_error", est.std_error());
            if let Ok(exact) = exact_atomic_failure_prob(p.m_traces, p.delta) {
                put(out, "p_exact", exact);
            }
            Ok(())
        }
        ExperimentKind::Prlp => prlp(p, key, out),
        ExperimentKind::AprlpEmbedding => aprlp(mode, p, key, out),
    }
}

/// The source and the `count` traces of one trial.
fn source_and_traces(n: usize, delta: f64, count: usize, key: StreamKey) -> (BitString, Vec<TraceRecord>) {
    let x = key.child(0).random_bits(n);
    let records = (0..count as u64).map(|m| transmit(&x, delta, key.child(1).child(m))).collect();
    (x, records)
}

fn channel_stats(p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let (x, records) = source_and_traces(p.n, p.delta, 1, key);
    let rec = &records[0];
    let round_trip = rec.is_consistent_with(&x) && (1..=rec.trace().len()).all(|q| rec.image_ceil(rec.source_of(q)) == q);
    put(out, "trace_len", rec.trace().len());
    put(out, "deletions", rec.deleted().len());
    put(out, "round_trip", round_trip);
    Ok(())
}

fn bma_bench(p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let r = p.n;
    let l = p.desert_len.unwrap_or(r + 1);
    // Rejection sampling; a fresh stream per attempt.
    let (attempts, word) = (0u64..10_000)
        .map(|j| (j + 1, key.child(0).child(j).random_bits(r)))
        .find(|(_, w)| !contains_long_desert(w, l, l / 2))
        .context("no desert-free word in 10000 attempts")?;
    let traces: Vec<BitString> =
        (0..p.m_traces as u64).map(|m| transmit(&word, p.delta, key.child(1).child(m)).into_trace()).collect();
    let run = bma_run(&traces, &vec![1; p.m_traces], r);
    put(out, "word_attempts", attempts as usize);
    put(out, "bma_success", run.output == word);
    put(out, "majority_margin_min", run.min_margin().unwrap_or(0));
    put(out, "edit_distance", edit_distance(&run.output, &word));
    put(out, "first_star_round", run.first_star_round.unwrap_or(0));
    Ok(())
}

fn align_bench(mode: Mode, p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let params = derive_params(p.n, p.delta, p.m_traces, p.overrides(mode))?;
    let (_, records) = source_and_traces(p.n, p.delta, p.m_traces + 1, key);
    let (reference, others) = records.split_first().expect("at least two records");
    let y_star = reference.trace();
    let traces: Vec<BitString> = others.iter().map(|r| r.trace().clone()).collect();
    let margin = params.effective_margin(y_star.len());
    if y_star.len() < 2 * margin {
        bail!("reference trace of length {} leaves no cursor outside the margins", y_star.len());
    }
    let span = (y_star.len() - 2 * margin + 1) as u64;
    let ell_star = margin + (key.child(2).word(0) % span) as usize;
    let (config, diag) = Aligner::new(&params, &traces)?.align(ell_star, y_star)?;
    let (agree, location) = consensus_check(&config, others, params.consensus_threshold());
    let anchor = reference.source_of(ell_star);
    let in_range = location.is_some_and(|i| i <= anchor && i + 2 * params.h_ceil >= anchor);
    put(out, "ell_star", ell_star);
    put(out, "consensus", agree && in_range);
    put(out, "consensus_any", agree);
    put(out, "consensus_rate", (agree && in_range) as usize as f64);
    put(out, "clamped", diag.clamped);
    put(
        out,
        "align_failure",
        match diag.failure {
            None => "none".to_owned(),
            Some(f) => serde_json::to_string(&f)?,
        },
    );
    Ok(())
}

fn reconstruct_e2e(mode: Mode, p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let (x, records) = source_and_traces(p.n, p.delta, p.m_traces + 1, key);
    let traces: Vec<BitString> = records.into_iter().map(TraceRecord::into_trace).collect();
    let res = reconstruct_with_fallback(p.n, p.delta, p.m_traces, &traces, p.overrides(mode));
    // Loss that is expected even from perfect segments: the skipped start and the unfinished end.
    let boundary = res.segments.first().map_or(0, |s| s.ell_star) + res.segments.iter().map(|s| s.len).max().unwrap_or(0);
    let cap = ((2.0 * p.delta * p.n as f64).ceil() as usize).max(2 * boundary);
    match edit_distance_within(&res.hypothesis, &x, cap) {
        Some(d) => {
            put(out, "edit_distance", d);
            put(out, "normalized_distance", d as f64 / p.n as f64);
        }
        None => {
            put(out, "edit_distance", format!("≥{cap}"));
            put(out, "normalized_distance", format!("≥{}", cap as f64 / p.n as f64));
        }
    }
    put(out, "distance_cap", cap);
    put(out, "single_trace_distance", x.len() - traces[0].len());
    put(out, "hypothesis_len", res.hypothesis.len());
    put(out, "segments", res.segments.len());
    put(out, "empty_segments", res.segments.iter().filter(|s| s.len == 0).count());
    put(out, "align_failures", res.segments.iter().filter(|s| s.align_failure.is_some()).count());
    put(out, "regime_action", res.regime_action.to_string());
    Ok(())
}

fn prlp(p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let b = p.b.unwrap_or(8);
    let z = key.child(0).random_bits(b);
    let inst = sample_prlp(&z, p.m_traces, p.delta, key.child(1));
    let z_hat = decode_prlp_bayes(&inst.samples, p.m_traces, p.delta)?;
    let errors = z.iter().zip(z_hat.iter()).filter(|(u, v)| u != v).count();
    put(out, "exact_match", z_hat == z);
    put(out, "coordinate_errors", errors);
    put(out, "error_rate", errors as f64 / b.max(1) as f64);
    if let Ok(prob) = exact_atomic_failure_prob(p.m_traces, p.delta) {
        put(out, "exact_match_ceiling", (1.0 - prob).powi(b as i32));
    }
    Ok(())
}

fn aprlp(mode: Mode, p: &GridPoint, key: StreamKey, out: &mut Metrics) -> Result<()> {
    let spec = EmbeddingSpec::new(p.m_traces, p.b.unwrap_or(32));
    let z = key.child(0).random_bits(spec.b);
    let inst = sample_prlp(&z, p.m_traces, p.delta, key.child(1));
    let overrides = p.overrides(mode);
    let run = simulate_aprlp(
        &inst.samples,
        |traces| reconstruct_with_fallback(spec.n, p.delta, traces.len() - 1, traces, overrides).hypothesis,
        &spec,
        p.delta,
        key.child(2),
    );
    let z_used = z.subword(1, run.embedded);
    put(out, "source_len", spec.n);
    put(out, "occurrences", run.embedded);
    put(out, "enough_occurrences", run.embedded == spec.b);
    put(out, "z_edit_distance", edit_distance(&z_used, &run.z_hat));
    put(out, "exact_match", run.z_hat == z_used);
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

pub const CSV_HEADER: [&str; 10] = ["kind", "n", "delta", "m_traces", "k_const", "tau", "seed", "trial", "metric", "value"];

/// CSV has one row per metric; JSONL one [`TrialResult`] per line.
pub fn write_report<W: Write>(results: &[TrialResult], format: ReportFormat, w: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(CSV_HEADER)?;
            for r in results {
                for (metric, value) in &r.metrics {
                    csv.write_record([
                        r.kind.to_string(),
                        r.point.n.to_string(),
                        r.point.delta.to_string(),
                        r.point.m_traces.to_string(),
                        r.k_const.to_string(),
                        r.tau.to_string(),
                        r.seed.to_string(),
                        r.trial.to_string(),
                        metric.clone(),
                        value.to_string(),
                    ])?;
                }
            }
            csv.flush()?;
        }
        ReportFormat::Jsonl => {
            let mut w = w;
            for r in results {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn emit_report(results: &[TrialResult], format: ReportFormat, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_report(results, format, BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
}

pub fn read_jsonl(text: &str) -> Result<Vec<TrialResult>> {
    text.lines().filter(|l| !l.is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

/// The report with every `runtime_ms` metric dropped, for determinism checks.
pub fn without_runtime(results: &[TrialResult]) -> Vec<TrialResult> {
    results
        .iter()
        .cloned()
        .map(|mut r| {
            r.metrics.remove("runtime_ms");
            r
        })
        .collect()
}
