use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use tracerecon::Mode;
use tracerecon_harness::{emit_report, run_experiment, write_report, ExperimentConfig, ExperimentKind, GridPoint, ReportFormat};

/// Run a seeded trace reconstruction experiment and write its report.
#[derive(Debug, Parser)]
#[command(name = "tracerecon", version)]
struct Cli {
    /// channel_stats, bma_bench, align_bench, reconstruct_e2e, atomic_exact, atomic_mc, prlp or aprlp_embedding.
    kind: ExperimentKind,
    /// JSON experiment config; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    mode: Option<Mode>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    m_traces: Option<usize>,
    #[arg(long)]
    k_const: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// PRLP coordinates (prlp, aprlp_embedding).
    #[arg(long)]
    b: Option<usize>,
    /// Long-desert length avoided by bma_bench words.
    #[arg(long)]
    desert_len: Option<usize>,
    /// Monte Carlo draws per trial (atomic_mc).
    #[arg(long)]
    draws: Option<usize>,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig {
                kind: self.kind,
                grid: vec![GridPoint::default()],
                trials: 1,
                seed: 0,
                mode: Mode::Desk,
                out: None,
            },
        };
        config.kind = self.kind;
        if config.grid.is_empty() {
            config.grid.push(GridPoint::default());
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.mode {
            config.mode = v;
        }
        if let Some(v) = &self.out {
            config.out = Some(v.clone());
        }
        for p in &mut config.grid {
            p.n = self.n.unwrap_or(p.n);
            p.delta = self.delta.unwrap_or(p.delta);
            p.m_traces = self.m_traces.unwrap_or(p.m_traces);
            p.k_const = self.k_const.or(p.k_const);
            p.tau = self.tau.or(p.tau);
            p.gamma = self.gamma.or(p.gamma);
            p.b = self.b.or(p.b);
            p.desert_len = self.desert_len.or(p.desert_len);
            p.draws = self.draws.or(p.draws);
        }
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = run_experiment(&config, cli.workers).and_then(|results| match &config.out {
        Some(path) => emit_report(&results, cli.format, path),
        None => write_report(&results, cli.format, BufWriter::new(io::stdout().lock())),
    });
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
