//! Parameter derivation and regime classification.
//!
//! All logarithms are base 2. Lengths derived from the real-valued `H` use
//! `ceil(H)`. Thresholds written as fractions of `M` are computed in integer
//! arithmetic so they are exact at the boundaries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack for ceilings of float expressions that are integral in exact arithmetic.
const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Small-scale constants (`K = 2`, `tau = 8`) with clamping where the
    /// asymptotic preconditions are vacuous.
    #[default]
    Desk,
    /// Asymptotic constants (`tau = 500`); inputs outside the analysed regime
    /// are rejected.
    Paper,
}

impl Mode {
    pub fn default_k(self) -> f64 {
        2.0
    }

    pub fn default_tau(self) -> f64 {
        match self {
            Mode::Desk => 8.0,
            Mode::Paper => 500.0,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Desk => "desk",
            Mode::Paper => "paper",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Mode::Desk),
            "paper" => Ok(Mode::Paper),
            other => Err(format!("unknown mode {other:?} (expected desk or paper)")),
        }
    }
}

/// Optional replacements for the tunable constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default)]
    pub mode: Mode,
    pub k_const: Option<f64>,
    pub tau: Option<f64>,
    pub gamma: Option<f64>,
}

impl Overrides {
    pub fn mode(mode: Mode) -> Self {
        Overrides { mode, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconParams {
    pub n: usize,
    pub delta: f64,
    pub m_traces: usize,
    pub k_const: f64,
    pub tau: f64,
    pub gamma: f64,
    pub mode: Mode,
    /// `(M/K) log(1/(delta M))`.
    pub h: f64,
    pub h_ceil: usize,
    /// `t_1 < t_2 < ... < t_S`.
    pub ladder: Vec<usize>,
    pub l: usize,
    pub g: usize,
    pub r: usize,
    /// `2^(-0.01 H) n`, reported alongside measured distances.
    pub target_distance_budget: f64,
}

impl ReconParams {
    pub fn s(&self) -> usize {
        self.ladder.len()
    }

    /// `t_s` for 1-based `s`.
    pub fn t(&self, s: usize) -> usize {
        self.ladder[s - 1]
    }

    /// First-stage acceptance distance `floor(2 gamma t_s)`.
    pub fn stage_tolerance(&self, s: usize) -> usize {
        (2.0 * self.gamma * self.t(s) as f64 + EPS).floor() as usize
    }

    /// `ceil(0.9 t_1)`.
    pub fn word_len(&self) -> usize {
        (9 * self.t(1)).div_ceil(10)
    }

    /// `ceil(0.95 M)`: windows that must share the second-stage word.
    pub fn common_word_threshold(&self) -> usize {
        (95 * self.m_traces).div_ceil(100)
    }

    /// `ceil(0.9 M)`: agreeing cursors needed for consensus.
    pub fn consensus_threshold(&self) -> usize {
        (9 * self.m_traces).div_ceil(10)
    }

    /// `ceil(5 tau log n)`, the distance kept from both ends of the reference trace.
    pub fn edge_margin(&self) -> usize {
        ceil_eps(5.0 * self.tau * log2(self.n))
    }

    /// The edge margin actually used for a reference trace of length `len`.
    /// Desk mode caps it at `ceil(len / 100)` so that small runs do something.
    pub fn effective_margin(&self, len: usize) -> usize {
        match self.mode {
            Mode::Paper => self.edge_margin(),
            Mode::Desk => self.edge_margin().min(len.div_ceil(100)).max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeAction {
    RunFull,
    OutputSingleTrace,
    ReduceM,
}

impl std::fmt::Display for RegimeAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegimeAction::RunFull => "run_full",
            RegimeAction::OutputSingleTrace => "output_single_trace",
            RegimeAction::ReduceM => "reduce_m",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `delta < 1/n^2`.
    pub delta_below_inv_n2: bool,
    /// `M < K^2`.
    pub m_below_k2: bool,
    /// `delta >= 1/(K M)`, which also covers `M > 1/(K delta)`.
    pub m_above_inv_kdelta: bool,
    /// `(delta M)^(M/K) < 1/n^2`.
    pub target_distance_below_one: bool,
    pub recommended_action: RegimeAction,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("n must be at least 1")]
    EmptySource,
    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("at least one trace is required")]
    NoTraces,
    #[error("delta * M = {0} must be below 1")]
    DeltaMTooLarge(f64),
    #[error("constant {name} must be positive and finite, got {value}")]
    BadConstant { name: &'static str, value: f64 },
    #[error("paper mode requires the full regime, but the recommended action is {}", .0.recommended_action)]
    OutsideRegime(RegimeReport),
}

fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

fn ceil_eps(x: f64) -> usize {
    (x - EPS).ceil().max(0.0) as usize
}

/// Classify `(n, delta, M)` against the regime conditions for constant `k`.
pub fn check_regime(n: usize, delta: f64, m: usize, k: f64) -> RegimeReport {
    let n2 = (n as f64) * (n as f64);
    let mf = m as f64;
    let delta_below_inv_n2 = delta * n2 < 1.0;
    let m_below_k2 = mf < k * k;
    let m_above_inv_kdelta = delta * k * mf >= 1.0;
    // (delta M)^(M/K) < n^-2  <=>  (M/K) log(delta M) < -2 log n
    let target_distance_below_one = if delta * mf >= 1.0 {
        false
    } else if delta <= 0.0 {
        true
    } else {
        (mf / k) * (delta * mf).log2() < -2.0 * log2(n)
    };
    let recommended_action = if delta_below_inv_n2 || m_below_k2 {
        RegimeAction::OutputSingleTrace
    } else if m_above_inv_kdelta || target_distance_below_one {
        RegimeAction::ReduceM
    } else {
        RegimeAction::RunFull
    };
    RegimeReport { delta_below_inv_n2, m_below_k2, m_above_inv_kdelta, target_distance_below_one, recommended_action }
}

/// Largest `M' < m` whose upper-bound conditions hold, if any.
pub fn reduced_trace_count(n: usize, delta: f64, m: usize, k: f64) -> Option<usize> {
    (1..m).rev().find(|&mp| {
        let r = check_regime(n, delta, mp, k);
        !r.m_above_inv_kdelta && !r.target_distance_below_one
    })
}

pub fn derive_params(n: usize, delta: f64, m: usize, overrides: Overrides) -> Result<ReconParams, ParamsError> {
    if n == 0 {
        return Err(ParamsError::EmptySource);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ParamsError::DeltaOutOfRange(delta));
    }
    if m == 0 {
        return Err(ParamsError::NoTraces);
    }
    if delta * m as f64 >= 1.0 {
        return Err(ParamsError::DeltaMTooLarge(delta * m as f64));
    }
    let mode = overrides.mode;
    let k_const = overrides.k_const.unwrap_or(mode.default_k());
    let tau = overrides.tau.unwrap_or(mode.default_tau());
    let gamma = overrides.gamma.unwrap_or(0.01);
    for (name, value) in [("k_const", k_const), ("tau", tau), ("gamma", gamma)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(ParamsError::BadConstant { name, value });
        }
    }
    if mode == Mode::Paper {
        let report = check_regime(n, delta, m, k_const);
        if report.recommended_action != RegimeAction::RunFull {
            return Err(ParamsError::OutsideRegime(report));
        }
    }

    let h = (m as f64 / k_const) * (1.0 / (delta * m as f64)).log2();
    let h_ceil = ceil_eps(h).max(1);
    let goal = tau * log2(n);
    let mut ladder = vec![2 * h_ceil + 1];
    while (*ladder.last().unwrap() as f64) < goal {
        let next = 3 * ladder.last().unwrap();
        ladder.push(next);
    }
    let l = 8 * h_ceil;
    let r = ceil_eps(l as f64 * 2f64.powf(0.01 * l as f64));
    Ok(ReconParams {
        n,
        delta,
        m_traces: m,
        k_const,
        tau,
        gamma,
        mode,
        h,
        h_ceil,
        ladder,
        l,
        g: l / 2,
        r,
        target_distance_budget: 2f64.powf(-0.01 * h) * n as f64,
    })
}
