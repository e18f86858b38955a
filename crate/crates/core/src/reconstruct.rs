//! The outer loop: align around the reference cursor, vote out a segment, move on.

use serde::{Deserialize, Serialize};

use crate::align::{AlignFailure, Aligner};
use crate::bma::bma_run;
use crate::params::{check_regime, derive_params, reduced_trace_count, Mode, Overrides, ReconParams, RegimeAction};
use crate::strings::BitString;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// Reference cursor the iteration started from.
    pub ell_star: usize,
    /// Length of the appended BMA output: 0 or `R`.
    pub len: usize,
    /// Set when alignment gave up and every trace cursor was reset to 1.
    pub align_failure: Option<AlignFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconResult {
    pub hypothesis: BitString,
    pub segments: Vec<Segment>,
    pub regime_action: RegimeAction,
}

/// Reconstruct from the reference trace `y_star` and the `M` other traces.
///
/// The reference cursor starts at the edge margin and each iteration restarts
/// one past the reference trace's final cursor in the previous BMA run, so the
/// loop makes progress even when BMA gives up.
pub fn reconstruct(params: &ReconParams, y_star: &BitString, traces: &[BitString]) -> ReconResult {
    let aligner = Aligner::new(params, traces).expect("params derived for this many traces");
    let margin = params.effective_margin(y_star.len());
    let r = params.r;
    let mut sequences = Vec::with_capacity(traces.len() + 1);
    sequences.push(y_star.clone());
    sequences.extend_from_slice(traces);

    let mut hypothesis = BitString::new();
    let mut segments = Vec::new();
    let mut ell_star = margin;
    while ell_star + r <= y_star.len() && ell_star + margin <= y_star.len() {
        let (config, diag) = aligner.align(ell_star, y_star).expect("cursor within the loop range");
        let mut starts = Vec::with_capacity(sequences.len());
        starts.push(ell_star);
        starts.extend_from_slice(&config.cursors);
        let run = bma_run(&sequences, &starts, r);
        hypothesis.extend_from(&run.output);
        segments.push(Segment { ell_star, len: run.output.len(), align_failure: diag.failure });
        ell_star = run.final_cursors[0] + 1;
    }

    if segments.is_empty() && params.mode == Mode::Paper {
        return ReconResult { hypothesis: y_star.clone(), segments, regime_action: RegimeAction::OutputSingleTrace };
    }
    ReconResult { hypothesis, segments, regime_action: RegimeAction::RunFull }
}

/// Reconstruct with the small-regime shortcuts: `traces[0]` is the reference
/// and the next `m` traces (at most) are the others.
///
/// Outside the analysed regime this either returns `traces[0]` outright or
/// retries with the largest smaller trace count that fits.
pub fn reconstruct_with_fallback(
    n: usize,
    delta: f64,
    m: usize,
    traces: &[BitString],
    overrides: Overrides,
) -> ReconResult {
    assert!(!traces.is_empty(), "need at least the reference trace");
    let single = |action| ReconResult { hypothesis: traces[0].clone(), segments: Vec::new(), regime_action: action };
    let m = m.min(traces.len() - 1);
    if m == 0 {
        return single(RegimeAction::OutputSingleTrace);
    }
    let k = overrides.k_const.unwrap_or(overrides.mode.default_k());
    match check_regime(n, delta, m, k).recommended_action {
        RegimeAction::OutputSingleTrace => single(RegimeAction::OutputSingleTrace),
        RegimeAction::ReduceM => match reduced_trace_count(n, delta, m, k) {
            Some(mp) => {
                let mut res = reconstruct_with_fallback(n, delta, mp, traces, overrides);
                if res.regime_action == RegimeAction::RunFull {
                    res.regime_action = RegimeAction::ReduceM;
                }
                res
            }
            None => single(RegimeAction::OutputSingleTrace),
        },
        RegimeAction::RunFull => match derive_params(n, delta, m, overrides) {
            Ok(params) => reconstruct(&params, &traces[0], &traces[1..=m]),
            Err(_) => single(RegimeAction::OutputSingleTrace),
        },
    }
}
