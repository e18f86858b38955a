//! Two-stage alignment of the traces around a reference cursor.
//!
//! Stage 1 narrows a window in every trace with templates cut from the
//! reference trace, from the widest to the narrowest. Stage 2 looks for a word
//! shared by most of the final windows and puts each cursor at its start.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::TraceRecord;
use crate::params::{Mode, ReconParams};
use crate::strings::{find_closest_subword_indexed, find_common_word, BitString, Interval, SubwordIndex};

/// One cursor per trace, plus the reference cursor they were aligned to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub ell_star: usize,
    pub cursors: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum AlignFailure {
    /// No window near template `s` in trace `trace` (0-based).
    Window { trace: usize, s: usize },
    /// No word was shared by enough of the final windows.
    CommonWord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignDiagnostics {
    /// `reference_windows[s - 1]` is the window of the reference trace used as template `s`.
    pub reference_windows: Vec<Interval>,
    /// True when a reference window was cut short at an end of the reference trace.
    pub clamped: bool,
    /// `trace_windows[m][s - 1]`, filled for the stages trace `m` got through.
    pub trace_windows: Vec<Vec<Option<Interval>>>,
    pub common_word: Option<BitString>,
    pub failure: Option<AlignFailure>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("reference cursor {ell_star} outside the allowed range [{lo}:{hi}]")]
    EllStarOutOfRange { ell_star: usize, lo: usize, hi: usize },
    #[error("expected {expected} traces, got {got}")]
    TraceCount { expected: usize, got: usize },
}

/// Align state for a fixed set of traces, reusable across reference cursors.
pub struct Aligner<'a> {
    params: &'a ReconParams,
    traces: &'a [BitString],
    indexes: Vec<SubwordIndex>,
}

impl<'a> Aligner<'a> {
    pub fn new(params: &'a ReconParams, traces: &'a [BitString]) -> Result<Self, AlignError> {
        if traces.len() != params.m_traces {
            return Err(AlignError::TraceCount { expected: params.m_traces, got: traces.len() });
        }
        let indexes = traces.iter().map(SubwordIndex::new).collect();
        Ok(Aligner { params, traces, indexes })
    }

    pub fn align(&self, ell_star: usize, y_star: &BitString) -> Result<(Configuration, AlignDiagnostics), AlignError> {
        let p = self.params;
        let (lo, hi) = match p.mode {
            Mode::Paper => {
                let margin = p.edge_margin();
                (margin, y_star.len().saturating_sub(margin))
            }
            Mode::Desk => (1, y_star.len()),
        };
        if ell_star < lo.max(1) || ell_star > hi {
            return Err(AlignError::EllStarOutOfRange { ell_star, lo, hi });
        }

        let mut diag = AlignDiagnostics::default();
        let mut templates = Vec::with_capacity(p.s());
        for s in 1..=p.s() {
            let half = (p.t(s) - 1) / 2;
            let (wlo, whi) = (ell_star.saturating_sub(half).max(1), (ell_star + half).min(y_star.len()));
            diag.clamped |= whi - wlo + 1 != p.t(s);
            let q = Interval::new(wlo, whi);
            diag.reference_windows.push(q);
            templates.push(y_star.window(q));
        }

        let all_ones = Configuration { ell_star, cursors: vec![1; self.traces.len()] };
        let mut finals = Vec::with_capacity(self.traces.len());
        for (m, (y, index)) in self.traces.iter().zip(&self.indexes).enumerate() {
            let mut windows = vec![None; p.s()];
            let mut q = Interval::checked(1, y.len());
            for s in (1..=p.s()).rev() {
                q = q.and_then(|outer| {
                    find_closest_subword_indexed(&templates[s - 1], y, index, outer, p.stage_tolerance(s))
                });
                windows[s - 1] = q;
                if q.is_none() {
                    diag.trace_windows.push(windows);
                    diag.failure = Some(AlignFailure::Window { trace: m, s });
                    return Ok((all_ones, diag));
                }
            }
            finals.push(windows[0].expect("stage 1 window"));
            diag.trace_windows.push(windows);
        }

        let subwords: Vec<BitString> = self.traces.iter().zip(&finals).map(|(y, &q)| y.window(q)).collect();
        let Some(common) = find_common_word(&subwords, p.word_len(), p.common_word_threshold()) else {
            diag.failure = Some(AlignFailure::CommonWord);
            return Ok((all_ones, diag));
        };
        let cursors = finals
            .iter()
            .zip(&common.starts)
            .map(|(q, start)| start.map_or(1, |o| q.lo + o - 1))
            .collect();
        diag.common_word = Some(common.word);
        Ok((Configuration { ell_star, cursors }, diag))
    }
}

/// Align every trace to the reference cursor `ell_star` of `y_star`.
///
/// Deterministic; on failure of either stage every cursor is 1 and the
/// failing stage is recorded. Desk mode accepts any cursor inside the
/// reference trace and cuts reference windows at its ends; paper mode insists
/// on the full edge margin.
pub fn align(
    params: &ReconParams,
    ell_star: usize,
    y_star: &BitString,
    traces: &[BitString],
) -> Result<(Configuration, AlignDiagnostics), AlignError> {
    Aligner::new(params, traces)?.align(ell_star, y_star)
}

/// Whether at least `threshold` cursors originate at one source index, and
/// the most common such index (the smallest on ties). Needs ground truth.
pub fn consensus_check(config: &Configuration, records: &[TraceRecord], threshold: usize) -> (bool, Option<usize>) {
    assert_eq!(config.cursors.len(), records.len(), "one record per cursor");
    let mut sources: Vec<usize> = config.cursors.iter().zip(records).map(|(&c, r)| r.source_of(c)).collect();
    sources.sort_unstable();
    let mut best: Option<(usize, usize)> = None;
    for run in sources.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, n)| run.len() > n) {
            best = Some((run[0], run.len()));
        }
    }
    match best {
        Some((i, n)) if n >= threshold => (true, Some(i)),
        _ => (false, None),
    }
}
