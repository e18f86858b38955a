//! The deletion channel, with the provenance of every surviving bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::StreamKey;
use crate::strings::BitString;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("deleted index {index} outside [1:{n}]")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("trace has length {trace} but n - |deleted| = {expected}")]
    LengthMismatch { trace: usize, expected: usize },
}

/// A trace of an `n`-bit source, its deletion set and the induced source map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord", into = "RawRecord")]
pub struct TraceRecord {
    source_len: usize,
    trace: BitString,
    deleted: Vec<usize>,
    source_map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawRecord {
    n: usize,
    trace: BitString,
    deleted: Vec<usize>,
}

impl TryFrom<RawRecord> for TraceRecord {
    type Error = ChannelError;

    fn try_from(raw: RawRecord) -> Result<Self, Self::Error> {
        let deleted = normalize(raw.deleted, raw.n)?;
        let expected = raw.n - deleted.len();
        if raw.trace.len() != expected {
            return Err(ChannelError::LengthMismatch { trace: raw.trace.len(), expected });
        }
        let source_map = kept_indices(raw.n, &deleted);
        Ok(TraceRecord { source_len: raw.n, trace: raw.trace, deleted, source_map })
    }
}

impl From<TraceRecord> for RawRecord {
    fn from(rec: TraceRecord) -> Self {
        RawRecord { n: rec.source_len, trace: rec.trace, deleted: rec.deleted }
    }
}

fn normalize(mut deleted: Vec<usize>, n: usize) -> Result<Vec<usize>, ChannelError> {
    deleted.sort_unstable();
    deleted.dedup();
    if let Some(&index) = deleted.iter().find(|&&i| i == 0 || i > n) {
        return Err(ChannelError::IndexOutOfRange { index, n });
    }
    Ok(deleted)
}

fn kept_indices(n: usize, deleted: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - deleted.len());
    let mut d = deleted.iter().peekable();
    for i in 1..=n {
        if d.peek() == Some(&&i) {
            d.next();
        } else {
            out.push(i);
        }
    }
    out
}

impl TraceRecord {
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn trace(&self) -> &BitString {
        &self.trace
    }

    pub fn into_trace(self) -> BitString {
        self.trace
    }

    /// Sorted 1-based deleted indices.
    pub fn deleted(&self) -> &[usize] {
        &self.deleted
    }

    /// `source_map()[q - 1]` is the source index of trace bit `q`.
    pub fn source_map(&self) -> &[usize] {
        &self.source_map
    }

    /// Source index of trace position `q`; positions past the end continue
    /// into virtual padding as `n + (q - |trace|)`.
    pub fn source_of(&self, q: usize) -> usize {
        assert!(q >= 1, "trace positions are 1-based");
        match self.source_map.get(q - 1) {
            Some(&i) => i,
            None => self.source_len + (q - self.trace.len()),
        }
    }

    /// Smallest trace position whose source is at least `i`, or `|trace| + 1`.
    pub fn image_ceil(&self, i: usize) -> usize {
        self.source_map.partition_point(|&s| s < i) + 1
    }

    /// Trace position produced by source index `i`, or `None` if it was deleted.
    pub fn image(&self, i: usize) -> Option<usize> {
        self.source_map.binary_search(&i).ok().map(|q| q + 1)
    }

    /// Whether this record could have been produced from `x`.
    pub fn is_consistent_with(&self, x: &BitString) -> bool {
        x.len() == self.source_len
            && self.trace.iter().zip(&self.source_map).all(|(b, &i)| x.get(i) == b)
    }
}

/// The record induced by deleting exactly the 1-based indices in `deleted`.
pub fn apply_deletions(x: &BitString, deleted: &[usize]) -> Result<TraceRecord, ChannelError> {
    let deleted = normalize(deleted.to_vec(), x.len())?;
    let source_map = kept_indices(x.len(), &deleted);
    let trace = source_map.iter().map(|&i| x.get0(i - 1)).collect();
    Ok(TraceRecord { source_len: x.len(), trace, deleted, source_map })
}

/// Pass `x` through the deletion channel. Bit `i` is deleted iff the `i`-th
/// uniform of `key` falls below `delta`, so a key always reproduces the same
/// record regardless of what else is sampled.
pub fn transmit(x: &BitString, delta: f64, key: StreamKey) -> TraceRecord {
    assert!((0.0..=1.0).contains(&delta), "delta must lie in [0, 1]");
    let mut deleted = Vec::new();
    let mut source_map = Vec::with_capacity(x.len());
    let mut trace = BitString::with_capacity(x.len());
    for i in 0..x.len() {
        if key.uniform(i as u64) < delta {
            deleted.push(i + 1);
        } else {
            source_map.push(i + 1);
            trace.push(x.get0(i));
        }
    }
    TraceRecord { source_len: x.len(), trace, deleted, source_map }
}
