//! Average-case approximate trace reconstruction over the binary deletion channel.
//!
//! The pipeline alternates [`align`] (coarse-to-fine window search that puts the
//! traces in consensus around a reference cursor) with [`bma`] (bitwise majority
//! alignment over trace suffixes), driven by [`reconstruct`]. [`lower_bound`]
//! carries the matching hardness constructions as runnable experiments: the
//! binomial distinguishing problem, its direct sum, and the α/β embedding.
//!
//! Positions are 1-based at every public surface, matching the usual notation
//! `x[i:j]` for inclusive subwords.

pub mod align;
pub mod bma;
pub mod channel;
pub mod deserts;
pub mod lower_bound;
pub mod params;
pub mod reconstruct;
pub mod rng;
pub mod strings;

pub use align::{align, consensus_check, Aligner, AlignDiagnostics, AlignError, AlignFailure, Configuration};
pub use bma::{bma_run, bma_star, bma_with_provenance, BmaRun, ProvenanceRun};
pub use channel::{apply_deletions, transmit, ChannelError, TraceRecord};
pub use params::{check_regime, derive_params, Mode, Overrides, ParamsError, ReconParams, RegimeAction, RegimeReport};
pub use reconstruct::{reconstruct, reconstruct_with_fallback, ReconResult, Segment};
pub use rng::StreamKey;
pub use strings::{edit_distance, edit_distance_within, BitString, Interval, Matching};
