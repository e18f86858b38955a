//! Executable pieces of the lower-bound argument: the atomic two-binomial
//! test, its direct sum over `B` coordinates, and the embedding of such an
//! instance into a reconstruction problem.

mod atomic;
mod embedding;
mod prlp;

pub use atomic::{
    bayes_decide_atomic, exact_atomic_failure_prob, monte_carlo_atomic_failure, sample_atomic, AtomicProblem,
    MonteCarloEstimate, EXACT_ENUMERATION_MAX_M,
};
pub use embedding::{
    build_alpha_beta, embed_instance, extract_z, find_pattern_occurrences, simulate_aprlp, AprlpRun, EmbeddingSpec,
};
pub use prlp::{decode_prlp_bayes, sample_prlp, PrlpInstance};

use thiserror::Error;

/// A pair of surviving run lengths.
pub type CountPair = (usize, usize);

#[derive(Debug, Error, PartialEq)]
pub enum LowerBoundError {
    #[error("pair {pair:?} has probability zero under both hypotheses (M = {m})")]
    OutsideSupport { pair: CountPair, m: usize },
    #[error("exact enumeration supports M <= {max}, got {m}")]
    EnumerationTooLarge { m: usize, max: usize },
    #[error("delta must lie in [0, 1], got {0}")]
    DeltaOutOfRange(f64),
}
