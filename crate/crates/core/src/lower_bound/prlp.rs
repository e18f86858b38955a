use super::atomic::{bayes_decide_atomic, AtomicProblem};
use super::{CountPair, LowerBoundError};
use crate::rng::StreamKey;
use crate::strings::BitString;

/// `B` independent atomic problems sharing `M` and `delta`, with `M` draws.
#[derive(Clone, Debug, PartialEq)]
pub struct PrlpInstance {
    pub z: BitString,
    pub m: usize,
    pub delta: f64,
    /// `samples[m][b]` is draw `m` at coordinate `b` (both 0-based).
    pub samples: Vec<Vec<CountPair>>,
}

impl PrlpInstance {
    pub fn b(&self) -> usize {
        self.z.len()
    }
}

/// Draw `M` samples from the product distribution indexed by `z`.
pub fn sample_prlp(z: &BitString, m: usize, delta: f64, key: StreamKey) -> PrlpInstance {
    let problem = AtomicProblem::new(m, delta).expect("delta in [0, 1]");
    let mut rng = key.rng();
    let samples = (0..m).map(|_| z.iter().map(|bit| problem.sample(bit, &mut rng)).collect()).collect();
    PrlpInstance { z: z.clone(), m, delta, samples }
}

/// Coordinatewise Bayes decoder.
pub fn decode_prlp_bayes(samples: &[Vec<CountPair>], m: usize, delta: f64) -> Result<BitString, LowerBoundError> {
    let b = samples.first().map_or(0, Vec::len);
    let mut column = Vec::with_capacity(samples.len());
    (0..b)
        .map(|j| {
            column.clear();
            column.extend(samples.iter().map(|draw| draw[j]));
            bayes_decide_atomic(&column, m, delta)
        })
        .collect()
}
