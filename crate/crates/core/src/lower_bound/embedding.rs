use super::CountPair;
use crate::rng::StreamKey;
use crate::strings::{BitString, Interval};

/// Marker words and string length for embedding `B` atomic instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSpec {
    pub m: usize,
    pub b: usize,
    /// `N = 2M + 4`, the marker length.
    pub word_len: usize,
    /// `n = N 2^N B`.
    pub n: usize,
    pub alpha: BitString,
    pub beta: BitString,
}

impl EmbeddingSpec {
    pub fn new(m: usize, b: usize) -> Self {
        let (alpha, beta) = build_alpha_beta(m);
        let word_len = 2 * m + 4;
        let n = word_len.checked_shl(word_len as u32).and_then(|v| v.checked_mul(b)).expect("n fits in usize");
        EmbeddingSpec { m, b, word_len, n, alpha, beta }
    }

    /// `Some(false)` for alpha, `Some(true)` for beta at 0-based `p`.
    fn marker_at(&self, x: &BitString, p: usize) -> Option<bool> {
        let n = self.word_len;
        if p + n > x.len() {
            return None;
        }
        if BitString::range_eq(x, p, &self.alpha, 0, n) {
            Some(false)
        } else if BitString::range_eq(x, p, &self.beta, 0, n) {
            Some(true)
        } else {
            None
        }
    }

    /// Left-to-right marker occurrences with their kind, at most `limit`.
    fn markers(&self, x: &BitString, limit: usize) -> Vec<(Interval, bool)> {
        let mut out = Vec::new();
        let mut p = 0;
        while out.len() < limit && p + self.word_len <= x.len() {
            match self.marker_at(x, p) {
                Some(kind) => {
                    out.push((Interval::new(p + 1, p + self.word_len), kind));
                    p += self.word_len;
                }
                None => p += 1,
            }
        }
        out
    }
}

/// `alpha = 0^M 1 0^(M+1) 11` and `beta = 0^(M+1) 1 0^M 11`.
pub fn build_alpha_beta(m: usize) -> (BitString, BitString) {
    assert!(m >= 1, "M must be positive");
    let word = |lead: usize, mid: usize| {
        let mut w = BitString::run(false, lead);
        w.push(true);
        w.extend_from(&BitString::run(false, mid));
        w.extend_from(&BitString::run(true, 2));
        w
    };
    (word(m, m + 1), word(m + 1, m))
}

/// The first `limit` occurrences of either marker. Occurrences can never
/// overlap, so the greedy scan finds all of them.
pub fn find_pattern_occurrences(x: &BitString, spec: &EmbeddingSpec, limit: usize) -> Vec<Interval> {
    spec.markers(x, limit).into_iter().map(|(iv, _)| iv).collect()
}

/// Overwrite the `b`-th marker of `x_prime` with alpha if `z_b = 0`, beta otherwise.
pub fn embed_instance(z: &BitString, x_prime: &BitString, spec: &EmbeddingSpec) -> BitString {
    let mut out = BitString::with_capacity(x_prime.len());
    let mut copied = 0;
    for ((iv, _), bit) in spec.markers(x_prime, z.len()).into_iter().zip(z.iter()) {
        out.extend_from_range(x_prime, copied, iv.lo - 1 - copied);
        out.extend_from(if bit { &spec.beta } else { &spec.alpha });
        copied = iv.hi;
    }
    out.extend_from_range(x_prime, copied, x_prime.len() - copied);
    out
}

/// Read one bit per marker from the first `b` markers of `x_hat`.
pub fn extract_z(x_hat: &BitString, spec: &EmbeddingSpec, b: usize) -> BitString {
    spec.markers(x_hat, b).into_iter().map(|(_, kind)| kind).collect()
}

/// Everything produced by one simulated reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AprlpRun {
    pub x_prime: BitString,
    /// Markers of `x_prime` that carry a sample (`B'`).
    pub embedded: usize,
    pub traces: Vec<BitString>,
    pub x_hat: BitString,
    pub z_hat: BitString,
}

fn delete_range(x: &BitString, start: usize, len: usize, delta: f64, key: StreamKey, out: &mut BitString) {
    for i in start..start + len {
        if key.uniform(i as u64) >= delta {
            out.push(x.get0(i));
        }
    }
}

/// Simulate `M` traces of the embedded string from PRLP samples alone, run
/// `reconstructor` on them and read the hidden bits back off its output.
///
/// `samples[m][b]` must cover at least as many coordinates as `x_prime` has
/// usable markers. Non-marker bits of trace `m` use the deletion stream of
/// their own position in `x_prime`; each marker's lone `1` and final `11` get
/// fresh independent draws.
pub fn simulate_aprlp(
    samples: &[Vec<CountPair>],
    reconstructor: impl FnOnce(&[BitString]) -> BitString,
    spec: &EmbeddingSpec,
    delta: f64,
    key: StreamKey,
) -> AprlpRun {
    let x_prime = key.child(0).random_bits(spec.n);
    let markers = spec.markers(&x_prime, spec.b);
    let embedded = markers.len();
    let traces = samples
        .iter()
        .enumerate()
        .map(|(m, draws)| {
            assert!(draws.len() >= embedded, "sample {m} covers {} of {embedded} markers", draws.len());
            let gap_key = key.child(1).child(m as u64);
            let marker_key = key.child(2).child(m as u64);
            let mut y = BitString::with_capacity(spec.n);
            let mut copied = 0;
            for (b, ((iv, _), &(s1, s2))) in markers.iter().zip(draws).enumerate() {
                delete_range(&x_prime, copied, iv.lo - 1 - copied, delta, gap_key, &mut y);
                let draw = |j: u64| marker_key.uniform(3 * b as u64 + j) >= delta;
                y.extend_from(&BitString::run(false, s1));
                if draw(0) {
                    y.push(true);
                }
                y.extend_from(&BitString::run(false, s2));
                for j in 1..=2 {
                    if draw(j) {
                        y.push(true);
                    }
                }
                copied = iv.hi;
            }
            delete_range(&x_prime, copied, x_prime.len() - copied, delta, gap_key, &mut y);
            y
        })
        .collect::<Vec<_>>();
    let x_hat = reconstructor(&traces);
    let z_hat = extract_z(&x_hat, spec, spec.b);
    AprlpRun { x_prime, embedded, traces, x_hat, z_hat }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bits;

    #[test]
    fn marker_words() {
        assert_eq!(build_alpha_beta(1), (bits("010011"), bits("001011")));
        assert_eq!(build_alpha_beta(2), (bits("00100011"), bits("00010011")));
        assert_eq!(EmbeddingSpec::new(1, 2).n, 6 * 64 * 2);
    }

    #[test]
    fn occurrences_and_embedding() {
        let spec = EmbeddingSpec::new(1, 2);
        let ab = bits("010011001011");
        assert_eq!(find_pattern_occurrences(&ab, &spec, 2), vec![Interval::new(1, 6), Interval::new(7, 12)]);
        assert!(find_pattern_occurrences(&bits("111111"), &spec, 2).is_empty());

        let embedded = embed_instance(&bits("1"), &bits("010011111111"), &spec);
        assert_eq!(embedded, bits("001011111111"));
        assert_eq!(extract_z(&bits("001011010011"), &spec, 2), bits("10"));
        assert_eq!(extract_z(&bits("1111"), &spec, 2), BitString::new());
    }
}
