use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{CountPair, LowerBoundError};
use crate::rng::StreamKey;

pub const EXACT_ENUMERATION_MAX_M: usize = 4;

/// `D_0 = Bin(M, 1-delta) x Bin(M+1, 1-delta)` against its coordinate swap `D_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomicProblem {
    pub m: usize,
    pub delta: f64,
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    // Exact at the endpoints so degenerate channels have clean supports.
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let mut c = 1.0;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

impl AtomicProblem {
    pub fn new(m: usize, delta: f64) -> Result<Self, LowerBoundError> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(LowerBoundError::DeltaOutOfRange(delta));
        }
        Ok(AtomicProblem { m, delta })
    }

    /// Probability of `pair` under `D_b`.
    pub fn pmf(&self, b: bool, pair: CountPair) -> f64 {
        let keep = 1.0 - self.delta;
        let (first, second) = if b { (self.m + 1, self.m) } else { (self.m, self.m + 1) };
        binomial_pmf(first, pair.0, keep) * binomial_pmf(second, pair.1, keep)
    }

    /// Every pair with positive probability under at least one hypothesis
    /// for some `delta`: `[0:M+1]^2` without `(M+1, M+1)`.
    pub fn union_support(&self) -> Vec<CountPair> {
        let top = self.m + 1;
        (0..=top).flat_map(|a| (0..=top).map(move |b| (a, b))).filter(|&p| p != (top, top)).collect()
    }

    pub fn sample(&self, b: bool, rng: &mut impl Rng) -> CountPair {
        let keep = 1.0 - self.delta;
        let short = Binomial::new(self.m as u64, keep).expect("valid binomial");
        let long = Binomial::new(self.m as u64 + 1, keep).expect("valid binomial");
        let (s, l) = (short.sample(rng) as usize, long.sample(rng) as usize);
        if b {
            (l, s)
        } else {
            (s, l)
        }
    }
}

pub fn sample_atomic(b: bool, m: usize, delta: f64, draws: usize, key: StreamKey) -> Vec<CountPair> {
    let problem = AtomicProblem::new(m, delta).expect("delta in [0, 1]");
    let mut rng = key.rng();
    (0..draws).map(|_| problem.sample(b, &mut rng)).collect()
}

/// Net exponents of the primes in `prod(num) / prod(den)`.
fn prime_balance(num: &[usize], den: &[usize], top: usize) -> Vec<i64> {
    let mut net = vec![0i64; top + 1];
    let mut add = |mut v: usize, sign: i64| {
        let mut p = 2;
        while p * p <= v {
            while v.is_multiple_of(p) {
                net[p] += sign;
                v /= p;
            }
            p += 1;
        }
        if v > 1 {
            net[v] += sign;
        }
    };
    for &v in num {
        add(v, 1);
    }
    for &v in den {
        add(v, -1);
    }
    net
}

/// Bayes-optimal guess of the hypothesis behind `pairs`, with ties going to 0.
///
/// For `0 < delta < 1` the per-pair likelihood ratio `P_0 / P_1` reduces to
/// `(M + 1 - a) / (M + 1 - b)` for the pair `(a, b)`, independent of `delta`.
/// The products are compared in log space after an exact prime-exponent
/// check, so genuine ties are recognised as ties.
pub fn bayes_decide_atomic(pairs: &[CountPair], m: usize, delta: f64) -> Result<bool, LowerBoundError> {
    let problem = AtomicProblem::new(m, delta)?;
    for &pair in pairs {
        if problem.pmf(false, pair) == 0.0 && problem.pmf(true, pair) == 0.0 {
            return Err(LowerBoundError::OutsideSupport { pair, m });
        }
    }
    if delta == 0.0 || delta == 1.0 {
        let l0: f64 = pairs.iter().map(|&p| problem.pmf(false, p)).product();
        let l1: f64 = pairs.iter().map(|&p| problem.pmf(true, p)).product();
        return Ok(l0 < l1);
    }
    let top = m + 1;
    // D_0 cannot produce a first count of M + 1, nor D_1 a second one.
    let zero_under_0 = pairs.iter().any(|&(a, _)| a == top);
    let zero_under_1 = pairs.iter().any(|&(_, b)| b == top);
    match (zero_under_0, zero_under_1) {
        (true, true) => return Ok(false),
        (true, false) => return Ok(true),
        (false, true) => return Ok(false),
        (false, false) => {}
    }
    let num: Vec<usize> = pairs.iter().map(|&(a, _)| top - a).collect();
    let den: Vec<usize> = pairs.iter().map(|&(_, b)| top - b).collect();
    let net = prime_balance(&num, &den, top);
    if net.iter().all(|&e| e == 0) {
        return Ok(false);
    }
    let log_ratio: f64 = net.iter().enumerate().filter(|(_, &e)| e != 0).map(|(p, &e)| e as f64 * (p as f64).ln()).sum();
    Ok(log_ratio < 0.0)
}

/// Optimal failure probability `(1/2) sum min(P_0, P_1)` over all `M`-tuples
/// of pairs, by exhaustive enumeration of the joint support.
pub fn exact_atomic_failure_prob(m: usize, delta: f64) -> Result<f64, LowerBoundError> {
    if m > EXACT_ENUMERATION_MAX_M {
        return Err(LowerBoundError::EnumerationTooLarge { m, max: EXACT_ENUMERATION_MAX_M });
    }
    let problem = AtomicProblem::new(m, delta)?;
    let weights: Vec<(f64, f64)> = problem
        .union_support()
        .into_iter()
        .map(|p| (problem.pmf(false, p), problem.pmf(true, p)))
        .filter(|&(p0, p1)| p0 > 0.0 || p1 > 0.0)
        .collect();

    fn walk(depth: usize, p0: f64, p1: f64, weights: &[(f64, f64)]) -> f64 {
        if depth == 0 {
            return p0.min(p1);
        }
        weights.iter().map(|&(w0, w1)| walk(depth - 1, p0 * w0, p1 * w1, weights)).sum()
    }
    Ok(0.5 * walk(m, 1.0, 1.0, &weights))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: usize,
    pub failures: usize,
}

impl MonteCarloEstimate {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    /// Binomial standard error of [`rate`](Self::rate).
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Failure rate of [`bayes_decide_atomic`] on a uniformly random hidden bit.
pub fn monte_carlo_atomic_failure(m: usize, delta: f64, trials: usize, key: StreamKey) -> MonteCarloEstimate {
    let problem = AtomicProblem::new(m, delta).expect("delta in [0, 1]");
    let mut rng = key.rng();
    let mut pairs = Vec::with_capacity(m);
    let mut failures = 0;
    for _ in 0..trials {
        let b: bool = rng.random();
        pairs.clear();
        pairs.extend((0..m).map(|_| problem.sample(b, &mut rng)));
        if bayes_decide_atomic(&pairs, m, delta).expect("sampled pairs lie in the support") != b {
            failures += 1;
        }
    }
    MonteCarloEstimate { trials, failures }
}
