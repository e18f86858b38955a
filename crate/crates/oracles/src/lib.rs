//! Slow, literal reference implementations used as ground truth in tests.
//!
//! Everything here works on plain `&[u8]` words of 0/1 values (and 2 for the
//! padding symbol), so it shares no code with the library under test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Padding symbol in [`bma_literal`].
pub const STAR: u8 = 2;

#[derive(Debug, PartialEq, Eq)]
pub struct Oversize;

/// Textbook LCS table; `table[i][j]` is the LCS of `a[..i]` and `b[..j]`.
pub fn lcs_table(a: &[u8], b: &[u8]) -> Vec<Vec<usize>> {
    let mut t = vec![vec![0; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
        }
    }
    t
}

pub fn lcs_length(a: &[u8], b: &[u8]) -> usize {
    lcs_table(a, b)[a.len()][b.len()]
}

/// `|a| + |b| - 2 LCS(a, b)` by full DP. Refuses tables above `10^8` cells.
pub fn edit_distance_dp(a: &[u8], b: &[u8]) -> Result<usize, Oversize> {
    if a.len().saturating_mul(b.len()) > 100_000_000 {
        return Err(Oversize);
    }
    Ok(a.len() + b.len() - 2 * lcs_length(a, b))
}

/// Algorithm-3 style majority alignment with the padding written out.
/// Returns the output (empty if a `*` was emitted) and the final cursors.
pub fn bma_literal(sequences: &[Vec<u8>], cursors: &[usize], r: usize) -> (Vec<u8>, Vec<usize>) {
    let padded: Vec<Vec<u8>> = sequences
        .iter()
        .zip(cursors)
        .map(|(s, &c)| {
            let mut p = s.clone();
            // Enough stars that no cursor can run off the end.
            p.resize(s.len().max(c) + r + 1, STAR);
            p
        })
        .collect();
    let mut cur = cursors.to_vec();
    let mut w = Vec::new();
    for _t in 1..=r {
        let symbols: Vec<u8> = padded.iter().zip(&cur).map(|(p, &c)| p[c - 1]).collect();
        let count = |v: u8| symbols.iter().filter(|&&s| s == v).count();
        let (c0, c1, cs) = (count(0), count(1), count(STAR));
        let wt = if c0 >= c1 && c0 >= cs {
            0
        } else if c1 >= cs {
            1
        } else {
            STAR
        };
        w.push(wt);
        for (c, &s) in cur.iter_mut().zip(&symbols) {
            if s == wt {
                *c += 1;
            }
        }
    }
    if w.contains(&STAR) {
        (Vec::new(), cur)
    } else {
        (w, cur)
    }
}

/// Whether `w` is a prefix of `s^inf` for `s = w[..k]`, by building `s^inf`.
pub fn is_k_desert_naive(w: &[u8], k: usize) -> bool {
    w.iter().enumerate().all(|(i, &c)| c == w[i % k])
}

/// 1-based starts of length-`l` windows that are `k`-deserts for some `k <= g`.
pub fn desert_scan_naive(x: &[u8], l: usize, g: usize) -> Vec<usize> {
    if x.len() < l {
        return Vec::new();
    }
    (0..=x.len() - l)
        .filter(|&p| (1..=g).any(|k| is_k_desert_naive(&x[p..p + l], k)))
        .map(|p| p + 1)
        .collect()
}

/// Number of length-`w` windows holding at least one long desert.
pub fn count_windows_naive(x: &[u8], l: usize, g: usize, w: usize) -> usize {
    if x.len() < w {
        return 0;
    }
    (0..=x.len() - w).filter(|&i| !desert_scan_naive(&x[i..i + w], l, g).is_empty()).count()
}

/// First `(start, len)` (1-based, inclusive window `[start : start+len-1]`)
/// inside `[lo : hi]` within `max_dist` of `template`, scanning starts then lengths.
pub fn closest_subword_naive(template: &[u8], hay: &[u8], lo: usize, hi: usize, max_dist: usize) -> Option<(usize, usize)> {
    let t = template.len();
    for start in lo..=hi {
        for len in t.saturating_sub(max_dist).max(1)..=t + max_dist {
            if start + len - 1 > hi {
                break;
            }
            if edit_distance_dp(template, &hay[start - 1..start - 1 + len]).unwrap() <= max_dist {
                return Some((start, len));
            }
        }
    }
    None
}

/// Leftmost 1-based start of `needle` in `hay`.
pub fn find_naive(hay: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&p| &hay[p..p + needle.len()] == needle).map(|p| p + 1)
}

/// First length-`len` word (windows in order, starts ascending) occurring in
/// at least `threshold` windows, with its leftmost start in each window.
pub fn common_word_naive(windows: &[Vec<u8>], len: usize, threshold: usize) -> Option<(Vec<u8>, Vec<Option<usize>>)> {
    for w in windows {
        if w.len() < len {
            continue;
        }
        for p in 0..=w.len() - len {
            let word = &w[p..p + len];
            let starts: Vec<Option<usize>> = windows.iter().map(|v| find_naive(v, word)).collect();
            if starts.iter().filter(|s| s.is_some()).count() >= threshold {
                return Some((word.to_vec(), starts));
            }
        }
    }
    None
}

/// Parameters consumed by [`align_literal`].
pub struct AlignSetup<'a> {
    pub ladder: &'a [usize],
    pub tolerances: &'a [usize],
    pub word_len: usize,
    pub threshold: usize,
}

/// Two-stage alignment without shortcuts: every window is checked with the
/// full DP. Returns all-ones on failure.
pub fn align_literal(setup: &AlignSetup, ell_star: usize, y_star: &[u8], traces: &[Vec<u8>]) -> Vec<usize> {
    let fail = vec![1; traces.len()];
    let templates: Vec<&[u8]> = setup
        .ladder
        .iter()
        .map(|&t| {
            let half = (t - 1) / 2;
            let lo = ell_star.saturating_sub(half).max(1);
            let hi = (ell_star + half).min(y_star.len());
            &y_star[lo - 1..hi]
        })
        .collect();
    let mut finals = Vec::new();
    for y in traces {
        if y.is_empty() {
            return fail;
        }
        let (mut lo, mut hi) = (1, y.len());
        for s in (0..setup.ladder.len()).rev() {
            match closest_subword_naive(templates[s], y, lo, hi, setup.tolerances[s]) {
                Some((start, len)) => (lo, hi) = (start, start + len - 1),
                None => return fail,
            }
        }
        finals.push((lo, hi));
    }
    let windows: Vec<Vec<u8>> = traces.iter().zip(&finals).map(|(y, &(lo, hi))| y[lo - 1..hi].to_vec()).collect();
    match common_word_naive(&windows, setup.word_len, setup.threshold) {
        Some((_, starts)) => starts.iter().zip(&finals).map(|(s, &(lo, _))| s.map_or(1, |o| lo + o - 1)).collect(),
        None => fail,
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Exact `Bin(n, p)` mass at `k`.
pub fn binomial_pmf_exact(n: usize, k: usize, p: &BigRational) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    BigRational::from_integer(binomial(n, k)) * pow(p, k) * pow(&q, n - k)
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Exact mass of `(a, b)` under `Bin(M, 1-delta) x Bin(M+1, 1-delta)`
/// (`swapped = false`) or its coordinate swap.
pub fn pair_pmf_exact(m: usize, delta: &BigRational, pair: (usize, usize), swapped: bool) -> BigRational {
    let keep = BigRational::one() - delta;
    let (n0, n1) = if swapped { (m + 1, m) } else { (m, m + 1) };
    binomial_pmf_exact(n0, pair.0, &keep) * binomial_pmf_exact(n1, pair.1, &keep)
}

/// `(1/2) sum min(P_0, P_1)` over every `M`-tuple of pairs, exactly.
pub fn atomic_failure_exact(m: usize, delta: &BigRational) -> BigRational {
    let points: Vec<(usize, usize)> = (0..=m + 1).flat_map(|a| (0..=m + 1).map(move |b| (a, b))).collect();
    let weights: Vec<(BigRational, BigRational)> = points
        .iter()
        .map(|&p| (pair_pmf_exact(m, delta, p, false), pair_pmf_exact(m, delta, p, true)))
        .filter(|(a, b)| !a.is_zero() || !b.is_zero())
        .collect();
    let mut total = BigRational::zero();
    let mut idx = vec![0usize; m];
    loop {
        let (mut p0, mut p1) = (BigRational::one(), BigRational::one());
        for &i in &idx {
            p0 *= &weights[i].0;
            p1 *= &weights[i].1;
        }
        total += if p0 < p1 { p0 } else { p1 };
        // Odometer over all tuples.
        let mut k = 0;
        loop {
            if k == m {
                return total / BigRational::from_integer(BigInt::from(2));
            }
            idx[k] += 1;
            if idx[k] < weights.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Exact Bayes decision on an `M`-tuple of pairs (ties to 0).
pub fn bayes_decide_exact(pairs: &[(usize, usize)], m: usize, delta: &BigRational) -> bool {
    let l0 = pairs.iter().fold(BigRational::one(), |acc, &p| acc * pair_pmf_exact(m, delta, p, false));
    let l1 = pairs.iter().fold(BigRational::one(), |acc, &p| acc * pair_pmf_exact(m, delta, p, true));
    l0 < l1
}

/// `delta` as an exact fraction `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
