use serde::{Deserialize, Serialize};

use super::BitString;

/// A non-crossing set of equal-bit pairs `(i, j)` between two words, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// Checks bounds, monotonicity and bit equality against `a` and `b`.
    pub fn is_valid(&self, a: &BitString, b: &BitString) -> bool {
        let in_range = self.pairs.iter().all(|&(i, j)| {
            (1..=a.len()).contains(&i) && (1..=b.len()).contains(&j) && a.get(i) == b.get(j)
        });
        let increasing = self.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        in_range && increasing
    }
}

/// Indel distance `|a| + |b| - 2 LCS(a, b)` if it is at most `cap`.
///
/// Diagonal-transition search: `O((|a| + |b|) * cap)` worst case, and close to
/// `O(|a| + |b| + d^2)` when the strings are similar, with snakes compared 64
/// bits at a time.
pub fn edit_distance_within(a: &BitString, b: &BitString, cap: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > cap {
        return None;
    }
    let cap = cap.min(n + m);
    let (ni, mi) = (n as isize, m as isize);
    // v[k + off] = furthest x reached on diagonal k = x - y, or -1 if unreached.
    let off = cap as isize + 1;
    let mut v = vec![-1isize; 2 * cap + 3];
    for d in 0..=cap as isize {
        let mut k = (-d).max(-mi + (d + mi) % 2);
        while k <= d.min(ni) {
            let idx = (k + off) as usize;
            let mut x = if d == 0 {
                0
            } else {
                let mut best = -1;
                if k < d && v[idx + 1] >= 0 && v[idx + 1] - k <= mi {
                    best = v[idx + 1];
                }
                if k > -d && v[idx - 1] >= 0 && v[idx - 1] < ni {
                    best = best.max(v[idx - 1] + 1);
                }
                best
            };
            if x >= 0 {
                x += BitString::common_prefix(a, x as usize, b, (x - k) as usize) as isize;
                if x == ni && x - k == mi {
                    return Some(d as usize);
                }
            }
            v[idx] = x;
            k += 2;
        }
    }
    None
}

/// Indel edit distance. Symmetric, and zero iff `a == b`.
///
/// Doubles a diagonal-transition cap while that is cheaper than a full
/// bit-parallel pass, then finishes with the bit-parallel LCS.
pub fn edit_distance(a: &BitString, b: &BitString) -> usize {
    let total = a.len() + b.len();
    let full_pass = (a.len() as u128 * b.len() as u128) / 64;
    let mut cap = a.len().abs_diff(b.len()).max(32);
    loop {
        if let Some(d) = edit_distance_within(a, b, cap.min(total)) {
            return d;
        }
        cap *= 2;
        if cap as u128 * total as u128 > full_pass {
            return total - 2 * lcs_bit_parallel(a, b);
        }
    }
}

pub fn lcs_length(a: &BitString, b: &BitString) -> usize {
    (a.len() + b.len() - edit_distance(a, b)) / 2
}

/// LCS length in `O(|a| |b| / 64)` word operations (Allison-Dix / Hyyro).
fn lcs_bit_parallel(a: &BitString, b: &BitString) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let n = a.len();
    if b.is_empty() {
        return 0;
    }
    let ones = a.words().to_vec();
    let zeros: Vec<u64> = ones.iter().map(|w| !w).collect();
    let mut v = vec![u64::MAX; ones.len()];
    for bit in b.iter() {
        let peq = if bit { &ones } else { &zeros };
        let mut carry = false;
        for (vw, &pw) in v.iter_mut().zip(peq) {
            let u = *vw & pw;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            carry = c1 || c2;
            *vw = s2 | (*vw & !pw);
        }
    }
    let tail = n % 64;
    if tail != 0 {
        *v.last_mut().unwrap() |= u64::MAX << tail;
    }
    v.iter().map(|w| w.count_zeros() as usize).sum()
}

/// A maximum matching from the full LCS table.
///
/// Backtracks from the end taking the diagonal on equal bits, otherwise
/// dropping from `a` first; so `("01", "10")` yields `[(1, 2)]`. Quadratic in
/// time and memory, meant for short words.
pub fn lcs_matching(a: &BitString, b: &BitString) -> Matching {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut t = vec![0u32; (n + 1) * w];
    for i in 1..=n {
        for j in 1..=m {
            t[i * w + j] = if a.get0(i - 1) == b.get0(j - 1) {
                t[(i - 1) * w + j - 1] + 1
            } else {
                t[(i - 1) * w + j].max(t[i * w + j - 1])
            };
        }
    }
    let (mut i, mut j) = (n, m);
    let mut pairs = Vec::with_capacity(t[n * w + m] as usize);
    while i > 0 && j > 0 {
        if a.get0(i - 1) == b.get0(j - 1) {
            pairs.push((i, j));
            i -= 1;
            j -= 1;
        } else if t[(i - 1) * w + j] >= t[i * w + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    Matching { pairs }
}
