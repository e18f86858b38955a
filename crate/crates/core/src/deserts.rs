//! Periodic stretches ("deserts") that defeat majority alignment.

use crate::strings::BitString;

/// Whether `w` has period `k`: `w[i] == w[i + k]` for every valid `i`.
/// Words no longer than `k` qualify vacuously.
pub fn is_k_desert(w: &BitString, k: usize) -> bool {
    assert!(k >= 1, "period must be positive");
    w.len() <= k || BitString::range_eq(w, 0, w, k, w.len() - k)
}

/// Marks every 0-based start `p` such that `w[p..p + l]` has some period `k <= g`.
pub fn long_desert_starts(w: &BitString, l: usize, g: usize) -> Vec<bool> {
    assert!(1 <= g && g <= l, "need 1 <= G <= L");
    let n = w.len();
    if n < l {
        return Vec::new();
    }
    let mut starts = vec![false; n - l + 1];
    let mut run = vec![0u32; n + 1];
    for k in 1..=g {
        let need = (l - k) as u32;
        if need == 0 {
            starts.fill(true);
            break;
        }
        // run[i] = length of the streak of w[j] == w[j + k] starting at j = i.
        run[n - k] = 0;
        for i in (0..n - k).rev() {
            run[i] = if w.get0(i) == w.get0(i + k) { run[i + 1] + 1 } else { 0 };
        }
        for (p, s) in starts.iter_mut().enumerate() {
            *s |= run[p] >= need;
        }
    }
    starts
}

/// Whether some length-`l` subword of `w` is a `k`-desert with `k <= g`.
pub fn contains_long_desert(w: &BitString, l: usize, g: usize) -> bool {
    long_desert_starts(w, l, g).contains(&true)
}

/// Number of length-`window` subwords of `x` that contain a long desert.
pub fn count_windows_with_long_desert(x: &BitString, l: usize, g: usize, window: usize) -> usize {
    assert!(window >= l, "window must be at least L");
    if x.len() < window {
        return 0;
    }
    let starts = long_desert_starts(x, l, g);
    let mut prefix = Vec::with_capacity(starts.len() + 1);
    prefix.push(0usize);
    for &s in &starts {
        prefix.push(prefix.last().unwrap() + usize::from(s));
    }
    // Window at i holds the desert starts i..=i + window - l.
    (0..=x.len() - window).filter(|&i| prefix[i + window - l + 1] > prefix[i]).count()
}
