use std::collections::{HashMap, HashSet};

use super::{BitString, Interval};

/// First interval `Q ⊆ search` with `edit_distance(template, haystack[Q]) <= max_dist`.
///
/// Candidates are visited by ascending start, then ascending length over
/// `[|template| - max_dist, |template| + max_dist]` (lengths below 1 are
/// skipped). Each start runs one banded prefix DP whose last row covers every
/// candidate length, and bails out once a whole row exceeds `max_dist`.
pub fn find_closest_subword(
    template: &BitString,
    haystack: &BitString,
    search: Interval,
    max_dist: usize,
) -> Option<Interval> {
    assert!(search.hi <= haystack.len(), "search window {search} exceeds haystack length {}", haystack.len());
    let t = template.len();
    let d = max_dist;
    let min_len = t.saturating_sub(d).max(1);
    if min_len > t + d || min_len > search.len() {
        return None;
    }
    if d == 0 {
        let p = haystack.find0(template, search.lo - 1, search.hi)?;
        return Some(Interval::new(p + 1, p + t));
    }

    let mut dp = BandedDp::new(d);
    (search.lo..=search.hi + 1 - min_len).find_map(|start| dp.best_length(template, haystack, start, search.hi, d))
}

/// Banded prefix DP of a template against haystack suffixes, reusable across starts.
struct BandedDp {
    prev: Vec<u32>,
    cur: Vec<u32>,
}

const INF: u32 = u32::MAX / 2;

impl BandedDp {
    fn new(d: usize) -> Self {
        BandedDp { prev: vec![INF; 2 * d + 1], cur: vec![INF; 2 * d + 1] }
    }

    /// Shortest acceptable window `[start, start + len - 1]` ending by `hi`.
    fn best_length(&mut self, template: &BitString, haystack: &BitString, start: usize, hi: usize, d: usize) -> Option<Interval> {
        let t = template.len();
        let width = 2 * d + 1;
        let min_len = t.saturating_sub(d).max(1);
        // Column j covers haystack[start .. start + j - 1]; cell (i, j) lives at j - i + d.
        let jmax = (t + d).min(hi + 1 - start);
        let (prev, cur) = (&mut self.prev, &mut self.cur);
        prev.fill(INF);
        for j in 0..=d.min(jmax) {
            prev[j + d] = j as u32;
        }
        for i in 1..=t {
            cur.fill(INF);
            let mut row_min = INF;
            let lo = i.saturating_sub(d);
            let hi_j = (i + d).min(jmax);
            let ti = template.get0(i - 1);
            for j in lo..=hi_j {
                let c = j + d - i;
                let val = if j == 0 {
                    i as u32
                } else if ti == haystack.get0(start + j - 2) {
                    prev[c]
                } else {
                    let up = if c + 1 < width { prev[c + 1] } else { INF };
                    let left = if c > 0 { cur[c - 1] } else { INF };
                    up.min(left) + 1
                };
                cur[c] = val;
                row_min = row_min.min(val);
            }
            std::mem::swap(prev, cur);
            if row_min as usize > d {
                return None;
            }
        }
        (min_len..=(t + d).min(jmax))
            .find(|&len| len + d >= t && (prev[len + d - t] as usize) <= d)
            .map(|len| Interval::new(start, start + len - 1))
    }
}

const KMER: usize = 16;

/// Positions of every 16-bit subword of a haystack, for repeated searches.
#[derive(Clone, Debug)]
pub struct SubwordIndex {
    offsets: Vec<u32>,
    positions: Vec<u32>,
    len: usize,
}

impl SubwordIndex {
    pub fn new(haystack: &BitString) -> Self {
        let n = haystack.len();
        let slots = 1usize << KMER;
        let count = if n >= KMER { n - KMER + 1 } else { 0 };
        let mut offsets = vec![0u32; slots + 1];
        for p in 0..count {
            offsets[haystack.bits0(p, KMER) as usize + 1] += 1;
        }
        for k in 0..slots {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut positions = vec![0u32; count];
        for p in 0..count {
            let key = haystack.bits0(p, KMER) as usize;
            positions[fill[key] as usize] = p as u32;
            fill[key] += 1;
        }
        SubwordIndex { offsets, positions, len: n }
    }

    /// 0-based starts of the 16-bit word `key`, ascending.
    fn hits(&self, key: u64) -> &[u32] {
        let k = key as usize;
        &self.positions[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }
}

/// [`find_closest_subword`] over a pre-indexed haystack; same result.
///
/// The template is cut into `max_dist + 1` pieces. Any window within
/// `max_dist` contains one piece verbatim, shifted by at most `max_dist`, so
/// only starts near an exact piece hit need the DP.
pub fn find_closest_subword_indexed(
    template: &BitString,
    haystack: &BitString,
    index: &SubwordIndex,
    search: Interval,
    max_dist: usize,
) -> Option<Interval> {
    assert_eq!(index.len, haystack.len(), "index built for another haystack");
    let t = template.len();
    let d = max_dist;
    let piece = t / (d + 1);
    let window = search.len();
    if piece < KMER || window <= 8 * (t + d) {
        return find_closest_subword(template, haystack, search, max_dist);
    }
    let min_len = t.saturating_sub(d).max(1);
    if min_len > window {
        return None;
    }
    let (lo0, last_start0) = (search.lo - 1, search.hi - min_len);
    let mut starts = Vec::new();
    for k in 0..=d {
        let offset = k * piece;
        let key = template.bits0(offset, KMER);
        for &h in index.hits(key) {
            let h = h as usize;
            if h + piece > haystack.len() || !BitString::range_eq(template, offset + KMER, haystack, h + KMER, piece - KMER) {
                continue;
            }
            let centre = h as isize - offset as isize;
            let from = (centre - d as isize).max(lo0 as isize);
            let to = (centre + d as isize).min(last_start0 as isize);
            starts.extend((from..=to).map(|p| p as usize));
        }
    }
    starts.sort_unstable();
    starts.dedup();
    let mut dp = BandedDp::new(d);
    starts.into_iter().find_map(|p0| dp.best_length(template, haystack, p0 + 1, search.hi, d))
}

/// A word shared by enough windows, with its leftmost 1-based start in each
/// window (`None` where it does not occur).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonWord {
    pub word: BitString,
    pub starts: Vec<Option<usize>>,
}

/// First length-`word_len` subword (windows in order, starts ascending) that
/// occurs in at least `threshold` of the windows.
pub fn find_common_word(windows: &[BitString], word_len: usize, threshold: usize) -> Option<CommonWord> {
    assert!(word_len >= 1, "word_len must be positive");
    let mut counts: HashMap<BitString, usize> = HashMap::new();
    for w in windows {
        if w.len() < word_len {
            continue;
        }
        let distinct: HashSet<BitString> = (0..=w.len() - word_len).map(|p| w.slice0(p, word_len)).collect();
        for word in distinct {
            *counts.entry(word).or_default() += 1;
        }
    }
    let word = windows
        .iter()
        .filter(|w| w.len() >= word_len)
        .flat_map(|w| (0..=w.len() - word_len).map(move |p| w.slice0(p, word_len)))
        .find(|word| counts.get(word).copied().unwrap_or(0) >= threshold)?;
    let starts = windows.iter().map(|w| w.find(&word)).collect();
    Some(CommonWord { word, starts })
}
