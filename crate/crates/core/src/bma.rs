//! Bitwise majority alignment over `*`-padded sequences.

use serde::{Deserialize, Serialize};

use crate::channel::TraceRecord;
use crate::strings::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    One,
    Star,
}

impl Symbol {
    fn read(seq: &BitString, q: usize) -> Symbol {
        if q <= seq.len() {
            if seq.get0(q - 1) {
                Symbol::One
            } else {
                Symbol::Zero
            }
        } else {
            Symbol::Star
        }
    }
}

/// Plurality vote; ties resolve as `0` before `1` before `*`.
pub fn plurality(zeros: usize, ones: usize, stars: usize) -> Symbol {
    if zeros >= ones && zeros >= stars {
        Symbol::Zero
    } else if ones >= stars {
        Symbol::One
    } else {
        Symbol::Star
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmaRun {
    /// The `R` emitted bits, or empty if any round emitted `*`.
    pub output: BitString,
    pub final_cursors: Vec<usize>,
    /// Round `t` (0-based here) had `margins[t]` sequences agreeing with the vote.
    pub margins: Vec<usize>,
    /// First 1-based round whose vote was `*`.
    pub first_star_round: Option<usize>,
}

impl BmaRun {
    pub fn succeeded(&self) -> bool {
        self.first_star_round.is_none()
    }

    pub fn min_margin(&self) -> Option<usize> {
        self.margins.iter().copied().min()
    }
}

/// Run `r` rounds of majority alignment on the suffixes of `sequences` that
/// begin at the 1-based `start_cursors`. Positions past a sequence's end read
/// as `*`, so there is nothing to materialize.
pub fn bma_run(sequences: &[BitString], start_cursors: &[usize], r: usize) -> BmaRun {
    bma_rounds(sequences, start_cursors, r, |_, _| {})
}

fn bma_rounds(
    sequences: &[BitString],
    start_cursors: &[usize],
    r: usize,
    mut observe: impl FnMut(usize, &[usize]),
) -> BmaRun {
    assert_eq!(sequences.len(), start_cursors.len(), "one start cursor per sequence");
    assert!(!sequences.is_empty(), "at least one sequence");
    assert!(start_cursors.iter().all(|&c| c >= 1), "cursors are 1-based");
    let mut cursors = start_cursors.to_vec();
    let mut symbols = vec![Symbol::Star; sequences.len()];
    let mut emitted = BitString::with_capacity(r);
    let mut margins = Vec::with_capacity(r);
    let mut first_star_round = None;
    for t in 1..=r {
        observe(t, &cursors);
        let (mut zeros, mut ones, mut stars) = (0, 0, 0);
        for (sym, (seq, &q)) in symbols.iter_mut().zip(sequences.iter().zip(&cursors)) {
            *sym = Symbol::read(seq, q);
            match sym {
                Symbol::Zero => zeros += 1,
                Symbol::One => ones += 1,
                Symbol::Star => stars += 1,
            }
        }
        let vote = plurality(zeros, ones, stars);
        match vote {
            Symbol::Zero => emitted.push(false),
            Symbol::One => emitted.push(true),
            Symbol::Star => {
                first_star_round.get_or_insert(t);
            }
        }
        let mut agree = 0;
        for (c, &sym) in cursors.iter_mut().zip(&symbols) {
            if sym == vote {
                *c += 1;
                agree += 1;
            }
        }
        margins.push(agree);
    }
    observe(r + 1, &cursors);
    let output = if first_star_round.is_some() { BitString::new() } else { emitted };
    BmaRun { output, final_cursors: cursors, margins, first_star_round }
}

/// Walk a single cursor through `y_star` against the known word `z`, advancing
/// on matches, and return the source index of the final cursor.
pub fn bma_star(y_star: &TraceRecord, ell_star: usize, z: &BitString) -> usize {
    assert!(ell_star >= 1, "cursors are 1-based");
    let trace = y_star.trace();
    let mut cur = ell_star;
    for t in 0..z.len() {
        if cur <= trace.len() && trace.get0(cur - 1) == z.get0(t) {
            cur += 1;
        }
    }
    y_star.source_of(cur)
}

/// A BMA run over ground-truth records, with per-round provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenanceRun {
    pub run: BmaRun,
    /// Smallest source index among the start cursors.
    pub origin: usize,
    /// `last[m][t - 1]`: source index under sequence `m`'s cursor at the start
    /// of round `t`, for `t` in `1..=R+1`.
    pub last: Vec<Vec<usize>>,
    /// `dist[m][t - 1] = last[m][t - 1] - (origin + t - 1)`.
    pub dist: Vec<Vec<i64>>,
    /// First `(m, t)` (0-based sequence, 1-based round) with negative `dist`.
    /// Only possible after a round whose vote disagreed with the source.
    pub first_negative: Option<(usize, usize)>,
}

pub fn bma_with_provenance(records: &[TraceRecord], start_cursors: &[usize], r: usize) -> ProvenanceRun {
    let sequences: Vec<BitString> = records.iter().map(|rec| rec.trace().clone()).collect();
    let origin = records.iter().zip(start_cursors).map(|(rec, &c)| rec.source_of(c)).min().unwrap_or(1);
    let mut last = vec![Vec::with_capacity(r + 1); records.len()];
    let run = bma_rounds(&sequences, start_cursors, r, |_, cursors| {
        for ((row, rec), &c) in last.iter_mut().zip(records).zip(cursors) {
            row.push(rec.source_of(c));
        }
    });
    let dist: Vec<Vec<i64>> = last
        .iter()
        .map(|row| row.iter().enumerate().map(|(t0, &s)| s as i64 - (origin + t0) as i64).collect())
        .collect();
    let first_negative = (0..=r)
        .flat_map(|t0| (0..records.len()).map(move |m| (m, t0)))
        .find(|&(m, t0)| dist[m][t0] < 0)
        .map(|(m, t0)| (m, t0 + 1));
    ProvenanceRun { run, origin, last, dist, first_negative }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_deletions;
    use crate::strings::bits;

    #[test]
    fn hand_simulated_example() {
        let seqs = [bits("0101"), bits("0101"), bits("011")];
        let run = bma_run(&seqs, &[1, 1, 1], 4);
        assert_eq!(run.output, bits("0101"));
        assert_eq!(run.final_cursors, vec![5, 5, 4]);
        assert_eq!(run.margins, vec![3, 3, 2, 3]);
    }

    #[test]
    fn unanimous_and_padded() {
        let x = bits("0110100");
        let run = bma_run(&[x.clone(), x.clone()], &[1, 1], x.len());
        assert_eq!(run.output, x);
        assert_eq!(run.final_cursors, vec![8, 8]);

        let run = bma_run(&[bits("0")], &[1], 2);
        assert!(run.output.is_empty());
        assert_eq!(run.first_star_round, Some(2));
    }

    #[test]
    fn ties_prefer_zero_then_one() {
        assert_eq!(plurality(1, 1, 1), Symbol::Zero);
        assert_eq!(plurality(0, 2, 2), Symbol::One);
        assert_eq!(plurality(0, 1, 2), Symbol::Star);
    }

    #[test]
    fn reference_walk() {
        let x = bits("00110101");
        let clean = apply_deletions(&x, &[]).unwrap();
        assert_eq!(bma_star(&clean, 1, &x.subword(1, 4)), 5);
        let ystar = apply_deletions(&x, &[3]).unwrap();
        assert_eq!(bma_star(&ystar, 1, &bits("0011")), 5);
        assert_eq!(bma_star(&ystar, 3, &bits("000")), ystar.source_of(3));
    }

    #[test]
    fn provenance_tracks_deletions() {
        let x = bits("0110");
        let clean = apply_deletions(&x, &[]).unwrap();
        let prov = bma_with_provenance(&[clean.clone(), clean], &[1, 1], 4);
        assert!(prov.dist.iter().flatten().all(|&d| d == 0));

        // A lone trace of 0110 with bit 2 deleted is its own majority.
        let rec = apply_deletions(&x, &[2]).unwrap();
        let prov = bma_with_provenance(&[rec], &[1], 3);
        assert_eq!(prov.last[0], vec![1, 3, 4, 5]);
        assert_eq!(prov.dist[0], vec![0, 1, 1, 1]);
        assert_eq!(prov.first_negative, None);
    }
}
