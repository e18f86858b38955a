use proptest::collection::vec;
use proptest::prelude::*;
use tracerecon::deserts::contains_long_desert;
use tracerecon::strings::BitString;
use tracerecon::{bma_run, bma_star, bma_with_provenance, transmit, StreamKey, TraceRecord};
use tracerecon_oracles as oracle;

fn instance(key: StreamKey) -> (Vec<BitString>, Vec<usize>, usize) {
    let m = 1 + (key.word(0) % 8) as usize;
    let r = 1 + (key.word(1) % 64) as usize;
    let delta = 0.3 * key.uniform(2);
    let x = key.child(0).random_bits(r + (key.word(3) % 16) as usize);
    let seqs: Vec<BitString> = (0..m).map(|i| transmit(&x, delta, key.child(1 + i as u64)).into_trace()).collect();
    let starts = (0..m).map(|i| 1 + (key.word(10 + i as u64) % 4) as usize).collect();
    (seqs, starts, r)
}

#[test]
fn matches_literal_transliteration() {
    for t in 0..1000u64 {
        let (seqs, starts, r) = instance(StreamKey::new(t));
        let run = bma_run(&seqs, &starts, r);
        let bytes: Vec<Vec<u8>> = seqs.iter().map(BitString::to_bytes).collect();
        let (out, cur) = oracle::bma_literal(&bytes, &starts, r);
        assert_eq!((run.output.to_bytes(), run.final_cursors.clone()), (out, cur), "instance {t}");
    }
}

#[test]
fn cursor_budget_and_advance_rule() {
    for t in 0..300u64 {
        let (seqs, starts, r) = instance(StreamKey::new(t));
        let run = bma_run(&seqs, &starts, r);
        for (f, s) in run.final_cursors.iter().zip(&starts) {
            assert!(f >= s && f - s <= r);
        }
        assert_eq!(run.final_cursors.iter().zip(&starts).map(|(f, s)| f - s).sum::<usize>(), run.margins.iter().sum());
    }
}

proptest! {
    #[test]
    fn output_depends_only_on_suffixes(
        seed in any::<u64>(),
        prefixes in vec(vec(0u8..2, 0..10), 8),
    ) {
        let (seqs, starts, r) = instance(StreamKey::new(seed));
        let base = bma_run(&seqs, &starts, r);
        let mut shifted = Vec::new();
        let mut moved = Vec::new();
        for ((s, &c), p) in seqs.iter().zip(&starts).zip(&prefixes) {
            let mut w = BitString::from_bytes(p);
            w.extend_from(s);
            shifted.push(w);
            moved.push(c + p.len());
        }
        let run = bma_run(&shifted, &moved, r);
        prop_assert_eq!(run.output, base.output);
        prop_assert_eq!(run.margins, base.margins);
    }
}

#[test]
fn dist_stays_nonnegative_while_votes_are_right() {
    let mut negative_runs = 0;
    for t in 0..300u64 {
        let key = StreamKey::new(t);
        let x = key.random_bits(120);
        let records: Vec<TraceRecord> = (0..9).map(|m| transmit(&x, 0.05, key.child(m))).collect();
        let prov = bma_with_provenance(&records, &[1; 9], 100);
        // While the vote reproduces the source, no cursor can fall behind it.
        let correct_rounds = prov
            .run
            .output
            .iter()
            .zip(x.iter())
            .take_while(|(a, b)| a == b)
            .count();
        if prov.run.succeeded() && prov.run.output == x.subword(1, 100) {
            assert_eq!(prov.first_negative, None, "instance {t}");
        }
        if let Some((_, round)) = prov.first_negative {
            assert!(round > correct_rounds, "negative before the first wrong vote in instance {t}");
            negative_runs += 1;
        }
        for row in &prov.dist {
            assert!(row[..=correct_rounds.min(100)].iter().all(|&d| d >= 0));
        }
    }
    assert!(negative_runs < 300);
}

#[test]
fn reference_walk_never_lags() {
    for t in 0..500u64 {
        let key = StreamKey::new(t);
        let x = key.random_bits(300);
        let rec = transmit(&x, 0.1, key.child(1));
        let r = 100;
        let ell = 1 + (key.word(2) % 150) as usize;
        if rec.trace().len() < ell + r {
            continue;
        }
        let s = rec.source_of(ell);
        for i in s.saturating_sub(10).max(1)..=s {
            assert!(bma_star(&rec, ell, &x.subword(i, i + r - 1)) >= i + r);
        }
    }
}

#[test]
fn desert_free_words_come_back_exactly() {
    let (r, m, delta, l, g) = (200, 20, 0.01, 40, 20);
    let key = StreamKey::new(8);
    let mut wins = 0;
    let trials = 100;
    for t in 0..trials {
        let k = key.child(t);
        let x = (0..)
            .map(|j| k.child(1000 + j).random_bits(r))
            .find(|w| !contains_long_desert(w, l, g))
            .unwrap();
        let traces: Vec<BitString> = (0..m).map(|i| transmit(&x, delta, k.child(i)).into_trace()).collect();
        wins += usize::from(bma_run(&traces, &vec![1; m as usize], r).output == x);
    }
    assert!(wins >= 90, "{wins}/{trials}");
}
