use tracerecon::strings::{edit_distance, BitString};
use tracerecon::{align, consensus_check, derive_params, transmit, Mode, Overrides, ReconParams, StreamKey, TraceRecord};
use tracerecon_oracles::{self as oracle, AlignSetup};

fn desk(k: f64, tau: f64) -> Overrides {
    Overrides { mode: Mode::Desk, k_const: Some(k), tau: Some(tau), gamma: None }
}

struct Instance {
    x: BitString,
    reference: TraceRecord,
    records: Vec<TraceRecord>,
}

impl Instance {
    fn new(n: usize, delta: f64, m: usize, key: StreamKey) -> Self {
        let x = key.random_bits(n);
        let reference = transmit(&x, delta, key.child(0));
        let records = (1..=m as u64).map(|i| transmit(&x, delta, key.child(i))).collect();
        Instance { x, reference, records }
    }

    fn traces(&self) -> Vec<BitString> {
        self.records.iter().map(|r| r.trace().clone()).collect()
    }
}

#[test]
fn zero_deletions_give_consensus_in_range() {
    let p = derive_params(1 << 12, 0.02, 9, desk(2.0, 8.0)).unwrap();
    let x = StreamKey::new(3).random_bits(1 << 12);
    let rec = transmit(&x, 0.0, StreamKey::new(0));
    let traces = vec![x.clone(); 9];
    for ell in (200..3800).step_by(97) {
        let (config, diag) = align(&p, ell, &x, &traces).unwrap();
        assert_eq!(diag.failure, None);
        let (ok, at) = consensus_check(&config, &vec![rec.clone(); 9], 9);
        let i = at.unwrap();
        assert!(ok && i + 2 * p.h_ceil >= ell && i <= ell, "ell {ell}, at {i}");
    }
}

#[test]
fn recorded_windows_nest_and_meet_the_tolerance() {
    let mut checked = 0;
    for t in 0..30u64 {
        let key = StreamKey::new(100 + t);
        let (n, delta, m) = (1 << 12, 0.02, 9);
        let inst = Instance::new(n, delta, m, key);
        let p = derive_params(n, delta, m, desk(2.0, 8.0)).unwrap();
        let traces = inst.traces();
        let y_star = inst.reference.trace();
        let ell = 1 + (key.word(99) as usize) % y_star.len();
        let (config, diag) = align(&p, ell, y_star, &traces).unwrap();
        assert!(config.cursors.iter().all(|&c| c >= 1));
        assert_eq!(diag.reference_windows.len(), p.s());
        for (s, q) in diag.reference_windows.iter().enumerate() {
            assert!(diag.clamped || q.len() == p.t(s + 1));
        }
        for (y, windows) in traces.iter().zip(&diag.trace_windows) {
            for s in 1..=p.s() {
                let Some(q) = windows[s - 1] else { continue };
                let template = y_star.window(diag.reference_windows[s - 1]);
                assert!(edit_distance(&template, &y.window(q)) <= p.stage_tolerance(s));
                checked += 1;
                if s < p.s() {
                    assert!(q.is_within(&windows[s].unwrap()));
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn agrees_with_literal_transliteration() {
    let (n, m) = (400, 5);
    let mut succeeded = 0;
    for t in 0..60u64 {
        let key = StreamKey::new(7000 + t);
        let delta: f64 = [0.0, 0.02, 0.05][t as usize % 3];
        let p: ReconParams = derive_params(n, delta.max(0.02), m, desk(2.0, 3.0)).unwrap();
        let inst = Instance::new(n, delta, m, key);
        let traces = inst.traces();
        let y_star = inst.reference.trace();
        let ell = 1 + (key.word(5) as usize) % y_star.len();
        let (config, diag) = align(&p, ell, y_star, &traces).unwrap();
        let tolerances: Vec<usize> = (1..=p.s()).map(|s| p.stage_tolerance(s)).collect();
        let setup = AlignSetup {
            ladder: &p.ladder,
            tolerances: &tolerances,
            word_len: p.word_len(),
            threshold: p.common_word_threshold(),
        };
        let bytes: Vec<Vec<u8>> = traces.iter().map(BitString::to_bytes).collect();
        assert_eq!(config.cursors, oracle::align_literal(&setup, ell, &y_star.to_bytes(), &bytes), "instance {t}");
        succeeded += usize::from(diag.failure.is_none());
        let _ = &inst.x;
    }
    assert!(succeeded > 0);
}

#[test]
fn single_trace_cursor_lands_in_final_window() {
    let p = derive_params(1 << 10, 0.05, 1, desk(1.0, 3.0)).unwrap();
    let x = StreamKey::new(9).random_bits(1 << 10);
    let traces = vec![x.clone()];
    for ell in [40, 333, 700, 990] {
        let (config, diag) = align(&p, ell, &x, &traces).unwrap();
        let q = diag.trace_windows[0][0].unwrap();
        let word = diag.common_word.unwrap();
        let c = config.cursors[0];
        assert!(q.contains(c) && c + word.len() - 1 <= q.hi);
        assert_eq!(x.subword(c, c + word.len() - 1), word);
    }
}

#[test]
fn paper_mode_rejects_cursors_near_the_ends() {
    let p = derive_params(1 << 12, 0.02, 9, Overrides { mode: Mode::Paper, k_const: Some(2.0), tau: Some(2.0), gamma: None });
    let Ok(p) = p else { return };
    let x = StreamKey::new(1).random_bits(1 << 12);
    let traces = vec![x.clone(); 9];
    assert!(align(&p, 1, &x, &traces).is_err());
    assert!(align(&p, p.edge_margin(), &x, &traces).is_ok());
    assert!(align(&p, x.len() - p.edge_margin() + 1, &x, &traces).is_err());
}

#[test]
fn deterministic() {
    let inst = Instance::new(1 << 12, 0.02, 9, StreamKey::new(44));
    let p = derive_params(1 << 12, 0.02, 9, desk(2.0, 8.0)).unwrap();
    let traces = inst.traces();
    let a = align(&p, 1500, inst.reference.trace(), &traces).unwrap();
    assert_eq!(a, align(&p, 1500, inst.reference.trace(), &traces).unwrap());
}
