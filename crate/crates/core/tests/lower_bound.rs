use num_rational::BigRational;
use num_traits::ToPrimitive;
use tracerecon::lower_bound::*;
use tracerecon::strings::{bits, edit_distance, BitString, Interval};
use tracerecon::StreamKey;
use tracerecon_oracles::{self as oracle, ratio};

const DELTAS: [(i64, i64); 3] = [(1, 10), (1, 4), (1, 2)];

fn rational(d: (i64, i64)) -> (f64, BigRational) {
    (d.0 as f64 / d.1 as f64, ratio(d.0, d.1))
}

#[test]
fn likelihood_identity() {
    for m in 1..=6usize {
        for d in DELTAS {
            let (delta, exact) = rational(d);
            let pair = (m, m - 1);
            let p0 = oracle::pair_pmf_exact(m, &exact, pair, false);
            let p1 = oracle::pair_pmf_exact(m, &exact, pair, true);
            let lhs = (0..m).fold(ratio(1, 1), |acc, _| acc * &p0);
            let rhs = (0..m).fold(ratio(1, 1), |acc, _| acc * &p1) / ratio(1 << m, 1);
            assert_eq!(lhs, rhs);
            let problem = AtomicProblem::new(m, delta).unwrap();
            let (f0, f1) = (problem.pmf(false, pair).powi(m as i32), problem.pmf(true, pair).powi(m as i32));
            assert!((f0 / (f1 / f64::powi(2.0, m as i32)) - 1.0).abs() < 1e-12);
            assert!(bayes_decide_atomic(&vec![pair; m], m, delta).unwrap());
        }
    }
}

#[test]
fn pmf_matches_rational_oracle() {
    for m in 1..=4usize {
        for d in DELTAS {
            let (delta, exact) = rational(d);
            let problem = AtomicProblem::new(m, delta).unwrap();
            for pair in problem.union_support() {
                for b in [false, true] {
                    let want = oracle::pair_pmf_exact(m, &exact, pair, b).to_f64().unwrap();
                    assert!((problem.pmf(b, pair) - want).abs() <= 1e-14 * want.max(1e-300));
                }
            }
        }
    }
}

#[test]
fn exact_failure_matches_rational_enumeration() {
    assert_eq!(exact_atomic_failure_prob(1, 0.5).unwrap(), 0.3125);
    assert_eq!(exact_atomic_failure_prob(1, 0.0).unwrap(), 0.0);
    for m in 1..=3usize {
        for d in DELTAS {
            let (delta, exact) = rational(d);
            let want = oracle::atomic_failure_exact(m, &exact).to_f64().unwrap();
            let got = exact_atomic_failure_prob(m, delta).unwrap();
            assert!((got - want).abs() < 1e-12, "M {m}, delta {delta}: {got} vs {want}");
        }
    }
    assert!(exact_atomic_failure_prob(5, 0.1).is_err());
}

#[test]
fn decisions_match_rational_decisions() {
    for t in 0..2000u64 {
        let key = StreamKey::new(t);
        let m = 1 + (key.word(0) % 4) as usize;
        let d = DELTAS[(key.word(1) % 3) as usize];
        let (delta, exact) = rational(d);
        let support = AtomicProblem::new(m, delta).unwrap().union_support();
        let pairs: Vec<_> = (0..m).map(|i| support[(key.word(10 + i as u64) % support.len() as u64) as usize]).collect();
        assert_eq!(bayes_decide_atomic(&pairs, m, delta).unwrap(), oracle::bayes_decide_exact(&pairs, m, &exact), "{pairs:?}");
    }
    assert!(!bayes_decide_atomic(&[(1, 1)], 1, 0.5).unwrap());
    assert!(!bayes_decide_atomic(&[(3, 4); 3], 3, 0.2).unwrap());
    assert!(bayes_decide_atomic(&[(5, 5)], 3, 0.2).is_err());
}

#[test]
fn monte_carlo_tracks_exact() {
    for (m, delta) in [(1, 0.5), (2, 0.1), (3, 0.25)] {
        let est = monte_carlo_atomic_failure(m, delta, 200_000, StreamKey::new(m as u64));
        let exact = exact_atomic_failure_prob(m, delta).unwrap();
        assert!((est.rate() - exact).abs() <= 4.0 * est.std_error().max(1e-6), "{m} {delta}: {} vs {exact}", est.rate());
    }
}

#[test]
fn failure_stays_above_the_cubic_floor() {
    for m in 1..=4usize {
        for delta in [1.0 / (4.0 * m as f64), 1.0 / (8.0 * m as f64), 1.0 / (16.0 * m as f64)] {
            let p = exact_atomic_failure_prob(m, delta).unwrap();
            assert!(p >= (delta * m as f64).powi(3 * m as i32), "M {m}, delta {delta}: {p}");
        }
    }
}

#[test]
fn sampler_means() {
    let draws = sample_atomic(false, 1, 0.5, 100_000, StreamKey::new(1));
    let mean = draws.iter().map(|p| p.0 as f64).sum::<f64>() / draws.len() as f64;
    assert!((mean - 0.5).abs() <= 3.0 * (0.25f64 / 1e5).sqrt());
    assert!(sample_atomic(false, 4, 0.0, 50, StreamKey::new(2)).iter().all(|&p| p == (4, 5)));
    assert!(sample_atomic(true, 4, 1.0, 50, StreamKey::new(3)).iter().all(|&p| p == (0, 0)));

    let (m, delta) = (3, 0.2);
    let z = bits("0110");
    let inst = sample_prlp(&z, m, delta, StreamKey::new(4));
    assert_eq!((inst.samples.len(), inst.b()), (m, 4));
    // M doubles as the number of draws and the binomial size.
    let big = 2000;
    let many = sample_prlp(&bits("01"), big, delta, StreamKey::new(5));
    for (b, bit) in [false, true].into_iter().enumerate() {
        let n0 = if bit { big + 1 } else { big } as f64;
        let mean = many.samples.iter().map(|d| d[b].0 as f64).sum::<f64>() / 2000.0;
        let se = (n0 * delta * (1.0 - delta) / 2000.0).sqrt();
        assert!((mean - n0 * (1.0 - delta)).abs() <= 3.0 * se);
    }
}

#[test]
fn prlp_decoder_error_rate() {
    let z = StreamKey::new(6).random_bits(10_000);
    let inst = sample_prlp(&z, 1, 0.5, StreamKey::new(7));
    let zhat = decode_prlp_bayes(&inst.samples, 1, 0.5).unwrap();
    let errors = zhat.iter().zip(z.iter()).filter(|(a, b)| a != b).count() as f64 / 1e4;
    assert!((errors - 0.3125).abs() <= 0.015, "{errors}");
    let clean = sample_prlp(&z, 2, 0.0, StreamKey::new(8));
    assert_eq!(decode_prlp_bayes(&clean.samples, 2, 0.0).unwrap(), z);
}

#[test]
fn marker_scanning_and_embedding_examples() {
    let spec = EmbeddingSpec::new(1, 2);
    let mut ab = spec.alpha.clone();
    ab.extend_from(&spec.beta);
    assert_eq!(find_pattern_occurrences(&ab, &spec, 2), vec![Interval::new(1, 6), Interval::new(7, 12)]);
    assert!(find_pattern_occurrences(&BitString::run(true, 50), &spec, 5).is_empty());
    assert_eq!(embed_instance(&bits("1"), &bits("010011111111"), &EmbeddingSpec::new(1, 1)), bits("001011111111"));
    let mut ba = spec.beta.clone();
    ba.extend_from(&spec.alpha);
    assert_eq!(extract_z(&ba, &spec, 2), bits("10"));
    for m in 1..=8 {
        let (a, b) = build_alpha_beta(m);
        assert_ne!(a, b);
        assert_eq!(a.len(), 2 * m + 4);
        // No overlap of one marker with a shifted copy of either.
        for (u, v) in [(&a, &a), (&a, &b), (&b, &a), (&b, &b)] {
            for s in 1..u.len() {
                assert_ne!(u.subword(s + 1, u.len()), v.subword(1, u.len() - s));
            }
        }
    }
}

#[test]
fn extraction_inverts_embedding() {
    let spec = EmbeddingSpec::new(1, 32);
    for t in 0..1000u64 {
        let key = StreamKey::new(t);
        let x_prime = key.random_bits(spec.n);
        let z = key.child(1).random_bits(spec.b);
        let x = embed_instance(&z, &x_prime, &spec);
        let k = find_pattern_occurrences(&x_prime, &spec, spec.b).len();
        assert_eq!(extract_z(&x, &spec, spec.b), z.subword(1, k));
        let occ = find_pattern_occurrences(&x, &spec, spec.b);
        assert_eq!(occ, find_pattern_occurrences(&x_prime, &spec, spec.b));
        let outside_same = (1..=x.len()).filter(|&i| !occ.iter().any(|iv| iv.contains(i))).all(|i| x.get(i) == x_prime.get(i));
        assert!(outside_same);
    }
}

#[test]
fn embedding_keeps_positions_uniform() {
    let spec = EmbeddingSpec::new(1, 2);
    let position_sets: [[usize; 6]; 3] = [[1, 2, 3, 4, 5, 6], [100, 101, 102, 103, 104, 105], [3, 50, 200, 401, 600, 768]];
    let trials = 100_000u64;
    let mut counts = vec![[0u32; 64]; 3];
    for t in 0..trials {
        let key = StreamKey::new(t);
        let x = embed_instance(&key.child(1).random_bits(2), &key.random_bits(spec.n), &spec);
        for (c, set) in counts.iter_mut().zip(&position_sets) {
            let cell = set.iter().enumerate().fold(0, |acc, (j, &p)| acc | (x.get(p) as usize) << j);
            c[cell] += 1;
        }
    }
    let expected = trials as f64 / 64.0;
    for c in &counts {
        let chi2: f64 = c.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-squared with 63 degrees of freedom.
        assert!(chi2 < 103.44, "{chi2}");
    }
}

#[test]
fn perturbing_outside_markers_costs_at_most_two_per_edit() {
    let spec = EmbeddingSpec::new(1, 32);
    for t in 0..300u64 {
        let key = StreamKey::new(t);
        let z = key.child(1).random_bits(spec.b);
        let x = embed_instance(&z, &key.random_bits(spec.n), &spec);
        let occ = find_pattern_occurrences(&x, &spec, spec.b);
        let zx = extract_z(&x, &spec, spec.b);
        let mut bytes = x.to_bytes();
        let edits = 1 + (key.word(2) % 6) as usize;
        let mut at: Vec<usize> = (0..edits as u64)
            .map(|e| (key.word(10 + e) as usize) % bytes.len())
            .filter(|&p| !occ.iter().any(|iv| iv.contains(p + 1)))
            .collect();
        at.sort_unstable_by(|a, b| b.cmp(a));
        at.dedup();
        // Right to left, so earlier positions keep their meaning.
        for (e, &p) in at.iter().enumerate() {
            match key.word(20 + e as u64) % 3 {
                0 => drop(bytes.remove(p)),
                1 => bytes.insert(p, 0),
                _ => bytes.insert(p, 1),
            }
        }
        let x_hat = BitString::from_bytes(&bytes);
        let z_hat = extract_z(&x_hat, &spec, spec.b);
        assert!(edit_distance(&zx, &z_hat) <= 2 * edit_distance(&x, &x_hat), "seed {t}");
    }
}

#[test]
fn noiseless_simulation_recovers_z() {
    let spec = EmbeddingSpec::new(2, 8);
    for t in 0..20u64 {
        let key = StreamKey::new(t);
        let z = key.child(9).random_bits(spec.b);
        let inst = sample_prlp(&z, 2, 0.0, key.child(10));
        let run = simulate_aprlp(&inst.samples, |traces| traces[0].clone(), &spec, 0.0, key);
        assert_eq!(run.traces[0], run.traces[1]);
        assert_eq!(run.x_hat, embed_instance(&z, &run.x_prime, &spec));
        assert_eq!(run.z_hat, z.subword(1, run.embedded));
    }
}
