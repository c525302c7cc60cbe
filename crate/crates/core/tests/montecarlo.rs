use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zalm_core::analytics::{any_herald_prob, herald_prob_island, true_herald_prob};
use zalm_core::montecarlo::*;
use zalm_core::{HeraldMode, SourceParams};

fn params(g: f64, eta_t: f64, n: u64, mode: HeraldMode) -> SourceParams {
    SourceParams::new(g, eta_t, 0.01, n, 1e10, mode).unwrap()
}

#[test]
fn per_detector_statistics() {
    let (g, eta_t) = (0.3, 0.6);
    let mu = eta_t * g;
    let model = DetectorModel::new(g, eta_t);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1_000_000u64;
    let (mut total, mut ones) = (0u64, 0u64);
    for _ in 0..n {
        let k = model.surviving(&mut rng);
        total += k;
        ones += (k == 1) as u64;
    }
    let mean = total as f64 / n as f64;
    let sigma_mean = (mu * (1.0 + mu) / n as f64).sqrt();
    assert!((mean - mu).abs() < 4.0 * sigma_mean, "{mean} vs {mu}");
    let p1 = mu / (1.0 + mu).powi(2);
    let f1 = ones as f64 / n as f64;
    assert!((f1 - p1).abs() < 4.0 * (p1 * (1.0 - p1) / n as f64).sqrt());
}

#[test]
fn eight_lossless_islands_exceed_a_quarter() {
    let p = params(0.5, 1.0, 8, HeraldMode::SameIsland);
    let est = estimate_true_herald_prob(&p, 1_000_000, 2024);
    let expect = true_herald_prob(herald_prob_island(0.5, 1.0), 8, HeraldMode::SameIsland);
    assert!(est.z_score(expect).abs() < 4.0, "{est:?}");
    assert!(est.value > 0.25);
}

#[test]
fn true_false_and_class_balance() {
    let p = params(0.3, 0.8, 6, HeraldMode::SpciExact);
    let run = McRun::new(
        &p,
        McConfig {
            n_pulses: 300_000,
            seed: 8,
            ..McConfig::default()
        },
    );
    let c = run.counts;
    let n = c.heralded as f64;
    let sigma = (0.25 / n).sqrt();
    assert!((c.true_heralds as f64 / n - 0.5).abs() < 4.0 * sigma);
    assert!((c.psi_plus as f64 / n - 0.5).abs() < 4.0 * sigma);
    assert_eq!(c.true_heralds + c.false_heralds, c.heralded);
    assert_eq!(c.psi_plus + c.psi_minus, c.heralded);
}

#[test]
fn policy_does_not_change_herald_rate() {
    let p = params(0.2, 0.9, 10, HeraldMode::SpciPaper);
    let base = McConfig {
        n_pulses: 200_000,
        seed: 77,
        ..McConfig::default()
    };
    let a = McRun::new(&p, base);
    let b = McRun::new(
        &p,
        McConfig {
            policy: SelectionPolicy::LowestIndex,
            ..base
        },
    );
    assert_eq!(a.counts.heralded, b.counts.heralded);
    assert_eq!(a.counts.multi_candidate, b.counts.multi_candidate);
    assert!(a.counts.multi_candidate > 0);
}

#[test]
fn spci_follows_exact_formula_at_operating_point() {
    let p = params(0.0173, 0.9, 28, HeraldMode::SpciPaper);
    let run = McRun::new(
        &p,
        McConfig {
            n_pulses: 400_000,
            seed: 5,
            ..McConfig::default()
        },
    );
    let d = spci_diagnostic(&p, &run);
    assert!(d.z_exact.abs() < 4.0, "{d:?}");
    // The N²-exponent formula overstates the herald rate here by far more
    // than the sampling error.
    assert!(d.z_pair_formula < -20.0, "{d:?}");
    assert!(run.counts.cross_island > 0);
}

#[test]
fn independent_pair_counting_reproduces_headline_rate() {
    let p = SourceParams::new(0.0173, 0.9, 0.01, 28, 1e10, HeraldMode::SpciPaper).unwrap();
    let est = estimate_pair_rate(&p, 200_000, 3, Counting::IndependentPairs);
    assert!(
        (est.value - 2.52e5).abs() < 4.0 * est.std_error + 0.02 * 2.52e5,
        "{est:?}"
    );
    let expect = any_herald_prob(herald_prob_island(0.0173, 0.9), 28, HeraldMode::SpciPaper);
    assert!(
        (est.sub_counts.heralded as f64 / 200_000.0 - expect).abs()
            < 4.0 * (expect * (1.0 - expect) / 2e5).sqrt()
    );
}

#[test]
fn seeds_reproduce_bitwise() {
    let p = params(0.05, 0.9, 12, HeraldMode::SameIsland);
    let a = estimate_true_herald_prob(&p, 100_000, 9);
    let b = estimate_true_herald_prob(&p, 100_000, 9);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.sub_counts, b.sub_counts);
}

#[test]
fn thread_count_does_not_matter() {
    let p = params(0.1, 0.7, 5, HeraldMode::SpciExact);
    let cfg = McConfig {
        n_pulses: 3 * BATCH_PULSES + 5,
        seed: 1,
        ..McConfig::default()
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| simulate(&p, &cfg));
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| simulate(&p, &cfg));
    assert_eq!(one, four);
}
