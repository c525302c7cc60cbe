//! Photon-pair statistics and herald probabilities.

use crate::model::HeraldMode;

/// Bose-Einstein pair-number distribution `(G-1)^m / G^(m+1)`.
pub fn bose_einstein_pmf(gain_minus_one: f64, m: u32) -> f64 {
    let g = gain_minus_one;
    (g / (1.0 + g)).powi(m as i32) / (1.0 + g)
}

/// Probability that one polarization of one island shows a valid herald
/// pattern: exactly one click on one of its two detectors, none on the other.
///
/// Each detector sees thermal light of mean `η_T (G-1)`, so this is
/// `2 μ / (1 + μ)^3`.
pub fn polarization_pattern_prob(gain_minus_one: f64, eta_t: f64) -> f64 {
    let mu = eta_t * gain_minus_one;
    2.0 * mu / (1.0 + mu).powi(3)
}

/// Per-pulse probability that a given island (or island pair) heralds:
/// `4 μ² / (1 + μ)^6` with `μ = η_T (G-1)`.
pub fn herald_prob_island(gain_minus_one: f64, eta_t: f64) -> f64 {
    let mu = eta_t * gain_minus_one;
    4.0 * mu * mu / (1.0 + mu).powi(6)
}

/// Probability of one specific sign pattern, a quarter of
/// [`herald_prob_island`].
pub fn herald_prob_pattern(gain_minus_one: f64, eta_t: f64) -> f64 {
    let mu = eta_t * gain_minus_one;
    mu * mu / (1.0 + mu).powi(6)
}

/// `1 - (1 - p)^n` without losing digits for small `p`.
fn at_least_one(p: f64, n: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    -(n * (-p).ln_1p()).exp_m1()
}

/// Per-pulse true-herald probability when at most one herald is sent per
/// pulse. Half of all heralds are false, hence the factor 1/2.
///
/// `p` is the per-island herald probability from [`herald_prob_island`]. For
/// [`HeraldMode::SpciExact`] the per-polarization pattern probability is
/// recovered as `q = sqrt(p)`.
pub fn true_herald_prob(p: f64, n_islands: u64, mode: HeraldMode) -> f64 {
    any_herald_prob(p, n_islands, mode) / 2.0
}

/// Per-pulse probability of at least one herald candidate, Pr(H).
pub fn any_herald_prob(p: f64, n_islands: u64, mode: HeraldMode) -> f64 {
    let n = n_islands as f64;
    match mode {
        HeraldMode::SameIsland => at_least_one(p, n),
        HeraldMode::SpciPaper => at_least_one(p, n * n),
        HeraldMode::SpciExact => {
            let any_pol = at_least_one(p.sqrt(), n);
            any_pol * any_pol
        }
    }
}

/// Smallest island count whose true-herald probability reaches `target`.
///
/// Returns `None` when no island count can reach the target (`p = 0` or
/// `target >= 1/2`).
pub fn islands_required(p: f64, target: f64, mode: HeraldMode) -> Option<u64> {
    if p.is_nan() || target.is_nan() || p <= 0.0 || target >= 0.5 || p > 1.0 {
        return None;
    }
    if target <= 0.0 {
        return Some(1);
    }
    // (1 - p)^k <= 1 - 2 target, solved for the exponent k.
    let needed = |x: f64| (1.0 - x).ln() / (-p).ln_1p();
    let estimate = match mode {
        HeraldMode::SameIsland => needed(2.0 * target),
        HeraldMode::SpciPaper => needed(2.0 * target).sqrt(),
        HeraldMode::SpciExact => {
            let q = p.sqrt();
            if q >= 1.0 {
                1.0
            } else {
                (1.0 - (2.0 * target).sqrt()).ln() / (-q).ln_1p()
            }
        }
    };
    if !estimate.is_finite() || estimate > 9.0e18 {
        return None;
    }
    let mut n = (estimate.ceil() as u64).max(1);
    // Settle rounding at the boundary against the forward formula.
    while true_herald_prob(p, n, mode) < target {
        n += 1;
    }
    while n > 1 && true_herald_prob(p, n - 1, mode) >= target {
        n -= 1;
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pmf_examples() {
        assert_eq!(bose_einstein_pmf(0.0, 0), 1.0);
        assert_eq!(bose_einstein_pmf(0.0, 3), 0.0);
        for m in 0..10 {
            assert_relative_eq!(
                bose_einstein_pmf(1.0, m),
                0.5f64.powi(m as i32 + 1),
                max_relative = 1e-15
            );
        }
        assert_relative_eq!(bose_einstein_pmf(0.5, 1), 0.5 / 2.25, max_relative = 1e-15);
    }

    #[test]
    fn pmf_sums_to_one() {
        for g in [0.01, 0.3, 2.0] {
            let total: f64 = (0..2000).map(|m| bose_einstein_pmf(g, m)).sum();
            assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn herald_prob_examples() {
        assert_eq!(herald_prob_island(0.0, 0.7), 0.0);
        assert_relative_eq!(
            herald_prob_island(0.5, 1.0),
            4.0 * 0.25 / 1.5f64.powi(6),
            max_relative = 1e-15
        );
        assert_relative_eq!(herald_prob_island(0.5, 1.0), 0.087791, max_relative = 1e-5);
        // 4 μ²/(1+μ)^6 at μ = 0.01161, evaluated at 40 digits.
        assert_relative_eq!(
            herald_prob_island(0.0129, 0.9),
            5.030900731663588e-4,
            max_relative = 1e-13
        );
    }

    #[test]
    fn pattern_probs_are_consistent() {
        let (g, eta) = (0.07, 0.85);
        let q = polarization_pattern_prob(g, eta);
        assert_relative_eq!(q * q, herald_prob_island(g, eta), max_relative = 1e-14);
        assert_relative_eq!(
            4.0 * herald_prob_pattern(g, eta),
            herald_prob_island(g, eta),
            max_relative = 1e-14
        );
    }

    #[test]
    fn lossless_eight_islands_exceed_quarter() {
        let p = herald_prob_island(0.5, 1.0);
        let pt = true_herald_prob(p, 8, HeraldMode::SameIsland);
        assert!(pt > 0.25);
        assert_relative_eq!(pt, (1.0 - (1.0 - p).powi(8)) / 2.0, max_relative = 1e-13);
        assert_relative_eq!(pt, 0.2602696937338747, max_relative = 1e-13);
    }

    #[test]
    fn modes_coincide_for_one_island() {
        for p in [1e-6, 0.01, 0.3, 0.5] {
            let same = true_herald_prob(p, 1, HeraldMode::SameIsland);
            assert_relative_eq!(
                same,
                true_herald_prob(p, 1, HeraldMode::SpciPaper),
                max_relative = 1e-14
            );
            assert_relative_eq!(
                same,
                true_herald_prob(p, 1, HeraldMode::SpciExact),
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            true_herald_prob(0.5, 1, HeraldMode::SameIsland),
            0.25,
            max_relative = 1e-15
        );
    }

    #[test]
    fn thirty_eight_islands_reach_quarter_with_spci() {
        let p = herald_prob_island(0.0129, 0.9);
        assert!(true_herald_prob(p, 38, HeraldMode::SpciPaper) >= 0.25);
        assert!(true_herald_prob(p, 37, HeraldMode::SpciPaper) < 0.25);
    }

    #[test]
    fn island_counts() {
        let p = herald_prob_island(0.0129, 0.9);
        let same = islands_required(p, 0.25, HeraldMode::SameIsland).unwrap();
        assert!((1376..=1386).contains(&same), "{same}");
        assert_eq!(islands_required(p, 0.25, HeraldMode::SpciPaper), Some(38));
        assert_eq!(islands_required(0.5, 0.25, HeraldMode::SameIsland), Some(1));
        let exact = islands_required(p, 0.25, HeraldMode::SpciExact).unwrap();
        assert!(true_herald_prob(p, exact, HeraldMode::SpciExact) >= 0.25);
        assert!(true_herald_prob(p, exact - 1, HeraldMode::SpciExact) < 0.25);
        assert_eq!(islands_required(0.0, 0.25, HeraldMode::SameIsland), None);
        assert_eq!(islands_required(0.1, 0.5, HeraldMode::SameIsland), None);
    }

    #[test]
    fn huge_island_counts_stay_exact() {
        let p = 1e-12;
        let n = islands_required(p, 0.25, HeraldMode::SameIsland).unwrap();
        assert!(true_herald_prob(p, n, HeraldMode::SameIsland) >= 0.25);
        assert!(true_herald_prob(p, n - 1, HeraldMode::SameIsland) < 0.25);
        assert!(n > 600_000_000_000);
    }
}
