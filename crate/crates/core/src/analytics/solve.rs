//! Inversion of the monotone quality curves for the gain.

use thiserror::Error;

use crate::analytics::bell::{prop_bell_probs, prop_loadable_prob, quality};
use crate::analytics::gaussian::GaussianBlocks;

/// Search bracket in `G - 1`.
pub const GAIN_BRACKET: (f64, f64) = (1e-8, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GainTarget {
    /// Bell-state fraction of the delivered state.
    Fraction(f64),
    /// Bell-state fidelity of the delivered state.
    Fidelity(f64),
}

impl GainTarget {
    pub fn value(self) -> f64 {
        match self {
            GainTarget::Fraction(x) | GainTarget::Fidelity(x) => x,
        }
    }

    /// The targeted metric at one gain.
    pub fn evaluate(self, gain_minus_one: f64, eta_t: f64, eta_r: f64) -> f64 {
        let blocks = GaussianBlocks::new(gain_minus_one, eta_t, eta_r);
        let (s, e) = prop_bell_probs(&blocks);
        let q = quality(s, e, prop_loadable_prob(&blocks));
        match self {
            GainTarget::Fraction(_) => q.fraction,
            GainTarget::Fidelity(_) => q.fidelity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("target {target} is unachievable: metric spans [{at_high}, {at_low}] over G-1 in [{lo}, {hi}]")]
    Unachievable {
        target: f64,
        lo: f64,
        hi: f64,
        at_low: f64,
        at_high: f64,
    },
}

/// Finds the `G - 1` at which the metric equals the target, by bisection on
/// [`GAIN_BRACKET`]. Both metrics decrease with gain on that bracket.
pub fn solve_gain(target: GainTarget, eta_t: f64, eta_r: f64) -> Result<f64, SolveError> {
    let (mut lo, mut hi) = GAIN_BRACKET;
    let goal = target.value();
    let f = |g: f64| target.evaluate(g, eta_t, eta_r) - goal;
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo >= 0.0 && f_hi <= 0.0) {
        return Err(SolveError::Unachievable {
            target: goal,
            lo,
            hi,
            at_low: f_lo + goal,
            at_high: f_hi + goal,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_target_at_source() {
        let g = solve_gain(GainTarget::Fraction(0.99), 0.9, 1.0).unwrap();
        assert!((g - 0.0129).abs() < 2e-4, "{g}");
        assert!((GainTarget::Fraction(0.99).evaluate(g, 0.9, 1.0) - 0.99).abs() < 1e-10);
    }

    #[test]
    fn fidelity_targets_with_propagation() {
        let g = solve_gain(GainTarget::Fidelity(0.99), 0.9, 0.01).unwrap();
        assert!((g - 0.0173).abs() < 3e-4, "{g}");
        let g = solve_gain(GainTarget::Fidelity(0.99), 0.8, 0.01).unwrap();
        assert!((g - 8.59e-3).abs() < 0.2e-3, "{g}");
    }

    #[test]
    fn unit_fidelity_without_propagation_loss_is_unreachable_below_one() {
        // Fidelity is identically 1 at η_R = 1, so 0.99 cannot be straddled.
        assert!(matches!(
            solve_gain(GainTarget::Fidelity(0.99), 0.9, 1.0),
            Err(SolveError::Unachievable { .. })
        ));
        assert!(solve_gain(GainTarget::Fraction(1.5), 0.9, 1.0).is_err());
    }
}
