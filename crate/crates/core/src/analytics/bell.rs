//! Bell-state probabilities, loadable probability and the derived quality
//! metrics, with and without propagation loss.
//!
//! Propagation results are written in terms of `d = 1 - N_S'` and
//! `b = η_R N_S' / N_S`. With `n = N_S'`:
//!
//! ```text
//! s = n⁴/2 · [2d² + 2bd(1 - 3d) + b²(1 - 4d + 5d²)]
//! e = n⁵ d (1 - η_R) (d + b - 2bd)
//! loadable = (d + nb/2)² (1 + n - nb/2)² - n⁴ b² (2 - 2b + b²/4) / 4
//! ```
//!
//! These are algebraically identical to the textbook brackets in `N_S'` but
//! avoid cancelling O(1) terms when `N_S' ≈ 1`.

use crate::analytics::gaussian::GaussianBlocks;
use crate::model::{BellClass, BellDiagonal, BellState, StateError};

/// ψ-class probability of the heralded state at the source: `N_S⁶ / 2`.
pub fn bsm_bell_singlet_prob(n_s: f64) -> f64 {
    n_s.powi(6) / 2.0
}

/// Probability that both receivers get at least one photon: `1 - N_S²/2`.
pub fn bsm_loadable_prob(n_s: f64) -> f64 {
    1.0 - n_s * n_s / 2.0
}

/// Bell-state fraction at the source: `N_S⁶ / (2 - N_S²)`.
pub fn bsm_bell_fraction(n_s: f64) -> f64 {
    n_s.powi(6) / (2.0 - n_s * n_s)
}

struct PropVars {
    n: f64,
    d: f64,
    b: f64,
    eta_r: f64,
}

fn prop_vars(blocks: &GaussianBlocks) -> PropVars {
    PropVars {
        n: blocks.n_s_prime(),
        d: blocks.eps_s_prime(),
        b: blocks.delivered_coupling(),
        eta_r: blocks.eta_r(),
    }
}

/// Delivered Bell probabilities `(s, e)`: `s` for the heralded Bell state,
/// `e` for each of the three others.
pub fn prop_bell_probs(blocks: &GaussianBlocks) -> (f64, f64) {
    let PropVars { n, d, b, eta_r } = prop_vars(blocks);
    let n4 = n.powi(4);
    let s = n4 / 2.0
        * (2.0 * d * d + 2.0 * b * d * (1.0 - 3.0 * d) + b * b * (1.0 - 4.0 * d + 5.0 * d * d));
    let e = n4 * n * d * (1.0 - eta_r) * (d + b - 2.0 * b * d);
    (s, e)
}

/// Total delivered Bell probability evaluated from its own closed form,
/// `2N_S'⁴ [mismatched bracket] + η_R² N_S'⁸ / 2N_S²`. Equals `s + 3e`.
pub fn prop_bell_total(blocks: &GaussianBlocks) -> f64 {
    let PropVars { n, d, b, .. } = prop_vars(blocks);
    let bracket = 2.0 * d * d + 2.0 * b * d * (1.0 - 3.0 * d) - 2.0 * b * b * d * (1.0 - 2.0 * d);
    2.0 * n.powi(4) * bracket + b * b * n.powi(6) / 2.0
}

/// Probability that the delivered state puts photons at both receivers.
pub fn prop_loadable_prob(blocks: &GaussianBlocks) -> f64 {
    let PropVars { n, d, b, .. } = prop_vars(blocks);
    let not_vacuum = (d + n * b / 2.0) * (1.0 + n - n * b / 2.0);
    not_vacuum * not_vacuum - n.powi(4) * b * b * (2.0 - 2.0 * b + b * b / 4.0) / 4.0
}

/// Bell-basis diagonal state `(s, e, e, e) / K` with the `s` entry on the
/// heralded class. The off-diagonal Bell elements vanish identically.
pub fn bell_diagonal_state(s: f64, e: f64, herald: BellClass) -> Result<BellDiagonal, StateError> {
    let mut w = [e; 4];
    w[BellState::from(herald).index()] = s;
    BellDiagonal::from_weights(w, herald)
}

pub fn purity(state: &BellDiagonal) -> f64 {
    state.purity()
}

/// Quality metrics derived from `(s, e, loadable)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quality {
    pub fraction: f64,
    pub fidelity: f64,
    pub purity: f64,
}

pub fn quality(s: f64, e: f64, loadable: f64) -> Quality {
    let k = s + 3.0 * e;
    Quality {
        fraction: k / loadable,
        fidelity: s / k,
        purity: (s * s + 3.0 * e * e) / (k * k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// The brackets exactly as printed, in terms of N_S and N_S'.
    fn literal(g: f64, eta_t: f64, eta_r: f64) -> (f64, f64, f64) {
        let ns = (eta_t * g + 1.0) / (1.0 + g);
        let n = 1.0 / (eta_r / ns + (1.0 - eta_r));
        let common =
            2.0 * (1.0 - n).powi(2) - 2.0 * eta_r * (3.0 * n.powi(3) - 5.0 * n * n + 2.0 * n) / ns;
        let s = n.powi(4) / 2.0
            * (common
                + eta_r * eta_r * (5.0 * n.powi(4) - 6.0 * n.powi(3) + 2.0 * n * n) / (ns * ns));
        let e = n.powi(4) / 2.0
            * (common
                + eta_r * eta_r * (4.0 * n.powi(4) - 6.0 * n.powi(3) + 2.0 * n * n) / (ns * ns));
        let l = 1.0 - 2.0 * n * n * (1.0 - eta_r * n / (2.0 * ns)).powi(2)
            + n.powi(4) * (1.0 - eta_r * n / ns).powi(2);
        (s, e, l)
    }

    #[test]
    fn bsm_examples() {
        assert_eq!(bsm_bell_singlet_prob(1.0), 0.5);
        assert_eq!(bsm_loadable_prob(1.0), 0.5);
        assert_eq!(bsm_bell_fraction(1.0), 1.0);
        assert_relative_eq!(
            bsm_bell_singlet_prob(0.998726),
            0.49619,
            max_relative = 2e-5
        );
        assert_relative_eq!(bsm_loadable_prob(0.998726), 0.501273, max_relative = 2e-6);
        assert!(bsm_bell_singlet_prob(1e-9) < 1e-50);
        assert_relative_eq!(bsm_loadable_prob(1e-9), 1.0);
    }

    #[test]
    fn bsm_fraction_at_operating_point() {
        let b = GaussianBlocks::new(0.0129, 0.9, 1.0);
        let frac = bsm_bell_fraction(b.n_s());
        assert!((frac - 0.99).abs() < 5e-4, "{frac}");
        // 40-digit reference evaluation.
        assert_relative_eq!(frac, 0.9898631465346302, max_relative = 1e-13);
    }

    #[test]
    fn bsm_fraction_decreases_with_gain() {
        for eta in [1.0, 0.9, 0.8, 0.7, 0.6, 0.5] {
            let mut last = f64::INFINITY;
            for i in 0..=200 {
                let g = 0.1 * i as f64 / 200.0;
                let f = bsm_bell_fraction(GaussianBlocks::new(g, eta, 1.0).n_s());
                if eta == 1.0 {
                    assert_eq!(f, 1.0);
                } else {
                    assert!(f < last || i == 0);
                }
                last = f;
            }
        }
    }

    #[test]
    fn lossless_propagation_reduces_to_source() {
        for &(g, eta) in &[(0.01, 0.9), (0.3, 0.5), (1.0, 1.0)] {
            let b = GaussianBlocks::new(g, eta, 1.0);
            let (s, e) = prop_bell_probs(&b);
            assert_relative_eq!(s, bsm_bell_singlet_prob(b.n_s()), max_relative = 1e-13);
            assert_eq!(e, 0.0);
            assert_relative_eq!(
                prop_loadable_prob(&b),
                bsm_loadable_prob(b.n_s()),
                max_relative = 1e-13
            );
            assert_relative_eq!(prop_bell_total(&b), s, max_relative = 1e-13);
        }
        let b = GaussianBlocks::new(0.7, 1.0, 1.0);
        assert_eq!(prop_loadable_prob(&b), 0.5);
    }

    #[test]
    fn operating_point_against_reference() {
        // 40-digit evaluations of the printed formulas.
        let b = GaussianBlocks::new(0.0173, 0.9, 0.01);
        let (s, e) = prop_bell_probs(&b);
        assert_relative_eq!(s, 5.033284900157036e-5, max_relative = 1e-12);
        let q = quality(s, e, prop_loadable_prob(&b));
        assert_relative_eq!(q.fidelity, 0.9900162420282165, max_relative = 1e-13);
        assert_relative_eq!(1.0 - q.fraction, 1.354724602900889e-4, max_relative = 1e-9);
        assert_relative_eq!(q.purity, 0.9801653846207518, max_relative = 1e-13);
    }

    #[test]
    fn stable_forms_match_printed_forms() {
        for &(g, eta_t, eta_r) in &[
            (0.05, 0.7, 0.3),
            (0.5, 0.5, 0.9),
            (0.01, 0.6, 0.01),
            (2.0, 0.9, 0.5),
        ] {
            let b = GaussianBlocks::new(g, eta_t, eta_r);
            let (s, e) = prop_bell_probs(&b);
            let (ls, le, ll) = literal(g, eta_t, eta_r);
            assert_relative_eq!(s, ls, max_relative = 1e-9);
            assert_relative_eq!(e, le, max_relative = 1e-8);
            assert_relative_eq!(prop_loadable_prob(&b), ll, max_relative = 1e-9);
        }
    }

    #[test]
    fn total_matches_sum_at_two_points() {
        for &(g, eta_t, eta_r) in &[(0.0173, 0.9, 0.01), (0.01, 0.5, 0.1)] {
            let b = GaussianBlocks::new(g, eta_t, eta_r);
            let (s, e) = prop_bell_probs(&b);
            assert_relative_eq!(prop_bell_total(&b), s + 3.0 * e, max_relative = 1e-12);
        }
    }

    #[test]
    fn vanishing_transmission_empties_loadable() {
        let b = GaussianBlocks::new(0.02, 0.8, 1e-9);
        assert!(prop_loadable_prob(&b) < 1e-17);
    }

    #[test]
    fn diagonal_state_examples() {
        let st = bell_diagonal_state(0.5, 0.0, BellClass::PsiMinus).unwrap();
        assert_eq!(st.probabilities(), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(purity(&st), 1.0);
        let b = GaussianBlocks::new(0.0173, 0.9, 0.01);
        let (s, e) = prop_bell_probs(&b);
        let st = bell_diagonal_state(s, e, BellClass::PsiMinus).unwrap();
        assert!((st.prob(BellState::PsiMinus) - 0.99).abs() < 5e-4);
        assert_eq!(st.prob(BellState::PhiPlus), st.prob(BellState::PhiMinus));
        assert!((purity(&st) - 0.98).abs() < 2e-3);
        assert!(matches!(
            bell_diagonal_state(0.0, 0.0, BellClass::PsiPlus),
            Err(StateError::DegenerateState(_))
        ));
        let pp = bell_diagonal_state(0.3, 0.1, BellClass::PsiPlus).unwrap();
        assert_relative_eq!(pp.prob(BellState::PsiPlus), 0.5);
    }
}
