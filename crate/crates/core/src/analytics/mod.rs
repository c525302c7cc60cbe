//! Closed-form metrics, covariance blocks, characteristic functions and
//! design-parameter solvers.

pub mod bell;
pub mod bundle;
pub mod gaussian;
pub mod heralding;
pub mod solve;

pub use bell::{
    bell_diagonal_state, bsm_bell_fraction, bsm_bell_singlet_prob, bsm_loadable_prob,
    prop_bell_probs, prop_bell_total, prop_loadable_prob, purity, quality, Quality,
};
pub use bundle::{blocks_for, metric_bundle, pair_rate};
pub use gaussian::{
    chf_conditional_signal, chf_delivered_signal, GaussianBlocks, Quadrature, SignalAmplitudes,
};
pub use heralding::{
    any_herald_prob, bose_einstein_pmf, herald_prob_island, herald_prob_pattern, islands_required,
    polarization_pattern_prob, true_herald_prob,
};
pub use solve::{solve_gain, GainTarget, SolveError, GAIN_BRACKET};
