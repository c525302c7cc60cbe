//! Brute-force truncated Fock-space model of one island pair, used to check
//! the closed forms without relying on them.

pub mod crosscheck;
pub mod density;
pub mod herald;
pub mod space;
pub mod state;

use thiserror::Error;

pub use crosscheck::{
    amplitudes_for, compare_with_analytics, oracle_point, Comparison, ComparisonRow,
    DeliveredMetrics, OracleConfig, OraclePoint, DEFAULT_CUTOFF, DEFAULT_TAIL_BUDGET,
};
pub use density::{FockDensity, PnrProbs};
pub use herald::{
    bell_metrics, condition_on_counts, conditional_signal_state, joint_conditional_signal_state,
    propagate_signals, truncation_tail, BellMetrics, ConditionalSignal, PolarizationBlock,
};
pub use space::{FockSpace, ModeLabel, Sagnac};
pub use state::FockState;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("mode {0} is not part of this state")]
    ModeNotFound(ModeLabel),
    #[error("cutoff {cutoff} drops {tail:.3e} of the state, above the budget {budget:.3e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        budget: f64,
    },
    #[error("dimensions do not match")]
    DimensionMismatch,
    #[error("transmissivity {0} is outside [0, 1]")]
    InvalidTransmissivity(f64),
    #[error("state has zero trace")]
    ZeroTrace,
}
