//! Herald statistics, delivered Bell-state quality and pair rates for an
//! islands-based zero-added-loss multiplexed entanglement source.
//!
//! [`analytics`] holds the closed forms, [`fock`] a brute-force Fock-space
//! check of them and [`montecarlo`] a detector-level simulation of heralding.

pub mod analytics;
pub mod fock;
pub mod model;
pub mod montecarlo;

pub use model::{
    validate_params, BellClass, BellDiagonal, BellState, HeraldEvent, HeraldMode, HeraldPattern,
    MetricBundle, ParamError, ParamField, Polarization, RawParams, Sagnac, Sign, SourceParams,
    StateError, Truth, ValidationError,
};
