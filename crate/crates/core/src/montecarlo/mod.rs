//! Pulse-by-pulse simulation of the idler detectors and the herald rule.
//!
//! Each `±` detector of each island sees iid thermal light of mean `G - 1`,
//! thinned by `η_T`. A lone surviving photon is tagged with a uniformly
//! chosen Sagnac source; a herald is true when its H and V photons carry
//! different tags.
//!
//! Batch `b` draws detector outcomes from ChaCha8 stream `2b` and herald
//! selections from stream `2b + 1`, so changing the selection policy leaves
//! the at-least-one-candidate tallies untouched.

pub mod detectors;
pub mod estimate;

pub use detectors::{
    enumerate_heralds, sample_pulse, select_herald, DetectorCounts, DetectorModel, DetectorReading,
    PnrClass, SelectionPolicy,
};
pub use estimate::{
    estimate_pair_rate, estimate_true_herald_prob, simulate, spci_diagnostic, Counting, MCEstimate,
    McConfig, McRun, SpciDiagnostic, SubCounts, BATCH_PULSES, DEFAULT_PULSES,
};
