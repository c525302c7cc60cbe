//! Side-by-side evaluation of the Fock oracle and the closed forms.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytics::{
    herald_prob_pattern, prop_bell_probs, prop_loadable_prob, quality, GaussianBlocks,
};
use crate::fock::density::FockDensity;
use crate::fock::herald::{bell_metrics, conditional_signal_state, propagate_signals, BellMetrics};
use crate::fock::space::ModeLabel;
use crate::fock::OracleError;
use crate::model::{BellState, HeraldPattern};

pub const DEFAULT_CUTOFF: usize = 4;
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub cutoff: usize,
    pub tail_budget: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            tail_budget: DEFAULT_TAIL_BUDGET,
        }
    }
}

/// Delivered-state metrics computed entirely in the Fock basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeliveredMetrics {
    pub bell_probs: [f64; 4],
    pub s: f64,
    /// Mean of the three non-heralded Bell probabilities.
    pub e: f64,
    /// Largest minus smallest of the three non-heralded probabilities.
    pub e_spread: f64,
    pub loadable: f64,
    pub fraction: f64,
    pub fidelity: f64,
    pub purity: f64,
    pub off_diagonal_max: f64,
}

impl DeliveredMetrics {
    fn from_bell(m: &BellMetrics, pattern: HeraldPattern) -> Self {
        let heralded = BellState::from(pattern.bell_class()).index();
        let s = m.probs[heralded];
        let others: Vec<f64> = (0..4)
            .filter(|&i| i != heralded)
            .map(|i| m.probs[i])
            .collect();
        let e = others.iter().sum::<f64>() / 3.0;
        let hi = others.iter().copied().fold(f64::MIN, f64::max);
        let lo = others.iter().copied().fold(f64::MAX, f64::min);
        let k: f64 = m.probs.iter().sum();
        Self {
            bell_probs: m.probs,
            s,
            e,
            e_spread: hi - lo,
            loadable: m.loadable,
            fraction: k / m.loadable,
            fidelity: s / k,
            purity: m.probs.iter().map(|p| p * p).sum::<f64>() / (k * k),
            off_diagonal_max: m.off_diagonal_max,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OraclePoint {
    pub pattern: HeraldPattern,
    pub herald_prob: f64,
    pub tail: f64,
    /// `None` when the pattern cannot occur (zero gain).
    pub metrics: Option<DeliveredMetrics>,
    pub delivered: Option<FockDensity>,
}

pub fn oracle_point(
    gain_minus_one: f64,
    eta_t: f64,
    eta_r: f64,
    pattern: HeraldPattern,
    config: OracleConfig,
) -> Result<OraclePoint, OracleError> {
    let cond = conditional_signal_state(
        gain_minus_one,
        eta_t,
        pattern,
        config.cutoff,
        config.tail_budget,
    )?;
    let herald_prob = cond.herald_prob();
    if herald_prob.is_nan() || herald_prob <= 0.0 {
        return Ok(OraclePoint {
            pattern,
            herald_prob,
            tail: cond.tail,
            metrics: None,
            delivered: None,
        });
    }
    let delivered = propagate_signals(&cond.density()?, eta_r)?;
    let bell = bell_metrics(&delivered)?;
    Ok(OraclePoint {
        pattern,
        herald_prob,
        tail: cond.tail,
        metrics: Some(DeliveredMetrics::from_bell(&bell, pattern)),
        delivered: Some(delivered),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: &'static str,
    pub oracle: f64,
    pub analytic: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub pattern: String,
    pub cutoff: usize,
    pub tail: f64,
    pub rows: Vec<ComparisonRow>,
    pub off_diagonal_max: Option<f64>,
}

impl Comparison {
    pub fn max_delta(&self) -> f64 {
        self.rows.iter().map(|r| r.delta).fold(0.0, f64::max)
    }

    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

fn row(quantity: &'static str, oracle: f64, analytic: f64) -> ComparisonRow {
    ComparisonRow {
        quantity,
        oracle,
        analytic,
        delta: (oracle - analytic).abs(),
    }
}

/// Oracle against closed forms at one parameter point and herald pattern.
pub fn compare_with_analytics(
    gain_minus_one: f64,
    eta_t: f64,
    eta_r: f64,
    pattern: HeraldPattern,
    config: OracleConfig,
) -> Result<Comparison, OracleError> {
    let point = oracle_point(gain_minus_one, eta_t, eta_r, pattern, config)?;
    let mut rows = vec![row(
        "herald_prob",
        point.herald_prob,
        herald_prob_pattern(gain_minus_one, eta_t),
    )];
    if let Some(m) = &point.metrics {
        let blocks = GaussianBlocks::new(gain_minus_one, eta_t, eta_r);
        let (s, e) = prop_bell_probs(&blocks);
        let loadable = prop_loadable_prob(&blocks);
        let q = quality(s, e, loadable);
        rows.push(row("s", m.s, s));
        rows.push(row("e", m.e, e));
        rows.push(row("e_spread", m.e_spread, 0.0));
        rows.push(row("loadable", m.loadable, loadable));
        rows.push(row("fraction", m.fraction, q.fraction));
        rows.push(row("fidelity", m.fidelity, q.fidelity));
        rows.push(row("purity", m.purity, q.purity));
    }
    Ok(Comparison {
        pattern: pattern.to_string(),
        cutoff: config.cutoff,
        tail: point.tail,
        rows,
        off_diagonal_max: point.metrics.map(|m| m.off_diagonal_max),
    })
}

/// Reorders amplitudes given as `[S1H, S1V, S2H, S2V]` into the mode order
/// of `density`.
pub fn amplitudes_for(
    density: &FockDensity,
    zeta: &[Complex64; 4],
) -> Result<Vec<Complex64>, OracleError> {
    let source = [
        ModeLabel::S1H,
        ModeLabel::S1V,
        ModeLabel::S2H,
        ModeLabel::S2V,
    ];
    density
        .labels()
        .iter()
        .map(|l| {
            source
                .iter()
                .position(|s| s == l)
                .map(|k| zeta[k])
                .ok_or(OracleError::ModeNotFound(*l))
        })
        .collect()
}
