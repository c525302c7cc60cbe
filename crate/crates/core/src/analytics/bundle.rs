//! Whole-design-point evaluation.

use crate::analytics::bell::{prop_bell_probs, prop_loadable_prob, quality};
use crate::analytics::gaussian::GaussianBlocks;
use crate::analytics::heralding::{any_herald_prob, herald_prob_island};
use crate::model::{MetricBundle, SourceParams};

pub fn blocks_for(params: &SourceParams) -> GaussianBlocks {
    GaussianBlocks::new(params.gain_minus_one(), params.eta_t(), params.eta_r())
}

/// Delivered entangled-pair rate `R_P · Pr(H) · s`, where `Pr(H)` counts
/// both true and false heralds.
pub fn pair_rate(params: &SourceParams) -> f64 {
    let p = herald_prob_island(params.gain_minus_one(), params.eta_t());
    let p_any = any_herald_prob(p, params.n_islands(), params.herald_mode());
    let (s, _) = prop_bell_probs(&blocks_for(params));
    params.pump_rate() * p_any * s
}

pub fn metric_bundle(params: &SourceParams) -> MetricBundle {
    let p = herald_prob_island(params.gain_minus_one(), params.eta_t());
    let p_any = any_herald_prob(p, params.n_islands(), params.herald_mode());
    let blocks = blocks_for(params);
    let (s, e) = prop_bell_probs(&blocks);
    let loadable = prop_loadable_prob(&blocks);
    let q = (p > 0.0).then(|| quality(s, e, loadable));
    MetricBundle {
        p_herald_island: p,
        p_herald_any: p_any,
        p_true: p_any / 2.0,
        n_s: blocks.n_s(),
        n_s_prime: blocks.n_s_prime(),
        s,
        e,
        p_bell: s + 3.0 * e,
        p_loadable: loadable,
        fraction: q.map(|q| q.fraction),
        fidelity: q.map(|q| q.fidelity),
        purity: q.map(|q| q.purity),
        rate: params.pump_rate() * p_any * s,
    }
}
