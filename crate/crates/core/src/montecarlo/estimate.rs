use std::ops::AddAssign;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{any_herald_prob, blocks_for, herald_prob_island, prop_bell_probs};
use crate::model::{BellClass, HeraldMode, Polarization, SourceParams, Truth};
use crate::montecarlo::detectors::{
    enumerate_heralds, sample_into, select_herald, DetectorCounts, DetectorModel, SelectionPolicy,
};

/// Pulses per RNG substream. Fixed so results do not depend on the thread
/// count.
pub const BATCH_PULSES: u64 = 1 << 14;

pub const DEFAULT_PULSES: u64 = 1_000_000;

/// How herald candidates are generated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Counting {
    /// Sample every idler detector and read off valid click patterns.
    #[default]
    Detector,
    /// Treat each of the `N` (same-island) or `N²` (SPCI) island pairs as an
    /// independent trial heralding with the per-island probability, as the
    /// `N²`-exponent formula assumes.
    IndependentPairs,
}

impl std::str::FromStr for Counting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "detector" | "exact" => Ok(Self::Detector),
            "independent-pairs" | "independent" => Ok(Self::IndependentPairs),
            _ => Err(format!("unknown counting convention `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_pulses: u64,
    pub seed: u64,
    pub policy: SelectionPolicy,
    pub counting: Counting,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_pulses: DEFAULT_PULSES,
            seed: 0,
            policy: SelectionPolicy::default(),
            counting: Counting::default(),
        }
    }
}

/// Integer tallies over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCounts {
    pub pulses: u64,
    /// Pulses with at least one herald candidate.
    pub heralded: u64,
    pub true_heralds: u64,
    pub false_heralds: u64,
    pub psi_plus: u64,
    pub psi_minus: u64,
    /// Pulses with more than one candidate.
    pub multi_candidate: u64,
    /// Selected heralds whose H and V clicks came from different islands.
    pub cross_island: u64,
    /// Cross-island heralds where island n's V detectors or island m's H
    /// detectors also clicked.
    pub extra_clicks: u64,
}

impl AddAssign for SubCounts {
    fn add_assign(&mut self, o: Self) {
        self.pulses += o.pulses;
        self.heralded += o.heralded;
        self.true_heralds += o.true_heralds;
        self.false_heralds += o.false_heralds;
        self.psi_plus += o.psi_plus;
        self.psi_minus += o.psi_minus;
        self.multi_candidate += o.multi_candidate;
        self.cross_island += o.cross_island;
        self.extra_clicks += o.extra_clicks;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_pulses: u64,
    pub seed: u64,
    pub sub_counts: SubCounts,
}

impl MCEstimate {
    fn bernoulli(hits: u64, n_pulses: u64, seed: u64, sub_counts: SubCounts) -> Self {
        let v = hits as f64 / n_pulses as f64;
        Self {
            value: v,
            std_error: (v * (1.0 - v) / n_pulses as f64).sqrt(),
            n_pulses,
            seed,
            sub_counts,
        }
    }

    /// Number of standard errors separating the estimate from `expected`.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.value - expected;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn detector_batch(
    params: &SourceParams,
    policy: SelectionPolicy,
    pulses: u64,
    seed: u64,
    batch: u64,
) -> SubCounts {
    let mut det_rng = rng_for(seed, 2 * batch);
    let mut sel_rng = rng_for(seed, 2 * batch + 1);
    let model = DetectorModel::new(params.gain_minus_one(), params.eta_t());
    let mut counts = DetectorCounts::dark(params.n_islands() as usize);
    let mut tally = SubCounts {
        pulses,
        ..SubCounts::default()
    };
    for _ in 0..pulses {
        sample_into(&model, &mut counts, &mut det_rng);
        let candidates = enumerate_heralds(&counts, params.herald_mode());
        let Some(ev) = select_herald(&candidates, policy, &mut sel_rng) else {
            continue;
        };
        tally.heralded += 1;
        if candidates.len() > 1 {
            tally.multi_candidate += 1;
        }
        record(&mut tally, ev.truth, ev.bell_class());
        if !ev.is_same_island() {
            tally.cross_island += 1;
            if counts.any_click(ev.h_island, Polarization::V)
                || counts.any_click(ev.v_island, Polarization::H)
            {
                tally.extra_clicks += 1;
            }
        }
    }
    tally
}

fn record(tally: &mut SubCounts, truth: Truth, class: BellClass) {
    match truth {
        Truth::True => tally.true_heralds += 1,
        _ => tally.false_heralds += 1,
    }
    match class {
        BellClass::PsiPlus => tally.psi_plus += 1,
        BellClass::PsiMinus => tally.psi_minus += 1,
    }
}

fn independent_batch(params: &SourceParams, pulses: u64, seed: u64, batch: u64) -> SubCounts {
    use rand::Rng;
    let mut rng = rng_for(seed, 2 * batch);
    let mut tally = SubCounts {
        pulses,
        ..SubCounts::default()
    };
    let p = herald_prob_island(params.gain_minus_one(), params.eta_t());
    if p.is_nan() || p <= 0.0 {
        return tally;
    }
    let n = params.n_islands();
    let trials = if params.herald_mode().is_spci() {
        n * n
    } else {
        n
    };
    let gap = Geometric::new(p.min(1.0)).expect("probability in (0, 1]");
    for _ in 0..pulses {
        let first = gap.sample(&mut rng);
        if first >= trials {
            continue;
        }
        tally.heralded += 1;
        if gap.sample(&mut rng) < trials - first - 1 {
            tally.multi_candidate += 1;
        }
        if params.herald_mode().is_spci() && first / n != first % n {
            tally.cross_island += 1;
        }
        let truth = if rng.random_bool(0.5) {
            Truth::True
        } else {
            Truth::False
        };
        let class = if rng.random_bool(0.5) {
            BellClass::PsiPlus
        } else {
            BellClass::PsiMinus
        };
        record(&mut tally, truth, class);
    }
    tally
}

/// Runs `config.n_pulses` pulses and returns the summed tallies. Batches run
/// in parallel; each has its own substreams, so the result depends only on
/// `(params, config)`.
pub fn simulate(params: &SourceParams, config: &McConfig) -> SubCounts {
    let n_batches = config.n_pulses.div_ceil(BATCH_PULSES);
    let parts: Vec<SubCounts> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let pulses = BATCH_PULSES.min(config.n_pulses - b * BATCH_PULSES);
            match config.counting {
                Counting::Detector => detector_batch(params, config.policy, pulses, config.seed, b),
                Counting::IndependentPairs => independent_batch(params, pulses, config.seed, b),
            }
        })
        .collect();
    let mut total = SubCounts::default();
    for p in parts {
        total += p;
    }
    total
}

/// A finished run with its derived estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McRun {
    pub config: McConfig,
    pub counts: SubCounts,
}

impl McRun {
    pub fn new(params: &SourceParams, config: McConfig) -> Self {
        Self {
            config,
            counts: simulate(params, &config),
        }
    }

    /// Fraction of pulses whose selected herald is true.
    pub fn true_herald(&self) -> MCEstimate {
        MCEstimate::bernoulli(
            self.counts.true_heralds,
            self.config.n_pulses,
            self.config.seed,
            self.counts,
        )
    }

    /// Fraction of pulses with at least one herald candidate.
    pub fn any_herald(&self) -> MCEstimate {
        MCEstimate::bernoulli(
            self.counts.heralded,
            self.config.n_pulses,
            self.config.seed,
            self.counts,
        )
    }

    /// Delivered Bell-pair rate: pump rate times the simulated herald
    /// fraction times the closed-form delivered Bell probability.
    pub fn pair_rate(&self, params: &SourceParams) -> MCEstimate {
        let (s, _) = prop_bell_probs(&blocks_for(params));
        let h = self.any_herald();
        let scale = params.pump_rate() * s;
        MCEstimate {
            value: scale * h.value,
            std_error: scale * h.std_error,
            ..h
        }
    }
}

pub fn estimate_true_herald_prob(params: &SourceParams, n_pulses: u64, seed: u64) -> MCEstimate {
    let config = McConfig {
        n_pulses,
        seed,
        ..McConfig::default()
    };
    McRun::new(params, config).true_herald()
}

pub fn estimate_pair_rate(
    params: &SourceParams,
    n_pulses: u64,
    seed: u64,
    counting: Counting,
) -> MCEstimate {
    let config = McConfig {
        n_pulses,
        seed,
        counting,
        ..McConfig::default()
    };
    McRun::new(params, config).pair_rate(params)
}

/// Simulated SPCI herald fraction against both closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpciDiagnostic {
    pub simulated: f64,
    pub std_error: f64,
    pub exact: f64,
    pub pair_formula: f64,
    pub z_exact: f64,
    pub z_pair_formula: f64,
}

pub fn spci_diagnostic(params: &SourceParams, run: &McRun) -> SpciDiagnostic {
    let p = herald_prob_island(params.gain_minus_one(), params.eta_t());
    let n = params.n_islands();
    let est = run.any_herald();
    let exact = any_herald_prob(p, n, HeraldMode::SpciExact);
    let pair_formula = any_herald_prob(p, n, HeraldMode::SpciPaper);
    SpciDiagnostic {
        simulated: est.value,
        std_error: est.std_error,
        exact,
        pair_formula,
        z_exact: est.z_score(exact),
        z_pair_formula: est.z_score(pair_formula),
    }
}
