use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::model::{HeraldEvent, HeraldMode, Polarization, Sagnac, Sign, SourceParams, Truth};

/// Photon-number-resolving detector outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PnrClass {
    Zero,
    One,
    Multi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorReading {
    pub class: PnrClass,
    /// Source of the lone photon when `class` is `One`.
    pub source: Option<Sagnac>,
}

impl DetectorReading {
    pub const DARK: DetectorReading = DetectorReading {
        class: PnrClass::Zero,
        source: None,
    };
}

/// Readings of every idler detector for one pump pulse, island-major in the
/// order `+H, -H, +V, -V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorCounts {
    readings: Vec<DetectorReading>,
}

fn slot(pol: Polarization, sign: Sign) -> usize {
    match (pol, sign) {
        (Polarization::H, Sign::Plus) => 0,
        (Polarization::H, Sign::Minus) => 1,
        (Polarization::V, Sign::Plus) => 2,
        (Polarization::V, Sign::Minus) => 3,
    }
}

impl DetectorCounts {
    pub fn dark(n_islands: usize) -> Self {
        Self {
            readings: vec![DetectorReading::DARK; 4 * n_islands],
        }
    }

    pub fn n_islands(&self) -> usize {
        self.readings.len() / 4
    }

    pub fn readings(&self) -> &[DetectorReading] {
        &self.readings
    }

    pub fn get(&self, island: usize, pol: Polarization, sign: Sign) -> DetectorReading {
        self.readings[4 * island + slot(pol, sign)]
    }

    pub fn set(&mut self, island: usize, pol: Polarization, sign: Sign, reading: DetectorReading) {
        self.readings[4 * island + slot(pol, sign)] = reading;
    }

    /// The sign and photon source of a valid single-click pattern in one
    /// polarization of one island: one detector reads 1, its partner 0.
    pub fn valid_pattern(&self, island: usize, pol: Polarization) -> Option<(Sign, Sagnac)> {
        let plus = self.get(island, pol, Sign::Plus);
        let minus = self.get(island, pol, Sign::Minus);
        match (plus.class, minus.class) {
            (PnrClass::One, PnrClass::Zero) => Some((Sign::Plus, plus.source?)),
            (PnrClass::Zero, PnrClass::One) => Some((Sign::Minus, minus.source?)),
            _ => None,
        }
    }

    /// Whether any detector of `pol` on `island` clicked.
    pub fn any_click(&self, island: usize, pol: Polarization) -> bool {
        Sign::ALL
            .iter()
            .any(|&s| self.get(island, pol, s).class != PnrClass::Zero)
    }
}

/// Per-detector sampler: Bose-Einstein count of mean `G - 1`, then binomial
/// thinning at `η_T`.
#[derive(Clone, Copy, Debug)]
pub struct DetectorModel {
    arrivals: Option<Geometric>,
    eta_t: f64,
}

impl DetectorModel {
    pub fn new(gain_minus_one: f64, eta_t: f64) -> Self {
        let arrivals = (gain_minus_one > 0.0).then(|| {
            Geometric::new(1.0 / (1.0 + gain_minus_one)).expect("success probability in (0, 1]")
        });
        Self { arrivals, eta_t }
    }

    /// Photons that survive thinning in one pulse.
    pub fn surviving<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let Some(arrivals) = &self.arrivals else {
            return 0;
        };
        let photons = arrivals.sample(rng);
        (0..photons).filter(|_| rng.random_bool(self.eta_t)).count() as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DetectorReading {
        let kept = self.surviving(rng);
        match kept {
            0 => DetectorReading::DARK,
            1 => DetectorReading {
                class: PnrClass::One,
                source: Some(if rng.random_bool(0.5) {
                    Sagnac::One
                } else {
                    Sagnac::Two
                }),
            },
            _ => DetectorReading {
                class: PnrClass::Multi,
                source: None,
            },
        }
    }
}

pub fn sample_pulse<R: Rng + ?Sized>(params: &SourceParams, rng: &mut R) -> DetectorCounts {
    let model = DetectorModel::new(params.gain_minus_one(), params.eta_t());
    let mut counts = DetectorCounts::dark(params.n_islands() as usize);
    sample_into(&model, &mut counts, rng);
    counts
}

pub(crate) fn sample_into<R: Rng + ?Sized>(
    model: &DetectorModel,
    counts: &mut DetectorCounts,
    rng: &mut R,
) {
    for r in counts.readings.iter_mut() {
        *r = model.sample(rng);
    }
}

/// Every herald candidate in a pulse, ordered by H island then V island.
pub fn enumerate_heralds(counts: &DetectorCounts, mode: HeraldMode) -> Vec<HeraldEvent> {
    let n = counts.n_islands();
    let h: Vec<(usize, Sign, Sagnac)> = (0..n)
        .filter_map(|i| {
            counts
                .valid_pattern(i, Polarization::H)
                .map(|(s, src)| (i, s, src))
        })
        .collect();
    if h.is_empty() {
        return Vec::new();
    }
    let v: Vec<(usize, Sign, Sagnac)> = (0..n)
        .filter_map(|i| {
            counts
                .valid_pattern(i, Polarization::V)
                .map(|(s, src)| (i, s, src))
        })
        .collect();
    let mut out = Vec::new();
    for &(hi, hs, hsrc) in &h {
        for &(vi, vs, vsrc) in &v {
            if !mode.is_spci() && hi != vi {
                continue;
            }
            out.push(HeraldEvent {
                h_island: hi,
                v_island: vi,
                h_sign: hs,
                v_sign: vs,
                truth: if hsrc != vsrc {
                    Truth::True
                } else {
                    Truth::False
                },
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectionPolicy {
    #[default]
    UniformRandom,
    LowestIndex,
}

impl std::str::FromStr for SelectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "uniform" | "uniform-random" | "random" => Ok(Self::UniformRandom),
            "lowest" | "lowest-index" | "first" => Ok(Self::LowestIndex),
            _ => Err(format!("unknown selection policy `{s}`")),
        }
    }
}

/// Picks the one herald sent for this pulse.
pub fn select_herald<R: Rng + ?Sized>(
    candidates: &[HeraldEvent],
    policy: SelectionPolicy,
    rng: &mut R,
) -> Option<HeraldEvent> {
    match (candidates.len(), policy) {
        (0, _) => None,
        (1, _) | (_, SelectionPolicy::LowestIndex) => Some(candidates[0]),
        (n, SelectionPolicy::UniformRandom) => Some(candidates[rng.random_range(0..n)]),
    }
}
