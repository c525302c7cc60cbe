use num_complex::Complex64;

use crate::fock::density::FockDensity;
use crate::fock::space::{FockSpace, ModeLabel, Sagnac};
use crate::fock::state::FockState;
use crate::fock::OracleError;
use crate::model::{BellState, HeraldPattern, Polarization, Sign};

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Probability that a detector of efficiency `eta` reports `k` clicks when
/// `n` photons arrive.
fn detection_weight(n: usize, k: usize, eta: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let c = (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp();
    c * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32)
}

/// Conditions a pure state on photon counts seen by detectors of efficiency
/// `eta` on the listed modes, and returns the unnormalized density of the
/// remaining modes. The trace is the outcome probability.
///
/// Equivalent to a loss channel on each measured mode followed by a
/// number-state projection, without ever forming the full density matrix.
pub fn condition_on_counts(
    state: &FockState,
    outcomes: &[(ModeLabel, usize)],
    eta: f64,
) -> Result<FockDensity, OracleError> {
    let space = state.space();
    let measured: Vec<usize> = outcomes
        .iter()
        .map(|(l, _)| space.position(*l))
        .collect::<Result<_, _>>()?;
    let kept: Vec<usize> = (0..space.n_modes())
        .filter(|k| !measured.contains(k))
        .collect();
    let kept_space = FockSpace::new(
        kept.iter().map(|&k| space.labels()[k]).collect(),
        kept.iter().map(|&k| space.dims()[k]).collect(),
    );
    let meas_space = FockSpace::new(
        measured.iter().map(|&k| space.labels()[k]).collect(),
        measured.iter().map(|&k| space.dims()[k]).collect(),
    );

    let amps = state.amplitudes();
    let dk = kept_space.dim();
    let mut rho = nalgebra::DMatrix::from_element(dk, dk, Complex64::new(0.0, 0.0));
    let mut column: Vec<(usize, Complex64)> = Vec::with_capacity(dk);
    for m in 0..meas_space.dim() {
        let mut weight = 1.0;
        for (slot, (_, clicks)) in outcomes.iter().enumerate() {
            weight *= detection_weight(meas_space.occupation(m, slot), *clicks, eta);
        }
        if weight == 0.0 {
            continue;
        }
        let base: usize = measured
            .iter()
            .enumerate()
            .map(|(slot, &k)| meas_space.occupation(m, slot) * space.strides()[k])
            .sum();
        column.clear();
        for r in 0..dk {
            let idx = base
                + kept
                    .iter()
                    .enumerate()
                    .map(|(slot, &k)| kept_space.occupation(r, slot) * space.strides()[k])
                    .sum::<usize>();
            let a = amps[idx];
            if a != Complex64::new(0.0, 0.0) {
                column.push((r, a));
            }
        }
        for &(i, ai) in &column {
            for &(j, aj) in &column {
                rho[(i, j)] += ai * aj.conj() * weight;
            }
        }
    }
    FockDensity::new(kept_space, rho)
}

/// The four modes `S1P, S2P, I'+P, I'-P` of one polarization of one island,
/// held as a pure state.
#[derive(Clone, Debug)]
pub struct PolarizationBlock {
    polarization: Polarization,
    cutoff: usize,
    state: FockState,
}

impl PolarizationBlock {
    /// Two TMSVs with `cutoff` pairs each; the idlers are combined on a 50-50
    /// splitter.
    pub fn build(
        gain_minus_one: f64,
        cutoff: usize,
        polarization: Polarization,
    ) -> Result<Self, OracleError> {
        let p = polarization;
        let s1 = ModeLabel::Signal(Sagnac::One, p);
        let s2 = ModeLabel::Signal(Sagnac::Two, p);
        let i1 = ModeLabel::Idler(Sagnac::One, p);
        let i2 = ModeLabel::Idler(Sagnac::Two, p);
        let state = FockState::tmsv(gain_minus_one, cutoff, s1, i1)
            .tensor(&FockState::tmsv(gain_minus_one, cutoff, s2, i2))
            .permuted(&[s1, s2, i1, i2])?
            .apply_beam_splitter_5050(i1, i2)?
            .relabeled(i1, ModeLabel::Branch(Sign::Plus, p))?
            .relabeled(i2, ModeLabel::Branch(Sign::Minus, p))?;
        Ok(Self {
            polarization,
            cutoff,
            state,
        })
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn state(&self) -> &FockState {
        &self.state
    }

    fn outcomes(&self, sign: Sign) -> [(ModeLabel, usize); 2] {
        [
            (ModeLabel::Branch(sign, self.polarization), 1),
            (ModeLabel::Branch(sign.flip(), self.polarization), 0),
        ]
    }

    /// Signal state after one click on the `sign` detector and none on the
    /// other, both with efficiency `eta_t`. Unnormalized.
    pub fn condition(&self, eta_t: f64, sign: Sign) -> Result<FockDensity, OracleError> {
        condition_on_counts(&self.state, &self.outcomes(sign), eta_t)
    }

    /// Same as [`condition`](Self::condition), routed through the dense
    /// loss channel and explicit projections.
    pub fn condition_via_channel(
        &self,
        eta_t: f64,
        sign: Sign,
    ) -> Result<FockDensity, OracleError> {
        let mut rho = FockDensity::from_pure(&self.state);
        for (label, _) in self.outcomes(sign) {
            rho = rho.apply_loss(label, eta_t)?;
        }
        for (label, clicks) in self.outcomes(sign) {
            rho = rho.project(label, clicks)?;
        }
        Ok(rho)
    }
}

/// Probability mass dropped by truncating all four TMSVs at `cutoff` pairs.
pub fn truncation_tail(gain_minus_one: f64, cutoff: usize) -> f64 {
    let r = gain_minus_one / (1.0 + gain_minus_one);
    let kept = 1.0 - r.powi(cutoff as i32 + 1);
    1.0 - kept.powi(4)
}

/// Heralded signal state over `S1H, S2H, S1V, S2V`, unnormalized.
#[derive(Clone, Debug)]
pub struct ConditionalSignal {
    pub pattern: HeraldPattern,
    pub tail: f64,
    pub unnormalized: FockDensity,
}

impl ConditionalSignal {
    pub fn herald_prob(&self) -> f64 {
        self.unnormalized.trace()
    }

    pub fn density(&self) -> Result<FockDensity, OracleError> {
        self.unnormalized.normalized()
    }
}

fn check_tail(gain_minus_one: f64, cutoff: usize, tail_budget: f64) -> Result<f64, OracleError> {
    let tail = truncation_tail(gain_minus_one, cutoff);
    if cutoff < 1 || tail > tail_budget {
        return Err(OracleError::CutoffTooSmall {
            cutoff,
            tail,
            budget: tail_budget,
        });
    }
    Ok(tail)
}

/// Builds the H and V blocks, conditions each on its half of `pattern` and
/// tensors the signal parts.
pub fn conditional_signal_state(
    gain_minus_one: f64,
    eta_t: f64,
    pattern: HeraldPattern,
    cutoff: usize,
    tail_budget: f64,
) -> Result<ConditionalSignal, OracleError> {
    let tail = check_tail(gain_minus_one, cutoff, tail_budget)?;
    let h = PolarizationBlock::build(gain_minus_one, cutoff, Polarization::H)?
        .condition(eta_t, pattern.h_sign)?;
    let v = PolarizationBlock::build(gain_minus_one, cutoff, Polarization::V)?
        .condition(eta_t, pattern.v_sign)?;
    Ok(ConditionalSignal {
        pattern,
        tail,
        unnormalized: h.tensor(&v),
    })
}

/// The same conditional state computed on all eight modes at once, without
/// splitting into polarization blocks. Only practical for small cutoffs.
pub fn joint_conditional_signal_state(
    gain_minus_one: f64,
    eta_t: f64,
    pattern: HeraldPattern,
    cutoff: usize,
) -> Result<ConditionalSignal, OracleError> {
    use Polarization::{H, V};
    let idler = |s, p| ModeLabel::Idler(s, p);
    let signal = |s, p| ModeLabel::Signal(s, p);
    let mut state = FockState::tmsv(
        gain_minus_one,
        cutoff,
        signal(Sagnac::One, H),
        idler(Sagnac::One, H),
    );
    for (s, p) in [(Sagnac::Two, H), (Sagnac::One, V), (Sagnac::Two, V)] {
        state = state.tensor(&FockState::tmsv(
            gain_minus_one,
            cutoff,
            signal(s, p),
            idler(s, p),
        ));
    }
    let order = [
        ModeLabel::S1H,
        ModeLabel::S2H,
        ModeLabel::S1V,
        ModeLabel::S2V,
        idler(Sagnac::One, H),
        idler(Sagnac::Two, H),
        idler(Sagnac::One, V),
        idler(Sagnac::Two, V),
    ];
    state = state.permuted(&order)?;
    for p in [H, V] {
        state = state
            .apply_beam_splitter_5050(idler(Sagnac::One, p), idler(Sagnac::Two, p))?
            .relabeled(idler(Sagnac::One, p), ModeLabel::Branch(Sign::Plus, p))?
            .relabeled(idler(Sagnac::Two, p), ModeLabel::Branch(Sign::Minus, p))?;
    }
    let outcomes = [
        (ModeLabel::Branch(pattern.h_sign, H), 1),
        (ModeLabel::Branch(pattern.h_sign.flip(), H), 0),
        (ModeLabel::Branch(pattern.v_sign, V), 1),
        (ModeLabel::Branch(pattern.v_sign.flip(), V), 0),
    ];
    Ok(ConditionalSignal {
        pattern,
        tail: truncation_tail(gain_minus_one, cutoff),
        unnormalized: condition_on_counts(&state, &outcomes, eta_t)?,
    })
}

/// Pure loss `eta_r` on every mode of `density`.
pub fn propagate_signals(density: &FockDensity, eta_r: f64) -> Result<FockDensity, OracleError> {
    density
        .labels()
        .to_vec()
        .into_iter()
        .try_fold(density.clone(), |rho, l| rho.apply_loss(l, eta_r))
}

/// Bell-basis content of a dual-rail signal state. Alice holds `S1H, S1V`
/// and Bob `S2H, S2V`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellMetrics {
    /// Indexed like [`BellState::ALL`].
    pub probs: [f64; 4],
    pub off_diagonal_max: f64,
    pub loadable: f64,
    pub trace: f64,
}

impl BellMetrics {
    pub fn prob(&self, state: BellState) -> f64 {
        self.probs[state.index()]
    }
}

fn bell_vector(space: &FockSpace, state: BellState) -> Result<Vec<Complex64>, OracleError> {
    let a_h = space.position(ModeLabel::S1H)?;
    let a_v = space.position(ModeLabel::S1V)?;
    let b_h = space.position(ModeLabel::S2H)?;
    let b_v = space.position(ModeLabel::S2V)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (first, second, sign) = match state {
        BellState::PsiPlus => ((a_h, b_v), (a_v, b_h), 1.0),
        BellState::PsiMinus => ((a_h, b_v), (a_v, b_h), -1.0),
        BellState::PhiPlus => ((a_h, b_h), (a_v, b_v), 1.0),
        BellState::PhiMinus => ((a_h, b_h), (a_v, b_v), -1.0),
    };
    let mut v = vec![Complex64::new(0.0, 0.0); space.dim()];
    for ((x, y), c) in [(first, h), (second, sign * h)] {
        let mut occ = vec![0; space.n_modes()];
        occ[x] = 1;
        occ[y] = 1;
        let idx = space.index_of(&occ).ok_or(OracleError::DimensionMismatch)?;
        v[idx] = Complex64::new(c, 0.0);
    }
    Ok(v)
}

pub fn bell_metrics(density: &FockDensity) -> Result<BellMetrics, OracleError> {
    let trace = density.trace();
    if trace.is_nan() || trace <= 0.0 {
        return Err(OracleError::ZeroTrace);
    }
    let space = density.space();
    let vectors: Vec<Vec<Complex64>> = BellState::ALL
        .iter()
        .map(|&b| bell_vector(space, b))
        .collect::<Result<_, _>>()?;
    let mut probs = [0.0; 4];
    let mut off_diagonal_max: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let z = density.matrix_element(u, v) / trace;
            if i == j {
                probs[i] = z.re;
            } else {
                off_diagonal_max = off_diagonal_max.max(z.norm());
            }
        }
    }

    let alice = [
        space.position(ModeLabel::S1H)?,
        space.position(ModeLabel::S1V)?,
    ];
    let bob = [
        space.position(ModeLabel::S2H)?,
        space.position(ModeLabel::S2V)?,
    ];
    let (mut p_a, mut p_b, mut p_ab) = (0.0, 0.0, 0.0);
    for i in 0..space.dim() {
        let a_empty = alice.iter().all(|&k| space.occupation(i, k) == 0);
        let b_empty = bob.iter().all(|&k| space.occupation(i, k) == 0);
        let d = density.matrix()[(i, i)].re;
        if a_empty {
            p_a += d;
        }
        if b_empty {
            p_b += d;
        }
        if a_empty && b_empty {
            p_ab += d;
        }
    }
    Ok(BellMetrics {
        probs,
        off_diagonal_max,
        loadable: (trace - p_a - p_b + p_ab) / trace,
        trace,
    })
}
