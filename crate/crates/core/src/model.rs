//! Domain types shared by the analytic, oracle and Monte Carlo engines.
//!
//! Every gain in the public API is expressed as `G - 1`, the mean number of
//! signal-idler pairs emitted per island per polarization per pump pulse.
//! Island indices are 0-based here and rendered 1-based by `Display`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which I± branch of the idler beam splitter registered a photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "Plus" => Ok(Sign::Plus),
            "-" | "minus" | "Minus" => Ok(Sign::Minus),
            other => Err(format!("unknown sign `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// The two Bell states a partial BSM can herald.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellClass {
    PsiPlus,
    PsiMinus,
}

/// The four polarization Bell states, in the storage order used by
/// [`BellDiagonal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl From<BellClass> for BellState {
    fn from(class: BellClass) -> Self {
        match class {
            BellClass::PsiPlus => BellState::PsiPlus,
            BellClass::PsiMinus => BellState::PsiMinus,
        }
    }
}

/// Equal signs herald ψ⁺, unequal signs herald ψ⁻.
pub fn classify_herald(h_sign: Sign, v_sign: Sign) -> BellClass {
    if h_sign == v_sign {
        BellClass::PsiPlus
    } else {
        BellClass::PsiMinus
    }
}

/// A partial-BSM herald pattern: the branch of the H click and of the V click.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeraldPattern {
    pub h_sign: Sign,
    pub v_sign: Sign,
}

impl HeraldPattern {
    pub const ALL: [HeraldPattern; 4] = [
        HeraldPattern::new(Sign::Plus, Sign::Plus),
        HeraldPattern::new(Sign::Plus, Sign::Minus),
        HeraldPattern::new(Sign::Minus, Sign::Plus),
        HeraldPattern::new(Sign::Minus, Sign::Minus),
    ];

    pub const fn new(h_sign: Sign, v_sign: Sign) -> Self {
        Self { h_sign, v_sign }
    }

    pub fn bell_class(self) -> BellClass {
        classify_herald(self.h_sign, self.v_sign)
    }
}

impl fmt::Display for HeraldPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}H{}V", self.h_sign.symbol(), self.v_sign.symbol())
    }
}

impl FromStr for HeraldPattern {
    type Err = String;

    /// Accepts `+H-V`, `-H-V`, ... (case-insensitive on the letters).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: Vec<char> = s.trim().chars().collect();
        let bad = || format!("herald pattern `{s}` is not of the form ±H±V");
        if t.len() != 4 || !t[1].eq_ignore_ascii_case(&'h') || !t[3].eq_ignore_ascii_case(&'v') {
            return Err(bad());
        }
        let sign = |c: char| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(bad()),
        };
        Ok(HeraldPattern::new(sign(t[0])?, sign(t[2])?))
    }
}

/// Which of the two Sagnac sources of an island emitted a photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sagnac {
    One,
    Two,
}

/// Whether a herald delivered one photon to each receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    True,
    False,
    /// Analytic contexts, where no which-source information exists.
    Unknown,
}

/// One herald candidate: H click on `h_island`, V click on `v_island`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeraldEvent {
    pub h_island: usize,
    pub v_island: usize,
    pub h_sign: Sign,
    pub v_sign: Sign,
    pub truth: Truth,
}

impl HeraldEvent {
    pub fn bell_class(&self) -> BellClass {
        classify_herald(self.h_sign, self.v_sign)
    }

    pub fn pattern(&self) -> HeraldPattern {
        HeraldPattern::new(self.h_sign, self.v_sign)
    }

    pub fn is_same_island(&self) -> bool {
        self.h_island == self.v_island
    }
}

impl fmt::Display for HeraldEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H{}@{} V{}@{} ({:?}, {:?})",
            self.h_sign.symbol(),
            self.h_island + 1,
            self.v_sign.symbol(),
            self.v_island + 1,
            self.bell_class(),
            self.truth
        )
    }
}

/// Island-pairing rule used for heralding and for the true-herald formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeraldMode {
    /// H and V clicks must come from the same island.
    SameIsland,
    /// Same-plus-cross-island heralding with the N_I² pair events treated as
    /// independent.
    #[default]
    SpciPaper,
    /// Same-plus-cross-island heralding with the exact combinatorics of
    /// independent per-island H and V patterns.
    SpciExact,
}

impl HeraldMode {
    pub fn is_spci(self) -> bool {
        !matches!(self, HeraldMode::SameIsland)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HeraldMode::SameIsland => "same-island",
            HeraldMode::SpciPaper => "spci-paper",
            HeraldMode::SpciExact => "spci-exact",
        }
    }
}

impl fmt::Display for HeraldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeraldMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "same" | "same-island" | "sameisland" => Ok(HeraldMode::SameIsland),
            "spci" | "spci-paper" | "spcipaper" => Ok(HeraldMode::SpciPaper),
            "exact" | "spci-exact" | "spciexact" => Ok(HeraldMode::SpciExact),
            other => Err(format!(
                "unknown herald mode `{other}` (expected same-island, spci-paper or spci-exact)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamField {
    GainMinusOne,
    EtaT,
    EtaR,
    NIslands,
    PumpRate,
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParamField::GainMinusOne => "gain_minus_one",
            ParamField::EtaT => "eta_t",
            ParamField::EtaR => "eta_r",
            ParamField::NIslands => "n_islands",
            ParamField::PumpRate => "pump_rate",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParamError {
    #[error("{field} = {value} is out of range: {constraint}")]
    OutOfRange {
        field: ParamField,
        value: f64,
        constraint: &'static str,
    },
}

impl ParamError {
    pub fn field(&self) -> ParamField {
        match self {
            ParamError::OutOfRange { field, .. } => *field,
        }
    }
}

/// Every violated constraint of a parameter set, not just the first.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("invalid source parameters: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError(pub Vec<ParamError>);

impl ValidationError {
    pub fn fields(&self) -> Vec<ParamField> {
        self.0.iter().map(ParamError::field).collect()
    }
}

/// Unvalidated design-point fields, as read from flags or a config file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub gain_minus_one: f64,
    pub eta_t: f64,
    pub eta_r: f64,
    pub n_islands: u64,
    pub pump_rate: f64,
    pub herald_mode: HeraldMode,
}

impl Default for RawParams {
    fn default() -> Self {
        Self {
            gain_minus_one: 0.0173,
            eta_t: 0.9,
            eta_r: 0.01,
            n_islands: 28,
            pump_rate: 1e10,
            herald_mode: HeraldMode::SpciPaper,
        }
    }
}

/// A validated design point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SourceParams {
    gain_minus_one: f64,
    eta_t: f64,
    eta_r: f64,
    n_islands: u64,
    pump_rate: f64,
    herald_mode: HeraldMode,
}

/// Checks every constraint and reports all violations at once.
pub fn validate_params(raw: RawParams) -> Result<SourceParams, ValidationError> {
    let mut errors = Vec::new();
    let mut check = |ok: bool, field, value: f64, constraint| {
        if !ok {
            errors.push(ParamError::OutOfRange {
                field,
                value,
                constraint,
            });
        }
    };
    let unit = |x: f64| x > 0.0 && x <= 1.0;
    check(
        raw.gain_minus_one.is_finite() && raw.gain_minus_one >= 0.0,
        ParamField::GainMinusOne,
        raw.gain_minus_one,
        "must be finite and >= 0",
    );
    check(
        unit(raw.eta_t),
        ParamField::EtaT,
        raw.eta_t,
        "must lie in (0, 1]",
    );
    check(
        unit(raw.eta_r),
        ParamField::EtaR,
        raw.eta_r,
        "must lie in (0, 1]",
    );
    check(
        raw.n_islands >= 1,
        ParamField::NIslands,
        raw.n_islands as f64,
        "must be >= 1",
    );
    check(
        raw.pump_rate.is_finite() && raw.pump_rate > 0.0,
        ParamField::PumpRate,
        raw.pump_rate,
        "must be finite and > 0",
    );
    if errors.is_empty() {
        Ok(SourceParams {
            gain_minus_one: raw.gain_minus_one,
            eta_t: raw.eta_t,
            eta_r: raw.eta_r,
            n_islands: raw.n_islands,
            pump_rate: raw.pump_rate,
            herald_mode: raw.herald_mode,
        })
    } else {
        Err(ValidationError(errors))
    }
}

impl SourceParams {
    pub fn new(
        gain_minus_one: f64,
        eta_t: f64,
        eta_r: f64,
        n_islands: u64,
        pump_rate: f64,
        herald_mode: HeraldMode,
    ) -> Result<Self, ValidationError> {
        validate_params(RawParams {
            gain_minus_one,
            eta_t,
            eta_r,
            n_islands,
            pump_rate,
            herald_mode,
        })
    }

    pub fn gain_minus_one(&self) -> f64 {
        self.gain_minus_one
    }
    pub fn eta_t(&self) -> f64 {
        self.eta_t
    }
    pub fn eta_r(&self) -> f64 {
        self.eta_r
    }
    pub fn n_islands(&self) -> u64 {
        self.n_islands
    }
    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }
    pub fn herald_mode(&self) -> HeraldMode {
        self.herald_mode
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            gain_minus_one: self.gain_minus_one,
            eta_t: self.eta_t,
            eta_r: self.eta_r,
            n_islands: self.n_islands,
            pump_rate: self.pump_rate,
            herald_mode: self.herald_mode,
        }
    }

    pub fn with_herald_mode(self, herald_mode: HeraldMode) -> Self {
        Self {
            herald_mode,
            ..self
        }
    }

    /// Re-validates with one or more fields replaced.
    pub fn modified(&self, f: impl FnOnce(&mut RawParams)) -> Result<Self, ValidationError> {
        let mut raw = self.raw();
        f(&mut raw);
        validate_params(raw)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StateError {
    #[error("degenerate Bell-diagonal state: total Bell probability is {0}")]
    DegenerateState(f64),
    #[error("negative Bell probability {0}")]
    NegativeProbability(f64),
}

/// A state diagonal in the Bell basis, normalized over the four Bell states.
///
/// Probabilities are stored in [`BellState::ALL`] order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellDiagonal {
    p: [f64; 4],
    herald: BellClass,
}

impl BellDiagonal {
    /// Normalizes arbitrary nonnegative weights by their sum K.
    pub fn from_weights(weights: [f64; 4], herald: BellClass) -> Result<Self, StateError> {
        if let Some(&w) = weights.iter().find(|w| **w < 0.0 || w.is_nan()) {
            return Err(StateError::NegativeProbability(w));
        }
        let k: f64 = weights.iter().sum();
        if !k.is_finite() || k <= 0.0 {
            return Err(StateError::DegenerateState(k));
        }
        Ok(Self {
            p: weights.map(|w| w / k),
            herald,
        })
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    pub fn prob(&self, state: BellState) -> f64 {
        self.p[state.index()]
    }

    pub fn herald(&self) -> BellClass {
        self.herald
    }

    /// Probability of the heralded Bell state.
    pub fn fidelity(&self) -> f64 {
        self.prob(self.herald.into())
    }

    pub fn purity(&self) -> f64 {
        self.p.iter().map(|p| p * p).sum()
    }

    pub fn renormalized(&self) -> Self {
        // The input is already normalized, so this cannot fail.
        Self::from_weights(self.p, self.herald).expect("normalized state")
    }
}

/// Every closed-form output at one design point.
///
/// `fraction`, `fidelity` and `purity` are conditional on a herald and are
/// `None` when no herald can occur (zero gain).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricBundle {
    pub p_herald_island: f64,
    pub p_herald_any: f64,
    pub p_true: f64,
    pub n_s: f64,
    pub n_s_prime: f64,
    pub s: f64,
    pub e: f64,
    pub p_bell: f64,
    pub p_loadable: f64,
    pub fraction: Option<f64>,
    pub fidelity: Option<f64>,
    pub purity: Option<f64>,
    pub rate: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_all_four_sign_pairs() {
        assert_eq!(classify_herald(Sign::Plus, Sign::Plus), BellClass::PsiPlus);
        assert_eq!(
            classify_herald(Sign::Plus, Sign::Minus),
            BellClass::PsiMinus
        );
        assert_eq!(
            classify_herald(Sign::Minus, Sign::Plus),
            BellClass::PsiMinus
        );
        assert_eq!(
            classify_herald(Sign::Minus, Sign::Minus),
            BellClass::PsiPlus
        );
    }

    #[test]
    fn headline_design_point_is_valid() {
        let p = SourceParams::new(0.0173, 0.9, 0.01, 28, 1e10, HeraldMode::SpciPaper).unwrap();
        assert_eq!(p.n_islands(), 28);
        assert!(SourceParams::new(0.0, 1.0, 1.0, 1, 1.0, HeraldMode::SameIsland).is_ok());
    }

    #[test]
    fn validation_reports_every_violation() {
        let raw = RawParams {
            gain_minus_one: -0.1,
            eta_t: 0.0,
            eta_r: 1.5,
            n_islands: 0,
            pump_rate: -1.0,
            herald_mode: HeraldMode::SameIsland,
        };
        let err = validate_params(raw).unwrap_err();
        assert_eq!(
            err.fields(),
            vec![
                ParamField::GainMinusOne,
                ParamField::EtaT,
                ParamField::EtaR,
                ParamField::NIslands,
                ParamField::PumpRate
            ]
        );
        let single = validate_params(RawParams {
            gain_minus_one: -0.1,
            ..RawParams::default()
        })
        .unwrap_err();
        assert_eq!(single.fields(), vec![ParamField::GainMinusOne]);
        let eta = validate_params(RawParams {
            eta_t: 0.0,
            ..RawParams::default()
        })
        .unwrap_err();
        assert_eq!(eta.fields(), vec![ParamField::EtaT]);
    }

    #[test]
    fn nan_gain_is_rejected() {
        let err = validate_params(RawParams {
            gain_minus_one: f64::NAN,
            ..RawParams::default()
        })
        .unwrap_err();
        assert_eq!(err.fields(), vec![ParamField::GainMinusOne]);
    }

    #[test]
    fn pattern_parsing_round_trips() {
        for pat in HeraldPattern::ALL {
            assert_eq!(pat.to_string().parse::<HeraldPattern>().unwrap(), pat);
        }
        assert!("+H+X".parse::<HeraldPattern>().is_err());
        assert_eq!(
            "+h-v".parse::<HeraldPattern>().unwrap().bell_class(),
            BellClass::PsiMinus
        );
    }

    #[test]
    fn herald_event_display_is_one_based() {
        let ev = HeraldEvent {
            h_island: 2,
            v_island: 6,
            h_sign: Sign::Plus,
            v_sign: Sign::Minus,
            truth: Truth::Unknown,
        };
        assert!(ev.to_string().starts_with("H+@3 V-@7"));
        assert_eq!(ev.bell_class(), BellClass::PsiMinus);
    }

    #[test]
    fn bell_diagonal_rejects_zero_weight() {
        assert_eq!(
            BellDiagonal::from_weights([0.0; 4], BellClass::PsiMinus),
            Err(StateError::DegenerateState(0.0))
        );
    }

    #[test]
    fn uniform_bell_mixture_purity() {
        let d = BellDiagonal::from_weights([1.0; 4], BellClass::PsiPlus).unwrap();
        assert!((d.purity() - 0.25).abs() < 1e-15);
    }
}
