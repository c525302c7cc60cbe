use std::fmt;

use crate::fock::OracleError;
pub use crate::model::Sagnac;
use crate::model::{Polarization, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    Signal(Sagnac, Polarization),
    Idler(Sagnac, Polarization),
    /// Output of the idler beam splitter, `(I1 ± I2)/√2`.
    Branch(Sign, Polarization),
    /// Free-standing mode for single- or two-mode experiments.
    Aux(u8),
}

impl ModeLabel {
    pub const S1H: ModeLabel = ModeLabel::Signal(Sagnac::One, Polarization::H);
    pub const S2H: ModeLabel = ModeLabel::Signal(Sagnac::Two, Polarization::H);
    pub const S1V: ModeLabel = ModeLabel::Signal(Sagnac::One, Polarization::V);
    pub const S2V: ModeLabel = ModeLabel::Signal(Sagnac::Two, Polarization::V);
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = |s: &Sagnac| match s {
            Sagnac::One => 1,
            Sagnac::Two => 2,
        };
        match self {
            ModeLabel::Signal(s, p) => write!(f, "S{}{:?}", k(s), p),
            ModeLabel::Idler(s, p) => write!(f, "I{}{:?}", k(s), p),
            ModeLabel::Branch(sign, p) => write!(f, "I'{}{:?}", sign.symbol(), p),
            ModeLabel::Aux(i) => write!(f, "A{i}"),
        }
    }
}

/// Tensor-product Fock space with per-mode truncation. The first mode is the
/// most significant digit of a basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    labels: Vec<ModeLabel>,
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl FockSpace {
    pub fn new(labels: Vec<ModeLabel>, dims: Vec<usize>) -> Self {
        assert_eq!(labels.len(), dims.len(), "one dimension per mode");
        assert!(dims.iter().all(|&d| d >= 1));
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self {
            labels,
            dims,
            strides,
        }
    }

    /// All modes truncated at the same photon number.
    pub fn uniform(labels: Vec<ModeLabel>, cutoff: usize) -> Self {
        let dims = vec![cutoff + 1; labels.len()];
        Self::new(labels, dims)
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: ModeLabel) -> Result<usize, OracleError> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(OracleError::ModeNotFound(label))
    }

    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    /// Basis index of an occupation-number tuple, or `None` if any entry
    /// exceeds its mode's truncation.
    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        debug_assert_eq!(occupations.len(), self.dims.len());
        occupations
            .iter()
            .zip(&self.dims)
            .zip(&self.strides)
            .try_fold(0, |acc, ((&n, &d), &s)| (n < d).then_some(acc + n * s))
    }

    /// Occupations of `index`, one per mode.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes())
            .map(|k| self.occupation(index, k))
            .collect()
    }

    pub fn tensor(&self, other: &FockSpace) -> FockSpace {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FockSpace::new(labels, dims)
    }

    /// The space with one mode removed.
    pub fn without(&self, mode: usize) -> FockSpace {
        let mut labels = self.labels.clone();
        let mut dims = self.dims.clone();
        labels.remove(mode);
        dims.remove(mode);
        FockSpace::new(labels, dims)
    }

    /// The same space with a mode renamed.
    pub fn relabeled(&self, from: ModeLabel, to: ModeLabel) -> Result<FockSpace, OracleError> {
        let k = self.position(from)?;
        let mut labels = self.labels.clone();
        labels[k] = to;
        Ok(FockSpace::new(labels, self.dims.clone()))
    }
}
