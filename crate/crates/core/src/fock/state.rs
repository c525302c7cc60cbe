use num_complex::Complex64;

use crate::analytics::bose_einstein_pmf;
use crate::fock::space::{FockSpace, ModeLabel};
use crate::fock::OracleError;

/// A (possibly sub-normalized) pure state in a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    space: FockSpace,
    amps: Vec<Complex64>,
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
        .exp()
        .round()
}

impl FockState {
    pub fn from_amplitudes(space: FockSpace, amps: Vec<Complex64>) -> Self {
        assert_eq!(space.dim(), amps.len());
        Self { space, amps }
    }

    pub fn vacuum(space: FockSpace) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { space, amps }
    }

    /// Number state `|occupations⟩`.
    pub fn basis(space: FockSpace, occupations: &[usize]) -> Self {
        let idx = space
            .index_of(occupations)
            .expect("occupation within truncation");
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Self { space, amps }
    }

    /// Two-mode squeezed vacuum `Σ_m √P_m |m⟩|m⟩`, truncated at `cutoff`
    /// pairs. The norm deficit is `((G-1)/G)^(cutoff+1)`.
    pub fn tmsv(gain_minus_one: f64, cutoff: usize, signal: ModeLabel, idler: ModeLabel) -> Self {
        let space = FockSpace::uniform(vec![signal, idler], cutoff);
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        for m in 0..=cutoff {
            let idx = space.index_of(&[m, m]).unwrap();
            amps[idx] = Complex64::new(bose_einstein_pmf(gain_minus_one, m as u32).sqrt(), 0.0);
        }
        Self { space, amps }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Complex64 {
        self.space
            .index_of(occupations)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &FockState) -> FockState {
        let space = self.space.tensor(&other.space);
        let mut amps = Vec::with_capacity(space.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        FockState { space, amps }
    }

    /// Reorders modes to `order`, which must be a permutation of the labels.
    pub fn permuted(&self, order: &[ModeLabel]) -> Result<FockState, OracleError> {
        if order.len() != self.space.n_modes() {
            return Err(OracleError::DimensionMismatch);
        }
        let from: Vec<usize> = order
            .iter()
            .map(|&l| self.space.position(l))
            .collect::<Result<_, _>>()?;
        let dims: Vec<usize> = from.iter().map(|&k| self.space.dims()[k]).collect();
        let space = FockSpace::new(order.to_vec(), dims);
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut occ = vec![0; order.len()];
        for (i, a) in self.amps.iter().enumerate() {
            for (slot, &k) in from.iter().enumerate() {
                occ[slot] = self.space.occupation(i, k);
            }
            amps[space.index_of(&occ).unwrap()] = *a;
        }
        Ok(FockState { space, amps })
    }

    pub fn relabeled(&self, from: ModeLabel, to: ModeLabel) -> Result<FockState, OracleError> {
        Ok(FockState {
            space: self.space.relabeled(from, to)?,
            amps: self.amps.clone(),
        })
    }

    /// 50-50 beam splitter with outputs `(a ± b)/√2`; mode `a` carries the
    /// `+` output and mode `b` the `-` output afterwards.
    ///
    /// Both output modes are enlarged to hold every photon of the two inputs,
    /// so the map is exactly unitary on the truncated input.
    pub fn apply_beam_splitter_5050(
        &self,
        a: ModeLabel,
        b: ModeLabel,
    ) -> Result<FockState, OracleError> {
        let ka = self.space.position(a)?;
        let kb = self.space.position(b)?;
        let (da, db) = (self.space.dims()[ka], self.space.dims()[kb]);
        let out_dim = da + db - 1;
        let mut dims = self.space.dims().to_vec();
        dims[ka] = out_dim;
        dims[kb] = out_dim;
        let space = FockSpace::new(self.space.labels().to_vec(), dims);

        // table[na][nb] = [(p, amplitude of |p, na+nb-p⟩)]
        let mut table = vec![vec![Vec::new(); db]; da];
        for (na, row) in table.iter_mut().enumerate() {
            for (nb, cell) in row.iter_mut().enumerate() {
                *cell = split_photons(na, nb);
            }
        }

        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut occ = vec![0; self.space.n_modes()];
        for (i, amp) in self.amps.iter().enumerate() {
            if *amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (k, o) in occ.iter_mut().enumerate() {
                *o = self.space.occupation(i, k);
            }
            let (na, nb) = (occ[ka], occ[kb]);
            for &(p, c) in &table[na][nb] {
                occ[ka] = p;
                occ[kb] = na + nb - p;
                amps[space.index_of(&occ).unwrap()] += amp * c;
            }
        }
        Ok(FockState { space, amps })
    }
}

/// Output amplitudes of `|na, nb⟩` on a 50-50 splitter, indexed by the
/// photon number `p` leaving the `+` port.
fn split_photons(na: usize, nb: usize) -> Vec<(usize, f64)> {
    let total = na + nb;
    let mut out = vec![0.0; total + 1];
    for j in 0..=na {
        for k in 0..=nb {
            let sign = if (nb - k) % 2 == 0 { 1.0 } else { -1.0 };
            out[j + k] += sign * binomial(na, j) * binomial(nb, k);
        }
    }
    let norm = (-(total as f64) * std::f64::consts::LN_2 / 2.0
        - (ln_factorial(na) + ln_factorial(nb)) / 2.0)
        .exp();
    out.into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0.0)
        .map(|(p, c)| {
            let f = ((ln_factorial(p) + ln_factorial(total - p)) / 2.0).exp();
            (p, c * norm * f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const A: ModeLabel = ModeLabel::Aux(0);
    const B: ModeLabel = ModeLabel::Aux(1);

    fn two_mode(cutoff: usize, occ: [usize; 2]) -> FockState {
        FockState::basis(FockSpace::uniform(vec![A, B], cutoff), &occ)
    }

    #[test]
    fn single_photon_splits_evenly() {
        let out = two_mode(1, [1, 0]).apply_beam_splitter_5050(A, B).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(out.amplitude(&[1, 0]).re, h, max_relative = 1e-14);
        assert_relative_eq!(out.amplitude(&[0, 1]).re, h, max_relative = 1e-14);
        let out = two_mode(1, [0, 1]).apply_beam_splitter_5050(A, B).unwrap();
        assert_relative_eq!(out.amplitude(&[0, 1]).re, -h, max_relative = 1e-14);
    }

    #[test]
    fn hong_ou_mandel() {
        let out = two_mode(1, [1, 1]).apply_beam_splitter_5050(A, B).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(out.amplitude(&[2, 0]).re, h, max_relative = 1e-14);
        assert_relative_eq!(out.amplitude(&[0, 2]).re, -h, max_relative = 1e-14);
        assert!(out.amplitude(&[1, 1]).norm() < 1e-15);
    }

    #[test]
    fn splitter_preserves_norm() {
        for na in 0..5 {
            for nb in 0..5 {
                let out = two_mode(4, [na, nb])
                    .apply_beam_splitter_5050(A, B)
                    .unwrap();
                assert_relative_eq!(out.norm_sqr(), 1.0, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn tmsv_amplitudes_and_deficit() {
        let vac = FockState::tmsv(0.0, 3, A, B);
        assert_eq!(vac.amplitude(&[0, 0]).re, 1.0);
        assert_eq!(vac.norm_sqr(), 1.0);

        let st = FockState::tmsv(0.01, 4, A, B);
        let deficit = 1.0 - st.norm_sqr();
        assert_relative_eq!(deficit, (0.01f64 / 1.01).powi(5), max_relative = 1e-4);
        assert!((deficit - 9.5e-11).abs() < 1e-12);
        for g in [0.05, 0.7] {
            let st = FockState::tmsv(g, 4, A, B);
            let ratio = st.amplitude(&[1, 1]).re / st.amplitude(&[0, 0]).re;
            assert_relative_eq!(ratio, (g / (1.0 + g)).sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn permutation_moves_amplitudes() {
        let st = FockState::basis(FockSpace::new(vec![A, B], vec![2, 3]), &[1, 2]);
        let p = st.permuted(&[B, A]).unwrap();
        assert_eq!(p.space().dims(), &[3, 2]);
        assert_eq!(p.amplitude(&[2, 1]).re, 1.0);
        assert!(matches!(
            st.permuted(&[A, ModeLabel::Aux(7)]),
            Err(OracleError::ModeNotFound(_))
        ));
    }
}
