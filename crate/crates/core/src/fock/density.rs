use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analytics::bose_einstein_pmf;
use crate::fock::space::{FockSpace, ModeLabel};
use crate::fock::state::FockState;
use crate::fock::OracleError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Photon-number-resolving outcome probabilities on one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PnrProbs {
    pub p0: f64,
    pub p1: f64,
    pub p_multi: f64,
}

impl PnrProbs {
    pub fn total(&self) -> f64 {
        self.p0 + self.p1 + self.p_multi
    }
}

/// Density matrix on a truncated multimode Fock space. Conditioning leaves it
/// sub-normalized; the trace is the probability of the retained outcomes.
#[derive(Clone, Debug)]
pub struct FockDensity {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `table[n][k] = sqrt(C(n,k) η^(n-k) (1-η)^k)`, the amplitude for losing `k`
/// of `n` photons.
fn loss_amplitudes(dim: usize, eta: f64) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let c = (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp();
                    (c * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt()
                })
                .collect()
        })
        .collect()
}

impl FockDensity {
    pub fn new(space: FockSpace, matrix: DMatrix<Complex64>) -> Result<Self, OracleError> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(OracleError::DimensionMismatch);
        }
        Ok(Self { space, matrix })
    }

    pub fn from_pure(state: &FockState) -> Self {
        let v = state.amplitudes();
        let n = v.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self {
            space: state.space().clone(),
            matrix,
        }
    }

    /// Truncated single-mode thermal state with mean photon number `mean`.
    pub fn thermal(label: ModeLabel, mean: f64, cutoff: usize) -> Self {
        let space = FockSpace::uniform(vec![label], cutoff);
        let matrix = DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
            if i == j {
                Complex64::new(bose_einstein_pmf(mean, i as u32), 0.0)
            } else {
                ZERO
            }
        });
        Self { space, matrix }
    }

    pub fn number_state(label: ModeLabel, n: usize, cutoff: usize) -> Self {
        let space = FockSpace::uniform(vec![label], cutoff);
        Self::from_pure(&FockState::basis(space, &[n]))
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn labels(&self) -> &[ModeLabel] {
        self.space.labels()
    }

    /// Largest photon number representable in any mode.
    pub fn cutoff(&self) -> usize {
        self.space.dims().iter().max().copied().unwrap_or(1) - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn normalized(&self) -> Result<FockDensity, OracleError> {
        let t = self.trace();
        if t.is_nan() || t <= 0.0 {
            return Err(OracleError::ZeroTrace);
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.map(|z| z / t),
        })
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()).map(|z| z * 0.5);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨u|ρ|v⟩`.
    pub fn matrix_element(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let rv = &self.matrix * DMatrix::from_column_slice(v.len(), 1, v);
        u.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn tensor(&self, other: &FockDensity) -> FockDensity {
        Self {
            space: self.space.tensor(&other.space),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Pure-loss channel of transmissivity `eta` on one mode.
    pub fn apply_loss(&self, label: ModeLabel, eta: f64) -> Result<FockDensity, OracleError> {
        let k = self.space.position(label)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(OracleError::InvalidTransmissivity(eta));
        }
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let dim = self.space.dims()[k];
        let stride = self.space.strides()[k];
        let amps = loss_amplitudes(dim, eta);
        let n = self.matrix.nrows();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for j in 0..n {
            let nj = self.space.occupation(j, k);
            for i in 0..n {
                let rho = self.matrix[(i, j)];
                if rho == ZERO {
                    continue;
                }
                let ni = self.space.occupation(i, k);
                for lost in 0..=ni.min(nj) {
                    let w = amps[ni][lost] * amps[nj][lost];
                    out[(i - lost * stride, j - lost * stride)] += rho * w;
                }
            }
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: out,
        })
    }

    /// Unnormalized post-measurement state of the other modes after finding
    /// exactly `n` photons in `label`; its trace is the outcome probability.
    pub fn project(&self, label: ModeLabel, n: usize) -> Result<FockDensity, OracleError> {
        let k = self.space.position(label)?;
        let rest = self.space.without(k);
        let dim = self.space.dims()[k];
        if n >= dim {
            return Ok(Self {
                matrix: DMatrix::from_element(rest.dim(), rest.dim(), ZERO),
                space: rest,
            });
        }
        let lift = self.lift_map(k, &rest, n);
        let m = rest.dim();
        let matrix = DMatrix::from_fn(m, m, |i, j| self.matrix[(lift[i], lift[j])]);
        Ok(Self {
            space: rest,
            matrix,
        })
    }

    pub fn partial_trace(&self, label: ModeLabel) -> Result<FockDensity, OracleError> {
        let k = self.space.position(label)?;
        let rest = self.space.without(k);
        let m = rest.dim();
        let mut matrix = DMatrix::from_element(m, m, ZERO);
        for n in 0..self.space.dims()[k] {
            let lift = self.lift_map(k, &rest, n);
            for j in 0..m {
                for i in 0..m {
                    matrix[(i, j)] += self.matrix[(lift[i], lift[j])];
                }
            }
        }
        Ok(Self {
            space: rest,
            matrix,
        })
    }

    /// Full-space index of each basis state of `rest` with `n` photons put
    /// back into mode `k`.
    fn lift_map(&self, k: usize, rest: &FockSpace, n: usize) -> Vec<usize> {
        (0..rest.dim())
            .map(|r| {
                let mut occ = rest.occupations(r);
                occ.insert(k, n);
                self.space.index_of(&occ).unwrap()
            })
            .collect()
    }

    pub fn pnr_probs(&self, label: ModeLabel) -> Result<PnrProbs, OracleError> {
        let k = self.space.position(label)?;
        let mut by_count = [0.0; 3];
        for i in 0..self.matrix.nrows() {
            let n = self.space.occupation(i, k).min(2);
            by_count[n] += self.matrix[(i, i)].re;
        }
        Ok(PnrProbs {
            p0: by_count[0],
            p1: by_count[1],
            p_multi: by_count[2],
        })
    }

    /// Anti-normally ordered characteristic function `Tr[ρ e^(-ζ†a) e^(a†ζ)]`
    /// with one amplitude per mode, in the order of the space's labels.
    ///
    /// Each single-mode factor equals `e^(-|ζ|²) e^(ζa†) e^(-ζ*a)`, whose
    /// matrix elements are finite sums, so the result is exact for the
    /// truncated `ρ`.
    pub fn chf_anti_normal(&self, amplitudes: &[Complex64]) -> Result<Complex64, OracleError> {
        if amplitudes.len() != self.space.n_modes() {
            return Err(OracleError::DimensionMismatch);
        }
        let factors: Vec<DMatrix<Complex64>> = amplitudes
            .iter()
            .zip(self.space.dims())
            .map(|(&z, &d)| anti_normal_displacement(z, d))
            .collect();
        let n = self.matrix.nrows();
        let occ: Vec<Vec<usize>> = (0..n).map(|i| self.space.occupations(i)).collect();
        let mut total = ZERO;
        for j in 0..n {
            for i in 0..n {
                let rho = self.matrix[(i, j)];
                if rho == ZERO {
                    continue;
                }
                // Tr[ρE] = Σ ρ_ij E_ji
                let mut e = Complex64::new(1.0, 0.0);
                for (f, (a, b)) in factors.iter().zip(occ[j].iter().zip(&occ[i])) {
                    e *= f[(*a, *b)];
                }
                total += rho * e;
            }
        }
        Ok(total)
    }
}

/// Matrix of `e^(-ζ*a) e^(ζa†)` on the first `dim` number states.
fn anti_normal_displacement(z: Complex64, dim: usize) -> DMatrix<Complex64> {
    let lf: Vec<f64> = (0..dim).map(ln_factorial).collect();
    let pref = (-z.norm_sqr()).exp();
    let pow = |base: Complex64, p: usize| base.powu(p as u32);
    DMatrix::from_fn(dim, dim, |m, n| {
        let mut acc = ZERO;
        for l in 0..=m.min(n) {
            let left = pow(z, m - l) * ((lf[m] - lf[l]) / 2.0 - lf[m - l]).exp();
            let right = pow(-z.conj(), n - l) * ((lf[n] - lf[l]) / 2.0 - lf[n - l]).exp();
            acc += left * right;
        }
        acc * pref
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const A: ModeLabel = ModeLabel::Aux(0);
    const B: ModeLabel = ModeLabel::Aux(1);

    fn diag(rho: &FockDensity) -> Vec<f64> {
        rho.matrix().diagonal().iter().map(|z| z.re).collect()
    }

    #[test]
    fn loss_on_single_photon() {
        let rho = FockDensity::number_state(A, 1, 3)
            .apply_loss(A, 0.3)
            .unwrap();
        let d = diag(&rho);
        assert_relative_eq!(d[0], 0.7, max_relative = 1e-14);
        assert_relative_eq!(d[1], 0.3, max_relative = 1e-14);
        assert!(rho.hermiticity_error() < 1e-15);
    }

    #[test]
    fn unit_transmissivity_is_identity() {
        let st = FockState::tmsv(0.2, 3, A, B);
        let rho = FockDensity::from_pure(&st);
        let out = rho.apply_loss(A, 1.0).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn zero_transmissivity_leaves_vacuum() {
        let st = FockState::tmsv(0.2, 3, A, B);
        let rho = FockDensity::from_pure(&st);
        let out = rho.apply_loss(A, 0.0).unwrap().apply_loss(B, 0.0).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)].re, rho.trace(), max_relative = 1e-14);
        assert_relative_eq!(out.trace(), rho.trace(), max_relative = 1e-14);
    }

    #[test]
    fn thermal_damps_to_thermal() {
        let (mu, eta) = (0.4, 0.35);
        let rho = FockDensity::thermal(A, mu, 60).apply_loss(A, eta).unwrap();
        let expect = FockDensity::thermal(A, eta * mu, 60);
        for (a, b) in diag(&rho).iter().zip(diag(&expect)).take(20) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn loss_preserves_trace() {
        let st = FockState::tmsv(0.5, 5, A, B)
            .apply_beam_splitter_5050(A, B)
            .unwrap();
        let rho = FockDensity::from_pure(&st);
        for eta in [0.0, 0.1, 0.77, 1.0] {
            let out = rho.apply_loss(B, eta).unwrap();
            assert!((out.trace() - rho.trace()).abs() < 1e-12);
        }
        assert!(matches!(
            rho.apply_loss(ModeLabel::Aux(9), 0.5),
            Err(OracleError::ModeNotFound(_))
        ));
    }

    #[test]
    fn pnr_examples() {
        let vac = FockDensity::number_state(A, 0, 3).pnr_probs(A).unwrap();
        assert_eq!((vac.p0, vac.p1, vac.p_multi), (1.0, 0.0, 0.0));
        let two = FockDensity::number_state(A, 2, 3).pnr_probs(A).unwrap();
        assert_eq!((two.p0, two.p1, two.p_multi), (0.0, 0.0, 1.0));
        let mu = 0.3;
        let th = FockDensity::thermal(A, mu, 80);
        let p = th.pnr_probs(A).unwrap();
        assert_relative_eq!(p.p1, mu / (1.0 + mu).powi(2), max_relative = 1e-14);
        assert!((p.total() - th.trace()).abs() < 1e-12);
    }

    #[test]
    fn split_thermal_marginals_stay_thermal() {
        // Equal-mean thermal light on both inputs; each output marginal keeps
        // the same mean and the thermal distribution.
        let mu = 0.05;
        let cutoff = 12;
        let input =
            FockDensity::thermal(A, mu, cutoff).tensor(&FockDensity::thermal(B, mu, cutoff));
        // The splitter acts on pure states, so purify through the diagonal.
        let space = input.space().clone();
        let mut out = None::<FockDensity>;
        for i in 0..space.dim() {
            let w = input.matrix()[(i, i)].re;
            let st = FockState::basis(space.clone(), &space.occupations(i))
                .apply_beam_splitter_5050(A, B)
                .unwrap();
            let mut term = FockDensity::from_pure(&st);
            term.matrix.iter_mut().for_each(|z| *z *= w);
            out = Some(match out {
                None => term,
                Some(acc) => FockDensity {
                    space: acc.space,
                    matrix: acc.matrix + term.matrix,
                },
            });
        }
        let marginal = out.unwrap().partial_trace(B).unwrap();
        let d = diag(&marginal);
        for (n, got) in d.iter().enumerate().take(6) {
            assert!(
                (got - bose_einstein_pmf(mu, n as u32)).abs() < 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn vacuum_chf() {
        let vac = FockDensity::number_state(A, 0, 4);
        for z in [Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.7)] {
            let c = vac.chf_anti_normal(&[z]).unwrap();
            assert_relative_eq!(c.re, (-z.norm_sqr()).exp(), max_relative = 1e-14);
            assert!(c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn chf_at_origin_is_trace() {
        let rho = FockDensity::from_pure(&FockState::tmsv(0.3, 4, A, B))
            .apply_loss(A, 0.4)
            .unwrap();
        let c = rho.chf_anti_normal(&[ZERO, ZERO]).unwrap();
        assert_relative_eq!(c.re, rho.trace(), max_relative = 1e-14);
    }

    #[test]
    fn thermal_chf() {
        // Anti-normal chf of a thermal state is e^(-(1+μ)|ζ|²).
        let mu = 0.2;
        let th = FockDensity::thermal(A, mu, 80);
        let z = Complex64::new(0.4, 0.3);
        let c = th.chf_anti_normal(&[z]).unwrap();
        assert_relative_eq!(
            c.re,
            (-(1.0 + mu) * z.norm_sqr()).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn projection_and_partial_trace() {
        let rho = FockDensity::from_pure(&FockState::tmsv(0.3, 5, A, B));
        let proj = rho.project(A, 1).unwrap();
        assert_relative_eq!(
            proj.trace(),
            bose_einstein_pmf(0.3, 1),
            max_relative = 1e-14
        );
        assert_relative_eq!(proj.matrix()[(1, 1)].re, proj.trace(), max_relative = 1e-14);
        let red = rho.partial_trace(A).unwrap();
        assert_relative_eq!(red.trace(), rho.trace(), max_relative = 1e-14);
        assert!(red.min_eigenvalue() > -1e-12);
        assert!(red.purity() < 1.0);
    }
}
