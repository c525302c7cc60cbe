//! Covariance blocks of the single-island signal/detected-idler Gaussian
//! state and the anti-normally-ordered characteristic functions they imply.
//!
//! Mode order follows the amplitude vectors used throughout this module:
//! signals `[S1H, S1V, S2H, S2V]`, detected idlers `[I'+H, I'+V, I'-H, I'-V]`.

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;

use crate::model::HeraldPattern;

pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Signal amplitudes ordered `[S1H, S1V, S2H, S2V]`.
pub type SignalAmplitudes = [Complex64; 4];

/// Which quadrature block of the 16-dimensional real characteristic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrature {
    Real,
    Imag,
}

/// Sign structure shared by the signal/idler cross blocks: the H and V
/// signals of Sagnac 1 couple to both idler branches with `+`, those of
/// Sagnac 2 with `+` to I'+ and `-` to I'-.
fn cross_pattern() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 1.0, //
        1.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, -1.0,
    )
}

/// Covariance blocks and state scalars at one `(G-1, η_T, η_R)` point.
///
/// Besides `N_S` and `N_S'` this carries `1 - N_S` and `1 - N_S'` as
/// primary quantities, computed without subtraction. The Bell-probability
/// formulas are differences of nearly equal terms when `N_S' ≈ 1`, and are
/// evaluated from these.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBlocks {
    gain_minus_one: f64,
    eta_t: f64,
    eta_r: f64,
    lambda_ss: Matrix4<f64>,
    lambda_si: Matrix4<f64>,
    lambda_ii: Matrix4<f64>,
    cond_cov: Matrix4<f64>,
    n_s: f64,
    eps_s: f64,
    n_s_prime: f64,
    eps_s_prime: f64,
}

impl GaussianBlocks {
    pub fn new(gain_minus_one: f64, eta_t: f64, eta_r: f64) -> Self {
        let g = gain_minus_one;
        let gain = 1.0 + g;
        let mu = eta_t * g;
        let n_s = (mu + 1.0) / gain;
        let eps_s = (1.0 - eta_t) * g / gain;
        // N_S' = N_S / (N_S + η_R (1 - N_S))
        let denom = n_s + eta_r * eps_s;
        let n_s_prime = n_s / denom;
        let eps_s_prime = eta_r * eps_s / denom;

        let cross = (eta_t * gain * g).sqrt() / (2.0 * std::f64::consts::SQRT_2 * gain);
        Self {
            gain_minus_one,
            eta_t,
            eta_r,
            lambda_ss: Matrix4::identity() * ((mu + 1.0) / (2.0 * gain)),
            lambda_si: cross_pattern() * -cross,
            lambda_ii: Matrix4::identity() * 0.5,
            cond_cov: Matrix4::identity() * (1.0 / (2.0 * (mu + 1.0))),
            n_s,
            eps_s,
            n_s_prime,
            eps_s_prime,
        }
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
    /// Λ_SS.
    pub fn lambda_ss(&self) -> &Matrix4<f64> {
        &self.lambda_ss
    }
    /// Λ_SI′ (real-quadrature sign convention).
    pub fn lambda_si(&self) -> &Matrix4<f64> {
        &self.lambda_si
    }
    /// Λ_I′I′.
    pub fn lambda_ii(&self) -> &Matrix4<f64> {
        &self.lambda_ii
    }
    /// Λ_I′I′|SS, the idler covariance conditioned on the signals.
    pub fn cond_cov(&self) -> &Matrix4<f64> {
        &self.cond_cov
    }
    pub fn n_s(&self) -> f64 {
        self.n_s
    }
    /// `1 - N_S`.
    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }
    pub fn n_s_prime(&self) -> f64 {
        self.n_s_prime
    }
    /// `1 - N_S'`.
    pub fn eps_s_prime(&self) -> f64 {
        self.eps_s_prime
    }
    /// `η_R N_S' / N_S`, the coefficient multiplying the pattern terms of the
    /// delivered characteristic function.
    pub fn delivered_coupling(&self) -> f64 {
        self.eta_r / (self.n_s + self.eta_r * self.eps_s)
    }

    /// The 8×8 quadratic form Λ̃ of the characteristic-function exponent for
    /// one quadrature.
    pub fn tilde_covariance(&self, part: Quadrature) -> Matrix8 {
        let gain = 1.0 + self.gain_minus_one;
        let mu = self.eta_t * self.gain_minus_one;
        let c = (2.0 * self.eta_t * gain * self.gain_minus_one).sqrt();
        let sign = match part {
            Quadrature::Real => 1.0,
            Quadrature::Imag => -1.0,
        };
        let cross = cross_pattern() * (sign * c);
        let mut m = Matrix8::zeros();
        m.fixed_view_mut::<4, 4>(0, 0)
            .copy_from(&(Matrix4::identity() * (2.0 * gain)));
        m.fixed_view_mut::<4, 4>(0, 4).copy_from(&cross);
        m.fixed_view_mut::<4, 4>(4, 0).copy_from(&cross.transpose());
        m.fixed_view_mut::<4, 4>(4, 4)
            .copy_from(&(Matrix4::identity() * (2.0 * (mu + 1.0))));
        m
    }

    /// Λ = Λ̃⁻¹ assembled from the closed-form blocks.
    pub fn covariance(&self, part: Quadrature) -> Matrix8 {
        let sign = match part {
            Quadrature::Real => 1.0,
            Quadrature::Imag => -1.0,
        };
        let cross = self.lambda_si * sign;
        let mut m = Matrix8::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(&self.lambda_ss);
        m.fixed_view_mut::<4, 4>(0, 4).copy_from(&cross);
        m.fixed_view_mut::<4, 4>(4, 0).copy_from(&cross.transpose());
        m.fixed_view_mut::<4, 4>(4, 4).copy_from(&self.lambda_ii);
        m
    }

    /// Λ_SI′ᵀ Λ_SS⁻¹, the regression of idler on signal quadratures.
    pub fn conditional_mean_gain(&self) -> Matrix4<f64> {
        let inv_ss = Matrix4::identity() * (1.0 / self.lambda_ss[(0, 0)]);
        self.lambda_si.transpose() * inv_ss
    }

    /// Characteristic function of the unconditioned single-island state of
    /// the signals and detected idlers, `exp(-ζᴿᵀΛ̃ᴿζᴿ/2 - ζᴵᵀΛ̃ᴵζᴵ/2)`.
    pub fn joint_chf(&self, signal: &SignalAmplitudes, idler: &[Complex64; 4]) -> f64 {
        let mut re = nalgebra::SVector::<f64, 8>::zeros();
        let mut im = nalgebra::SVector::<f64, 8>::zeros();
        for (k, z) in signal.iter().chain(idler.iter()).enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        let qr = re.dot(&(self.tilde_covariance(Quadrature::Real) * re));
        let qi = im.dot(&(self.tilde_covariance(Quadrature::Imag) * im));
        (-(qr + qi) / 2.0).exp()
    }
}

fn combine(a: Complex64, b: Complex64, sign: crate::model::Sign) -> f64 {
    match sign {
        crate::model::Sign::Plus => (a + b).norm_sqr(),
        crate::model::Sign::Minus => (a - b).norm_sqr(),
    }
}

fn norm_sqr(z: &SignalAmplitudes) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Characteristic function of the heralded signal state at the source,
/// before propagation:
/// `e^{-|ζ|²/N_S} [1 - |ζ1H ± ζ2H|²/2N_S] [1 - |ζ1V ± ζ2V|²/2N_S]`,
/// with each sign taken from the pattern.
pub fn chf_conditional_signal(
    blocks: &GaussianBlocks,
    zeta: &SignalAmplitudes,
    pattern: HeraldPattern,
) -> f64 {
    let n_s = blocks.n_s;
    let [s1h, s1v, s2h, s2v] = *zeta;
    let h = 1.0 - combine(s1h, s2h, pattern.h_sign) / (2.0 * n_s);
    let v = 1.0 - combine(s1v, s2v, pattern.v_sign) / (2.0 * n_s);
    (-norm_sqr(zeta) / n_s).exp() * h * v
}

/// Characteristic function of the heralded state after both signals pass
/// through transmissivity-η_R channels.
pub fn chf_delivered_signal(
    blocks: &GaussianBlocks,
    xi: &SignalAmplitudes,
    pattern: HeraldPattern,
) -> f64 {
    let n_sp = blocks.n_s_prime;
    let coupling = blocks.eta_r / blocks.n_s;
    let [s1h, s1v, s2h, s2v] = *xi;
    let h = 1.0 - coupling * combine(s1h, s2h, pattern.h_sign) / 2.0;
    let v = 1.0 - coupling * combine(s1v, s2v, pattern.v_sign) / 2.0;
    (-norm_sqr(xi) / n_sp).exp() * h * v
}
