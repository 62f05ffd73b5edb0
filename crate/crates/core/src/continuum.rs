//! Finite-bandwidth (continuum-mode) versions of the output moments.
//!
//! Both photons share the Gaussian spectral amplitude `ξ(ω)` with joint
//! amplitude `ψ(ω, ω′) = ξ(ω) ξ(ω′)`. With `⟨f⟩ = ∫ |ξ|² f dω`, the HOM
//! moments become
//!
//! ```text
//! ⟨N̂₁⟩          = ⟨T⟩ + ⟨R⟩
//! ⟨N̂₁(N̂₁−1)⟩    = 2⟨T⟩⟨R⟩ + 2|⟨t r*⟩|²
//! ⟨N̂₁N̂₂⟩        = ⟨T⟩² + ⟨R⟩² + 2 Re(⟨t* r⟩²)
//! ```
//!
//! but they are evaluated here as the literal double integrals over
//! `(ω, ω′)` on a tensor-product Gauss-Legendre grid; the factorised forms
//! serve as test oracles.
//!
//! The coherent means integrate `|t(ω)α(ω) + r(ω′)β(ω′)|²` (port 1) and
//! `|t(ω)β(ω) + r(ω′)α(ω′)|²` (port 2) against `|ξ(ω)ξ(ω′)|²`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::{
    fisher_from_values, EstimationError, FisherEstimate, Interferometer, Scheme, P_FLOOR,
};
use crate::quantum_stats::{
    click_distribution, CoherentMeans, HomMoments, PairDistribution, StatsError,
};
use crate::tmm::{stack_response, TmmError};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuumError {
    #[error(transparent)]
    Tmm(#[from] TmmError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("invalid spectral profile: {0}")]
    InvalidProfile(String),
    #[error("input envelope normalization {0} differs from 1")]
    Normalization(f64),
    #[error(
        "quadrature span of {available:.3} FWHM fits in the material tables, below the minimum {minimum}"
    )]
    SpanTooNarrow { available: f64, minimum: f64 },
    #[error("relative difference undefined for single-mode information {0}")]
    UndefinedDifference(f64),
}

/// Angular frequency (rad/s) of a vacuum wavelength in nm.
pub fn omega_from_wavelength(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Vacuum wavelength in nm of an angular frequency.
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Gaussian spectral amplitude with `|ξ|²` of FWHM `Δω`, normalised so that
/// `∫|ξ|² dω = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub omega0: f64,
    pub delta_omega: f64,
    pub norm: f64,
}

impl SpectralProfile {
    pub fn new(omega0: f64, delta_omega: f64) -> Result<Self, ContinuumError> {
        if !(delta_omega > 0.0 && omega0 > 5.0 * delta_omega) {
            return Err(ContinuumError::InvalidProfile(format!(
                "ω₀ = {omega0:e}, Δω = {delta_omega:e}"
            )));
        }
        // ∫ exp(−4 ln2 x²/Δω²) dx = Δω √(π / (4 ln 2))
        let norm = (delta_omega * (PI / (4.0 * LN_2)).sqrt()).powf(-0.5);
        Ok(Self {
            omega0,
            delta_omega,
            norm,
        })
    }

    /// Profile centred at `lambda0_nm` with a wavelength FWHM, converted to
    /// frequency to first order.
    pub fn from_wavelength(lambda0_nm: f64, delta_lambda_nm: f64) -> Result<Self, ContinuumError> {
        if !(lambda0_nm > 0.0 && delta_lambda_nm > 0.0) {
            return Err(ContinuumError::InvalidProfile(format!(
                "λ₀ = {lambda0_nm} nm, Δλ = {delta_lambda_nm} nm"
            )));
        }
        let omega0 = omega_from_wavelength(lambda0_nm);
        let delta_omega =
            2.0 * PI * SPEED_OF_LIGHT * (delta_lambda_nm * 1e-9) / (lambda0_nm * 1e-9).powi(2);
        Self::new(omega0, delta_omega)
    }

    pub fn xi(&self, omega: f64) -> f64 {
        let x = (omega - self.omega0) / self.delta_omega;
        self.norm * (-2.0 * LN_2 * x * x).exp()
    }
}

/// Gauss-Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Half-width of the grid in units of Δω.
    pub span: f64,
}

impl QuadratureGrid {
    pub fn new(profile: &SpectralProfile, nodes: usize, span: f64) -> Self {
        let (x, w) = gauss_legendre(nodes);
        let half = span * profile.delta_omega;
        Self {
            nodes: x.iter().map(|x| profile.omega0 + half * x).collect(),
            weights: w.iter().map(|w| half * w).collect(),
            span,
        }
    }

    /// `∫ |ξ|² f dω`.
    pub fn average<F: Fn(usize) -> f64>(&self, profile: &SpectralProfile, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(i, (&x, &w))| w * profile.xi(x).powi(2) * f(i))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSettings {
    pub nodes: usize,
    /// Requested half-width in FWHM.
    pub span: f64,
    /// Narrowest half-width accepted when the material tables force a cut.
    pub min_span: f64,
}

impl Default for ContinuumSettings {
    fn default() -> Self {
        Self {
            nodes: 201,
            span: 5.0,
            min_span: 4.0,
        }
    }
}

/// Grid for `profile`, narrowed if needed so every node lies inside
/// `range_nm`.
pub fn quadrature_grid(
    profile: &SpectralProfile,
    settings: &ContinuumSettings,
    range_nm: (f64, f64),
) -> Result<QuadratureGrid, ContinuumError> {
    let (lo_nm, hi_nm) = range_nm;
    let omega_min = if hi_nm.is_finite() {
        omega_from_wavelength(hi_nm)
    } else {
        0.0
    };
    let omega_max = if lo_nm > 0.0 {
        omega_from_wavelength(lo_nm)
    } else {
        f64::INFINITY
    };
    let available = ((profile.omega0 - omega_min) / profile.delta_omega)
        .min((omega_max - profile.omega0) / profile.delta_omega)
        * (1.0 - 1e-9);
    let span = settings.span.min(available);
    if span < settings.min_span {
        return Err(ContinuumError::SpanTooNarrow {
            available,
            minimum: settings.min_span,
        });
    }
    Ok(QuadratureGrid::new(profile, settings.nodes, span))
}

/// `(t, r)` at every node, evaluated in parallel, returned in node order.
pub fn sample_response<F>(
    response: F,
    grid: &QuadratureGrid,
) -> Result<Vec<(Complex64, Complex64)>, ContinuumError>
where
    F: Fn(f64) -> Result<(Complex64, Complex64), ContinuumError> + Sync,
{
    grid.nodes.par_iter().map(|&w| response(w)).collect()
}

/// Weights `w_i |ξ(ω_i)|²`.
fn spectral_weights(profile: &SpectralProfile, grid: &QuadratureGrid) -> Vec<f64> {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&x, &w)| w * profile.xi(x).powi(2))
        .collect()
}

/// HOM moments from sampled `(t, r)`, as double sums.
pub fn hom_moments_from_samples(
    samples: &[(Complex64, Complex64)],
    profile: &SpectralProfile,
    grid: &QuadratureGrid,
) -> HomMoments {
    let g = spectral_weights(profile, grid);
    let (mut n1, mut fact, mut cross) = (0.0, 0.0, 0.0);
    for (i, &(t, r)) in samples.iter().enumerate() {
        for (j, &(tp, rp)) in samples.iter().enumerate() {
            let w = g[i] * g[j];
            // |ψ|² is symmetric, so both orderings of (ω, ω′) carry weight w
            n1 += w * (t.norm_sqr() + r.norm_sqr());
            let interference = tp.conj() * t * r.conj() * rp;
            fact += w
                * (tp.norm_sqr() * r.norm_sqr()
                    + t.norm_sqr() * rp.norm_sqr()
                    + 2.0 * interference.re);
            let bunching = tp.conj() * t.conj() * r * rp;
            cross += w
                * (tp.norm_sqr() * t.norm_sqr() + r.norm_sqr() * rp.norm_sqr() + 2.0 * bunching.re);
        }
    }
    HomMoments {
        mean_n1: n1,
        factorial_second: fact,
        cross,
    }
}

/// Continuum HOM moments of a frequency-dependent response.
pub fn continuum_hom_moments<F>(
    response: F,
    profile: &SpectralProfile,
    grid: &QuadratureGrid,
) -> Result<HomMoments, ContinuumError>
where
    F: Fn(f64) -> Result<(Complex64, Complex64), ContinuumError> + Sync,
{
    Ok(hom_moments_from_samples(
        &sample_response(response, grid)?,
        profile,
        grid,
    ))
}

/// Coherent output means from sampled `(t, r)` and input envelopes sampled
/// on the same nodes.
pub fn classical_means_from_samples(
    samples: &[(Complex64, Complex64)],
    alpha: &[Complex64],
    beta: &[Complex64],
    profile: &SpectralProfile,
    grid: &QuadratureGrid,
) -> Result<CoherentMeans, ContinuumError> {
    let g = spectral_weights(profile, grid);
    for env in [alpha, beta] {
        let total: f64 = env.iter().zip(&g).map(|(a, w)| w * a.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(ContinuumError::Normalization(total));
        }
    }
    let (mut mu1, mut mu2) = (0.0, 0.0);
    for (i, &(t, _)) in samples.iter().enumerate() {
        for (j, &(_, rp)) in samples.iter().enumerate() {
            let w = g[i] * g[j];
            mu1 += w * (t * alpha[i] + rp * beta[j]).norm_sqr();
            mu2 += w * (t * beta[i] + rp * alpha[j]).norm_sqr();
        }
    }
    Ok(CoherentMeans { mu1, mu2 })
}

/// Continuum coherent means for envelopes `α(ω)`, `β(ω)`.
pub fn continuum_classical_means<F, A, B>(
    response: F,
    alpha: A,
    beta: B,
    profile: &SpectralProfile,
    grid: &QuadratureGrid,
) -> Result<CoherentMeans, ContinuumError>
where
    F: Fn(f64) -> Result<(Complex64, Complex64), ContinuumError> + Sync,
    A: Fn(f64) -> Complex64,
    B: Fn(f64) -> Complex64,
{
    let samples = sample_response(response, grid)?;
    let a: Vec<Complex64> = grid.nodes.iter().map(|&w| alpha(w)).collect();
    let b: Vec<Complex64> = grid.nodes.iter().map(|&w| beta(w)).collect();
    classical_means_from_samples(&samples, &a, &b, profile, grid)
}

/// Flat envelopes with relative phase `φ_αβ`: `α = e^{iφ_αβ}`, `β = 1`.
pub fn flat_envelopes(phi_ab: f64, len: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    (
        vec![Complex64::from_polar(1.0, phi_ab); len],
        vec![Complex64::new(1.0, 0.0); len],
    )
}

/// Continuum-mode Fisher information of one scheme for a pulse of
/// wavelength FWHM `delta_lambda_nm` centred on the interferometer's
/// wavelength.
pub fn continuum_fisher(
    scheme: Scheme,
    setup: &Interferometer,
    delta_lambda_nm: f64,
    n_s: f64,
    phi_ab: f64,
    settings: &ContinuumSettings,
) -> Result<FisherEstimate, ContinuumError> {
    let profile = SpectralProfile::from_wavelength(setup.wavelength_nm, delta_lambda_nm)?;
    let grid = quadrature_grid(&profile, settings, setup.stack.wavelength_range_nm())?;
    let (alpha, beta) = flat_envelopes(phi_ab, grid.nodes.len());
    let h = setup.fd_step;

    let evaluate = |x: f64| -> Result<Vec<f64>, ContinuumError> {
        let stack = setup.stack.with_sample_n(x);
        let samples = sample_response(
            |w| {
                let resp =
                    stack_response(&stack, wavelength_from_omega(w), setup.theta_deg, setup.pol)?;
                Ok((resp.t, resp.r))
            },
            &grid,
        )?;
        match scheme {
            Scheme::Hom => {
                let m = hom_moments_from_samples(&samples, &profile, &grid);
                Ok(click_distribution(&PairDistribution::from_moments(&m)?)
                    .as_array()
                    .to_vec())
            }
            Scheme::Classical => {
                let m = classical_means_from_samples(&samples, &alpha, &beta, &profile, &grid)?;
                Ok(vec![m.mu1, m.mu2])
            }
        }
    };
    let (c, hi, lo) = (evaluate(n_s)?, evaluate(n_s + h)?, evaluate(n_s - h)?);
    match scheme {
        Scheme::Hom => Ok(fisher_from_values(&c, &hi, &lo, h)),
        Scheme::Classical => {
            // Poisson information Σ (∂μ)²/μ has the same form.
            let mut information = 0.0;
            for k in 0..2 {
                if c[k] >= P_FLOOR {
                    let d = (hi[k] - lo[k]) / (2.0 * h);
                    information += d * d / c[k];
                }
            }
            Ok(FisherEstimate {
                information,
                near_singular: false,
            })
        }
    }
}

/// `D = |I_single − I_cont| / I_single`.
pub fn relative_difference(i_single: f64, i_cont: f64) -> Result<f64, ContinuumError> {
    if !(i_single > 1e-12) {
        return Err(ContinuumError::UndefinedDifference(i_single));
    }
    Ok((i_single - i_cont).abs() / i_single)
}
