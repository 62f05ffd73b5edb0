//! Transfer-matrix model of a planar multilayer.
//!
//! Conventions (used consistently by every function here):
//!
//! * time dependence `e^{-iωt}`, complex index `n + ik` with `k ≥ 0`;
//! * `cos θ_j` is taken on the branch with `Im(n_j cos θ_j) ≥ 0`, so fields
//!   decay into absorbing or evanescent layers;
//! * single-interface coefficients are the standard field-amplitude Fresnel
//!   coefficients (E-field for TE, the customary p-wave form for TM), with
//!   `t_ab = 2 n_a cos θ_a / (…)`;
//! * propagation through layer `j` accumulates phase `k_z d` with
//!   `k_z = (2π/λ) n_j cos θ_j`.
//!
//! The stack transfer matrix is the ordered product of boundary matrices
//! `(1/t_ab) [[1, r_ab], [r_ab, 1]]` and propagation matrices
//! `diag(e^{-i k_z d}, e^{+i k_z d})`, from which `t = 1/M₁₁` and
//! `r = M₂₁/M₁₁`.

mod calibrate;
mod stack;
pub mod stack_file;

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::materials::MaterialError;

pub use calibrate::{
    calibrate_stack, count_crossings, find_crossing_ns, Calibration, CalibrationBounds,
    CalibrationTarget, RESIDUAL_TOL as CALIBRATION_RESIDUAL_TOL,
};
pub use stack::{Layer, LayerStack, DEFAULT_GOLD_NM, DEFAULT_SAMPLE_NM, PRISM_INDEX};

/// Default central-difference step in n_s (RIU).
pub const DEFAULT_NS_STEP: f64 = 1e-6;

pub type Mat2 = Matrix2<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TmmError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("invalid stack: {0}")]
    InvalidStack(String),
    #[error("incidence angle {0}° outside [0, 90)")]
    InvalidAngle(f64),
    #[error("numerical singularity: {0}")]
    Singular(String),
    #[error(
        "calibration failed: no T = R crossing at n_s = {target_n_s} for gold ∈ [{gold_lo}, {gold_hi}] nm, \
         sample ∈ [{sample_lo}, {sample_hi}] nm"
    )]
    CalibrationFailure {
        target_n_s: f64,
        gold_lo: f64,
        gold_hi: f64,
        sample_lo: f64,
        sample_hi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// p-polarized; couples to surface plasmons.
    Tm,
    /// s-polarized.
    Te,
}

/// Complex amplitudes and derived power quantities of a stack at one
/// `(λ, θ, polarization)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackResponse {
    pub t: Complex64,
    pub r: Complex64,
    pub transmittance: f64,
    pub reflectance: f64,
    pub absorptance: f64,
    /// `arg r − arg t` wrapped to `(−π, π]`; 0 when `t = r = 0`.
    pub phi_tr: f64,
}

impl StackResponse {
    /// Builds the response for a stack with identical entry and exit media.
    pub fn from_amplitudes(t: Complex64, r: Complex64) -> Self {
        let transmittance = t.norm_sqr();
        let reflectance = r.norm_sqr();
        let phi_tr = if t == Complex64::new(0.0, 0.0) && r == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            wrap_phase(r.arg() - t.arg())
        };
        Self {
            t,
            r,
            transmittance,
            reflectance,
            absorptance: 1.0 - transmittance - reflectance,
            phi_tr,
        }
    }

    /// Largest singular value of the symmetric beamsplitter matrix
    /// `[[t, r], [r, t]]`, i.e. `max(|t + r|, |t − r|)`.
    pub fn max_singular_value(&self) -> f64 {
        (self.t + self.r).norm().max((self.t - self.r).norm())
    }
}

/// Wraps a phase to `(−π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Shifts `phase` by a multiple of 2π onto the branch nearest `reference`.
pub fn unwrap_near(phase: f64, reference: f64) -> f64 {
    phase - 2.0 * PI * ((phase - reference) / (2.0 * PI)).round()
}

fn check_angle(theta_in_deg: f64) -> Result<(), TmmError> {
    if (0.0..90.0).contains(&theta_in_deg) {
        Ok(())
    } else {
        Err(TmmError::InvalidAngle(theta_in_deg))
    }
}

/// `cos θ` in a layer of index `n` for a conserved transverse index
/// `n₀ sin θ_in`, on the decaying/forward branch.
pub fn complex_cosine(n: Complex64, transverse: Complex64) -> Complex64 {
    let s = transverse / n;
    let mut cos = (Complex64::new(1.0, 0.0) - s * s).sqrt();
    let nc = n * cos;
    // Near-real n cos θ: rounding decides the sign of the imaginary part, so
    // pick the forward-propagating branch instead.
    let tol = 100.0 * f64::EPSILON * nc.norm().max(1e-300);
    let flip = if nc.im.abs() > tol {
        nc.im < 0.0
    } else {
        nc.re < 0.0
    };
    if flip {
        cos = -cos;
    }
    cos
}

/// Complex `cos θ_j` for every layer given the incidence angle in the entry
/// medium.
pub fn layer_cosines(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_in_deg: f64,
) -> Result<Vec<Complex64>, TmmError> {
    check_angle(theta_in_deg)?;
    let indices = stack.indices(wavelength_nm)?;
    Ok(cosines_for(&indices, theta_in_deg))
}

fn cosines_for(indices: &[Complex64], theta_in_deg: f64) -> Vec<Complex64> {
    let transverse = indices[0] * theta_in_deg.to_radians().sin();
    indices
        .iter()
        .map(|&n| complex_cosine(n, transverse))
        .collect()
}

/// Single-interface amplitude coefficients `(r_ab, t_ab)` for light going
/// from medium `a` into medium `b`.
pub fn fresnel(
    n_a: Complex64,
    n_b: Complex64,
    cos_a: Complex64,
    cos_b: Complex64,
    pol: Polarization,
) -> Result<(Complex64, Complex64), TmmError> {
    let (num, den) = match pol {
        Polarization::Tm => (n_b * cos_a - n_a * cos_b, n_b * cos_a + n_a * cos_b),
        Polarization::Te => (n_a * cos_a - n_b * cos_b, n_a * cos_a + n_b * cos_b),
    };
    if den.norm() < f64::MIN_POSITIVE || !den.is_finite() {
        return Err(TmmError::Singular(format!(
            "Fresnel denominator vanishes for n_a = {n_a}, n_b = {n_b}"
        )));
    }
    Ok((num / den, 2.0 * n_a * cos_a / den))
}

/// Phase/attenuation accumulated across a layer of thickness `d`.
pub fn propagation_matrix(
    n: Complex64,
    thickness_nm: f64,
    wavelength_nm: f64,
    cos_theta: Complex64,
) -> Mat2 {
    let delta = 2.0 * PI * n * cos_theta * thickness_nm / wavelength_nm;
    let i = Complex64::i();
    Mat2::new(
        (-i * delta).exp(),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        (i * delta).exp(),
    )
}

fn boundary_matrix(r: Complex64, t: Complex64) -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    Mat2::new(one, r, r, one) / t
}

/// Ordered product of boundary and propagation matrices.
pub fn stack_transfer(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_in_deg: f64,
    pol: Polarization,
) -> Result<Mat2, TmmError> {
    check_angle(theta_in_deg)?;
    let indices = stack.indices(wavelength_nm)?;
    let cosines = cosines_for(&indices, theta_in_deg);
    let layers = stack.layers();
    let last = layers.len() - 1;

    let (r, t) = fresnel(indices[0], indices[1], cosines[0], cosines[1], pol)?;
    let mut m = boundary_matrix(r, t);
    for j in 1..last {
        let (r, t) = fresnel(indices[j], indices[j + 1], cosines[j], cosines[j + 1], pol)?;
        m =
            m * propagation_matrix(
                indices[j],
                layers[j].thickness_nm,
                wavelength_nm,
                cosines[j],
            ) * boundary_matrix(r, t);
    }
    Ok(m)
}

/// Amplitude and power response of the stack.
pub fn stack_response(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_in_deg: f64,
    pol: Polarization,
) -> Result<StackResponse, TmmError> {
    let m = stack_transfer(stack, wavelength_nm, theta_in_deg, pol)?;
    let m11 = m[(0, 0)];
    if m11.norm() == 0.0 || !m11.is_finite() {
        return Err(TmmError::Singular(format!(
            "M11 = {m11} at λ = {wavelength_nm} nm, θ = {theta_in_deg}°"
        )));
    }
    let t = 1.0 / m11;
    let r = m[(1, 0)] / m11;

    let first = &stack.layers()[0].material;
    let last = &stack.layers()[stack.layers().len() - 1].material;
    if first == last {
        return Ok(StackResponse::from_amplitudes(t, r));
    }
    // Different entry and exit media: power transmittance needs the flux ratio.
    let indices = stack.indices(wavelength_nm)?;
    let cos = cosines_for(&indices, theta_in_deg);
    let (n_i, n_f) = (indices[0], indices[indices.len() - 1]);
    let (c_i, c_f) = (cos[0], cos[cos.len() - 1]);
    let flux = match pol {
        Polarization::Te => (n_f * c_f).re / (n_i * c_i).re,
        Polarization::Tm => (n_f * c_f.conj()).re / (n_i * c_i.conj()).re,
    };
    let mut resp = StackResponse::from_amplitudes(t, r);
    resp.transmittance = t.norm_sqr() * flux;
    resp.absorptance = 1.0 - resp.transmittance - resp.reflectance;
    Ok(resp)
}

/// Central-difference derivatives of `(T, R, φ_tr)` with respect to n_s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseDerivatives {
    pub d_transmittance: f64,
    pub d_reflectance: f64,
    pub d_phi_tr: f64,
}

impl ResponseDerivatives {
    pub fn as_array(&self) -> [f64; 3] {
        [self.d_transmittance, self.d_reflectance, self.d_phi_tr]
    }
}

pub fn response_derivatives(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_in_deg: f64,
    pol: Polarization,
    step: f64,
) -> Result<ResponseDerivatives, TmmError> {
    if !(step > 0.0) {
        return Err(TmmError::InvalidStack(format!("derivative step {step}")));
    }
    let n_s = stack.sample_n();
    let center = stack_response(stack, wavelength_nm, theta_in_deg, pol)?;
    let plus = stack_response(
        &stack.with_sample_n(n_s + step),
        wavelength_nm,
        theta_in_deg,
        pol,
    )?;
    let minus = stack_response(
        &stack.with_sample_n(n_s - step),
        wavelength_nm,
        theta_in_deg,
        pol,
    )?;
    let phi_plus = unwrap_near(plus.phi_tr, center.phi_tr);
    let phi_minus = unwrap_near(minus.phi_tr, center.phi_tr);
    let h2 = 2.0 * step;
    Ok(ResponseDerivatives {
        d_transmittance: (plus.transmittance - minus.transmittance) / h2,
        d_reflectance: (plus.reflectance - minus.reflectance) / h2,
        d_phi_tr: (phi_plus - phi_minus) / h2,
    })
}
