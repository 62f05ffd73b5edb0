//! Photon-count statistics of the lossy symmetric beamsplitter in the
//! single-mode approximation.
//!
//! The two-photon input `|1,1⟩` is described through three moments of the
//! output number operators; the click model merges outcomes by how many of
//! the two (non-resolving) detectors fire. The coherent benchmark feeds
//! `|α⟩|β⟩` and yields independent Poisson counts.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tmm::StackResponse;

/// Tolerance for the physicality constraints on `(T, R, φ_tr)`.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Negative probabilities down to this magnitude are rounding noise.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("unphysical beamsplitter: T = {t}, R = {r}, φ_tr = {phi} ({reason})")]
    InvalidResponse {
        t: f64,
        r: f64,
        phi: f64,
        reason: &'static str,
    },
    #[error("negative {what} = {value}")]
    Unphysical { what: &'static str, value: f64 },
}

/// `(T, R, φ_tr)` of a symmetric beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsPoint {
    pub t: f64,
    pub r: f64,
    pub phi_tr: f64,
}

impl BsPoint {
    pub fn new(t: f64, r: f64, phi_tr: f64) -> Result<Self, StatsError> {
        let bs = Self { t, r, phi_tr };
        let err = |reason| StatsError::InvalidResponse {
            t,
            r,
            phi: phi_tr,
            reason,
        };
        if !(t.is_finite() && r.is_finite() && phi_tr.is_finite()) {
            return Err(err("non-finite value"));
        }
        if t < -PHYSICAL_TOL
            || r < -PHYSICAL_TOL
            || t > 1.0 + PHYSICAL_TOL
            || r > 1.0 + PHYSICAL_TOL
        {
            return Err(err("T or R outside [0, 1]"));
        }
        if t + r > 1.0 + PHYSICAL_TOL {
            return Err(err("T + R > 1"));
        }
        if bs.max_singular_value_sq() > 1.0 + PHYSICAL_TOL {
            return Err(err("singular value of [[t, r], [r, t]] exceeds 1"));
        }
        Ok(bs)
    }

    /// Skips validation; for probing the formulas outside the physical set.
    pub fn new_unchecked(t: f64, r: f64, phi_tr: f64) -> Self {
        Self { t, r, phi_tr }
    }

    /// `T + R + 2√(TR)|cos φ_tr|`.
    pub fn max_singular_value_sq(&self) -> f64 {
        self.t + self.r + 2.0 * (self.t * self.r).max(0.0).sqrt() * self.phi_tr.cos().abs()
    }
}

/// Extracts the beamsplitter point from a stack response and re-checks it.
pub fn bs_point(resp: &StackResponse) -> Result<BsPoint, StatsError> {
    BsPoint::new(resp.transmittance, resp.reflectance, resp.phi_tr)
}

/// `⟨N̂₁⟩ = ⟨N̂₂⟩`, `⟨N̂₁(N̂₁−1)⟩` and `⟨N̂₁N̂₂⟩` for the `|1,1⟩` input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomMoments {
    pub mean_n1: f64,
    pub factorial_second: f64,
    pub cross: f64,
}

impl HomMoments {
    pub fn single_mode(bs: &BsPoint) -> Self {
        let (t, r) = (bs.t, bs.r);
        Self {
            mean_n1: t + r,
            factorial_second: 4.0 * t * r,
            cross: t * t + r * r + 2.0 * t * r * (2.0 * bs.phi_tr).cos(),
        }
    }
}

/// Two-photon output probabilities; `p01 = p10` and `p02 = p20`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDistribution {
    pub p00: f64,
    pub p10: f64,
    pub p20: f64,
    pub p11: f64,
}

fn clamp(what: &'static str, value: f64) -> Result<f64, StatsError> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -CLAMP_TOL {
        Ok(0.0)
    } else if value >= -PHYSICAL_TOL {
        // Tolerated but not rounded away.
        Ok(value)
    } else {
        Err(StatsError::Unphysical { what, value })
    }
}

impl PairDistribution {
    /// Probabilities from the moments of the symmetric output.
    pub fn from_moments(m: &HomMoments) -> Result<Self, StatsError> {
        let p11 = m.cross;
        let p20 = 0.5 * m.factorial_second;
        let p10 = m.mean_n1 - m.factorial_second - p11;
        let p00 = 1.0 - 2.0 * m.mean_n1 + p11 + m.factorial_second;
        Ok(Self {
            p00: clamp("p00", p00)?,
            p10: clamp("p10", p10)?,
            p20: clamp("p20", p20)?,
            p11: clamp("p11", p11)?,
        })
    }

    /// `p00 + 2 p10 + 2 p20 + p11`.
    pub fn total(&self) -> f64 {
        self.p00 + 2.0 * self.p10 + 2.0 * self.p20 + self.p11
    }

    /// The six distinct outcomes `(0,0), (1,0), (0,1), (2,0), (0,2), (1,1)`.
    pub fn outcomes(&self) -> [f64; 6] {
        [self.p00, self.p10, self.p10, self.p20, self.p20, self.p11]
    }
}

/// Probabilities that zero, one or both detectors click.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickDistribution {
    pub p0_click: f64,
    pub p1_click: f64,
    pub p2_click: f64,
}

impl ClickDistribution {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p0_click, self.p1_click, self.p2_click]
    }
}

pub fn hom_pair_distribution(bs: &BsPoint) -> Result<PairDistribution, StatsError> {
    PairDistribution::from_moments(&HomMoments::single_mode(bs))
}

pub fn click_distribution(pd: &PairDistribution) -> ClickDistribution {
    ClickDistribution {
        p0_click: pd.p00,
        p1_click: 2.0 * pd.p10 + 2.0 * pd.p20,
        p2_click: pd.p11,
    }
}

/// Coincidence (both detectors click) probability.
pub fn coincidence_probability(bs: &BsPoint) -> Result<f64, StatsError> {
    Ok(hom_pair_distribution(bs)?.p11)
}

/// Coherent probe `|α⟩|β⟩` with `φ_αβ = arg α − arg β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentInput {
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub phi_ab: f64,
}

impl Default for CoherentInput {
    fn default() -> Self {
        Self {
            alpha_sq: 1.0,
            beta_sq: 1.0,
            phi_ab: FRAC_PI_2,
        }
    }
}

impl CoherentInput {
    pub fn with_phase(phi_ab: f64) -> Self {
        Self {
            phi_ab,
            ..Self::default()
        }
    }
}

/// Mean photon numbers at the two output ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentMeans {
    pub mu1: f64,
    pub mu2: f64,
}

/// Output means of the coherent probe.
///
/// Both ports carry `T|α|² + R|β|²`; the cross term uses `φ_tr − φ_αβ` at
/// port 1 and `φ_tr + φ_αβ` at port 2.
pub fn coherent_output_means(
    bs: &BsPoint,
    input: &CoherentInput,
) -> Result<CoherentMeans, StatsError> {
    if input.alpha_sq < 0.0 || input.beta_sq < 0.0 {
        return Err(StatsError::Unphysical {
            what: "input intensity",
            value: input.alpha_sq.min(input.beta_sq),
        });
    }
    let base = bs.t * input.alpha_sq + bs.r * input.beta_sq;
    let cross = 2.0 * (bs.t * bs.r).max(0.0).sqrt() * (input.alpha_sq * input.beta_sq).sqrt();
    let mu1 = base + cross * (bs.phi_tr - input.phi_ab).cos();
    let mu2 = base + cross * (bs.phi_tr + input.phi_ab).cos();
    let clamp_mean = |what, v: f64| {
        if v >= 0.0 {
            Ok(v)
        } else if v >= -CLAMP_TOL {
            Ok(0.0)
        } else {
            Err(StatsError::Unphysical { what, value: v })
        }
    };
    Ok(CoherentMeans {
        mu1: clamp_mean("mu1", mu1)?,
        mu2: clamp_mean("mu2", mu2)?,
    })
}

/// `e^{-μ} μ^l / l!`, by running product to stay finite for large `l`.
pub fn poisson_pmf(l: u32, mu: f64) -> f64 {
    if mu == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    let mut p = (-mu).exp();
    for k in 1..=l {
        p *= mu / k as f64;
    }
    p
}

/// Probability of `l1` photons at port 1 and `l2` at port 2.
pub fn coherent_pair_probability(l1: u32, l2: u32, means: &CoherentMeans) -> f64 {
    poisson_pmf(l1, means.mu1) * poisson_pmf(l2, means.mu2)
}

/// Default truncation of the photon-number table.
pub const L_MAX: u32 = 40;

/// `P(l1, l2)` for `0 ≤ l1, l2 ≤ l_max`, row-major in `l1`.
pub fn coherent_pair_table(means: &CoherentMeans, l_max: u32) -> Vec<f64> {
    let p1: Vec<f64> = (0..=l_max).map(|l| poisson_pmf(l, means.mu1)).collect();
    let p2: Vec<f64> = (0..=l_max).map(|l| poisson_pmf(l, means.mu2)).collect();
    p1.iter()
        .flat_map(|a| p2.iter().map(move |b| a * b))
        .collect()
}
