//! Standard-uncertainty budget `σ_i = c_i s_i / d_i` for experimental
//! imperfections.

use serde::{Deserialize, Serialize};

use super::{fisher_from_values, precision_bound, EstimationError, Interferometer};
use crate::quantum_stats::{
    bs_point, click_distribution, hom_pair_distribution, ClickDistribution,
};
use crate::tmm::{stack_response, Polarization};

/// Central-difference step for budget perturbations, in degrees, RIU or nm.
pub const BUDGET_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Rotation γ of the input polarization away from TM, in degrees.
    Polarization,
    IncidenceAngle,
    PrismIndex,
    GoldThickness,
}

impl Perturbation {
    /// Unit in which the perturbation is applied to the model.
    pub fn natural_unit(&self) -> &'static str {
        match self {
            Perturbation::Polarization | Perturbation::IncidenceAngle => "deg",
            Perturbation::PrismIndex => "RIU",
            Perturbation::GoldThickness => "nm",
        }
    }
}

/// How a parameter error is translated into an n_s error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityModel {
    /// `c_i = |∂(1/√I_HOM)/∂x_i|`: shift of the Cramér-Rao bound.
    #[default]
    BoundShift,
    /// `c_i = |∂P_cc/∂x_i| / |∂P_cc/∂n_s|`: the n_s shift that mimics the
    /// parameter's effect on the coincidence signal.
    SignalRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintySource {
    pub name: String,
    /// `s_i`, in `unit`.
    pub uncertainty: f64,
    /// One of `deg`, `RIU`, `nm`, `m`.
    pub unit: String,
    #[serde(default = "unit_divisor")]
    pub divisor: f64,
    pub perturbation: Perturbation,
    /// Fixed `c_i` in RIU per `unit`; computed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
}

fn unit_divisor() -> f64 {
    1.0
}

impl UncertaintySource {
    /// Source units per natural unit of the perturbation.
    fn unit_scale(&self) -> Result<f64, EstimationError> {
        let natural = self.perturbation.natural_unit();
        match (natural, self.unit.as_str()) {
            (a, b) if a == b => Ok(1.0),
            ("nm", "m") => Ok(1e-9),
            (_, other) => Err(EstimationError::InvalidSource(format!(
                "{}: unit '{other}' does not fit {:?}",
                self.name, self.perturbation
            ))),
        }
    }

    fn validate(&self) -> Result<(), EstimationError> {
        if !(self.uncertainty >= 0.0) {
            return Err(EstimationError::InvalidSource(format!(
                "{}: uncertainty {}",
                self.name, self.uncertainty
            )));
        }
        if !(self.divisor > 0.0) {
            return Err(EstimationError::InvalidSource(format!(
                "{}: divisor {}",
                self.name, self.divisor
            )));
        }
        self.unit_scale().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub name: String,
    pub unit: String,
    pub uncertainty: f64,
    pub divisor: f64,
    /// `c_i` in RIU per `unit`.
    pub sensitivity: f64,
    /// `σ_i` in RIU.
    pub sigma: f64,
}

/// The four sources at n_analyte = 1.32 with their published sensitivities.
pub fn table_c1() -> Vec<UncertaintySource> {
    let row = |name: &str, s: f64, unit: &str, p: Perturbation, c: f64| UncertaintySource {
        name: name.to_string(),
        uncertainty: s,
        unit: unit.to_string(),
        divisor: 1.0,
        perturbation: p,
        sensitivity: Some(c),
    };
    vec![
        row(
            "Input polarization",
            0.03,
            "deg",
            Perturbation::Polarization,
            3.00e-5,
        ),
        row(
            "Incidence angle",
            0.03,
            "deg",
            Perturbation::IncidenceAngle,
            7.27e-4,
        ),
        row(
            "Refractive index of prism",
            6.5e-5,
            "RIU",
            Perturbation::PrismIndex,
            9.82e-2,
        ),
        row(
            "Thickness of gold film",
            1e-9,
            "m",
            Perturbation::GoldThickness,
            1.02,
        ),
    ]
}

/// Click statistics of the HOM probe with the input polarization rotated by
/// `gamma_deg` from TM: an intensity mixture of the TM and TE responses.
fn rotated_clicks(
    s: &Interferometer,
    n_s: f64,
    gamma_deg: f64,
) -> Result<ClickDistribution, EstimationError> {
    let stack = s.stack.with_sample_n(n_s);
    let tm = stack_response(&stack, s.wavelength_nm, s.theta_deg, Polarization::Tm)?;
    let te = stack_response(&stack, s.wavelength_nm, s.theta_deg, Polarization::Te)?;
    let a = click_distribution(&hom_pair_distribution(&bs_point(&tm)?)?);
    let b = click_distribution(&hom_pair_distribution(&bs_point(&te)?)?);
    let (c2, s2) = (
        gamma_deg.to_radians().cos().powi(2),
        gamma_deg.to_radians().sin().powi(2),
    );
    Ok(ClickDistribution {
        p0_click: c2 * a.p0_click + s2 * b.p0_click,
        p1_click: c2 * a.p1_click + s2 * b.p1_click,
        p2_click: c2 * a.p2_click + s2 * b.p2_click,
    })
}

/// The operating point with one parameter moved by `dx` natural units.
fn perturbed(
    s: &Interferometer,
    p: Perturbation,
    dx: f64,
) -> Result<Interferometer, EstimationError> {
    let mut out = s.clone();
    match p {
        Perturbation::Polarization => {}
        Perturbation::IncidenceAngle => out.theta_deg += dx,
        Perturbation::PrismIndex => {
            let n = s.stack.layers()[0]
                .material
                .refractive_index(s.wavelength_nm)
                .map_err(crate::tmm::TmmError::from)?;
            out.stack = s.stack.with_ambient_index(n.re + dx);
        }
        Perturbation::GoldThickness => {
            out.stack = s.stack.with_film_thickness(s.stack.film_thickness() + dx)
        }
    }
    Ok(out)
}

/// Observable used by a sensitivity model, as a function of the parameter
/// offset and n_s.
fn observable(
    s: &Interferometer,
    model: SensitivityModel,
    p: Perturbation,
    dx: f64,
    n_s: f64,
) -> Result<f64, EstimationError> {
    let gamma = if p == Perturbation::Polarization {
        dx
    } else {
        0.0
    };
    let at = perturbed(s, p, dx)?;
    match model {
        SensitivityModel::SignalRatio => Ok(rotated_clicks(&at, n_s, gamma)?.p2_click),
        SensitivityModel::BoundShift => {
            let h = at.fd_step;
            let c = rotated_clicks(&at, n_s, gamma)?.as_array();
            let hi = rotated_clicks(&at, n_s + h, gamma)?.as_array();
            let lo = rotated_clicks(&at, n_s - h, gamma)?.as_array();
            Ok(precision_bound(
                fisher_from_values(&c, &hi, &lo, h).information,
            ))
        }
    }
}

/// `|∂(observable)/∂x|` per natural unit: a central difference, except for
/// polarization where the response is even in γ and the secant from 0 to
/// `s_i` is used instead.
fn parameter_slope(
    s: &Interferometer,
    model: SensitivityModel,
    p: Perturbation,
    secant: f64,
    n_s: f64,
) -> Result<f64, EstimationError> {
    let slope = if p == Perturbation::Polarization {
        if secant == 0.0 {
            return Ok(0.0);
        }
        (observable(s, model, p, secant, n_s)? - observable(s, model, p, 0.0, n_s)?) / secant
    } else {
        (observable(s, model, p, BUDGET_STEP, n_s)? - observable(s, model, p, -BUDGET_STEP, n_s)?)
            / (2.0 * BUDGET_STEP)
    };
    Ok(slope.abs())
}

/// Sensitivity `c_i` in RIU per natural unit of the perturbation.
pub fn sensitivity(
    s: &Interferometer,
    n_analyte: f64,
    source: &UncertaintySource,
    model: SensitivityModel,
) -> Result<f64, EstimationError> {
    let scale = source.unit_scale()?;
    let secant = source.uncertainty * scale;
    let p = source.perturbation;
    match model {
        SensitivityModel::BoundShift => {
            if !precision_bound(s.fisher_hom(n_analyte)?.information).is_finite() {
                return Err(EstimationError::Degenerate(format!(
                    "no HOM information at n_s = {n_analyte}"
                )));
            }
            parameter_slope(s, model, p, secant, n_analyte)
        }
        SensitivityModel::SignalRatio => {
            let h = s.fd_step;
            let d_ns = (observable(s, model, p, 0.0, n_analyte + h)?
                - observable(s, model, p, 0.0, n_analyte - h)?)
                / (2.0 * h);
            if d_ns.abs() < 1e-12 {
                return Err(EstimationError::Degenerate(format!(
                    "∂P_cc/∂n_s = {d_ns:e} at n_s = {n_analyte}"
                )));
            }
            Ok(parameter_slope(s, model, p, secant, n_analyte)? / d_ns.abs())
        }
    }
}

/// Completes the budget: computes `c_i` where not supplied and
/// `σ_i = c_i s_i / d_i`.
pub fn uncertainty_budget(
    s: &Interferometer,
    n_analyte: f64,
    sources: &[UncertaintySource],
    model: SensitivityModel,
) -> Result<Vec<BudgetRow>, EstimationError> {
    sources
        .iter()
        .map(|src| {
            src.validate()?;
            let c = match src.sensitivity {
                Some(c) => c,
                // per natural unit → per source unit
                None => sensitivity(s, n_analyte, src, model)? / src.unit_scale()?,
            };
            Ok(BudgetRow {
                name: src.name.clone(),
                unit: src.unit.clone(),
                uncertainty: src.uncertainty,
                divisor: src.divisor,
                sensitivity: c,
                sigma: c * src.uncertainty / src.divisor,
            })
        })
        .collect()
}
