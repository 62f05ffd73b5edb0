//! Fisher information of the HOM and coherent schemes, the Cramér-Rao
//! bound, the enhancement ratio, and the uncertainty budget.

mod budget;
mod interferometer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum_stats::StatsError;
use crate::tmm::TmmError;

pub use budget::{
    table_c1, uncertainty_budget, BudgetRow, Perturbation, SensitivityModel, UncertaintySource,
    BUDGET_STEP,
};
pub use interferometer::{
    Decomposition, FisherReport, Interferometer, PhaseAssumption, PhaseScan, Scheme,
    PHASE_SCAN_POINTS,
};

/// Probabilities below this are treated as impossible outcomes.
pub const P_FLOOR: f64 = 1e-15;
/// Derivative magnitude of an impossible outcome that still counts as signal.
pub const DERIVATIVE_FLOOR: f64 = 1e-12;
/// Smallest classical information for which G is defined.
pub const I_FLOOR: f64 = 1e-12;
/// Allowed deviation of a distribution's total from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error(transparent)]
    Tmm(#[from] TmmError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("distribution at n_s = {n_s} sums to {total}")]
    NotNormalized { n_s: f64, total: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("enhancement ratio undefined: classical information {0} is below the floor")]
    UndefinedRatio(f64),
    #[error("degenerate operating point: {0}")]
    Degenerate(String),
    #[error("invalid uncertainty source: {0}")]
    InvalidSource(String),
}

/// Fisher information together with a warning flag for outcomes whose
/// probability vanishes while their derivative does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherEstimate {
    pub information: f64,
    pub near_singular: bool,
}

/// `Σ_m (∂P_m)² / P_m` for distributions already evaluated at the centre and
/// at `n_s ± step`.
pub fn fisher_from_values(
    center: &[f64],
    plus: &[f64],
    minus: &[f64],
    step: f64,
) -> FisherEstimate {
    let mut information = 0.0;
    let mut near_singular = false;
    for ((&p, &hi), &lo) in center.iter().zip(plus).zip(minus) {
        let dp = (hi - lo) / (2.0 * step);
        if p < P_FLOOR {
            near_singular |= dp.abs() > DERIVATIVE_FLOOR;
        } else {
            information += dp * dp / p;
        }
    }
    FisherEstimate {
        information,
        near_singular,
    }
}

fn check_normalized(n_s: f64, p: &[f64]) -> Result<(), EstimationError> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(EstimationError::NotNormalized { n_s, total });
    }
    Ok(())
}

/// Fisher information about `n_s` carried by a finite outcome distribution,
/// by central differences.
pub fn fisher_from_distribution<F>(
    dist: F,
    n_s: f64,
    step: f64,
) -> Result<FisherEstimate, EstimationError>
where
    F: Fn(f64) -> Result<Vec<f64>, EstimationError>,
{
    if !(step > 0.0) {
        return Err(EstimationError::InvalidStep(step));
    }
    let center = dist(n_s)?;
    let plus = dist(n_s + step)?;
    let minus = dist(n_s - step)?;
    check_normalized(n_s, &center)?;
    check_normalized(n_s + step, &plus)?;
    check_normalized(n_s - step, &minus)?;
    Ok(fisher_from_values(&center, &plus, &minus, step))
}

/// `G = (I_hom − I_c) / I_c`.
pub fn enhancement_ratio(i_hom: f64, i_classical: f64) -> Result<f64, EstimationError> {
    if !(i_classical > I_FLOOR) {
        return Err(EstimationError::UndefinedRatio(i_classical));
    }
    Ok((i_hom - i_classical) / i_classical)
}

/// Cramér-Rao bound `1/√I` for a single measurement; infinite when `I ≤ 0`.
pub fn precision_bound(information: f64) -> f64 {
    if information > 0.0 {
        1.0 / information.sqrt()
    } else {
        f64::INFINITY
    }
}
