use serde::{Deserialize, Serialize};

use super::{stack_response, LayerStack, Polarization, TmmError};

/// Operating point at which the stack should be balanced (T = R, TM).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationTarget {
    pub wavelength_nm: f64,
    pub theta_deg: f64,
    pub n_s: f64,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        Self {
            wavelength_nm: 800.0,
            theta_deg: 70.0,
            n_s: 1.31,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationBounds {
    pub gold_nm: (f64, f64),
    pub sample_nm: (f64, f64),
    /// Points in the sample-gap scan.
    pub sample_points: usize,
    /// Step of the fallback gold-thickness scan.
    pub gold_step_nm: f64,
}

impl Default for CalibrationBounds {
    fn default() -> Self {
        Self {
            gold_nm: (20.0, 80.0),
            sample_nm: (100.0, 2000.0),
            sample_points: 381,
            gold_step_nm: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub stack: LayerStack,
    pub target: CalibrationTarget,
    pub d_gold_nm: f64,
    pub d_sample_nm: f64,
    /// |T − R| at the target.
    pub residual: f64,
}

/// Largest |T − R| accepted at the calibration target.
pub const RESIDUAL_TOL: f64 = 1e-3;

fn imbalance(stack: &LayerStack, target: &CalibrationTarget) -> Result<f64, TmmError> {
    let resp = stack_response(
        stack,
        target.wavelength_nm,
        target.theta_deg,
        Polarization::Tm,
    )?;
    Ok(resp.transmittance - resp.reflectance)
}

/// Bisection on a bracketed sign change of `f`.
fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64, TmmError>
where
    F: FnMut(f64) -> Result<f64, TmmError>,
{
    let mut f_lo = f_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All roots of `f` on `grid`, located by sign changes and refined by
/// bisection.
fn roots_on_grid<F>(mut f: F, grid: &[f64]) -> Result<Vec<f64>, TmmError>
where
    F: FnMut(f64) -> Result<f64, TmmError>,
{
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            roots.push(grid[i]);
        } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
            roots.push(bisect(&mut f, grid[i], grid[i + 1], a)?);
        }
    }
    if values[grid.len() - 1] == 0.0 {
        roots.push(grid[grid.len() - 1]);
    }
    Ok(roots)
}

fn nearest(roots: &[f64], reference: f64) -> Option<f64> {
    roots
        .iter()
        .copied()
        .min_by(|a, b| (a - reference).abs().total_cmp(&(b - reference).abs()))
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Finds film and gap thicknesses that put the TM T = R crossing at the
/// target.
///
/// The film thickness of `base` is kept and the gap is scanned over its
/// bounds; the root closest to the input gap is taken, so an already
/// balanced stack is returned unchanged. Only if no gap works is the film
/// thickness scanned, nearest to the input first.
pub fn calibrate_stack(
    base: &LayerStack,
    target: &CalibrationTarget,
    bounds: &CalibrationBounds,
) -> Result<Calibration, TmmError> {
    let at_target = base.with_sample_n(target.n_s);
    let gold0 = at_target.film_thickness();
    let sample0 = at_target.sample_thickness();

    let mut sample_grid = linspace(bounds.sample_nm.0, bounds.sample_nm.1, bounds.sample_points);
    if sample0 > bounds.sample_nm.0 && sample0 < bounds.sample_nm.1 {
        sample_grid.push(sample0);
        sample_grid.sort_by(f64::total_cmp);
        sample_grid.dedup();
    }

    let mut golds = vec![gold0];
    let n_gold = ((bounds.gold_nm.1 - bounds.gold_nm.0) / bounds.gold_step_nm).round() as usize;
    let mut scan: Vec<f64> = (0..=n_gold)
        .map(|i| bounds.gold_nm.0 + i as f64 * bounds.gold_step_nm)
        .filter(|g| *g != gold0)
        .collect();
    scan.sort_by(|a, b| (a - gold0).abs().total_cmp(&(b - gold0).abs()));
    golds.extend(scan);

    for gold in golds {
        let film = at_target.with_film_thickness(gold);
        let f = |d: f64| imbalance(&film.with_sample_thickness(d), target);
        let roots = roots_on_grid(f, &sample_grid)?;
        let Some(d_sample) = nearest(&roots, sample0) else {
            continue;
        };
        let stack = film.with_sample_thickness(d_sample);
        let residual = imbalance(&stack, target)?.abs();
        if residual < RESIDUAL_TOL {
            return Ok(Calibration {
                stack: stack.with_sample_n(base.sample_n()),
                target: *target,
                d_gold_nm: gold,
                d_sample_nm: d_sample,
                residual,
            });
        }
    }
    Err(TmmError::CalibrationFailure {
        target_n_s: target.n_s,
        gold_lo: bounds.gold_nm.0.min(gold0),
        gold_hi: bounds.gold_nm.1.max(gold0),
        sample_lo: bounds.sample_nm.0,
        sample_hi: bounds.sample_nm.1,
    })
}

/// TM T − R as a function of n_s.
fn imbalance_ns(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_deg: f64,
    n_s: f64,
) -> Result<f64, TmmError> {
    let resp = stack_response(
        &stack.with_sample_n(n_s),
        wavelength_nm,
        theta_deg,
        Polarization::Tm,
    )?;
    Ok(resp.transmittance - resp.reflectance)
}

/// The T = R crossing in n_s closest to `near`, searched within
/// `near ± half_width` at 1e-4 RIU resolution.
pub fn find_crossing_ns(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_deg: f64,
    near: f64,
    half_width: f64,
) -> Result<Option<f64>, TmmError> {
    let points = (2.0 * half_width / 1e-4).round() as usize + 1;
    let grid = linspace(near - half_width, near + half_width, points);
    let roots = roots_on_grid(|n| imbalance_ns(stack, wavelength_nm, theta_deg, n), &grid)?;
    Ok(nearest(&roots, near))
}

/// Number of sign changes of TM T − R on a uniform n_s grid.
pub fn count_crossings(
    stack: &LayerStack,
    wavelength_nm: f64,
    theta_deg: f64,
    center: f64,
    half_width: f64,
    step: f64,
) -> Result<usize, TmmError> {
    let points = (2.0 * half_width / step).round() as usize + 1;
    let grid = linspace(center - half_width, center + half_width, points);
    let values = grid
        .iter()
        .map(|&n| imbalance_ns(stack, wavelength_nm, theta_deg, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(values
        .windows(2)
        .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
        .count())
}
