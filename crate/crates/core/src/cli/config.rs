use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::estimation::{table_c1, Scheme, SensitivityModel, UncertaintySource, PHASE_SCAN_POINTS};
use crate::tmm::stack_file::StackFile;
use crate::tmm::{CalibrationBounds, CalibrationTarget, Polarization, DEFAULT_NS_STEP};

/// Uniform grid `start, start + step, …` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    /// Points computed as `start + i·step` so no rounding accumulates.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0
            && self.start.is_finite()
            && self.stop.is_finite()
            && self.stop >= self.start)
        {
            return Err(CliError::Config(format!(
                "grid {{start: {}, stop: {}, step: {}}} must have step > 0 and stop ≥ start",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhasePolicy {
    /// One φ_αβ for every point.
    Fixed { phi_ab_rad: f64 },
    /// Per-point maximiser of the classical information.
    Scan,
}

impl Default for PhasePolicy {
    fn default() -> Self {
        PhasePolicy::Fixed {
            phi_ab_rad: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuumConfig {
    pub delta_lambda_nm: Vec<f64>,
    pub nodes: usize,
    pub span_fwhm: f64,
    pub min_span_fwhm: f64,
    /// Overrides the main n_s grid for this command.
    pub n_s_grid: Option<Grid>,
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        Self {
            delta_lambda_nm: vec![9.4, 94.0],
            nodes: 201,
            span_fwhm: 5.0,
            min_span_fwhm: 4.0,
            n_s_grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub n_analyte: f64,
    pub sensitivity_model: SensitivityModel,
    /// Defaults to the four reference sources with computed sensitivities.
    pub sources: Option<Vec<UncertaintySource>>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            n_analyte: 1.32,
            sensitivity_model: SensitivityModel::default(),
            sources: None,
        }
    }
}

impl BudgetConfig {
    pub fn resolved_sources(&self) -> Vec<UncertaintySource> {
        self.sources.clone().unwrap_or_else(|| {
            table_c1()
                .into_iter()
                .map(|mut s| {
                    s.sensitivity = None;
                    s
                })
                .collect()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub enabled: bool,
    pub target: CalibrationTarget,
    pub bounds: CalibrationBounds,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            target: CalibrationTarget::default(),
            bounds: CalibrationBounds::default(),
        }
    }
}

/// Everything a sweep command needs. Keys carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Path of a stack description, relative to the config file.
    pub stack_file: Option<PathBuf>,
    /// Inline stack description; takes precedence over `stack_file`.
    pub stack: Option<StackFile>,
    pub calibration: CalibrationConfig,
    /// Used when `--out` is not given.
    pub output_dir: Option<PathBuf>,
    /// Schemes written by `continuum` and `decomposition.csv`.
    pub schemes: Vec<Scheme>,
    pub wavelength_nm: f64,
    pub theta_deg: f64,
    pub polarization: Polarization,
    pub n_s_grid: Grid,
    pub wavelength_grid_nm: Grid,
    pub theta_grid_deg: Grid,
    pub spectrum_n_s: f64,
    pub phi_ab: PhasePolicy,
    pub phase_scan_points: usize,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub fd_step_riu: f64,
    pub continuum: ContinuumConfig,
    pub budget: BudgetConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            stack_file: None,
            stack: None,
            calibration: CalibrationConfig::default(),
            output_dir: None,
            schemes: vec![Scheme::Hom, Scheme::Classical],
            wavelength_nm: 800.0,
            theta_deg: 70.0,
            polarization: Polarization::Tm,
            n_s_grid: Grid::new(1.25, 1.34, 1e-3),
            wavelength_grid_nm: Grid::new(790.0, 810.0, 0.5),
            theta_grid_deg: Grid::new(60.0, 80.0, 0.1),
            spectrum_n_s: 1.33,
            phi_ab: PhasePolicy::default(),
            phase_scan_points: PHASE_SCAN_POINTS,
            alpha_sq: 1.0,
            beta_sq: 1.0,
            fd_step_riu: DEFAULT_NS_STEP,
            continuum: ContinuumConfig::default(),
            budget: BudgetConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; a relative `stack_file` is resolved against the
    /// config's directory and the stack is inlined.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        if config.stack.is_none() {
            if let Some(rel) = &config.stack_file {
                let full = path.parent().unwrap_or(Path::new(".")).join(rel);
                config.stack =
                    Some(StackFile::load(&full).map_err(|e| CliError::Config(e.to_string()))?);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.n_s_grid.points()?;
        self.wavelength_grid_nm.points()?;
        self.theta_grid_deg.points()?;
        if let Some(g) = &self.continuum.n_s_grid {
            g.points()?;
        }
        let positive = [
            ("wavelength_nm", self.wavelength_nm),
            ("fd_step_riu", self.fd_step_riu),
            ("spectrum_n_s", self.spectrum_n_s),
            ("continuum.span_fwhm", self.continuum.span_fwhm),
            ("continuum.min_span_fwhm", self.continuum.min_span_fwhm),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(0.0..90.0).contains(&self.theta_deg) {
            return Err(CliError::Config(format!(
                "theta_deg {} outside [0, 90)",
                self.theta_deg
            )));
        }
        if !(self.alpha_sq >= 0.0 && self.beta_sq >= 0.0) {
            return Err(CliError::Config(
                "alpha_sq and beta_sq must be non-negative".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Config("schemes must not be empty".into()));
        }
        if self.phase_scan_points < 3 {
            return Err(CliError::Config(
                "phase_scan_points must be at least 3".into(),
            ));
        }
        if self.continuum.nodes < 2 {
            return Err(CliError::Config(
                "continuum.nodes must be at least 2".into(),
            ));
        }
        if self.continuum.delta_lambda_nm.iter().any(|d| !(*d > 0.0)) {
            return Err(CliError::Config(
                "continuum.delta_lambda_nm entries must be positive".into(),
            ));
        }
        Ok(())
    }
}
