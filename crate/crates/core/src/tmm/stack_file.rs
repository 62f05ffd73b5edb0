//! JSON description of a layer stack.
//!
//! ```json
//! {
//!   "layers": [
//!     {"material": {"n": 1.5, "k": 0.0}, "thickness_nm": null},
//!     {"material": "gold", "thickness_nm": 20.0},
//!     {"material": {"n": 1.31, "k": 0.0}, "thickness_nm": 502.4},
//!     {"material": "gold", "thickness_nm": 20.0},
//!     {"material": {"n": 1.5, "k": 0.0}, "thickness_nm": null}
//!   ],
//!   "sample_index": 2,
//!   "sample_n": 1.31,
//!   "calibration": {"wavelength_nm": 800.0, "theta_deg": 70.0, "n_s": 1.31,
//!                   "d_gold_nm": 20.0, "d_sample_nm": 502.4, "residual": 1e-12}
//! }
//! ```
//!
//! `thickness_nm` is `null` for the semi-infinite entry and exit media.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Calibration, CalibrationTarget, Layer, LayerStack, TmmError};
use crate::materials::Material;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Named(String),
    Constant {
        n: f64,
        #[serde(default)]
        k: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub material: MaterialSpec,
    pub thickness_nm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub wavelength_nm: f64,
    pub theta_deg: f64,
    pub n_s: f64,
    pub d_gold_nm: f64,
    pub d_sample_nm: f64,
    pub residual: f64,
}

impl CalibrationRecord {
    pub fn target(&self) -> CalibrationTarget {
        CalibrationTarget {
            wavelength_nm: self.wavelength_nm,
            theta_deg: self.theta_deg,
            n_s: self.n_s,
        }
    }
}

impl From<&Calibration> for CalibrationRecord {
    fn from(cal: &Calibration) -> Self {
        Self {
            wavelength_nm: cal.target.wavelength_nm,
            theta_deg: cal.target.theta_deg,
            n_s: cal.target.n_s,
            d_gold_nm: cal.d_gold_nm,
            d_sample_nm: cal.d_sample_nm,
            residual: cal.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackFile {
    pub layers: Vec<LayerSpec>,
    pub sample_index: usize,
    pub sample_n: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationRecord>,
}

impl StackFile {
    pub fn from_stack(stack: &LayerStack, calibration: Option<CalibrationRecord>) -> Self {
        let last = stack.layers().len() - 1;
        let layers = stack
            .layers()
            .iter()
            .enumerate()
            .map(|(i, layer)| LayerSpec {
                material: match &layer.material {
                    Material::Constant(c) => MaterialSpec::Constant { n: c.re, k: c.im },
                    Material::Tabulated(table) => MaterialSpec::Named(table.name().to_string()),
                },
                thickness_nm: (i != 0 && i != last).then_some(layer.thickness_nm),
            })
            .collect();
        Self {
            layers,
            sample_index: stack.sample_index(),
            sample_n: stack.sample_n(),
            calibration,
        }
    }

    pub fn to_stack(&self) -> Result<LayerStack, TmmError> {
        let last = self.layers.len().saturating_sub(1);
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let material = match &spec.material {
                    MaterialSpec::Named(name) => Material::by_name(name)?,
                    MaterialSpec::Constant { n, k } => Material::constant(*n, *k)?,
                };
                if i == 0 || i == last {
                    Ok(Layer::semi_infinite(material))
                } else {
                    let d = spec.thickness_nm.ok_or_else(|| {
                        TmmError::InvalidStack(format!("layer {i} needs thickness_nm"))
                    })?;
                    Ok(Layer::new(material, d))
                }
            })
            .collect::<Result<Vec<_>, TmmError>>()?;
        LayerStack::new(layers, self.sample_index, self.sample_n)
    }

    pub fn from_json(text: &str) -> Result<Self, TmmError> {
        serde_json::from_str(text).map_err(|e| TmmError::InvalidStack(format!("stack file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stack file serializes")
    }

    pub fn load(path: &Path) -> Result<Self, TmmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TmmError::InvalidStack(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
