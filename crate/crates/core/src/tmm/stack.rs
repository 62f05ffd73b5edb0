use num_complex::Complex64;

use super::TmmError;
use crate::materials::Material;

/// Refractive index of the two glass prisms.
pub const PRISM_INDEX: f64 = 1.5;
/// Default gold film thickness of the shipped sensor geometry.
pub const DEFAULT_GOLD_NM: f64 = 20.0;
/// Starting sample-gap thickness handed to calibration.
pub const DEFAULT_SAMPLE_NM: f64 = 500.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    /// Ignored for the first and last (semi-infinite) layers.
    pub thickness_nm: f64,
}

impl Layer {
    pub fn new(material: Material, thickness_nm: f64) -> Self {
        Self {
            material,
            thickness_nm,
        }
    }

    pub fn semi_infinite(material: Material) -> Self {
        Self {
            material,
            thickness_nm: f64::INFINITY,
        }
    }
}

/// Ordered layers from the entry medium to the exit medium, with one
/// designated analyte layer whose index is `sample_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    sample_index: usize,
    sample_n: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, sample_index: usize, sample_n: f64) -> Result<Self, TmmError> {
        if layers.len() < 3 {
            return Err(TmmError::InvalidStack(format!(
                "need at least 3 layers, found {}",
                layers.len()
            )));
        }
        if sample_index == 0 || sample_index >= layers.len() - 1 {
            return Err(TmmError::InvalidStack(format!(
                "sample index {sample_index} must be an interior layer"
            )));
        }
        if !(sample_n.is_finite() && sample_n > 0.0) {
            return Err(TmmError::InvalidStack(format!(
                "sample index n_s = {sample_n}"
            )));
        }
        for (i, layer) in layers.iter().enumerate().take(layers.len() - 1).skip(1) {
            if !(layer.thickness_nm.is_finite() && layer.thickness_nm >= 0.0) {
                return Err(TmmError::InvalidStack(format!(
                    "layer {i} thickness {} nm",
                    layer.thickness_nm
                )));
            }
        }
        Ok(Self {
            layers,
            sample_index,
            sample_n,
        })
    }

    /// prism | gold | sample | gold | prism.
    pub fn dual_kretschmann(gold_nm: f64, sample_nm: f64, sample_n: f64) -> Result<Self, TmmError> {
        Self::new(
            vec![
                Layer::semi_infinite(Material::dielectric(PRISM_INDEX)),
                Layer::new(Material::gold(), gold_nm),
                Layer::new(Material::dielectric(sample_n), sample_nm),
                Layer::new(Material::gold(), gold_nm),
                Layer::semi_infinite(Material::dielectric(PRISM_INDEX)),
            ],
            2,
            sample_n,
        )
    }

    /// Uncalibrated default geometry.
    pub fn default_sensor() -> Self {
        Self::dual_kretschmann(DEFAULT_GOLD_NM, DEFAULT_SAMPLE_NM, 1.31)
            .expect("default geometry is valid")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn sample_index(&self) -> usize {
        self.sample_index
    }

    pub fn sample_n(&self) -> f64 {
        self.sample_n
    }

    pub fn with_sample_n(&self, sample_n: f64) -> Self {
        let mut out = self.clone();
        out.sample_n = sample_n;
        out
    }

    /// Sets every interior layer other than the sample (the metal films).
    pub fn with_film_thickness(&self, thickness_nm: f64) -> Self {
        let mut out = self.clone();
        let last = out.layers.len() - 1;
        for (i, layer) in out.layers.iter_mut().enumerate() {
            if i != 0 && i != last && i != self.sample_index {
                layer.thickness_nm = thickness_nm;
            }
        }
        out
    }

    pub fn with_sample_thickness(&self, thickness_nm: f64) -> Self {
        let mut out = self.clone();
        out.layers[self.sample_index].thickness_nm = thickness_nm;
        out
    }

    /// Replaces the entry and exit media with a lossless dielectric.
    pub fn with_ambient_index(&self, n: f64) -> Self {
        let mut out = self.clone();
        let last = out.layers.len() - 1;
        out.layers[0].material = Material::dielectric(n);
        out.layers[last].material = Material::dielectric(n);
        out
    }

    /// Thickness of the first metal film (the layer after the entry medium,
    /// or after the sample if the sample comes first).
    pub fn film_thickness(&self) -> f64 {
        let idx = if self.sample_index == 1 { 2 } else { 1 };
        self.layers[idx].thickness_nm
    }

    pub fn sample_thickness(&self) -> f64 {
        self.layers[self.sample_index].thickness_nm
    }

    /// Same layers in the opposite order.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self {
            sample_index: layers.len() - 1 - self.sample_index,
            layers,
            sample_n: self.sample_n,
        }
    }

    /// Materials and thicknesses mirror about the sample layer, and the
    /// sample sits in the middle.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.layers.len();
        if 2 * self.sample_index + 1 != n {
            return false;
        }
        (0..n / 2).all(|i| {
            let (a, b) = (&self.layers[i], &self.layers[n - 1 - i]);
            let boundary = i == 0;
            a.material == b.material && (boundary || a.thickness_nm == b.thickness_nm)
        })
    }

    /// Complex index of every layer, with the sample override applied.
    pub fn indices(&self, wavelength_nm: f64) -> Result<Vec<Complex64>, TmmError> {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, layer)| {
                if i == self.sample_index {
                    Ok(Complex64::new(self.sample_n, 0.0))
                } else {
                    Ok(layer.material.refractive_index(wavelength_nm)?)
                }
            })
            .collect()
    }

    /// Wavelength interval on which every tabulated material is defined.
    pub fn wavelength_range_nm(&self) -> (f64, f64) {
        self.layers
            .iter()
            .filter_map(|l| l.material.range_nm())
            .fold((0.0, f64::INFINITY), |(lo, hi), (a, b)| {
                (lo.max(a), hi.min(b))
            })
    }
}
