//! Optical constants for the layers of the stack.
//!
//! Metals are described by tabulated `(wavelength, n, k)` data and linearly
//! interpolated in wavelength, with `n` and `k` interpolated separately.
//! Queries outside the tabulated range are rejected rather than extrapolated.
//! Dielectrics are constant complex indices.

use std::fmt::Write as _;
use std::io::Read;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use thiserror::Error;

/// Gold data shipped with the crate (Johnson & Christy).
pub const GOLD_JOHNSON_CHRISTY_CSV: &str = include_str!("../data/gold_johnson_christy.csv");

const HEADER: &str = "wavelength_nm,n,k";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: wavelength {wavelength_nm} nm does not increase on previous entry {previous_nm} nm")]
    Ordering {
        line: u64,
        wavelength_nm: f64,
        previous_nm: f64,
    },
    #[error("line {line}: extinction coefficient k = {k} is negative (material must be passive)")]
    Passivity { line: u64, k: f64 },
    #[error("material table needs at least 2 entries, found {0}")]
    TooFewEntries(usize),
    #[error(
        "wavelength {wavelength_nm} nm outside tabulated range [{min_nm}, {max_nm}] nm of '{name}'"
    )]
    OutOfRange {
        name: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("constant index {0} has negative imaginary part")]
    ActiveConstant(Complex64),
    #[error("unknown material name '{0}'")]
    UnknownName(String),
}

/// One row of a material table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub wavelength_nm: f64,
    pub n: f64,
    pub k: f64,
}

/// Tabulated optical constants with strictly increasing wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTable {
    name: String,
    entries: Vec<TableEntry>,
}

impl MaterialTable {
    /// Builds a table after checking ordering, passivity and size.
    pub fn new(name: impl Into<String>, entries: Vec<TableEntry>) -> Result<Self, MaterialError> {
        for (i, e) in entries.iter().enumerate() {
            let line = i as u64 + 1;
            if !(e.wavelength_nm > 0.0) || !e.n.is_finite() || !e.k.is_finite() {
                return Err(MaterialError::Parse {
                    line,
                    message: format!("non-physical entry {e:?}"),
                });
            }
            if e.k < 0.0 {
                return Err(MaterialError::Passivity { line, k: e.k });
            }
            if i > 0 && e.wavelength_nm <= entries[i - 1].wavelength_nm {
                return Err(MaterialError::Ordering {
                    line,
                    wavelength_nm: e.wavelength_nm,
                    previous_nm: entries[i - 1].wavelength_nm,
                });
            }
        }
        if entries.len() < 2 {
            return Err(MaterialError::TooFewEntries(entries.len()));
        }
        Ok(Self {
            name: name.into(),
            entries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// `(first, last)` tabulated wavelength in nm.
    pub fn range_nm(&self) -> (f64, f64) {
        (
            self.entries[0].wavelength_nm,
            self.entries[self.entries.len() - 1].wavelength_nm,
        )
    }

    /// Linear interpolation of `n` and `k` at `wavelength_nm`.
    pub fn interpolate(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        let (min_nm, max_nm) = self.range_nm();
        if !(wavelength_nm >= min_nm && wavelength_nm <= max_nm) {
            return Err(MaterialError::OutOfRange {
                name: self.name.clone(),
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        // first knot strictly above the query; knots equal to the query hit exactly
        let upper = self
            .entries
            .partition_point(|e| e.wavelength_nm <= wavelength_nm);
        if upper == 0 {
            unreachable!("range check guarantees a knot at or below the query");
        }
        let lo = self.entries[upper - 1];
        if lo.wavelength_nm == wavelength_nm || upper == self.entries.len() {
            return Ok(Complex64::new(lo.n, lo.k));
        }
        let hi = self.entries[upper];
        let frac = (wavelength_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
        Ok(Complex64::new(
            lo.n + frac * (hi.n - lo.n),
            lo.k + frac * (hi.k - lo.k),
        ))
    }

    /// Serializes back to the CSV format accepted by [`load_material_table`].
    ///
    /// Numbers use Rust's shortest round-trip representation, so loading the
    /// output reproduces every value bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.name);
        let _ = writeln!(out, "{HEADER}");
        for e in &self.entries {
            let _ = writeln!(out, "{:?},{:?},{:?}", e.wavelength_nm, e.n, e.k);
        }
        out
    }
}

/// Parses a `wavelength_nm,n,k` CSV stream.
///
/// `#` comment lines may precede the header. Line numbers in errors refer to
/// the physical line of the input.
pub fn load_material_table(
    name: impl Into<String>,
    source: impl Read,
) -> Result<MaterialTable, MaterialError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| MaterialError::Parse {
            line: e.position().map_or(1, |p| p.line()),
            message: e.to_string(),
        })?
        .clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != ["wavelength_nm", "n", "k"] {
        return Err(MaterialError::Parse {
            line: reader.position().line().max(1),
            message: format!("expected header '{HEADER}', found '{}'", found.join(",")),
        });
    }

    let mut entries = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| MaterialError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, MaterialError> {
            let raw = record.get(i).ok_or_else(|| MaterialError::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            })?;
            raw.parse::<f64>().map_err(|_| MaterialError::Parse {
                line,
                message: format!("cannot parse '{raw}' as a number"),
            })
        };
        if record.len() != 3 {
            return Err(MaterialError::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let entry = TableEntry {
            wavelength_nm: field(0)?,
            n: field(1)?,
            k: field(2)?,
        };
        if let Some(prev) = entries.last().map(|e: &TableEntry| e.wavelength_nm) {
            if entry.wavelength_nm <= prev {
                return Err(MaterialError::Ordering {
                    line,
                    wavelength_nm: entry.wavelength_nm,
                    previous_nm: prev,
                });
            }
        }
        if entry.k < 0.0 {
            return Err(MaterialError::Passivity { line, k: entry.k });
        }
        entries.push(entry);
    }
    MaterialTable::new(name, entries)
}

/// The shipped Johnson & Christy gold table, parsed once.
pub fn gold() -> Arc<MaterialTable> {
    static GOLD: OnceLock<Arc<MaterialTable>> = OnceLock::new();
    GOLD.get_or_init(|| {
        Arc::new(
            load_material_table("gold_johnson_christy", GOLD_JOHNSON_CHRISTY_CSV.as_bytes())
                .expect("shipped gold table is valid"),
        )
    })
    .clone()
}

/// Optical constants of one layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Constant(Complex64),
    Tabulated(Arc<MaterialTable>),
}

impl Material {
    pub fn constant(n: f64, k: f64) -> Result<Self, MaterialError> {
        let value = Complex64::new(n, k);
        if k < 0.0 {
            return Err(MaterialError::ActiveConstant(value));
        }
        Ok(Material::Constant(value))
    }

    /// Lossless dielectric.
    pub fn dielectric(n: f64) -> Self {
        Material::Constant(Complex64::new(n, 0.0))
    }

    pub fn gold() -> Self {
        Material::Tabulated(gold())
    }

    /// Resolves a material name used in stack description files.
    pub fn by_name(name: &str) -> Result<Self, MaterialError> {
        match name {
            "gold" | "au" | "gold_johnson_christy" => Ok(Material::gold()),
            other => Err(MaterialError::UnknownName(other.to_string())),
        }
    }

    /// Complex refractive index `n + ik` at the given vacuum wavelength.
    pub fn refractive_index(&self, wavelength_nm: f64) -> Result<Complex64, MaterialError> {
        match self {
            Material::Constant(value) => Ok(*value),
            Material::Tabulated(table) => table.interpolate(wavelength_nm),
        }
    }

    /// Valid wavelength range, `None` for constants.
    pub fn range_nm(&self) -> Option<(f64, f64)> {
        match self {
            Material::Constant(_) => None,
            Material::Tabulated(table) => Some(table.range_nm()),
        }
    }
}
