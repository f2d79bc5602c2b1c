//! Run configuration: one TOML file with a section per workflow.

use std::path::{Path, PathBuf};

use npc_core::quantum::ImperfectionModel;
use npc_core::DispersionModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml_edit::{DocumentMut, Item, Value};

use crate::error::{CliError, CliResult};

pub type Order = [i32; 2];

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub dispersion: DispersionSection,
    pub problem: Option<ProblemSection>,
    pub design: Option<DesignSection>,
    pub pattern: Option<PatternSection>,
    pub fringe: Option<FringeSection>,
    #[serde(default)]
    pub imperfections: ImperfectionSection,
    pub polscan: Option<PolscanSection>,
    pub lattice_check: Option<LatticeCheckSection>,
}

/// Either a built-in model name or a path to a dispersion file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    pub builtin: Option<String>,
    /// Relative paths resolve against the config file's directory.
    pub path: Option<PathBuf>,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self {
            builtin: Some("mgo-slt".into()),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub pump_um: f64,
    pub signal_um: f64,
    pub idler_um: Option<f64>,
    pub internal_angle_deg: f64,
    pub temperature_c: f64,
    pub crystal_length_mm: f64,
    pub orders: Vec<Order>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    /// Order whose lattice gets the optimised motif and the coefficient table.
    pub motif_order: Order,
    pub table_orders: Vec<Order>,
    #[serde(default = "default_numeric_grid")]
    pub numeric_grid: usize,
    pub domain_map_pixels_per_um: Option<f64>,
    #[serde(default = "default_cells")]
    pub domain_map_cells: [u32; 2],
    pub tuning_range_c: Option<[f64; 2]>,
    #[serde(default = "default_tuning_steps")]
    pub tuning_steps: usize,
}

fn default_numeric_grid() -> usize {
    1024
}

fn default_cells() -> [u32; 2] {
    [2, 2]
}

fn default_tuning_steps() -> usize {
    41
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSection {
    /// The lattice is solved for this order at `design_temperature_c`.
    pub design_order: Order,
    pub design_temperature_c: f64,
    /// Crystal temperature of the scan.
    pub temperature_c: f64,
    pub orders: Vec<Order>,
    pub half_window_deg: f64,
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringeSection {
    pub wavelength_um: f64,
    pub delay_start_um: f64,
    pub delay_end_um: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImperfectionSection {
    #[serde(default = "half")]
    pub transmittance: f64,
    #[serde(default)]
    pub polarization_rotation_deg: f64,
    #[serde(default)]
    pub ellipticity: f64,
    #[serde(default)]
    pub multipair_fraction: f64,
    #[serde(default)]
    pub background_ratio: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for ImperfectionSection {
    fn default() -> Self {
        Self {
            transmittance: 0.5,
            polarization_rotation_deg: 0.0,
            ellipticity: 0.0,
            multipair_fraction: 0.0,
            background_ratio: 0.0,
        }
    }
}

impl ImperfectionSection {
    pub fn model(&self) -> CliResult<ImperfectionModel> {
        let model = ImperfectionModel {
            transmittance: self.transmittance,
            polarization_rotation_rad: self.polarization_rotation_deg.to_radians(),
            ellipticity: self.ellipticity,
            multipair_fraction: self.multipair_fraction,
            background_ratio: self.background_ratio,
        };
        model.validate().map_err(CliError::in_section("imperfections"))?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolscanSection {
    pub start_deg: f64,
    pub end_deg: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeCheckSection {
    /// Rectangular reference lattice `[Λx, Λy]`.
    pub reference_periods_um: [f64; 2],
    /// Build the tested lattice from two reference reciprocal vectors
    /// instead of using the reference itself.
    pub basis_orders: Option<[Order; 2]>,
    /// Query vector in rad/µm ...
    pub vector_rad_per_um: Option<[f64; 2]>,
    /// ... or the midpoint of two reference reciprocal vectors.
    pub midpoint_orders: Option<[Order; 2]>,
    pub tolerance_rad_per_um: f64,
}

pub struct LoadedConfig {
    pub config: Config,
    /// Config text after overrides; this is what gets hashed.
    pub effective_text: String,
    pub sha256: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn dispersion(&self) -> CliResult<DispersionModel> {
        let section = &self.config.dispersion;
        match (&section.builtin, &section.path) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "[dispersion] set either `builtin` or `path`, not both".into(),
            )),
            (None, Some(path)) => {
                let full = self.base_dir.join(path);
                DispersionModel::from_file(&full)
                    .map_err(|e| CliError::Config(format!("[dispersion] path {}: {e}", full.display())))
            }
            (Some(name), None) => DispersionModel::builtin(name).ok_or_else(|| {
                CliError::Config(format!(
                    "[dispersion] unknown builtin `{name}`; expected mgo-slt, slt or mgo-cln"
                ))
            }),
            (None, None) => Ok(DispersionModel::mgo_slt()),
        }
    }

    pub fn section<'a, T>(&self, value: &'a Option<T>, name: &str) -> CliResult<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("missing section [{name}]")))
    }
}

pub fn load(path: &Path, overrides: &[String]) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let effective_text = if overrides.is_empty() {
        text
    } else {
        let mut doc: DocumentMut = text
            .parse()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for spec in overrides {
            apply_override(&mut doc, spec)?;
        }
        doc.to_string()
    };
    let config: Config = toml::from_str(&effective_text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(effective_text.as_bytes()));
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig {
        config,
        effective_text,
        sha256,
        base_dir,
    })
}

/// Sets a scalar at a dotted key path, e.g. `fringe.steps=257`.
pub fn apply_override(doc: &mut DocumentMut, spec: &str) -> CliResult<()> {
    let bad = |reason: &str| CliError::Config(format!("--override `{spec}`: {reason}"));
    let (key, raw) = spec.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let path: Vec<&str> = key.trim().split('.').map(str::trim).collect();
    if path.iter().any(|s| s.is_empty()) {
        return Err(bad("empty key segment"));
    }
    let raw = raw.trim();
    let value: Value = match raw.parse::<Value>() {
        Ok(v) if v.is_array() || v.is_inline_table() => {
            return Err(bad("only scalar fields can be overridden"))
        }
        Ok(v) => v,
        Err(_) => Value::from(raw),
    };

    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = doc.as_table_mut() as &mut dyn toml_edit::TableLike;
    for seg in parents {
        let item = table.entry(seg).or_insert(toml_edit::table());
        table = item
            .as_table_like_mut()
            .ok_or_else(|| bad(&format!("`{seg}` is not a section")))?;
    }
    if let Some(existing) = table.get(last) {
        if existing.is_table_like() || existing.is_array() || existing.is_array_of_tables() {
            return Err(bad("only scalar fields can be overridden"));
        }
    }
    table.insert(last, Item::Value(value.decorated(" ", "")));
    Ok(())
}
