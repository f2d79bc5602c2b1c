//! Temperature-dependent refractive index of the nonlinear crystal.
//!
//! Models are loaded from TOML files with exactly five top-level keys:
//! `name`, `form`, `coefficients`, `temperature_terms` and `validity`.
//! The form identifier selects the functional form and fixes the set of
//! term names that must be present. Only the extraordinary index is modeled.
//!
//! Supported forms (λ in µm, T in °C):
//!
//! * `sellmeier-gayer`:
//!   `n² = a1 + b1·f + (a2 + b2·f)/(λ² − (a3 + b3·f)²) + (a4 + b4·f)/(λ² − a5²) − a6·λ²`
//!   with `f = (T − t_ref)(T + t_offset)`.
//! * `sellmeier-bruner`:
//!   `n² = A + (B + b·f)/(λ² − (C + c·f)²) + E/(λ² − F²) + G/(λ² − H²) + D·λ²`
//!   with `f = (T + t_offset)²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in MgO:SLT data, the default for every workflow.
pub const MGO_SLT_DOLEV2009: &str = include_str!("../configs/mgo_slt_dolev2009.toml");
pub const SLT_BRUNER2003: &str = include_str!("../configs/slt_bruner2003.toml");
pub const MGO_CLN_GAYER2008: &str = include_str!("../configs/mgo_cln_gayer2008.toml");

const GAYER_COEFFS: [&str; 6] = ["a1", "a2", "a3", "a4", "a5", "a6"];
const GAYER_TEMP: [&str; 6] = ["b1", "b2", "b3", "b4", "t_ref", "t_offset"];
const BRUNER_COEFFS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];
const BRUNER_TEMP: [&str; 3] = ["b", "c", "t_offset"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SellmeierForm {
    #[serde(rename = "sellmeier-gayer")]
    Gayer,
    #[serde(rename = "sellmeier-bruner")]
    Bruner,
}

impl SellmeierForm {
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "sellmeier-gayer" => Ok(Self::Gayer),
            "sellmeier-bruner" => Ok(Self::Bruner),
            other => Err(Error::Config(format!(
                "unknown form identifier `{other}` (expected `sellmeier-gayer` or `sellmeier-bruner`)"
            ))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::Gayer => "sellmeier-gayer",
            Self::Bruner => "sellmeier-bruner",
        }
    }

    fn term_names(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Self::Gayer => (&GAYER_COEFFS, &GAYER_TEMP),
            Self::Bruner => (&BRUNER_COEFFS, &BRUNER_TEMP),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Validity {
    pub wavelength_um: [f64; 2],
    pub temperature_c: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    form: String,
    coefficients: BTreeMap<String, f64>,
    temperature_terms: BTreeMap<String, f64>,
    validity: Validity,
}

/// A wavelength- and temperature-dependent extraordinary index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionModel {
    pub name: String,
    pub form: SellmeierForm,
    pub coefficients: BTreeMap<String, f64>,
    pub temperature_terms: BTreeMap<String, f64>,
    pub validity: Validity,
}

impl DispersionModel {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawModel = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let form = SellmeierForm::parse(&raw.form)?;
        Self::new(
            raw.name,
            form,
            raw.coefficients,
            raw.temperature_terms,
            raw.validity,
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// MgO-doped stoichiometric LiTaO₃ (Dolev et al. 2009).
    pub fn mgo_slt() -> Self {
        Self::from_toml_str(MGO_SLT_DOLEV2009).expect("built-in config is valid")
    }

    /// Looks up a built-in model by short name.
    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "mgo-slt" | "mgo_slt_dolev2009" => MGO_SLT_DOLEV2009,
            "slt" | "slt_bruner2003" => SLT_BRUNER2003,
            "mgo-cln" | "mgo_cln_gayer2008" => MGO_CLN_GAYER2008,
            _ => return None,
        };
        Some(Self::from_toml_str(text).expect("built-in config is valid"))
    }

    pub fn new(
        name: String,
        form: SellmeierForm,
        coefficients: BTreeMap<String, f64>,
        temperature_terms: BTreeMap<String, f64>,
        validity: Validity,
    ) -> Result<Self> {
        let (coeff_names, temp_names) = form.term_names();
        check_terms("coefficients", &coefficients, coeff_names)?;
        check_terms("temperature_terms", &temperature_terms, temp_names)?;

        let [wl_lo, wl_hi] = validity.wavelength_um;
        let [t_lo, t_hi] = validity.temperature_c;
        if !(wl_lo > 0.0 && wl_hi > wl_lo) {
            return Err(Error::Config(format!(
                "validity.wavelength_um must satisfy 0 < lo < hi, got [{wl_lo}, {wl_hi}]"
            )));
        }
        if !(t_hi > t_lo) || !t_lo.is_finite() || !t_hi.is_finite() {
            return Err(Error::Config(format!(
                "validity.temperature_c must satisfy lo < hi, got [{t_lo}, {t_hi}]"
            )));
        }

        let model = Self {
            name,
            form,
            coefficients,
            temperature_terms,
            validity,
        };

        // n > 1 over the whole validity box, sampled.
        for i in 0..=64 {
            let wl = wl_lo + (wl_hi - wl_lo) * i as f64 / 64.0;
            for j in 0..=8 {
                let t = t_lo + (t_hi - t_lo) * j as f64 / 8.0;
                let n = model.index_unchecked(wl, t);
                if !(n > 1.0) {
                    return Err(Error::Config(format!(
                        "model gives n = {n} at {wl} um, {t} C; index must exceed 1 inside the validity ranges"
                    )));
                }
            }
        }
        Ok(model)
    }

    fn c(&self, key: &str) -> f64 {
        self.coefficients[key]
    }

    fn t(&self, key: &str) -> f64 {
        self.temperature_terms[key]
    }

    fn index_unchecked(&self, wavelength_um: f64, temperature_c: f64) -> f64 {
        let l2 = wavelength_um * wavelength_um;
        let n2 = match self.form {
            SellmeierForm::Gayer => {
                let f = (temperature_c - self.t("t_ref")) * (temperature_c + self.t("t_offset"));
                let pole = self.c("a3") + self.t("b3") * f;
                let a5 = self.c("a5");
                self.c("a1")
                    + self.t("b1") * f
                    + (self.c("a2") + self.t("b2") * f) / (l2 - pole * pole)
                    + (self.c("a4") + self.t("b4") * f) / (l2 - a5 * a5)
                    - self.c("a6") * l2
            }
            SellmeierForm::Bruner => {
                let f = (temperature_c + self.t("t_offset")).powi(2);
                let pole = self.c("C") + self.t("c") * f;
                let (ef, hf) = (self.c("F"), self.c("H"));
                self.c("A")
                    + (self.c("B") + self.t("b") * f) / (l2 - pole * pole)
                    + self.c("E") / (l2 - ef * ef)
                    + self.c("G") / (l2 - hf * hf)
                    + self.c("D") * l2
            }
        };
        n2.sqrt()
    }

    pub fn check_range(&self, wavelength_um: f64, temperature_c: f64) -> Result<()> {
        let [wl_lo, wl_hi] = self.validity.wavelength_um;
        let [t_lo, t_hi] = self.validity.temperature_c;
        check_bound("wavelength_um", wavelength_um, wl_lo, wl_hi, "um")?;
        check_bound("temperature_c", temperature_c, t_lo, t_hi, "C")
    }

    /// Extraordinary refractive index n(λ, T).
    pub fn refractive_index(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        self.check_range(wavelength_um, temperature_c)?;
        Ok(self.index_unchecked(wavelength_um, temperature_c))
    }

    /// |k| = 2π·n/λ in rad/µm.
    pub fn wavevector_magnitude(&self, wavelength_um: f64, temperature_c: f64) -> Result<f64> {
        Ok(2.0 * PI * self.refractive_index(wavelength_um, temperature_c)? / wavelength_um)
    }
}

fn check_bound(quantity: &'static str, value: f64, lo: f64, hi: f64, unit: &str) -> Result<()> {
    if value.is_nan() || value < lo {
        return Err(Error::OutOfRange {
            quantity,
            value,
            bound: format!("below lower bound {lo} {unit}"),
        });
    }
    if value > hi {
        return Err(Error::OutOfRange {
            quantity,
            value,
            bound: format!("above upper bound {hi} {unit}"),
        });
    }
    Ok(())
}

fn check_terms(section: &str, terms: &BTreeMap<String, f64>, expected: &[&str]) -> Result<()> {
    for name in expected {
        match terms.get(*name) {
            None => {
                return Err(Error::Config(format!("{section}: missing term `{name}`")));
            }
            Some(v) if !v.is_finite() => {
                return Err(Error::Config(format!("{section}.{name} is not finite")));
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = terms.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(Error::Config(format!(
            "{section}: unknown term `{extra}` (expected {})",
            expected.join(", ")
        )));
    }
    Ok(())
}
