use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{ResidualOptions, Scheme};
use crate::error::{Error, Result};
use crate::lattice::{FrequencyVector, SymbolFile, TorusSymbol, Truncation};
use crate::lindstedt::{lindstedt_terms, LindstedtSeries};
use crate::weyl::Bracket;

/// Where the perturbation comes from: an inline symbol or a path to a symbol file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SymbolSource {
    Inline(SymbolFile),
    Path(PathBuf),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Truncations {
    #[serde(rename = "K_max")]
    pub k_max: i32,
    #[serde(rename = "M_max")]
    pub m_max: i32,
    /// Interior block half-width for operator-level residuals.
    pub band: i32,
    /// Propagator steps per run.
    pub steps: usize,
}

impl Default for Truncations {
    fn default() -> Self {
        Truncations { k_max: 64, m_max: 64, band: 16, steps: 8 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Residuals at or below this are roundoff.
    pub noise_floor: f64,
    /// `verify` accepts `residual ≤ residual_factor · t^{N+1} + noise_floor`.
    pub residual_factor: f64,
    /// Minimum fitted log-log slope of residuals in `t`.
    pub slope: f64,
    /// Spectrum matching tolerance `spectrum_factor · t^{N+1}`.
    pub spectrum_factor: f64,
    pub matched_fraction: f64,
    pub measure_deviation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            noise_floor: 1e-10,
            residual_factor: 10.0,
            slope: 2.7,
            spectrum_factor: 10.0,
            matched_fraction: 0.95,
            measure_deviation: 0.05,
        }
    }
}

/// Settings for the eigenfunction experiments, which need a much larger basis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSettings {
    pub hbar: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(rename = "J")]
    pub j_cut: i32,
    pub energy: f64,
    pub quadrature: usize,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        MeasureSettings { hbar: vec![0.005], t: vec![0.05], j_cut: 256, energy: 1.0, quadrature: 128 }
    }
}

/// A complete experiment description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(rename = "V")]
    pub v: SymbolSource,
    pub omega: Vec<f64>,
    pub gamma: f64,
    pub orders: usize,
    pub hbar: Vec<f64>,
    pub t: Vec<f64>,
    #[serde(rename = "J")]
    pub j_cut: i32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub truncations: Truncations,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub measures: MeasureSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl Scenario {
    /// Parses and validates; relative symbol paths are resolved against `base`.
    pub fn from_json_str(s: &str, base: Option<&Path>) -> Result<Self> {
        let mut scn: Scenario = serde_json::from_str(s)?;
        if let (SymbolSource::Path(p), Some(base)) = (&mut scn.v, base) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        scn.validate()?;
        Ok(scn)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json_str(&std::fs::read_to_string(path)?, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.hbar.is_empty() || self.t.is_empty() || self.measures.hbar.is_empty() || self.measures.t.is_empty() {
            return Err(Error::invalid("hbar and t grids must be nonempty"));
        }
        for &h in self.hbar.iter().chain(&self.measures.hbar) {
            if !(h > 0.0 && h <= 1.0) {
                return Err(Error::invalid(format!("hbar must lie in (0, 1], got {h}")));
            }
        }
        for &t in self.t.iter().chain(&self.measures.t) {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid(format!("t must be finite and nonnegative, got {t}")));
            }
        }
        if self.orders == 0 || self.orders > 8 {
            return Err(Error::invalid(format!("orders must be in 1..=8, got {}", self.orders)));
        }
        if self.j_cut < 1 || self.measures.j_cut < 1 {
            return Err(Error::invalid("J must be at least 1"));
        }
        let tr = &self.truncations;
        if tr.k_max < 1 || tr.m_max < 1 || tr.band < 0 || tr.band >= self.j_cut || tr.steps == 0 {
            return Err(Error::invalid("truncations need K_max, M_max ≥ 1, 0 ≤ band < J and steps ≥ 1"));
        }
        let tol = &self.tolerances;
        positive("noise_floor", tol.noise_floor)?;
        positive("residual_factor", tol.residual_factor)?;
        positive("slope", tol.slope)?;
        positive("spectrum_factor", tol.spectrum_factor)?;
        positive("matched_fraction", tol.matched_fraction)?;
        positive("measure_deviation", tol.measure_deviation)?;
        positive("energy", self.measures.energy)?;
        if self.measures.quadrature < 4 {
            return Err(Error::invalid("measure quadrature needs at least 4 nodes"));
        }
        let v = self.symbol()?;
        if v.dim() != self.omega.len() {
            return Err(Error::invalid(format!("V has d = {} but omega has {} entries", v.dim(), self.omega.len())));
        }
        self.frequency()?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical serialization, with the symbol inlined and
    /// the output directory dropped so the hash depends only on the experiment.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = None;
        if let Ok(v) = self.symbol() {
            canonical.v = SymbolSource::Inline(SymbolFile::from_symbol(&v));
        }
        let bytes = serde_json::to_vec(&canonical).expect("scenario serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// First 16 hex digits of [`Scenario::hash`], used as the run directory name.
    pub fn short_hash(&self) -> String {
        self.hash()[..16].to_string()
    }

    pub fn symbol(&self) -> Result<TorusSymbol<f64>> {
        let v = match &self.v {
            SymbolSource::Inline(f) => f.to_symbol()?,
            SymbolSource::Path(p) => TorusSymbol::load(p)?,
        };
        Ok(v.with_truncation(Truncation { k_max: self.truncations.k_max, m_max: self.truncations.m_max, ..Default::default() }))
    }

    pub fn frequency(&self) -> Result<FrequencyVector<f64>> {
        FrequencyVector::new(self.omega.clone(), self.gamma)
    }

    pub fn series(&self, bracket: Bracket<f64>) -> Result<LindstedtSeries<f64>> {
        lindstedt_terms(&self.symbol()?, &self.frequency()?, bracket, self.orders)
    }

    pub fn residual_options(&self) -> ResidualOptions {
        ResidualOptions { steps: self.truncations.steps, scheme: Scheme::Magnus4, band: self.truncations.band }
    }

    /// Same experiment with a different perturbation.
    pub fn with_symbol(&self, v: &TorusSymbol<f64>) -> Self {
        Scenario { v: SymbolSource::Inline(SymbolFile::from_symbol(v)), ..self.clone() }
    }
}
