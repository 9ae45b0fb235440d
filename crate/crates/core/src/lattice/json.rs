use std::collections::HashSet;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::idx::{Idx, Mode};
use super::TorusSymbol;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// On-disk symbol: `{"d", "L", "real", "coeffs": [{"k", "m", "re", "im"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SymbolFile {
    pub d: usize,
    #[serde(rename = "L")]
    pub period: f64,
    pub real: bool,
    pub coeffs: Vec<CoeffEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoeffEntry {
    pub k: Vec<i32>,
    pub m: Vec<i32>,
    pub re: f64,
    pub im: f64,
}

impl SymbolFile {
    pub fn to_symbol<T: Real>(&self) -> Result<TorusSymbol<T>> {
        let mut seen = HashSet::new();
        let mut modes = Vec::with_capacity(self.coeffs.len());
        for e in &self.coeffs {
            if e.k.len() != self.d || e.m.len() != self.d {
                return Err(Error::Parse(format!(
                    "coefficient indices {:?}, {:?} do not have length d = {}",
                    e.k, e.m, self.d
                )));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient at k={:?} m={:?}", e.k, e.m)));
            }
            let mode = Mode::new(Idx::from_slice(&e.k), Idx::from_slice(&e.m));
            if !seen.insert(mode) {
                return Err(Error::Parse(format!("duplicate coefficient k={:?} m={:?}", e.k, e.m)));
            }
            modes.push((mode, Complex::new(T::c(e.re), T::c(e.im))));
        }
        let a = TorusSymbol::from_modes(self.d, T::c(self.period), modes)?;
        if self.real {
            let scale = a.iter().map(|(_, c)| c.norm()).fold(T::one(), T::max);
            if a.reality_defect() > T::c(1e-12) * scale {
                return Err(Error::Parse(
                    "symbol flagged real but c(-k,-m) != conj(c(k,m))".into(),
                ));
            }
        }
        Ok(a)
    }

    pub fn from_symbol<T: Real>(a: &TorusSymbol<T>) -> Self {
        let d = a.dim();
        let scale = a.iter().map(|(_, c)| c.norm()).fold(T::one(), T::max);
        SymbolFile {
            d,
            period: a.period().as_f64(),
            real: a.is_real(T::c(1e-14) * scale),
            coeffs: a
                .iter()
                .map(|(mode, c)| CoeffEntry {
                    k: mode.k.as_slice(d).to_vec(),
                    m: mode.m.as_slice(d).to_vec(),
                    re: c.re.as_f64(),
                    im: c.im.as_f64(),
                })
                .collect(),
            tail: (a.tail() > T::zero()).then(|| a.tail().as_f64()),
        }
    }
}

impl<T: Real> TorusSymbol<T> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SymbolFile = serde_json::from_str(s)?;
        file.to_symbol()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SymbolFile::from_symbol(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}
