use std::io::{Read, Write};
use std::path::Path;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::{AffineSymbol, Idx, TorusSymbol};
use crate::scalar::Real;

/// Eight-byte header of the binary matrix format.
///
/// Layout after the magic, all little-endian: `J: i64`, `d: i64`,
/// `hbar: f64`, `dim: u64`, then `dim²` pairs `(re, im): f64` in column-major order.
pub const BINARY_MAGIC: &[u8; 8] = b"WEYLMAT1";

/// Truncated Weyl operator on the modes `|j|_∞ ≤ J`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix<T: Real> {
    j_cut: i32,
    d: usize,
    hbar: T,
    pub entries: DMatrix<Complex<T>>,
    pub hermitian: bool,
    pub unitary: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn from_dense(j_cut: i32, d: usize, hbar: T, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let n = basis_size(j_cut, d);
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::invalid(format!("matrix is {}x{}, basis has {n} modes", entries.nrows(), entries.ncols())));
        }
        Ok(OperatorMatrix { j_cut, d, hbar, entries, hermitian: false, unitary: false, warnings: Vec::new() })
    }

    pub fn cutoff(&self) -> i32 {
        self.j_cut
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Basis modes in matrix order (first coordinate slowest).
    pub fn modes(&self) -> Vec<Idx> {
        basis_modes(self.j_cut, self.d)
    }

    pub fn index_of(&self, j: &Idx) -> Option<usize> {
        basis_index(self.j_cut, self.d, j)
    }

    /// Indices of the modes with `|j|_∞ ≤ J − band`.
    pub fn interior(&self, band: i32) -> Vec<usize> {
        let lim = self.j_cut - band;
        self.modes().iter().positions(|j| j.linf() <= lim).collect()
    }

    /// Submatrix on `idx × idx`.
    pub fn block(&self, idx: &[usize]) -> DMatrix<Complex<T>> {
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.entries[(idx[r], idx[c])])
    }

    /// `max |M − M*|`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.size();
        let mut worst = T::zero();
        for r in 0..n {
            for c in 0..=r {
                worst = worst.max((self.entries[(r, c)] - self.entries[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |M*M − I|`.
    pub fn unitary_defect(&self) -> T {
        let n = self.size();
        let mut worst = T::zero();
        for r in 0..n {
            for c in 0..n {
                let mut g = Complex::default();
                for i in 0..n {
                    g += self.entries[(i, r)].conj() * self.entries[(i, c)];
                }
                if r == c {
                    g -= Complex::new(T::one(), T::zero());
                }
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    /// Sets the unitary tag after checking `‖M*M − I‖_max ≤ 1e−10`.
    pub fn tag_unitary(&mut self) -> Result<()> {
        let defect = self.unitary_defect();
        if defect > T::c(1e-10) {
            return Err(Error::Numerical(format!("unitarity defect {defect}")));
        }
        self.unitary = true;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.size();
        let rows = |f: &dyn Fn(&Complex<T>) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|r| (0..n).map(|c| f(&self.entries[(r, c)])).collect()).collect()
        };
        json!({
            "J": self.j_cut,
            "d": self.d,
            "hbar": self.hbar.as_f64(),
            "re": rows(&|z| z.re.as_f64()),
            "im": rows(&|z| z.im.as_f64()),
        })
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.j_cut as i64).to_le_bytes())?;
        w.write_all(&(self.d as i64).to_le_bytes())?;
        w.write_all(&self.hbar.as_f64().to_le_bytes())?;
        w.write_all(&(self.size() as u64).to_le_bytes())?;
        for z in self.entries.iter() {
            w.write_all(&z.re.as_f64().to_le_bytes())?;
            w.write_all(&z.im.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Parse("missing WEYLMAT1 header".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
            r.read_exact(&mut word)?;
            Ok(word)
        };
        let j_cut = i64::from_le_bytes(next(&mut r)?) as i32;
        let d = i64::from_le_bytes(next(&mut r)?) as usize;
        let hbar = f64::from_le_bytes(next(&mut r)?);
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        if d == 0 || d > 3 || basis_size(j_cut, d) != n {
            return Err(Error::Parse(format!("inconsistent header J={j_cut} d={d} dim={n}")));
        }
        let mut vals = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            vals.push(Complex::new(T::c(re), T::c(im)));
        }
        Self::from_dense(j_cut, d, T::c(hbar), DMatrix::from_vec(n, n, vals))
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(f)
    }
}

fn basis_size(j_cut: i32, d: usize) -> usize {
    ((2 * j_cut + 1) as usize).pow(d as u32)
}

fn basis_modes(j_cut: i32, d: usize) -> Vec<Idx> {
    (0..d)
        .map(|_| -j_cut..=j_cut)
        .multi_cartesian_product()
        .map(|v| Idx::from_slice(&v))
        .collect()
}

fn basis_index(j_cut: i32, d: usize, j: &Idx) -> Option<usize> {
    if j.linf() > j_cut || j.0[d..].iter().any(|&x| x != 0) {
        return None;
    }
    let side = (2 * j_cut + 1) as usize;
    Some(j.0[..d].iter().fold(0, |acc, &x| acc * side + (x + j_cut) as usize))
}

/// Matrix of `Op_ħ(a)`: entry `(j, k) = â(j − k, ħ(j + k)/2)`.
pub fn quantize<T: Real>(a: &TorusSymbol<T>, hbar: T, j_cut: i32) -> Result<OperatorMatrix<T>> {
    if !(hbar > T::zero()) || hbar > T::one() {
        return Err(Error::invalid(format!("hbar = {hbar} outside (0, 1]")));
    }
    if j_cut < 1 {
        return Err(Error::invalid("cutoff J must be at least 1"));
    }
    let d = a.dim();
    let modes = basis_modes(j_cut, d);
    let n = modes.len();
    let mut m = DMatrix::from_element(n, n, Complex::default());
    let half = hbar / T::c(2.0);
    let coeffs: Vec<_> = a.iter().map(|(mode, c)| (mode.k, a.eta(&mode.m), *c)).collect();
    for (col, jc) in modes.iter().enumerate() {
        for (k, eta, c) in &coeffs {
            let jr = *jc + *k;
            let Some(row) = basis_index(j_cut, d, &jr) else { continue };
            let xi_dot: T = (0..d).fold(T::zero(), |acc, i| {
                acc + eta[i] * T::from_int((jr.0[i] + jc.0[i]) as i64)
            });
            m[(row, col)] += *c * Complex::from_polar(T::one(), half * xi_dot);
        }
    }
    let mut out = OperatorMatrix::from_dense(j_cut, d, hbar, m)?;
    if a.k_support() > 2 * j_cut {
        out.warnings.push(format!(
            "symbol x-support {} exceeds 2J = {}; aliased entries dropped",
            a.k_support(),
            2 * j_cut
        ));
    }
    let scale = a.iter().map(|(_, c)| c.norm()).fold(T::one(), T::max);
    if a.is_real(T::c(1e-14) * scale) {
        out.hermitian = out.hermitian_defect() <= T::c(1e-12) * scale;
    }
    Ok(out)
}

/// `Op_ħ(ω·ξ + p)`: the transport part is the exact diagonal `ħ ω·j`.
pub fn quantize_affine<T: Real>(a: &AffineSymbol<T>, hbar: T, j_cut: i32) -> Result<OperatorMatrix<T>> {
    let mut out = quantize(&a.periodic, hbar, j_cut)?;
    for (i, j) in out.modes().iter().enumerate() {
        out.entries[(i, i)] += Complex::new(hbar * a.omega.dot(j), T::zero());
    }
    Ok(out)
}
