use crate::error::{Error, Result};
use crate::lattice::TorusSymbol;
use crate::scalar::Real;

use super::{moyal_commutator, op_norm, quantize};

/// `‖Op_ħ(a)‖ / ‖a‖_s` on the truncated basis; zero for the zero symbol.
pub fn check_calderon_vaillancourt(a: &TorusSymbol<f64>, hbar: f64, j_cut: i32, s: f64) -> Result<f64> {
    if !a.is_real(1e-12 * a.analytic_norm(0.0).max(1.0)) {
        return Err(Error::invalid("operator-norm check needs a real symbol"));
    }
    if a.is_zero() {
        return Ok(0.0);
    }
    let m = quantize(a, hbar, j_cut)?;
    Ok(op_norm(&m.entries) / a.analytic_norm(s))
}

/// `(‖[a,b]_ħ‖_{s−σ₁−σ₂}, 2/(e²σ₁(σ₁+σ₂)) ‖a‖_s ‖b‖_{s−σ₂})`.
pub fn check_commutator_loss<T: Real>(
    a: &TorusSymbol<T>,
    b: &TorusSymbol<T>,
    hbar: T,
    s: T,
    sigma1: T,
    sigma2: T,
) -> Result<(T, T)> {
    if !(sigma1 > T::zero() && sigma2 > T::zero() && sigma1 + sigma2 < s) {
        return Err(Error::invalid(format!(
            "need 0 < sigma1, sigma2 and sigma1 + sigma2 < s; got {sigma1}, {sigma2}, s = {s}"
        )));
    }
    let lhs = moyal_commutator(a, b, hbar)?.analytic_norm(s - sigma1 - sigma2);
    let e2 = T::E() * T::E();
    let rhs = T::c(2.0) / (e2 * sigma1 * (sigma1 + sigma2)) * a.analytic_norm(s) * b.analytic_norm(s - sigma2);
    Ok((lhs, rhs))
}
