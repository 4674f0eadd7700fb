use super::gamma::upper_inc_gamma_scaled;
use crate::error::{Error, Result};

/// Generalised exponential integral `E_ν(x) = ∫₁^∞ e^{−xt} t^{−ν} dt`.
pub fn exp_integral_nu(nu: f64, x: f64) -> Result<f64> {
    Ok(exp_integral_nu_scaled(nu, x)? * (-x).exp())
}

/// `eˣ E_ν(x)`, finite for arguments where `E_ν` itself underflows.
pub fn exp_integral_nu_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "exp_integral_nu",
            format!("x = {x} must be > 0"),
        ));
    }
    if !nu.is_finite() {
        return Err(Error::domain(
            "exp_integral_nu",
            format!("nu = {nu} must be finite"),
        ));
    }
    // E_ν(x) = x^{ν−1} Γ(1−ν, x)
    upper_inc_gamma_scaled(1.0 - nu, x)
}
