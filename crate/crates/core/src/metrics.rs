//! Coverage probability and ergodic capacity under the Gamma model of `|A|`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::channel::GammaApprox;
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::specfun::{
    cos_pi, digamma, ln_gamma_pos, pfq_series, reg_upper_inc_gamma, sin_pi, AccuracyBudget,
};

/// Threshold and transmit SNR, both linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageQuery {
    rho_th: f64,
    rho0: f64,
}

impl CoverageQuery {
    pub fn new(rho_th: f64, rho0: f64) -> Result<Self> {
        if !(rho_th >= 0.0) {
            return Err(Error::Config(format!("rho_th = {rho_th} must be >= 0")));
        }
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::Config(format!("rho0 = {rho0} must be > 0")));
        }
        Ok(CoverageQuery { rho_th, rho0 })
    }

    pub fn rho_th(&self) -> f64 {
        self.rho_th
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }
}

/// `P(ρ > ρ_th) = Q(α, √(ρ_th/ρ0)/β)`.
pub fn coverage_probability(q: &CoverageQuery, ga: &GammaApprox) -> Result<f64> {
    if q.rho_th == 0.0 {
        return Ok(1.0);
    }
    if q.rho_th.is_infinite() {
        return Ok(0.0);
    }
    let x = (q.rho_th / q.rho0).sqrt() / ga.beta();
    reg_upper_inc_gamma(ga.alpha(), x)
}

/// How an ergodic-capacity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapacityMethod {
    ClosedForm,
    /// `α` was within the pole guard of an integer; the closed form was
    /// interpolated between the two sides.
    PoleInterpolated,
    /// The closed form was ill-conditioned or disagreed with quadrature.
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    /// bits/s/Hz
    pub bits: f64,
    pub method: CapacityMethod,
}

/// Raw closed-form evaluation with its rounding-error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCapacity {
    pub bits: f64,
    /// Estimated relative error from cancellation among the series terms.
    pub rel_error: f64,
}

/// Distance from the pole set within which interpolation is used.
pub const POLE_GUARD: f64 = 1e-4;
const CROSS_CHECK_TOL: f64 = 1e-3;
const MAX_CLOSED_FORM_ERROR: f64 = 1e-6;

/// Closed-form ergodic capacity, evaluated as written.
///
/// With `a = 1/(β²ρ0)`, the capacity in nats is
/// `T1 + T2 + T3` where
///
/// - `T1 = π a^{α/2} csc(πα/2) ₁F₂(α/2; 1/2, 1+α/2; −a/4) / (α Γ(α))`
/// - `T2 = a ₂F₃(1, 1; 2, 3/2−α/2, 2−α/2; −a/4) / ((α−1)(α−2))`
/// - `T3 = 2ψ(α) − ln a − π a^{(1+α)/2} sec(πα/2) ₁F₂(1/2+α/2; 3/2, 3/2+α/2; −a/4) / ((1+α)Γ(α))`
///
/// The polynomial prefactor of the `Γ(α−2)/Γ(α)` term cancels exactly.
/// Fails with a domain error at positive integer `α`.
pub fn capacity_closed_form(ga: &GammaApprox, rho0: f64) -> Result<ClosedFormCapacity> {
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::domain(
            "ergodic_capacity",
            format!("rho0 = {rho0} must be > 0"),
        ));
    }
    let alpha = ga.alpha();
    if alpha == alpha.round() {
        return Err(Error::domain(
            "ergodic_capacity",
            format!("alpha = {alpha} is a pole of the closed form"),
        ));
    }
    let beta = ga.beta();
    let ln_a = -(2.0 * beta.ln() + rho0.ln());
    let x = -0.25 * ln_a.exp();
    let budget = AccuracyBudget::default();
    let lg = ln_gamma_pos(alpha);

    let f1 = pfq_series(
        "ergodic_capacity",
        &[alpha / 2.0],
        &[0.5, 1.0 + alpha / 2.0],
        x,
        &budget,
    )?;
    let c1 = PI / alpha * (0.5 * alpha * ln_a - lg).exp() / sin_pi(alpha / 2.0);
    let t1 = c1 * f1.value;

    let f2 = pfq_series(
        "ergodic_capacity",
        &[1.0, 1.0],
        &[2.0, 1.5 - alpha / 2.0, 2.0 - alpha / 2.0],
        x,
        &budget,
    )?;
    let c2 = ln_a.exp() / ((alpha - 1.0) * (alpha - 2.0));
    let t2 = c2 * f2.value;

    let f3 = pfq_series(
        "ergodic_capacity",
        &[0.5 + alpha / 2.0],
        &[1.5, 1.5 + alpha / 2.0],
        x,
        &budget,
    )?;
    let c3 = PI / (1.0 + alpha) * (0.5 * (1.0 + alpha) * ln_a - lg).exp() / cos_pi(alpha / 2.0);
    let log_part = 2.0 * digamma(alpha)? - ln_a;
    let t3 = log_part - c3 * f3.value;

    let nats = t1 + t2 + t3;
    let scale = (c1 * f1.magnitude).abs()
        + (c2 * f2.magnitude).abs()
        + (c3 * f3.magnitude).abs()
        + log_part.abs()
        + (c1 * f1.value).abs()
        + (c3 * f3.value).abs();
    // A few ulp per term plus the digits lost to summation.
    let rel_error = 16.0 * f64::EPSILON * scale / nats.abs().max(f64::MIN_POSITIVE);
    Ok(ClosedFormCapacity {
        bits: nats / LN_2,
        rel_error,
    })
}

/// Ergodic capacity `E[log₂(1+ρ)]` from the closed form, with pole
/// interpolation and a quadrature fallback.
pub fn ergodic_capacity(ga: &GammaApprox, rho0: f64) -> Result<Capacity> {
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::domain(
            "ergodic_capacity",
            format!("rho0 = {rho0} must be > 0"),
        ));
    }
    let alpha = ga.alpha();
    let nearest = alpha.round();
    let fallback = || -> Result<Capacity> {
        Ok(Capacity {
            bits: capacity_quadrature(ga, rho0)?,
            method: CapacityMethod::QuadratureFallback,
        })
    };
    let near_pole = nearest >= 1.0 && (alpha - nearest).abs() < POLE_GUARD;
    if !near_pole {
        return match capacity_closed_form(ga, rho0) {
            Ok(cf) if cf.rel_error < MAX_CLOSED_FORM_ERROR && cf.bits.is_finite() => Ok(Capacity {
                bits: cf.bits.max(0.0),
                method: CapacityMethod::ClosedForm,
            }),
            _ => fallback(),
        };
    }
    let side = |a: f64| -> Result<ClosedFormCapacity> {
        capacity_closed_form(&GammaApprox::new(a, ga.beta())?, rho0)
    };
    let (lo_a, hi_a) = (nearest - POLE_GUARD, nearest + POLE_GUARD);
    let (lo, hi) = match (side(lo_a), side(hi_a)) {
        (Ok(lo), Ok(hi)) if lo.rel_error.max(hi.rel_error) < MAX_CLOSED_FORM_ERROR => (lo, hi),
        _ => return fallback(),
    };
    let w = (alpha - lo_a) / (hi_a - lo_a);
    let bits = lo.bits + w * (hi.bits - lo.bits);
    let reference = capacity_quadrature(ga, rho0)?;
    if !bits.is_finite() || (bits - reference).abs() > CROSS_CHECK_TOL * reference.abs() {
        return Ok(Capacity {
            bits: reference,
            method: CapacityMethod::QuadratureFallback,
        });
    }
    Ok(Capacity {
        bits: bits.max(0.0),
        method: CapacityMethod::PoleInterpolated,
    })
}

/// Ergodic capacity by adaptive quadrature of the definition.
///
/// With `|A| = β v²` the expectation becomes
/// `∫₀^∞ log₂(1 + v⁴/a) · 2 v^{2α−1} e^{−v²} / Γ(α) dv`, `a = 1/(β²ρ0)`,
/// which has a bounded integrand for `α ≥ 1/2`.
pub fn capacity_quadrature(ga: &GammaApprox, rho0: f64) -> Result<f64> {
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::domain(
            "capacity_quadrature",
            format!("rho0 = {rho0} must be > 0"),
        ));
    }
    let alpha = ga.alpha();
    let ln_a = -(2.0 * ga.beta().ln() + rho0.ln());
    let lg = ln_gamma_pos(alpha);
    let f = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let ln_v = v.ln();
        let ln_ratio = 4.0 * ln_v - ln_a;
        let log_term = if ln_ratio > 36.0 {
            ln_ratio + (-ln_ratio).exp()
        } else {
            ln_ratio.exp().ln_1p()
        };
        log_term * (2.0f64.ln() + (2.0 * alpha - 1.0) * ln_v - v * v - lg).exp()
    };
    let sa = alpha.sqrt();
    let v_max = (alpha + 15.0 * sa + 60.0).sqrt();
    let knee = (0.25 * ln_a).exp();
    let mut pts = vec![0.0, v_max];
    for p in [0.25 * knee, knee, 4.0 * knee] {
        if p > 0.0 && p < v_max {
            pts.push(p);
        }
    }
    let centre = (alpha - 0.5).max(0.0).sqrt();
    for k in [-3.0, -1.5, 0.0, 1.5, 3.0] {
        let p = centre + 0.5 * k;
        if p > 0.0 && p < v_max {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let tol = Tolerance {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let nats = integrate_with_breaks(f, &pts, tol)
        .map_err(|e| Error::Computation(format!("capacity quadrature failed: {e}")))?;
    Ok(nats.value / LN_2)
}
