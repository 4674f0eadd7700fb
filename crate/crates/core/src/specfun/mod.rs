//! Special functions used by the distance moments, fading moments and the
//! closed-form coverage and capacity expressions.
//!
//! Everything is real-valued double precision. Series are truncated once
//! three consecutive terms fall below `rel_tol` times the running sum.

mod expint;
mod gamma;
mod hypergeometric;

pub use expint::{exp_integral_nu, exp_integral_nu_scaled};
pub use gamma::{
    cos_pi, digamma, gamma, ln_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma, sin_pi,
    upper_inc_gamma, upper_inc_gamma_scaled,
};
pub use hypergeometric::{
    gauss_2f1, gauss_2f1_with, generalized_pfq, generalized_pfq_with, kummer_1f1, kummer_1f1_with,
};

pub(crate) use gamma::ln_gamma_pos;
pub(crate) use hypergeometric::pfq_series;

use crate::error::{Error, Result};

/// Tolerance and term cap for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBudget {
    rel_tol: f64,
    max_terms: usize,
}

impl AccuracyBudget {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::domain("AccuracyBudget", "rel_tol must be > 0"));
        }
        if max_terms == 0 {
            return Err(Error::domain("AccuracyBudget", "max_terms must be >= 1"));
        }
        Ok(AccuracyBudget { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        AccuracyBudget {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

/// Result of a summed series together with the sum of absolute terms, whose
/// ratio to `|value|` bounds the cancellation loss.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub value: f64,
    pub magnitude: f64,
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
