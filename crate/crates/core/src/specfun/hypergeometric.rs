use super::gamma::{gamma, ln_gamma_pos};
use super::{is_nonpositive_integer, AccuracyBudget, SeriesSum};
use crate::error::{Error, Result};
use crate::quad::tanh_sinh_unit;

/// Number of terms after which a series with a non-positive integer
/// numerator parameter terminates, if any.
fn termination_order(num: &[f64]) -> Option<usize> {
    num.iter()
        .filter(|&&a| is_nonpositive_integer(a))
        .map(|&a| (-a) as usize)
        .min()
}

fn check_denominators(func: &'static str, num: &[f64], den: &[f64]) -> Result<()> {
    let stop = termination_order(num);
    for &b in den {
        if is_nonpositive_integer(b) {
            // A zero numerator factor that appears before the pole keeps the
            // polynomial finite.
            let pole = (-b) as usize;
            if !matches!(stop, Some(m) if m < pole) {
                return Err(Error::domain(
                    func,
                    format!("denominator parameter {b} is a non-positive integer"),
                ));
            }
        }
    }
    Ok(())
}

/// Sum `Σ_k Π(num)_k / Π(den)_k · x^k / k!`.
pub(crate) fn pfq_series(
    func: &'static str,
    num: &[f64],
    den: &[f64],
    x: f64,
    budget: &AccuracyBudget,
) -> Result<SeriesSum> {
    check_denominators(func, num, den)?;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut magnitude = 1.0f64;
    let mut small = 0;
    if x == 0.0 {
        return Ok(SeriesSum {
            value: 1.0,
            magnitude: 1.0,
        });
    }
    for k in 0..budget.max_terms() {
        let kf = k as f64;
        let mut ratio = x / (kf + 1.0);
        for &a in num {
            ratio *= a + kf;
        }
        for &b in den {
            ratio /= b + kf;
        }
        term *= ratio;
        if term == 0.0 {
            return Ok(SeriesSum {
                value: sum,
                magnitude,
            });
        }
        if !term.is_finite() {
            return Err(Error::Convergence {
                func,
                iterations: k + 1,
            });
        }
        sum += term;
        magnitude += term.abs();
        // Bound the remaining tail geometrically so slowly decaying series
        // (|x| close to 1) are not cut off early.
        let r = ratio.abs();
        let tail = if r < 1.0 {
            term.abs() / (1.0 - r)
        } else {
            f64::INFINITY
        };
        if tail < budget.rel_tol() * sum.abs() {
            small += 1;
            if small >= 3 {
                return Ok(SeriesSum {
                    value: sum,
                    magnitude,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        func,
        iterations: budget.max_terms(),
    })
}

/// Confluent hypergeometric function `₁F₁(a; b; x)`.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    kummer_1f1_with(a, b, x, &AccuracyBudget::default())
}

/// [`kummer_1f1`] with an explicit accuracy budget.
///
/// Negative arguments go through Kummer's transformation
/// `₁F₁(a;b;x) = eˣ ₁F₁(b−a;b;−x)`, which turns an alternating series into
/// one of positive terms.
pub fn kummer_1f1_with(a: f64, b: f64, x: f64, budget: &AccuracyBudget) -> Result<f64> {
    const FUNC: &str = "kummer_1f1";
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::domain(FUNC, "non-finite argument"));
    }
    check_denominators(FUNC, &[a], &[b])?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 && !is_nonpositive_integer(a) {
        let s = pfq_series(FUNC, &[b - a], &[b], -x, budget)?;
        return Ok(x.exp() * s.value);
    }
    Ok(pfq_series(FUNC, &[a], &[b], x, budget)?.value)
}

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for real `z ≤ 1`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    gauss_2f1_with(a, b, c, z, &AccuracyBudget::default())
}

/// [`gauss_2f1`] with an explicit accuracy budget.
pub fn gauss_2f1_with(a: f64, b: f64, c: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    const FUNC: &str = "gauss_2f1";
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain(FUNC, "non-finite argument"));
    }
    check_denominators(FUNC, &[a, b], &[c])?;
    if z == 0.0 {
        return Ok(1.0);
    }
    let terminating = termination_order(&[a, b]).is_some();
    if z > 1.0 && !terminating {
        return Err(Error::domain(
            FUNC,
            format!("z = {z} > 1 is on the branch cut"),
        ));
    }
    if z == 1.0 && !terminating {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(Error::Divergence(format!(
                "2F1({a}, {b}; {c}; 1) with c - a - b = {s} <= 0"
            )));
        }
        // Gauss summation theorem.
        let rg = |x: f64| {
            if is_nonpositive_integer(x) {
                Ok(0.0)
            } else {
                gamma(x).map(|g| 1.0 / g)
            }
        };
        return Ok(gamma(c)? * gamma(s)? * rg(c - a)? * rg(c - b)?);
    }
    if terminating || z >= -0.5 {
        return Ok(pfq_series(FUNC, &[a, b], &[c], z, budget)?.value);
    }

    // z < -0.5: Pfaff maps z to w = z/(z-1) in (1/3, 1).
    let w = z / (z - 1.0);
    let one_minus_z = 1.0 - z;
    let pfaff_a = |budget: &AccuracyBudget| -> Result<f64> {
        let s = pfq_series(FUNC, &[a, c - b], &[c], w, budget)?;
        Ok(one_minus_z.powf(-a) * s.value)
    };
    let pfaff_b = |budget: &AccuracyBudget| -> Result<f64> {
        let s = pfq_series(FUNC, &[c - a, b], &[c], w, budget)?;
        Ok(one_minus_z.powf(-b) * s.value)
    };
    if is_nonpositive_integer(c - b) {
        return pfaff_a(budget);
    }
    if is_nonpositive_integer(c - a) {
        return pfaff_b(budget);
    }
    if w <= 0.9 {
        return pfaff_a(budget);
    }
    // Integrate against whichever of a, b keeps both endpoint exponents
    // furthest from -1.
    let endpoint_margin = |p: f64| if c > p && p > 0.0 { p.min(c - p) } else { 0.0 };
    let (mb, ma) = (endpoint_margin(b), endpoint_margin(a));
    if mb > 0.0 && mb >= ma {
        if let Ok(v) = euler_integral(a, b, c, z, budget) {
            return Ok(v);
        }
    }
    if ma > 0.0 {
        if let Ok(v) = euler_integral(b, a, c, z, budget) {
            return Ok(v);
        }
    }
    // Slowly convergent but still convergent for w < 1.
    let wide = AccuracyBudget::new(budget.rel_tol(), budget.max_terms().max(200_000))?;
    pfaff_a(&wide)
}

/// `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt`, `c > b > 0`.
fn euler_integral(a: f64, b: f64, c: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    let log_coef = ln_gamma_pos(c) - ln_gamma_pos(b) - ln_gamma_pos(c - b);
    let f = |t: f64, tc: f64| {
        ((b - 1.0) * t.ln() + (c - b - 1.0) * tc.ln() - a * (-z * t).ln_1p() + log_coef).exp()
    };
    tanh_sinh_unit(f, budget.rel_tol().max(1e-14))
}

/// Generalised hypergeometric function `pFq(num; den; x)`.
pub fn generalized_pfq(num: &[f64], den: &[f64], x: f64) -> Result<f64> {
    generalized_pfq_with(num, den, x, &AccuracyBudget::default())
}

/// [`generalized_pfq`] with an explicit accuracy budget.
pub fn generalized_pfq_with(
    num: &[f64],
    den: &[f64],
    x: f64,
    budget: &AccuracyBudget,
) -> Result<f64> {
    const FUNC: &str = "generalized_pfq";
    if num.iter().chain(den).any(|v| !v.is_finite()) || !x.is_finite() {
        return Err(Error::domain(FUNC, "non-finite argument"));
    }
    if termination_order(num).is_none() {
        let (p, q) = (num.len(), den.len());
        if p > q + 1 {
            return Err(Error::domain(
                FUNC,
                format!("{p}F{q} series diverges for x != 0"),
            ));
        }
        if p == q + 1 && x.abs() >= 1.0 {
            return Err(Error::domain(
                FUNC,
                format!("|x| = {} >= 1 outside disc", x.abs()),
            ));
        }
    }
    Ok(pfq_series(FUNC, num, den, x, budget)?.value)
}
