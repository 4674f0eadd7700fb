//! Mean and variance of the combined channel amplitude `|A|` and its Gamma
//! approximation.
//!
//! `A = Σ_n Σ_l q_{n,l} g_{n,l} R_q^{−ϵ_n/2} R_{g_n}^{−ε_n/2} + u R_u^{−ϱ/2}`
//! with phases aligned, so every term is a non-negative magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{envelope_moment, KappaMuParams};
use crate::geometry::{ris_distance_moment, sat_distance_moment, Constellation, CylinderGeometry};
use crate::specfun::{ln_gamma_pos, reg_lower_inc_gamma};

/// One RIS: element count, fading on both hops and the path-loss exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisLink {
    pub elements: u32,
    /// Satellite-to-RIS fading (`q`).
    pub sat_ris: KappaMuParams,
    /// RIS-to-user fading (`g`).
    pub ris_user: KappaMuParams,
    /// Satellite-to-RIS exponent `ϵ_n`.
    pub eps_sat_ris: f64,
    /// RIS-to-user exponent `ε_n`.
    pub eps_ris_user: f64,
}

/// Satellite-to-user path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectLink {
    pub enabled: bool,
    pub fading: KappaMuParams,
    /// Exponent `ϱ`.
    pub exponent: f64,
}

impl DirectLink {
    pub fn disabled() -> Self {
        DirectLink {
            enabled: false,
            fading: KappaMuParams::rayleigh(),
            exponent: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub ris: Vec<RisLink>,
    pub direct: DirectLink,
}

impl LinkConfig {
    pub fn new(ris: Vec<RisLink>, direct: DirectLink) -> Result<Self> {
        let cfg = LinkConfig { ris, direct };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks element counts and the free-space floor on every exponent.
    pub fn validate(&self) -> Result<()> {
        for (n, r) in self.ris.iter().enumerate() {
            if r.elements == 0 {
                return Err(Error::Config(format!(
                    "RIS {n}: needs at least one element"
                )));
            }
            for (name, e) in [
                ("eps_sat_ris", r.eps_sat_ris),
                ("eps_ris_user", r.eps_ris_user),
            ] {
                if !(e >= 2.0) || !e.is_finite() {
                    return Err(Error::Config(format!("RIS {n}: {name} = {e} must be >= 2")));
                }
            }
        }
        if self.direct.enabled
            && (!(self.direct.exponent >= 2.0) || !self.direct.exponent.is_finite())
        {
            return Err(Error::Config(format!(
                "direct exponent {} must be >= 2",
                self.direct.exponent
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.ris.len()
    }
}

fn named<T>(what: impl FnOnce() -> String, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Divergence(msg) => Error::Divergence(format!("{}: {msg}", what())),
        other => other,
    })
}

/// First and second moments of one RIS's contribution.
struct RisTerm {
    mean: f64,
    second: f64,
}

fn ris_term(
    n: usize,
    r: &RisLink,
    geom: &CylinderGeometry,
    con: &Constellation,
    second: bool,
) -> Result<RisTerm> {
    let l = r.elements as f64;
    let mq = envelope_moment(1.0, &r.sat_ris)?;
    let mg = envelope_moment(1.0, &r.ris_user)?;
    let g1 = named(
        || format!("RIS {n} eps_ris_user = {}", r.eps_ris_user),
        ris_distance_moment(1, r.eps_ris_user, geom),
    )?;
    let s1 = sat_distance_moment(1, r.eps_sat_ris, con)?;
    let mean = l * mq * mg * g1 * s1;
    if !second {
        return Ok(RisTerm { mean, second: 0.0 });
    }
    let g2 = named(
        || format!("RIS {n} eps_ris_user = {} (second moment)", r.eps_ris_user),
        ris_distance_moment(2, r.eps_ris_user, geom),
    )?;
    let s2 = sat_distance_moment(2, r.eps_sat_ris, con)?;
    // E[(Σ_l q_l g_l)²] = L + (L² − L) m_q² m_g² for unit-power envelopes.
    let sum_sq = (l * l - l) * (mq * mg).powi(2) + l;
    Ok(RisTerm {
        mean,
        second: sum_sq * g2 * s2,
    })
}

fn direct_term(d: &DirectLink, con: &Constellation, second: bool) -> Result<RisTerm> {
    if !d.enabled {
        return Ok(RisTerm {
            mean: 0.0,
            second: 0.0,
        });
    }
    let mean = envelope_moment(1.0, &d.fading)? * sat_distance_moment(1, d.exponent, con)?;
    let second = if second {
        sat_distance_moment(2, d.exponent, con)?
    } else {
        0.0
    };
    Ok(RisTerm { mean, second })
}

/// `E[|A|]`.
pub fn mean_abs_a(cfg: &LinkConfig, geom: &CylinderGeometry, con: &Constellation) -> Result<f64> {
    let mut total = 0.0;
    for (n, r) in cfg.ris.iter().enumerate() {
        total += ris_term(n, r, geom, con, false)?.mean;
    }
    Ok(total + direct_term(&cfg.direct, con, false)?.mean)
}

/// `Var[|A|]`, summing per-RIS and direct-path variances as independent terms.
pub fn var_abs_a(cfg: &LinkConfig, geom: &CylinderGeometry, con: &Constellation) -> Result<f64> {
    Ok(moments_abs_a(cfg, geom, con)?.1)
}

/// `(E[|A|], Var[|A|])`.
pub fn moments_abs_a(
    cfg: &LinkConfig,
    geom: &CylinderGeometry,
    con: &Constellation,
) -> Result<(f64, f64)> {
    let mut mean = 0.0;
    let mut var = 0.0;
    for (n, r) in cfg.ris.iter().enumerate() {
        let t = ris_term(n, r, geom, con, true)?;
        mean += t.mean;
        var += t.second - t.mean * t.mean;
    }
    let d = direct_term(&cfg.direct, con, true)?;
    mean += d.mean;
    var += d.second - d.mean * d.mean;
    Ok((mean, var))
}

/// Gamma law fitted to the first two moments of `|A|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaApprox {
    alpha: f64,
    beta: f64,
}

impl GammaApprox {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Computation(format!(
                "Gamma parameters must be positive and finite (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(GammaApprox { alpha, beta })
    }

    /// Moment matching: `α = E²/Var`, `β = Var/E`.
    pub fn from_moments(mean: f64, var: f64) -> Result<Self> {
        if !(mean > 0.0) {
            return Err(Error::Computation(format!(
                "mean of |A| is {mean}; no signal path is active"
            )));
        }
        if !(var > 0.0) {
            return Err(Error::Computation(format!(
                "variance of |A| is {var} (mean {mean}); second moment lost to cancellation"
            )));
        }
        Self::new(mean * mean / var, var / mean)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.beta
    }

    pub fn variance(&self) -> f64 {
        self.alpha * self.beta * self.beta
    }
}

pub fn gamma_approx(
    cfg: &LinkConfig,
    geom: &CylinderGeometry,
    con: &Constellation,
) -> Result<GammaApprox> {
    let (mean, var) = moments_abs_a(cfg, geom, con)?;
    GammaApprox::from_moments(mean, var)
}

/// Gamma density of `|A|`.
pub fn abs_a_pdf(x: f64, ga: &GammaApprox) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let (a, b) = (ga.alpha, ga.beta);
    if x == 0.0 {
        return if a < 1.0 {
            f64::INFINITY
        } else if a == 1.0 {
            1.0 / b
        } else {
            0.0
        };
    }
    let u = x / b;
    ((a - 1.0) * u.ln() - u - ln_gamma_pos(a)).exp() / b
}

/// Gamma distribution function of `|A|`.
pub fn abs_a_cdf(x: f64, ga: &GammaApprox) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    reg_lower_inc_gamma(ga.alpha, x / ga.beta)
}

/// Density of the received SNR `ρ = ρ0 |A|²`.
pub fn snr_pdf(x: f64, ga: &GammaApprox, rho0: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 && ga.alpha < 2.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let (a, b) = (ga.alpha, ga.beta);
    // (1 / (2 β^α Γ(α))) ρ0^{−α/2} x^{(α−2)/2} exp(−√(x/ρ0)/β)
    let ln = -(2.0f64.ln()) - a * b.ln() - ln_gamma_pos(a) - 0.5 * a * rho0.ln()
        + 0.5 * (a - 2.0) * x.ln()
        - (x / rho0).sqrt() / b;
    ln.exp()
}
