//! Unit-power κ-μ envelopes.
//!
//! The squared envelope is a scaled non-central chi-square with `2μ`
//! degrees of freedom, which is also a Poisson(κμ) mixture of Gamma laws.
//! The density, distribution function and sampler below are built on
//! that mixture.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{kummer_1f1, ln_gamma_pos, reg_lower_inc_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaMuParams {
    kappa: f64,
    mu: f64,
}

impl KappaMuParams {
    pub fn new(kappa: f64, mu: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Config(format!("kappa = {kappa} must be >= 0")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Config(format!("mu = {mu} must be > 0")));
        }
        Ok(KappaMuParams { kappa, mu })
    }

    pub fn rayleigh() -> Self {
        KappaMuParams {
            kappa: 0.0,
            mu: 1.0,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `μ(1+κ)`, the inverse scale of the squared envelope components.
    fn rate(&self) -> f64 {
        self.mu * (1.0 + self.kappa)
    }
}

/// `E[R^t]` of the unit-power envelope.
pub fn envelope_moment(t: f64, p: &KappaMuParams) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(
            "envelope_moment",
            format!("t = {t} must be > 0"),
        ));
    }
    let (k, m) = (p.kappa, p.mu);
    let log_pref = ln_gamma_pos(m + t / 2.0) - ln_gamma_pos(m) - k * m - (t / 2.0) * p.rate().ln();
    Ok(log_pref.exp() * kummer_1f1(m + t / 2.0, m, k * m)?)
}

/// Iterate the Poisson(κμ) mixture weights in log form, calling `f(k, ln w_k)`
/// until the remaining weight is negligible. `f` returns the term it adds.
fn poisson_mixture<F: FnMut(f64, f64) -> Result<f64>>(lambda: f64, mut f: F) -> Result<f64> {
    if lambda == 0.0 {
        return f(0.0, 0.0);
    }
    let ln_lambda = lambda.ln();
    let mut sum = 0.0;
    let mut k = 0.0f64;
    loop {
        let ln_w = -lambda + k * ln_lambda - ln_gamma_pos(k + 1.0);
        let term = f(k, ln_w)?;
        sum += term;
        // Past the Poisson mode the weights fall geometrically.
        if k > lambda && ln_w < -40.0 && term <= 1e-17 * sum {
            return Ok(sum);
        }
        k += 1.0;
        if k > 100_000.0 {
            return Err(Error::Convergence {
                func: "kappa_mu_mixture",
                iterations: 100_000,
            });
        }
    }
}

/// Envelope density.
pub fn envelope_pdf(x: f64, p: &KappaMuParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(
            "envelope_pdf",
            format!("x = {x} must be >= 0"),
        ));
    }
    if x == 0.0 {
        return Ok(if p.mu < 0.5 {
            f64::INFINITY
        } else if p.mu == 0.5 {
            2.0 * (p.rate() / std::f64::consts::PI).sqrt() * (-p.kappa * p.mu).exp()
        } else {
            0.0
        });
    }
    let c = p.rate();
    let y = c * x * x;
    let (ln_y, ln_jac) = (y.ln(), (2.0 * c * x).ln());
    poisson_mixture(p.kappa * p.mu, |k, ln_w| {
        let a = p.mu + k;
        Ok((ln_w + ln_jac + (a - 1.0) * ln_y - y - ln_gamma_pos(a)).exp())
    })
}

/// Envelope distribution function.
pub fn envelope_cdf(x: f64, p: &KappaMuParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(
            "envelope_cdf",
            format!("x = {x} must be >= 0"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let y = p.rate() * x * x;
    let v = poisson_mixture(p.kappa * p.mu, |k, ln_w| {
        Ok(ln_w.exp() * reg_lower_inc_gamma(p.mu + k, y)?)
    })?;
    Ok(v.min(1.0))
}

/// Draws unit-power κ-μ envelopes.
///
/// With `2μ` a whole number the squared envelope is built from `2μ` real
/// Gaussians whose means carry the dominant power `κ/(1+κ)`. Other `μ`
/// use the Poisson-Gamma mixture, which is exact as well.
#[derive(Debug, Clone)]
pub struct EnvelopeSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    GaussianSum {
        components: usize,
        sigma: f64,
        offset: f64,
    },
    PoissonGamma {
        poisson: Option<Poisson<f64>>,
        mu: f64,
        scale: f64,
    },
}

impl EnvelopeSampler {
    pub fn new(p: &KappaMuParams) -> Self {
        let two_mu = 2.0 * p.mu;
        let kind = if two_mu == two_mu.round() && two_mu <= 64.0 {
            let components = two_mu as usize;
            let sigma = (1.0 / (two_mu * (1.0 + p.kappa))).sqrt();
            // Dominant power split evenly over the components.
            let offset = (p.kappa / (1.0 + p.kappa) / two_mu).sqrt();
            SamplerKind::GaussianSum {
                components,
                sigma,
                offset,
            }
        } else {
            let lambda = p.kappa * p.mu;
            SamplerKind::PoissonGamma {
                poisson: (lambda > 0.0).then(|| Poisson::new(lambda).expect("finite rate")),
                mu: p.mu,
                scale: 1.0 / p.rate(),
            }
        };
        EnvelopeSampler { kind }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::GaussianSum {
                components,
                sigma,
                offset,
            } => {
                let mut power = 0.0;
                for _ in 0..*components {
                    let z: f64 = rng.sample(StandardNormal);
                    let v = offset + sigma * z;
                    power += v * v;
                }
                power.sqrt()
            }
            SamplerKind::PoissonGamma { poisson, mu, scale } => {
                let k = poisson.as_ref().map_or(0.0, |d| d.sample(rng));
                let g = Gamma::new(mu + k, *scale).expect("positive shape");
                g.sample(rng).sqrt()
            }
        }
    }
}

/// One envelope draw. Prefer [`EnvelopeSampler`] in loops.
pub fn sample_envelope<R: Rng + ?Sized>(p: &KappaMuParams, rng: &mut R) -> f64 {
    EnvelopeSampler::new(p).sample(rng)
}
