//! Reference implementations used only by the tests.
//!
//! Nothing here calls into the library's special functions or integrators:
//! series are summed in double-double arithmetic and integrals use a
//! separately written adaptive Gauss-Legendre rule. The scenario helpers at
//! the end only build library configuration types.

#![allow(dead_code)]

use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// double-double arithmetic

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::new(-q2)));
        let q3 = r.hi / o.hi;
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(q3))
    }

    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

/// `pFq(num; den; x)` summed term by term in double-double until the
/// terms are 1e-25 of the running sum.
pub fn pfq_dd(num: &[f64], den: &[f64], x: f64) -> f64 {
    let mut term = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    let xd = Dd::new(x);
    for k in 0..200_000 {
        let kf = k as f64;
        let mut ratio = xd.div(Dd::new(kf + 1.0));
        for &a in num {
            ratio = ratio.mul(Dd::new(a).add(Dd::new(kf)));
        }
        for &b in den {
            ratio = ratio.div(Dd::new(b).add(Dd::new(kf)));
        }
        term = term.mul(ratio);
        sum = sum.add(term);
        if term.hi == 0.0 || (k > 10 && term.abs() < 1e-25 * sum.abs()) {
            return sum.to_f64();
        }
    }
    panic!("oracle series did not converge");
}

// ---------------------------------------------------------------------------
// adaptive Gauss-Legendre

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub struct Oracle {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Oracle {
    pub fn new() -> Self {
        let (x, w) = gauss_legendre(20);
        Oracle { x, w }
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.x
            .iter()
            .zip(&self.w)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    fn recurse<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = self.panel(f, a, m);
        let right = self.panel(f, m, b);
        let both = left + right;
        if depth == 0 || !both.is_finite() || (both - whole).abs() <= tol.max(1e-13 * both.abs()) {
            return both;
        }
        self.recurse(f, a, m, left, 0.5 * tol, depth - 1)
            + self.recurse(f, m, b, right, 0.5 * tol, depth - 1)
    }

    /// `∫_a^b f` to absolute tolerance `tol`, floored at 1e-13 of a
    /// coarse estimate of the integral.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, tol: f64) -> f64 {
        self.integrate_pts(f, &[a, b], tol)
    }

    /// Sum of integrals over consecutive breakpoints.
    pub fn integrate_pts<F: Fn(f64) -> f64>(&self, f: F, pts: &[f64], tol: f64) -> f64 {
        let wholes: Vec<f64> = pts
            .windows(2)
            .map(|w| {
                if w[1] > w[0] {
                    self.panel(&f, w[0], w[1])
                } else {
                    0.0
                }
            })
            .collect();
        let coarse: f64 = wholes.iter().map(|v| v.abs()).sum();
        let tol = tol.max(1e-13 * coarse) / wholes.len().max(1) as f64;
        pts.windows(2)
            .zip(wholes)
            .map(|(w, whole)| {
                if w[1] > w[0] {
                    self.recurse(&f, w[0], w[1], whole, tol, 40)
                } else {
                    0.0
                }
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// special-function oracles

/// `ln Γ(x)`, `x > 0`, from Stirling's series after shifting the argument
/// above 40.
pub fn ln_gamma_ref(x: f64) -> f64 {
    let mut shift = Dd::new(1.0);
    let mut z = x;
    // Accumulate the product x(x+1)... in double-double, rescaling to keep
    // it finite.
    let mut log_acc = 0.0;
    while z < 40.0 {
        shift = shift.mul(Dd::new(z));
        if shift.hi > 1e200 {
            log_acc += shift.hi.ln() + (shift.lo / shift.hi).ln_1p();
            shift = Dd::new(1.0);
        }
        z += 1.0;
    }
    log_acc += shift.hi.ln() + (shift.lo / shift.hi).ln_1p();
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - log_acc
}

/// Regularised lower incomplete gamma by quadrature; `t = u^{1/a}` removes
/// the endpoint singularity when `a < 1`.
pub fn reg_lower_ref(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let o = Oracle::new();
    let scale = (a * x.ln()).min(ln_gamma_ref(a + 1.0)).exp();
    let i = if a < 1.0 {
        let top = x.powf(a);
        let pts: Vec<f64> = (0..=8).map(|k| top * k as f64 / 8.0).collect();
        o.integrate_pts(|u: f64| (-(u.powf(1.0 / a))).exp(), &pts, 1e-16 * scale) / a
    } else {
        let f = |t: f64| {
            if t == 0.0 {
                return if a == 1.0 { 1.0 } else { 0.0 };
            }
            ((a - 1.0) * t.ln() - t).exp()
        };
        let mut pts = vec![0.0];
        let mode = (a - 1.0).max(0.5);
        for m in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
            if mode * m < x {
                pts.push(mode * m);
            }
        }
        pts.push(x);
        o.integrate_pts(f, &pts, 1e-16 * scale)
    };
    (i.ln() - ln_gamma_ref(a)).exp()
}

/// `E_ν(x)` by quadrature of `e^{−x}/x ∫₀^∞ e^{−s}(1+s/x)^{−ν} ds`.
pub fn expint_ref(nu: f64, x: f64) -> f64 {
    let o = Oracle::new();
    let f = |s: f64| (-s - nu * (s / x).ln_1p()).exp();
    let mut pts = vec![0.0];
    let mut p = (x / 8.0).min(0.5);
    while p < 60.0 {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(60.0);
    let v = o.integrate_pts(f, &pts, 1e-17);
    v * (-x).exp() / x
}

/// Digamma from Binet's integral.
pub fn digamma_ref(x: f64) -> f64 {
    let o = Oracle::new();
    // Shift up so the ln-term dominates and the integral is small.
    let mut z = x;
    let mut acc = 0.0;
    while z < 6.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let f = |t: f64| {
        if t == 0.0 {
            return 1.0 / (2.0 * PI * z * z);
        }
        t / ((t * t + z * z) * (2.0 * PI * t).exp_m1())
    };
    let i = o.integrate_pts(f, &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0], 1e-18);
    acc + z.ln() - 0.5 / z - 2.0 * i
}

/// `₂F₁(a,b;c;z)` for `z < 0` from the Euler integral, `c > b > 0`.
pub fn gauss_2f1_euler_ref(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let o = Oracle::new();
    // t = s^{1/b} and 1 − t = r^{1/(c−b)} remove the endpoint singularities;
    // split at t = 1/2.
    let lc = ln_gamma_ref(c) - ln_gamma_ref(b) - ln_gamma_ref(c - b);
    let lower = |s: f64| {
        let t = s.powf(1.0 / b);
        ((c - b - 1.0) * (-t).ln_1p() - a * (-z * t).ln_1p()).exp() / b
    };
    let upper = |r: f64| {
        let tc = r.powf(1.0 / (c - b));
        let t = 1.0 - tc;
        ((b - 1.0) * t.ln() - a * (-z * t).ln_1p()).exp() / (c - b)
    };
    let s_top = 0.5f64.powf(b);
    let r_top = 0.5f64.powf(c - b);
    let i = o.integrate(lower, 0.0, s_top, 1e-17) + o.integrate(upper, 0.0, r_top, 1e-17);
    i * lc.exp()
}

/// Modified Bessel `I0` by its power series in double-double.
pub fn bessel_i0_ref(x: f64) -> f64 {
    pfq_dd(&[], &[1.0], x * x / 4.0)
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        return got.abs();
    }
    ((got - want) / want).abs()
}

// ---------------------------------------------------------------------------
// distance-law oracles

/// RIS-user distance density from the sphere-cylinder intersection: the
/// slice of the sphere of radius `r` inside the cylinder spans heights
/// `[√(r²−R0²)⁺, min(r, H)]`.
pub fn ris_pdf_ref(r: f64, r0: f64, h: f64, c: f64) -> f64 {
    if h == 0.0 {
        return if r >= c && r <= r0 {
            2.0 * r / (r0 * r0 - c * c)
        } else {
            0.0
        };
    }
    let lo2 = (r - r0) * (r + r0);
    let lo = lo2.max(0.0).sqrt();
    let hi = r.min(h);
    if hi <= lo {
        return 0.0;
    }
    // hi − lo as (hi² − lo²)/(hi + lo) to avoid cancellation.
    let span = if lo2 > 0.0 {
        ((hi - r) * (hi + r) + r0 * r0) / (hi + lo)
    } else {
        hi
    };
    2.0 * r * span / (r0 * r0 * h)
}

/// `E[R^{-p}]` of the RIS-user distance by quadrature of [`ris_pdf_ref`].
pub fn ris_moment_ref(p: f64, r0: f64, h: f64, c: f64) -> f64 {
    let o = Oracle::new();
    let top = (r0 * r0 + h * h).sqrt();
    let f = |r: f64| r.powf(-p) * ris_pdf_ref(r, r0, h, c);
    if h == 0.0 && c > 0.0 {
        return o.integrate_pts(f, &[c, 0.5 * (c + r0), r0], 1e-300);
    }
    // Near the origin the density is a power of r; substitute so that the
    // integrable singularity becomes a smooth integrand.
    let a = if h == 0.0 { r0 } else { h.min(r0) };
    let k = if h == 0.0 { 2.0 - p } else { 3.0 - p };
    let near = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        // Below min(H, R0) the density is exactly proportional to `lead`,
        // so the ratio may be taken at any small radius once r underflows.
        let r = (a * u.powf(1.0 / k)).max(1e-9 * a);
        let lead = if h == 0.0 { r } else { r * r };
        ris_pdf_ref(r, r0, h, c) / lead * a.powf(k) / k
    };
    let mut total = o.integrate_pts(near, &[0.0, 0.5, 1.0], 1e-300);
    let mut pts = vec![a];
    for x in [h, r0, top] {
        if x > a && !pts.contains(&x) {
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    let mut fine = vec![pts[0]];
    for w in pts.windows(2) {
        for k in 1..=4 {
            fine.push(w[0] + (w[1] - w[0]) * k as f64 / 4.0);
        }
    }
    total += o.integrate_pts(f, &fine, 1e-300);
    total
}

/// Nearest-satellite density from the void probability of the point
/// process over the visible cap: `P(R > x) = exp(−M (x² − r_min²)/(4 r_e r_s))`.
pub fn sat_pdf_ref(x: f64, m: f64, r_min: f64, r_e: f64) -> f64 {
    let rs = r_e + r_min;
    if x < r_min || x > 2.0 * r_e + r_min {
        return 0.0;
    }
    let k = m / (4.0 * r_e * rs);
    2.0 * k * x * (-k * (x * x - r_min * r_min)).exp()
}

/// Exact distribution of the nearest of `M` uniform points on the sphere.
pub fn sat_cdf_exact_ref(x: f64, m: f64, r_min: f64, r_e: f64) -> f64 {
    let rs = r_e + r_min;
    if x <= r_min {
        return 0.0;
    }
    let q = ((x * x - r_min * r_min) / (4.0 * r_e * rs)).min(1.0);
    1.0 - (m * (-q).ln_1p()).exp()
}

/// `E[R^{-p}]` of the nearest-satellite distance against [`sat_pdf_ref`].
pub fn sat_moment_ref(p: f64, m: f64, r_min: f64, r_e: f64) -> f64 {
    let o = Oracle::new();
    let rs = r_e + r_min;
    let k = m / (4.0 * r_e * rs);
    let top = 2.0 * r_e + r_min;
    let mut pts = vec![r_min];
    for mult in [
        0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0,
    ] {
        let x = (r_min * r_min + mult / k).sqrt();
        if x < top {
            pts.push(x);
        }
    }
    pts.push(top);
    o.integrate_pts(|x| x.powf(-p) * sat_pdf_ref(x, m, r_min, r_e), &pts, 1e-300)
}

// ---------------------------------------------------------------------------
// fading oracles

/// Modified Bessel `I_ν(z)` from `(z/2)^ν/Γ(ν+1) ₀F₁(;ν+1;z²/4)`.
pub fn bessel_i_ref(nu: f64, z: f64) -> f64 {
    let lead = nu * (0.5 * z).ln() - ln_gamma_ref(nu + 1.0);
    lead.exp() * pfq_dd(&[], &[nu + 1.0], z * z / 4.0)
}

/// Unit-power κ-μ envelope density in its Bessel form.
pub fn kappa_mu_pdf_ref(x: f64, kappa: f64, mu: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let c = mu * (1.0 + kappa);
    if kappa == 0.0 {
        // Nakagami-m with m = μ
        let l =
            (2.0f64).ln() + mu * c.ln() + (2.0 * mu - 1.0) * x.ln() - c * x * x - ln_gamma_ref(mu);
        return l.exp();
    }
    let z = 2.0 * mu * (kappa * (1.0 + kappa)).sqrt() * x;
    let l = (2.0 * mu).ln() + 0.5 * (mu + 1.0) * (1.0 + kappa).ln()
        - 0.5 * (mu - 1.0) * kappa.ln()
        - mu * kappa
        + mu * x.ln()
        - c * x * x;
    l.exp() * bessel_i_ref(mu - 1.0, z)
}

// ---------------------------------------------------------------------------
// capacity oracle

/// `E[log₂(1 + ρ0 |A|²)]` for `|A| ~ Gamma(α, β)` by quadrature in `u = |A|/β`.
pub fn capacity_ref(alpha: f64, beta: f64, rho0: f64) -> f64 {
    let o = Oracle::new();
    let k = rho0 * beta * beta;
    let lg = ln_gamma_ref(alpha);
    let u_max = alpha + 20.0 * alpha.sqrt() + 60.0;
    let knee = 1.0 / k.sqrt();
    let mut pts = vec![0.0, u_max];
    for p in [knee / 16.0, knee / 4.0, knee, 4.0 * knee, 16.0 * knee] {
        if p < u_max {
            pts.push(p);
        }
    }
    for m in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let p = m * alpha;
        if p < u_max {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let nats = if alpha < 1.0 {
        // u = s^{1/α} makes u^{α−1} du = ds/α.
        let tops: Vec<f64> = pts.iter().map(|u| u.powf(alpha)).collect();
        o.integrate_pts(
            |s: f64| {
                let u = s.powf(1.0 / alpha);
                (k * u * u).ln_1p() * (-u - lg).exp() / alpha
            },
            &tops,
            1e-300,
        )
    } else {
        o.integrate_pts(
            |u: f64| {
                if u == 0.0 {
                    return 0.0;
                }
                (k * u * u).ln_1p() * ((alpha - 1.0) * u.ln() - u - lg).exp()
            },
            &pts,
            1e-300,
        )
    };
    nats / std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// scenario scaffolding

use satris::channel::{DirectLink, LinkConfig, RisLink};
use satris::fading::KappaMuParams;
use satris::geometry::{Constellation, CylinderGeometry};

/// Link with the default hop fading (q: κ=1, μ=2; g: κ=3, μ=3), ϵ = 2 and
/// the given RIS-user exponents, plus an optional Rayleigh direct path.
pub fn default_link(elements: u32, eps_ris_user: &[f64], direct: bool) -> LinkConfig {
    let ris = eps_ris_user
        .iter()
        .map(|&e| RisLink {
            elements,
            sat_ris: KappaMuParams::new(1.0, 2.0).unwrap(),
            ris_user: KappaMuParams::new(3.0, 3.0).unwrap(),
            eps_sat_ris: 2.0,
            eps_ris_user: e,
        })
        .collect();
    let direct = if direct {
        DirectLink {
            enabled: true,
            fading: KappaMuParams::rayleigh(),
            exponent: 2.0,
        }
    } else {
        DirectLink::disabled()
    };
    LinkConfig::new(ris, direct).unwrap()
}

pub fn default_geometry() -> (CylinderGeometry, Constellation) {
    (
        CylinderGeometry::new(150.0, 50.0).unwrap(),
        Constellation::new(1000, 1.0e6).unwrap(),
    )
}
