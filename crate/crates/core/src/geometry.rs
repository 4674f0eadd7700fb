//! Distance laws for the two link types.
//!
//! RIS units sit uniformly inside a cylinder of radius `R0` and height `H`
//! centred on the user. Satellites form a homogeneous point process on the
//! orbit sphere of radius `r_e + r_min`, and the user is on the Earth's
//! surface.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{exp_integral_nu_scaled, gauss_2f1};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Cylindrical deployment region for the RISs, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderGeometry {
    r0: f64,
    h: f64,
    inner_radius: f64,
}

impl CylinderGeometry {
    pub fn new(r0: f64, h: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Config(format!(
                "R0 = {r0} must be a positive length"
            )));
        }
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::Config(format!(
                "H = {h} must be a non-negative length"
            )));
        }
        Ok(CylinderGeometry {
            r0,
            h,
            inner_radius: 0.0,
        })
    }

    /// Exclude a disk of radius `c` around the user. Only defined for the
    /// flat (`H = 0`) deployment.
    pub fn with_inner_radius(mut self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || c >= self.r0 {
            return Err(Error::Config(format!(
                "inner radius {c} must lie in [0, R0 = {})",
                self.r0
            )));
        }
        if c > 0.0 && self.h > 0.0 {
            return Err(Error::Config(
                "an inner radius is only supported for H = 0".into(),
            ));
        }
        self.inner_radius = c;
        Ok(self)
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Largest RIS-user distance, `√(R0² + H²)`.
    pub fn max_distance(&self) -> f64 {
        self.r0.hypot(self.h)
    }
}

/// Satellite constellation; lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    m: u32,
    r_min: f64,
    r_e: f64,
}

impl Constellation {
    pub fn new(m: u32, r_min: f64) -> Result<Self> {
        Self::with_earth_radius(m, r_min, EARTH_RADIUS_M)
    }

    pub fn with_earth_radius(m: u32, r_min: f64, r_e: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config(
                "constellation needs M >= 1 satellites".into(),
            ));
        }
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(Error::Config(format!("r_min = {r_min} must be positive")));
        }
        if !(r_e > 0.0) || !r_e.is_finite() {
            return Err(Error::Config(format!("r_e = {r_e} must be positive")));
        }
        Ok(Constellation { m, r_min, r_e })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_e(&self) -> f64 {
        self.r_e
    }

    pub fn orbit_radius(&self) -> f64 {
        self.r_e + self.r_min
    }

    /// Point-process intensity on the orbit sphere, satellites per m².
    pub fn intensity(&self) -> f64 {
        let rs = self.orbit_radius();
        self.m as f64 / (4.0 * PI * rs * rs)
    }

    /// Farthest point of the orbit sphere from the user, `2 r_e + r_min`.
    pub fn max_distance(&self) -> f64 {
        2.0 * self.r_e + self.r_min
    }

    /// Rate `C` of the nearest-distance law `2Cx exp(−C(x² − r_min²))`.
    fn rate(&self) -> f64 {
        self.m as f64 / (4.0 * self.r_e * self.orbit_radius())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3D {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3D { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Point3D) -> f64 {
        Point3D::new(self.x - other.x, self.y - other.y, self.z - other.z).norm()
    }
}

fn check_distance(func: &'static str, r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::domain(func, format!("distance {r} must be >= 0")));
    }
    Ok(())
}

/// `√max(r² − R0², 0)`, the height above which the slice at radius `r`
/// no longer reaches the cylinder wall.
fn wall_height(r: f64, r0: f64) -> f64 {
    ((r - r0) * (r + r0)).max(0.0).sqrt()
}

/// Density of the distance from the user to a uniformly placed RIS.
pub fn ris_distance_pdf(r: f64, geom: &CylinderGeometry) -> Result<f64> {
    check_distance("ris_distance_pdf", r)?;
    let (r0, h) = (geom.r0, geom.h);
    if h == 0.0 {
        let c = geom.inner_radius;
        if r < c || r > r0 {
            return Ok(0.0);
        }
        return Ok(2.0 * r / ((r0 - c) * (r0 + c)));
    }
    if r > geom.max_distance() {
        return Ok(0.0);
    }
    let w = wall_height(r, r0);
    if w == 0.0 {
        let z_top = r.min(h);
        return Ok(2.0 * r * z_top / (r0 * r0 * h));
    }
    // Past the wall the covered height is min(r, H) − w; both differences
    // are rewritten without cancellation.
    if r < h {
        Ok(2.0 * r / (h * (r + w)))
    } else {
        let gap = (h - r) * (h + r) + r0 * r0;
        Ok(2.0 * r * gap / (r0 * r0 * h * (h + w)))
    }
}

/// Distribution function of the RIS-user distance.
pub fn ris_distance_cdf(r: f64, geom: &CylinderGeometry) -> Result<f64> {
    check_distance("ris_distance_cdf", r)?;
    let (r0, h) = (geom.r0, geom.h);
    if h == 0.0 {
        let c = geom.inner_radius;
        if r <= c {
            return Ok(0.0);
        }
        if r >= r0 {
            return Ok(1.0);
        }
        return Ok((r - c) * (r + c) / ((r0 - c) * (r0 + c)));
    }
    if r >= geom.max_distance() {
        return Ok(1.0);
    }
    let w = wall_height(r, r0);
    let r02 = r0 * r0;
    let v = if w == 0.0 {
        if r < h {
            2.0 * r * r * r / (3.0 * r02 * h)
        } else {
            (r * r - h * h / 3.0) / r02
        }
    } else if r < h {
        // 2(r³ − w³)/(3R0²H) with r − w = R0²/(r + w)
        2.0 * (r * r + r * w + w * w) / (3.0 * h * (r + w))
    } else {
        // 1 − (H − w)²(H + 2w)/(3HR0²) with H − w = (H² + R0² − r²)/(H + w)
        let gap = ((h - r) * (h + r) + r02) / (h + w);
        1.0 - gap * gap * (h + 2.0 * w) / (3.0 * h * r02)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// `(a^x − b^x)/x` with its logarithmic limit at `x = 0`.
fn pow_diff_over(a: f64, b: f64, x: f64) -> f64 {
    let l = (a / b).ln();
    if x == 0.0 {
        return l;
    }
    let y = x * l;
    if y.abs() < 1e-300 {
        return l;
    }
    b.powf(x) * y.exp_m1() / x
}

/// `E[R^{−p}]` for the RIS-user distance and any `p ≥ 0`.
pub fn ris_inverse_power_moment(p: f64, geom: &CylinderGeometry) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::domain(
            "ris_distance_moment",
            format!("order {p} must be >= 0"),
        ));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    let (r0, h) = (geom.r0, geom.h);
    if h == 0.0 {
        let c = geom.inner_radius;
        if c == 0.0 {
            if p >= 2.0 {
                return Err(Error::Divergence(format!(
                    "E[R^-{p}] is infinite for a flat deployment without inner radius (need t*eps < 4)"
                )));
            }
            return Ok(2.0 * r0.powf(-p) / (2.0 - p));
        }
        // 2 (R0^{2−p} − c^{2−p}) / ((2−p)(R0² − c²))
        return Ok(2.0 * pow_diff_over(r0, c, 2.0 - p) / ((r0 - c) * (r0 + c)));
    }
    if p >= 3.0 {
        return Err(Error::Divergence(format!(
            "E[R^-{p}] is infinite inside the cylinder (need t*eps < 6)"
        )));
    }
    let r02 = r0 * r0;
    let psi3 = geom.max_distance();
    let x = 2.0 - p;
    // tε = 2p; the (tε − 4) piece is written as −2x so that x = 0 uses ln.
    let first = 2.0 * h.powf(x) / (r02 * (3.0 - p));
    let second = -2.0 * pow_diff_over(h, psi3, x) / r02;
    let hyp = gauss_2f1(1.0, 2.5 - p / 2.0, 2.5, -(h * h) / r02)?;
    let third = (2.0 / 3.0) * (h * h / (r02 * r02)) * psi3.powf(x) * hyp;
    Ok(first + second - third)
}

/// `E[R_g^{−tε/2}]` for the RIS-user distance.
pub fn ris_distance_moment(t: u32, eps: f64, geom: &CylinderGeometry) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("ris_distance_moment", "t must be >= 1"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::domain(
            "ris_distance_moment",
            format!("eps = {eps} must be >= 0"),
        ));
    }
    ris_inverse_power_moment(t as f64 * eps / 2.0, geom)
}

/// Density of the distance to the nearest satellite.
pub fn sat_distance_pdf(x: f64, con: &Constellation) -> f64 {
    if !(x >= con.r_min) || x > con.max_distance() {
        return 0.0;
    }
    let c = con.rate();
    2.0 * c * x * (-c * (x - con.r_min) * (x + con.r_min)).exp()
}

/// Distribution function matching [`sat_distance_pdf`]; it tops out at
/// [`sat_distance_mass`] rather than 1.
pub fn sat_distance_cdf(x: f64, con: &Constellation) -> f64 {
    if !(x > con.r_min) {
        return 0.0;
    }
    let x = x.min(con.max_distance());
    let c = con.rate();
    -(-c * (x - con.r_min) * (x + con.r_min)).exp_m1()
}

/// Total mass of the nearest-satellite density, `1 − e^{−M}`.
pub fn sat_distance_mass(con: &Constellation) -> f64 {
    sat_distance_cdf(con.max_distance(), con)
}

/// `E[R^{−p}]` of the nearest-satellite distance for any real `p`.
pub fn sat_inverse_power_moment(p: f64, con: &Constellation) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::domain("sat_distance_moment", "order must be finite"));
    }
    let c = con.rate();
    let (lo, hi) = (con.r_min, con.max_distance());
    let (x1, x2) = (c * lo * lo, c * hi * hi);
    let nu = p / 2.0;
    let near = lo.powf(2.0 - p) * exp_integral_nu_scaled(nu, x1)?;
    let far = hi.powf(2.0 - p) * exp_integral_nu_scaled(nu, x2)? * (-(x2 - x1)).exp();
    Ok(c * (near - far))
}

/// `E[R^{−tη/2}]` of the nearest-satellite distance.
pub fn sat_distance_moment(t: u32, eta: f64, con: &Constellation) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("sat_distance_moment", "t must be >= 1"));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::domain(
            "sat_distance_moment",
            format!("eta = {eta} must be >= 0"),
        ));
    }
    sat_inverse_power_moment(t as f64 * eta / 2.0, con)
}

/// Uniform RIS position in the cylinder, user at the origin.
pub fn sample_ris_position<R: Rng + ?Sized>(geom: &CylinderGeometry, rng: &mut R) -> Point3D {
    let c2 = geom.inner_radius * geom.inner_radius;
    let u: f64 = rng.random();
    let radial = (c2 + u * (geom.r0 * geom.r0 - c2)).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    let z = if geom.h > 0.0 {
        geom.h * rng.random::<f64>()
    } else {
        0.0
    };
    Point3D::new(radial * phi.cos(), radial * phi.sin(), z)
}

/// `1 − cos θ` of the satellite closest to the user's zenith among `M`
/// uniform points, drawn from the order statistic of `M` uniform cosines.
fn sample_nearest_versine<R: Rng + ?Sized>(m: u32, rng: &mut R) -> f64 {
    // (1 − U)∈(0, 1] keeps the logarithm finite.
    let u = 1.0 - rng.random::<f64>();
    -2.0 * (u.ln() / m as f64).exp_m1()
}

/// Distance from the user to the nearest of `M` uniform satellites.
///
/// Uses the exact law of the largest of `M` uniform cosines instead of
/// placing every satellite, so the cost is independent of `M`.
pub fn sample_nearest_sat_distance<R: Rng + ?Sized>(con: &Constellation, rng: &mut R) -> f64 {
    let v = sample_nearest_versine(con.m, rng);
    let d2 = con.r_min * con.r_min + 2.0 * con.r_e * con.orbit_radius() * v;
    d2.sqrt()
}

/// Position of the satellite nearest to the user in the user's local
/// frame: origin at the user, `z` along the local vertical.
pub fn sample_nearest_satellite<R: Rng + ?Sized>(con: &Constellation, rng: &mut R) -> Point3D {
    let v = sample_nearest_versine(con.m, rng);
    let rs = con.orbit_radius();
    let sin_theta = (v * (2.0 - v)).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    let horizontal = rs * sin_theta;
    // rs cos θ − r_e = r_min − rs v
    Point3D::new(
        horizontal * phi.cos(),
        horizontal * phi.sin(),
        con.r_min - rs * v,
    )
}

/// All `M` satellites placed uniformly on the orbit sphere, in the user's
/// local frame.
pub fn sample_constellation<R: Rng + ?Sized>(con: &Constellation, rng: &mut R) -> Vec<Point3D> {
    let rs = con.orbit_radius();
    (0..con.m)
        .map(|_| {
            let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
            let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point3D::new(
                rs * sin_theta * phi.cos(),
                rs * sin_theta * phi.sin(),
                rs * cos_theta - con.r_e,
            )
        })
        .collect()
}
