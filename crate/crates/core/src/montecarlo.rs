//! Link-level simulation of the received SNR.
//!
//! Each trial draws the satellite geometry, the RIS positions and every
//! envelope, then adds the phase-aligned magnitudes. Trials are split into
//! contiguous chunks, one per worker, each on its own ChaCha stream.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::fading::EnvelopeSampler;
use crate::geometry::{
    sample_nearest_sat_distance, sample_nearest_satellite, sample_ris_position, Constellation,
    CylinderGeometry, Point3D,
};

/// How satellite-to-RIS distances are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatDistanceModel {
    /// Every RIS sees the satellite at the user's distance.
    #[default]
    Shared,
    /// Independent nearest-satellite distance for each RIS and for the
    /// direct path.
    PerLink,
    /// The nearest satellite is placed explicitly and each RIS uses its
    /// own distance to it.
    Constellation,
}

/// Whether RIS positions are redrawn every trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deployment {
    #[default]
    PerTrial,
    /// One deployment drawn from the scenario seed and kept for all trials.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub sat_distance: SatDistanceModel,
    pub deployment: Deployment,
    /// Keep every SNR sample; required for coverage estimates.
    pub retain_samples: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            trials: 100_000,
            seed: 1,
            workers: 1,
            sat_distance: SatDistanceModel::Shared,
            deployment: Deployment::PerTrial,
            retain_samples: true,
        }
    }
}

/// Retained samples are capped at this many bytes.
const MAX_SAMPLE_BYTES: usize = 16 << 30;

/// Streaming mean and variance (Welford), mergeable across workers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combine with statistics of a disjoint sample (Chan et al.).
    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += d * nb / n as f64;
        self.m2 += other.m2 + d * d * na * nb / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Linear SNR per trial, in trial order; empty unless retained.
    pub snr_samples: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub workers: usize,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub rho0: f64,
    /// Statistics of `|A|`.
    pub abs_a: RunningStats,
    /// Statistics of `log₂(1 + ρ)`.
    pub log2_snr: RunningStats,
}

impl SimResult {
    /// Wrap externally produced SNR samples.
    pub fn from_samples(snr_samples: Vec<f64>, rho0: f64) -> Self {
        let mut abs_a = RunningStats::default();
        let mut log2_snr = RunningStats::default();
        for &s in &snr_samples {
            abs_a.push((s / rho0).sqrt());
            log2_snr.push(s.ln_1p() / std::f64::consts::LN_2);
        }
        SimResult {
            trials: snr_samples.len(),
            snr_samples,
            seed: 0,
            workers: 1,
            elapsed: 0.0,
            rho0,
            abs_a,
            log2_snr,
        }
    }

    /// `|A|` for every retained sample.
    pub fn abs_a_samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.snr_samples.iter().map(move |s| (s / self.rho0).sqrt())
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Per-RIS constants hoisted out of the trial loop.
struct RisPlan {
    elements: u32,
    q: EnvelopeSampler,
    g: EnvelopeSampler,
    half_eps_sat: f64,
    half_eps_user: f64,
}

struct Plan<'a> {
    ris: Vec<RisPlan>,
    direct: Option<(EnvelopeSampler, f64)>,
    geom: &'a CylinderGeometry,
    con: &'a Constellation,
    fixed: Option<Vec<Point3D>>,
    model: SatDistanceModel,
}

impl Plan<'_> {
    fn amplitude(&self, rng: &mut ChaCha8Rng, scratch: &mut Vec<Point3D>) -> f64 {
        let (r_u, sat) = match self.model {
            SatDistanceModel::Constellation => {
                let s = sample_nearest_satellite(self.con, rng);
                (s.norm(), Some(s))
            }
            _ => (sample_nearest_sat_distance(self.con, rng), None),
        };
        let positions: &[Point3D] = match &self.fixed {
            Some(p) => p,
            None => {
                scratch.clear();
                scratch.extend(self.ris.iter().map(|_| sample_ris_position(self.geom, rng)));
                scratch
            }
        };
        let mut amp = 0.0;
        for (r, pos) in self.ris.iter().zip(positions) {
            let r_q = match (self.model, &sat) {
                (SatDistanceModel::PerLink, _) => sample_nearest_sat_distance(self.con, rng),
                (SatDistanceModel::Constellation, Some(s)) => pos.distance(s),
                _ => r_u,
            };
            let r_g = pos.norm();
            let mut cascade = 0.0;
            for _ in 0..r.elements {
                cascade += r.q.sample(rng) * r.g.sample(rng);
            }
            amp += cascade * r_q.powf(-r.half_eps_sat) * r_g.powf(-r.half_eps_user);
        }
        if let Some((u, half_exp)) = &self.direct {
            let r_d = match self.model {
                SatDistanceModel::PerLink => sample_nearest_sat_distance(self.con, rng),
                _ => r_u,
            };
            amp += u.sample(rng) * r_d.powf(-half_exp);
        }
        amp
    }
}

fn worker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Simulate `opt.trials` SNR realisations at transmit SNR `rho0`.
///
/// Stream 0 of the seed is reserved for a fixed deployment, worker `w`
/// uses stream `w + 1`, so results depend only on `(seed, workers)`.
pub fn simulate_snr(
    cfg: &LinkConfig,
    geom: &CylinderGeometry,
    con: &Constellation,
    rho0: f64,
    opt: &SimOptions,
) -> Result<SimResult> {
    cfg.validate()?;
    if opt.trials == 0 {
        return Err(Error::Config("Monte Carlo needs at least one trial".into()));
    }
    if opt.workers == 0 {
        return Err(Error::Config(
            "Monte Carlo needs at least one worker".into(),
        ));
    }
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::Config(format!("rho0 = {rho0} must be > 0")));
    }
    let mut samples = Vec::new();
    if opt.retain_samples {
        let bytes = opt.trials.checked_mul(std::mem::size_of::<f64>());
        if bytes.is_none_or(|b| b > MAX_SAMPLE_BYTES) {
            return Err(Error::Resource(format!(
                "{} retained samples exceed the {} GiB limit",
                opt.trials,
                MAX_SAMPLE_BYTES >> 30
            )));
        }
        samples
            .try_reserve_exact(opt.trials)
            .map_err(|e| Error::Resource(format!("cannot allocate {} samples: {e}", opt.trials)))?;
    }

    let start = Instant::now();
    let fixed = match opt.deployment {
        Deployment::Fixed => {
            let mut rng = worker_rng(opt.seed, 0);
            Some(
                cfg.ris
                    .iter()
                    .map(|_| sample_ris_position(geom, &mut rng))
                    .collect(),
            )
        }
        Deployment::PerTrial => None,
    };
    let plan = Plan {
        ris: cfg
            .ris
            .iter()
            .map(|r| RisPlan {
                elements: r.elements,
                q: EnvelopeSampler::new(&r.sat_ris),
                g: EnvelopeSampler::new(&r.ris_user),
                half_eps_sat: r.eps_sat_ris / 2.0,
                half_eps_user: r.eps_ris_user / 2.0,
            })
            .collect(),
        direct: cfg.direct.enabled.then(|| {
            (
                EnvelopeSampler::new(&cfg.direct.fading),
                cfg.direct.exponent / 2.0,
            )
        }),
        geom,
        con,
        fixed,
        model: opt.sat_distance,
    };

    let workers = opt.workers.min(opt.trials);
    let chunk = |w: usize| {
        let lo = opt.trials * w / workers;
        let hi = opt.trials * (w + 1) / workers;
        lo..hi
    };
    let run = |w: usize| {
        let mut rng = worker_rng(opt.seed, w as u64 + 1);
        let mut scratch = Vec::with_capacity(plan.ris.len());
        let range = chunk(w);
        let mut out = Vec::new();
        if opt.retain_samples {
            out.reserve_exact(range.len());
        }
        let mut abs_a = RunningStats::default();
        let mut log2_snr = RunningStats::default();
        for _ in range {
            let a = plan.amplitude(&mut rng, &mut scratch);
            let snr = rho0 * a * a;
            abs_a.push(a);
            log2_snr.push(snr.ln_1p() / std::f64::consts::LN_2);
            if opt.retain_samples {
                out.push(snr);
            }
        }
        (out, abs_a, log2_snr)
    };

    let parts: Vec<_> = if workers == 1 {
        vec![run(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || run(w))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation worker panicked"))
                .collect()
        })
    };

    let mut abs_a = RunningStats::default();
    let mut log2_snr = RunningStats::default();
    for (out, a, l) in parts {
        samples.extend_from_slice(&out);
        abs_a.merge(&a);
        log2_snr.merge(&l);
    }
    Ok(SimResult {
        snr_samples: samples,
        seed: opt.seed,
        trials: opt.trials,
        workers,
        elapsed: start.elapsed().as_secs_f64(),
        rho0,
        abs_a,
        log2_snr,
    })
}

/// Fraction of trials with SNR above `rho_th`.
pub fn empirical_coverage(res: &SimResult, rho_th: f64) -> Result<Estimate> {
    let n = res.snr_samples.len();
    if n < 100 {
        return Err(Error::Config(format!(
            "coverage needs at least 100 retained samples, have {n}"
        )));
    }
    let hits = res.snr_samples.iter().filter(|&&s| s > rho_th).count();
    let p = hits as f64 / n as f64;
    Ok(Estimate {
        value: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
    })
}

/// Sample mean of `log₂(1 + ρ)`.
pub fn empirical_capacity(res: &SimResult) -> Result<Estimate> {
    if res.log2_snr.count() < 100 {
        return Err(Error::Config(format!(
            "capacity needs at least 100 trials, have {}",
            res.log2_snr.count()
        )));
    }
    Ok(Estimate {
        value: res.log2_snr.mean(),
        stderr: res.log2_snr.stderr(),
    })
}
