//! Scenario files, parameter sweeps and result tables.
//!
//! A scenario is a TOML document. Lengths are given with their unit in the
//! key name, SNR-like quantities in dB. Everything is converted to meters
//! and linear units here, and the rest of the crate never sees dB.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{gamma_approx, DirectLink, GammaApprox, LinkConfig, RisLink};
use crate::error::{Error, Result};
use crate::fading::KappaMuParams;
use crate::geometry::{Constellation, CylinderGeometry};
use crate::metrics::{coverage_probability, ergodic_capacity, CapacityMethod, CoverageQuery};
use crate::montecarlo::{simulate_snr, Deployment, RunningStats, SatDistanceModel, SimOptions};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constellation: ConstellationSection,
    pub geometry: GeometrySection,
    pub ris: RisSection,
    #[serde(default)]
    pub direct: DirectSection,
    pub power: PowerSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub monte_carlo: MonteCarloSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSection {
    pub satellites: u32,
    pub r_min_km: f64,
    #[serde(default = "default_earth_radius_km")]
    pub r_e_km: f64,
}

fn default_earth_radius_km() -> f64 {
    6371.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub r0_m: f64,
    pub h_m: f64,
    #[serde(default)]
    pub inner_radius_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSpec {
    pub kappa: f64,
    pub mu: f64,
}

impl FadingSpec {
    fn params(&self, field: &str) -> Result<KappaMuParams> {
        KappaMuParams::new(self.kappa, self.mu).map_err(|e| Error::Config(format!("{field}: {e}")))
    }
}

/// A path-loss exponent, fixed or drawn uniformly from `[min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Fixed(f64),
    Range { min: f64, max: f64 },
}

/// RIS deployment, either a template repeated `count` times or an explicit
/// list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sat_ris: Option<FadingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ris_user: Option<FadingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_sat_ris: Option<ExponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_ris_user: Option<ExponentSpec>,
    /// Seed for exponents given as ranges.
    #[serde(default)]
    pub exponent_seed: u64,
    /// Explicit exponent values overriding the seeded draw, one per RIS.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_sat_ris_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_ris_user_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub list: Vec<RisEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisEntry {
    pub elements: u32,
    pub sat_ris: FadingSpec,
    pub ris_user: FadingSpec,
    pub eps_sat_ris: f64,
    pub eps_ris_user: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "two")]
    pub exponent: f64,
}

fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl Default for DirectSection {
    fn default() -> Self {
        DirectSection {
            enabled: true,
            kappa: 0.0,
            mu: 1.0,
            exponent: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub es_w: f64,
    pub n0_dbm: f64,
    /// Overrides `es_w / N0` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0_db: Option<f64>,
    /// Coverage threshold used when it is not the swept variable.
    #[serde(default = "default_threshold_db")]
    pub rho_th_db: f64,
}

fn default_threshold_db() -> f64 {
    20.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    RhoTh,
    Rho0,
    #[serde(rename = "N", alias = "n")]
    N,
    #[serde(rename = "L", alias = "l")]
    L,
    #[serde(rename = "R0", alias = "r0")]
    R0,
    #[serde(rename = "H", alias = "h")]
    H,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::RhoTh => "rho_th",
            SweepVariable::Rho0 => "rho0",
            SweepVariable::N => "N",
            SweepVariable::L => "L",
            SweepVariable::R0 => "R0",
            SweepVariable::H => "H",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "rho_th" => SweepVariable::RhoTh,
            "rho0" => SweepVariable::Rho0,
            "N" | "n" => SweepVariable::N,
            "L" | "l" => SweepVariable::L,
            "R0" | "r0" => SweepVariable::R0,
            "H" | "h" => SweepVariable::H,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep variable '{other}' (expected rho_th, rho0, N, L, R0 or H)"
                )))
            }
        })
    }

    fn is_integer(&self) -> bool {
        matches!(self, SweepVariable::N | SweepVariable::L)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Coverage,
    Capacity,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Coverage => "coverage",
            Metric::Capacity => "capacity",
        }
    }
}

/// Grid as `"start:stop:points"`, a comma list, or a TOML array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Text(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Text(s) => parse_grid(s)?,
        };
        if v.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("sweep grid has non-finite values".into()));
        }
        if v.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("sweep grid must be sorted ascending".into()));
        }
        Ok(v)
    }
}

/// Parse `"start:stop:points"` (inclusive, evenly spaced) or `"a,b,c"`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("grid: '{t}' is not a number")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "grid '{s}': expected start:stop:points"
            )));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("grid '{s}': points must be a positive integer")))?;
        if n == 0 {
            return Err(Error::Config(format!("grid '{s}': points must be >= 1")));
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        let step = (b - a) / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
        v[n - 1] = b;
        return Ok(v);
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(num)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_variable")]
    pub variable: SweepVariable,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
}

fn default_variable() -> SweepVariable {
    SweepVariable::RhoTh
}
fn default_grid() -> GridSpec {
    GridSpec::Values(vec![20.0])
}
fn default_metrics() -> Vec<Metric> {
    vec![Metric::Coverage]
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            variable: default_variable(),
            grid: default_grid(),
            metrics: default_metrics(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub sat_distance: SatDistanceModel,
    #[serde(default)]
    pub deployment: Deployment,
}

fn default_trials() -> usize {
    100_000
}
fn default_seed() -> u64 {
    1
}
fn default_workers() -> usize {
    1
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            enabled: false,
            trials: default_trials(),
            seed: default_seed(),
            workers: default_workers(),
            sat_distance: SatDistanceModel::default(),
            deployment: Deployment::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }

    fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_prefix() -> String {
    "satris".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            format: OutputFormat::default(),
            prefix: default_prefix(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }

    /// Validate, draw exponents and produce the runnable scenario.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        ResolvedScenario::new(self)
    }
}

fn draw_exponents(
    spec: &ExponentSpec,
    field: &str,
    seed: u64,
    stream: u64,
    n: usize,
) -> Result<Vec<f64>> {
    match *spec {
        ExponentSpec::Fixed(v) => Ok(vec![v; n]),
        ExponentSpec::Range { min, max } => {
            if !(min.is_finite() && max.is_finite() && min < max) {
                return Err(Error::Config(format!(
                    "ris.{field}: need min < max, got [{min}, {max})"
                )));
            }
            // One stream per exponent kind keeps the first k draws
            // unchanged when more RISs are added.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            Ok((0..n).map(|_| rng.random_range(min..max)).collect())
        }
    }
}

/// A validated scenario with all RISs instantiated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    /// Echo with drawn exponents written out; re-running it reproduces the
    /// same outputs.
    pub config: ScenarioConfig,
    pub constellation: Constellation,
    pub geometry: CylinderGeometry,
    /// All RISs that any sweep point can use; points take a prefix.
    pub ris_pool: Vec<RisLink>,
    /// RIS count at the base point.
    pub n_base: usize,
    pub direct: DirectLink,
    pub rho0: f64,
    pub rho_th: f64,
    pub grid: Vec<f64>,
}

impl ResolvedScenario {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let c = &cfg.constellation;
        let constellation =
            Constellation::with_earth_radius(c.satellites, c.r_min_km * 1e3, c.r_e_km * 1e3)
                .map_err(|e| Error::Config(format!("constellation: {e}")))?;
        let g = &cfg.geometry;
        let geometry = CylinderGeometry::new(g.r0_m, g.h_m)
            .and_then(|geo| geo.with_inner_radius(g.inner_radius_m))
            .map_err(|e| Error::Config(format!("geometry: {e}")))?;

        let grid = cfg.sweep.grid.values()?;
        let var = cfg.sweep.variable;
        if var.is_integer() {
            if let Some(bad) = grid.iter().find(|v| **v != v.round() || **v < 0.0) {
                return Err(Error::Config(format!(
                    "sweep.grid: {} values must be non-negative integers, got {bad}",
                    var.name()
                )));
            }
        }
        if var == SweepVariable::L && grid.contains(&0.0) {
            return Err(Error::Config("sweep.grid: L must be >= 1".into()));
        }
        if cfg.sweep.metrics.is_empty() {
            return Err(Error::Config(
                "sweep.metrics: at least one metric is required".into(),
            ));
        }
        let n_needed = if var == SweepVariable::N {
            grid.iter().fold(0.0f64, |a, &b| a.max(b)) as usize
        } else {
            0
        };

        let mut echo = cfg.clone();
        echo.sweep.grid = GridSpec::Values(grid.clone());
        let r = &cfg.ris;
        let (ris_pool, n_base) = if !r.list.is_empty() {
            if r.count.is_some()
                || r.elements.is_some()
                || r.eps_ris_user.is_some()
                || r.eps_sat_ris.is_some()
            {
                return Err(Error::Config(
                    "ris: give either a template or ris.list, not both".into(),
                ));
            }
            let pool = r
                .list
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    Ok(RisLink {
                        elements: e.elements,
                        sat_ris: e.sat_ris.params(&format!("ris.list[{i}].sat_ris"))?,
                        ris_user: e.ris_user.params(&format!("ris.list[{i}].ris_user"))?,
                        eps_sat_ris: e.eps_sat_ris,
                        eps_ris_user: e.eps_ris_user,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if n_needed > pool.len() {
                return Err(Error::Config(format!(
                    "sweep asks for N = {n_needed} but ris.list has only {} entries",
                    pool.len()
                )));
            }
            let n = pool.len();
            (pool, n)
        } else {
            let count = r
                .count
                .ok_or_else(|| Error::Config("ris.count is required".into()))?;
            let total = count.max(n_needed);
            let missing =
                |f: &str| Error::Config(format!("ris.{f} is required when ris.count > 0"));
            if total == 0 {
                (Vec::new(), 0)
            } else {
                let elements = r.elements.ok_or_else(|| missing("elements"))?;
                let q = r
                    .sat_ris
                    .ok_or_else(|| missing("sat_ris"))?
                    .params("ris.sat_ris")?;
                let gf = r
                    .ris_user
                    .ok_or_else(|| missing("ris_user"))?
                    .params("ris.ris_user")?;
                let pick = |values: &[f64],
                            spec: Option<ExponentSpec>,
                            field: &str,
                            stream|
                 -> Result<Vec<f64>> {
                    if !values.is_empty() {
                        if values.len() < total {
                            return Err(Error::Config(format!(
                                "ris.{field}_values has {} entries but {total} RISs are needed",
                                values.len()
                            )));
                        }
                        return Ok(values[..total].to_vec());
                    }
                    let spec = spec.ok_or_else(|| missing(field))?;
                    draw_exponents(&spec, field, r.exponent_seed, stream, total)
                };
                let eps_sat = pick(&r.eps_sat_ris_values, r.eps_sat_ris, "eps_sat_ris", 1)?;
                let eps_user = pick(&r.eps_ris_user_values, r.eps_ris_user, "eps_ris_user", 0)?;
                echo.ris.eps_sat_ris_values = eps_sat.clone();
                echo.ris.eps_ris_user_values = eps_user.clone();
                let pool = (0..total)
                    .map(|i| RisLink {
                        elements,
                        sat_ris: q,
                        ris_user: gf,
                        eps_sat_ris: eps_sat[i],
                        eps_ris_user: eps_user[i],
                    })
                    .collect();
                (pool, count)
            }
        };

        let d = &cfg.direct;
        let direct = DirectLink {
            enabled: d.enabled,
            fading: FadingSpec {
                kappa: d.kappa,
                mu: d.mu,
            }
            .params("direct")?,
            exponent: d.exponent,
        };
        LinkConfig::new(ris_pool.clone(), direct).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("ris/direct: {m}")),
            other => other,
        })?;

        let p = &cfg.power;
        let rho0 = match p.rho0_db {
            Some(db) => db_to_linear(db),
            None => {
                if !(p.es_w > 0.0) {
                    return Err(Error::Config(format!(
                        "power.es_w = {} must be > 0",
                        p.es_w
                    )));
                }
                p.es_w / dbm_to_watts(p.n0_dbm)
            }
        };
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::Config(format!("transmit SNR {rho0} is not usable")));
        }
        let rho_th = db_to_linear(p.rho_th_db);

        let mc = &cfg.monte_carlo;
        if mc.enabled && (mc.trials < 100 || mc.workers == 0) {
            return Err(Error::Config(
                "monte_carlo: trials must be >= 100 and workers >= 1".into(),
            ));
        }

        Ok(ResolvedScenario {
            config: echo,
            constellation,
            geometry,
            ris_pool,
            n_base,
            direct,
            rho0,
            rho_th,
            grid,
        })
    }

    pub fn variable(&self) -> SweepVariable {
        self.config.sweep.variable
    }

    /// Model inputs at one grid value of the sweep variable.
    pub fn point(&self, value: f64) -> Result<ScenarioPoint> {
        let mut n = self.n_base;
        let mut geom = self.geometry;
        let mut rho0 = self.rho0;
        let mut rho_th = self.rho_th;
        let mut elements = None;
        match self.variable() {
            SweepVariable::RhoTh => rho_th = db_to_linear(value),
            SweepVariable::Rho0 => rho0 = db_to_linear(value),
            SweepVariable::N => n = value as usize,
            SweepVariable::L => elements = Some(value as u32),
            SweepVariable::R0 => {
                geom = CylinderGeometry::new(value, geom.h())
                    .and_then(|g| g.with_inner_radius(self.geometry.inner_radius()))?
            }
            SweepVariable::H => {
                geom = CylinderGeometry::new(geom.r0(), value)
                    .and_then(|g| g.with_inner_radius(self.geometry.inner_radius()))?
            }
        }
        let mut ris: Vec<RisLink> = self.ris_pool[..n].to_vec();
        if let Some(l) = elements {
            ris.iter_mut().for_each(|r| r.elements = l);
        }
        Ok(ScenarioPoint {
            link: LinkConfig::new(ris, self.direct)?,
            geometry: geom,
            constellation: self.constellation,
            rho0,
            rho_th,
        })
    }

    pub fn sim_options(&self) -> SimOptions {
        let mc = &self.config.monte_carlo;
        SimOptions {
            trials: mc.trials,
            seed: mc.seed,
            workers: mc.workers,
            sat_distance: mc.sat_distance,
            deployment: mc.deployment,
            retain_samples: true,
        }
    }
}

/// Everything needed to evaluate one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub link: LinkConfig,
    pub geometry: CylinderGeometry,
    pub constellation: Constellation,
    pub rho0: f64,
    pub rho_th: f64,
}

impl ScenarioPoint {
    pub fn gamma_approx(&self) -> Result<GammaApprox> {
        gamma_approx(&self.link, &self.geometry, &self.constellation)
    }

    pub fn analytic(&self, metric: Metric) -> Result<(f64, Option<CapacityMethod>)> {
        let ga = self.gamma_approx()?;
        match metric {
            Metric::Coverage => {
                let q = CoverageQuery::new(self.rho_th, self.rho0)?;
                Ok((coverage_probability(&q, &ga)?, None))
            }
            Metric::Capacity => {
                let c = ergodic_capacity(&ga, self.rho0)?;
                Ok((c.bits, Some(c.method)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub analytic_metric: f64,
    pub mc_metric: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub metric: Metric,
    pub rows: Vec<SweepRow>,
    /// Points whose capacity came from the quadrature fallback.
    pub fallback_points: Vec<f64>,
}

pub const TABLE_COLUMNS: [&str; 6] = [
    "sweep_value",
    "analytic_metric",
    "mc_metric",
    "mc_stderr",
    "alpha",
    "beta",
];

/// `|A|²` samples of the most recent simulation, reused while only the
/// threshold or the transmit SNR changes.
struct McCache {
    key: Option<(usize, Option<u32>, u64, u64)>,
    power: Vec<f64>,
}

fn mc_estimate(power: &[f64], point: &ScenarioPoint, metric: Metric) -> (f64, f64) {
    let n = power.len() as f64;
    match metric {
        Metric::Coverage => {
            let hits = power
                .iter()
                .filter(|&&p| point.rho0 * p > point.rho_th)
                .count();
            let pr = hits as f64 / n;
            (pr, (pr * (1.0 - pr) / n).sqrt())
        }
        Metric::Capacity => {
            let mut s = RunningStats::default();
            for &p in power {
                s.push((point.rho0 * p).ln_1p() / std::f64::consts::LN_2);
            }
            (s.mean(), s.stderr())
        }
    }
}

/// Evaluate every grid point for every configured metric.
pub fn run_sweep(res: &ResolvedScenario) -> Result<Vec<SweepTable>> {
    let mc_on = res.config.monte_carlo.enabled;
    let opt = res.sim_options();
    let mut cache = McCache {
        key: None,
        power: Vec::new(),
    };
    let metrics = &res.config.sweep.metrics;
    let mut tables: Vec<SweepTable> = metrics
        .iter()
        .map(|&metric| SweepTable {
            variable: res.variable(),
            metric,
            rows: Vec::with_capacity(res.grid.len()),
            fallback_points: Vec::new(),
        })
        .collect();
    for &value in &res.grid {
        let point = res.point(value)?;
        let ga = point.gamma_approx()?;
        if mc_on {
            let key = (
                point.link.n(),
                point.link.ris.first().map(|r| r.elements),
                point.geometry.r0().to_bits(),
                point.geometry.h().to_bits(),
            );
            if cache.key != Some(key) {
                let sim = simulate_snr(
                    &point.link,
                    &point.geometry,
                    &point.constellation,
                    1.0,
                    &opt,
                )?;
                cache.power = sim.snr_samples;
                cache.key = Some(key);
            }
        }
        for table in tables.iter_mut() {
            let (analytic, method) = point.analytic(table.metric)?;
            if method == Some(CapacityMethod::QuadratureFallback) {
                table.fallback_points.push(value);
            }
            let (mc_metric, mc_stderr) = if mc_on {
                let (m, s) = mc_estimate(&cache.power, &point, table.metric);
                (Some(m), Some(s))
            } else {
                (None, None)
            };
            table.rows.push(SweepRow {
                sweep_value: value,
                analytic_metric: analytic,
                mc_metric,
                mc_stderr,
                alpha: ga.alpha(),
                beta: ga.beta(),
            });
        }
    }
    Ok(tables)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn table_to_csv(t: &SweepTable) -> String {
    let mut s = TABLE_COLUMNS.join(",");
    s.push('\n');
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(r.sweep_value),
            fmt_f64(r.analytic_metric),
            opt(r.mc_metric),
            opt(r.mc_stderr),
            fmt_f64(r.alpha),
            fmt_f64(r.beta)
        );
    }
    s
}

pub fn table_to_json(t: &SweepTable) -> Result<String> {
    serde_json::to_string_pretty(&t.rows).map_err(|e| Error::Io(e.to_string()))
}

/// Files written by [`run_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<SweepTable>,
    pub files: Vec<PathBuf>,
    pub resolved_config: PathBuf,
}

/// Run the sweep of a resolved scenario and write its tables and the
/// resolved configuration into the configured output directory.
pub fn run_resolved(res: &ResolvedScenario) -> Result<RunOutput> {
    let tables = run_sweep(res)?;
    let out = &res.config.output;
    std::fs::create_dir_all(&out.dir)
        .map_err(|e| Error::Io(format!("{}: {e}", out.dir.display())))?;
    let mut files = Vec::new();
    for t in &tables {
        let name = format!(
            "{}_{}_vs_{}.{}",
            out.prefix,
            t.metric.name(),
            t.variable.name(),
            out.format.extension()
        );
        let path = out.dir.join(name);
        let body = match out.format {
            OutputFormat::Csv => table_to_csv(t),
            OutputFormat::Json => table_to_json(t)?,
        };
        std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    let resolved_config = out.dir.join(format!("{}_resolved.toml", out.prefix));
    std::fs::write(&resolved_config, res.config.to_toml_string()?)
        .map_err(|e| Error::Io(format!("{}: {e}", resolved_config.display())))?;
    Ok(RunOutput {
        tables,
        files,
        resolved_config,
    })
}

pub fn run_scenario(path: &Path) -> Result<RunOutput> {
    run_resolved(&ScenarioConfig::load(path)?.resolve()?)
}
