//! Relative coverage gain from 4 to 8 RISs at the configured threshold for a
//! range of exponent seeds.
//!
//! Usage: `exponent_seed_scan <scenario.toml> [first_seed] [count]`

use std::path::Path;

use satris::metrics::{coverage_probability, CoverageQuery};
use satris::scenario::{GridSpec, ScenarioConfig, SweepVariable};

fn main() -> satris::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let path = args.get(1).expect("scenario path");
    let first: u64 = args.get(2).map_or(0, |s| s.parse().unwrap());
    let count: u64 = args.get(3).map_or(50, |s| s.parse().unwrap());
    let mut cfg = ScenarioConfig::load(Path::new(path))?;
    cfg.sweep.variable = SweepVariable::N;
    cfg.sweep.grid = GridSpec::Values(vec![4.0, 8.0]);
    cfg.monte_carlo.enabled = false;
    let mut gains = Vec::new();
    for seed in first..first + count {
        cfg.ris.exponent_seed = seed;
        let res = cfg.resolve()?;
        let mut pc = [0.0; 2];
        for (i, n) in [4.0, 8.0].into_iter().enumerate() {
            let p = res.point(n)?;
            let q = CoverageQuery::new(p.rho_th, p.rho0)?;
            pc[i] = coverage_probability(&q, &p.gamma_approx()?)?;
        }
        let gain = 100.0 * (pc[1] / pc[0] - 1.0);
        gains.push(gain);
        println!(
            "seed {seed:4}  Pc(4) = {:.4}  Pc(8) = {:.4}  gain = {gain:6.2} %",
            pc[0], pc[1]
        );
    }
    gains.sort_by(f64::total_cmp);
    let q = |f: f64| gains[((gains.len() - 1) as f64 * f).round() as usize];
    println!(
        "gain quantiles: 10% {:.1}  50% {:.1}  90% {:.1}",
        q(0.1),
        q(0.5),
        q(0.9)
    );
    Ok(())
}
