use satris::metrics::{coverage_probability, ergodic_capacity, CoverageQuery};
use satris::scenario::*;
use satris::Error;

const BASE: &str = r#"
[constellation]
satellites = 1000
r_min_km = 1000.0

[geometry]
r0_m = 150.0
h_m = 50.0

[ris]
count = 4
elements = 20
sat_ris = { kappa = 1.0, mu = 2.0 }
ris_user = { kappa = 3.0, mu = 3.0 }
eps_sat_ris = 2.0
eps_ris_user = { min = 2.0, max = 3.0 }
exponent_seed = 0

[power]
es_w = 10.0
n0_dbm = -100.0
"#;

fn with_sweep(extra: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(&format!("{BASE}\n{extra}")).unwrap()
}

fn analytic_column(cfg: &ScenarioConfig) -> Vec<f64> {
    let tables = run_sweep(&cfg.resolve().unwrap()).unwrap();
    tables[0].rows.iter().map(|r| r.analytic_metric).collect()
}

#[test]
fn parse_errors_are_config_errors() {
    let unknown = format!("{BASE}\n[geometry_extra]\nx = 1\n");
    assert!(matches!(
        ScenarioConfig::from_toml_str(&unknown),
        Err(Error::Config(_))
    ));
    let misspelt = BASE.replace("h_m", "height_m");
    match ScenarioConfig::from_toml_str(&misspelt) {
        Err(Error::Config(msg)) => {
            assert!(msg.contains("height_m") || msg.contains("h_m"), "{msg}")
        }
        other => panic!("{other:?}"),
    }
    assert!(ScenarioConfig::from_toml_str("not toml at all = = =").is_err());
    let bad_grid = with_sweep("[sweep]\nvariable = \"N\"\ngrid = \"0:5:4\"\n");
    assert!(matches!(bad_grid.resolve(), Err(Error::Config(_))));
    let bad_fading = ScenarioConfig::from_toml_str(&BASE.replace("mu = 2.0", "mu = -2.0")).unwrap();
    match bad_fading.resolve() {
        Err(Error::Config(msg)) => assert!(msg.contains("ris.sat_ris"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let r0_bad =
        ScenarioConfig::from_toml_str(&BASE.replace("r0_m = 150.0", "r0_m = -20.0")).unwrap();
    assert!(matches!(r0_bad.resolve(), Err(Error::Config(_))));
    let no_var = format!("{BASE}\n[sweep]\nvariable = \"M\"\n");
    assert!(matches!(
        ScenarioConfig::from_toml_str(&no_var),
        Err(Error::Config(_))
    ));
}

#[test]
fn seeded_exponents_are_reproducible() {
    let res = with_sweep("").resolve().unwrap();
    let eps: Vec<f64> = res.ris_pool.iter().map(|r| r.eps_ris_user).collect();
    assert_eq!(
        eps,
        [
            2.709075415426562,
            2.46592172228961,
            2.6991432426747317,
            2.0601711656341717
        ]
    );
    assert_eq!(res.rho0, 1e14);
    // Growing the count keeps the first draws.
    let big = ScenarioConfig::from_toml_str(&BASE.replace("count = 4", "count = 9")).unwrap();
    let res9 = big.resolve().unwrap();
    assert_eq!(
        res9.ris_pool[..4]
            .iter()
            .map(|r| r.eps_ris_user)
            .collect::<Vec<_>>(),
        eps
    );
}

#[test]
fn resolved_echo_round_trips() {
    let cfg = with_sweep("[sweep]\nvariable = \"rho_th\"\ngrid = \"0:40:5\"\nmetrics = [\"coverage\", \"capacity\"]\n");
    let res = cfg.resolve().unwrap();
    let text = res.config.to_toml_string().unwrap();
    let again = ScenarioConfig::from_toml_str(&text)
        .unwrap()
        .resolve()
        .unwrap();
    assert_eq!(again.ris_pool, res.ris_pool);
    assert_eq!(again.grid, res.grid);
    let a = run_sweep(&res).unwrap();
    let b = run_sweep(&again).unwrap();
    assert_eq!(a, b);
}

#[test]
fn singleton_grid_equals_the_point_value() {
    let cfg = with_sweep(
        "[sweep]\nvariable = \"rho_th\"\ngrid = [17.5]\nmetrics = [\"coverage\", \"capacity\"]\n",
    );
    let tables = run_sweep(&cfg.resolve().unwrap()).unwrap();
    let point = cfg.resolve().unwrap().point(17.5).unwrap();
    let ga = point.gamma_approx().unwrap();
    let cov =
        coverage_probability(&CoverageQuery::new(10f64.powf(1.75), 1e14).unwrap(), &ga).unwrap();
    assert_eq!(tables[0].rows.len(), 1);
    assert_eq!(tables[0].rows[0].analytic_metric, cov);
    assert_eq!(
        tables[1].rows[0].analytic_metric,
        ergodic_capacity(&ga, 1e14).unwrap().bits
    );
    assert_eq!(tables[0].rows[0].mc_metric, None);
}

#[test]
fn direct_only_baseline_lies_below_every_ris_curve() {
    let grid = "[sweep]\nvariable = \"rho_th\"\ngrid = \"0:40:10\"\n";
    let base = ScenarioConfig::from_toml_str(&format!(
        "{}\n{grid}",
        BASE.replace("count = 4", "count = 0")
    ))
    .unwrap();
    let baseline = analytic_column(&base);
    for n in [1, 2, 4, 8] {
        let cfg = ScenarioConfig::from_toml_str(&format!(
            "{}\n{grid}",
            BASE.replace("count = 4", &format!("count = {n}"))
        ))
        .unwrap();
        let curve = analytic_column(&cfg);
        for (b, c) in baseline.iter().zip(&curve) {
            assert!(b <= c, "N = {n}: {baseline:?} vs {curve:?}");
        }
        assert!(baseline.iter().zip(&curve).any(|(b, c)| b < c));
    }
}

#[test]
fn capacity_trends_in_the_sweep_variables() {
    let cap = |var: &str, grid: &str| {
        analytic_column(&with_sweep(&format!(
            "[sweep]\nvariable = \"{var}\"\ngrid = \"{grid}\"\nmetrics = [\"capacity\"]\n"
        )))
    };
    let nondecreasing = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    assert!(nondecreasing(&cap("N", "0,1,2,3,4,6,8")));
    assert!(nondecreasing(&cap("L", "1,5,10,20,50,100")));
    assert!(nondecreasing(&cap("rho0", "90:130:9")));
    let r0 = cap("R0", "60,100,150,300,600");
    assert!(r0.windows(2).all(|w| w[1] <= w[0]), "{r0:?}");
    let h = cap("H", "10,25,50,75,100");
    assert!(h.windows(2).all(|w| w[1] <= w[0]), "{h:?}");
}

#[test]
fn db_grid_points_convert_exactly() {
    let res = with_sweep("[sweep]\nvariable = \"rho0\"\ngrid = \"90:130:5\"\n")
        .resolve()
        .unwrap();
    for (&db, want) in res.grid.iter().zip([1e9, 1e10, 1e11, 1e12, 1e13]) {
        assert_eq!(res.point(db).unwrap().rho0, want);
    }
    assert_eq!(db_to_linear(0.0), 1.0);
    assert_eq!(linear_to_db(100.0), 20.0);
}

#[test]
fn rho0_override_and_explicit_list() {
    let cfg = ScenarioConfig::from_toml_str(
        &BASE.replace("n0_dbm = -100.0", "n0_dbm = -100.0\nrho0_db = 120.0"),
    )
    .unwrap();
    assert_eq!(cfg.resolve().unwrap().rho0, 1e12);
    let listed = r#"
[constellation]
satellites = 500
r_min_km = 800.0

[geometry]
r0_m = 100.0
h_m = 20.0

[[ris.list]]
elements = 8
sat_ris = { kappa = 0.0, mu = 1.0 }
ris_user = { kappa = 2.0, mu = 1.5 }
eps_sat_ris = 2.0
eps_ris_user = 2.4

[power]
es_w = 1.0
n0_dbm = -100.0
"#;
    let res = ScenarioConfig::from_toml_str(listed)
        .unwrap()
        .resolve()
        .unwrap();
    assert_eq!(res.ris_pool.len(), 1);
    assert_eq!(res.ris_pool[0].elements, 8);
    assert_eq!(res.rho0, 1e13);
}

#[test]
fn monte_carlo_columns_and_formats() {
    let cfg = with_sweep(
        "[sweep]\nvariable = \"rho_th\"\ngrid = \"0:40:3\"\n[monte_carlo]\nenabled = true\ntrials = 2000\nseed = 4\n",
    );
    let tables = run_sweep(&cfg.resolve().unwrap()).unwrap();
    let t = &tables[0];
    assert!(t
        .rows
        .iter()
        .all(|r| r.mc_metric.is_some() && r.mc_stderr.is_some()));
    let csv = table_to_csv(t);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_value,analytic_metric,mc_metric,mc_stderr,alpha,beta"
    );
    assert_eq!(lines.count(), 3);
    let json: serde_json::Value = serde_json::from_str(&table_to_json(t).unwrap()).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for key in TABLE_COLUMNS {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
    let bad = with_sweep("[monte_carlo]\nenabled = true\ntrials = 10\n");
    assert!(matches!(bad.resolve(), Err(Error::Config(_))));
}

#[test]
fn run_writes_tables_and_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg =
        with_sweep("[sweep]\nvariable = \"rho0\"\ngrid = \"90:130:3\"\nmetrics = [\"capacity\"]\n");
    cfg.output.dir = dir.path().to_path_buf();
    cfg.output.prefix = "t".into();
    let out = run_resolved(&cfg.resolve().unwrap()).unwrap();
    assert_eq!(out.files, vec![dir.path().join("t_capacity_vs_rho0.csv")]);
    let again = run_scenario(&out.resolved_config).unwrap();
    assert_eq!(again.tables, out.tables);
    let first = std::fs::read_to_string(&out.files[0]).unwrap();
    assert_eq!(first, table_to_csv(&out.tables[0]));
}
