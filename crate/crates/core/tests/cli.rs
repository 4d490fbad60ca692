use std::path::Path;
use std::process::{Command, Output};

use firmscale::config::{format_number, reference_defaults};
use firmscale::solver::maximize;
use firmscale::trends::{break_even_gamma, implied_growth, stalled_hardware_growth, TrendRates};

fn firmscale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_firmscale"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
        .unwrap_or_else(|| panic!("no {key} in:\n{text}"))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("model.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_matches_library() {
    let text = stdout(&firmscale(&["solve"]));
    let s = maximize(&reference_defaults().firm).unwrap();
    assert_eq!(value(&text, "regime"), "compute-bound");
    for (k, v) in [
        ("n_star", s.n_star),
        ("d_star", s.d_star),
        ("t_star", s.t_star),
        ("profit", s.profit),
        ("c_train", s.c_train),
        ("c_inf", s.c_inf),
    ] {
        assert_eq!(value(&text, k), format_number(v), "{k}");
    }
    assert_eq!(
        value(&text, "foc_residual"),
        format_number(s.foc_residual.unwrap())
    );
}

#[test]
fn solve_with_small_cap_is_data_bound() {
    let text = stdout(&firmscale(&["solve", "--set", "firm.D=100"]));
    assert_eq!(value(&text, "regime"), "data-bound");
    assert_eq!(value(&text, "d_star"), "100");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "demand.gamma = -1\n[law]\nalpha = 0.5\nbeta = 0.5\n",
    );
    let a = stdout(&firmscale(&["solve", "--config", &cfg]));
    let b = stdout(&firmscale(&[
        "--config",
        &cfg,
        "solve",
        "--set",
        "demand.gamma=-1",
    ]));
    assert_eq!(a, b);
    let c = stdout(&firmscale(&[
        "solve",
        "--config",
        &cfg,
        "--set",
        "demand.gamma=0",
    ]));
    assert_ne!(a, c);
}

#[test]
fn invalid_gamma_exits_with_config_code() {
    let out = firmscale(&["solve", "--set", "demand.gamma=-2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma >= -1"));
}

#[test]
fn unknown_key_exits_with_config_code() {
    let out = firmscale(&["solve", "--set", "demand.omgea=2"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "firm.E = \"big\"\n");
    assert_eq!(
        firmscale(&["solve", "--config", &cfg]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("nope.toml");
    let out = firmscale(&["solve", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unbounded_profit_exits_with_boundary_code() {
    // with alpha = 1 and linear demand, revenue outgrows cost without limit
    let out = firmscale(&[
        "solve",
        "--set",
        "demand.omega=10",
        "--set",
        "demand.gamma=-1",
        "--set",
        "law.alpha=1",
        "--set",
        "law.beta=1",
        "--set",
        "firm.E=1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scan boundary"));
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        stdout(&firmscale(&[
            "sweep",
            "--preset",
            "e_vs_n",
            "--set",
            "demand.gamma=-1",
            "--out",
            path.to_str().unwrap(),
        ]));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("param,n_star,d_star,t_star,c_train,c_inf,profit,regime")
    );
    let n: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(n.len(), 40);
    assert!(n.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_prints_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "law.b = 1e6\n\
         sweep.parameter = \"E\"\n\
         sweep.lo = 1e3\n\
         sweep.hi = 1e9\n\
         sweep.points = 40\n\
         sweep.fit_lo = 1e7\n",
    );
    let csv_path = dir.path().join("sweep.csv");
    let text = stdout(&firmscale(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(value(&text, "fit.window"), "[1e7, 1e9]");
    let measured: f64 = value(&text, "fit.measured_slope").parse().unwrap();
    let theory: f64 = value(&text, "fit.theoretical_slope").parse().unwrap();
    assert_eq!(theory, 1.0);
    assert!((measured - theory).abs() < 0.05 * theory, "{measured}");
    assert_eq!(
        std::fs::read_to_string(csv_path).unwrap().lines().count(),
        41
    );
}

#[test]
fn sweep_without_spec_is_a_config_error() {
    assert_eq!(firmscale(&["sweep"]).status.code(), Some(2));
    assert_eq!(
        firmscale(&["sweep", "--preset", "e_vs_q"]).status.code(),
        Some(2)
    );
}

#[test]
fn elasticity_reports() {
    let text = stdout(&firmscale(&[
        "elasticity",
        "--set",
        "elasticity.alpha=0.31205",
        "--set",
        "elasticity.beta=0.31205",
    ]));
    let sigma: f64 = value(&text, "sigma").parse().unwrap();
    assert!((sigma - 0.7622).abs() < 1e-4);
    assert_eq!(value(&text, "sigma_equal_exponents"), value(&text, "sigma"));

    let text = stdout(&firmscale(&[
        "elasticity",
        "--set",
        "elasticity.alpha=1",
        "--set",
        "elasticity.beta=1",
    ]));
    assert_eq!(value(&text, "sigma"), "0.5");

    let text = stdout(&firmscale(&[
        "elasticity",
        "--set",
        "elasticity.n=1",
        "--set",
        "elasticity.d=1",
    ]));
    let closed: f64 = value(&text, "sigma").parse().unwrap();
    let oracle: f64 = value(&text, "sigma_oracle").parse().unwrap();
    assert!((closed - oracle).abs() < 1e-4 * closed);
    assert!(!text.contains("sigma_equal_exponents"));
}

#[test]
fn trends_default_report() {
    let text = stdout(&firmscale(&["trends"]));
    let r = TrendRates::default();
    assert_eq!(
        value(&text, "break_even_gamma"),
        format_number(break_even_gamma(&r).unwrap())
    );
    let g: f64 = value(&text, "break_even_gamma").parse().unwrap();
    assert!((g + 0.77).abs() < 0.01);
    assert_eq!(value(&text, "baseline.gamma[0].implied"), "4.11");
    assert_eq!(value(&text, "baseline.gamma[0].verdict"), "exceeds");
    assert_eq!(value(&text, "baseline.gamma[-1].verdict"), "within");
    assert_eq!(
        value(&text, "baseline.gamma[-1].implied"),
        format_number(implied_growth(&r, -1.0).unwrap())
    );
}

#[test]
fn trends_stalled_report() {
    let text = stdout(&firmscale(&["trends", "--stalled"]));
    let r = TrendRates::default();
    assert_eq!(value(&text, "stalled.gamma[0].implied"), "3");
    assert_eq!(
        value(&text, "stalled.gamma[-1].implied"),
        format_number(stalled_hardware_growth(&r, -1.0).unwrap())
    );
    assert!(!text.contains("baseline"));
    assert!(!text.contains("break_even_gamma"));
}

#[test]
fn trends_custom_rates_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trends.csv");
    let text = stdout(&firmscale(&[
        "trends",
        "--set",
        "trends.split=1",
        "--set",
        "trends.g_E=2",
        "--out",
        csv.to_str().unwrap(),
    ]));
    let r = TrendRates {
        split: 1.0,
        g_e: 2.0,
        ..TrendRates::default()
    };
    assert_eq!(
        value(&text, "baseline.gamma[-1].implied"),
        format_number(implied_growth(&r, -1.0).unwrap())
    );
    assert_eq!(value(&text, "baseline.gamma[0].implied"), "18");
    let csv = std::fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("scenario,gamma,implied_growth,observed_growth,verdict\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn databound_check_reports_binding_cap() {
    let text = stdout(&firmscale(&["databound-check", "--set", "firm.D=100"]));
    assert_eq!(value(&text, "cap_binds"), "true");
    assert_eq!(value(&text, "regime"), "data-bound");
    let text = stdout(&firmscale(&["databound-check", "--set", "firm.D=1e12"]));
    assert_eq!(value(&text, "cap_binds"), "false");
    assert_eq!(value(&text, "regime"), "compute-bound");
    assert_eq!(firmscale(&["databound-check"]).status.code(), Some(2));
}

#[test]
fn oracle_check_agrees() {
    let text = stdout(&firmscale(&["oracle-check", "--set", "oracle.points=30"]));
    assert_eq!(value(&text, "solver_dominates"), "true");
    assert_eq!(value(&text, "within_one_cell"), "true");
}
