use firmscale::firm::Regime;
use firmscale::solver::maximize;
use firmscale::statics::{
    default_window, exponent_report, fit_slope, sweep, theoretical_exponents, Column, Preset,
    SweepParameter, SweepRow, SweepSpec,
};
use firmscale::{DemandParams, FirmParams, LeontiefLaw};

fn firm(gamma: f64, law: LeontiefLaw, e: f64) -> FirmParams {
    FirmParams::new(DemandParams::new(1.0, 1.0, gamma).unwrap(), law, e, None).unwrap()
}

fn unit_law() -> LeontiefLaw {
    LeontiefLaw::new(1.0, 0.3, 1.0, 0.3).unwrap()
}

fn column(rows: &[SweepRow], col: Column) -> Vec<f64> {
    rows.iter()
        .map(|r| {
            let s = r.solution().expect("row solved");
            assert_ne!(s.regime, Regime::Shutdown, "row at {} shut down", r.param);
            match col {
                Column::NStar => s.n_star,
                Column::CTrain => s.c_train,
                _ => unreachable!(),
            }
        })
        .collect()
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn linear_demand_panels_grow_with_hardware() {
    let base = firm(-1.0, unit_law(), 1e6);
    for preset in [Preset::EVsN, Preset::EVsC] {
        let rows = sweep(&preset.spec(base)).unwrap();
        assert!(
            increasing(&column(&rows, preset.column())),
            "{}",
            preset.name()
        );
    }
}

#[test]
fn linear_demand_spend_is_subquadratic_in_hardware() {
    let spec = Preset::EVsC.spec(firm(-1.0, unit_law(), 1e6));
    let rows = sweep(&spec).unwrap();
    let fit = fit_slope(&rows, Column::Param, Column::CTrain, (spec.lo, spec.hi)).unwrap();
    assert!(fit.slope > 0.0 && fit.slope < 2.0, "{}", fit.slope);
}

#[test]
fn linear_demand_size_shrinks_with_parameter_efficiency() {
    let rows = sweep(&Preset::AVsN.spec(firm(-1.0, unit_law(), 1e6))).unwrap();
    assert!(decreasing(&column(&rows, Column::NStar)));
}

#[test]
fn linear_demand_spend_rises_with_parameter_efficiency() {
    // n* falls, but the matched d* = (a/b)^(1/beta) n* rises faster
    let rows = sweep(&Preset::AVsC.spec(firm(-1.0, unit_law(), 1e6))).unwrap();
    assert!(increasing(&column(&rows, Column::CTrain)));
}

#[test]
fn measured_slopes_respect_upper_bounds() {
    for gamma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let spec = SweepSpec {
            parameter: SweepParameter::Efficiency,
            lo: 1e3,
            hi: 1e9,
            points: 40,
            base: firm(gamma, unit_law(), 1.0),
        };
        let rows = sweep(&spec).unwrap();
        let theory = theoretical_exponents(gamma, 0.3).unwrap();
        let report =
            exponent_report(&rows, Column::NStar, default_window(&spec), theory.n_wrt_e).unwrap();
        assert!(
            report.measured_slope <= 1.05 * report.theoretical_slope,
            "gamma {gamma}: {report:?}"
        );
        assert!((0.0..=1.0).contains(&report.fit_r2));
    }
}

#[test]
fn exponents_are_attained_when_inference_dominates() {
    // b = 1e6 makes rho tiny, so training is nearly free over this E range
    let law = LeontiefLaw::new(1.0, 0.3, 1e6, 0.3).unwrap();
    for gamma in [-1.0, 0.0, 1.0] {
        let spec = SweepSpec {
            parameter: SweepParameter::Efficiency,
            lo: 1e3,
            hi: 1e9,
            points: 40,
            base: firm(gamma, law, 1.0),
        };
        assert!(spec.hi < spec.base.with_efficiency(spec.hi).interior_threshold());
        let rows = sweep(&spec).unwrap();
        let window = default_window(&spec);
        let theory = theoretical_exponents(gamma, 0.3).unwrap();
        let n = fit_slope(&rows, Column::Param, Column::NStar, window).unwrap();
        let c = fit_slope(&rows, Column::Param, Column::CTrain, window).unwrap();
        assert!(
            (n.slope / theory.n_wrt_e - 1.0).abs() < 0.05,
            "gamma {gamma}: n slope {}",
            n.slope
        );
        assert!(
            (c.slope / theory.c_wrt_e - 1.0).abs() < 0.05,
            "gamma {gamma}: C slope {}",
            c.slope
        );
    }
}

#[test]
fn log_demand_slope_is_below_bound_in_training_regime() {
    let spec = SweepSpec {
        parameter: SweepParameter::Efficiency,
        lo: 1e6,
        hi: 1e12,
        points: 40,
        base: firm(0.0, unit_law(), 1.0),
    };
    assert!(spec.lo > spec.base.interior_threshold());
    let rows = sweep(&spec).unwrap();
    let fit = fit_slope(&rows, Column::Param, Column::NStar, default_window(&spec)).unwrap();
    // n* grows like sqrt(E ln E) here
    assert!(fit.slope > 0.5 && fit.slope < 0.6, "{}", fit.slope);
}

#[test]
fn data_cap_sweep_slope_follows_exponent_ratio() {
    for (alpha, beta) in [(0.3, 0.3), (0.3, 0.5), (0.5, 0.25)] {
        let law = LeontiefLaw::new(1.0, alpha, 1.0, beta).unwrap();
        let base = firm(0.0, law, 1e12);
        let free = maximize(&base).unwrap();
        let hi = free.d_star / 10.0;
        // keep quality above 2 so the capped firm stays open
        let lo = (hi / 1e3).max(law.matched_d(2f64.powf(1.0 / alpha)).unwrap());
        assert!(hi / lo > 30.0, "{alpha}, {beta}: [{lo}, {hi}]");
        let spec = SweepSpec {
            parameter: SweepParameter::DataCap,
            lo,
            hi,
            points: 25,
            base,
        };
        let rows = sweep(&spec).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.solution().unwrap().regime == Regime::DataBound));
        let fit = fit_slope(&rows, Column::Param, Column::CTrain, (spec.lo, spec.hi)).unwrap();
        let want = 1.0 + beta / alpha;
        assert!(
            (fit.slope - want).abs() < 1e-9 * want,
            "{alpha}, {beta}: {}",
            fit.slope
        );
    }
}

#[test]
fn capped_spend_falls_with_hardware_efficiency() {
    let spec = SweepSpec {
        parameter: SweepParameter::Efficiency,
        lo: 1e9,
        hi: 1e12,
        points: 20,
        base: firm(0.0, unit_law(), 1e9).with_data_cap(Some(500.0)),
    };
    let rows = sweep(&spec).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.solution().unwrap().regime == Regime::DataBound));
    assert!(decreasing(&column(&rows, Column::CTrain)));
}

#[test]
fn rows_are_ordered_and_consistent() {
    let spec = SweepSpec {
        parameter: SweepParameter::DataEfficiency,
        lo: 0.5,
        hi: 5.0,
        points: 17,
        base: firm(0.5, unit_law(), 1e7),
    };
    let rows = sweep(&spec).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.param).collect::<Vec<_>>(),
        spec.values()
    );
    for r in &rows {
        let s = r.solution().unwrap();
        assert_eq!(s.c_train, 6.0 * s.n_star * s.d_star / 1e7);
    }
    assert_eq!(sweep(&spec).unwrap(), rows);
}
