use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use endfire::excitation::{self, ArrayMode};
use endfire::exec::{map_indices, Execution};
use endfire::network;
use endfire::performance::Drive;
use endfire::reference::ReferenceData;
use endfire::workflows::reproduce::golden_rows;
use endfire::workflows::{
    default_de_config, evaluate_design, optimize_active, optimize_parasitic, pattern_export, sensitivity, ula_baseline,
    Cut, DesignKind, DesignResult, FeedPolicy, Parameter, PatternSpec, SensitivitySpec,
};
use endfire::{Direction, Error, ModelParams};

fn params() -> ModelParams {
    ModelParams::default()
}

/// Seed-0 optimized designs for N = 2..5, both architectures.
fn designs() -> &'static HashMap<(DesignKind, usize), DesignResult> {
    static CACHE: OnceLock<HashMap<(DesignKind, usize), DesignResult>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let jobs: Vec<(DesignKind, usize)> = [DesignKind::Active, DesignKind::Parasitic]
            .into_iter()
            .flat_map(|k| (2..=5).map(move |n| (k, n)))
            .collect();
        let p = params();
        let results = map_indices(Execution::Parallel, jobs.len(), |j| {
            let (kind, n) = jobs[j];
            match kind {
                DesignKind::Active => optimize_active(n, &p, &default_de_config(n, ArrayMode::Active, 0)),
                _ => optimize_parasitic(n, &p, &default_de_config(n, ArrayMode::Parasitic, 0), FeedPolicy::Sweep),
            }
            .unwrap()
        });
        jobs.into_iter().zip(results).collect()
    })
}

fn design(kind: DesignKind, n: usize) -> &'static DesignResult {
    &designs()[&(kind, n)]
}

fn published(n: usize) -> DesignResult {
    let p = params();
    let d = ReferenceData::bundled().parasitic_design(n).unwrap();
    evaluate_design(DesignKind::Parasitic, &d.layout(&p).unwrap(), &d.drive(), &p, Direction::END_FIRE).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn active_designs() {
    let d = design(DesignKind::Active, 2);
    assert!((d.positions_lambda[1] - 0.27).abs() < 0.03);
    assert!((d.realized_gain_dbi() - 5.85).abs() < 0.2);
    let d = design(DesignKind::Active, 3);
    assert!(close(&d.positions_lambda, &[0.0, 0.41, 0.70], 0.03), "{:?}", d.positions_lambda);
    let d = design(DesignKind::Active, 5);
    assert!((d.size_lambda() - 1.58).abs() < 0.05);
    for n in 2..=5 {
        let d = design(DesignKind::Active, n);
        let peak = d.normalized_currents.iter().map(|c| c.amplitude).fold(0.0, f64::max);
        assert_eq!(peak, 1.0);
        let trace = d.trace.as_ref().unwrap();
        assert_eq!(trace.best_fitness, d.realized_gain_dbi());
        assert!(d.runtime.total_s > 0.0 && d.runtime.per_evaluation_s > 0.0);
    }
}

#[test]
fn parasitic_designs() {
    let p = params();
    let d = design(DesignKind::Parasitic, 2);
    assert!((d.positions_lambda[1] - 0.21).abs() < 0.03);
    assert!((d.realized_gain_dbi() - 6.21).abs() < 0.2);
    assert_eq!(d.feed(), Some(1));
    let x1 = d.loads().unwrap()[0].unwrap();
    assert!((x1 - 4.07).abs() < 0.05, "{x1}");
    // The stored load is the negated active reactance at the stored layout.
    let l = d.layout().unwrap();
    let cm = network::assemble_active(&l, &p).unwrap();
    let i = excitation::optimal_excitation(&cm, Direction::END_FIRE, &l, &p).unwrap();
    let z = excitation::driving_impedances(&cm, &i)[0].unwrap();
    assert!((z.im + x1).abs() < 1e-9);

    let d = design(DesignKind::Parasitic, 4);
    let loads: Vec<f64> = d.loads().unwrap().iter().flatten().copied().collect();
    assert!(close(&loads, &[-5.21, -53.31, -48.11], 0.5), "{loads:?}");
    assert!((d.realized_gain_dbi() - 9.88).abs() < 0.2);

    let d = design(DesignKind::Parasitic, 5);
    let loads: Vec<f64> = d.loads().unwrap().iter().flatten().copied().collect();
    assert!(close(&loads, &[-4.33, -51.95, -59.67, -66.58], 0.1), "{loads:?}");
    assert!((d.report.radiation_efficiency - 0.988).abs() < 0.002);
    // Published full-wave total/radiation efficiency ratio.
    assert!((d.report.reflection_efficiency - 0.8688 / 0.9880).abs() < 0.05);
}

#[test]
fn seven_element_parasitic_size() {
    let p = params();
    let d = optimize_parasitic(7, &p, &default_de_config(7, ArrayMode::Parasitic, 0), FeedPolicy::Sweep).unwrap();
    assert!((d.size_lambda() - 2.34).abs() < 0.05, "{}", d.size_lambda());
}

#[test]
fn fixed_feed_policy() {
    let p = params();
    let cfg = default_de_config(3, ArrayMode::Parasitic, 5);
    let d = optimize_parasitic(3, &p, &cfg, FeedPolicy::Port(0)).unwrap();
    assert_eq!(d.feed(), Some(0));
    let sweep = optimize_parasitic(3, &p, &cfg, FeedPolicy::Sweep).unwrap();
    assert!(sweep.realized_gain_dbi() >= d.realized_gain_dbi() - 1e-9);
    assert!(matches!(
        optimize_parasitic(3, &p, &cfg, FeedPolicy::Port(3)),
        Err(Error::InvalidParameter { name: "feed", .. })
    ));
    assert!(optimize_parasitic(1, &p, &default_de_config(1, ArrayMode::Parasitic, 0), FeedPolicy::Sweep).is_err());
}

#[test]
fn uniform_baseline() {
    let p = params();
    let d = ula_baseline(2, 0.5, &p).unwrap();
    assert!((d.realized_gain_dbi() - 4.29).abs() < 0.3);
    let d = ula_baseline(7, 0.5, &p).unwrap();
    assert!((d.realized_gain_dbi() - 7.63).abs() < 0.3);
    assert!((d.size_lambda() - 3.0).abs() < 1e-12);
    assert!(d.normalized_currents.iter().all(|c| (c.amplitude - 1.0).abs() < 1e-12));
}

#[test]
fn gain_grows_with_size_and_architecture_order_holds() {
    let p = params();
    let mut last = [f64::NEG_INFINITY; 3];
    for n in 2..=5 {
        let ula = ula_baseline(n, 0.5, &p).unwrap();
        let act = design(DesignKind::Active, n);
        let par = design(DesignKind::Parasitic, n);
        let g = [ula.realized_gain_dbi(), act.realized_gain_dbi(), par.realized_gain_dbi()];
        assert!(g[2] >= g[1] && g[1] >= g[0], "N={n}: {g:?}");
        for k in 0..3 {
            assert!(g[k] > last[k], "N={n}");
        }
        last = g;
        assert!(act.size_lambda() <= ula.size_lambda() && par.size_lambda() <= ula.size_lambda());
    }
}

#[test]
fn stored_designs_reevaluate_exactly() {
    for d in designs().values() {
        let again = d.reevaluate().unwrap().realized_gain_dbi().unwrap();
        assert!((again - d.realized_gain_dbi()).abs() < 1e-9);
        let text = serde_json::to_string(d).unwrap();
        let back: DesignResult = serde_json::from_str(&text).unwrap();
        let again = back.reevaluate().unwrap().realized_gain_dbi().unwrap();
        assert!((again - d.realized_gain_dbi()).abs() < 1e-9);
    }
}

#[test]
fn sensitivity_of_five_element_design() {
    let d = design(DesignKind::Parasitic, 5);
    let s = sensitivity(d, &SensitivitySpec::default()).unwrap();
    assert!((s.nominal_db - 11.06).abs() < 0.01);
    assert_eq!(s.rows.len(), 4 + 5);
    let row = |label: &str| s.rows.iter().find(|r| r.label == label).unwrap();
    let x4 = row("X4");
    assert_eq!(x4.parameter, Parameter::Load(3));
    let lo = x4.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x4.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo - -62.66).abs() < 0.1 && (hi - -56.69).abs() < 0.1, "{:?}", x4.values);
    let r = x4.range_db.unwrap();
    assert!((r[0] - 11.05).abs() <= 0.1 && (r[1] - 11.07).abs() <= 0.1, "{r:?}");
    let d2 = row("d2");
    assert!((d2.values[0] - 0.39).abs() < 0.01 && (d2.values[20] - 0.43).abs() < 0.01);
    let r = d2.range_db.unwrap();
    assert!((r[0] - 10.93).abs() <= 0.1 && (r[1] - 11.07).abs() <= 0.1, "{r:?}");
    assert!(s.rows.iter().all(|r| r.infeasible == 0 && r.gains_db.len() == 21));
}

#[test]
fn zero_width_sweep_collapses_to_nominal() {
    let d = design(DesignKind::Parasitic, 5);
    for rederive_loads in [true, false] {
        let spec = SensitivitySpec {
            scale: 0.0,
            samples: 5,
            rederive_loads,
        };
        let s = sensitivity(d, &spec).unwrap();
        for r in &s.rows {
            let [lo, hi] = r.range_db.unwrap();
            assert!((lo - s.nominal_db).abs() < 1e-9 && (hi - s.nominal_db).abs() < 1e-9, "{}", r.label);
        }
    }
    let active = design(DesignKind::Active, 3);
    assert!(sensitivity(active, &SensitivitySpec::default()).is_err());
}

#[test]
fn azimuth_cut_peaks_at_end_fire() {
    for n in 2..=7 {
        let d = published(n);
        let cut = pattern_export(&d, &PatternSpec::default()).unwrap();
        assert_eq!(cut.samples.len(), 360);
        assert!(cut.samples.iter().all(|s| s.theta_deg == 90.0));
        let peak = cut.peak().unwrap();
        assert_eq!(peak.phi_deg, 0.0, "N={n}");
        assert!((peak.realized_gain_db - d.realized_gain_dbi()).abs() < 1e-9);
    }
    let cut = pattern_export(design(DesignKind::Parasitic, 2), &PatternSpec::default()).unwrap();
    assert!((cut.peak().unwrap().realized_gain_db - 6.21).abs() < 0.2);
}

#[test]
fn sphere_pattern_integrates_to_total_efficiency() {
    for d in [published(3), design(DesignKind::Active, 4).clone()] {
        let spec = PatternSpec {
            cut: Cut::Sphere,
            resolution_deg: 1.0,
        };
        let pat = pattern_export(&d, &spec).unwrap();
        let (dt, dp) = (pat.theta_step_deg.to_radians(), pat.phi_step_deg.to_radians());
        let n_theta = (180.0 / pat.theta_step_deg).round() as usize;
        let mut total = 0.0;
        for s in &pat.samples {
            let k = (s.theta_deg / pat.theta_step_deg).round() as usize;
            let w = if k == 0 || k == n_theta { 0.5 } else { 1.0 };
            total += w * s.realized_gain * s.theta_deg.to_radians().sin() * dt * dp;
        }
        let want = d.report.reflection_efficiency * d.report.radiation_efficiency;
        assert!((total / (4.0 * PI) - want).abs() < 1e-3 * want, "{} vs {want}", total / (4.0 * PI));
        let peak = pat.peak().unwrap().realized_gain / want;
        assert!(peak >= 1.0);
        assert!(pat.samples.iter().all(|s| s.realized_gain_db >= -300.0));
    }
}

#[test]
fn pattern_resolution_is_validated() {
    let d = published(2);
    for bad in [0.05, 10.5, f64::NAN] {
        let spec = PatternSpec {
            cut: Cut::Azimuth,
            resolution_deg: bad,
        };
        assert!(pattern_export(&d, &spec).is_err());
    }
    let spec = PatternSpec {
        cut: Cut::Sphere,
        resolution_deg: 7.0,
    };
    let pat = pattern_export(&d, &spec).unwrap();
    assert!(pat.theta_step_deg <= 7.0 && pat.phi_step_deg <= 7.0);
    assert_eq!(pat.samples[0].realized_gain_db, -300.0);
}

#[test]
fn evaluate_design_rejects_infeasible_drive() {
    let p = params();
    let l = endfire::ArrayLayout::from_wavelengths(&[0.0, 0.1], &p).unwrap();
    let drive = Drive::Active {
        currents: Some(vec![endfire::Complex64::new(1.0, 0.0), endfire::Complex64::new(-0.2, 0.0)]),
    };
    assert!(matches!(
        evaluate_design(DesignKind::Active, &l, &drive, &p, Direction::END_FIRE),
        Err(Error::Constraint(_))
    ));
}

#[test]
fn published_tables_reproduce() {
    let rows = golden_rows(&params()).unwrap();
    assert_eq!(rows.len(), 6 + 6 + 4 + 6 + 4 + 4);
    for r in &rows {
        assert!(r.pass, "{r:?}");
    }
}
