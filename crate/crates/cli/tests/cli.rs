use std::path::Path;
use std::process::Command as Process;

use endfire::de::Schedule;
use endfire::excitation::ArrayMode;
use endfire::workflows::DesignKind;
use endfire_cli::config::{FeedSetting, Format, Overrides, RunConfig};
use endfire_cli::emit::{load_design, Envelope};
use endfire_cli::main_with;
use proptest::prelude::*;
use serde_json::Value;

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("endfire").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn empty_config_gives_model_defaults() {
    for text in ["", "{}"] {
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.model.frequency_hz, 3.5e9);
        assert_eq!(cfg.model.max_input_power_w, 0.5);
        assert_eq!(cfg.model.z0_ohm, 73.0);
        assert_eq!(cfg.feed, FeedSetting::Sweep);
        assert_eq!(cfg.output.format, Format::Json);
    }
    let de = RunConfig::default().de_config(2, ArrayMode::Parasitic).unwrap();
    assert_eq!((de.population, de.generations), (10, 20));
    assert_eq!((de.crossover, de.mutation), (0.8, 0.7));
    assert_eq!(de.bounds, vec![(0.05, 0.5)]);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.json");
    std::fs::write(&file, r#"{"n": 4, "seed": 3, "optimizer": {"crossover": 0.8, "population": 30}}"#).unwrap();
    let flags = Overrides {
        cr: Some(0.9),
        ..Overrides::default()
    };
    let cfg = RunConfig::resolve(Some(&file), &flags).unwrap();
    let de = cfg.de_config(cfg.size().unwrap(), ArrayMode::Active).unwrap();
    assert_eq!(de.crossover, 0.9);
    assert_eq!(de.population, 30);
    assert_eq!(de.seed, 3);
    assert_eq!(de.bounds.len(), 3);
}

#[test]
fn single_element_rejected_for_optimizers() {
    for cmd in ["optimize-active", "optimize-parasitic"] {
        let r = run(&[cmd, "--n", "1"]);
        assert_eq!(r.code, 2, "{cmd}: {}", r.stderr);
        assert!(r.stderr.contains("`n`"), "{}", r.stderr);
    }
    assert_eq!(run(&["optimize-parasitic"]).code, 2);
}

#[test]
fn unknown_and_out_of_range_keys_name_their_path() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"optimizer": {"crosover": 0.8}}"#, "optimizer.crosover"),
        (r#"{"model": {"z0_ohm": -5}}"#, "model.z0_ohm"),
        (r#"{"optimizer": {"crossover": 1.5}}"#, "optimizer.crossover"),
        (r#"{"optimizer": {"gap_min_lambda": 0.4, "gap_max_lambda": 0.3}}"#, "optimizer.gap_max_lambda"),
        (r#"{"feed": "first"}"#, "feed"),
        (r#"{"n": "two"}"#, "n"),
        ("{", "<root>"),
    ];
    for (k, (text, key)) in cases.iter().enumerate() {
        let file = dir.path().join(format!("c{k}.json"));
        std::fs::write(&file, text).unwrap();
        let r = run(&["optimize-active", "--n", "3", "--config", path(&file)]);
        assert_eq!(r.code, 2, "{text}: {}", r.stderr);
        assert!(r.stderr.contains(&format!("`{key}`")), "{text}: {}", r.stderr);
    }
    let r = run(&["optimize-parasitic", "--n", "3", "--feed", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("`feed`"));
    assert_eq!(run(&["optimize-parasitic", "--n", "3", "--feed", "0"]).code, 2);
    assert_eq!(run(&["ula", "--n", "3", "--format", "xml"]).code, 2);
}

#[test]
fn parasitic_pair_csv_rows() {
    let r = run(&["optimize-parasitic", "--n", "2", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines, ["n,d_n_lambda,current_abs,current_phase_deg,load_ohm", "1,0,,,4.07", "2,0.21,1.0,0,"]);

    let dir = tempfile::tempdir().unwrap();
    let r = run(&["optimize-parasitic", "--n", "2", "--format", "csv", "--out", path(dir.path())]);
    assert_eq!(r.code, 0);
    let summary = std::fs::read_to_string(dir.path().join("optimize-parasitic-summary.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(summary.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let row = rows.records().next().unwrap().unwrap();
    let col = |name: &str| row[headers.iter().position(|h| h == name).unwrap()].to_string();
    assert_eq!(col("kind"), "parasitic");
    assert_eq!(col("feed"), "2");
    assert!((col("realized_gain_dbi").parse::<f64>().unwrap() - 6.21).abs() < 0.01);
}

#[test]
fn active_csv_has_currents_and_no_loads() {
    let r = run(&["optimize-active", "--n", "3", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    let recs: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| !r[2].is_empty() && !r[3].is_empty() && r[4].is_empty()));
    assert!(recs.iter().any(|r| &r[2] == "1.0"));
}

#[test]
fn json_round_trip_reevaluates_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, n) in [("optimize-parasitic", "4"), ("optimize-active", "3"), ("ula", "5")] {
        let r = run(&[cmd, "--n", n, "--out", path(dir.path())]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let file = dir.path().join(format!("{cmd}.json"));
        let env: Envelope<Value> = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(env.provenance.command, cmd);
        assert_eq!(env.provenance.config_sha256.len(), 64);
        let design = load_design(&file).unwrap();
        let again = design.reevaluate().unwrap().realized_gain_dbi().unwrap();
        assert!((again - design.realized_gain_dbi()).abs() <= 1e-9, "{cmd}");
        assert_eq!(design.positions_m.len(), design.positions_lambda.len());

        let r = run(&["evaluate", "--input", path(&file), "--format", "csv", "--out", path(&dir.path().join("ev"))]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let summary = std::fs::read_to_string(dir.path().join("ev/evaluate-summary.csv")).unwrap();
        let g: f64 = summary.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
        assert!((g - design.realized_gain_dbi()).abs() <= 1e-9);
    }
}

fn runtime_line(line: &str) -> bool {
    ["\"runtime_s\"", "\"total_s\"", "\"per_evaluation_s\""]
        .iter()
        .any(|k| line.trim_start().starts_with(k))
}

#[test]
fn same_seed_same_bytes_apart_from_runtime() {
    let args = ["optimize-parasitic", "--n", "4", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!((a.code, b.code), (0, 0));
    let (la, lb): (Vec<&str>, Vec<&str>) = (a.stdout.lines().collect(), b.stdout.lines().collect());
    assert_eq!(la.len(), lb.len());
    let differing: Vec<_> = la.iter().zip(&lb).filter(|(x, y)| x != y).collect();
    assert!(differing.iter().all(|(x, y)| runtime_line(x) && runtime_line(y)), "{differing:?}");
    assert!(la.iter().any(|l| runtime_line(l)));

    let c = run(&["optimize-parasitic", "--n", "4", "--seed", "12"]);
    let hash = |s: &str| serde_json::from_str::<Value>(s).unwrap()["provenance"]["config_sha256"].clone();
    assert_ne!(hash(&a.stdout), hash(&c.stdout));
    assert_eq!(hash(&a.stdout), hash(&b.stdout));
}

#[test]
fn sequential_flag_does_not_change_the_design() {
    let a = run(&["optimize-parasitic", "--n", "3", "--seed", "2"]);
    let b = run(&["optimize-parasitic", "--n", "3", "--seed", "2", "--sequential"]);
    let design = |s: &str| {
        let v: Value = serde_json::from_str(s).unwrap();
        (v["result"]["positions_m"].clone(), v["result"]["drive"].clone())
    };
    assert_eq!(design(&a.stdout), design(&b.stdout));
}

#[test]
fn generational_schedule_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    std::fs::write(&file, r#"{"n": 3, "optimizer": {"schedule": "generational", "generations": 40}}"#).unwrap();
    let r = run(&["optimize-parasitic", "--config", path(&file)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let env: Envelope<endfire::workflows::DesignResult> = serde_json::from_str(&r.stdout).unwrap();
    let opt = env.result.optimizer.unwrap();
    assert_eq!(opt.schedule, Schedule::Generational);
    assert_eq!(opt.generations, 40);
    assert_eq!(env.config.n, Some(3));
}

#[test]
fn infeasible_and_initialization_failures_exit_3() {
    let r = run(&["evaluate", "--kind", "active", "--positions-lambda", "0,0.01,0.02"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let r = run(&["optimize-active", "--n", "7", "--gap-min-lambda", "0.01", "--gap-max-lambda", "0.02"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("feasible"), "{}", r.stderr);
}

#[test]
fn evaluate_explicit_parasitic_layout() {
    let r = run(&["evaluate", "--kind", "parasitic", "--positions-lambda", "0,0.21", "--loads", "4.07,", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("1,0,,,4.07\n2,0.21,1.0,0,\n"), "{}", r.stdout);
    assert!(r.stderr.contains("6.2"), "{}", r.stderr);

    // loads derived from the driven array when omitted
    let r = run(&["evaluate", "--kind", "parasitic", "--positions-lambda", "0,0.21", "--feed", "2"]);
    assert_eq!(r.code, 0);
    let env: Envelope<endfire::workflows::DesignResult> = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(env.result.kind, DesignKind::Parasitic);
    assert_eq!(env.result.feed(), Some(1));

    let bad = [
        vec!["--loads", "4.07,1.0"],
        vec!["--loads", "4.07"],
        vec!["--loads", "4.07,", "--feed", "1"],
        vec!["--n", "3", "--loads", "4.07,"],
    ];
    for extra in bad {
        let mut args = vec!["evaluate", "--kind", "parasitic", "--positions-lambda", "0,0.21"];
        args.extend(extra.iter().copied());
        let r = run(&args);
        assert_eq!(r.code, 2, "{extra:?}: {}", r.stderr);
    }
    assert_eq!(run(&["evaluate"]).code, 2);
}

#[test]
fn sensitivity_and_pattern_from_stored_design() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["optimize-parasitic", "--n", "3", "--out", path(dir.path())]);
    assert_eq!(r.code, 0);
    let design = dir.path().join("optimize-parasitic.json");

    let r = run(&["sensitivity", "--input", path(&design), "--format", "csv", "--samples", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["parameter", "value_min", "value_max", "gain_min_db", "gain_max_db", "infeasible_samples"]
    );
    let labels: Vec<String> = rows.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(labels.len(), 2 + 3);
    assert!(labels.iter().any(|l| l == "d1") && labels.iter().any(|l| l.starts_with('X')));

    let r = run(&["sensitivity", "--input", path(&design), "--out", path(dir.path())]);
    assert_eq!(r.code, 0);
    // the sensitivity envelope is itself a valid design source
    let nested = load_design(&dir.path().join("sensitivity.json")).unwrap();
    assert_eq!(nested, load_design(&design).unwrap());

    let r = run(&["pattern", "--input", path(&design), "--format", "csv", "--resolution-deg", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), ["theta_deg", "phi_deg", "realized_gain_db"]);
    let samples: Vec<(f64, f64, f64)> = rows
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect();
    assert_eq!(samples.len(), 72);
    assert!(samples.iter().all(|s| s.0 == 90.0));
    let peak = samples.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
    assert_eq!(peak.1, 0.0);

    let r = run(&["pattern", "--input", path(&design), "--resolution-deg", "20"]);
    assert_eq!(r.code, 2, "{}", r.stderr);

    let active = dir.path().join("a");
    assert_eq!(run(&["optimize-active", "--n", "2", "--out", path(&active)]).code, 0);
    let r = run(&["sensitivity", "--input", path(&active.join("optimize-active.json"))]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn bad_design_input_is_reported_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    std::fs::write(&file, r#"{"result": {"kind": "active"}}"#).unwrap();
    let r = run(&["evaluate", "--input", path(&file)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.json"), "{}", r.stderr);
    let r = run(&["evaluate", "--input", path(&dir.path().join("missing.json"))]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("missing.json"), "{}", r.stderr);
}

#[test]
fn unwritable_output_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let r = run(&["ula", "--n", "3", "--out", path(&target)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("blocker"), "{}", r.stderr);
}

#[test]
fn reproduce_published_designs() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["reproduce-tables", "--no-optimize", "--format", "csv", "--out", path(dir.path())]);
    assert_eq!(r.code, 0, "{}\n{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("rows within tolerance"));
    let table = std::fs::read_to_string(dir.path().join("reproduce-tables.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(table.as_bytes());
    let recs: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert!(recs.len() >= 30);
    assert!(recs.iter().all(|r| &r[7] == "true"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_endfire");
    let status = |args: &[&str]| Process::new(bin).args(args).output().unwrap();
    let ok = status(&["ula", "--n", "2", "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("n,d_n_lambda"));
    assert_eq!(status(&["optimize-active", "--n", "1"]).status.code(), Some(2));
    assert_eq!(status(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
    assert_eq!(
        status(&["evaluate", "--kind", "active", "--positions-lambda", "0,0.01,0.02"]).status.code(),
        Some(3)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_survives_json(
        n in proptest::option::of(2usize..9),
        seed in any::<u64>(),
        port in proptest::option::of(1usize..9),
        cr in 0.0f64..=1.0,
        f in 0.01f64..2.0,
        lo in 0.01f64..0.3,
        width in 0.01f64..0.5,
        np in proptest::option::of(4usize..200),
        freq in 1e6f64..1e11,
    ) {
        let flags = Overrides {
            n,
            seed: Some(seed),
            feed: port.map(FeedSetting::Port),
            cr: Some(cr),
            f_factor: Some(f),
            gap_min_lambda: Some(lo),
            gap_max_lambda: Some(lo + width),
            np,
            freq_hz: Some(freq),
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(None, &flags).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash("optimize-active"), cfg.hash("optimize-active"));
        if let Some(n) = n {
            let de = back.de_config(n, ArrayMode::Parasitic).unwrap();
            prop_assert_eq!((de.crossover, de.mutation, de.seed), (cr, f, seed));
            prop_assert!(de.bounds.iter().all(|&b| b == (lo, lo + width)));
        }
    }

    #[test]
    fn feed_text_round_trip(k in 1usize..1000) {
        let s = FeedSetting::Port(k);
        prop_assert_eq!(s.to_string().parse::<FeedSetting>().unwrap(), s);
        let j = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<FeedSetting>(&j).unwrap(), s);
    }
}
