use std::path::{Path, PathBuf};
use std::process::Command;

use dirty_region::channels::MacHelperParams;
use dirty_region::mac_helper::classify;
use dirty_region::region::fmt_sig;
use dirty_region_cli::{run_with, EXIT_FAILED, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("dirty-region").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const ZIC: &str = r#"{"model": "zic", "params": {"a": 2, "P1": 2, "P2": 2, "Q1": 1, "Q2": 1, "rho": 0.3}}"#;

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn unknown_command_is_a_usage_error() {
    let r = cli(&["frobnicate"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("Usage"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn help_exits_zero() {
    let r = cli(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("zic-verystrong"));
}

#[test]
fn missing_scenario_is_a_usage_error() {
    let r = cli(&["zic-weak"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("--scenario"));
}

#[test]
fn weak_command_outside_the_weak_regime_reports_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "z.json", ZIC);
    let r = cli(&["zic-weak", "--scenario", s.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_FAILED);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["units"], "bits");
    assert_eq!(v["status"], "gate");
    assert_eq!(v["passed"], false);
    assert!(v["gate"]["detail"].as_str().unwrap().contains("a^2 = 4"));

    // the report is also written when an output directory is given
    let out = dir.path().join("out");
    let r = cli(&["zic-weak", "--scenario", s.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_FAILED);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("zic_weak.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "gate");
}

#[test]
fn weak_command_inside_the_weak_regime() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "z.json", ZIC);
    let r = cli(&["zic-weak", "--scenario", s.to_str().unwrap(), "--override", "a=0.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let expected = 0.5 * (1.0f64 + 2.0 / 1.5).log2() + 0.5 * 3f64.log2();
    assert!((v["result"]["sum_capacity"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn input_errors_and_numeric_failures() {
    let dir = tempfile::tempdir().unwrap();
    let z = scenario(dir.path(), "z.json", ZIC);
    let z = z.to_str().unwrap();
    // model mismatch
    assert_eq!(cli(&["ic-weak", "--scenario", z]).code, EXIT_USAGE);
    // out-of-range parameter
    assert_eq!(cli(&["zic-weak", "--scenario", z, "--override", "P1=-1"]).code, EXIT_USAGE);
    // unknown override key
    assert_eq!(cli(&["zic-weak", "--scenario", z, "--override", "b=1"]).code, EXIT_USAGE);
    // malformed file
    let bad = scenario(dir.path(), "bad.json", "{\"model\": \"zic\",");
    assert_eq!(cli(&["zic-weak", "--scenario", bad.to_str().unwrap()]).code, EXIT_USAGE);
    // the very strong coefficient system is singular at ab = (P1+1)(P2+1)/(P1 P2)
    let ic = scenario(
        dir.path(),
        "ic.json",
        r#"{"model": "ic", "params": {"a": 2, "b": 2, "P1": 1, "P2": 1, "Q1": 0.9, "Q2": 0.9, "d": 0.5}}"#,
    );
    let r = cli(&["ic-verystrong", "--scenario", ic.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NUMERIC, "{}", r.stdout);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["status"], "singular");
}

#[test]
fn fig_writes_csv_and_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let r = cli(&["fig", "fig2_2", "--out", d.to_str().unwrap()]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        assert!(r.stdout.contains("fig2_2.csv") && r.stdout.contains("fig2_2.svg"));
    }
    for f in ["fig2_2.csv", "fig2_2.svg"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }
    let (header, rows) = csv_rows(&std::fs::read_to_string(a.join("fig2_2.csv")).unwrap());
    assert_eq!(header[0], "p0");
    assert_eq!(rows.len(), 101);
    assert!(std::fs::read_to_string(a.join("fig2_2.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = cli(&["fig", "fig9_9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("fig2_2"));
}

#[test]
fn one_point_sweep_matches_the_direct_command() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"model": "zic", "params": {"a": 4, "P1": 2, "P2": 2, "Q1": 1, "Q2": 1, "d": 0.5},
                   "analysis": "verystrong", "sweep": [{"name": "a", "lo": 3.5, "hi": 3.5, "steps": 1}]}"#;
    let s = scenario(dir.path(), "s.json", body);
    let s = s.to_str().unwrap();
    let sw = cli(&["sweep", "--scenario", s]);
    assert_eq!(sw.code, EXIT_OK, "{}", sw.stderr);
    let (header, rows) = csv_rows(&sw.stdout);
    assert_eq!(rows.len(), 1);
    let direct = cli(&["zic-verystrong", "--scenario", s, "--override", "a=3.5"]);
    assert_eq!(direct.code, EXIT_OK);
    let v: Value = serde_json::from_str(&direct.stdout).unwrap();
    let margin = v["result"]["condition"]["margin"].as_f64().unwrap();
    assert_eq!(rows[0][col(&header, "margin_bits")], fmt_sig(margin));
    assert_eq!(rows[0][col(&header, "pass")], "1");
    assert_eq!(rows[0][col(&header, "status")], "ok");
}

#[test]
fn two_axis_sweep_is_axis_major() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"model": "zic", "params": {"a": 4, "P1": 2, "P2": 2, "Q1": 1, "Q2": 1},
                   "analysis": "verystrong",
                   "sweep": [{"name": "d", "lo": 0.1, "hi": 1.0, "steps": 4}, {"name": "a", "lo": 1.0, "hi": 6.0, "steps": 6}]}"#;
    let s = scenario(dir.path(), "s.json", body);
    let r = cli(&["sweep", "--scenario", s.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(&header[..3], ["d", "a", "status"]);
    assert_eq!(rows.len(), 4 * 6);
    assert_eq!((rows[0][0].as_str(), rows[0][1].as_str()), ("0.1", "1"));
    assert_eq!((rows[1][0].as_str(), rows[1][1].as_str()), ("0.1", "2"));
    assert_eq!((rows[6][0].as_str(), rows[6][1].as_str()), ("0.4", "1"));
    assert_eq!(rows.last().unwrap()[..2], ["1".to_string(), "6".to_string()]);
    // a = 1 is outside the very strong regime
    assert_eq!(rows[0][2], "gate");
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn sweep_needs_axes_and_an_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "z.json", ZIC);
    assert_eq!(cli(&["sweep", "--scenario", s.to_str().unwrap()]).code, EXIT_USAGE);
    let body = r#"{"model": "zic", "params": {"a": 4, "P1": 2, "P2": 2, "Q1": 1, "Q2": 1},
                   "sweep": [{"name": "a", "lo": 1, "hi": 2, "steps": 2}]}"#;
    let s = scenario(dir.path(), "s.json", body);
    assert_eq!(cli(&["sweep", "--scenario", s.to_str().unwrap()]).code, EXIT_USAGE);
    let three = r#"{"model": "zic", "params": {"a": 4, "P1": 2, "P2": 2, "Q1": 1, "Q2": 1}, "analysis": "weak",
                   "sweep": [{"name": "a", "lo": 1, "hi": 2, "steps": 2}, {"name": "P1", "lo": 1, "hi": 2, "steps": 2},
                             {"name": "P2", "lo": 1, "hi": 2, "steps": 2}]}"#;
    let s = scenario(dir.path(), "t.json", three);
    assert_eq!(cli(&["sweep", "--scenario", s.to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn fig2_3_labels_match_direct_classification() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["fig", "fig2_3", "--out", dir.path().to_str().unwrap()]).code, EXIT_OK);
    let (header, rows) = csv_rows(&std::fs::read_to_string(dir.path().join("fig2_3.csv")).unwrap());
    assert_eq!(rows.len(), 40 * 41);
    let (qi, pi, li) = (col(&header, "q"), col(&header, "p0"), col(&header, "label"));
    let spots = [(0.5, 0.0), (12.0, 2.0), (12.0, 5.0), (12.0, 10.0), (4.0, 4.0), (20.0, 20.0), (7.5, 1.5)];
    for (q, p0) in spots {
        let row = rows
            .iter()
            .find(|r| r[qi] == fmt_sig(q) && r[pi] == fmt_sig(p0))
            .unwrap_or_else(|| panic!("no row for Q = {q}, P0 = {p0}"));
        let direct = classify(&MacHelperParams::new(p0, 5.0, 0.0, q).unwrap()).unwrap();
        assert_eq!(row[li], format!("{:?}", direct.labels[0]), "Q = {q}, P0 = {p0}");
    }

    // the same map through a scenario sweep
    let body = r#"{"model": "mac_helper", "params": {"P0": 5, "P1": 5, "P2": 0, "Q": 12}, "analysis": "classify",
                   "sweep": [{"name": "Q", "lo": 0.5, "hi": 20, "steps": 40}, {"name": "P0", "lo": 0, "hi": 20, "steps": 41}]}"#;
    let s = scenario(dir.path(), "m.json", body);
    let r = cli(&["sweep", "--scenario", s.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let (sh, srows) = csv_rows(&r.stdout);
    assert_eq!(srows.len(), 40 * 41);
    let sl = col(&sh, "label_r1");
    for (fig_row, sweep_row) in rows.iter().zip(&srows) {
        assert_eq!((&fig_row[qi], &fig_row[pi]), (&sweep_row[0], &sweep_row[1]));
        assert_eq!(fig_row[li], sweep_row[sl]);
    }
}

#[test]
fn mac_bounds_exports_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"model": "mac_helper", "params": {"P0": 5, "P1": 2.5, "P2": 2.5, "Q": 12},
                   "grid": {"alpha_points": 65, "beta_points": 33, "boundary_points": 51}}"#;
    let s = scenario(dir.path(), "m.json", body);
    let out = dir.path().join("out");
    let r = cli(&["mac-bounds", "--scenario", s.to_str().unwrap(), "--out", out.to_str().unwrap(), "--convexify"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    for f in ["mac_bounds.json", "mac_bounds_inner.csv", "mac_bounds_outer.csv", "mac_bounds.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("mac_bounds.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["convexified"], true);
    for k in ["max_r1", "max_r2", "max_sum"] {
        let (i, o) = (v["result"]["inner"][k].as_f64().unwrap(), v["result"]["outer"][k].as_f64().unwrap());
        assert!(i <= o + 1e-9, "{k}: inner {i} above outer {o}");
    }
    let (header, rows) = csv_rows(&std::fs::read_to_string(out.join("mac_bounds_inner.csv")).unwrap());
    assert_eq!(header, ["r1_bits", "r2_bits", "binding"]);
    assert!(!rows.is_empty());
}

#[test]
fn classify_reports_case_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "m.json", r#"{"model": "mac_helper", "params": {"P0": 15, "P1": 2, "P2": 3, "Q": 12}}"#);
    let r = cli(&["mac-classify", "--scenario", s.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    // P0 >= Q: the helper can cancel the state for every constraint
    assert_eq!(v["result"]["labels"], serde_json::json!(["C", "C", "C"]));
    assert_eq!(v["result"]["case"], 19);
}

#[test]
fn verify_passes_at_the_default_sample_size() {
    let r = cli(&["verify"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["units"], "bits");
    assert_eq!(v["passed"], true);
    assert_eq!(v["monte_carlo"].as_array().unwrap().len(), 20);
    assert_eq!(cli(&["verify", "--override", "a=1"]).code, EXIT_USAGE);
}

#[test]
fn verify_exit_code_tracks_the_report() {
    // at 2000 samples the Monte-Carlo error is far above the 0.01 bit tolerance
    let r = cli(&["verify", "--override", "samples=2000"]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(r.code, if passed { EXIT_OK } else { EXIT_FAILED });
    assert!(!passed);
}

#[test]
fn output_does_not_depend_on_the_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"model": "ic", "params": {"a": 1.6, "b": 2, "P1": 1, "P2": 1, "Q1": 0.9, "Q2": 0.9, "d": 0.5},
                   "analysis": "verystrong", "sweep": [{"name": "b", "lo": 0, "hi": 4.4, "steps": 45}]}"#;
    let s = scenario(dir.path(), "s.json", body);
    let bin = env!("CARGO_BIN_EXE_dirty-region");
    let outputs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|jobs| {
            let o = Command::new(bin)
                .args(["sweep", "--scenario", s.to_str().unwrap()])
                .env("DIRTY_REGION_JOBS", jobs)
                .output()
                .unwrap();
            assert_eq!(o.status.code(), Some(EXIT_OK));
            o.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    // b = 2.5 makes the coefficient system singular; the sweep records it and carries on
    assert!(text.lines().any(|l| l.starts_with("2.5,singular")), "{text}");
}
