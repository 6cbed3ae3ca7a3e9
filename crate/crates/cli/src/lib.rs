//! Command-line front end: scenario ingestion, single-point analyses, parameter sweeps,
//! figure presets and the verification battery.
//!
//! Exit codes: 0 success, 1 the analysis ran but a regime gate or condition failed (the
//! report is still written), 2 usage or input error, 3 numeric failure.

pub mod analysis;
pub mod scenario;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use dirty_region::figures::{render, PRESETS};
use dirty_region::mc_oracle::SampleConfig;
use dirty_region::region::{curve_to_csv, render_svg, PlotSpec, Series};
use dirty_region::verification::verify_all;
use rayon::prelude::*;
use serde_json::json;

use analysis::{columns, evaluate, Status};
use scenario::{Analysis, Model, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dirty-region", version, about = "Capacity bounds and regime checks for state-dependent Gaussian channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Directory for reports, tables and plots; stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Replace a scenario value, e.g. `a=2.5`, `seed=7`, `grid.segment_points=201`.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads for sweeps and grid scans.
    #[arg(long, global = true, env = "DIRTY_REGION_JOBS")]
    jobs: Option<usize>,
    /// Replace exported boundaries by their concave hulls (time sharing).
    #[arg(long, global = true)]
    convexify: bool,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Inner and outer bounds of the helper MAC.
    MacBounds,
    /// A/B/C label of each helper-MAC rate constraint.
    MacClassify,
    /// Z-IC very strong regime check.
    ZicVerystrong,
    /// Z-IC strong regime: reachable part of the sum-capacity face.
    ZicStrong,
    /// Z-IC weak regime sum capacity.
    ZicWeak,
    /// IC very strong regime check.
    IcVerystrong,
    /// IC strong regime: reachable part of the sum-capacity face.
    IcStrong,
    /// IC weak regime sum capacity.
    IcWeak,
    /// Evaluate the scenario's analysis over one or two parameter axes.
    Sweep,
    /// Closed forms against log-determinant and Monte-Carlo evaluations.
    Verify,
    /// Reproduce a named figure as CSV and SVG.
    Fig {
        /// One of fig2_2, fig2_3, fig3_2, fig3_3, fig3_5, fig4_2, fig4_3, fig4_5.
        name: String,
    },
}

impl Command {
    fn target(&self) -> Option<(Model, Analysis)> {
        Some(match self {
            Command::MacBounds => (Model::MacHelper, Analysis::Bounds),
            Command::MacClassify => (Model::MacHelper, Analysis::Classify),
            Command::ZicVerystrong => (Model::Zic, Analysis::Verystrong),
            Command::ZicStrong => (Model::Zic, Analysis::Strong),
            Command::ZicWeak => (Model::Zic, Analysis::Weak),
            Command::IcVerystrong => (Model::Ic, Analysis::Verystrong),
            Command::IcStrong => (Model::Ic, Analysis::Strong),
            Command::IcWeak => (Model::Ic, Analysis::Weak),
            _ => return None,
        })
    }

    fn stem(&self) -> &'static str {
        match self {
            Command::MacBounds => "mac_bounds",
            Command::MacClassify => "mac_classify",
            Command::ZicVerystrong => "zic_verystrong",
            Command::ZicStrong => "zic_strong",
            Command::ZicWeak => "zic_weak",
            Command::IcVerystrong => "ic_verystrong",
            Command::IcStrong => "ic_strong",
            Command::IcWeak => "ic_weak",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
            Command::Fig { .. } => "fig",
        }
    }
}

/// An error that maps to a specific exit code.
#[derive(Debug)]
pub struct Exit(pub i32, pub anyhow::Error);

fn usage(e: anyhow::Error) -> Exit {
    Exit(EXIT_USAGE, e)
}

fn bail_usage(msg: &str) -> Result<(), Exit> {
    Err(usage(anyhow::anyhow!("{msg}")))
}

/// Runs the CLI with process stdio. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(argv, &mut out, &mut err)
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let threads = cli.jobs.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start {threads} worker threads: {e}");
            return EXIT_NUMERIC;
        }
    };
    // output is buffered so the worker pool never touches the caller's stream
    let mut buf = Vec::new();
    let res = pool.install(|| dispatch(&cli, &mut buf));
    let _ = stdout.write_all(&buf);
    match res {
        Ok(code) => code,
        Err(Exit(code, e)) => {
            let _ = writeln!(stderr, "error: {e:#}");
            code
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario, Exit> {
    let path = cli
        .scenario
        .as_deref()
        .ok_or_else(|| usage(anyhow::anyhow!("`{}` needs --scenario <FILE>", cli.command.stem().replace('_', "-"))))?;
    let mut s = scenario::load(path).map_err(usage)?;
    for o in &cli.overrides {
        s.apply_override(o).map_err(usage)?;
    }
    Ok(s)
}

fn out_dir(cli: &Cli, s: Option<&Scenario>) -> Option<PathBuf> {
    cli.out.clone().or_else(|| s.and_then(|s| s.output.dir.clone()))
}

struct Sink<'a> {
    dir: Option<PathBuf>,
    stdout: &'a mut Vec<u8>,
}

impl Sink<'_> {
    /// Writes `name` into the output directory, or its contents to stdout when there is
    /// none and `primary` is set.
    fn emit(&mut self, name: &str, contents: &str, primary: bool) -> Result<(), Exit> {
        match &self.dir {
            Some(dir) => {
                let path = write_file(dir, name, contents)?;
                writeln!(self.stdout, "{}", path.display()).map_err(|e| Exit(EXIT_NUMERIC, e.into()))
            }
            None if primary => self.stdout.write_all(contents.as_bytes()).map_err(|e| Exit(EXIT_NUMERIC, e.into())),
            None => Ok(()),
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Exit> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(usage)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)?;
    Ok(path)
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn dispatch(cli: &Cli, stdout: &mut Vec<u8>) -> Result<i32, Exit> {
    match &cli.command {
        Command::Fig { name } => {
            if !PRESETS.contains(&name.as_str()) {
                return Err(usage(anyhow::anyhow!(
                    "unknown figure preset `{name}`; expected one of {}",
                    PRESETS.join(", ")
                )));
            }
            let fig = render(name).map_err(|e| Exit(EXIT_NUMERIC, e.into()))?;
            let dir = out_dir(cli, None).unwrap_or_else(|| PathBuf::from("."));
            let mut sink = Sink { dir: Some(dir), stdout };
            sink.emit(&format!("{name}.csv"), &fig.csv, true)?;
            sink.emit(&format!("{name}.svg"), &fig.svg, true)?;
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let s = cli.scenario.as_ref().map(|_| load_scenario(cli)).transpose()?;
            let cfg = match &s {
                Some(s) => s.sample_config(),
                None => {
                    let mut cfg = SampleConfig::default();
                    for o in &cli.overrides {
                        let bad = || usage(anyhow::anyhow!("bad override `{o}`"));
                        match o.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                            Some(("seed", v)) => cfg.seed = v.parse().map_err(|_| bad())?,
                            Some(("samples", v)) => cfg.samples = v.parse().map_err(|_| bad())?,
                            _ => bail_usage("verify without a scenario accepts only seed and samples overrides")?,
                        }
                    }
                    cfg
                }
            };
            let cfg = SampleConfig::new(cfg.samples, cfg.seed).map_err(|e| usage(e.into()))?;
            let v = verify_all(cfg).map_err(|e| Exit(EXIT_NUMERIC, e.into()))?;
            let report = serde_json::to_value(&v).expect("serialisable");
            let mut sink = Sink { dir: out_dir(cli, s.as_ref()), stdout };
            sink.emit("verify.json", &to_json(&report), true)?;
            Ok(if v.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sweep => {
            let s = load_scenario(cli)?;
            let csv = sweep(&s, cli.convexify)?;
            let mut sink = Sink { dir: out_dir(cli, Some(&s)), stdout };
            sink.emit("sweep.csv", &csv.text, true)?;
            Ok(if csv.errors > 0 { EXIT_NUMERIC } else { EXIT_OK })
        }
        cmd => {
            let (model, analysis) = cmd.target().expect("analysis command");
            let s = load_scenario(cli)?;
            if s.model != model {
                return Err(usage(anyhow::anyhow!(
                    "`{}` needs a {} scenario, got {}",
                    cmd.stem().replace('_', "-"),
                    model.as_str(),
                    s.model.as_str()
                )));
            }
            let e = evaluate(model, analysis, &s.params, &s.grid, cli.convexify);
            let mut report = json!({
                "command": cmd.stem().replace('_', "-"),
                "units": "bits",
                "model": model.as_str(),
                "params": s.params,
                "status": e.status.as_str(),
                "passed": e.passed,
            });
            if e.status == Status::Gate {
                report["gate"] = json!({"passed": false, "detail": e.result["error"]});
            } else {
                report["result"] = e.result.clone();
            }
            let mut sink = Sink { dir: out_dir(cli, Some(&s)), stdout };
            sink.emit(&format!("{}.json", cmd.stem()), &to_json(&report), true)?;
            if !e.curves.is_empty() {
                let mut spec = PlotSpec::new("Helper MAC: rate region bounds", "R1 (bits)", "R2 (bits)");
                for (name, curve) in &e.curves {
                    sink.emit(&format!("{}_{name}.csv", cmd.stem()), &curve_to_csv(curve), false)?;
                    spec = spec.with(Series::from_curve(&format!("{name} bound"), curve));
                }
                if let Some(p) = e.no_state {
                    let pts = p.vertices().into_iter().map(|v| (v.r1, v.r2)).collect();
                    spec = spec.with(Series::line("no state", pts));
                }
                sink.emit(&format!("{}.svg", cmd.stem()), &render_svg(&spec), false)?;
            }
            Ok(match e.status {
                Status::Ok if e.passed => EXIT_OK,
                Status::Ok | Status::Gate => EXIT_FAILED,
                Status::Invalid => {
                    return Err(usage(anyhow::anyhow!("{}", e.result["error"].as_str().unwrap_or("invalid parameters"))))
                }
                Status::Singular | Status::Error => EXIT_NUMERIC,
            })
        }
    }
}

pub struct SweepTable {
    pub text: String,
    pub rows: usize,
    /// Points that failed numerically (not gates or singular points).
    pub errors: usize,
}

/// Evaluates the scenario's analysis on the axis grid. Rows are axis-major: the first
/// axis varies slowest. Points are evaluated in parallel; row order does not depend on
/// the thread count.
pub fn sweep(s: &Scenario, convex: bool) -> Result<SweepTable, Exit> {
    if s.sweep.is_empty() {
        return Err(usage(anyhow::anyhow!("sweep needs one or two axes in the scenario")));
    }
    let analysis = match s.analysis {
        Some(Analysis::Sweep | Analysis::Verify) | None => {
            return Err(usage(anyhow::anyhow!(
                "sweep needs `analysis` set to one of the {} analyses",
                s.model.as_str()
            )))
        }
        Some(a) => a,
    };
    let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for ax in &s.sweep {
        points = points
            .into_iter()
            .flat_map(|p| {
                ax.values().into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((ax.name.clone(), v));
                    q
                })
            })
            .collect();
    }
    let evals: Vec<_> = points
        .par_iter()
        .map(|pt| evaluate(s.model, analysis, &s.at(pt), &s.grid, convex))
        .collect();

    let mut header: Vec<&str> = s.sweep.iter().map(|a| a.name.as_str()).collect();
    header.push("status");
    header.extend(columns(s.model, analysis));
    let mut text = header.join(",");
    text.push('\n');
    let mut errors = 0;
    for (pt, e) in points.iter().zip(&evals) {
        errors += usize::from(e.status == Status::Error);
        for (_, v) in pt {
            let _ = write!(text, "{},", dirty_region::region::fmt_sig(*v));
        }
        let _ = writeln!(text, "{},{}", e.status.as_str(), e.row.join(","));
    }
    Ok(SweepTable { text, rows: points.len(), errors })
}
