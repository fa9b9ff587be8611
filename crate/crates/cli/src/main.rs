//! `triad`: build, count, squeeze, evaluate and verify triad hexagons.
//!
//! Machine output goes to stdout as JSON (or a bare decimal for `count`);
//! human-readable notes and errors go to stderr.
//! Exit codes: 0 ok, 2 bad input or constraint, 3 resource limit, 4 failed verification.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use triad_core::counting::count_tilings_with;
use triad_core::formulas::family_formula;
use triad_core::lattice::SvgAnnotations;
use triad_core::verify::{bundled_plans, parse_plans, rational_json, BUNDLED_PLANS};
use triad_core::{
    render_svg, run_sweep, CountConfig, Error, FamilySpec, Move, Region, SweepPlan, TriadHexagon, Verdict,
};

#[derive(Parser)]
#[command(name = "triad", version, about = "Lozenge tilings of hexagons with a triad of bowtie holes")]
struct Cli {
    /// JSON file with default settings (max_cells, max_frontier, jobs, seed, out).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampled sweeps (overrides plan seeds).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest region, in unit triangles, that will be counted.
    #[arg(long, global = true)]
    max_cells: Option<usize>,
    /// Output file (build, squeeze, render) or report directory (verify).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a region from a family spec or triad hexagon JSON.
    Build { input: Option<PathBuf> },
    /// Count lozenge tilings of a region.
    Count { input: Option<PathBuf> },
    /// Apply squeezing moves such as `top:out:2` to a triad hexagon.
    Squeeze {
        input: Option<PathBuf>,
        #[arg(long = "move", value_name = "BOWTIE:DIR:D")]
        moves: Vec<Move>,
        /// Squeeze out all three bowties completely (after any --move).
        #[arg(long)]
        full: bool,
    },
    /// Evaluate the closed-form formula attached to a family spec.
    Formula { input: Option<PathBuf> },
    /// Run a verification plan: a bundled plan name or a JSON plan file.
    Verify { plan: String },
    /// Render a region as SVG.
    Render { input: Option<PathBuf> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CliConfig {
    max_cells: Option<usize>,
    max_frontier: Option<usize>,
    jobs: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

impl CliConfig {
    fn load(cli: &Cli) -> Result<Self, Error> {
        let mut cfg: CliConfig = match &cli.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => CliConfig::default(),
        };
        cfg.max_cells = cli.max_cells.or(cfg.max_cells);
        cfg.jobs = cli.jobs.or(cfg.jobs);
        cfg.seed = cli.seed.or(cfg.seed);
        cfg.out = cli.out.clone().or(cfg.out);
        if cfg.max_cells == Some(0) || cfg.max_frontier == Some(0) || cfg.jobs == Some(0) {
            return Err(Error::Constraint("max_cells, max_frontier and jobs must be positive".into()));
        }
        Ok(cfg)
    }

    fn count_config(&self) -> CountConfig {
        let d = CountConfig::default();
        CountConfig { max_frontier: self.max_frontier.unwrap_or(d.max_frontier), ..d }
    }
}

/// Default cell cap for one-off counts; sweeps use their plan's caps.
const COUNT_MAX_CELLS: usize = 5000;

fn read_input(path: &Option<PathBuf>) -> Result<Value, Error> {
    let text = match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn emit(cfg: &CliConfig, text: &str) -> Result<(), Error> {
    match &cfg.out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// A family spec, a triad hexagon record, or the output of `build`.
fn as_triad(v: &Value) -> Result<TriadHexagon, Error> {
    if let Some(th) = v.get("triad_hexagon") {
        return Ok(serde_json::from_value(th.clone())?);
    }
    if v.get("family").is_some() {
        return serde_json::from_value::<FamilySpec>(v.clone())?.as_triad();
    }
    Ok(serde_json::from_value(v.clone())?)
}

/// Anything `as_triad` accepts, a bare cell array, or `{"region": [...]}`.
fn as_region(v: &Value) -> Result<Region, Error> {
    if v.is_array() {
        return Ok(serde_json::from_value(v.clone())?);
    }
    if let Some(r) = v.get("region") {
        return Ok(serde_json::from_value(r.clone())?);
    }
    Ok(as_triad(v)?.region())
}

fn describe(th: &TriadHexagon) -> Value {
    let region = th.region();
    json!({
        "triad_hexagon": th,
        "side_lengths": th.frame().side_lengths(),
        "f": th.f(),
        "depths": th.depths(),
        "tileable": th.is_tileable_by_depths(),
        "cells": region.len(),
        "region": region,
    })
}

fn cmd_build(cfg: &CliConfig, input: &Option<PathBuf>) -> Result<(), Error> {
    let v = read_input(input)?;
    let th = as_triad(&v)?;
    let mut out = describe(&th);
    if let Some(name) = v.get("family").and_then(Value::as_str) {
        out["family"] = json!(name);
    }
    emit(cfg, &serde_json::to_string_pretty(&out)?)
}

fn cmd_count(cfg: &CliConfig, input: &Option<PathBuf>) -> Result<(), Error> {
    let r = as_region(&read_input(input)?)?;
    let cap = cfg.max_cells.unwrap_or(COUNT_MAX_CELLS);
    if r.len() > cap {
        return Err(Error::ResourceLimit(format!("{} cells exceed --max-cells {cap}", r.len())));
    }
    let start = Instant::now();
    let n = count_tilings_with(&r, &cfg.count_config())?;
    eprintln!("{} cells counted in {} ms", r.len(), start.elapsed().as_millis());
    println!("{n}");
    Ok(())
}

fn cmd_squeeze(cfg: &CliConfig, input: &Option<PathBuf>, moves: &[Move], full: bool) -> Result<(), Error> {
    let mut th = as_triad(&read_input(input)?)?;
    for m in moves {
        th = th.apply(m)?;
    }
    if full {
        th = th.fully_squeeze_out();
    }
    emit(cfg, &serde_json::to_string_pretty(&describe(&th))?)
}

fn cmd_formula(cfg: &CliConfig, input: &Option<PathBuf>) -> Result<(), Error> {
    #[derive(Serialize)]
    struct Row {
        target: triad_core::formulas::Target,
        #[serde(with = "rational_json")]
        value: Option<triad_core::BigRational>,
    }
    let spec: FamilySpec = serde_json::from_value(read_input(input)?)?;
    let rows: Vec<Row> =
        family_formula(&spec)?.into_iter().map(|f| Row { target: f.target, value: Some(f.value) }).collect();
    emit(cfg, &serde_json::to_string_pretty(&rows)?)
}

fn load_plans(name: &str) -> Result<Vec<SweepPlan>, Error> {
    if let Some(plans) = bundled_plans(name) {
        return Ok(plans);
    }
    let text = std::fs::read_to_string(name).map_err(|e| {
        Error::Constraint(format!(
            "{name:?} is neither a bundled plan ({}) nor a readable file: {e}",
            BUNDLED_PLANS.join(", ")
        ))
    })?;
    parse_plans(&text)
}

/// Returns whether every case passed or was skipped.
fn cmd_verify(cfg: &CliConfig, plan: &str) -> Result<bool, Error> {
    let mut plans = load_plans(plan)?;
    for p in &mut plans {
        if let Some(s) = cfg.seed {
            p.seed = s;
        }
        if cfg.jobs.is_some() {
            p.jobs = cfg.jobs;
        }
        if let Some(m) = cfg.max_cells {
            p.caps.max_cells = m;
        }
        if let Some(f) = cfg.max_frontier {
            p.caps.max_frontier = f;
        }
        p.validate()?;
    }
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
    let mut ok = true;
    for p in &plans {
        let start = Instant::now();
        let run = run_sweep(p)?;
        let (jsonl, csv) = run.write(&dir)?;
        let s = &run.summary;
        eprintln!(
            "{}: {} cases, {} pass, {} fail, {} skipped in {:.1} s -> {}, {}",
            s.plan,
            s.total,
            s.passed,
            s.failed,
            s.skipped,
            start.elapsed().as_secs_f64(),
            jsonl.display(),
            csv.display()
        );
        for r in run.reports.iter().filter(|r| r.verdict == Verdict::Fail).take(5) {
            eprintln!("  FAIL {} {}", r.case_id, r.reason.as_deref().unwrap_or(""));
        }
        println!("{}", serde_json::to_string(s)?);
        ok &= s.failed == 0;
    }
    Ok(ok)
}

fn cmd_render(cfg: &CliConfig, input: &Option<PathBuf>) -> Result<(), Error> {
    let v = read_input(input)?;
    let plain = v.is_array() || (v.get("region").is_some() && v.get("triad_hexagon").is_none());
    let (region, ann) = if plain {
        (as_region(&v)?, SvgAnnotations::default())
    } else {
        let th = as_triad(&v)?;
        let markers = ["A", "B", "C"].iter().map(|s| s.to_string()).zip(th.focal()).collect();
        (th.region(), SvgAnnotations { markers, frame: Some(*th.frame()) })
    };
    emit(cfg, &render_svg(&region, &ann))
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let cfg = CliConfig::load(cli)?;
    match &cli.command {
        Command::Build { input } => cmd_build(&cfg, input)?,
        Command::Count { input } => cmd_count(&cfg, input)?,
        Command::Squeeze { input, moves, full } => cmd_squeeze(&cfg, input, moves, *full)?,
        Command::Formula { input } => cmd_formula(&cfg, input)?,
        Command::Verify { plan } => {
            if !cmd_verify(&cfg, plan)? {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Render { input } => cmd_render(&cfg, input)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({"error": e.tag(), "message": e.to_string()}));
            ExitCode::from(if e.is_resource_limit() { 3 } else { 2 })
        }
    }
}
