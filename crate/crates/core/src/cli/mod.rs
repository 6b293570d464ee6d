//! Batch front-end behind the `mqec` binary: configuration, experiment
//! orchestration and reproducible outputs.

pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::Preset;
use crate::error::{Error, Result};
use crate::protocol::{
    figure_of_merit, run_unprotected, scaling_study, unprotected_trajectories, Protocol,
    SCALING_GRID,
};
use crate::raman::timescale_report;
use output::{pretty, round_floats, sig12, Cell, Format, RunDir, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mqec",
    version,
    about = "Motional quantum error correction simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Built-in preset name or path to a JSON preset.
    #[arg(long, global = true, default_value = "be9")]
    pub preset: String,
    /// Override `key.path=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Master seed, replacing the preset seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite.
    Verify,
    /// Quoted versus recomputed timescales.
    Timescales,
    /// Unprotected decay of the encoded state.
    Evolve,
    /// Repeated detection and restoration cycles.
    Protocol,
    /// Figure of merit over a grid of one parameter.
    Sweep {
        /// `gamma_tau` or any configuration key.
        #[arg(long, default_value = "gamma_tau")]
        param: String,
        /// Comma-separated grid; defaults to the scaling grid for `gamma_tau`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Timescales => "timescales",
            Command::Evolve => "evolve",
            Command::Protocol => "protocol",
            Command::Sweep { .. } => "sweep",
        }
    }
}

/// Exit code for an error: configuration problems are 2, everything else 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Unsupported(_)
        | Error::InvalidParameter(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_INVARIANT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Resolves the preset with overrides and seed.
pub fn resolve_preset(cli: &Cli) -> Result<Preset> {
    let mut p = Preset::load(&cli.preset)?;
    for o in &cli.overrides {
        p.apply_override(o)?;
    }
    if let Some(s) = cli.seed {
        p.seed = s;
    }
    p.validate()?;
    Ok(p)
}

/// Runs a parsed command and returns its exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let p = resolve_preset(cli)?;
    let mut dir = match &cli.out {
        Some(d) => Some(RunDir::create(d, cli.format)?),
        None => None,
    };
    let (code, extra) = match &cli.command {
        Command::Verify => cmd_verify(&p, dir.as_mut())?,
        Command::Timescales => (cmd_timescales(&p, dir.as_mut())?, Value::Null),
        Command::Evolve => (cmd_evolve(&p, dir.as_mut(), cli.format)?, Value::Null),
        Command::Protocol => (cmd_protocol(&p, dir.as_mut(), cli.format)?, Value::Null),
        Command::Sweep { param, values } => (
            cmd_sweep(&p, param, values, dir.as_mut(), cli.format)?,
            json!({ "param": param, "values": values }),
        ),
    };
    if let Some(d) = dir.as_mut() {
        d.write("preset.json", &format!("{}\n", p.to_json()))?;
        let manifest = json!({
            "tool": "mqec",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "arguments": extra,
            "preset_source": cli.preset,
            "overrides": cli.overrides,
            "seed": p.seed,
            "format": cli.format,
            "files": d.files,
            "resolved_preset": serde_json::to_value(&p)?,
            "reproduce": format!("mqec {} --preset preset.json --format {}", cli.command.name(),
                match cli.format { Format::Csv => "csv", Format::Json => "json" }),
        });
        d.write("manifest.json", &pretty(&manifest))?;
    }
    Ok(code)
}

fn emit(dir: Option<&mut RunDir>, stem: &str, table: &Table, format: Format) -> Result<()> {
    match dir {
        Some(d) => d.table(stem, table),
        None => {
            print!("{}", table.render(format));
            Ok(())
        }
    }
}

fn cmd_verify(p: &Preset, dir: Option<&mut RunDir>) -> Result<(i32, Value)> {
    let checks = verify::verify_suite(p)?;
    let mut t = Table::new(["check", "value", "tolerance", "pass"]);
    for c in &checks {
        println!(
            "{} {:<42} {:>18} <= {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            sig12(c.value),
            sig12(c.tolerance)
        );
        t.push(vec![
            c.name.clone().into(),
            c.value.into(),
            c.tolerance.into(),
            c.pass.into(),
        ]);
    }
    if let Some(d) = dir {
        d.table("verify", &t)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok((
        if failed == 0 { EXIT_OK } else { EXIT_INVARIANT },
        json!({ "failed": failed }),
    ))
}

fn cmd_timescales(p: &Preset, dir: Option<&mut RunDir>) -> Result<i32> {
    let rows = timescale_report(p);
    let mut t = Table::new([
        "key",
        "description",
        "unit",
        "quoted",
        "computed",
        "relative_deviation",
        "within",
    ]);
    println!(
        "{:<34} {:>6} {:>12} {:>14} {:>10}  status",
        "quantity", "unit", "quoted", "computed", "rel.dev"
    );
    for r in &rows {
        let status = match r.within() {
            Some(true) => "ok",
            Some(false) => "outside",
            None => "info",
        };
        println!(
            "{:<34} {:>6} {:>12} {:>14.6} {:>10}  {status}",
            r.key,
            r.unit,
            r.quoted.map_or("-".to_string(), |q| format!("{q}")),
            r.computed,
            r.relative_deviation()
                .map_or("-".to_string(), |d| format!("{:+.2}%", 100.0 * d)),
        );
        t.push(vec![
            r.key.into(),
            r.description.into(),
            r.unit.into(),
            r.quoted.into(),
            r.computed.into(),
            r.relative_deviation().into(),
            r.within().map_or(Cell::Empty, Cell::Bool),
        ]);
    }
    if let Some(d) = dir {
        d.table("timescales", &t)?;
    }
    Ok(EXIT_OK)
}

fn cmd_evolve(p: &Preset, dir: Option<&mut RunDir>, format: Format) -> Result<i32> {
    let e = &p.evolve;
    let times: Vec<f64> = (0..e.samples)
        .map(|k| e.duration * k as f64 / (e.samples - 1) as f64)
        .collect();
    let me = run_unprotected(p, &times)?;
    let tr = if e.trajectories > 0 {
        Some(unprotected_trajectories(p, &times, e.trajectories, p.seed)?)
    } else {
        None
    };
    let mut t = Table::new([
        "time",
        "fidelity_master",
        "fidelity_trajectories",
        "std_error",
        "top_level",
    ]);
    for (k, pt) in me.iter().enumerate() {
        let (f, se) = tr
            .as_ref()
            .map_or((None, None), |v| (Some(v[k].0), Some(v[k].1)));
        t.push(vec![
            pt.time.into(),
            pt.fidelity.into(),
            f.into(),
            se.into(),
            pt.top_level.into(),
        ]);
    }
    let worst = me.iter().map(|pt| pt.top_level).fold(0.0, f64::max);
    if worst > 1e-8 {
        eprintln!("warning: population {worst:.3e} reached the Fock cutoff; raise code.cutoff");
    }
    emit(dir, "evolve", &t, format)?;
    Ok(EXIT_OK)
}

fn cmd_protocol(p: &Preset, dir: Option<&mut RunDir>, format: Format) -> Result<i32> {
    let pr = Protocol::new(p)?;
    for w in &pr.warnings {
        eprintln!("warning: {w}");
    }
    let run = pr.run()?;
    let c = &pr.config;
    let times: Vec<f64> = (1..=c.cycles).map(|k| k as f64 * c.tau).collect();
    let baseline = run_unprotected(p, &times)?;
    let mut head = vec![
        "cycle".to_string(),
        "time".into(),
        "mean_fidelity".into(),
        "std_error".into(),
        "unprotected_fidelity".into(),
        "failed_fraction".into(),
        "x_flag_fraction".into(),
        "y_flag_fraction".into(),
    ];
    head.extend(run.channels.iter().map(|l| format!("mean_jumps_{l}")));
    let mut cycles = Table::new(head);
    for (s, b) in run.cycles.iter().zip(&baseline) {
        let mut row: Vec<Cell> = vec![
            s.cycle.into(),
            b.time.into(),
            s.mean_fidelity.into(),
            s.std_error.into(),
            b.fidelity.into(),
            s.failed_fraction.into(),
            s.x_flag_fraction.into(),
            s.y_flag_fraction.into(),
        ];
        row.extend(s.mean_jumps.iter().map(|&j| Cell::from(j)));
        cycles.push(row);
    }
    let mut summary = json!({ "run": serde_json::to_value(&run)? });
    if c.detection {
        let fom = figure_of_merit(&pr, p.protocol.merit_trajectories, p.seed)?;
        let fit = scaling_study(p, &SCALING_GRID, p.protocol.scaling_trajectories, p.seed)?;
        summary["figure_of_merit"] = serde_json::to_value(&fom)?;
        summary["scaling_fit"] = serde_json::to_value(&fit)?;
    }
    if run.max_top_level > 1e-8 {
        eprintln!(
            "warning: population {:.3e} reached the Fock cutoff",
            run.max_top_level
        );
    }
    let summary = round_floats(summary);
    match dir {
        Some(d) => {
            d.table("cycles", &cycles)?;
            let mut head = vec!["trajectory".to_string(), "cycle".into()];
            head.extend(run.channels.iter().map(|l| format!("jumps_{l}")));
            head.extend(["x_jump", "y_jump", "fidelity", "leakage", "failed"].map(String::from));
            let mut log = Table::new(head);
            for (i, traj) in run.trajectories.iter().enumerate() {
                for r in traj {
                    let mut row: Vec<Cell> = vec![i.into(), r.cycle.into()];
                    row.extend(r.jumps.iter().map(|&j| Cell::from(j)));
                    let flag = |f: fn(&crate::protocol::SyndromeFlags) -> bool| {
                        r.syndrome
                            .as_ref()
                            .map_or(Cell::Empty, |s| Cell::Bool(f(s)))
                    };
                    row.extend([
                        flag(|s| s.x_jump),
                        flag(|s| s.y_jump),
                        r.fidelity.into(),
                        r.leakage.into(),
                        r.failed.into(),
                    ]);
                    log.push(row);
                }
            }
            d.table("syndrome", &log)?;
            d.write("summary.json", &pretty(&summary))?;
            let last = run.cycles.last().expect("at least one cycle");
            println!(
                "cycle {}: mean fidelity {} +- {}, failed {}",
                last.cycle,
                sig12(last.mean_fidelity),
                sig12(last.std_error),
                sig12(last.failed_fraction)
            );
        }
        None => {
            print!("{}", cycles.render(format));
            eprint!("{}", pretty(&summary));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    p: &Preset,
    param: &str,
    values: &[f64],
    dir: Option<&mut RunDir>,
    format: Format,
) -> Result<i32> {
    let grid: Vec<f64> = if values.is_empty() {
        if param != "gamma_tau" {
            return Err(Error::Config(format!(
                "sweep over '{param}' needs --values"
            )));
        }
        SCALING_GRID.to_vec()
    } else {
        values.to_vec()
    };
    let mut t = Table::new(["parameter", "value", "metric", "result"]);
    for &v in &grid {
        let mut q = p.clone();
        if param == "gamma_tau" {
            q.protocol.gamma = v / q.protocol.tau;
            q.validate()?;
        } else {
            q.apply_override(&format!("{param}={v}"))?;
        }
        let pr = Protocol::new(&q)?;
        let fom = figure_of_merit(&pr, q.protocol.merit_trajectories, q.seed)?;
        for (metric, x) in [
            ("gamma_tau", fom.gamma_tau),
            ("failure_per_cycle", fom.failure_per_cycle),
            ("failure_std_error", fom.failure_std_error),
            ("double_jump_exact", fom.double_jump_exact),
            ("double_jump_leading", fom.double_jump_leading),
            ("protected_rate", fom.protected_rate),
            ("unprotected_rate", fom.unprotected_rate),
            ("suppression_ratio", fom.suppression_ratio),
        ] {
            t.push(vec![param.into(), v.into(), metric.into(), x.into()]);
        }
    }
    emit(dir, "sweep", &t, format)?;
    Ok(EXIT_OK)
}
