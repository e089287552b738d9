//! Command-line front end. [`run`] takes the argument list and output sinks so
//! it can be driven from tests; the `alphacoh` binary is a thin wrapper.
//!
//! Exit codes: 0 success, 1 convergence or property failure, 2 usage or parse
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::alpha::{alpha_coherence_run, coherence_curve, linspace, CurveRow, Family, Status};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fock::{cat_state, coherent_vector, fock_state, mean_photon, squeezed_vacuum, CoherentLabel, FockVector, Parity, StateFile};
use crate::measures::Measure;
use crate::pdist::{describe, negativity, negativity_on, parse_density, PKind};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: &str = "family,param,mean_photon,N_used,residual_tail,branch_count,upper_bound,C_rel,C_l1,status";

#[derive(Debug, Parser)]
#[command(name = "alphacoh", version, about = "Coherent-state coherence and P-function negativity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence along a one-parameter family of states, as CSV.
    Curve(CurveArgs),
    /// Full coherence report for one state, as JSON.
    State(StateArgs),
    /// Negativity of a regular P density, as JSON.
    Negativity(NegativityArgs),
    /// Run self-check suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// cat-even, cat-odd, fock or squeezed
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub max: f64,
    #[arg(long)]
    pub steps: usize,
    /// rel_entropy or l1; selects the measure that drives convergence
    #[arg(long, default_value = "rel_entropy")]
    pub measure: String,
    /// CSV destination (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stop at the first non-converged row
    #[arg(long)]
    pub strict: bool,
    /// Also write a gnuplot script plotting the CSV
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// coherent:re,im | cat-even:a[,b] | cat-odd:a[,b] | fock:n | squeezed:r[,theta] | file:path
    pub spec: String,
    #[arg(long, default_value = "rel_entropy")]
    pub measure: String,
    /// Include every explored branch's decomposition
    #[arg(long)]
    pub dump_decomposition: bool,
    /// Write the truncated state vector to this JSON file
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct NegativityArgs {
    /// thermal:n | dthermal:n,re,im | pat:n | point:re,im | grid:path
    pub spec: String,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Also evaluate at h/2 and report the relative change
    #[arg(long)]
    pub refine: bool,
    /// Write the sampled density in grid CSV format
    #[arg(long)]
    pub write_grid: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// gs-oracle, unitarity, measures, linear-optics, p-monotone,
    /// p-convexity, p-invariance, p-quadrature or all
    #[arg(default_value = "all")]
    pub suite: String,
    #[command(flatten)]
    pub common: Common,
}

/// Maps an error to an exit code: bad input is a usage error, everything
/// else is a computation failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidParameter(_)
        | Error::InvalidLabel(_)
        | Error::SingularP(_)
        | Error::TruncationOrder(_)
        | Error::Truncation { .. }
        | Error::PhotonNumberOutOfRange { .. }
        | Error::OddCatAtOrigin
        | Error::InvalidWeights(_)
        | Error::DimensionMismatch(..)
        | Error::NotNormalized(_)
        | Error::InvalidDensity(_)
        | Error::Normalization { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Curve(a) => cmd_curve(a, out, err),
        Command::State(a) => cmd_state(a, out),
        Command::Negativity(a) => cmd_negativity(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.n_max {
        cfg.n_max = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Decimal with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    let prec = (11 - exp).max(0) as usize;
    format!("{x:.prec$}")
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let r: f64 = fmt_num(x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn write_json(out: &mut dyn Write, v: Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&round_json(v))?)?;
    Ok(())
}

pub fn csv_row(row: &CurveRow) -> String {
    let r = &row.report;
    let status = match r.status {
        Status::Converged => "CONVERGED",
        Status::NotConverged => "NOT_CONVERGED",
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        row.family.name(),
        fmt_num(row.param),
        fmt_num(row.mean_photon),
        r.n_used,
        fmt_num(r.residual_tail),
        r.branch_values.len(),
        r.upper_bound,
        fmt_num(row.c_rel),
        fmt_num(row.c_l1),
        status
    )
}

pub fn gnuplot_script(csv: &Path, family: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'parameter'\n\
         set ylabel 'coherence (nats)'\n\
         set title '{family}'\n\
         plot '{csv}' using 2:8 with linespoints title 'C_rel', \\\n     '' using 2:9 with linespoints title 'C_l1'\n",
        csv = csv.display()
    )
}

fn cmd_curve(a: &CurveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut cfg = load_config(&a.common)?;
    if a.out.is_some() {
        cfg.outputs.csv = a.out.clone();
    }
    if a.gnuplot.is_some() {
        cfg.outputs.gnuplot = a.gnuplot.clone();
    }
    let family: Family = a.family.parse()?;
    let measure: Measure = a.measure.parse()?;
    if a.steps == 0 || !a.min.is_finite() || !a.max.is_finite() || a.max < a.min {
        return Err(Error::InvalidParameter("need steps >= 1 and finite min <= max".into()));
    }
    let rows = coherence_curve(
        family,
        &linspace(a.min, a.max, a.steps),
        measure,
        &cfg.truncation(),
        &cfg.schedule,
        &cfg.search,
    )?;

    let mut text = format!("{CSV_HEADER}\n");
    let mut all_converged = true;
    for row in &rows {
        text.push_str(&csv_row(row));
        text.push('\n');
        if row.report.status != Status::Converged {
            all_converged = false;
            if a.strict {
                break;
            }
        }
    }
    match &cfg.outputs.csv {
        Some(p) => std::fs::write(p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(g) = &cfg.outputs.gnuplot {
        let csv = cfg.outputs.csv.clone().unwrap_or_else(|| PathBuf::from("curve.csv"));
        std::fs::write(g, gnuplot_script(&csv, family.name()))?;
    }
    if !all_converged {
        writeln!(err, "warning: some rows did not converge")?;
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_OK)
}

fn nums(spec: &str, rest: &str, min: usize, max: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in '{spec}'"))))
        .collect::<Result<_>>()?;
    if v.len() < min || v.len() > max {
        return Err(Error::Parse(format!("'{spec}' takes {min}..={max} numbers")));
    }
    Ok(v)
}

/// Parses a state spec; see [`StateArgs::spec`].
pub fn parse_state(spec: &str, cfg: &RunConfig) -> Result<FockVector> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("state spec '{spec}' needs the form kind:args")))?;
    let trunc = cfg.truncation();
    match kind {
        "coherent" => {
            let v = nums(spec, rest, 2, 2)?;
            coherent_vector(CoherentLabel::new(v[0], v[1])?, &trunc)
        }
        "cat-even" | "cat-odd" => {
            let v = nums(spec, rest, 1, 2)?;
            let label = CoherentLabel::new(v[0], v.get(1).copied().unwrap_or(0.0))?;
            let parity = if kind == "cat-even" { Parity::Even } else { Parity::Odd };
            cat_state(label, parity, &trunc)
        }
        "fock" => {
            let n: usize = rest.trim().parse().map_err(|_| Error::Parse(format!("bad photon number in '{spec}'")))?;
            fock_state(n, trunc.n_max)
        }
        "squeezed" => {
            let v = nums(spec, rest, 1, 2)?;
            squeezed_vacuum(v[0], v.get(1).copied().unwrap_or(0.0), &trunc)
        }
        "file" => {
            let text = std::fs::read_to_string(rest)
                .map_err(|e| Error::Parse(format!("cannot read state file '{rest}': {e}")))?;
            let file: StateFile = serde_json::from_str(&text)?;
            file.into_state()
        }
        _ => Err(Error::Parse(format!("unknown state kind '{kind}'"))),
    }
}

fn cmd_state(a: &StateArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let measure: Measure = a.measure.parse()?;
    let state = parse_state(&a.spec, &cfg)?;
    if let Some(p) = &a.dump_state {
        std::fs::write(p, serde_json::to_string_pretty(&state.to_file())?)?;
    }
    let run = alpha_coherence_run(&state, measure, &cfg.schedule, &cfg.search)?;
    let mut v = json!({
        "spec": a.spec,
        "n_max": state.n_max(),
        "mean_photon": mean_photon(&state),
        "report": serde_json::to_value(&run.report)?,
    });
    if a.dump_decomposition {
        let d: Vec<_> = run.decompositions.iter().map(|d| d.to_file()).collect();
        v["decompositions"] = serde_json::to_value(d)?;
    }
    write_json(out, v)?;
    Ok(if run.report.status == Status::Converged { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_negativity(a: &NegativityArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = load_config(&a.common)?;
    if let Some(l) = a.l {
        cfg.quadrature.l = l;
    }
    if let Some(h) = a.h {
        cfg.quadrature.h = h;
    }
    if a.write_grid.is_some() {
        cfg.outputs.grid = a.write_grid.clone();
    }
    cfg.quadrature.validate()?;
    let p = parse_density(&a.spec)?;
    // grid files keep their own lattice unless a window flag overrides it
    let keep = matches!(p.kind(), PKind::Grid(_)) && a.l.is_none() && a.h.is_none();
    let p = if keep { p } else { p.with_window(cfg.quadrature)? };
    let refined_window = p.window().refined();
    let r = negativity(&p)?;
    let mut v = json!({
        "density": describe(&p),
        "value": r.value,
        "negative_region_area": r.negative_region_area,
        "min_value": r.min_value,
        "classical": r.value == 0.0,
        "quadrature": {"L": r.quadrature.l, "h": r.quadrature.h, "tol_neg": r.quadrature.tol_neg},
    });
    if a.refine {
        let fine = negativity_on(&p, &refined_window)?;
        let rel = if r.value > 0.0 { (fine.value - r.value).abs() / r.value } else { (fine.value - r.value).abs() };
        v["refined"] = json!({"h": fine.quadrature.h, "value": fine.value, "relative_change": rel});
    }
    if let Some(g) = &cfg.outputs.grid {
        p.write_grid(g)?;
    }
    write_json(out, v)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.common)?;
    let checks = run_suite(&a.suite, &cfg)?;
    let mut failed = 0;
    for c in &checks {
        writeln!(
            out,
            "{} {:<14} {}  delta={} tol={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            fmt_num(c.delta),
            fmt_num(c.tol)
        )?;
        if !c.pass {
            failed += 1;
        }
    }
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}
