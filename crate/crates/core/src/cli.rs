//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input (spec, grid, curve or flags),
//! 2 dimension guard, 3 solver failure, 4 an oracle check failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bounds::{band, TabulatedCurve};
use crate::criticals::{full_report, ConstantRecord, Report, T2Criticals};
use crate::error::Error;
use crate::mensuration::TorusProductSpec;
use crate::oracle::verify;
use crate::profiles::default_law;
use crate::roots::RootRequest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "torus-iso",
    version,
    about = "Isoperimetric profiles of flat tori times Euclidean space"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Profile values as `v,area,regime` rows.
    Profile {
        spec: PathBuf,
        /// Single volume.
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        v: Option<f64>,
        /// `lo:hi:count,log` or `lo:hi:count,lin`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Threshold constants with their defining equations and residuals.
    Critical {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Upper and lower envelopes as `v,upper,lower,upper_regime,lower_source` rows.
    Bounds {
        spec: PathBuf,
        #[arg(long)]
        grid: String,
        /// Certified lower-bound curve; may be repeated.
        #[arg(long)]
        curve: Vec<PathBuf>,
    },
    /// Re-derive every threshold constant by brute force.
    Verify { spec: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// JSON spec file: `{"radii": [...], "euclid_dim": n, "tolerance": 1e-12}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub radii: Vec<f64>,
    pub euclid_dim: u32,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn spec(&self) -> Result<TorusProductSpec<f64>, Error> {
        TorusProductSpec::new(self.radii.clone(), self.euclid_dim)
    }

    pub fn request(&self) -> Result<RootRequest<f64>, Error> {
        match self.tolerance {
            None => Ok(RootRequest::default()),
            Some(tol) => RootRequest::new(tol, RootRequest::<f64>::default().max_iter),
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Guard { .. } => EXIT_GUARD,
            Error::Constant { .. } => EXIT_SOLVER,
            e if e.is_solver_failure() => EXIT_SOLVER,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SpecFile, Failure> {
    SpecFile::parse(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Parses `lo:hi:count,log` or `lo:hi:count,lin`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let bad = |msg: &str| Error::domain(format!("grid `{text}`: {msg}"));
    let (range, scale) = text
        .split_once(',')
        .ok_or_else(|| bad("expected lo:hi:count,log|lin"))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected lo:hi:count"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad lower end"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad upper end"))?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
    if count == 0 {
        return Err(bad("empty grid"));
    }
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(bad("need 0 < lo <= hi"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let last = (count - 1) as f64;
    let point = |i: usize| -> f64 {
        if i == 0 {
            return lo;
        }
        if i == count - 1 {
            return hi;
        }
        let t = i as f64 / last;
        match scale.trim() {
            "log" => (lo.ln() + t * (hi / lo).ln()).exp(),
            _ => lo + t * (hi - lo),
        }
    };
    match scale.trim() {
        "log" | "lin" => Ok((0..count).map(point).collect()),
        _ => Err(bad("scale must be `log` or `lin`")),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_profile(spec: &Path, v: Option<f64>, grid: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_spec(spec)?;
    let spec = file.spec()?;
    let grid = match (v, grid) {
        (Some(v), _) if v > 0.0 && v.is_finite() => vec![v],
        (Some(v), _) => return Err(input_error(format!("volume must be positive, got {v}"))),
        (None, Some(g)) => parse_grid(g)?,
        (None, None) => return Err(input_error("one of --v or --grid is required")),
    };
    let law = default_law(&spec)?;
    writeln!(out, "v,area,regime")?;
    for v in grid {
        let seg = law.segment_at(v);
        writeln!(out, "{},{},{}", num(v), num(seg.value(v)), seg.regime)?;
    }
    Ok(())
}

fn record_json(r: &ConstantRecord<f64>) -> Value {
    json!({
        "name": r.name,
        "value": r.value,
        "equation": r.equation,
        "residual": r.residual,
        "regime": r.regime,
    })
}

fn t2_json(r: &T2Criticals<f64>) -> Value {
    json!({
        "radii": r.spec.radii(),
        "euclid_dim": r.spec.euclid_dim(),
        "theta_star": r.theta_star,
        "sigma_star": r.sigma_star,
        "K_star": r.k_star,
        "c_n": r.c_n,
        "v_s": r.v_s,
        "v0_1": r.v0_1,
        "v0_2": r.v0_2,
        "v_star": r.v_star,
        "a_n": r.a_n,
        "b_n": r.b_n,
        "v_dstar": r.v_dstar,
        "records": r.records.iter().map(record_json).collect::<Vec<_>>(),
    })
}

fn report_json(report: &Report<f64>) -> Value {
    match report {
        Report::TwoTorus(r) => {
            let mut v = t2_json(r);
            v["kind"] = json!("two-torus");
            v
        }
        Report::ThreeTorus(r) => json!({
            "kind": "three-torus",
            "radii": r.spec.radii(),
            "euclid_dim": r.spec.euclid_dim(),
            "w_star": r.w_star,
            "eta_star": r.eta_star,
            "C_star": r.c_star,
            "u0": r.u0,
            "u_star": r.u_star,
            "slab_gap_root": r.slab_gap_root,
            "u_dstar": r.u_dstar,
            "records": r.records.iter().map(record_json).collect::<Vec<_>>(),
            "base": t2_json(&r.base),
            "lifted": t2_json(&r.lifted),
        }),
    }
}

fn write_records(out: &mut dyn Write, prefix: &str, records: &[ConstantRecord<f64>]) -> std::io::Result<()> {
    for r in records {
        writeln!(
            out,
            "{prefix}{},{},{},{},\"{}\"",
            r.name,
            num(r.value),
            r.residual.map(num).unwrap_or_default(),
            r.regime.map(|g| g.as_str()).unwrap_or(""),
            r.equation
        )?;
    }
    Ok(())
}

fn cmd_critical(spec: &Path, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_spec(spec)?;
    let spec = file.spec()?;
    let req = file.request()?;
    let report = full_report(&spec, &req)?;
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&report_json(&report)).expect("serializable report");
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            writeln!(out, "name,value,residual,regime,equation")?;
            match &report {
                Report::TwoTorus(r) => write_records(out, "", &r.records)?,
                Report::ThreeTorus(r) => {
                    write_records(out, "", &r.records)?;
                    write_records(out, "base.", &r.base.records)?;
                    write_records(out, "lifted.", &r.lifted.records)?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_bounds(spec: &Path, grid: &str, curves: &[PathBuf], out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_spec(spec)?;
    let spec = file.spec()?;
    let req = file.request()?;
    let grid = parse_grid(grid)?;
    let curves = curves
        .iter()
        .map(|p| TabulatedCurve::parse_csv(&read(p)?).map_err(|e| input_error(format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let b = band(&spec, &grid, &curves, &req)?;
    writeln!(out, "v,upper,lower,upper_regime,lower_source")?;
    for row in &b.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(row.v),
            num(row.upper),
            num(row.lower),
            row.upper_regime,
            row.lower_source
        )?;
    }
    Ok(())
}

fn cmd_verify(spec: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_spec(spec)?;
    let spec = file.spec()?;
    let checks = verify(&spec)?;
    for c in &checks {
        writeln!(
            out,
            "{} {} {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        )?;
    }
    match checks.iter().find(|c| !c.passed) {
        None => {
            writeln!(out, "all {} checks passed", checks.len())?;
            Ok(())
        }
        Some(c) => Err(Failure {
            code: EXIT_VERIFY,
            message: format!("check `{}` failed: {}", c.name, c.detail),
        }),
    }
}

/// Runs the CLI on `args` (program name first), returning the exit code.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Profile { spec, v, grid } => cmd_profile(spec, *v, grid.as_deref(), out),
        Command::Critical { spec, format } => cmd_critical(spec, *format, out),
        Command::Bounds { spec, grid, curve } => cmd_bounds(spec, grid, curve, out),
        Command::Verify { spec } => cmd_verify(spec, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:4:4,lin").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let g = parse_grid("0.1:100:50,log").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!((g[0], g[49]), (0.1, 100.0));
        assert!((g[1] / g[0] - g[49] / g[48]).abs() < 1e-12);
        assert_eq!(parse_grid("2:3:1,log").unwrap(), vec![2.0]);
        for bad in [
            "1:2:0,log",
            "0:2:3,log",
            "3:2:3,lin",
            "1:2,log",
            "1:2:3",
            "1:2:3,cubic",
            "a:2:3,lin",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_files() {
        let f = SpecFile::parse(r#"{"radii":[0.5641895,0.5641895],"euclid_dim":2,"tolerance":1e-12}"#).unwrap();
        assert_eq!(f.spec().unwrap().circles(), 2);
        assert!(f.request().is_ok());
        let loose = SpecFile::parse(r#"{"radii":[1],"euclid_dim":2,"tolerance":1e-2}"#).unwrap();
        assert!(loose.request().is_err());
        assert!(SpecFile::parse(r#"{"radii":[1],"euclid_dim":2,"extra":0}"#).is_err());
        match SpecFile::parse("{\n\"radii\": [1,\n").unwrap_err() {
            Error::Parse { line, .. } => assert!(line >= 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn exit_code_mapping() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::domain("x")), EXIT_INPUT);
        assert_eq!(code(Error::guard(crate::error::Guard::TwoTorus, "x")), EXIT_GUARD);
        assert_eq!(code(Error::Consistency("x".into())), EXIT_SOLVER);
        let wrapped = Error::Constant {
            constant: "a_n",
            source: Box::new(Error::domain("x")),
        };
        assert_eq!(code(wrapped), EXIT_SOLVER);
    }
}
