//! The `infodist` command line: single-point evaluation, curve sweeps, figure
//! data and the verification suites.
//!
//! Exit codes are 0 on success, 1 when a verification check fails and 2 on
//! a usage error. All CSV output has a one-line header and renders floats
//! with 17 significant digits (`+inf`, `-inf` and `nan` for non-finite
//! values), so repeated runs are byte-identical.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::derivatives;
use crate::oracle::MIN_SAMPLES;
use crate::quantities::{self, all_pairs, MeasurementSpec};
use crate::tradeoff::{self, Plane};
use crate::verify::{self, CheckReport, Divergence};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "infodist", version, about = "Information and disturbance of diagonal qudit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantities, derivatives, slope and curvature at one point.
    Eval(EvalArgs),
    /// One curve in one plane on a uniform grid of λ.
    Sweep(SweepArgs),
    /// CSV data for figures 1 to 5.
    Figure(FigureArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Exact check of the combinatorial identities.
    Identities(IdentitiesArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// One of gf, gr, if, ir. All four planes when omitted.
    #[arg(long)]
    plane: Option<Plane>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long)]
    plane: Plane,
    /// Number of λ values, endpoints included.
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long)]
    figure: u32,
    #[arg(long, default_value_t = 4)]
    d: u32,
    /// Restrict figures 1, 4 and 5 to one plane.
    #[arg(long)]
    plane: Option<Plane>,
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run a single suite.
    #[arg(long)]
    only: Option<String>,
    /// Largest k+l for the identity suite.
    #[arg(long, default_value_t = 20)]
    bound: u32,
}

#[derive(Debug, Args)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 20)]
    bound: u32,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Figure(a) => cmd_figure(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Identities(a) => cmd_identities(&a, out),
    };
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

enum Outcome {
    Success,
    Failed,
}

#[derive(Debug)]
enum CliError {
    Invalid(Error),
    Usage(String),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(path, e) => write!(f, "cannot write {}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e)
    }
}

type CliResult = std::result::Result<Outcome, CliError>;

/// Renders a float with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Reads back a float written by [`format_float`].
pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

fn row(out: &mut String, ints: &[u32], floats: &[f64]) {
    let mut first = true;
    for v in ints {
        if !first {
            out.push(',');
        }
        first = false;
        let _ = write!(out, "{v}");
    }
    for &v in floats {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&format_float(v));
    }
    out.push('\n');
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn grid(n: usize) -> std::result::Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Invalid(Error::InvalidGrid(format!("need at least 2 points, got {n}"))));
    }
    Ok(tradeoff::uniform_grid(n))
}

fn check_dimension(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::out_of_range("d", format!("need d >= 2, got {d}")));
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> CliResult {
    let p = &a.point;
    let spec = MeasurementSpec::new(p.d, p.k, p.l, a.lambda)?;
    let q = quantities::evaluate(&spec);
    let b = derivatives::evaluate(&spec);
    let planes: Vec<Plane> = a.plane.map_or_else(|| Plane::ALL.to_vec(), |p| vec![p]);
    let mut text = String::from(
        "plane,d,k,l,lambda,info_shannon,info_estimation,fidelity,reversibility,\
         j,dj,d2j,di,d2i,dg,d2g,df,d2f,dr,d2r,slope,curvature\n",
    );
    for plane in planes {
        text.push_str(plane.name());
        text.push(',');
        row(
            &mut text,
            &[p.d, p.k, p.l],
            &[
                a.lambda,
                q.info_shannon,
                q.info_estimation,
                q.fidelity,
                q.reversibility,
                b.j,
                b.dj,
                b.d2j,
                b.di,
                b.d2i,
                b.dg,
                b.d2g,
                b.df,
                b.d2f,
                b.dr,
                b.d2r,
                tradeoff::slope(plane, &spec),
                tradeoff::curvature(plane, &spec),
            ],
        );
    }
    emit(&text, a.out.as_deref(), out)?;
    Ok(Outcome::Success)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let p = &a.point;
    MeasurementSpec::new(p.d, p.k, p.l, 0.0)?;
    let lambdas = grid(a.grid)?;
    let curve = tradeoff::sample_curve(a.plane, p.d, p.k, p.l, &lambdas)?;
    let degenerate = u32::from(a.plane.is_degenerate(p.d, p.k, p.l));
    let mut text = String::from("plane,d,k,l,degenerate,lambda,info,disturbance,slope,curvature\n");
    for s in curve {
        text.push_str(a.plane.name());
        text.push(',');
        row(
            &mut text,
            &[p.d, p.k, p.l, degenerate],
            &[s.lambda, s.info, s.disturbance, s.slope, s.curvature],
        );
    }
    emit(&text, a.out.as_deref(), out)?;
    Ok(Outcome::Success)
}

fn cmd_figure(a: &FigureArgs, out: &mut dyn Write) -> CliResult {
    if !(1..=5).contains(&a.figure) {
        return Err(CliError::Usage(format!(
            "figure out of range: need 1 <= figure <= 5, got {}",
            a.figure
        )));
    }
    check_dimension(a.d)?;
    let lambdas = grid(a.grid)?;
    let planes: Vec<Plane> = a.plane.map_or_else(|| Plane::ALL.to_vec(), |p| vec![p]);
    let files = match a.figure {
        1 => figure_regions(a.d, &planes, &lambdas)?,
        2 | 3 => vec![(format!("fig{}.csv", a.figure), figure_info_derivative(a.d, a.figure == 3, &lambdas))],
        _ => figure_tradeoff_derivative(a.d, a.figure == 5, &planes, &lambdas)?,
    };
    fs::create_dir_all(&a.out).map_err(|e| CliError::Io(a.out.clone(), e))?;
    for (name, text) in files {
        let path = a.out.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(Outcome::Success)
}

fn figure_regions(d: u32, planes: &[Plane], lambdas: &[f64]) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    let mut bounds = String::from("plane,side,k,l,start_rank,end_rank\n");
    for &plane in planes {
        let mut text = String::from("k,l,lambda,info,disturbance\n");
        for (k, l) in all_pairs(d) {
            for s in tradeoff::sample_curve(plane, d, k, l, lambdas)? {
                row(&mut text, &[k, l], &[s.lambda, s.info, s.disturbance]);
            }
        }
        files.push((format!("fig1_{}.csv", plane.name()), text));
        let set = tradeoff::boundary_set(d, plane)?;
        for (side, curves) in [("upper", &set.upper), ("lower", &set.lower)] {
            for c in curves {
                let _ = writeln!(bounds, "{},{side},{},{},{},{}", plane.name(), c.k, c.l, c.start_rank, c.end_rank);
            }
        }
    }
    files.push(("fig1_boundaries.csv".into(), bounds));
    Ok(files)
}

fn figure_info_derivative(d: u32, second: bool, lambdas: &[f64]) -> String {
    let mut text = String::from("k,l,lambda,value\n");
    for (k, l) in all_pairs(d) {
        for &lam in lambdas {
            let spec = MeasurementSpec::new(d, k, l, lam).expect("grid inside [0, 1]");
            let v = if second {
                derivatives::d2i_dlam2(&spec)
            } else {
                derivatives::di_dlam2(&spec)
            };
            row(&mut text, &[k, l], &[lam, v]);
        }
    }
    text
}

// R-planes carry only the k+l=d lines; the others lie on the info axis.
fn figure_tradeoff_derivative(
    d: u32,
    second: bool,
    planes: &[Plane],
    lambdas: &[f64],
) -> Result<Vec<(String, String)>> {
    let fig = if second { 5 } else { 4 };
    let mut files = Vec::new();
    for &plane in planes {
        let mut text = String::from("k,l,info,value\n");
        for (k, l) in all_pairs(d) {
            if plane.is_degenerate(d, k, l) {
                continue;
            }
            for s in tradeoff::sample_curve(plane, d, k, l, lambdas)? {
                let v = if second { s.curvature } else { s.slope };
                row(&mut text, &[k, l], &[s.info, v]);
            }
        }
        files.push((format!("fig{fig}_{}.csv", plane.name()), text));
    }
    Ok(files)
}

/// Names accepted by `verify --only`.
pub const SUITES: [&str; 11] = [
    "mc-agreement",
    "jackknife",
    "finite-differences",
    "endpoint-limits",
    "sign-tables",
    "shape-classification",
    "inflection",
    "identities",
    "proportionality",
    "seam",
    "reversal",
];

const MC_DIMS: [u32; 4] = [2, 3, 4, 5];
const MC_LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const REVERSAL_LAMBDAS: [f64; 3] = [0.25, 0.5, 1.0];
const N_SIGMA: f64 = 3.0;

fn run_suite(name: &str, a: &VerifyArgs) -> Result<CheckReport> {
    Ok(match name {
        "mc-agreement" => verify::mc_agreement(&MC_DIMS, &MC_LAMBDAS, a.samples, a.seed, N_SIGMA)?,
        "jackknife" => verify::jackknife_cross_check(a.samples, a.seed)?,
        "finite-differences" => verify::finite_differences(6, 1e-6),
        "endpoint-limits" => verify::endpoint_limits(6, Divergence::Grows),
        "sign-tables" => verify::sign_tables(8, 1001),
        "shape-classification" => verify::shape_classification(8),
        "inflection" => verify::inflection(8),
        "identities" => verify::identities(a.bound),
        "proportionality" => verify::proportionality(8, 1001, 1e-13),
        "seam" => verify::seam_quality(20, 31, 1e-10),
        "reversal" => verify::reversal(&REVERSAL_LAMBDAS, a.samples, a.seed, N_SIGMA)?,
        _ => unreachable!("suite names are checked before running"),
    })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    if a.samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            given: a.samples,
            minimum: MIN_SAMPLES,
        }
        .into());
    }
    let names: Vec<&str> = match &a.only {
        Some(only) if SUITES.contains(&only.as_str()) => vec![only.as_str()],
        Some(only) => {
            return Err(CliError::Usage(format!(
                "unknown suite '{only}'; expected one of {}",
                SUITES.join(", ")
            )))
        }
        None => SUITES.to_vec(),
    };
    let mut failed = 0;
    for name in &names {
        let report = run_suite(name, a)?;
        if !report.passed() {
            failed += 1;
        }
        let _ = writeln!(out, "{report}");
    }
    if failed == 0 {
        let _ = writeln!(out, "all {} suites passed", names.len());
        Ok(Outcome::Success)
    } else {
        let _ = writeln!(out, "{failed} of {} suites failed", names.len());
        Ok(Outcome::Failed)
    }
}

fn cmd_identities(a: &IdentitiesArgs, out: &mut dyn Write) -> CliResult {
    let report = verify::identities(a.bound);
    let _ = writeln!(out, "{report}");
    Ok(if report.passed() { Outcome::Success } else { Outcome::Failed })
}
