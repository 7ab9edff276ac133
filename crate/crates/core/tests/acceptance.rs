//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --release --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use infodist::cli::parse_float;
use infodist::quantities::all_pairs;
use infodist::tradeoff::{self, Plane};
use infodist::verify::{self, CheckReport, Divergence};
use infodist::MeasurementSpec;

const SEED: u64 = 1;
const SAMPLES: usize = 1_000_000;
const N_SIGMA: f64 = 3.0;

struct Verdict {
    passed: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn from_reports(reports: Vec<CheckReport>) -> Self {
        Self {
            passed: reports.iter().all(CheckReport::passed),
            lines: reports.iter().map(ToString::to_string).collect(),
        }
    }

    fn from_checks(checks: Vec<(String, bool)>) -> Self {
        Self {
            passed: !checks.is_empty() && checks.iter().all(|(_, ok)| *ok),
            lines: checks
                .into_iter()
                .map(|(msg, ok)| format!("{} {msg}", if ok { "ok  " } else { "FAIL" }))
                .collect(),
        }
    }

    fn error(msg: impl ToString) -> Self {
        Self {
            passed: false,
            lines: vec![msg.to_string()],
        }
    }
}

fn spec(d: u32, k: u32, l: u32, lambda: f64) -> MeasurementSpec {
    MeasurementSpec::new(d, k, l, lambda).unwrap()
}

fn rel_check(what: &str, got: f64, want: f64, tol: f64) -> (String, bool) {
    let err = (got - want).abs() / want.abs();
    (format!("{what}: {got:.12} vs {want:.12} (relative error {err:.2e})"), err <= tol)
}

fn mc_agreement() -> Verdict {
    match verify::mc_agreement(&[2, 3, 4, 5], &[0.0, 0.25, 0.5, 0.75, 1.0], SAMPLES, SEED, N_SIGMA) {
        Ok(r) => Verdict::from_reports(vec![r]),
        Err(e) => Verdict::error(e),
    }
}

fn derivatives() -> Verdict {
    Verdict::from_reports(vec![verify::finite_differences(6, 1e-6)])
}

fn endpoint_limits() -> Verdict {
    Verdict::from_reports(vec![verify::endpoint_limits(6, Divergence::Exceeds(1e6))])
}

fn spot_values() -> Verdict {
    let mut checks = Vec::new();
    for lam in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let got = tradeoff::slope(Plane::GR, &spec(4, 1, 3, lam));
        checks.push(rel_check(&format!("G-R slope, (4,1,3), lambda={lam}"), got, -20.0 / 3.0, 1e-9));
    }
    for (k, l) in [(1, 3), (2, 2), (3, 1)] {
        let got = tradeoff::slope(Plane::IF, &spec(4, k, l, 1.0));
        checks.push(rel_check(&format!("I-F slope at lambda=1, (4,{k},{l})"), got, -2.0 * LN_2, 1e-9));
    }
    let got = tradeoff::curvature(Plane::GF, &spec(4, 1, 3, 1.0));
    checks.push(rel_check("G-F curvature at lambda=1, (4,1,3)", got, -160.0 / 3.0, 1e-9));
    let want = -250.0 * LN_2 * LN_2 / 35.0;
    let got = tradeoff::curvature(Plane::IF, &spec(4, 2, 2, 1.0));
    checks.push(rel_check("I-F curvature at lambda=1, (4,2,2)", got, want, 1e-9));
    checks.push((format!("{want:.4} rounds to -3.4318"), format!("{want:.4}") == "-3.4318"));
    Verdict::from_checks(checks)
}

fn sign_tables() -> Verdict {
    Verdict::from_reports(vec![verify::sign_tables(8, 1001), verify::shape_classification(8)])
}

fn inflection() -> Verdict {
    let mut v = Verdict::from_reports(vec![verify::inflection(8)]);
    for (d, r) in verify::inflection_points(8) {
        if let Ok(lam) = r {
            v.lines.push(format!("lambda* = {lam:.10} for (d={d}, k=1, l={})", d - 1));
        }
    }
    v
}

fn identities() -> Verdict {
    Verdict::from_reports(vec![verify::identities(20)])
}

fn proportionality() -> Verdict {
    Verdict::from_reports(vec![verify::proportionality(8, 1001, 1e-13)])
}

fn seam() -> Verdict {
    Verdict::from_reports(vec![verify::seam_quality(20, 31, 1e-10)])
}

fn reversal() -> Verdict {
    match verify::reversal(&[0.25, 0.5, 1.0], SAMPLES, SEED, N_SIGMA) {
        Ok(r) => Verdict::from_reports(vec![r]),
        Err(e) => Verdict::error(e),
    }
}

type Rows = Vec<Vec<String>>;
type Criterion = (&'static str, fn() -> Verdict);

fn read_rows(path: &Path) -> Rows {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

/// Columns `cols` of a figure CSV grouped by `(k, l)`, in file order.
fn by_line(rows: &Rows, cols: &[usize]) -> BTreeMap<(u32, u32), Vec<Vec<f64>>> {
    let mut map: BTreeMap<(u32, u32), Vec<Vec<f64>>> = BTreeMap::new();
    for r in rows {
        let key = (r[0].parse().unwrap(), r[1].parse().unwrap());
        map.entry(key).or_default().push(cols.iter().map(|&c| parse_float(&r[c]).unwrap()).collect());
    }
    map
}

fn generate(dir: &Path) -> Result<(), String> {
    for fig in 1..=5 {
        let out = Command::new(env!("CARGO_BIN_EXE_infodist"))
            .args(["figure", "--figure", &fig.to_string(), "--d", "4", "--out"])
            .arg(dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("figure {fig}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}

/// Disturbance of the `(k, l)` line at the point where its information
/// equals `info`. Information decreases along every line.
fn disturbance_at_info(plane: Plane, d: u32, k: u32, l: u32, info: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tradeoff::info_value(plane, &spec(d, k, l, mid)) > info {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tradeoff::disturbance_value(plane, &spec(d, k, l, 0.5 * (lo + hi)))
}

// Every tenth point of every line must lie between the upper line and the
// lower chain at the same information.
fn boundary_geometry(plane: Plane, d: u32, curves: &Rows) -> Vec<(String, bool)> {
    let set = tradeoff::boundary_set(d, plane).unwrap();
    let upper = set.upper[0];
    let tol = 1e-9;
    let mut worst_above = f64::NEG_INFINITY;
    let mut worst_below = f64::NEG_INFINITY;
    for ((k, l), pts) in by_line(curves, &[3, 4]) {
        for p in pts.iter().step_by(10) {
            let (info, dist) = (p[0], p[1]);
            let up = disturbance_at_info(plane, d, upper.k, upper.l, info);
            worst_above = worst_above.max(dist - up);
            let seg = set
                .lower
                .iter()
                .find(|c| {
                    let hi = tradeoff::info_value(plane, &spec(d, c.k, c.l, 0.0));
                    let lo = tradeoff::info_value(plane, &spec(d, c.k, c.l, 1.0));
                    (lo..=hi).contains(&info)
                })
                .unwrap_or_else(|| panic!("no lower segment covers info {info} of ({k},{l})"));
            let down = disturbance_at_info(plane, d, seg.k, seg.l, info);
            worst_below = worst_below.max(down - dist);
        }
    }
    vec![
        (format!("{plane}: no point above the upper line (max excess {worst_above:.2e})"), worst_above <= tol),
        (format!("{plane}: no point below the lower chain (max excess {worst_below:.2e})"), worst_below <= tol),
    ]
}

fn figures() -> Verdict {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    if let Err(e) = generate(a.path()).and_then(|_| generate(b.path())) {
        return Verdict::error(e);
    }
    let mut checks = Vec::new();

    let mut names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let identical = names
        .iter()
        .all(|n| fs::read(a.path().join(n)).ok() == fs::read(b.path().join(n)).ok());
    checks.push((format!("{} files byte-identical across two runs", names.len()), identical && names.len() == 15));

    let fig2 = by_line(&read_rows(&a.path().join("fig2.csv")), &[3]);
    let ok = fig2.values().all(|vals| {
        vals.iter().all(|v| v[0] <= 0.0) && vals.windows(2).all(|w| w[0][0] <= w[1][0])
    });
    checks.push((format!("fig2: dI <= 0 and monotone on all {} lines", fig2.len()), ok && fig2.len() == 6));

    let fig3 = by_line(&read_rows(&a.path().join("fig3.csv")), &[3]);
    let ok = fig3.values().all(|vals| vals.iter().all(|v| v[0] > 0.0));
    checks.push((format!("fig3: d2I > 0 on all {} lines", fig3.len()), ok && fig3.len() == 6));

    let bounds = read_rows(&a.path().join("fig1_boundaries.csv"));
    for plane in Plane::ALL {
        let pick = |side: &str| -> Vec<(u32, u32)> {
            bounds
                .iter()
                .filter(|r| r[0] == plane.name() && r[1] == side)
                .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
                .collect()
        };
        let (upper, lower) = (pick("upper"), pick("lower"));
        checks.push((
            format!("{plane}: upper {upper:?}, lower {lower:?}"),
            upper == [(1, 3)] && lower == [(1, 1), (2, 1), (3, 1)],
        ));
        let curves = read_rows(&a.path().join(format!("fig1_{}.csv", plane.name())));
        checks.extend(boundary_geometry(plane, 4, &curves));
    }
    let lines: Vec<(u32, u32)> = by_line(&read_rows(&a.path().join("fig1_gf.csv")), &[2]).into_keys().collect();
    checks.push((format!("fig1 lines {lines:?}"), lines == all_pairs(4)));
    Verdict::from_checks(checks)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed forms vs Monte Carlo, d<=5, n=1e6, 3 sigma", mc_agreement),
        ("derivatives vs Richardson differences, d<=6, 1e-6", derivatives),
        ("endpoint limits: dispatcher, 1e-3 approach, |value| > 1e6 for infinite limits", endpoint_limits),
        ("spot values to 1e-9", spot_values),
        ("sign tables and shape classification, d<=8", sign_tables),
        ("inflection of the upper I-F line, d=3..8", inflection),
        ("exact identities, k+l<=20", identities),
        ("dR = alpha dG and d2R = alpha d2G to 1e-13", proportionality),
        ("closed form vs series on the seam, k+l<=20, 1e-10", seam),
        ("reversal simulation, d=4, n=1e6, 3 sigma", reversal),
        ("figure regeneration, d=4", figures),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name} ({:.1} s)", i + 1, start.elapsed().as_secs_f64());
        for line in &v.lines {
            for l in line.lines() {
                println!("        {l}");
            }
        }
        if !v.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
