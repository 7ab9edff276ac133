//! Verification suites shared by `infodist verify` and the test suite. Each
//! suite returns a [`CheckReport`] with the number of comparisons, the worst
//! discrepancy found and a description of every failure.

use std::f64::consts::LN_2;
use std::fmt;

use crate::combinatorics::coeff_a;
use crate::derivatives::{self, DerivativeBundle};
use crate::jsum;
use crate::oracle::{self, Identity, McConfig};
use crate::quantities::{self, all_pairs, MeasurementSpec};
use crate::tradeoff::{self, Plane, ShapeTag};
use crate::Result;

/// Outcome of one verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub checked: usize,
    /// Largest discrepancy seen, in `unit`.
    pub worst: f64,
    pub unit: &'static str,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str, unit: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            worst: 0.0,
            unit,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    fn record(&mut self, discrepancy: f64, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if discrepancy.is_nan() || discrepancy > self.worst {
            self.worst = discrepancy;
        }
        if !ok {
            self.failures.push(describe());
        }
    }

    fn fail(&mut self, message: String) {
        self.checked += 1;
        self.failures.push(message);
    }
}

const SHOWN_FAILURES: usize = 8;

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} checks, {} failed, worst {:.3e} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.failures.len(),
            self.worst,
            self.unit
        )?;
        for msg in self.failures.iter().take(SHOWN_FAILURES) {
            write!(f, "\n    {msg}")?;
        }
        if self.failures.len() > SHOWN_FAILURES {
            write!(f, "\n    ... {} more", self.failures.len() - SHOWN_FAILURES)?;
        }
        Ok(())
    }
}

fn spec(d: u32, k: u32, l: u32, lambda: f64) -> MeasurementSpec {
    MeasurementSpec::new(d, k, l, lambda).expect("parameters enumerated from a valid range")
}

const QUANTITY_NAMES: [&str; 4] = ["I", "G", "F", "R"];

/// Monte Carlo estimates against the closed forms, one fixed seed for every
/// grid point.
pub fn mc_agreement(dims: &[u32], lambdas: &[f64], n_samples: usize, seed: u64, n_sigma: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("mc-agreement", "sigma");
    for &d in dims {
        for (k, l) in all_pairs(d) {
            for &lam in lambdas {
                let s = spec(d, k, l, lam);
                let mc = oracle::mc_estimate_quantities(&s, n_samples, seed)?;
                let exact = quantities::evaluate(&s).as_array();
                for ((est, x), name) in mc.as_array().iter().zip(exact).zip(QUANTITY_NAMES) {
                    let z = est.z_score(x);
                    report.record(z, est.agrees_with(x, n_sigma), || {
                        format!(
                            "{name} at {s}: mc {:.8} ± {:.2e}, closed form {x:.8} ({z:.2} sigma)",
                            est.mean, est.std_error
                        )
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Jackknife over substreams against the delta-method standard errors at
/// `(d=4, k=1, l=3, λ=0.5)`. The two must agree within a factor of two.
pub fn jackknife_cross_check(n_samples: usize, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("jackknife", "ratio");
    let s = spec(4, 1, 3, 0.5);
    let run = oracle::mc_run(&s, n_samples, seed, &McConfig::default())?;
    let jack = run.jackknife_std_errors();
    for ((est, j), name) in run.estimates().as_array().iter().zip(jack).zip(QUANTITY_NAMES) {
        let ratio = j / est.std_error;
        let off = ratio.max(1.0 / ratio);
        report.record(off, (0.5..=2.0).contains(&ratio), || {
            format!("{name}: delta method {:.3e}, jackknife {j:.3e}", est.std_error)
        });
    }
    Ok(report)
}

/// The eight analytic derivatives with respect to `λ²` against Richardson
/// central differences of the closed forms, `λ ∈ {0.1, …, 0.9}`.
pub fn finite_differences(max_d: u32, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("finite-differences", "relative error");
    type Quantity = fn(&MeasurementSpec) -> f64;
    let funcs: [(&str, Quantity); 4] = [
        ("I", quantities::eval_i),
        ("G", quantities::eval_g),
        ("F", quantities::eval_f),
        ("R", quantities::eval_r),
    ];
    for d in 2..=max_d {
        for (k, l) in all_pairs(d) {
            for i in 1..=9 {
                let lam = f64::from(i) / 10.0;
                let s = spec(d, k, l, lam);
                let b = derivatives::evaluate(&s);
                let analytic = [(b.di, b.d2i), (b.dg, b.d2g), (b.df, b.d2f), (b.dr, b.d2r)];
                let x = s.x();
                for ((name, f), (first, second)) in funcs.iter().zip(analytic) {
                    let g = |t: f64| f(&s.with_lambda(t.sqrt()).expect("t inside (0,1)"));
                    for (order, exact) in [(1u32, first), (2, second)] {
                        let label = || format!("d{}{name} at {s}", if order == 1 { "" } else { "2" });
                        match fd_adaptive(g, x, order) {
                            Ok(fd) => {
                                let err = if exact == 0.0 {
                                    fd.abs()
                                } else {
                                    (fd - exact).abs() / exact.abs()
                                };
                                report.record(err, err <= tol, || {
                                    format!("{}: analytic {exact:.12e}, numeric {fd:.12e}", label())
                                });
                            }
                            Err(e) => report.fail(format!("{}: {e}", label())),
                        }
                    }
                }
            }
        }
    }
    report
}

// Large steps lose to truncation where the curve bends hard, small ones to
// rounding in I at small x. Start large and halve until Richardson settles.
fn fd_adaptive(f: impl Fn(f64) -> f64, x: f64, order: u32) -> Result<f64> {
    let mut c = 0.1;
    loop {
        let r = oracle::finite_diff(&f, x, order, c * x.min(1.0 - x));
        if r.is_ok() || c < 0.003 {
            return r;
        }
        c /= 2.0;
    }
}

/// How a divergent endpoint limit counts as approached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    /// `|value| > bound` at distance `10⁻⁴` from the endpoint, with the
    /// sign of the limit.
    Exceeds(f64),
    /// Sign of the limit and strictly growing magnitude at distances
    /// `10⁻²`, `10⁻³`, `10⁻⁴`. A zero limit also counts as approached when
    /// the magnitude shrinks at least fivefold per decade of distance.
    Grows,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    Zero,
    One,
}

impl End {
    fn lambda(self, distance: f64) -> f64 {
        match self {
            End::Zero => distance,
            End::One => 1.0 - distance,
        }
    }
}

type Evaluator = Box<dyn Fn(&MeasurementSpec) -> f64>;

/// The tabulated endpoint values of one measurement.
fn limit_table(d: u32, k: u32, l: u32, end: End) -> Vec<(String, f64, Evaluator)> {
    let (kf, lf, df) = (f64::from(k), f64::from(l), f64::from(d));
    let jf = kf + lf;
    let invertible = k + l == d;
    let delta = if invertible { 1.0 } else { 0.0 };
    let inf = f64::INFINITY;
    let a = |j: u32, n: u32| coeff_a(j, n).to_f64();
    let (j0, j1, j2) = match end {
        End::Zero => (
            a(k, k - 1),
            lf * a(k - 1, k - 1),
            if k >= 2 { lf * (lf + 1.0) * a(k - 2, k - 1) } else { inf },
        ),
        End::One => (a(k + l, k + l - 1), lf * a(k + l, k + l), lf * (lf + 1.0) * a(k + l, k + l + 1)),
    };
    let w = match end {
        End::Zero => kf,
        End::One => jf,
    };
    let (di, d2i) = match end {
        End::Zero => (
            -lf / (kf * kf * LN_2),
            if k >= 2 {
                lf * (kf * kf + 3.0 * kf * lf - 2.0 * lf) / (kf.powi(3) * (kf - 1.0) * LN_2)
            } else {
                inf
            },
        ),
        End::One => (0.0, kf * lf / (jf * jf * (jf + 1.0) * LN_2)),
    };
    let (dfv, d2f) = match end {
        End::Zero => (inf, -inf),
        End::One => (0.0, -kf * lf / (2.0 * (df + 1.0) * jf)),
    };
    let slope_gr = -kf * df * (df + 1.0) / lf * delta;
    let (slope_gf, curv_gf, slope_if, curv_if, slope_ir, curv_ir) = match end {
        End::Zero => (
            -inf,
            -inf,
            -inf,
            -inf,
            -kf * df * LN_2 / lf * delta,
            if !invertible {
                0.0
            } else if k >= 2 {
                kf.powi(3) / (kf - 1.0) * (df * LN_2 / lf).powi(2)
            } else {
                inf
            },
        ),
        End::One => (
            0.0,
            -kf * jf.powi(3) * (df + 1.0) / (2.0 * lf),
            -jf * (jf + 1.0) * LN_2 / (2.0 * (df + 1.0)),
            match k.cmp(&l) {
                std::cmp::Ordering::Less => inf,
                std::cmp::Ordering::Equal => {
                    -kf * (2.0 * kf + 1.0).powi(3) * LN_2 * LN_2 / ((2.0 * kf + 3.0) * (df + 1.0))
                }
                std::cmp::Ordering::Greater => -inf,
            },
            if invertible { -inf } else { 0.0 },
            if invertible { inf } else { 0.0 },
        ),
    };
    let bundle = |f: fn(&DerivativeBundle) -> f64| -> Evaluator { Box::new(move |s| f(&derivatives::evaluate(s))) };
    let plane = |p: Plane, second: bool| -> Evaluator {
        if second {
            Box::new(move |s| tradeoff::curvature(p, s))
        } else {
            Box::new(move |s| tradeoff::slope(p, s))
        }
    };
    vec![
        ("J".into(), j0, Box::new(move |s: &MeasurementSpec| quantities::eval_j(k, l, s.lambda())) as Evaluator),
        ("dJ".into(), j1, Box::new(move |s: &MeasurementSpec| derivatives::dj_dlam2(k, l, s.lambda()))),
        ("d2J".into(), j2, Box::new(move |s: &MeasurementSpec| derivatives::d2j_dlam2(k, l, s.lambda()))),
        ("dI".into(), di, bundle(|b| b.di)),
        ("d2I".into(), d2i, bundle(|b| b.d2i)),
        ("dG".into(), -lf / ((df + 1.0) * w * w), bundle(|b| b.dg)),
        ("d2G".into(), 2.0 * lf * lf / ((df + 1.0) * w.powi(3)), bundle(|b| b.d2g)),
        ("dF".into(), dfv, bundle(|b| b.df)),
        ("d2F".into(), d2f, bundle(|b| b.d2f)),
        ("dR".into(), kf * df / (w * w) * delta, bundle(|b| b.dr)),
        ("d2R".into(), -2.0 * kf * lf * df / w.powi(3) * delta, bundle(|b| b.d2r)),
        ("slope G-F".into(), slope_gf, plane(Plane::GF, false)),
        ("curvature G-F".into(), curv_gf, plane(Plane::GF, true)),
        ("slope G-R".into(), slope_gr, plane(Plane::GR, false)),
        ("curvature G-R".into(), 0.0, plane(Plane::GR, true)),
        ("slope I-F".into(), slope_if, plane(Plane::IF, false)),
        ("curvature I-F".into(), curv_if, plane(Plane::IF, true)),
        ("slope I-R".into(), slope_ir, plane(Plane::IR, false)),
        ("curvature I-R".into(), curv_ir, plane(Plane::IR, true)),
    ]
}

const ENDPOINT_REL_TOL: f64 = 1e-3;
const DISPATCH_REL_TOL: f64 = 1e-12;

/// Every tabulated endpoint value: the dispatcher at the endpoint returns
/// the formula, and evaluation at distance `10⁻⁴` approaches it (finite
/// limits within `1e−3`, relative unless the limit is zero).
pub fn endpoint_limits(max_d: u32, divergence: Divergence) -> CheckReport {
    let mut report = CheckReport::new("endpoint-limits", "relative error");
    for d in 2..=max_d {
        for (k, l) in all_pairs(d) {
            for end in [End::Zero, End::One] {
                let at = |dist: f64| spec(d, k, l, end.lambda(dist));
                let where_ = if end == End::Zero { "lambda->0" } else { "lambda->1" };
                for (name, limit, eval) in limit_table(d, k, l, end) {
                    let label = || format!("{name} {where_} (d={d}, k={k}, l={l})");
                    let exact = eval(&at(0.0));
                    let same = if limit.is_infinite() {
                        exact == limit
                    } else {
                        (exact - limit).abs() <= DISPATCH_REL_TOL * limit.abs().max(1e-3)
                    };
                    report.record(0.0, same, || format!("{}: dispatcher gives {exact}, formula {limit}", label()));
                    let near = eval(&at(1e-4));
                    if limit.is_finite() {
                        let err = if limit == 0.0 {
                            near.abs()
                        } else {
                            (near - limit).abs() / limit.abs()
                        };
                        let ok = err <= ENDPOINT_REL_TOL
                            || (limit == 0.0 && divergence == Divergence::Grows && {
                                let far = eval(&at(1e-2)).abs();
                                let mid = eval(&at(1e-3)).abs();
                                far >= 5.0 * mid && mid >= 5.0 * near.abs()
                            });
                        report.record(err, ok, || format!("{}: {near:.9e} at distance 1e-4, limit {limit:.9e}", label()));
                    } else {
                        let sign_ok = near.signum() == limit.signum();
                        let ok = match divergence {
                            Divergence::Exceeds(bound) => sign_ok && near.abs() > bound,
                            Divergence::Grows => {
                                let far = eval(&at(1e-2)).abs();
                                let mid = eval(&at(1e-3)).abs();
                                sign_ok && far < mid && mid < near.abs()
                            }
                        };
                        report.record(0.0, ok, || {
                            format!("{}: {near:.6e} at distance 1e-4, limit {limit}", label())
                        });
                    }
                }
            }
        }
    }
    report
}

fn sign_ok(value: f64, rule: &str) -> bool {
    match rule {
        "<0" => value < 0.0,
        "<=0" => value <= 0.0,
        ">0" => value > 0.0,
        ">=0" => value >= 0.0,
        "=0" => value == 0.0,
        _ => unreachable!("unknown sign rule"),
    }
}

/// Signs of the derivatives with respect to `λ²` and of the slopes and
/// curvatures in the four planes, on a uniform grid of `points` values of
/// `λ` including both endpoints.
pub fn sign_tables(max_d: u32, points: usize) -> CheckReport {
    let mut report = CheckReport::new("sign-tables", "count");
    let grid = tradeoff::uniform_grid(points);
    for d in 2..=max_d {
        for (k, l) in all_pairs(d) {
            for &lam in &grid {
                let s = spec(d, k, l, lam);
                let b = derivatives::evaluate(&s);
                let rows = [
                    ("dI", b.di, "<=0"),
                    ("d2I", b.d2i, ">0"),
                    ("dG", b.dg, "<0"),
                    ("d2G", b.d2g, ">0"),
                    ("dF", b.df, ">=0"),
                    ("d2F", b.d2f, "<0"),
                    ("dR", b.dr, ">=0"),
                    ("d2R", b.d2r, "<=0"),
                ];
                for (name, v, rule) in rows {
                    report.record(0.0, sign_ok(v, rule), || format!("{name} = {v:e} at {s}, expected {rule}"));
                }
            }
            for plane in Plane::ALL {
                let curve = tradeoff::sample_curve(plane, d, k, l, &grid).expect("valid grid");
                let degenerate = plane.is_degenerate(d, k, l);
                let curv_rule = match plane {
                    _ if degenerate => "=0",
                    Plane::GF => "<0",
                    Plane::GR => "=0",
                    Plane::IR => ">0",
                    Plane::IF if k >= l => "<0",
                    Plane::IF => "",
                };
                let slope_rule = if degenerate { "=0" } else { "<=0" };
                for p in &curve {
                    report.record(0.0, sign_ok(p.slope, slope_rule), || {
                        format!("{plane} slope {:e} at lambda={} (d={d}, k={k}, l={l}), expected {slope_rule}", p.slope, p.lambda)
                    });
                    if !curv_rule.is_empty() {
                        report.record(0.0, sign_ok(p.curvature, curv_rule), || {
                            format!(
                                "{plane} curvature {:e} at lambda={} (d={d}, k={k}, l={l}), expected {curv_rule}",
                                p.curvature, p.lambda
                            )
                        });
                    }
                }
                if curv_rule.is_empty() {
                    // Negative, then positive up to λ = 1, with one change.
                    let signs: Vec<f64> = curve.iter().map(|p| p.curvature.signum()).collect();
                    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                    let ok = signs.first() == Some(&-1.0) && signs.last() == Some(&1.0) && changes == 1
                        && curve.iter().all(|p| p.curvature != 0.0 && !p.curvature.is_nan());
                    report.record(0.0, ok, || {
                        format!("I-F curvature of (d={d}, k={k}, l={l}) changes sign {changes} times")
                    });
                }
            }
        }
    }
    report
}

/// `classify_shape` against the expected shape of every curve.
pub fn shape_classification(max_d: u32) -> CheckReport {
    let mut report = CheckReport::new("shape-classification", "count");
    for d in 2..=max_d {
        for (k, l) in all_pairs(d) {
            for plane in Plane::ALL {
                let degenerate = plane.is_degenerate(d, k, l);
                let expected = match plane {
                    _ if degenerate => ShapeTag::StraightDecreasing,
                    Plane::GF => ShapeTag::ConvexDecreasing,
                    Plane::GR => ShapeTag::StraightDecreasing,
                    Plane::IR => ShapeTag::ConcaveDecreasing,
                    Plane::IF if k >= l => ShapeTag::ConvexDecreasing,
                    Plane::IF => ShapeTag::SShapedDecreasing,
                };
                match tradeoff::classify_shape(plane, d, k, l) {
                    Ok(c) => report.record(0.0, c.tag == expected && c.degenerate == degenerate, || {
                        format!("{plane} (d={d}, k={k}, l={l}): got {} (degenerate {}), expected {expected}", c.tag, c.degenerate)
                    }),
                    Err(e) => report.fail(format!("{plane} (d={d}, k={k}, l={l}): {e}")),
                }
            }
        }
    }
    report
}

/// The dent of the upper I–F boundary, and the absence of a dent for `k ≥ l`.
pub fn inflection(max_d: u32) -> CheckReport {
    let mut report = CheckReport::new("inflection", "count");
    for d in 3..=max_d {
        match tradeoff::find_inflection(d, 1, d - 1) {
            Ok(lam) => {
                let before = tradeoff::curvature(Plane::IF, &spec(d, 1, d - 1, lam - 1e-7));
                let after = tradeoff::curvature(Plane::IF, &spec(d, 1, d - 1, lam + 1e-7));
                let ok = lam > 0.0 && lam < 1.0 && before < 0.0 && after > 0.0;
                report.record(0.0, ok, || {
                    format!("d={d}: lambda*={lam}, curvature {before:e} before and {after:e} after")
                });
            }
            Err(e) => report.fail(format!("d={d}, k=1: {e}")),
        }
    }
    for d in 2..=max_d {
        for (k, l) in all_pairs(d).into_iter().filter(|(k, l)| k >= l) {
            let r = tradeoff::find_inflection(d, k, l);
            report.record(0.0, matches!(r, Err(crate::Error::NoInflection(_))), || {
                format!("(d={d}, k={k}, l={l}): expected no inflection, got {r:?}")
            });
        }
    }
    report
}

/// Values of `λ*` for `(d, 1, d−1)`, `d = 3..=max_d`.
pub fn inflection_points(max_d: u32) -> Vec<(u32, Result<f64>)> {
    (3..=max_d).map(|d| (d, tradeoff::find_inflection(d, 1, d - 1))).collect()
}

/// Largest `k + l` for the `B_general` checks and largest `n`.
pub const B_GENERAL_KL: u32 = 12;
pub const B_GENERAL_N: u32 = 6;
pub const REGIME_MAX_J: u32 = 30;

/// The combinatorial identities, exactly in rationals, for `k + l ≤ bound`.
pub fn identities(bound: u32) -> CheckReport {
    let mut report = CheckReport::new("identities", "count");
    for total in 2..=bound {
        for k in 1..total {
            let l = total - k;
            let mut ids: Vec<Identity> = Identity::BASIC.iter().copied().filter(|id| *id != Identity::A2 || k >= 2).collect();
            if total <= B_GENERAL_KL.min(bound) {
                ids.extend((0..=B_GENERAL_N).map(Identity::BGeneral));
            }
            for id in ids {
                match oracle::check_identity(id, k, l) {
                    Ok(ok) => report.record(0.0, ok, || format!("{id} fails for k={k}, l={l}")),
                    Err(e) => report.fail(format!("{id} (k={k}, l={l}): {e}")),
                }
            }
        }
    }
    for j in 0..=REGIME_MAX_J {
        report.record(0.0, oracle::check_regime_consistency(j), || format!("a({j},{}) regimes disagree", j + 1));
    }
    report
}

/// `dR = α·dG` and `d2R = α·d2G`.
pub fn proportionality(max_d: u32, points: usize, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("proportionality", "relative error");
    for d in 2..=max_d {
        for (k, l) in all_pairs(d) {
            for lam in tradeoff::uniform_grid(points) {
                let s = spec(d, k, l, lam);
                let alpha = derivatives::alpha(&s).value;
                let b = derivatives::evaluate(&s);
                for (name, r, g) in [("dR", b.dr, b.dg), ("d2R", b.d2r, b.d2g)] {
                    let prod = alpha * g;
                    let err = if r == 0.0 { prod.abs() } else { (r - prod).abs() / r.abs() };
                    report.record(err, err <= tol, || format!("{name} at {s}: {r:e} vs alpha*{g:e} = {prod:e}"));
                }
            }
        }
    }
    report
}

/// Closed sums against the series for `J`, `J'`, `J''` on
/// `0.02 ≤ 1 − λ² ≤ 0.05`.
pub fn seam_quality(max_kl: u32, points: usize, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("seam", "relative error");
    for total in 2..=max_kl {
        for k in 1..total {
            let l = total - k;
            for i in 0..points {
                let eps = 0.02 + 0.03 * i as f64 / (points - 1) as f64;
                let lam = (1.0 - eps).sqrt();
                let closed = jsum::closed_form(k, l, lam).as_array();
                let series = jsum::series(k, l, lam).as_array();
                for ((c, s), name) in closed.iter().zip(series).zip(["J", "dJ", "d2J"]) {
                    let err = (c - s).abs() / c.abs();
                    report.record(err, err <= tol, || {
                        format!("{name} (k={k}, l={l}, 1-lambda^2={eps}): closed {c:e}, series {s:e}")
                    });
                }
            }
        }
    }
    report
}

/// Reversal simulation for `d = 4`, `k + l = 4`: unit overlap after every
/// successful reversal, and the posterior-weighted recovery probability
/// against `R`.
pub fn reversal(lambdas: &[f64], n_samples: usize, seed: u64, n_sigma: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("reversal", "sigma");
    let d = 4;
    for k in 1..d {
        for &lam in lambdas {
            let s = spec(d, k, d - k, lam);
            let est = oracle::mc_recovery_probability(&s, n_samples, seed)?;
            let r = quantities::eval_r(&s);
            report.record(0.0, est.worst_overlap_error <= 1e-12, || {
                format!("{s}: recovered overlap off by {:e}", est.worst_overlap_error)
            });
            let z = est.recovery.z_score(r);
            report.record(z, est.recovery.agrees_with(r, n_sigma), || {
                format!("{s}: recovery {:.8} ± {:.2e}, R = {r:.8}", est.recovery.mean, est.recovery.std_error)
            });
        }
    }
    Ok(report)
}
