//! Slopes and curvatures of the measurement curves in the four
//! information–disturbance planes, curve sampling, shape classification and
//! the boundary sets.

use std::cell::OnceCell;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::derivatives::{self, region, DerivativeBundle, Region};
use crate::error::Error;
use crate::jsum;
use crate::quantities::{self, MeasurementSpec};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InfoAxis {
    /// Shannon information gain `I`.
    Shannon,
    /// Estimation fidelity `G`.
    Estimation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DisturbanceAxis {
    /// Operation fidelity `F`.
    Fidelity,
    /// Physical reversibility `R`.
    Reversibility,
}

/// One of the four information–disturbance planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Plane {
    GF,
    GR,
    IF,
    IR,
}

impl Plane {
    pub const ALL: [Plane; 4] = [Plane::GF, Plane::GR, Plane::IF, Plane::IR];

    pub fn info_axis(self) -> InfoAxis {
        match self {
            Plane::GF | Plane::GR => InfoAxis::Estimation,
            Plane::IF | Plane::IR => InfoAxis::Shannon,
        }
    }

    pub fn disturbance_axis(self) -> DisturbanceAxis {
        match self {
            Plane::GF | Plane::IF => DisturbanceAxis::Fidelity,
            Plane::GR | Plane::IR => DisturbanceAxis::Reversibility,
        }
    }

    /// Short lowercase name, as accepted by [`FromStr`].
    pub fn name(self) -> &'static str {
        match self {
            Plane::GF => "gf",
            Plane::GR => "gr",
            Plane::IF => "if",
            Plane::IR => "ir",
        }
    }

    /// Whether the curve `(k, l)` collapses onto the information axis
    /// (`R ≡ 0` because `k + l < d`).
    pub fn is_degenerate(self, d: u32, k: u32, l: u32) -> bool {
        self.disturbance_axis() == DisturbanceAxis::Reversibility && k + l != d
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', '–'], "").as_str() {
            "gf" => Ok(Plane::GF),
            "gr" => Ok(Plane::GR),
            "if" => Ok(Plane::IF),
            "ir" => Ok(Plane::IR),
            _ => Err(Error::out_of_range(
                "plane",
                format!("expected one of gf, gr, if, ir, got {s:?}"),
            )),
        }
    }
}

/// One measurement, with its derivative bundle computed on first use.
struct Point<'a> {
    spec: &'a MeasurementSpec,
    bundle: OnceCell<DerivativeBundle>,
}

impl<'a> Point<'a> {
    fn new(spec: &'a MeasurementSpec) -> Self {
        Self {
            spec,
            bundle: OnceCell::new(),
        }
    }

    fn bundle(&self) -> &DerivativeBundle {
        self.bundle.get_or_init(|| derivatives::evaluate(self.spec))
    }
}

/// First derivative of disturbance with respect to information.
pub fn slope(plane: Plane, spec: &MeasurementSpec) -> f64 {
    slope_at(plane, &Point::new(spec))
}

fn slope_at(plane: Plane, point: &Point<'_>) -> f64 {
    let spec = point.spec;
    let (d, k, l) = (spec.d(), spec.k(), spec.l());
    if plane.is_degenerate(d, k, l) {
        return 0.0;
    }
    let (kf, lf, df) = (f64::from(k), f64::from(l), f64::from(d));
    let lambda = spec.lambda();
    let reg = region(lambda);
    match plane {
        Plane::GF => match reg {
            Region::Zero => f64::NEG_INFINITY,
            Region::One => 0.0,
            _ => -kf * (1.0 - lambda) * (kf + lf * lambda) / lambda,
        },
        Plane::GR => -kf * df * (df + 1.0) / lf,
        Plane::IF => match reg {
            Region::Zero => f64::NEG_INFINITY,
            Region::One => -(kf + lf) * (kf + lf + 1.0) * LN_2 / (2.0 * (df + 1.0)),
            Region::Seam => spec.near_one().slope_if(-jsum::epsilon(lambda)),
            Region::Generic => point.bundle().df / point.bundle().di,
        },
        Plane::IR => match reg {
            Region::Zero => -kf * df * LN_2 / lf,
            Region::One => f64::NEG_INFINITY,
            Region::Seam => spec.near_one().slope_ir(-jsum::epsilon(lambda)),
            Region::Generic => point.bundle().dr / point.bundle().di,
        },
    }
}

/// `(f''g' − f'g'')/g'³` from derivatives with respect to `λ²`.
fn quotient_curvature(df: f64, d2f: f64, dg: f64, d2g: f64) -> f64 {
    (d2f * dg - df * d2g) / (dg * dg * dg)
}

/// Second derivative of disturbance with respect to information.
pub fn curvature(plane: Plane, spec: &MeasurementSpec) -> f64 {
    curvature_at(plane, &Point::new(spec))
}

fn curvature_at(plane: Plane, point: &Point<'_>) -> f64 {
    let spec = point.spec;
    let (d, k, l) = (spec.d(), spec.k(), spec.l());
    if plane.is_degenerate(d, k, l) {
        return 0.0;
    }
    let (kf, lf, df) = (f64::from(k), f64::from(l), f64::from(d));
    let lambda = spec.lambda();
    let reg = region(lambda);
    match plane {
        Plane::GF => match reg {
            Region::Zero => f64::NEG_INFINITY,
            Region::One => -kf * (kf + lf).powi(3) * (df + 1.0) / (2.0 * lf),
            _ => -kf * (df + 1.0) * spec.weight().powi(3) / (2.0 * lf * lambda.powi(3)),
        },
        Plane::GR => 0.0,
        Plane::IF => match reg {
            Region::Zero => f64::NEG_INFINITY,
            Region::One => {
                if k < l {
                    f64::INFINITY
                } else if k == l {
                    -kf * (2.0 * kf + 1.0).powi(3) * LN_2 * LN_2 / ((2.0 * kf + 3.0) * (df + 1.0))
                } else {
                    f64::NEG_INFINITY
                }
            }
            Region::Seam => spec.near_one().curvature_if(-jsum::epsilon(lambda)),
            Region::Generic => {
                let b = point.bundle();
                quotient_curvature(b.df, b.d2f, b.di, b.d2i)
            }
        },
        Plane::IR => match reg {
            Region::Zero => {
                if k >= 2 {
                    let c = df * LN_2 / lf;
                    kf.powi(3) / (kf - 1.0) * c * c
                } else {
                    f64::INFINITY
                }
            }
            Region::One => f64::INFINITY,
            Region::Seam => spec.near_one().curvature_ir(-jsum::epsilon(lambda)),
            Region::Generic => {
                let b = point.bundle();
                quotient_curvature(b.dr, b.d2r, b.di, b.d2i)
            }
        },
    }
}

/// One point of a trade-off curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub lambda: f64,
    pub info: f64,
    pub disturbance: f64,
    pub slope: f64,
    pub curvature: f64,
}

pub fn info_value(plane: Plane, spec: &MeasurementSpec) -> f64 {
    match plane.info_axis() {
        InfoAxis::Shannon => quantities::eval_i(spec),
        InfoAxis::Estimation => quantities::eval_g(spec),
    }
}

pub fn disturbance_value(plane: Plane, spec: &MeasurementSpec) -> f64 {
    match plane.disturbance_axis() {
        DisturbanceAxis::Fidelity => quantities::eval_f(spec),
        DisturbanceAxis::Reversibility => quantities::eval_r(spec),
    }
}

pub fn sample_at(plane: Plane, spec: &MeasurementSpec) -> CurveSample {
    let point = Point::new(spec);
    let slope = slope_at(plane, &point);
    let curvature = curvature_at(plane, &point);
    let info = match (plane.info_axis(), point.bundle.get()) {
        (InfoAxis::Shannon, Some(b)) if region(spec.lambda()) == Region::Generic => quantities::info_from_j(spec, b.j),
        _ => info_value(plane, spec),
    };
    CurveSample {
        lambda: spec.lambda(),
        info,
        disturbance: disturbance_value(plane, spec),
        slope,
        curvature,
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidGrid(format!("value {v} outside [0, 1]")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// The curve `(k, l)` at every `λ` of `grid` (in order).
pub fn sample_curve(plane: Plane, d: u32, k: u32, l: u32, grid: &[f64]) -> Result<Vec<CurveSample>> {
    let spec = MeasurementSpec::new(d, k, l, 0.0)?;
    check_grid(grid)?;
    Ok(grid
        .par_iter()
        .map(|&lam| {
            let s = spec.with_lambda(lam).expect("grid checked");
            sample_at(plane, &s)
        })
        .collect())
}

/// `n` equally spaced values of `λ` from 0 to 1 inclusive.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "uniform grid needs at least two points");
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeTag {
    /// Negative curvature throughout.
    ConvexDecreasing,
    StraightDecreasing,
    /// Positive curvature throughout.
    ConcaveDecreasing,
    /// Negative curvature turning positive towards `λ = 1`.
    SShapedDecreasing,
}

impl ShapeTag {
    pub fn name(self) -> &'static str {
        match self {
            ShapeTag::ConvexDecreasing => "convex_decreasing",
            ShapeTag::StraightDecreasing => "straight_decreasing",
            ShapeTag::ConcaveDecreasing => "concave_decreasing",
            ShapeTag::SShapedDecreasing => "s_shaped_decreasing",
        }
    }
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShapeClass {
    pub tag: ShapeTag,
    /// Set for R-planes with `k + l ≠ d`, where the curve is the info axis.
    pub degenerate: bool,
}

const SHAPE_POINTS: usize = 1001;
const SHAPE_ZERO_TOL: f64 = 1e-9;

/// `λ = 0`, the 1001 interior points `i/1002`, and `λ = 1`.
fn shape_grid() -> Vec<f64> {
    let n = SHAPE_POINTS + 1;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

fn median_abs(values: &[f64]) -> f64 {
    let mut finite: Vec<f64> = values.iter().filter(|v| v.is_finite()).map(|v| v.abs()).collect();
    if finite.is_empty() {
        return 0.0;
    }
    finite.sort_by(f64::total_cmp);
    finite[finite.len() / 2]
}

fn signs(values: &[f64]) -> Vec<i8> {
    let tol = SHAPE_ZERO_TOL * (1.0 + median_abs(values));
    values
        .iter()
        .map(|&v| {
            if v.is_nan() {
                i8::MIN
            } else if v.abs() < tol {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Shape of the curve `(k, l)` from the signs of its slope and curvature.
pub fn classify_shape(plane: Plane, d: u32, k: u32, l: u32) -> Result<ShapeClass> {
    MeasurementSpec::new(d, k, l, 0.0)?;
    if plane.is_degenerate(d, k, l) {
        return Ok(ShapeClass {
            tag: ShapeTag::StraightDecreasing,
            degenerate: true,
        });
    }
    let samples = sample_curve(plane, d, k, l, &shape_grid())?;
    let slopes: Vec<f64> = samples.iter().map(|s| s.slope).collect();
    let curv: Vec<f64> = samples.iter().map(|s| s.curvature).collect();
    let describe = || format!("plane {plane}, d={d}, k={k}, l={l}");
    let slope_signs = signs(&slopes);
    // The G–F slope is exactly zero at λ = 1.
    if slope_signs.iter().any(|&s| s != -1 && s != 0) {
        return Err(Error::Unclassifiable(format!("{}: slope not non-positive", describe())));
    }
    let cs = signs(&curv);
    if cs.contains(&i8::MIN) {
        return Err(Error::Unclassifiable(format!("{}: undefined curvature", describe())));
    }
    let tag = if cs.iter().all(|&s| s == 0) {
        ShapeTag::StraightDecreasing
    } else if cs.iter().all(|&s| s == -1) {
        ShapeTag::ConvexDecreasing
    } else if cs.iter().all(|&s| s == 1) {
        ShapeTag::ConcaveDecreasing
    } else {
        let first_nonneg = cs.iter().position(|&s| s != -1).unwrap_or(cs.len());
        let first_pos = cs.iter().position(|&s| s == 1).unwrap_or(cs.len());
        let one_change = first_nonneg > 0
            && cs[first_nonneg..first_pos].iter().all(|&s| s == 0)
            && first_pos < cs.len()
            && cs[first_pos..].iter().all(|&s| s == 1);
        if one_change {
            ShapeTag::SShapedDecreasing
        } else {
            return Err(Error::Unclassifiable(format!(
                "{}: curvature sign pattern {}",
                describe(),
                sign_summary(&cs)
            )));
        }
    };
    Ok(ShapeClass {
        tag,
        degenerate: false,
    })
}

/// Run-length summary such as `-x12 +x990`.
fn sign_summary(signs: &[i8]) -> String {
    let mut out = Vec::new();
    let mut i = 0;
    while i < signs.len() {
        let s = signs[i];
        let run = signs[i..].iter().take_while(|&&t| t == s).count();
        let c = match s {
            1 => '+',
            -1 => '-',
            0 => '0',
            _ => '?',
        };
        out.push(format!("{c}x{run}"));
        i += run;
    }
    out.join(" ")
}

const INFLECTION_TOL: f64 = 1e-10;
const INFLECTION_SCAN: usize = 1000;

/// The `λ` where the I–F curvature of the curve `(k, l)` changes sign from
/// negative to positive. Exists only for `k < l`.
pub fn find_inflection(d: u32, k: u32, l: u32) -> Result<f64> {
    let spec = MeasurementSpec::new(d, k, l, 0.0)?;
    if k >= l {
        return Err(Error::NoInflection(format!(
            "k={k} >= l={l}: the I-F curvature stays negative"
        )));
    }
    let curv = |lam: f64| curvature(Plane::IF, &spec.with_lambda(lam).expect("λ in [0,1]"));
    let n = INFLECTION_SCAN;
    let mut prev_lam = 0.0;
    let mut prev = curv(0.0);
    for i in 1..=n {
        let lam = i as f64 / n as f64;
        let c = curv(lam);
        if prev < 0.0 && c > 0.0 {
            let (mut lo, mut hi) = (prev_lam, lam);
            while hi - lo > INFLECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if curv(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev_lam = lam;
        prev = c;
    }
    Err(Error::NoInflection(format!(
        "no negative-to-positive change of the I-F curvature for d={d}, k={k}, l={l}"
    )))
}

/// A curve `(k, l)` from `P_k` (`λ = 0`) to `P_{k+l}` (`λ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveDescriptor {
    pub k: u32,
    pub l: u32,
    pub start_rank: u32,
    pub end_rank: u32,
}

impl CurveDescriptor {
    fn new(k: u32, l: u32) -> Self {
        Self {
            k,
            l,
            start_rank: k,
            end_rank: k + l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySet {
    pub plane: Plane,
    pub upper: Vec<CurveDescriptor>,
    pub lower: Vec<CurveDescriptor>,
}

/// Upper boundary `(1, d−1)` and lower boundary `(k, 1)`, `k = 1..d−1`.
pub fn boundary_set(d: u32, plane: Plane) -> Result<BoundarySet> {
    if d < 2 {
        return Err(Error::out_of_range("d", format!("need d >= 2, got {d}")));
    }
    Ok(BoundarySet {
        plane,
        upper: vec![CurveDescriptor::new(1, d - 1)],
        lower: (1..d).map(|k| CurveDescriptor::new(k, 1)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::all_pairs;
    use approx::assert_relative_eq;

    fn spec(d: u32, k: u32, l: u32, lambda: f64) -> MeasurementSpec {
        MeasurementSpec::new(d, k, l, lambda).unwrap()
    }

    #[test]
    fn plane_parsing() {
        assert_eq!("gf".parse::<Plane>().unwrap(), Plane::GF);
        assert_eq!("I-R".parse::<Plane>().unwrap(), Plane::IR);
        assert!("xy".parse::<Plane>().is_err());
    }

    #[test]
    fn slope_examples() {
        assert_relative_eq!(slope(Plane::GF, &spec(4, 1, 3, 0.5)), -2.5, max_relative = 1e-15);
        for lam in [0.0, 0.3, 1.0] {
            assert_relative_eq!(slope(Plane::GR, &spec(4, 1, 3, lam)), -20.0 / 3.0, max_relative = 1e-15);
        }
        for (k, l) in [(1, 3), (2, 2), (3, 1)] {
            assert_relative_eq!(slope(Plane::IF, &spec(4, k, l, 1.0)), -2.0 * LN_2, max_relative = 1e-15);
        }
        assert_relative_eq!(slope(Plane::IR, &spec(4, 1, 3, 0.0)), -4.0 * LN_2 / 3.0, max_relative = 1e-15);
        assert_eq!(slope(Plane::GR, &spec(4, 1, 2, 0.4)), 0.0);
        assert_eq!(slope(Plane::IR, &spec(4, 1, 2, 0.4)), 0.0);
    }

    #[test]
    fn curvature_examples() {
        assert_relative_eq!(curvature(Plane::GF, &spec(4, 1, 3, 1.0)), -160.0 / 3.0, max_relative = 1e-15);
        let expected = -2.0 * 125.0 * LN_2 * LN_2 / 35.0;
        assert_relative_eq!(curvature(Plane::IF, &spec(4, 2, 2, 1.0)), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, -3.4318, max_relative = 1e-4);
        let expected = 8.0 * (2.0 * LN_2).powi(2);
        assert_relative_eq!(curvature(Plane::IR, &spec(4, 2, 2, 0.0)), expected, max_relative = 1e-15);
        assert_eq!(curvature(Plane::GR, &spec(4, 2, 2, 0.3)), 0.0);
        assert_eq!(curvature(Plane::IF, &spec(4, 1, 3, 1.0)), f64::INFINITY);
        assert_eq!(curvature(Plane::IF, &spec(4, 3, 1, 1.0)), f64::NEG_INFINITY);
        assert_eq!(curvature(Plane::IR, &spec(4, 1, 3, 0.0)), f64::INFINITY);
    }

    #[test]
    fn slopes_match_derivative_ratios() {
        for d in 2..=6u32 {
            for (k, l) in all_pairs(d) {
                for i in 1..20 {
                    let s = spec(d, k, l, f64::from(i) / 20.0);
                    let b = derivatives::evaluate(&s);
                    let pairs = [
                        (Plane::GF, b.df / b.dg),
                        (Plane::GR, b.dr / b.dg),
                        (Plane::IF, b.df / b.di),
                        (Plane::IR, b.dr / b.di),
                    ];
                    for (plane, ratio) in pairs {
                        let v = slope(plane, &s);
                        assert!(
                            (v - ratio).abs() <= 1e-12 * v.abs().max(1e-300) || (v == 0.0 && ratio.abs() < 1e-300),
                            "{plane} d={d} k={k} l={l} i={i}: {v} vs {ratio}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generic_and_expanded_quotients_agree_at_the_seam() {
        for d in 2..=6u32 {
            for (k, l) in all_pairs(d) {
                let e = spec(d, k, l, 0.5).near_one();
                for eps in [0.049f64, 0.06] {
                    let lam = (1.0 - eps).sqrt();
                    let s = spec(d, k, l, lam);
                    let b = derivatives::evaluate(&s);
                    let u = -jsum::epsilon(lam);
                    let generic = quotient_curvature(b.df, b.d2f, b.di, b.d2i);
                    assert_relative_eq!(generic, e.curvature_if(u), max_relative = 1e-8);
                    assert_relative_eq!(b.df / b.di, e.slope_if(u), max_relative = 1e-10);
                    if s.is_invertible() {
                        let generic = quotient_curvature(b.dr, b.d2r, b.di, b.d2i);
                        assert_relative_eq!(generic, e.curvature_ir(u), max_relative = 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn sample_curve_examples() {
        let s = sample_curve(Plane::GF, 4, 1, 3, &[0.0, 0.5, 1.0]).unwrap();
        let expect = [(0.4, 0.4), (0.2 * (1.0 + 1.0 / 1.75), 0.2 * (1.0 + 6.25 / 1.75)), (0.25, 1.0)];
        for (a, (g, f)) in s.iter().zip(expect) {
            assert_relative_eq!(a.info, g, max_relative = 1e-15);
            assert_relative_eq!(a.disturbance, f, max_relative = 1e-15);
        }
        let s = sample_curve(Plane::IR, 4, 1, 2, &[0.0, 1.0]).unwrap();
        assert!(s.iter().all(|p| p.disturbance == 0.0));
        assert!(matches!(sample_curve(Plane::GF, 4, 1, 3, &[0.5, 0.2]), Err(Error::InvalidGrid(_))));
        assert!(sample_curve(Plane::GF, 4, 1, 3, &[0.5, 1.2]).is_err());
        assert!(sample_curve(Plane::GF, 4, 1, 3, &[]).is_err());
    }

    #[test]
    fn shape_examples() {
        assert_eq!(classify_shape(Plane::GF, 4, 2, 1).unwrap().tag, ShapeTag::ConvexDecreasing);
        assert_eq!(classify_shape(Plane::GR, 4, 1, 3).unwrap().tag, ShapeTag::StraightDecreasing);
        assert_eq!(classify_shape(Plane::IF, 4, 1, 3).unwrap().tag, ShapeTag::SShapedDecreasing);
        assert_eq!(classify_shape(Plane::IR, 4, 3, 1).unwrap().tag, ShapeTag::ConcaveDecreasing);
        let c = classify_shape(Plane::GR, 4, 1, 2).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.tag, ShapeTag::StraightDecreasing);
    }

    #[test]
    fn inflection_examples() {
        for (d, k, l) in [(4, 1, 3), (3, 1, 2)] {
            let lam = find_inflection(d, k, l).unwrap();
            assert!(lam > 0.0 && lam < 1.0);
            let before = curvature(Plane::IF, &spec(d, k, l, lam - 1e-6));
            let after = curvature(Plane::IF, &spec(d, k, l, lam + 1e-6));
            assert!(before < 0.0 && after > 0.0, "d={d}: λ*={lam} {before} {after}");
        }
        assert!(matches!(find_inflection(4, 2, 2), Err(Error::NoInflection(_))));
    }

    #[test]
    fn boundary_examples() {
        let b = boundary_set(4, Plane::IF).unwrap();
        assert_eq!(b.upper.iter().map(|c| (c.k, c.l)).collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(b.lower.iter().map(|c| (c.k, c.l)).collect::<Vec<_>>(), vec![(1, 1), (2, 1), (3, 1)]);
        assert_eq!((b.upper[0].start_rank, b.upper[0].end_rank), (1, 4));
        let b = boundary_set(2, Plane::GF).unwrap();
        assert_eq!(b.upper, b.lower);
        assert_eq!(boundary_set(5, Plane::GR).unwrap().lower.len(), 4);
    }

    #[test]
    fn if_curvature_diverges_with_sign_of_l_minus_k() {
        for d in 2..=8u32 {
            for (k, l) in all_pairs(d) {
                if k == l {
                    continue;
                }
                let near = curvature(Plane::IF, &spec(d, k, l, 1.0 - 1e-3));
                let far = curvature(Plane::IF, &spec(d, k, l, 1.0 - 1e-2));
                let sign = if k < l { 1.0 } else { -1.0 };
                assert!(near * sign > 0.0, "d={d} k={k} l={l}: {near}");
                assert!(near.abs() > far.abs(), "d={d} k={k} l={l}: {near} vs {far}");
            }
        }
    }
}
