//! First and second derivatives of `J`, `I`, `G`, `F`, `R` with respect to
//! `λ²`, their limits at `λ = 0` and `λ = 1`, and the third and fourth
//! derivatives at `λ = 1`.
//!
//! Inputs within [`ENDPOINT_THRESHOLD`] of an endpoint are answered by the
//! limit formulas. Divergent limits are returned as signed infinities.

use std::f64::consts::LN_2;

use num_traits::ToPrimitive;

use crate::combinatorics::{binomial, coeff_a_rho, LogRational, Rational};
use crate::error::Error;
use crate::jsum::{self, JValues};
use crate::quantities::MeasurementSpec;
use crate::{Result, ENDPOINT_THRESHOLD};

/// Derivatives with respect to `λ²` at one measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeBundle {
    pub j: f64,
    pub dj: f64,
    pub d2j: f64,
    pub di: f64,
    pub d2i: f64,
    pub dg: f64,
    pub d2g: f64,
    pub df: f64,
    pub d2f: f64,
    pub dr: f64,
    pub d2r: f64,
}

/// The constant in `R' = α·G'` and `R'' = α·G''`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha {
    pub value: f64,
}

/// Where an evaluation is routed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Region {
    Zero,
    One,
    /// `0 < ε = 1−λ² < SEAM_EPSILON`.
    Seam,
    Generic,
}

pub(crate) fn region(lambda: f64) -> Region {
    if lambda < ENDPOINT_THRESHOLD {
        Region::Zero
    } else if 1.0 - lambda < ENDPOINT_THRESHOLD {
        Region::One
    } else if jsum::epsilon(lambda) < jsum::SEAM_EPSILON {
        Region::Seam
    } else {
        Region::Generic
    }
}

fn j_values(k: u32, l: u32, lambda: f64) -> JValues {
    match region(lambda) {
        Region::Zero => jsum::at_zero(k, l),
        Region::One => jsum::at_one(k, l),
        Region::Seam => jsum::series(k, l, lambda),
        Region::Generic => jsum::closed_form(k, l, lambda),
    }
}

/// `J'` with respect to `λ²`.
pub fn dj_dlam2(k: u32, l: u32, lambda: f64) -> f64 {
    j_values(k, l, lambda).first
}

/// `J''` with respect to `λ²`; `+∞` at `λ = 0` when `k = 1`.
pub fn d2j_dlam2(k: u32, l: u32, lambda: f64) -> f64 {
    j_values(k, l, lambda).second
}

fn kl(spec: &MeasurementSpec) -> (f64, f64, f64) {
    (f64::from(spec.k()), f64::from(spec.l()), f64::from(spec.d()))
}

/// `I'` and `I''` given `J`, `J'`, `J''` at a generic point.
fn info_chain(spec: &MeasurementSpec, jv: &JValues) -> (f64, f64) {
    let (_, l, _) = kl(spec);
    let w = spec.weight();
    let first = -(l / w) / LN_2 - l * jv.value / (w * w) + jv.first / w;
    let second = (l * l / (w * w)) / LN_2 + 2.0 * l * l * jv.value / (w * w * w)
        - 2.0 * l * jv.first / (w * w)
        + jv.second / w;
    (first, second)
}

fn info_at_zero(spec: &MeasurementSpec) -> (f64, f64) {
    let (k, l, _) = kl(spec);
    let first = -l / (k * k * LN_2);
    let second = if spec.k() >= 2 {
        l * (k * k + 3.0 * k * l - 2.0 * l) / (k * k * k * (k - 1.0) * LN_2)
    } else {
        f64::INFINITY
    };
    (first, second)
}

fn info_at_one(spec: &MeasurementSpec) -> (f64, f64) {
    let (k, l, _) = kl(spec);
    let j = k + l;
    (0.0, k * l / (j * j * (j + 1.0) * LN_2))
}

fn info_derivatives(spec: &MeasurementSpec) -> (f64, f64) {
    let lambda = spec.lambda();
    match region(lambda) {
        Region::Zero => info_at_zero(spec),
        Region::One => info_at_one(spec),
        Region::Seam => {
            let e = spec.near_one();
            let u = -jsum::epsilon(lambda);
            (e.di_value(u), e.d2i_value(u))
        }
        Region::Generic => info_chain(spec, &jsum::closed_form(spec.k(), spec.l(), lambda)),
    }
}

/// `I'`; `0` at `λ = 1`.
pub fn di_dlam2(spec: &MeasurementSpec) -> f64 {
    info_derivatives(spec).0
}

/// `I''`; `+∞` at `λ = 0` when `k = 1`.
pub fn d2i_dlam2(spec: &MeasurementSpec) -> f64 {
    info_derivatives(spec).1
}

/// `λ²` with the endpoint dispatch applied.
fn snapped_x(spec: &MeasurementSpec) -> f64 {
    match region(spec.lambda()) {
        Region::Zero => 0.0,
        Region::One => 1.0,
        _ => spec.x(),
    }
}

fn snapped_weight(spec: &MeasurementSpec) -> f64 {
    let (k, l, _) = kl(spec);
    k + l * snapped_x(spec)
}

/// `G' = −l/((d+1)(k+lλ²)²)`.
pub fn dg_dlam2(spec: &MeasurementSpec) -> f64 {
    let (_, l, d) = kl(spec);
    let w = snapped_weight(spec);
    -l / ((d + 1.0) * w * w)
}

/// `G'' = 2l²/((d+1)(k+lλ²)³)`.
pub fn d2g_dlam2(spec: &MeasurementSpec) -> f64 {
    let (_, l, d) = kl(spec);
    let w = snapped_weight(spec);
    2.0 * l * l / ((d + 1.0) * w * w * w)
}

/// `F' = kl(1−λ)(k+lλ)/((d+1)λ(k+lλ²)²)`; `+∞` at `λ = 0`.
pub fn df_dlam2(spec: &MeasurementSpec) -> f64 {
    let (k, l, d) = kl(spec);
    let lambda = spec.lambda();
    match region(lambda) {
        Region::Zero => f64::INFINITY,
        Region::One => 0.0,
        _ => {
            let w = spec.weight();
            k * l / (d + 1.0) * (1.0 - lambda) * (k + l * lambda) / (lambda * w * w)
        }
    }
}

/// `F''`; `−∞` at `λ = 0`.
pub fn d2f_dlam2(spec: &MeasurementSpec) -> f64 {
    let (k, l, d) = kl(spec);
    let lambda = spec.lambda();
    match region(lambda) {
        Region::Zero => f64::NEG_INFINITY,
        Region::One => -k * l / (2.0 * (d + 1.0) * (k + l)),
        _ => {
            let w = spec.weight();
            let x = spec.x();
            let bracket = w * w + 4.0 * l * x * (1.0 - lambda) * (k + l * lambda);
            -k * l / (2.0 * (d + 1.0)) * bracket / (lambda * lambda * lambda * w * w * w)
        }
    }
}

/// `R' = kd/(k+lλ²)²` when `k+l = d`, else 0.
pub fn dr_dlam2(spec: &MeasurementSpec) -> f64 {
    if !spec.is_invertible() {
        return 0.0;
    }
    let (k, _, d) = kl(spec);
    let w = snapped_weight(spec);
    k * d / (w * w)
}

/// `R'' = −2kld/(k+lλ²)³` when `k+l = d`, else 0.
pub fn d2r_dlam2(spec: &MeasurementSpec) -> f64 {
    if !spec.is_invertible() {
        return 0.0;
    }
    let (k, l, d) = kl(spec);
    let w = snapped_weight(spec);
    -2.0 * k * l * d / (w * w * w)
}

pub fn evaluate(spec: &MeasurementSpec) -> DerivativeBundle {
    let jv = j_values(spec.k(), spec.l(), spec.lambda());
    let (di, d2i) = match region(spec.lambda()) {
        Region::Generic => info_chain(spec, &jv),
        _ => info_derivatives(spec),
    };
    DerivativeBundle {
        j: jv.value,
        dj: jv.first,
        d2j: jv.second,
        di,
        d2i,
        dg: dg_dlam2(spec),
        d2g: d2g_dlam2(spec),
        df: df_dlam2(spec),
        d2f: d2f_dlam2(spec),
        dr: dr_dlam2(spec),
        d2r: d2r_dlam2(spec),
    }
}

/// `α = −k·d·(d+1)/l` when `k+l = d`, else 0.
pub fn alpha(spec: &MeasurementSpec) -> Alpha {
    let value = if spec.is_invertible() {
        let (k, l, d) = kl(spec);
        -k * d * (d + 1.0) / l
    } else {
        0.0
    };
    Alpha { value }
}

/// `jₙ = C(l−1+n, l−1)·a(k+l, k+l−1+n)`, the Taylor coefficient of `J` in
/// `(λ²−1)ⁿ`. `k, l ≥ 1`.
pub fn jn_coefficient(k: u32, l: u32, n: u32) -> LogRational {
    assert!(k >= 1 && l >= 1, "jn_coefficient needs k, l >= 1");
    let j = k + l;
    let c = Rational::from_integer(binomial(l - 1 + n, i64::from(l) - 1));
    LogRational::new(c * coeff_a_rho(j, j - 1 + n))
}

/// Third derivatives of `I` and `F` with respect to `λ²` at `λ = 1`.
pub fn d3_at1(spec: &MeasurementSpec) -> (f64, f64) {
    let (k, l, d) = kl(spec);
    let j = k + l;
    let d3i = -2.0 * k * l * (3.0 * k * l + 3.0 * l * l + k + 5.0 * l)
        / (j * j * j * (j + 1.0) * (j + 2.0) * LN_2);
    let d3f = 3.0 * k * l * (k + 3.0 * l) / (4.0 * (d + 1.0) * j * j);
    (d3i, d3f)
}

/// Fourth derivatives of `I` and `F` at `λ = 1`, for `k = l` only.
pub fn d4_at1_keql(spec: &MeasurementSpec) -> Result<(f64, f64)> {
    if spec.k() != spec.l() {
        return Err(Error::out_of_range(
            "l",
            format!("fourth derivatives need k = l, got k={} l={}", spec.k(), spec.l()),
        ));
    }
    let (k, _, d) = kl(spec);
    let d4i = 3.0 * (12.0 * k + 19.0) / (8.0 * (2.0 * k + 1.0) * (2.0 * k + 3.0) * LN_2);
    let d4f = -39.0 * k / (16.0 * (d + 1.0));
    Ok((d4i, d4f))
}

/// `n!·jₙ` as a float, i.e. the `n`th derivative of `J` at `λ = 1`.
pub fn nth_derivative_of_j_at_one(k: u32, l: u32, n: u32) -> f64 {
    let fact = crate::combinatorics::factorial(n);
    jn_coefficient(k, l, n)
        .scale_int(fact)
        .rho()
        .to_f64()
        .unwrap_or(f64::NAN)
        / LN_2
}
