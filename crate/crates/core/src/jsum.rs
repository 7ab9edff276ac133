//! The alternating sum `J(k,l,λ)` and its first two derivatives with respect
//! to `x = λ²`.
//!
//! Away from `λ = 1` the closed sums are evaluated exactly (see the private
//! `exact` module); they contain powers `(1−λ²)^{−(k+l−n−1)}` whose
//! contributions cancel almost completely near `λ = 1`, so for
//! `ε = 1−λ² < SEAM_EPSILON` the Taylor series `J = Σ jₙ(−ε)ⁿ` is used
//! instead. Its tail terms all carry the same sign, so summing it in double
//! precision is stable.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::ToPrimitive;

use crate::combinatorics::{binomial, coeff_a_rho, harmonic, Rational};
use crate::exact::{CompiledSum, ExactPoint, LogLaurent};

/// Below this value of `1 − λ²` the series replaces the closed sums.
pub const SEAM_EPSILON: f64 = 0.05;

const SERIES_REL_TOL: f64 = 1e-17;
const SERIES_MAX_TERMS: u32 = 100_000;

/// `J`, `J'` and `J''` (derivatives with respect to `λ²`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JValues {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl JValues {
    pub fn as_array(&self) -> [f64; 3] {
        [self.value, self.first, self.second]
    }
}

/// Limits at `λ = 0`. `J''` diverges to `+∞` when `k = 1`.
pub fn at_zero(k: u32, l: u32) -> JValues {
    let lr = Rational::from_integer(l.into());
    let value = coeff_a_rho(k, k - 1);
    let first = coeff_a_rho(k - 1, k - 1) * &lr;
    let second = if k >= 2 {
        over_ln2(&(coeff_a_rho(k - 2, k - 1) * &lr * Rational::from_integer((l + 1).into())))
    } else {
        f64::INFINITY
    };
    JValues {
        value: over_ln2(&value),
        first: over_ln2(&first),
        second,
    }
}

/// Limits at `λ = 1`: `j₀`, `j₁` and `2j₂`.
pub fn at_one(k: u32, l: u32) -> JValues {
    let j = k + l;
    let lr = Rational::from_integer(l.into());
    let value = coeff_a_rho(j, j - 1);
    let first = coeff_a_rho(j, j) * &lr;
    let second = coeff_a_rho(j, j + 1) * &lr * Rational::from_integer((l + 1).into());
    JValues {
        value: over_ln2(&value),
        first: over_ln2(&first),
        second: over_ln2(&second),
    }
}

fn over_ln2(rho: &Rational) -> f64 {
    rho.to_f64().unwrap_or(f64::NAN) / std::f64::consts::LN_2
}

/// `J`, `J'`, `J''` at any `λ ∈ [0, 1]`: endpoint limits at exactly 0 and 1,
/// the series on the seam and the exact closed sums elsewhere.
pub fn evaluate(k: u32, l: u32, lambda: f64) -> JValues {
    if lambda <= 0.0 {
        at_zero(k, l)
    } else if lambda >= 1.0 {
        at_one(k, l)
    } else if epsilon(lambda) < SEAM_EPSILON {
        series(k, l, lambda)
    } else {
        closed_form(k, l, lambda)
    }
}

/// `J` alone, with the same dispatch as [`evaluate`].
pub fn value(k: u32, l: u32, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        at_zero(k, l).value
    } else if lambda >= 1.0 {
        at_one(k, l).value
    } else if epsilon(lambda) < SEAM_EPSILON {
        series(k, l, lambda).value
    } else {
        let tables = tables(k, l);
        let mut point = ExactPoint::new(lambda);
        tables.value.eval(&mut point) / std::f64::consts::LN_2
    }
}

pub(crate) fn epsilon(lambda: f64) -> f64 {
    (1.0 - lambda) * (1.0 + lambda)
}

/// Exact closed sums, `0 < λ < 1`. Accurate all the way up to the seam and
/// beyond; the series is only faster there.
pub fn closed_form(k: u32, l: u32, lambda: f64) -> JValues {
    assert!(lambda > 0.0 && lambda < 1.0, "closed form needs 0 < λ < 1");
    let tables = tables(k, l);
    let mut point = ExactPoint::new(lambda);
    let ln2 = std::f64::consts::LN_2;
    JValues {
        value: tables.value.eval(&mut point) / ln2,
        first: tables.first.eval(&mut point) / ln2,
        second: tables.second.eval(&mut point) / ln2,
    }
}

/// Taylor series around `λ = 1` in `ε = 1 − λ²`, truncated once the next
/// term falls below 1e−17 of the running sum. Converges for `ε < 1`.
pub fn series(k: u32, l: u32, lambda: f64) -> JValues {
    let j = k + l;
    let eps = epsilon(lambda);
    let rho0 = (harmonic(j) - Rational::from_integer(1.into())) * Rational::from_integer(j.into());
    let rho0 = rho0.to_f64().unwrap_or(f64::NAN);
    let rho1 = f64::from(l) * harmonic(j).to_f64().unwrap_or(f64::NAN);

    // b_n = C(l−1+n, l−1) · j!(n−2)!/(j+n−1)!, so that for n ≥ 2
    // jₙ(−ε)ⁿ = b_n εⁿ / ln 2.
    let lf = f64::from(l);
    let jf = f64::from(j);
    let mut binom = lf * (lf + 1.0) / 2.0;
    let mut ratio = 1.0 / (jf + 1.0);
    let mut eps_pow = 1.0; // ε^{n−2}

    let mut value = rho0 - rho1 * eps;
    let mut first = rho1;
    let mut second = 0.0;
    for n in 2..SERIES_MAX_TERMS {
        let nf = f64::from(n);
        let b = binom * ratio;
        let t2 = nf * (nf - 1.0) * b * eps_pow;
        let t1 = nf * b * eps_pow * eps;
        let t0 = b * eps_pow * eps * eps;
        second += t2;
        first -= t1;
        value += t0;
        if t2 <= SERIES_REL_TOL * second.abs()
            && t1 <= SERIES_REL_TOL * first.abs()
            && t0 <= SERIES_REL_TOL * value.abs()
        {
            break;
        }
        binom *= (lf + nf) / (nf + 1.0);
        ratio *= (nf - 1.0) / (jf + nf);
        eps_pow *= eps;
    }
    let ln2 = std::f64::consts::LN_2;
    JValues {
        value: value / ln2,
        first: first / ln2,
        second: second / ln2,
    }
}

struct JTables {
    value: CompiledSum,
    first: CompiledSum,
    second: CompiledSum,
}

fn tables(k: u32, l: u32) -> Arc<JTables> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), Arc<JTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("table cache poisoned").get(&(k, l)) {
        return Arc::clone(t);
    }
    let built = Arc::new(build_tables(k, l));
    let mut guard = cache.write().expect("table cache poisoned");
    Arc::clone(guard.entry((k, l)).or_insert(built))
}

fn sign(p: u32) -> Rational {
    Rational::from_integer(if p % 2 == 0 { 1 } else { -1 }.into())
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn binom_r(n: u32, r: u32) -> Rational {
    Rational::from_integer(binomial(n, i64::from(r)))
}

/// Adds `factor · a(j,n) / (λ²−1)^q`.
fn push_a(sum: &mut LogLaurent, factor: Rational, j: u32, n: u32, q: u32) {
    sum.push(factor * sign(q) * coeff_a_rho(j, n), 0, q, false);
}

/// Adds `factor · c(j,n,λ) / (1−λ²)^q`, in units of `1/ln 2`.
fn push_c(sum: &mut LogLaurent, factor: Rational, j: u32, n: u32, q: u32) {
    let xp = j - n;
    sum.push(&factor * coeff_a_rho(j, n), xp, q, false);
    sum.push(factor * binom_r(j, n), xp, q, true);
}

fn build_tables(k: u32, l: u32) -> JTables {
    let j = k + l;
    let (ki, li) = (i64::from(k), i64::from(l));
    let sk = sign(k);
    let sl = sign(l);

    let mut value = LogLaurent::default();
    for n in 0..k {
        push_a(&mut value, &sl * binom_r(j - n - 2, l - 1), j, n, j - n - 1);
    }
    for n in 0..l {
        push_c(&mut value, &sk * binom_r(j - n - 2, k - 1), j, n, j - n - 1);
    }

    let mut first = LogLaurent::default();
    for n in 0..k {
        push_a(&mut first, &sl * binom_r(j - n - 1, l) * int(-li), j, n, j - n);
    }
    for n in 0..l {
        let ni = i64::from(n);
        push_c(&mut first, &sk * binom_r(j - n - 1, k) * int(ki), j, n, j - n);
        push_c(&mut first, &sk * binom_r(j - n - 2, k - 1) * int(ni + 1), j, n + 1, j - n - 1);
    }

    let mut second = LogLaurent::default();
    for n in 0..k {
        push_a(&mut second, &sl * binom_r(j - n, l + 1) * int(li * (li + 1)), j, n, j - n + 1);
    }
    for n in 0..l {
        let ni = i64::from(n);
        push_c(&mut second, &sk * binom_r(j - n, k + 1) * int(ki * (ki + 1)), j, n, j - n + 1);
        push_c(&mut second, &sk * binom_r(j - n - 1, k) * int(2 * ki * (ni + 1)), j, n + 1, j - n);
        push_c(
            &mut second,
            &sk * binom_r(j - n - 2, k - 1) * int((ni + 2) * (ni + 1)),
            j,
            n + 2,
            j - n - 1,
        );
    }

    JTables {
        value: value.compile(),
        first: first.compile(),
        second: second.compile(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::coeff_a;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    // Reference values from an independent 60-digit evaluation of the closed sums.
    #[test]
    fn closed_form_reference_values() {
        let v = closed_form(1, 3, 0.5);
        assert!(rel(v.value, 0.779_879_824_901_210_8) < 1e-15, "{v:?}");
        assert!(rel(v.first, 4.867_840_789_086_002) < 1e-15, "{v:?}");
        assert!(rel(v.second, 9.871_982_845_493_228) < 1e-15, "{v:?}");
        let v = closed_form(3, 5, 0.9);
        assert!(rel(v.value, 16.192_706_249_175_598) < 1e-15, "{v:?}");
        let v = closed_form(2, 2, 0.3);
        assert!(rel(v.first, 3.469_794_912_441_942_8) < 1e-15, "{v:?}");
        assert!(rel(v.second, 5.354_005_382_930_575) < 1e-15, "{v:?}");
    }

    #[test]
    fn endpoint_examples() {
        assert!(rel(at_one(1, 3).value, 6.251_678_510_518_841) < 1e-15);
        assert!(rel(at_zero(2, 1).value, 1.0 / std::f64::consts::LN_2) < 1e-15);
        assert!(rel(at_zero(2, 1).first, 1.0 / std::f64::consts::LN_2) < 1e-15);
        assert!(rel(at_one(1, 3).first, 3.0 * 25.0 / 12.0 / std::f64::consts::LN_2) < 1e-15);
        assert_eq!(at_zero(1, 1).second, f64::INFINITY);
    }

    #[test]
    fn closed_form_approaches_endpoints() {
        for (k, l) in [(1u32, 1u32), (1, 3), (2, 2), (3, 1), (2, 5)] {
            let near0 = closed_form(k, l, 1e-6);
            let lim0 = at_zero(k, l);
            // For k = 1 both limits are 0, approached like x·ln x.
            for (a, b) in [(near0.value, lim0.value), (near0.first, lim0.first)] {
                assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "k={k} l={l}: {a} vs {b}");
            }
            let near1 = closed_form(k, l, 1.0 - 1e-9);
            let lim1 = at_one(k, l);
            for (a, b) in near1.as_array().iter().zip(lim1.as_array()) {
                assert!(rel(*a, b) < 1e-6, "k={k} l={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn series_coefficients_match_exact_jn() {
        // b_n must equal jₙ·(−1)ⁿ·ln 2 with jₙ = C(l−1+n, l−1)·a(k+l, k+l−1+n).
        for (k, l) in [(1u32, 1u32), (2, 3), (4, 4)] {
            let j = k + l;
            let lf = f64::from(l);
            let jf = f64::from(j);
            let mut binom = lf * (lf + 1.0) / 2.0;
            let mut ratio = 1.0 / (jf + 1.0);
            for n in 2..12u32 {
                let exact = Rational::from_integer(binomial(l - 1 + n, i64::from(l) - 1))
                    * coeff_a(j, j - 1 + n).into_rho();
                let expected = exact.to_f64().unwrap() * if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!(rel(binom * ratio, expected) < 1e-14, "k={k} l={l} n={n}");
                let nf = f64::from(n);
                binom *= (lf + nf) / (nf + 1.0);
                ratio *= (nf - 1.0) / (jf + nf);
            }
        }
    }

    #[test]
    fn seam_overlap_agrees() {
        for k in 1..=6u32 {
            for l in 1..=6u32 {
                for &eps in &[0.02, 0.035, 0.05] {
                    let lam = (1.0f64 - eps).sqrt();
                    let a = closed_form(k, l, lam);
                    let b = series(k, l, lam);
                    for (x, y) in a.as_array().iter().zip(b.as_array()) {
                        assert!(rel(*x, y) < 1e-12, "k={k} l={l} ε={eps}: {x} vs {y}");
                    }
                }
            }
        }
    }
}
