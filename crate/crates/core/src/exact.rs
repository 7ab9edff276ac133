//! Exact evaluation of sums `Σ c·xᵖ·ε^{−q}·(1 | ln x)` at a double-precision
//! `λ`, with `x = λ²` and `ε = 1 − x`.
//!
//! The double `λ` is a dyadic rational, so `x` and `ε` are exact. The
//! rational part and the coefficient of `ln x` are accumulated as exact big
//! integers over a common denominator; only `ln x` itself is approximated,
//! in fixed point, with as many bits as the cancellation between the two
//! parts requires.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::Rational;

/// Relative accuracy demanded from the final quotient, in bits.
const TARGET_BITS: u64 = 60;
const GUARD_BITS: u64 = 40;
const MAX_LN_BITS: u64 = 1 << 16;

#[derive(Clone, Debug)]
struct LaurentTerm {
    coef: Rational,
    x_pow: u32,
    eps_pow: u32,
    with_log: bool,
}

/// `Σ coef·xᵖ·ε^{−q}`, each term optionally multiplied by `ln x`.
#[derive(Clone, Debug, Default)]
pub(crate) struct LogLaurent {
    terms: Vec<LaurentTerm>,
}

impl LogLaurent {
    pub(crate) fn push(&mut self, coef: Rational, x_pow: u32, eps_pow: u32, with_log: bool) {
        if !coef.is_zero() {
            self.terms.push(LaurentTerm {
                coef,
                x_pow,
                eps_pow,
                with_log,
            });
        }
    }

    /// Brings every coefficient over one integer denominator.
    pub(crate) fn compile(&self) -> CompiledSum {
        let den = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(t.coef.denom()));
        let max_x = self.terms.iter().map(|t| t.x_pow).max().unwrap_or(0);
        let max_eps = self.terms.iter().map(|t| t.eps_pow).max().unwrap_or(0);
        let mut plain = Vec::new();
        let mut log = Vec::new();
        for t in &self.terms {
            let num = t.coef.numer() * (&den / t.coef.denom());
            let entry = (num, t.x_pow, t.eps_pow);
            if t.with_log {
                log.push(entry);
            } else {
                plain.push(entry);
            }
        }
        CompiledSum {
            den,
            max_x,
            max_eps,
            plain,
            log,
        }
    }
}

/// A [`LogLaurent`] with integer coefficients over the common denominator `den`.
#[derive(Clone, Debug)]
pub(crate) struct CompiledSum {
    den: BigInt,
    max_x: u32,
    max_eps: u32,
    plain: Vec<(BigInt, u32, u32)>,
    log: Vec<(BigInt, u32, u32)>,
}

impl CompiledSum {
    /// Value of the sum at `point`, correctly rounded up to ~2⁻⁶⁰ relative.
    pub(crate) fn eval(&self, point: &mut ExactPoint) -> f64 {
        // term = c·X^p/W^p · W^q/E^q; scale everything by E^Qm·W^Pm.
        let mut numerator = |entries: &[(BigInt, u32, u32)]| -> BigInt {
            let mut acc = BigInt::zero();
            for (c, p, q) in entries {
                let w_pow = u64::from(q + self.max_x - p) * u64::from(point.w_bits);
                let mut term = c * point.x_pow(*p as usize) * point.e_pow((self.max_eps - q) as usize);
                term <<= w_pow as usize;
                acc += term;
            }
            acc
        };
        let np = numerator(&self.plain);
        let nq = numerator(&self.log);
        let mut den = &self.den * point.e_pow(self.max_eps as usize);
        den <<= (u64::from(self.max_x) * u64::from(point.w_bits)) as usize;

        if nq.is_zero() {
            return ratio_to_f64(np, den);
        }
        let err_bits = nq.bits() + 2;
        let mut prec = 2 * TARGET_BITS;
        loop {
            let lfp = point.ln_x_fixed(prec);
            let total = (&np << prec as usize) + &nq * lfp;
            let have = total.bits();
            if have >= err_bits + TARGET_BITS || prec >= MAX_LN_BITS {
                return ratio_to_f64(total, den << prec as usize);
            }
            prec += err_bits + TARGET_BITS + 4 - have;
        }
    }
}

/// `λ = m·2^{−s}` in exact form with cached powers of `X = m²` and
/// `E = 2^{2s} − m²`, so that `x = X/W` and `ε = E/W` with `W = 2^{2s}`.
pub(crate) struct ExactPoint {
    lambda: f64,
    w_bits: u32,
    x_pows: Vec<BigInt>,
    e_pows: Vec<BigInt>,
    ln_cache: Option<(u64, BigInt)>,
}

impl ExactPoint {
    /// `lambda` must lie strictly inside `(0, 1)`.
    pub(crate) fn new(lambda: f64) -> Self {
        debug_assert!(lambda > 0.0 && lambda < 1.0);
        let (m, e) = decompose(lambda);
        let s = u32::try_from(-e).expect("lambda < 1 has a negative exponent");
        let m = BigInt::from(m);
        let x = &m * &m;
        let w = BigInt::one() << (2 * s) as usize;
        let eps = w - &x;
        Self {
            lambda,
            w_bits: 2 * s,
            x_pows: vec![BigInt::one(), x],
            e_pows: vec![BigInt::one(), eps],
            ln_cache: None,
        }
    }

    fn x_pow(&mut self, p: usize) -> &BigInt {
        extend_powers(&mut self.x_pows, p);
        &self.x_pows[p]
    }

    fn e_pow(&mut self, q: usize) -> &BigInt {
        extend_powers(&mut self.e_pows, q);
        &self.e_pows[q]
    }

    /// `ln x · 2^prec`, within ±2.
    fn ln_x_fixed(&mut self, prec: u64) -> BigInt {
        if let Some((p, v)) = &self.ln_cache {
            if *p >= prec {
                return v >> (p - prec) as usize;
            }
        }
        let v = ln_fixed(self.lambda, prec);
        self.ln_cache = Some((prec, v.clone()));
        v
    }
}

fn extend_powers(pows: &mut Vec<BigInt>, upto: usize) {
    while pows.len() <= upto {
        let next = &pows[pows.len() - 1] * &pows[1];
        pows.push(next);
    }
}

/// `x = m·2^e` exactly, with `m` odd. `x` must be finite and positive.
pub(crate) fn decompose(x: f64) -> (u64, i32) {
    debug_assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (m, e)
}

/// `ln(λ²)·2^prec`, within a couple of units.
fn ln_fixed(lambda: f64, prec: u64) -> BigInt {
    let work = prec + GUARD_BITS;
    let (m, e) = decompose(lambda);
    let b = 64 - m.leading_zeros() as i64;
    let mut exp = i64::from(e) + b - 1;
    let m_big = BigInt::from(m);
    let one_at = |shift: i64| BigInt::one() << shift as usize;
    // m/2^{b−1} ∈ [1, 2); fold into [1/√2, √2].
    let (num, den) = if &m_big * &m_big > one_at(2 * b - 1) {
        exp += 1;
        (&m_big - one_at(b), &m_big + one_at(b))
    } else {
        (&m_big - one_at(b - 1), &m_big + one_at(b - 1))
    };
    let z = (num << work as usize) / den;
    let ln_mant = atanh_fixed(&z, work) << 1usize;
    let third = (BigInt::one() << work as usize) / 3;
    let ln2 = atanh_fixed(&third, work) << 1usize;
    let ln_x = (ln_mant + ln2 * exp) << 1usize;
    ln_x >> (GUARD_BITS as usize)
}

fn atanh_fixed(z: &BigInt, work: u64) -> BigInt {
    // Odd function; the series runs on |z| so that the shifts truncate to zero.
    if z.is_negative() {
        return -atanh_fixed(&-z, work);
    }
    let z2 = (z * z) >> work as usize;
    let mut term = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / k;
        term = (term * &z2) >> work as usize;
        k += 2;
    }
    sum
}

/// Correctly rounded `num/den`.
pub(crate) fn ratio_to_f64(num: BigInt, den: BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    debug_assert!(den.is_positive());
    Ratio::new_raw(num, den).to_f64().unwrap_or(f64::NAN)
}
