//! Truncated power series in `u = λ² − 1` with exact rational coefficients.
//!
//! Close to `λ = 1` the information `I` and its derivatives, as well as the
//! numerators of the trade-off quotients, vanish to some order in `u`.
//! Floating-point evaluation of the closed expressions then cancels away
//! most digits. Here every quantity is expanded around `u = 0` exactly, the
//! zero leading coefficients are dropped, and only the remaining, well
//! conditioned, series is evaluated in double precision.
//!
//! Everything that carries a `1/ln 2` is stored multiplied by `ln 2`.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, ToPrimitive, Zero};

use crate::combinatorics::{binomial, coeff_a_rho, harmonic, Rational};

/// Number of coefficients kept. Used only for `|u| < 0.05`.
const ORDER: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Series(Vec<Rational>);

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl Series {
    fn from_fn(f: impl FnMut(usize) -> Rational) -> Self {
        Series((0..ORDER).map(f).collect())
    }

    fn zero() -> Self {
        Self::from_fn(|_| Rational::zero())
    }

    fn constant(c: Rational) -> Self {
        let mut s = Self::zero();
        s.0[0] = c;
        s
    }

    /// `a + b·u`.
    fn linear(a: Rational, b: Rational) -> Self {
        let mut s = Self::constant(a);
        s.0[1] = b;
        s
    }

    /// `(1+u)^(p/q)`.
    fn binomial_power(p: i64, q: i64) -> Self {
        let alpha = Rational::new(p.into(), q.into());
        let mut c = Rational::one();
        Self::from_fn(|n| {
            let out = c.clone();
            c = &c * (&alpha - rat(n as i64)) / rat(n as i64 + 1);
            out
        })
    }

    /// `1/(a + b·u)` for `a ≠ 0`.
    fn reciprocal_linear(a: i64, b: i64) -> Self {
        let ratio = Rational::new((-b).into(), a.into());
        let mut c = Rational::new(1.into(), a.into());
        Self::from_fn(|_| {
            let out = c.clone();
            c *= &ratio;
            out
        })
    }

    /// `ln(1 + t·u)`.
    fn log1p_linear(t: Rational) -> Self {
        let mut pow = Rational::one();
        Self::from_fn(|n| {
            if n == 0 {
                return Rational::zero();
            }
            pow *= &t;
            let term = &pow / rat(n as i64);
            if n % 2 == 1 {
                term
            } else {
                -term
            }
        })
    }

    pub(crate) fn coeff(&self, n: usize) -> &Rational {
        &self.0[n]
    }

    fn scale(&self, c: &Rational) -> Self {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    fn add(&self, other: &Self) -> Self {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Self) -> Self {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0[..ORDER - i].iter().enumerate() {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    /// `d/du`; the top coefficient is lost.
    pub(crate) fn derivative(&self) -> Self {
        Self::from_fn(|n| {
            if n + 1 < ORDER {
                &self.0[n + 1] * rat(n as i64 + 1)
            } else {
                Rational::zero()
            }
        })
    }

    /// Index of the first nonzero coefficient.
    pub(crate) fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }
}

/// A series with its leading zero coefficients dropped, in double precision.
#[derive(Clone, Debug)]
struct Stripped {
    valuation: Option<usize>,
    coeffs: Vec<f64>,
}

impl Stripped {
    fn new(s: &Series) -> Self {
        let valuation = s.valuation();
        let coeffs = valuation
            .map(|v| s.0[v..].iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .unwrap_or_default();
        Self { valuation, coeffs }
    }

    /// `Σ_{n≥v} cₙ u^{n−v}` by Horner.
    fn eval_reduced(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    fn eval(&self, u: f64) -> f64 {
        match self.valuation {
            None => 0.0,
            Some(v) => self.eval_reduced(u) * u.powi(v as i32),
        }
    }
}

/// `a(u)/b(u)` with common powers of `u` cancelled exactly.
#[derive(Clone, Debug)]
struct Quotient {
    num: Stripped,
    den: Stripped,
}

impl Quotient {
    fn new(a: &Series, b: &Series) -> Self {
        Self {
            num: Stripped::new(a),
            den: Stripped::new(b),
        }
    }

    fn eval(&self, u: f64) -> f64 {
        let Some(vb) = self.den.valuation else {
            return f64::NAN;
        };
        let Some(va) = self.num.valuation else {
            return 0.0;
        };
        let ratio = self.num.eval_reduced(u) / self.den.eval_reduced(u);
        let shift = va as i32 - vb as i32;
        if shift == 0 {
            ratio
        } else if u == 0.0 {
            if shift > 0 {
                0.0
            } else {
                // Sign of u^shift with u → 0⁻.
                let sign = if shift % 2 == 0 { 1.0 } else { -1.0 };
                sign * ratio.signum() * f64::INFINITY
            }
        } else {
            ratio * u.powi(shift)
        }
    }
}

/// Laurent expansion of the closed two-sum form of `J·ln 2` around `u = 0`,
/// term by term, without using the known `jₙ`.
pub(crate) struct ClosedFormLaurent {
    /// Coefficients of `u^{-p}, …, u^{-1}`, most singular first.
    pub(crate) singular: Vec<Rational>,
    /// Coefficients of `u⁰, u¹, …` that are unaffected by truncation.
    pub(crate) regular: Vec<Rational>,
}

pub(crate) fn closed_form_j_laurent(k: u32, l: u32) -> ClosedFormLaurent {
    let j = k + l;
    let pmax = (j - 1) as usize;
    assert!(pmax < ORDER, "closed_form_j_laurent: k+l too large");
    // Index `i` holds the coefficient of u^{i − pmax}.
    let mut acc = vec![Rational::zero(); ORDER + pmax];
    let mut add_shifted = |num: &Series, p: usize, sign: i64| {
        for (m, c) in num.0.iter().enumerate() {
            if !c.is_zero() {
                acc[m + pmax - p] += c * rat(sign);
            }
        }
    };
    let parity = |e: u32| if e % 2 == 0 { 1 } else { -1 };
    // (λ²−1)^{−p} = u^{−p}
    for n in 0..k {
        let c = Rational::from_integer(binomial(j - n - 2, i64::from(l) - 1));
        let num = Series::constant(c * coeff_a_rho(j, n));
        add_shifted(&num, (j - n - 1) as usize, parity(l));
    }
    // (1−λ²)^{−p} = (−1)^p u^{−p}; c(j,n) in units of 1/ln 2 with λ² = 1+u.
    let log = Series::log1p_linear(Rational::one());
    for n in 0..l {
        let p = j - n - 1;
        let c = Rational::from_integer(binomial(j - n - 2, i64::from(k) - 1));
        let bracket = log
            .scale(&Rational::from_integer(binomial(j, i64::from(n))))
            .add(&Series::constant(coeff_a_rho(j, n)));
        let power = Series::binomial_power(i64::from(j - n), 1);
        let num = power.mul(&bracket).scale(&c);
        add_shifted(&num, p as usize, parity(k) * parity(p));
    }
    let regular_len = ORDER - pmax;
    ClosedFormLaurent {
        singular: acc[..pmax].to_vec(),
        regular: acc[pmax..pmax + regular_len].to_vec(),
    }
}

/// Exact expansions of the quantities of one measurement around `λ = 1`.
pub(crate) struct Expansions {
    /// `ln2·(I − I(1))`.
    pub(crate) info: Series,
    /// `ln2·I'` and `ln2·I''`.
    pub(crate) di: Series,
    pub(crate) d2i: Series,
    pub(crate) df: Series,
    pub(crate) d2f: Series,
    pub(crate) dr: Series,
    pub(crate) d2r: Series,
}

/// Double-precision evaluation near `λ = 1`, prepared once per measurement
/// from [`Expansions`].
pub(crate) struct NearOne {
    /// `I(λ=1)` in bits.
    info_at_one: f64,
    info: Stripped,
    di: Stripped,
    d2i: Stripped,
    slope_if: Quotient,
    curvature_if: Quotient,
    slope_ir: Quotient,
    curvature_ir: Quotient,
}

impl NearOne {
    pub(crate) fn get(d: u32, k: u32, l: u32) -> Arc<NearOne> {
        static CACHE: OnceLock<RwLock<HashMap<(u32, u32, u32), Arc<NearOne>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(v) = cache.read().expect("expansion cache poisoned").get(&(d, k, l)) {
            return Arc::clone(v);
        }
        let built = Arc::new(Self::build(d, k, l));
        let mut guard = cache.write().expect("expansion cache poisoned");
        Arc::clone(guard.entry((d, k, l)).or_insert(built))
    }

    fn build(d: u32, k: u32, l: u32) -> Self {
        let e = Expansions::build(d, k, l);
        let j = k + l;
        let info_at_one = if j == d {
            0.0
        } else {
            let eta = (harmonic(d) - harmonic(j)).to_f64().unwrap_or(f64::NAN);
            (f64::from(d) / f64::from(j)).log2() - eta / LN_2
        };
        let cube = e.di.mul(&e.di).mul(&e.di);
        let curv = |first: &Series, second: &Series| {
            Quotient::new(&second.mul(&e.di).sub(&first.mul(&e.d2i)), &cube)
        };
        NearOne {
            info_at_one,
            info: Stripped::new(&e.info),
            di: Stripped::new(&e.di),
            d2i: Stripped::new(&e.d2i),
            slope_if: Quotient::new(&e.df, &e.di),
            curvature_if: curv(&e.df, &e.d2f),
            slope_ir: Quotient::new(&e.dr, &e.di),
            curvature_ir: curv(&e.dr, &e.d2r),
        }
    }
}

impl Expansions {
    pub(crate) fn build(d: u32, k: u32, l: u32) -> Self {
        let j = k + l;
        let (ki, li, ji, dd) = (i64::from(k), i64::from(l), i64::from(j), i64::from(d));
        let lr = rat(li);

        let jt = Series::from_fn(|n| {
            let n = n as u32;
            Rational::from_integer(binomial(l - 1 + n, i64::from(l) - 1)) * coeff_a_rho(j, j - 1 + n)
        });
        let jt1 = jt.derivative();
        let jt2 = jt1.derivative();
        let q = Series::reciprocal_linear(ji, li);
        let q2 = q.mul(&q);
        let q3 = q2.mul(&q);

        let info = jt
            .mul(&q)
            .sub(&Series::log1p_linear(Rational::new(li.into(), ji.into())))
            .sub(&Series::constant(jt.coeff(0) / rat(ji)));
        let di = jt1.mul(&q).sub(&q.scale(&lr)).sub(&jt.mul(&q2).scale(&lr));
        let l2 = &lr * &lr;
        let d2i = q2
            .scale(&l2)
            .add(&jt.mul(&q3).scale(&(&l2 * rat(2))))
            .sub(&jt1.mul(&q2).scale(&(&lr * rat(2))))
            .add(&jt2.mul(&q));

        let root = Series::binomial_power(1, 2);
        let one_minus_root = Series::constant(Rational::one()).sub(&root);
        let k_plus_l_root = Series::constant(rat(ki)).add(&root.scale(&lr));
        let common = one_minus_root.mul(&k_plus_l_root);
        let df = common
            .mul(&Series::binomial_power(-1, 2))
            .mul(&q2)
            .scale(&Rational::new((ki * li).into(), (dd + 1).into()));
        let kx = Series::linear(rat(ji), lr.clone());
        let bracket = kx
            .mul(&kx)
            .add(&common.mul(&Series::linear(rat(1), rat(1))).scale(&rat(4 * li)));
        let d2f = bracket
            .mul(&Series::binomial_power(-3, 2))
            .mul(&q3)
            .scale(&Rational::new((-ki * li).into(), (2 * (dd + 1)).into()));

        let (dr, d2r) = if j == d {
            (q2.scale(&rat(ki * dd)), q3.scale(&rat(-2 * ki * li * dd)))
        } else {
            (Series::zero(), Series::zero())
        };

        Expansions {
            info,
            di,
            d2i,
            df,
            d2f,
            dr,
            d2r,
        }
    }

}

impl NearOne {
    pub(crate) fn info_value(&self, u: f64) -> f64 {
        self.info_at_one + self.info.eval(u) / LN_2
    }

    pub(crate) fn di_value(&self, u: f64) -> f64 {
        self.di.eval(u) / LN_2
    }

    pub(crate) fn d2i_value(&self, u: f64) -> f64 {
        self.d2i.eval(u) / LN_2
    }

    /// `F'/I'`.
    pub(crate) fn slope_if(&self, u: f64) -> f64 {
        LN_2 * self.slope_if.eval(u)
    }

    /// `(F''I' − F'I'')/I'³`.
    pub(crate) fn curvature_if(&self, u: f64) -> f64 {
        LN_2 * LN_2 * self.curvature_if.eval(u)
    }

    pub(crate) fn slope_ir(&self, u: f64) -> f64 {
        LN_2 * self.slope_ir.eval(u)
    }

    pub(crate) fn curvature_ir(&self, u: f64) -> f64 {
        LN_2 * LN_2 * self.curvature_ir.eval(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truncated_eq(a: &Series, b: &Series, upto: usize) -> bool {
        a.0[..upto] == b.0[..upto]
    }

    #[test]
    fn binomial_power_squares_back() {
        let root = Series::binomial_power(1, 2);
        assert_eq!(root.mul(&root), Series::linear(rat(1), rat(1)));
        let inv = Series::binomial_power(-1, 2);
        assert_eq!(root.mul(&inv), Series::constant(rat(1)));
    }

    #[test]
    fn derivative_chain_is_exact() {
        for (d, k, l) in [(4u32, 1u32, 3u32), (5, 2, 2), (6, 3, 1), (3, 1, 1)] {
            let e = Expansions::build(d, k, l);
            let upto = ORDER - 2;
            assert!(truncated_eq(&e.info.derivative(), &e.di, upto), "{d} {k} {l}");
            assert!(truncated_eq(&e.di.derivative(), &e.d2i, upto), "{d} {k} {l}");
            assert!(truncated_eq(&e.df.derivative(), &e.d2f, upto), "{d} {k} {l}");
            assert!(truncated_eq(&e.dr.derivative(), &e.d2r, upto), "{d} {k} {l}");
        }
    }

    #[test]
    fn vanishing_orders() {
        // I' and F' vanish linearly at λ = 1; the I–F curvature numerator to
        // second order, or third when k = l.
        for (k, l, expected) in [(1u32, 3u32, 2usize), (2, 2, 3), (3, 1, 2)] {
            let e = Expansions::build(k + l, k, l);
            assert_eq!(e.di.valuation(), Some(1));
            assert_eq!(e.df.valuation(), Some(1));
            let num = e.d2f.mul(&e.di).sub(&e.df.mul(&e.d2i));
            assert_eq!(num.valuation(), Some(expected), "k={k} l={l}");
        }
    }

    #[test]
    fn laurent_poles_cancel_and_match_taylor() {
        for (k, l) in [(1u32, 1u32), (1, 3), (2, 2), (3, 1), (4, 5)] {
            let e = closed_form_j_laurent(k, l);
            assert!(e.singular.iter().all(Zero::is_zero), "k={k} l={l}");
            let j = k + l;
            for (n, c) in e.regular.iter().enumerate().take(8) {
                let n = n as u32;
                let expected =
                    Rational::from_integer(binomial(l - 1 + n, i64::from(l) - 1)) * coeff_a_rho(j, j - 1 + n);
                assert_eq!(*c, expected, "k={k} l={l} n={n}");
            }
        }
    }

    #[test]
    fn quotient_limits() {
        let a = Series::linear(rat(0), rat(2));
        let b = Series::linear(rat(0), rat(4));
        assert_eq!(Quotient::new(&a, &b).eval(0.0), 0.5);
        let c = Series::constant(rat(1));
        assert_eq!(Quotient::new(&c, &b).eval(0.0), f64::NEG_INFINITY);
        assert_eq!(Quotient::new(&c, &b).eval(-0.01), 1.0 / (4.0 * -0.01));
    }
}
