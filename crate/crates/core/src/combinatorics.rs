//! Exact harmonic numbers, binomial coefficients and the coefficient
//! families `a(j,n)` and `c(j,n,λ)`.
//!
//! `a(j,n)` is the coefficient of `εⁿ` in `(1+ε)ʲ log₂(1+ε)`. It is kept as
//! a [`LogRational`], i.e. an exact rational `ρ` standing for `ρ / ln 2`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Harmonic number `η(n) = 1 + 1/2 + … + 1/n`, with `η(0) = 0`.
pub fn harmonic(n: u32) -> Rational {
    let mut sum = Rational::zero();
    for k in 1..=n {
        sum += Rational::new(BigInt::one(), BigInt::from(k));
    }
    sum
}

/// `C(n, r)`, zero outside `0 ≤ r ≤ n`.
pub fn binomial(n: u32, r: i64) -> BigInt {
    if r < 0 || r > i64::from(n) {
        return BigInt::zero();
    }
    let r = r.min(i64::from(n) - r) as u32;
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// An exact value `ρ / ln 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogRational {
    rho: Rational,
}

impl LogRational {
    pub fn new(rho: Rational) -> Self {
        Self { rho }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero())
    }

    /// The rational part `ρ`.
    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn into_rho(self) -> Rational {
        self.rho
    }

    pub fn is_zero(&self) -> bool {
        self.rho.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.rho.to_f64().unwrap_or(f64::NAN) / std::f64::consts::LN_2
    }

    /// Multiplies by an exact rational.
    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(&self.rho * factor)
    }

    pub fn scale_int(&self, factor: impl Into<BigInt>) -> Self {
        Self::new(&self.rho * Rational::from_integer(factor.into()))
    }
}

impl fmt::Display for LogRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/ln2", self.rho)
    }
}

impl Add for LogRational {
    type Output = LogRational;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rho + rhs.rho)
    }
}

impl AddAssign for LogRational {
    fn add_assign(&mut self, rhs: Self) {
        self.rho += rhs.rho;
    }
}

impl Sub for LogRational {
    type Output = LogRational;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rho - rhs.rho)
    }
}

impl Neg for LogRational {
    type Output = LogRational;
    fn neg(self) -> Self {
        Self::new(-self.rho)
    }
}

impl Mul<&Rational> for &LogRational {
    type Output = LogRational;
    fn mul(self, rhs: &Rational) -> LogRational {
        self.scale(rhs)
    }
}

/// Rational part of `a(j,n)`.
///
/// For `n ≤ j` this is `C(j,n)·[η(j) − η(j−n)]`; for `n > j` it is
/// `(−1)^{n−j−1}·j!·(n−j−1)!/n!`. `j = 0` is accepted and gives the Taylor
/// coefficients of `log₂(1+ε)` itself.
pub(crate) fn coeff_a_rho(j: u32, n: u32) -> Rational {
    if n <= j {
        let c = Rational::from_integer(binomial(j, i64::from(n)));
        c * (harmonic(j) - harmonic(j - n))
    } else {
        let num = factorial(j) * factorial(n - j - 1);
        let r = Rational::new(num, factorial(n));
        if (n - j - 1) % 2 == 0 {
            r
        } else {
            -r
        }
    }
}

/// `a(j,n)`, the coefficient of `εⁿ` in `(1+ε)ʲ log₂(1+ε)`.
pub fn coeff_a(j: u32, n: u32) -> LogRational {
    LogRational::new(coeff_a_rho(j, n))
}

/// `c(j,n,λ) = λ^{2(j−n)}·[C(j,n)·log₂λ² + a(j,n)]` for `0 ≤ n ≤ j`.
///
/// At `λ = 0` this is `0` for `n < j` and `−∞` for `n = j`.
pub fn coeff_c(j: u32, n: u32, lambda: f64) -> f64 {
    debug_assert!(n <= j, "coeff_c requires n <= j");
    debug_assert!((0.0..=1.0).contains(&lambda));
    if lambda == 0.0 {
        return if n < j { 0.0 } else { f64::NEG_INFINITY };
    }
    let a = coeff_a(j, n).to_f64();
    let c = binomial(j, i64::from(n)).to_f64().unwrap_or(f64::NAN);
    let log2_lam2 = 2.0 * lambda.ln() / std::f64::consts::LN_2;
    lambda.powi(2 * (j - n) as i32) * (c * log2_lam2 + a)
}
