//! Information gain `I`, estimation fidelity `G`, operation fidelity `F` and
//! physical reversibility `R` for one outcome of `M(d,k,l,λ)`.

use std::fmt;

use num_traits::ToPrimitive;

use crate::combinatorics::harmonic;
use crate::error::Error;
use crate::expansion::NearOne;
use crate::jsum;
use crate::Result;

/// One diagonal measurement operator `diag(1×k, λ×l, 0×(d−k−l))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSpec {
    d: u32,
    k: u32,
    l: u32,
    lambda: f64,
}

impl MeasurementSpec {
    /// Checks `d ≥ 2`, `1 ≤ k ≤ d−1`, `1 ≤ l ≤ d−k` and `0 ≤ λ ≤ 1`.
    pub fn new(d: u32, k: u32, l: u32, lambda: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::out_of_range("d", format!("need d >= 2, got {d}")));
        }
        if k < 1 || k > d - 1 {
            return Err(Error::out_of_range(
                "k",
                format!("need 1 <= k <= d-1 = {}, got {k}", d - 1),
            ));
        }
        if l < 1 || l > d - k {
            return Err(Error::out_of_range(
                "l",
                format!("need 1 <= l <= d-k = {}, got {l}", d - k),
            ));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::out_of_range(
                "lambda",
                format!("need 0 <= lambda <= 1, got {lambda}"),
            ));
        }
        Ok(Self { d, k, l, lambda })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The same operator family at another `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.d, self.k, self.l, lambda)
    }

    /// `λ²`.
    pub fn x(&self) -> f64 {
        self.lambda * self.lambda
    }

    /// `k + l·λ²`.
    pub fn weight(&self) -> f64 {
        f64::from(self.k) + f64::from(self.l) * self.x()
    }

    /// Whether `M` has full rank for `λ > 0`, i.e. `k + l = d`.
    pub fn is_invertible(&self) -> bool {
        self.k + self.l == self.d
    }

    /// Diagonal of `M`.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.d as usize];
        for (i, v) in diag.iter_mut().enumerate() {
            let i = i as u32;
            if i < self.k {
                *v = 1.0;
            } else if i < self.k + self.l {
                *v = self.lambda;
            }
        }
        diag
    }

    pub(crate) fn near_one(&self) -> std::sync::Arc<NearOne> {
        NearOne::get(self.d, self.k, self.l)
    }
}

impl fmt::Display for MeasurementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, k={}, l={}, λ={})", self.d, self.k, self.l, self.lambda)
    }
}

/// `{I, G, F, R}` at one measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantityBundle {
    /// `I(m)` in bits.
    pub info_shannon: f64,
    /// `G(m)`.
    pub info_estimation: f64,
    /// `F(m)`.
    pub fidelity: f64,
    /// `R(m)`.
    pub reversibility: f64,
}

impl QuantityBundle {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.info_shannon,
            self.info_estimation,
            self.fidelity,
            self.reversibility,
        ]
    }
}

/// `J(k,l,λ)`; `k, l ≥ 1`.
pub fn eval_j(k: u32, l: u32, lambda: f64) -> f64 {
    assert!(k >= 1 && l >= 1, "J needs k, l >= 1");
    jsum::value(k, l, lambda)
}

fn harmonic_f64(n: u32) -> f64 {
    harmonic(n).to_f64().unwrap_or(f64::NAN)
}

/// `log₂(d/r) − (η(d) − η(r))/ln 2`, the information of the rank-`r` projector.
fn projective_info(d: u32, r: u32) -> f64 {
    if r == d {
        return 0.0;
    }
    let eta = (harmonic(d) - harmonic(r)).to_f64().unwrap_or(f64::NAN);
    (f64::from(d) / f64::from(r)).log2() - eta / std::f64::consts::LN_2
}

/// `I = log₂d − (η(d)−1)/ln2 − log₂(k+lλ²) + J/(k+lλ²)`.
pub fn eval_i(spec: &MeasurementSpec) -> f64 {
    let lambda = spec.lambda;
    if lambda == 0.0 {
        return projective_info(spec.d, spec.k);
    }
    if lambda == 1.0 {
        return projective_info(spec.d, spec.k + spec.l);
    }
    let eps = jsum::epsilon(lambda);
    if eps < jsum::SEAM_EPSILON {
        return spec.near_one().info_value(-eps);
    }
    info_from_j(spec, eval_j(spec.k, spec.l, lambda))
}

/// The closed form of `I` for a known value of `J`.
pub(crate) fn info_from_j(spec: &MeasurementSpec, j: f64) -> f64 {
    let d = f64::from(spec.d);
    let w = spec.weight();
    let base = d.log2() - (harmonic_f64(spec.d) - 1.0) / std::f64::consts::LN_2;
    base - w.log2() + j / w
}

/// `G = (1 + 1/(k+lλ²))/(d+1)`.
pub fn eval_g(spec: &MeasurementSpec) -> f64 {
    (1.0 + 1.0 / spec.weight()) / f64::from(spec.d + 1)
}

/// `F = (1 + (k+lλ)²/(k+lλ²))/(d+1)`.
pub fn eval_f(spec: &MeasurementSpec) -> f64 {
    let s = f64::from(spec.k) + f64::from(spec.l) * spec.lambda;
    (1.0 + s * s / spec.weight()) / f64::from(spec.d + 1)
}

/// `R = d·λ²/(k+lλ²)` when `k+l = d`, else 0.
pub fn eval_r(spec: &MeasurementSpec) -> f64 {
    if spec.is_invertible() {
        f64::from(spec.d) * spec.x() / spec.weight()
    } else {
        0.0
    }
}

pub fn evaluate(spec: &MeasurementSpec) -> QuantityBundle {
    QuantityBundle {
        info_shannon: eval_i(spec),
        info_estimation: eval_g(spec),
        fidelity: eval_f(spec),
        reversibility: eval_r(spec),
    }
}

/// The bundle at the rank-`r` projector `P_r`.
pub fn projective_point(d: u32, r: u32) -> Result<QuantityBundle> {
    if d < 2 {
        return Err(Error::out_of_range("d", format!("need d >= 2, got {d}")));
    }
    if r < 1 || r > d {
        return Err(Error::out_of_range(
            "r",
            format!("need 1 <= r <= d = {d}, got {r}"),
        ));
    }
    let (df, rf) = (f64::from(d), f64::from(r));
    Ok(QuantityBundle {
        info_shannon: projective_info(d, r),
        info_estimation: (1.0 + 1.0 / rf) / (df + 1.0),
        fidelity: (1.0 + rf) / (df + 1.0),
        reversibility: if r == d { 1.0 } else { 0.0 },
    })
}

/// Upper bound on `I`: the information of a rank-one projector.
pub fn max_info(d: u32) -> f64 {
    projective_info(d, 1)
}

/// Every valid `(k, l)` for dimension `d`, ordered by `k`, then `l`.
pub fn all_pairs(d: u32) -> Vec<(u32, u32)> {
    (1..d)
        .flat_map(|k| (1..=d - k).map(move |l| (k, l)))
        .collect()
}
