//! Independent checks: Monte Carlo estimates over the unitarily invariant
//! measure, a state-vector simulation of the measurement and its optimal
//! reversal, Richardson-extrapolated finite differences and exact rational
//! verification of the series identities.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::combinatorics::{binomial, coeff_a_rho, factorial, Rational};
use crate::error::Error;
use crate::expansion::closed_form_j_laurent;
use crate::quantities::MeasurementSpec;
use crate::Result;

pub const MIN_SAMPLES: usize = 10_000;
const NORM_TOL: f64 = 1e-12;
/// Absolute slack added to every `n·σ` comparison, for estimates whose
/// sampling variance is exactly zero.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::out_of_range(
                "d",
                format!("need at least 2 amplitudes, got {}", amplitudes.len()),
            ));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !((norm2 - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes })
    }

    /// The basis vector `|i⟩` of a `d`-dimensional space.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::out_of_range("i", format!("need i < d = {d}, got {i}")));
        }
        let mut a = vec![Complex64::zero(); d];
        a[i] = Complex64::one();
        Self::new(a)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// A state drawn from the unitarily invariant measure: independent complex
/// Gaussians, normalized.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    assert!(d >= 2, "sample_haar_state needs d >= 2");
    let mut amps: Vec<Complex64> = (0..d).map(|_| gaussian_pair(rng)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    PureState { amplitudes: amps }
}

/// `|ψᵢ|²` of a state drawn exactly as in [`sample_haar_state`].
fn sample_haar_weights<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut total = 0.0;
    for w in out.iter_mut() {
        *w = gaussian_pair(rng).norm_sqr();
        total += *w;
    }
    for w in out.iter_mut() {
        *w /= total;
    }
}

/// Sample mean and co-moments of a vector observable.
#[derive(Clone, Debug)]
struct Moments<const N: usize> {
    n: u64,
    mean: [f64; N],
    comoment: [[f64; N]; N],
}

impl<const N: usize> Moments<N> {
    fn new() -> Self {
        Self {
            n: 0,
            mean: [0.0; N],
            comoment: [[0.0; N]; N],
        }
    }

    fn push(&mut self, v: &[f64; N]) {
        self.n += 1;
        let n = self.n as f64;
        let mut before = [0.0; N];
        for i in 0..N {
            before[i] = v[i] - self.mean[i];
            self.mean[i] += before[i] / n;
        }
        for i in 0..N {
            let after = v[i] - self.mean[i];
            for j in 0..N {
                self.comoment[i][j] += before[j] * after;
            }
        }
    }

    fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let mut delta = [0.0; N];
        for i in 0..N {
            delta[i] = other.mean[i] - self.mean[i];
        }
        for i in 0..N {
            for j in 0..N {
                self.comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for i in 0..N {
            self.mean[i] += delta[i] * nb / n;
        }
        self.n += other.n;
    }

    /// Delta-method standard error of `g(mean)` with gradient `grad`.
    fn delta_std_error(&self, grad: &[f64; N]) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let mut var = 0.0;
        for i in 0..N {
            for j in 0..N {
                var += grad[i] * grad[j] * self.comoment[i][j];
            }
        }
        let cov_scale = 1.0 / ((self.n - 1) as f64 * self.n as f64);
        (var * cov_scale).max(0.0).sqrt()
    }
}

/// A Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl McEstimate {
    /// `|mean − target|` in units of the standard error, with the rounding
    /// floor added to the error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / (self.std_error + ROUNDING_FLOOR)
    }

    pub fn agrees_with(&self, target: f64, n_sigma: f64) -> bool {
        (self.mean - target).abs() <= n_sigma * self.std_error + ROUNDING_FLOOR
    }
}

/// Estimates of `I`, `G`, `F`, `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantityEstimates {
    pub info_shannon: McEstimate,
    pub info_estimation: McEstimate,
    pub fidelity: McEstimate,
    pub reversibility: McEstimate,
}

impl QuantityEstimates {
    pub fn as_array(&self) -> [McEstimate; 4] {
        [self.info_shannon, self.info_estimation, self.fidelity, self.reversibility]
    }
}

/// How the samples of one estimate are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    /// Number of independent substreams; substream `i` is keyed by
    /// `(seed, i)`. Results depend on this number, not on `parallel`.
    pub substreams: usize,
    pub parallel: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            substreams: 16,
            parallel: true,
        }
    }
}

fn split(n: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| n / parts + usize::from(i < n % parts)).collect()
}

fn run_substreams<const N: usize, F>(n: usize, seed: u64, config: &McConfig, body: F) -> Vec<Moments<N>>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Moments<N> + Sync,
{
    let parts = config.substreams.max(1);
    let sizes = split(n, parts);
    let job = |(i, &m): (usize, &usize)| body(&mut substream(seed, i as u64), m);
    if config.parallel {
        sizes.par_iter().enumerate().map(job).collect()
    } else {
        sizes.iter().enumerate().map(job).collect()
    }
}

fn merged<const N: usize>(groups: &[Moments<N>], skip: Option<usize>) -> Moments<N> {
    let mut all = Moments::new();
    for (i, g) in groups.iter().enumerate() {
        if Some(i) != skip {
            all.merge(g);
        }
    }
    all
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            given: n,
            minimum: MIN_SAMPLES,
        });
    }
    Ok(())
}

// Observable layout: p·log₂p, p·|ψ₀|², ⟨ψ|M|ψ⟩², p.
const OBS: usize = 4;

/// Raw Monte Carlo sums for one measurement, kept per substream.
#[derive(Clone, Debug)]
pub struct McRun {
    spec: MeasurementSpec,
    groups: Vec<Moments<OBS>>,
}

/// Draws `n_samples` invariant-measure states and accumulates the outcome
/// statistics of `spec`.
pub fn mc_run(spec: &MeasurementSpec, n_samples: usize, seed: u64, config: &McConfig) -> Result<McRun> {
    check_samples(n_samples)?;
    let diag = spec.diagonal();
    let d = diag.len();
    let groups = run_substreams(n_samples, seed, config, |rng, m| {
        let mut acc = Moments::new();
        let mut w = vec![0.0; d];
        for _ in 0..m {
            sample_haar_weights(rng, &mut w);
            let mut p = 0.0;
            let mut amp = 0.0;
            for (wi, mi) in w.iter().zip(&diag) {
                p += mi * mi * wi;
                amp += mi * wi;
            }
            let plogp = if p > 0.0 { p * p.log2() } else { 0.0 };
            acc.push(&[plogp, p * w[0], amp * amp, p]);
        }
        acc
    });
    Ok(McRun { spec: *spec, groups })
}

impl McRun {
    pub fn n_samples(&self) -> usize {
        self.groups.iter().map(|g| g.n as usize).sum()
    }

    /// Point estimates with delta-method standard errors.
    pub fn estimates(&self) -> QuantityEstimates {
        let all = merged(&self.groups, None);
        let n = all.n as usize;
        let [a_i, a_g, a_f, b] = all.mean;
        let ratio = |a: f64, idx: usize| {
            let mut grad = [0.0; OBS];
            grad[idx] = 1.0 / b;
            grad[3] = -a / (b * b);
            McEstimate {
                mean: a / b,
                std_error: all.delta_std_error(&grad),
                n_samples: n,
            }
        };
        let info = McEstimate {
            mean: a_i / b - b.log2(),
            std_error: all.delta_std_error(&[1.0 / b, 0.0, 0.0, -a_i / (b * b) - 1.0 / (b * LN_2)]),
            n_samples: n,
        };
        let reversibility = if self.spec.is_invertible() {
            let c = self.spec.x();
            McEstimate {
                mean: c / b,
                std_error: all.delta_std_error(&[0.0, 0.0, 0.0, -c / (b * b)]),
                n_samples: n,
            }
        } else {
            McEstimate {
                mean: 0.0,
                std_error: 0.0,
                n_samples: n,
            }
        };
        QuantityEstimates {
            info_shannon: info,
            info_estimation: ratio(a_g, 1),
            fidelity: ratio(a_f, 2),
            reversibility,
        }
    }

    /// Delete-one-substream jackknife standard errors of `I`, `G`, `F`, `R`.
    pub fn jackknife_std_errors(&self) -> [f64; 4] {
        let g = self.groups.len();
        if g < 2 {
            return [f64::INFINITY; 4];
        }
        let leave_out: Vec<[f64; 4]> = (0..g)
            .map(|i| {
                let part = McRun {
                    spec: self.spec,
                    groups: vec![merged(&self.groups, Some(i))],
                };
                part.estimates().as_array().map(|e| e.mean)
            })
            .collect();
        let gf = g as f64;
        std::array::from_fn(|q| {
            let mean = leave_out.iter().map(|v| v[q]).sum::<f64>() / gf;
            let ss: f64 = leave_out.iter().map(|v| (v[q] - mean).powi(2)).sum();
            ((gf - 1.0) / gf * ss).sqrt()
        })
    }
}

/// Ratio estimates of `I`, `G`, `F`, `R` for one outcome.
pub fn mc_estimate_quantities(spec: &MeasurementSpec, n_samples: usize, seed: u64) -> Result<QuantityEstimates> {
    mc_estimate_quantities_with(spec, n_samples, seed, &McConfig::default())
}

pub fn mc_estimate_quantities_with(
    spec: &MeasurementSpec,
    n_samples: usize,
    seed: u64,
    config: &McConfig,
) -> Result<QuantityEstimates> {
    Ok(mc_run(spec, n_samples, seed, config)?.estimates())
}

/// Mean of `f(|ψ₀|², …, |ψ_{d−1}|²)` over invariant-measure states.
pub fn mc_haar_mean<F>(d: usize, n_samples: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_samples(n_samples)?;
    if d < 2 {
        return Err(Error::out_of_range("d", format!("need d >= 2, got {d}")));
    }
    let groups = run_substreams::<1, _>(n_samples, seed, &McConfig::default(), |rng, m| {
        let mut acc = Moments::new();
        let mut w = vec![0.0; d];
        for _ in 0..m {
            sample_haar_weights(rng, &mut w);
            acc.push(&[f(&w)]);
        }
        acc
    });
    let all = merged(&groups, None);
    Ok(McEstimate {
        mean: all.mean[0],
        std_error: all.delta_std_error(&[1.0]),
        n_samples: all.n as usize,
    })
}

/// Outcome of measuring a state and applying the optimal reversing
/// measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reversal {
    pub p_outcome: f64,
    pub recovery_prob: f64,
    /// `|⟨ψ|ψ_recovered⟩|²`.
    pub recovered_overlap: f64,
}

/// Measures `state` with `spec` and reverses with `λ·M⁻¹`, the largest
/// multiple of the inverse that is still a measurement operator.
pub fn simulate_reversal(spec: &MeasurementSpec, state: &PureState) -> Result<Reversal> {
    if !spec.is_invertible() {
        return Err(Error::out_of_range(
            "k + l",
            format!("reversal needs k + l = d = {}, got {}", spec.d(), spec.k() + spec.l()),
        ));
    }
    if spec.lambda() == 0.0 {
        return Err(Error::out_of_range("lambda", "reversal needs lambda > 0"));
    }
    if state.dim() != spec.d() as usize {
        return Err(Error::out_of_range(
            "state",
            format!("dimension {} does not match d = {}", state.dim(), spec.d()),
        ));
    }
    let m = spec.diagonal();
    let lambda = spec.lambda();
    let psi = state.amplitudes();
    let measured: Vec<Complex64> = psi.iter().zip(&m).map(|(a, mi)| a * mi).collect();
    let p_outcome: f64 = measured.iter().map(|a| a.norm_sqr()).sum();
    let post: Vec<Complex64> = measured.iter().map(|a| a / p_outcome.sqrt()).collect();
    let reversed: Vec<Complex64> = post.iter().zip(&m).map(|(a, mi)| a * (lambda / mi)).collect();
    let recovery_prob: f64 = reversed.iter().map(|a| a.norm_sqr()).sum();
    let norm = recovery_prob.sqrt();
    let overlap: Complex64 = psi.iter().zip(&reversed).map(|(a, b)| a.conj() * b / norm).sum();
    Ok(Reversal {
        p_outcome,
        recovery_prob,
        recovered_overlap: overlap.norm_sqr(),
    })
}

/// Haar average of the recovery probability, weighted by the outcome
/// posterior, together with the largest deviation of the recovered overlap
/// from one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryEstimate {
    pub recovery: McEstimate,
    pub worst_overlap_error: f64,
}

pub fn mc_recovery_probability(spec: &MeasurementSpec, n_samples: usize, seed: u64) -> Result<RecoveryEstimate> {
    check_samples(n_samples)?;
    let d = spec.d() as usize;
    // Validates the preconditions once.
    simulate_reversal(spec, &PureState::basis(d, 0)?)?;
    let results = {
        let parts = split(n_samples, McConfig::default().substreams);
        let job = |(i, &m): (usize, &usize)| {
            let mut rng = substream(seed, i as u64);
            let mut acc = Moments::<2>::new();
            let mut worst: f64 = 0.0;
            for _ in 0..m {
                let psi = sample_haar_state(d, &mut rng);
                let r = simulate_reversal(spec, &psi).expect("preconditions checked");
                worst = worst.max((r.recovered_overlap - 1.0).abs());
                acc.push(&[r.recovery_prob * r.p_outcome, r.p_outcome]);
            }
            (acc, worst)
        };
        parts.par_iter().enumerate().map(job).collect::<Vec<_>>()
    };
    let mut all = Moments::new();
    let mut worst: f64 = 0.0;
    for (m, w) in &results {
        all.merge(m);
        worst = worst.max(*w);
    }
    let [a, b] = all.mean;
    Ok(RecoveryEstimate {
        recovery: McEstimate {
            mean: a / b,
            std_error: all.delta_std_error(&[1.0 / b, -a / (b * b)]),
            n_samples: all.n as usize,
        },
        worst_overlap_error: worst,
    })
}

const FD_AGREEMENT: f64 = 1e-4;

/// Central difference of order 1 or 2 at steps `h0` and `h0/2`, combined by
/// Richardson extrapolation.
///
/// Fails when the extrapolated value and the finer plain difference disagree
/// by more than `1e−4` relative, beyond the expected rounding noise.
pub fn finite_diff<F: Fn(f64) -> f64>(f: F, x: f64, order: u32, h0: f64) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::out_of_range("h0", format!("need h0 > 0, got {h0}")));
    }
    if !(x - 2.0 * h0 > 0.0 && x + 2.0 * h0 < 1.0) {
        return Err(Error::out_of_range(
            "x",
            format!("[x - 2h0, x + 2h0] = [{}, {}] not inside (0, 1)", x - 2.0 * h0, x + 2.0 * h0),
        ));
    }
    let mut fmax: f64 = 0.0;
    let mut eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::out_of_range("fn", format!("not finite at {t}: {v}")));
        }
        fmax = fmax.max(v.abs());
        Ok(v)
    };
    let (coarse, fine) = match order {
        1 => {
            let d = |plus: f64, minus: f64, h: f64| (plus - minus) / (2.0 * h);
            let c = d(eval(x + h0)?, eval(x - h0)?, h0);
            let h = h0 / 2.0;
            (c, d(eval(x + h)?, eval(x - h)?, h))
        }
        2 => {
            let mid = eval(x)?;
            let d = |plus: f64, minus: f64, h: f64| (plus - 2.0 * mid + minus) / (h * h);
            let c = d(eval(x + h0)?, eval(x - h0)?, h0);
            let h = h0 / 2.0;
            (c, d(eval(x + h)?, eval(x - h)?, h))
        }
        _ => return Err(Error::out_of_range("order", format!("need 1 or 2, got {order}"))),
    };
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let noise = 64.0 * f64::EPSILON * fmax / (h0 / 2.0).powi(order as i32);
    let scale = extrapolated.abs().max(fine.abs());
    let diff = (extrapolated - fine).abs();
    if diff > FD_AGREEMENT * scale + noise {
        return Err(Error::FiniteDifference {
            coarse: fine,
            fine: extrapolated,
            rel_diff: diff / scale,
        });
    }
    Ok(extrapolated)
}

/// The exact identities behind the endpoint limits of `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `Σ_{n<k} C(k+l−n−1, l)(−1)^{k−n−1} a(k+l,n) = a(k−1,k−1)`.
    A1,
    /// `Σ_{n<k} C(k+l−n, l+1)(−1)^{k−n−1} a(k+l,n) = a(k−2,k−1)`, `k ≥ 2`.
    A2,
    /// `Σ_{n<l} (−1)^{l−n−1} C(k+l−n−2, k−1) C(k+l, n) = l`, with the
    /// coefficient relation used alongside it.
    B1,
    /// The `C(k+l+1, n)` variant, `= l(l+1)/2`.
    B2,
    /// The `n`th Taylor coefficient of `J` at `λ = 1`, from the closed form,
    /// equals `C(l−1+n, l−1)·a(k+l, k+l−1+n)`.
    BGeneral(u32),
}

impl Identity {
    pub const BASIC: [Identity; 4] = [Identity::A1, Identity::A2, Identity::B1, Identity::B2];
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::A1 => f.write_str("A1"),
            Identity::A2 => f.write_str("A2"),
            Identity::B1 => f.write_str("B1"),
            Identity::B2 => f.write_str("B2"),
            Identity::BGeneral(n) => write!(f, "B_general({n})"),
        }
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        match t.as_str() {
            "A1" => return Ok(Identity::A1),
            "A2" => return Ok(Identity::A2),
            "B1" => return Ok(Identity::B1),
            "B2" => return Ok(Identity::B2),
            _ => {}
        }
        t.strip_prefix("B_GENERAL(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.trim().parse().ok())
            .map(Identity::BGeneral)
            .ok_or_else(|| Error::InvalidIdentity(format!("unknown identity {s:?}")))
    }
}

/// Largest `k + l` and `n` for which `B_general(n)` can be checked.
pub const B_GENERAL_MAX_KL: u32 = 20;
pub const B_GENERAL_MAX_N: u32 = 20;

fn int(n: impl Into<num_bigint::BigInt>) -> Rational {
    BigRational::from_integer(n.into())
}

fn sign(e: u32) -> Rational {
    if e % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Exact check of one identity. All `a` coefficients share the factor
/// `1/ln 2`, so equality of their rational parts is equality of the
/// identity.
pub fn check_identity(id: Identity, k: u32, l: u32) -> Result<bool> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidIdentity(format!("{id} needs k, l >= 1, got k={k} l={l}")));
    }
    let j = k + l;
    match id {
        Identity::A1 => {
            let lhs = (0..k).fold(Rational::zero(), |acc, n| {
                acc + int(binomial(j - n - 1, i64::from(l))) * sign(k - n - 1) * coeff_a_rho(j, n)
            });
            Ok(lhs == coeff_a_rho(k - 1, k - 1))
        }
        Identity::A2 => {
            if k < 2 {
                return Err(Error::InvalidIdentity(format!("A2 needs k >= 2, got k={k}")));
            }
            let lhs = (0..k).fold(Rational::zero(), |acc, n| {
                acc + int(binomial(j - n, i64::from(l) + 1)) * sign(k - n - 1) * coeff_a_rho(j, n)
            });
            Ok(lhs == coeff_a_rho(k - 2, k - 1))
        }
        Identity::B1 => {
            let count = (0..l).fold(Rational::zero(), |acc, n| {
                acc + sign(l - n - 1) * int(binomial(j - n - 2, i64::from(k) - 1)) * int(binomial(j, i64::from(n)))
            });
            let brackets = (0..l).all(|n| {
                let c = int(binomial(j, i64::from(n)));
                &c * coeff_a_rho(j - n, j - n) + coeff_a_rho(j, n) == c * coeff_a_rho(j, j)
            });
            Ok(count == int(l) && brackets)
        }
        Identity::B2 => {
            let count = (0..l).fold(Rational::zero(), |acc, n| {
                acc + sign(l - n - 1)
                    * int(binomial(j - n - 2, i64::from(k) - 1))
                    * int(binomial(j + 1, i64::from(n)))
            });
            let factors = (0..l).all(|n| {
                int(binomial(j, i64::from(n))) * coeff_a_rho(j - n, j - n + 1)
                    == int(binomial(j + 1, i64::from(n))) * coeff_a_rho(j, j + 1)
            });
            Ok(count == Rational::new((l * (l + 1)).into(), 2.into()) && factors)
        }
        Identity::BGeneral(n) => {
            if j > B_GENERAL_MAX_KL || n > B_GENERAL_MAX_N {
                return Err(Error::InvalidIdentity(format!(
                    "B_general needs k+l <= {B_GENERAL_MAX_KL} and n <= {B_GENERAL_MAX_N}, got k+l={j} n={n}"
                )));
            }
            let laurent = closed_form_j_laurent(k, l);
            if laurent.singular.iter().any(|c| !c.is_zero()) {
                return Ok(false);
            }
            let derivative = &laurent.regular[n as usize] * int(factorial(n));
            let expected = Rational::new(factorial(l - 1 + n), factorial(l - 1)) * coeff_a_rho(j, j - 1 + n);
            Ok(derivative == expected)
        }
    }
}

/// `a(j, j+1)` agrees between the two closed forms (`1/((j+1) ln 2)` and the
/// general `n > j` formula) and with the Taylor coefficient of
/// `(1+ε)ʲ ln(1+ε)` obtained by multiplying the two series out.
pub fn check_regime_consistency(j: u32) -> bool {
    let n = j + 1;
    let by_formula = coeff_a_rho(j, n);
    let simple = Rational::new(1.into(), (j + 1).into());
    // [εⁿ] (1+ε)ʲ·ln(1+ε) = Σ_{i=1}^{n} C(j, n−i)·(−1)^{i+1}/i
    let by_product = (1..=n).fold(Rational::zero(), |acc, i| {
        acc + int(binomial(j, i64::from(n - i))) * sign(i + 1) / int(i)
    });
    by_formula == simple && by_formula == by_product
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities;
    use approx::assert_relative_eq;

    fn spec(d: u32, k: u32, l: u32, lambda: f64) -> MeasurementSpec {
        MeasurementSpec::new(d, k, l, lambda).unwrap()
    }

    #[test]
    fn haar_states_are_normalized_and_reproducible() {
        let a = sample_haar_state(2, &mut substream(7, 0));
        let b = sample_haar_state(2, &mut substream(7, 0));
        assert_eq!(a, b);
        let norm: f64 = a.probabilities().iter().sum();
        assert!((norm - 1.0).abs() < 1e-15);
        assert_ne!(a, sample_haar_state(2, &mut substream(7, 1)));
    }

    #[test]
    fn pure_state_rejects_unnormalized() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(PureState::new(v), Err(Error::NotNormalized(_))));
        assert!(PureState::basis(3, 2).is_ok());
        assert!(PureState::basis(3, 3).is_err());
    }

    #[test]
    fn haar_moments() {
        for d in [2usize, 3, 5] {
            let df = d as f64;
            let m2 = mc_haar_mean(d, 200_000, 3, |w| w[0]).unwrap();
            assert!(m2.agrees_with(1.0 / df, 4.0), "d={d} {m2:?}");
            let m4 = mc_haar_mean(d, 200_000, 3, |w| w[0] * w[0]).unwrap();
            assert!(m4.agrees_with(2.0 / (df * (df + 1.0)), 4.0), "d={d} {m4:?}");
        }
    }

    #[test]
    fn bloch_sphere_quadrature_of_fourth_moment() {
        // |⟨0|ψ⟩|² = cos²(θ/2) with θ distributed as sin θ dθ / 2.
        let n = 20_000;
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| (t / 2.0).cos().powi(4) * t.sin() / 2.0;
        let mut s = f(0.0) + f(std::f64::consts::PI);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_relative_eq!(s * h / 3.0, 2.0 / 6.0, max_relative = 1e-12);
    }

    #[test]
    fn serial_and_parallel_runs_are_identical() {
        let s = spec(4, 1, 3, 0.5);
        let serial = McConfig {
            substreams: 8,
            parallel: false,
        };
        let parallel = McConfig {
            parallel: true,
            ..serial
        };
        let a = mc_estimate_quantities_with(&s, 20_000, 11, &serial).unwrap();
        let b = mc_estimate_quantities_with(&s, 20_000, 11, &parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.info_shannon.n_samples, 20_000);
    }

    #[test]
    fn rejects_too_few_samples() {
        let s = spec(4, 1, 3, 0.5);
        assert!(matches!(
            mc_estimate_quantities(&s, 1000, 1),
            Err(Error::TooFewSamples { given: 1000, .. })
        ));
    }

    #[test]
    fn estimates_match_closed_forms() {
        for (d, k, l, lam) in [(4u32, 1u32, 3u32, 0.5), (4, 1, 2, 0.0), (3, 2, 1, 0.75), (2, 1, 1, 0.25)] {
            let s = spec(d, k, l, lam);
            let mc = mc_estimate_quantities(&s, 200_000, 5).unwrap();
            let exact = quantities::evaluate(&s).as_array();
            for (e, x) in mc.as_array().iter().zip(exact) {
                assert!(e.agrees_with(x, 4.0), "{s}: {e:?} vs {x}");
            }
        }
    }

    #[test]
    fn identity_operator_is_deterministic() {
        let mc = mc_estimate_quantities(&spec(4, 1, 3, 1.0), 10_000, 1).unwrap();
        assert!(mc.fidelity.agrees_with(1.0, 3.0));
        assert!(mc.info_shannon.agrees_with(0.0, 3.0));
        assert!(mc.reversibility.agrees_with(1.0, 3.0));
    }

    #[test]
    fn jackknife_is_close_to_delta_method() {
        let run = mc_run(&spec(4, 1, 3, 0.5), 200_000, 9, &McConfig::default()).unwrap();
        let jack = run.jackknife_std_errors();
        for (e, j) in run.estimates().as_array().iter().zip(jack) {
            let r = j / e.std_error;
            assert!((0.4..2.5).contains(&r), "{e:?} jackknife {j}");
        }
    }

    #[test]
    fn reversal_examples() {
        let s = spec(4, 1, 3, 0.5);
        let r = simulate_reversal(&s, &PureState::basis(4, 0).unwrap()).unwrap();
        assert_relative_eq!(r.p_outcome, 1.0);
        assert_relative_eq!(r.recovery_prob, 0.25);
        assert!((r.recovered_overlap - 1.0).abs() < 1e-12);
        let psi = sample_haar_state(4, &mut substream(2, 0));
        let r = simulate_reversal(&spec(4, 2, 2, 1.0), &psi).unwrap();
        assert!((r.p_outcome - 1.0).abs() < 1e-12 && (r.recovery_prob - 1.0).abs() < 1e-12);
        assert!(simulate_reversal(&spec(4, 1, 2, 0.5), &psi).is_err());
        assert!(simulate_reversal(&spec(4, 1, 3, 0.0), &psi).is_err());
        assert!(simulate_reversal(&spec(3, 1, 2, 0.5), &psi).is_err());
    }

    #[test]
    fn recovery_average_matches_reversibility() {
        let s = spec(4, 2, 2, 0.5);
        let est = mc_recovery_probability(&s, 100_000, 4).unwrap();
        assert!(est.worst_overlap_error < 1e-12);
        assert!(est.recovery.agrees_with(quantities::eval_r(&s), 4.0), "{est:?}");
    }

    #[test]
    fn finite_diff_examples() {
        let s = spec(4, 1, 3, 0.5);
        let g = |x: f64| quantities::eval_g(&s.with_lambda(x.sqrt()).unwrap());
        let v = finite_diff(g, 0.25, 1, 0.005).unwrap();
        assert!((v + 0.195_918_367_346_938_8).abs() < 1e-8, "{v}");
        assert_eq!(finite_diff(|_| 3.0, 0.5, 2, 0.01).unwrap(), 0.0);
        let dj = crate::derivatives::dj_dlam2(1, 3, 0.5);
        let v = finite_diff(|x| quantities::eval_j(1, 3, x.sqrt()), 0.25, 1, 0.005).unwrap();
        assert_relative_eq!(v, dj, max_relative = 1e-6);
        assert!(finite_diff(|x| x, 0.01, 1, 0.01).is_err());
        assert!(finite_diff(|x| x, 0.5, 3, 0.01).is_err());
        assert!(matches!(
            finite_diff(|x| (1.0 / (x - 0.5)).sin(), 0.52, 1, 0.004),
            Err(Error::FiniteDifference { .. })
        ));
    }

    #[test]
    fn identity_examples() {
        assert!(check_identity(Identity::A1, 3, 2).unwrap());
        assert!(check_identity(Identity::B1, 2, 4).unwrap());
        assert!(check_identity(Identity::BGeneral(3), 2, 2).unwrap());
        assert!(check_identity(Identity::A2, 1, 3).is_err());
        assert!(check_identity(Identity::BGeneral(2), 15, 10).is_err());
        assert_eq!("B_general(4)".parse::<Identity>().unwrap(), Identity::BGeneral(4));
        assert_eq!("a2".parse::<Identity>().unwrap(), Identity::A2);
        assert!("C1".parse::<Identity>().is_err());
        for j in 0..=30 {
            assert!(check_regime_consistency(j), "j={j}");
        }
    }
}
