//! Norms on the periodic Sobolev scale, the functional `J_{q,r}`, its second
//! variation at the constant function, and the decision of whether the
//! constant attains the sharp embedding constant `lambda_{q,r}(T)`.
//!
//! Fourier data are taken with respect to the orthonormal exponentials
//! `e_k(x) = exp(i pi k x / T) / sqrt(2T)` on `(-T, T)`, so that
//! `||y||_{L2}^2 = sum |y_k|^2` and `||1||_{H^r}^2 = 2T`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::solutions;
use crate::spectral::periodic_sum;

/// Default number of grid points for `L_q` integrals.
pub const DEFAULT_GRID: usize = 4096;

/// Problem data `(q, r, T)`; `T` is the half-period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingParams {
    pub q: f64,
    pub r: f64,
    pub t: f64,
}

impl EmbeddingParams {
    pub fn new(q: f64, r: f64, t: f64) -> Result<Self> {
        for (name, v) in [("q", q), ("r", r), ("T", t)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(EmbeddingParams { q, r, t })
    }

    /// `(pi/T)^(2r) + 2`: the constant function loses local minimality above it.
    pub fn threshold(&self) -> f64 {
        bifurcation_threshold(self.r, self.t)
    }

    /// `(2T)^(1/2 - 1/q)`, the quotient attained by the constant function.
    pub fn constant_quotient(&self) -> f64 {
        (2.0 * self.t).powf(0.5 - 1.0 / self.q)
    }
}

pub fn bifurcation_threshold(r: f64, t: f64) -> f64 {
    (PI / t).powf(2.0 * r) + 2.0
}

/// A real trigonometric polynomial on `(-T, T)` stored by its Fourier
/// coefficients. Only `k >= 0` is stored; `y_{-k} = conj(y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFunction {
    half_period: f64,
    coefficients: BTreeMap<u64, Complex64>,
}

impl FourierFunction {
    pub fn zero(half_period: f64) -> Result<Self> {
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(domain(format!("T must be positive, got {half_period}")));
        }
        Ok(FourierFunction {
            half_period,
            coefficients: BTreeMap::new(),
        })
    }

    pub fn constant(c: f64, half_period: f64) -> Result<Self> {
        let mut y = Self::zero(half_period)?;
        y.set_mode(0, Complex64::new(c * (2.0 * half_period).sqrt(), 0.0))?;
        Ok(y)
    }

    /// `amplitude * cos(k pi x / T)`.
    pub fn cosine(k: u64, amplitude: f64, half_period: f64) -> Result<Self> {
        Self::zero(half_period)?.plus_cosine(k, amplitude)
    }

    /// Adds `amplitude * cos(k pi x / T)`.
    pub fn plus_cosine(mut self, k: u64, amplitude: f64) -> Result<Self> {
        let s = (2.0 * self.half_period).sqrt();
        let c = if k == 0 { amplitude * s } else { 0.5 * amplitude * s };
        let old = self.coefficient(k);
        self.set_mode(k, old + Complex64::new(c, 0.0))?;
        Ok(self)
    }

    /// Adds `amplitude * sin(k pi x / T)`, `k >= 1`.
    pub fn plus_sine(mut self, k: u64, amplitude: f64) -> Result<Self> {
        if k == 0 {
            return Err(domain("sine mode needs k >= 1"));
        }
        let c = -0.5 * amplitude * (2.0 * self.half_period).sqrt();
        let old = self.coefficient(k);
        self.set_mode(k, old + Complex64::new(0.0, c))?;
        Ok(self)
    }

    /// Sets the coefficient of mode `k` (and implicitly its conjugate at
    /// `-k`). The zero mode must be real.
    pub fn set_mode(&mut self, k: u64, c: Complex64) -> Result<()> {
        if k == 0 && c.im != 0.0 {
            return Err(domain("zero mode of a real function must be real"));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(domain("non-finite Fourier coefficient"));
        }
        self.coefficients.insert(k, c);
        Ok(())
    }

    pub fn coefficient(&self, k: u64) -> Complex64 {
        self.coefficients.get(&k).copied().unwrap_or_default()
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// Mode/|coefficient|^2 pairs over all integer modes, counting `+-k`.
    fn power(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.coefficients.iter().map(|(&k, c)| {
            let m = if k == 0 { 1.0 } else { 2.0 };
            (k, m * c.norm_sqr())
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = PI / self.half_period;
        let norm = (2.0 * self.half_period).sqrt();
        self.coefficients
            .iter()
            .map(|(&k, c)| {
                if k == 0 {
                    c.re
                } else {
                    let phase = Complex64::from_polar(1.0, w * k as f64 * x);
                    2.0 * (c * phase).re
                }
            })
            .sum::<f64>()
            / norm
    }

    /// Values on the periodic grid `x_j = -T + 2T j / n`, `j = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let h = 2.0 * self.half_period / n as f64;
        (0..n).map(|j| self.eval(-self.half_period + h * j as f64)).collect()
    }

    /// Mean value over `(-T, T)`.
    pub fn mean(&self) -> f64 {
        self.coefficient(0).re / (2.0 * self.half_period).sqrt()
    }

    /// `h - mean(h)`.
    pub fn mean_zero_part(&self) -> Self {
        let mut out = self.clone();
        out.coefficients.remove(&0);
        out
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.power().map(|(_, p)| p).sum()
    }
}

/// `||y||_{H^r}^2 = sum_k |y_k|^2 ((pi k / T)^(2r) + 1)`.
pub fn hr_norm_sq(y: &FourierFunction, r: f64) -> f64 {
    let w = PI / y.half_period;
    y.power()
        .map(|(k, p)| p * ((w * k as f64).powf(2.0 * r) + 1.0))
        .sum()
}

/// `(int_{-T}^{T} |y|^q dx)^(1/q)` from periodic samples.
pub fn lq_norm(samples: &[f64], q: f64, half_period: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(domain(format!("L_q norm needs q >= 1, got {q}")));
    }
    if samples.len() < 16 {
        return Err(domain(format!(
            "L_q norm needs at least 16 samples, got {}",
            samples.len()
        )));
    }
    let powered: Vec<f64> = samples.iter().map(|y| y.abs().powf(q)).collect();
    Ok(periodic_sum(&powered, 2.0 * half_period).powf(1.0 / q))
}

/// `J_{q,r}(y) = ||y||_{H^r}^2 - (2T)^(1 - 2/q) (int |y|^q)^(2/q)`, with the
/// `L_q` integral taken on a periodic grid of `grid` points.
pub fn functional_j(y: &FourierFunction, q: f64, r: f64, grid: usize) -> Result<f64> {
    let t = y.half_period;
    let lq = lq_norm(&y.sample(grid), q, t)?;
    Ok(hr_norm_sq(y, r) - (2.0 * t).powf(1.0 - 2.0 / q) * lq * lq)
}

/// Second variation of `J` at `y = 1` in direction `h` (halved):
/// `||h1||_{H^r}^2 - (q - 1) int h1^2` with `h1 = h - mean(h)`.
pub fn second_variation_form(h: &FourierFunction, q: f64, r: f64) -> f64 {
    let w = PI / h.half_period;
    h.power()
        .filter(|&(k, _)| k != 0)
        .map(|(k, p)| p * ((w * k as f64).powf(2.0 * r) + 2.0 - q))
        .sum()
}

/// Smallest eigenvalue `(pi/T)^(2r) - (q - 2)` of `(-d^2/dx^2)^r - (q - 2)`
/// on mean-zero `2T`-periodic functions.
pub fn smallest_eigenvalue(q: f64, r: f64, t: f64) -> f64 {
    (PI / t).powf(2.0 * r) - (q - 2.0)
}

/// Half-period `T1 = T (T/pi)^(r-1)` of the `H^1` problem that bounds the
/// `H^r` problem from below, so that `(pi/T1)^2 = (pi/T)^(2r)`.
pub fn steklov_reduce(r: f64, t: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(domain(format!("reduction to H^1 needs r >= 1, got {r}")));
    }
    if !(t > 0.0) {
        return Err(domain(format!("T must be positive, got {t}")));
    }
    Ok(t * (t / PI).powf(r - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantStatus {
    /// The constant function attains the minimum.
    ExactConstantMinimizer,
    /// The constant is not a minimiser; `value` is an upper bound.
    ConstantNotMinimizerUpperBound,
    /// `q <= 2`: the constant attains the minimum by Hölder.
    BelowThresholdQLe2,
}

impl ConstantStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantStatus::ExactConstantMinimizer => "exact_constant_minimizer",
            ConstantStatus::ConstantNotMinimizerUpperBound => "constant_not_minimizer_upper_bound",
            ConstantStatus::BelowThresholdQLe2 => "below_threshold_q_le_2",
        }
    }
}

/// A nonconstant periodic solution used as a competitor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Competitor {
    pub n: usize,
    pub alpha: f64,
    pub rayleigh_quotient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpConstantResult {
    pub value: f64,
    pub status: ConstantStatus,
    pub constant_quotient: f64,
    pub threshold: f64,
    /// Best nonconstant competitor, when one was reconstructed.
    pub competitor: Option<Competitor>,
}

/// Options for [`sharp_constant_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantOptions {
    pub tol: f64,
    pub grid: usize,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        ConstantOptions {
            tol: crate::quadrature::DEFAULT_TOL,
            grid: DEFAULT_GRID,
        }
    }
}

pub fn sharp_constant(params: &EmbeddingParams) -> Result<SharpConstantResult> {
    sharp_constant_with(params, &ConstantOptions::default())
}

/// Sharp constant `lambda_{q,r}(T)` when the constant function is the
/// minimiser; otherwise an upper bound, improved for `r = 1` by the Rayleigh
/// quotients of the nonconstant periodic solutions.
pub fn sharp_constant_with(
    params: &EmbeddingParams,
    opts: &ConstantOptions,
) -> Result<SharpConstantResult> {
    let constant = params.constant_quotient();
    let threshold = params.threshold();
    let result = |value, status, competitor| SharpConstantResult {
        value,
        status,
        constant_quotient: constant,
        threshold,
        competitor,
    };
    if params.q <= 2.0 {
        return Ok(result(constant, ConstantStatus::BelowThresholdQLe2, None));
    }
    if params.r < 1.0 {
        return Err(domain(format!(
            "q > 2 with r = {} < 1 is outside the covered range r >= 1",
            params.r
        )));
    }
    if params.q <= threshold {
        return Ok(result(constant, ConstantStatus::ExactConstantMinimizer, None));
    }
    let mut best: Option<Competitor> = None;
    if params.r == 1.0 {
        for n in solutions::solvable_periods(params.q, params.t)? {
            let Some(alpha) = solutions::solve_alpha_for_period(params.q, params.t, n, opts.tol)?
            else {
                continue;
            };
            let profile = solutions::reconstruct_profile(params.q, alpha, n, params.t, opts.grid)?;
            let rq = profile.rayleigh_quotient();
            if best.map_or(true, |b| rq < b.rayleigh_quotient) {
                best = Some(Competitor {
                    n,
                    alpha,
                    rayleigh_quotient: rq,
                });
            }
        }
    }
    let value = best.map_or(constant, |b| b.rayleigh_quotient.min(constant));
    Ok(result(value, ConstantStatus::ConstantNotMinimizerUpperBound, best))
}

/// Value of `J` along `1 + eps cos(pi x / T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Destabilization {
    pub eps: f64,
    pub j: f64,
}

/// Evaluates `J(1 + eps cos(pi x/T))` starting from `eps = 0.01`, halving
/// while the sign is within `1e-12` of ambiguous.
pub fn destabilization(params: &EmbeddingParams, grid: usize) -> Result<Destabilization> {
    let mut eps = 0.01;
    for _ in 0..20 {
        let y = FourierFunction::constant(1.0, params.t)?.plus_cosine(1, eps)?;
        let j = functional_j(&y, params.q, params.r, grid)?;
        if j.abs() > 1e-12 {
            return Ok(Destabilization { eps, j });
        }
        eps *= 0.5;
    }
    Err(Error::Inconclusive(
        "sign of J stays within 1e-12 of zero".into(),
    ))
}
