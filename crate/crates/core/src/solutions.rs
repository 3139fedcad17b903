//! Positive `2T`-periodic solutions of `-y'' + y = y^(q-1)`.
//!
//! Every nonconstant solution runs along an oval of the first integral
//! `y'^2 = y^2 - mu y^q - c1` with `mu = 2/q`. Rescaling `y = sqrt(c1) t`
//! turns the half-period into `I_q(alpha)` with `alpha = mu c1^((q-2)/2)`,
//! so a solution with `n` oscillations per `2T` exists exactly when
//! `I_q(alpha) = T/n` has a root.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::phase_plane::{alpha_star, Exponent, Oval};
use crate::quadrature::{self, gk15_on, QuadOptions};
use crate::roots::bisect;
use crate::spectral::{derivative, periodic_sum};

/// Upper end of the `alpha` bracket: `alpha* (1 - ALPHA_HI_GAP)`.
const ALPHA_HI_GAP: f64 = 1e-9;
/// Number of phase panels used to invert `x(theta)`.
const PHASE_PANELS: usize = 64;

/// `q` above which the `n`-th nonconstant branch exists:
/// `(n pi / T)^2 + 2`.
pub fn branch_threshold(n: usize, t: f64) -> f64 {
    let a = n as f64 * PI / t;
    a * a + 2.0
}

fn check_qt(q: f64, t: f64) -> Result<()> {
    Exponent::new(q)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("T must be positive, got {t}")));
    }
    Ok(())
}

/// Oscillation counts `n` for which a nonconstant `2T`-periodic solution
/// exists: those with `T/n > pi/sqrt(q-2)`.
pub fn solvable_periods(q: f64, t: f64) -> Result<Vec<usize>> {
    check_qt(q, t)?;
    Ok((1..).take_while(|&n| q > branch_threshold(n, t)).collect())
}

/// Number of non-equivalent positive `2T`-periodic solutions, the constant
/// included.
pub fn count_periodic_solutions(q: f64, t: f64) -> Result<usize> {
    Ok(1 + solvable_periods(q, t)?.len())
}

/// The `k >= 1` with `((k-1) pi/T)^2 + 2 < q <= (k pi/T)^2 + 2`.
pub fn band_index(q: f64, t: f64) -> Result<usize> {
    check_qt(q, t)?;
    let guess = ((t / PI) * (q - 2.0).sqrt()).ceil().max(1.0) as usize;
    let mut k = guess.max(1);
    while k > 1 && q <= branch_threshold(k - 1, t) {
        k -= 1;
    }
    while q > branch_threshold(k, t) {
        k += 1;
    }
    Ok(k)
}

/// Root of `I_q(alpha) = T/n` in `(0, alpha*)`, or `None` when
/// `T/n <= pi/sqrt(q-2)`. `I_q` is strictly decreasing, so the root is unique.
pub fn solve_alpha_for_period(q: f64, t: f64, n: usize, tol: f64) -> Result<Option<f64>> {
    check_qt(q, t)?;
    if n == 0 {
        return Err(domain("oscillation count n must be at least 1"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(q > branch_threshold(n, t)) {
        return Ok(None);
    }
    let target = t / n as f64;
    let opts = QuadOptions::absolute((0.01 * tol).max(1e-13));
    let residual = |alpha: f64| -> Result<f64> {
        Ok(quadrature::period_integral_with(q, alpha, &opts)?.value - target)
    };
    let a_star = alpha_star(q)?;
    let hi = a_star * (1.0 - ALPHA_HI_GAP);
    if residual(hi)? >= 0.0 {
        return Err(Error::NonConvergence(format!(
            "T/n = {target} lies too close to the limit period for alpha < alpha*(1 - {ALPHA_HI_GAP})"
        )));
    }
    let mut lo = 0.5 * a_star;
    while residual(lo)? <= 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::NonConvergence("no lower bracket for alpha".into()));
        }
    }
    let alpha = bisect(residual, lo, hi, tol, 1e-15)?;
    let r = residual(alpha)?;
    if r.abs() > tol {
        return Err(Error::NonConvergence(format!(
            "period residual {r:e} above tolerance {tol:e}"
        )));
    }
    Ok(Some(alpha))
}

/// A nonconstant positive solution of `-y'' + y = y^(q-1)` with `n`
/// oscillations on `[-T, T)`, sampled on the periodic grid
/// `x_j = -T + 2T j / N`. The minimum sits at `x = -T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    pub q: f64,
    pub alpha: f64,
    /// Lagrange multiplier; `2/q` for this normalisation.
    pub mu: f64,
    /// First-integral constant.
    pub c1: f64,
    pub n: usize,
    pub half_period: f64,
    pub oval: Oval,
    /// Length `2 I_q(alpha)` of one oscillation as computed.
    pub oscillation_period: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Residuals measuring how well a profile solves the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDiagnostics {
    /// `|2 I - 2T/n| / (2T/n)`.
    pub period_residual: f64,
    /// `max |y'^2 - y^2 + mu y^q + c1|` with `y'` from spectral differentiation.
    pub first_integral_residual: f64,
    /// `|int (y'^2 + y^2) - int y^q| / int y^q`.
    pub virial_residual: f64,
    pub rayleigh_quotient: f64,
    pub min_y: f64,
    pub max_y: f64,
}

/// `c1` for a given `alpha` when `mu = 2/q`.
pub fn first_integral_constant(q: f64, alpha: f64) -> f64 {
    (0.5 * q * alpha).powf(2.0 / (q - 2.0))
}

/// Tabulated `x(theta) = int_0^theta 2 / sqrt(h)` on uniform phase panels.
struct PhaseClock<'a> {
    oval: &'a Oval,
    edges: Vec<f64>,
    elapsed: Vec<f64>,
}

impl<'a> PhaseClock<'a> {
    fn new(oval: &'a Oval) -> Result<Self> {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            budget: quadrature::DEFAULT_BUDGET,
        };
        let edges: Vec<f64> = (0..=PHASE_PANELS)
            .map(|i| FRAC_PI_2 * i as f64 / PHASE_PANELS as f64)
            .collect();
        let mut elapsed = vec![0.0];
        for w in edges.windows(2) {
            let piece = quadrature::integrate(|s| speed(oval, s), w[0], w[1], &opts)?;
            elapsed.push(elapsed.last().unwrap() + piece.value);
        }
        Ok(PhaseClock { oval, edges, elapsed })
    }

    fn half_period(&self) -> f64 {
        *self.elapsed.last().unwrap()
    }

    /// Phase `theta` with `x(theta) = s`, `0 <= s <= half_period`.
    fn phase_at(&self, s: f64) -> f64 {
        let p = match self
            .elapsed
            .binary_search_by(|v| v.total_cmp(&s))
        {
            Ok(i) => return self.edges[i],
            Err(i) => i.clamp(1, PHASE_PANELS) - 1,
        };
        let (mut lo, mut hi) = (self.edges[p], self.edges[p + 1]);
        let base = self.elapsed[p];
        let start = lo;
        let mut theta = lo + (hi - lo) * (s - base) / (self.elapsed[p + 1] - base);
        for _ in 0..60 {
            let x = base + gk15_on(|u| speed(self.oval, u), start, theta);
            let r = x - s;
            if r.abs() <= 4.0 * f64::EPSILON * self.half_period() {
                break;
            }
            if r > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let next = theta - r / speed(self.oval, theta);
            theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        theta
    }
}

/// `dx/dtheta` along the oval.
fn speed(oval: &Oval, theta: f64) -> f64 {
    2.0 / oval.phase_point(theta).h.sqrt()
}

/// Samples the solution with parameter `alpha` and `n` oscillations on a
/// periodic grid of `grid_size` points over `[-T, T)`.
///
/// The profile is obtained by inverting `x(theta)` under the phase
/// substitution, which avoids the turning-point singularity of the ODE.
pub fn reconstruct_profile(
    q: f64,
    alpha: f64,
    n: usize,
    t: f64,
    grid_size: usize,
) -> Result<PeriodicProfile> {
    check_qt(q, t)?;
    if n == 0 {
        return Err(domain("oscillation count n must be at least 1"));
    }
    if grid_size < 16 {
        return Err(domain(format!("grid needs at least 16 points, got {grid_size}")));
    }
    let oval = Oval::new(q, alpha)?;
    let clock = PhaseClock::new(&oval)?;
    let half = clock.half_period();
    let target = 2.0 * t / n as f64;
    let period = 2.0 * half;
    if (period - target).abs() > 1e-6 * target {
        return Err(Error::Consistency(format!(
            "oscillation period {period} differs from 2T/n = {target}"
        )));
    }
    let c1 = first_integral_constant(q, alpha);
    let scale = c1.sqrt();
    let h = 2.0 * t / grid_size as f64;
    let xs: Vec<f64> = (0..grid_size).map(|j| -t + h * j as f64).collect();
    let ys = xs
        .iter()
        .map(|&x| {
            let mut s = (x + t).rem_euclid(period);
            if s > half {
                s = period - s;
            }
            let theta = clock.phase_at(s.min(half));
            scale * oval.phase_point(theta).t
        })
        .collect();
    Ok(PeriodicProfile {
        q,
        alpha,
        mu: 2.0 / q,
        c1,
        n,
        half_period: t,
        oval,
        oscillation_period: period,
        xs,
        ys,
    })
}

/// `||y||_{H^1} / ||y||_{L_q}` for periodic samples over `(-T, T)`.
pub fn rayleigh_quotient(ys: &[f64], q: f64, t: f64) -> f64 {
    let (kinetic, _) = energy_and_power(ys, t);
    let lq = periodic_sum(&ys.iter().map(|y| y.abs().powf(q)).collect::<Vec<_>>(), 2.0 * t);
    kinetic.sqrt() / lq.powf(1.0 / q)
}

/// `int (y'^2 + y^2)` together with the spectral derivative `y'`.
fn energy_and_power(ys: &[f64], t: f64) -> (f64, Vec<f64>) {
    let dy = derivative(ys, 2.0 * t);
    let dens: Vec<f64> = ys.iter().zip(&dy).map(|(y, d)| d * d + y * y).collect();
    (periodic_sum(&dens, 2.0 * t), dy)
}

impl PeriodicProfile {
    pub fn rayleigh_quotient(&self) -> f64 {
        rayleigh_quotient(&self.ys, self.q, self.half_period)
    }

    pub fn diagnostics(&self) -> ProfileDiagnostics {
        let (q, t) = (self.q, self.half_period);
        let (energy, dy) = energy_and_power(&self.ys, t);
        let power = periodic_sum(
            &self.ys.iter().map(|y| y.powf(q)).collect::<Vec<_>>(),
            2.0 * t,
        );
        let first_integral_residual = self
            .ys
            .iter()
            .zip(&dy)
            .map(|(y, d)| (d * d - y * y + self.mu * y.powf(q) + self.c1).abs())
            .fold(0.0, f64::max);
        let target = 2.0 * t / self.n as f64;
        ProfileDiagnostics {
            period_residual: (self.oscillation_period - target).abs() / target,
            first_integral_residual,
            virial_residual: (energy - power).abs() / power,
            rayleigh_quotient: energy.sqrt() / power.powf(1.0 / q),
            min_y: self.ys.iter().copied().fold(f64::INFINITY, f64::min),
            max_y: self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}
