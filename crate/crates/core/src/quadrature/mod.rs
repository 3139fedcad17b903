//! Period integral `I_q(alpha) = int_{x0}^{x1} dt / sqrt(f(t))`, its
//! `alpha`-derivative and the exponent-duality identity.
//!
//! Both integrands have inverse-square-root (or square-root) behaviour at
//! the turning points. The substitution `t = x0 + (x1 - x0) sin^2(theta)`
//! cancels it exactly: on `theta in [0, pi/2]` the period integrand becomes
//! `2 / sqrt(h(t))` with `h = f / ((t - x0)(x1 - t))` smooth and positive, so
//! adaptive Gauss–Kronrod converges quickly. Tanh-sinh is kept as a fallback.

mod elliptic;
mod gauss_kronrod;
mod tanh_sinh;

use std::f64::consts::{FRAC_PI_2, PI};

pub use elliptic::ellip_k_complementary;

use crate::error::{domain, Error, Result};
use crate::phase_plane::{alpha_star, Exponent, Oval};

/// Default absolute tolerance of the period quadratures.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default cap on integrand evaluations per quadrature.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A quadrature value with its error estimate and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule: converge once the error estimate is below
/// `max(abs_tol, rel_tol * |value|)` or give up after `budget` evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub budget: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: 0.0,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn relative(tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            budget: DEFAULT_BUDGET,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) || self.abs_tol + self.rel_tol <= 0.0 {
            return Err(domain(format!(
                "tolerance must be positive, got abs {} / rel {}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.budget == 0 {
            return Err(domain("evaluation budget must be positive"));
        }
        Ok(())
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::absolute(DEFAULT_TOL)
    }
}

/// Integrates a smooth function over `[a, b]`: adaptive Gauss–Kronrod first,
/// tanh-sinh if that exhausts its budget.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    opts.validate()?;
    match gauss_kronrod::integrate(&f, a, b, opts) {
        Ok(r) => Ok(r),
        Err(Error::NonConvergence(gk)) => {
            tanh_sinh::integrate(&f, a, b, opts).map_err(|ts| {
                Error::NonConvergence(format!("{gk}; fallback: {ts}"))
            })
        }
        Err(e) => Err(e),
    }
}

/// One fixed 15-point Kronrod rule on `[a, b]`.
pub fn gk15_on<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    gauss_kronrod::gk15(&f, a, b).0
}

/// `I_q(alpha)` to absolute tolerance `tol`.
pub fn period_integral(q: f64, alpha: f64, tol: f64) -> Result<QuadResult> {
    period_integral_with(q, alpha, &QuadOptions::absolute(tol))
}

pub fn period_integral_with(q: f64, alpha: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let oval = Oval::new(q, alpha)?;
    period_integral_on(&oval, opts)
}

/// `I_q(alpha)` for an already-constructed oval.
pub fn period_integral_on(oval: &Oval, opts: &QuadOptions) -> Result<QuadResult> {
    integrate(|theta| 2.0 / oval.phase_point(theta).h.sqrt(), 0.0, FRAC_PI_2, opts)
}

/// Partial period `int_{x0}^{t(theta)} dt / sqrt(f)` up to phase `theta`.
pub fn partial_period(oval: &Oval, theta: f64, opts: &QuadOptions) -> Result<QuadResult> {
    integrate(|s| 2.0 / oval.phase_point(s).h.sqrt(), 0.0, theta, opts)
}

/// `dI_q/dalpha` as the regular integral
/// `-4 q (q-1) int sqrt(f) f' t^(q-3) / psi^2 dt`.
pub fn period_integral_deriv(q: f64, alpha: f64, tol: f64) -> Result<QuadResult> {
    period_integral_deriv_with(q, alpha, &QuadOptions::absolute(tol))
}

pub fn period_integral_deriv_with(q: f64, alpha: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let oval = Oval::new(q, alpha)?;
    let scale = -4.0 * q * (q - 1.0);
    let integrand = |theta: f64| {
        let p = oval.phase_point(theta);
        let f = p.f();
        let df = oval.df(p.t);
        let psi = df * df - 2.0 * f * oval.d2f(p.t);
        // sqrt(f) dt = 2 (t - x0)(x1 - t) sqrt(h) dtheta
        2.0 * p.from_x0 * p.to_x1 * p.h.sqrt() * df * p.t.powf(q - 3.0) / (psi * psi)
    };
    let r = integrate(integrand, 0.0, FRAC_PI_2, opts)?;
    Ok(QuadResult {
        value: scale * r.value,
        abs_error_estimate: scale.abs() * r.abs_error_estimate,
        ..r
    })
}

/// Limit of `I_q(alpha)` as the oval collapses: `pi / sqrt(q - 2)`.
pub fn period_limit(q: f64) -> Result<f64> {
    let q = Exponent::new(q)?.get();
    Ok(PI / (q - 2.0).sqrt())
}

/// Normal-form estimate `pi sqrt(-2 / f''(xhat))` of the period, exact in the
/// limit `alpha -> alpha*`. Diagnostic only: the true evaluation point of
/// `f''` lies somewhere inside the oval and is not computable.
pub fn period_normal_form(oval: &Oval) -> f64 {
    PI * (-2.0 / oval.d2f(oval.xhat)).sqrt()
}

/// Closed form of `I_4(alpha)` through the complete elliptic integral:
/// `K(k) / (sqrt(alpha) x1)` with `k^2 = 1 - x0^2/x1^2`, where `x0^2, x1^2`
/// solve `alpha s^2 - s + 1 = 0`.
pub fn elliptic_oracle_q4(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(domain(format!("q = 4 oracle needs 0 < alpha < 1/4, got {alpha}")));
    }
    let s0 = 2.0 / (1.0 + (1.0 - 4.0 * alpha).sqrt());
    let s1 = 1.0 / (alpha * s0);
    let (x0, x1) = (s0.sqrt(), s1.sqrt());
    Ok(ellip_k_complementary(x0 / x1) / (alpha.sqrt() * x1))
}

/// Dual exponent and parameter: `I_q(alpha) = 2/(q-2) I_{q'}(alpha')` with
/// `q' = 2q/(q-2)` and `alpha' = alpha^(2/(q-2))`.
pub fn dual_point(q: f64, alpha: f64) -> Result<(f64, f64)> {
    let q = Exponent::new(q)?.get();
    Ok((2.0 * q / (q - 2.0), alpha.powf(2.0 / (q - 2.0))))
}

/// `|I_q(alpha) - 2/(q-2) I_{q'}(alpha')|` from two independent quadratures.
pub fn duality_residual(q: f64, alpha: f64, tol: f64) -> Result<f64> {
    let a_star = alpha_star(q)?;
    if !(alpha > 0.0 && alpha < a_star) {
        return Err(domain(format!("alpha = {alpha} outside (0, {a_star})")));
    }
    let direct = period_integral(q, alpha, tol)?;
    let (qd, ad) = dual_point(q, alpha)?;
    let dual = period_integral(qd, ad, tol)?;
    Ok((direct.value - 2.0 / (q - 2.0) * dual.value).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn q4_examples_against_elliptic_oracle() {
        let r = period_integral(4.0, 0.2, 1e-12).unwrap();
        assert_relative_eq!(r.value, 2.3155, epsilon = 1e-3);
        assert_relative_eq!(r.value, elliptic_oracle_q4(0.2).unwrap(), epsilon = 1e-10);
        assert!(r.abs_error_estimate <= 1e-12 && r.evaluations > 0);
        let r = period_integral(4.0, 0.02, 1e-12).unwrap();
        assert_relative_eq!(r.value, 3.3684, epsilon = 1e-3);
        let near = period_integral(4.0, 0.2499, 1e-12).unwrap().value;
        assert!((near - PI / 2f64.sqrt()).abs() < 0.02);
    }

    #[test]
    fn oracle_examples() {
        // reference values from a 30-digit quadrature of the defining integral
        assert_relative_eq!(elliptic_oracle_q4(0.2).unwrap(), 2.315_337_652_074_566, epsilon = 1e-13);
        assert_relative_eq!(elliptic_oracle_q4(0.02).unwrap(), 3.368_472_686_509_792, epsilon = 1e-13);
        assert_relative_eq!(elliptic_oracle_q4(0.05).unwrap(), 2.9346, epsilon = 1e-3);
        let lim = elliptic_oracle_q4(0.25 - 1e-12).unwrap();
        assert_relative_eq!(lim, PI / 2f64.sqrt(), epsilon = 1e-5);
        assert!(elliptic_oracle_q4(0.25).is_err());
        assert!(elliptic_oracle_q4(0.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (q, a) = (4.0, 0.1);
        let h = 1e-5;
        let fd = (period_integral(q, a + h, 1e-13).unwrap().value
            - period_integral(q, a - h, 1e-13).unwrap().value)
            / (2.0 * h);
        let d = period_integral_deriv(q, a, 1e-11).unwrap().value;
        assert_relative_eq!(d, fd, max_relative = 1e-5);
    }

    #[test]
    fn derivative_is_negative() {
        assert!(period_integral_deriv(3.0, 0.2, 1e-10).unwrap().value < 0.0);
        let a = 0.5 * alpha_star(2.5).unwrap();
        assert!(period_integral_deriv(2.5, a, 1e-10).unwrap().value < 0.0);
    }

    #[test]
    fn limits() {
        assert_relative_eq!(period_limit(4.0).unwrap(), 2.2214415, epsilon = 1e-7);
        assert_relative_eq!(period_limit(3.0).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(period_limit(6.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert!(period_limit(2.0).is_err());
    }

    #[test]
    fn normal_form_tracks_quadrature_near_collapse() {
        let q = 3.0;
        let a = alpha_star(q).unwrap() * (1.0 - 1e-4);
        let oval = Oval::new(q, a).unwrap();
        let quad = period_integral_on(&oval, &QuadOptions::default()).unwrap().value;
        assert!((quad - period_normal_form(&oval)).abs() < 1e-3);
    }

    #[test]
    fn duality_examples() {
        assert!(duality_residual(3.0, 0.3, 1e-12).unwrap() <= 1e-8);
        assert!(duality_residual(4.0, 0.1, 1e-12).unwrap() <= 1e-12);
        assert!(duality_residual(6.0, 0.1, 1e-12).unwrap() <= 1e-8);
        let (qd, ad) = dual_point(3.0, 0.3).unwrap();
        assert_relative_eq!(qd, 6.0);
        assert_relative_eq!(ad, 0.09, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_and_bad_tolerance() {
        assert!(matches!(period_integral(4.0, 0.25, 1e-10), Err(Error::Degenerate { .. })));
        assert!(matches!(period_integral(4.0, 0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(period_integral(4.0, 0.1, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn unreachable_tolerance_is_non_convergence() {
        let opts = QuadOptions { abs_tol: 1e-30, rel_tol: 0.0, budget: 5_000 };
        assert!(matches!(
            period_integral_with(4.0, 0.1, &opts),
            Err(Error::NonConvergence(_))
        ));
    }
}
