//! Closed-form phase-plane quantities for the ovals
//! `t'^2 = f(t) = t^2 - 1 - alpha * t^q`.
//!
//! Everything here is an explicit formula: the function `f` and its
//! derivatives, the turning points `x0 < xhat < x1` of an oval, the auxiliary
//! functions `psi`, `g`, `g1`, `g2`, the `beta_j`/`gamma_j` families that
//! describe `g` at the turning points as functions of `alpha`, the ratio
//! `tau` and the polynomials `P` and `Q` whose signs drive the monotonicity
//! certificate.

use crate::error::{domain, Error, Result};
use crate::roots::newton_bisect;

/// Relative slack below `alpha*` inside which an oval counts as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-12;

/// An exponent `q > 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 2.0 {
            Ok(Exponent(q))
        } else {
            Err(domain(format!("exponent q must satisfy q > 2, got {q}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Parameter value at which the oval shrinks to the point `x*`:
/// `alpha*(q) = 2/(q-2) * ((q-2)/q)^(q/2)`.
pub fn alpha_star(q: f64) -> Result<f64> {
    let q = Exponent::new(q)?.get();
    Ok(2.0 / (q - 2.0) * ((q - 2.0) / q).powf(0.5 * q))
}

/// The degenerate turning point `x* = sqrt(q/(q-2))`.
pub fn x_star(q: f64) -> Result<f64> {
    let q = Exponent::new(q)?.get();
    Ok((q / (q - 2.0)).sqrt())
}

/// `f(t) = t^2 - 1 - alpha t^q` or one of its first three derivatives.
pub fn f_eval(q: f64, alpha: f64, t: f64, order: u8) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("f is evaluated for t > 0, got t = {t}")));
    }
    Ok(match order {
        0 => t * t - 1.0 - alpha * t.powf(q),
        1 => 2.0 * t - alpha * q * t.powf(q - 1.0),
        2 => 2.0 - alpha * q * (q - 1.0) * t.powf(q - 2.0),
        3 => -alpha * q * (q - 1.0) * (q - 2.0) * t.powf(q - 3.0),
        _ => return Err(domain(format!("derivative order {order} > 3"))),
    })
}

/// `(r^q - 1)/(r - 1)` written in terms of `u = r - 1`, accurate for tiny `u`.
fn power_quotient(q: f64, u: f64) -> f64 {
    if u == 0.0 {
        q
    } else {
        (q * u.ln_1p()).exp_m1() / u
    }
}

/// A closed phase-plane oval: the component of `{f > 0}` between the roots
/// `x0 < x1`, with `xhat` the maximum of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oval {
    pub q: f64,
    pub alpha: f64,
    pub x0: f64,
    pub xhat: f64,
    pub x1: f64,
}

/// Selects a member of the `g` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFamily {
    /// `g = psi^2 / t^(q-3)`
    G,
    /// `g1 = 2 psi' t - (q-3) psi`, the sign-carrying factor of `g'`
    G1,
    /// `g2 = 2 f' t + (q-1) f`, the sign-carrying factor of `g1'`
    G2,
}

impl Oval {
    /// Turning points of the oval for `0 < alpha < alpha*(q)`.
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        let a_star = alpha_star(q)?;
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if alpha >= a_star * (1.0 - DEGENERACY_GUARD) {
            return Err(Error::Degenerate {
                alpha,
                alpha_star: a_star,
                x_star: x_star(q)?,
            });
        }
        let xhat = (2.0 / (q * alpha)).powf(1.0 / (q - 2.0));
        let mut upper = (2.0 * xhat).max(2.0 * x_star(q)?);
        if !upper.is_finite() {
            return Err(domain(format!(
                "oval for q = {q}, alpha = {alpha} exceeds double-precision range"
            )));
        }
        let fdf = |t: f64| {
            (
                t * t - 1.0 - alpha * t.powf(q),
                2.0 * t - alpha * q * t.powf(q - 1.0),
            )
        };
        while fdf(upper).0 >= 0.0 {
            upper *= 2.0;
            if !upper.is_finite() {
                return Err(domain("upper bracket for x1 overflowed"));
            }
        }
        let ftol = |t: f64| 1e-14 * (t * t).max(1.0);
        let x0 = newton_bisect(fdf, 1.0, xhat, ftol, 1e-15)?;
        let x1 = newton_bisect(fdf, xhat, upper, ftol, 1e-15)?;
        let oval = Oval {
            q,
            alpha,
            x0,
            xhat,
            x1,
        };
        for x in [x0, x1] {
            if oval.f(x).abs() > 1e-12 * x * x {
                return Err(Error::Consistency(format!(
                    "root residual f({x}) = {} too large",
                    oval.f(x)
                )));
            }
        }
        if !(1.0 < x0 && x0 < xhat && xhat < x1) {
            return Err(Error::Consistency(format!(
                "turning points out of order: {x0}, {xhat}, {x1}"
            )));
        }
        Ok(oval)
    }

    pub fn f(&self, t: f64) -> f64 {
        t * t - 1.0 - self.alpha * t.powf(self.q)
    }

    pub fn df(&self, t: f64) -> f64 {
        2.0 * t - self.alpha * self.q * t.powf(self.q - 1.0)
    }

    pub fn d2f(&self, t: f64) -> f64 {
        2.0 - self.alpha * self.q * (self.q - 1.0) * t.powf(self.q - 2.0)
    }

    pub fn d3f(&self, t: f64) -> f64 {
        -self.alpha * self.q * (self.q - 1.0) * (self.q - 2.0) * t.powf(self.q - 3.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Point of the oval at phase `theta` in `[0, pi/2]` under
    /// `t = x0 + (x1 - x0) sin^2(theta)`, together with the smooth factor
    /// `h(t) = f(t) / ((t - x0)(x1 - t))`.
    ///
    /// `h` is formed from divided differences anchored at the nearer root, so
    /// it stays accurate right up to the endpoints where `f` itself is lost
    /// to cancellation.
    pub fn phase_point(&self, theta: f64) -> PhasePoint {
        let w = self.width();
        let (s, c) = theta.sin_cos();
        let near = w * s * s;
        let far = w * c * c;
        let q = self.q;
        if near <= far {
            let t = self.x0 + near;
            let d0 = (t + self.x0)
                - self.alpha * self.x0.powf(q - 1.0) * power_quotient(q, near / self.x0);
            PhasePoint {
                t,
                from_x0: near,
                to_x1: far,
                h: d0 / far,
            }
        } else {
            let t = self.x1 - far;
            let d1 = (t + self.x1)
                - self.alpha * self.x1.powf(q - 1.0) * power_quotient(q, -far / self.x1);
            PhasePoint {
                t,
                from_x0: near,
                to_x1: far,
                h: -d1 / near,
            }
        }
    }

    fn check_inside(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * self.x1;
        if t < self.x0 - slack || t > self.x1 + slack || !t.is_finite() {
            return Err(domain(format!(
                "t = {t} outside the oval [{}, {}]",
                self.x0, self.x1
            )));
        }
        Ok(())
    }

    /// `psi = f'^2 - 2 f f''`, positive on `[x0, x1]`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        self.check_inside(t)?;
        Ok(self.psi_unchecked(t))
    }

    fn psi_unchecked(&self, t: f64) -> f64 {
        let d = self.df(t);
        d * d - 2.0 * self.f(t) * self.d2f(t)
    }

    /// `psi' = -2 f f'''`.
    pub fn dpsi(&self, t: f64) -> Result<f64> {
        self.check_inside(t)?;
        Ok(-2.0 * self.f(t) * self.d3f(t))
    }

    pub fn g_family(&self, t: f64, which: GFamily) -> Result<f64> {
        self.check_inside(t)?;
        let q = self.q;
        Ok(match which {
            GFamily::G => {
                let p = self.psi_unchecked(t);
                p * p / t.powf(q - 3.0)
            }
            GFamily::G1 => {
                let dpsi = -2.0 * self.f(t) * self.d3f(t);
                2.0 * dpsi * t - (q - 3.0) * self.psi_unchecked(t)
            }
            GFamily::G2 => 2.0 * self.df(t) * t + (q - 1.0) * self.f(t),
        })
    }

    /// `g'(t) = psi(t) / t^(q-2) * g1(t)`.
    pub fn dg(&self, t: f64) -> Result<f64> {
        let g1 = self.g_family(t, GFamily::G1)?;
        Ok(self.psi_unchecked(t) / t.powf(self.q - 2.0) * g1)
    }
}

/// A point on an oval in phase coordinates; see [`Oval::phase_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    /// `t - x0`, computed without cancellation.
    pub from_x0: f64,
    /// `x1 - t`, computed without cancellation.
    pub to_x1: f64,
    pub h: f64,
}

impl PhasePoint {
    /// `f(t) = (t - x0)(x1 - t) h(t)`.
    pub fn f(&self) -> f64 {
        self.from_x0 * self.to_x1 * self.h
    }
}

/// Which closed-form family to evaluate: `beta_j` describes `g(x_k)` and its
/// `alpha`-derivatives at the roots, `gamma_j` the same at `xhat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Beta,
    Gamma,
}

/// `beta_j(t)` or `gamma_j(t)` for `j = 0..=3`.
///
/// The normalisations are the ones that make `beta(x_k) = g(x_k)` and
/// `gamma(xhat) = g(xhat)` hold exactly and make each order the
/// `alpha`-derivative of the previous one along the corresponding turning
/// point.
pub fn beta_gamma(q: f64, t: f64, family: Family, order: u8) -> Result<f64> {
    let q = Exponent::new(q)?.get();
    if !(t > 0.0) {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    let t2 = t * t;
    let t4 = t2 * t2;
    let qm2 = q - 2.0;
    let u = qm2 * t2 - q;
    Ok(match (family, order) {
        (Family::Beta, 0) => u.powi(4) / t.powf(q + 1.0),
        (Family::Beta, 1) => u * u / t * (qm2 * (q - 7.0) * t2 - q * (q + 1.0)),
        (Family::Beta, 2) => {
            -t.powf(q - 1.0)
                * (5.0 * (q - 7.0) * qm2 * qm2 * t4
                    - 4.0 * q * (q - 1.0) * qm2 * t2
                    - q * q * (q + 1.0))
        }
        (Family::Beta, 3) => {
            if u.abs() <= 1e-12 * q {
                return Err(Error::Singularity(format!(
                    "beta_3 has a pole at t = x* (t = {t}, q = {q})"
                )));
            }
            t.powf(2.0 * q - 1.0) / u
                * (5.0 * (q + 3.0) * (q - 7.0) * qm2 * qm2 * t4
                    - 4.0 * q * (q - 1.0) * qm2 * (q + 1.0) * t2
                    - q * q * (q - 1.0) * (q + 1.0))
        }
        (Family::Gamma, 0) => {
            let c = 4.0 * qm2 / q;
            c * c * u * u / t.powf(q - 3.0)
        }
        (Family::Gamma, 1) => {
            8.0 * qm2 * t / q * u * (qm2 * (q - 7.0) * t2 - q * (q - 3.0))
        }
        (Family::Gamma, 2) => {
            -4.0 * t.powf(q - 1.0)
                * (5.0 * (q - 7.0) * qm2 * qm2 * t4 - 6.0 * q * qm2 * (q - 5.0) * t2
                    + q * q * (q - 3.0))
        }
        (Family::Gamma, 3) => {
            2.0 * q * t.powf(2.0 * q - 3.0) / qm2
                * (5.0 * (q + 3.0) * (q - 7.0) * qm2 * qm2 * t4
                    - 6.0 * q * qm2 * (q - 5.0) * (q + 1.0) * t2
                    + q * q * (q - 1.0) * (q - 3.0))
        }
        (_, j) => return Err(domain(format!("family order {j} > 3"))),
    })
}

/// `d x_k / d alpha` at a root, as a function of the root position alone.
pub fn root_velocity(q: f64, t: f64) -> f64 {
    t.powf(q + 1.0) / (q - (q - 2.0) * t * t)
}

/// `d xhat / d alpha` as a function of `xhat`.
pub fn peak_velocity(q: f64, t: f64) -> f64 {
    -q * t.powf(q - 1.0) / (2.0 * (q - 2.0))
}

/// Ratio `xhat / x1` expressed through `z = x1 sqrt((q-2)/q)`.
pub fn tau(z: f64, q: f64) -> Result<f64> {
    let q = Exponent::new(q)?.get();
    if !(z >= 1.0) {
        return Err(domain(format!("tau needs z >= 1, got {z}")));
    }
    let z2 = z * z;
    Ok((2.0 * z2 / (z2 * q - (q - 2.0))).powf(1.0 / (q - 2.0)))
}

/// Numerator polynomial `P(z, q)` of `gamma_3(x1)/beta_3(x1) - 1`.
pub fn p_poly(z: f64, q: f64) -> f64 {
    let z2 = z * z;
    let z4 = z2 * z2;
    -5.0 * (2.0 * q - 1.0) * (7.0 - q) * (q + 3.0) * z4 * z2
        - 2.0 * (q + 2.0) * (11.0 * q * q - 68.0 * q + 1.0) * z4
        + (14.0 * q.powi(3) - 55.0 * q * q - 54.0 * q - 1.0) * z2
        - 2.0 * q * (q - 1.0) * (q - 3.0)
}

/// `dP/dz`.
pub fn p_poly_dz(z: f64, q: f64) -> f64 {
    let z2 = z * z;
    -30.0 * (2.0 * q - 1.0) * (7.0 - q) * (q + 3.0) * z2 * z2 * z
        - 8.0 * (q + 2.0) * (11.0 * q * q - 68.0 * q + 1.0) * z2 * z
        + 2.0 * (14.0 * q.powi(3) - 55.0 * q * q - 54.0 * q - 1.0) * z
}

/// Denominator of `gamma_3(x1)/beta_3(x1) - 1` as a function of `z`.
pub fn p_denominator(z: f64, q: f64) -> f64 {
    let z2 = z * z;
    z2 * (5.0 * z2 * z2 * (q * q - 4.0 * q - 21.0) - (4.0 * z2 + 1.0) * (q * q - 1.0))
}

/// Numerator polynomial `Q(z, q, tau)` of `gamma_1(tau x1)/beta_1(x1) - 1`.
pub fn q_poly(z: f64, q: f64, tau: f64) -> f64 {
    let z2 = z * z;
    let z4 = z2 * z2;
    -(7.0 - q) * (q - 8.0 * tau.powi(5)) * z4 * z2
        + (q * (13.0 - 3.0 * q) - 16.0 * tau.powi(3) * (5.0 - q)) * z4
        + (q * (3.0 * q - 5.0) - 8.0 * tau * (q - 3.0)) * z2
        - q * (q + 1.0)
}

/// `dQ/dq`.
pub fn q_poly_dq(z: f64, q: f64, tau: f64) -> f64 {
    let z2 = z * z;
    let z4 = z2 * z2;
    (2.0 * q - 7.0 - 8.0 * tau.powi(5)) * z4 * z2
        + (13.0 - 6.0 * q + 16.0 * tau.powi(3)) * z4
        + (6.0 * q - 5.0 - 8.0 * tau) * z2
        - (2.0 * q + 1.0)
}

/// Closed form of `dQ/dq` at `q = 4`:
/// `-8 tau z^2 (tau^2 z^2 - 1)^2 - (9 - z^2)(z^2 - 1)^2`.
pub fn q_poly_dq_at_4(z: f64, tau: f64) -> f64 {
    let z2 = z * z;
    let a = tau * tau * z2 - 1.0;
    let b = z2 - 1.0;
    -8.0 * tau * z2 * a * a - (9.0 - z2) * b * b
}

/// Denominator of `gamma_1(tau x1)/beta_1(x1) - 1` as a function of `z`.
pub fn q_denominator(z: f64, q: f64) -> f64 {
    let a = z - 1.0;
    let b = z + 1.0;
    q * a * a * b * b * (z * z * (7.0 - q) + (q + 1.0))
}

/// One checkpoint `(z_k, tau_k)` of the continuation chain: for `z > z_k`
/// the ratio `tau` is below `tau_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEntry {
    pub z: f64,
    pub tau: f64,
}

/// The continuation chain `(z_0, tau_0) .. (z_7, tau_7)`.
pub const CHAIN: [ChainEntry; 8] = [
    ChainEntry { z: 1.15, tau: 0.897 },
    ChainEntry { z: 1.157, tau: 0.894 },
    ChainEntry { z: 1.166, tau: 0.890 },
    ChainEntry { z: 1.177, tau: 0.885 },
    ChainEntry { z: 1.194, tau: 0.878 },
    ChainEntry { z: 1.221, tau: 0.868 },
    ChainEntry { z: 1.271, tau: 0.851 },
    ChainEntry { z: 1.438, tau: 0.815 },
];
