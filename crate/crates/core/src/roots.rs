//! Safeguarded scalar root finding: Newton steps that are accepted only while
//! they stay inside a sign-changing bracket, with bisection otherwise.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs. `fdf` returns `(f(x), f'(x))`.
///
/// Stops once `|f(x)| <= ftol(x)` or the bracket is narrower than
/// `xtol * max(1, |x|)`.
pub fn newton_bisect<F, T>(mut fdf: F, mut lo: f64, mut hi: f64, ftol: T, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
    T: Fn(f64) -> f64,
{
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NonConvergence(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})"
        )));
    }
    // orient so that f(lo) < 0 < f(hi)
    let increasing = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx.abs() <= ftol(x) {
            return Ok(x);
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= xtol * x.abs().max(1.0) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        x = if dfx != 0.0 && newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence(format!(
        "newton-bisection exhausted {MAX_ITER} iterations near x = {x}"
    )))
}

/// Plain bisection for a monotone function. Returns the midpoint once
/// `|f| <= ftol` or the bracket shrinks below `xtol`. When the bracket spans
/// several orders of magnitude the split point is the geometric mean.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, ftol: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::NonConvergence(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    let increasing = flo < 0.0;
    for _ in 0..4 * MAX_ITER {
        let mid = if lo > 0.0 && hi / lo > 2.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let fm = f(mid)?;
        if fm.abs() <= ftol || (hi - lo) <= xtol * mid.abs() {
            return Ok(mid);
        }
        if (fm < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence("bisection iteration limit".into()))
}
