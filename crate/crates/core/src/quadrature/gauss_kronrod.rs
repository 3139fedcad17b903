//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{QuadOptions, QuadResult};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// The error estimate is the rounding floor, so splitting cannot help.
    floored: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Kronrod rule on `[a, b]`; returns `(kronrod, |kronrod - gauss|)`
/// with the difference floored at rounding level.
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let p = panel(f, a, b);
    (p.value, p.error)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = (WGK[7] * fc).abs();
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        k += w * (f1 + f2);
        abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let raw = (h * (k - g)).abs();
    let floor = 50.0 * f64::EPSILON * h.abs() * abs;
    Panel {
        a,
        b,
        value: h * k,
        error: raw.max(floor),
        floored: raw <= floor,
    }
}

pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let first = panel(f, a, b);
    let mut evaluations = 15usize;
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let min_width = 1e-14 * (b - a).abs();
    loop {
        if !total.is_finite() {
            return Err(Error::NonConvergence(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        if err <= opts.target(total) {
            return Ok(QuadResult {
                value: total,
                abs_error_estimate: err,
                evaluations,
            });
        }
        if evaluations + 30 > opts.budget {
            return Err(Error::NonConvergence(format!(
                "Gauss-Kronrod budget of {} evaluations exhausted (error estimate {err:e})",
                opts.budget
            )));
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        if worst.floored {
            return Err(Error::NonConvergence(format!(
                "tolerance {:e} is below the rounding level (error estimate {err:e})",
                opts.target(total)
            )));
        }
        if (worst.b - worst.a).abs() < min_width {
            return Err(Error::NonConvergence(format!(
                "panel width underflow near {} (error estimate {err:e})",
                worst.a
            )));
        }
        let m = 0.5 * (worst.a + worst.b);
        let left = panel(f, worst.a, m);
        let right = panel(f, m, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // resum occasionally so the running totals do not drift
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // K15 integrates degree-22 polynomials exactly
        let (v, _) = gk15(&|x: f64| x.powi(20) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_peaked_integrand() {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, budget: 100_000 };
        let r = integrate(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &opts).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-11 * exact, "{} vs {exact}", r.value);
        assert!(r.abs_error_estimate <= 1e-12 * exact);
    }

    #[test]
    fn budget_exhaustion_reports_non_convergence() {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 0.0, budget: 60 };
        let r = integrate(&|x: f64| x.abs().sqrt(), -1.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
