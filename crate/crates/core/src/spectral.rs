//! Periodic-grid helpers: trapezoid sums and FFT differentiation.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// `int f dx` over one period from `n` equispaced samples.
pub(crate) fn periodic_sum(samples: &[f64], period: f64) -> f64 {
    period / samples.len() as f64 * samples.iter().sum::<f64>()
}

/// Derivative of a periodic function from equispaced samples over `period`.
/// The Nyquist mode of an even-length grid is dropped.
pub(crate) fn derivative(samples: &[f64], period: f64) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&y| Complex64::new(y, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 * PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        let m = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, m * scale);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}
