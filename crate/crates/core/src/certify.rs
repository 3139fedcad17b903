//! Grid-based certificates for the inequalities behind the monotonicity of
//! `I_q(alpha)`.
//!
//! Every check is an inequality `slack > 0`. A report keeps the smallest
//! slack seen (the margin) and the point where it occurred. Agreement checks
//! against a tolerance use `1 - error / tolerance` as their slack.
//! Certificates are not proofs; refining a grid and re-running is the guard
//! against features that fall between grid points.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};
use crate::par::{linspace, Exec};
use crate::phase_plane::{
    alpha_star, beta_gamma, p_denominator, p_poly, p_poly_dz, q_poly, q_poly_dq,
    q_poly_dq_at_4, tau, x_star, Family, GFamily, Oval, CHAIN,
};
use crate::quadrature::{self, QuadOptions};
use crate::roots::bisect;

/// Values with magnitude at or below this do not count as a sign.
pub const SIGN_THRESHOLD: f64 = 1e-12;
/// Maximum number of local halvings used to move off a near-zero sample.
pub const MAX_REFINE_LEVELS: u32 = 12;
/// Crossings of `g1` are isolated to this fraction of `x1 - x0`.
pub const CROSSING_RESOLUTION: f64 = 1e-6;
/// Relative agreement required between expanded and factored polynomials.
pub const FACTOR_REL_TOL: f64 = 1e-5;
/// Agreement required between computed and printed real roots.
pub const ROOT_TOL: f64 = 1e-6;

/// A labelled grid point and the slack observed there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<(&'static str, f64)>,
    pub value: f64,
}

/// Outcome of one certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub name: String,
    pub passed: bool,
    /// Smallest slack encountered; positive iff the certificate holds.
    pub margin: f64,
    /// Number of individual inequalities evaluated.
    pub checks: usize,
    /// Points at the extremal slack, plus any located crossings.
    pub witnesses: Vec<Witness>,
    pub grid_spec: String,
    /// Sub-certificates of a composite report.
    pub parts: Vec<CertificateReport>,
}

impl CertificateReport {
    fn from_tracker(name: impl Into<String>, grid_spec: impl Into<String>, t: Tracker) -> Self {
        let margin = t.margin;
        CertificateReport {
            name: name.into(),
            passed: margin > 0.0,
            margin,
            checks: t.checks,
            witnesses: t.witness.into_iter().chain(t.extra).collect(),
            grid_spec: grid_spec.into(),
            parts: Vec::new(),
        }
    }

    /// Combines sub-reports; passes iff every part passes.
    pub fn composite(
        name: impl Into<String>,
        grid_spec: impl Into<String>,
        parts: Vec<CertificateReport>,
    ) -> Self {
        let worst = parts
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin));
        let margin = worst.map_or(f64::INFINITY, |p| p.margin);
        let witnesses = worst.map_or_else(Vec::new, |p| p.witnesses.clone());
        CertificateReport {
            name: name.into(),
            passed: !parts.is_empty() && parts.iter().all(|p| p.passed),
            margin,
            checks: parts.iter().map(|p| p.checks).sum(),
            witnesses,
            grid_spec: grid_spec.into(),
            parts,
        }
    }
}

/// Running minimum of slacks.
#[derive(Debug, Clone, Default)]
struct Tracker {
    margin: f64,
    checks: usize,
    witness: Option<Witness>,
    extra: Vec<Witness>,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            margin: f64::INFINITY,
            ..Default::default()
        }
    }

    fn check(&mut self, point: &[(&'static str, f64)], slack: f64) {
        self.checks += 1;
        // an unevaluable check fails with the most negative finite slack
        let slack = if slack.is_nan() { f64::MIN } else { slack.max(f64::MIN) };
        if slack < self.margin || self.witness.is_none() {
            self.margin = self.margin.min(slack);
            self.witness = Some(Witness {
                point: point.to_vec(),
                value: slack,
            });
        }
    }

    fn merge(&mut self, other: Tracker) {
        self.checks += other.checks;
        if other.margin < self.margin || self.witness.is_none() {
            self.margin = self.margin.min(other.margin);
            self.witness = other.witness;
        }
        self.extra.extend(other.extra);
    }
}

/// Runs `cell` over `items` with `exec` and merges in grid order.
fn sweep<T, F>(items: &[T], exec: Exec, cell: F) -> Result<Tracker>
where
    T: Sync,
    F: Fn(&T) -> Result<Tracker> + Sync + Send,
{
    let mut total = Tracker::new();
    for r in exec.map(items, cell) {
        total.merge(r?);
    }
    Ok(total)
}

/// A rectangular `(q, alpha/alpha*)` grid with endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub q_range: (f64, f64),
    pub q_steps: usize,
    pub ratio_range: (f64, f64),
    pub ratio_steps: usize,
}

impl ParamGrid {
    /// Default grid for the sign-pattern certificate (`q > 3`).
    pub fn lemma22_default() -> Self {
        ParamGrid {
            q_range: (3.05, 4.0),
            q_steps: 20,
            ratio_range: (0.05, 0.99),
            ratio_steps: 20,
        }
    }

    /// Default grid for the monotone-`g` certificate (`q <= 3`).
    pub fn monotone_default() -> Self {
        ParamGrid {
            q_range: (2.2, 3.0),
            q_steps: 9,
            ratio_range: (0.05, 0.99),
            ratio_steps: 20,
        }
    }

    /// Default grid for the ordering certificate.
    pub fn lemma23_default() -> Self {
        ParamGrid {
            q_range: (3.0, 4.0),
            q_steps: 20,
            ratio_range: (0.05, 0.99),
            ratio_steps: 20,
        }
    }

    /// Grid with `factor` times the density; every original node is kept.
    pub fn refined(&self, factor: usize) -> Self {
        let f = factor.max(1);
        ParamGrid {
            q_steps: refine_steps(self.q_steps, f),
            ratio_steps: refine_steps(self.ratio_steps, f),
            ..*self
        }
    }

    /// Grid nodes as `(q, alpha)`, `q` outermost.
    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        let (rlo, rhi) = self.ratio_range;
        if !(rlo > 0.0 && rhi < 1.0 && rlo <= rhi) {
            return Err(domain(format!(
                "alpha/alpha* range must lie in (0, 1), got [{rlo}, {rhi}]"
            )));
        }
        let mut out = Vec::with_capacity(self.q_steps * self.ratio_steps);
        for q in linspace(self.q_range.0, self.q_range.1, self.q_steps) {
            let a_star = alpha_star(q)?;
            for r in linspace(rlo, rhi, self.ratio_steps) {
                out.push((q, r * a_star));
            }
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        format!(
            "q in [{}, {}] x {} , alpha/alpha* in [{}, {}] x {}",
            self.q_range.0,
            self.q_range.1,
            self.q_steps,
            self.ratio_range.0,
            self.ratio_range.1,
            self.ratio_steps
        )
    }
}

fn refine_steps(n: usize, factor: usize) -> usize {
    if n <= 1 {
        n
    } else {
        (n - 1) * factor + 1
    }
}

/// `q` values of the default monotonicity grid.
pub const MAIN_LEMMA_Q: [f64; 5] = [2.2, 2.5, 3.0, 3.5, 4.0];
/// `alpha` samples per `q` in the default monotonicity grid.
pub const MAIN_LEMMA_ALPHA_DENSITY: usize = 50;
const MAIN_LEMMA_RATIO: (f64, f64) = (0.02, 0.98);
const MAIN_LEMMA_TOL: f64 = 1e-11;

/// `dI/dalpha < 0`, `I > pi/sqrt(q-2)` and `I` strictly decreasing along
/// `alpha_density` values of `alpha/alpha*` in `[0.02, 0.98]` for each `q`.
///
/// Points with `q > 4` are checked at their dual exponent `2q/(q-2) < 4`;
/// the duality map is increasing in `alpha`, so signs carry over.
pub fn certify_main_lemma(q_grid: &[f64], alpha_density: usize, exec: Exec) -> Result<CertificateReport> {
    if q_grid.is_empty() || alpha_density == 0 {
        return Err(domain("monotonicity certificate needs a nonempty grid"));
    }
    for &q in q_grid {
        alpha_star(q)?;
    }
    let tracker = sweep(q_grid, exec, |&q| main_lemma_column(q, alpha_density))?;
    let spec = format!(
        "q in {:?}, {} values of alpha/alpha* in [{}, {}]",
        q_grid, alpha_density, MAIN_LEMMA_RATIO.0, MAIN_LEMMA_RATIO.1
    );
    Ok(CertificateReport::from_tracker("main_lemma", spec, tracker))
}

fn main_lemma_column(q: f64, density: usize) -> Result<Tracker> {
    let (qe, map): (f64, Box<dyn Fn(f64) -> f64>) = if q > 4.0 {
        let qd = 2.0 * q / (q - 2.0);
        (qd, Box::new(move |a: f64| a.powf(2.0 / (q - 2.0))))
    } else {
        (q, Box::new(|a| a))
    };
    let a_star = alpha_star(q)?;
    let limit = quadrature::period_limit(qe)?;
    let opts = QuadOptions::absolute(MAIN_LEMMA_TOL);
    let mut t = Tracker::new();
    let mut prev: Option<(f64, f64)> = None;
    for r in linspace(MAIN_LEMMA_RATIO.0, MAIN_LEMMA_RATIO.1, density) {
        let alpha = r * a_star;
        let ae = map(alpha);
        let point = [("q", q), ("alpha", alpha)];
        let i = quadrature::period_integral_with(qe, ae, &opts)?;
        let d = quadrature::period_integral_deriv_with(qe, ae, &opts)?;
        t.check(&point, -d.value - d.abs_error_estimate);
        t.check(&point, i.value - limit - i.abs_error_estimate);
        if let Some((pv, pe)) = prev {
            t.check(&point, pv - i.value - pe - i.abs_error_estimate);
        }
        prev = Some((i.value, i.abs_error_estimate));
    }
    Ok(t)
}

/// Phase samples per oval in the sign-pattern certificates.
pub const DEFAULT_PHASE_SAMPLES: usize = 256;

/// Sign pattern of `g'` on one oval with `q > 3`: `g'(x0) < 0`,
/// `g'(xhat) > 0`, `g'(x1) < 0`, and `g1` changes sign exactly twice.
pub fn certify_lemma22(q: f64, alpha: f64) -> Result<CertificateReport> {
    certify_lemma22_with(q, alpha, DEFAULT_PHASE_SAMPLES)
}

pub fn certify_lemma22_with(q: f64, alpha: f64, samples: usize) -> Result<CertificateReport> {
    let t = lemma22_cell(q, alpha, samples)?;
    let spec = format!("q = {q}, alpha = {alpha}, {samples} phase samples");
    Ok(CertificateReport::from_tracker("lemma22", spec, t))
}

fn lemma22_cell(q: f64, alpha: f64, samples: usize) -> Result<Tracker> {
    if !(q > 3.0) {
        return Err(domain(format!("sign-pattern certificate needs q > 3, got {q}")));
    }
    if samples < 4 {
        return Err(domain("at least 4 phase samples are needed"));
    }
    let oval = Oval::new(q, alpha)?;
    let point = |t: f64| [("q", q), ("alpha", alpha), ("t", t)];
    let mut tr = Tracker::new();
    tr.check(&point(oval.x0), -oval.dg(oval.x0)?);
    tr.check(&point(oval.xhat), oval.dg(oval.xhat)?);
    tr.check(&point(oval.x1), -oval.dg(oval.x1)?);

    let crossings = g1_crossings(&oval, samples)?;
    let count = crossings.len();
    // each sign change more or fewer than two costs one unit of margin
    if count != 2 {
        tr.check(&point(oval.xhat), -((count as f64) - 2.0).abs());
    }
    for c in crossings {
        tr.extra.push(Witness {
            point: point(c).to_vec(),
            value: 0.0,
        });
    }
    Ok(tr)
}

fn g1_at(oval: &Oval, theta: f64) -> Result<f64> {
    oval.g_family(oval.phase_point(theta).t, GFamily::G1)
}

/// Located zeros of `g1` on `[x0, x1]`, in increasing order.
fn g1_crossings(oval: &Oval, samples: usize) -> Result<Vec<f64>> {
    let h = FRAC_PI_2 / samples as f64;
    let mut nodes = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let theta = h * i as f64;
        nodes.push(resolve_sign(oval, theta, h)?);
    }
    let resolution = CROSSING_RESOLUTION * oval.width();
    let mut out = Vec::new();
    for w in nodes.windows(2) {
        let ((ta, va), (tb, vb)) = (w[0], w[1]);
        if va.signum() == vb.signum() {
            continue;
        }
        let (mut lo, mut hi) = (ta, tb);
        let increasing = va < 0.0;
        for _ in 0..200 {
            if oval.phase_point(hi).t - oval.phase_point(lo).t <= resolution {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v = g1_at(oval, mid)?;
            if v.abs() <= SIGN_THRESHOLD {
                lo = mid;
                hi = mid;
                break;
            }
            if (v < 0.0) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (tl, th) = (oval.phase_point(lo).t, oval.phase_point(hi).t);
        if th - tl > resolution {
            return Err(Error::Inconclusive(format!(
                "crossing of g1 near t = {tl} not isolated to {resolution:e}"
            )));
        }
        out.push(0.5 * (tl + th));
    }
    Ok(out)
}

/// Sample of `g1` at or near `theta` whose magnitude exceeds the sign
/// threshold, moving by `h/2, h/4, ...` if necessary.
fn resolve_sign(oval: &Oval, theta: f64, h: f64) -> Result<(f64, f64)> {
    let v = g1_at(oval, theta)?;
    if v.abs() > SIGN_THRESHOLD {
        return Ok((theta, v));
    }
    let mut d = h;
    for _ in 0..MAX_REFINE_LEVELS {
        d *= 0.5;
        for s in [theta + d, theta - d] {
            if (0.0..=FRAC_PI_2).contains(&s) {
                let v = g1_at(oval, s)?;
                if v.abs() > SIGN_THRESHOLD {
                    return Ok((s, v));
                }
            }
        }
    }
    Err(Error::Inconclusive(format!(
        "g1 vanishes to within {SIGN_THRESHOLD:e} around t = {} at every refinement level",
        oval.phase_point(theta).t
    )))
}

/// For `2 < q <= 3`: `g1 > 0` strictly inside `(x0, x1)`, so `g` increases.
pub fn certify_g_monotone(q: f64, alpha: f64) -> Result<CertificateReport> {
    certify_g_monotone_with(q, alpha, DEFAULT_PHASE_SAMPLES)
}

pub fn certify_g_monotone_with(q: f64, alpha: f64, samples: usize) -> Result<CertificateReport> {
    let t = monotone_cell(q, alpha, samples)?;
    let spec = format!("q = {q}, alpha = {alpha}, {samples} interior phase samples");
    Ok(CertificateReport::from_tracker("g_monotone", spec, t))
}

fn monotone_cell(q: f64, alpha: f64, samples: usize) -> Result<Tracker> {
    if !(q > 2.0 && q <= 3.0) {
        return Err(domain(format!("monotone-g certificate needs 2 < q <= 3, got {q}")));
    }
    if samples < 2 {
        return Err(domain("at least 2 phase samples are needed"));
    }
    let oval = Oval::new(q, alpha)?;
    let h = FRAC_PI_2 / samples as f64;
    let mut tr = Tracker::new();
    for i in 1..samples {
        let theta = h * i as f64;
        let t = oval.phase_point(theta).t;
        tr.check(&[("q", q), ("alpha", alpha), ("t", t)], g1_at(&oval, theta)?);
    }
    Ok(tr)
}

/// `g(x0) < g(xhat) < g(x1)` at one `(q, alpha)` with `3 <= q <= 4`.
pub fn certify_lemma23(q: f64, alpha: f64) -> Result<CertificateReport> {
    let t = lemma23_cell(q, alpha)?;
    Ok(CertificateReport::from_tracker(
        "lemma23",
        format!("q = {q}, alpha = {alpha}"),
        t,
    ))
}

fn lemma23_cell(q: f64, alpha: f64) -> Result<Tracker> {
    if !(3.0..=4.0).contains(&q) {
        return Err(domain(format!("ordering certificate needs 3 <= q <= 4, got {q}")));
    }
    let oval = Oval::new(q, alpha)?;
    let g0 = oval.g_family(oval.x0, GFamily::G)?;
    let gh = oval.g_family(oval.xhat, GFamily::G)?;
    let g1 = oval.g_family(oval.x1, GFamily::G)?;
    let mut tr = Tracker::new();
    let p = [("q", q), ("alpha", alpha)];
    tr.check(&p, gh - g0);
    tr.check(&p, g1 - gh);
    Ok(tr)
}

pub fn certify_lemma22_grid(grid: &ParamGrid, samples: usize, exec: Exec) -> Result<CertificateReport> {
    let pts = grid.points()?;
    let t = sweep(&pts, exec, |&(q, a)| lemma22_cell(q, a, samples))?;
    let spec = format!("{}, {samples} phase samples", grid.describe());
    Ok(CertificateReport::from_tracker("lemma22", spec, t))
}

pub fn certify_g_monotone_grid(grid: &ParamGrid, samples: usize, exec: Exec) -> Result<CertificateReport> {
    let pts = grid.points()?;
    let t = sweep(&pts, exec, |&(q, a)| monotone_cell(q, a, samples))?;
    let spec = format!("{}, {samples} phase samples", grid.describe());
    Ok(CertificateReport::from_tracker("g_monotone", spec, t))
}

pub fn certify_lemma23_grid(grid: &ParamGrid, exec: Exec) -> Result<CertificateReport> {
    let pts = grid.points()?;
    let t = sweep(&pts, exec, |&(q, a)| lemma23_cell(q, a))?;
    Ok(CertificateReport::from_tracker("lemma23", grid.describe(), t))
}

/// A printed factorization `c * prod(linear) * prod(quadratic)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factored {
    pub lead: f64,
    /// Real roots `r` of the linear factors `x - r`.
    pub roots: &'static [f64],
    /// `(b, c)` of the quadratic factors `x^2 + b x + c`.
    pub quadratics: &'static [(f64, f64)],
}

impl Factored {
    pub fn eval(&self, x: f64) -> f64 {
        self.lead
            * self.roots.iter().map(|r| x - r).product::<f64>()
            * self.quadratics.iter().map(|(b, c)| x * x + b * x + c).product::<f64>()
    }

    /// Size of the terms in the product, used as the scale for relative
    /// comparison so that agreement near roots is not over-weighted.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.lead.abs()
            * self.roots.iter().map(|r| ax + r.abs()).product::<f64>()
            * self
                .quadratics
                .iter()
                .map(|(b, c)| ax * ax + b.abs() * ax + c.abs())
                .product::<f64>()
    }
}

/// `P(1.15, q)` as a polynomial in `q`.
pub const P_AT_Z0: Factored = Factored {
    lead: 1.16747016,
    roots: &[-5.796999289, 4.076622243, 8.501415029],
    quadratics: &[],
};

/// `Q(z, 3, 0.897)` as a polynomial in `z`.
pub const Q_AT_TAU0: Factored = Factored {
    lead: 6.582844536,
    roots: &[-1.157682736, 1.157682736],
    quadratics: &[(1.636399020, 1.166257009), (-1.636399020, 1.166257009)],
};

/// `Q(z, 3, 0.894)` as a polynomial in `z`.
pub const Q_AT_TAU1: Factored = Factored {
    lead: 6.274166280,
    roots: &[-1.166008256, 1.166008256],
    quadratics: &[(1.656562646, 1.186071814), (-1.656562646, 1.186071814)],
};

/// `Q(z, 3, 0.815)` as a polynomial in `z`, negative for every real `z`.
pub const Q_AT_TAU7: Factored = Factored {
    lead: -0.493638296,
    roots: &[],
    quadratics: &[
        (0.0, 12.82622204),
        (2.190075689, 1.376692112),
        (-2.190075689, 1.376692112),
    ],
};

/// Same as [`Q_AT_TAU7`] with the constants `12.72622203` and
/// `2.170075688` found in the printed display, kept to show that they do
/// not reproduce `Q`.
pub const Q_AT_TAU7_PRINTED: Factored = Factored {
    lead: -0.493638296,
    roots: &[],
    quadratics: &[
        (0.0, 12.72622203),
        (2.170075688, 1.376692111),
        (-2.170075688, 1.376692111),
    ],
};

const FACTOR_SAMPLES: usize = 25;
const Z_MAX: f64 = 20.0;

fn factor_check(
    tr: &mut Tracker,
    label: &'static str,
    form: &Factored,
    expanded: impl Fn(f64) -> f64,
    range: (f64, f64),
    samples: usize,
) {
    for x in linspace(range.0, range.1, samples) {
        let rel = (expanded(x) - form.eval(x)).abs() / form.magnitude(x);
        tr.check(&[(label, x)], 1.0 - rel / FACTOR_REL_TOL);
    }
}

/// Real roots of `expanded` near each printed root, bracketed within
/// `1e-3` and refined by bisection.
fn root_check(tr: &mut Tracker, label: &'static str, form: &Factored, expanded: impl Fn(f64) -> f64) {
    for &r in form.roots {
        let found = bisect(|x| Ok(expanded(x)), r - 1e-3, r + 1e-3, 0.0, 1e-15);
        let slack = match found {
            Ok(x) => 1.0 - (x - r).abs() / ROOT_TOL,
            Err(_) => f64::MIN,
        };
        tr.check(&[(label, r)], slack);
    }
}

/// Sign claims on `P` and `Q` used to stretch `g(xhat) < g(x1)` over all
/// `z >= 1`, with grids scaled by `density`.
pub fn certify_polynomials() -> Result<CertificateReport> {
    certify_polynomials_with(1)
}

pub fn certify_polynomials_with(density: usize) -> Result<CertificateReport> {
    let d = density.max(1);
    let nz = refine_steps(400, d);
    let nq = refine_steps(11, d);
    let zs = linspace(1.0, Z_MAX, nz);
    let qs = linspace(3.0, 4.0, nq);
    let mut parts = Vec::new();

    let mut t = Tracker::new();
    for &q in &qs {
        for &z in &zs {
            t.check(&[("z", z), ("q", q)], -p_denominator(z, q));
        }
    }
    parts.push(CertificateReport::from_tracker(
        "p_denominator_negative",
        format!("z in [1, {Z_MAX}] x {nz}, q in [3, 4] x {nq}"),
        t,
    ));

    let mut t = Tracker::new();
    for &q in &qs {
        t.check(&[("z", 1.0), ("q", q)], p_poly(1.0, q));
        t.check(&[("z", 1.15), ("q", q)], p_poly(1.15, q));
        // dP/dz vanishes at (1, 3), so the grid starts one step past z = 1
        for &z in &zs[1..] {
            t.check(&[("z", z), ("q", q)], -p_poly_dz(z, q));
        }
        // leading z^5 coefficient of dP/dz
        t.check(&[("q", q)], 30.0 * (2.0 * q - 1.0) * (7.0 - q) * (q + 3.0));
    }
    parts.push(CertificateReport::from_tracker(
        "p_positive_decreasing",
        format!("z in (1, {Z_MAX}] x {}, q in [3, 4] x {nq}", nz - 1),
        t,
    ));

    let n = refine_steps(FACTOR_SAMPLES, d);
    let mut t = Tracker::new();
    factor_check(&mut t, "q", &P_AT_Z0, |q| p_poly(1.15, q), (-10.0, 12.0), n);
    factor_check(&mut t, "z", &Q_AT_TAU0, |z| q_poly(z, 3.0, 0.897), (0.0, 3.0), n);
    factor_check(&mut t, "z", &Q_AT_TAU1, |z| q_poly(z, 3.0, 0.894), (0.0, 3.0), n);
    factor_check(&mut t, "z", &Q_AT_TAU7, |z| q_poly(z, 3.0, 0.815), (0.0, Z_MAX), n);
    root_check(&mut t, "q", &P_AT_Z0, |q| p_poly(1.15, q));
    root_check(&mut t, "z", &Q_AT_TAU0, |z| q_poly(z, 3.0, 0.897));
    root_check(&mut t, "z", &Q_AT_TAU1, |z| q_poly(z, 3.0, 0.894));
    parts.push(CertificateReport::from_tracker(
        "factorizations",
        format!("{n} samples per form, relative tolerance {FACTOR_REL_TOL:e}"),
        t,
    ));

    let taus: Vec<f64> = CHAIN.iter().map(|c| c.tau).collect();
    let zs3 = linspace(1.0, 3.0, nz);
    let mut t = Tracker::new();
    for &tau in &taus {
        for &z in &zs {
            let exact = q_poly_dq(z, 4.0, tau);
            let closed = q_poly_dq_at_4(z, tau);
            let scale = 1.0 + exact.abs().max(closed.abs());
            t.check(&[("z", z), ("tau", tau)], 1.0 - (exact - closed).abs() / scale / 1e-10);
        }
        for &z in &zs[1..] {
            // dQ/dq is affine in q, so this difference quotient is exact
            let curvature = q_poly_dq(z, 4.0, tau) - q_poly_dq(z, 3.0, tau);
            t.check(&[("z", z), ("tau", tau)], curvature);
        }
        for &z in &zs3 {
            t.check(&[("z", z), ("tau", tau)], -q_poly_dq_at_4(z, tau));
        }
    }
    parts.push(CertificateReport::from_tracker(
        "q_convex_decreasing",
        format!("tau in chain, z in [1, {Z_MAX}] x {nz}, z <= 3 x {nz}"),
        t,
    ));

    let tau7 = CHAIN[7].tau;
    let mut t = Tracker::new();
    for &z in &zs {
        t.check(&[("z", z)], -q_poly(z, 3.0, tau7));
        t.check(&[("z", z)], -q_poly_dq_at_4(z, tau7));
    }
    // leading z^6 coefficients of Q(., 3, tau7) and of dQ/dq at q = 4
    t.check(&[("z_power", 6.0)], 4.0 * (3.0 - 8.0 * tau7.powi(5)));
    t.check(&[("z_power", 6.0)], 8.0 * tau7.powi(5) - 1.0);
    parts.push(CertificateReport::from_tracker(
        "q_negative_final",
        format!("tau = {tau7}, z in [1, {Z_MAX}] x {nz} plus leading coefficients"),
        t,
    ));

    let mut t = Tracker::new();
    for &q in &qs {
        let xs = x_star(q)?;
        let ts = linspace(xs, 4.0 * xs, nz);
        for fam in [1u8, 3] {
            let mut prev = beta_gamma(q, ts[0], Family::Gamma, fam)?;
            for &x in &ts[1..] {
                let v = beta_gamma(q, x, Family::Gamma, fam)?;
                t.check(&[("q", q), ("t", x), ("order", fam as f64)], prev - v);
                prev = v;
            }
        }
    }
    parts.push(CertificateReport::from_tracker(
        "gamma_decreasing",
        format!("gamma_1, gamma_3 on t in [x*, 4 x*] x {nz}, q in [3, 4] x {nq}"),
        t,
    ));

    Ok(CertificateReport::composite(
        "polynomials",
        format!("density {d}"),
        parts,
    ))
}

/// The continuation chain: for each step `k = 0..6`,
/// `tau(z, q) < tau_k` for `z >= z_k`, `q in [3, 4]`, the largest value
/// being `tau(z_k, 4)`;
/// `tau_k z_k > 1` so `tau_k x1` lies beyond `x*`; `Q(z, 3, tau_k) < 0`
/// and `dQ/dq < 0` on `[z_k, z_{k+1}]`. A last step covers `z >= z_7`.
pub fn certify_chain() -> Result<CertificateReport> {
    certify_chain_with(1)
}

pub fn certify_chain_with(density: usize) -> Result<CertificateReport> {
    let d = density.max(1);
    let nz = refine_steps(2000, d);
    let nq = refine_steps(11, d);
    let qs = linspace(3.0, 4.0, nq);
    let mut parts = Vec::new();
    for k in 0..CHAIN.len() {
        let c = CHAIN[k];
        let z_hi = CHAIN.get(k + 1).map_or(Z_MAX, |n| n.z);
        let mut t = Tracker::new();
        let peak = tau(c.z, 4.0)?;
        t.check(&[("z", c.z), ("q", 4.0)], c.tau - peak);
        t.check(&[("z", c.z)], c.tau * c.z - 1.0);
        for &q in &qs {
            for z in linspace(c.z, Z_MAX, nz) {
                t.check(&[("z", z), ("q", q)], c.tau - tau(z, q)?);
            }
        }
        for z in linspace(c.z, z_hi, nz) {
            t.check(&[("z", z), ("tau", c.tau)], -q_poly(z, 3.0, c.tau));
            t.check(&[("z", z), ("tau", c.tau)], -q_poly_dq_at_4(z, c.tau));
        }
        let name = if k + 1 < CHAIN.len() {
            format!("chain_step_{k}")
        } else {
            "chain_final".to_string()
        };
        parts.push(CertificateReport::from_tracker(
            name,
            format!(
                "z_k = {}, tau_k = {}, z in [{}, {z_hi}] x {nz}, q in [3, 4] x {nq}",
                c.z, c.tau, c.z
            ),
            t,
        ));
    }
    Ok(CertificateReport::composite("chain", format!("density {d}"), parts))
}

/// Which certificates to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    MainLemma,
    Lemma22,
    Lemma23,
    Polynomials,
    Chain,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "all" => Suite::All,
            "main-lemma" | "main_lemma" => Suite::MainLemma,
            "lemma22" => Suite::Lemma22,
            "lemma23" => Suite::Lemma23,
            "polynomials" => Suite::Polynomials,
            "chain" => Suite::Chain,
            _ => return None,
        })
    }
}

/// Runs the selected certificates on their default grids scaled by
/// `density` (1 = default, 2 = twice as fine).
pub fn certify_suite(suite: Suite, density: usize, exec: Exec) -> Result<CertificateReport> {
    let d = density.max(1);
    let samples = DEFAULT_PHASE_SAMPLES * d;
    let main = || {
        certify_main_lemma(
            &MAIN_LEMMA_Q,
            refine_steps(MAIN_LEMMA_ALPHA_DENSITY, d),
            exec,
        )
    };
    let l22 = || -> Result<CertificateReport> {
        Ok(CertificateReport::composite(
            "lemma22",
            "sign pattern for q > 3, monotone g for q <= 3",
            vec![
                certify_lemma22_grid(&ParamGrid::lemma22_default().refined(d), samples, exec)?,
                certify_g_monotone_grid(&ParamGrid::monotone_default().refined(d), samples, exec)?,
            ],
        ))
    };
    let l23 = || certify_lemma23_grid(&ParamGrid::lemma23_default().refined(d), exec);
    match suite {
        Suite::MainLemma => main(),
        Suite::Lemma22 => l22(),
        Suite::Lemma23 => l23(),
        Suite::Polynomials => certify_polynomials_with(d),
        Suite::Chain => certify_chain_with(d),
        Suite::All => Ok(CertificateReport::composite(
            "all",
            format!("density {d}"),
            vec![
                main()?,
                l22()?,
                l23()?,
                certify_polynomials_with(d)?,
                certify_chain_with(d)?,
            ],
        )),
    }
}

/// Runs `suite` at `density` and at twice that density and reports the
/// pair; passes iff both pass.
pub fn certify_refinement(suite: Suite, density: usize, exec: Exec) -> Result<CertificateReport> {
    let d = density.max(1);
    let coarse = certify_suite(suite, d, exec)?;
    let fine = certify_suite(suite, 2 * d, exec)?;
    Ok(CertificateReport::composite(
        "refinement",
        format!("density {d} and {}", 2 * d),
        vec![coarse, fine],
    ))
}
