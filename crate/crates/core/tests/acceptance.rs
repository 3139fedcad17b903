//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! test fails if any criterion fails.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharp_embed::certify::{self, Suite};
use sharp_embed::embedding::{
    destabilization, second_variation_form, sharp_constant, ConstantStatus, EmbeddingParams,
    FourierFunction,
};
use sharp_embed::par::linspace;
use sharp_embed::phase_plane::{alpha_star, p_poly, q_poly, tau};
use sharp_embed::quadrature::{
    duality_residual, elliptic_oracle_q4, period_integral, period_integral_deriv_with,
    period_integral_with, period_limit, QuadOptions,
};
use sharp_embed::roots::bisect;
use sharp_embed::solutions::{
    band_index, count_periodic_solutions, reconstruct_profile, solve_alpha_for_period,
};
use sharp_embed::Exec;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn elliptic_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.05, 0.1, 0.15, 0.2, 0.24] {
        let i = period_integral(4.0, a, 1e-12).map_err(err)?.value;
        let k = elliptic_oracle_q4(a).map_err(err)?;
        let d = (i - k).abs();
        ensure(d <= 1e-8, || format!("alpha = {a}: |I - K| = {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max |I_4 - oracle| = {worst:.2e}"))
}

fn limit_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [2.5, 3.0, 4.0] {
        let a = alpha_star(q).map_err(err)? * (1.0 - 1e-6);
        let i = period_integral(q, a, 1e-12).map_err(err)?.value;
        let d = (i - period_limit(q).map_err(err)?).abs();
        ensure(d <= 1e-3, || format!("q = {q}: |I - pi/sqrt(q-2)| = {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max deviation from limit = {worst:.2e}"))
}

fn main_lemma() -> Outcome {
    let mut points = 0;
    let mut worst_fd: f64 = 0.0;
    for q in [2.2, 2.5, 3.0, 3.5, 4.0] {
        let a_star = alpha_star(q).map_err(err)?;
        for r in linspace(0.02, 0.98, 50) {
            let a = r * a_star;
            let d = period_integral_deriv_with(q, a, &QuadOptions::relative(1e-12))
                .map_err(err)?
                .value;
            ensure(d < 0.0, || format!("dI/dalpha = {d} at q = {q}, alpha = {a}"))?;
            let h = 1e-4 * a;
            let fine = QuadOptions::relative(1e-13);
            let ip = period_integral_with(q, a + h, &fine).map_err(err)?.value;
            let im = period_integral_with(q, a - h, &fine).map_err(err)?.value;
            let fd = (ip - im) / (2.0 * h);
            let rel = (fd - d).abs() / d.abs();
            ensure(rel <= 1e-4, || {
                format!("finite difference off by {rel:e} at q = {q}, alpha = {a}")
            })?;
            worst_fd = worst_fd.max(rel);
            points += 1;
        }
    }
    Ok(format!("{points} points negative, max FD rel. error = {worst_fd:.2e}"))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (q, a) in [(3.0, 0.3), (5.0, 0.1), (6.0, 0.1)] {
        let r = duality_residual(q, a, 1e-13).map_err(err)?;
        ensure(r <= 1e-8, || format!("residual {r:e} at q = {q}, alpha = {a}"))?;
        worst = worst.max(r);
    }
    Ok(format!("max residual = {worst:.2e}"))
}

fn counting() -> Outcome {
    let c = |q, t| count_periodic_solutions(q, t).map_err(err);
    ensure(c(4.0, PI)? == 2, || "count(4, pi) != 2".into())?;
    ensure(c(4.0, 2.0 * PI)? == 3, || "count(4, 2 pi) != 3".into())?;
    ensure(c(3.0, PI)? == 1, || "count(3, pi) != 1".into())?;
    let mut cells = 0;
    for q in linspace(2.05, 12.0, 20) {
        for t in linspace(0.3, 9.0, 10) {
            let n = c(q, t)?;
            let k = band_index(q, t).map_err(err)?;
            ensure(n == k, || format!("count {n} != band {k} at q = {q}, T = {t}"))?;
            cells += 1;
        }
    }
    Ok(format!("fixed cases and {cells}-point grid agree"))
}

fn theorem2_constant() -> Outcome {
    let r = sharp_constant(&EmbeddingParams::new(4.0, 1.0, 1.0).map_err(err)?).map_err(err)?;
    let exact = 2f64.powf(0.25);
    ensure(r.status == ConstantStatus::ExactConstantMinimizer, || {
        format!("status {:?}", r.status)
    })?;
    ensure(r.value == exact, || format!("value {} != 2^(1/4)", r.value))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let t: f64 = rng.gen_range(0.3..3.0);
        let q = rng.gen_range(2.01..=(PI / t).powi(2) + 2.0);
        let s = solve_alpha_for_period(q, t, 1, 1e-10).map_err(err)?;
        ensure(s.is_none(), || format!("root found at q = {q}, T = {t}"))?;
    }
    Ok(format!("lambda_(4,1)(1) = {} and 20 subcritical pairs unsolvable", r.value))
}

fn destabilizing() -> Outcome {
    let mut out = Vec::new();
    for (r, t, q) in [(1.0, PI, 4.0), (1.0, 2.0, 6.0), (2.0, PI, 4.0)] {
        let p = EmbeddingParams::new(q, r, t).map_err(err)?;
        ensure(q > p.threshold(), || format!("q = {q} not above threshold"))?;
        let y = FourierFunction::constant(1.0, t)
            .and_then(|c| c.plus_cosine(1, 0.01))
            .map_err(err)?;
        let j = sharp_embed::embedding::functional_j(&y, q, r, 4096).map_err(err)?;
        ensure(j < 0.0, || format!("J = {j} at (r, T, q) = ({r}, {t}, {q})"))?;
        let d = destabilization(&p, 4096).map_err(err)?;
        ensure(d.j < 0.0, || format!("destabilization J = {}", d.j))?;
        out.push(format!("{j:.3e}"));
    }
    Ok(format!("J = [{}]", out.join(", ")))
}

fn profile_fidelity() -> Outcome {
    let a = solve_alpha_for_period(4.0, PI, 1, 1e-10)
        .map_err(err)?
        .ok_or("no solution for (4, pi, 1)")?;
    let p = reconstruct_profile(4.0, a, 1, PI, 4096).map_err(err)?;
    let d = p.diagnostics();
    ensure(d.period_residual <= 1e-6, || format!("period residual {:e}", d.period_residual))?;
    ensure(d.first_integral_residual <= 1e-6, || {
        format!("first-integral residual {:e}", d.first_integral_residual)
    })?;
    ensure(d.virial_residual <= 1e-5, || format!("virial residual {:e}", d.virial_residual))?;
    ensure(d.rayleigh_quotient < 1.5832335, || {
        format!("Rayleigh quotient {}", d.rayleigh_quotient)
    })?;
    Ok(format!(
        "period {:.1e}, first integral {:.1e}, virial {:.1e}, RQ {:.7}",
        d.period_residual, d.first_integral_residual, d.virial_residual, d.rayleigh_quotient
    ))
}

fn printed_numerics() -> Outcome {
    for (z, want) in [(1.15, 0.8966333519), (1.157, 0.8933635819)] {
        let got = tau(z, 4.0).map_err(err)?;
        ensure((got - want).abs() <= 1e-9, || format!("tau({z}, 4) = {got}"))?;
    }
    let forms = [
        (certify::P_AT_Z0, (-10.0, 12.0), 0usize),
        (certify::Q_AT_TAU0, (0.0, 3.0), 1),
        (certify::Q_AT_TAU1, (0.0, 3.0), 2),
    ];
    let expanded = |which: usize, x: f64| match which {
        0 => p_poly(1.15, x),
        1 => q_poly(x, 3.0, 0.897),
        _ => q_poly(x, 3.0, 0.894),
    };
    let mut worst: f64 = 0.0;
    for (form, (lo, hi), which) in forms {
        for x in linspace(lo, hi, 25) {
            let e = expanded(which, x);
            let f = form.eval(x);
            let rel = (e - f).abs() / form.magnitude(x);
            ensure(rel <= 1e-5, || format!("form {which} off by {rel:e} at {x}"))?;
            worst = worst.max(rel);
        }
    }
    for r in certify::P_AT_Z0.roots {
        let root = bisect(|q| Ok(p_poly(1.15, q)), r - 1e-3, r + 1e-3, 0.0, 1e-15)
            .map_err(err)?;
        ensure((root - r).abs() <= 1e-6, || format!("root {root} vs printed {r}"))?;
    }
    Ok(format!("tau values, 3 factorizations (max rel. {worst:.1e}) and P roots match"))
}

fn certificates() -> Outcome {
    let exec = Exec::default();
    let mut lines = Vec::new();
    for suite in [Suite::Lemma22, Suite::Lemma23, Suite::Chain] {
        let r = certify::certify_refinement(suite, 1, exec).map_err(err)?;
        for part in &r.parts {
            ensure(part.passed, || {
                format!(
                    "{} ({}) failed with margin {:e} at {:?}",
                    part.name, part.grid_spec, part.margin, part.witnesses
                )
            })?;
        }
        lines.push(format!("{:?} {:.2e}", suite, r.margin));
    }
    let chain = certify::certify_chain().map_err(err)?;
    let steps = chain
        .parts
        .iter()
        .filter(|p| p.name.starts_with("chain_step_") && p.passed)
        .count();
    ensure(steps == 7, || format!("{steps} of 7 chain steps passed"))?;
    Ok(format!("margins at 1x and 2x: {}", lines.join(", ")))
}

fn eigenvalue_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let k: u64 = rng.gen_range(1..=8);
        let q: f64 = rng.gen_range(2.1..10.0);
        let r: f64 = rng.gen_range(0.5..3.0);
        let t: f64 = rng.gen_range(0.3..6.0);
        let h = FourierFunction::cosine(k, 1.0, t).map_err(err)?;
        let got = second_variation_form(&h, q, r);
        let want = t * ((k as f64 * PI / t).powf(2.0 * r) + 2.0 - q);
        let rel = (got - want).abs() / want.abs();
        ensure(rel <= 1e-10, || {
            format!("k = {k}, q = {q}, r = {r}, T = {t}: {got} vs {want}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!("30 random cases, max rel. error {worst:.1e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 elliptic oracle agreement", elliptic_oracle),
        ("2 limit law", limit_law),
        ("3 monotonicity of the period", main_lemma),
        ("4 duality identity", duality),
        ("5 solution counting", counting),
        ("6 sharp constant below threshold", theorem2_constant),
        ("7 destabilization above threshold", destabilizing),
        ("8 profile fidelity", profile_fidelity),
        ("9 printed numerics", printed_numerics),
        ("10 certificates", certificates),
        ("11 eigenvalue formula", eigenvalue_formula),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
