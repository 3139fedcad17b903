//! Command-line front end: sharp constants, period integrals, solution
//! counts, periodic profiles, certificates and parameter sweeps.
//!
//! Exit codes: 0 success, 1 invalid input, 2 failed certification,
//! 3 numerical non-convergence.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sharp_embed::certify::{self, CertificateReport, Suite};
use sharp_embed::embedding::{self, EmbeddingParams};
use sharp_embed::par::linspace;
use sharp_embed::phase_plane::alpha_star;
use sharp_embed::quadrature::{self, QuadOptions};
use sharp_embed::solutions;
use sharp_embed::Exec;

use output::{csv_text, json_text, number, record_csv, write_out, Format, NonFinite, Record};

#[derive(Parser)]
#[command(name = "sharp-embed", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Emit JSON (default for every command except `sweep`)
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV
    #[arg(long)]
    csv: bool,
    /// Write the report to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self, default: Format) -> Format {
        if self.csv {
            Format::Csv
        } else if self.json {
            Format::Json
        } else {
            default
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sharp constant of H^r(-T, T) -> L_q(-T, T)
    Constant {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Half-period
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = quadrature::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = embedding::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Period integral I_q(alpha) and its alpha-derivative
    Integral {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = quadrature::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Number of positive 2T-periodic solutions
    Count {
        #[arg(long)]
        q: f64,
        #[arg(long = "T")]
        t: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reconstruct a periodic solution; writes <out>.csv (x, y) and
    /// <out>.json (invariants)
    Profile {
        #[arg(long)]
        q: f64,
        #[arg(long = "T")]
        t: f64,
        /// Oscillations per period 2T
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = quadrature::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = embedding::DEFAULT_GRID)]
        grid: usize,
        /// Output file stem
        #[arg(long, default_value = "profile")]
        out: PathBuf,
    },
    /// Run numerical certificates
    Certify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Grid density multiplier
        #[arg(long, default_value_t = 1)]
        density: usize,
        /// Also rerun at twice the density and require both to pass
        #[arg(long)]
        refine: bool,
        /// Certify a single point instead of the default grid
        #[arg(long, requires = "alpha")]
        q: Option<f64>,
        #[arg(long, requires = "q")]
        alpha: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate a quantity over a grid
    Sweep {
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Exponent or range `lo:hi`
        #[arg(long)]
        q: Span,
        /// Number of q values when `--q` is a range
        #[arg(long, default_value_t = 1)]
        q_steps: usize,
        /// alpha range `lo:hi` (integral, derivative)
        #[arg(long, conflicts_with = "t")]
        alpha: Option<Span>,
        /// Half-period range `lo:hi` (count, constant)
        #[arg(long = "T")]
        t: Option<Span>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = quadrature::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = embedding::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Integral,
    Derivative,
    Count,
    Constant,
}

/// A single value or a closed range `lo:hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Span {
    lo: f64,
    hi: f64,
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{x}` is not a number: {e}"))
        };
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(format!("invalid range `{s}`"));
        }
        Ok(Span { lo, hi })
    }
}

impl Span {
    fn points(&self, steps: usize) -> Vec<f64> {
        if self.lo == self.hi {
            vec![self.lo]
        } else {
            linspace(self.lo, self.hi, steps)
        }
    }
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    Suite::parse(s).ok_or_else(|| {
        format!("unknown suite `{s}` (all, main-lemma, lemma22, lemma23, polynomials, chain)")
    })
}

/// Invalid command-line input detected after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 2 {
        return Err(usage(format!("--grid must be at least 2, got {grid}")));
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use sharp_embed::Error as E;
    if let Some(err) = e.downcast_ref::<E>() {
        return match err {
            E::Domain(_) | E::Degenerate { .. } | E::Singularity(_) => 1,
            E::NonConvergence(_) | E::Consistency(_) | E::Inconclusive(_) => 3,
        };
    }
    if e.downcast_ref::<NonFinite>().is_some() {
        return 3;
    }
    1
}

fn emit(record: Record, output: &OutputArgs, default: Format) -> Result<()> {
    let v = record.into_value();
    let text = match output.format(default) {
        Format::Json => json_text(&v)?,
        Format::Csv => record_csv(&v)?,
    };
    write_out(&text, output.out.as_deref())
}

fn constant(q: f64, r: f64, t: f64, tol: f64, grid: usize, output: &OutputArgs) -> Result<()> {
    check_tol(tol)?;
    check_grid(grid)?;
    let params = EmbeddingParams::new(q, r, t)?;
    let res = embedding::sharp_constant_with(&params, &embedding::ConstantOptions { tol, grid })?;
    let competitor = match res.competitor {
        Some(c) => Record::new()
            .int("n", c.n)
            .num("alpha", c.alpha)?
            .num("rayleigh_quotient", c.rayleigh_quotient)?
            .into_value(),
        None => Value::Null,
    };
    let record = Record::new()
        .num("value", res.value)?
        .text("status", res.status.as_str())
        .num("q", q)?
        .num("r", r)?
        .num("T", t)?
        .num("constant_quotient", res.constant_quotient)?
        .num("threshold", res.threshold)?;
    let record = match output.format(Format::Json) {
        Format::Json => record.value("competitor", competitor),
        Format::Csv => record,
    };
    emit(record, output, Format::Json)
}

fn integral(q: f64, alpha: f64, tol: f64, output: &OutputArgs) -> Result<()> {
    check_tol(tol)?;
    let opts = QuadOptions::absolute(tol);
    let i = quadrature::period_integral_with(q, alpha, &opts)?;
    let d = quadrature::period_integral_deriv_with(q, alpha, &opts)?;
    let record = Record::new()
        .num("q", q)?
        .num("alpha", alpha)?
        .num("value", i.value)?
        .num("error_estimate", i.abs_error_estimate)?
        .int("evaluations", i.evaluations)
        .num("derivative", d.value)?
        .num("derivative_error_estimate", d.abs_error_estimate)?
        .num("alpha_star", alpha_star(q)?)?
        .num("limit", quadrature::period_limit(q)?)?;
    emit(record, output, Format::Json)
}

fn count(q: f64, t: f64, output: &OutputArgs) -> Result<()> {
    let solvable = solutions::solvable_periods(q, t)?;
    let k = solutions::band_index(q, t)?;
    let record = Record::new()
        .int("k", k)
        .value("solvable_n", Value::from(solvable))
        .int("count", solutions::count_periodic_solutions(q, t)?)
        .num("q", q)?
        .num("T", t)?;
    emit(record, output, Format::Json)
}

fn stem_with(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn profile(q: f64, t: f64, n: usize, tol: f64, grid: usize, out: &Path) -> Result<()> {
    check_tol(tol)?;
    if grid < 16 {
        return Err(usage(format!("--grid must be at least 16 for a profile, got {grid}")));
    }
    let alpha = solutions::solve_alpha_for_period(q, t, n, tol)?.ok_or_else(|| {
        usage(format!(
            "no nonconstant solution with n = {n}: q = {q} <= {}",
            solutions::branch_threshold(n, t)
        ))
    })?;
    let p = solutions::reconstruct_profile(q, alpha, n, t, grid)?;
    let d = p.diagnostics();
    let rows = p
        .xs
        .iter()
        .zip(&p.ys)
        .map(|(&x, &y)| Ok(vec![number("x", x)?, number("y", y)?]))
        .collect::<Result<Vec<_>>>()?;
    let csv_path = stem_with(out, "csv");
    let json_path = stem_with(out, "json");
    write_out(&csv_text(&["x", "y"], &rows)?, Some(&csv_path))?;
    let record = Record::new()
        .num("q", q)?
        .num("T", t)?
        .int("n", n)
        .num("alpha", alpha)?
        .num("c1", p.c1)?
        .num("mu", p.mu)?
        .num("period_residual", d.period_residual)?
        .num("first_integral_residual", d.first_integral_residual)?
        .num("virial_residual", d.virial_residual)?
        .num("rayleigh_quotient", d.rayleigh_quotient)?
        .num("min_y", d.min_y)?
        .num("max_y", d.max_y)?
        .int("grid", grid)
        .text("samples", csv_path.display().to_string());
    write_out(&json_text(&record.into_value())?, Some(&json_path))?;
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn report_json(r: &CertificateReport) -> Result<Value> {
    let witnesses = r
        .witnesses
        .iter()
        .map(|w| {
            let mut point = Record::new();
            for &(k, v) in &w.point {
                point = point.num(k, v)?;
            }
            Ok(Record::new()
                .value("point", point.into_value())
                .num("value", w.value)?
                .into_value())
        })
        .collect::<Result<Vec<_>>>()?;
    let parts = r.parts.iter().map(report_json).collect::<Result<Vec<_>>>()?;
    Ok(Record::new()
        .text("name", r.name.clone())
        .flag("passed", r.passed)
        .num("margin", r.margin)?
        .int("checks", r.checks)
        .text("grid_spec", r.grid_spec.clone())
        .value("witnesses", Value::Array(witnesses))
        .value("parts", Value::Array(parts))
        .into_value())
}

/// One CSV row per leaf certificate, named by its path in the tree.
fn report_rows(r: &CertificateReport, prefix: &str, rows: &mut Vec<Vec<Value>>) -> Result<()> {
    let name = if prefix.is_empty() {
        r.name.clone()
    } else {
        format!("{prefix}/{}", r.name)
    };
    if r.parts.is_empty() {
        rows.push(vec![
            Value::from(name),
            Value::from(r.passed),
            number("margin", r.margin)?,
            Value::from(r.checks),
            Value::from(r.grid_spec.clone()),
        ]);
    } else {
        for p in &r.parts {
            report_rows(p, &name, rows)?;
        }
    }
    Ok(())
}

fn certify_point(suite: Suite, q: f64, alpha: f64) -> Result<CertificateReport> {
    Ok(match suite {
        Suite::MainLemma => {
            let a_star = alpha_star(q)?;
            if !(alpha > 0.0 && alpha < a_star) {
                return Err(usage(format!("alpha must lie in (0, {a_star})")));
            }
            certify::certify_main_lemma(&[q], 1, Exec::default())?
        }
        Suite::Lemma22 if q > 3.0 => certify::certify_lemma22(q, alpha)?,
        Suite::Lemma22 => certify::certify_g_monotone(q, alpha)?,
        Suite::Lemma23 => certify::certify_lemma23(q, alpha)?,
        _ => {
            return Err(usage(
                "--q/--alpha apply only to main-lemma, lemma22 and lemma23",
            ))
        }
    })
}

fn certify_cmd(
    suite: Suite,
    density: usize,
    refine: bool,
    point: Option<(f64, f64)>,
    output: &OutputArgs,
) -> Result<bool> {
    if density == 0 {
        return Err(usage("--density must be at least 1"));
    }
    let exec = Exec::default();
    let report = match (point, refine) {
        (Some((q, a)), _) => certify_point(suite, q, a)?,
        (None, true) => certify::certify_refinement(suite, density, exec)?,
        (None, false) => certify::certify_suite(suite, density, exec)?,
    };
    let text = match output.format(Format::Json) {
        Format::Json => json_text(&report_json(&report)?)?,
        Format::Csv => {
            let mut rows = Vec::new();
            report_rows(&report, "", &mut rows)?;
            csv_text(&["certificate", "passed", "margin", "checks", "grid_spec"], &rows)?
        }
    };
    write_out(&text, output.out.as_deref())?;
    for p in &report.parts {
        eprintln!(
            "{:<10} {} margin {:e}",
            p.name,
            if p.passed { "pass" } else { "FAIL" },
            p.margin
        );
    }
    Ok(report.passed)
}

/// Exit status for a finished certificate run.
fn certificate_exit(passed: bool) -> u8 {
    if passed {
        0
    } else {
        2
    }
}

/// One sweep cell: value, error estimate, diagnostics.
type Cell = (Option<f64>, Option<f64>, String);

#[allow(clippy::too_many_arguments)]
fn sweep(
    quantity: Quantity,
    q: Span,
    q_steps: usize,
    alpha: Option<Span>,
    t: Option<Span>,
    steps: usize,
    r: f64,
    tol: f64,
    grid: usize,
    output: &OutputArgs,
) -> Result<()> {
    check_tol(tol)?;
    check_grid(grid)?;
    if steps < 2 || q_steps == 0 {
        return Err(usage("--steps must be at least 2 and --q-steps at least 1"));
    }
    let (axis, span) = match quantity {
        Quantity::Integral | Quantity::Derivative => (
            "alpha",
            alpha.ok_or_else(|| usage("this quantity sweeps --alpha lo:hi"))?,
        ),
        Quantity::Count | Quantity::Constant => (
            "T",
            t.ok_or_else(|| usage("this quantity sweeps --T lo:hi"))?,
        ),
    };
    let cells: Vec<(f64, f64)> = q
        .points(q_steps)
        .into_iter()
        .flat_map(|qv| span.points(steps).into_iter().map(move |s| (qv, s)))
        .collect();
    let opts = QuadOptions::absolute(tol);
    let eval = |&(qv, s): &(f64, f64)| -> Cell {
        let res: sharp_embed::Result<Cell> = match quantity {
            Quantity::Integral => quadrature::period_integral_with(qv, s, &opts)
                .map(|r| (Some(r.value), Some(r.abs_error_estimate), String::new())),
            Quantity::Derivative => quadrature::period_integral_deriv_with(qv, s, &opts)
                .map(|r| (Some(r.value), Some(r.abs_error_estimate), String::new())),
            Quantity::Count => solutions::count_periodic_solutions(qv, s)
                .map(|c| (Some(c as f64), None, String::new())),
            Quantity::Constant => EmbeddingParams::new(qv, r, s)
                .and_then(|p| {
                    embedding::sharp_constant_with(&p, &embedding::ConstantOptions { tol, grid })
                })
                .map(|c| (Some(c.value), None, c.status.as_str().to_string())),
        };
        res.unwrap_or_else(|e| (None, None, e.to_string()))
    };
    let results = Exec::default().map(&cells, eval);
    let mut rows = Vec::with_capacity(cells.len());
    for (&(qv, s), (value, err, diag)) in cells.iter().zip(results) {
        let finite = |x: Option<f64>| x.filter(|v| v.is_finite());
        let diag = if value.is_some() && finite(value).is_none() {
            "non-finite value".to_string()
        } else {
            diag
        };
        let num = |k: &str, x: Option<f64>| finite(x).map_or(Ok(Value::Null), |v| number(k, v));
        let value_cell = if quantity == Quantity::Count {
            finite(value).map_or(Value::Null, |v| Value::from(v as u64))
        } else {
            num("value", value)?
        };
        rows.push(vec![
            number("q", qv)?,
            number(axis, s)?,
            value_cell,
            num("error_estimate", err)?,
            Value::from(diag),
        ]);
    }
    let header = ["q", axis, "value", "error_estimate", "diagnostics"];
    let text = match output.format(Format::Csv) {
        Format::Csv => csv_text(&header, &rows)?,
        Format::Json => {
            let objs = rows
                .into_iter()
                .map(|row| {
                    let mut rec = Record::new();
                    for (k, v) in header.iter().zip(row) {
                        rec = rec.value(k, v);
                    }
                    rec.into_value()
                })
                .collect();
            json_text(&Value::Array(objs))?
        }
    };
    write_out(&text, output.out.as_deref())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Constant { q, r, t, tol, grid, output } => constant(q, r, t, tol, grid, &output)?,
        Command::Integral { q, alpha, tol, output } => integral(q, alpha, tol, &output)?,
        Command::Count { q, t, output } => count(q, t, &output)?,
        Command::Profile { q, t, n, tol, grid, out } => profile(q, t, n, tol, grid, &out)?,
        Command::Certify { suite, density, refine, q, alpha, output } => {
            let passed = certify_cmd(suite, density, refine, q.zip(alpha), &output)?;
            return Ok(certificate_exit(passed));
        }
        Command::Sweep { quantity, q, q_steps, alpha, t, steps, r, tol, grid, output } => {
            sweep(quantity, q, q_steps, alpha, t, steps, r, tol, grid, &output)?
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::anyhow;

    #[test]
    fn span_parsing() {
        assert_eq!("0.5:8".parse::<Span>().unwrap(), Span { lo: 0.5, hi: 8.0 });
        assert_eq!("4".parse::<Span>().unwrap(), Span { lo: 4.0, hi: 4.0 });
        assert!("3:1".parse::<Span>().is_err());
        assert!("a:1".parse::<Span>().is_err());
        assert_eq!("2:3".parse::<Span>().unwrap().points(3), vec![2.0, 2.5, 3.0]);
    }

    #[test]
    fn error_codes() {
        let e: anyhow::Error = sharp_embed::Error::Domain("x".into()).into();
        assert_eq!(exit_code(&e), 1);
        let e: anyhow::Error = sharp_embed::Error::NonConvergence("x".into()).into();
        assert_eq!(exit_code(&e), 3);
        assert_eq!(exit_code(&usage("bad")), 1);
        assert_eq!(exit_code(&NonFinite("v".into()).into()), 3);
        assert_eq!(exit_code(&anyhow!("other")), 1);
    }

    #[test]
    fn failed_certificate_exits_with_2() {
        let failing = CertificateReport {
            name: "x".into(),
            passed: false,
            margin: -1.0,
            checks: 1,
            witnesses: Vec::new(),
            grid_spec: String::new(),
            parts: Vec::new(),
        };
        let all = CertificateReport::composite("all", "", vec![failing]);
        assert!(!all.passed);
        assert_eq!(certificate_exit(all.passed), 2);
        assert_eq!(certificate_exit(true), 0);
        let mut rows = Vec::new();
        report_rows(&all, "", &mut rows).unwrap();
        assert_eq!(rows[0][0], Value::from("all/x"));
        assert_eq!(rows[0][1], Value::from(false));
    }

    #[test]
    fn stems() {
        assert_eq!(stem_with(Path::new("out/p"), "csv"), PathBuf::from("out/p.csv"));
    }

    #[test]
    fn unknown_suite() {
        assert!(parse_suite("nope").is_err());
        assert_eq!(parse_suite("main-lemma").unwrap(), Suite::MainLemma);
    }
}
