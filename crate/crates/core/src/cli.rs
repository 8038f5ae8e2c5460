//! Command-line front end. `main.rs` only forwards to [`run`], so tests can
//! drive the same code with captured output.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input or a
//! domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dittert::{maximizer_conditions, phi, phi_unchecked};
use crate::error::{Error, Result};
use crate::lihwang::{f6_poly, gap_direct};
use crate::matcore::{is_fully_indecomposable, is_in_kn, parse_matrix_text, require_doubly_stochastic, Mat, MAX_EXHAUSTIVE_ORDER};
use crate::perm::{laplace_expand, per_naive, per_ryser};
use crate::scalar::{Rational, Scalar};
use crate::searchlab::{maximize_phi_k4, table1, SearchConfig, SearchDomain, Table1Outcome};
use crate::suites::{run_suite, Suite, SuiteReport};
use crate::SubsetIndex;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Largest order for which `permanent` also runs the `n!` oracle.
const NAIVE_LIMIT: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "permlab", version, about = "Permanent identities, gap functions and Dittert's phi")]
pub struct Cli {
    /// Emit the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Comparison tolerance (float mode).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Include wall-clock timings in the report (breaks byte reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Permanent of a matrix file by every applicable algorithm.
    Permanent {
        file: PathBuf,
        /// Exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Run property suites on seeded random samples.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory receiving witness matrices of failed checks.
        #[arg(long, default_value = ".")]
        dump_dir: PathBuf,
    },
    /// Minimize the printed quartic and the true gap on each published interval.
    Table1 {
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        max_evals: usize,
    },
    /// Gap over a uniform parameter grid, as CSV.
    GapCurve {
        file: PathBuf,
        #[arg(long, default_value_t = 101)]
        n_points: usize,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Dittert's phi: check a matrix or search K_4.
    Dittert(DittertArgs),
}

#[derive(Debug, Args)]
struct DittertArgs {
    #[command(subcommand)]
    mode: DittertMode,
}

#[derive(Debug, Subcommand)]
enum DittertMode {
    Check {
        file: PathBuf,
        #[arg(long)]
        exact: bool,
    },
    Search {
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        max_evals: usize,
        /// Write the per-restart improvement trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Symf4,
    Lihwang4,
    Lihwang6,
    Dittert,
    All,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub step: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub suite_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
    tol: f64,
    timings: Option<Vec<Timing>>,
}

impl Ctx<'_> {
    fn timed<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        if let Some(t) = self.timings.as_mut() {
            t.push(Timing {
                step: step.to_string(),
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        v
    }

    fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        if !self.json {
            writeln!(self.out, "{}", text.as_ref()).map_err(io_error)?;
        }
        Ok(())
    }

    fn finish(&mut self, command: &str, inputs: Value, results: Value, pass: bool) -> Result<i32> {
        if self.json {
            let report = RunReport {
                command: command.to_string(),
                inputs,
                results,
                suite_pass: pass,
                timings: self.timings.take(),
            };
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::invalid(e.to_string()))?;
            writeln!(self.out, "{text}").map_err(io_error)?;
        } else if let Some(t) = self.timings.take() {
            for t in t {
                writeln!(self.out, "time {}: {:.3}s", t.step, t.seconds).map_err(io_error)?;
            }
        }
        Ok(if pass { EXIT_OK } else { EXIT_FAILED })
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::invalid(format!("i/o error: {e}"))
}

fn read_matrix(path: &Path) -> Result<Mat<Rational>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix_text(&text)
}

/// Parses `args` (including the program name) and runs the command, writing
/// human or JSON output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Ctx {
        out,
        json: cli.json,
        tol: cli.tol,
        timings: cli.timings.then(Vec::new),
    };
    let result = match cli.command {
        Command::Permanent { file, exact } => cmd_permanent(&mut ctx, &file, exact),
        Command::Verify { suite, samples, seed, dump_dir } => cmd_verify(&mut ctx, suite, samples, seed, &dump_dir),
        Command::Table1 { restarts, seed, max_evals } => cmd_table1(&mut ctx, restarts, seed, max_evals),
        Command::GapCurve { file, n_points, out, exact } => cmd_gap_curve(&mut ctx, &file, n_points, out.as_deref(), exact),
        Command::Dittert(DittertArgs { mode }) => match mode {
            DittertMode::Check { file, exact } => cmd_dittert_check(&mut ctx, &file, exact),
            DittertMode::Search { restarts, seed, max_evals, trace } => {
                cmd_dittert_search(&mut ctx, restarts, seed, max_evals, trace.as_deref())
            }
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.out, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn permanents<S: Scalar>(a: &Mat<S>) -> Vec<(&'static str, S)> {
    let mut v = Vec::new();
    if a.order() <= NAIVE_LIMIT {
        v.push(("naive", per_naive(a)));
    }
    v.push(("ryser", per_ryser(a)));
    if a.order() >= 1 {
        let alpha = SubsetIndex::new(vec![0], a.order()).expect("0 < n");
        v.push(("laplace", laplace_expand(a, &alpha).expect("row set in range")));
    }
    v
}

fn cmd_permanent(ctx: &mut Ctx, file: &Path, exact: bool) -> Result<i32> {
    let m = read_matrix(file)?;
    let (values, agree) = if exact {
        let vals = ctx.timed("permanent", || permanents(&m));
        let agree = vals.iter().all(|(_, v)| *v == vals[0].1);
        (vals.into_iter().map(|(k, v)| (k, v.render(), v.to_json())).collect::<Vec<_>>(), agree)
    } else {
        let f = m.to_f64();
        let vals = ctx.timed("permanent", || permanents(&f));
        let base = vals[0].1;
        let agree = vals.iter().all(|(_, v)| (v - base).abs() <= ctx.tol * base.abs().max(1.0));
        (vals.into_iter().map(|(k, v)| (k, v.render(), v.to_json())).collect(), agree)
    };
    ctx.line(format!("order: {}", m.order()))?;
    ctx.line(format!("mode: {}", if exact { "exact_rational" } else { "float64" }))?;
    for (name, text, _) in &values {
        ctx.line(format!("{name}: {text}"))?;
    }
    ctx.line(format!("agree: {agree}"))?;
    let results: serde_json::Map<String, Value> = values.iter().map(|(k, _, j)| (k.to_string(), j.clone())).collect();
    let code = ctx.finish(
        "permanent",
        json!({"file": file.display().to_string(), "exact": exact, "tol": ctx.tol}),
        json!({"order": m.order(), "permanents": results, "agree": agree}),
        agree,
    )?;
    // Disagreement between algorithms is reported as an input-level error.
    Ok(if agree { code } else { EXIT_INPUT })
}

fn cmd_verify(ctx: &mut Ctx, suite: SuiteArg, samples: usize, seed: u64, dump_dir: &Path) -> Result<i32> {
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let suites: Vec<Suite> = match suite {
        SuiteArg::Symf4 => vec![Suite::Symf4],
        SuiteArg::Lihwang4 => vec![Suite::Lihwang4],
        SuiteArg::Lihwang6 => vec![Suite::Lihwang6],
        SuiteArg::Dittert => vec![Suite::Dittert],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in suites {
        let r = ctx.timed(s.name(), || run_suite(s, samples, seed));
        reports.push(r);
    }
    let mut dumped = Vec::new();
    for r in &reports {
        for (k, f) in r.failures.iter().enumerate() {
            if let Some(w) = &f.witness {
                std::fs::create_dir_all(dump_dir).map_err(io_error)?;
                let path = dump_dir.join(format!("witness-{}-{k}.txt", r.suite.name()));
                let body = format!("# {}: {}\n{w}", f.check, f.detail);
                std::fs::write(&path, body).map_err(io_error)?;
                dumped.push(path.display().to_string());
            }
        }
    }
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        ctx.line(format!(
            "suite {}: {status} ({} checks, {} failures)",
            r.suite.name(),
            r.checks,
            r.failures.len()
        ))?;
        for f in &r.failures {
            ctx.line(format!("  failed {} (sample {:?}): {}", f.check, f.sample, f.detail))?;
        }
        for note in &r.findings {
            ctx.line(format!("  finding: {note}"))?;
        }
    }
    for p in &dumped {
        ctx.line(format!("witness written to {p}"))?;
    }
    let pass = reports.iter().all(SuiteReport::passed);
    ctx.finish(
        "verify",
        json!({"suite": format!("{suite:?}").to_lowercase(), "samples": samples, "seed": seed}),
        json!({"suites": reports, "witness_files": dumped}),
        pass,
    )
}

fn table_line(o: &Table1Outcome) -> String {
    let status = if o.value_matches && o.alpha_matches {
        "match"
    } else if o.lower_than_published {
        "lower (finding)"
    } else {
        "MISMATCH"
    };
    format!(
        "[{}, {}]\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{status}{}",
        o.row.interval.0,
        o.row.interval.1,
        o.row.paper_alpha,
        o.row.paper_min,
        o.found_alpha,
        o.found_min,
        o.true_gap_min,
        if o.budget_exhausted { " (budget exhausted)" } else { "" }
    )
}

fn cmd_table1(ctx: &mut Ctx, restarts: usize, seed: u64, max_evals: usize) -> Result<i32> {
    let rows = ctx.timed("table1", || table1(restarts, seed, max_evals))?;
    ctx.line("interval\tpaper_alpha\tpaper_min\tfound_alpha\tfound_min\ttrue_gap_min\tstatus")?;
    for o in &rows {
        ctx.line(table_line(o))?;
    }
    let pass = rows.iter().all(Table1Outcome::passes);
    ctx.finish(
        "table1",
        json!({"restarts": restarts, "seed": seed, "max_evals": max_evals}),
        json!({"rows": rows}),
        pass,
    )
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn gap_rows<S: Scalar>(a: &Mat<S>, n_points: usize, render: impl Fn(&S) -> String) -> Result<(Vec<String>, f64, f64)> {
    require_doubly_stochastic(a, "gap-curve")?;
    let f = if a.order() == 6 { Some(f6_poly(a)?) } else { None };
    let last = (n_points - 1) as i64;
    let mut rows = Vec::with_capacity(n_points);
    let mut min_gap = f64::INFINITY;
    let mut worst = 0.0f64;
    for k in 0..n_points {
        let t = S::from_ratio(k as i64, last);
        let g = gap_direct(a, &t)?;
        min_gap = min_gap.min(g.to_f64());
        let fv = f.as_ref().map(|p| p.eval(&t));
        if let Some(fv) = &fv {
            let r = g.clone() - t.clone() * (S::one() - t.clone()) * fv.clone();
            worst = worst.max(r.abs().to_f64());
        }
        rows.push(format!(
            "{},{},{}",
            render(&t),
            render(&g),
            fv.as_ref().map(&render).unwrap_or_default()
        ));
    }
    Ok((rows, min_gap, worst))
}

fn cmd_gap_curve(ctx: &mut Ctx, file: &Path, n_points: usize, out: Option<&Path>, exact: bool) -> Result<i32> {
    if n_points < 2 {
        return Err(Error::invalid("n-points must be at least 2"));
    }
    let m = read_matrix(file)?;
    let (rows, min_gap, worst) = if exact {
        gap_rows(&m, n_points, |v: &Rational| v.render())?
    } else {
        gap_rows(&m.to_f64(), n_points, |v: &f64| fmt_f64(*v))?
    };
    let mut csv = String::from("t,gap,f_value\n");
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    match out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(io_error)?;
            ctx.line(format!("wrote {} rows to {}", rows.len(), path.display()))?;
        }
        None if !ctx.json => write!(ctx.out, "{csv}").map_err(io_error)?,
        None => {}
    }
    ctx.finish(
        "gap-curve",
        json!({"file": file.display().to_string(), "n_points": n_points, "exact": exact}),
        json!({
            "order": m.order(),
            "min_gap": min_gap,
            "max_factorization_residual": if m.order() == 6 { json!(worst) } else { Value::Null },
            "csv": if out.is_none() { json!(csv) } else { Value::Null },
        }),
        true,
    )
}

fn phi_check<S: Scalar>(ctx: &mut Ctx, m: &Mat<S>, tol: S) -> Result<(Value, bool)> {
    let value = phi(m)?;
    let report = maximizer_conditions(m, &tol);
    let fi = m.order() <= MAX_EXHAUSTIVE_ORDER && is_fully_indecomposable(m);
    let gap = phi_unchecked(&Mat::<S>::uniform(m.order())) - value.clone();
    ctx.line(format!("phi: {}", value.render()))?;
    ctx.line(format!("phi(J_n) - phi: {}", gap.render()))?;
    ctx.line(format!("support_consistent: {}", report.support_consistent))?;
    ctx.line(format!("violating_pairs: {:?}", report.violating_pairs))?;
    ctx.line(format!("fully_indecomposable: {fi}"))?;
    Ok((
        json!({"phi_report": report, "phi_jn_minus_phi": gap.to_json(), "fully_indecomposable": fi}),
        true,
    ))
}

fn cmd_dittert_check(ctx: &mut Ctx, file: &Path, exact: bool) -> Result<i32> {
    let m = read_matrix(file)?;
    if !is_in_kn(&m.to_f64(), &1e-9) {
        return Err(Error::domain(format!("matrix is not in K_{}", m.order())));
    }
    let (results, pass) = if exact {
        phi_check(ctx, &m, Rational::from_int(0))?
    } else {
        let tol = ctx.tol.min(1e-9).max(1e-12);
        phi_check(ctx, &m.to_f64(), tol)?
    };
    ctx.finish(
        "dittert check",
        json!({"file": file.display().to_string(), "exact": exact}),
        results,
        pass,
    )
}

fn cmd_dittert_search(ctx: &mut Ctx, restarts: usize, seed: u64, max_evals: usize, trace: Option<&Path>) -> Result<i32> {
    let mut cfg = SearchConfig::new(SearchDomain::K4Phi, (0.0, 1.0), restarts, seed);
    cfg.max_evals = max_evals;
    cfg.trace = trace.is_some();
    let r = ctx.timed("search", || maximize_phi_k4(&cfg))?;
    if let Some(path) = trace {
        std::fs::write(path, r.trace_csv()).map_err(io_error)?;
    }
    let bound = 61.0 / 32.0 + 1e-9;
    let near = r.per_restart.iter().filter(|o| o.distance_to_uniform <= 1e-4).count();
    let best_distance = r.per_restart[r.best_restart].distance_to_uniform;
    ctx.line(format!("best phi: {}", fmt_f64(r.best_value)))?;
    ctx.line(format!("distance of best to J_4: {}", fmt_f64(best_distance)))?;
    ctx.line(format!("restarts within 1e-4 of J_4: {near}/{}", r.per_restart.len()))?;
    ctx.line(format!("budget exhausted: {}", r.budget_exhausted))?;
    let pass = r.best_value <= bound;
    ctx.finish(
        "dittert search",
        json!({"restarts": restarts, "seed": seed, "max_evals": max_evals}),
        json!({"search": r, "restarts_near_uniform": near}),
        pass,
    )
}
