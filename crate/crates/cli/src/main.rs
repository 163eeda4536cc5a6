mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use lprime_core::evaluator::f_factor;
use lprime_core::store::{emit_plotdata, emit_report, load_database, resume_scan};
use lprime_core::theorems::{check_left_halfplane, check_zero_free_right, verify};
use lprime_core::zerofinder::{count_n, count_n1};
use lprime_core::{
    character, enumerate_characters, g1_jet, l_value, primitive_characters, Complex64, DirichletCharacter, Error,
    EvalConfig, FunctionTag, ResidualReport, ScanConfig, Scanner, ZeroDatabase,
};

use args::{CharactersCmd, Cli, Command, EvalArgs, EvalFn, PlotArgs, ReportArgs, VerifyArgs, VerifySub, ZerosCmd};

const EXIT_FAIL: u8 = 1;
const EXIT_ACCURACY: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::Accuracy { .. }
            | Error::ZeroOnPath { .. }
            | Error::NonIntegerWinding { .. }
            | Error::Additivity { .. }
            | Error::Quadrature { .. }
            | Error::IncompleteScan { .. },
        ) => EXIT_ACCURACY,
        _ => EXIT_USAGE,
    }
}

struct Settings {
    eval: EvalConfig,
    scan: ScanConfig,
}

fn run(cli: &Cli) -> anyhow::Result<Verdict> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let eval = EvalConfig::with_target(cli.precision);
    eval.validate()?;
    let ctx = Settings {
        eval,
        scan: ScanConfig {
            eval,
            seed: cli.seed,
            ..ScanConfig::default()
        },
    };
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Characters(CharactersCmd::List { q }) => list_characters(*q, out),
        Command::Eval(a) => eval_point(a, &ctx, out),
        Command::Zeros(ZerosCmd::Scan { character: c, t, function }) => {
            let path = out.context("`zeros scan` needs --out <path>")?;
            scan(&character(c.q, c.chi)?, *t, *function, &ctx, path)
        }
        Command::Zeros(ZerosCmd::Count { character: c, t, function }) => {
            let chi = character(c.q, c.chi)?;
            let n = match function {
                FunctionTag::L => count_n(&chi, *t, &ctx.scan)?,
                FunctionTag::Lprime => count_n1(&chi, *t, &ctx.scan)?,
            };
            write_to(out, |w| Ok(writeln!(w, "{}", n.count)?))?;
            Ok(Verdict::Pass)
        }
        Command::Verify(v) => match &v.regions {
            Some(VerifySub::Regions { character: c, window }) => regions(&character(c.q, c.chi)?, *window, &ctx, out),
            None => verify_one(&v.args, &ctx, out),
        },
        Command::Report(a) => report(a, &ctx, out),
        Command::Plotdata(a) => plotdata(a, &ctx, out),
    }
}

/// Runs `body` against `--out` or stdout.
fn write_to(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// `x` in positional notation with 17 significant digits.
fn fixed17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.16}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn list_characters(q: u64, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let chars = enumerate_characters(q)?;
    write_to(out, |w| {
        writeln!(w, "index,conductor,primitive,kappa,order,exponents")?;
        for chi in &chars {
            let s = chi.summary();
            let exps: Vec<String> = (1..=q as i64)
                .map(|n| chi.exponent(n).map_or_else(|| "-".to_string(), |e| e.to_string()))
                .collect();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.index,
                s.conductor,
                s.primitive,
                s.kappa,
                s.order,
                exps.join(" ")
            )?;
        }
        Ok(())
    })?;
    Ok(Verdict::Pass)
}

fn eval_point(a: &EvalArgs, ctx: &Settings, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let chi = character(a.character.q, a.character.chi)?;
    let s = Complex64::new(a.s.0, a.s.1);
    let deriv = a.deriv as usize;
    let v = match (a.function, deriv) {
        (EvalFn::L, d) => l_value(&chi, s, d, &ctx.eval)?,
        (EvalFn::G1, 0) => lprime_core::g1_value(&chi, s, &ctx.eval)?,
        (EvalFn::G1, 1) => {
            let j = g1_jet(&chi, s, &ctx.eval)?;
            let (value, bound) = (j.jet.deriv(1), j.err[1]);
            if bound > ctx.eval.target_abs_error * value.norm().max(1.0) {
                return Err(Error::Accuracy {
                    achieved: bound,
                    target: ctx.eval.target_abs_error,
                }
                .into());
            }
            lprime_core::ComplexValue::new(value, bound)
        }
        (EvalFn::F, 0) => f_factor(&chi, s)?,
        (f, d) => bail!(Error::domain(format!("derivative {d} is not available for {f:?}"))),
    };
    write_to(out, |w| {
        writeln!(w, "re {}", fixed17(v.re))?;
        writeln!(w, "im {}", fixed17(v.im))?;
        writeln!(w, "abs_error_bound {}", fixed17(v.abs_error_bound))?;
        Ok(())
    })?;
    Ok(Verdict::Pass)
}

fn scan(chi: &DirichletCharacter, t: f64, tag: FunctionTag, ctx: &Settings, path: &Path) -> anyhow::Result<Verdict> {
    let db = resume_scan(path, chi, tag, t, &ctx.scan, Default::default())
        .with_context(|| format!("scanning into {}", path.display()))?;
    let failed: Vec<_> = db.bands.iter().filter(|b| b.status.is_failed()).collect();
    for b in &failed {
        eprintln!("band [{}, {}] failed: {:?}", b.t_lo, b.t_hi, b.status);
    }
    eprintln!(
        "{} zeros of {tag} up to T = {} in {}",
        db.zeros.len(),
        db.t_done(),
        path.display()
    );
    if db.t_done() < t {
        return Err(Error::IncompleteScan {
            missing: db.missing_below(t),
        }
        .into());
    }
    Ok(Verdict::Pass)
}

/// Zeros up to `t`, from `db` when given.
fn database(
    chi: &DirichletCharacter,
    tag: FunctionTag,
    t: f64,
    ctx: &Settings,
    db: Option<&Path>,
) -> anyhow::Result<ZeroDatabase> {
    match db {
        Some(path) => {
            let db = load_database(path).with_context(|| format!("loading {}", path.display()))?;
            if (db.q, db.chi_index, db.function) != (chi.modulus(), chi.index(), tag) {
                bail!(Error::domain(format!(
                    "{} holds zeros of {} for q = {}, index {}",
                    path.display(),
                    db.function,
                    db.q,
                    db.chi_index
                )));
            }
            Ok(db)
        }
        None => Ok(Scanner::new(chi, tag, &ctx.scan)?.scan(t)?),
    }
}

fn verify_one(a: &VerifyArgs, ctx: &Settings, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let (q, idx, t, stat) = match (a.q, a.chi, a.t, a.stat) {
        (Some(q), Some(i), Some(t), Some(s)) => (q, i, t, s),
        _ => bail!(Error::domain("verify needs --q, --chi, --T and --stat")),
    };
    let chi = character(q, idx)?;
    let db = database(&chi, stat.function(), t, ctx, a.db.as_deref())?;
    let report = verify(stat, &chi, t, &db, a.c.unwrap_or(stat.default_c()))?;
    write_to(out, |w| {
        serde_json::to_writer(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(if report.pass { Verdict::Pass } else { Verdict::Fail })
}

fn regions(chi: &DirichletCharacter, window: f64, ctx: &Settings, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let db = Scanner::new(chi, FunctionTag::Lprime, &ctx.scan)?.scan(window)?;
    if db.t_done() < window {
        bail!(Error::IncompleteScan {
            missing: db.missing_below(window),
        });
    }
    let right = check_zero_free_right(chi, &db.zeros);
    let left = check_left_halfplane(chi, window, &ctx.scan)?;
    let pass = right && left.pass;
    write_to(out, |w| {
        let v = serde_json::json!({ "zero_free_right": right, "left": left, "pass": pass });
        writeln!(w, "{v}")?;
        Ok(())
    })?;
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}

fn report(a: &ReportArgs, ctx: &Settings, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let t_max = a.t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut reports: Vec<ResidualReport> = Vec::new();
    for &q in &a.q {
        let chars = match a.chi {
            Some(i) => vec![character(q, i)?],
            None => primitive_characters(q)?,
        };
        for chi in &chars {
            let mut tags: Vec<FunctionTag> = a.stat.iter().map(|s| s.function()).collect();
            tags.sort();
            tags.dedup();
            for tag in tags {
                let db = database(chi, tag, t_max, ctx, None)?;
                for stat in a.stat.iter().filter(|s| s.function() == tag) {
                    for &t in &a.t {
                        reports.push(verify(*stat, chi, t, &db, a.c.unwrap_or(stat.default_c()))?);
                    }
                }
            }
        }
    }
    write_to(out, |w| Ok(emit_report(w, &reports, a.format.into())?))?;
    Ok(if reports.iter().all(|r| r.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn plotdata(a: &PlotArgs, ctx: &Settings, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let chi = character(a.character.q, a.character.chi)?;
    let grid = &a.grid.0;
    let t_max = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let db = database(&chi, a.stat.function(), t_max, ctx, a.db.as_deref())?;
    write_to(out, |w| Ok(emit_plotdata(w, &chi, &db, a.stat, grid)?))?;
    Ok(Verdict::Pass)
}
