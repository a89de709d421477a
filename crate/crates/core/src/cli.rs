//! Command-line front end.
//!
//! Exit codes: 0 when every reported property holds, 1 when one fails,
//! 2 for parse, usage and type errors, 3 for numeric and IO errors.
//! Data goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::affine::{decompose_nonsignalling, random_product_span};
use crate::dsl::{compile, DslError};
use crate::error::Error;
use crate::io::{process_to_json, read_process, read_supermap};
use crate::predicates::{
    cp_verdict, is_causal, is_nonsignalling_a_to_b, is_nonsignalling_b_to_a, is_soc, is_soc2,
    is_soc2_oracle, is_soc_oracle, Bipartition, CausalVerdict, HoleSplit,
};
use crate::supermap::{
    verify_corollary1, verify_theorem1, BipartiteSupermap, HarnessConfig, SharedState,
};
use crate::tensor::Tolerance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable holding a default tolerance.
pub const EPS_ENV: &str = "SOCLAB_EPS";

#[derive(Debug, Parser)]
#[command(
    name = "soclab",
    version,
    about = "Check causality properties of processes and supermaps"
)]
struct Cli {
    /// Absolute tolerance for all checks; overrides SOCLAB_EPS.
    #[arg(long, global = true)]
    eps: Option<f64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a diagram file and print the process JSON.
    Eval { file: PathBuf },
    /// Report causality, non-signalling and complete positivity.
    Classify {
        file: PathBuf,
        /// Alice's share as `inputs,outputs` leading factors.
        #[arg(long, value_parser = parse_pair)]
        split: Option<(usize, usize)>,
    },
    /// Check second-order causality of a one-hole supermap.
    Soc {
        file: PathBuf,
        /// Hole size as `inputs,outputs` leading factors.
        #[arg(long, value_parser = parse_pair)]
        slots: (usize, usize),
    },
    /// Check second-order causality of a two-slot supermap.
    Soc2 {
        file: PathBuf,
        /// Override slot metadata as `a1,a2,b1,b2` input indices.
        #[arg(long, value_parser = parse_quad)]
        slots: Option<[usize; 4]>,
    },
    /// Run a randomized verification harness.
    Verify {
        #[arg(value_enum)]
        which: Harness,
        file: PathBuf,
        #[command(flatten)]
        opts: HarnessArgs,
    },
    /// Decompose a non-signalling process over random product channels.
    Decompose {
        file: PathBuf,
        #[arg(long, default_value_t = 300)]
        span_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Alice's share as `inputs,outputs` leading factors.
        #[arg(long, value_parser = parse_pair, default_value = "1,1")]
        split: (usize, usize),
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Harness {
    Theorem1,
    Corollary1,
}

#[derive(Debug, Args)]
struct HarnessArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ancilla dimensions as `ra,rb`.
    #[arg(long, value_parser = parse_pair, default_value = "2,2")]
    dims: (usize, usize),
    /// Shared state for the non-signalling harness.
    #[arg(long, value_enum, default_value_t = SharedArg::Random)]
    shared: SharedArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SharedArg {
    Random,
    Product,
    MaxEntangled,
}

impl From<SharedArg> for SharedState {
    fn from(s: SharedArg) -> Self {
        match s {
            SharedArg::Random => SharedState::Random,
            SharedArg::Product => SharedState::Product,
            SharedArg::MaxEntangled => SharedState::MaxEntangled,
        }
    }
}

fn parse_list(s: &str, n: usize) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated integers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let v = parse_list(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_quad(s: &str) -> Result<[usize; 4], String> {
    let v = parse_list(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// Tolerance from the `--eps` flag, then the environment value, then the default.
pub fn resolve_tolerance(flag: Option<f64>, env: Option<&str>) -> Result<Tolerance, Error> {
    match (flag, env) {
        (Some(eps), _) => Tolerance::new(eps),
        (None, Some(text)) => {
            let eps: f64 = text.trim().parse().map_err(|_| {
                Error::Argument(format!("{EPS_ENV}={text:?} is not a decimal number"))
            })?;
            Tolerance::new(eps)
        }
        (None, None) => Ok(Tolerance::default()),
    }
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numeric(_) | Error::Io(_) => EXIT_NUMERIC,
        Error::Dimension(_)
        | Error::Argument(_)
        | Error::WireMismatch { .. }
        | Error::Format(_) => EXIT_PARSE,
    }
}

fn dsl_exit_code(e: &DslError) -> i32 {
    match e {
        DslError::Load { source, .. } => exit_code(source),
        _ => EXIT_PARSE,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_PARSE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let env_eps = std::env::var(EPS_ENV).ok();
    let tol = match resolve_tolerance(cli.eps, env_eps.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_PARSE;
        }
    };
    match dispatch(cli.cmd, tol, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Cmd, tol: Tolerance, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Cmd::Eval { file } => eval(&file, out),
        Cmd::Classify { file, split } => classify(&file, split, tol, out),
        Cmd::Soc { file, slots } => soc(&file, slots, tol, out, err),
        Cmd::Soc2 { file, slots } => soc2(&file, slots, tol, out, err),
        Cmd::Verify { which, file, opts } => verify(which, &file, &opts, tol, out, err),
        Cmd::Decompose {
            file,
            span_size,
            seed,
            split,
        } => decompose(&file, span_size, seed, split, tol, out),
    }
}

fn emit(out: &mut dyn Write, line: &str) -> Result<(), Failure> {
    writeln!(out, "{line}").map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: e.to_string(),
    })
}

fn verdict_json(v: &CausalVerdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialise")
}

fn eval(file: &Path, out: &mut dyn Write) -> CmdResult {
    let src = std::fs::read_to_string(file).map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: format!("{}: {e}", file.display()),
    })?;
    let base = file.parent().unwrap_or(Path::new("."));
    let p = compile(&src, base).map_err(|e| Failure {
        code: dsl_exit_code(&e),
        message: format!("{}:{e}", file.display()),
    })?;
    emit(out, &process_to_json(&p))?;
    Ok(EXIT_OK)
}

fn classify(
    file: &Path,
    split: Option<(usize, usize)>,
    tol: Tolerance,
    out: &mut dyn Write,
) -> CmdResult {
    let p = read_process(file)?;
    let mut report = serde_json::Map::new();
    let mut all = true;
    let mut add = |name: &str, v: CausalVerdict| {
        all &= v.holds;
        report.insert(name.to_string(), verdict_json(&v));
    };
    add("causal", is_causal(&p, tol));
    let split =
        split.or_else(|| (p.in_sys().len() >= 2 && p.out_sys().len() >= 2).then_some((1, 1)));
    if let Some((i, o)) = split {
        let b = Bipartition::new(i, o);
        add("nonsignalling_a_to_b", is_nonsignalling_a_to_b(&p, b, tol)?);
        add("nonsignalling_b_to_a", is_nonsignalling_b_to_a(&p, b, tol)?);
    }
    add("cp", cp_verdict(&p, tol));
    emit(out, &Value::Object(report).to_string())?;
    Ok(if all { EXIT_OK } else { EXIT_FAILS })
}

fn pair_report(
    closed: &CausalVerdict,
    oracle: &CausalVerdict,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let agree = closed.holds == oracle.holds;
    let report = json!({
        "closed_form": verdict_json(closed),
        "oracle": verdict_json(oracle),
        "agree": agree,
    });
    emit(out, &report.to_string())?;
    if !agree {
        let _ = writeln!(err, "warning: closed-form and oracle verdicts disagree");
    }
    Ok(if closed.holds && oracle.holds {
        EXIT_OK
    } else {
        EXIT_FAILS
    })
}

fn soc(
    file: &Path,
    slots: (usize, usize),
    tol: Tolerance,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let w = read_process(file)?;
    let split = HoleSplit::new(slots.0, slots.1);
    pair_report(
        &is_soc(&w, split, tol)?,
        &is_soc_oracle(&w, split, tol)?,
        out,
        err,
    )
}

fn load_supermap(file: &Path, slots: Option<[usize; 4]>) -> Result<BipartiteSupermap, Failure> {
    let w = read_supermap(file)?;
    Ok(match slots {
        Some([a1, a2, b1, b2]) => BipartiteSupermap::new(w.body().clone(), (a1, a2), (b1, b2))?,
        None => w,
    })
}

fn soc2(
    file: &Path,
    slots: Option<[usize; 4]>,
    tol: Tolerance,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let w = load_supermap(file, slots)?;
    pair_report(&is_soc2(&w, tol)?, &is_soc2_oracle(&w, tol)?, out, err)
}

fn verify(
    which: Harness,
    file: &Path,
    opts: &HarnessArgs,
    tol: Tolerance,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let w = load_supermap(file, None)?;
    let cfg = HarnessConfig {
        trials: opts.trials,
        seed: opts.seed,
        ancilla: opts.dims,
        shared: opts.shared.into(),
        tol,
    };
    let report = match which {
        Harness::Theorem1 => verify_theorem1(&w, &cfg)?,
        Harness::Corollary1 => verify_corollary1(&w, &cfg)?,
    };
    for t in &report.trials {
        emit(out, &serde_json::to_string(t).expect("records serialise"))?;
    }
    let _ = writeln!(
        err,
        "premise {} (residual {:.3e}); {} of {} trials non-causal; max residual {:.3e}",
        if report.premise.holds {
            "holds"
        } else {
            "fails: not SOC2"
        },
        report.premise.residual,
        report.failures(),
        report.trials.len(),
        report.max_residual()
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILS })
}

fn decompose(
    file: &Path,
    span_size: usize,
    seed: u64,
    split: (usize, usize),
    tol: Tolerance,
    out: &mut dyn Write,
) -> CmdResult {
    let f = read_process(file)?;
    let (ni, no) = (f.in_sys().len(), f.out_sys().len());
    if split.0 > ni || split.1 > no {
        return Err(Error::Argument(format!(
            "split {split:?} exceeds {} -> {}",
            f.in_sys(),
            f.out_sys()
        ))
        .into());
    }
    let a = (f.in_sys().slice(0..split.0), f.out_sys().slice(0..split.1));
    let b = (
        f.in_sys().slice(split.0..ni),
        f.out_sys().slice(split.1..no),
    );
    let span = random_product_span((&a.0, &a.1), (&b.0, &b.1), span_size, seed)?;
    let d = decompose_nonsignalling(&f, &span)?;
    let report = json!({
        "residual": d.residual,
        "rank": d.rank,
        "expected_rank": d.expected_rank,
        "span_deficient": d.span_deficient,
        "coeffs": d.coeffs,
    });
    emit(out, &report.to_string())?;
    Ok(if tol.accepts(d.residual) {
        EXIT_OK
    } else {
        EXIT_FAILS
    })
}
