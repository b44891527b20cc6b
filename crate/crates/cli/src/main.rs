//! `pasflab`: generate, verify, analyze and search p-approximate Schauder
//! frames from the command line.
//!
//! Exit codes: 0 pass, 1 invariant failure, 2 usage or parse error,
//! 3 generation failure, 4 unmet precondition.

mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pasflab_core::frames::{random_pasf, CERTIFY_RESTARTS};
use pasflab_core::identities::{LEMMA_TOL, PARSEVAL_TOL_REL, PATH_TOL};
use pasflab_core::io::{load_frame, save_frame, FrameFile};
use pasflab_core::search::{find_hypothesis_violation, minimize_ratio, SearchConfig, SubsetPolicy};
use pasflab_core::verify::{run_suites, VerifyConfig, BOUND_SLACK};
use pasflab_core::{Error, Field, Pasf, SipSpace};

use manifest::{Budget, Command, FrameParams, RunManifest, Tolerances};
use report::{Named, Report, ResultEntry, SearchRecord};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GENERATION: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "pasflab", version, about = "p-approximate Schauder frame laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random frame and write it as a frame file.
    Gen(GenArgs),
    /// Run every identity suite on a frame file.
    Verify(VerifyArgs),
    /// Estimate frame constants and conditioning.
    Analyze(AnalyzeArgs),
    /// Search for the empirical minimum of the bound ratio.
    Search(SearchArgs),
}

#[derive(Args)]
struct Output {
    /// Report (or, for gen, frame file) destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render aligned tables on stdout.
    #[arg(long)]
    human: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

/// `exhaustive` or a sample count.
#[derive(Clone, Copy)]
struct SubsetsArg(SubsetPolicy);

impl FromStr for SubsetsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "exhaustive" {
            return Ok(Self(SubsetPolicy::Exhaustive));
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(Self(SubsetPolicy::Sample(k))),
            _ => Err(format!("expected 'exhaustive' or a positive count, got '{s}'")),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    dim: usize,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, value_enum, default_value = "real")]
    field: FieldArg,
    /// Parsevalize the generated frame.
    #[arg(long)]
    parseval: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    subsets: Option<SubsetsArg>,
    /// Random points per subset.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long = "tol-rel", default_value_t = pasflab_core::identities::DEFAULT_TOL_REL)]
    tol_rel: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = CERTIFY_RESTARTS)]
    restarts: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SearchArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    subsets: Option<SubsetsArg>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Only accept iterates where the hypothesis holds.
    #[arg(long)]
    restricted: bool,
    #[command(flatten)]
    output: Output,
}

/// A failed run: message plus exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenerationFailed { .. } => EXIT_GENERATION,
            Error::NotParseval { .. } | Error::NotInvertible { .. } => EXIT_PRECONDITION,
            Error::InvalidExponent(_)
            | Error::ZeroDimension
            | Error::DimensionMismatch { .. }
            | Error::NonFinite
            | Error::ComplexInRealSpace
            | Error::EmptyFrame
            | Error::IndexOutOfRange { .. }
            | Error::Format(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match cli.command {
        Cmd::Gen(a) => gen(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Analyze(a) => analyze(a),
        Cmd::Search(a) => search(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Honours `PASFLAB_THREADS`; results do not depend on it.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("PASFLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("PASFLAB_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn path_string(p: &std::path::Path) -> String {
    p.display().to_string()
}

fn load(path: &std::path::Path) -> Result<Pasf, Failure> {
    Ok(load_frame(path)?)
}

fn tolerances(tol_rel: f64) -> Tolerances {
    Tolerances {
        tol_rel,
        parseval_tol_rel: PARSEVAL_TOL_REL,
        path_tol: PATH_TOL,
        lemma_tol: LEMMA_TOL,
        bound_slack: BOUND_SLACK,
    }
}

/// Writes the report to `--out` and/or stdout.
fn emit(report: &Report, out: &Output, report_to_file: bool) -> Result<(), Failure> {
    let json = report.to_json();
    match (&out.out, report_to_file) {
        (Some(path), true) => {
            std::fs::write(path, &json)
                .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            if out.human {
                print!("{}", report.to_human());
            }
        }
        _ => {
            if out.human {
                print!("{}", report.to_human());
            } else {
                print!("{json}");
            }
        }
    }
    Ok(())
}

fn gen(a: GenArgs) -> Result<u8, Failure> {
    let Some(path) = a.output.out.as_ref() else {
        return Err(Failure(EXIT_USAGE, "gen requires --out <frame file>".into()));
    };
    let field = Field::from(a.field);
    let space = SipSpace::new(a.dim, a.p, field)?;
    if a.n == 0 {
        return Err(Error::EmptyFrame.into());
    }
    if let Some(w) = space.conditioning_warning() {
        eprintln!("warning: {w}");
    }
    let frame = random_pasf(space, a.n, a.seed, a.parseval)?;
    save_frame(&frame, path)?;
    let summary = frame.certify(CERTIFY_RESTARTS, a.seed)?;

    let mut manifest = RunManifest::new(Command::Gen, a.seed);
    manifest.output = Some(path_string(path));
    manifest.frame = Some(FrameParams {
        p: a.p,
        dim: a.dim,
        n: a.n,
        field,
        parseval: a.parseval,
    });
    let report = Report {
        manifest,
        results: vec![ResultEntry::Frame(Named {
            suite: "frame_report",
            body: summary,
        })],
        replay_frame: None,
    };
    emit(&report, &a.output, false)?;
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let frame = load(&a.input)?;
    let config = VerifyConfig {
        subsets: a.subsets.map(|s| s.0),
        samples: a.samples,
        seed: a.seed,
        tol_rel: a.tol_rel,
    };
    let suites = run_suites(&frame, &config)?;
    let failed = suites.iter().any(|s| !s.passed());

    let mut manifest = RunManifest::new(Command::Verify, a.seed);
    manifest.input = Some(path_string(&a.input));
    manifest.output = a.output.out.as_deref().map(path_string);
    manifest.subsets = Some(config.policy(frame.len()));
    manifest.tolerances = Some(tolerances(a.tol_rel));
    manifest.budget = Some(Budget {
        samples: Some(a.samples),
        restarts: None,
        max_iters: None,
        restricted: None,
        step_init: None,
        tol_step: None,
    });
    let report = Report {
        manifest,
        results: suites.into_iter().map(ResultEntry::Suite).collect(),
        replay_frame: failed.then(|| FrameFile::from_frame(&frame)),
    };
    emit(&report, &a.output, true)?;
    Ok(if failed { EXIT_FAIL } else { 0 })
}

fn analyze(a: AnalyzeArgs) -> Result<u8, Failure> {
    let frame = load(&a.input)?;
    if a.restarts == 0 {
        return Err(Failure(EXIT_USAGE, "--restarts must be at least 1".into()));
    }
    let summary = frame.certify(a.restarts, a.seed)?;
    let mut manifest = RunManifest::new(Command::Analyze, a.seed);
    manifest.input = Some(path_string(&a.input));
    manifest.output = a.output.out.as_deref().map(path_string);
    manifest.budget = Some(Budget {
        samples: None,
        restarts: Some(a.restarts),
        max_iters: None,
        restricted: None,
        step_init: None,
        tol_step: None,
    });
    let report = Report {
        manifest,
        results: vec![ResultEntry::Frame(Named {
            suite: "frame_report",
            body: summary,
        })],
        replay_frame: None,
    };
    emit(&report, &a.output, true)?;
    Ok(0)
}

fn search(a: SearchArgs) -> Result<u8, Failure> {
    let frame = load(&a.input)?;
    if a.restarts == 0 || a.iters == 0 {
        return Err(Failure(EXIT_USAGE, "--restarts and --iters must be at least 1".into()));
    }
    let config = SearchConfig {
        restarts: a.restarts,
        max_iters: a.iters,
        seed: a.seed,
        restricted: a.restricted,
        subsets: a.subsets.map(|s| s.0),
        ..SearchConfig::default()
    };
    let outcome = minimize_ratio(&frame, &config)?;
    let hilbert = frame.space().is_hilbert();
    let violation = if hilbert {
        None
    } else {
        Some(find_hypothesis_violation(&frame, &config)?)
    };
    // The bound is only asserted where it is guaranteed: p = 2, or any p at
    // an optimum where the hypothesis holds.
    let asserted = hilbert || outcome.hypothesis_value_at_best >= -1e-10;
    let failed = asserted && outcome.best_ratio < 0.75 - BOUND_SLACK;

    let mut manifest = RunManifest::new(Command::Search, a.seed);
    manifest.input = Some(path_string(&a.input));
    manifest.output = a.output.out.as_deref().map(path_string);
    manifest.subsets = Some(config.subsets.unwrap_or_else(|| {
        SubsetPolicy::auto(
            frame.len(),
            pasflab_core::search::EXHAUSTIVE_SEARCH_LIMIT,
            pasflab_core::search::SAMPLED_SUBSETS,
        )
    }));
    manifest.budget = Some(Budget {
        samples: None,
        restarts: Some(a.restarts),
        max_iters: Some(a.iters),
        restricted: Some(a.restricted),
        step_init: Some(config.step_init),
        tol_step: Some(config.tol_step),
    });
    let report = Report {
        manifest,
        results: vec![ResultEntry::Search(Named {
            suite: "search",
            body: SearchRecord {
                label: "empirical_minimum",
                restricted: a.restricted,
                outcome,
                hypothesis_violation: violation,
            },
        })],
        replay_frame: failed.then(|| FrameFile::from_frame(&frame)),
    };
    emit(&report, &a.output, true)?;
    Ok(if failed { EXIT_FAIL } else { 0 })
}
