use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bigaction::cache::{write_atomic, CACHE_ENV};
use bigaction::genus::CoverClass;
use bigaction::report::{run, Command, Report, RunConfig, Session, DEFAULT_SAMPLES, DEFAULT_SEED};
use bigaction::{Error, Params};

#[derive(Parser, Debug)]
#[command(name = "bigaction", version, about = "Verify the big-action tower over F_q(x): conductors, genera, automorphisms")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Odd prime p.
    #[arg(long, global = true, default_value_t = 3)]
    p: u32,

    /// Exponent s, with q0 = p^s and q = p q0^2.
    #[arg(long, global = true, default_value_t = 2)]
    s: u32,

    /// Random lines checked per class.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Seed of the line sampler.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (default: all cores). Does not affect the report.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Full verification run.
    Verify,
    /// Conductor of one class of degree-p subextensions.
    Conductor {
        /// y2, v1', v2', w, y1-over-K or ree-line
        #[arg(long)]
        class: String,
    },
    /// Genera and the big-action verdict.
    Genus,
    /// Commutators of the sigma and tau automorphisms.
    Commutators,
    /// Prolongation of x -> x + a.
    Prolong {
        /// Coordinates of a in the power basis, comma separated (e.g. 1,0,2).
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Closed-form values against computed ones.
    Audit,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_coords(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad coordinate `{c}`: {e}")))
        .collect()
}

fn emit(report: &Report, args: &RunArgs) -> std::io::Result<()> {
    let text = match args.format {
        Format::Json => report.to_json_string(),
        Format::Md => report.to_markdown(),
    };
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(|e| std::io::Error::other(e.to_string())),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn write_timings(session: &Session, args: &RunArgs) {
    let stages: Vec<String> = session.timings().iter().map(|(k, v)| format!("{k}={v:.3}s")).collect();
    eprintln!("timings: {} (cache: {:?})", stages.join(" "), session.cache_status());
    if let Some(out) = &args.out {
        let mut path = out.clone().into_os_string();
        path.push(".timings.json");
        let body = serde_json::json!({
            "cache": format!("{:?}", session.cache_status()),
            "stages": session.timings().iter().map(|(k, v)| serde_json::json!([k, v])).collect::<Vec<_>>(),
        });
        if let Err(e) = write_atomic(PathBuf::from(path).as_path(), body.to_string().as_bytes()) {
            eprintln!("warning: could not write timings: {e}");
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args = cli.run;
    let params = match Params::new(args.p, args.s) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let command = match cli.command {
        Cmd::Verify => Command::Verify,
        Cmd::Conductor { class } => match CoverClass::from_label(&class) {
            Some(c) => Command::Conductor(c),
            None => return usage(format!("unknown class `{class}`")),
        },
        Cmd::Genus => Command::Genus,
        Cmd::Commutators => Command::Commutators,
        Cmd::Prolong { a } => match parse_coords(&a) {
            Ok(c) => Command::Prolong(c),
            Err(e) => return usage(e),
        },
        Cmd::Audit => Command::Audit,
    };
    if let Some(n) = args.threads {
        if n == 0 {
            return usage("--threads must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return usage(e);
        }
    }

    let config = RunConfig {
        params,
        samples: args.samples,
        seed: args.seed,
        cache_dir: args.cache_dir.clone(),
    };
    let mut session = match Session::new(config) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let report = match run(&mut session, &command) {
        Ok(r) => r,
        Err(e @ (Error::Parameter(_) | Error::Unsupported(_))) => return usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_integrity() { 1 } else { 2 });
        }
    };
    for note in session.notes() {
        eprintln!("warning: {note}");
    }
    write_timings(&session, &args);
    if let Err(e) = emit(&report, &args) {
        eprintln!("error: could not write report: {e}");
        return ExitCode::from(2);
    }
    for f in &report.integrity_failures {
        eprintln!("INTEGRITY FAILURE: {f}");
    }
    ExitCode::from(report.exit_code() as u8)
}
