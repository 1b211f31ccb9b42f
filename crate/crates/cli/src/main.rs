//! `goodform`: command-line front end.
//!
//! Every analysis command reads one module description (JSON), runs the
//! analysis and writes a report.  Exit codes: 0 success, 1 mathematical
//! failure (for instance an algebraic extension would be needed), 2 input
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use goodform::corpus::Corpus;
use goodform::report::{render_json, AnalysisOptions, Command, Failure, Report, REPORT_SCHEMA, TOOL_VERSION};
use goodform::selftest;
use goodform::Error;

/// Environment variable naming a corpus directory for `selftest`.
const CORPUS_ENV: &str = "GOODFORM_CORPUS";

#[derive(Parser)]
#[command(name = "goodform", version, about = "Exact analysis of formal differential modules")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check integrability of the connection.
    CheckFlat(Analysis),
    /// One-variable decomposition into E(phi) ⊗ regular summands.
    Hlt(Analysis),
    /// Partial irregularity functions on the weight cone.
    Irregularity(Analysis),
    /// Good-decomposition criterion, with any claims in the input checked.
    Criterion(Analysis),
    /// Skeleton of the irregularity function on the valuative tree.
    Skeleton(Analysis),
    /// Blowup plan resolving turning points.
    Plan(Analysis),
    /// Run the acceptance checks on the bundled (or given) corpus.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct Analysis {
    /// Module description: a module object or {"module": ..., "claims": [...]}.
    input: PathBuf,
    /// Target series precision (at most 256).
    #[arg(long, default_value_t = 16)]
    precision: i64,
    /// Largest ramification index (at most 64).
    #[arg(long, default_value_t = 12)]
    h_max: u32,
    /// Largest radius explored by skeleton searches.
    #[arg(long, default_value_t = 64)]
    q_max: u32,
    /// Seed of the randomized cyclic-vector search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SelftestArgs {
    /// Corpus directory (default: the bundled corpus, or $GOODFORM_CORPUS).
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

fn emit(out: &Output, text: &str) -> Result<(), String> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn analysis(cmd: Command, a: &Analysis) -> i32 {
    let opts = AnalysisOptions { precision: a.precision, h_max: a.h_max, q_max: a.q_max, seed: a.seed };
    let name = a.input.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let report = match fs::read_to_string(&a.input) {
        Ok(text) => Report::run(cmd, &name, &text, &opts),
        Err(e) => Report {
            command: cmd.name().to_string(),
            input: json!({"name": name, "sha256": null}),
            options: opts.to_json(),
            outcome: Err(Failure::new(
                Error::Input(format!("cannot read {}: {e}", a.input.display())),
                "input",
                "read",
            )),
        },
    };
    let text = match a.out.format {
        Format::Json => report.render_json(),
        Format::Text => report.render_text(),
    };
    if let Err(e) = emit(&a.out, &text) {
        eprintln!("goodform: {e}");
        return 2;
    }
    if let Err(f) = &report.outcome {
        eprintln!("goodform: {} ({}::{})", f.error, f.module, f.operation);
    }
    report.exit_code()
}

fn load_corpus(dir: Option<&Path>) -> Result<(Corpus, String), Error> {
    match dir {
        Some(d) => Ok((Corpus::from_dir(d)?, d.display().to_string())),
        None => Ok((Corpus::builtin(), "builtin".to_string())),
    }
}

fn run_selftest(a: &SelftestArgs) -> i32 {
    let dir = a.corpus.clone().or_else(|| std::env::var_os(CORPUS_ENV).map(PathBuf::from));
    let (corpus, source) = match load_corpus(dir.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let f = Failure::new(e, "corpus", "load");
            eprintln!("goodform: {}", f.error);
            let body = json!({
                "schema": REPORT_SCHEMA,
                "tool": {"name": "goodform", "version": TOOL_VERSION},
                "command": "selftest",
                "status": "input_error",
                "error": f.to_json(),
            });
            let _ = emit(&a.out, &render_json(&body));
            return f.exit_code();
        }
    };
    let outcomes = selftest::run(&corpus);
    let failed = outcomes.iter().filter(|o| o.is_unexpected_failure()).count();
    let text = match a.out.format {
        Format::Text => {
            let mut s: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            s.push_str(&format!(
                "{} of {} criteria passed; {failed} unexpected failure(s) (corpus: {source})\n",
                outcomes.iter().filter(|o| o.passed).count(),
                outcomes.len()
            ));
            s
        }
        Format::Json => render_json(&json!({
            "schema": REPORT_SCHEMA,
            "tool": {"name": "goodform", "version": TOOL_VERSION},
            "command": "selftest",
            "corpus": source,
            "status": if failed == 0 { "ok" } else { "math_failure" },
            "criteria": outcomes.iter().map(|o| json!({
                "id": o.id,
                "title": o.title,
                "passed": o.passed,
                "known_failure": o.known_failure,
                "detail": o.detail,
            })).collect::<Vec<_>>(),
        })),
    };
    if let Err(e) = emit(&a.out, &text) {
        eprintln!("goodform: {e}");
        return 2;
    }
    if failed == 0 {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Cmd::CheckFlat(a) => analysis(Command::CheckFlat, a),
        Cmd::Hlt(a) => analysis(Command::Hlt, a),
        Cmd::Irregularity(a) => analysis(Command::Irregularity, a),
        Cmd::Criterion(a) => analysis(Command::Criterion, a),
        Cmd::Skeleton(a) => analysis(Command::Skeleton, a),
        Cmd::Plan(a) => analysis(Command::Plan, a),
        Cmd::Selftest(a) => run_selftest(a),
    };
    ExitCode::from(code as u8)
}
