//! `hkt` command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a verification check failed, 2 input
//! error (bad arguments, unreadable or malformed entry file, unknown entry),
//! 3 internal failure of a computation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hkt::catalog::{self, CatalogEntry, CatalogError};
use hkt::check::Check;
use hkt::scalar::{set_float_tolerance, DEFAULT_TOLERANCE};
use hkt::verify::{self, Classification, Options, VerifyError};
use hkt::{Exact, Float, Scalar};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "hkt", version, about = "Classify and verify invariant Hermitian and HKT structures on Lie algebras")]
struct Cli {
    /// Arithmetic: exact rationals with one square root, or f64 with a tolerance.
    #[arg(long, value_enum, default_value_t = Mode::Exact, global = true)]
    mode: Mode,
    /// Comparison tolerance in float mode (decimal such as 1e-9, or a rational p/q).
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = parse_tol, global = true)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Run the 8-dimensional structure analysis (observed mode) on entries
    /// that do not meet its gating flags.
    #[arg(long, global = true)]
    force_structure8: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flags, Lee form, |H|², Bismut holonomy and the structure report of one entry.
    Classify {
        /// Entry file (or built-in entry name).
        file: String,
    },
    /// Run the full verification suite.
    Verify {
        /// Verify every built-in entry.
        #[arg(long)]
        all: bool,
        /// Built-in entry names or entry files.
        targets: Vec<String>,
    },
    /// List or export built-in entries.
    Catalog {
        #[command(subcommand)]
        action: Option<CatalogAction>,
    },
    /// Write the product of two entries to a file.
    Product { a: String, b: String, out: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Export { name: String, path: PathBuf },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v = if s.contains('/') {
        s.parse::<Exact>().map_err(|e| e.to_string())?.to_f64()
    } else {
        s.parse::<f64>().map_err(|e| e.to_string())?
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

/// Why a run stopped early.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Internal(e.to_string())
    }
}

/// A file path if it exists (or looks like one), otherwise a catalog name.
fn resolve(target: &str) -> Result<CatalogEntry<Exact>, Failure> {
    let p = Path::new(target);
    if p.exists() || target.ends_with(".json") || target.contains(std::path::MAIN_SEPARATOR) {
        Ok(catalog::load_entry(p)?)
    } else {
        Ok(catalog::find(target)?)
    }
}

struct Outcome {
    output: String,
    failed: bool,
}

fn render<S: Scalar>(format: Format, items: &[(Classification<S>, Vec<Check<S>>)]) -> String {
    match format {
        Format::Json => {
            let refs: Vec<(&Classification<S>, &[Check<S>])> = items.iter().map(|(c, k)| (c, k.as_slice())).collect();
            let doc = verify::document_json(TOOL_VERSION, &refs);
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut s: String = items.iter().map(|(c, k)| verify::entry_text(c, k)).collect::<Vec<_>>().join("\n");
            let total: usize = items.iter().map(|(_, k)| k.len()).sum();
            let failed: usize = items.iter().map(|(_, k)| k.iter().filter(|c| c.failed()).count()).sum();
            s.push_str(&format!("\n{} entries, {} checks, {} failed\n", items.len(), total, failed));
            s
        }
    }
}

fn classify_in<S: Scalar>(e: &CatalogEntry<S>, opts: Options, format: Format) -> Result<Outcome, Failure> {
    let c = verify::classify_entry(e, opts)?;
    let checks: Vec<Check<S>> = c.structure8.as_ref().map(|r| r.checks.clone()).unwrap_or_default();
    let failed = checks.iter().any(|k| k.failed());
    Ok(Outcome {
        output: render(format, &[(c, checks)]),
        failed,
    })
}

fn verify_in<S: Scalar>(entries: &[CatalogEntry<S>], opts: Options, format: Format) -> Result<Outcome, Failure> {
    let mut items = Vec::new();
    for r in verify::verify_all(entries, opts) {
        let r = r?;
        items.push((r.classification, r.checks));
    }
    let failed = items.iter().any(|(_, k)| k.iter().any(|c| c.failed()));
    Ok(Outcome {
        output: render(format, &items),
        failed,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let opts = Options {
        force_structure8: cli.force_structure8,
    };
    let float = cli.mode == Mode::Float;
    match &cli.command {
        Command::Classify { file } => {
            let e = resolve(file)?;
            if float {
                classify_in::<Float>(&e.to_float(), opts, cli.format)
            } else {
                classify_in::<Exact>(&e, opts, cli.format)
            }
        }
        Command::Verify { all, targets } => {
            let mut entries = Vec::new();
            if *all {
                entries.extend(catalog::standard_entries());
            }
            for t in targets {
                entries.push(resolve(t)?);
            }
            if entries.is_empty() {
                return Err(Failure::Input("verify needs --all or at least one entry name or file".into()));
            }
            if float {
                let fl: Vec<CatalogEntry<Float>> = entries.iter().map(|e| e.to_float()).collect();
                verify_in(&fl, opts, cli.format)
            } else {
                verify_in(&entries, opts, cli.format)
            }
        }
        Command::Catalog { action } => match action.as_ref().unwrap_or(&CatalogAction::List) {
            CatalogAction::List => Ok(Outcome {
                output: catalog_list(cli.format),
                failed: false,
            }),
            CatalogAction::Export { name, path } => {
                let e = catalog::find(name)?;
                catalog::save_entry(&e, path)?;
                Ok(Outcome {
                    output: written(cli.format, &e.name, path),
                    failed: false,
                })
            }
        },
        Command::Product { a, b, out } => {
            let (ea, eb) = (resolve(a)?, resolve(b)?);
            let p = catalog::product(&ea, &eb)?;
            catalog::save_entry(&p, out)?;
            Ok(Outcome {
                output: written(cli.format, &p.name, out),
                failed: false,
            })
        }
    }
}

fn catalog_list(format: Format) -> String {
    let entries = catalog::standard_entries();
    match format {
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "dim": e.dim(),
                        "kind": if e.is_hyper() { "hyper-hermitian" } else { "hermitian" },
                        "expected": e.expected,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({"tool_version": TOOL_VERSION, "entries": list})).expect("serializable") + "\n"
        }
        Format::Text => entries
            .iter()
            .map(|e| {
                let exp: Vec<String> = e.expected.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("{:<28} dim {:<2} {}\n", e.name, e.dim(), exp.join(" "))
            })
            .collect(),
    }
}

fn written(format: Format, name: &str, path: &Path) -> String {
    match format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({"tool_version": TOOL_VERSION, "written": {"name": name, "path": path.display().to_string()}}))
                .expect("serializable")
                + "\n"
        }
        Format::Text => format!("wrote {} to {}\n", name, path.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.mode == Mode::Float {
        set_float_tolerance(cli.tol);
    }
    match hkt::par::with_jobs(cli.jobs, || run(&cli)) {
        Ok(o) => {
            print!("{}", o.output);
            if o.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
