use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ms3::catalog;
use ms3::equivalence::{explain_equivalence, Verdict};
use ms3::format::{parse_flow, parse_flow_unvalidated, parse_framing, parse_ms_graph, serialize};
use ms3::framed::{classify, framings_equivalent, oracle_equivalent, Framing, GraphType};
use ms3::model::validate_presentation;

const INVALID: u8 = 2;
const ORACLE_DISAGREES: u8 = 3;

#[derive(Parser)]
#[command(name = "ms3", version, about = "Equivalence of Morse-Smale flows on 3-manifolds from their presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two presentations describe equivalent flows.
    Check { a: PathBuf, b: PathBuf },
    /// Report every violated structural invariant.
    Validate { file: PathBuf },
    /// Print the deterministic serialization.
    Canon { file: PathBuf },
    /// Built-in presentations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Framed MS-graphs.
    Framed {
        #[command(subcommand)]
        action: FramedAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Emit { key: String },
}

#[derive(Subcommand)]
enum FramedAction {
    /// Compare two framings of one graph.
    Check {
        graph: PathBuf,
        f1: PathBuf,
        f2: PathBuf,
        /// Cross-check by exhaustive search; clamp defaults to
        /// $MS3_ORACLE_BOUND or 4x the largest finite value.
        #[arg(long, num_args = 0..=1, value_name = "BOUND")]
        oracle: Option<Option<i64>>,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INVALID)
}

fn load(path: &Path) -> Result<ms3::FlowPresentation, String> {
    let text = read(path)?;
    parse_flow(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn check(a: &Path, b: &Path) -> ExitCode {
    let (p1, p2) = match (load(a), load(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return invalid(e),
    };
    match explain_equivalence(&p1, &p2) {
        Ok(Verdict::Equivalent(iso)) => {
            println!("equivalent");
            print!("{iso}");
            ExitCode::SUCCESS
        }
        Ok(Verdict::Inequivalent(m)) => {
            println!("not equivalent");
            println!("failing criterion: {m}");
            ExitCode::from(1)
        }
        Err(e) => invalid(e),
    }
}

fn validate(path: &Path) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return invalid(e),
    };
    match parse_flow_unvalidated(&text) {
        Ok(p) => {
            let report = validate_presentation(&p);
            if report.is_empty() {
                println!("valid");
                ExitCode::SUCCESS
            } else {
                print!("{report}");
                ExitCode::from(1)
            }
        }
        Err(e) => invalid(format!("{}: {e}", path.display())),
    }
}

fn default_bound(f1: &Framing, f2: &Framing) -> Result<i64, String> {
    if let Ok(v) = std::env::var("MS3_ORACLE_BOUND") {
        return v.trim().parse().map_err(|_| format!("MS3_ORACLE_BOUND must be an integer, got `{v}`"));
    }
    let max = f1.values().iter().chain(f2.values()).filter_map(|v| v.finite()).map(i64::abs).max().unwrap_or(0);
    Ok(4 * max.max(1))
}

fn framed_check(graph: &Path, f1: &Path, f2: &Path, oracle: Option<Option<i64>>) -> ExitCode {
    let loaded = (|| {
        let g = parse_ms_graph(&read(graph)?).map_err(|e| format!("{}: {e}", graph.display()))?;
        let a = parse_framing(&read(f1)?, &g).map_err(|e| format!("{}: {e}", f1.display()))?;
        let b = parse_framing(&read(f2)?, &g).map_err(|e| format!("{}: {e}", f2.display()))?;
        Ok::<_, String>((g, a, b))
    })();
    let (g, a, b) = match loaded {
        Ok(x) => x,
        Err(e) => return invalid(e),
    };
    for (i, c) in classify(&g).iter().enumerate() {
        let ids: Vec<&str> = c.edges.iter().map(|&e| g.edges()[e].id.as_str()).collect();
        let groups = match &c.kind {
            GraphType::Type3 { first, second } => {
                let name = |s: &[usize]| s.iter().map(|&e| g.edges()[e].id.as_str()).collect::<Vec<_>>().join(" ");
                format!(" groups [{}] [{}]", name(first), name(second))
            }
            _ => String::new(),
        };
        println!("component {}: type {} edges [{}]{groups}", i + 1, c.kind.number(), ids.join(" "));
    }
    let verdict = match framings_equivalent(&g, &a, &b) {
        Ok(v) => v,
        Err(e) => return invalid(e),
    };
    println!("lemmas: {}", if verdict { "equivalent" } else { "not equivalent" });
    if let Some(bound) = oracle {
        let bound = match bound.map_or_else(|| default_bound(&a, &b), Ok) {
            Ok(b) => b,
            Err(e) => return invalid(e),
        };
        let reached = match oracle_equivalent(&g, &a, &b, bound) {
            Ok(v) => v,
            Err(e) => return invalid(e),
        };
        println!("oracle (bound {bound}): {}", if reached { "equivalent" } else { "not equivalent" });
        if reached != verdict {
            eprintln!("oracle disagrees with the lemma verdict");
            return ExitCode::from(ORACLE_DISAGREES);
        }
    }
    if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { a, b } => check(&a, &b),
        Command::Validate { file } => validate(&file),
        Command::Canon { file } => match load(&file) {
            Ok(p) => {
                print!("{}", serialize(&p));
                ExitCode::SUCCESS
            }
            Err(e) => invalid(e),
        },
        Command::Catalog { action: CatalogAction::List } => {
            for key in catalog::list_keys() {
                println!("{key}");
            }
            ExitCode::SUCCESS
        }
        Command::Catalog { action: CatalogAction::Emit { key } } => match catalog::emit(&key) {
            Ok(p) => {
                print!("{}", serialize(&p));
                ExitCode::SUCCESS
            }
            Err(e) => invalid(e),
        },
        Command::Framed { action: FramedAction::Check { graph, f1, f2, oracle } } => framed_check(&graph, &f1, &f2, oracle),
    }
}
