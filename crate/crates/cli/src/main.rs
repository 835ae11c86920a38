//! Command-line front end: parse an ultragraph description and run one of
//! the analyses on it.
//!
//! Exit codes: 0 success, 1 a property check failed, 2 bad input.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ultralpa::assocgraph::{build_assoc_graph, check_lemmas};
use ultralpa::classifier::{classify, exit_json, path_json};
use ultralpa::dsl::{self, Spec};
use ultralpa::engine::cross_check;
use ultralpa::paths;
use ultralpa::{corpus, Error, Ultragraph};

// a closed pipe (`| head`) is not an error worth a panic
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "ultralpa",
    version,
    about = "Rickart and Baer properties of ultragraph Leavitt path algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the description parses and describes a valid ultragraph.
    Validate { file: String },
    /// Classify the algebra; prints a JSON report.
    Report { file: String },
    /// Build the associated graph; prints a summary line and DOT.
    Construct {
        file: String,
        /// Render concrete vertices below this bound.
        #[arg(long, default_value_t = 8)]
        window: u64,
        /// Print the Δ structure as JSON instead of DOT.
        #[arg(long)]
        json: bool,
    },
    /// Paths up to a length, cycles, exits, and the infinite-path condition.
    Paths {
        file: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 8)]
        window: u64,
    },
    /// Cross-check the classifier against the exact matrix model.
    Oracle {
        file: String,
        #[arg(long, default_value_t = 100)]
        subsets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the associated-graph biconditionals on random ultragraphs.
    Corpus {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Check(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_input(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))
    }
}

fn load(file: &str) -> Result<Spec, Failure> {
    let text = read_input(file)?;
    dsl::parse(&text).map_err(|e| Failure::Input(format!("{file}:{e}")))
}

fn load_valid(file: &str) -> Result<Spec, Failure> {
    let spec = load(file)?;
    if let Err(vs) = spec.graph.validate() {
        let lines: Vec<String> = vs.iter().map(ToString::to_string).collect();
        return Err(Failure::Input(lines.join("\n")));
    }
    Ok(spec)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn paths_report(g: &Ultragraph, max_len: usize, window: u64) -> Value {
    let cycles = paths::find_cycles(g);
    let from: Vec<Value> = (0..window)
        .filter(|&v| g.universe.contains(v))
        .map(|v| {
            let ps: Vec<Value> = paths::enumerate_paths(g, v, max_len)
                .iter()
                .map(|p| path_json(g, p))
                .collect();
            json!({ "vertex": v, "paths": ps })
        })
        .collect();
    let cycles_json: Vec<Value> = cycles
        .iter()
        .map(|c| {
            let exits: Vec<Value> = paths::exits_of(g, c).iter().map(|x| exit_json(g, x)).collect();
            json!({ "cycle": path_json(g, c), "exits": exits })
        })
        .collect();
    json!({
        "max_len": max_len,
        "window": window,
        "paths_from": from,
        "cycles": cycles_json,
        "no_exit": paths::is_no_exit(g),
        "infinite_paths_end_in_sink_or_cycle": paths::infinite_paths_end_in_sink_or_cycle(g),
        "infinite_path_witness": paths::infinite_path_witness(g),
    })
}

fn run(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Validate { file } => {
            let spec = load_valid(&file)?;
            out!(
                "ok: {} edge(s), vertices {}, ring {}",
                spec.graph.edges.len(),
                spec.graph.universe,
                spec.ring
            );
        }
        Command::Report { file } => {
            let spec = load_valid(&file)?;
            let report = classify(&spec.graph, &spec.ring)?;
            out!("{}", pretty(&serde_json::to_value(&report).expect("plain data")));
        }
        Command::Construct { file, window, json } => {
            let spec = load_valid(&file)?;
            let e = build_assoc_graph(&spec.graph)?;
            if json {
                out!("{}", pretty(&e.delta.to_json()));
            } else {
                let summary = if e.delta.is_empty() {
                    "Δ = ∅; E = edge splitting".to_string()
                } else {
                    format!("|Δ| = {}; E adds one vertex per word of Δ", e.delta.len())
                };
                out!("{summary}");
                let _ = write!(io::stdout(), "{}", e.to_dot(window));
            }
        }
        Command::Paths { file, max_len, window } => {
            let spec = load_valid(&file)?;
            out!("{}", pretty(&paths_report(&spec.graph, max_len, window)));
        }
        Command::Oracle { file, subsets, seed } => {
            let spec = load_valid(&file)?;
            let mut ok = true;
            for &field in &spec.ring.factors {
                let r = cross_check(&spec.graph, field, subsets, seed)?;
                out!("{field}: {}", r.summary());
                for f in &r.failures {
                    out!("  {f}");
                }
                ok &= r.agree;
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Corpus { count, seed } => {
            let mut disagreements = 0;
            for (i, g) in corpus::random_corpus(seed, count).iter().enumerate() {
                let e = build_assoc_graph(g)?;
                for c in check_lemmas(&e) {
                    if !c.agree {
                        disagreements += 1;
                        out!(
                            "instance {i}: {} left={} right={}{}",
                            c.name,
                            c.left,
                            c.right,
                            c.note.map(|n| format!(" ({n})")).unwrap_or_default()
                        );
                    }
                }
            }
            out!("{count} instances, {disagreements} disagreement(s)");
            if disagreements > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
