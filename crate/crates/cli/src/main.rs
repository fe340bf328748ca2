use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hasseforge::scenario::{builtins, explain, run_many, RunOptions, RunReport, Scenario, ScenarioError};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hasseforge", version, about = "Iterative derivations on function fields and central simple algebras")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run scenario configs (`path.json`, `builtin:<name>` or `builtin:all`).
    Run {
        #[arg(required = true)]
        configs: Vec<String>,
        /// Overrides the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the JSON report to this path.
        #[arg(long)]
        out: Option<String>,
        /// Run the scenarios concurrently.
        #[arg(long)]
        parallel: bool,
        /// Global truncation order N.
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// List the built-in scenarios.
    List,
    /// Show what a built-in scenario checks.
    Explain { name: String },
}

fn config_error(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn load(configs: &[String]) -> Result<Vec<Scenario>, ScenarioError> {
    let mut out = Vec::new();
    for c in configs {
        if c == "builtin:all" {
            out.extend(builtins().iter().map(|b| b.scenario()));
        } else {
            out.push(Scenario::from_path(c)?);
        }
    }
    Ok(out)
}

fn run(format: Format, configs: &[String], opts: RunOptions, out: Option<&str>, parallel: bool) -> ExitCode {
    let scenarios = match load(configs) {
        Ok(s) => s,
        Err(e) => return config_error(&e),
    };
    let mut reports: Vec<RunReport> = Vec::new();
    for (_, r) in run_many(&scenarios, &opts, parallel) {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => return config_error(&e),
        }
    }
    let all_passed = reports.iter().all(RunReport::passed);
    let json_text = if reports.len() == 1 {
        reports[0].to_json_string()
    } else {
        let v = json!({"reports": reports.iter().map(RunReport::to_json).collect::<Vec<_>>(), "all_passed": all_passed});
        serde_json::to_string_pretty(&v).expect("serializable")
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, format!("{json_text}\n")) {
            eprintln!("error: cannot write {path}: {e}");
            return ExitCode::from(2);
        }
    }
    match format {
        Format::Json => println!("{json_text}"),
        Format::Text => {
            for r in &reports {
                print!("{}", r.render_text());
            }
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HASSEFORGE_LOG", "error")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { configs, seed, out, parallel, trunc } => run(cli.format, &configs, RunOptions { seed, trunc }, out.as_deref(), parallel),
        Command::List => {
            match cli.format {
                Format::Json => {
                    let v: Vec<_> = builtins().iter().map(|b| json!({"name": b.name, "summary": b.summary})).collect();
                    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Format::Text => {
                    for b in builtins() {
                        println!("{:<28} {}", b.name, b.summary);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Command::Explain { name } => match explain(&name) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => config_error(&e),
        },
    }
}
