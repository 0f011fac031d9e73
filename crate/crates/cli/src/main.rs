use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pentail::rules::format_reports;
use pentail_cli::{parse_problem, render_text, run_problem, run_rules, Options, ProblemFile, Verbosity};

#[derive(Parser)]
#[command(name = "pentail", version, about = "Coherence checking and p-entailment for conditional events")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report detail: brief, normal or full.
    #[arg(long, global = true, env = "PENTAIL_VERBOSITY", default_value = "normal")]
    verbosity: Verbosity,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a problem file and report syntax errors without running it.
    Check { file: PathBuf },
    /// Run the queries of a problem file, or verify builtin rules.
    Run {
        file: Option<PathBuf>,
        /// Builtin rule to verify (`all` for every rule); may repeat.
        #[arg(long = "rules")]
        rules: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Verify builtin inference rules (all of them by default).
    Rules {
        names: Vec<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct Output {
    /// Emit the report stream as JSON.
    #[arg(long)]
    json: bool,
    /// Include value tables of the quantities involved.
    #[arg(long)]
    table: bool,
    /// Refuse queries over more atoms than this.
    #[arg(long, default_value_t = 8)]
    max_atoms: usize,
}

fn load(path: &PathBuf) -> Result<ProblemFile, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(2)
    })?;
    parse_problem(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        ExitCode::from(2)
    })
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn rules(names: &[String], json: bool) -> ExitCode {
    match run_rules(names) {
        Ok(reports) => {
            if json {
                print_json(&reports);
            } else {
                print!("{}", format_reports(&reports));
            }
            if reports.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file } => match load(&file) {
            Ok(p) => {
                println!("{}: {} atoms, {} conditionals, {} queries", file.display(), p.atoms.len(), p.conds.len(), p.queries.len());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Rules { names, json } => rules(&names, json),
        Command::Run { file: None, rules: names, output } if !names.is_empty() => rules(&names, output.json),
        Command::Run { file: None, .. } => {
            eprintln!("nothing to run: give a problem file or --rules");
            ExitCode::from(2)
        }
        Command::Run { file: Some(file), rules: names, output } => {
            if !names.is_empty() {
                eprintln!("--rules cannot be combined with a problem file");
                return ExitCode::from(2);
            }
            let problem = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let opts = Options { max_atoms: output.max_atoms, tables: output.table, verbosity: cli.verbosity };
            let reports = run_problem(&problem, &opts);
            if output.json {
                print_json(&reports);
            } else {
                print!("{}", render_text(&reports, opts.verbosity));
            }
            if reports.iter().any(|r| r.failed()) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
