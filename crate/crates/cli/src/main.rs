use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hyperstab_cli::commands::{Ctx, Output};
use hyperstab_cli::{emit_table, exit_code, run, write_files, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "hyperstab", version, about = "Exact experiments on Turán-type problems for hypergraphs")]
struct Cli {
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on stored representatives during enumeration.
    #[arg(long, global = true)]
    max_graphs: Option<usize>,
    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand)]
enum Top {
    #[command(flatten)]
    Plain(Command),
    /// Run an experiment config and print its result record.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Record wall time in the result (makes records differ between runs).
    #[arg(long)]
    timing: bool,
}

fn print(out: &Output, json: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(json)?);
    for (k, v) in &out.summary {
        eprintln!("{k:>20}  {v}");
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match cli.command {
        Top::Plain(cmd) => {
            let ctx = Ctx { seed: cli.seed, max_graphs: cli.max_graphs };
            let out = cmd.execute(&ctx)?;
            write_files(&out.files)?;
            print(&out, &out.json)?;
            Ok(out.failed_clean)
        }
        Top::Run(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            let (record, out) = run(&config, a.timing)?;
            write_files(&out.files)?;
            let json = serde_json::to_value(&record)?;
            let mut extra = Vec::new();
            if let Some(p) = config.outputs.get("record") {
                extra.push((PathBuf::from(p), serde_json::to_string_pretty(&json)? + "\n"));
            }
            if let Some(p) = config.outputs.get("table") {
                extra.push((PathBuf::from(p), emit_table(std::slice::from_ref(&record))?));
            }
            write_files(&extra)?;
            print(&out, &json)?;
            Ok(out.failed_clean)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("counterexample found");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
