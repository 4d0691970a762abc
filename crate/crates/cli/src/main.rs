use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gibbsium_cli::experiments::descriptions;
use gibbsium_cli::{config, run, CliError, Overrides};

#[derive(Parser)]
#[command(name = "gibbsium", version, about = "Exact finite-volume lattice spin-system experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file and write its CSV tables.
    Run {
        config: PathBuf,
        /// Output directory (overrides `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides `jobs`).
        #[arg(long)]
        jobs: Option<usize>,
        /// Random seed (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config file and list every violated constraint.
    Validate { config: PathBuf },
    /// List the available experiments.
    ListExperiments,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config: path, out, jobs, seed } => {
            let overrides = Overrides { seed, jobs, out };
            let summary = config::load(&path, &overrides).and_then(|c| run(&c));
            match summary {
                Ok(s) => {
                    let files: Vec<String> = s.files.iter().map(|f| f.display().to_string()).collect();
                    println!(
                        "{}: {} rows in {} (config {})",
                        s.experiment,
                        s.rows,
                        files.join(", "),
                        &s.hash[..12]
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config: path } => {
            match config::load(&path, &Overrides::default()).and_then(|c| c.check().map(|_| c)) {
                Ok(c) => {
                    println!("ok: {}", c.experiment.name());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::ListExperiments => {
            for (name, about) in descriptions() {
                println!("{name:<20} {about}");
            }
            ExitCode::SUCCESS
        }
    }
}
