use std::path::PathBuf;
use std::process::ExitCode;

use bathforge_cli::{reproduce, run, CliError, FigureId, ScenarioConfig, EXIT_OK};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bathforge", version, about = "Run bath-engineering scenarios and figure presets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the sweep described by a JSON scenario file.
    Run { config: PathBuf },
    /// Run a bundled figure preset and check it against its acceptance bands.
    Reproduce {
        /// fig2, fig3, fig7d, fig16 or fig17.
        figure: String,
        /// Output directory (default: figures/<figure>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file against the schema without running it.
    Validate { config: PathBuf },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match ScenarioConfig::load(&config) {
            Ok(c) => {
                println!("ok: {} scenario, {} grid points", c.kind, c.grid().len());
                ExitCode::from(EXIT_OK)
            }
            Err(e) => fail(e),
        },
        Command::Run { config } => {
            let outcome = match ScenarioConfig::load(&config).and_then(|c| run(&c)) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            for e in &outcome.errors {
                eprintln!("point {}: {}", e.point, e.error);
            }
            println!(
                "{} of {} points succeeded; {} files recorded in manifest.json",
                outcome.points - outcome.errors.len(),
                outcome.points,
                outcome.manifest.files.len()
            );
            ExitCode::from(outcome.exit_code())
        }
        Command::Reproduce { figure, out } => {
            let id: FigureId = match figure.parse() {
                Ok(id) => id,
                Err(e) => return fail(e),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("figures").join(id.name()));
            let outcome = match reproduce(id, &dir) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            for c in &outcome.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if !outcome.passed() {
                let failed: Vec<&str> = outcome.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                eprintln!("{id} failed: {}", failed.join("; "));
            }
            ExitCode::from(outcome.exit_code())
        }
    }
}
