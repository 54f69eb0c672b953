use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kinklab::config::Initial;
use kinklab::heatmap::{emit_heatmap, FieldSel};
use kinklab::{
    checkpoint, converge, parse_config, ripples, run_scenario, verify, LabError, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "kinklab",
    version,
    about = "Kinks, vortices and interfaces of the semilinear wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        config: PathBuf,
        /// Stop after this many steps, leaving a checkpoint.
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Run an epsilon sequence (or a ripple wavelength sequence) and report trends.
    Converge { config: PathBuf },
    /// Continue a run from its checkpoint directory.
    Resume {
        checkpoint: PathBuf,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Write a 16-bit PGM of one field of a 2D snapshot.
    Heatmap {
        snapshot: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in identity and exact-solution checks.
    Verify,
}

fn dispatch(cli: Cli) -> Result<(), LabError> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Run { config, max_steps } => {
            let s = parse_config(&config)?;
            if !s.model.epsilon_list.is_empty() {
                return Err(LabError::Config(
                    "config has model.epsilon_list; use `kinklab converge`".into(),
                ));
            }
            let r = run_scenario(&s, &RunOptions { max_steps, quiet })?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Command::Converge { config } => {
            let s = parse_config(&config)?;
            let opts = RunOptions {
                max_steps: None,
                quiet,
            };
            let dir = PathBuf::from(&s.output.dir);
            if matches!(&s.initial, Initial::Ripple { wavelength_list, .. } if !wavelength_list.is_empty())
            {
                ripples::ripple_study(&s, &opts)?;
                print!(
                    "{}",
                    std::fs::read_to_string(dir.join("ripples_report.txt"))?
                );
            } else {
                converge::convergence_study(&s, &opts)?;
                print!("{}", std::fs::read_to_string(dir.join("report.txt"))?);
            }
        }
        Command::Resume {
            checkpoint,
            max_steps,
        } => {
            let r = checkpoint::resume(&checkpoint, &RunOptions { max_steps, quiet })?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Command::Heatmap {
            snapshot,
            field,
            out,
        } => {
            let sel: FieldSel = field.parse()?;
            let path = emit_heatmap(&snapshot, sel, out.as_deref())?;
            println!("{}", path.display());
        }
        Command::Verify => {
            verify::verify()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kinklab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
