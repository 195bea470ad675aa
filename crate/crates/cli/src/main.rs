use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qwalk_core::config::RecordEvery;
use qwalk_core::experiment::{
    run_config_text, run_preset, sweep_config_text, RunOverrides, PRESET_NAMES,
};
use qwalk_core::{verify, Error};

/// Coined quantum walks on the line and the n-cycle.
#[derive(Parser)]
#[command(name = "qwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: OutputOpts,
    },
    /// Run a sweep config (`sweep.<key> = v1, v2, ...`).
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        opts: OutputOpts,
    },
    /// Run a shipped figure preset: fig1, fig2, fig3 or fig4.
    Preset {
        name: String,
        #[command(flatten)]
        opts: OutputOpts,
    },
    /// Run the oracle-equivalence and invariant checks.
    Verify,
}

#[derive(Args)]
struct OutputOpts {
    /// Directory for the CSV outputs.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Worker threads for sweep points (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    /// Record stride: `N` steps, or `N turns`, e.g. `1turn`.
    #[arg(long)]
    record_every: Option<String>,
    /// Number of coherence bins M.
    #[arg(long)]
    coherence_bins: Option<usize>,
}

impl OutputOpts {
    fn overrides(&self) -> Result<RunOverrides, Error> {
        Ok(RunOverrides {
            output_dir: Some(self.output_dir.clone()),
            record_every: self
                .record_every
                .as_deref()
                .map(RecordEvery::parse)
                .transpose()?,
            coherence_bins: self.coherence_bins,
            jobs: self.jobs,
        })
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn execute(cmd: Command) -> Result<bool, Error> {
    match cmd {
        Command::Run { config, opts } => {
            let out = run_config_text(&read(&config)?, &opts.overrides()?)?;
            eprintln!(
                "wrote {} distribution rows and {} metrics rows to {}",
                out.distributions.len(),
                out.metrics.len(),
                opts.output_dir.display()
            );
        }
        Command::Sweep { config, opts } => {
            let points = sweep_config_text(&read(&config)?, &opts.overrides()?)?;
            eprintln!(
                "wrote {} sweep points to {}",
                points.len(),
                opts.output_dir.display()
            );
        }
        Command::Preset { name, opts } => {
            if !PRESET_NAMES.contains(&name.as_str()) {
                return Err(Error::Validation {
                    key: "preset".into(),
                    message: format!("unknown preset `{name}`, expected one of {PRESET_NAMES:?}"),
                });
            }
            for (stem, _) in run_preset(&name, &opts.overrides()?)? {
                eprintln!("wrote {}", opts.output_dir.join(stem).display());
            }
        }
        Command::Verify => {
            let checks = verify::run_all()?;
            let mut all = true;
            for c in &checks {
                println!(
                    "[{}] {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                all &= c.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
