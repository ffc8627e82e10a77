use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use mpb_lab::harness::{self, ExperimentSpec, Preset};

#[derive(Parser)]
#[command(name = "mpb-lab", version, about = "Matrix pair beamformer experiments on simulated CDMA array data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest generalized eigenvalues against SNR.
    Eigencurve(RunArgs),
    /// Normalized output SINR and thresholds against SNR and INR.
    ThresholdSweep(RunArgs),
    /// Array patterns of batch weights.
    Pattern(RunArgs),
    /// Per-symbol SINR of the recursive beamformer from start-up.
    Convergence(RunArgs),
    /// Per-symbol SINR while interferers enter one by one.
    Tracking(RunArgs),
    /// Patterns for desired paths at distinct and at identical delays.
    IdenticalDelay(RunArgs),
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the values of the independent reference checks.
    Oracle,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; preset defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Symbols per stream.
    #[arg(long)]
    symbols: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn run_preset(preset: Preset, args: RunArgs) -> anyhow::Result<()> {
    let mut spec = match &args.config {
        Some(path) => {
            harness::load_config(path, Some(preset)).with_context(|| format!("loading {}", path.display()))?
        }
        None => ExperimentSpec::preset_defaults(preset),
    };
    spec.override_run(args.seed, args.symbols, args.trials);
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    spec.validate()?;

    let started = unix_seconds();
    let result = harness::run(&spec)?;
    let finished = unix_seconds();
    let extra = [
        ("started_unix".to_string(), started.to_string()),
        ("finished_unix".to_string(), finished.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    let written =
        result.write(&spec.output_dir, &extra).with_context(|| format!("writing to {}", spec.output_dir.display()))?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eigencurve(a) => run_preset(Preset::Eigencurve, a),
        Command::ThresholdSweep(a) => run_preset(Preset::ThresholdSweep, a),
        Command::Pattern(a) => run_preset(Preset::Pattern, a),
        Command::Convergence(a) => run_preset(Preset::Convergence, a),
        Command::Tracking(a) => run_preset(Preset::Tracking, a),
        Command::IdenticalDelay(a) => run_preset(Preset::IdenticalDelay, a),
        Command::Validate { config } => harness::load_config(&config, None)
            .map(|spec| {
                println!(
                    "{}: preset {}, {} scenario(s), {} SNR point(s), {} trial(s)",
                    config.display(),
                    spec.preset,
                    spec.scenarios.len(),
                    spec.snr_grid_db.len(),
                    spec.trials
                );
            })
            .map_err(Into::into),
        Command::Oracle => harness::oracle_report().map_err(Into::into).map(|rows| {
            for (k, v) in rows {
                println!("{k}: {v}");
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
