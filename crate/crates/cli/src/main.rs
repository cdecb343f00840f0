use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gridsched::Policy;
use gridsched_cli::{emit_outputs, resolve, run_compare, CliError, ConfigFile, Overrides, Preset};

/// Compare CLDS, LLS, RS and DMMS job scheduling on a simulated Grid.
#[derive(Debug, Parser)]
#[command(name = "gridsched", version)]
struct Args {
    /// Named scenario (small-medium ... large-heavy, desk-medium, desk-heavy)
    #[arg(long)]
    preset: Option<Preset>,

    /// Flat TOML file with scenario keys
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Comma-separated policies to compare
    #[arg(long, value_delimiter = ',')]
    policy: Option<Vec<Policy>>,

    #[arg(long)]
    steps: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Learning factor of the utility-table update
    #[arg(long)]
    alpha: Option<f64>,

    /// Offered load as a fraction of total capacity
    #[arg(long)]
    load: Option<f64>,

    #[arg(long)]
    schedulers: Option<usize>,

    #[arg(long)]
    resources: Option<usize>,

    /// Crash the CLDS learner at this step
    #[arg(long, value_name = "STEP")]
    fail_learner_at: Option<u64>,

    /// Directory for CSV traces, summary.json and the manifest
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Window, in steps, for windowed means and crossover detection
    #[arg(long, value_name = "STEPS")]
    window: Option<usize>,
}

fn main() -> ExitCode {
    match try_main(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn try_main(args: Args) -> Result<(), CliError> {
    let file = args.config.as_deref().map(ConfigFile::load).transpose()?;
    let flags = Overrides {
        preset: args.preset,
        policies: args.policy,
        steps: args.steps,
        seed: args.seed,
        alpha: args.alpha,
        load_fraction: args.load,
        num_schedulers: args.schedulers,
        num_resources: args.resources,
        fail_learner_at: args.fail_learner_at,
        window: args.window,
    };
    let config = resolve(file.as_ref(), &flags)?;
    println!("# resolved configuration");
    print!("{}", config.to_toml());
    println!();

    let comparison = run_compare(&config)?;
    print!("{}", comparison.report.render());
    if let Some(dir) = args.out {
        for path in emit_outputs(&comparison, &dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
