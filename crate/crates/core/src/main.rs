use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use casimir::cli::{self, CliError, ModelKind, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "casimir",
    version,
    about = "Sphere-plate Casimir force computation and measurement analysis"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Run configuration file (key = value with [sections])
    #[arg(long)]
    config: PathBuf,
    /// Separations in nm (comma separated), overriding the config
    #[arg(long, value_delimiter = ',')]
    z: Option<Vec<f64>>,
    /// Confidence level in (0, 1)
    #[arg(long)]
    beta: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dielectric model: drude | plasma | infrared | tabulated
    #[arg(long)]
    model: Option<String>,
    /// Temperature in K (0 = zero-temperature Lifshitz integral)
    #[arg(long)]
    temperature: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Force table with ideal, model and roughness-corrected values
    Force(CommonOpts),
    /// Statistical analysis of measured scans against the theory curve
    Analyze(CommonOpts),
    /// Itemized theoretical error budget
    Budget(CommonOpts),
    /// Roughness statistics from the configured histogram and profile
    Roughness(CommonOpts),
}

fn overrides_from(opts: &CommonOpts) -> Result<Overrides, CliError> {
    let model = opts
        .model
        .as_deref()
        .map(str::parse::<ModelKind>)
        .transpose()?;
    Ok(Overrides {
        z_list_nm: opts.z.clone(),
        beta: opts.beta,
        out_dir: opts.out.clone(),
        model,
        temperature: opts.temperature,
    })
}

type Runner = fn(&RunConfig) -> Result<cli::CommandOutput, CliError>;

fn run() -> Result<(), CliError> {
    let args = Args::parse();
    let (opts, runner): (&CommonOpts, Runner) =
        match &args.command {
            Command::Force(o) => (o, cli::cmd_force),
            Command::Analyze(o) => (o, cli::cmd_analyze),
            Command::Budget(o) => (o, cli::cmd_budget),
            Command::Roughness(o) => (o, cli::cmd_roughness),
        };
    let overrides = overrides_from(opts)?;
    let cfg = RunConfig::load(&opts.config, &overrides)?;
    let output = runner(&cfg)?;
    output.write_to(&cfg.out_dir)?;
    print!("{}", output.report);
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
