use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polsense::commands::{self, EstimateRequest, MeasurementSource};
use polsense::error::exit;
use polsense::{CliError, ExperimentConfig};

/// Polarization sensing with a passive metasurface: simulate, calibrate, estimate.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Experiment configuration (TOML). Built-in defaults apply without it.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.directory`.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jones-matrix entries of the meta-atom over the frequency grid.
    Model,
    /// Mean field components for every angle and frequency.
    Fields,
    /// Build and save the sensing matrix.
    Matrix,
    /// Singular-value spectrum and effective ranks of a sensing matrix.
    Svd {
        /// Matrix file; built from the configuration when absent.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Estimate the incident polarization angle.
    Estimate(EstimateArgs),
    /// Detect every grid angle and study ± pairs.
    Demo,
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct EstimateArgs {
    /// Matrix file; built from the configuration when absent.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Synthesize the measurement at this polarization angle (degrees) and check the result against it.
    #[arg(long, group = "source", allow_hyphen_values = true)]
    angle: Option<f64>,
    /// Measurement file with `freq_ghz,value` rows.
    #[arg(long, group = "source")]
    measurement: Option<PathBuf>,
    /// Use only this frequency (GHz) of the matrix.
    #[arg(long)]
    single_frequency: Option<f64>,
    /// Relative measurement noise; overrides `noise.sigma`.
    #[arg(long)]
    noise_sigma: Option<f64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = cli.output {
        cfg.output.directory = out;
    }
    let out = cfg.output.directory.clone();

    match cli.command {
        Command::Model => {
            let path = commands::cmd_model(&cfg, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Fields => {
            let path = commands::cmd_fields(&cfg, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Matrix => {
            let (path, phi) = commands::cmd_matrix(&cfg, &out)?;
            let (rows, cols) = phi.shape();
            println!(
                "wrote {} ({rows}×{cols}, fingerprint {})",
                path.display(),
                phi.fingerprint
            );
        }
        Command::Svd { matrix } => {
            let spectrum = commands::cmd_svd(&cfg, matrix.as_deref(), &out)?;
            for tau in polsense::formats::SVD_RANK_TAUS {
                println!("effective rank (tau = {tau}): {}", spectrum.effective_rank(tau));
            }
            println!("wrote {}", out.join(commands::SVD_FILE).display());
        }
        Command::Estimate(args) => {
            let source = match (args.angle, args.measurement) {
                (Some(a), _) => MeasurementSource::Angle(a),
                (None, Some(m)) => MeasurementSource::File(m),
                (None, None) => unreachable!("clap requires one source"),
            };
            let req = EstimateRequest {
                matrix_file: args.matrix,
                source: source.clone(),
                single_frequency_ghz: args.single_frequency,
                noise_sigma: args.noise_sigma,
            };
            let o = commands::cmd_estimate(&cfg, &req, &out)?;
            let r = &o.result;
            println!(
                "detected {}° (index {}), confidence {}",
                r.detected_angle_deg, r.detected_index, r.confidence
            );
            if r.equivalent_indices.len() > 1 {
                println!("equivalent grid indices: {:?}", r.equivalent_indices);
            }
            println!("wrote {}", o.path.display());
            if let (Some(false), MeasurementSource::Angle(truth)) = (o.correct, source) {
                return Err(CliError::DetectionMismatch {
                    detected_deg: r.detected_angle_deg,
                    truth_deg: truth,
                });
            }
        }
        Command::Demo => {
            let report = commands::cmd_demo(&cfg, &out)?;
            println!("{}/{} grid angles detected", report.successes(), report.rows.len());
            for p in &report.pairs {
                let band = if p.full_band { "full band" } else { "single frequency" };
                let verdict = match (p.resolved, p.ambiguous) {
                    (true, _) => "resolved",
                    (false, true) => "ambiguous",
                    (false, false) => "wrong",
                };
                println!("±{}° ({band}): {verdict}", p.theta_deg);
            }
            println!(
                "wrote {} and {}",
                report.table_path.display(),
                report.pairs_path.display()
            );
        }
        Command::Config => print!("{}", cfg.to_toml_string()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
