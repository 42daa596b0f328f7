use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use povm_merit::classical::{
    bin, eigenmodes, posterior_frequency, posterior_time, resolutions, single_photon_block,
};
use povm_merit::hilbert::{enumerate_fock, TimeWindow};
use povm_merit::io::{self, MeritReport, ReportOptions};
use povm_merit::models::{self, ModelSpec, PixelSpec};
use povm_merit::{Error, Result};

#[derive(Parser)]
#[command(
    name = "povm-merit",
    version,
    about = "Photodetector figures of merit computed from POVM files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every POVM invariant of a detector file
    Validate { file: PathBuf },
    /// Compute the full merit report
    Report {
        file: PathBuf,
        /// Modes for the photon-number entropies, e.g. --modes 0,1
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 4.0)]
        target_bits: f64,
        /// Time window as t_min,t_max,points (defaults to one derived
        /// from the mode spectra)
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        time_window: Option<WindowArg>,
        /// Detector-on duration (s) for the dark-count rate
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        /// Emit JSON instead of Markdown
        #[arg(long, conflicts_with = "markdown")]
        json: bool,
        /// Emit Markdown (the default)
        #[arg(long)]
        markdown: bool,
    },
    /// Export a binned posterior distribution as CSV
    Dist {
        file: PathBuf,
        /// Outcome label ("null" addresses the derived null element)
        #[arg(long)]
        outcome: String,
        #[arg(long, value_enum)]
        domain: Domain,
        /// Bin width δ (rad/s for freq, s for time)
        #[arg(long)]
        bin: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        time_window: Option<WindowArg>,
        /// Bin origin (defaults to the grid start / window start)
        #[arg(long)]
        origin: Option<f64>,
    },
    /// Generate a built-in detector model file
    Model {
        #[command(subcommand)]
        kind: ModelCommand,
    },
    /// Find bin sizes matching the entropy target and print Δω, Δt
    Resolution {
        file: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        target_bits: f64,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        time_window: Option<WindowArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Freq,
    Time,
}

#[derive(Clone, Copy)]
struct WindowArg {
    t_min: f64,
    t_max: f64,
    points: usize,
}

fn parse_window(s: &str) -> std::result::Result<WindowArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected t_min,t_max,points".into());
    }
    Ok(WindowArg {
        t_min: parts[0].trim().parse().map_err(|e| format!("t_min: {e}"))?,
        t_max: parts[1].trim().parse().map_err(|e| format!("t_max: {e}"))?,
        points: parts[2]
            .trim()
            .parse()
            .map_err(|e| format!("points: {e}"))?,
    })
}

#[derive(Args)]
struct BasisArgs {
    /// Number of Hermite-Gauss modes (defaults per model kind)
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, default_value_t = 2)]
    n_max: u32,
    #[arg(long, default_value_t = 0.0)]
    omega_min: f64,
    #[arg(long, default_value_t = 16.0)]
    omega_max: f64,
    #[arg(long, default_value_t = 512)]
    grid_points: usize,
    /// Center of the Gaussian mode family (rad/s)
    #[arg(long, default_value_t = 8.0)]
    center: f64,
    /// Intensity standard deviation of the fundamental mode (rad/s)
    #[arg(long, default_value_t = 1.0)]
    width: f64,
}

impl BasisArgs {
    fn build(&self, default_modes: usize) -> Result<povm_merit::hilbert::FockBasis> {
        let grid = povm_merit::hilbert::FrequencyGrid::new(
            self.omega_min,
            self.omega_max,
            self.grid_points,
        )?;
        let modes = self.modes.unwrap_or(default_modes);
        let basis = models::gaussian_basis(grid, modes, self.center, self.width)?;
        enumerate_fock(basis, self.n_max)
    }
}

#[derive(Subcommand)]
enum ModelCommand {
    #[command(name = "ideal_pnr")]
    IdealPnr {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "on_off")]
    OnOff {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 0.0)]
        p_dark: f64,
        /// Watched mode index
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Heterodyne {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, default_value_t = 2.5)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha_step: f64,
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "pixel_array")]
    PixelArray {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long, default_value_t = 2)]
        pixels: usize,
        #[arg(long, default_value_t = 2)]
        max_clicks: u32,
        /// Efficiency shared by all pixels
        #[arg(long, default_value_t = 0.8)]
        eta: f64,
        /// Dark probability per click slot, shared by all pixels
        #[arg(long, default_value_t = 0.01)]
        p_dark: f64,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "gaussian_basis")]
    GaussianBasis {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        // file / input problems
        Error::ParseError { .. }
        | Error::Io(_)
        | Error::InvalidGrid(_)
        | Error::DimensionMismatch { .. }
        | Error::DimensionCap { .. }
        | Error::InvalidParameter(_)
        | Error::UnsupportedComposition(_)
        | Error::SpectralLeakage(_) => 2,
        // invariant violations
        Error::ValidationFailed { .. }
        | Error::NumericalInconsistency(_)
        | Error::DegenerateModeSet { .. } => 1,
        // computation failures
        _ => 3,
    }
}

fn window_of(arg: Option<WindowArg>, povm: &povm_merit::povm::Povm) -> Result<TimeWindow> {
    match arg {
        Some(w) => TimeWindow::new(w.t_min, w.t_max, w.points),
        None => io::default_time_window(povm.basis()),
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { file } => {
            let povm = io::load_unvalidated(&file)?;
            let report = povm.validate();
            print!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Report {
            file,
            modes,
            target_bits,
            time_window,
            duration,
            json,
            markdown: _,
        } => {
            let povm = io::load(&file)?;
            let digest = io::input_digest(&file)?;
            let options = ReportOptions {
                modes,
                target_bits,
                window: time_window
                    .map(|w| TimeWindow::new(w.t_min, w.t_max, w.points))
                    .transpose()?,
                duration,
            };
            let report = MeritReport::generate(&povm, Some(digest), &options)?;
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_markdown());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Dist {
            file,
            outcome,
            domain,
            bin: bin_width,
            out,
            time_window,
            origin,
        } => {
            let povm = io::load(&file)?;
            let element = povm.element_by_label(&outcome).ok_or_else(|| {
                Error::InvalidParameter(format!("no outcome labeled '{outcome}' in {file:?}"))
            })?;
            let block = single_photon_block(element, povm.basis())?;
            let decomp = eigenmodes(&block, povm.basis().mode_basis())?;
            let dist = match domain {
                Domain::Freq => posterior_frequency(&decomp)?,
                Domain::Time => {
                    let window = window_of(time_window, &povm)?;
                    posterior_time(&decomp, window)?
                }
            };
            let binned = bin(&dist, bin_width, origin.unwrap_or_else(|| dist.start()))?;
            let file_out = std::fs::File::create(&out)?;
            io::write_binned_csv(std::io::BufWriter::new(file_out), &binned)?;
            println!(
                "wrote {} bins to {}",
                binned.probabilities().len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Model { kind } => {
            let (basis, spec, out) = match kind {
                ModelCommand::IdealPnr { basis, out } => {
                    (basis.build(2)?, ModelSpec::IdealPnr, out)
                }
                ModelCommand::OnOff {
                    basis,
                    eta,
                    p_dark,
                    mode,
                    out,
                } => (basis.build(1)?, ModelSpec::OnOff { mode, eta, p_dark }, out),
                ModelCommand::Heterodyne {
                    basis,
                    alpha_max,
                    alpha_step,
                    mode,
                    out,
                } => (
                    basis.build(1)?,
                    ModelSpec::Heterodyne {
                        mode,
                        alpha_max,
                        alpha_step,
                    },
                    out,
                ),
                ModelCommand::PixelArray {
                    basis,
                    pixels,
                    max_clicks,
                    eta,
                    p_dark,
                    out,
                } => {
                    let fock = basis.build(pixels)?;
                    let specs: Vec<PixelSpec> = (0..pixels)
                        .map(|mode| PixelSpec { mode, eta, p_dark })
                        .collect();
                    (
                        fock,
                        ModelSpec::PixelArray {
                            pixels: specs,
                            max_clicks,
                        },
                        out,
                    )
                }
                ModelCommand::GaussianBasis { basis, out } => {
                    // a basis-only file: no click elements, null = identity
                    let fock = basis.build(2)?;
                    let povm = povm_merit::povm::Povm::new(fock, vec![])?;
                    let files = io::save(&povm, &out)?;
                    println!("wrote {}", files.manifest.display());
                    return Ok(ExitCode::SUCCESS);
                }
            };
            let (povm, warnings) = spec.build(basis)?;
            for warning in warnings {
                eprintln!("warning: {warning}");
            }
            let files = io::save(&povm, &out)?;
            println!(
                "wrote {} ({} click outcomes + null)",
                files.manifest.display(),
                povm.elements().len()
            );
            if let Some(sidecar) = files.sidecar {
                println!("matrices in {}", sidecar.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Resolution {
            file,
            target_bits,
            time_window,
        } => {
            let povm = io::load(&file)?;
            let window = window_of(time_window, &povm)?;
            let r = resolutions(&povm, target_bits, window)?;
            println!("delta_omega_bin_rad_per_s = {:.17e}", r.delta_omega_bin);
            println!("delta_t_bin_s = {:.17e}", r.delta_t_bin);
            println!("h_omega_bits = {:.17e}", r.h_omega);
            println!("h_t_bits = {:.17e}", r.h_t);
            println!("delta_omega_rad_per_s = {:.17e}", r.delta_omega);
            println!("delta_t_s = {:.17e}", r.delta_t);
            println!("product = {:.17e}", r.product);
            Ok(ExitCode::SUCCESS)
        }
    }
}
