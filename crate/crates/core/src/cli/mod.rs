//! `qwi` command-line front end: scenario files, built-in scenarios and CSV
//! output.

pub mod config;
pub mod scenarios;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::discretize::{build_staircase, DivisionStrategy};
use crate::error::{Error, Result};
use crate::impedance::sweep_sampled;
use crate::model::{PotentialModel, Profile, Staircase};
use crate::oracle::{analytic_rect_barrier, transfer_matrix_scattering};
use crate::solve::{accuracy_curve, converge_bound, resonance_peaks, sweep_staircase};
use config::ScenarioConfig;

/// Region count used when neither `--n` nor `[discretize]` gives one.
pub const DEFAULT_REGIONS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "qwi", version, about = "Wave-impedance solver for 1D potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Scenario file (TOML).
    #[arg(required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file: fig1, fig2 or parabolic-well.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Delta strength in the middle of the fig1 double barrier (eV nm).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct Discretization {
    /// Regions per smooth piece (overrides [discretize] n).
    #[arg(long)]
    n: Option<usize>,
    /// equal-width, equal-area, equal-phase:<E>, wavelength-bounded:<f>:<E>.
    #[arg(long)]
    strategy: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflection and transmission over the [sweep] energies.
    Transmit {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        disc: Discretization,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append transfer-matrix and closed-form transmission columns.
        #[arg(long)]
        with_oracle: bool,
        /// Also write refined transmission maxima to this CSV.
        #[arg(long)]
        peaks: Option<PathBuf>,
        /// Smallest refined T reported in the peaks file.
        #[arg(long, default_value_t = 0.99)]
        min_peak: f64,
    },
    /// Bound-state energies, refined until they converge.
    Bound {
        #[command(flatten)]
        source: Source,
        /// equal-width, equal-area, equal-phase:<E>, wavelength-bounded:<f>:<E>.
        #[arg(long)]
        strategy: Option<String>,
        /// Energies in the level-count scan (default: 400 per eV, at least 100).
        #[arg(long)]
        scan_points: Option<usize>,
        /// Output CSV; the refinement trace goes next to it as <stem>.trace.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average change of T between N/2 and N regions for N = n0 .. n_max.
    Converge {
        #[command(flatten)]
        source: Source,
        /// equal-width, equal-area, equal-phase:<E>, wavelength-bounded:<f>:<E>.
        #[arg(long)]
        strategy: Option<String>,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Impedance along the staircase at one energy.
    Profile {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        disc: Discretization,
        /// Energy in eV.
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
        /// Extra samples inside every region.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in scenario as a scenario file.
    Scenario {
        /// fig1, fig2 or parabolic-well.
        name: String,
        /// Delta strength for fig1 (eV nm).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn scenario(name: &str, alpha: f64) -> Result<ScenarioConfig> {
    scenarios::by_name(name, alpha).ok_or_else(|| {
        Error::param("scenario", format!("unknown scenario `{name}`, expected one of {:?}", scenarios::NAMES))
    })
}

impl Source {
    fn load(&self) -> Result<ScenarioConfig> {
        match (&self.scenario, &self.config) {
            (Some(name), _) => scenario(name, self.alpha),
            (None, Some(path)) => ScenarioConfig::load(path),
            (None, None) => Err(Error::param("config", "give a scenario file or --scenario")),
        }
    }
}

fn strategy_of(flag: &Option<String>, config: &ScenarioConfig) -> Result<DivisionStrategy> {
    match flag {
        Some(s) => s.parse(),
        None => config.strategy(),
    }
}

fn staircase_of(config: &ScenarioConfig, model: &PotentialModel, disc: &Discretization) -> Result<Staircase> {
    let n = disc.n.or(config.regions()).unwrap_or(DEFAULT_REGIONS);
    build_staircase(model, n, strategy_of(&disc.strategy, config)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Closed-form `T` when the model is a single constant barrier (or nothing)
/// between equal leads.
fn analytic_transmission(model: &PotentialModel, e: f64) -> Option<f64> {
    if !model.deltas.is_empty() || model.u_left != model.u_right {
        return None;
    }
    let lead = model.u_left;
    match model.pieces.as_slice() {
        [] => (e > lead).then_some(1.0),
        [piece] => match piece.profile {
            Profile::Constant(u) => analytic_rect_barrier(e - lead, u - lead, piece.width(), model.material).ok(),
            _ => None,
        },
        _ => None,
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// CSV for `transmit`.
pub fn transmit_csv(config: &ScenarioConfig, n: Option<usize>, strategy: Option<&str>, with_oracle: bool) -> Result<String> {
    let disc = Discretization {
        n,
        strategy: strategy.map(str::to_string),
    };
    let model = config.model()?;
    let spec = config.sweep_spec()?;
    let stair = staircase_of(config, &model, &disc)?;
    transmit_table(&model, &stair, &spec.energies(), with_oracle).map(|(csv, _)| csv)
}

fn transmit_table(
    model: &PotentialModel,
    stair: &Staircase,
    energies: &[f64],
    with_oracle: bool,
) -> Result<(String, crate::solve::TransmissionSweep)> {
    let sweep = sweep_staircase(stair, energies)?;
    let mut csv = String::from("energy_eV,r_re,r_im,R,T,n_regions");
    if with_oracle {
        csv.push_str(",T_tm,T_analytic");
    }
    csv.push('\n');
    for p in &sweep.points {
        match &p.result {
            Some(r) => {
                let _ = write!(
                    csv,
                    "{},{},{},{},{},{}",
                    num(p.energy),
                    num(r.amplitude.re),
                    num(r.amplitude.im),
                    num(r.reflectance),
                    num(r.transmittance),
                    sweep.n_regions
                );
            }
            None => {
                let _ = write!(csv, "{},,,,,{}", num(p.energy), sweep.n_regions);
            }
        }
        if with_oracle {
            let tm = transfer_matrix_scattering(stair, p.energy).ok().map(|r| r.transmittance);
            let _ = write!(csv, ",{},{}", optional(tm), optional(analytic_transmission(model, p.energy)));
        }
        csv.push('\n');
    }
    let _ = writeln!(csv, "# gaps: {}", sweep.gaps());
    Ok((csv, sweep))
}

/// Trace path for a bound-state output file: `dir/stem.trace.csv`.
pub fn trace_path(out: &Path) -> PathBuf {
    let stem = match out.extension() {
        Some(ext) if ext == "csv" => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let mut name = stem.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".trace.csv");
    stem.with_file_name(name)
}

fn run_command(command: Command) -> Result<()> {
    match command {
        Command::Transmit {
            source,
            disc,
            out,
            with_oracle,
            peaks,
            min_peak,
        } => {
            let config = source.load()?;
            let model = config.model()?;
            let spec = config.sweep_spec()?;
            let stair = staircase_of(&config, &model, &disc)?;
            let (csv, sweep) = transmit_table(&model, &stair, &spec.energies(), with_oracle)?;
            emit(out.as_deref(), &csv)?;
            if let Some(path) = peaks {
                let mut text = String::from("energy_eV,T\n");
                for p in resonance_peaks(&stair, &sweep, min_peak) {
                    let _ = writeln!(text, "{},{}", num(p.energy), num(p.transmittance));
                }
                emit(Some(&path), &text)?;
            }
            Ok(())
        }
        Command::Bound {
            source,
            strategy,
            scan_points,
            out,
        } => {
            let config = source.load()?;
            let model = config.model()?;
            let report = converge_bound(&model, &config.policy()?, strategy_of(&strategy, &config)?, scan_points)?;
            let mut csv = String::from("level,energy_eV,n_regions,converged\n");
            for (level, e) in report.energies.iter().enumerate() {
                let _ = writeln!(csv, "{level},{},{},{}", num(*e), report.n_regions, report.converged);
            }
            emit(out.as_deref(), &csv)?;
            if let Some(path) = out {
                let mut trace = String::from("N,level,energy_eV\n");
                for (n, levels) in &report.trace {
                    for (level, e) in levels.iter().enumerate() {
                        let _ = writeln!(trace, "{n},{level},{}", num(*e));
                    }
                }
                emit(Some(&trace_path(&path)), &trace)?;
            }
            Ok(())
        }
        Command::Converge { source, strategy, out } => {
            let config = source.load()?;
            let model = config.model()?;
            let spec = config.sweep_spec()?;
            let ns = config.policy()?.levels();
            let curve = accuracy_curve(&model, &spec, &ns, strategy_of(&strategy, &config)?)?;
            let mut csv = String::from("N,log2_N,eps_bar\n");
            for r in curve {
                let _ = writeln!(csv, "{},{},{}", r.n, num((r.n as f64).log2()), num(r.eps_bar));
            }
            emit(out.as_deref(), &csv)
        }
        Command::Profile {
            source,
            disc,
            energy,
            samples,
            out,
        } => {
            let config = source.load()?;
            let model = config.model()?;
            let stair = staircase_of(&config, &model, &disc)?;
            let (_, profile) = sweep_sampled(&stair, energy, samples)?;
            let mut csv = String::from("x_nm,Z_re,Z_im,side\n");
            for s in &profile.samples {
                let _ = writeln!(csv, "{},{},{},{}", num(s.x), num(s.z.0.re), num(s.z.0.im), s.side.as_str());
            }
            emit(out.as_deref(), &csv)
        }
        Command::Scenario { name, alpha, out } => emit(out.as_deref(), &scenario(&name, alpha)?.to_toml()),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
