use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use planar_dipoles::sweep::{
    self, figure, locate_feature, Dataset, Feature, FigureOptions, FixedParams, Format, Quantity, SweepSpec,
};
use planar_dipoles::units::{convert_units, PhysicalParams};
use planar_dipoles::{rotor, Error};

const OUTPUT_DIR_ENV: &str = "PLANAR_DIPOLES_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "planar-dipoles", version, about = "Spectra and entanglement of two planar polar molecules in a tilted field")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Dipole-field coupling ω/B
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<f64>,

    /// Dipole-dipole coupling Ω/B
    #[arg(long, global = true, allow_hyphen_values = true)]
    coupling: Option<f64>,

    /// Field tilt angle in degrees
    #[arg(long = "theta-t", global = true, allow_hyphen_values = true)]
    theta_t: Option<f64>,

    /// kT/B for thermal quantities (repeatable)
    #[arg(long, global = true)]
    temperature: Vec<f64>,

    /// Rotor basis cutoff |m| ≤ m_max
    #[arg(long = "m-max", global = true, default_value_t = rotor::DEFAULT_M_MAX)]
    m_max: usize,

    /// axis:start:stop:count, axis one of omega_over_B, coupling_over_B, theta_t_deg, kT_over_B
    #[arg(long, global = true)]
    sweep: Option<String>,

    /// Comma-separated quantities, overriding the subcommand default
    #[arg(long, global = true)]
    quantities: Option<String>,

    /// Output file (standard output if absent)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Directory for relative output paths and figure files
    #[arg(long = "output-dir", global = true)]
    output_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Record the generation time in the metadata (output is then not reproducible)
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-rotor energies and the ground-state gap
    Spectrum,
    /// Dipole factors of the two lowest rotor states
    Factors,
    /// Pair energies E_1..E_4
    Pair,
    /// Pure-state concurrences of the four pair eigenstates
    Concurrence,
    /// Thermal-state concurrence
    Thermal,
    /// Data for one of figures 2 to 7, one file per panel
    Figure {
        n: u32,
        /// Grid points per axis
        #[arg(long, default_value_t = sweep::DEFAULT_FIGURE_POINTS)]
        points: usize,
    },
    /// Locate a crossing, anticrossing or concurrence minimum along --sweep
    Locate {
        kind: FeatureKind,
        /// Level labels i,j (crossing, anticrossing) or a state label
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<usize>,
    },
    /// Convert laboratory parameters to ω/B and Ω/B
    Convert {
        /// Debye
        #[arg(long = "dipole-moment")]
        dipole_moment: f64,
        /// kV/cm
        #[arg(long = "field-strength")]
        field_strength: f64,
        /// nm
        #[arg(long)]
        separation: f64,
        /// cm⁻¹
        #[arg(long = "rotational-constant")]
        rotational_constant: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FeatureKind {
    Crossing,
    Anticrossing,
    ConcurrenceMinimum,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::LevelIndex { .. } => 2,
        Error::GuardRejected { .. } => 3,
        Error::FeatureNotFound(_) => 4,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let c = &cli.common;
    let format = Format::from(c.format);
    let dir = output_dir(c);
    let fixed = FixedParams {
        omega_over_b: c.omega,
        coupling_over_b: c.coupling,
        theta_t_deg: c.theta_t,
        temperatures: c.temperature.clone(),
        m_max: c.m_max,
        ..FixedParams::default()
    };

    let default_quantities: &[Quantity] = match &cli.command {
        Command::Spectrum => &[Quantity::RotorEnergies, Quantity::RotorGap],
        Command::Factors => &[Quantity::Factors],
        Command::Pair => &[Quantity::PairEnergies],
        Command::Concurrence => &[Quantity::PureConcurrences],
        Command::Thermal => &[Quantity::ThermalConcurrence],
        Command::Figure { n, points } => {
            let opts = FigureOptions {
                points: *points,
                m_max: c.m_max,
                temperatures: c.temperature.clone(),
            };
            let panels = figure(*n, &opts)?;
            let dir = dir.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let stdout = io::stdout();
            let mut listing = stdout.lock();
            for mut p in panels {
                stamp(&mut p.dataset, c.timestamp);
                let path = dir.join(format!("{}.{}", p.name, format.extension()));
                p.dataset.write(BufWriter::new(File::create(&path)?), format)?;
                writeln!(listing, "{}", path.display())?;
            }
            return Ok(());
        }
        Command::Locate { kind, labels } => {
            let feature = parse_feature(*kind, labels)?;
            let range = c
                .sweep
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("locate needs --sweep axis:start:stop:count".into()))?;
            let (axis, start, stop, count) = SweepSpec::parse_axis_range(range)?;
            let spec = SweepSpec::new(axis, start, stop, count).with_fixed(fixed);
            let found = locate_feature(feature, &spec)?;
            let mut ds = Dataset::new(vec![axis.name().into(), "feature_value".into()])
                .with_meta("version", sweep::VERSION)
                .with_meta("feature", feature)
                .with_meta("sweep", range)
                .with_meta("m_max", c.m_max)
                .with_meta("tolerance", sweep::LOCATE_TOLERANCE)
                .with_meta("bracket", format!("{},{}", found.bracket.0, found.bracket.1));
            ds.rows.push(vec![found.axis_value, found.feature_value]);
            return emit(ds, c, dir.as_deref(), format);
        }
        Command::Convert {
            dipole_moment,
            field_strength,
            separation,
            rotational_constant,
        } => {
            let phys = PhysicalParams {
                dipole_moment: *dipole_moment,
                field_strength: *field_strength,
                separation: *separation,
                rotational_constant: *rotational_constant,
            };
            let r = convert_units(&phys)?;
            let mut ds = Dataset::new(vec!["omega_over_B".into(), "coupling_over_B".into()])
                .with_meta("version", sweep::VERSION)
                .with_meta("dipole_moment_D", dipole_moment)
                .with_meta("field_strength_kV_per_cm", field_strength)
                .with_meta("separation_nm", separation)
                .with_meta("rotational_constant_per_cm", rotational_constant);
            ds.rows.push(vec![r.omega_over_b, r.coupling_over_b]);
            return emit(ds, c, dir.as_deref(), format);
        }
    };

    let quantities = match &c.quantities {
        Some(list) => Quantity::parse_list(list)?,
        None => default_quantities.to_vec(),
    };
    let ds = match &c.sweep {
        Some(range) => {
            let (axis, start, stop, count) = SweepSpec::parse_axis_range(range)?;
            let spec = SweepSpec::new(axis, start, stop, count)
                .with_fixed(fixed)
                .with_quantities(&quantities);
            sweep::run_sweep(&spec)?
        }
        None => sweep::run_point(&fixed, &quantities)?,
    };
    emit(ds, c, dir.as_deref(), format)
}

fn parse_feature(kind: FeatureKind, labels: &[usize]) -> Result<Feature, Error> {
    match (kind, labels) {
        (FeatureKind::Crossing, &[i, j]) => Ok(Feature::Crossing(i, j)),
        (FeatureKind::Anticrossing, &[i, j]) => Ok(Feature::Anticrossing(i, j)),
        (FeatureKind::ConcurrenceMinimum, &[l]) => Ok(Feature::ConcurrenceMinimum(l)),
        (FeatureKind::ConcurrenceMinimum, _) => Err(Error::InvalidParameter("concurrence-minimum takes one label".into())),
        _ => Err(Error::InvalidParameter("crossing and anticrossing take two labels".into())),
    }
}

fn output_dir(c: &Common) -> Option<PathBuf> {
    c.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn stamp(ds: &mut Dataset, enabled: bool) {
    if enabled {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        ds.metadata.insert("timestamp_unix".into(), secs.to_string());
    }
}

fn emit(mut ds: Dataset, c: &Common, dir: Option<&Path>, format: Format) -> Result<(), Error> {
    stamp(&mut ds, c.timestamp);
    match &c.output {
        Some(path) => {
            let path = match dir {
                Some(d) if path.is_relative() => {
                    std::fs::create_dir_all(d)?;
                    d.join(path)
                }
                _ => path.clone(),
            };
            let mut w = BufWriter::new(File::create(path)?);
            ds.write(&mut w, format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            ds.write(stdout.lock(), format)?;
        }
    }
    Ok(())
}
