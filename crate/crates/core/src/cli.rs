//! Command-line front end: one subcommand per experiment.
//!
//! Every experiment has a fixed table of parameters with defaults. Values are
//! resolved with the precedence command-line flag, then config file, then
//! default. A config file holds `key = value` lines; `#` starts a comment.
//! Output is CSV with a header row, LF line endings and floats printed with
//! 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::dof::{
    functional_dof, los_channel_dof, nlos_dof_trials, pswf_modes, LosOptions, NlosOptions,
    VmfScatterers,
};
use crate::geometry::{uniform_grid, Region};
use crate::kernels::WaveParams;
use crate::mutual_info::{
    mi_convergence_experiment, noise_divergence_experiment, waterfill, ScenarioConfig,
};
use crate::nearfield::ldma_sweep;
use crate::planewave::{helmholtz_residual, sample_planewave_field};
use crate::{Error, Result};

/// The experiments exposed as subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Pswf,
    DofLos,
    DofNlos,
    MiConverge,
    NoiseCapacity,
    Planewave,
    Ldma,
    Waterfill,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Pswf,
        Experiment::DofLos,
        Experiment::DofNlos,
        Experiment::MiConverge,
        Experiment::NoiseCapacity,
        Experiment::Planewave,
        Experiment::Ldma,
        Experiment::Waterfill,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Pswf => "pswf",
            Experiment::DofLos => "dof-los",
            Experiment::DofNlos => "dof-nlos",
            Experiment::MiConverge => "mi-converge",
            Experiment::NoiseCapacity => "noise-capacity",
            Experiment::Planewave => "planewave",
            Experiment::Ldma => "ldma",
            Experiment::Waterfill => "waterfill",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    fn about(self) -> &'static str {
        match self {
            Experiment::Pswf => "Concentration eigenvalues of the time- and band-limiting operator",
            Experiment::DofLos => "Channel DoF between two parallel apertures in line of sight",
            Experiment::DofNlos => {
                "Expected channel DoF through a von Mises-Fisher scatterer cluster"
            }
            Experiment::MiConverge => "Point-antenna MI against the continuous-aperture value",
            Experiment::NoiseCapacity => {
                "MI under white versus correlated noise as antennas densify"
            }
            Experiment::Planewave => "Plane-wave random field on a cubic lattice",
            Experiment::Ldma => "Near-field correlation of two users at the same angle",
            Experiment::Waterfill => "Water-filling over parallel Gaussian channels",
        }
    }

    /// Parameter table of the experiment.
    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Experiment::Pswf => PSWF,
            Experiment::DofLos => DOF_LOS,
            Experiment::DofNlos => DOF_NLOS,
            Experiment::MiConverge | Experiment::NoiseCapacity => MI,
            Experiment::Planewave => PLANEWAVE,
            Experiment::Ldma => LDMA,
            Experiment::Waterfill => WATERFILL,
        }
    }
}

/// Value type of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Finite float > 0.
    Positive,
    /// Any finite float.
    Real,
    /// Float in the open interval (0, 1).
    Fraction,
    /// Integer >= 1.
    Count,
    /// Integer >= 0.
    Size,
    /// Unsigned 64-bit seed.
    Seed,
    Flag,
    /// Comma-separated integers >= 1.
    Counts,
    /// Comma-separated positive floats.
    Positives,
    /// Comma-separated nonnegative floats.
    NonNegatives,
    /// Comma-separated finite floats.
    Reals,
}

impl ParamKind {
    fn describe(self) -> &'static str {
        match self {
            ParamKind::Positive | ParamKind::Real | ParamKind::Fraction => "a number",
            ParamKind::Count | ParamKind::Size => "an unsigned integer",
            ParamKind::Seed => "an unsigned 64-bit integer",
            ParamKind::Flag => "true or false",
            ParamKind::Counts => "a comma-separated list of unsigned integers",
            ParamKind::Positives | ParamKind::NonNegatives | ParamKind::Reals => {
                "a comma-separated list of numbers"
            }
        }
    }
}

/// One configurable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: ParamKind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn p(
    key: &'static str,
    kind: ParamKind,
    default: &'static str,
    help: &'static str,
) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default,
        help,
    }
}

use ParamKind::*;

const SEED: ParamSpec = p("seed", Seed, "0", "random seed");

const PSWF: &[ParamSpec] = &[
    p("T", Positive, "2", "time window [s]"),
    p("W", Positive, "2", "bandwidth [Hz]"),
    p("grid", Count, "512", "quadrature points on the window"),
    p("threshold", Fraction, "0.5", "relative eigenvalue cut-off"),
    SEED,
];

const DOF_LOS: &[ParamSpec] = &[
    p("wavelength", Positive, "1", "wavelength [m]"),
    p(
        "tx_size",
        Positives,
        "4,4",
        "transmit aperture side lengths [m], one or two values",
    ),
    p(
        "rx_size",
        Positives,
        "4,4",
        "receive aperture side lengths [m], one or two values",
    ),
    p("separation", Positive, "8", "aperture separation [m]"),
    p(
        "grid",
        Count,
        "4",
        "samples per half wavelength along each axis",
    ),
    p(
        "threshold",
        Fraction,
        "0.5",
        "relative singular-value cut-off",
    ),
    p("dyadic", Flag, "false", "use the dyadic Green's function"),
    SEED,
];

const DOF_NLOS: &[ParamSpec] = &[
    p("wavelength", Positive, "1", "wavelength [m]"),
    p(
        "tx_size",
        Positives,
        "4",
        "transmit aperture side lengths [m]",
    ),
    p(
        "rx_size",
        Positives,
        "4",
        "receive aperture side lengths [m]",
    ),
    p("kappa", Real, "5", "vMF concentration (>= 0)"),
    p(
        "mean_direction",
        Reals,
        "0,0,1",
        "mean scatterer direction seen from the receiver",
    ),
    p("clusters", Count, "16", "scatterers per realization"),
    p(
        "distance",
        Positive,
        "20",
        "scatterer distance from the receiver [wavelengths]",
    ),
    p("trials", Count, "100", "Monte-Carlo realizations"),
    p(
        "grid",
        Count,
        "2",
        "samples per half wavelength along each axis",
    ),
    p(
        "threshold",
        Fraction,
        "0.5",
        "relative singular-value cut-off",
    ),
    SEED,
];

const MI: &[ParamSpec] = &[
    p("wavelength", Positive, "1", "wavelength [m]"),
    p("tx_length", Positive, "2", "transmit segment length [m]"),
    p("rx_length", Positive, "4", "receive segment length [m]"),
    p("separation", Positive, "16", "segment separation [m]"),
    p("power", Positive, "1", "source power"),
    p(
        "snr_db",
        Real,
        "10",
        "SNR at one antenna at the receiver center [dB]",
    ),
    p(
        "noise_floor",
        Positive,
        "0.1",
        "white noise floor relative to the correlated noise",
    ),
    p(
        "tx_points",
        Size,
        "0",
        "transmit quadrature size, 0 for automatic",
    ),
    p(
        "grid",
        Count,
        "8",
        "reference grid density, multiples of half-wavelength sampling",
    ),
    p(
        "sweep",
        Counts,
        "2,4,8,16,32,64,128,256,512",
        "antenna counts",
    ),
    p(
        "polarized",
        Flag,
        "false",
        "dyadic channel with independent polarizations",
    ),
    SEED,
];

const PLANEWAVE: &[ParamSpec] = &[
    p("wavelength", Positive, "1", "wavelength [m]"),
    p("n_waves", Count, "64", "plane waves per realization"),
    p("grid", Count, "17", "lattice points per axis"),
    p(
        "spacing",
        Positive,
        "0.0625",
        "lattice spacing [m], at most wavelength/8",
    ),
    SEED,
];

const LDMA: &[ParamSpec] = &[
    p("wavelength", Positive, "0.01", "wavelength [m]"),
    p(
        "sizes",
        Counts,
        "1,2,4,8,16,32,64,128,256,512,1024",
        "array sizes",
    ),
    p("angle", Real, "0", "user angle from broadside [rad]"),
    p("r1", Positive, "5", "first user distance [m]"),
    p("r2", Positive, "20", "second user distance [m]"),
    SEED,
];

const WATERFILL: &[ParamSpec] = &[
    p(
        "gains",
        NonNegatives,
        "1,0.8,0.5,0.3,0.1",
        "channel amplitude gains",
    ),
    p("noise", Positives, "1,1,1,1,1", "noise power per channel"),
    p("power", Positive, "1", "total power"),
    SEED,
];

fn validate_value(spec: &ParamSpec, raw: &str) -> Result<()> {
    let key = spec.key;
    let mismatch = || {
        Error::Config(format!(
            "`{key}` expects {}, got `{raw}`",
            spec.kind.describe()
        ))
    };
    let float = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(mismatch)
    };
    let list = |s: &str| -> Vec<String> { s.split(',').map(|t| t.trim().to_string()).collect() };
    match spec.kind {
        Positive => {
            if float(raw)? <= 0.0 {
                return Err(Error::Config(format!("{key} must be > 0")));
            }
        }
        Real => {
            float(raw)?;
        }
        Fraction => {
            let v = float(raw)?;
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{key} must lie in (0, 1)")));
            }
        }
        Count => {
            if raw.trim().parse::<usize>().map_err(|_| mismatch())? == 0 {
                return Err(Error::Config(format!("{key} must be >= 1")));
            }
        }
        Size => {
            raw.trim().parse::<usize>().map_err(|_| mismatch())?;
        }
        Seed => {
            raw.trim().parse::<u64>().map_err(|_| mismatch())?;
        }
        Flag => {
            raw.trim().parse::<bool>().map_err(|_| mismatch())?;
        }
        Counts => {
            for t in list(raw) {
                if t.parse::<usize>().map_err(|_| mismatch())? == 0 {
                    return Err(Error::Config(format!("{key} entries must be >= 1")));
                }
            }
        }
        Positives | NonNegatives | Reals => {
            for t in list(raw) {
                let v = float(&t)?;
                if spec.kind == Positives && v <= 0.0 {
                    return Err(Error::Config(format!("{key} entries must be > 0")));
                }
                if spec.kind == NonNegatives && v < 0.0 {
                    return Err(Error::Config(format!("{key} entries must be >= 0")));
                }
            }
        }
    }
    Ok(())
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Every parameter of the experiment, seed included.
    pub params: BTreeMap<String, String>,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    /// All-default configuration.
    pub fn defaults(experiment: Experiment) -> Self {
        resolve_config(experiment, &[], None, None).expect("built-in defaults are valid")
    }

    fn raw(&self, key: &str) -> &str {
        self.params
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("parameter `{key}` missing from resolved config"))
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).trim().parse().expect("validated float")
    }

    pub fn usize(&self, key: &str) -> usize {
        self.raw(key).trim().parse().expect("validated integer")
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.raw(key).trim().parse().expect("validated integer")
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key).trim().parse().expect("validated flag")
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        self.raw(key)
            .split(',')
            .map(|t| t.trim().parse().expect("validated float"))
            .collect()
    }

    pub fn usize_list(&self, key: &str) -> Vec<usize> {
        self.raw(key)
            .split(',')
            .map(|t| t.trim().parse().expect("validated integer"))
            .collect()
    }

    /// The configuration in config-file syntax, loadable with `--config`.
    pub fn render(&self) -> String {
        let mut s = format!(
            "# experiment: {}\n# output: {}\n",
            self.experiment.name(),
            self.output_path.display()
        );
        for spec in self.experiment.params() {
            let _ = writeln!(s, "{} = {}", spec.key, self.params[spec.key]);
        }
        s
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {}: expected `key = value`", no + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn valid_keys(experiment: Experiment) -> String {
    experiment
        .params()
        .iter()
        .map(|s| s.key)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Resolves parameters: command-line values override the config file,
/// which overrides the defaults.
pub fn resolve_config(
    experiment: Experiment,
    cli: &[(String, String)],
    file: Option<&str>,
    output_path: Option<PathBuf>,
) -> Result<ExperimentConfig> {
    let table = experiment.params();
    let mut params: BTreeMap<String, String> = table
        .iter()
        .map(|s| (s.key.to_string(), s.default.to_string()))
        .collect();
    let file_entries = match file {
        Some(text) => parse_config_file(text)?,
        None => Vec::new(),
    };
    for (k, v) in file_entries.iter().chain(cli) {
        if !params.contains_key(k) {
            return Err(Error::Config(format!(
                "unknown key `{k}` for {}; valid keys: {}",
                experiment.name(),
                valid_keys(experiment)
            )));
        }
        params.insert(k.clone(), v.clone());
    }
    for spec in table {
        validate_value(spec, &params[spec.key])?;
    }
    Ok(ExperimentConfig {
        experiment,
        params,
        output_path: output_path
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name()))),
    })
}

/// The clap command tree.
pub fn command() -> Command {
    let mut cmd = Command::new("eit")
        .about("Electromagnetic information theory experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in Experiment::ALL {
        let mut sub = Command::new(e.name())
            .about(e.about())
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("PATH")
                    .help("config file of `key = value` lines"),
            )
            .arg(
                Arg::new("out")
                    .long("out")
                    .value_name("PATH")
                    .help("CSV output path [default: <experiment>.csv]"),
            );
        for spec in e.params() {
            let mut arg = Arg::new(spec.key)
                .long(spec.key)
                .help(format!("{} [default: {}]", spec.help, spec.default))
                .action(ArgAction::Set)
                .allow_negative_numbers(true);
            if spec.kind == Flag {
                arg = arg.num_args(0..=1).default_missing_value("true");
            }
            sub = sub.arg(arg);
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn from_matches(e: Experiment, m: &ArgMatches) -> Result<ExperimentConfig> {
    let cli: Vec<(String, String)> = e
        .params()
        .iter()
        .filter_map(|s| {
            m.get_one::<String>(s.key)
                .map(|v| (s.key.to_string(), v.clone()))
        })
        .collect();
    let file = match m.get_one::<String>("config") {
        Some(p) => Some(read_file(Path::new(p))?),
        None => None,
    };
    let out = m.get_one::<String>("out").map(PathBuf::from);
    resolve_config(e, &cli, file.as_deref(), out)
}

/// What parsing the command line produced.
#[derive(Debug)]
pub enum Parsed {
    Run(ExperimentConfig),
    /// Help or version text to print before exiting successfully.
    Info(String),
}

/// Parses a full argument vector, program name first.
pub fn parse_args<I, T>(args: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let matches = match command().try_get_matches_from(&args) {
        Ok(m) => m,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Ok(Parsed::Info(err.render().to_string()))
                }
                ErrorKind::UnknownArgument => {
                    let sub = args
                        .get(1)
                        .and_then(|a| a.to_str())
                        .and_then(Experiment::from_name);
                    let flag = err
                        .get(clap::error::ContextKind::InvalidArg)
                        .map(|v| v.to_string())
                        .unwrap_or_default();
                    Err(Error::Config(match sub {
                        Some(e) => format!(
                            "unknown key `{}` for {}; valid keys: {}",
                            flag.trim_start_matches('-'),
                            e.name(),
                            valid_keys(e)
                        ),
                        None => first_line(&err.render().to_string()),
                    }))
                }
                _ => Err(Error::Config(first_line(&err.render().to_string()))),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let e = Experiment::from_name(name).expect("subcommands mirror experiments");
    from_matches(e, sub).map(Parsed::Run)
}

/// Parses the command line into a resolved configuration. Help requests
/// come back as a config error carrying the help text.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(args)? {
        Parsed::Run(cfg) => Ok(cfg),
        Parsed::Info(text) => Err(Error::Config(text)),
    }
}

fn first_line(s: &str) -> String {
    s.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("invalid arguments")
        .trim()
        .trim_start_matches("error: ")
        .to_string()
}

/// CSV body and one-line summary of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub summary: String,
}

struct Csv(String);

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv(format!("{}\n", header.join(",")))
    }

    fn row(&mut self, cells: &[String]) {
        self.0.push_str(&cells.join(","));
        self.0.push('\n');
    }
}

/// Float with 17 significant digits; parses back to the same value.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn region_from(sizes: &[f64]) -> Result<Region> {
    match sizes {
        [l] => Region::interval(*l),
        [lx, ly] => Region::rectangle(*lx, *ly),
        _ => Err(Error::InvalidArgument(format!(
            "aperture needs one or two side lengths, got {}",
            sizes.len()
        ))),
    }
}

fn scenario(cfg: &ExperimentConfig) -> Result<ScenarioConfig> {
    let lambda = cfg.f64("wavelength");
    let tx_points = cfg.usize("tx_points");
    Ok(ScenarioConfig {
        wavelength: lambda,
        tx_length_wavelengths: cfg.f64("tx_length") / lambda,
        rx_length_wavelengths: cfg.f64("rx_length") / lambda,
        separation_wavelengths: cfg.f64("separation") / lambda,
        source_power: cfg.f64("power"),
        snr_db: cfg.f64("snr_db"),
        noise_floor_ratio: cfg.f64("noise_floor"),
        tx_points: (tx_points > 0).then_some(tx_points),
        reference_factor: cfg.usize("grid"),
        sweep: cfg.usize_list("sweep"),
        polarized: cfg.flag("polarized"),
    })
}

/// Runs the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        Experiment::Pswf => {
            let (t, w) = (cfg.f64("T"), cfg.f64("W"));
            let eps = cfg.f64("threshold");
            let report = functional_dof(pswf_modes(t, w, cfg.usize("grid"))?, eps)?;
            let mut csv = Csv::new(&["n", "lambda_n"]);
            for (n, v) in report.spectrum.values.iter().enumerate() {
                csv.row(&[n.to_string(), fmt_float(*v)]);
            }
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "dof={} threshold={} prediction={}",
                    report.count,
                    eps,
                    2.0 * w * t
                ),
            })
        }
        Experiment::DofLos => {
            let wave = WaveParams::new(cfg.f64("wavelength"))?;
            let tx = region_from(&cfg.f64_list("tx_size"))?;
            let rx = region_from(&cfg.f64_list("rx_size"))?;
            let opts = LosOptions {
                points_per_half_wavelength: cfg.usize("grid"),
                threshold: cfg.f64("threshold"),
                dyadic: cfg.flag("dyadic"),
            };
            let report = los_channel_dof(&tx, &rx, cfg.f64("separation"), &wave, &opts)?;
            let s0 = report.spectrum.max_value();
            let mut csv = Csv::new(&["n", "sigma_n", "sigma_rel"]);
            for (n, v) in report.spectrum.values.iter().enumerate() {
                csv.row(&[n.to_string(), fmt_float(*v), fmt_float(v / s0)]);
            }
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "dof={} threshold={} prediction={}",
                    report.count,
                    opts.threshold,
                    report.prediction.unwrap_or(f64::NAN)
                ),
            })
        }
        Experiment::DofNlos => {
            let wave = WaveParams::new(cfg.f64("wavelength"))?;
            let tx = region_from(&cfg.f64_list("tx_size"))?;
            let rx = region_from(&cfg.f64_list("rx_size"))?;
            let dir = cfg.f64_list("mean_direction");
            let dir: [f64; 3] = dir
                .try_into()
                .map_err(|_| Error::Config("mean_direction needs three components".into()))?;
            let sc = VmfScatterers::new(dir, cfg.f64("kappa"), cfg.usize("clusters"))?;
            let opts = NlosOptions {
                scatterer_distance_wavelengths: cfg.f64("distance"),
                points_per_half_wavelength: cfg.usize("grid"),
                threshold: cfg.f64("threshold"),
            };
            let counts = nlos_dof_trials(
                &sc,
                &tx,
                &rx,
                &wave,
                cfg.usize("trials"),
                &opts,
                cfg.u64("seed"),
            )?;
            let mut csv = Csv::new(&["trial", "dof"]);
            for (t, c) in counts.iter().enumerate() {
                csv.row(&[t.to_string(), c.to_string()]);
            }
            let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!("expected_dof={mean} threshold={}", opts.threshold),
            })
        }
        Experiment::MiConverge => {
            let curve = mi_convergence_experiment(&scenario(cfg)?)?;
            let reference = curve.reference_mi.unwrap_or(f64::NAN);
            let mut csv = Csv::new(&["n_antennas", "mi_bits", "reference_bits"]);
            for (n, v) in curve.sample_counts.iter().zip(&curve.mi_values) {
                csv.row(&[n.to_string(), fmt_float(*v), fmt_float(reference)]);
            }
            let last = *curve.mi_values.last().expect("nonempty sweep");
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "reference_bits={reference:.6} final_bits={last:.6} relative_gap={:.3e}",
                    (last - reference).abs() / reference
                ),
            })
        }
        Experiment::NoiseCapacity => {
            let d = noise_divergence_experiment(&scenario(cfg)?)?;
            let mut csv = Csv::new(&["n_antennas", "white_bits", "correlated_bits"]);
            for ((n, w), c) in d
                .white
                .sample_counts
                .iter()
                .zip(&d.white.mi_values)
                .zip(&d.correlated.mi_values)
            {
                csv.row(&[n.to_string(), fmt_float(*w), fmt_float(*c)]);
            }
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "white_final_bits={:.6} correlated_final_bits={:.6} reference_bits={:.6}",
                    d.white.mi_values.last().copied().unwrap_or(f64::NAN),
                    d.correlated.mi_values.last().copied().unwrap_or(f64::NAN),
                    d.correlated.reference_mi.unwrap_or(f64::NAN)
                ),
            })
        }
        Experiment::Planewave => {
            let wave = WaveParams::new(cfg.f64("wavelength"))?;
            let n = cfg.usize("grid");
            if n > 128 {
                return Err(Error::Size {
                    requested: n,
                    cap: 128,
                });
            }
            let h = cfg.f64("spacing");
            let side = n as f64 * h;
            let grid = uniform_grid(&Region::cuboid(side, side, side)?, &[n, n, n])?;
            let field = sample_planewave_field(
                &grid,
                wave.wavenumber(),
                cfg.usize("n_waves"),
                cfg.u64("seed"),
            )?;
            let residual = helmholtz_residual(&field, h)?;
            let mut csv = Csv::new(&["x", "y", "z", "h_re", "h_im"]);
            for (pt, v) in grid.points().iter().zip(&field.values) {
                csv.row(&[
                    fmt_float(pt[0]),
                    fmt_float(pt[1]),
                    fmt_float(pt[2]),
                    fmt_float(v.re),
                    fmt_float(v.im),
                ]);
            }
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!("residual={residual:.6e}"),
            })
        }
        Experiment::Ldma => {
            let wave = WaveParams::new(cfg.f64("wavelength"))?;
            let pts = ldma_sweep(
                &cfg.usize_list("sizes"),
                wave.wavenumber(),
                cfg.f64("angle"),
                cfg.f64("r1"),
                cfg.f64("r2"),
            )?;
            let mut csv = Csv::new(&[
                "n_elements",
                "correlation",
                "farfield_correlation",
                "within_rayleigh",
            ]);
            for q in &pts {
                csv.row(&[
                    q.n_elements.to_string(),
                    fmt_float(q.correlation),
                    fmt_float(q.farfield_correlation),
                    u8::from(q.within_rayleigh).to_string(),
                ]);
            }
            let (first, last) = (pts[0], pts[pts.len() - 1]);
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "correlation_n{}={:.6} correlation_n{}={:.6}",
                    first.n_elements, first.correlation, last.n_elements, last.correlation
                ),
            })
        }
        Experiment::Waterfill => {
            let gains = cfg.f64_list("gains");
            let noise = cfg.f64_list("noise");
            let wf = waterfill(&gains, &noise, cfg.f64("power"))?;
            let mut csv = Csv::new(&["channel", "gain", "noise", "power"]);
            for (i, ((g, n), p)) in gains.iter().zip(&noise).zip(&wf.allocation).enumerate() {
                csv.row(&[i.to_string(), fmt_float(*g), fmt_float(*n), fmt_float(*p)]);
            }
            Ok(ExperimentOutput {
                csv: csv.0,
                summary: format!(
                    "capacity_bits={:.6} water_level={:.6}",
                    wf.capacity_bits, wf.water_level
                ),
            })
        }
    }
}

/// Exit status for an error: 2 for numerical failures, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

/// Entry point behind the binary: parses, echoes the resolved config to
/// stderr, runs, writes the CSV and prints the summary. Returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let run = || -> Result<Option<String>> {
        let cfg = match parse_args(args)? {
            Parsed::Info(text) => {
                print!("{text}");
                return Ok(None);
            }
            Parsed::Run(cfg) => cfg,
        };
        eprint!("{}", cfg.render());
        let out = run_experiment(&cfg)?;
        std::fs::write(&cfg.output_path, out.csv.as_bytes())
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", cfg.output_path.display())))?;
        Ok(Some(out.summary))
    };
    match run() {
        Ok(Some(summary)) => {
            println!("{summary}");
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            exit_code(&e)
        }
    }
}
