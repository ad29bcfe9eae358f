//! Batch runner: protocol sweeps, adversary searches, filter calibration
//! tables and shot-noise simulations, written as CSV plus a JSON manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nonunital::adversary::{minimize_negativity_2q, minimize_negativity_4q, SearchSettings};
use nonunital::matrix::Bipartition;
use nonunital::measurement::{
    all_settings, bootstrap_sigma, simulate_records, witness_estimate, witness_settings, CountRecord, Statistic,
    DEFAULT_RESAMPLES,
};
use nonunital::metrics::negativity;
use nonunital::optics::{
    calibrate_filters, imperfect_protocol, imperfect_two_qubit, survival_probability, unbalanced_splitter,
    OpticalParams, MEASURED_REFLECTION, MEASURED_TRANSMISSION,
};
use nonunital::protocols::{
    analytic_negativity_offdiag, four_qubit_pre_cnot, four_qubit_protocol, rho_prime_ab, two_qubit_pre_cnot,
    two_qubit_protocol, DiagonalInputParams, NoiseBlock, ProtocolResult,
};
use nonunital::DensityMatrix;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical failure at eta = {eta}: {source}")]
    Numerical { eta: f64, source: nonunital::Error },
}

impl CliError {
    /// 1 for configuration and file problems, 2 for failures inside the
    /// numerical library.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
#[value(rename_all = "lowercase")]
pub enum Mode {
    Sweep2q,
    Sweep4q,
    Adversary2q,
    Adversary4q,
    Calibrate,
    Shots2q,
    Shots4q,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sweep2q => "sweep2q",
            Mode::Sweep4q => "sweep4q",
            Mode::Adversary2q => "adversary2q",
            Mode::Adversary4q => "adversary4q",
            Mode::Calibrate => "calibrate",
            Mode::Shots2q => "shots2q",
            Mode::Shots4q => "shots4q",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Mode::Sweep2q | Mode::Sweep4q => &["eta", "negativity", "witness_expectation", "analytic_prediction"],
            Mode::Adversary2q | Mode::Adversary4q => &["eta", "min_negativity", "converged", "restarts_used"],
            Mode::Calibrate => &["eta", "alpha0", "alpha1", "alpha2", "survival_probability_at_beta_half"],
            Mode::Shots2q | Mode::Shots4q => &["eta", "estimate", "sigma", "true_value", "shots"],
        }
    }
}

/// `steps` intervals between `min` and `max`, so `steps + 1` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl EtaGrid {
    pub fn points(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|k| {
                let (n, k) = (self.steps as f64, k as f64);
                (self.min * (n - k) + self.max * k) / n
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputConfig {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticsConfig {
    pub transmission: f64,
    pub reflection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub eta_grid: EtaGrid,
    pub input: InputConfig,
    pub optics: OpticsConfig,
    pub shots: u64,
    pub seed: u64,
    pub restarts: usize,
    pub output_path: PathBuf,
    pub imperfect: bool,
}

pub const DEFAULT_STEPS: usize = 20;
pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_OUTPUT: &str = "results.csv";

impl ExperimentConfig {
    pub fn with_defaults(mode: Mode) -> Self {
        let input = DiagonalInputParams::default();
        Self {
            mode,
            eta_grid: EtaGrid { min: 0.0, max: 1.0, steps: DEFAULT_STEPS },
            input: InputConfig { p: input.p, q: input.q, r: input.r },
            optics: OpticsConfig { transmission: MEASURED_TRANSMISSION, reflection: MEASURED_REFLECTION },
            shots: DEFAULT_SHOTS,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            output_path: PathBuf::from(DEFAULT_OUTPUT),
            imperfect: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let EtaGrid { min, max, steps } = self.eta_grid;
        if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) {
            return bad(format!("eta grid [{min}, {max}] must lie within [0, 1]"));
        }
        if min > max {
            return bad(format!("eta-min {min} exceeds eta-max {max}"));
        }
        if steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if let Err(e) = self.input_params() {
            return bad(e.to_string());
        }
        if self.mode == Mode::Calibrate || self.imperfect {
            if let Err(e) = calibrate_filters(0.0, self.optics.transmission, self.optics.reflection) {
                return bad(e.to_string());
            }
        }
        if self.shots == 0 {
            return bad("shots must be positive".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be positive".into());
        }
        if self.output_path.as_os_str().is_empty() {
            return bad("output path is empty".into());
        }
        if self.imperfect && matches!(self.mode, Mode::Adversary2q | Mode::Adversary4q) {
            return bad("--imperfect is not available for adversary modes".into());
        }
        Ok(())
    }

    pub fn input_params(&self) -> nonunital::Result<DiagonalInputParams> {
        DiagonalInputParams::new(self.input.p, self.input.q, self.input.r)
    }

    pub fn manifest_path(&self) -> PathBuf {
        manifest_path_for(&self.output_path)
    }
}

/// `results.csv` -> `results.manifest.json`.
pub fn manifest_path_for(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Flat JSON config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub steps: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub transmission: Option<f64>,
    pub reflection: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub imperfect: Option<bool>,
}

#[derive(Debug, Parser)]
#[command(name = "nonunital", version, allow_negative_numbers = true, about = "Entanglement activation sweeps, adversary searches and shot-noise runs")]
pub struct Cli {
    /// What to run.
    pub mode: Mode,
    #[arg(long)]
    pub eta_min: Option<f64>,
    #[arg(long)]
    pub eta_max: Option<f64>,
    /// Number of grid intervals; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Splitter intensity transmission.
    #[arg(long)]
    pub transmission: Option<f64>,
    /// Splitter intensity reflection.
    #[arg(long)]
    pub reflection: Option<f64>,
    /// Shots per measurement setting.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimizer restarts per grid point.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Replace the Hadamards with unbalanced splitters.
    #[arg(long)]
    pub imperfect: bool,
    /// Flat JSON config; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path; the manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Flags over file over defaults. The positional mode always wins.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        if let Some(m) = file.mode {
            if m != self.mode {
                return Err(CliError::Config(format!(
                    "config file mode {} conflicts with command-line mode {}",
                    m.name(),
                    self.mode.name()
                )));
            }
        }
        let mut c = ExperimentConfig::with_defaults(self.mode);
        let pick = |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
        c.eta_grid.min = pick(self.eta_min, file.eta_min, c.eta_grid.min);
        c.eta_grid.max = pick(self.eta_max, file.eta_max, c.eta_grid.max);
        c.eta_grid.steps = self.steps.or(file.steps).unwrap_or(c.eta_grid.steps);
        c.input.p = pick(self.p, file.p, c.input.p);
        c.input.q = pick(self.q, file.q, c.input.q);
        c.input.r = pick(self.r, file.r, c.input.r);
        c.optics.transmission = pick(self.transmission, file.transmission, c.optics.transmission);
        c.optics.reflection = pick(self.reflection, file.reflection, c.optics.reflection);
        c.shots = self.shots.or(file.shots).unwrap_or(c.shots);
        c.seed = self.seed.or(file.seed).unwrap_or(c.seed);
        c.restarts = self.restarts.or(file.restarts).unwrap_or(c.restarts);
        c.output_path = self.out.clone().or(file.output_path).unwrap_or(c.output_path);
        c.imperfect = self.imperfect || file.imperfect.unwrap_or(false);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // 17 significant digits round-trip any f64
            Cell::Float(v) => write!(out, "{:.16e}", if *v == 0.0 { 0.0 } else { *v }),
            Cell::Int(v) => write!(out, "{v}"),
            Cell::Bool(v) => write!(out, "{v}"),
            Cell::Empty => Ok(()),
        }
        .expect("writing to a String");
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub mode: Mode,
    pub model: &'static str,
    pub rows: Vec<Vec<Cell>>,
}

fn units(mode: Mode, column: &str) -> &'static str {
    match column {
        "estimate" | "sigma" | "true_value" if mode == Mode::Shots4q => "witness expectation",
        "estimate" | "sigma" | "true_value" => "tomographic negativity",
        "eta" => "damping probability",
        "negativity" | "min_negativity" | "analytic_prediction" => "negativity",
        "witness_expectation" => "expectation, empty for two-qubit runs",
        "converged" => "bool",
        "restarts_used" | "shots" => "count",
        "alpha0" | "alpha1" | "alpha2" => "intensity transmission",
        "survival_probability_at_beta_half" => "probability",
        _ => "",
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let cols = self.mode.columns();
        let mut out = String::new();
        writeln!(out, "# mode: {}", self.mode.name()).unwrap();
        writeln!(out, "# model:{}", self.model).unwrap();
        for c in cols {
            writeln!(out, "# {c}: {}", units(self.mode, c)).unwrap();
        }
        writeln!(out, "{}", cols.join(",")).unwrap();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// Seed for grid point `index`, drawn from stream `index` of the master seed.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn numerical(eta: f64) -> impl Fn(nonunital::Error) -> CliError {
    move |source| CliError::Numerical { eta, source }
}

fn splitter_block(config: &ExperimentConfig, eta: f64) -> nonunital::Result<NoiseBlock> {
    let mixer = unbalanced_splitter(config.optics.transmission, config.optics.reflection)?;
    NoiseBlock::with_mixer(eta, mixer)
}

fn run_protocol(config: &ExperimentConfig, eta: f64, four: bool) -> nonunital::Result<ProtocolResult> {
    let params = config.input_params()?;
    let (t, r) = (config.optics.transmission, config.optics.reflection);
    match (four, config.imperfect) {
        (false, false) => two_qubit_protocol(eta, None),
        (false, true) => imperfect_two_qubit(eta, t, r),
        (true, false) => four_qubit_protocol(&params, eta, None, None),
        (true, true) => imperfect_protocol(&params, eta, t, r),
    }
}

/// Closed-form negativity: the off-diagonal sum of the state entering the
/// CNOT stage. Ideal runs use the analytic post-noise state; the splitter
/// model uses the simulated one.
fn analytic_prediction(config: &ExperimentConfig, eta: f64, four: bool) -> nonunital::Result<f64> {
    let pre = match (four, config.imperfect) {
        (false, false) => return Ok(eta / 2.0),
        (true, false) => rho_prime_ab(&config.input_params()?, eta)?,
        (false, true) => two_qubit_pre_cnot(&splitter_block(config, eta)?, None)?,
        (true, true) => four_qubit_pre_cnot(&splitter_block(config, eta)?, &config.input_params()?, None, None)?,
    };
    analytic_negativity_offdiag(&pre)
}

fn sweep_row(config: &ExperimentConfig, eta: f64, four: bool) -> nonunital::Result<Vec<Cell>> {
    let r = run_protocol(config, eta, four)?;
    Ok(vec![
        Cell::Float(eta),
        Cell::Float(r.negativity),
        r.witness_expectation.map_or(Cell::Empty, Cell::Float),
        Cell::Float(analytic_prediction(config, eta, four)?),
    ])
}

fn adversary_row(config: &ExperimentConfig, eta: f64, index: usize, four: bool) -> nonunital::Result<Vec<Cell>> {
    let settings = SearchSettings::new(config.restarts, point_seed(config.seed, index));
    let out = if four {
        minimize_negativity_4q(&config.input_params()?, eta, &settings)?
    } else {
        minimize_negativity_2q(eta, &settings)?
    };
    Ok(vec![
        Cell::Float(eta),
        Cell::Float(out.min_negativity),
        Cell::Bool(out.converged),
        Cell::Int(out.restarts_used as u64),
    ])
}

fn calibrate_row(config: &ExperimentConfig, eta: f64) -> nonunital::Result<Vec<Cell>> {
    let params = OpticalParams::calibrated(eta, config.optics.transmission, config.optics.reflection)?;
    let survival = survival_probability(&DensityMatrix::maximally_mixed(1), &params)?;
    let f = params.filters;
    Ok(vec![
        Cell::Float(eta),
        Cell::Float(f.alpha0),
        Cell::Float(f.alpha1),
        Cell::Float(f.alpha2),
        Cell::Float(survival),
    ])
}

/// Two-qubit: negativity of the tomographic reconstruction from the nine
/// Pauli settings. Four-qubit: the witness from its three settings.
fn shots_row(config: &ExperimentConfig, eta: f64, index: usize, four: bool) -> nonunital::Result<Vec<Cell>> {
    let rho = run_protocol(config, eta, four)?.rho_out;
    let seed = point_seed(config.seed, index);
    let (estimate, sigma, truth) = if four {
        let records = simulate_records(&rho, &witness_settings(), config.shots, seed)?;
        let est = witness_estimate(&records, DEFAULT_RESAMPLES, seed.wrapping_add(1))?;
        let truth = nonunital::metrics::expectation(&nonunital::metrics::build_witness_abcd(), &rho)?;
        (est.value, est.sigma, truth)
    } else {
        let records = simulate_records(&rho, &all_settings(2), config.shots, seed)?;
        let tables: Vec<_> = records.iter().map(CountRecord::frequencies).collect();
        let est = Statistic::TomographicNegativity.evaluate(&tables)?;
        let sigma = bootstrap_sigma(&records, Statistic::TomographicNegativity, DEFAULT_RESAMPLES, seed.wrapping_add(1))?;
        let truth = negativity(&rho, &Bipartition::qubits(2, &[0])?)?;
        (est, sigma, truth)
    };
    Ok(vec![
        Cell::Float(eta),
        Cell::Float(estimate),
        Cell::Float(sigma),
        Cell::Float(truth),
        Cell::Int(config.shots),
    ])
}

/// Computes the result table. Rows come back in grid order.
pub fn compute(config: &ExperimentConfig) -> Result<Table, CliError> {
    config.validate()?;
    let grid = config.eta_grid.points();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(k, &eta)| {
            let row = match config.mode {
                Mode::Sweep2q => sweep_row(config, eta, false),
                Mode::Sweep4q => sweep_row(config, eta, true),
                Mode::Adversary2q => adversary_row(config, eta, k, false),
                Mode::Adversary4q => adversary_row(config, eta, k, true),
                Mode::Calibrate => calibrate_row(config, eta),
                Mode::Shots2q => shots_row(config, eta, k, false),
                Mode::Shots4q => shots_row(config, eta, k, true),
            };
            row.map_err(numerical(eta))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let model = if config.imperfect && config.mode != Mode::Calibrate { "unbalanced-bs" } else { "ideal" };
    Ok(Table { mode: config.mode, model, rows })
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    library_version: &'static str,
    timestamp_unix: u64,
    rows: usize,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs the configured job and writes the CSV and its manifest.
pub fn run(config: &ExperimentConfig) -> Result<Table, CliError> {
    let table = compute(config)?;
    write_file(&config.output_path, &table.to_csv())?;
    let manifest = Manifest {
        config,
        library_version: nonunital::VERSION,
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        rows: table.rows.len(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("config serializes");
    write_file(&config.manifest_path(), &(json + "\n"))?;
    Ok(table)
}
