//! Command-line front end: configuration parsing, the four subcommands, and
//! report rendering.
//!
//! Exit codes: 0 success, 1 internal error, 2 validation or configuration
//! error, 3 protocol error or a result below its pass threshold.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ffi::OsString;
use std::io::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use toml::Spanned;

use crate::brun::{build_distinguisher, distinguish, ConditionReport};
use crate::dctc::{self, Policy, SolverOptions};
use crate::error::{Error, ErrorClass};
use crate::linalg::{max_entry_norm, CMatrix, CVector, DensityMatrix, StateSet, StateVector, UnitaryMatrix};
use crate::report::{self, complex_vector, matrix, real_matrix, Table, Value};
use crate::superpose::{self, build_u_ij, gamma, run_protocol_with, two_state, SuperpositionSpec};

/// Default pass margin: fidelities must reach `1 − 1e-6`.
pub const DEFAULT_FIDELITY_TOL: f64 = 1e-6;
/// `example` passes when the largest deviation from the closed forms is below this.
pub const EXAMPLE_DEVIATION_TOL: f64 = 1e-9;
/// Key of the only non-deterministic report entry.
pub const TIMESTAMP_KEY: &str = "generated_unix_seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Internal = 1,
    Validation = 2,
    Protocol = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

impl From<ErrorClass> for ExitStatus {
    fn from(class: ErrorClass) -> Self {
        match class {
            ErrorClass::Validation => ExitStatus::Validation,
            ErrorClass::Protocol => ExitStatus::Protocol,
            ErrorClass::Internal => ExitStatus::Internal,
        }
    }
}

/// A rendered-to-be report and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Table,
    pub exit: ExitStatus,
}

impl Outcome {
    fn error(command: &str, exit: ExitStatus, kind: &str, message: String) -> Self {
        let report = Table::new()
            .with("command", command)
            .with("status", "error")
            .with("exit_code", exit.code() as i64)
            .with("error_kind", kind)
            .with("error_message", message);
        Self { report, exit }
    }

    fn from_error(command: &str, err: &Error) -> Self {
        Self::error(command, err.class().into(), err.kind(), err.to_string())
    }
}

/// Configuration problem, already anchored to a line of the source file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Complex2 = [f64; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    state_set: Option<Spanned<Vec<Vec<Complex2>>>>,
    alpha: Option<Spanned<Complex2>>,
    beta: Option<Spanned<Complex2>>,
    m: Option<Spanned<usize>>,
    n: Option<Spanned<usize>>,
    rng_seed: Option<u64>,
    policy: Option<Spanned<String>>,
    tolerances: Option<Spanned<RawTolerances>>,
    unitary: Option<Spanned<Vec<Vec<Complex2>>>>,
    rho_cr: Option<Spanned<Vec<Vec<Complex2>>>>,
    cr_state: Option<Spanned<Vec<Complex2>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    fidelity: Option<f64>,
    svd_cutoff: Option<f64>,
    residual: Option<f64>,
    entropy: Option<f64>,
}

/// Overridable numerical thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Pass when fidelity `≥ 1 − fidelity`.
    pub fidelity: f64,
    pub solver: SolverOptions,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { fidelity: DEFAULT_FIDELITY_TOL, solver: SolverOptions::default() }
    }
}

impl Tolerances {
    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(format!("tolerance `{key}` must be a finite non-negative number, got {value}"));
        }
        match key {
            "fidelity" => self.fidelity = value,
            "svd_cutoff" => self.solver.svd_cutoff = value,
            "residual" => self.solver.residual_tol = value,
            "entropy" => self.solver.entropy_tol = value,
            other => {
                return Err(format!("unknown tolerance `{other}` (expected fidelity, svd_cutoff, residual or entropy)"))
            }
        }
        Ok(())
    }

    fn to_table(self) -> Table {
        Table::new()
            .with("fidelity", self.fidelity)
            .with("svd_cutoff", self.solver.svd_cutoff)
            .with("residual", self.solver.residual_tol)
            .with("entropy", self.solver.entropy_tol)
    }
}

/// Validated contents of a configuration file. Every field a subcommand does
/// not need may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub state_set: Option<StateSet>,
    pub spec: Option<SuperpositionSpec>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub rng_seed: u64,
    pub policy: Policy,
    pub tolerances: Tolerances,
    pub unitary: Option<UnitaryMatrix>,
    pub rho_cr: Option<DensityMatrix>,
}

struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line_of(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, key: &str, span: Range<usize>, detail: impl std::fmt::Display) -> Result<T, ConfigError> {
        Err(ConfigError(format!("{}:{}: `{key}`: {detail}", self.name, self.line_of(span))))
    }
}

fn complex(z: Complex2) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn vector(v: &[Complex2]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().copied().map(complex))
}

fn square_matrix(rows: &[Vec<Complex2>]) -> Result<CMatrix, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!(
            "expected a non-empty square matrix, got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        ));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| complex(rows[r][c])))
}

impl RunConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        let src = Source { name: source_name, text };
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("{source_name}: {}", e.to_string().trim_end())))?;

        let state_set = match &raw.state_set {
            Some(s) => {
                let states = s
                    .get_ref()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| StateVector::new(vector(v)).map_err(|e| format!("state {k}: {e}")))
                    .collect::<Result<Vec<_>, _>>();
                match states.and_then(|st| StateSet::new(st).map_err(|e| e.to_string())) {
                    Ok(set) => Some(set),
                    Err(e) => return src.err("state_set", s.span(), e),
                }
            }
            None => None,
        };

        let spec = match (&raw.alpha, &raw.beta) {
            (Some(a), Some(b)) => match SuperpositionSpec::new(complex(*a.get_ref()), complex(*b.get_ref())) {
                Ok(spec) => Some(spec),
                Err(e) => return src.err("alpha", a.span(), e),
            },
            (Some(a), None) => return src.err("alpha", a.span(), "`beta` is missing"),
            (None, Some(b)) => return src.err("beta", b.span(), "`alpha` is missing"),
            (None, None) => None,
        };

        for (key, index) in [("m", &raw.m), ("n", &raw.n)] {
            if let (Some(i), Some(set)) = (index, &state_set) {
                if *i.get_ref() >= set.len() {
                    return src.err(
                        key,
                        i.span(),
                        format!("index {} out of range for {} states", i.get_ref(), set.len()),
                    );
                }
            }
        }

        let policy = match &raw.policy {
            Some(p) => match p.get_ref().parse() {
                Ok(policy) => policy,
                Err(e) => return src.err("policy", p.span(), e),
            },
            None => Policy::default(),
        };

        let mut tolerances = Tolerances::default();
        if let Some(t) = &raw.tolerances {
            let r = t.get_ref();
            for (key, value) in [
                ("fidelity", r.fidelity),
                ("svd_cutoff", r.svd_cutoff),
                ("residual", r.residual),
                ("entropy", r.entropy),
            ] {
                if let Some(v) = value {
                    if let Err(e) = tolerances.set(key, v) {
                        return src.err("tolerances", t.span(), e);
                    }
                }
            }
        }

        let unitary = match &raw.unitary {
            Some(u) => {
                match square_matrix(u.get_ref()).and_then(|m| UnitaryMatrix::new(m).map_err(|e| e.to_string())) {
                    Ok(u) => Some(u),
                    Err(e) => return src.err("unitary", u.span(), e),
                }
            }
            None => None,
        };

        let rho_cr = match (&raw.rho_cr, &raw.cr_state) {
            (Some(_), Some(s)) => return src.err("cr_state", s.span(), "give either `rho_cr` or `cr_state`, not both"),
            (Some(r), None) => {
                match square_matrix(r.get_ref()).and_then(|m| DensityMatrix::new(m).map_err(|e| e.to_string())) {
                    Ok(rho) => Some(rho),
                    Err(e) => return src.err("rho_cr", r.span(), e),
                }
            }
            (None, Some(s)) => match StateVector::new(vector(s.get_ref())) {
                Ok(psi) => Some(psi.projector()),
                Err(e) => return src.err("cr_state", s.span(), e),
            },
            (None, None) => None,
        };

        Ok(Self {
            state_set,
            spec,
            m: raw.m.map(Spanned::into_inner),
            n: raw.n.map(Spanned::into_inner),
            rng_seed: raw.rng_seed.unwrap_or(0),
            policy,
            tolerances,
            unitary,
            rho_cr,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Overrides {
    /// Seed for randomized unitary completions (overrides `rng_seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed-point selection policy: require_unique or max_entropy.
    #[arg(long)]
    pub policy: Option<Policy>,
    /// Tolerance override `KEY=VALUE` (fidelity, svd_cutoff, residual, entropy); repeatable.
    #[arg(long = "tolerance", value_name = "KEY=VALUE")]
    pub tolerances: Vec<String>,
}

impl Overrides {
    fn apply(&self, config: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(seed) = self.seed {
            config.rng_seed = seed;
        }
        if let Some(policy) = self.policy {
            config.policy = policy;
        }
        for item in &self.tolerances {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("--tolerance expects KEY=VALUE, got `{item}`")))?;
            let value: f64 = value.trim().parse().map_err(|e| ConfigError(format!("--tolerance {key}: {e}")))?;
            config.tolerances.set(key.trim(), value).map_err(ConfigError)?;
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dctc",
    version,
    about = "Deutsch CTC simulator: fixed points, state discrimination, superposition of unknown states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit the report as JSON instead of TOML.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Superpose two unknown members of a known set.
    Superpose {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Discriminate every member of a known set.
    Distinguish {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Solve the self-consistency condition for a given unitary and CR state.
    FixedPoint {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Rebuild the two-state {|0⟩, |−⟩} example and compare with its closed forms.
    Example {
        #[arg(long, default_value_t = FRAC_1_SQRT_2, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = FRAC_1_SQRT_2, allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn header(command: &str, config: &RunConfig) -> Table {
    Table::new()
        .with("command", command)
        .with("rng_seed", config.rng_seed)
        .with("policy", config.policy.to_string())
        .with("tolerances", config.tolerances.to_table())
}

fn finish(mut report: Table, exit: ExitStatus) -> Outcome {
    let status = if exit == ExitStatus::Success { "ok" } else { "fail" };
    report.insert("status", status).insert("exit_code", exit.code() as i64);
    Outcome { report, exit }
}

fn missing(command: &str, key: &str) -> Outcome {
    Outcome::error(command, ExitStatus::Validation, "ConfigError", format!("config is missing `{key}`"))
}

fn state_set_table(set: &StateSet) -> Value {
    Value::List(set.states().iter().map(|s| complex_vector(s.amplitudes().iter())).collect())
}

fn condition_table(report: &ConditionReport) -> Table {
    Table::new()
        .with("overlaps", real_matrix(&report.overlaps))
        .with("min_overlap", report.min_overlap)
        .with("condition1_deviation", report.condition1_deviation.clone())
}

fn index_range(fixed: Option<usize>, len: usize) -> Vec<usize> {
    fixed.map_or_else(|| (0..len).collect(), |i| vec![i])
}

pub fn cmd_superpose(config: &RunConfig) -> Outcome {
    const CMD: &str = "superpose";
    let Some(set) = &config.state_set else { return missing(CMD, "state_set") };
    let Some(spec) = &config.spec else { return missing(CMD, "alpha/beta") };
    let bundle = match build_distinguisher(set, config.rng_seed) {
        Ok(b) => b,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let pairs: Vec<(usize, usize)> = index_range(config.m, set.len())
        .into_iter()
        .flat_map(|m| index_range(config.n, set.len()).into_iter().map(move |n| (m, n)))
        .collect();
    let runs: Vec<_> = pairs.par_iter().map(|&(m, n)| run_protocol_with(&bundle, m, n, spec)).collect();

    let threshold = 1.0 - config.tolerances.fidelity;
    let mut pair_tables = Vec::with_capacity(runs.len());
    let mut all_pass = true;
    for run in runs {
        let r = match run {
            Ok(r) => r,
            Err(e) => return Outcome::from_error(CMD, &e),
        };
        let passed = r.fidelity >= threshold;
        all_pass &= passed;
        let g = gamma(set, r.m, r.n, spec).expect("indices validated by the run");
        pair_tables.push(
            Table::new()
                .with("m", r.m)
                .with("n", r.n)
                .with("fidelity", r.fidelity)
                .with("passed", passed)
                .with("gamma", g)
                .with("ancilla_state", complex_vector(r.ancilla_state.amplitudes().iter()))
                .with("expected", complex_vector(r.expected.amplitudes().iter()))
                .with("decoded_indices", vec![r.decoded_indices.0, r.decoded_indices.1])
                .with("fixed_point_residuals", vec![r.fixed_point_residuals.0, r.fixed_point_residuals.1])
                .with("fixed_space_dims", vec![r.fixed_space_dims.0, r.fixed_space_dims.1])
                .with("ancilla_impurity", r.ancilla_impurity),
        );
    }
    let report = header(CMD, config)
        .with("state_set", state_set_table(set))
        .with("alpha", spec.alpha())
        .with("beta", spec.beta())
        .with("fidelity_threshold", threshold)
        .with("condition", condition_table(&bundle.condition_report()))
        .with("pairs", pair_tables);
    finish(report, if all_pass { ExitStatus::Success } else { ExitStatus::Protocol })
}

pub fn cmd_distinguish(config: &RunConfig) -> Outcome {
    const CMD: &str = "distinguish";
    let Some(set) = &config.state_set else { return missing(CMD, "state_set") };
    let bundle = match build_distinguisher(set, config.rng_seed) {
        Ok(b) => b,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let runs: Vec<_> = set.states().par_iter().map(|psi| distinguish(&bundle, psi)).collect();
    let mut inputs = Vec::with_capacity(runs.len());
    let mut all_correct = true;
    for (j, run) in runs.into_iter().enumerate() {
        let d = match run {
            Ok(d) => d,
            Err(e) => return Outcome::from_error(CMD, &e),
        };
        all_correct &= d.decoded == j;
        inputs.push(
            Table::new()
                .with("input", j)
                .with("decoded", d.decoded)
                .with("correct", d.decoded == j)
                .with("fidelity_to_basis", d.fidelity_to_basis)
                .with("residual", d.residual)
                .with("fixed_space_dim", d.fixed_space_dim)
                .with("unique", d.fixed_space_dim == 1)
                .with("rho_out", matrix(d.rho_out.entries())),
        );
    }
    let report = header(CMD, config)
        .with("state_set", state_set_table(set))
        .with("condition", condition_table(&bundle.condition_report()))
        .with("total_unitary", matrix(bundle.total().entries()))
        .with("inputs", inputs);
    finish(report, if all_correct { ExitStatus::Success } else { ExitStatus::Protocol })
}

pub fn cmd_fixed_point(config: &RunConfig) -> Outcome {
    const CMD: &str = "fixed-point";
    let Some(u) = &config.unitary else { return missing(CMD, "unitary") };
    let Some(rho) = &config.rho_cr else { return missing(CMD, "rho_cr or cr_state") };
    let result = match dctc::fixed_point_with(u, rho, config.policy, &config.tolerances.solver) {
        Ok(r) => r,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let output = match dctc::output_state(u, rho, &result.fixed_point) {
        Ok(o) => o,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let report = header(CMD, config)
        .with("fixed_point", matrix(result.fixed_point.entries()))
        .with("residual", result.residual)
        .with("fixed_space_dim", result.fixed_space_dim)
        .with("unique", result.unique)
        .with("entropy", result.fixed_point.entropy())
        .with("output_state", matrix(output.entries()));
    finish(report, ExitStatus::Success)
}

/// Constructed-vs-closed-form comparison for one block of the two-state example.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockComparison {
    pub i: usize,
    pub j: usize,
    pub constructed: CMatrix,
    pub closed_form: CMatrix,
    pub exact_deviation: f64,
    pub column_phase_deviation: f64,
}

/// Builds the four `U^{i,j}` of the `{|0⟩, |−⟩}` example and compares them
/// with the closed forms; also returns the distinguisher's entrywise deviation.
pub fn compare_two_state_example(
    spec: &SuperpositionSpec,
    rng_seed: u64,
) -> Result<(f64, Vec<BlockComparison>), Error> {
    let set = two_state::state_set();
    let bundle = build_distinguisher(&set, rng_seed)?;
    let distinguisher_deviation = max_entry_norm(&(bundle.total().entries() - two_state::distinguisher()));
    let mut blocks = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let constructed = build_u_ij(&set, i, j, spec, bundle.uks())?.into_inner();
            let closed_form = two_state::u_ij(i, j, spec.alpha(), spec.beta());
            blocks.push(BlockComparison {
                i,
                j,
                exact_deviation: max_entry_norm(&(&constructed - &closed_form)),
                column_phase_deviation: superpose::column_phase_deviation(&constructed, &closed_form),
                constructed,
                closed_form,
            });
        }
    }
    Ok((distinguisher_deviation, blocks))
}

pub fn cmd_example(alpha: f64, beta: f64, config: &RunConfig) -> Outcome {
    const CMD: &str = "example";
    let spec = match SuperpositionSpec::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0)) {
        Ok(s) => s,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let (distinguisher_deviation, blocks) = match compare_two_state_example(&spec, config.rng_seed) {
        Ok(r) => r,
        Err(e) => return Outcome::from_error(CMD, &e),
    };
    let max_deviation = blocks.iter().map(|b| b.column_phase_deviation).fold(distinguisher_deviation, f64::max);

    let set = two_state::state_set();
    let bundle = build_distinguisher(&set, config.rng_seed).expect("built above");
    let mut pairs = Vec::new();
    for m in 0..2 {
        for n in 0..2 {
            match run_protocol_with(&bundle, m, n, &spec) {
                Ok(r) => pairs.push(Table::new().with("m", m).with("n", n).with("fidelity", r.fidelity)),
                Err(e) => pairs.push(Table::new().with("m", m).with("n", n).with("error", e.to_string())),
            }
        }
    }

    let block_tables: Vec<Table> = blocks
        .iter()
        .map(|b| {
            Table::new()
                .with("i", b.i)
                .with("j", b.j)
                .with("constructed", matrix(&b.constructed))
                .with("closed_form", matrix(&b.closed_form))
                .with("exact_deviation", b.exact_deviation)
                .with("column_phase_deviation", b.column_phase_deviation)
        })
        .collect();
    let report = header(CMD, config)
        .with("alpha", alpha)
        .with("beta", beta)
        .with("distinguisher", matrix(bundle.total().entries()))
        .with("distinguisher_deviation", distinguisher_deviation)
        .with("max_deviation", max_deviation)
        .with("deviation_threshold", EXAMPLE_DEVIATION_TOL)
        .with("blocks", block_tables)
        .with("pairs", pairs);
    let exit = if max_deviation < EXAMPLE_DEVIATION_TOL { ExitStatus::Success } else { ExitStatus::Protocol };
    finish(report, exit)
}

fn config_outcome(command: &str, path: &Path, overrides: &Overrides) -> Result<RunConfig, Outcome> {
    let mut config =
        RunConfig::load(path).map_err(|e| Outcome::error(command, ExitStatus::Validation, "ConfigError", e.0))?;
    overrides.apply(&mut config).map_err(|e| Outcome::error(command, ExitStatus::Validation, "ConfigError", e.0))?;
    Ok(config)
}

/// Runs one parsed command line.
pub fn execute(command: &Command) -> Outcome {
    let run = |name: &str, path: &Path, overrides: &Overrides, f: fn(&RunConfig) -> Outcome| match config_outcome(
        name, path, overrides,
    ) {
        Ok(config) => f(&config),
        Err(outcome) => outcome,
    };
    match command {
        Command::Superpose { config, overrides } => run("superpose", config, overrides, cmd_superpose),
        Command::Distinguish { config, overrides } => run("distinguish", config, overrides, cmd_distinguish),
        Command::FixedPoint { config, overrides } => run("fixed-point", config, overrides, cmd_fixed_point),
        Command::Example { alpha, beta, overrides } => {
            let mut config = RunConfig {
                state_set: None,
                spec: None,
                m: None,
                n: None,
                rng_seed: 0,
                policy: Policy::default(),
                tolerances: Tolerances::default(),
                unitary: None,
                rho_cr: None,
            };
            match overrides.apply(&mut config) {
                Ok(()) => cmd_example(*alpha, *beta, &config),
                Err(e) => Outcome::error("example", ExitStatus::Validation, "ConfigError", e.0),
            }
        }
    }
}

/// Renders a report; `timestamp` goes on its own first line.
pub fn render(report: &Table, json: bool, timestamp: Option<u64>) -> String {
    let mut full = Table::new();
    if let Some(ts) = timestamp {
        full.insert(TIMESTAMP_KEY, ts);
    }
    for (k, v) in report.entries() {
        full.insert(k.clone(), v.clone());
    }
    if json {
        report::to_json(&full)
    } else {
        report::to_toml(&full)
    }
}

/// Entry point of the `dctc` binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::Validation.code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(&cli.command);
    if outcome.exit != ExitStatus::Success {
        if let Some(Value::Str(msg)) = outcome.report.get("error_message") {
            eprintln!("error: {msg}");
        }
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let text = render(&outcome.report, cli.json, Some(timestamp));
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitStatus::Internal.code();
    }
    outcome.exit.code()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STATE: &str = r#"
state_set = [
  [[1.0, 0.0], [0.0, 0.0]],
  [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]],
]
alpha = [0.7071067811865476, 0.0]
beta = [0.7071067811865476, 0.0]
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::parse(TWO_STATE, "inline").unwrap();
        assert_eq!(cfg.state_set.unwrap().len(), 2);
        assert_eq!(cfg.rng_seed, 0);
        assert_eq!(cfg.policy, Policy::RequireUnique);
        assert_eq!(cfg.m, None);
    }

    #[test]
    fn semantic_errors_name_their_line() {
        let text = "alpha = [0.0, 0.0]\nbeta = [0.0, 0.0]\n";
        let err = RunConfig::parse(text, "cfg.toml").unwrap_err();
        assert!(err.0.starts_with("cfg.toml:1: `alpha`"), "{}", err.0);

        let text = "rng_seed = 3\nstate_set = [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]\n";
        let err = RunConfig::parse(text, "cfg.toml").unwrap_err();
        assert!(err.0.starts_with("cfg.toml:2: `state_set`"), "{}", err.0);
    }

    #[test]
    fn syntax_errors_name_their_line() {
        let err = RunConfig::parse("rng_seed = 1\nalpha = [1.0,\n", "cfg.toml").unwrap_err();
        assert!(err.0.contains("line 2") || err.0.contains("line 3"), "{}", err.0);
        let err = RunConfig::parse("bogus_key = 1\n", "cfg.toml").unwrap_err();
        assert!(err.0.contains("line 1"), "{}", err.0);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let err = RunConfig::parse(&format!("{TWO_STATE}m = 2\n"), "c").unwrap_err();
        assert!(err.0.contains("`m`"), "{}", err.0);
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = RunConfig::parse(&format!("{TWO_STATE}[tolerances]\nfidelity = 1e-3\n"), "c").unwrap();
        assert_eq!(cfg.tolerances.fidelity, 1e-3);
        let o =
            Overrides { seed: Some(9), policy: Some(Policy::MaxEntropy), tolerances: vec!["svd_cutoff=1e-7".into()] };
        o.apply(&mut cfg).unwrap();
        assert_eq!((cfg.rng_seed, cfg.policy, cfg.tolerances.solver.svd_cutoff), (9, Policy::MaxEntropy, 1e-7));
        let bad = Overrides { tolerances: vec!["nope=1".into()], ..Default::default() };
        assert!(bad.apply(&mut cfg).is_err());
    }

    #[test]
    fn superpose_two_state_sweep() {
        let cfg = RunConfig::parse(TWO_STATE, "c").unwrap();
        let out = cmd_superpose(&cfg);
        assert_eq!(out.exit, ExitStatus::Success);
        let Some(Value::List(pairs)) = out.report.get("pairs") else { panic!("no pairs") };
        assert_eq!(pairs.len(), 4);
        for p in pairs {
            let Value::Table(t) = p else { panic!() };
            let Some(Value::Float(f)) = t.get("fidelity") else { panic!() };
            assert!(*f >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn example_default_passes() {
        let cfg = RunConfig::parse("", "c").unwrap();
        let out = cmd_example(FRAC_1_SQRT_2, FRAC_1_SQRT_2, &cfg);
        assert_eq!(out.exit, ExitStatus::Success);
    }

    #[test]
    fn example_single_term_first_column() {
        let spec = SuperpositionSpec::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let (_, blocks) = compare_two_state_example(&spec, 0).unwrap();
        let u01 = blocks.iter().find(|b| (b.i, b.j) == (0, 1)).unwrap();
        assert!((u01.constructed[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(u01.constructed[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn missing_fields_are_validation_errors() {
        let cfg = RunConfig::parse("", "c").unwrap();
        assert_eq!(cmd_superpose(&cfg).exit, ExitStatus::Validation);
        assert_eq!(cmd_fixed_point(&cfg).exit, ExitStatus::Validation);
        assert_eq!(cmd_distinguish(&cfg).exit, ExitStatus::Validation);
    }

    #[test]
    fn clap_surface() {
        let cli = Cli::try_parse_from(["dctc", "example", "--alpha", "-0.5", "--beta", "1", "--json"]).unwrap();
        assert!(cli.json);
        assert!(matches!(cli.command, Command::Example { alpha, .. } if alpha == -0.5));
        let cli = Cli::try_parse_from([
            "dctc",
            "fixed-point",
            "f.toml",
            "--policy",
            "max_entropy",
            "--tolerance",
            "residual=1e-9",
        ])
        .unwrap();
        let Command::FixedPoint { overrides, .. } = cli.command else { panic!() };
        assert_eq!(overrides.policy, Some(Policy::MaxEntropy));
    }
}
