//! Command-line front end.
//!
//! Every command produces a [`RunReport`], rendered either as one JSON
//! document or as an aligned ASCII table. Exit codes: 0 success, 2 input
//! error, 3 internal invariant violation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::angles::{ComplexValue, Turn};
use crate::lhv::{LhvError, LhvProblem, ProductConstraint, DEFAULT_STRATEGY_CAP};
use crate::paradox::{self, ParadoxCertificate, ParadoxError, Parity, ScanRow};
use crate::quantum::{
    self, BellValue, ExperimentConfig, LocalSetting, QuantumError, DEFAULT_OUTCOME_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const SIGNIFICANT_DIGITS: usize = 12;
const SELFTEST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<LhvError> for CliError {
    fn from(e: LhvError) -> Self {
        match e {
            LhvError::PathDisagreement(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ParadoxError> for CliError {
    fn from(e: ParadoxError) -> Self {
        match e {
            ParadoxError::TooFewParties(_) | ParadoxError::ScanRange(..) => {
                CliError::Input(e.to_string())
            }
            ParadoxError::Lhv(inner) => inner.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qunit-ghz",
    version,
    about = "GHZ correlations and paradox certificates for N quNits behind Bell multiports"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Enumeration cap for brute-force paths (outcomes or LHV strategies).
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Seed for randomized self-tests.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Leave the wall-clock timing out of the report, making JSON output
    /// byte-for-byte reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation function, distribution and perfect-correlation check.
    Correlate(CorrelateArgs),
    /// Certificate for the GHZ paradox with n parties and n ports.
    Paradox { n: usize },
    /// One certificate summary per n in a range.
    Scan { n_min: usize, n_max: usize },
    /// Solve local-hidden-variable constraints from a JSON file.
    Lhv {
        constraints: PathBuf,
        /// Comma-separated probe labels, overriding the file's probe.
        #[arg(long)]
        probe: Option<String>,
    },
    /// Randomized cross-checks of both computation routes.
    Selftest {
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    /// JSON config file.
    #[arg(long, conflicts_with_all = ["dim", "settings"])]
    pub config: Option<PathBuf>,
    #[arg(long, requires = "settings")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub parties: Option<usize>,
    /// Phases as turn fractions, ports separated by ',' and parties by ';',
    /// e.g. "0,1/6,1/3;0,1/6,1/3;0,0,0".
    #[arg(long, requires = "dim")]
    pub settings: Option<String>,
}

/// Constraint file layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub dim: u64,
    pub parties: usize,
    pub menu: Vec<String>,
    pub constraints: Vec<ProductConstraint>,
    #[serde(default)]
    pub probe: Option<Vec<String>>,
}

impl ConstraintFile {
    pub fn problem(&self) -> LhvProblem {
        LhvProblem {
            dim: self.dim,
            parties: self.parties,
            menu: self.menu.clone(),
            constraints: self.constraints.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            ..Default::default()
        }
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        self.rows.push(cells.into_iter().collect());
    }

    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(cols) {
                if i > 0 {
                    s.push_str(" | ");
                }
                let _ = write!(s, "{:<w$}", c, w = widths[i]);
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&self.headers));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

/// Outcome of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub timing_ms: Option<f64>,
    #[serde(skip)]
    pub table: Table,
    /// Exit code the run should end with; nonzero only for invariant
    /// violations detected after a report was produced.
    #[serde(skip)]
    pub exit_code: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Table => {
                let mut s = format!("# {}\n", self.command);
                s.push_str(&self.table.render());
                if let Some(ms) = self.timing_ms {
                    let _ = writeln!(s, "({ms:.3} ms)");
                }
                s
            }
        }
    }
}

/// Rounds to 12 significant digits, mapping negative zero and sub-1e-13
/// noise to zero.
pub fn decimal(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        return 0.0;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// `{"re", "im", "exact_exponent", "order"}`.
pub fn complex_json(z: ComplexValue, exact: Option<BellValue>, order: u64) -> Value {
    json!({
        "re": decimal(z.re),
        "im": decimal(z.im),
        "exact_exponent": exact.map(|b| b.exponent),
        "order": order,
    })
}

fn bell_json(b: BellValue) -> Value {
    complex_json(b.to_complex(), Some(b), b.order)
}

fn complex_text(z: ComplexValue) -> String {
    let (re, im) = (decimal(z.re), decimal(z.im));
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re} - {}i", -im)
    } else {
        format!("{re} + {im}i")
    }
}

fn bell_text(b: BellValue) -> String {
    format!(
        "g{}^{} = {}",
        b.order,
        b.exponent,
        complex_text(b.to_complex())
    )
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn quantum_input_error(source: &str, e: QuantumError) -> CliError {
    let field = match &e {
        QuantumError::SettingCount { .. } => "settings".to_string(),
        QuantumError::SettingLength { party, .. } => format!("settings[{}]", party - 1),
        QuantumError::ZeroDimension => "dim".to_string(),
        QuantumError::ZeroParties => "parties".to_string(),
        _ => "config".to_string(),
    };
    CliError::Input(format!("{source}: field {field}: {e}"))
}

/// Parses and validates a JSON experiment config.
pub fn parse_config(text: &str, source: &str) -> Result<ExperimentConfig, CliError> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{source}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    config
        .validate()
        .map_err(|e| quantum_input_error(source, e))?;
    Ok(config)
}

/// Parses `"a,b,c;d,e,f"` into per-party settings.
pub fn parse_inline_settings(text: &str) -> Result<Vec<LocalSetting>, CliError> {
    text.split(';')
        .enumerate()
        .map(|(party, chunk)| {
            chunk
                .split(',')
                .enumerate()
                .map(|(port, s)| {
                    s.parse::<Turn>().map_err(|e| {
                        CliError::Input(format!("--settings: field settings[{party}][{port}]: {e}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(LocalSetting)
        })
        .collect()
}

fn load_config(args: &CorrelateArgs) -> Result<ExperimentConfig, CliError> {
    let config = match (&args.config, args.dim, &args.settings) {
        (Some(path), _, _) => parse_config(&read_file(path)?, &path.display().to_string())?,
        (None, Some(dim), Some(settings)) => {
            let config = ExperimentConfig {
                dim,
                parties: args.parties.unwrap_or(settings.split(';').count()),
                settings: parse_inline_settings(settings)?,
            };
            config
                .validate()
                .map_err(|e| quantum_input_error("--settings", e))?;
            config
        }
        _ => {
            return Err(CliError::Input(
                "correlate needs --config <file> or --dim with --settings".into(),
            ))
        }
    };
    if let Some(p) = args.parties {
        if p != config.parties {
            return Err(CliError::Input(format!(
                "field parties: --parties {p} but the config has {}",
                config.parties
            )));
        }
    }
    Ok(config)
}

pub fn cmd_correlate(config: &ExperimentConfig, cap: u64) -> Result<RunReport, CliError> {
    let internal = |e: QuantumError| CliError::Internal(e.to_string());
    let order = config.dim as u64;
    let closed = quantum::correlation_closed(config).map_err(internal)?;
    let perfect = match quantum::perfect_correlation_value(config) {
        Ok(p) => p,
        // exact phase sums overflowing the denominator cap is an input problem
        Err(QuantumError::Angle(e)) => return Err(CliError::Input(e.to_string())),
        Err(e) => return Err(internal(e)),
    };

    let mut table = Table::new(&["quantity", "value"]);
    table.row(["closed correlation".into(), complex_text(closed)]);
    let (direct, distribution, omitted) = match quantum::outcome_distribution(config, cap) {
        Ok(dist) => {
            let direct = quantum::correlation_direct(config, cap).map_err(internal)?;
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            if (total - 1.0).abs() > SELFTEST_TOLERANCE {
                return Err(CliError::Internal(format!("probabilities sum to {total}")));
            }
            if (direct - closed).norm() > SELFTEST_TOLERANCE {
                return Err(CliError::Internal(format!(
                    "direct correlation {direct} differs from closed form {closed}"
                )));
            }
            table.row(["direct correlation".into(), complex_text(direct)]);
            let rows: Vec<Value> = dist
                .iter()
                .map(|(o, p)| json!({ "outcome": o.0, "probability": decimal(*p) }))
                .collect();
            (Some(direct), Some(rows), None)
        }
        Err(QuantumError::CapExceeded { outcomes, cap }) => {
            let notice = format!(
                "direct correlation and distribution omitted: {outcomes} outcomes exceed the cap of {cap}"
            );
            table.notes.push(notice.clone());
            (None, None, Some(notice))
        }
        Err(e) => return Err(internal(e)),
    };
    table.row([
        "perfect correlation".into(),
        perfect.map_or("none".into(), bell_text),
    ]);
    if let Some(rows) = &distribution {
        let nonzero = rows
            .iter()
            .filter(|r| r["probability"].as_f64().unwrap_or(0.0) != 0.0)
            .count();
        table.row([
            "outcomes with p > 0".into(),
            format!("{nonzero} of {}", rows.len()),
        ]);
    }

    let exact = perfect;
    Ok(RunReport {
        command: "correlate".into(),
        inputs: serde_json::to_value(config).expect("config serializes"),
        outputs: json!({
            "correlation_closed": complex_json(closed, exact, order),
            "correlation_direct": direct.map(|d| complex_json(d, exact, order)),
            "perfect_correlation": perfect.map(|b| json!({"exponent": b.exponent, "order": b.order})),
            "distribution": distribution,
            "omitted": omitted,
        }),
        timing_ms: None,
        table,
        exit_code: EXIT_OK,
    })
}

fn certificate_json(c: &ParadoxCertificate) -> Value {
    let order = c.dim as u64;
    json!({
        "dim": c.dim,
        "parity": if c.dim % 2 == 1 { "odd" } else { "even" },
        "settings": c.settings,
        "constraint_configs": c.constraint_configs,
        "constraint_value": bell_json(c.constraint_value),
        "baseline_value": bell_json(c.baseline_value),
        "probe_config": c.probe_config,
        "lhv_forced_value": bell_json(c.lhv_forced_value),
        "lhv_strategy_count": c.lhv_strategy_count.to_string(),
        "lhv_enumerated": c.lhv_enumerated,
        "quantum_probe_value": complex_json(c.quantum_probe_value, None, order),
        "discrepancy": decimal(c.discrepancy),
    })
}

pub fn cmd_paradox(n: usize, cap: u64) -> Result<RunReport, CliError> {
    let cert = paradox::build_certificate(n, cap)?;
    let mut table = Table::new(&["quantity", "value"]);
    table.row(["n".into(), n.to_string()]);
    table.row(["phi (turns)".into(), setting_text(&cert.settings.phi)]);
    table.row([
        "phi' (turns)".into(),
        setting_text(&cert.settings.phi_prime),
    ]);
    table.row([
        format!("E_QM at {} single-phi' runs", n),
        bell_text(cert.constraint_value),
    ]);
    table.row(["E_QM at all phi'".into(), bell_text(cert.baseline_value)]);
    table.row([
        "consistent LHV strategies".into(),
        format!(
            "{}{}",
            cert.lhv_strategy_count,
            if cert.lhv_enumerated {
                " (enumerated)"
            } else {
                ""
            }
        ),
    ]);
    table.row([
        "LHV forced value at all phi".into(),
        bell_text(cert.lhv_forced_value),
    ]);
    table.row([
        "E_QM at all phi".into(),
        complex_text(cert.quantum_probe_value),
    ]);
    table.row([
        "discrepancy".into(),
        format!("{}", decimal(cert.discrepancy)),
    ]);
    let exit_code = if cert.discrepancy > 0.0 && cert.reverify()? {
        EXIT_OK
    } else {
        table
            .notes
            .push("certificate does not certify a paradox".into());
        EXIT_INTERNAL
    };
    Ok(RunReport {
        command: "paradox".into(),
        inputs: json!({ "n": n, "cap": cap }),
        outputs: certificate_json(&cert),
        timing_ms: None,
        table,
        exit_code,
    })
}

fn setting_text(s: &LocalSetting) -> String {
    let parts: Vec<String> = s.phases().iter().map(Turn::to_string).collect();
    format!("({})", parts.join(", "))
}

fn scan_row_json(r: &ScanRow) -> Value {
    json!({
        "n": r.n,
        "parity": r.parity,
        "constraint_value": bell_json(r.constraint_value),
        "lhv_forced_value": bell_json(r.lhv_forced_value),
        "quantum_probe_value": complex_json(r.quantum_probe_value, None, r.n as u64),
        "discrepancy": decimal(r.discrepancy),
    })
}

/// Odd-`n` probe values must decrease strictly and stay above -1.
pub fn odd_rows_monotone(rows: &[ScanRow]) -> bool {
    let odd: Vec<f64> = rows
        .iter()
        .filter(|r| r.parity == Parity::Odd)
        .map(|r| r.quantum_probe_value.re)
        .collect();
    odd.windows(2).all(|w| w[1] < w[0]) && odd.iter().all(|&v| v > -1.0)
}

pub fn cmd_scan(n_min: usize, n_max: usize, cap: u64) -> Result<RunReport, CliError> {
    let rows = paradox::scan(n_min, n_max, cap)?;
    let mut table = Table::new(&[
        "n",
        "parity",
        "constraint value",
        "quantum probe value",
        "discrepancy",
    ]);
    for r in &rows {
        table.row([
            r.n.to_string(),
            format!("{:?}", r.parity).to_lowercase(),
            bell_text(r.constraint_value),
            complex_text(r.quantum_probe_value),
            format!("{}", decimal(r.discrepancy)),
        ]);
    }
    let exit_code = if odd_rows_monotone(&rows) && rows.iter().all(|r| r.discrepancy > 0.0) {
        EXIT_OK
    } else {
        table
            .notes
            .push("scan rows violate the expected limit behaviour".into());
        EXIT_INTERNAL
    };
    Ok(RunReport {
        command: "scan".into(),
        inputs: json!({ "n_min": n_min, "n_max": n_max, "cap": cap }),
        outputs: json!({ "rows": rows.iter().map(scan_row_json).collect::<Vec<_>>() }),
        timing_ms: None,
        table,
        exit_code,
    })
}

pub fn parse_constraint_file(text: &str, source: &str) -> Result<ConstraintFile, CliError> {
    let file: ConstraintFile = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{source}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    file.problem()
        .validate()
        .map_err(|e| CliError::Input(format!("{source}: {e}")))?;
    Ok(file)
}

pub fn cmd_lhv(file: &ConstraintFile, cap: u64) -> Result<RunReport, CliError> {
    let problem = file.problem();
    let probe = file.probe.clone().ok_or_else(|| {
        CliError::Input("no probe given (file field \"probe\" or --probe)".into())
    })?;
    let analysis = problem.analyze(&probe, cap)?;
    let order = problem.dim;
    let achievable: Vec<Value> = analysis
        .achievable_values()
        .into_iter()
        .map(bell_json)
        .collect();

    let mut table = Table::new(&["quantity", "value"]);
    table.row([
        "status".into(),
        format!("{:?}", analysis.solution.status).to_lowercase(),
    ]);
    table.row([
        "consistent strategies".into(),
        analysis.solution.count.to_string(),
    ]);
    table.row([
        "enumeration".into(),
        match &analysis.enumeration {
            Some(e) => format!("{} strategies, agrees", e.count),
            None => "skipped (above cap)".into(),
        },
    ]);
    table.row(["probe".into(), probe.join(", ")]);
    table.row([
        "achievable exponents".into(),
        format!("{:?}", analysis.achievable.iter().collect::<Vec<_>>()),
    ]);
    let particular = problem.particular_strategy(&analysis.solution);

    Ok(RunReport {
        command: "lhv".into(),
        inputs: serde_json::to_value(file).expect("constraint file serializes"),
        outputs: json!({
            "status": analysis.solution.status,
            "count": analysis.solution.count.to_string(),
            "particular": particular.map(|s| s.exponents),
            "kernel_basis": analysis.solution.kernel_basis,
            "kernel_orders": analysis.solution.kernel_orders,
            "achievable": achievable,
            "order": order,
            "enumeration": analysis.enumeration.map(|e| json!({
                "count": e.count,
                "achievable": e.achievable,
            })),
        }),
        timing_ms: None,
        table,
        exit_code: EXIT_OK,
    })
}

fn random_config(rng: &mut ChaCha8Rng) -> ExperimentConfig {
    let dim = rng.gen_range(2..=5);
    let parties = rng.gen_range(1..=5);
    let settings = (0..parties)
        .map(|_| {
            LocalSetting(
                (0..dim)
                    .map(|_| {
                        let den = rng.gen_range(1..=12);
                        Turn::from_fraction(rng.gen_range(0..den), den).expect("small fraction")
                    })
                    .collect(),
            )
        })
        .collect();
    ExperimentConfig {
        dim,
        parties,
        settings,
    }
}

fn random_problem(rng: &mut ChaCha8Rng) -> LhvProblem {
    let dim = rng.gen_range(2..=4);
    let parties = rng.gen_range(2..=3);
    let menu: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let constraints = (0..rng.gen_range(0..=5))
        .map(|_| ProductConstraint {
            choice: (0..parties)
                .map(|_| menu[rng.gen_range(0..menu.len())].clone())
                .collect(),
            exponent: rng.gen_range(0..dim),
        })
        .collect();
    LhvProblem {
        dim,
        parties,
        menu,
        constraints,
    }
}

pub fn cmd_selftest(seed: u64, cases: usize, cap: u64) -> Result<RunReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_corr = 0f64;
    let mut worst_norm = 0f64;
    for _ in 0..cases {
        let config = random_config(&mut rng);
        let closed =
            quantum::correlation_closed(&config).map_err(|e| CliError::Internal(e.to_string()))?;
        let direct = quantum::correlation_direct(&config, cap)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let total: f64 = quantum::outcome_distribution(&config, cap)
            .map_err(|e| CliError::Internal(e.to_string()))?
            .iter()
            .map(|(_, p)| p)
            .sum();
        worst_corr = worst_corr.max((closed - direct).norm());
        worst_norm = worst_norm.max((total - 1.0).abs());
    }
    let mut lhv_checked = 0;
    for _ in 0..cases {
        let problem = random_problem(&mut rng);
        let probe: Vec<String> = (0..problem.parties)
            .map(|_| problem.menu[rng.gen_range(0..problem.menu.len())].clone())
            .collect();
        // analyze errors out if the solver and enumeration disagree
        problem.analyze(&probe, DEFAULT_STRATEGY_CAP.min(cap.max(4096)))?;
        lhv_checked += 1;
    }
    let pass = worst_corr <= SELFTEST_TOLERANCE && worst_norm <= SELFTEST_TOLERANCE;
    let mut table = Table::new(&["check", "cases", "worst deviation", "result"]);
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" }.to_string();
    table.row([
        "direct vs closed correlation".into(),
        cases.to_string(),
        format!("{:e}", worst_corr),
        verdict(worst_corr <= SELFTEST_TOLERANCE),
    ]);
    table.row([
        "distribution normalization".into(),
        cases.to_string(),
        format!("{:e}", worst_norm),
        verdict(worst_norm <= SELFTEST_TOLERANCE),
    ]);
    table.row([
        "LHV solver vs enumeration".into(),
        lhv_checked.to_string(),
        "0".into(),
        verdict(true),
    ]);
    Ok(RunReport {
        command: "selftest".into(),
        inputs: json!({ "seed": seed, "cases": cases }),
        outputs: json!({
            "correlation_max_deviation": worst_corr,
            "normalization_max_deviation": worst_norm,
            "lhv_cases": lhv_checked,
            "pass": pass,
        }),
        timing_ms: None,
        table,
        exit_code: if pass { EXIT_OK } else { EXIT_INTERNAL },
    })
}

fn parse_probe(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).collect()
}

/// Dispatches one parsed command line.
pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let common = &cli.common;
    let mut report = match &cli.command {
        Command::Correlate(args) => {
            let config = load_config(args)?;
            cmd_correlate(&config, common.cap.unwrap_or(DEFAULT_OUTCOME_CAP))?
        }
        Command::Paradox { n } => cmd_paradox(*n, common.cap.unwrap_or(DEFAULT_STRATEGY_CAP))?,
        Command::Scan { n_min, n_max } => {
            cmd_scan(*n_min, *n_max, common.cap.unwrap_or(DEFAULT_STRATEGY_CAP))?
        }
        Command::Lhv { constraints, probe } => {
            let mut file = parse_constraint_file(
                &read_file(constraints)?,
                &constraints.display().to_string(),
            )?;
            if let Some(p) = probe {
                file.probe = Some(parse_probe(p));
            }
            cmd_lhv(&file, common.cap.unwrap_or(DEFAULT_STRATEGY_CAP))?
        }
        Command::Selftest { cases } => cmd_selftest(
            common.seed,
            *cases,
            common.cap.unwrap_or(DEFAULT_OUTCOME_CAP),
        )?,
    };
    if !common.no_timing {
        report.timing_ms = Some(decimal(start.elapsed().as_secs_f64() * 1e3));
    }
    Ok(report)
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = report.render(cli.common.format);
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None => print!("{text}"),
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
