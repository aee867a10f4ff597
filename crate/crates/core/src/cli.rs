//! The `records` command line.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 on
//! flag, input or evaluation errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::dist::DistributionSpec;
use crate::extract::{extract_all, RecordSequence};
use crate::laws::{self, FormulaId, LawValue};
use crate::mc::{self, McConfig, McReport};
use crate::order::{ProductOrder, RealLine, RecordKind};
use crate::verify;

const DIST_HELP: &str = "Distribution as JSON (e.g. '{\"dist\":\"exponential\",\"theta\":1}') or shorthand: \
exp:THETA | geom:P | unif:A,B | dunif:M | finite:S1,S2,...@P1,P2,...";

#[derive(Debug, Parser)]
#[command(name = "records", version, about = "Records of random sequences: extraction, laws, simulation and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the records of a sequence file.
    Extract(ExtractArgs),
    /// Evaluate a closed-form law.
    Law(LawArgs),
    /// Monte-Carlo estimate of a record statistic.
    Simulate(SimulateArgs),
    /// Run the acceptance suite and print a JSON summary.
    Verify(VerifyArgs),
    /// Print a deterministic acceptance table as CSV.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Record kind: strong-upper, weak-upper, strong-lower or weak-lower.
    #[arg(long, default_value = "strong-upper")]
    pub kind: RecordKind,
    /// Sequence file. With --dim 1 every number (separated by commas,
    /// whitespace or newlines) is one observation; with --dim d each line
    /// holds one observation of d comma-separated coordinates. Lines starting
    /// with '#' are ignored.
    #[arg(long)]
    pub input: PathBuf,
    /// Dimension of the observations; above 1 records use the componentwise order.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// Formula id (see --list).
    #[arg(long, required_unless_present = "list")]
    pub formula: Option<FormulaId>,
    /// List formula ids with their inputs.
    #[arg(long)]
    pub list: bool,
    #[arg(long, help = DIST_HELP)]
    pub dist: Option<String>,
    /// Gaps k2,...,kn, gamma exponents, or the current record time of a transition.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u64>,
    /// Record times l2,...,ln.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<u64>,
    /// Next record time of a transition.
    #[arg(long)]
    pub j: Option<u64>,
    /// Record index.
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluation point(s).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Record indices n1<...<nk.
    #[arg(long, value_delimiter = ',')]
    pub idx: Vec<usize>,
    /// Lower integration bound (default: lower endpoint).
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    /// Upper integration bound.
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Largest record time kept by truncated series.
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    /// P(U(n) - U(n-1) = k), default n = 2.
    Gap,
    /// Mean number of records among the first --horizon observations.
    RecordCount,
    /// Mean of the n-th record value over trials that reached it.
    RecordValue,
    /// P(no record after the first), discrete laws.
    NoFurtherRecord,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, help = DIST_HELP)]
    pub dist: String,
    #[arg(long, value_enum)]
    pub statistic: Statistic,
    #[arg(long, default_value = "strong-upper")]
    pub kind: RecordKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    /// Required: runs are reproducible only for an explicit seed.
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "core", value_parser = ["core"])]
    pub suite: String,
    #[arg(long)]
    pub seed: u64,
    /// Run only these check ids (1 to 11).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=11))]
    pub check: Vec<u32>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table name: gaps, pairs, gamma, hazard-integrals or no-further-record.
    #[arg(long, required_unless_present = "list", value_parser = verify::TABLES)]
    pub name: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Error carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Parses `args` and runs the command, writing the report to `stdout` unless
/// `--output` is given. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, output, code)) => match emit(&text, output.as_ref(), stdout) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match output {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

type Outcome = (String, Option<PathBuf>, i32);

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Extract(a) => {
            let out = a.output.clone();
            Ok((run_extract(&a)?, out, 0))
        }
        Command::Law(a) => {
            let out = a.output.clone();
            Ok((run_law(&a)?, out, 0))
        }
        Command::Simulate(a) => {
            let out = a.output.clone();
            Ok((pretty(&run_simulate(&a)?)?, out, 0))
        }
        Command::Verify(a) => {
            let report = verify::run_suite_checks(a.seed, &a.check);
            let code = if report.pass { 0 } else { 1 };
            Ok((pretty(&report)?, a.output, code))
        }
        Command::Table(a) => {
            if a.list {
                return Ok((verify::TABLES.join("\n") + "\n", a.output, 0));
            }
            let name = a.name.as_deref().unwrap_or_default();
            let csv = verify::table_csv(name).ok_or_else(|| CliError::usage(format!("unknown table `{name}`")))?;
            Ok((csv, a.output, 0))
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Parses a sequence file into observations of dimension `dim`.
pub fn parse_sequence(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    if dim == 0 {
        return Err(CliError::usage("--dim must be >= 1"));
    }
    let lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let number = |tok: &str| tok.parse::<f64>().map_err(|_| CliError::usage(format!("not a number: `{tok}`")));
    if dim == 1 {
        return lines
            .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()))
            .map(|t| number(t).map(|x| vec![x]))
            .collect();
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let row: Vec<f64> = l.split(',').map(|t| number(t.trim())).collect::<Result<_, _>>()?;
            if row.len() != dim {
                return Err(CliError::usage(format!("line {} has {} values, expected {dim}", i + 1, row.len())));
            }
            Ok(row)
        })
        .collect()
}

fn run_extract(a: &ExtractArgs) -> Result<String, CliError> {
    let text =
        fs::read_to_string(&a.input).map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.input.display())))?;
    let rows = parse_sequence(&text, a.dim)?;
    if a.dim == 1 {
        let rs = extract_all(rows.into_iter().map(|r| r[0]), a.kind, RealLine)?;
        render_records(&rs, a.format, |v| vec![*v])
    } else {
        let rs = extract_all(rows, a.kind, ProductOrder::new(a.dim))?;
        render_records(&rs, a.format, |v| v.clone())
    }
}

fn render_records<E: Serialize>(
    rs: &RecordSequence<E>,
    format: Format,
    coords: impl Fn(&E) -> Vec<f64>,
) -> Result<String, CliError> {
    match format {
        Format::Json => pretty(rs),
        Format::Csv => {
            let dim = rs.events.first().map_or(1, |e| coords(&e.value).len());
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["n".to_string(), "t".to_string()];
            if dim == 1 {
                header.push("value".into());
            } else {
                header.extend((1..=dim).map(|i| format!("value{i}")));
            }
            w.write_record(&header)?;
            for e in &rs.events {
                let mut row = vec![e.ordinal.to_string(), e.time_index.to_string()];
                row.extend(coords(&e.value).iter().map(f64::to_string));
                w.write_record(&row)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)
                .map_err(|e| CliError::usage(e.to_string()))
        }
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str, f: FormulaId) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::usage(format!("{f} needs --{flag}")))
}

fn need_list<T: Clone>(v: &[T], flag: &str, f: FormulaId) -> Result<Vec<T>, CliError> {
    if v.is_empty() {
        Err(CliError::usage(format!("{f} needs --{flag}")))
    } else {
        Ok(v.to_vec())
    }
}

fn run_law(a: &LawArgs) -> Result<String, CliError> {
    if a.list {
        return Ok(match a.format {
            Format::Json => pretty(
                &FormulaId::ALL
                    .iter()
                    .map(|f| json!({ "formula": f.as_str(), "operation": f.operation(), "description": f.description() }))
                    .collect::<Vec<_>>(),
            )?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["formula", "operation", "description"])?;
                for f in FormulaId::ALL {
                    w.write_record([f.as_str(), f.operation(), f.description()])?;
                }
                String::from_utf8(w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)
                    .map_err(|e| CliError::usage(e.to_string()))?
            }
        });
    }
    let f = a.formula.ok_or_else(|| CliError::usage("--formula is required"))?;
    let dist = || -> Result<DistributionSpec, CliError> { Ok(DistributionSpec::parse(&need(&a.dist, "dist", f)?)?) };
    let mut inputs = Map::new();
    let mut put = |key: &str, v: Value| {
        inputs.insert(key.to_string(), v);
    };
    let mut truncation = None;
    let value: LawValue = match f {
        FormulaId::InterRecords => {
            let k = need_list(&a.k, "k", f)?;
            put("k", json!(k));
            laws::interrecord_joint_pmf(&k)?
        }
        FormulaId::RecordTimes => {
            let ell = need_list(&a.ell, "ell", f)?;
            put("ell", json!(ell));
            laws::record_times_joint_pmf(&ell)?
        }
        FormulaId::RecordTimeTransition => {
            let [k] = need_list(&a.k, "k", f)?[..] else {
                return Err(CliError::usage("recordTimeTransition takes a single --k"));
            };
            let j = need(&a.j, "j", f)?;
            put("k", json!(k));
            put("j", json!(j));
            laws::record_time_transition_pmf(k, j)
        }
        FormulaId::Adr3 | FormulaId::Ddr3 => {
            let d = dist()?;
            let n = need(&a.n, "n", f)?;
            let [x] = need_list(&a.x, "x", f)?[..] else {
                return Err(CliError::usage(format!("{f} takes a single --x")));
            };
            put("dist", json!(d.label()));
            put("n", json!(n));
            put("x", json!(x));
            if f == FormulaId::Adr3 {
                laws::record_value_marginal_pdf(&d, n, x)?
            } else {
                laws::discrete_record_pmf(&d, n, x)?
            }
        }
        FormulaId::Adr1 | FormulaId::Ddr2 | FormulaId::Pex1 => {
            let d = dist()?;
            let x = need_list(&a.x, "x", f)?;
            put("dist", json!(d.label()));
            put("x", json!(x));
            match f {
                FormulaId::Adr1 => laws::record_value_joint_pdf(&d, &x)?,
                FormulaId::Ddr2 => laws::discrete_record_joint_pmf(&d, &x)?,
                _ => laws::joint_max_cdf(&d, &x)?,
            }
        }
        FormulaId::Adr2 => {
            let d = dist()?;
            let idx = need_list(&a.idx, "idx", f)?;
            let x = need_list(&a.x, "x", f)?;
            put("dist", json!(d.label()));
            put("idx", json!(idx));
            put("x", json!(x));
            laws::record_value_subvector_pdf(&d, &idx, &x)?
        }
        FormulaId::Grdmr => {
            let d = dist()?;
            let x = need_list(&a.x, "x", f)?;
            put("dist", json!(d.label()));
            put("x", json!(x));
            put("horizon", json!(a.horizon));
            let t = laws::record_joint_cdf_truncated(&d, &x, a.horizon)?;
            truncation = Some(t.truncation_mass);
            t.law
        }
        FormulaId::Nrec03 => {
            let d = dist()?;
            put("dist", json!(d.label()));
            laws::prob_no_further_record(&d)
        }
        FormulaId::Gamma => {
            let k = need_list(&a.k, "k", f)?;
            put("k", json!(k));
            laws::gamma_integral(&k)?
        }
        FormulaId::Gs21 => {
            let d = dist()?;
            let n = need(&a.n, "n", f)?;
            let y = need(&a.y, "y", f)?;
            put("dist", json!(d.label()));
            put("n", json!(n));
            put("z", json!(a.z));
            put("y", json!(y));
            LawValue { value: laws::hazard_simplex_integral(&d, n, a.z, y)?, formula_id: f, support_flag: true }
        }
    };
    let mut report = json!({
        "formula": f.as_str(),
        "inputs": Value::Object(inputs),
        "value": value.value,
        "support": value.support_flag,
    });
    if let Some(t) = truncation {
        report["truncation_mass"] = json!(t);
    }
    match a.format {
        Format::Json => pretty(&report),
        Format::Csv => Ok(format!("formula,value,support\n{},{},{}\n", f.as_str(), value.value, value.support_flag)),
    }
}

fn run_simulate(a: &SimulateArgs) -> Result<McReport, CliError> {
    let d = DistributionSpec::parse(&a.dist)?;
    let cfg = McConfig::new(a.trials, a.horizon, a.seed);
    if a.trials == 0 || a.horizon == 0 {
        return Err(CliError::usage("--trials and --horizon must be >= 1"));
    }
    let all = 0..a.trials;
    match a.statistic {
        Statistic::Gap => {
            let n = a.n.unwrap_or(2);
            let k = a.k.ok_or_else(|| CliError::usage("gap needs --k"))?;
            if n < 2 || k == 0 {
                return Err(CliError::usage("gap needs --n >= 2 and --k >= 1"));
            }
            let cfg = cfg.until_records(n);
            let outcomes = mc::map_trials(&d, a.kind, &cfg, all, |o| {
                let rs = &o.records;
                if rs.count >= n {
                    return Some(rs.deltas[n - 2] == k);
                }
                // a gap beyond k is already certain once k steps passed without a record
                let last = rs.record_time(n - 1)?;
                (rs.count == n - 1 && last + k <= rs.observations_consumed).then_some(false)
            });
            Ok(mc::estimate_pmf(outcomes, a.seed))
        }
        Statistic::RecordCount => {
            let counts = mc::map_trials(&d, a.kind, &cfg, all, |o| o.records.count as f64);
            Ok(mc::estimate_mean(&counts, a.seed))
        }
        Statistic::RecordValue => {
            let n = a.n.ok_or_else(|| CliError::usage("record-value needs --n"))?;
            if n == 0 {
                return Err(CliError::usage("--n must be >= 1"));
            }
            let cfg = cfg.until_records(n);
            let values = mc::map_trials(&d, a.kind, &cfg, all, |o| o.records.record_value(n).copied());
            let decided: Vec<f64> = values.iter().flatten().copied().collect();
            if decided.is_empty() {
                return Err(CliError::usage("no trial reached the requested record; raise --horizon"));
            }
            let mut r = mc::estimate_mean(&decided, a.seed);
            r.truncation_mass = 1.0 - decided.len() as f64 / a.trials as f64;
            Ok(r)
        }
        Statistic::NoFurtherRecord => Ok(mc::estimate_no_further_record(&d, &cfg)?),
    }
}
