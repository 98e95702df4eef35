//! Command-line surface: single-point bounds, finite-time data, grid
//! sweeps, design inversion and validation reports.
//!
//! Data goes to stdout only; diagnostics and errors go to stderr. Exit
//! codes: 0 success, 2 input validation, 3 numerical non-convergence,
//! 4 infeasible plan.

pub mod output;
pub mod validation;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::closed_form::{d_inf_1, d_inf_2, BoundResult, FormulaTag, SeriesOptions};
use crate::error::Error;
use crate::link_model::{LinkBudget, MobilityProfile};
use crate::planner::{
    finite_time_curve, solve_power, solve_speed, sweep, Axis, AxisParam, FixedParameter, PlanQuery,
    Spacing, SweepFormula, SweepSpec, SweepTable,
};
use crate::quadrature::{integrate_infinite, QuadratureSpec};
use crate::units::{InfoQuantity, Unit};
use output::{emit, Cell, OutputFormat, Table};

const EXIT_OK: i32 = 0;
const EXIT_IO: i32 = 1;
const EXIT_INVALID: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;
const EXIT_INFEASIBLE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "linkbound",
    version,
    about = "Bounds on total transmittable data over a receding constant-speed wireless link",
    after_help = "Defaults: bandwidth 1e5 Hz, noise 1e-8 W, ref-distance 1 m, gain 1, \
power 1 W, alpha 2, x0 = ref-distance, z0 0 m, speed 5 m/s. A JSON config file \
(--config) with keys equal to the long flag names overrides these defaults, and \
explicit flags override the file."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infinite-horizon bound for the configured link (one value plus provenance)
    Bound(BoundArgs),
    /// Transmittable data over a finite horizon and its fraction of the bound
    Finite(FiniteArgs),
    /// Evaluate a bound over a parameter grid and emit plot-ready rows
    Sweep(SweepArgs),
    /// Solve for the speed or transmit power that reaches a data target
    Plan(PlanArgs),
    /// Run the closed-form-vs-oracle validation checks and report pass/fail
    Validate(ValidateArgs),
}

/// Flags shared by every subcommand. All model flags are optional; the
/// effective value is flag, then config file, then the default.
#[derive(Args, Debug, Default, Clone)]
struct ModelArgs {
    /// Channel bandwidth B in Hz [default: 1e5]
    #[arg(long, value_name = "HZ")]
    bandwidth: Option<f64>,
    /// Receiver noise power sigma^2 in W [default: 1e-8]
    #[arg(long, value_name = "W")]
    noise: Option<f64>,
    /// Reference distance d0 in m [default: 1]
    #[arg(long, value_name = "M")]
    ref_distance: Option<f64>,
    /// Antenna gain G (unitless) [default: 1]
    #[arg(long, value_name = "X")]
    gain: Option<f64>,
    /// Transmit power P in W [default: 1]
    #[arg(long, value_name = "W")]
    power: Option<f64>,
    /// Path loss exponent alpha >= 2 [default: 2]
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Initial lateral position x0 in m [default: ref-distance]
    #[arg(long, value_name = "M")]
    x0: Option<f64>,
    /// Constant lateral offset z0 in m [default: 0]
    #[arg(long, value_name = "M")]
    z0: Option<f64>,
    /// Speed v in m/s [default: 5]
    #[arg(long, value_name = "MPS")]
    speed: Option<f64>,
    /// Output unit: nats|bits|bytes|MB [default: nats]
    #[arg(long, value_name = "UNIT")]
    unit: Option<String>,
    /// Output format: csv|json [default: csv]
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Series truncation cap [default: 100]
    #[arg(long, value_name = "N")]
    series_max_terms: Option<usize>,
    /// Quadrature relative tolerance [default: 1e-10]
    #[arg(long, value_name = "TOL")]
    qtol: Option<f64>,
    /// JSON config file; keys match the long flag names
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(after_help = "Output schema: value_<unit>,formula,series_terms,trunc_err (one row). \
Header names are stable API; trunc_err is in the output unit.")]
struct BoundArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Force the quadrature oracle instead of a closed form
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
#[command(after_help = "Output schema: T_s,value_<unit>,ratio,formula (one row). \
Header names are stable API.")]
struct FiniteArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Horizon T in seconds
    #[arg(long = "T", value_name = "S")]
    horizon: Option<f64>,
}

#[derive(Args, Debug)]
#[command(after_help = "Output schema: one column per axis (named P, v, alpha, z0, x0 or S, in \
declaration order), then value_<unit>,formula,trunc_err. Rows are emitted row-major with the \
first axis outermost. Header names are stable API. Grid points with S <= 1 under thm1/cor1-lower \
carry the quadrature fallback value and the `quadrature` formula tag.")]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Axis spec `name=min:max:count[:log|lin]`, repeatable; first axis
    /// is outermost in the row order. Names: power|speed|alpha|z0|x0|snr
    #[arg(long = "axis", value_name = "SPEC", required = true)]
    axes: Vec<String>,
    /// Formula: thm1|cor1-lower|thm2|cor2|finite|quadrature [default: thm1]
    #[arg(long, value_name = "F")]
    formula: Option<String>,
    /// Horizon T in seconds (finite formula only)
    #[arg(long = "T", value_name = "S")]
    horizon: Option<f64>,
}

#[derive(Args, Debug)]
#[command(after_help = "Output schema: solved,power_w,speed_mps,target_nats,achieved_nats (one \
row; `solved` is `speed` or `power`). Give exactly one of --power (solves speed) or --speed \
(solves power). Header names are stable API.")]
struct PlanArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Data target, e.g. `3.53MB`, `1.96e7nats`, `2.8e7bits`; a bare
    /// number is read in the --unit
    #[arg(long, value_name = "VALUE[UNIT]")]
    target: String,
}

#[derive(Args, Debug)]
#[command(after_help = "Output schema: check,status,observed,threshold,detail, one row per \
validation check. Exit code 0 iff every check passes.")]
struct ValidateArgs {
    /// Output format: csv|json [default: csv]
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
}

/// Config file schema: keys are exactly the long flag names.
#[derive(Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    bandwidth: Option<f64>,
    noise: Option<f64>,
    ref_distance: Option<f64>,
    gain: Option<f64>,
    power: Option<f64>,
    alpha: Option<f64>,
    x0: Option<f64>,
    z0: Option<f64>,
    speed: Option<f64>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    unit: Option<String>,
    format: Option<String>,
    series_max_terms: Option<usize>,
    qtol: Option<f64>,
}

/// Fully resolved run parameters: flags over config file over defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub budget: LinkBudget,
    pub profile: MobilityProfile,
    pub unit: Unit,
    pub format: OutputFormat,
    pub series: SeriesOptions,
    pub quadrature: QuadratureSpec,
    pub horizon: Option<f64>,
    power_given: bool,
    speed_given: bool,
}

impl RunConfig {
    fn resolve(args: &ModelArgs, cli_horizon: Option<f64>) -> Result<Self, Error> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::invalid("config", format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let ref_distance = args.ref_distance.or(file.ref_distance).unwrap_or(1.0);
        let budget = LinkBudget {
            bandwidth_hz: args.bandwidth.or(file.bandwidth).unwrap_or(1e5),
            noise_power_w: args.noise.or(file.noise).unwrap_or(1e-8),
            ref_distance_m: ref_distance,
            antenna_gain: args.gain.or(file.gain).unwrap_or(1.0),
            tx_power_w: args.power.or(file.power).unwrap_or(1.0),
            path_loss_exp: args.alpha.or(file.alpha).unwrap_or(2.0),
        };
        let profile = MobilityProfile {
            x0_m: args.x0.or(file.x0).unwrap_or(ref_distance),
            z0_m: args.z0.or(file.z0).unwrap_or(0.0),
            speed_mps: args.speed.or(file.speed).unwrap_or(5.0),
        };
        let unit = match args.unit.as_deref().or(file.unit.as_deref()) {
            Some(u) => u.parse::<Unit>()?,
            None => Unit::Nats,
        };
        let format = match args.format.as_deref().or(file.format.as_deref()) {
            Some(f) => f.parse::<OutputFormat>()?,
            None => OutputFormat::Csv,
        };
        let series = SeriesOptions {
            max_terms: args
                .series_max_terms
                .or(file.series_max_terms)
                .unwrap_or(100),
            ..SeriesOptions::default()
        };
        let qtol = args.qtol.or(file.qtol);
        let quadrature = QuadratureSpec {
            rel_tol: qtol.unwrap_or(1e-10),
            ..QuadratureSpec::default()
        };
        budget.validate()?;
        profile.validate()?;
        Ok(RunConfig {
            budget,
            profile,
            unit,
            format,
            series,
            quadrature,
            horizon: cli_horizon.or(file.horizon),
            power_given: args.power.is_some() || file.power.is_some(),
            speed_given: args.speed.is_some() || file.speed.is_some(),
        })
    }
}

/// Entry point used by the binary: real argv, locked stdio.
pub fn run_from_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses argv, executes the subcommand, writes data to `out` and
/// diagnostics to `err`, and returns the process exit code.
pub fn run<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_INVALID
                }
            };
        }
    };

    let outcome = match cli.command {
        Command::Bound(args) => cmd_bound(args, out, err),
        Command::Finite(args) => cmd_finite(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Plan(args) => cmd_plan(args, out),
        Command::Validate(args) => cmd_validate(args, out, err),
    };

    match outcome {
        Ok(code) => code,
        Err(CmdError::Model(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
        Err(CmdError::Io(e)) => {
            let _ = writeln!(err, "error: output failed: {e}");
            EXIT_IO
        }
    }
}

enum CmdError {
    Model(Error),
    Io(io::Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Model(e)
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Io(e)
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. }
        | Error::InsideReferenceDistance { .. }
        | Error::SnrNotAboveOne { .. }
        | Error::AlphaNotTwo { .. } => EXIT_INVALID,
        Error::QuadratureDidNotConverge { .. } | Error::BracketExpansionFailed { .. } => {
            EXIT_NUMERICAL
        }
        Error::InfeasibleTarget { .. } => EXIT_INFEASIBLE,
    }
}

fn oracle_bound(cfg: &RunConfig) -> Result<BoundResult, Error> {
    let q = integrate_infinite(&cfg.budget, &cfg.profile, &cfg.quadrature)?;
    Ok(BoundResult {
        value_nats: q.value_nats,
        formula: FormulaTag::Quadrature,
        series_terms_used: 0,
        truncation_error_nats: q.error_estimate,
    })
}

fn cmd_bound<W: Write, E: Write>(
    args: BoundArgs,
    out: &mut W,
    err: &mut E,
) -> Result<i32, CmdError> {
    let cfg = RunConfig::resolve(&args.model, None)?;
    crate::link_model::check_geometry(&cfg.budget, &cfg.profile)?;
    let thm1_geometry = cfg.profile.z0_m == 0.0 && cfg.profile.x0_m == cfg.budget.ref_distance_m;
    let result = if args.oracle {
        oracle_bound(&cfg)?
    } else if thm1_geometry {
        // S <= 1 is a hard error here; --oracle is the escape hatch
        d_inf_1(&cfg.budget, cfg.profile.speed_mps, &cfg.series)?
    } else if cfg.budget.path_loss_exp == 2.0 && cfg.profile.x0_m >= cfg.budget.ref_distance_m {
        d_inf_2(&cfg.budget, &cfg.profile)?
    } else {
        let _ = writeln!(
            err,
            "note: no closed form covers alpha = {} with this geometry; using the quadrature oracle",
            cfg.budget.path_loss_exp
        );
        oracle_bound(&cfg)?
    };

    let mut table = Table::new(vec![
        format!("value_{}", cfg.unit.label()),
        "formula".into(),
        "series_terms".into(),
        "trunc_err".into(),
    ]);
    table.push(vec![
        Cell::Num(result.value_in(cfg.unit)),
        Cell::Str(result.formula.label().into()),
        Cell::Int(result.series_terms_used as u64),
        Cell::Num(result.truncation_error_nats * cfg.unit.per_nat()),
    ]);
    emit(out, &table, cfg.format)?;
    Ok(EXIT_OK)
}

fn cmd_finite<W: Write>(args: FiniteArgs, out: &mut W) -> Result<i32, CmdError> {
    let cfg = RunConfig::resolve(&args.model, args.horizon)?;
    let horizon = cfg
        .horizon
        .ok_or_else(|| Error::invalid("T", "the finite command needs --T <seconds>"))?;
    let points = finite_time_curve(&cfg.budget, &cfg.profile, &[horizon], &cfg.quadrature)?;
    let point = points[0];
    let formula = if cfg.budget.path_loss_exp == 2.0 {
        FormulaTag::ClosedFiniteAlpha2
    } else {
        FormulaTag::Quadrature
    };
    let mut table = Table::new(vec![
        "T_s".into(),
        format!("value_{}", cfg.unit.label()),
        "ratio".into(),
        "formula".into(),
    ]);
    table.push(vec![
        Cell::Num(point.horizon_s),
        Cell::Num(point.value_nats * cfg.unit.per_nat()),
        Cell::Num(point.ratio),
        Cell::Str(formula.label().into()),
    ]);
    emit(out, &table, cfg.format)?;
    Ok(EXIT_OK)
}

fn parse_axis(text: &str) -> Result<Axis, Error> {
    let (name, rest) = text.split_once('=').ok_or_else(|| {
        Error::invalid(
            "axis",
            format!("`{text}` is not of the form name=min:max:count[:log|lin]"),
        )
    })?;
    let param = AxisParam::parse(name)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(Error::invalid(
            "axis",
            format!("`{text}` needs min:max:count with an optional :log|:lin"),
        ));
    }
    let parse_num = |s: &str, what: &'static str| -> Result<f64, Error> {
        s.parse::<f64>()
            .map_err(|_| Error::invalid("axis", format!("cannot parse {what} `{s}`")))
    };
    let min = parse_num(parts[0], "min")?;
    let max = parse_num(parts[1], "max")?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::invalid("axis", format!("cannot parse count `{}`", parts[2])))?;
    let spacing = match parts.get(3).copied() {
        None | Some("log") => Spacing::Log,
        Some("lin") => Spacing::Linear,
        Some(other) => {
            return Err(Error::invalid(
                "axis",
                format!("unknown spacing `{other}` (log|lin)"),
            ))
        }
    };
    Ok(Axis {
        param,
        min,
        max,
        count,
        spacing,
    })
}

fn parse_formula(name: &str) -> Result<SweepFormula, Error> {
    match name {
        "thm1" => Ok(SweepFormula::Thm1),
        "cor1-lower" | "cor1_lower" | "lower" => Ok(SweepFormula::Cor1Lower),
        "thm2" => Ok(SweepFormula::Thm2),
        "cor2" => Ok(SweepFormula::Cor2),
        "finite" => Ok(SweepFormula::FiniteAlpha2),
        "quadrature" | "oracle" => Ok(SweepFormula::Quadrature),
        other => Err(Error::invalid(
            "formula",
            format!("unknown formula `{other}` (thm1|cor1-lower|thm2|cor2|finite|quadrature)"),
        )),
    }
}

/// Renders a sweep result into the emission schema
/// `<axes...>,value_<unit>,formula,trunc_err`.
pub fn sweep_output_table(result: &SweepTable) -> Table {
    let mut columns = result.labels.clone();
    columns.push(format!("value_{}", result.unit.label()));
    columns.push("formula".into());
    columns.push("trunc_err".into());
    let mut table = Table::new(columns);
    for row in &result.rows {
        let mut cells: Vec<Cell> = row.coords.iter().map(|&c| Cell::Num(c)).collect();
        cells.push(Cell::Num(row.value));
        cells.push(Cell::Str(row.formula.label().into()));
        cells.push(Cell::Num(row.truncation_error));
        table.push(cells);
    }
    table
}

fn cmd_sweep<W: Write>(args: SweepArgs, out: &mut W) -> Result<i32, CmdError> {
    let cfg = RunConfig::resolve(&args.model, args.horizon)?;
    let axes = args
        .axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>, _>>()?;
    let formula = match args.formula.as_deref() {
        Some(f) => parse_formula(f)?,
        None => SweepFormula::Thm1,
    };
    let spec = SweepSpec {
        axes,
        formula,
        unit: cfg.unit,
        base_budget: cfg.budget,
        base_profile: cfg.profile,
        horizon_s: cfg.horizon,
        series: cfg.series,
        quadrature: cfg.quadrature,
    };
    let result = sweep(&spec)?;
    emit(out, &sweep_output_table(&result), cfg.format)?;
    Ok(EXIT_OK)
}

/// Parses `<value><unit>` target syntax; a bare value falls back to
/// `default_unit`.
fn parse_target(text: &str, default_unit: Unit) -> Result<InfoQuantity, Error> {
    let trimmed = text.trim();
    let suffixes: [(&str, Unit); 9] = [
        ("nats", Unit::Nats),
        ("nat", Unit::Nats),
        ("bits", Unit::Bits),
        ("bit", Unit::Bits),
        ("bytes", Unit::Bytes),
        ("byte", Unit::Bytes),
        ("MB", Unit::Megabytes),
        ("mb", Unit::Megabytes),
        ("megabytes", Unit::Megabytes),
    ];
    for (suffix, unit) in suffixes {
        if let Some(prefix) = trimmed.strip_suffix(suffix) {
            let value: f64 = prefix
                .trim()
                .parse()
                .map_err(|_| Error::invalid("target", format!("cannot parse value `{prefix}`")))?;
            return InfoQuantity::from_value(value, unit);
        }
    }
    let value: f64 = trimmed
        .parse()
        .map_err(|_| Error::invalid("target", format!("cannot parse `{trimmed}`")))?;
    InfoQuantity::from_value(value, default_unit)
}

fn cmd_plan<W: Write>(args: PlanArgs, out: &mut W) -> Result<i32, CmdError> {
    let cfg = RunConfig::resolve(&args.model, None)?;
    let target = parse_target(&args.target, cfg.unit)?;
    if cfg.power_given == cfg.speed_given {
        return Err(Error::invalid(
            "plan",
            "give exactly one of --power (solves speed) or --speed (solves power)",
        )
        .into());
    }

    let fixed = if cfg.power_given {
        FixedParameter::PowerW(cfg.budget.tx_power_w)
    } else {
        FixedParameter::SpeedMps(cfg.profile.speed_mps)
    };
    let query = PlanQuery {
        target,
        fixed,
        alpha: cfg.budget.path_loss_exp,
        template: cfg.budget,
        series: cfg.series,
    };

    let (solved, power_w, speed_mps) = match fixed {
        FixedParameter::PowerW(p) => {
            let v = solve_speed(&query)?;
            ("speed", p, v)
        }
        FixedParameter::SpeedMps(v) => {
            let p = solve_power(&query)?;
            ("power", p, v)
        }
    };
    let achieved = d_inf_1(
        &LinkBudget {
            tx_power_w: power_w,
            ..cfg.budget
        },
        speed_mps,
        &cfg.series,
    )?
    .value_nats;

    let mut table = Table::new(vec![
        "solved".into(),
        "power_w".into(),
        "speed_mps".into(),
        "target_nats".into(),
        "achieved_nats".into(),
    ]);
    table.push(vec![
        Cell::Str(solved.into()),
        Cell::Num(power_w),
        Cell::Num(speed_mps),
        Cell::Num(target.nats()),
        Cell::Num(achieved),
    ]);
    emit(out, &table, cfg.format)?;
    Ok(EXIT_OK)
}

fn cmd_validate<W: Write, E: Write>(
    args: ValidateArgs,
    out: &mut W,
    err: &mut E,
) -> Result<i32, CmdError> {
    let format = match args.format.as_deref() {
        Some(f) => f.parse::<OutputFormat>()?,
        None => OutputFormat::Csv,
    };
    let results = validation::run_all();
    let mut table = Table::new(vec![
        "check".into(),
        "status".into(),
        "observed".into(),
        "threshold".into(),
        "detail".into(),
    ]);
    for r in &results {
        table.push(vec![
            Cell::Str(r.name.into()),
            Cell::Str(if r.passed { "pass" } else { "fail" }.into()),
            Cell::Num(r.observed),
            Cell::Num(r.threshold),
            Cell::Str(r.detail.replace(',', ";")),
        ]);
    }
    emit(out, &table, format)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        let _ = writeln!(err, "{failed} of {} checks failed", results.len());
        Ok(EXIT_NUMERICAL)
    } else {
        let _ = writeln!(err, "all {} checks passed", results.len());
        Ok(EXIT_OK)
    }
}
