//! Command layer of `ghostsim`: config loading, the four commands and their
//! artifacts.

pub mod config;
pub mod error;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ghostsim_core::coherence::ORTHOGONALITY_TOL;
use ghostsim_core::gaussian::check_regime;
use ghostsim_core::oracle::LegCheck;
use ghostsim_core::pattern::{primary_maximum, PrimaryMaximum, Transcription};
use ghostsim_core::{
    closed_form_pattern, coincidence_pattern, compare_patterns, duality_report, propagate_pair,
    ClosedForm, DualityReport, PatternComparison, PatternResult, Regime, SlitDecomposition,
};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{Output, Resolved, RunConfig};
pub use error::CliError;

/// Tolerance on the pattern-route duality sum in the strong regime.
pub const PATTERN_DUALITY_TOL: f64 = 1e-6;
/// Largest analytic-vs-oracle relative L2 error accepted by `oracle-compare`.
pub const ORACLE_L2_TOL: f64 = 1e-3;
/// Largest relative norm drift per propagation leg.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pattern,
    Duality,
    Sweep,
    OracleCompare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pattern => "pattern",
            Command::Duality => "duality",
            Command::Sweep => "sweep",
            Command::OracleCompare => "oracle-compare",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: PathBuf,
    pub seed: Option<u64>,
}

/// Files written and invariant violations found by one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Duality analysis of one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub regime: Option<Regime>,
    pub max_partner_overlap: f64,
    pub report: DualityReport,
    pub primary_maximum: Option<PrimaryMaximum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern_error: Option<String>,
    pub violations: Vec<String>,
}

pub fn regime_of(res: &Resolved) -> Option<Regime> {
    [Regime::Strong, Regime::Weak]
        .into_iter()
        .find(|&r| check_regime(&res.source, &res.geometry, r).is_ok())
}

/// Runs both coherence routes.
pub fn evaluate(res: &Resolved) -> Result<(Evaluation, PatternResult), CliError> {
    let dec = SlitDecomposition::new(&res.source, &res.geometry)?;
    let pattern = coincidence_pattern(&res.source, &res.geometry, &res.detector, &res.phases, &res.z2)?;
    let (primary, pattern_error) = match primary_maximum(&pattern) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let c2_pattern = primary.map(|m| m.coherence);
    let overlap = dec.max_partner_overlap();
    let report = match &res.envelopes {
        Some(a) => duality_report(&res.detector, a, &res.phases, c2_pattern)?,
        None => {
            let (env, ph) = dec.envelopes();
            let ph: Vec<f64> = ph.iter().zip(&res.phases).map(|(a, b)| a + b).collect();
            let r = duality_report(&res.detector, &env, &ph, c2_pattern)?;
            if overlap < ORTHOGONALITY_TOL {
                r
            } else {
                r.without_matrix_route()
            }
        }
    };
    let regime = regime_of(res);
    let mut violations = Vec::new();
    if report.violation {
        violations.push(format!("D_Q1 + C_2 = {} exceeds 1", report.sum.unwrap_or(f64::NAN)));
    }
    if regime == Some(Regime::Strong) {
        if let Some(s) = report.pattern_sum {
            if s > 1.0 + PATTERN_DUALITY_TOL {
                violations.push(format!("D_Q1 + C_2(pattern) = {s} exceeds 1"));
            }
        }
    }
    if pattern.intensity.iter().chain(&pattern.incoherent).any(|&v| v < 0.0) {
        violations.push("negative coincidence intensity".into());
    }
    Ok((
        Evaluation {
            regime,
            max_partner_overlap: overlap,
            report,
            primary_maximum: primary,
            pattern_error,
            violations,
        },
        pattern,
    ))
}

/// 12 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

struct Writer<'a> {
    out: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        std::fs::write(&path, contents)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, &text)
    }
}

fn envelope(command: Command, config: &RunConfig, body: serde_json::Value) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "schema": 1,
        "command": command.name(),
        "config_hash": config.hash(),
    });
    if let (Some(map), serde_json::Value::Object(extra)) = (doc.as_object_mut(), body) {
        map.extend(extra);
    }
    doc
}

/// Validates `config`, runs `command` and writes its artifacts under `opts.out`.
pub fn run(command: Command, mut config: RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    if opts.seed.is_some() {
        config.seed = opts.seed;
    }
    let res = config.resolve()?;
    std::fs::create_dir_all(&opts.out).map_err(|source| CliError::Io {
        path: opts.out.display().to_string(),
        source,
    })?;
    let mut w = Writer { out: &opts.out, files: Vec::new() };
    let mut snapshot = config.to_json();
    snapshot.push('\n');
    w.write("config.json", &snapshot)?;
    let violations = match command {
        Command::Pattern => pattern_command(&config, &res, &mut w)?,
        Command::Duality => duality_command(&config, &res, &mut w)?,
        Command::Sweep => sweep_command(&config, &mut w)?,
        Command::OracleCompare => oracle_command(&config, &res, &mut w)?,
    };
    Ok(Outcome { files: w.files, violations })
}

#[derive(Debug, Clone, Serialize)]
struct ClosedFormDeviation {
    /// `max |P_closed - P| / max P` for each reading of the constants.
    rederived: f64,
    printed: f64,
}

fn closed_form_deviation(res: &Resolved, exact: &PatternResult) -> Option<ClosedFormDeviation> {
    let peak = exact.intensity.iter().cloned().fold(0.0, f64::max);
    let dev = |tr| {
        closed_form_pattern(&res.source, &res.geometry, &res.detector, &res.phases, &res.z2, ClosedForm::Full, tr)
            .ok()
            .map(|cf| {
                cf.iter().zip(&exact.intensity).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak
            })
    };
    Some(ClosedFormDeviation { rederived: dev(Transcription::Rederived)?, printed: dev(Transcription::Printed)? })
}

fn pattern_command(config: &RunConfig, res: &Resolved, w: &mut Writer) -> Result<Vec<String>, CliError> {
    let (eval, pattern) = evaluate(res)?;
    let closed = closed_form_deviation(res, &pattern);
    for out in &config.outputs {
        match out {
            Output::Csv => w.write("pattern.csv", &pattern.to_csv())?,
            Output::Svg => w.write("pattern.svg", &pattern.to_svg())?,
            Output::Json => {
                let body = serde_json::json!({
                    "regime": eval.regime,
                    "primary_maximum": eval.primary_maximum,
                    "pattern_error": eval.pattern_error,
                    "closed_form_deviation": closed,
                    "fringe_maxima": pattern.fringe_maxima(),
                    "pattern": pattern,
                });
                w.json("pattern.json", &envelope(Command::Pattern, config, body))?
            }
        }
    }
    Ok(eval.violations)
}

fn duality_command(config: &RunConfig, res: &Resolved, w: &mut Writer) -> Result<Vec<String>, CliError> {
    let (eval, _) = evaluate(res)?;
    let body = serde_json::to_value(&eval).expect("evaluation serializes");
    w.json("duality.json", &envelope(Command::Duality, config, body))?;
    Ok(eval.violations)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    values: Vec<f64>,
    d_q1: f64,
    c2_matrix: Option<f64>,
    c2_pattern: Option<f64>,
    /// Matrix-route sum when available, else the pattern-route sum.
    sum: Option<f64>,
    violations: Vec<String>,
}

fn sweep_points(config: &RunConfig) -> Result<Vec<Vec<f64>>, CliError> {
    let axes: Vec<Vec<f64>> = config
        .sweep
        .iter()
        .map(|a| ghostsim_core::pattern::linspace(a.min, a.max, a.steps))
        .collect();
    Ok(match axes.as_slice() {
        [] => return Err(CliError::Config("sweep: declare one or two parameters".into())),
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
        _ => return Err(CliError::Config("sweep: at most two parameters".into())),
    })
}

fn sweep_command(config: &RunConfig, w: &mut Writer) -> Result<Vec<String>, CliError> {
    let points = sweep_points(config)?;
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|values| {
            let mut cfg = config.clone();
            for (axis, &v) in config.sweep.iter().zip(values) {
                cfg = cfg.with_value(&axis.path, v)?;
            }
            let (eval, _) = evaluate(&cfg.resolve()?)?;
            let r = &eval.report;
            Ok(SweepRow {
                values: values.clone(),
                d_q1: r.d_q1,
                c2_matrix: r.c2_matrix,
                c2_pattern: r.c2_pattern,
                sum: r.sum.or(r.pattern_sum),
                violations: eval.violations,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let names: Vec<&str> = config.sweep.iter().map(|a| a.path.as_str()).collect();
    let mut csv = names.join(",");
    csv.push_str(",d_q1,c2_matrix,c2_pattern,sum\n");
    for r in &rows {
        for v in &r.values {
            let _ = write!(csv, "{},", fmt_float(*v));
        }
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_float(r.d_q1),
            fmt_opt(r.c2_matrix),
            fmt_opt(r.c2_pattern),
            fmt_opt(r.sum)
        );
    }
    for out in &config.outputs {
        match out {
            Output::Csv => w.write("sweep.csv", &csv)?,
            Output::Json => {
                let body = serde_json::json!({ "parameters": names, "rows": rows });
                w.json("sweep.json", &envelope(Command::Sweep, config, body))?
            }
            Output::Svg => w.write("sweep.svg", &sweep_svg(&rows, names[0]))?,
        }
    }
    Ok(rows
        .iter()
        .flat_map(|r| r.violations.iter().map(move |v| format!("at {:?}: {v}", r.values)))
        .collect())
}

/// D_Q1, C_2 and their sum against the first swept parameter.
fn sweep_svg(rows: &[SweepRow], label: &str) -> String {
    let (w, h, m) = (700.0, 400.0, 50.0);
    let xs: Vec<f64> = rows.iter().map(|r| r.values[0]).collect();
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if xmax > xmin { xmax - xmin } else { 1.0 };
    let sx = |x: f64| m + (x - xmin) / span * (w - 2.0 * m);
    let sy = |y: f64| h - m - y.clamp(0.0, 1.2) / 1.2 * (h - 2.0 * m);
    let series = |f: &dyn Fn(&SweepRow) -> Option<f64>| {
        rows.iter()
            .filter_map(|r| f(r).map(|y| format!("{:.2},{:.2}", sx(r.values[0]), sy(y))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}"><rect width="100%" height="100%" fill="white"/>"#
    );
    let _ = write!(svg, r#"<line x1="{m}" y1="{y1}" x2="{x2}" y2="{y1}" stroke="gray" stroke-dasharray="3 3"/>"#, y1 = sy(1.0), x2 = w - m);
    for (colour, name, f) in [
        ("navy", "D_Q1", &(|r: &SweepRow| Some(r.d_q1)) as &dyn Fn(&SweepRow) -> Option<f64>),
        ("crimson", "C_2", &|r: &SweepRow| r.c2_matrix.or(r.c2_pattern)),
        ("black", "sum", &|r: &SweepRow| r.sum),
    ] {
        let _ = write!(svg, r#"<polyline fill="none" stroke="{colour}" points="{}"/>"#, series(f));
        let _ = write!(svg, r#"<text x="{:.2}" y="20" fill="{colour}" font-size="12">{name}</text>"#, w - m - 40.0);
    }
    let _ = write!(svg, r#"<text x="{m}" y="{}" font-size="12">{label}</text></svg>"#, h - 15.0);
    svg.push('\n');
    svg
}

#[derive(Debug, Clone, Serialize)]
struct OracleSummary {
    comparison: PatternComparison,
    legs: Vec<LegCheck>,
    geometric_weights: Vec<f64>,
    max_partner_overlap: f64,
    analytic_coherence: Option<f64>,
    oracle_coherence: Option<f64>,
    /// Coherence of the oracle's conditioned state, meaningful when the
    /// partner modes are orthogonal.
    oracle_state_coherence: f64,
}

fn oracle_command(config: &RunConfig, res: &Resolved, w: &mut Writer) -> Result<Vec<String>, CliError> {
    let analytic = coincidence_pattern(&res.source, &res.geometry, &res.detector, &res.phases, &res.z2)?;
    let run = propagate_pair(&res.source, &res.geometry, &res.detector, &res.phases, &res.z2, &res.oracle)?;
    let comparison = compare_patterns(&analytic, &run.pattern)?;
    let overlap = run
        .partner_overlaps
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, v)| v.norm()))
        .fold(0.0, f64::max);
    let summary = OracleSummary {
        comparison: comparison.clone(),
        legs: run.legs.clone(),
        geometric_weights: run.geometric_weights.clone(),
        max_partner_overlap: overlap,
        analytic_coherence: primary_maximum(&analytic).ok().map(|m| m.coherence),
        oracle_coherence: primary_maximum(&run.pattern).ok().map(|m| m.coherence),
        oracle_state_coherence: run.coherence(),
    };
    let mut violations = Vec::new();
    if comparison.relative_l2 > ORACLE_L2_TOL {
        violations.push(format!(
            "analytic and oracle patterns differ by relative L2 {:e}",
            comparison.relative_l2
        ));
    }
    let drift = run.max_unitarity_residual();
    if drift > UNITARITY_TOL {
        violations.push(format!("propagation changed the norm by {drift:e}"));
    }
    for out in &config.outputs {
        match out {
            Output::Csv => {
                w.write("analytic.csv", &analytic.to_csv())?;
                w.write("oracle.csv", &run.pattern.to_csv())?;
            }
            Output::Svg => w.write("oracle.svg", &run.pattern.to_svg())?,
            Output::Json => {
                let body = serde_json::json!({ "summary": summary, "violations": violations });
                w.json("oracle-compare.json", &envelope(Command::OracleCompare, config, body))?
            }
        }
    }
    Ok(violations)
}
