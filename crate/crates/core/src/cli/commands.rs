//! Subcommand bodies; each returns the rendered output and stderr warnings.

use crate::operators::OperatorSpec;
use crate::solver::{sample_bundle, SolveConfig};
use crate::thresholds::{admissible_range, ThresholdFamily};
use crate::verify::{run_property_suite, SuiteReport};
use crate::Error;

use super::config::RunConfig;
use super::format::{fmt_num, lines, Table};
use super::input::Source;
use super::{CliError, OutputFormat};

/// Rendered command output.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn solve_config(cfg: &RunConfig) -> SolveConfig<f64> {
    SolveConfig {
        abs_tol_x: cfg.tol,
        scan_points: cfg.scan_points,
        exact_when_possible: true,
    }
}

fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    }
}

struct Row {
    id: String,
    index: String,
    operator: &'static str,
    family: ThresholdFamily<f64>,
    theta: f64,
    m: Option<f64>,
    status: String,
}

/// Solves every (source, index, θ) combination in input order.
fn bundle_rows(
    sources: &[Source],
    cfg: &RunConfig,
    out: &mut Output,
) -> Result<Vec<Row>, CliError> {
    let grid = cfg.theta_grid.values();
    let solve_cfg = solve_config(cfg);
    let mut rows = Vec::new();
    for src in sources {
        let (f, resorted) = src.function()?;
        if resorted {
            out.warnings.push(format!(
                "line {}: counts of {:?} were not non-increasing and have been sorted",
                src.line, src.id
            ));
        }
        for def in &cfg.index {
            let family = def.threshold()?;
            let op = OperatorSpec::for_function(def.operator, &f);
            let row = |theta, m, status: &str| Row {
                id: src.id.clone(),
                index: def.name.clone(),
                operator: def.operator.name(),
                family,
                theta,
                m,
                status: status.to_string(),
            };
            match sample_bundle(&f, &src.id, &op, &family, &grid, &solve_cfg) {
                Ok(sample) => rows.extend(
                    sample
                        .entries
                        .iter()
                        .map(|e| row(e.theta, e.m, e.status.name())),
                ),
                Err(e @ (Error::InvalidParameter(_) | Error::DomainError { .. })) => {
                    out.warnings
                        .push(format!("line {}: index {:?}: {e}", src.line, def.name));
                    rows.extend(grid.iter().map(|&t| row(t, None, "domain_error")));
                }
                Err(e) => return Err(CliError::Input(format!("line {}: {e}", src.line))),
            }
        }
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn cmd_index(
    sources: &[Source],
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<Output, CliError> {
    let mut out = Output::default();
    let rows = bundle_rows(sources, cfg, &mut out)?;
    let mut table = Table::new(
        &["id", "index", "theta", "value", "status"],
        &["theta", "value"],
    );
    for r in rows {
        table.push(vec![r.id, r.index, fmt_num(r.theta), opt(r.m), r.status]);
    }
    out.stdout = render(&table, format);
    Ok(out)
}

/// Header of the bundle table.
pub const BUNDLE_HEADER: [&str; 8] = [
    "id", "index", "operator", "p", "shift", "theta", "m", "status",
];

pub fn cmd_bundle(
    sources: &[Source],
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<Output, CliError> {
    let mut out = Output::default();
    let rows = bundle_rows(sources, cfg, &mut out)?;
    let mut table = Table::new(&BUNDLE_HEADER, &["p", "shift", "theta", "m"]);
    for r in rows {
        table.push(vec![
            r.id,
            r.index,
            r.operator.to_string(),
            opt(r.family.exponent()),
            opt(r.family.shift()),
            fmt_num(r.theta),
            opt(r.m),
            r.status,
        ]);
    }
    out.stdout = render(&table, format);
    Ok(out)
}

pub fn cmd_admissible(
    sources: &[Source],
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<Output, CliError> {
    let mut out = Output::default();
    let mut table = Table::new(
        &[
            "id",
            "index",
            "theta_min",
            "theta_max",
            "min_inclusive",
            "certified",
            "status",
        ],
        &["theta_min", "theta_max"],
    );
    for src in sources {
        let (f, resorted) = src.function()?;
        if resorted {
            out.warnings.push(format!(
                "line {}: counts of {:?} were not non-increasing and have been sorted",
                src.line, src.id
            ));
        }
        for def in &cfg.index {
            let family = def.threshold()?;
            let op = OperatorSpec::for_function(def.operator, &f);
            match admissible_range(&f, &op, &family) {
                Ok(r) => {
                    if !r.certified {
                        out.warnings.push(format!(
                            "{}/{}: admissible range estimated on a grid, not certified",
                            src.id, def.name
                        ));
                    }
                    table.push(vec![
                        src.id.clone(),
                        def.name.clone(),
                        fmt_num(r.lower()),
                        fmt_num(r.theta_max),
                        (r.theta_min.is_some() && r.min_inclusive).to_string(),
                        r.certified.to_string(),
                        "ok".into(),
                    ]);
                }
                Err(e) => {
                    let status = match e {
                        Error::ZeroFunction => "zero_function",
                        _ => "domain_error",
                    };
                    out.warnings
                        .push(format!("line {}: index {:?}: {e}", src.line, def.name));
                    table.push(vec![
                        src.id.clone(),
                        def.name.clone(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        status.into(),
                    ]);
                }
            }
        }
    }
    out.stdout = render(&table, format);
    Ok(out)
}

/// Suite output in the requested format plus the report itself.
pub fn cmd_verify(cfg: &RunConfig, format: OutputFormat) -> (Output, SuiteReport) {
    let report = run_property_suite(&cfg.suite());
    let stdout = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).unwrap_or_default();
            s.push('\n');
            s
        }
        OutputFormat::Csv => text_report(&report),
    };
    let mut out = Output {
        stdout,
        warnings: Vec::new(),
    };
    if report.all_vacuous() {
        out.warnings
            .push("no trial satisfied any hypothesis: every verdict is vacuous".into());
    }
    (out, report)
}

fn text_report(report: &SuiteReport) -> String {
    let mut out = vec![format!(
        "seed {} trials {}",
        report.master_seed, report.trials
    )];
    for r in &report.reports {
        out.push(r.summary_line());
        for c in r.failures.iter().take(3) {
            let mut line = format!(
                "    lhs {} rhs {} slack {}",
                fmt_num(c.lhs),
                fmt_num(c.rhs),
                fmt_num(c.slack)
            );
            if let Some(seed) = c.seed {
                line.push_str(&format!(" seed {seed}"));
            }
            if let Some(theta) = c.theta {
                line.push_str(&format!(" theta {}", fmt_num(theta)));
            }
            line.push_str(&format!(" | {} | {}", c.inputs, c.note));
            out.push(line);
        }
    }
    let overall = report.aggregate();
    out.push(format!("overall: {}", overall.summary_line()));
    lines(out)
}
