use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::boxplot::{BoxplotSummary, QUARTILE_METHOD, WHISKER_RULE};
use super::config::ExperimentConfig;
use super::svg::render_boxplots;
use super::{ExperimentOutcome, ParamKey, TrialFailure};
use crate::error::{Error, Result};
use crate::generators::GeneratorKind;

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.json";

pub const TRIALS_HEADER: [&str; 9] = [
    "generator",
    "trial",
    "parameter_label",
    "i",
    "t",
    "value",
    "bound_pass",
    "resamples",
    "wall_time_s",
];

/// Index of the timing column, which varies between runs.
pub const TIMING_COLUMN: usize = 8;

/// `git describe`-style stamp; `TT_INHERIT_VERSION` at build time overrides it.
pub fn version_stamp() -> String {
    option_env!("TT_INHERIT_VERSION")
        .map(str::to_string)
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: version_stamp(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ExperimentConfig,
    pub environment: Environment,
    pub rank_tol: f64,
    pub quartile_method: String,
    pub whisker_rule: String,
    pub trials_completed: usize,
    pub bound_violation_count: usize,
    pub failures: Vec<TrialFailure>,
    pub summaries: BTreeMap<GeneratorKind, Vec<BoxplotSummary>>,
}

/// Summaries recomputed from a `trials.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub source: String,
    pub quartile_method: String,
    pub whisker_rule: String,
    pub rows: usize,
    pub failed_bound_rows: usize,
    pub summaries: BTreeMap<GeneratorKind, Vec<BoxplotSummary>>,
}

/// One parsed row of `trials.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub generator: GeneratorKind,
    pub trial: usize,
    pub key: ParamKey,
    pub value: f64,
    pub bound_pass: bool,
    pub resamples: usize,
    pub wall_time_s: f64,
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trials_csv<W: std::io::Write>(w: W, outcome: &ExperimentOutcome) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRIALS_HEADER)?;
    for r in &outcome.results {
        let wall = fmt_real(r.wall_time_s);
        for v in &r.values {
            out.write_record([
                r.generator.name().to_string(),
                r.trial.to_string(),
                v.key.label(),
                v.key.i.to_string(),
                v.key.t.map(|t| t.to_string()).unwrap_or_default(),
                fmt_real(v.value),
                v.bound_pass.to_string(),
                v.resamples.to_string(),
                wall.clone(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != TRIALS_HEADER {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Format(format!("row {}: bad {what}", n + 2));
        let key = ParamKey::parse(&rec[2])?;
        let i: usize = rec[3].parse().map_err(|_| bad("i"))?;
        let t: Option<usize> = if rec[4].is_empty() {
            None
        } else {
            Some(rec[4].parse().map_err(|_| bad("t"))?)
        };
        if key.i != i || key.t != t {
            return Err(bad("i/t for label"));
        }
        rows.push(TrialRow {
            generator: rec[0].parse()?,
            trial: rec[1].parse().map_err(|_| bad("trial"))?,
            key,
            value: rec[5].parse().map_err(|_| bad("value"))?,
            bound_pass: rec[6].parse().map_err(|_| bad("bound_pass"))?,
            resamples: rec[7].parse().map_err(|_| bad("resamples"))?,
            wall_time_s: rec[8].parse().map_err(|_| bad("wall_time_s"))?,
        });
    }
    Ok(rows)
}

/// Summaries per generator from parsed rows, in grid order.
pub fn summarize_rows(rows: &[TrialRow]) -> Result<BTreeMap<GeneratorKind, Vec<BoxplotSummary>>> {
    let mut by_kind: BTreeMap<GeneratorKind, BTreeMap<(ParamKey, String), Vec<f64>>> = BTreeMap::new();
    for r in rows {
        by_kind
            .entry(r.generator)
            .or_default()
            .entry((r.key.clone(), r.key.label()))
            .or_default()
            .push(r.value);
    }
    let mut out = BTreeMap::new();
    for (kind, params) in by_kind {
        let mut keys: Vec<_> = params.keys().cloned().collect();
        keys.sort_by(|a, b| grid_rank(&a.0).cmp(&grid_rank(&b.0)));
        let mut sums = Vec::new();
        for k in keys {
            sums.push(super::summarize_boxplot(&k.1, &params[&k])?);
        }
        out.insert(kind, sums);
    }
    Ok(out)
}

fn grid_rank(k: &ParamKey) -> (u8, usize, usize) {
    let fam = match k.family {
        super::ParamFamily::RowAlpha => 0,
        super::ParamFamily::ColAlpha => 1,
        super::ParamFamily::Beta => 2,
    };
    (fam, k.i, k.t.unwrap_or(0))
}

pub fn svg_file_name(kind: GeneratorKind) -> String {
    format!("boxplot_{}.svg", kind.name())
}

fn write_svgs(dir: &Path, summaries: &BTreeMap<GeneratorKind, Vec<BoxplotSummary>>) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (kind, sums) in summaries {
        let path = dir.join(svg_file_name(*kind));
        fs::write(&path, render_boxplots(&format!("{kind} cores"), sums))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Write `trials.csv`, `summary.json` and, if enabled, one SVG per generator.
pub fn write_outputs(outcome: &ExperimentOutcome, config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let trials = dir.join(TRIALS_FILE);
    write_trials_csv(fs::File::create(&trials)?, outcome)?;
    written.push(trials);
    let summary = SummaryFile {
        config: config.clone(),
        environment: Environment::current(),
        rank_tol: config.rank_tol,
        quartile_method: QUARTILE_METHOD.to_string(),
        whisker_rule: WHISKER_RULE.to_string(),
        trials_completed: outcome.results.len(),
        bound_violation_count: outcome.violations(),
        failures: outcome.failures.clone(),
        summaries: outcome.summaries.clone(),
    };
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
    written.push(path);
    if config.emit_svg {
        written.extend(write_svgs(dir, &outcome.summaries)?);
    }
    Ok(written)
}

pub fn read_summary(path: &Path) -> Result<SummaryFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Recompute summaries and SVGs from `dir/trials.csv`.
pub fn write_report(dir: &Path, emit_svg: bool) -> Result<ReportFile> {
    let source = dir.join(TRIALS_FILE);
    let rows = read_trials_csv(&source)?;
    if rows.is_empty() {
        return Err(Error::Format(format!("{} has no data rows", source.display())));
    }
    let summaries = summarize_rows(&rows)?;
    let report = ReportFile {
        source: TRIALS_FILE.to_string(),
        quartile_method: QUARTILE_METHOD.to_string(),
        whisker_rule: WHISKER_RULE.to_string(),
        rows: rows.len(),
        failed_bound_rows: rows.iter().filter(|r| !r.bound_pass).count(),
        summaries,
    };
    fs::write(dir.join(REPORT_FILE), serde_json::to_string_pretty(&report)?)?;
    if emit_svg {
        write_svgs(dir, &report.summaries)?;
    }
    Ok(report)
}

/// `trials.csv` text with the timing column removed, for run-to-run comparison.
pub fn strip_timing(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|line| {
            let mut cols: Vec<&str> = line.split(',').collect();
            if cols.len() > TIMING_COLUMN {
                cols.remove(TIMING_COLUMN);
            }
            cols.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}
