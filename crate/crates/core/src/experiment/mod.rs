//! Repeated sampling trials over random TT tensors, with every parameter and
//! bound check recorded per trial and summarized per generator.

pub mod boxplot;
pub mod config;
pub mod output;
pub mod svg;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorKind, GeneratorSpec};
use crate::multiindex::{derive_seed, kron_extend, sample_without_replacement, IndexSet};
use crate::properties::{check_theorem_c_bounds, check_theorem_r_bounds, InheritanceRecord, Subtensor, TtAnalysis};

pub use boxplot::{summarize_boxplot, BoxplotSummary, QUARTILE_METHOD, WHISKER_RULE};
pub use config::{ExperimentConfig, Scale};

pub const THREADS_ENV: &str = "TT_INHERIT_THREADS";

const TENSOR_TAG: u64 = 0;
const ROW_TAG: u64 = 1;
const COL_TAG: u64 = 2;

/// One parameter of the grid: `alpha_{i}_{t}`, `alpha_{i}` or `beta_{i}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamKey {
    pub family: ParamFamily,
    pub i: usize,
    pub t: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParamFamily {
    RowAlpha,
    ColAlpha,
    Beta,
}

impl ParamKey {
    pub fn label(&self) -> String {
        match (self.family, self.t) {
            (ParamFamily::RowAlpha, Some(t)) => format!("alpha_{}_{}", self.i, t),
            (ParamFamily::RowAlpha, None) => format!("alpha_{}_?", self.i),
            (ParamFamily::ColAlpha, _) => format!("alpha_{}", self.i),
            (ParamFamily::Beta, _) => format!("beta_{}", self.i),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad parameter label '{label}'"));
        let parts: Vec<&str> = label.split('_').collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["alpha", i, t] => Ok(ParamKey { family: ParamFamily::RowAlpha, i: num(i)?, t: Some(num(t)?) }),
            ["alpha", i] => Ok(ParamKey { family: ParamFamily::ColAlpha, i: num(i)?, t: None }),
            ["beta", i] => Ok(ParamKey { family: ParamFamily::Beta, i: num(i)?, t: None }),
            _ => Err(bad()),
        }
    }
}

/// The full parameter grid for order `d`, in output order.
pub fn parameter_grid(d: usize) -> Vec<ParamKey> {
    let mut keys = Vec::new();
    for i in 1..d {
        for t in 1..=d - i {
            keys.push(ParamKey { family: ParamFamily::RowAlpha, i, t: Some(t) });
        }
    }
    for i in 2..d {
        keys.push(ParamKey { family: ParamFamily::ColAlpha, i, t: None });
    }
    for i in 1..d {
        keys.push(ParamKey { family: ParamFamily::Beta, i, t: None });
    }
    keys
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamValue {
    pub key: ParamKey,
    pub value: f64,
    pub bound_pass: bool,
    /// Resamples spent on the index set the parameter depends on.
    pub resamples: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialResult {
    pub generator: GeneratorKind,
    pub trial: usize,
    pub seed_used: u64,
    pub regenerations: usize,
    /// `|I_i|` fractions `|I_i| / Π_{j<=i} n_j`.
    pub row_fractions: Vec<f64>,
    /// `|J_i| / Π_{j>i} n_j`.
    pub col_fractions: Vec<f64>,
    pub row_resamples: Vec<usize>,
    pub col_resamples: Vec<usize>,
    pub values: Vec<ParamValue>,
    pub records: Vec<InheritanceRecord>,
    pub wall_time_s: f64,
}

impl TrialResult {
    pub fn violations(&self) -> usize {
        self.records.iter().map(|r| r.violations()).sum()
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.values.iter().find(|v| v.key.label() == label).map(|v| v.value)
    }
}

/// A trial that could not be completed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub generator: GeneratorKind,
    pub trial: usize,
    pub error: String,
}

fn level_seed(config: &ExperimentConfig, kind: GeneratorKind, trial: usize, tag: u64, i: usize, attempt: usize) -> u64 {
    derive_seed(
        config.master_seed,
        &[kind.tag(), trial as u64, tag, i as u64, attempt as u64],
    )
}

/// Draw nested `I_1..I_{d-1}`, resampling a level until `rank(L_i(I_i)) = r_i`.
fn sample_rows(
    analysis: &TtAnalysis<'_>,
    config: &ExperimentConfig,
    kind: GeneratorKind,
    trial: usize,
) -> Result<(Vec<IndexSet>, Vec<usize>)> {
    let dims = analysis.tensor().shape().dims().to_vec();
    let sizes = config.row_sample_sizes();
    let ranks = analysis.ranks();
    let mut prev = IndexSet::full(1);
    let mut sets = Vec::with_capacity(sizes.len());
    let mut resamples = Vec::with_capacity(sizes.len());
    for (k, &m) in sizes.iter().enumerate() {
        let i = k + 1;
        let pool = kron_extend(&prev, dims[k]);
        let mut found = None;
        let mut best = 0;
        for attempt in 0..=config.max_resample {
            let mut rng = ChaCha8Rng::seed_from_u64(level_seed(config, kind, trial, ROW_TAG, i, attempt));
            let set = sample_without_replacement(&pool, m, &mut rng)?;
            let rank = analysis.sampled_row_rank(&set, i)?;
            if rank == ranks[k] {
                found = Some((set, attempt));
                break;
            }
            best = best.max(rank);
        }
        let (set, attempts) = found.ok_or(Error::Search { target: ranks[k], found: best })?;
        prev = set.clone();
        sets.push(set);
        resamples.push(attempts);
    }
    Ok((sets, resamples))
}

/// Draw `J_1..J_{d-1}`, resampling until `rank(C_i) = r_i`.
fn sample_cols(
    analysis: &TtAnalysis<'_>,
    rows: &[IndexSet],
    config: &ExperimentConfig,
    kind: GeneratorKind,
    trial: usize,
) -> Result<(Vec<IndexSet>, Vec<usize>)> {
    let t = analysis.tensor();
    let sizes = config.col_sample_sizes();
    let ranks = analysis.ranks();
    let mut sets = Vec::with_capacity(sizes.len());
    let mut resamples = Vec::with_capacity(sizes.len());
    for (k, &m) in sizes.iter().enumerate() {
        let i = k + 1;
        let pool = IndexSet::full(t.col_span(i));
        let prev = if i == 1 { None } else { Some(&rows[i - 2]) };
        let c_rows = analysis.column_subtensor_rows(prev, i)?;
        let mut found = None;
        let mut best = 0;
        for attempt in 0..=config.max_resample {
            let mut rng = ChaCha8Rng::seed_from_u64(level_seed(config, kind, trial, COL_TAG, i, attempt));
            let set = sample_without_replacement(&pool, m, &mut rng)?;
            let rank = match analysis.submatrix_svd(i, &c_rows, &set) {
                Ok(svd) => svd.rank(),
                Err(Error::RankZero) => 0,
                Err(e) => return Err(e),
            };
            if rank == ranks[k] {
                found = Some((set, attempt));
                break;
            }
            best = best.max(rank);
        }
        let (set, attempts) = found.ok_or(Error::Search { target: ranks[k], found: best })?;
        sets.push(set);
        resamples.push(attempts);
    }
    Ok((sets, resamples))
}

/// Wall clock; browsers without a monotonic std clock report zero.
struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    fn start() -> Self {
        #[cfg(not(target_arch = "wasm32"))]
        return Stopwatch(std::time::Instant::now());
        #[cfg(target_arch = "wasm32")]
        Stopwatch()
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}

/// Generate one tensor, sample all index sets and evaluate every parameter
/// and bound.
pub fn run_trial(config: &ExperimentConfig, kind: GeneratorKind, trial: usize) -> Result<TrialResult> {
    let start = Stopwatch::start();
    let shape = config.shape()?;
    let spec = GeneratorSpec::new(
        kind,
        shape,
        config.ranks.clone(),
        derive_seed(config.master_seed, &[kind.tag(), trial as u64, TENSOR_TAG]),
    );
    let generated = generate(&spec, config.rank_tol)?;
    let tensor = &generated.tensor;
    let analysis = TtAnalysis::new(tensor, config.rank_tol)?;
    let (rows, row_resamples) = sample_rows(&analysis, config, kind, trial)?;
    let (cols, col_resamples) = sample_cols(&analysis, &rows, config, kind, trial)?;

    let mut records = check_theorem_r_bounds(&analysis, &rows)?;
    records.extend(check_theorem_c_bounds(&analysis, &rows, &cols)?);
    if let Some(bad) = records.iter().find(|r| !r.hypothesis_holds) {
        return Err(Error::Precondition(format!(
            "rank hypothesis fails for {:?} after sampling",
            bad.subtensor
        )));
    }

    let mut values = Vec::new();
    for rec in &records {
        let pass = rec.passed();
        match rec.subtensor {
            Subtensor::Row { i, t } => values.push(ParamValue {
                key: ParamKey { family: ParamFamily::RowAlpha, i, t: Some(t) },
                value: rec.alpha.expect("row record carries alpha"),
                bound_pass: pass,
                resamples: row_resamples[i - 1],
            }),
            Subtensor::Column { i } => {
                if i >= 2 {
                    values.push(ParamValue {
                        key: ParamKey { family: ParamFamily::ColAlpha, i, t: None },
                        value: rec.alpha.expect("column record carries alpha"),
                        bound_pass: pass,
                        resamples: row_resamples[i - 2],
                    });
                }
                values.push(ParamValue {
                    key: ParamKey { family: ParamFamily::Beta, i, t: None },
                    value: rec.beta.expect("column record carries beta"),
                    bound_pass: pass,
                    resamples: col_resamples[i - 1],
                });
            }
        }
    }
    let order = parameter_grid(config.d);
    values.sort_by_key(|v| order.iter().position(|k| *k == v.key));

    Ok(TrialResult {
        generator: kind,
        trial,
        seed_used: generated.seed_used,
        regenerations: generated.regenerations,
        row_fractions: rows.iter().map(IndexSet::fraction).collect(),
        col_fractions: cols.iter().map(IndexSet::fraction).collect(),
        row_resamples,
        col_resamples,
        values,
        records,
        wall_time_s: start.seconds(),
    })
}

/// Everything a run produces before it is written out.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub results: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
    pub summaries: BTreeMap<GeneratorKind, Vec<BoxplotSummary>>,
}

impl ExperimentOutcome {
    pub fn violations(&self) -> usize {
        self.results.iter().map(TrialResult::violations).sum()
    }
}

/// Worker count from `TT_INHERIT_THREADS`; 0 or unset means automatic.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// Summaries per generator, one per parameter label, in grid order.
pub fn summarize(results: &[TrialResult], d: usize) -> Result<BTreeMap<GeneratorKind, Vec<BoxplotSummary>>> {
    let mut by_kind: BTreeMap<GeneratorKind, BTreeMap<ParamKey, Vec<f64>>> = BTreeMap::new();
    for r in results {
        let slot = by_kind.entry(r.generator).or_default();
        for v in &r.values {
            slot.entry(v.key.clone()).or_default().push(v.value);
        }
    }
    let grid = parameter_grid(d);
    let mut out = BTreeMap::new();
    for (kind, params) in by_kind {
        let mut sums = Vec::new();
        for key in &grid {
            if let Some(vals) = params.get(key) {
                sums.push(summarize_boxplot(&key.label(), vals)?);
            }
        }
        out.insert(kind, sums);
    }
    Ok(out)
}

/// Run every (generator, trial) pair. Trials run in parallel; results come
/// back ordered by generator, then trial index.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let jobs: Vec<(GeneratorKind, usize)> = config
        .generators
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<(GeneratorKind, usize, Result<TrialResult>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, t)| (k, t, run_trial(config, k, t)))
            .collect()
    });
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (generator, trial, res) in outcomes {
        match res {
            Ok(r) => results.push(r),
            Err(e) => {
                log::warn!("{generator} trial {trial} excluded: {e}");
                failures.push(TrialFailure { generator, trial, error: e.to_string() });
            }
        }
    }
    results.sort_by_key(|r| (r.generator, r.trial));
    let summaries = summarize(&results, config.d)?;
    Ok(ExperimentOutcome { results, failures, summaries })
}
