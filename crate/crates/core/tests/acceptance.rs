//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tt_inherit::experiment::boxplot::summarize_boxplot;
use tt_inherit::experiment::output::{strip_timing, write_outputs, TRIALS_FILE};
use tt_inherit::experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, ParamFamily, Scale, THREADS_ENV};
use tt_inherit::generators::{generate, GeneratorKind, GeneratorSpec};
use tt_inherit::linalg::{DenseMatrix, DEFAULT_RANK_TOL};
use tt_inherit::multiindex::{kron_extend, kron_extend_all, sample_without_replacement, IndexSet, Shape};
use tt_inherit::oracle::{cur_reconstruct_check, dense_unfolding, DenseTensor};
use tt_inherit::properties::{check_rank_preservation, Subtensor, TtAnalysis, EXACT_SLACK};
use tt_inherit::tt::{TtTensor, DEFAULT_DENSE_CAP};

const RANKS: [usize; 3] = [2, 3, 2];

// Criterion 1
const ORACLE_TENSORS_PER_KIND: usize = 50;
const ORACLE_MODE: usize = 6;
const ORACLE_REL_TOL: f64 = 1e-8;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(120);
// Criterion 2
const RANK_DRAWS: usize = 200;
const RANK_MODE: usize = 10;
// Criterion 3
const CUR_INSTANCES: usize = 50;
const CUR_MODE: usize = 20;
const CUR_RESIDUAL_TOL: f64 = 1e-8;
// Criterion 4/5/6
const TRIALS: usize = 20;
const FULL_CONTROL_TRIALS: usize = 2;
const UNIT_TOL: f64 = 1e-10;
const LARGE_TIME_LIMIT: Duration = Duration::from_secs(600);
const PEAK_RSS_LIMIT_KB: u64 = 2 * 1024 * 1024;
// Criterion 8
const BOXPLOT_RANDOM_INPUTS: usize = 1000;

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn shape(n: usize) -> Shape {
    Shape::new(vec![n; 4]).unwrap()
}

fn tensor(kind: GeneratorKind, n: usize, seed: u64) -> TtTensor {
    generate(&GeneratorSpec::new(kind, shape(n), RANKS.to_vec(), seed), DEFAULT_RANK_TOL)
        .unwrap()
        .tensor
}

/// Reference SVD from faer, sorted descending and truncated to numerical rank.
struct RefSvd {
    u: Mat<f64>,
    sigma: Vec<f64>,
    v: Mat<f64>,
}

fn to_faer(m: &DenseMatrix) -> Mat<f64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn ref_svd(m: &DenseMatrix) -> RefSvd {
    let svd = to_faer(m).thin_svd().expect("faer SVD converges");
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let r = order.iter().filter(|&&k| s[k] > DEFAULT_RANK_TOL * s[order[0]]).count();
    let keep = &order[..r];
    let (u, v) = (svd.U(), svd.V());
    RefSvd {
        u: Mat::from_fn(u.nrows(), r, |a, b| u[(a, keep[b])]),
        sigma: keep.iter().map(|&k| s[k]).collect(),
        v: Mat::from_fn(v.nrows(), r, |a, b| v[(a, keep[b])]),
    }
}

fn max_row_norm_sq(m: &Mat<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * m[(i, j)]).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `√fraction / σ_min(M(rows, :))` from faer.
fn ref_alpha(basis: &Mat<f64>, rows: &IndexSet, fraction: f64) -> f64 {
    let idx: Vec<usize> = rows.zero_based().collect();
    let sub = Mat::from_fn(idx.len(), basis.ncols(), |a, b| basis[(idx[a], b)]);
    let smin = sub
        .singular_values()
        .expect("faer SVD converges")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    fraction.sqrt() / smin
}

fn draw_nested(analysis: &TtAnalysis<'_>, sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<IndexSet> {
    let dims = analysis.tensor().shape().dims().to_vec();
    let ranks = analysis.ranks();
    let mut prev = IndexSet::full(1);
    let mut out = Vec::new();
    for (k, &m) in sizes.iter().enumerate() {
        let pool = kron_extend(&prev, dims[k]);
        let set = loop {
            let s = sample_without_replacement(&pool, m, rng).unwrap();
            if analysis.sampled_row_rank(&s, k + 1).unwrap() == ranks[k] {
                break s;
            }
        };
        prev = set.clone();
        out.push(set);
    }
    out
}

fn draw_cols(
    analysis: &TtAnalysis<'_>,
    rows: &[IndexSet],
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<IndexSet> {
    let t = analysis.tensor();
    let ranks = analysis.ranks();
    sizes
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let i = k + 1;
            let prev = if i == 1 { None } else { Some(&rows[i - 2]) };
            let c_rows = analysis.column_subtensor_rows(prev, i).unwrap();
            loop {
                let s = sample_without_replacement(&IndexSet::full(t.col_span(i)), m, rng).unwrap();
                if matches!(analysis.submatrix_svd(i, &c_rows, &s), Ok(svd) if svd.rank() == ranks[k]) {
                    break s;
                }
            }
        })
        .collect()
}

#[derive(Default)]
struct Tally {
    compared: usize,
    worst: f64,
}

impl Tally {
    /// `|ours - theirs| <= tol · scale`.
    fn record(&mut self, what: &str, ours: f64, theirs: f64, scale: f64) -> std::result::Result<(), String> {
        let e = (ours - theirs).abs() / scale.max(f64::MIN_POSITIVE);
        self.worst = self.worst.max(e);
        self.compared += 1;
        ensure(e <= ORACLE_REL_TOL, || format!("{what}: {ours} vs oracle {theirs} (rel {e:.2e})"))
    }

    fn check(&mut self, what: &str, ours: f64, theirs: f64) -> std::result::Result<(), String> {
        self.record(what, ours, theirs, theirs.abs())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::preset(Scale::Desk);
    cfg.shape = vec![ORACLE_MODE; 4];
    let (row_sizes, col_sizes) = (cfg.row_sample_sizes(), cfg.col_sample_sizes());
    let mut tally = Tally::default();
    for kind in GeneratorKind::ALL {
        for n in 0..ORACLE_TENSORS_PER_KIND {
            let t = tensor(kind, ORACLE_MODE, 1000 + n as u64);
            let analysis = TtAnalysis::new(&t, DEFAULT_RANK_TOL).unwrap();
            let dense: DenseTensor = t.to_dense(DEFAULT_DENSE_CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7_000 + n as u64 + 100 * kind.tag());
            let rows = draw_nested(&analysis, &row_sizes, &mut rng);
            let cols = draw_cols(&analysis, &rows, &col_sizes, &mut rng);
            let mut refs = Vec::new();
            for i in 1..4 {
                let unf = dense_unfolding(&dense, i).unwrap();
                let rs = ref_svd(&unf);
                let tag = format!("{kind} #{n} unfolding {i}");
                ensure(rs.sigma.len() == RANKS[i - 1], || format!("{tag}: oracle rank {}", rs.sigma.len()))?;
                let svd = analysis.svd(i);
                for (a, b) in svd.sigma.iter().zip(&rs.sigma) {
                    tally.check(&format!("{tag} sigma"), *a, *b)?;
                }
                let r = rs.sigma.len() as f64;
                let report = analysis.report(i);
                tally.check(&format!("{tag} mu1"), report.mu.mu1, unf.rows() as f64 / r * max_row_norm_sq(&rs.u))?;
                tally.check(&format!("{tag} mu2"), report.mu.mu2, unf.cols() as f64 / r * max_row_norm_sq(&rs.v))?;
                tally.check(&format!("{tag} kappa"), report.kappa, rs.sigma[0] / rs.sigma[rs.sigma.len() - 1])?;
                refs.push((unf, rs));
            }
            let dims = t.shape().dims().to_vec();
            for i in 1..4 {
                for tt in 1..=4 - i {
                    let k = tt + i - 1;
                    let ext = kron_extend_all(&rows[i - 1], &dims[i..i + tt - 1]);
                    let theirs = ref_alpha(&refs[k - 1].1.u, &ext, rows[i - 1].fraction());
                    tally.check(&format!("{kind} #{n} alpha_{i}_{tt}"), analysis.alpha_it(&rows[i - 1], i, tt).unwrap(), theirs)?;
                }
                if i >= 2 {
                    let ext = kron_extend(&rows[i - 2], dims[i - 1]);
                    let theirs = ref_alpha(&refs[i - 1].1.u, &ext, rows[i - 2].fraction());
                    tally.check(&format!("{kind} #{n} alpha_{i}"), analysis.alpha_i(&rows[i - 2], i).unwrap(), theirs)?;
                }
                let theirs = ref_alpha(&refs[i - 1].1.v, &cols[i - 1], cols[i - 1].fraction());
                tally.check(&format!("{kind} #{n} beta_{i}"), analysis.beta_i(&cols[i - 1], i).unwrap(), theirs)?;

                let prev = if i == 1 { None } else { Some(&rows[i - 2]) };
                let c_rows = analysis.column_subtensor_rows(prev, i).unwrap();
                let c = t.column_submatrix(i, &c_rows, &cols[i - 1]).unwrap();
                let unf = &refs[i - 1].0;
                let scale = c.max_abs();
                for (a, p) in c_rows.zero_based().enumerate() {
                    for (b, q) in cols[i - 1].zero_based().enumerate() {
                        tally.record(&format!("{kind} #{n} C_{i}({a},{b})"), c.get(a, b), unf.get(p, q), scale)?;
                    }
                }
            }
        }
    }
    let (compared, worst) = (tally.compared, tally.worst);
    let elapsed = start.elapsed();
    ensure(elapsed <= ORACLE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} tensors, {compared} quantities, worst rel err {worst:.2e} <= {ORACLE_REL_TOL:e}, {:.1}s",
        3 * ORACLE_TENSORS_PER_KIND,
        elapsed.as_secs_f64()
    ))
}

/// Numerical TT-rank of a dense tensor from nalgebra SVDs of its unfoldings.
fn dense_tt_rank(x: &DenseTensor) -> Vec<usize> {
    (1..x.shape().order())
        .map(|i| ref_svd(&dense_unfolding(x, i).unwrap()).sigma.len())
        .collect()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut preserved = 0;
    let mut dense_preserved = 0;
    let mut redraws = 0;
    for draw in 0..RANK_DRAWS {
        let kind = GeneratorKind::ALL[draw % 3];
        let t = tensor(kind, RANK_MODE, 20_000 + draw as u64);
        let report = loop {
            let m = rng.random_range(RANKS[0]..=RANK_MODE);
            let rows = sample_without_replacement(&IndexSet::full(RANK_MODE), m, &mut rng).unwrap();
            let rep = check_rank_preservation(&t, &rows, DEFAULT_RANK_TOL).unwrap();
            if rep.hypothesis_holds {
                let sub = t.row_restrict(1, &rows).unwrap().to_dense(DEFAULT_DENSE_CAP).unwrap();
                if dense_tt_rank(&sub) == RANKS {
                    dense_preserved += 1;
                }
                break rep;
            }
            redraws += 1;
        };
        if report.preserved && report.restricted.as_deref() == Some(&RANKS[..]) {
            preserved += 1;
        }
    }
    ensure(preserved == RANK_DRAWS && dense_preserved == RANK_DRAWS, || {
        format!("preserved {preserved}/{RANK_DRAWS} (dense oracle {dense_preserved}/{RANK_DRAWS})")
    })?;
    Ok(format!(
        "{preserved}/{RANK_DRAWS} subtensors keep TT-rank {RANKS:?} (dense oracle agrees), {redraws} draws failed the hypothesis and were redrawn"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for inst in 0..CUR_INSTANCES {
        let kind = GeneratorKind::ALL[inst % 3];
        let t = tensor(kind, CUR_MODE, 30_000 + inst as u64);
        let report = loop {
            let m = rng.random_range(RANKS[0]..=CUR_MODE);
            let rows = sample_without_replacement(&IndexSet::full(CUR_MODE), m, &mut rng).unwrap();
            let rep = cur_reconstruct_check(&t, &rows, DEFAULT_RANK_TOL).unwrap();
            if rep.hypothesis_holds {
                break rep;
            }
        };
        let res = report.residual.unwrap();
        worst = worst.max(res);
        ensure(res <= CUR_RESIDUAL_TOL, || format!("{kind} instance {inst}: residual {res:.2e}"))?;
    }
    Ok(format!("{CUR_INSTANCES} instances at {CUR_MODE}^4, worst residual {worst:.2e} <= {CUR_RESIDUAL_TOL:e}"))
}

struct Runs {
    desk: ExperimentOutcome,
    large: ExperimentOutcome,
    large_time: Duration,
    control: ExperimentOutcome,
}

fn run_all() -> Runs {
    let mut desk_cfg = ExperimentConfig::preset(Scale::Desk);
    desk_cfg.trials = TRIALS;
    let desk = run_experiment(&desk_cfg).unwrap();
    let mut large_cfg = ExperimentConfig::preset(Scale::Paper);
    large_cfg.trials = TRIALS;
    let start = Instant::now();
    let large = run_experiment(&large_cfg).unwrap();
    let large_time = start.elapsed();
    let mut control_cfg = ExperimentConfig::preset(Scale::Paper).full_sampling();
    control_cfg.trials = FULL_CONTROL_TRIALS;
    let control = run_experiment(&control_cfg).unwrap();
    Runs { desk, large, large_time, control }
}

fn criterion_4(runs: &Runs) -> Outcome {
    let mut checks = 0;
    for (name, out) in [("20^4", &runs.desk), ("100^4", &runs.large)] {
        ensure(out.failures.is_empty(), || format!("{name}: {} trials excluded", out.failures.len()))?;
        ensure(out.results.len() == 3 * TRIALS, || format!("{name}: {} trials", out.results.len()))?;
        for r in &out.results {
            for rec in &r.records {
                ensure(rec.hypothesis_holds, || format!("{name} {} trial {}: hypothesis fails", r.generator, r.trial))?;
                for c in &rec.checks {
                    checks += 1;
                    ensure(c.satisfied, || {
                        format!(
                            "{name} {} trial {} {:?} {}: {:e} > {:e}",
                            r.generator, r.trial, rec.subtensor, c.name, c.lhs, c.rhs
                        )
                    })?;
                }
            }
        }
    }
    Ok(format!("0 violations in {checks} inequality checks over 2 scales x 3 generators x {TRIALS} trials"))
}

fn criterion_5(runs: &Runs) -> Outcome {
    let mut n = 0;
    for out in [&runs.desk, &runs.large, &runs.control] {
        for r in &out.results {
            for rec in &r.records {
                let exact: Vec<_> = match rec.subtensor {
                    Subtensor::Row { .. } => rec.checks.iter().filter(|c| c.name == "mu2").collect(),
                    Subtensor::Column { i: 1 } => rec.checks.iter().filter(|c| c.name == "mu1").collect(),
                    Subtensor::Column { .. } => Vec::new(),
                };
                for c in exact {
                    n += 1;
                    ensure(c.slack == EXACT_SLACK && c.lhs <= c.rhs * (1.0 + EXACT_SLACK), || {
                        format!("{} trial {} {:?} {}: {:e} > {:e}", r.generator, r.trial, rec.subtensor, c.name, c.lhs, c.rhs)
                    })?;
                }
            }
        }
    }
    let per_trial = 6 + 1;
    let trials = runs.desk.results.len() + runs.large.results.len() + runs.control.results.len();
    ensure(n == per_trial * trials, || format!("expected {} exact checks, saw {n}", per_trial * trials))?;
    Ok(format!("{n} exact sub-inequalities hold within slack {EXACT_SLACK:e}"))
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn criterion_6(runs: &Runs) -> Outcome {
    let mut values = 0;
    for r in &runs.large.results {
        ensure(r.values.len() == 11, || format!("{} trial {}: {} parameters", r.generator, r.trial, r.values.len()))?;
        for v in &r.values {
            values += 1;
            let fraction = match v.key.family {
                ParamFamily::RowAlpha => r.row_fractions[v.key.i - 1],
                ParamFamily::ColAlpha => r.row_fractions[v.key.i - 2],
                ParamFamily::Beta => r.col_fractions[v.key.i - 1],
            };
            ensure(v.value.is_finite() && v.value >= fraction.sqrt(), || {
                format!("{} trial {} {} = {} < sqrt({fraction})", r.generator, r.trial, v.key.label(), v.value)
            })?;
        }
    }
    let mut worst = 0.0f64;
    for r in &runs.control.results {
        for v in &r.values {
            worst = worst.max((v.value - 1.0).abs());
        }
    }
    ensure(runs.control.failures.is_empty() && runs.control.results.len() == 3 * FULL_CONTROL_TRIALS, || {
        "full-sampling control incomplete".to_string()
    })?;
    ensure(worst <= UNIT_TOL, || format!("full sampling: max |value - 1| = {worst:e}"))?;
    ensure(runs.large_time <= LARGE_TIME_LIMIT, || format!("100^4 run took {:?}", runs.large_time))?;
    let rss = peak_rss_kb();
    if let Some(kb) = rss {
        ensure(kb <= PEAK_RSS_LIMIT_KB, || format!("peak RSS {kb} kB"))?;
    }
    Ok(format!(
        "{values} finite values >= sqrt(fraction); control max |value - 1| = {worst:.1e}; 100^4 run {:.1}s; peak RSS {}",
        runs.large_time.as_secs_f64(),
        rss.map_or("n/a".into(), |kb| format!("{} MB", kb / 1024))
    ))
}

fn criterion_7() -> Outcome {
    let mut cfg = ExperimentConfig::preset(Scale::Desk);
    cfg.trials = 5;
    cfg.emit_svg = false;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut texts = Vec::new();
    for (run, threads) in [(0, "1"), (1, "3")] {
        std::env::set_var(THREADS_ENV, threads);
        let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let sub = dir.path().join(format!("run{run}"));
        write_outputs(&out, &cfg, &sub).map_err(|e| e.to_string())?;
        texts.push(std::fs::read_to_string(sub.join(TRIALS_FILE)).map_err(|e| e.to_string())?);
    }
    std::env::remove_var(THREADS_ENV);
    let (a, b) = (strip_timing(&texts[0]), strip_timing(&texts[1]));
    ensure(a == b, || "trials.csv differs between runs".to_string())?;
    Ok(format!(
        "two runs (1 and 3 worker threads) give byte-identical trials.csv minus timing, {} bytes",
        a.len()
    ))
}

/// Type-7 quantile computed from 1-based positions, independent of the library.
fn type7(sorted: &[f64], p: f64) -> f64 {
    let pos = 1.0 + (sorted.len() as f64 - 1.0) * p;
    let k = pos.floor();
    let frac = pos - k;
    let lo = sorted[k as usize - 1];
    if frac == 0.0 {
        lo
    } else {
        lo + frac * (sorted[k as usize] - lo)
    }
}

fn criterion_8() -> Outcome {
    let a = summarize_boxplot("a", &[1.0, 2.0, 3.0, 4.0, 5.0]).map_err(|e| e.to_string())?;
    ensure(
        (a.median, a.q1, a.q3, a.whisker_low, a.whisker_high, a.mean) == (3.0, 2.0, 4.0, 1.0, 5.0, 3.0)
            && a.outliers.is_empty(),
        || format!("(1,2,3,4,5) -> {a:?}"),
    )?;
    let b = summarize_boxplot("b", &[1.0, 2.0, 3.0, 4.0, 100.0]).map_err(|e| e.to_string())?;
    ensure(
        (b.q1, b.q3, b.whisker_high, b.mean) == (2.0, 4.0, 4.0, 22.0) && b.outliers == [100.0],
        || format!("(1,2,3,4,100) -> {b:?}"),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..BOXPLOT_RANDOM_INPUTS {
        let n = rng.random_range(1..=200);
        let style = case % 4;
        let values: Vec<f64> = (0..n)
            .map(|_| match style {
                0 => rng.random::<f64>(),
                1 => (rng.random_range(0..5) as f64) * 0.5,
                2 => (rng.random::<f64>() * 8.0).exp(),
                _ => rng.random::<f64>() * 2.0 - 1.0 + if rng.random_bool(0.05) { 50.0 } else { 0.0 },
            })
            .collect();
        let s = summarize_boxplot("r", &values).map_err(|e| e.to_string())?;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let iqr = s.q3 - s.q1;
        let tag = || format!("random input {case} (n = {n})");
        ensure(s.q1 == type7(&sorted, 0.25) && s.median == type7(&sorted, 0.5) && s.q3 == type7(&sorted, 0.75), || {
            format!("{}: quartiles differ from reference", tag())
        })?;
        ensure(s.whisker_low >= s.q1 - 1.5 * iqr && s.whisker_high <= s.q3 + 1.5 * iqr, || {
            format!("{}: whiskers outside fences", tag())
        })?;
        ensure(values.contains(&s.whisker_low) && values.contains(&s.whisker_high), || {
            format!("{}: whiskers not attained", tag())
        })?;
        ensure(s.outliers.iter().all(|&o| o < s.whisker_low || o > s.whisker_high), || {
            format!("{}: outlier inside whiskers", tag())
        })?;
        let beyond = values.iter().filter(|&&v| v < s.q1 - 1.5 * iqr || v > s.q3 + 1.5 * iqr).count();
        ensure(beyond == s.outliers.len(), || format!("{}: {beyond} points beyond fences, {} outliers", tag(), s.outliers.len()))?;
        let mean = values.iter().sum::<f64>() / n as f64;
        ensure(s.mean == mean && s.count == n, || format!("{}: mean or count", tag()))?;
    }
    Ok(format!("hand examples exact; invariants hold on {BOXPLOT_RANDOM_INPUTS} random inputs"))
}

fn report(n: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match res {
        Ok(msg) => {
            println!("criterion {n} PASS [{secs:.1}s] {title}: {msg}");
            true
        }
        Err(msg) => {
            println!("criterion {n} FAIL [{secs:.1}s] {title}: {msg}");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= report(1, "structured quantities match the dense oracle", criterion_1);
    ok &= report(2, "first-mode fiber sampling preserves TT-rank", criterion_2);
    ok &= report(3, "CUR identity reconstructs the tensor", criterion_3);
    let runs = catch_unwind(run_all);
    match &runs {
        Ok(runs) => {
            ok &= report(4, "row and column subtensor bounds", || criterion_4(runs));
            ok &= report(5, "exact sub-inequalities", || criterion_5(runs));
            ok &= report(6, "100^4 run and full-sampling control", || criterion_6(runs));
        }
        Err(_) => {
            for n in 4..=6 {
                println!("criterion {n} FAIL: experiment runs did not complete");
            }
            ok = false;
        }
    }
    ok &= report(7, "deterministic trials.csv", criterion_7);
    ok &= report(8, "boxplot summaries", criterion_8);
    println!("acceptance: {}", if ok { "all criteria pass" } else { "FAILURES" });
    if !ok {
        std::process::exit(1);
    }
}
