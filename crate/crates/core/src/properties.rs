//! Incoherence, condition numbers and the inheritance parameters of sampled
//! subtensors, together with numerical checks of every inheritance bound.
//!
//! Incoherence constants are the tightest ones:
//! `mu1 = (m / r) ‖W‖²_{2,∞}` and `mu2 = (n / r) ‖V‖²_{2,∞}`.
//!
//! Row subtensors `R_i = (T_1•⋯•T_i)_<i>(I_i, :) • T_{i+1} • ⋯ • T_d` have
//! `(R_i)_<t>` equal to the row submatrix of `T_<t+i-1>` indexed by
//! `I_i ⊗ [n_{i+1}] ⊗ ⋯ ⊗ [n_{t+i-1}]`; the column submatrices are
//! `C_i = T_<i>(I_{i-1} ⊗ [n_i], J_i)` with `I_0 = {1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, factored_svd, numerical_rank, pinv_spectral_norm, row_two_inf_norm,
    DenseMatrix, ThinSvd,
};
use crate::multiindex::{kron_extend, kron_extend_all, IndexSet};
use crate::tt::TtTensor;

/// Multiplicative slack on bounds that carry an α or β factor.
pub const BOUND_SLACK: f64 = 1e-8;

/// Slack on the bounds that hold with equality in exact arithmetic.
pub const EXACT_SLACK: f64 = 1e-10;

/// `α_1`, which the column-subtensor bound for `i = 1` never needs.
pub const ALPHA_1: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherencePair {
    pub mu1: f64,
    pub mu2: f64,
}

/// Tightest incoherence constants of an `m × n` matrix from its compact SVD.
pub fn incoherence(svd: &ThinSvd, m: usize, n: usize) -> IncoherencePair {
    let r = svd.rank() as f64;
    IncoherencePair {
        mu1: m as f64 / r * row_two_inf_norm(&svd.w).powi(2),
        mu2: n as f64 / r * row_two_inf_norm(&svd.v).powi(2),
    }
}

/// Rank, incoherence and conditioning of one unfolding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingReport {
    pub i: usize,
    pub rank: usize,
    pub mu: IncoherencePair,
    pub kappa: f64,
    pub sigma: Vec<f64>,
}

impl UnfoldingReport {
    pub fn from_svd(i: usize, svd: &ThinSvd, m: usize, n: usize) -> Self {
        UnfoldingReport {
            i,
            rank: svd.rank(),
            mu: incoherence(svd, m, n),
            kappa: condition_number(svd),
            sigma: svd.sigma.clone(),
        }
    }
}

/// Per-unfolding SVDs, interface factors and reports of one tensor, computed once.
pub struct TtAnalysis<'a> {
    tensor: &'a TtTensor,
    rank_tol: f64,
    lefts: Vec<DenseMatrix>,
    rights: Vec<DenseMatrix>,
    svds: Vec<ThinSvd>,
    reports: Vec<UnfoldingReport>,
}

impl<'a> TtAnalysis<'a> {
    pub fn new(tensor: &'a TtTensor, rank_tol: f64) -> Result<Self> {
        let lefts = tensor.left_interfaces()?;
        let rights = tensor.right_interfaces()?;
        let mut svds = Vec::with_capacity(lefts.len());
        let mut reports = Vec::with_capacity(lefts.len());
        for (k, (l, r)) in lefts.iter().zip(&rights).enumerate() {
            let svd = factored_svd(l, r, rank_tol)?;
            reports.push(UnfoldingReport::from_svd(k + 1, &svd, l.rows(), r.rows()));
            svds.push(svd);
        }
        Ok(TtAnalysis {
            tensor,
            rank_tol,
            lefts,
            rights,
            svds,
            reports,
        })
    }

    pub fn tensor(&self) -> &TtTensor {
        self.tensor
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Reports for `i = 1..d-1`.
    pub fn reports(&self) -> &[UnfoldingReport] {
        &self.reports
    }

    /// Report of `T_<i>` (1-based).
    pub fn report(&self, i: usize) -> &UnfoldingReport {
        &self.reports[i - 1]
    }

    pub fn svd(&self, i: usize) -> &ThinSvd {
        &self.svds[i - 1]
    }

    pub fn left(&self, i: usize) -> &DenseMatrix {
        &self.lefts[i - 1]
    }

    pub fn right(&self, i: usize) -> &DenseMatrix {
        &self.rights[i - 1]
    }

    /// Numerical TT-rank.
    pub fn ranks(&self) -> Vec<usize> {
        self.reports.iter().map(|r| r.rank).collect()
    }

    fn d(&self) -> usize {
        self.tensor.order()
    }

    fn check_level(&self, i: usize) -> Result<()> {
        if i == 0 || i >= self.d() {
            return Err(Error::Domain(format!(
                "level {i} out of range [1, {}]",
                self.d() - 1
            )));
        }
        Ok(())
    }

    fn check_domain(set: &IndexSet, expected: usize, what: &str) -> Result<()> {
        if set.domain() != expected {
            return Err(Error::Domain(format!(
                "{what} is over domain {}, expected {expected}",
                set.domain()
            )));
        }
        Ok(())
    }

    /// Row set `I_i ⊗ [n_{i+1}] ⊗ ⋯ ⊗ [n_{t+i-1}]` of `T_<t+i-1>`.
    pub fn extended_rows(&self, rows: &IndexSet, i: usize, t: usize) -> IndexSet {
        kron_extend_all(rows, &self.tensor.shape().dims()[i..i + t - 1])
    }

    /// `α_{i,t} = √(|I_i| / Π_{j<=i} n_j) · ‖W_{T_<t+i-1>}(I_i ⊗ ⋯, :)^†‖₂`.
    pub fn alpha_it(&self, rows: &IndexSet, i: usize, t: usize) -> Result<f64> {
        self.check_level(i)?;
        if t == 0 || t + i > self.d() {
            return Err(Error::Domain(format!(
                "t = {t} out of range [1, {}] for level {i}",
                self.d() - i
            )));
        }
        Self::check_domain(rows, self.tensor.row_span(i), "I_i")?;
        let k = t + i - 1;
        let ext = self.extended_rows(rows, i, t);
        let w = self.svd(k).w.select_rows(&ext)?;
        Ok(rows.fraction().sqrt() * pinv_spectral_norm(&w, self.rank_tol)?)
    }

    /// `α_i = √(|I_{i-1}| / Π_{j<i} n_j) · ‖W_{T_<i>}(I_{i-1} ⊗ [n_i], :)^†‖₂`,
    /// with `α_1 = 1`.
    pub fn alpha_i(&self, prev_rows: &IndexSet, i: usize) -> Result<f64> {
        self.check_level(i)?;
        if i == 1 {
            return Ok(ALPHA_1);
        }
        Self::check_domain(prev_rows, self.tensor.row_span(i - 1), "I_{i-1}")?;
        let ext = kron_extend(prev_rows, self.tensor.shape().dims()[i - 1]);
        let w = self.svd(i).w.select_rows(&ext)?;
        Ok(prev_rows.fraction().sqrt() * pinv_spectral_norm(&w, self.rank_tol)?)
    }

    /// `β_i = √(|J_i| / Π_{j>i} n_j) · ‖V_{T_<i>}(J_i, :)^†‖₂`.
    pub fn beta_i(&self, cols: &IndexSet, i: usize) -> Result<f64> {
        self.check_level(i)?;
        Self::check_domain(cols, self.tensor.col_span(i), "J_i")?;
        let v = self.svd(i).v.select_rows(cols)?;
        Ok(cols.fraction().sqrt() * pinv_spectral_norm(&v, self.rank_tol)?)
    }

    /// Numerical rank of `(R_i)_<1> = L_i(I_i, :) · R_iᵀ`, i.e. of `L_i(I_i, :)`.
    pub fn sampled_row_rank(&self, rows: &IndexSet, i: usize) -> Result<usize> {
        self.check_level(i)?;
        Self::check_domain(rows, self.tensor.row_span(i), "I_i")?;
        if rows.is_empty() {
            return Ok(0);
        }
        let picked = self.left(i).select_rows(rows)?;
        rank_of_product(&picked, self.right(i), self.rank_tol)
    }

    /// Row set of `C_i`: `I_{i-1} ⊗ [n_i]`, or `[n_1]` for `i = 1`.
    pub fn column_subtensor_rows(&self, prev_rows: Option<&IndexSet>, i: usize) -> Result<IndexSet> {
        self.check_level(i)?;
        let n_i = self.tensor.shape().dims()[i - 1];
        match (i, prev_rows) {
            (1, _) => Ok(IndexSet::full(n_i)),
            (_, Some(prev)) => {
                Self::check_domain(prev, self.tensor.row_span(i - 1), "I_{i-1}")?;
                Ok(kron_extend(prev, n_i))
            }
            (_, None) => Err(Error::Precondition(format!("C_{i} needs I_{}", i - 1))),
        }
    }

    /// Compact SVD of `C_i = T_<i>(rows, cols)` from its factors.
    pub fn submatrix_svd(&self, i: usize, rows: &IndexSet, cols: &IndexSet) -> Result<ThinSvd> {
        self.check_level(i)?;
        let l = self.left(i).select_rows(rows)?;
        let r = self.right(i).select_rows(cols)?;
        factored_svd(&l, &r, self.rank_tol)
    }
}

fn rank_of_product(left: &DenseMatrix, right: &DenseMatrix, rank_tol: f64) -> Result<usize> {
    match factored_svd(left, right, rank_tol) {
        Ok(svd) => Ok(numerical_rank(&svd.sigma, rank_tol)),
        Err(Error::RankZero) => Ok(0),
        Err(e) => Err(e),
    }
}

/// Reports for every unfolding of `t`.
pub fn tt_incoherence(t: &TtTensor, rank_tol: f64) -> Result<Vec<UnfoldingReport>> {
    Ok(TtAnalysis::new(t, rank_tol)?.reports)
}

pub fn alpha_it(t: &TtTensor, rows: &IndexSet, i: usize, t_off: usize, rank_tol: f64) -> Result<f64> {
    TtAnalysis::new(t, rank_tol)?.alpha_it(rows, i, t_off)
}

pub fn alpha_i(t: &TtTensor, prev_rows: &IndexSet, i: usize, rank_tol: f64) -> Result<f64> {
    if i == 1 {
        return Ok(ALPHA_1);
    }
    TtAnalysis::new(t, rank_tol)?.alpha_i(prev_rows, i)
}

pub fn beta_i(t: &TtTensor, cols: &IndexSet, i: usize, rank_tol: f64) -> Result<f64> {
    TtAnalysis::new(t, rank_tol)?.beta_i(cols, i)
}

/// Rank preservation under first-mode fiber sampling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankPreservationReport {
    /// Numerical TT-rank of the original tensor.
    pub expected: Vec<usize>,
    /// `rank(T_<1>(I, :))`.
    pub sampled_rank: usize,
    pub hypothesis_holds: bool,
    /// Numerical TT-rank of `T(I, :, .., :)`, when the hypothesis holds.
    pub restricted: Option<Vec<usize>>,
    pub preserved: bool,
}

/// If `rank(T_<1>(I, :)) = r_1`, the subtensor `T(I, :, .., :)` must keep the
/// whole TT-rank. Hypothesis failures are reported, not raised.
pub fn check_rank_preservation(t: &TtTensor, rows: &IndexSet, rank_tol: f64) -> Result<RankPreservationReport> {
    let analysis = TtAnalysis::new(t, rank_tol)?;
    let expected = analysis.ranks();
    let sampled_rank = analysis.sampled_row_rank(rows, 1)?;
    let hypothesis_holds = sampled_rank == expected[0];
    if !hypothesis_holds {
        return Ok(RankPreservationReport {
            expected,
            sampled_rank,
            hypothesis_holds,
            restricted: None,
            preserved: false,
        });
    }
    let restricted = t
        .row_restrict_with(1, analysis.left(1), rows)?
        .tt_rank_numerical(rank_tol)?;
    Ok(RankPreservationReport {
        preserved: restricted == expected,
        expected,
        sampled_rank,
        hypothesis_holds,
        restricted: Some(restricted),
    })
}

/// One inequality `lhs <= rhs · (1 + slack)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        BoundCheck {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            satisfied: lhs <= rhs * (1.0 + slack),
        }
    }
}

/// Which sampled object a record describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subtensor {
    /// `(R_i)_<t>`, governed by `α_{i,t}`.
    Row { i: usize, t: usize },
    /// `C_i`, governed by `α_i` and `β_i`.
    Column { i: usize },
}

/// Observed properties of a subtensor unfolding next to the bounds predicted
/// from the parent unfolding.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InheritanceRecord {
    pub subtensor: Subtensor,
    pub hypothesis_holds: bool,
    /// `α_{i,t}` for row records, `α_i` for column records.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// The parent unfolding the bounds refer to.
    pub parent: UnfoldingReport,
    pub observed: Option<UnfoldingReport>,
    pub checks: Vec<BoundCheck>,
}

impl InheritanceRecord {
    /// True when the hypothesis holds and every inequality is satisfied.
    pub fn passed(&self) -> bool {
        self.hypothesis_holds && self.checks.iter().all(|c| c.satisfied)
    }

    pub fn violations(&self) -> usize {
        if !self.hypothesis_holds {
            return 0;
        }
        self.checks.iter().filter(|c| !c.satisfied).count()
    }

    fn failed_hypothesis(subtensor: Subtensor, parent: &UnfoldingReport) -> Self {
        InheritanceRecord {
            subtensor,
            hypothesis_holds: false,
            alpha: None,
            beta: None,
            parent: parent.clone(),
            observed: None,
            checks: Vec::new(),
        }
    }
}

/// Verifies `I_0 = {1}`, `I_i ⊆ I_{i-1} ⊗ [n_i]` for the given levels.
pub fn check_nesting(t: &TtTensor, nested: &[IndexSet]) -> Result<()> {
    let dims = t.shape().dims();
    let mut prev = IndexSet::full(1);
    for (k, set) in nested.iter().enumerate() {
        let pool = kron_extend(&prev, dims[k]);
        if !set.is_subset_of(&pool) {
            return Err(Error::Precondition(format!(
                "I_{} is not contained in I_{} ⊗ [n_{}]",
                k + 1,
                k,
                k + 1
            )));
        }
        prev = set.clone();
    }
    Ok(())
}

/// Row-subtensor bounds for every `i ∈ [d-1]`, `t ∈ [d-i]`:
/// `μ₁ ≤ α²κ²μ₁`, `μ₂ ≤ μ₂` and `κ ≤ α√(μ₁ r)κ` against `T_<t+i-1>`.
pub fn check_theorem_r_bounds(
    analysis: &TtAnalysis<'_>,
    nested: &[IndexSet],
) -> Result<Vec<InheritanceRecord>> {
    let t = analysis.tensor();
    let d = t.order();
    if nested.len() != d - 1 {
        return Err(Error::Precondition(format!(
            "expected {} nested row sets, got {}",
            d - 1,
            nested.len()
        )));
    }
    check_nesting(t, nested)?;
    let mut records = Vec::new();
    for (idx, rows) in nested.iter().enumerate() {
        let i = idx + 1;
        let hypothesis = !rows.is_empty() && analysis.sampled_row_rank(rows, i)? == analysis.report(i).rank;
        if !hypothesis {
            for t_off in 1..=d - i {
                let parent = analysis.report(t_off + i - 1);
                records.push(InheritanceRecord::failed_hypothesis(
                    Subtensor::Row { i, t: t_off },
                    parent,
                ));
            }
            continue;
        }
        let restricted = t.row_restrict_with(i, analysis.left(i), rows)?;
        let sub_lefts = restricted.left_interfaces()?;
        for t_off in 1..=d - i {
            let k = t_off + i - 1;
            let parent = analysis.report(k);
            let sub_left = &sub_lefts[t_off - 1];
            // Columns of (R_i)_<t> are the untouched trailing modes.
            let svd = factored_svd(sub_left, analysis.right(k), analysis.rank_tol())?;
            if svd.rank() != parent.rank {
                records.push(InheritanceRecord::failed_hypothesis(
                    Subtensor::Row { i, t: t_off },
                    parent,
                ));
                continue;
            }
            let alpha = match analysis.alpha_it(rows, i, t_off) {
                Ok(a) => a,
                Err(Error::Singular { .. }) => {
                    records.push(InheritanceRecord::failed_hypothesis(
                        Subtensor::Row { i, t: t_off },
                        parent,
                    ));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let observed =
                UnfoldingReport::from_svd(t_off, &svd, sub_left.rows(), analysis.right(k).rows());
            let (mu1, mu2, kappa, r) = (
                parent.mu.mu1,
                parent.mu.mu2,
                parent.kappa,
                parent.rank as f64,
            );
            let checks = vec![
                BoundCheck::new(
                    "mu1",
                    observed.mu.mu1,
                    alpha * alpha * kappa * kappa * mu1,
                    BOUND_SLACK,
                ),
                BoundCheck::new("mu2", observed.mu.mu2, mu2, EXACT_SLACK),
                BoundCheck::new(
                    "kappa",
                    observed.kappa,
                    alpha * (mu1 * r).sqrt() * kappa,
                    BOUND_SLACK,
                ),
            ];
            records.push(InheritanceRecord {
                subtensor: Subtensor::Row { i, t: t_off },
                hypothesis_holds: true,
                alpha: Some(alpha),
                beta: None,
                parent: parent.clone(),
                observed: Some(observed),
                checks,
            });
        }
    }
    Ok(records)
}

/// Column-subtensor bounds for `C_i = T_<i>(I_{i-1} ⊗ [n_i], J_i)`.
///
/// `nested` holds `I_1..I_{d-1}` (only `I_1..I_{d-2}` are used) and `cols`
/// holds `J_1..J_{d-1}`.
pub fn check_theorem_c_bounds(
    analysis: &TtAnalysis<'_>,
    nested: &[IndexSet],
    cols: &[IndexSet],
) -> Result<Vec<InheritanceRecord>> {
    let t = analysis.tensor();
    let d = t.order();
    if cols.len() != d - 1 || nested.len() + 1 < d - 1 {
        return Err(Error::Precondition(format!(
            "expected {} column sets and at least {} row sets",
            d - 1,
            d - 2
        )));
    }
    check_nesting(t, &nested[..nested.len().min(d - 1)])?;
    let mut records = Vec::with_capacity(d - 1);
    for (idx, j_set) in cols.iter().enumerate() {
        let i = idx + 1;
        let parent = analysis.report(i);
        let subtensor = Subtensor::Column { i };
        if j_set.domain() != t.col_span(i) {
            return Err(Error::Precondition(format!(
                "J_{i} is over domain {}, expected {}",
                j_set.domain(),
                t.col_span(i)
            )));
        }
        let prev = if i == 1 { None } else { Some(&nested[i - 2]) };
        if let Some(p) = prev {
            if p.is_empty() || analysis.sampled_row_rank(p, i - 1)? != analysis.report(i - 1).rank {
                records.push(InheritanceRecord::failed_hypothesis(subtensor, parent));
                continue;
            }
        }
        if j_set.is_empty() {
            records.push(InheritanceRecord::failed_hypothesis(subtensor, parent));
            continue;
        }
        let rows = analysis.column_subtensor_rows(prev, i)?;
        let svd = match analysis.submatrix_svd(i, &rows, j_set) {
            Ok(s) => s,
            Err(Error::RankZero) => {
                records.push(InheritanceRecord::failed_hypothesis(subtensor, parent));
                continue;
            }
            Err(e) => return Err(e),
        };
        if svd.rank() != parent.rank {
            records.push(InheritanceRecord::failed_hypothesis(subtensor, parent));
            continue;
        }
        let params = prev
            .map_or(Ok(ALPHA_1), |p| analysis.alpha_i(p, i))
            .and_then(|a| analysis.beta_i(j_set, i).map(|b| (a, b)));
        let (alpha, beta) = match params {
            Ok(ab) => ab,
            Err(Error::Singular { .. }) => {
                records.push(InheritanceRecord::failed_hypothesis(subtensor, parent));
                continue;
            }
            Err(e) => return Err(e),
        };
        let observed = UnfoldingReport::from_svd(i, &svd, rows.len(), j_set.len());
        let (mu1, mu2, kappa, r) = (
            parent.mu.mu1,
            parent.mu.mu2,
            parent.kappa,
            parent.rank as f64,
        );
        let checks = if i == 1 {
            vec![
                BoundCheck::new("mu1", observed.mu.mu1, mu1, EXACT_SLACK),
                BoundCheck::new("mu2", observed.mu.mu2, beta * beta * kappa * kappa * mu2, BOUND_SLACK),
                BoundCheck::new("kappa", observed.kappa, beta * (mu2 * r).sqrt() * kappa, BOUND_SLACK),
            ]
        } else {
            vec![
                BoundCheck::new(
                    "mu1",
                    observed.mu.mu1,
                    alpha * alpha * beta * beta * kappa * kappa * r * mu1 * mu2,
                    BOUND_SLACK,
                ),
                BoundCheck::new("mu2", observed.mu.mu2, beta * beta * kappa * kappa * mu2, BOUND_SLACK),
                BoundCheck::new(
                    "kappa",
                    observed.kappa,
                    alpha * beta * (mu1 * mu2).sqrt() * r * kappa,
                    BOUND_SLACK,
                ),
            ]
        };
        records.push(InheritanceRecord {
            subtensor,
            hypothesis_holds: true,
            alpha: Some(alpha),
            beta: Some(beta),
            parent: parent.clone(),
            observed: Some(observed),
            checks,
        });
    }
    Ok(records)
}
