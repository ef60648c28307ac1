//! Brute-force dense references. Everything here materializes the full
//! tensor, so it is only meant for small shapes where it can falsify the
//! structured code paths.

use crate::error::{Error, Result};
use crate::linalg::{pinv, thin_svd, DenseMatrix};
use crate::multiindex::{linearize, IndexSet, Shape};
use crate::properties::UnfoldingReport;
use crate::tt::{TtTensor, DEFAULT_DENSE_CAP};

/// A dense tensor with entries stored in linearized (first-index-fastest) order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        let n = shape
            .numel()
            .ok_or_else(|| Error::Domain("shape size overflows usize".into()))?;
        if data.len() != n {
            return Err(Error::Domain(format!(
                "tensor of {n} entries given {} values",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("tensor has non-finite entries".into()));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, multi: &[usize]) -> Result<f64> {
        Ok(self.data[linearize(multi, &self.shape)? - 1])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `T_<i>`: modes `1..i` as rows, `i+1..d` as columns.
    pub fn unfolding(&self, i: usize) -> Result<DenseMatrix> {
        dense_unfolding(self, i)
    }
}

pub fn dense_unfolding(x: &DenseTensor, i: usize) -> Result<DenseMatrix> {
    let d = x.shape.order();
    if i == 0 || i >= d {
        return Err(Error::Domain(format!(
            "unfolding index {i} out of range [1, {}]",
            d.saturating_sub(1)
        )));
    }
    let rows = x.shape.span(0..i);
    let cols = x.shape.span(i..d);
    Ok(DenseMatrix::from_fn(rows, cols, |r, c| x.data[r + rows * c]))
}

/// Inverse of [`dense_unfolding`].
pub fn fold(m: &DenseMatrix, shape: &Shape, i: usize) -> Result<DenseTensor> {
    let rows = shape.span(0..i);
    if m.rows() != rows || m.rows() * m.cols() != shape.numel().unwrap_or(0) {
        return Err(Error::Domain("matrix does not match the requested fold".into()));
    }
    let mut data = vec![0.0; m.rows() * m.cols()];
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            data[r + rows * c] = m.get(r, c);
        }
    }
    DenseTensor::new(shape.clone(), data)
}

/// `x ×_k m`: contracts mode `k` (1-based) of `x` with the columns of `m` (J × n_k).
pub fn mode_k_product(x: &DenseTensor, m: &DenseMatrix, k: usize) -> Result<DenseTensor> {
    let dims = x.shape.dims();
    if k == 0 || k > dims.len() {
        return Err(Error::Domain(format!("mode {k} out of range [1, {}]", dims.len())));
    }
    let nk = dims[k - 1];
    if m.cols() != nk {
        return Err(Error::Domain(format!(
            "matrix has {} columns, mode {k} has size {nk}",
            m.cols()
        )));
    }
    let jn = m.rows();
    let left: usize = dims[..k - 1].iter().product();
    let right: usize = dims[k..].iter().product();
    let mut out = vec![0.0; left * jn * right];
    for b in 0..right {
        for s in 0..nk {
            let src = &x.data[left * (s + nk * b)..left * (s + nk * b + 1)];
            for j in 0..jn {
                let w = m.get(j, s);
                if w == 0.0 {
                    continue;
                }
                let dst = &mut out[left * (j + jn * b)..left * (j + jn * b + 1)];
                for (o, &v) in dst.iter_mut().zip(src) {
                    *o += w * v;
                }
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[k - 1] = jn;
    DenseTensor::new(Shape::new(new_dims)?, out)
}

/// Reference incoherence and conditioning of `x_<i>` from a dense SVD.
pub fn dense_properties(x: &DenseTensor, i: usize, rank_tol: f64) -> Result<UnfoldingReport> {
    let unf = dense_unfolding(x, i)?;
    let svd = thin_svd(&unf, rank_tol)?;
    Ok(UnfoldingReport::from_svd(i, &svd, unf.rows(), unf.cols()))
}

/// Outcome of the CUR identity check `T = R ×_1 C U^†`.
#[derive(Clone, Debug)]
pub struct CurReport {
    /// `r_1 = rank(T_<1>)`.
    pub target_rank: usize,
    /// `rank(T_<1>(I, :))`.
    pub sampled_rank: usize,
    /// Whether the sampled rows preserve `r_1`.
    pub hypothesis_holds: bool,
    /// 1-based columns `J` of `T_<1>` chosen by pivoting.
    pub columns: Vec<usize>,
    /// `‖T - R ×_1 C U^†‖_F / ‖T‖_F`; `None` when the hypothesis fails.
    pub residual: Option<f64>,
}

/// Greedy column pivoting: picks `target` columns of `m` with the largest
/// residual norms after projecting out earlier picks. Returns 0-based columns.
fn pivot_columns(m: &DenseMatrix, target: usize, rank_tol: f64) -> Result<Vec<usize>> {
    let mut cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let scale = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut picked = Vec::with_capacity(target);
    while picked.len() < target {
        let (best, norm) = cols
            .iter()
            .enumerate()
            .filter(|(j, _)| !picked.contains(j))
            .map(|(j, c)| (j, c.iter().map(|x| x * x).sum::<f64>().sqrt()))
            .fold((usize::MAX, 0.0), |acc, (j, n)| if n > acc.1 { (j, n) } else { acc });
        if best == usize::MAX || norm <= rank_tol * scale {
            return Err(Error::Search {
                target,
                found: picked.len(),
            });
        }
        let q: Vec<f64> = cols[best].iter().map(|x| x / norm).collect();
        for (j, c) in cols.iter_mut().enumerate() {
            if j == best || picked.contains(&j) {
                continue;
            }
            let proj: f64 = c.iter().zip(&q).map(|(a, b)| a * b).sum();
            c.iter_mut().zip(&q).for_each(|(a, b)| *a -= proj * b);
        }
        picked.push(best);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Checks `T = R ×_1 C U^†` with `R = T(I, :, .., :)`, `C = T_<1>(:, J)` and
/// `U = T_<1>(I, J)` for a pivot-selected `J`.
pub fn cur_reconstruct_check(t: &TtTensor, rows: &IndexSet, rank_tol: f64) -> Result<CurReport> {
    let n1 = t.shape().dims()[0];
    if rows.domain() != n1 {
        return Err(Error::Domain(format!(
            "row set over domain {} does not match n_1 = {n1}",
            rows.domain()
        )));
    }
    let dense = t.to_dense(DEFAULT_DENSE_CAP)?;
    let unf = dense.unfolding(1)?;
    let target_rank = thin_svd(&unf, rank_tol)?.rank();
    let sampled = unf.select_rows(rows)?;
    let sampled_rank = match thin_svd(&sampled, rank_tol) {
        Ok(s) => s.rank(),
        Err(Error::RankZero) => 0,
        Err(e) => return Err(e),
    };
    if sampled_rank != target_rank {
        return Ok(CurReport {
            target_rank,
            sampled_rank,
            hypothesis_holds: false,
            columns: Vec::new(),
            residual: None,
        });
    }
    let picked = pivot_columns(&sampled, target_rank, rank_tol)?;
    let c = DenseMatrix::from_fn(unf.rows(), picked.len(), |r, k| unf.get(r, picked[k]));
    let u = DenseMatrix::from_fn(sampled.rows(), picked.len(), |r, k| sampled.get(r, picked[k]));
    let cu = c.matmul(&pinv(&u, rank_tol)?);
    let restricted = t.row_restrict(1, rows)?.to_dense(DEFAULT_DENSE_CAP)?;
    let rebuilt = mode_k_product(&restricted, &cu, 1)?;
    let diff: f64 = dense
        .data()
        .iter()
        .zip(rebuilt.data())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(CurReport {
        target_rank,
        sampled_rank,
        hypothesis_holds: true,
        columns: picked.into_iter().map(|j| j + 1).collect(),
        residual: Some(diff / dense.frobenius_norm()),
    })
}
