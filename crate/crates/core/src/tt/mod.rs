//! Tensor-train representation and the interface-matrix machinery that gives
//! every unfolding `T_<i> = L_i · R_iᵀ` in factored form.
//!
//! `L_i` has one row per multi-index `(j_1..j_i)` and `R_i` one row per
//! `(j_{i+1}..j_d)`, both ordered first-index-fastest. Nothing here forms an
//! unfolding densely; SVDs go through [`factored_svd`].

pub mod io;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{factored_svd, numerical_rank, thin_svd, DenseMatrix, ThinSvd};
use crate::multiindex::{IndexSet, Shape};
use crate::oracle::DenseTensor;

/// Default cap on dense materialization (`to_dense`, `tt_svd_from_dense`).
pub const DEFAULT_DENSE_CAP: usize = 10_000_000;

/// Rows per parallel block when building interface matrices.
pub const DEFAULT_BLOCK_ROWS: usize = 1 << 16;

/// Default cap on interface-matrix entries (1 GiB of f64).
pub const DEFAULT_INTERFACE_CAP: usize = 1 << 27;

/// Order-3 core `r_{i-1} × n_i × r_i`, stored with `a` fastest, then `j`, then `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TtCore {
    left_rank: usize,
    mode_size: usize,
    right_rank: usize,
    data: Vec<f64>,
}

impl TtCore {
    pub fn new(left_rank: usize, mode_size: usize, right_rank: usize, data: Vec<f64>) -> Result<Self> {
        if left_rank == 0 || mode_size == 0 || right_rank == 0 {
            return Err(Error::Domain(format!(
                "core dimensions must be positive, got {left_rank}x{mode_size}x{right_rank}"
            )));
        }
        if data.len() != left_rank * mode_size * right_rank {
            return Err(Error::Domain(format!(
                "core {left_rank}x{mode_size}x{right_rank} needs {} entries, got {}",
                left_rank * mode_size * right_rank,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("core has non-finite entries".into()));
        }
        Ok(TtCore {
            left_rank,
            mode_size,
            right_rank,
            data,
        })
    }

    /// Core filled by `f(a, j, b)` over 0-based indices.
    pub fn from_fn(
        left_rank: usize,
        mode_size: usize,
        right_rank: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(left_rank * mode_size * right_rank);
        for b in 0..right_rank {
            for j in 0..mode_size {
                for a in 0..left_rank {
                    data.push(f(a, j, b));
                }
            }
        }
        TtCore::new(left_rank, mode_size, right_rank, data)
    }

    pub fn left_rank(&self) -> usize {
        self.left_rank
    }

    pub fn mode_size(&self) -> usize {
        self.mode_size
    }

    pub fn right_rank(&self) -> usize {
        self.right_rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// 0-based entry `(a, j, b)`.
    #[inline]
    pub fn get(&self, a: usize, j: usize, b: usize) -> f64 {
        self.data[a + self.left_rank * (j + self.mode_size * b)]
    }

    /// The `r_{i-1} × r_i` slice `T_i(:, j, :)` (0-based `j`).
    pub fn slice(&self, j: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.left_rank, self.right_rank, |a, b| self.get(a, j, b))
    }
}

/// Checks chaining, boundary ranks and `d >= 2`; returns `(r_1, .., r_{d-1})`.
pub fn validate(cores: &[TtCore]) -> Result<Vec<usize>> {
    if cores.len() < 2 {
        return Err(Error::Structure {
            location: "tensor".into(),
            detail: format!("need at least 2 cores, got {}", cores.len()),
        });
    }
    if cores[0].left_rank != 1 {
        return Err(Error::Structure {
            location: "core 1".into(),
            detail: format!("left boundary rank is {}, expected 1", cores[0].left_rank),
        });
    }
    let last = cores.len();
    if cores[last - 1].right_rank != 1 {
        return Err(Error::Structure {
            location: format!("core {last}"),
            detail: format!(
                "right boundary rank is {}, expected 1",
                cores[last - 1].right_rank
            ),
        });
    }
    for (k, pair) in cores.windows(2).enumerate() {
        if pair[0].right_rank != pair[1].left_rank {
            return Err(Error::Structure {
                location: format!("junction {}", k + 1),
                detail: format!(
                    "core {} right rank {} != core {} left rank {}",
                    k + 1,
                    pair[0].right_rank,
                    k + 2,
                    pair[1].left_rank
                ),
            });
        }
    }
    Ok(cores[..last - 1].iter().map(|c| c.right_rank).collect())
}

/// A `d`-mode tensor `T_1 • T_2 • ⋯ • T_d` in TT format.
#[derive(Clone, Debug, PartialEq)]
pub struct TtTensor {
    cores: Vec<TtCore>,
    shape: Shape,
}

impl TtTensor {
    pub fn new(cores: Vec<TtCore>) -> Result<Self> {
        validate(&cores)?;
        let shape = Shape::new(cores.iter().map(|c| c.mode_size).collect())?;
        Ok(TtTensor { cores, shape })
    }

    pub fn cores(&self) -> &[TtCore] {
        &self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Declared internal ranks `(r_1, .., r_{d-1})`.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.order() - 1]
            .iter()
            .map(|c| c.right_rank)
            .collect()
    }

    /// `Π_{j<=i} n_j` (1-based `i`; `i = 0` gives 1).
    pub fn row_span(&self, i: usize) -> usize {
        self.shape.span(0..i)
    }

    /// `Π_{j>i} n_j`.
    pub fn col_span(&self, i: usize) -> usize {
        self.shape.span(i..self.order())
    }

    fn check_unfolding(&self, i: usize) -> Result<()> {
        if i == 0 || i >= self.order() {
            return Err(Error::Domain(format!(
                "unfolding index {i} out of range [1, {}]",
                self.order() - 1
            )));
        }
        Ok(())
    }

    /// Entry at a 1-based multi-index, as the chain product of core slices.
    pub fn entry(&self, multi: &[usize]) -> Result<f64> {
        if multi.len() != self.order() {
            return Err(Error::Domain(format!(
                "multi-index has {} components, tensor has {} modes",
                multi.len(),
                self.order()
            )));
        }
        let mut acc = vec![1.0];
        for (k, (core, &j)) in self.cores.iter().zip(multi).enumerate() {
            if j == 0 || j > core.mode_size {
                return Err(Error::Domain(format!(
                    "index {j} out of range [1, {}] in mode {}",
                    core.mode_size,
                    k + 1
                )));
            }
            acc = (0..core.right_rank)
                .map(|b| {
                    acc.iter()
                        .enumerate()
                        .map(|(a, &x)| x * core.get(a, j - 1, b))
                        .sum()
                })
                .collect();
        }
        Ok(acc[0])
    }

    /// Dense copy with entries in linearized (first-index-fastest) order.
    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let total = self
            .shape
            .numel()
            .filter(|&n| n <= cap)
            .ok_or(Error::Capacity {
                requested: self.shape.numel().unwrap_or(usize::MAX),
                cap,
            })?;
        let full = self.left_chain(self.order(), DEFAULT_BLOCK_ROWS, cap)?;
        debug_assert_eq!(full.rows(), total);
        DenseTensor::new(self.shape.clone(), full.into_data())
    }

    /// `L_i = (T_1 • ⋯ • T_i)_<i>`, `(Π_{j<=i} n_j) × r_i`.
    pub fn left_interface(&self, i: usize) -> Result<DenseMatrix> {
        self.check_unfolding(i)?;
        self.left_chain(i, DEFAULT_BLOCK_ROWS, DEFAULT_INTERFACE_CAP)
    }

    /// `R_i`, `(Π_{j>i} n_j) × r_i`, with `T_<i> = L_i · R_iᵀ`.
    pub fn right_interface(&self, i: usize) -> Result<DenseMatrix> {
        self.check_unfolding(i)?;
        self.right_chain(i, DEFAULT_BLOCK_ROWS, DEFAULT_INTERFACE_CAP)
    }

    /// All `L_1..L_{d-1}` in one pass.
    pub fn left_interfaces(&self) -> Result<Vec<DenseMatrix>> {
        let mut out: Vec<DenseMatrix> = Vec::with_capacity(self.order() - 1);
        let mut prev = DenseMatrix::identity(1);
        for k in 0..self.order() - 1 {
            let next = extend_left(&prev, &self.cores[k], DEFAULT_BLOCK_ROWS, DEFAULT_INTERFACE_CAP)?;
            out.push(next);
            prev = out.last().unwrap().clone();
        }
        Ok(out)
    }

    /// All `R_1..R_{d-1}` in one pass.
    pub fn right_interfaces(&self) -> Result<Vec<DenseMatrix>> {
        let d = self.order();
        let mut out: Vec<DenseMatrix> = Vec::with_capacity(d - 1);
        let mut prev = DenseMatrix::identity(1);
        for k in (1..d).rev() {
            let next = extend_right(&prev, &self.cores[k], DEFAULT_BLOCK_ROWS, DEFAULT_INTERFACE_CAP)?;
            out.push(next);
            prev = out.last().unwrap().clone();
        }
        out.reverse();
        Ok(out)
    }

    fn left_chain(&self, upto: usize, block_rows: usize, cap: usize) -> Result<DenseMatrix> {
        let mut acc = DenseMatrix::identity(1);
        for core in &self.cores[..upto] {
            acc = extend_left(&acc, core, block_rows, cap)?;
        }
        Ok(acc)
    }

    fn right_chain(&self, from: usize, block_rows: usize, cap: usize) -> Result<DenseMatrix> {
        let mut acc = DenseMatrix::identity(1);
        for core in self.cores[from..].iter().rev() {
            acc = extend_right(&acc, core, block_rows, cap)?;
        }
        Ok(acc)
    }

    /// Compact SVD of `T_<i>` from its interface factors.
    pub fn unfolding_svd(&self, i: usize, rank_tol: f64) -> Result<ThinSvd> {
        let left = self.left_interface(i)?;
        let right = self.right_interface(i)?;
        factored_svd(&left, &right, rank_tol)
    }

    /// Compact SVDs of every unfolding `i = 1..d-1`, sharing interface work.
    pub fn unfolding_svds(&self, rank_tol: f64) -> Result<Vec<ThinSvd>> {
        let lefts = self.left_interfaces()?;
        let rights = self.right_interfaces()?;
        lefts
            .iter()
            .zip(&rights)
            .map(|(l, r)| factored_svd(l, r, rank_tol))
            .collect()
    }

    /// Numerical TT-rank `(rank(T_<1>), .., rank(T_<d-1>))`.
    pub fn tt_rank_numerical(&self, rank_tol: f64) -> Result<Vec<usize>> {
        Ok(self
            .unfolding_svds(rank_tol)?
            .iter()
            .map(|s| numerical_rank(&s.sigma, rank_tol))
            .collect())
    }

    /// `(T_1 • ⋯ • T_i)_<i>(I, :) • T_{i+1} • ⋯ • T_d`, a `(d-i+1)`-mode tensor of
    /// shape `(|I|, n_{i+1}, .., n_d)`.
    pub fn row_restrict(&self, i: usize, set: &IndexSet) -> Result<TtTensor> {
        self.check_unfolding(i)?;
        let left = self.left_interface(i)?;
        self.row_restrict_with(i, &left, set)
    }

    /// [`row_restrict`](Self::row_restrict) with a precomputed `L_i`.
    pub fn row_restrict_with(&self, i: usize, left: &DenseMatrix, set: &IndexSet) -> Result<TtTensor> {
        self.check_unfolding(i)?;
        if set.is_empty() {
            return Err(Error::Domain("row restriction with an empty index set".into()));
        }
        if set.domain() != self.row_span(i) {
            return Err(Error::Domain(format!(
                "index set over domain {} does not match Π_(j<={i}) n_j = {}",
                set.domain(),
                self.row_span(i)
            )));
        }
        let picked = left.select_rows(set)?;
        let r = picked.cols();
        let first = TtCore::from_fn(1, set.len(), r, |_, a, b| picked.get(a, b))?;
        let mut cores = Vec::with_capacity(self.order() - i + 1);
        cores.push(first);
        cores.extend(self.cores[i..].iter().cloned());
        TtTensor::new(cores)
    }

    /// `T_<i>(rows, cols)` as `L_i(rows, :) · R_i(cols, :)ᵀ`.
    pub fn column_submatrix(&self, i: usize, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix> {
        let (l, r) = self.submatrix_factors(i, rows, cols)?;
        Ok(l.matmul_transposed(&r))
    }

    /// The factors `(L_i(rows, :), R_i(cols, :))` of `T_<i>(rows, cols)`.
    pub fn submatrix_factors(
        &self,
        i: usize,
        rows: &IndexSet,
        cols: &IndexSet,
    ) -> Result<(DenseMatrix, DenseMatrix)> {
        self.check_unfolding(i)?;
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::Domain("submatrix with an empty index set".into()));
        }
        let left = self.left_interface(i)?.select_rows(rows)?;
        let right = self.right_interface(i)?.select_rows(cols)?;
        Ok((left, right))
    }
}

/// `next(q + j·P, :) = prev(q, :) · core(:, j, :)`.
fn extend_left(prev: &DenseMatrix, core: &TtCore, block_rows: usize, cap: usize) -> Result<DenseMatrix> {
    let p = prev.rows();
    let (rl, n, rr) = (core.left_rank, core.mode_size, core.right_rank);
    debug_assert_eq!(prev.cols(), rl);
    let rows = p * n;
    let entries = rows.checked_mul(rr).unwrap_or(usize::MAX);
    if entries > cap {
        return Err(Error::Capacity {
            requested: entries,
            cap,
        });
    }
    let mut data = vec![0.0; entries];
    data.par_chunks_mut(block_rows.max(1) * rr)
        .enumerate()
        .for_each(|(blk, chunk)| {
            let base = blk * block_rows.max(1);
            for (off, out) in chunk.chunks_mut(rr).enumerate() {
                let g = base + off;
                let (q, j) = (g % p, g / p);
                let src = prev.row(q);
                for (b, o) in out.iter_mut().enumerate() {
                    *o = src
                        .iter()
                        .enumerate()
                        .map(|(a, &x)| x * core.get(a, j, b))
                        .sum();
                }
            }
        });
    Ok(DenseMatrix::from_vec_unchecked(rows, rr, data))
}

/// `next(j + s·n, a) = Σ_b core(a, j, b) · prev(s, b)`.
fn extend_right(prev: &DenseMatrix, core: &TtCore, block_rows: usize, cap: usize) -> Result<DenseMatrix> {
    let s_rows = prev.rows();
    let (rl, n, rr) = (core.left_rank, core.mode_size, core.right_rank);
    debug_assert_eq!(prev.cols(), rr);
    let rows = s_rows * n;
    let entries = rows.checked_mul(rl).unwrap_or(usize::MAX);
    if entries > cap {
        return Err(Error::Capacity {
            requested: entries,
            cap,
        });
    }
    let mut data = vec![0.0; entries];
    data.par_chunks_mut(block_rows.max(1) * rl)
        .enumerate()
        .for_each(|(blk, chunk)| {
            let base = blk * block_rows.max(1);
            for (off, out) in chunk.chunks_mut(rl).enumerate() {
                let g = base + off;
                let (j, s) = (g % n, g / n);
                let src = prev.row(s);
                for (a, o) in out.iter_mut().enumerate() {
                    *o = src
                        .iter()
                        .enumerate()
                        .map(|(b, &x)| core.get(a, j, b) * x)
                        .sum();
                }
            }
        });
    Ok(DenseMatrix::from_vec_unchecked(rows, rl, data))
}

/// Sequential truncated SVD of a dense tensor into TT format.
pub fn tt_svd_from_dense(x: &DenseTensor, rank_tol: f64, cap: usize) -> Result<TtTensor> {
    let dims = x.shape().dims().to_vec();
    let d = dims.len();
    if d < 2 {
        return Err(Error::Structure {
            location: "tensor".into(),
            detail: "TT-SVD needs at least 2 modes".into(),
        });
    }
    if x.data().len() > cap {
        return Err(Error::Capacity {
            requested: x.data().len(),
            cap,
        });
    }
    let mut cores = Vec::with_capacity(d);
    let mut left_rank = 1usize;
    // Current remainder as a column-major (left_rank·n_k) × rest block.
    let mut rest: Vec<f64> = x.data().to_vec();
    for (k, &n) in dims.iter().enumerate().take(d - 1) {
        let rows = left_rank * n;
        let cols = rest.len() / rows;
        let m = DenseMatrix::from_fn(rows, cols, |r, c| rest[r + rows * c]);
        let svd = thin_svd(&m, rank_tol)?;
        let r = svd.rank();
        cores.push(TtCore::from_fn(left_rank, n, r, |a, j, b| {
            svd.w.get(a + left_rank * j, b)
        })?);
        // Σ Vᵀ, column-major r × cols.
        let mut next = vec![0.0; r * cols];
        for c in 0..cols {
            for a in 0..r {
                next[a + r * c] = svd.sigma[a] * svd.v.get(c, a);
            }
        }
        rest = next;
        left_rank = r;
        debug_assert!(k < d - 1);
    }
    let n_last = dims[d - 1];
    cores.push(TtCore::from_fn(left_rank, n_last, 1, |a, j, _| {
        rest[a + left_rank * j]
    })?);
    TtTensor::new(cores)
}
