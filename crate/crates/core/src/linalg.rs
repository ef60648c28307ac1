//! Dense kernels for tall-skinny matrices: Householder thin QR, one-sided
//! Jacobi SVD, numerical rank and the norms used by the incoherence and
//! inheritance computations.

use crate::error::{Error, Result};
use crate::multiindex::IndexSet;

/// Relative tolerance separating retained singular values from roundoff.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 80;

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from nested rows; panics on ragged input (test and literal use).
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        DenseMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// 0-based entry access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * other^T`.
    pub fn matmul_transposed(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols, "matmul_transposed dimension mismatch");
        DenseMatrix::from_fn(self.rows, other.rows, |i, j| dot(self.row(i), other.row(j)))
    }

    /// `self^T * other`.
    pub fn transposed_matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows, "transposed_matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &bv) in out.row_mut(i).iter_mut().zip(b) {
                    *o += a * bv;
                }
            }
        }
        out
    }

    /// Rows at the (1-based) positions of `set`, in set order.
    pub fn select_rows(&self, set: &IndexSet) -> Result<DenseMatrix> {
        if set.domain() != self.rows {
            return Err(Error::Domain(format!(
                "row set over domain {} applied to a matrix with {} rows",
                set.domain(),
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(set.len() * self.cols);
        for i in set.zero_based() {
            data.extend_from_slice(self.row(i));
        }
        Ok(DenseMatrix::from_vec_unchecked(set.len(), self.cols, data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape());
        DenseMatrix::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn scale_columns(&self, s: &[f64]) -> DenseMatrix {
        assert_eq!(s.len(), self.cols);
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * s[j])
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> DenseMatrix {
        assert!(k <= self.cols);
        DenseMatrix::from_fn(self.rows, k, |i, j| self.get(i, j))
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder thin QR: `m = q * s` with `q` of orthonormal columns (m×k)
/// and `s` upper triangular (k×k), `k = cols`.
pub fn thin_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::Domain(format!(
            "thin QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if m.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("thin QR input has non-finite entries".into()));
    }
    let mut a = m.clone();
    // reflectors[k] acts on rows k..rows; empty means identity.
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut dots = vec![0.0; cols];

    for k in 0..cols {
        let norm = (k..rows).map(|i| a.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = a.get(k, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        // One pass over rows accumulates v^T A[k.., c] for every trailing column.
        let dots = &mut dots[k..];
        dots.iter_mut().for_each(|d| *d = 0.0);
        for (off, &vi) in v.iter().enumerate() {
            let row = &a.row(k + off)[k..];
            for (d, &x) in dots.iter_mut().zip(row) {
                *d += vi * x;
            }
        }
        let scale = 2.0 / vnorm2;
        for (off, &vi) in v.iter().enumerate() {
            let row = &mut a.row_mut(k + off)[k..];
            for (x, &d) in row.iter_mut().zip(dots.iter()) {
                *x -= scale * vi * d;
            }
        }
        reflectors.push(v);
    }

    let s = DenseMatrix::from_fn(cols, cols, |i, j| if j >= i { a.get(i, j) } else { 0.0 });

    let mut q = DenseMatrix::zeros(rows, cols);
    for i in 0..cols {
        q.set(i, i, 1.0);
    }
    let mut dots = vec![0.0; cols];
    for k in (0..cols).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        dots.iter_mut().for_each(|d| *d = 0.0);
        for (off, &vi) in v.iter().enumerate() {
            for (d, &x) in dots.iter_mut().zip(q.row(k + off)) {
                *d += vi * x;
            }
        }
        let scale = 2.0 / vnorm2;
        for (off, &vi) in v.iter().enumerate() {
            for (x, &d) in q.row_mut(k + off).iter_mut().zip(dots.iter()) {
                *x -= scale * vi * d;
            }
        }
    }
    Ok((q, s))
}

/// Compact SVD: `w` (m×r) and `v` (n×r) with orthonormal columns, `sigma`
/// descending and strictly positive.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub w: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl ThinSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.w.scale_columns(&self.sigma).matmul_transposed(&self.v)
    }
}

/// Largest `k` with `sigma[k-1] > rank_tol * sigma[0]`.
pub fn numerical_rank(sigma: &[f64], rank_tol: f64) -> usize {
    match sigma.first() {
        None => 0,
        Some(&s1) if s1 <= 0.0 => 0,
        Some(&s1) => sigma.iter().take_while(|&&s| s > rank_tol * s1).count(),
    }
}

/// One-sided Jacobi on a small `k×k` (or tall) matrix. Returns the full set of
/// column norms (unsorted), the rotated columns, and the accumulated rotations.
fn jacobi(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (rows, cols) = a.shape();
    // Work column-major so the rotations touch contiguous memory.
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let eps = f64::EPSILON;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = u.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = c * xp - s * xq;
                    *y = s * xp + c * xq;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = c * xp - s * xq;
                    *y = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = u.iter().map(|c| dot(c, c).sqrt()).collect();
    let u_mat = DenseMatrix::from_fn(rows, cols, |i, j| u[j][i]);
    let v_mat = DenseMatrix::from_fn(cols, cols, |i, j| v[j][i]);
    (u_mat, norms, v_mat)
}

/// All `min(m, n)` singular values of a small square-ish factor, descending,
/// plus the matching unnormalized left columns and right vectors.
fn small_svd(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (u, norms, v) = jacobi(a);
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u_sorted = DenseMatrix::from_fn(u.rows(), order.len(), |i, j| u.get(i, order[j]));
    let v_sorted = DenseMatrix::from_fn(v.rows(), order.len(), |i, j| v.get(i, order[j]));
    (u_sorted, sigma, v_sorted)
}

/// Every singular value of `m` (descending, length `min(rows, cols)`).
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows() < m.cols() {
        return singular_values(&m.transpose());
    }
    if m.cols() == 0 {
        return Ok(Vec::new());
    }
    let (_, s) = thin_qr(m)?;
    let (_, sigma, _) = small_svd(&s);
    Ok(sigma)
}

/// Compact SVD truncated at `rank_tol` (relative to the largest singular value).
pub fn thin_svd(m: &DenseMatrix, rank_tol: f64) -> Result<ThinSvd> {
    if m.rows() < m.cols() {
        let t = thin_svd(&m.transpose(), rank_tol)?;
        return Ok(ThinSvd {
            w: t.v,
            sigma: t.sigma,
            v: t.w,
        });
    }
    if m.cols() == 0 {
        return Err(Error::RankZero);
    }
    let (q, s) = thin_qr(m)?;
    let small = svd_of_small(&s, rank_tol)?;
    Ok(ThinSvd {
        w: q.matmul(&small.w),
        sigma: small.sigma,
        v: small.v,
    })
}

/// SVD of a small square factor, truncated.
fn svd_of_small(s: &DenseMatrix, rank_tol: f64) -> Result<ThinSvd> {
    let (u, sigma, v) = small_svd(s);
    let r = numerical_rank(&sigma, rank_tol);
    if r == 0 {
        return Err(Error::RankZero);
    }
    let w = DenseMatrix::from_fn(u.rows(), r, |i, j| u.get(i, j) / sigma[j]);
    Ok(ThinSvd {
        w,
        sigma: sigma[..r].to_vec(),
        v: v.leading_columns(r),
    })
}

/// Compact SVD of `left * right^T` without forming the product.
///
/// `left` is m×k and `right` is n×k with `m, n >= k`; storage stays
/// O((m + n)·k).
pub fn factored_svd(left: &DenseMatrix, right: &DenseMatrix, rank_tol: f64) -> Result<ThinSvd> {
    if left.cols() != right.cols() {
        return Err(Error::Domain(format!(
            "factor inner dimensions differ: {} vs {}",
            left.cols(),
            right.cols()
        )));
    }
    if left.rows() < left.cols() || right.rows() < right.cols() {
        // Inner dimension exceeds an outer one; the product is small.
        return thin_svd(&left.matmul_transposed(right), rank_tol);
    }
    let (ql, sl) = thin_qr(left)?;
    let (qr, sr) = thin_qr(right)?;
    let core = sl.matmul_transposed(&sr);
    let small = svd_of_small(&core, rank_tol)?;
    Ok(ThinSvd {
        w: ql.matmul(&small.w),
        sigma: small.sigma,
        v: qr.matmul(&small.v),
    })
}

/// `1 / sigma_min(m)` for a matrix of full column rank.
pub fn pinv_spectral_norm(m: &DenseMatrix, rank_tol: f64) -> Result<f64> {
    let cols = m.cols();
    if cols == 0 {
        return Err(Error::Domain("pseudoinverse of an empty matrix".into()));
    }
    let sigma = singular_values(m)?;
    let rank = numerical_rank(&sigma, rank_tol);
    if rank < cols {
        return Err(Error::Singular {
            rank,
            required: cols,
        });
    }
    Ok(1.0 / sigma[cols - 1])
}

/// Moore-Penrose pseudoinverse, with singular values below `rank_tol·σ1` dropped.
pub fn pinv(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let svd = thin_svd(m, rank_tol)?;
    let inv: Vec<f64> = svd.sigma.iter().map(|s| 1.0 / s).collect();
    Ok(svd.v.scale_columns(&inv).matmul_transposed(&svd.w))
}

/// `‖m‖_{2,∞}`: the largest Euclidean row norm.
pub fn row_two_inf_norm(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| dot(m.row(i), m.row(i)))
        .fold(0.0, f64::max)
        .sqrt()
}

/// `σ_1 / σ_r` over the retained rank.
pub fn condition_number(svd: &ThinSvd) -> f64 {
    svd.sigma[0] / svd.sigma[svd.rank() - 1]
}

/// `‖a^T a - I‖_max`, a cheap orthonormality gauge.
pub fn orthonormality_defect(a: &DenseMatrix) -> f64 {
    let g = a.transposed_matmul(a);
    g.sub(&DenseMatrix::identity(a.cols())).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn qr_identity() {
        let (q, s) = thin_qr(&DenseMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_close(q.get(i, j).abs(), expect, 1e-15);
                assert_close(s.get(i, j).abs(), expect, 1e-15);
            }
        }
    }

    #[test]
    fn qr_normalizes_vector() {
        let m = DenseMatrix::from_rows(&[&[3.0], &[4.0]]);
        let (q, s) = thin_qr(&m).unwrap();
        let sign = s.get(0, 0).signum();
        assert_close(s.get(0, 0) * sign, 5.0, 1e-14);
        assert_close(q.get(0, 0) * sign, 0.6, 1e-15);
        assert_close(q.get(1, 0) * sign, 0.8, 1e-15);
    }

    #[test]
    fn qr_residual_on_random_tall() {
        let m = gaussian(100, 3, 1);
        let (q, s) = thin_qr(&m).unwrap();
        let resid = m.sub(&q.matmul(&s)).frobenius_norm() / m.frobenius_norm();
        assert!(resid <= 1e-12, "{resid}");
        assert!(orthonormality_defect(&q) <= 1e-12);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(s.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn qr_rejects_wide_and_nonfinite() {
        assert!(thin_qr(&DenseMatrix::zeros(2, 3)).is_err());
        let bad = DenseMatrix::from_vec_unchecked(2, 1, vec![1.0, f64::NAN]);
        assert!(matches!(thin_qr(&bad), Err(Error::Numeric(_))));
        assert!(DenseMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn qr_handles_zero_column() {
        let m = DenseMatrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]]);
        let (q, s) = thin_qr(&m).unwrap();
        assert!(m.sub(&q.matmul(&s)).max_abs() < 1e-15);
    }

    #[test]
    fn svd_diagonal() {
        let m = DenseMatrix::from_rows(&[&[3.0, 0.0], &[0.0, 1.0]]);
        let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        assert_close(svd.sigma[0], 3.0, 1e-14);
        assert_close(svd.sigma[1], 1.0, 1e-14);
        assert_close(svd.w.get(0, 0).abs(), 1.0, 1e-14);
        assert_close(svd.v.get(1, 1).abs(), 1.0, 1e-14);
        assert_close(condition_number(&svd), 3.0, 1e-14);
    }

    #[test]
    fn svd_rank_one() {
        // (1,2)^T (1,2): σ = ‖(1,2)‖² = 5.
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(svd.rank(), 1);
        assert_close(svd.sigma[0], 5.0, 1e-13);
    }

    #[test]
    fn svd_shear_condition_number() {
        // Eigenvalues of M^T M are (3 ± √5)/2.
        let m = DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        let expected = ((7.0 + 3.0 * 5f64.sqrt()) / 2.0).sqrt();
        assert_close(svd.sigma[0] / svd.sigma[1], expected, 1e-13);
        assert_close(condition_number(&svd), 2.618_033_988_749_895, 1e-12);
    }

    #[test]
    fn svd_zero_matrix_is_rank_zero() {
        assert!(matches!(
            thin_svd(&DenseMatrix::zeros(3, 2), DEFAULT_RANK_TOL),
            Err(Error::RankZero)
        ));
    }

    #[test]
    fn svd_wide_matrix() {
        let m = gaussian(3, 40, 5);
        let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(svd.rank(), 3);
        assert_eq!(svd.w.shape(), (3, 3));
        assert_eq!(svd.v.shape(), (40, 3));
        assert!(m.sub(&svd.reconstruct()).max_abs() <= 1e-12 * svd.sigma[0]);
    }

    fn faer_sigma(m: &DenseMatrix) -> Vec<f64> {
        let f = faer::Mat::<f64>::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j));
        let mut s = f.singular_values().unwrap();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn svd_matches_faer() {
        let m = gaussian(30, 7, 11);
        let ours = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        let theirs = faer_sigma(&m);
        for (a, b) in ours.sigma.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-12 * theirs[0]);
        }
    }

    #[test]
    fn rank_deficient_svd_matches_faer() {
        // Rank 2 embedded in 216 x 6: most singular values are zero.
        let m = gaussian(216, 2, 21).matmul(&gaussian(2, 6, 22));
        let ours = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        let theirs = faer_sigma(&m);
        assert_eq!(ours.rank(), 2);
        for (a, b) in ours.sigma.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-13 * b);
        }
        assert!(theirs[2] <= 1e-13 * theirs[0]);
    }

    #[test]
    fn numerical_rank_examples() {
        assert_eq!(numerical_rank(&[5.0, 3.0, 1e-14], 1e-9), 2);
        assert_eq!(numerical_rank(&[1.0], 0.5), 1);
        assert_eq!(numerical_rank(&[1.0, 0.5 * 1e-9], 1e-9), 1);
        assert_eq!(numerical_rank(&[], 1e-9), 0);
    }

    #[test]
    fn pinv_norm_examples() {
        assert_close(
            pinv_spectral_norm(&DenseMatrix::identity(3), DEFAULT_RANK_TOL).unwrap(),
            1.0,
            1e-14,
        );
        let m = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert_close(pinv_spectral_norm(&m, DEFAULT_RANK_TOL).unwrap(), 1.0, 1e-14);
        let singular = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            pinv_spectral_norm(&singular, DEFAULT_RANK_TOL),
            Err(Error::Singular { rank: 1, required: 2 })
        ));
        // Fewer rows than columns can never have full column rank.
        assert!(pinv_spectral_norm(&gaussian(2, 3, 3), DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn pinv_is_generalized_inverse() {
        let m = gaussian(9, 4, 8);
        let p = pinv(&m, DEFAULT_RANK_TOL).unwrap();
        let back = m.matmul(&p).matmul(&m);
        assert!(back.sub(&m).max_abs() < 1e-12 * m.max_abs().max(1.0) * 10.0);
    }

    #[test]
    fn two_inf_norm_examples() {
        assert_eq!(row_two_inf_norm(&DenseMatrix::identity(3)), 1.0);
        assert_eq!(
            row_two_inf_norm(&DenseMatrix::from_rows(&[&[3.0, 4.0], &[1.0, 0.0]])),
            5.0
        );
        assert_eq!(row_two_inf_norm(&DenseMatrix::zeros(2, 2)), 0.0);
    }

    #[test]
    fn orthogonal_matrix_has_unit_condition() {
        let (q, _) = thin_qr(&gaussian(5, 5, 4)).unwrap();
        let svd = thin_svd(&q, DEFAULT_RANK_TOL).unwrap();
        assert_close(condition_number(&svd), 1.0, 1e-13);
    }

    #[test]
    fn factored_svd_matches_dense() {
        let a = gaussian(50, 3, 21);
        let b = gaussian(40, 3, 22);
        let f = factored_svd(&a, &b, DEFAULT_RANK_TOL).unwrap();
        let d = thin_svd(&a.matmul_transposed(&b), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.rank(), 3);
        assert_eq!(d.rank(), 3);
        for (x, y) in f.sigma.iter().zip(&d.sigma) {
            assert!((x - y).abs() <= 1e-12 * d.sigma[0]);
        }
        assert!(orthonormality_defect(&f.w) < 1e-12);
        assert!(orthonormality_defect(&f.v) < 1e-12);
    }

    #[test]
    fn tall_svd_reconstruction_large() {
        let m = gaussian(200_000, 4, 31);
        let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
        // Spectral norm of the residual bounded by its Frobenius norm.
        let resid = m.sub(&svd.reconstruct()).frobenius_norm();
        assert!(resid <= 1e-10 * svd.sigma[0], "{resid}");
        assert!(orthonormality_defect(&svd.w) <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn svd_invariants(rows in 1usize..25, cols in 1usize..8, seed in any::<u64>()) {
            let m = gaussian(rows, cols, seed);
            let svd = thin_svd(&m, DEFAULT_RANK_TOL).unwrap();
            prop_assert!(m.sub(&svd.reconstruct()).max_abs() <= 1e-10 * svd.sigma[0]);
            prop_assert!(orthonormality_defect(&svd.w) <= 1e-12);
            prop_assert!(orthonormality_defect(&svd.v) <= 1e-12);
            prop_assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(svd.sigma.iter().all(|&s| s > 0.0));
            prop_assert!(condition_number(&svd) >= 1.0);
            prop_assert!(row_two_inf_norm(&svd.w) <= 1.0 + 1e-12);
        }

        #[test]
        fn orthonormal_columns_have_unit_pinv_norm(rows in 3usize..40, seed in any::<u64>()) {
            let cols = rows.min(3);
            let (q, _) = thin_qr(&gaussian(rows, cols, seed)).unwrap();
            let n = pinv_spectral_norm(&q, DEFAULT_RANK_TOL).unwrap();
            prop_assert!((n - 1.0).abs() <= 1e-12);
        }
    }
}
