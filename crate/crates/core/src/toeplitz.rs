//! Truncated Toeplitz matrices from boundary symbols, rank-revealing null
//! spaces via dense SVD, and principal angles between coefficient-space
//! subspaces.

use crate::circle_fft::{AnalyticFunction, BoundaryFunction};
use crate::deterministic_linalg;
use faer::linalg::solvers::SolveLstsq;
use faer::{Mat, Side};
use num_complex::Complex64;
use thiserror::Error;

/// Errors from matrix construction and subspace comparison.
#[derive(Debug, Error)]
pub enum ToeplitzError {
    /// Requested truncation order exceeds the symbol's safe bandwidth.
    #[error("order {m} too large for a symbol sampled on {n} nodes (need m <= n/4)")]
    OrderTooLarge { m: usize, n: usize },
    /// Relative singular-value threshold outside the supported window.
    #[error("relative tolerance {tol:.3e} outside [1e-12, 1e-2]")]
    ToleranceOutOfRange { tol: f64 },
    /// Subspaces live in coefficient spaces of different orders.
    #[error("subspaces have different coefficient orders")]
    DimMismatch,
    /// The SVD driver failed to converge (does not happen at desk scale).
    #[error("singular value decomposition failed")]
    SvdFailed,
}

/// Column-orthonormal basis of a subspace of coefficient space, together
/// with the tolerance that produced it.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Mat<Complex64>,
    tol: f64,
}

impl Subspace {
    /// Wrap an already-orthonormal basis matrix.
    pub fn from_orthonormal(basis: Mat<Complex64>, tol: f64) -> Self {
        Self { basis, tol }
    }

    /// Orthonormalize a spanning set (columns) with a thin QR factorization.
    pub fn from_spanning_columns(columns: &[Vec<Complex64>], tol: f64) -> Self {
        deterministic_linalg();
        assert!(!columns.is_empty(), "need at least one spanning vector");
        let rows = columns[0].len();
        let a = Mat::from_fn(rows, columns.len(), |i, j| columns[j][i]);
        let q = a.qr().compute_thin_Q();
        Self { basis: q, tol }
    }

    /// Orthonormal basis, one column per dimension.
    pub fn basis(&self) -> &Mat<Complex64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coefficient order (number of rows).
    pub fn order(&self) -> usize {
        self.basis.nrows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Basis column as an [`AnalyticFunction`].
    pub fn column_fn(&self, j: usize) -> AnalyticFunction {
        AnalyticFunction::new((0..self.basis.nrows()).map(|i| self.basis[(i, j)]).collect())
    }

    /// Orthogonal projection of a coefficient vector onto the subspace.
    pub fn project(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.order());
        let x = Mat::from_fn(v.len(), 1, |i, _| v[i]);
        let coords = self.basis.adjoint() * &x;
        let proj = &self.basis * &coords;
        (0..v.len()).map(|i| proj[(i, 0)]).collect()
    }

    /// Norm of the component of `v` orthogonal to the subspace, divided by
    /// the norm of `v`.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        let proj = self.project(v);
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, p) in v.iter().zip(&proj) {
            num += (a - p).norm_sqr();
            den += a.norm_sqr();
        }
        (num / den).sqrt()
    }
}

/// Finite section of a Toeplitz operator: `T[j, k] = c_{j-k}(symbol)`.
#[derive(Debug, Clone)]
pub struct ToeplitzMatrix {
    mat: Mat<Complex64>,
    m: usize,
}

/// Build the order-`m` section of the Toeplitz operator with the given
/// boundary symbol. Requires `m <= n/4` so every needed Fourier coefficient
/// of the symbol is resolved with a safety margin.
pub fn toeplitz_matrix(
    symbol: &BoundaryFunction,
    m: usize,
) -> Result<ToeplitzMatrix, ToeplitzError> {
    let n = symbol.grid().n();
    if m > n / 4 || m == 0 {
        return Err(ToeplitzError::OrderTooLarge { m, n });
    }
    let mat = Mat::from_fn(m, m, |j, k| symbol.coeff(j as isize - k as isize));
    Ok(ToeplitzMatrix { mat, m })
}

impl ToeplitzMatrix {
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.mat
    }

    /// Apply the section to the first `m` coefficients of `h`.
    pub fn apply(&self, h: &AnalyticFunction) -> AnalyticFunction {
        let x = Mat::from_fn(self.m, 1, |i, _| h.coeff(i));
        let y = &self.mat * &x;
        AnalyticFunction::new((0..self.m).map(|i| y[(i, 0)]).collect())
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> Result<Vec<f64>, ToeplitzError> {
        deterministic_linalg();
        self.mat
            .singular_values()
            .map_err(|_| ToeplitzError::SvdFailed)
    }
}

/// Output of a null-space extraction: the subspace, the full spectrum for
/// gap diagnostics, and the spectral-gap ratio at the cut (when a cut was
/// made).
#[derive(Debug, Clone)]
pub struct KernelResult {
    pub subspace: Subspace,
    pub sigmas: Vec<f64>,
    /// Smallest retained singular value divided by the largest discarded
    /// one; `None` when nothing was discarded.
    pub gap_ratio: Option<f64>,
    /// True when a cut was made but the spectrum has no clear gap there
    /// (ratio below 10): the reported dimension is then unreliable.
    pub no_spectral_gap: bool,
}

fn svd_parts(t: &ToeplitzMatrix) -> Result<(Vec<f64>, Mat<Complex64>), ToeplitzError> {
    deterministic_linalg();
    let svd = t.mat.svd().map_err(|_| ToeplitzError::SvdFailed)?;
    let sigmas: Vec<f64> = (0..t.m).map(|i| svd.S().column_vector()[i].re).collect();
    Ok((sigmas, svd.V().to_owned()))
}

fn kernel_from_cut(
    sigmas: Vec<f64>,
    v: Mat<Complex64>,
    dim: usize,
    tol: f64,
) -> KernelResult {
    let m = sigmas.len();
    let basis = Mat::from_fn(m, dim, |i, j| v[(i, m - dim + j)]);
    let gap_ratio = if dim > 0 && dim < m {
        Some(sigmas[m - dim - 1] / sigmas[m - dim].max(f64::MIN_POSITIVE))
    } else {
        None
    };
    let no_spectral_gap = dim > 0 && gap_ratio.map(|r| r < 10.0).unwrap_or(true);
    KernelResult {
        subspace: Subspace::from_orthonormal(basis, tol),
        sigmas,
        gap_ratio,
        no_spectral_gap,
    }
}

/// Numerical null space: right singular vectors whose singular values fall
/// below `rel_tol * sigma_max`. The full spectrum is exposed for gap
/// diagnostics, and a cut without a factor-10 spectral gap is flagged
/// (`no_spectral_gap`), not treated as an error.
pub fn numerical_kernel(
    t: &ToeplitzMatrix,
    rel_tol: f64,
) -> Result<KernelResult, ToeplitzError> {
    if !(1e-12..=1e-2).contains(&rel_tol) {
        return Err(ToeplitzError::ToleranceOutOfRange { tol: rel_tol });
    }
    let (sigmas, v) = svd_parts(t)?;
    let cutoff = rel_tol * sigmas[0];
    let dim = sigmas.iter().filter(|&&s| s < cutoff).count();
    Ok(kernel_from_cut(sigmas, v, dim, rel_tol))
}

/// Null-space detection for sections whose small singular values are not
/// tiny, only *separated*: scan the spectrum for the deepest consecutive
/// drop by a factor >= 10 that lands below `0.25 * sigma_max`, and take
/// everything below the drop as the kernel. Returns dimension 0 (and no
/// gap ratio) when no such drop exists.
///
/// This is the right notion for sections of operators whose kernel
/// functions have slowly decaying coefficients: the section "kernel"
/// singular values decay polynomially in the order instead of being zero,
/// but remain separated from the bulk by a stable multiplicative gap.
pub fn kernel_by_spectral_gap(t: &ToeplitzMatrix) -> Result<KernelResult, ToeplitzError> {
    let (sigmas, v) = svd_parts(t)?;
    let m = sigmas.len();
    let mut dim = 0;
    // Scan from the top so cascaded drops (multi-dimensional kernels whose
    // section singular values decay at different rates) are cut at the
    // outermost qualifying gap.
    for i in 0..m - 1 {
        let below = sigmas[i + 1].max(f64::MIN_POSITIVE);
        if sigmas[i] / below >= 10.0 && sigmas[i + 1] <= 0.25 * sigmas[0] {
            dim = m - 1 - i;
            break;
        }
    }
    Ok(kernel_from_cut(sigmas, v, dim, 0.0))
}

/// Principal angles (radians, ascending) between two subspaces of the same
/// coefficient space: `arccos` of the singular values of `A^H B`, clamped
/// to `[0, 1]`.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>, ToeplitzError> {
    if a.order() != b.order() {
        return Err(ToeplitzError::DimMismatch);
    }
    assert!(a.dim() >= 1 && b.dim() >= 1, "subspaces must be nonzero");
    deterministic_linalg();
    let m = a.basis().adjoint() * b.basis();
    let sigmas = m.singular_values().map_err(|_| ToeplitzError::SvdFailed)?;
    Ok(sigmas.iter().map(|s| s.clamp(0.0, 1.0).acos()).collect())
}

/// Least-squares solve `A x = rhs` for tall full-rank `A` via QR.
pub fn lstsq(a: &Mat<Complex64>, rhs: &Mat<Complex64>) -> Mat<Complex64> {
    deterministic_linalg();
    a.qr().solve_lstsq(rhs)
}

/// Hermitian positive-definite Cholesky factor `L` with `G = L L^H`.
pub fn cholesky_lower(g: &Mat<Complex64>) -> Option<Mat<Complex64>> {
    deterministic_linalg();
    g.llt(Side::Lower).ok().map(|f| f.L().to_owned())
}
