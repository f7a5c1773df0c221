//! Shared constructions used by several scenarios: the reference pair on
//! the circle, its dyadic-Blaschke deformations, the Möbius control pair,
//! and small boundary-sample utilities.

use crate::LabError;
use hardy_core::circle_fft::project_plus;
use hardy_core::functions::{blaschke, dyadic_blaschke_zeros};
use hardy_core::pairs_dbr::Pair;
use hardy_core::{AnalyticFunction, BoundaryFunction, Grid, InnerFn};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Boundary samples of `b0 = z (1 - z) / 2`.
pub fn b0_boundary(grid: Grid) -> BoundaryFunction {
    BoundaryFunction::from_fn(grid, |z| z * (c(1.0, 0.0) - z) * 0.5)
}

/// Boundary samples of `a = (1 + z) / 2`.
pub fn a_boundary(grid: Grid) -> BoundaryFunction {
    BoundaryFunction::from_fn(grid, |z| (c(1.0, 0.0) + z) * 0.5)
}

/// The reference pair `(b, a) = (z (1 - z) / 2, (1 + z) / 2)` on an
/// `n`-point grid. `|a|^2 + |b|^2 = 1` holds exactly on the circle, and
/// the pair is special: `f = a / (1 - b) = (1 + z) / (2 - z + z^2)`.
pub fn base_pair(n: usize) -> Result<Pair, LabError> {
    let grid = Grid::new(n)?;
    Ok(Pair::from_boundary(b0_boundary(grid), a_boundary(grid), true)?)
}

/// Möbius control pair `(b, a) = (z / 2, sqrt(3) / 2)`: `b` has modulus
/// bounded away from 1, so multiples of `a` fill the whole space and the
/// complement construction must come back empty.
pub fn control_pair(n: usize) -> Result<Pair, LabError> {
    let grid = Grid::new(n)?;
    let b = BoundaryFunction::from_fn(grid, |z| z * 0.5);
    let a = BoundaryFunction::from_fn(grid, |_| c(0.75f64.sqrt(), 0.0));
    Ok(Pair::from_boundary(b, a, true)?)
}

/// Grid size needed for the dyadic family at a given depth. Near `-1` the
/// function `1 - I b0` dips to `~2^{-2m}` over an arc of width `~2^{-3m}`
/// (the phase of `I` winds at rate `2^m` across the `2^{-m}`-wide boundary
/// layer where `|b0|` is within `2^{-2m}` of 1), so the peak of `g` needs
/// `n >> 2^{3m}` samples.
pub fn grid_for_depth(m_blaschke: usize, base_n: usize) -> usize {
    let floor = match m_blaschke {
        0..=2 => 4096,
        _ => 1 << 19,
    };
    base_n.max(floor)
}

/// Largest supported depth of the dyadic family. The `2^{3m}` resolution
/// law puts depth 5 near `n = 2^25`, beyond the largest allowed grid, so
/// deeper requests are rejected rather than run under-resolved.
pub const MAX_BLASCHKE_DEPTH: usize = 4;

/// The deformed pair built from the reference pair and a dyadic Blaschke
/// product: `b = I * b0` with `I = z * B_m`, `B_m` vanishing at
/// `-(1 - 2^{-k})`, `k = 1..=m`.
pub struct DyadicInstance {
    pub m_blaschke: usize,
    /// Zeros of the Blaschke factor `B_m` (empty at depth 0).
    pub zeros: Vec<Complex64>,
    /// `I = z * B_m`.
    pub inner: InnerFn,
    pub pair: Pair,
    pub i_bnd: BoundaryFunction,
    pub b0_bnd: BoundaryFunction,
    /// Boundary samples of `g = f * k_{-1} * (I + 1)`; the Szego kernel
    /// pole at `-1` cancels against the zero of `a`, leaving the regular
    /// closed form `g = (1 + I) / (2 (1 - I b0))`.
    pub g_bnd: BoundaryFunction,
}

pub fn dyadic_instance(m_blaschke: usize, n: usize) -> Result<DyadicInstance, LabError> {
    if m_blaschke > MAX_BLASCHKE_DEPTH {
        return Err(LabError::Config(format!(
            "blaschke depth {m_blaschke} exceeds the supported maximum {MAX_BLASCHKE_DEPTH}"
        )));
    }
    let grid = Grid::new(n)?;
    let zeros = dyadic_blaschke_zeros(m_blaschke);
    let inner = InnerFn::Monomial(1).times(blaschke(zeros.clone())?);
    let i_bnd = inner.boundary(grid);
    let b0_bnd = b0_boundary(grid);
    let b_bnd = i_bnd.pointwise_mul(&b0_bnd)?;
    let pair = Pair::from_boundary(b_bnd, a_boundary(grid), true)?;
    let g_values: Vec<Complex64> = (0..grid.n())
        .map(|j| {
            let i = i_bnd.values()[j];
            let b0 = b0_bnd.values()[j];
            0.5 * (c(1.0, 0.0) + i) / (c(1.0, 0.0) - i * b0)
        })
        .collect();
    let g_bnd = BoundaryFunction::from_values(grid, g_values);
    Ok(DyadicInstance {
        m_blaschke,
        zeros,
        inner,
        pair,
        i_bnd,
        b0_bnd,
        g_bnd,
    })
}

impl DyadicInstance {
    pub fn grid(&self) -> Grid {
        self.pair.grid()
    }

    /// Boundary samples of the kernel symbol `conj(I) conj(f) / f`.
    pub fn kernel_symbol(&self) -> BoundaryFunction {
        let f = self.pair.f_boundary();
        let values: Vec<Complex64> = (0..self.grid().n())
            .map(|j| {
                let fj = f.values()[j];
                self.i_bnd.values()[j].conj() * fj.conj() / fj
            })
            .collect();
        BoundaryFunction::from_values(self.grid(), values)
    }
}

/// Grid quadrature inner product `(1/n) sum u_j conj(v_j)` on raw sample
/// vectors (conjugate-linear in the second slot).
pub fn sample_inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let n = u.len();
    assert_eq!(n, v.len(), "sample vectors must share a grid");
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n as f64
}

/// Quadrature L2 norm of boundary samples.
pub fn sample_norm(u: &[Complex64]) -> f64 {
    sample_inner(u, u).re.max(0.0).sqrt()
}

/// Apply the analytic-symbol compression to boundary samples: `P+ (s * h)`
/// as a coefficient function.
pub fn toeplitz_apply_samples(
    symbol: &BoundaryFunction,
    h: &BoundaryFunction,
) -> AnalyticFunction {
    let product = symbol.pointwise_mul(h).expect("operands share a grid");
    project_plus(&product)
}

/// Szego kernel samples `1 / (1 - conj(lambda) z_j)`.
pub fn szego_samples(grid: Grid, lambda: Complex64) -> Vec<Complex64> {
    (0..grid.n())
        .map(|j| (c(1.0, 0.0) - lambda.conj() * grid.node(j)).finv())
        .collect()
}

/// Szego kernel value `k_r(lambda) = 1 / (1 - conj(r) lambda)`.
pub fn szego_eval(r: Complex64, lambda: Complex64) -> Complex64 {
    (c(1.0, 0.0) - r.conj() * lambda).finv()
}

/// `b0(z) = z (1 - z) / 2` at a point.
pub fn b0_eval(z: Complex64) -> Complex64 {
    z * (c(1.0, 0.0) - z) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_pair_matches_closed_form_f() {
        let p = base_pair(512).unwrap();
        let grid = p.grid();
        for j in [0usize, 100, 300] {
            let z = grid.node(j);
            let expected = (c(1.0, 0.0) + z) / (c(2.0, 0.0) - z + z * z);
            assert!((p.f_boundary().values()[j] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn dyadic_instance_depth_zero_has_plain_shift() {
        let inst = dyadic_instance(0, 512).unwrap();
        assert_eq!(inst.inner.degree(), 1);
        assert!(inst.zeros.is_empty());
        // g reduces to f itself: (1 + z) / (2 (1 - z b0)) = f.
        for j in [3usize, 77] {
            let g = inst.g_bnd.values()[j];
            let f = inst.pair.f_boundary().values()[j];
            assert!((g - f).norm() < 1e-12);
        }
    }

    #[test]
    fn dyadic_instance_rejects_excessive_depth() {
        assert!(dyadic_instance(7, 512).is_err());
    }

    #[test]
    fn quadrature_inner_matches_orthonormality() {
        let grid = Grid::new(256).unwrap();
        let u: Vec<Complex64> = (0..256).map(|j| grid.node(j)).collect();
        let v: Vec<Complex64> = (0..256).map(|j| grid.node(j).powu(2)).collect();
        assert!((sample_inner(&u, &u).re - 1.0).abs() < 1e-12);
        assert!(sample_inner(&u, &v).norm() < 1e-12);
    }

    #[test]
    fn depth_table_is_monotone() {
        assert_eq!(grid_for_depth(1, 4096), 4096);
        assert_eq!(grid_for_depth(2, 8192), 8192);
        assert_eq!(grid_for_depth(3, 4096), 1 << 19);
        assert_eq!(grid_for_depth(4, 4096), 1 << 19);
    }
}
