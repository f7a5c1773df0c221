//! Boundary grid, Fourier analysis/synthesis, analytic projection,
//! Herglotz transform, and outer functions from boundary moduli.
//!
//! Everything lives on a *half-offset* grid: the sample angles are
//! `theta_j = 2*pi*(j + 1/2)/n`, so the points `z = 1` and `z = -1` are
//! never sample nodes. All functions of interest here have their boundary
//! singularities at `z = 1` or `z = -1`, and the offset keeps every sampled
//! quantity finite without any special-casing.
//!
//! Fourier coefficients use the signed index range `-n/2 <= k < n/2`. With
//! the offset grid, the forward transform picks up a per-frequency twiddle
//! `exp(-i*k*pi/n)`; the twiddle is *not* `n`-periodic in `k`, so it is
//! always applied with the signed index.

use num_complex::Complex64;
use rustfft::num_complex::Complex as FftComplex;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

/// Errors from grid construction, transforms, and boundary pairings.
#[derive(Debug, Error)]
pub enum FftError {
    /// Grid length is not a power of two, or is below the supported minimum.
    #[error("grid size {n} invalid: must be a power of two and at least 64")]
    GridInvalid { n: usize },
    /// A transform that requires a real density received complex samples.
    #[error("density has imaginary part {max_imag:.3e}, exceeding tolerance")]
    NonRealDensity { max_imag: f64 },
    /// A modulus passed to the outer construction vanishes (or underflows)
    /// at a node, so its logarithm cannot be sampled.
    #[error("modulus is zero or subnormal at node {index}; log-modulus not integrable on the grid")]
    NonIntegrableLog { index: usize },
    /// Operands live on different grids or exceed the grid's bandwidth.
    #[error("operands have mismatched grids or truncation orders")]
    GridMismatch,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    // Complex64 and rustfft's complex type are both repr(C) {re, im} f64 pairs.
    let view: &mut [FftComplex<f64>] =
        unsafe { std::slice::from_raw_parts_mut(buf.as_mut_ptr().cast(), buf.len()) };
    plan.process(view);
}

fn fft_inverse(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    let view: &mut [FftComplex<f64>] =
        unsafe { std::slice::from_raw_parts_mut(buf.as_mut_ptr().cast(), buf.len()) };
    plan.process(view);
}

/// Half-offset sampling grid on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// Create a grid with `n` nodes; `n` must be a power of two, `n >= 64`.
    pub fn new(n: usize) -> Result<Self, FftError> {
        if n < 64 || !n.is_power_of_two() {
            return Err(FftError::GridInvalid { n });
        }
        Ok(Self { n })
    }

    /// Number of sample nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample angle `theta_j = 2*pi*(j + 1/2)/n`.
    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / self.n as f64
    }

    /// Sample node `exp(i*theta_j)`.
    pub fn node(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(j))
    }

    /// All sample nodes.
    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// Complex samples on a [`Grid`], with lazily computed Fourier coefficients.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    grid: Grid,
    values: Vec<Complex64>,
    coeffs: OnceLock<Arc<Vec<Complex64>>>,
}

impl BoundaryFunction {
    /// Wrap a full vector of samples. Panics if the length disagrees with the grid.
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.n(), "sample count must equal grid size");
        Self {
            grid,
            values,
            coeffs: OnceLock::new(),
        }
    }

    /// Sample a function of the boundary point `z = exp(i*theta_j)`.
    pub fn from_fn(grid: Grid, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Self::from_values(grid, values)
    }

    /// Sample a real function of the angle `theta_j`.
    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n())
            .map(|j| Complex64::new(f(grid.theta(j)), 0.0))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Fourier coefficients in FFT layout (`coeffs[k mod n]` holds index `k`,
    /// `-n/2 <= k < n/2`), computed on first use and cached.
    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let n = self.grid.n();
            let mut buf = self.values.clone();
            fft_forward(&mut buf);
            let scale = 1.0 / n as f64;
            for (idx, c) in buf.iter_mut().enumerate() {
                let k = signed_index(idx, n);
                let twiddle = Complex64::from_polar(1.0, -(k as f64) * PI / n as f64);
                *c *= twiddle * scale;
            }
            Arc::new(buf)
        })
    }

    /// Fourier coefficient with signed index `-n/2 <= k < n/2`.
    pub fn coeff(&self, k: isize) -> Complex64 {
        let n = self.grid.n() as isize;
        assert!(-n / 2 <= k && k < n / 2, "coefficient index out of range");
        self.coeffs()[k.rem_euclid(n) as usize]
    }

    /// Maximum absolute imaginary part over all samples.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Maximum modulus over all samples.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Mean of `self * conj(other)` over the nodes: the grid realization of
    /// the normalized boundary pairing `(1/2pi) * integral(f * conj(g))`.
    pub fn l2_inner(&self, other: &BoundaryFunction) -> Result<Complex64, FftError> {
        if self.grid != other.grid {
            return Err(FftError::GridMismatch);
        }
        let n = self.grid.n();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += self.values[j] * other.values[j].conj();
        }
        Ok(acc / n as f64)
    }

    /// Pointwise product with another sample vector on the same grid.
    pub fn pointwise_mul(&self, other: &BoundaryFunction) -> Result<BoundaryFunction, FftError> {
        if self.grid != other.grid {
            return Err(FftError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(BoundaryFunction::from_values(self.grid, values))
    }
}

fn signed_index(idx: usize, n: usize) -> isize {
    if idx < n / 2 {
        idx as isize
    } else {
        idx as isize - n as isize
    }
}

/// One-sided coefficient vector `coeffs[0..=m]` representing an element of
/// the Hardy space at truncation order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    coeffs: Vec<Complex64>,
}

impl AnalyticFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "coefficient vector must be nonempty");
        Self { coeffs }
    }

    /// The zero function at truncation order `m`.
    pub fn zeros(m: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); m + 1])
    }

    /// Constant function.
    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero past the truncation order).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Truncation order (highest stored degree).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn origin_value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Horner evaluation at a point of the closed disk.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficient two-norm (equals the boundary L2 norm up to truncation).
    pub fn h2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Keep degrees `0..=m`.
    pub fn truncate(&self, m: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(m + 1);
        coeffs.resize(m + 1, Complex64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(k) + other.coeff(k);
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Multiplication by `z` (forward shift).
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Backward shift `(h - h(0)) / z`.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(0);
        }
        Self::new(self.coeffs[1..].to_vec())
    }

    /// Full coefficient convolution (polynomial product).
    pub fn convolve(&self, other: &Self) -> Self {
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Boundary samples on `grid`. The truncation order must fit strictly
    /// under the Nyquist frequency so no degree aliases.
    pub fn synthesize(&self, grid: Grid) -> Result<BoundaryFunction, FftError> {
        let n = grid.n();
        if self.coeffs.len() > n / 2 {
            return Err(FftError::GridMismatch);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let twiddle = Complex64::from_polar(1.0, k as f64 * PI / n as f64);
            buf[k] = c * twiddle;
        }
        fft_inverse(&mut buf);
        Ok(BoundaryFunction::from_values(grid, buf))
    }
}

/// Synthesize a full two-sided coefficient vector (FFT layout, signed
/// indices `-n/2 <= k < n/2`) back to samples.
pub fn synthesize_two_sided(grid: Grid, coeffs: &[Complex64]) -> BoundaryFunction {
    let n = grid.n();
    assert_eq!(coeffs.len(), n, "two-sided coefficient vector must have length n");
    let mut buf = coeffs.to_vec();
    for (idx, c) in buf.iter_mut().enumerate() {
        let k = signed_index(idx, n);
        let twiddle = Complex64::from_polar(1.0, k as f64 * PI / n as f64);
        *c *= twiddle;
    }
    fft_inverse(&mut buf);
    BoundaryFunction::from_values(grid, buf)
}

/// Analytic (Riesz) projection: keep Fourier coefficients `0 <= k < n/2`.
///
/// Idempotent, and self-adjoint with respect to the grid L2 pairing.
pub fn project_plus(f: &BoundaryFunction) -> AnalyticFunction {
    let n = f.grid().n();
    let coeffs = f.coeffs()[..n / 2].to_vec();
    AnalyticFunction::new(coeffs)
}

/// Herglotz transform of a real density: `H(z) = c0 + 2 * sum_{k>=1} c_k z^k`
/// where `c_k` are the Fourier coefficients of `w`. The real part of `H` is
/// the Poisson extension of `w`.
pub fn herglotz(w: &BoundaryFunction) -> Result<AnalyticFunction, FftError> {
    let max_imag = w.max_imag();
    if max_imag > 1e-10 * w.max_abs().max(1.0) {
        return Err(FftError::NonRealDensity { max_imag });
    }
    let n = w.grid().n();
    let c = w.coeffs();
    let mut h = Vec::with_capacity(n / 2);
    h.push(Complex64::new(c[0].re, 0.0));
    for k in 1..n / 2 {
        h.push(2.0 * c[k]);
    }
    Ok(AnalyticFunction::new(h))
}

/// Boundary samples of the outer function with modulus `w`, normalized
/// positive at the origin.
///
/// Built as `exp(H/2)` where `H` is the Herglotz transform of `log(w^2)`.
/// The construction keeps the grid's Nyquist component of `log w`, so the
/// *sampled* modulus matches `w` to machine precision at every node even
/// when `log w` has boundary singularities; the returned samples are what
/// the pair machinery consumes.
pub fn outer_boundary_from_modulus(w: &BoundaryFunction) -> Result<BoundaryFunction, FftError> {
    let n = w.grid().n();
    let max_imag = w.max_imag();
    if max_imag > 1e-10 * w.max_abs().max(1.0) {
        return Err(FftError::NonRealDensity { max_imag });
    }
    for (index, v) in w.values().iter().enumerate() {
        if !(v.re > f64::MIN_POSITIVE) {
            return Err(FftError::NonIntegrableLog { index });
        }
    }
    let logw = BoundaryFunction::from_values(
        w.grid(),
        w.values()
            .iter()
            .map(|v| Complex64::new(v.re.ln(), 0.0))
            .collect(),
    );
    let c = logw.coeffs();
    // Analytic completion of log w: constant + doubled positive frequencies.
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    h[0] = Complex64::new(c[0].re, 0.0);
    for k in 1..n / 2 {
        h[k] = 2.0 * c[k];
    }
    let base = synthesize_two_sided(w.grid(), &h);
    // The real bin at index -n/2 of log w is invisible to the one-sided sum
    // above. Adding conj(c[-n/2]) at frequency +n/2 restores it; on the
    // offset grid exp(i*(n/2)*theta_j) = i*(-1)^j.
    let nyq = c[n / 2].conj();
    let values = base
        .values()
        .iter()
        .enumerate()
        .map(|(j, &hval)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let corr = nyq * Complex64::new(0.0, sign);
            (hval + corr).exp()
        })
        .collect();
    Ok(BoundaryFunction::from_values(w.grid(), values))
}

/// Coefficients of the outer function with boundary modulus `w`,
/// normalized positive at the origin.
pub fn outer_from_modulus(w: &BoundaryFunction) -> Result<AnalyticFunction, FftError> {
    let boundary = outer_boundary_from_modulus(w)?;
    Ok(project_plus(&boundary))
}

/// Hardy-space inner product `sum f_k * conj(g_k)` of coefficient vectors.
pub fn h2_inner(f: &AnalyticFunction, g: &AnalyticFunction) -> Complex64 {
    let len = f.coeffs().len().min(g.coeffs().len());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..len {
        acc += f.coeffs()[k] * g.coeffs()[k].conj();
    }
    acc
}

/// Weighted boundary pairing `(1/2pi) * integral(f * conj(g) * w)` by grid
/// quadrature, synthesizing both analytic arguments on the weight's grid.
pub fn weighted_inner(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    w: &BoundaryFunction,
) -> Result<Complex64, FftError> {
    let fb = f.synthesize(w.grid())?;
    let gb = g.synthesize(w.grid())?;
    weighted_inner_samples(fb.values(), gb.values(), w)
}

/// Weighted pairing of raw sample vectors on the weight's grid.
pub fn weighted_inner_samples(
    x: &[Complex64],
    y: &[Complex64],
    w: &BoundaryFunction,
) -> Result<Complex64, FftError> {
    let n = w.grid().n();
    if x.len() != n || y.len() != n {
        return Err(FftError::GridMismatch);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += x[j] * y[j].conj() * w.values()[j];
    }
    Ok(acc / n as f64)
}
