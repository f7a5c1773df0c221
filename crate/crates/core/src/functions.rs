//! Structured inner and outer functions: monomials, finite Blaschke
//! products, fractional powers of `1 - z`, Cauchy kernels, model-space
//! bases, and real boundary quotients of inner functions.

use crate::circle_fft::{AnalyticFunction, BoundaryFunction, Grid};
use crate::toeplitz::Subspace;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from inner/outer function construction.
#[derive(Debug, Error)]
pub enum FunctionsError {
    /// A requested Blaschke zero is on or outside the unit circle.
    #[error("Blaschke zero with modulus {modulus} is not strictly inside the disk")]
    ZeroOnBoundary { modulus: f64 },
    /// Model-space bases from repeated nonzero zeros need derivative
    /// kernels, which are not supported.
    #[error("repeated zeros are not supported for model-space bases")]
    RepeatedZeros,
    /// The denominator of a boundary quotient nearly vanishes at a node.
    #[error("inner-function difference has modulus {min_abs:.3e} at a node; quotient would blow up")]
    DivisionBlowup { min_abs: f64 },
}

/// Inner function: unimodular on the boundary, contractive in the disk.
#[derive(Debug, Clone)]
pub enum InnerFn {
    /// A unimodular constant.
    Constant(Complex64),
    /// `z^n`.
    Monomial(usize),
    /// Finite Blaschke product with the given zeros; each nonzero factor is
    /// normalized as `(|r|/r) * (r - z)/(1 - conj(r) z)`, so products with
    /// real negative zeros have real coefficients and positive value at 0.
    Blaschke { zeros: Vec<Complex64> },
    /// Pointwise product of inner functions.
    Product(Vec<InnerFn>),
}

/// A unimodular constant as a (degree-zero) inner function.
pub fn unimodular_constant(c: Complex64) -> Result<InnerFn, FunctionsError> {
    if (c.norm() - 1.0).abs() > 1e-12 {
        return Err(FunctionsError::ZeroOnBoundary { modulus: c.norm() });
    }
    Ok(InnerFn::Constant(c))
}

/// Build a finite Blaschke product; every zero must be strictly inside the
/// unit disk.
pub fn blaschke(zeros: Vec<Complex64>) -> Result<InnerFn, FunctionsError> {
    for z in &zeros {
        if z.norm() >= 1.0 - 1e-12 {
            return Err(FunctionsError::ZeroOnBoundary { modulus: z.norm() });
        }
    }
    Ok(InnerFn::Blaschke { zeros })
}

/// The zero sequence `-(1 - 2^{-k})`, `k = 1..=count`: real zeros marching
/// toward `-1` at a dyadic rate (Blaschke-summable for every finite count).
pub fn dyadic_blaschke_zeros(count: usize) -> Vec<Complex64> {
    (1..=count)
        .map(|k| Complex64::new(-(1.0 - 0.5f64.powi(k as i32)), 0.0))
        .collect()
}

fn blaschke_factor(r: Complex64, z: Complex64) -> Complex64 {
    if r.norm() == 0.0 {
        return z;
    }
    (r.norm() / r) * (r - z) / (Complex64::new(1.0, 0.0) - r.conj() * z)
}

impl InnerFn {
    /// Evaluate at a point of the closed unit disk.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        match self {
            InnerFn::Constant(c) => *c,
            InnerFn::Monomial(n) => z.powu(*n as u32),
            InnerFn::Blaschke { zeros } => zeros
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &r| acc * blaschke_factor(r, z)),
            InnerFn::Product(parts) => parts
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, p| acc * p.evaluate(z)),
        }
    }

    /// Boundary samples on a grid.
    pub fn boundary(&self, grid: Grid) -> BoundaryFunction {
        BoundaryFunction::from_fn(grid, |z| self.evaluate(z))
    }

    /// All zeros with multiplicity (the monomial `z^n` contributes `n`
    /// zeros at the origin).
    pub fn zeros(&self) -> Vec<Complex64> {
        match self {
            InnerFn::Constant(_) => vec![],
            InnerFn::Monomial(n) => vec![Complex64::new(0.0, 0.0); *n],
            InnerFn::Blaschke { zeros } => zeros.clone(),
            InnerFn::Product(parts) => parts.iter().flat_map(|p| p.zeros()).collect(),
        }
    }

    /// Degree (number of zeros) of the finite product.
    pub fn degree(&self) -> usize {
        self.zeros().len()
    }

    /// Product with another inner function.
    pub fn times(self, other: InnerFn) -> InnerFn {
        InnerFn::Product(vec![self, other])
    }
}

/// Cauchy kernel at `lambda`: coefficients `conj(lambda)^k`, `k = 0..=m`.
/// Pairing an analytic function against it evaluates the function at
/// `lambda`, up to the truncation tail `|lambda|^{m+1}`.
pub fn cauchy_kernel(lambda: Complex64, m: usize) -> AnalyticFunction {
    assert!(lambda.norm() < 1.0, "kernel point must be inside the disk");
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=m {
        coeffs.push(p);
        p *= lambda.conj();
    }
    AnalyticFunction::new(coeffs)
}

/// Orthonormal basis of the model space `H^2 (-) I*H^2` at coefficient
/// order `m`.
///
/// A pure monomial `z^n` gets the structural basis `{1, z, .., z^{n-1}}`;
/// otherwise the zeros of `I` must be pairwise distinct and the basis is an
/// orthonormalization of the Cauchy kernels at the zeros.
pub fn model_space_basis(inner: &InnerFn, m: usize) -> Result<Subspace, FunctionsError> {
    let zeros = inner.zeros();
    assert!(!zeros.is_empty(), "inner function must have at least one zero");
    let all_at_origin = zeros.iter().all(|z| z.norm() == 0.0);
    if all_at_origin {
        let cols: Vec<Vec<Complex64>> = (0..zeros.len())
            .map(|k| {
                let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        return Ok(Subspace::from_spanning_columns(&cols, 0.0));
    }
    for (i, zi) in zeros.iter().enumerate() {
        for zj in zeros.iter().skip(i + 1) {
            if (zi - zj).norm() < 1e-14 {
                return Err(FunctionsError::RepeatedZeros);
            }
        }
    }
    let cols: Vec<Vec<Complex64>> = zeros
        .iter()
        .map(|&z| cauchy_kernel(z, m).coeffs().to_vec())
        .collect();
    Ok(Subspace::from_spanning_columns(&cols, 0.0))
}

/// Boundary samples of `i*(I1 + I2)/(I1 - I2)`: real almost everywhere on
/// the circle when `I1`, `I2` are inner. The outerness of `I1 - I2` is the
/// caller's responsibility (see [`winding_number`] for a diagnostic).
pub fn helson_quotient(
    i1: &InnerFn,
    i2: &InnerFn,
    grid: Grid,
) -> Result<BoundaryFunction, FunctionsError> {
    let mut min_abs = f64::INFINITY;
    let mut values = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let z = grid.node(j);
        let v1 = i1.evaluate(z);
        let v2 = i2.evaluate(z);
        let den = v1 - v2;
        min_abs = min_abs.min(den.norm());
        values.push(Complex64::new(0.0, 1.0) * (v1 + v2) / den);
    }
    if min_abs < 1e-12 {
        return Err(FunctionsError::DivisionBlowup { min_abs });
    }
    Ok(BoundaryFunction::from_values(grid, values))
}

/// Outer function descriptors with exact disk/boundary evaluation.
#[derive(Debug, Clone)]
pub enum OuterFn {
    /// `(1 - z)^alpha`, principal branch (positive on `(-1, 1)`).
    Power { alpha: f64 },
    /// Ratio of two polynomials, both zero-free in the open disk.
    Rational {
        num: AnalyticFunction,
        den: AnalyticFunction,
    },
    /// Constructed from a boundary modulus; carries its coefficient
    /// expansion.
    FromModulus { coeffs: AnalyticFunction },
}

/// The outer function `(1 - z)^alpha`.
pub fn power_outer(alpha: f64) -> OuterFn {
    OuterFn::Power { alpha }
}

impl OuterFn {
    /// Evaluate at a point of the disk (or its boundary for the structured
    /// kinds).
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        match self {
            OuterFn::Power { alpha } => {
                // 1 - z has positive real part on the open disk; the
                // principal logarithm is smooth there. On the boundary this
                // continues to the slit-plane principal branch.
                ((Complex64::new(1.0, 0.0) - z).ln() * *alpha).exp()
            }
            OuterFn::Rational { num, den } => num.evaluate(z) / den.evaluate(z),
            OuterFn::FromModulus { coeffs } => coeffs.evaluate(z),
        }
    }

    /// Boundary samples on a grid. For the power kind the samples follow
    /// the closed form `1 - e^{i theta} = 2 sin(theta/2) e^{i(theta-pi)/2}`
    /// on `theta in (0, 2pi)`, which is exactly the principal branch.
    pub fn boundary(&self, grid: Grid) -> BoundaryFunction {
        match self {
            OuterFn::Power { alpha } => BoundaryFunction::from_values(
                grid,
                (0..grid.n())
                    .map(|j| {
                        let theta = grid.theta(j);
                        let log_mod = (2.0 * (theta / 2.0).sin()).ln();
                        let arg = (theta - PI) / 2.0;
                        Complex64::from_polar((alpha * log_mod).exp(), alpha * arg)
                    })
                    .collect(),
            ),
            _ => BoundaryFunction::from_fn(grid, |z| self.evaluate(z)),
        }
    }

    /// Taylor coefficients through degree `m`. For the power kind these are
    /// the generalized binomial coefficients of `(1 - z)^alpha`.
    pub fn coeffs(&self, m: usize) -> AnalyticFunction {
        match self {
            OuterFn::Power { alpha } => {
                let mut c = Vec::with_capacity(m + 1);
                c.push(Complex64::new(1.0, 0.0));
                for k in 1..=m {
                    let prev = c[k - 1];
                    c.push(prev * (k as f64 - 1.0 - alpha) / k as f64);
                }
                AnalyticFunction::new(c)
            }
            OuterFn::FromModulus { coeffs } => coeffs.truncate(m),
            OuterFn::Rational { .. } => {
                // Expand by sampling on a generous grid and projecting.
                let grid = Grid::new(4096).expect("static grid size");
                crate::circle_fft::project_plus(&self.boundary(grid)).truncate(m)
            }
        }
    }
}

/// Winding number of a function around 0 along the circle `|z| = r`,
/// sampled at `samples` points: the argument-principle zero count for
/// analytic functions. Outer functions must give 0 on every interior
/// circle.
pub fn winding_number(f: impl Fn(Complex64) -> Complex64, r: f64, samples: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = f(Complex64::from_polar(r, 0.0));
    for j in 1..=samples {
        let theta = 2.0 * PI * j as f64 / samples as f64;
        let cur = f(Complex64::from_polar(r, theta));
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}
