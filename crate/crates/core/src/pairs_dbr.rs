//! Pairs `(b, a)` with `|a|^2 + |b|^2 = 1` on the boundary and the
//! associated de Branges–Rovnyak space `H(b)` for nonextreme `b`.
//!
//! Central objects and facts used throughout:
//!
//! * `f = a / (1 - b)` and the weight `w = |f|^2` on the boundary. When the
//!   measure with density `w` is the full spectral measure (the pair is
//!   *special*), the map `V: q -> (1 - b) P_+(w q)` is a unitary from the
//!   weighted polynomial closure onto `H(b)`, and `W: h -> T_{1-b} T_{conj f} h`
//!   is an isometry of the Hardy space onto `H(b)` with `V q = W(f q)`.
//! * The `H(b)` inner product has two independent realizations: pull back
//!   through `V` and integrate against `w` (backend A), or use
//!   `<x, y>_b = <x, y>_2 + <x+, y+>_2` where `T_{conj a} x+ = T_{conj b} x`
//!   (backend B). Backend B is exact for polynomial data because `x+` of a
//!   polynomial is a polynomial of the same degree.

use crate::circle_fft::{
    h2_inner, project_plus, weighted_inner_samples, AnalyticFunction, BoundaryFunction, FftError,
    Grid,
};
use crate::deterministic_linalg;
use crate::functions::winding_number;
use crate::toeplitz::{cholesky_lower, ToeplitzError};
use faer::linalg::solvers::SolveLstsq;
use faer::linalg::triangular_solve::{
    solve_lower_triangular_in_place, solve_upper_triangular_in_place,
};
use faer::{Mat, Par};
use num_complex::Complex64;
use thiserror::Error;

/// Errors from pair construction and `H(b)` computations.
#[derive(Debug, Error)]
pub enum PairError {
    /// `|a|^2 + |b|^2` deviates from 1 beyond tolerance at some node.
    #[error("pair identity violated: max |a|^2+|b|^2-1 = {max_err:.3e}")]
    IdentityViolated { max_err: f64 },
    /// `b` is not strictly contractive on the grid.
    #[error("|b| reaches {max_abs} on the grid; need sup |b| < 1")]
    NotContractive { max_abs: f64 },
    /// `b` is constant, which the pair machinery excludes.
    #[error("b is constant")]
    ConstantB,
    /// The generating function is not unit-normalized.
    #[error("generator has norm {norm}; expected 1 within 1e-6")]
    NotUnitNorm { norm: f64 },
    /// The winding diagnostic found a zero of the generator inside the disk.
    #[error("outer diagnostic failed: winding number {winding} on an interior circle")]
    OuterDiagnosticFailed { winding: i64 },
    /// `1 - conj(lambda) b` nearly vanishes at a node.
    #[error("denominator reaches modulus {min_abs:.3e} on the grid")]
    DenominatorVanishing { min_abs: f64 },
    /// The boundary point fails the angular-derivative test, so the
    /// boundary kernel does not exist in the space.
    #[error("no angular derivative at the requested boundary point")]
    NoAngularDerivative,
    /// Operation requires a special pair (absolutely continuous measure).
    #[error("operation requires a special pair")]
    NotSpecialPair,
    /// Least-squares representer residual exceeds the membership threshold.
    #[error("representer residual {residual:.3e} exceeds 1e-5 of the target norm; not in range")]
    NotInRange { residual: f64 },
    /// Complement dimension changed between cutoff `d` and `2d`.
    #[error("complement dimension unstable: {dim_d} at cutoff d, {dim_2d} at 2d")]
    ComplementUnstable { dim_d: usize, dim_2d: usize },
    /// The normalizing value at the origin vanishes.
    #[error("function value at the origin is zero")]
    OriginZero,
    /// A dense factorization failed (not expected at desk scale).
    #[error("linear solve failed")]
    SolveFailed,
    #[error(transparent)]
    Fft(#[from] FftError),
    #[error(transparent)]
    Toeplitz(#[from] ToeplitzError),
}

/// A nonextreme pair `(b, a)`: boundary data, analytic expansions, the
/// derived `f = a/(1-b)`, and the boundary weight `w = |f|^2`.
#[derive(Debug, Clone)]
pub struct Pair {
    grid: Grid,
    b_bnd: BoundaryFunction,
    a_bnd: BoundaryFunction,
    f_bnd: BoundaryFunction,
    w_bnd: BoundaryFunction,
    b: AnalyticFunction,
    a: AnalyticFunction,
    f: AnalyticFunction,
    special: bool,
    herglotz_constant: f64,
}

impl Pair {
    /// Assemble a pair from boundary samples of `b` and `a`, verifying the
    /// defining identity `|a|^2 + |b|^2 = 1` at every node. `special` is a
    /// caller assertion that the underlying measure is absolutely
    /// continuous; it is never detected numerically.
    pub fn from_boundary(
        b_bnd: BoundaryFunction,
        a_bnd: BoundaryFunction,
        special: bool,
    ) -> Result<Self, PairError> {
        let grid = b_bnd.grid();
        if grid != a_bnd.grid() {
            return Err(PairError::Fft(FftError::GridMismatch));
        }
        let mut max_err: f64 = 0.0;
        let mut max_b: f64 = 0.0;
        for j in 0..grid.n() {
            let s = b_bnd.values()[j].norm_sqr() + a_bnd.values()[j].norm_sqr();
            max_err = max_err.max((s - 1.0).abs());
            max_b = max_b.max(b_bnd.values()[j].norm());
        }
        if max_err >= 1e-8 {
            return Err(PairError::IdentityViolated { max_err });
        }
        if max_b >= 1.0 {
            return Err(PairError::NotContractive { max_abs: max_b });
        }
        let spread = b_bnd
            .values()
            .iter()
            .map(|v| (v - b_bnd.values()[0]).norm())
            .fold(0.0, f64::max);
        if spread < 1e-14 {
            return Err(PairError::ConstantB);
        }
        let one = Complex64::new(1.0, 0.0);
        let f_vals: Vec<Complex64> = (0..grid.n())
            .map(|j| a_bnd.values()[j] / (one - b_bnd.values()[j]))
            .collect();
        let f_bnd = BoundaryFunction::from_values(grid, f_vals.clone());
        let w_bnd = BoundaryFunction::from_values(
            grid,
            f_vals.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
        );
        let b = project_plus(&b_bnd);
        let a = project_plus(&a_bnd);
        let f = project_plus(&f_bnd);
        // Imaginary part at the origin of the Herglotz integral (1+b)/(1-b).
        let b0 = b.origin_value();
        let herglotz_constant = ((one + b0) / (one - b0)).im;
        Ok(Self {
            grid,
            b_bnd,
            a_bnd,
            f_bnd,
            w_bnd,
            b,
            a,
            f,
            special,
            herglotz_constant,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn b_boundary(&self) -> &BoundaryFunction {
        &self.b_bnd
    }
    pub fn a_boundary(&self) -> &BoundaryFunction {
        &self.a_bnd
    }
    pub fn f_boundary(&self) -> &BoundaryFunction {
        &self.f_bnd
    }
    /// Boundary weight `w = |f|^2`.
    pub fn weight(&self) -> &BoundaryFunction {
        &self.w_bnd
    }
    pub fn b(&self) -> &AnalyticFunction {
        &self.b
    }
    pub fn a(&self) -> &AnalyticFunction {
        &self.a
    }
    /// `f = a / (1 - b)`.
    pub fn f(&self) -> &AnalyticFunction {
        &self.f
    }
    pub fn special(&self) -> bool {
        self.special
    }
    /// Imaginary part at the origin of the associated Herglotz integral.
    pub fn herglotz_constant(&self) -> f64 {
        self.herglotz_constant
    }

    /// `F_lambda = a / (1 - conj(lambda) b)` for unimodular `lambda`:
    /// boundary samples and coefficient expansion.
    pub fn f_lambda(
        &self,
        lambda: Complex64,
    ) -> Result<(BoundaryFunction, AnalyticFunction), PairError> {
        assert!((lambda.norm() - 1.0).abs() < 1e-12, "lambda must be unimodular");
        let one = Complex64::new(1.0, 0.0);
        let mut min_abs = f64::INFINITY;
        let vals: Vec<Complex64> = (0..self.grid.n())
            .map(|j| {
                let den = one - lambda.conj() * self.b_bnd.values()[j];
                min_abs = min_abs.min(den.norm());
                self.a_bnd.values()[j] / den
            })
            .collect();
        if min_abs < 1e-10 {
            return Err(PairError::DenominatorVanishing { min_abs });
        }
        let bnd = BoundaryFunction::from_values(self.grid, vals);
        let an = project_plus(&bnd);
        Ok((bnd, an))
    }
}

/// Construct the pair associated with a unit-norm outer generator:
/// `b = (H - 1)/(H + 1)` with `H` the Herglotz transform of `|f|^2`, and
/// `a` the outer function with `|a|^2 = 1 - |b|^2`. Pairs built this way
/// are special by construction.
pub fn pair_from_outer(f: &AnalyticFunction, grid: Grid) -> Result<Pair, PairError> {
    let norm = f.h2_norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(PairError::NotUnitNorm { norm });
    }
    for r in [0.5, 0.9, 0.99] {
        let winding = winding_number(|z| f.evaluate(z), r, 4096);
        if winding != 0 {
            return Err(PairError::OuterDiagnosticFailed { winding });
        }
    }
    let f_bnd = f.synthesize(grid)?;
    let w = BoundaryFunction::from_values(
        grid,
        f_bnd
            .values()
            .iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect(),
    );
    let h = crate::circle_fft::herglotz(&w)?;
    let h_bnd = h.synthesize(grid)?;
    let one = Complex64::new(1.0, 0.0);
    let b_vals: Vec<Complex64> = h_bnd
        .values()
        .iter()
        .map(|&hv| (hv - one) / (hv + one))
        .collect();
    // 1 - |b|^2 = 4 Re H / |H + 1|^2 exactly; using this form avoids
    // cancellation where |b| approaches 1.
    let a_mod = BoundaryFunction::from_values(
        grid,
        h_bnd
            .values()
            .iter()
            .zip(w.values())
            .map(|(&hv, &wv)| Complex64::new((4.0 * wv.re / (hv + one).norm_sqr()).sqrt(), 0.0))
            .collect(),
    );
    let a_bnd = crate::circle_fft::outer_boundary_from_modulus(&a_mod)?;
    Pair::from_boundary(BoundaryFunction::from_values(grid, b_vals), a_bnd, true)
}

/// Reproducing kernel of `H(b)` at an interior point `w`:
/// `(1 - conj(b(w)) b(z)) / (1 - conj(w) z)`, as a coefficient expansion.
pub fn dbr_kernel(p: &Pair, w: Complex64) -> AnalyticFunction {
    assert!(w.norm() < 1.0, "kernel point must be inside the disk");
    let bw = p.b().evaluate(w);
    let one = Complex64::new(1.0, 0.0);
    let bnd = BoundaryFunction::from_values(
        p.grid(),
        (0..p.grid().n())
            .map(|j| {
                let z = p.grid().node(j);
                (one - bw.conj() * p.b_boundary().values()[j]) / (one - w.conj() * z)
            })
            .collect(),
    );
    project_plus(&bnd)
}

/// Verdict of the angular-derivative test at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularDerivative {
    Holds,
    Fails,
    Inconclusive,
}

/// Growth report of `||F_lambda k_{z0}||^2` across truncation orders
/// {128, 256, 512}.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub orders: [usize; 3],
    pub norms_sq: [f64; 3],
    pub verdict: AngularDerivative,
}

/// Three-valued membership test for the boundary kernel at `z0`: checks
/// whether `F_lambda * k_{z0}` stays square-summable by watching the
/// squared truncated norm across orders {128, 256, 512}. Cauchy within
/// 1e-4 relative means "holds"; growth by more than 1.5 per doubling means
/// "fails"; anything else is "inconclusive".
pub fn angular_derivative_test(
    p: &Pair,
    z0: Complex64,
    lambda: Complex64,
) -> Result<GrowthReport, PairError> {
    assert!((z0.norm() - 1.0).abs() < 1e-12, "z0 must be unimodular");
    let (f_bnd, _) = p.f_lambda(lambda)?;
    let fc = project_plus(&f_bnd);
    let orders = [128usize, 256, 512];
    let top = orders[2];
    // Cumulative coefficients of F_lambda * k_{z0}:
    // c_j = sum_{i<=j} F_i conj(z0)^{j-i}, built by the recurrence
    // c_j = conj(z0) c_{j-1} + F_j.
    let mut norms_sq = [0.0f64; 3];
    let mut c = Complex64::new(0.0, 0.0);
    let mut acc = 0.0f64;
    for j in 0..top {
        c = z0.conj() * c + fc.coeff(j);
        acc += c.norm_sqr();
        for (slot, &m) in orders.iter().enumerate() {
            if j + 1 == m {
                norms_sq[slot] = acc;
            }
        }
    }
    let cauchy = (norms_sq[2] - norms_sq[1]).abs() <= 1e-4 * norms_sq[2];
    let grows = norms_sq[1] / norms_sq[0] > 1.5 && norms_sq[2] / norms_sq[1] > 1.5;
    let verdict = if cauchy {
        AngularDerivative::Holds
    } else if grows {
        AngularDerivative::Fails
    } else {
        AngularDerivative::Inconclusive
    };
    Ok(GrowthReport {
        orders,
        norms_sq,
        verdict,
    })
}

/// Boundary kernel with its certification data.
#[derive(Debug, Clone)]
pub struct BoundaryKernel {
    pub kernel: AnalyticFunction,
    pub b_at_z0: Complex64,
    /// Weighted norm of the least-squares representer (membership
    /// certificate: finite and moderate when the kernel lies in the space).
    pub representer_norm: f64,
    pub representer_residual: f64,
}

/// Kernel at a *boundary* point `z0`, guarded by the angular-derivative
/// test. `b(z0)` is computed by radial Richardson extrapolation from the
/// radii `1 - 2^{-j}`, `j = 4, 5, 6`.
pub fn boundary_kernel(p: &Pair, z0: Complex64) -> Result<BoundaryKernel, PairError> {
    let report = angular_derivative_test(p, z0, Complex64::new(1.0, 0.0))?;
    if report.verdict != AngularDerivative::Holds {
        return Err(PairError::NoAngularDerivative);
    }
    let b_at_z0 = radial_limit(p.b(), z0);
    let one = Complex64::new(1.0, 0.0);
    let mut min_abs = f64::INFINITY;
    let bnd = BoundaryFunction::from_values(
        p.grid(),
        (0..p.grid().n())
            .map(|j| {
                let z = p.grid().node(j);
                let den = one - z0.conj() * z;
                min_abs = min_abs.min(den.norm());
                (one - b_at_z0.conj() * p.b_boundary().values()[j]) / den
            })
            .collect(),
    );
    if min_abs < 1e-12 {
        return Err(PairError::DenominatorVanishing { min_abs });
    }
    let kernel = project_plus(&bnd);
    let m = (p.grid().n() / 8).min(512);
    let solver = RepresenterSolver::new(p, m)?;
    let (q, representer_residual) = solver.solve(&kernel);
    let representer_norm = solver.weighted_norm(&q);
    Ok(BoundaryKernel {
        kernel,
        b_at_z0,
        representer_norm,
        representer_residual,
    })
}

/// Radial limit of an analytic expansion at a unimodular point via two-level
/// Richardson extrapolation on the radii `1 - 2^{-j}`, `j = 4, 5, 6`
/// (exact for expansions polynomial in `1 - r` of degree <= 2).
pub fn radial_limit(f: &AnalyticFunction, z0: Complex64) -> Complex64 {
    let v: Vec<Complex64> = [4, 5, 6]
        .iter()
        .map(|&j| f.evaluate(z0 * (1.0 - 0.5f64.powi(j))))
        .collect();
    let r1a = 2.0 * v[1] - v[0];
    let r1b = 2.0 * v[2] - v[1];
    (4.0 * r1b - r1a) / 3.0
}

/// How an `H(b)` element's representer is stored.
#[derive(Debug, Clone)]
pub enum Representer {
    /// Exact boundary samples of the weighted-space representer (used when
    /// a closed form is available; it need not be analytic).
    Samples(Vec<Complex64>),
    /// Polynomial representer from a least-squares solve.
    Poly(AnalyticFunction),
}

/// An element of `H(b)`: its Hardy-space identity `h` and a representer
/// `q` with `h = V q = (1 - b) P_+(w q)`.
#[derive(Debug, Clone)]
pub struct HbElement {
    pub h: AnalyticFunction,
    pub q: Representer,
}

impl HbElement {
    /// The kernel element at an interior point: representer
    /// `(1 - conj(b(w))) k_w` in closed form.
    pub fn kernel(p: &Pair, w: Complex64) -> Self {
        let bw = p.b().evaluate(w);
        let one = Complex64::new(1.0, 0.0);
        let q: Vec<Complex64> = (0..p.grid().n())
            .map(|j| (one - bw.conj()) / (one - w.conj() * p.grid().node(j)))
            .collect();
        HbElement {
            h: dbr_kernel(p, w),
            q: Representer::Samples(q),
        }
    }

    /// The element `a * z^k`.
    ///
    /// The naive representer `z^k / conj(f)` maps onto `a z^k` under the
    /// unitary, but it can stick out of the polynomial closure in `L^2(w)`:
    /// multiplying by `f` (a unitary onto plain `L^2`) turns the closure into
    /// the analytic half, and `z^k f / conj(f)` may carry negative
    /// frequencies. Dropping them changes nothing downstream — the discarded
    /// part is annihilated by the unitary, because `conj(f)` times a
    /// negative-frequency function still has no analytic component — while
    /// restoring the correct norm. Concretely for the reference pair
    /// `b = z(1-z)/2`: the squared norm of `a * 1` is 3/4, not 1, which the
    /// projected representer reproduces and the naive one does not.
    pub fn a_times_monomial(p: &Pair, k: usize) -> Self {
        let grid = p.grid();
        let unimodular: Vec<Complex64> = (0..grid.n())
            .map(|j| {
                let fj = p.f_boundary().values()[j];
                grid.node(j).powu(k as u32) * fj / fj.conj()
            })
            .collect();
        let analytic_half = project_plus(&BoundaryFunction::from_values(grid, unimodular));
        let half_samples = analytic_half
            .synthesize(grid)
            .expect("projection has at most n/2 coefficients");
        let q: Vec<Complex64> = (0..grid.n())
            .map(|j| half_samples.values()[j] / p.f_boundary().values()[j])
            .collect();
        let h = AnalyticFunction::monomial(k).convolve(&p.a().truncate(grid.n() / 2 - 1 - k));
        HbElement {
            h,
            q: Representer::Samples(q),
        }
    }

    /// Representer samples on the pair's grid.
    pub fn q_samples(&self, p: &Pair) -> Result<Vec<Complex64>, PairError> {
        match &self.q {
            Representer::Samples(s) => Ok(s.clone()),
            Representer::Poly(q) => Ok(q.synthesize(p.grid())?.values().to_vec()),
        }
    }
}

/// Backend selector for the `H(b)` inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbBackend {
    /// Pull representers back through the unitary `V` and integrate
    /// against the weight `w` (grid quadrature).
    VbWeighted,
    /// `<x, y>_2 + <x+, y+>_2` with `T_{conj a} x+ = T_{conj b} x`
    /// (triangular solve in coefficient space).
    PlusSolve,
}

/// The `H(b)` inner product of two elements. Requires a special pair:
/// only then is `V` onto, making both formulas compute the same pairing.
pub fn hb_inner(
    p: &Pair,
    x: &HbElement,
    y: &HbElement,
    backend: HbBackend,
) -> Result<Complex64, PairError> {
    if !p.special() {
        return Err(PairError::NotSpecialPair);
    }
    match backend {
        HbBackend::VbWeighted => {
            let qx = x.q_samples(p)?;
            let qy = y.q_samples(p)?;
            Ok(weighted_inner_samples(&qx, &qy, p.weight())?)
        }
        HbBackend::PlusSolve => Ok(hb_inner_plus(p, &x.h, &y.h)),
    }
}

/// Backend-B inner product directly on Hardy-space identities.
pub fn hb_inner_plus(p: &Pair, x: &AnalyticFunction, y: &AnalyticFunction) -> Complex64 {
    let xp = plus_part(p, x);
    let yp = plus_part(p, y);
    h2_inner(x, y) + h2_inner(&xp, &yp)
}

/// `H(b)` norm via backend B.
pub fn hb_norm(p: &Pair, x: &AnalyticFunction) -> f64 {
    hb_inner_plus(p, x, x).re.max(0.0).sqrt()
}

/// Solve `T_{conj a} x+ = T_{conj b} x` in coefficient space. Both
/// operators are upper-triangular Toeplitz, and the right-hand side
/// vanishes past the degree of `x`, so `x+` is a polynomial of the same
/// degree: the computation is exact up to roundoff.
pub fn plus_part(p: &Pair, x: &AnalyticFunction) -> AnalyticFunction {
    deterministic_linalg();
    let m = x.coeffs().len();
    let ac = p.a().coeffs();
    let bc = p.b().coeffs();
    let ta = Mat::from_fn(m, m, |j, k| {
        if k >= j {
            ac.get(k - j).copied().unwrap_or_default().conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut rhs = Mat::from_fn(m, 1, |j, _| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in j..m {
            acc += bc.get(k - j).copied().unwrap_or_default().conj() * x.coeffs()[k];
        }
        acc
    });
    solve_upper_triangular_in_place(ta.as_ref(), rhs.as_mut(), Par::Seq);
    AnalyticFunction::new((0..m).map(|j| rhs[(j, 0)]).collect())
}

/// Batched form of [`plus_part`]: every right-hand side is solved against a
/// single triangular factor, one column per input. Shorter inputs are padded
/// with zero rows, which back-substitution returns as exact zeros, so each
/// output matches its own `plus_part` call; each keeps its input's length.
pub fn plus_part_many(p: &Pair, xs: &[AnalyticFunction]) -> Vec<AnalyticFunction> {
    deterministic_linalg();
    if xs.is_empty() {
        return Vec::new();
    }
    let m = xs.iter().map(|x| x.coeffs().len()).max().unwrap();
    let ac = p.a().coeffs();
    let bc = p.b().coeffs();
    let ta = Mat::from_fn(m, m, |j, k| {
        if k >= j {
            ac.get(k - j).copied().unwrap_or_default().conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut rhs = Mat::from_fn(m, xs.len(), |j, col| {
        let x = &xs[col];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in j..x.coeffs().len() {
            acc += bc.get(k - j).copied().unwrap_or_default().conj() * x.coeffs()[k];
        }
        acc
    });
    solve_upper_triangular_in_place(ta.as_ref(), rhs.as_mut(), Par::Seq);
    xs.iter()
        .enumerate()
        .map(|(col, x)| {
            AnalyticFunction::new((0..x.coeffs().len()).map(|j| rhs[(j, col)]).collect())
        })
        .collect()
}

/// Apply the unitary `V`: representer samples (or polynomial) to the
/// `H(b)` element `(1 - b) P_+(w q)`.
pub fn vb_apply(p: &Pair, q: &Representer) -> Result<AnalyticFunction, PairError> {
    let q_vals = match q {
        Representer::Samples(s) => s.clone(),
        Representer::Poly(poly) => poly.synthesize(p.grid())?.values().to_vec(),
    };
    let wq = BoundaryFunction::from_values(
        p.grid(),
        q_vals
            .iter()
            .zip(p.weight().values())
            .map(|(a, b)| a * b)
            .collect(),
    );
    let plus = project_plus(&wq);
    let plus_bnd = plus.synthesize(p.grid())?;
    let one = Complex64::new(1.0, 0.0);
    let out = BoundaryFunction::from_values(
        p.grid(),
        (0..p.grid().n())
            .map(|j| (one - p.b_boundary().values()[j]) * plus_bnd.values()[j])
            .collect(),
    );
    Ok(project_plus(&out))
}

/// Apply the isometry `W_lambda = T_{1 - conj(lambda) b} T_{conj(F_lambda)}`
/// to a Hardy-space element, entirely through boundary samples.
pub fn w_isometry_apply(
    p: &Pair,
    lambda: Complex64,
    q: &AnalyticFunction,
) -> Result<AnalyticFunction, PairError> {
    let (f_bnd, _) = p.f_lambda(lambda)?;
    let q_bnd = q.synthesize(p.grid())?;
    let prod = BoundaryFunction::from_values(
        p.grid(),
        (0..p.grid().n())
            .map(|j| f_bnd.values()[j].conj() * q_bnd.values()[j])
            .collect(),
    );
    let plus = project_plus(&prod);
    let plus_bnd = plus.synthesize(p.grid())?;
    let one = Complex64::new(1.0, 0.0);
    let out = BoundaryFunction::from_values(
        p.grid(),
        (0..p.grid().n())
            .map(|j| (one - lambda.conj() * p.b_boundary().values()[j]) * plus_bnd.values()[j])
            .collect(),
    );
    Ok(project_plus(&out))
}

/// Shared least-squares machinery for representer solves: a QR
/// factorization of `L = T_{1-b} W_+` where `W_+[j, k] = w_{j-k}` maps a
/// degree-`< m` polynomial representer to the coefficients of its `H(b)`
/// image (rows `0..2m`).
pub struct RepresenterSolver<'a> {
    pair: &'a Pair,
    l: Mat<Complex64>,
    qr: faer::linalg::solvers::Qr<Complex64>,
    gram: Mat<Complex64>,
    pub m: usize,
    pub rows: usize,
}

impl<'a> RepresenterSolver<'a> {
    /// Build the solver at polynomial order `m` (rows `2m`; requires
    /// `2m <= n/2` so all weight coefficients are resolved).
    pub fn new(p: &'a Pair, m: usize) -> Result<Self, PairError> {
        deterministic_linalg();
        let rows = 2 * m;
        let n = p.grid().n();
        if rows > n / 2 {
            return Err(PairError::Toeplitz(ToeplitzError::OrderTooLarge { m, n }));
        }
        let w = p.weight();
        let wplus = Mat::from_fn(rows, m, |j, k| w.coeff(j as isize - k as isize));
        let omb = p.b().scale(Complex64::new(-1.0, 0.0));
        let tol = Mat::from_fn(rows, rows, |j, k| {
            if j == k {
                Complex64::new(1.0, 0.0) + omb.coeff(0)
            } else if j > k {
                omb.coeff(j - k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let l = &tol * &wplus;
        let qr = l.qr();
        let gram = Mat::from_fn(m, m, |j, k| w.coeff(j as isize - k as isize));
        Ok(Self {
            pair: p,
            l,
            qr,
            gram,
            m,
            rows,
        })
    }

    fn rhs_matrix(&self, targets: &[&AnalyticFunction]) -> Mat<Complex64> {
        Mat::from_fn(self.rows, targets.len(), |j, c| targets[c].coeff(j))
    }

    /// Solve for one target; returns the polynomial representer and the
    /// relative least-squares residual.
    pub fn solve(&self, h: &AnalyticFunction) -> (AnalyticFunction, f64) {
        let mut out = self.solve_many(&[h]);
        out.pop().expect("one solution per target")
    }

    /// Batched solve; one (representer, relative residual) per target.
    pub fn solve_many(&self, targets: &[&AnalyticFunction]) -> Vec<(AnalyticFunction, f64)> {
        let rhs = self.rhs_matrix(targets);
        let sol = self.qr.solve_lstsq(&rhs);
        let resid = &self.l * &sol - &rhs;
        targets
            .iter()
            .enumerate()
            .map(|(c, h)| {
                let q = AnalyticFunction::new((0..self.m).map(|i| sol[(i, c)]).collect());
                let mut r2 = 0.0;
                for j in 0..self.rows {
                    r2 += resid[(j, c)].norm_sqr();
                }
                // Include target mass beyond the row window in the residual.
                for j in self.rows..h.coeffs().len() {
                    r2 += h.coeff(j).norm_sqr();
                }
                (q, r2.sqrt() / h.h2_norm().max(f64::MIN_POSITIVE))
            })
            .collect()
    }

    /// Weighted norm `||q||_{L2(w)}` of a polynomial representer.
    pub fn weighted_norm(&self, q: &AnalyticFunction) -> f64 {
        let x = Mat::from_fn(self.m, 1, |i, _| q.coeff(i));
        let gx = &self.gram * &x;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.m {
            acc += x[(i, 0)].conj() * gx[(i, 0)];
        }
        acc.re.max(0.0).sqrt()
    }

    /// Weighted inner product of two polynomial representers.
    pub fn weighted_inner(&self, q1: &AnalyticFunction, q2: &AnalyticFunction) -> Complex64 {
        let x = Mat::from_fn(self.m, 1, |i, _| q1.coeff(i));
        let y = Mat::from_fn(self.m, 1, |i, _| q2.coeff(i));
        let gx = &self.gram * &x;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.m {
            acc += y[(i, 0)].conj() * gx[(i, 0)];
        }
        acc
    }

    pub fn pair(&self) -> &Pair {
        self.pair
    }
}

/// Least-squares representer with a membership gate: residuals above
/// `1e-5` of the target norm mean the element is not (numerically) in the
/// range of the truncated isometry, hence not certified in `H(b)`.
pub fn representer_solve(p: &Pair, h: &AnalyticFunction, m: usize) -> Result<HbElement, PairError> {
    if !p.special() {
        return Err(PairError::NotSpecialPair);
    }
    let solver = RepresenterSolver::new(p, m)?;
    let (q, residual) = solver.solve(h);
    if residual > 1e-5 {
        return Err(PairError::NotInRange { residual });
    }
    Ok(HbElement {
        h: h.clone(),
        q: Representer::Poly(q),
    })
}

/// Result of the complement extraction.
#[derive(Debug, Clone)]
pub struct MaComplement {
    /// Number of directions below the singular-value threshold.
    pub dim: usize,
    /// Full singular-value list (nonincreasing) of the constraint map.
    pub sigmas: Vec<f64>,
    /// Ratio across the spectral cut (`None` when `dim = 0`).
    pub gap_ratio: Option<f64>,
    /// Back-mapped basis functions of the complement in `H(b)`.
    pub functions: Vec<AnalyticFunction>,
    /// Polynomial representers of the basis functions.
    pub representers: Vec<AnalyticFunction>,
    /// True for the degenerate request `d = 0` (no constraints: the
    /// "complement" is the whole candidate space).
    pub degenerate: bool,
}

/// Orthogonal complement of the closure of `a * polynomials` inside `H(b)`,
/// computed in representer coordinates.
///
/// Candidates are the representers of `z^j`, `j <= d`; constraints are the
/// representers of `a z^k`, `k < 2d`. Both are normalized in the weighted
/// metric; the singular values of the constraint map restricted to the
/// candidate span reveal the complement as the directions nearly
/// annihilated by every constraint. The dimension is re-derived at cutoff
/// `2d` and must agree.
pub fn ma_complement(p: &Pair, d: usize, m: usize) -> Result<MaComplement, PairError> {
    if !p.special() {
        return Err(PairError::NotSpecialPair);
    }
    assert!(2 * d <= m, "cutoff must satisfy 2d <= m");
    let solver = RepresenterSolver::new(p, m)?;
    let result = complement_at_cutoff(p, &solver, d)?;
    if d > 0 {
        let check = complement_at_cutoff(p, &solver, 2 * d)?;
        if check.dim != result.dim {
            return Err(PairError::ComplementUnstable {
                dim_d: result.dim,
                dim_2d: check.dim,
            });
        }
    }
    Ok(result)
}

fn complement_at_cutoff(
    p: &Pair,
    solver: &RepresenterSolver,
    d: usize,
) -> Result<MaComplement, PairError> {
    deterministic_linalg();
    let m = solver.m;
    let monomials: Vec<AnalyticFunction> = (0..=d).map(AnalyticFunction::monomial).collect();
    let amons: Vec<AnalyticFunction> = (0..2 * d)
        .map(|k| AnalyticFunction::monomial(k).convolve(&p.a().truncate(m)))
        .collect();
    let mon_refs: Vec<&AnalyticFunction> = monomials.iter().collect();
    let amon_refs: Vec<&AnalyticFunction> = amons.iter().collect();
    let cand: Vec<AnalyticFunction> = solver
        .solve_many(&mon_refs)
        .into_iter()
        .map(|(q, _)| q)
        .collect();
    let cons: Vec<AnalyticFunction> = solver
        .solve_many(&amon_refs)
        .into_iter()
        .map(|(q, _)| q)
        .collect();
    let normalize = |qs: &[AnalyticFunction]| -> Mat<Complex64> {
        let norms: Vec<f64> = qs
            .iter()
            .map(|q| solver.weighted_norm(q).max(f64::MIN_POSITIVE))
            .collect();
        Mat::from_fn(m, qs.len(), |i, j| qs[j].coeff(i) / norms[j])
    };
    let c = normalize(&cand);
    if d == 0 {
        let functions = vec![vb_apply(p, &Representer::Poly(cand[0].clone()))?];
        return Ok(MaComplement {
            dim: 1,
            sigmas: vec![],
            gap_ratio: None,
            functions,
            representers: cand,
            degenerate: true,
        });
    }
    let x = normalize(&cons);
    let k = x.adjoint() * &solver.gram * &c;
    let svd = k.svd().map_err(|_| PairError::SolveFailed)?;
    let ncols = d + 1;
    let nsv = ncols.min(2 * d);
    let sigmas: Vec<f64> = (0..nsv).map(|i| svd.S().column_vector()[i].re).collect();
    // Deepest drop by >= 4x landing below 0.1 marks the cut; scan from the
    // top so cascaded drops are cut at the outermost qualifying gap.
    let mut dim = 0;
    for i in 0..nsv.saturating_sub(1) {
        let below = sigmas[i + 1].max(f64::MIN_POSITIVE);
        if sigmas[i] / below >= 4.0 && sigmas[i + 1] <= 0.1 {
            dim = nsv - 1 - i;
            break;
        }
    }
    let gap_ratio = if dim > 0 && dim < nsv {
        Some(sigmas[nsv - dim - 1] / sigmas[nsv - dim].max(f64::MIN_POSITIVE))
    } else {
        None
    };
    let v = svd.V();
    let mut functions = Vec::new();
    let mut representers = Vec::new();
    for idx in 0..dim {
        let col = ncols - 1 - idx;
        let mut q_coeffs = vec![Complex64::new(0.0, 0.0); m];
        for (j, qc) in q_coeffs.iter_mut().enumerate() {
            for i in 0..ncols {
                *qc += c[(j, i)] * v[(i, col)];
            }
        }
        let mut q = AnalyticFunction::new(q_coeffs);
        let norm = solver.weighted_norm(&q);
        q = q.scale(Complex64::new(1.0 / norm.max(f64::MIN_POSITIVE), 0.0));
        functions.push(vb_apply(p, &Representer::Poly(q.clone()))?);
        representers.push(q);
    }
    Ok(MaComplement {
        dim,
        sigmas,
        gap_ratio,
        functions,
        representers,
        degenerate: false,
    })
}

/// Apply `A_lambda = S* - F_lambda(0)^{-1} (S* F_lambda) <., 1>`:
/// the backward shift corrected by a rank-one term.
pub fn a_lambda_apply(
    p: &Pair,
    lambda: Complex64,
    h: &AnalyticFunction,
) -> Result<AnalyticFunction, PairError> {
    let (_, f_an) = p.f_lambda(lambda)?;
    let f0 = f_an.origin_value();
    if f0.norm() < 1e-12 {
        return Err(PairError::OriginZero);
    }
    let correction = f_an.shift_down().scale(h.origin_value() / f0);
    Ok(h.shift_down().sub(&correction))
}

/// The matrix of the shift compression `Y` (multiplication by `z`) on the
/// `H(b)`-orthonormalized polynomial basis `{1, z, .., z^{nbasis-1}}`,
/// together with the Cholesky factor used for the basis change.
pub struct YstarBasis {
    /// Lower Cholesky factor of the monomial Gram matrix.
    pub chol: Mat<Complex64>,
    /// Matrix of `Y` in the orthonormalized basis.
    pub y_mat: Mat<Complex64>,
    pub nbasis: usize,
}

/// Build the orthonormalized shift matrix at basis size `nbasis`.
pub fn ystar_basis(p: &Pair, nbasis: usize) -> Result<YstarBasis, PairError> {
    if !p.special() {
        return Err(PairError::NotSpecialPair);
    }
    deterministic_linalg();
    let np1 = nbasis + 1;
    // Plus-parts of all monomials through degree nbasis at once: columns of
    // the solution of T_{conj a} X = T_{conj b}.
    let ac = p.a().coeffs();
    let bc = p.b().coeffs();
    let ta = Mat::from_fn(np1, np1, |j, k| {
        if k >= j {
            ac.get(k - j).copied().unwrap_or_default().conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut xplus = Mat::from_fn(np1, np1, |j, k| {
        if k >= j {
            bc.get(k - j).copied().unwrap_or_default().conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    solve_upper_triangular_in_place(ta.as_ref(), xplus.as_mut(), Par::Seq);
    // Full Gram of {z^0 .. z^nbasis}: identity plus plus-part overlaps.
    let overlaps = xplus.adjoint() * &xplus;
    let gram_full = Mat::from_fn(np1, np1, |j, k| {
        let delta = if j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        delta + overlaps[(j, k)]
    });
    let gram = Mat::from_fn(nbasis, nbasis, |j, k| gram_full[(j, k)]);
    let ymon = Mat::from_fn(nbasis, nbasis, |j, k| gram_full[(j, k + 1)]);
    let chol = cholesky_lower(&gram).ok_or(PairError::SolveFailed)?;
    // Y in the orthonormal basis: L^{-1} Ymon L^{-H}.
    let mut tmp = ymon.clone();
    solve_lower_triangular_in_place(chol.as_ref(), tmp.as_mut(), Par::Seq);
    let mut tmp2 = tmp.adjoint().to_owned();
    solve_lower_triangular_in_place(chol.as_ref(), tmp2.as_mut(), Par::Seq);
    let y_mat = tmp2.adjoint().to_owned();
    Ok(YstarBasis {
        chol,
        y_mat,
        nbasis,
    })
}

impl YstarBasis {
    /// Orthonormal-basis coordinates of a polynomial (degree < nbasis).
    pub fn coords(&self, candidate: &AnalyticFunction) -> Mat<Complex64> {
        assert!(
            candidate.coeffs().len() <= self.nbasis,
            "candidate degree must fit in the basis"
        );
        let c = Mat::from_fn(self.nbasis, 1, |i, _| candidate.coeff(i));
        self.chol.adjoint() * &c
    }

    /// Residual `||Y* v - conj(z0) v|| / ||v||` for a polynomial candidate.
    pub fn eigen_residual(&self, candidate: &AnalyticFunction, z0: Complex64) -> f64 {
        let v = self.coords(candidate);
        let yv = self.y_mat.adjoint() * &v;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.nbasis {
            num += (yv[(i, 0)] - z0.conj() * v[(i, 0)]).norm_sqr();
            den += v[(i, 0)].norm_sqr();
        }
        (num / den).sqrt()
    }
}

/// Residual of the adjoint-shift eigen equation for a polynomial
/// candidate, on an `H(b)`-orthonormalized basis of the given size.
pub fn ystar_eigencheck(
    p: &Pair,
    z0: Complex64,
    candidate: &AnalyticFunction,
    nbasis: usize,
) -> Result<f64, PairError> {
    let basis = ystar_basis(p, nbasis)?;
    Ok(basis.eigen_residual(candidate, z0))
}

/// Residual of the intertwining identity
/// `W_lambda A_lambda q = Y* W_lambda q` for a polynomial `q`.
///
/// Because the pair is special, `{W_lambda z^k}` is an orthonormal basis
/// of `H(b)`; expanding `Y* (W_lambda q)` in it via
/// `<x, z W_lambda z^k>_b` reduces the `H(b)`-norm of the difference to a
/// plain coefficient-space distance from `A_lambda q`.
pub fn intertwining_residual(
    p: &Pair,
    lambda: Complex64,
    q: &AnalyticFunction,
) -> Result<f64, PairError> {
    if !p.special() {
        return Err(PairError::NotSpecialPair);
    }
    let cap = 768;
    let aq = a_lambda_apply(p, lambda, q)?;
    let x = w_isometry_apply(p, lambda, q)?.truncate(cap);
    let kmax = q.coeffs().len() + 80;
    // All the plus-parts share one triangular factor, so solve them as the
    // columns of a single system: first `x`, then every `z W z^k`.
    let mut targets = Vec::with_capacity(kmax + 2);
    targets.push(x.clone());
    for k in 0..=kmax {
        let wzk = w_isometry_apply(p, lambda, &AnalyticFunction::monomial(k))?;
        targets.push(wzk.shift_up().truncate(cap));
    }
    let plus_parts = plus_part_many(p, &targets);
    let xp = &plus_parts[0];
    let mut num = 0.0;
    for k in 0..=kmax {
        let coord = h2_inner(&x, &targets[k + 1]) + h2_inner(xp, &plus_parts[k + 1]);
        num += (aq.coeff(k) - coord).norm_sqr();
    }
    // Tail of A_lambda q beyond the expansion window.
    for k in kmax + 1..aq.coeffs().len() {
        num += aq.coeff(k).norm_sqr();
    }
    Ok(num.sqrt() / q.h2_norm().max(f64::MIN_POSITIVE))
}
