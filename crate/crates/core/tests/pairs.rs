//! The measure-pair laboratory: construction gates, the two inner-product
//! backends, reproducing kernels, representers, the multiplier-range
//! complement, eigenvector certificates, and boundary-kernel asymptotics.

use hardy_core::circle_fft::{project_plus, weighted_inner_samples};
use hardy_core::functions::blaschke;
use hardy_core::pairs_dbr::{
    a_lambda_apply, angular_derivative_test, boundary_kernel, dbr_kernel, hb_inner, hb_inner_plus,
    hb_norm, intertwining_residual, ma_complement, pair_from_outer, plus_part, representer_solve,
    w_isometry_apply, ystar_basis, ystar_eigencheck, AngularDerivative, HbBackend, HbElement,
    Pair, PairError, Representer,
};
use hardy_core::toeplitz::{principal_angles, Subspace};
use hardy_core::{AnalyticFunction, BoundaryFunction, Grid};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The reference pair `a = (1+z)/2`, `b = z(1-z)/2`: polynomial data, unit
/// outer generator `f = (1+z)/(2 - z + z^2)`, weight vanishing at `-1`.
fn canonical_pair(n: usize) -> Pair {
    let grid = Grid::new(n).unwrap();
    let b_bnd = BoundaryFunction::from_fn(grid, |z| z * (c(1.0, 0.0) - z) * 0.5);
    let a_bnd = BoundaryFunction::from_fn(grid, |z| (c(1.0, 0.0) + z) * 0.5);
    Pair::from_boundary(b_bnd, a_bnd, true).unwrap()
}

/// Exact coefficients of `a z^k` for the canonical pair.
fn a_monomial(k: usize) -> AnalyticFunction {
    AnalyticFunction::new(vec![c(0.5, 0.0), c(0.5, 0.0)]).convolve(&AnalyticFunction::monomial(k))
}

#[test]
fn canonical_pair_satisfies_structure() {
    let p = canonical_pair(4096);
    assert!(p.special());
    // f (1 - b) = a on the boundary.
    let mut max_err: f64 = 0.0;
    for j in 0..p.grid().n() {
        let lhs = p.f_boundary().values()[j] * (c(1.0, 0.0) - p.b_boundary().values()[j]);
        max_err = max_err.max((lhs - p.a_boundary().values()[j]).norm());
    }
    assert!(max_err < 1e-13);
    // Weight is |f|^2 and the generator has unit norm (the pair is special).
    for j in (0..p.grid().n()).step_by(59) {
        let w = p.weight().values()[j].re;
        assert!((w - p.f_boundary().values()[j].norm_sqr()).abs() < 1e-13);
    }
    assert!((p.f().h2_norm() - 1.0).abs() < 1e-10);
    // b vanishes at the origin, so the associated Herglotz integral is real
    // at the center.
    assert!(p.herglotz_constant().abs() < 1e-12);
    // Projected coefficients match the closed forms.
    assert!((p.b().coeff(1) - c(0.5, 0.0)).norm() < 1e-13);
    assert!((p.b().coeff(2) + c(0.5, 0.0)).norm() < 1e-13);
    assert!((p.a().coeff(0) - c(0.5, 0.0)).norm() < 1e-13);
}

#[test]
fn from_boundary_validation_gates() {
    let grid = Grid::new(256).unwrap();
    // |a|^2 + |b|^2 = 1/2 everywhere.
    let b = BoundaryFunction::from_fn(grid, |z| z * 0.5);
    let a = BoundaryFunction::from_fn(grid, |_| c(0.5, 0.0));
    assert!(matches!(
        Pair::from_boundary(b, a, false),
        Err(PairError::IdentityViolated { .. })
    ));
    // |b| = 1 with a = 0: identity holds but b touches the circle.
    let b = BoundaryFunction::from_fn(grid, |z| z);
    let a = BoundaryFunction::from_fn(grid, |_| c(0.0, 0.0));
    assert!(matches!(
        Pair::from_boundary(b, a, false),
        Err(PairError::NotContractive { .. })
    ));
    // Constant b carries no measure-theoretic content here.
    let b = BoundaryFunction::from_fn(grid, |_| c(0.5, 0.0));
    let a = BoundaryFunction::from_fn(grid, |_| c(3f64.sqrt() / 2.0, 0.0));
    assert!(matches!(
        Pair::from_boundary(b, a, false),
        Err(PairError::ConstantB)
    ));
}

#[test]
fn pair_from_outer_gates_and_recovery() {
    let grid = Grid::new(4096).unwrap();
    // Norm gate.
    let too_big = AnalyticFunction::constant(c(2.0, 0.0));
    assert!(matches!(
        pair_from_outer(&too_big, grid),
        Err(PairError::NotUnitNorm { .. })
    ));
    // Winding gate: z is unit-norm but vanishes inside.
    let zed = AnalyticFunction::monomial(1);
    assert!(matches!(
        pair_from_outer(&zed, grid),
        Err(PairError::OuterDiagnosticFailed { .. })
    ));
    // Recovery: f0 = (sqrt(3)/2) / (1 - z/2) must reproduce b = z/2.
    let coeffs: Vec<Complex64> = (0..60)
        .map(|k| c(3f64.sqrt() / 2.0 * 0.5f64.powi(k as i32), 0.0))
        .collect();
    let f0 = AnalyticFunction::new(coeffs);
    let p = pair_from_outer(&f0, grid).unwrap();
    assert!(p.special());
    assert!(p.b().coeff(0).norm() < 1e-10);
    assert!((p.b().coeff(1) - c(0.5, 0.0)).norm() < 1e-10);
    assert!(p.b().coeff(2).norm() < 1e-10);
    assert!((p.a().coeff(0) - c(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-10);
    assert!((p.f().h2_norm() - 1.0).abs() < 1e-8);
}

#[test]
fn backends_agree_on_sample_elements() {
    let p = canonical_pair(4096);
    let elements = [
        HbElement::kernel(&p, c(0.3, 0.0)),
        HbElement::kernel(&p, c(0.4, -0.2)),
        HbElement::a_times_monomial(&p, 0),
        HbElement::a_times_monomial(&p, 2),
    ];
    for x in &elements {
        for y in &elements {
            let ia = hb_inner(&p, x, y, HbBackend::VbWeighted).unwrap();
            let ib = hb_inner(&p, x, y, HbBackend::PlusSolve).unwrap();
            assert!(
                (ia - ib).norm() < 1e-12,
                "backend disagreement {:.3e}",
                (ia - ib).norm()
            );
        }
    }
}

#[test]
fn kernels_reproduce_point_evaluation() {
    let p = canonical_pair(4096);
    let points = [c(0.4, -0.2), c(-0.3, 0.0), c(0.2, 0.5)];
    let elements: Vec<AnalyticFunction> = (0..4).map(a_monomial).collect();
    for w in points {
        let kw = dbr_kernel(&p, w);
        for h in &elements {
            let lhs = hb_inner_plus(&p, h, &kw);
            let rhs = h.evaluate(w);
            assert!(
                (lhs - rhs).norm() < 1e-10,
                "reproducing defect {:.3e} at w={w}",
                (lhs - rhs).norm()
            );
        }
        // Kernel against kernel: <k_v, k_w> = k_v(w).
        let v_pt = c(0.3, 0.0);
        let kv = dbr_kernel(&p, v_pt);
        let lhs = hb_inner_plus(&p, &kv, &kw);
        assert!((lhs - kv.evaluate(w)).norm() < 1e-10);
    }
    // k_0 = 1 since b(0) = 0, and its squared norm is k_0(0) = 1.
    let k0 = dbr_kernel(&p, c(0.0, 0.0));
    assert!(k0.sub(&AnalyticFunction::constant(c(1.0, 0.0))).h2_norm() < 1e-12);
    assert!((hb_norm(&p, &k0) - 1.0).abs() < 1e-12);
}

#[test]
fn multiplier_columns_have_hand_computed_norms() {
    // Hand back-substitution of T_conj(a) x_plus = T_conj(b) (a z^k) for
    // b = z(1-z)/2, a = (1+z)/2:
    //   k = 0: T_conj(b) a = 1/4, x_plus = 1/2      => norm^2 = 1/2 + 1/4 = 3/4
    //   k = 1: rhs = z/4,  x_plus = (-1 + z)/2      => norm^2 = 1/2 + 1/2 = 1
    //   k = 2: rhs = (z^2 - 1)/4, x_plus = (-z+z^2)/2 => norm^2 = 1
    //   k = 3: rhs = (z^3 - z)/4, x_plus = (-z^2+z^3)/2 => norm^2 = 1
    // So the k = 0 column is shorter than the rest: norm sqrt(3)/2, not 1.
    let p = canonical_pair(4096);
    let expected = [0.75f64.sqrt(), 1.0, 1.0, 1.0];
    for k in 0..4 {
        let h = a_monomial(k);
        assert!(
            (hb_norm(&p, &h) - expected[k]).abs() < 1e-10,
            "norm of column {k} is {} (expected {})",
            hb_norm(&p, &h),
            expected[k]
        );
    }
}

#[test]
fn second_isometry_sends_monomials_to_orthonormal_family() {
    let p = canonical_pair(1024);
    let lambda = c(1.0, 0.0);
    let xs: Vec<AnalyticFunction> = (0..6)
        .map(|k| w_isometry_apply(&p, lambda, &AnalyticFunction::monomial(k)).unwrap())
        .collect();
    let xps: Vec<AnalyticFunction> = xs.iter().map(|x| plus_part(&p, x)).collect();
    for k in 0..6 {
        for l in 0..6 {
            let inner = hardy_core::circle_fft::h2_inner(&xs[k], &xs[l])
                + hardy_core::circle_fft::h2_inner(&xps[k], &xps[l]);
            let expect = if k == l { 1.0 } else { 0.0 };
            assert!(
                (inner - c(expect, 0.0)).norm() < 1e-10,
                "orthonormality defect at ({k},{l}): {inner}"
            );
        }
    }
}

#[test]
fn representer_solver_recovers_interior_kernel() {
    // The representer of k_w is (1 - conj(b(w))) / (1 - conj(w) z): analytic
    // for interior w, so the least-squares solve recovers it to machine
    // precision and the membership gate passes.
    let p = canonical_pair(4096);
    let w = c(0.3, 0.0);
    let h = dbr_kernel(&p, w);
    let elem = representer_solve(&p, &h, 512).unwrap();
    let scale = c(1.0, 0.0) - p.b().evaluate(w).conj();
    match &elem.q {
        Representer::Poly(q) => {
            for k in 0..20 {
                let expect = scale * w.conj().powu(k as u32);
                assert!(
                    (q.coeff(k) - expect).norm() < 1e-8,
                    "representer coefficient {k} off by {:.3e}",
                    (q.coeff(k) - expect).norm()
                );
            }
        }
        Representer::Samples(_) => panic!("least-squares route must return a polynomial"),
    }
}

#[test]
fn representer_gate_rejects_boundary_kernel() {
    // (2 - z)/2 lies in the space but its representer 2/(1+z) is not
    // analytic; the polynomial least-squares residual decays only like 1/m,
    // so the strict membership gate must refuse it.
    let p = canonical_pair(4096);
    let h = AnalyticFunction::new(vec![c(1.0, 0.0), c(-0.5, 0.0)]);
    assert!(matches!(
        representer_solve(&p, &h, 512),
        Err(PairError::NotInRange { .. })
    ));
}

#[test]
fn complement_of_multiplier_range_is_one_dimensional() {
    let p = canonical_pair(4096);
    let mc = ma_complement(&p, 32, 512).unwrap();
    assert_eq!(mc.dim, 1);
    assert!(!mc.degenerate);
    assert!(mc.gap_ratio.unwrap() > 4.0);
    assert_eq!(mc.functions.len(), 1);
    // Spectrum is nonincreasing and ends well below the bulk.
    for i in 1..mc.sigmas.len() {
        assert!(mc.sigmas[i] <= mc.sigmas[i - 1] + 1e-12);
    }
    // The complement direction is (2 - z)/2 up to small angle.
    let found = Subspace::from_spanning_columns(
        &[mc.functions[0].truncate(63).coeffs().to_vec()],
        0.0,
    );
    let mut target = vec![c(0.0, 0.0); 64];
    target[0] = c(1.0, 0.0);
    target[1] = c(-0.5, 0.0);
    let target = Subspace::from_spanning_columns(&[target], 0.0);
    let angles = principal_angles(&found, &target).unwrap();
    assert!(angles[0] < 1e-3, "angle to the boundary kernel: {:.3e}", angles[0]);
}

#[test]
fn complement_empty_when_multipliers_are_dense() {
    // For b = z/2 with constant a the multiplier range is dense: every
    // candidate direction stays significantly coupled to the constraints.
    let grid = Grid::new(4096).unwrap();
    let b = BoundaryFunction::from_fn(grid, |z| z * 0.5);
    let a = BoundaryFunction::from_fn(grid, |_| c(3f64.sqrt() / 2.0, 0.0));
    let p = Pair::from_boundary(b, a, true).unwrap();
    let mc = ma_complement(&p, 16, 512).unwrap();
    assert_eq!(mc.dim, 0);
    assert!(mc.gap_ratio.is_none());
    let min_sigma = mc.sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min_sigma > 0.5, "smallest constraint coupling {min_sigma}");
}

#[test]
fn complement_degenerate_request_returns_constants() {
    let p = canonical_pair(4096);
    let mc = ma_complement(&p, 0, 512).unwrap();
    assert!(mc.degenerate);
    assert_eq!(mc.dim, 1);
    assert_eq!(mc.functions.len(), 1);
}

#[test]
fn ystar_eigencheck_discriminates() {
    let p = canonical_pair(4096);
    let good = AnalyticFunction::new(vec![c(1.0, 0.0), c(-0.5, 0.0)]);
    let bad = AnalyticFunction::new(vec![c(0.5, 0.0), c(0.5, 0.0)]);
    let rg = ystar_eigencheck(&p, c(-1.0, 0.0), &good, 64).unwrap();
    let rb = ystar_eigencheck(&p, c(-1.0, 0.0), &bad, 64).unwrap();
    assert!(rg < 1e-10, "eigen residual of the true vector: {rg:.3e}");
    assert!(rb > 0.1, "eigen residual of the spoiler: {rb:.3e}");
}

#[test]
fn rank_one_corrected_shift_identities() {
    let p = canonical_pair(4096);
    let lambda = c(1.0, 0.0);
    // g = 1/(2 - z + z^2) satisfies A g = -g: it is F k_{-1} for this pair.
    let mut gc = vec![c(0.5, 0.0), c(0.25, 0.0)];
    for k in 2..300 {
        let next = (gc[k - 1] - gc[k - 2]) * 0.5;
        gc.push(next);
    }
    let g = AnalyticFunction::new(gc);
    let ag = a_lambda_apply(&p, lambda, &g).unwrap();
    for k in 0..200 {
        assert!(
            (ag.coeff(k) + g.coeff(k)).norm() < 1e-10,
            "eigenvector defect at coefficient {k}"
        );
    }
    // Vanishing at the origin removes the rank-one correction entirely.
    let h = AnalyticFunction::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
    let ah = a_lambda_apply(&p, lambda, &h).unwrap();
    assert!(ah.sub(&h.shift_down()).h2_norm() < 1e-14);
    // The generator itself is annihilated.
    let af = a_lambda_apply(&p, lambda, p.f()).unwrap();
    assert!(af.h2_norm() < 1e-12);
}

#[test]
fn boundary_kernel_at_minus_one() {
    let p = canonical_pair(4096);
    let bk = boundary_kernel(&p, c(-1.0, 0.0)).unwrap();
    let target = AnalyticFunction::new(vec![c(1.0, 0.0), c(-0.5, 0.0)]);
    assert!(bk.kernel.sub(&target).h2_norm() < 1e-10);
    assert!((bk.b_at_z0 + c(1.0, 0.0)).norm() < 1e-10);
    // Membership certificate: moderate weighted norm, small (but nonzero,
    // truncation-limited) least-squares residual.
    assert!(bk.representer_norm > 1.0 && bk.representer_norm < 1.5);
    assert!(bk.representer_residual < 1e-4);
}

#[test]
fn boundary_kernel_rejects_point_without_derivative() {
    let p = canonical_pair(4096);
    assert!(matches!(
        boundary_kernel(&p, c(1.0, 0.0)),
        Err(PairError::NoAngularDerivative)
    ));
}

#[test]
fn angular_derivative_verdicts_at_both_ends() {
    let p = canonical_pair(4096);
    let holds = angular_derivative_test(&p, c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert_eq!(holds.verdict, AngularDerivative::Holds);
    for nsq in holds.norms_sq {
        assert!((nsq - 0.375).abs() < 1e-6, "saturated norm {nsq}");
    }
    let fails = angular_derivative_test(&p, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert_eq!(fails.verdict, AngularDerivative::Fails);
    // Truncated norms grow linearly in the order: m + 1/2 exactly here.
    for (order, nsq) in fails.orders.iter().zip(fails.norms_sq) {
        assert!((nsq - (*order as f64 + 0.5)).abs() < 1e-6);
    }
}

#[test]
fn interior_kernels_converge_to_boundary_kernel() {
    // ||k_w - k_{-1}|| in the weighted metric for w -> -1 along the radius,
    // evaluated by quadrature of the exact sample representers. The fine
    // grid keeps the most concentrated kernel resolved.
    let p = canonical_pair(1 << 15);
    let n = p.grid().n();
    let frozen = [0.125, 0.0358, 0.0112];
    let mut norms = Vec::new();
    for &w in &[-0.9, -0.99, -0.999] {
        let bw = p.b().evaluate(c(w, 0.0));
        let scale = c(1.0, 0.0) - bw.conj();
        let diff: Vec<Complex64> = (0..n)
            .map(|j| {
                let z = p.grid().node(j);
                scale / (c(1.0, 0.0) - w * z) - c(2.0, 0.0) / (c(1.0, 0.0) + z)
            })
            .collect();
        let nsq = weighted_inner_samples(&diff, &diff, p.weight()).unwrap();
        norms.push(nsq.re.max(0.0).sqrt());
    }
    for (v, f) in norms.iter().zip(frozen) {
        assert!(
            *v > 0.5 * f && *v < 1.5 * f,
            "distance {v:.4} drifted from reference {f}"
        );
    }
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "not decreasing: {norms:?}");
}

#[test]
fn generator_slices_match_at_trivial_rotation() {
    let p = canonical_pair(4096);
    let (bnd, an) = p.f_lambda(c(1.0, 0.0)).unwrap();
    assert!(an.sub(p.f()).h2_norm() < 1e-12);
    let mut max_err: f64 = 0.0;
    for j in 0..p.grid().n() {
        max_err = max_err.max((bnd.values()[j] - p.f_boundary().values()[j]).norm());
    }
    assert!(max_err < 1e-13);
    // The opposite rotation stays finite: the denominator zero at -1 falls
    // between grid nodes.
    assert!(p.f_lambda(c(-1.0, 0.0)).is_ok());
}

#[test]
fn inner_multiplication_embeds_isometrically() {
    // With b1 = I b0 for inner I, multiplication by I maps the b0-space
    // into the b1-space preserving norms.
    let n = 4096;
    let grid = Grid::new(n).unwrap();
    let inner = blaschke(vec![c(0.0, 0.0), c(-0.5, 0.0)]).unwrap();
    let b0 = |z: Complex64| z * (c(1.0, 0.0) - z) * 0.5;
    let a = |z: Complex64| (c(1.0, 0.0) + z) * 0.5;
    let p0 = canonical_pair(n);
    let b1_bnd = BoundaryFunction::from_fn(grid, |z| inner.evaluate(z) * b0(z));
    let a_bnd = BoundaryFunction::from_fn(grid, a);
    let p1 = Pair::from_boundary(b1_bnd, a_bnd, true).unwrap();

    let h = dbr_kernel(&p0, c(0.3, 0.0)).truncate(300);
    let h_bnd = h.synthesize(grid).unwrap();
    let ih_bnd = BoundaryFunction::from_values(
        grid,
        (0..n)
            .map(|j| inner.evaluate(grid.node(j)) * h_bnd.values()[j])
            .collect(),
    );
    let ih = project_plus(&ih_bnd).truncate(380);
    let n0 = hb_norm(&p0, &h);
    let n1 = hb_norm(&p1, &ih);
    assert!(
        (n0 - n1).abs() < 1e-6 * n0,
        "isometry defect: {n0} vs {n1}"
    );
}

#[test]
fn weighted_machinery_requires_special_flag() {
    let grid = Grid::new(4096).unwrap();
    let b_bnd = BoundaryFunction::from_fn(grid, |z| z * (c(1.0, 0.0) - z) * 0.5);
    let a_bnd = BoundaryFunction::from_fn(grid, |z| (c(1.0, 0.0) + z) * 0.5);
    let p = Pair::from_boundary(b_bnd, a_bnd, false).unwrap();
    let x = HbElement::kernel(&p, c(0.3, 0.0));
    assert!(matches!(
        hb_inner(&p, &x, &x, HbBackend::VbWeighted),
        Err(PairError::NotSpecialPair)
    ));
    assert!(matches!(
        ma_complement(&p, 8, 256),
        Err(PairError::NotSpecialPair)
    ));
    assert!(matches!(ystar_basis(&p, 32), Err(PairError::NotSpecialPair)));
    assert!(matches!(
        intertwining_residual(&p, c(1.0, 0.0), &AnalyticFunction::monomial(1)),
        Err(PairError::NotSpecialPair)
    ));
}

#[test]
fn intertwining_residual_small_for_polynomials() {
    let p = canonical_pair(4096);
    let q = AnalyticFunction::new(vec![c(1.0, 0.0), c(2.0, 0.0)]);
    let res = intertwining_residual(&p, c(1.0, 0.0), &q).unwrap();
    assert!(res < 1e-9, "intertwining residual {res:.3e}");
}
