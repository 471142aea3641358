use glocal::channel::{choi_matrix, kraus_from_choi, stationary_kraus, KRAUS_DROP_TOL};
use glocal::entanglement::{
    concurrence, entangling_power_closed_form, locally_rotated, product_state_density, ClosedFormMode, ProductStateParams,
};
use glocal::evolution::{evolve, evolve_analytic_pure_global, propagate_matrix, steady_state_numeric};
use glocal::model::{
    build_liouvillian_generic, build_liouvillian_tabulated, devectorize, vectorize, vectorize_matrix, DensityMatrix, ModelParams,
};
use glocal::numerics::{hermitian_eig, integrate_linear_ode, null_space, vec_max_abs_diff, vec_norm, CMatrix};
use glocal::steady::{denominator, fixed_point_state, steady_state_closed_form};
use num_complex::Complex;
use proptest::prelude::*;

type P = ModelParams<f64>;
type Rho = DensityMatrix<f64>;

fn params() -> impl Strategy<Value = P> {
    (0.0..=1.0f64, 0.0..5.0f64, 0.0..5.0f64).prop_map(|(g, ng, nl)| ModelParams::new(g, ng, nl).unwrap())
}

fn unique_params() -> impl Strategy<Value = P> {
    (0.0..1.0f64, 0.0..3.0f64, 0.0..3.0f64).prop_map(|(g, ng, nl)| ModelParams::new(g, ng, nl).unwrap())
}

fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
        .prop_map(move |v| CMatrix::new(n, n, v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix<f64>> {
    complex_matrix(n).prop_map(|a| (&a + &a.adjoint()).scale(0.5))
}

fn state() -> impl Strategy<Value = Rho> {
    complex_matrix(4).prop_filter_map("nonzero", |g| {
        let m = g.matmul(&g.adjoint());
        let tr = m.trace().re;
        (tr > 1e-6).then(|| DensityMatrix::new(m.scale(1.0 / tr)).unwrap())
    })
}

fn unitary() -> impl Strategy<Value = CMatrix<f64>> {
    hermitian(2).prop_map(|h| hermitian_eig(&h, 1e-12).unwrap().vectors)
}

fn product() -> impl Strategy<Value = ProductStateParams<f64>> {
    let pi = std::f64::consts::PI;
    (0.0..=pi, 0.0..=pi, 0.0..2.0 * pi, 0.0..2.0 * pi)
        .prop_map(|(t1, t2, p1, p2)| ProductStateParams::new(t1, t2, p1, p2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eig_reconstructs_dim4(a in hermitian(4)) {
        let e = hermitian_eig(&a, 1e-12).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10 * scale);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let v = &e.vectors;
        prop_assert!(v.adjoint().matmul(v).max_abs_diff(&CMatrix::identity(4)) <= 1e-10);
    }

    #[test]
    fn eig_reconstructs_dim16(a in hermitian(16)) {
        let e = hermitian_eig(&a, 1e-12).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10 * scale);
        let v = &e.vectors;
        prop_assert!(v.adjoint().matmul(v).max_abs_diff(&CMatrix::identity(16)) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn null_space_vectors_are_annihilated(p in params()) {
        let m = build_liouvillian_generic(&p);
        let tol = 1e-10;
        let kernel = null_space(m.matrix(), tol).unwrap();
        prop_assert!(!kernel.is_empty());
        for v in &kernel {
            prop_assert!(vec_norm(&m.apply(v)) <= tol * m.matrix().frobenius_norm());
        }
        // One decade either way does not change the kernel dimension.
        prop_assert_eq!(null_space(m.matrix(), 1e-9).unwrap().len(), kernel.len());
        prop_assert_eq!(null_space(m.matrix(), 1e-11).unwrap().len(), kernel.len());
    }

    #[test]
    fn ode_matches_spectral_solution(h in hermitian(6), v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6), t in 0.0..50.0f64) {
        // Diagonalisable generator with spectrum in [-1, 0]: M = V diag(-|lambda| / max) V^dagger.
        let e = hermitian_eig(&h, 1e-12).unwrap();
        let top = e.values.iter().fold(1e-3f64, |m, x| m.max(x.abs()));
        let rates: Vec<f64> = e.values.iter().map(|x| -x.abs() / top).collect();
        let m = CMatrix::diagonal(&rates).conjugate_by(&e.vectors);
        let v0: Vec<Complex<f64>> = v.into_iter().map(|(a, b)| Complex::new(a, b)).collect();
        let exact = CMatrix::diagonal(&rates.iter().map(|r| (r * t).exp()).collect::<Vec<_>>())
            .conjugate_by(&e.vectors)
            .matvec(&v0);
        let numeric = integrate_linear_ode(&m, &v0, t, 1e-10).unwrap();
        prop_assert!(vec_max_abs_diff(&numeric, &exact) <= 1e-8);
    }

    #[test]
    fn generic_and_tabulated_agree(p in params()) {
        prop_assert!(build_liouvillian_generic(&p).max_abs_diff(&build_liouvillian_tabulated(&p)) <= 1e-12);
    }

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity(p in params()) {
        let m = build_liouvillian_generic(&p);
        prop_assert!(m.trace_preservation_residual() <= 1e-12);
        prop_assert!(m.hermiticity_swap_residual() <= 1e-12);
    }

    #[test]
    fn vectorization_round_trips(rho in state()) {
        let back = devectorize(&vectorize(&rho), true).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn evolution_preserves_state_properties(p in params(), rho in state(), t in 0.0..10.0f64) {
        let out = evolve(&p, &rho, t).unwrap();
        prop_assert!(out.matrix().hermiticity_deviation() <= 1e-8);
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-8);
        prop_assert!(out.min_eigenvalue() >= -1e-7);
    }

    #[test]
    fn closed_form_transient_matches_integration(rho in state(), k in 0usize..5) {
        let t = [0.1, 0.5, 1.0, 5.0, 20.0][k];
        let numeric = evolve(&ModelParams::pure_global(), &rho, t).unwrap();
        prop_assert!(numeric.max_abs_diff(&evolve_analytic_pure_global(&rho, t).unwrap()) <= 1e-8);
    }

    #[test]
    fn numeric_steady_state_forgets_the_input(p in unique_params(), a in state(), b in state()) {
        let sa = steady_state_numeric(&p, &a).unwrap();
        let sb = steady_state_numeric(&p, &b).unwrap();
        prop_assert!(sa.max_abs_diff(&sb) <= 1e-8);
        prop_assert!(sa.max_abs_diff(&steady_state_closed_form(&p, &a).unwrap()) <= 1e-10);
    }

    #[test]
    fn degenerate_steady_state_is_stationary(rho in state()) {
        let p = ModelParams::pure_global();
        let s = steady_state_closed_form(&p, &rho).unwrap();
        prop_assert!((s.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(evolve(&p, &s, 5.0).unwrap().max_abs_diff(&s) <= 1e-8);
    }

    #[test]
    fn choi_is_psd_with_trace_four(p in params(), t in 0.0..5.0f64) {
        let c = choi_matrix(&p, t).unwrap();
        prop_assert!((c.trace() - 4.0).abs() <= 1e-9);
        prop_assert!(c.min_eigenvalue().unwrap() >= -1e-9);
    }

    #[test]
    fn kraus_from_choi_reproduces_evolution(p in params(), t in 0.0..3.0f64) {
        let kraus = kraus_from_choi(&choi_matrix(&p, t).unwrap(), KRAUS_DROP_TOL).unwrap();
        let generator = build_liouvillian_generic(&p);
        for j in 0..4 {
            for k in 0..4 {
                let unit = CMatrix::unit(4, j, k);
                let direct = propagate_matrix(&generator, &unit, t).unwrap();
                prop_assert!(kraus.apply_matrix(&unit).max_abs_diff(&direct) <= 1e-8);
            }
        }
    }

    #[test]
    fn stationary_kraus_outputs_the_fixed_point(p in unique_params(), a in state(), b in state()) {
        let kraus = stationary_kraus(&p).unwrap();
        prop_assert!(kraus.completeness_residual() <= 1e-9);
        let out_a = kraus.apply_matrix(a.matrix());
        prop_assert!(out_a.max_abs_diff(&kraus.apply_matrix(b.matrix())) <= 1e-9);
        prop_assert!(out_a.max_abs_diff(fixed_point_state(&p).unwrap().matrix()) <= 1e-9);
    }

    #[test]
    fn denominator_is_positive(p in params()) {
        prop_assert!(denominator(&p) > 0.0);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(rho in state(), u1 in unitary(), u2 in unitary()) {
        let c = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let rotated = concurrence(&locally_rotated(&rho, &u1, &u2)).unwrap();
        prop_assert!((c - rotated).abs() <= 1e-9);
    }

    #[test]
    fn product_inputs_are_unentangled(s in product()) {
        let rho = product_state_density(&s);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(concurrence(&rho).unwrap() <= 1e-6);
    }

    #[test]
    fn entangling_power_is_continuous(g in 0.0..0.99f64, ng in 0.0..2.0f64, nl in 0.0..3.0f64) {
        let h = 1e-7;
        let e = |g: f64, ng: f64, nl: f64| {
            entangling_power_closed_form(&ModelParams::new(g, ng, nl).unwrap(), ClosedFormMode::Exact).unwrap().unclamped
        };
        let base = e(g, ng, nl);
        prop_assert!((e(g + h, ng, nl) - base).abs() <= 1e-4);
        prop_assert!((e(g, ng + h, nl) - base).abs() <= 1e-4);
        prop_assert!((e(g, ng, nl + h) - base).abs() <= 1e-4);
    }

    #[test]
    fn entangling_power_vanishes_without_local_noise(g in 0.0..1.0f64) {
        let r = entangling_power_closed_form(&ModelParams::new(g, 0.0, 0.0).unwrap(), ClosedFormMode::Exact).unwrap();
        prop_assert_eq!(r.value, 0.0);
    }

    #[test]
    fn global_noise_degrades_entangling_power(g in 0.0..0.999f64, nl in 0.0..3.0f64) {
        let e = |ng: f64| entangling_power_closed_form(&ModelParams::new(g, ng, nl).unwrap(), ClosedFormMode::Exact).unwrap().value;
        prop_assert!(e(0.0) >= e(0.01));
        prop_assert!(e(0.01) >= e(0.1));
    }
}

#[test]
fn fixed_point_is_annihilated_on_grid() {
    let axis: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
    let occ = [0.0, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    for &g in &axis {
        for &ng in &occ {
            for &nl in &occ {
                let p = ModelParams::new(g, ng, nl).unwrap();
                if p.is_degenerate() {
                    continue;
                }
                let fixed = fixed_point_state(&p).unwrap();
                let m = build_liouvillian_generic(&p);
                assert!(vec_norm(&m.apply(&vectorize_matrix(fixed.matrix()))) <= 1e-10, "{p:?}");
            }
        }
    }
}
