mod common;

use common::*;
use kerr_jcm::coherent::{coherent_amplitudes, CoherentStateSpec};
use kerr_jcm::dynamics::{field_moments, reduced_density_atom, to_schrodinger_picture, ModelParams, Propagator};
use kerr_jcm::observables::{atomic_inversion, quadrature_variances};
use kerr_jcm::spin::{kerr_evolve_field, raising_matrix, SpinRepresentation};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn rep(two_j: u32) -> SpinRepresentation {
    SpinRepresentation::new(two_j).unwrap()
}

#[test]
fn field_moments_match_dense_trace() {
    let r = rep(4);
    for seed in 0..5 {
        let state = seeded_state(r, seed);
        let rho_f = trace_out_atom(&density(&joint_vector(&state)));
        let sp = splus(r);
        let n = number(r);
        let m = field_moments(&state, r);
        let dense_n = expectation(&rho_f, &n).re;
        let dense_n2 = expectation(&rho_f, &(&n * &n)).re;
        let dense_sp = expectation(&rho_f, &sp);
        let dense_sp2 = expectation(&rho_f, &(&sp * &sp));
        let dense_spsm = expectation(&rho_f, &(&sp * sp.adjoint())).re;
        assert!((m.n_mean - dense_n).abs() < 1e-12);
        assert!((m.n2_mean - dense_n2).abs() < 1e-12);
        assert!((m.splus_mean - dense_sp).norm() < 1e-12);
        assert!((m.splus2_mean - dense_sp2).norm() < 1e-12);
        assert!((m.splus_sminus_mean - dense_spsm).abs() < 1e-12);
    }
}

#[test]
fn atomic_density_matches_partial_trace() {
    let r = rep(4);
    for seed in 10..15 {
        let state = seeded_state(r, seed);
        let dense = trace_out_field(&density(&joint_vector(&state)));
        let rho = reduced_density_atom(&state);
        for s in 0..2 {
            for q in 0..2 {
                assert!((rho[(s, q)] - dense[(s, q)]).norm() < 1e-12);
            }
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let sigma3 = rho[(0, 0)].re - rho[(1, 1)].re;
        assert!((atomic_inversion(&state) - sigma3).abs() < 1e-12);
    }
}

#[test]
fn quadrature_variances_match_dense_operators() {
    let r = rep(4);
    let (x, y) = (quadrature_x(r), quadrature_y(r));
    for seed in 20..25 {
        let state = seeded_state(r, seed);
        let rho_f = trace_out_atom(&density(&joint_vector(&state)));
        let q = quadrature_variances(&field_moments(&state, r), r);
        assert!((q.var_x - variance(&rho_f, &x)).abs() < 1e-12);
        assert!((q.var_y - variance(&rho_f, &y)).abs() < 1e-12);
        // |<[x, y]>|^2 / 4
        let comm = &x * &y - &y * &x;
        let bound = expectation(&rho_f, &comm).norm_sqr() / 4.0;
        assert!((q.robertson_bound - bound).abs() < 1e-12);
    }
}

#[test]
fn closed_form_matches_joint_matrix_exponential() {
    let r = rep(4);
    for (seed, (omega, omega0, lambda)) in [(1.0, 1.0, 1.0), (1.0, 1.4, 0.7), (0.8, 0.5, 1.2)]
        .into_iter()
        .enumerate()
    {
        let params = ModelParams::new(omega, omega0, lambda, r).unwrap();
        let h = joint_hamiltonian(r, omega, omega0, lambda);
        let state0 = seeded_state(r, 30 + seed as u64);
        let psi0 = joint_vector(&state0);
        let prop = Propagator::new(&params);
        for t in [0.0, 0.37, 3.1, 17.0] {
            let lab = from_joint_vector(&propagate(&h, &psi0, t), t);
            let ours = to_schrodinger_picture(&params, &prop.evolve(&state0, t));
            for n in 0..r.dim() {
                assert!((ours.a[n] - lab.a[n]).norm() < 1e-12, "a[{n}] at t = {t}");
                assert!((ours.b[n] - lab.b[n]).norm() < 1e-12, "b[{n}] at t = {t}");
            }
        }
    }
}

#[test]
fn kerr_evolution_matches_matrix_exponential_of_s1() {
    let r = rep(6);
    let omega = 0.9;
    let n = number(r);
    let two_j = Complex64::new(r.two_j_f64(), 0.0);
    let half = DMatrix::<Complex64>::identity(r.dim(), r.dim()) * Complex64::new(0.5, 0.0);
    let h = (&n + &half - &n * &n / two_j) * Complex64::new(omega, 0.0);
    let sp = splus(r);
    let s1 = (&sp + sp.adjoint()) * Complex64::new(0.5, 0.0);
    let field = coherent_amplitudes(r, CoherentStateSpec::new(0.3, 0.4).unwrap());
    let psi0 = DVector::from_vec(field.clone());
    for t in [0.0, 0.5, 2.0, 11.0] {
        let u = (&h * Complex64::new(0.0, -t)).exp();
        let heisenberg = u.adjoint() * &s1 * &u;
        let reference = (psi0.adjoint() * heisenberg * &psi0)[(0, 0)].re;
        let evolved = DVector::from_vec(kerr_evolve_field(r, omega, &field, t).unwrap());
        let ours = (evolved.adjoint() * &s1 * &evolved)[(0, 0)].re;
        assert!((ours - reference).abs() < 1e-10, "t = {t}: {ours} vs {reference}");
    }
}

#[test]
fn two_level_commutator_by_hand() {
    // 2j = 1: b† = [[0, 0], [1, 0]], [b, b†] = diag(1, -1) = 1 - n/j
    let b_dag = raising_matrix(rep(1));
    assert_eq!(b_dag, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));
    let b = b_dag.transpose();
    let comm = &b * &b_dag - &b_dag * &b;
    assert_eq!(comm, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
}
