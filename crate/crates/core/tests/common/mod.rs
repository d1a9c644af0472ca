//! Dense reference computations on small representations.
#![allow(dead_code)]

use kerr_jcm::check::random_state;
use kerr_jcm::dynamics::JointState;
use kerr_jcm::spin::{raising_matrix, SpinRepresentation};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn seeded_state(rep: SpinRepresentation, seed: u64) -> JointState {
    random_state(rep, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Joint index of `|n> (x) |s>`, `s = 0` for the excited level.
pub fn joint_index(n: usize, s: usize) -> usize {
    2 * n + s
}

/// Full joint vector, including the (empty) `|0>|->` component.
pub fn joint_vector(state: &JointState) -> DVector<Complex64> {
    let dim = state.a.len();
    let mut psi = DVector::from_element(2 * dim, ZERO);
    for n in 0..dim {
        psi[joint_index(n, 0)] = state.a[n];
        if n + 1 < dim {
            psi[joint_index(n + 1, 1)] = state.b[n];
        }
    }
    psi
}

pub fn from_joint_vector(psi: &DVector<Complex64>, t: f64) -> JointState {
    let dim = psi.len() / 2;
    let a = (0..dim).map(|n| psi[joint_index(n, 0)]).collect();
    let b = (0..dim)
        .map(|n| if n + 1 < dim { psi[joint_index(n + 1, 1)] } else { ZERO })
        .collect();
    JointState { a, b, t }
}

pub fn density(psi: &DVector<Complex64>) -> DMatrix<Complex64> {
    psi * psi.adjoint()
}

pub fn trace_out_atom(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = rho.nrows() / 2;
    DMatrix::from_fn(dim, dim, |k, l| {
        (0..2).map(|s| rho[(joint_index(k, s), joint_index(l, s))]).sum()
    })
}

pub fn trace_out_field(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = rho.nrows() / 2;
    DMatrix::from_fn(2, 2, |s, r| {
        (0..dim).map(|n| rho[(joint_index(n, s), joint_index(n, r))]).sum()
    })
}

pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `S+ = sqrt(2j) b†` on the field.
pub fn splus(rep: SpinRepresentation) -> DMatrix<Complex64> {
    complexify(&(raising_matrix(rep) * rep.two_j_f64().sqrt()))
}

pub fn number(rep: SpinRepresentation) -> DMatrix<Complex64> {
    DMatrix::from_fn(rep.dim(), rep.dim(), |k, l| {
        if k == l {
            Complex64::new(k as f64, 0.0)
        } else {
            ZERO
        }
    })
}

pub fn quadrature_x(rep: SpinRepresentation) -> DMatrix<Complex64> {
    let sp = splus(rep);
    (&sp + sp.adjoint()) / Complex64::new(2.0 * rep.two_j_f64().sqrt(), 0.0)
}

pub fn quadrature_y(rep: SpinRepresentation) -> DMatrix<Complex64> {
    let sp = splus(rep);
    (&sp - sp.adjoint()) / (I * 2.0 * rep.two_j_f64().sqrt())
}

pub fn expectation(rho: &DMatrix<Complex64>, op: &DMatrix<Complex64>) -> Complex64 {
    (rho * op).trace()
}

pub fn variance(rho: &DMatrix<Complex64>, op: &DMatrix<Complex64>) -> f64 {
    let mean = expectation(rho, op).re;
    expectation(rho, &(op * op)).re - mean * mean
}

/// Lab-frame Hamiltonian: Kerr field, bare atom and the ladder coupling.
pub fn joint_hamiltonian(rep: SpinRepresentation, omega: f64, omega0: f64, lambda: f64) -> DMatrix<Complex64> {
    let dim = rep.dim();
    let two_j = rep.two_j_f64();
    let mut h = DMatrix::from_element(2 * dim, 2 * dim, ZERO);
    for n in 0..dim {
        let nf = n as f64;
        let kerr = omega * (nf + 0.5 - nf * nf / two_j);
        h[(joint_index(n, 0), joint_index(n, 0))] = Complex64::new(kerr + 0.5 * omega0, 0.0);
        h[(joint_index(n, 1), joint_index(n, 1))] = Complex64::new(kerr - 0.5 * omega0, 0.0);
    }
    let raise = raising_matrix(rep);
    // lambda (b sigma+ + b† sigma-)
    for n in 0..rep.top() {
        let g = Complex64::new(lambda * raise[(n + 1, n)], 0.0);
        h[(joint_index(n, 0), joint_index(n + 1, 1))] = g;
        h[(joint_index(n + 1, 1), joint_index(n, 0))] = g;
    }
    h
}

pub fn propagate(h: &DMatrix<Complex64>, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    (h * Complex64::new(0.0, -t)).exp() * psi
}
