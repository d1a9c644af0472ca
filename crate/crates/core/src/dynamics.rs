//! Interaction-picture dynamics of a two-level atom coupled to the spin-j mode.
//!
//! The state is kept in the ladder layout
//! `|psi> = sum_n a_n |n>|+> + b_n |n+1>|->`, `n = 0..=2j`, with `b_{2j} = 0`.
//! Each `n` is an independent two-level block driven by
//! `i a_n' = g_n e^{i Omega_n t} b_n`, `i b_n' = g_n e^{-i Omega_n t} a_n`
//! where `g_n = lambda * raising_coeff(n)`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JcmError, Result};
use crate::spin::{kerr_energy, SpinRepresentation};

/// Normalization slack accepted on inputs.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Largest probability tolerated in the dark sector `|0>|->`.
pub const DARK_SECTOR_TOLERANCE: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub rep: SpinRepresentation,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64, rep: SpinRepresentation) -> Result<Self> {
        for (name, v) in [("omega", omega), ("omega0", omega0), ("lambda", lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(JcmError::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            omega,
            omega0,
            lambda,
            rep,
        })
    }

    /// `omega = omega0 = lambda = 1`.
    pub fn resonant(rep: SpinRepresentation) -> Self {
        Self {
            omega: 1.0,
            omega0: 1.0,
            lambda: 1.0,
            rep,
        }
    }

    #[inline]
    fn detuning_unchecked(&self, n: usize) -> f64 {
        // omega0 - omega (1 - n/j - 1/2j)
        self.omega0 - self.omega + self.omega * (2 * n + 1) as f64 / self.rep.two_j_f64()
    }

    #[inline]
    fn coupling_unchecked(&self, n: usize) -> f64 {
        self.lambda * self.rep.raising_coeff_unchecked(n)
    }
}

pub fn detuning(params: &ModelParams, n: usize) -> Result<f64> {
    params.rep.check_index(n)?;
    Ok(params.detuning_unchecked(n))
}

/// `Gamma_n = sqrt(Omega_n^2 + 4 lambda^2 (n+1)(1 - n/2j))`.
pub fn rabi_frequency(params: &ModelParams, n: usize) -> Result<f64> {
    params.rep.check_index(n)?;
    let om = params.detuning_unchecked(n);
    Ok(om.hypot(2.0 * params.coupling_unchecked(n)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub t: f64,
}

impl JointState {
    pub fn new(rep: SpinRepresentation, a: Vec<Complex64>, b: Vec<Complex64>, t: f64) -> Result<Self> {
        if a.len() != rep.dim() || b.len() != rep.dim() {
            return Err(JcmError::invalid(
                "amplitudes",
                format!("expected two vectors of length {}", rep.dim()),
            ));
        }
        if b[rep.top()] != ZERO {
            return Err(JcmError::invalid("b", "b[2j] must vanish: |2j+1> does not exist"));
        }
        let state = Self { a, b, t };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(JcmError::NotNormalized {
                what: "joint state",
                norm_sqr,
            });
        }
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|c| c.norm_sqr()).sum()
    }

    /// `|a_n|^2 + |b_n|^2`, conserved by each two-level block.
    pub fn block_population(&self, n: usize) -> f64 {
        self.a[n].norm_sqr() + self.b[n].norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomState {
    Excited,
    Ground,
    Superposition { excited: Complex64, ground: Complex64 },
}

impl AtomState {
    fn amplitudes(&self) -> (Complex64, Complex64) {
        match *self {
            AtomState::Excited => (Complex64::new(1.0, 0.0), ZERO),
            AtomState::Ground => (ZERO, Complex64::new(1.0, 0.0)),
            AtomState::Superposition { excited, ground } => (excited, ground),
        }
    }
}

/// Maps the product `|field> (x) |atom>` onto the ladder layout.
///
/// Fails with [`JcmError::UnsupportedSector`] when the product puts weight on
/// `|0>|->`, which no `(a_n, b_n)` amplitude represents.
pub fn initial_state(rep: SpinRepresentation, field: &[Complex64], atom: AtomState) -> Result<JointState> {
    if field.len() != rep.dim() {
        return Err(JcmError::invalid(
            "field",
            format!("expected length {}, got {}", rep.dim(), field.len()),
        ));
    }
    let field_norm: f64 = field.iter().map(|c| c.norm_sqr()).sum();
    if (field_norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(JcmError::NotNormalized {
            what: "field amplitudes",
            norm_sqr: field_norm,
        });
    }
    let (ce, cg) = atom.amplitudes();
    let atom_norm = ce.norm_sqr() + cg.norm_sqr();
    if (atom_norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(JcmError::NotNormalized {
            what: "atom amplitudes",
            norm_sqr: atom_norm,
        });
    }
    let dark = (field[0] * cg).norm_sqr();
    if dark > DARK_SECTOR_TOLERANCE {
        return Err(JcmError::UnsupportedSector { probability: dark });
    }
    let a = field.iter().map(|c| c * ce).collect();
    let mut b = vec![ZERO; rep.dim()];
    for n in 1..rep.dim() {
        b[n - 1] = field[n] * cg;
    }
    Ok(JointState { a, b, t: 0.0 })
}

/// Precomputed per-block frequencies for repeated closed-form evaluation.
#[derive(Clone, Debug)]
pub struct Propagator {
    params: ModelParams,
    detuning: Vec<f64>,
    coupling: Vec<f64>,
    rabi: Vec<f64>,
}

impl Propagator {
    pub fn new(params: &ModelParams) -> Self {
        let dim = params.rep.dim();
        let detuning: Vec<f64> = (0..dim).map(|n| params.detuning_unchecked(n)).collect();
        let coupling: Vec<f64> = (0..dim).map(|n| params.coupling_unchecked(n)).collect();
        let rabi = detuning
            .iter()
            .zip(&coupling)
            .map(|(om, g)| om.hypot(2.0 * g))
            .collect();
        Self {
            params: *params,
            detuning,
            coupling,
            rabi,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Advances `state` from `state.t` to absolute interaction-picture time `t`.
    pub fn evolve(&self, state: &JointState, t: f64) -> JointState {
        let t0 = state.t;
        let tau = t - t0;
        let dim = state.dim();
        let mut a = Vec::with_capacity(dim);
        let mut b = Vec::with_capacity(dim);
        for n in 0..dim {
            let (om, g, gamma) = (self.detuning[n], self.coupling[n], self.rabi[n]);
            let half = 0.5 * gamma * tau;
            let (sin, cos) = half.sin_cos();
            // sin(Gamma tau / 2) / Gamma, with its Gamma -> 0 limit
            let s_over_gamma = if half.abs() < 1e-8 { 0.5 * tau } else { sin / gamma };
            let mixing = Complex64::new(0.0, -2.0 * g * s_over_gamma);
            let diag = Complex64::new(cos, -om * s_over_gamma);
            // rotating frame: a = A e^{i Omega t / 2}, b = B e^{-i Omega t / 2}
            let (a0, b0) = if t0 == 0.0 {
                (state.a[n], state.b[n])
            } else {
                let back = Complex64::from_polar(1.0, -0.5 * om * t0);
                (state.a[n] * back, state.b[n] * back.conj())
            };
            let a_t = diag * a0 + mixing * b0;
            let b_t = diag.conj() * b0 + mixing * a0;
            let phase = Complex64::from_polar(1.0, 0.5 * om * t);
            a.push(a_t * phase);
            b.push(b_t * phase.conj());
        }
        JointState { a, b, t }
    }
}

/// Exact evolution of every two-level block to time `t`.
pub fn evolve_closed_form(params: &ModelParams, state0: &JointState, t: f64) -> JointState {
    Propagator::new(params).evolve(state0, t)
}

/// Applies `exp(-i H0 t)` so that the amplitudes describe the Schrödinger-picture state.
pub fn to_schrodinger_picture(params: &ModelParams, state: &JointState) -> JointState {
    let t = state.t;
    let half_w0 = 0.5 * params.omega0;
    let rotate = |amp: Complex64, energy: f64| amp * Complex64::from_polar(1.0, -energy * t);
    let a = state
        .a
        .iter()
        .enumerate()
        .map(|(n, &c)| rotate(c, kerr_energy(params.rep, params.omega, n as f64) + half_w0))
        .collect();
    let b = state
        .b
        .iter()
        .enumerate()
        .map(|(n, &c)| rotate(c, kerr_energy(params.rep, params.omega, (n + 1) as f64) - half_w0))
        .collect();
    JointState { a, b, t }
}

/// Field expectations, all in terms of the un-normalized spin operators `S±`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    pub n_mean: f64,
    pub n2_mean: f64,
    pub splus_mean: Complex64,
    pub splus2_mean: Complex64,
    pub splus_sminus_mean: f64,
}

impl FieldMoments {
    pub fn n_variance(&self) -> f64 {
        self.n2_mean - self.n_mean * self.n_mean
    }
}

/// Moments of the reduced field state, read off the diagonal and the first
/// two off-diagonals of `rho_F` without building it.
pub fn field_moments(state: &JointState, rep: SpinRepresentation) -> FieldMoments {
    let dim = rep.dim();
    let two_j = rep.two_j_f64();
    let sqrt_two_j = two_j.sqrt();
    // <k|rho_F|l> = a_k a_l* + b_{k-1} b_{l-1}*
    let rho = |k: usize, l: usize| -> Complex64 {
        let mut v = state.a[k] * state.a[l].conj();
        if k >= 1 && l >= 1 {
            v += state.b[k - 1] * state.b[l - 1].conj();
        }
        v
    };

    let mut n_mean = 0.0;
    let mut n2_mean = 0.0;
    let mut splus_sminus = 0.0;
    let mut splus = ZERO;
    let mut splus2 = ZERO;
    for n in 0..dim {
        let p = rho(n, n).re;
        let nf = n as f64;
        n_mean += nf * p;
        n2_mean += nf * nf * p;
        // S+ S- |n> = n (2j - n + 1) |n>
        splus_sminus += nf * (two_j - nf + 1.0) * p;
        if n + 1 < dim {
            let c_n = rep.raising_coeff_unchecked(n);
            splus += rho(n, n + 1) * (sqrt_two_j * c_n);
            if n + 2 < dim {
                let c_n1 = rep.raising_coeff_unchecked(n + 1);
                splus2 += rho(n, n + 2) * (two_j * c_n * c_n1);
            }
        }
    }
    FieldMoments {
        n_mean,
        n2_mean,
        splus_mean: splus,
        splus2_mean: splus2,
        splus_sminus_mean: splus_sminus,
    }
}

/// Atomic reduced density matrix in the basis `(|+>, |->)`.
pub fn reduced_density_atom(state: &JointState) -> Matrix2<Complex64> {
    let pp: f64 = state.a.iter().map(|c| c.norm_sqr()).sum();
    let mm: f64 = state.b.iter().map(|c| c.norm_sqr()).sum();
    // rho_{+-} = sum_k <k,+|psi><psi|k,-> = sum_n a_{n+1} b_n*
    let pm: Complex64 = state.a.iter().skip(1).zip(&state.b).map(|(a, b)| a * b.conj()).sum();
    Matrix2::new(Complex64::new(pp, 0.0), pm, pm.conj(), Complex64::new(mm, 0.0))
}
