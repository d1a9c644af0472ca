//! Finite spin-j realization of a single field mode.
//!
//! The basis is labelled by the excitation number `n = m + j`, `n = 0..=2j`.
//! Every formula is written in terms of `n / 2j`, so integer and
//! half-integer `j` share one code path.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JcmError, Result};

/// A `(2j+1)`-dimensional irreducible representation of su(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinRepresentation {
    two_j: u32,
}

impl SpinRepresentation {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(JcmError::invalid("two_j", "must be at least 1"));
        }
        Ok(Self { two_j })
    }

    /// Maximum excitation number `2j`.
    #[inline]
    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    #[inline]
    pub fn two_j_f64(&self) -> f64 {
        f64::from(self.two_j)
    }

    /// Hilbert-space dimension `2j + 1`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Highest valid excitation index (`2j`).
    #[inline]
    pub fn top(&self) -> usize {
        self.two_j as usize
    }

    pub(crate) fn check_index(&self, n: usize) -> Result<()> {
        if n > self.top() {
            return Err(JcmError::IndexOutOfRange {
                index: n,
                max: self.top(),
            });
        }
        Ok(())
    }

    /// `sqrt((n+1)(1 - n/2j))` without bounds checking; callers guarantee `n <= 2j`.
    #[inline]
    pub(crate) fn raising_coeff_unchecked(&self, n: usize) -> f64 {
        let n = n as f64;
        let fill = 1.0 - n / self.two_j_f64();
        ((n + 1.0) * fill.max(0.0)).sqrt()
    }
}

impl TryFrom<u32> for SpinRepresentation {
    type Error = JcmError;

    fn try_from(two_j: u32) -> Result<Self> {
        Self::new(two_j)
    }
}

impl From<SpinRepresentation> for u32 {
    fn from(rep: SpinRepresentation) -> u32 {
        rep.two_j
    }
}

pub fn make_representation(two_j: u32) -> Result<SpinRepresentation> {
    SpinRepresentation::new(two_j)
}

/// Matrix element `<n+1| b† |n>`; zero at the top of the ladder.
pub fn raising_coeff(rep: SpinRepresentation, n: usize) -> Result<f64> {
    rep.check_index(n)?;
    Ok(rep.raising_coeff_unchecked(n))
}

/// Eigenvalue of `b† b` on `|n>`, i.e. `n (1 - (n-1)/2j)`.
pub fn bdag_b_eigenvalue(rep: SpinRepresentation, n: usize) -> Result<f64> {
    rep.check_index(n)?;
    if n == 0 {
        return Ok(0.0);
    }
    let n = n as f64;
    Ok(n * (rep.two_j_f64() + 1.0 - n) / rep.two_j_f64())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KerrSpectrum {
    energies: Vec<f64>,
}

impl KerrSpectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> Option<f64> {
        self.energies.get(n).copied()
    }
}

/// `omega (n + 1/2 - n^2 / 2j)` evaluated for any real `n`.
#[inline]
pub(crate) fn kerr_energy(rep: SpinRepresentation, omega: f64, n: f64) -> f64 {
    omega * (n + 0.5 - n * n / rep.two_j_f64())
}

pub fn kerr_spectrum(rep: SpinRepresentation, omega: f64) -> Result<KerrSpectrum> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(JcmError::invalid("omega", format!("must be positive, got {omega}")));
    }
    let energies = (0..rep.dim()).map(|n| kerr_energy(rep, omega, n as f64)).collect();
    Ok(KerrSpectrum { energies })
}

fn number_relation_radicand(rep: SpinRepresentation, lambda_bb: f64) -> Result<(f64, f64)> {
    let d = rep.two_j_f64() + 1.0;
    // 8j = 4 * (2j); subtracting before dividing keeps integer eigenvalues exact
    let scaled = 4.0 * rep.two_j_f64() * lambda_bb;
    let mut radicand = (d * d - scaled) / (d * d);
    // the fold n = j + 1/2 is ill-conditioned; rounding noise there is a zero
    if radicand.abs() <= 8.0 * f64::EPSILON {
        radicand = 0.0;
    }
    if !radicand.is_finite() || radicand < -1e-12 {
        return Err(JcmError::Domain(format!(
            "b†b eigenvalue {lambda_bb} exceeds the representation bound (radicand {radicand})"
        )));
    }
    Ok((d, radicand.max(0.0).sqrt()))
}

/// Number operator recovered from a `b† b` eigenvalue on the principal branch,
/// `(2j+1)/2 [1 - sqrt(1 - 8j λ / (2j+1)^2)]`.
///
/// `b† b` is symmetric under `n -> 2j + 1 - n`, so this returns the lower member
/// of each degenerate pair (`n <= j + 1/2`).
pub fn number_from_bdag_b(rep: SpinRepresentation, lambda_bb: f64) -> Result<f64> {
    let (d, root) = number_relation_radicand(rep, lambda_bb)?;
    Ok(0.5 * d * (1.0 - root))
}

/// Upper branch of [`number_from_bdag_b`], recovering `n >= j + 1/2`.
pub fn number_from_bdag_b_upper(rep: SpinRepresentation, lambda_bb: f64) -> Result<f64> {
    let (d, root) = number_relation_radicand(rep, lambda_bb)?;
    Ok(0.5 * d * (1.0 + root))
}

/// Sparse real matrix holding explicit ladder operators; used to check
/// algebraic identities at dimensions where dense products are too slow.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.rows[row].push((col, value));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                out.push(j, i, v);
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = Self::zeros(self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for &(k, a) in row {
                for &(j, b) in &rhs.rows[k] {
                    match acc.iter_mut().find(|(c, _)| *c == j) {
                        Some(entry) => entry.1 += a * b,
                        None => acc.push((j, a * b)),
                    }
                }
            }
            out.rows[i] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }
}

/// Explicit `b†` with entries `<n+1| b† |n>`.
pub fn raising_operator(rep: SpinRepresentation) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(rep.dim());
    for n in 0..rep.top() {
        m.push(n + 1, n, rep.raising_coeff_unchecked(n));
    }
    m
}

/// Dense `b†`; intended for small dimensions.
pub fn raising_matrix(rep: SpinRepresentation) -> DMatrix<f64> {
    raising_operator(rep).to_dense()
}

/// `[b, b†] - (1 - n/j)` from explicit ladder matrices. Zero up to rounding.
pub fn commutator_defect(rep: SpinRepresentation) -> DMatrix<f64> {
    let raise = raising_operator(rep);
    let lower = raise.transpose();
    let mut defect = lower.matmul(&raise).to_dense() - raise.matmul(&lower).to_dense();
    for n in 0..rep.dim() {
        // n / j = 2n / 2j
        defect[(n, n)] -= 1.0 - 2.0 * n as f64 / rep.two_j_f64();
    }
    defect
}

/// Free evolution under the Kerr Hamiltonian: `c_n -> exp(-i E_n t) c_n`.
pub fn kerr_evolve_field(
    rep: SpinRepresentation,
    omega: f64,
    amplitudes: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    if amplitudes.len() != rep.dim() {
        return Err(JcmError::invalid(
            "amplitudes",
            format!("expected length {}, got {}", rep.dim(), amplitudes.len()),
        ));
    }
    let spectrum = kerr_spectrum(rep, omega)?;
    Ok(amplitudes
        .iter()
        .zip(spectrum.energies())
        .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
        .collect())
}
