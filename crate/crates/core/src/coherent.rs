//! SU(2) coherent states of the field and their excitation statistics.
//!
//! Probabilities are evaluated in log space with the saddle-point form
//! (Stirling remainder plus deviance) so that no binomial coefficient is ever
//! materialized. This keeps `2j` in the 10^5 range free of overflow and of the
//! cancellation that plagues `lgamma(N+1) - lgamma(n+1) - lgamma(N-n+1)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JcmError, Result};
use crate::spin::SpinRepresentation;

/// Tail mass allowed beyond a Poisson truncation window.
pub const POISSON_TAIL_LIMIT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentStateSpec {
    chi: f64,
    phi: f64,
}

impl CoherentStateSpec {
    pub fn new(chi: f64, phi: f64) -> Result<Self> {
        check_chi(chi)?;
        if !phi.is_finite() {
            return Err(JcmError::invalid("phi", "must be finite"));
        }
        Ok(Self {
            chi,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn with_chi(chi: f64) -> Result<Self> {
        Self::new(chi, 0.0)
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `|xi|^2 = chi / (1 - chi)`; infinite for the top state.
    pub fn xi_abs2(&self) -> f64 {
        if self.chi >= 1.0 {
            f64::INFINITY
        } else {
            self.chi / (1.0 - self.chi)
        }
    }

    /// `xi = |xi| e^{-i phi}`, or `None` at `chi = 1`.
    pub fn xi(&self) -> Option<Complex64> {
        (self.chi < 1.0).then(|| Complex64::from_polar(self.xi_abs2().sqrt(), -self.phi))
    }

    /// Polar angle on the Bloch sphere, `|xi| = tan(theta/2)`.
    pub fn theta(&self) -> f64 {
        2.0 * self.chi.sqrt().asin()
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&chi) {
        return Err(JcmError::invalid("chi", format!("must lie in [0, 1], got {chi}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonDistribution {
    pub probs: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl PhotonDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let variance = probs
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = n as f64 - mean;
                d * d * p
            })
            .sum();
        Self { probs, mean, variance }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

// ln Γ(n+1) - (n + 1/2) ln n + n - ln sqrt(2π), n = 0..=15
#[allow(clippy::excessive_precision)]
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258,
    0.041_340_695_955_409_294,
    0.027_677_925_684_998_339,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_770,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_871,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_530,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLERR_TABLE[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated by series near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// Binomial pmf `C(size, k) p^k q^(size-k)` with `q = 1 - p` supplied by the
/// caller. The arguments are put in a canonical order first, so
/// `pmf(k, p, q) == pmf(size - k, q, p)` bit for bit.
fn binomial_pmf(k: u64, size: u64, p: f64, q: f64) -> f64 {
    let (k, p, q) = if k > size - k || (k == size - k && p > q) {
        (size - k, q, p)
    } else {
        (k, p, q)
    };
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == size { 1.0 } else { 0.0 };
    }
    let n = size as f64;
    if k == 0 {
        if size == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 { -bd0(n, n * q) - n * p } else { n * q.ln() };
        return lc.exp();
    }
    let x = k as f64;
    let lc = stirlerr(size) - (stirlerr(k) + stirlerr(size - k)) - (bd0(x, n * p) + bd0(n - x, n * q));
    let lf = (TAU * x * (n - x) / n).ln();
    (lc - 0.5 * lf).exp()
}

fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if k == 0 {
        return (-mean).exp();
    }
    let x = k as f64;
    (-stirlerr(k) - bd0(x, mean)).exp() / (TAU * x).sqrt()
}

/// Binomial excitation statistics `P_n = C(2j, n) chi^n (1-chi)^(2j-n)`.
pub fn photon_distribution(rep: SpinRepresentation, chi: f64) -> Result<PhotonDistribution> {
    check_chi(chi)?;
    let size = u64::from(rep.two_j());
    let q = 1.0 - chi;
    let probs = (0..=size).map(|k| binomial_pmf(k, size, chi, q)).collect();
    Ok(PhotonDistribution::from_probs(probs))
}

/// Coherent-state amplitudes `c_n = C(2j,n)^(1/2) xi^n / (1 + |xi|^2)^j`.
///
/// `chi = 1` yields the top basis state `|2j>` directly.
pub fn coherent_amplitudes(rep: SpinRepresentation, spec: CoherentStateSpec) -> Vec<Complex64> {
    let size = u64::from(rep.two_j());
    let chi = spec.chi();
    let q = 1.0 - chi;
    (0..=size)
        .map(|k| {
            let modulus = binomial_pmf(k, size, chi, q).sqrt();
            if modulus == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(modulus, -(k as f64) * spec.phi())
            }
        })
        .collect()
}

/// `<n> = 2j |xi|^2 / (1 + |xi|^2)`.
pub fn mean_photon(rep: SpinRepresentation, xi_abs2: f64) -> Result<f64> {
    if xi_abs2.is_nan() || xi_abs2 < 0.0 {
        return Err(JcmError::invalid("xi_abs2", "must be non-negative"));
    }
    if xi_abs2.is_infinite() {
        return Ok(rep.two_j_f64());
    }
    Ok(rep.two_j_f64() * xi_abs2 / (1.0 + xi_abs2))
}

pub fn chi_from_mean(rep: SpinRepresentation, mean_n: f64) -> Result<f64> {
    if !(0.0..=rep.two_j_f64()).contains(&mean_n) {
        return Err(JcmError::invalid(
            "mean_n",
            format!("must lie in [0, {}], got {mean_n}", rep.two_j()),
        ));
    }
    Ok(mean_n / rep.two_j_f64())
}

/// Poisson mass beyond `n_max`, summed term by term.
pub fn poisson_tail(mean_n: f64, n_max: usize) -> f64 {
    let mut tail = 0.0;
    let mut k = n_max as u64 + 1;
    loop {
        let p = poisson_pmf(k, mean_n);
        tail += p;
        if (k as f64) > mean_n && p < tail * 1e-17 + 1e-300 {
            return tail;
        }
        k += 1;
    }
}

/// Smallest truncation whose Poisson tail is below [`POISSON_TAIL_LIMIT`].
pub fn poisson_window(mean_n: f64) -> usize {
    let mut n_max = mean_n.ceil() as usize;
    while poisson_tail(mean_n, n_max) >= POISSON_TAIL_LIMIT {
        n_max += 1 + n_max / 16;
    }
    while n_max > 0 && poisson_tail(mean_n, n_max - 1) < POISSON_TAIL_LIMIT {
        n_max -= 1;
    }
    n_max
}

/// Poisson(`mean_n`) on `0..=n_max`, renormalized over the window.
pub fn poisson_reference(mean_n: f64, n_max: usize) -> Result<PhotonDistribution> {
    if !(mean_n > 0.0 && mean_n.is_finite()) {
        return Err(JcmError::invalid("mean_n", format!("must be positive, got {mean_n}")));
    }
    let tail = poisson_tail(mean_n, n_max);
    if tail >= POISSON_TAIL_LIMIT {
        return Err(JcmError::Truncation {
            n_max,
            tail,
            limit: POISSON_TAIL_LIMIT,
        });
    }
    let mut probs: Vec<f64> = (0..=n_max as u64).map(|k| poisson_pmf(k, mean_n)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(PhotonDistribution::from_probs(probs))
}

/// Total-variation distance; entries missing from the shorter support count as zero.
pub fn total_variation(p: &PhotonDistribution, q: &PhotonDistribution) -> f64 {
    let len = p.probs.len().max(q.probs.len());
    0.5 * (0..len)
        .map(|n| {
            let a = p.probs.get(n).copied().unwrap_or(0.0);
            let b = q.probs.get(n).copied().unwrap_or(0.0);
            (a - b).abs()
        })
        .sum::<f64>()
}
