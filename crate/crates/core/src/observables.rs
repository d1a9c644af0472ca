//! Atomic and field observables: inversion, collapse-revival timing, Mandel Q
//! and quadrature variances.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coherent::{photon_distribution, poisson_reference};
use crate::dynamics::{FieldMoments, JointState, ModelParams, Propagator};
use crate::error::{JcmError, Result};
use crate::par::{map_samples, Execution};
use crate::spin::SpinRepresentation;

/// Variance of either quadrature for the vacuum and for coherent light.
pub const SQUEEZING_THRESHOLD: f64 = 0.25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub sigma3: Option<f64>,
    pub q_mandel: Option<f64>,
    pub var_x: Option<f64>,
    pub var_y: Option<f64>,
    pub robertson_bound: Option<f64>,
}

/// `<sigma_3> = sum_n |a_n|^2 - |b_n|^2`.
pub fn atomic_inversion(state: &JointState) -> f64 {
    let up: f64 = state.a.iter().map(|c| c.norm_sqr()).sum();
    let down: f64 = state.b.iter().map(|c| c.norm_sqr()).sum();
    up - down
}

#[derive(Clone, Copy, Debug)]
struct RabiTerm {
    weight: f64,
    floor: f64,
    frequency: f64,
}

impl RabiTerm {
    #[inline]
    fn at(&self, t: f64) -> f64 {
        self.weight * (self.floor + (1.0 - self.floor) * (self.frequency * t).cos())
    }
}

fn sum_terms(terms: &[RabiTerm], t: f64) -> f64 {
    terms.iter().map(|term| term.at(t)).sum()
}

/// Closed-form inversion for an excited atom and a coherent field,
/// `sum_n P_n(chi) [Omega_n^2/Gamma_n^2 + (1 - Omega_n^2/Gamma_n^2) cos(Gamma_n t)]`.
///
/// Terms are precomputed once so the curve can be sampled cheaply.
#[derive(Clone, Debug)]
pub struct InversionCurve {
    terms: Vec<RabiTerm>,
}

impl InversionCurve {
    pub fn new(params: &ModelParams, chi: f64) -> Result<Self> {
        let probs = photon_distribution(params.rep, chi)?.probs;
        let terms = probs
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(n, &weight)| {
                let om = crate::dynamics::detuning(params, n).expect("n within ladder");
                let gamma = crate::dynamics::rabi_frequency(params, n).expect("n within ladder");
                let floor = if gamma == 0.0 { 1.0 } else { (om / gamma).powi(2) };
                RabiTerm {
                    weight,
                    floor,
                    frequency: gamma,
                }
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn at(&self, t: f64) -> f64 {
        sum_terms(&self.terms, t)
    }
}

pub fn inversion_closed_form(params: &ModelParams, chi: f64, t: f64) -> Result<f64> {
    Ok(InversionCurve::new(params, chi)?.at(t))
}

/// Scaled revival time `lambda t_R` estimated for `2j >> 1`.
pub fn revival_time_estimate(params: &ModelParams, chi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&chi) {
        return Err(JcmError::Domain(format!(
            "revival estimate needs chi in [0, 1), got {chi}"
        )));
    }
    let mean = params.rep.two_j_f64() * chi;
    let chi2 = chi * chi;
    let upper = (chi2 + (2.0 + mean) * (1.0 - chi)).sqrt();
    let lower = (chi2 + (1.0 + mean) * (1.0 - chi)).sqrt();
    Ok(PI / (upper - lower))
}

/// `Q = (<(Δn)^2> - <n>) / <n>`.
pub fn mandel_q(moments: &FieldMoments) -> Result<f64> {
    if moments.n_mean <= 0.0 {
        return Err(JcmError::UndefinedObservable("Mandel Q (zero mean excitation)"));
    }
    Ok((moments.n_variance() - moments.n_mean) / moments.n_mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadratures {
    pub var_x: f64,
    pub var_y: f64,
    pub robertson_bound: f64,
}

impl Quadratures {
    pub fn x_squeezed(&self) -> bool {
        self.var_x < SQUEEZING_THRESHOLD
    }

    pub fn y_squeezed(&self) -> bool {
        self.var_y < SQUEEZING_THRESHOLD
    }

    /// `var_x var_y - bound`; non-negative for any physical state.
    pub fn robertson_slack(&self) -> f64 {
        self.var_x * self.var_y - self.robertson_bound
    }
}

/// `(1/16) (1 - <n>/j)^2`, i.e. `|<[x, y]>|^2 / 4` with `[x, y] = i S_3 / 2j`.
fn robertson_bound(moments: &FieldMoments, rep: SpinRepresentation) -> f64 {
    let s = 1.0 - 2.0 * moments.n_mean / rep.two_j_f64();
    s * s / 16.0
}

/// Variances of `x = S_x / sqrt(2j)` and `y = S_y / sqrt(2j)`.
///
/// Uses `<S_- S_+> = <S_+ S_-> - 2 <S_3>`, so
/// `<x^2> = (1/2j) [ (<S+S-> - <S3>)/2 + Re<S+^2>/2 ]`.
pub fn quadrature_variances(moments: &FieldMoments, rep: SpinRepresentation) -> Quadratures {
    let two_j = rep.two_j_f64();
    let s3 = moments.n_mean - 0.5 * two_j;
    let symmetric = 0.5 * (moments.splus_sminus_mean - s3);
    let anti = 0.5 * moments.splus2_mean.re;
    let mx = moments.splus_mean.re;
    let my = moments.splus_mean.im;
    Quadratures {
        var_x: (symmetric + anti - mx * mx) / two_j,
        var_y: (symmetric - anti - my * my) / two_j,
        robertson_bound: robertson_bound(moments, rep),
    }
}

/// Variances without the `-<S_3>/2` ordering term.
/// Kept for comparison; it gives zero instead of 1/4 on the vacuum.
pub fn quadrature_variances_without_ordering(moments: &FieldMoments, rep: SpinRepresentation) -> Quadratures {
    let two_j = rep.two_j_f64();
    let base = 0.5 * moments.splus_sminus_mean;
    let anti = 0.5 * moments.splus2_mean.re;
    let mx = moments.splus_mean.re;
    let my = moments.splus_mean.im;
    Quadratures {
        var_x: (base + anti - mx * mx) / two_j,
        var_y: (base - anti - my * my) / two_j,
        robertson_bound: robertson_bound(moments, rep),
    }
}

/// Harmonic-oscillator reference: Poisson weights, `Gamma_n = sqrt(Δ^2 + 4 λ^2 (n+1))`.
#[derive(Clone, Debug)]
pub struct StandardJcm {
    terms: Vec<RabiTerm>,
}

impl StandardJcm {
    pub fn new(mean_n: f64, delta: f64, lambda: f64, n_max: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(JcmError::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !delta.is_finite() {
            return Err(JcmError::invalid("delta", "must be finite"));
        }
        let probs = poisson_reference(mean_n, n_max)?.probs;
        let terms = probs
            .iter()
            .enumerate()
            .map(|(n, &weight)| {
                let gamma = delta.hypot(2.0 * lambda * ((n + 1) as f64).sqrt());
                RabiTerm {
                    weight,
                    floor: (delta / gamma).powi(2),
                    frequency: gamma,
                }
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn at(&self, t: f64) -> f64 {
        sum_terms(&self.terms, t)
    }
}

pub fn standard_jcm_inversion(mean_n: f64, delta: f64, lambda: f64, t: f64, n_max: usize) -> Result<f64> {
    Ok(StandardJcm::new(mean_n, delta, lambda, n_max)?.at(t))
}

/// Default grid spacing for revival searches, in scaled time.
pub const PEAK_GRID_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

/// Maximum of `f` on `[lo, hi]`: uniform grid scan, then a parabola through
/// the best sample and its neighbours.
pub fn locate_peak<F>(exec: Execution, lo: f64, hi: f64, step: f64, f: F) -> Peak
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    assert!(hi > lo && step > 0.0, "empty search window");
    let count = ((hi - lo) / step).round() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let values = map_samples(exec, &grid, &f);
    let (best, &value) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    if best == 0 || best + 1 == count {
        return Peak { t: grid[best], value };
    }
    let (fl, fc, fr) = (values[best - 1], value, values[best + 1]);
    let curvature = fl - 2.0 * fc + fr;
    if curvature >= 0.0 {
        return Peak { t: grid[best], value };
    }
    let shift = 0.5 * step * (fl - fr) / curvature;
    let t = grid[best] + shift;
    let refined = f(t);
    if refined >= value {
        Peak { t, value: refined }
    } else {
        Peak { t: grid[best], value }
    }
}

/// Inversion sampled through the full state evolution, for cross-checks of
/// [`InversionCurve`].
pub fn inversion_via_states(params: &ModelParams, initial: &JointState, times: &[f64]) -> Vec<f64> {
    let prop = Propagator::new(params);
    times
        .iter()
        .map(|&t| atomic_inversion(&prop.evolve(initial, t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{coherent_amplitudes, poisson_window, CoherentStateSpec};
    use crate::dynamics::{field_moments, initial_state, AtomState};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn rep(two_j: u32) -> SpinRepresentation {
        SpinRepresentation::new(two_j).unwrap()
    }

    fn coherent_excited(r: SpinRepresentation, chi: f64) -> JointState {
        let field = coherent_amplitudes(r, CoherentStateSpec::with_chi(chi).unwrap());
        initial_state(r, &field, AtomState::Excited).unwrap()
    }

    #[test]
    fn inversion_starts_at_one() {
        let p = ModelParams::resonant(rep(100));
        assert_relative_eq!(inversion_closed_form(&p, 0.2, 0.0).unwrap(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(atomic_inversion(&coherent_excited(rep(10), 0.3)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trapped_inversion_is_constant() {
        let p = ModelParams::resonant(rep(50));
        let curve = InversionCurve::new(&p, 1.0).unwrap();
        for k in 0..100 {
            assert_eq!(curve.at(0.6 * k as f64), 1.0);
        }
    }

    #[test]
    fn closed_form_matches_state_route() {
        let r = rep(30);
        let p = ModelParams::new(1.0, 1.1, 0.9, r).unwrap();
        let times: Vec<f64> = (0..40).map(|k| 0.77 * k as f64).collect();
        let via_states = inversion_via_states(&p, &coherent_excited(r, 0.35), &times);
        let curve = InversionCurve::new(&p, 0.35).unwrap();
        for (t, v) in times.iter().zip(via_states) {
            assert!((curve.at(*t) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn revival_estimate_values() {
        let p = ModelParams::resonant(rep(1000));
        assert_relative_eq!(
            revival_time_estimate(&p, 0.02).unwrap(),
            29.428_004_778_700_454,
            max_relative = 1e-12
        );
        assert!(matches!(revival_time_estimate(&p, 1.0), Err(JcmError::Domain(_))));
        // 2j -> infinity at <n> = 20: pi (sqrt(22) + sqrt(21))
        let huge = ModelParams::resonant(rep(2_000_000_000));
        let limit = revival_time_estimate(&huge, 20.0 / 2.0e9).unwrap();
        assert_relative_eq!(limit, 29.131_961_831_135_483, max_relative = 1e-6);
        let standard = 2.0 * PI * 20f64.sqrt();
        assert!((limit - standard).abs() / standard < 0.05);
    }

    #[test]
    fn mandel_q_cases() {
        for chi in [0.02, 0.2, 0.4] {
            let r = rep(50);
            let m = field_moments(&coherent_excited(r, chi), r);
            assert!((mandel_q(&m).unwrap() + chi).abs() < 1e-12);
        }
        let vac = field_moments(&coherent_excited(rep(4), 0.0), rep(4));
        assert!(matches!(mandel_q(&vac), Err(JcmError::UndefinedObservable(_))));
        let pois = poisson_reference(20.0, poisson_window(20.0)).unwrap();
        let m = FieldMoments {
            n_mean: pois.mean,
            n2_mean: pois.variance + pois.mean * pois.mean,
            splus_mean: Complex64::new(0.0, 0.0),
            splus2_mean: Complex64::new(0.0, 0.0),
            splus_sminus_mean: 0.0,
        };
        assert!(mandel_q(&m).unwrap().abs() < 1e-10);
    }

    #[test]
    fn vacuum_and_top_state_saturate_uncertainty() {
        for chi in [0.0, 1.0] {
            let r = rep(20);
            let m = field_moments(&coherent_excited(r, chi), r);
            let q = quadrature_variances(&m, r);
            assert_relative_eq!(q.var_x, 0.25, epsilon = 1e-15);
            assert_relative_eq!(q.var_y, 0.25, epsilon = 1e-15);
            assert_relative_eq!(q.robertson_bound, 1.0 / 16.0, epsilon = 1e-15);
            assert!(!q.x_squeezed() && !q.y_squeezed());
        }
        let r = rep(20);
        let m = field_moments(&coherent_excited(r, 0.0), r);
        assert_eq!(quadrature_variances_without_ordering(&m, r).var_x, 0.0);
    }

    #[test]
    fn coherent_state_is_squeezed_along_its_mean() {
        // spin coherent state at polar angle theta: var_x = cos^2(theta) / 4, var_y = 1/4
        let r = rep(50);
        let m = field_moments(&coherent_excited(r, 0.4), r);
        let q = quadrature_variances(&m, r);
        assert_relative_eq!(q.var_x, 0.04 / 4.0, epsilon = 1e-12);
        assert_relative_eq!(q.var_y, 0.25, epsilon = 1e-12);
        assert!(q.x_squeezed());
    }

    #[test]
    fn standard_reference() {
        let n_max = poisson_window(20.0);
        assert_relative_eq!(
            standard_jcm_inversion(20.0, 0.0, 1.0, 0.0, n_max).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(matches!(
            StandardJcm::new(20.0, 0.0, 1.0, 25),
            Err(JcmError::Truncation { .. })
        ));
    }

    #[test]
    fn parabolic_refinement_finds_vertex() {
        let peak = locate_peak(Execution::Sequential, 0.0, 10.0, 0.1, |t| -(t - 3.271).powi(2));
        assert_relative_eq!(peak.t, 3.271, epsilon = 1e-9);
        let edge = locate_peak(Execution::default(), 0.0, 1.0, 0.01, |t| t);
        assert_eq!(edge.t, 1.0);
    }
}
