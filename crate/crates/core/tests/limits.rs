mod common;

use common::seeded_state;
use kerr_jcm::check::contraction_gap;
use kerr_jcm::coherent::{chi_from_mean, photon_distribution, poisson_reference, poisson_window, total_variation};
use kerr_jcm::dynamics::{ModelParams, Propagator};
use kerr_jcm::observables::{revival_time_estimate, standard_jcm_inversion};
use kerr_jcm::spin::{number_from_bdag_b, raising_coeff, SpinRepresentation};
use kerr_jcm::Execution;

fn rep(two_j: u32) -> SpinRepresentation {
    SpinRepresentation::new(two_j).unwrap()
}

#[test]
fn inversion_contracts_to_standard_model_at_two_j_ten_thousand() {
    let gap = contraction_gap(10_000, Execution::default()).unwrap();
    assert!(gap < 1e-2, "max pointwise gap {gap:e} on lambda t in [0, 30]");
}

#[test]
fn contraction_gap_shrinks_inversely_with_two_j() {
    let gaps: Vec<f64> = [10_000, 100_000, 1_000_000]
        .into_iter()
        .map(|tj| contraction_gap(tj, Execution::default()).unwrap())
        .collect();
    for pair in gaps.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((8.0..12.0).contains(&ratio), "{gaps:?}");
    }
    assert!(gaps[2] < 2e-3);
}

#[test]
fn norm_is_conserved_over_long_times() {
    for two_j in [4, 50, 1000] {
        let r = rep(two_j);
        let p = ModelParams::new(1.0, 1.3, 0.6, r).unwrap();
        let prop = Propagator::new(&p);
        let s0 = seeded_state(r, u64::from(two_j));
        for k in 0..=200 {
            let t = 5.0 * f64::from(k) / p.lambda;
            let norm = prop.evolve(&s0, t).norm_sqr();
            assert!((norm - 1.0).abs() < 1e-10, "2j = {two_j}, lambda t = {}", 5 * k);
        }
    }
}

#[test]
fn ladder_coefficient_approaches_oscillator() {
    for n in [0usize, 1, 3, 10] {
        let exact = ((n + 1) as f64).sqrt();
        let mut previous = f64::INFINITY;
        for two_j in [100u32, 1_000, 10_000] {
            let gap = (raising_coeff(rep(two_j), n).unwrap() - exact).abs();
            let x = n as f64 / f64::from(two_j);
            // sqrt(1 - x) >= 1 - x/2 - x^2/2 for x <= 1/2
            assert!(gap <= exact * 0.5 * x * (1.0 + x), "n = {n}, 2j = {two_j}");
            assert!(gap < previous || gap == 0.0);
            previous = gap;
        }
    }
    assert!((raising_coeff(rep(1 << 30), 3).unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn number_relation_has_harmonic_limit() {
    for n in [1.0, 5.0, 20.0] {
        assert!((number_from_bdag_b(rep(1 << 30), n).unwrap() - n).abs() < 1e-6);
    }
}

#[test]
fn binomial_converges_to_poisson() {
    let pois = poisson_reference(20.0, poisson_window(20.0)).unwrap();
    let tv: Vec<f64> = [100, 1_000, 10_000]
        .into_iter()
        .map(|tj| {
            let r = rep(tj);
            total_variation(&photon_distribution(r, chi_from_mean(r, 20.0).unwrap()).unwrap(), &pois)
        })
        .collect();
    assert!(tv[0] > tv[1] && tv[1] > tv[2], "{tv:?}");
    assert!(tv[2] < 0.01);
}

#[test]
fn revival_estimate_tends_to_oscillator_value() {
    let r = rep(10_000_000);
    let last = revival_time_estimate(&ModelParams::resonant(r), chi_from_mean(r, 20.0).unwrap()).unwrap();
    // pi (sqrt 22 + sqrt 21)
    let limit = std::f64::consts::PI * (22f64.sqrt() + 21f64.sqrt());
    assert!((last - limit).abs() < 1e-4, "{last}");
    let t_ref = 2.0 * std::f64::consts::PI * 20f64.sqrt();
    assert!((limit - t_ref).abs() / t_ref < 0.05);
}

#[test]
fn standard_model_starts_excited() {
    let n_max = poisson_window(20.0);
    assert!((standard_jcm_inversion(20.0, 0.0, 1.0, 0.0, n_max).unwrap() - 1.0).abs() < 1e-12);
    assert!(standard_jcm_inversion(20.0, 0.0, 1.0, 0.0, 30).is_err());
}
