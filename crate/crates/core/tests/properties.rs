//! Property tests for the structural identities of the linear and nonlinear
//! flows, the lens transforms and the scenario format.

use nlsp::grid::{forward_spectral, inverse_spectral, norm_l2};
use nlsp::potential::{phase_functions, Signature};
use nlsp::propagator::{inverse_propagate, mehler_propagate};
use nlsp::scenarios::{parse_scenario, relative_l2};
use nlsp::solver::{evolve, Monitors, Nonlinearity, SolverConfig};
use nlsp::transforms::{
    harmonic_lens, harmonic_lens_inverse, repulsive_lens, repulsive_lens_inverse, semiclassical_rescale,
    RescaleDirection,
};
use nlsp::{Complex, Grid, QuadraticPotential, WaveFunction};
use proptest::prelude::*;

fn packet(grid: &Grid<f64>, eps: f64, center: f64, momentum: f64, chirp: f64) -> WaveFunction<f64> {
    WaveFunction::from_fn(grid.clone(), 0.0, eps, |x| {
        let y = x[0] - center;
        Complex::from_polar((-y * y).exp(), (momentum * y + chirp * y * y) / eps)
    })
    .unwrap()
}

fn signature() -> impl Strategy<Value = Signature> {
    prop_oneof![Just(Signature::Harmonic), Just(Signature::Free), Just(Signature::Repulsive)]
}

fn potential(s: Signature, omega: f64) -> QuadraticPotential<f64> {
    match s {
        Signature::Harmonic => QuadraticPotential::harmonic(1, omega).unwrap(),
        Signature::Free => QuadraticPotential::free(1),
        Signature::Repulsive => QuadraticPotential::repulsive(1, omega).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase_functions_satisfy_the_determinant_identity(s in signature(), omega in 0.05..3.0f64, t in -2.0..2.0f64) {
        let (g, h) = phase_functions(s, omega, t);
        let det = -f64::from(s.delta()) * omega * omega * g * g - h * h;
        prop_assert!((det + 1.0).abs() < 1e-9 * (1.0 + h * h));
    }

    #[test]
    fn spectral_round_trip_is_identity(center in -2.0..2.0f64, momentum in -1.0..1.0f64) {
        let grid = Grid::new(1, 256, 12.0).unwrap();
        let u = packet(&grid, 1.0, center, momentum, 0.0);
        let back = inverse_spectral(&grid, &forward_spectral(&u).unwrap()).unwrap();
        let back = u.with_values(back).unwrap();
        prop_assert!(relative_l2(&back, &u) < 1e-13);
    }

    #[test]
    fn mehler_flow_is_unitary_and_reversible(
        s in signature(), omega in 0.2..1.5f64, t in 0.05..1.0f64, center in -1.0..1.0f64,
    ) {
        let grid = Grid::new(1, 512, 24.0).unwrap();
        let pot = potential(s, omega);
        let u = packet(&grid, 1.0, center, 0.3, 0.0);
        let v = mehler_propagate(&u, &pot, t).unwrap();
        prop_assert!((norm_l2(&v) / norm_l2(&u) - 1.0).abs() < 1e-12);
        let w = inverse_propagate(&v, &pot, t).unwrap();
        prop_assert!(relative_l2(&w, &u) < 1e-10);
    }

    #[test]
    fn mehler_flow_obeys_the_group_law(s in signature(), omega in 0.2..1.5f64, t in 0.05..0.6f64, r in 0.05..0.6f64) {
        let grid = Grid::new(1, 512, 24.0).unwrap();
        let pot = potential(s, omega);
        let u = packet(&grid, 1.0, 0.5, -0.2, 0.0);
        let direct = mehler_propagate(&u, &pot, t + r).unwrap();
        let composed = mehler_propagate(&mehler_propagate(&u, &pot, t).unwrap(), &pot, r).unwrap();
        prop_assert!(relative_l2(&composed, &direct) < 1e-9);
    }

    #[test]
    fn nonlinear_flow_commutes_with_constant_phases(theta in 0.0..std::f64::consts::TAU, lambda in -1.0..1.0f64) {
        let grid = Grid::new(1, 256, 12.0).unwrap();
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let nl = Nonlinearity::new(lambda, 1.0, 1).unwrap();
        let cfg = SolverConfig::fixed(0.01);
        let u = packet(&grid, 1.0, 0.0, 0.0, 0.0);
        let phase = Complex::from_polar(1.0, theta);
        let a = evolve(&u, 0.2, &pot, &nl, &cfg, &Monitors::at(vec![])).unwrap().final_state;
        let b = evolve(&u.scaled(phase), 0.2, &pot, &nl, &cfg, &Monitors::at(vec![])).unwrap().final_state;
        prop_assert!(relative_l2(&b, &a.scaled(phase)) < 1e-12);
    }

    #[test]
    fn nonlinear_flow_conserves_mass(lambda in -1.0..1.0f64, s in signature()) {
        let grid = Grid::new(1, 256, 16.0).unwrap();
        let pot = potential(s, 0.7);
        let nl = Nonlinearity::new(lambda, 1.0, 1).unwrap();
        let u = packet(&grid, 1.0, 0.0, 0.5, 0.0);
        let run = evolve(&u, 0.3, &pot, &nl, &SolverConfig::fixed(0.01), &Monitors::at(vec![])).unwrap();
        prop_assert!((norm_l2(&run.final_state) / norm_l2(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lenses_invert(tau in 0.05..0.9f64, omega in 0.3..1.0f64, chirp in -0.5..0.5f64) {
        let grid = Grid::new(1, 1024, 24.0).unwrap();
        let nl = Nonlinearity::new(1.0, 2.0, 1).unwrap();
        let v = packet(&grid, 1.0, 0.0, 0.0, chirp).with_time(tau);
        let harmonic = harmonic_lens_inverse(&harmonic_lens(std::slice::from_ref(&v), omega, &nl).unwrap(), omega, &nl).unwrap();
        prop_assert!(relative_l2(&harmonic[0], &v) < 1e-8);
        prop_assert!((harmonic[0].time() - tau).abs() < 1e-12);
        let scaled = v.clone().with_time(tau / omega * 0.9);
        let forward = repulsive_lens(std::slice::from_ref(&scaled), omega, &nl, None).unwrap();
        let back = repulsive_lens_inverse(&forward, omega, &nl, None).unwrap();
        prop_assert!(relative_l2(&back[0], &scaled) < 1e-8);
    }

    #[test]
    fn semiclassical_rescaling_round_trips(eps in 0.1..0.5f64, t0 in -1.0..1.0f64) {
        let grid = Grid::new(1, 1024, 4.0).unwrap();
        let u = packet(&grid, eps, 0.3, 0.2, 0.0);
        let profile = semiclassical_rescale(&u, eps, t0, RescaleDirection::ToProfile).unwrap();
        prop_assert!((norm_l2(&profile) / norm_l2(&u) - 1.0).abs() < 1e-12);
        let back = semiclassical_rescale(&profile, eps, t0, RescaleDirection::ToSemiclassical).unwrap();
        prop_assert!(relative_l2(&back, &u) < 1e-14);
        prop_assert!((back.time() - u.time()).abs() < 1e-12);
    }

    #[test]
    fn scenario_text_round_trips(
        log_points in 3u32..13, half_width in 1.0..64.0f64, omega in 0.1..4.0f64,
        lambda in -2.0..2.0f64, sigma in 0.5..3.0f64, eps in 0.05..1.0f64, t_end in 0.1..10.0f64,
    ) {
        let points = 1usize << log_points;
        let text = format!(
            "name = prop\n[grid]\npoints = {points}\nhalf_width = {half_width}\n\
             [potential]\nsignature = harmonic\nomega = {omega}\n\
             [nonlinearity]\nlambda = {lambda}\nsigma = {sigma}\n\
             [initial]\nepsilon = {eps}\n[time]\nt_end = {t_end}\n"
        );
        let spec = parse_scenario(&text).unwrap();
        prop_assert_eq!(parse_scenario(&spec.to_text()).unwrap(), spec);
    }
}
