//! The single-precision aliases run the same pipeline as double precision.

use nlsp::observables::mass;
use nlsp::propagator::mehler_propagate;
use nlsp::solver::{evolve, Monitors, Nonlinearity, SolverConfig};
use nlsp::{Complex, Grid32, Grid64, Potential32, Potential64, WaveFunction32, WaveFunction64};

#[test]
fn f32_evolution_tracks_f64() {
    let g32 = Grid32::new(1, 256, 12.0).unwrap();
    let g64 = Grid64::new(1, 256, 12.0).unwrap();
    let u32 = WaveFunction32::from_fn(g32, 0.0, 1.0, |x| Complex::from_polar((-x[0] * x[0]).exp(), 0.5 * x[0])).unwrap();
    let u64 = WaveFunction64::from_fn(g64, 0.0, 1.0, |x| Complex::from_polar((-x[0] * x[0]).exp(), 0.5 * x[0])).unwrap();
    let p32 = Potential32::harmonic(1, 1.0).unwrap();
    let p64 = Potential64::harmonic(1, 1.0).unwrap();
    let n32 = Nonlinearity::new(1.0f32, 1.0, 1).unwrap();
    let n64 = Nonlinearity::new(1.0f64, 1.0, 1).unwrap();
    let a = evolve(&u32, 0.5, &p32, &n32, &SolverConfig::fixed(0.01), &Monitors::at(vec![])).unwrap();
    let b = evolve(&u64, 0.5, &p64, &n64, &SolverConfig::fixed(0.01), &Monitors::at(vec![])).unwrap();
    let worst = a
        .final_state
        .values()
        .iter()
        .zip(b.final_state.values())
        .map(|(x, y)| (Complex::new(f64::from(x.re), f64::from(x.im)) - y).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
    assert!((f64::from(mass(&a.final_state)) - mass(&b.final_state)).abs() < 1e-4);
}

#[test]
fn f32_mehler_flow_is_unitary() {
    let g = Grid32::new(1, 512, 16.0).unwrap();
    let u = WaveFunction32::from_fn(g, 0.0, 1.0, |x| Complex::new((-x[0] * x[0]).exp(), 0.0)).unwrap();
    let v = mehler_propagate(&u, &Potential32::repulsive(1, 0.5).unwrap(), 0.7).unwrap();
    assert!((mass(&v) / mass(&u) - 1.0).abs() < 1e-5);
}
