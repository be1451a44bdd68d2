use std::f64::consts::PI;

use bogolon::phase_integral::{
    integrate_closed_constant_velocity, integrate_closed_uniform_acceleration, integrate_damped, Damping,
    RegulatorSpec, Window,
};
use bogolon::quadrature::{integrate_panels, Tolerance};
use bogolon::spectrum::{total_energy, EnergyGrid, SpectrumSource};
use bogolon::{Condensate, CondensateParams, Mode, Trajectory};

fn condensate(lambda: f64) -> Condensate {
    Condensate::new(CondensateParams::natural(lambda)).unwrap()
}

fn closed_source(traj: Trajectory) -> SpectrumSource {
    SpectrumSource::new(traj, Window::full(), RegulatorSpec::none(), 1e-10)
}

#[test]
fn energy_scales_with_the_coupling_squared() {
    let src = closed_source(Trajectory::uniform_acceleration(0.5).unwrap());
    let grid = EnergyGrid::default();
    let e1 = total_energy(&condensate(1.0), &src, 4.0, &grid).unwrap().total;
    let e3 = total_energy(&condensate(3.0), &src, 4.0, &grid).unwrap().total;
    assert!((e3 / e1 / 9.0 - 1.0).abs() < 1e-12);
}

#[test]
fn refined_grid_stays_within_the_reported_error() {
    let cond = condensate(1.0);
    let src = closed_source(Trajectory::uniform_acceleration(1.0).unwrap());
    let grid = EnergyGrid::default();
    let coarse = total_energy(&cond, &src, 5.0, &grid).unwrap();
    let fine = total_energy(&cond, &src, 5.0, &grid.refined()).unwrap();
    assert!((fine.total - coarse.total).abs() <= coarse.truncation_error.max(1e-9 * coarse.total));
    assert!(!coarse.divergent);
    // symmetric under θ → π − θ, so the hemispheres agree
    assert!((coarse.upper / coarse.lower - 1.0).abs() < 1e-9);
}

/// `∫|I|² dk / 2T` across the Cherenkov resonance of a window `(−T, T)`
/// approaches `2π/|dΩ/dk|` with `Ω = ω − k v`.
fn resonance_weight(speed: f64, half: f64) -> f64 {
    let k0 = 2.0 * (speed * speed - 1.0).sqrt();
    let window = Window::new(-half, half).unwrap();
    let f = |k: f64| {
        let mode = Mode::new(k, 0.0).unwrap();
        integrate_closed_constant_velocity(&mode, speed, window).unwrap().norm_sqr() / (2.0 * half)
    };
    let edges: Vec<f64> = (0..=400).map(|i| k0 - 0.5 + i as f64 / 400.0).collect();
    integrate_panels(f, &edges, Tolerance::new(1e-10, 1e-10, 100_000)).unwrap().value
}

#[test]
fn supersonic_window_grows_a_steady_rate() {
    let v: f64 = 1.5;
    let k0 = 2.0 * (v * v - 1.0).sqrt();
    let slope = (1.0 + 0.5 * k0 * k0) / (1.0 + 0.25 * k0 * k0).sqrt() - v;
    let limit = 2.0 * PI / slope.abs();
    let errors: Vec<f64> = [25.0, 100.0, 400.0]
        .iter()
        .map(|&t| (resonance_weight(v, t) / limit - 1.0).abs())
        .collect();
    assert!(errors[2] < 0.01, "{errors:?}");
    assert!(errors[2] < errors[0]);
}

#[test]
fn subsonic_window_rate_vanishes() {
    for &(k, theta) in &[(0.1, 0.0), (1.0, 0.3), (3.0, PI), (0.5, 1.2)] {
        let mode = Mode::new(k, theta).unwrap();
        let per_time: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&t| {
                let w = Window::new(-t, t).unwrap();
                integrate_closed_constant_velocity(&mode, 0.9, w).unwrap().norm_sqr() / t
            })
            .collect();
        let bound = 4.0 / (mode.omega - 0.9 * mode.kz()).powi(2);
        assert!(per_time[2] <= bound / 1000.0 * (1.0 + 1e-9), "{per_time:?}");
    }
}

#[test]
fn damped_hyperbolic_integral_approaches_the_closed_form() {
    let traj = Trajectory::uniform_acceleration(1.0).unwrap();
    for &(k, theta) in &[(0.5, 0.0), (1.0, 1.0), (2.0, 2.2), (1.0, PI)] {
        let mode = Mode::new(k, theta).unwrap();
        let closed = integrate_closed_uniform_acceleration(&mode, 1.0).unwrap().value;
        let gap = mode.omega - mode.kz().abs();
        let errors: Vec<f64> = [0.08, 0.04, 0.02, 0.01]
            .iter()
            .map(|&s| {
                let eps = s * gap * gap;
                let v = integrate_damped(&mode, &traj, Window::full(), Damping::Gaussian(eps), 1e-12).unwrap();
                (v.value - closed).norm() / closed.norm()
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "k={k} θ={theta}: {errors:?}");
    }
}
