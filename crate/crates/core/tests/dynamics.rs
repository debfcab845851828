use std::f64::consts::PI;

use magnus_core::constants::{gauss_to_tesla, kelvin_to_joule};
use magnus_core::dynamics::*;
use magnus_core::Error;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn trap() -> TrapSpec {
    TrapSpec::sr88_example()
}

fn omega() -> f64 {
    trap_frequency(&trap())
}

fn period() -> f64 {
    2.0 * PI / omega()
}

fn undriven(x0: f64) -> ShakeSetup {
    ShakeSetup {
        potential: Potential::Gaussian,
        drive_amplitude: Some(0.0),
        initial_position: Some(x0),
    }
}

#[test]
fn example_numbers() {
    let f = omega() / (2.0 * PI);
    assert!((f - 6.9e3).abs() < 0.1e3, "{f}");
    let est = resonant_escape_estimate(&trap());
    assert!((est.n_cycles - 3.5).abs() < 0.1, "{}", est.n_cycles);
    assert!((est.exit_speed - 0.061).abs() < 0.005, "{}", est.exit_speed);
    assert!((est.escape_time * f - est.n_cycles).abs() < 1e-12);
}

#[test]
fn escape_estimate_scales_inversely_with_wavelength() {
    let t = trap();
    let double = TrapSpec::new(2.0 * t.wavelength, t.waist, t.depth, t.mass).unwrap();
    let ratio = resonant_escape_estimate(&double).n_cycles / resonant_escape_estimate(&t).n_cycles;
    assert!((ratio - 0.5).abs() < 1e-14);
}

#[test]
fn frequency_scalings() {
    let t = trap();
    let deep = TrapSpec::new(t.wavelength, t.waist, 4.0 * t.depth, t.mass).unwrap();
    let heavy = TrapSpec::new(t.wavelength, t.waist, t.depth, 4.0 * t.mass).unwrap();
    assert!((trap_frequency(&deep) / omega() - 2.0).abs() < 1e-14);
    assert!((trap_frequency(&heavy) / omega() - 0.5).abs() < 1e-14);
}

#[test]
fn small_oscillation_frequency_from_spectrum() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let dt = period() / 100.0;
    let traj = simulate(
        &trap(),
        &drive,
        &undriven(0.05 * trap().waist),
        dt,
        200.0 * period(),
    )
    .unwrap();
    assert!(traj.escape_time.is_none());
    let n = traj.len();
    let mut buf: Vec<Complex<f64>> = traj
        .positions
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..n / 2].iter().map(|c| c.norm()).collect();
    let k = (1..n / 2 - 1)
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]))
        .unwrap();
    // parabolic refinement of the peak bin
    let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
    let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
    let f = (k as f64 + shift) / (n as f64 * dt);
    let expect = omega() / (2.0 * PI);
    assert!((f / expect - 1.0).abs() < 0.01, "{f} vs {expect}");
    let max = traj.positions.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(max <= 0.05 * trap().waist * (1.0 + 1e-9));
}

#[test]
fn undriven_energy_is_conserved() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let dt = period() / 200.0;
    assert!(dt <= max_step(&trap(), &drive));
    let traj = simulate(
        &trap(),
        &drive,
        &undriven(0.05 * trap().waist),
        dt,
        100.0 * period(),
    )
    .unwrap();
    let e0 = traj.energies[0];
    let worst = traj
        .energies
        .iter()
        .fold(0.0f64, |m, e| m.max((e - e0).abs()));
    assert!(worst / trap().depth < 1e-8, "{}", worst / trap().depth);
}

#[test]
fn runge_kutta_is_fourth_order() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let setup = undriven(0.3 * trap().waist);
    let t_max = 2.0 * period();
    let end = |dt: f64| {
        let traj = simulate(&trap(), &drive, &setup, dt, t_max).unwrap();
        assert!((traj.times.last().unwrap() / t_max - 1.0).abs() < 1e-12);
        *traj.positions.last().unwrap()
    };
    let dt = max_step(&trap(), &drive);
    let reference = end(dt / 16.0);
    let ratio = (end(dt) - reference).abs() / (end(dt / 2.0) - reference).abs();
    assert!((ratio - 16.0).abs() < 2.0, "{ratio}");
}

#[test]
fn harmonic_drive_matches_resonant_solution() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let w = omega();
    let a = -trap().reduced_wavelength();
    let traj = simulate(
        &trap(),
        &drive,
        &ShakeSetup::harmonic(),
        period() / 400.0,
        2.0 * period(),
    )
    .unwrap();
    let envelope = |t: f64| (a * w * t / 2.0).abs();
    for (&t, &x) in traj.times.iter().zip(&traj.positions) {
        let exact = a * (w * t).cos() + a * w * t / 2.0 * (w * t).sin();
        assert!((x - exact).abs() < 0.01 * envelope(2.0 * period()), "t={t}");
    }
    // amplitude reached after two cycles: (ωλbar/2)·t
    let last = traj.times.len() - 1;
    let quarter = traj
        .times
        .iter()
        .position(|&t| t >= 1.75 * period())
        .unwrap();
    let peak = traj.positions[quarter..=last]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    assert!((peak / envelope(1.75 * period()) - 1.0).abs() < 0.01 + 2.0 / (w * 1.75 * period()));
}

#[test]
fn harmonic_energy_never_decreases_on_resonance() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let traj = simulate(
        &trap(),
        &drive,
        &ShakeSetup::harmonic(),
        period() / 200.0,
        3.0 * period(),
    )
    .unwrap();
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    for w in traj.energies.windows(2) {
        assert!(w[1] >= w[0] - 1e-12 * trap().depth, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn harmonic_control_escapes_after_three_and_a_half_cycles() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let traj = simulate(
        &trap(),
        &drive,
        &ShakeSetup::harmonic(),
        period() / 200.0,
        20.0 * period(),
    )
    .unwrap();
    let cycles = traj.escape_cycles(drive.omega_b).unwrap();
    assert!((cycles - 3.5).abs() < 0.2, "{cycles}");
    let n = traj.len();
    assert!(traj.energies[n - 1] > trap().depth && traj.energies[n - 2] <= trap().depth);
}

#[test]
fn gaussian_well_detunes_from_a_fixed_resonant_drive() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let traj = simulate(
        &trap(),
        &drive,
        &ShakeSetup::default(),
        period() / 200.0,
        20.0 * period(),
    )
    .unwrap();
    assert_eq!(traj.escape_time, None);
    let peak = traj.energies.iter().fold(0.0f64, |m, &e| m.max(e)) / trap().depth;
    assert!(peak > 0.3 && peak < 0.7, "{peak}");
}

#[test]
fn off_resonant_drive_stays_bound() {
    for potential in [Potential::Gaussian, Potential::Harmonic] {
        let drive = DriveSpec::new(0.5 * omega(), 1, 0.0).unwrap();
        let setup = ShakeSetup {
            potential,
            ..ShakeSetup::default()
        };
        let traj = simulate(&trap(), &drive, &setup, period() / 200.0, 40.0 * period()).unwrap();
        assert_eq!(traj.escape_time, None);
        assert_eq!(traj.escape_cycles(drive.omega_b), None);
    }
}

#[test]
fn opposite_spins_mirror_exactly() {
    for potential in [Potential::Gaussian, Potential::Harmonic] {
        let setup = ShakeSetup {
            potential,
            ..ShakeSetup::default()
        };
        let run = |mj| {
            let drive = DriveSpec::new(0.97 * omega(), mj, 0.0).unwrap();
            simulate(&trap(), &drive, &setup, period() / 150.0, 6.0 * period()).unwrap()
        };
        let (p, m) = (run(1), run(-1));
        assert_eq!(p.len(), m.len());
        for (a, b) in p.positions.iter().zip(&m.positions) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(p.energies, m.energies);
    }
}

#[test]
fn step_and_spin_preconditions() {
    let drive = DriveSpec::new(omega(), 1, 0.0).unwrap();
    let limit = max_step(&trap(), &drive);
    let err = simulate(
        &trap(),
        &drive,
        &ShakeSetup::default(),
        1.01 * limit,
        period(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));
    assert!(simulate(&trap(), &drive, &ShakeSetup::default(), limit, period()).is_ok());
    let zero = DriveSpec::new(omega(), 0, 0.0).unwrap();
    assert!(!zero.is_trapped());
    assert!(matches!(
        simulate(&trap(), &zero, &ShakeSetup::default(), limit, period()),
        Err(Error::Untrapped)
    ));
    assert!(DriveSpec::new(omega(), 2, 0.0).is_err());
    assert!(DriveSpec::new(-1.0, 1, 0.0).is_err());
    assert!(TrapSpec::new(0.8e-6, -1.0, kelvin_to_joule(20e-6), 1e-25).is_err());
}

#[test]
fn adiabaticity_ratio() {
    let drive = DriveSpec::new(2.0 * PI * 10e3, 1, gauss_to_tesla(2.0)).unwrap();
    let a = adiabaticity_check(&drive);
    assert!((a.ratio - 279.9).abs() < 0.1, "{}", a.ratio);
    assert!(a.adiabatic);
    let double = DriveSpec {
        b_field: 2.0 * drive.b_field,
        ..drive
    };
    assert!((adiabaticity_check(&double).ratio / a.ratio - 2.0).abs() < 1e-14);
    let off = adiabaticity_check(&DriveSpec {
        b_field: 0.0,
        ..drive
    });
    assert_eq!(off.ratio, 0.0);
    assert!(!off.adiabatic);
}
