use std::f64::consts::PI;

use magnus_core::fields::{BeamShape, Dipole, Handedness, IncidentBeam};
use magnus_core::quadrature::{gauss_legendre, integrate_adaptive};
use magnus_core::radiometry::{beam_power_analytic, incident_intensity, scattered_intensity};
use magnus_core::{
    AdaptiveOptions, Direction, Domain, Error, QuadratureSpec, RVec3, SphericalGrid,
};
use num_complex::Complex64;

/// Normalized associated Legendre function `N_l^m P_l^m(x)` for `m ≥ 0` by the
/// standard three-term recurrence in `l`.
fn legendre_normalized(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m = (-1)^m (2m-1)!! s^m, carried with its normalization.
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -s * ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * ((2 * m + 3) as f64).sqrt() * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let (llf, mf) = (ll as f64, m as f64);
        let a = ((4.0 * llf * llf - 1.0) / (llf * llf - mf * mf)).sqrt();
        let b = (((llf - 1.0) * (llf - 1.0) - mf * mf) / (4.0 * (llf - 1.0) * (llf - 1.0) - 1.0))
            .sqrt();
        let p = a * (x * pm1 - b * pm2);
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

fn ylm(l: usize, m: i64, dir: Direction) -> Complex64 {
    let p = legendre_normalized(l, m.unsigned_abs() as usize, dir.theta.cos());
    let sign = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    Complex64::from_polar(sign * p, m as f64 * dir.phi)
}

#[test]
fn legendre_oracle_matches_low_order_closed_forms() {
    let d = Direction::new(0.7, 0.3);
    let (c, s) = (d.theta.cos(), d.theta.sin());
    let y10 = (3.0 / (4.0 * PI)).sqrt() * c;
    let y11 = -(3.0 / (8.0 * PI)).sqrt() * s;
    let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0);
    assert!((ylm(1, 0, d).re - y10).abs() < 1e-15);
    assert!((ylm(1, 1, d).norm() - y11.abs()).abs() < 1e-15);
    assert!((ylm(2, 0, d).re - y20).abs() < 1e-15);
}

#[test]
fn spherical_harmonics_integrate_exactly() {
    for (n_theta, n_phi) in [(8, 8), (12, 16), (20, 24)] {
        let grid = SphericalGrid::new(n_theta, n_phi, Domain::Full).unwrap();
        for l in 0..n_theta {
            let m_max = l.min(n_phi / 2 - 1) as i64;
            for m in -m_max..=m_max {
                let got: Complex64 = grid.integrate(|d| ylm(l, m, d));
                let want = if l == 0 { (4.0 * PI).sqrt() } else { 0.0 };
                assert!(
                    (got - want).norm() < 1e-12,
                    "grid {n_theta}x{n_phi}, l={l} m={m}: {got}"
                );
            }
        }
    }
}

#[test]
fn spherical_harmonics_are_orthonormal_on_the_grid() {
    let grid = SphericalGrid::new(16, 24, Domain::Full).unwrap();
    for l1 in 0..8usize {
        for l2 in 0..8usize {
            for m in -(l1.min(l2) as i64)..=(l1.min(l2) as i64) {
                let got: Complex64 = grid.integrate(|d| ylm(l1, m, d) * ylm(l2, m, d).conj());
                let want = if l1 == l2 { 1.0 } else { 0.0 };
                assert!((got - want).norm() < 1e-12, "l1={l1} l2={l2} m={m}: {got}");
            }
        }
    }
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(10);
    assert!(x.windows(2).all(|p| p[0] < p[1]));
    for k in 0..20 {
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
        let want = if k % 2 == 0 {
            2.0 / (k + 1) as f64
        } else {
            0.0
        };
        assert!((got - want).abs() < 1e-14, "x^{k}: {got}");
    }
}

#[test]
fn basic_integrals() {
    let full = SphericalGrid::new(8, 8, Domain::Full).unwrap();
    assert!((full.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-13);
    let cos2: f64 = full.integrate(|d: Direction| d.theta.cos().powi(2));
    assert!((cos2 - 4.0 * PI / 3.0).abs() < 1e-13);
    let u: RVec3 = full.integrate(|d: Direction| d.unit_vector());
    assert!(u.norm() < 1e-14);

    let hemi = SphericalGrid::new(
        8,
        8,
        Domain::Cap {
            theta_max: PI / 2.0,
        },
    )
    .unwrap();
    let uz: f64 = hemi.integrate(|d: Direction| d.theta.cos());
    assert!((uz - PI).abs() < 1e-13);
}

#[test]
fn cap_integrals_of_cosine_powers() {
    let c0 = 0.3f64.cos();
    let grid = SphericalGrid::new(8, 8, Domain::Cap { theta_max: 0.3 }).unwrap();
    for k in 0..12 {
        let got: f64 = grid.integrate(|d: Direction| d.theta.cos().powi(k));
        let want = 2.0 * PI * (1.0 - c0.powi(k + 1)) / (k + 1) as f64;
        assert!((got / want - 1.0).abs() < 1e-13, "cos^{k}");
    }
}

#[test]
fn scattered_momentum_vanishes_on_full_sphere() {
    let grid = SphericalGrid::new(8, 8, Domain::Full).unwrap();
    for h in [Handedness::Plus, Handedness::Minus] {
        for delta in [-2.0, 0.0, 0.7] {
            let dip = Dipole::new(h, delta, 1.0, 0.0).unwrap();
            let p: RVec3 =
                grid.integrate(|d: Direction| d.unit_vector() * scattered_intensity(&dip, d));
            assert!(p.norm() < 1e-14, "{p:?}");
        }
    }
}

#[test]
fn gaussian_power_converges_below_512_nodes() {
    for w in [0.05, 0.1, 0.3, 0.6] {
        let beam = IncidentBeam::unit(BeamShape::gaussian(w).unwrap()).unwrap();
        let est = integrate_adaptive(
            |d| incident_intensity(&beam, d),
            Domain::Cap {
                theta_max: PI / 2.0,
            },
            AdaptiveOptions::with_tol(1e-10),
        )
        .unwrap();
        assert!(
            est.n_theta < 512 && est.n_phi < 512,
            "w={w}: {}x{}",
            est.n_theta,
            est.n_phi
        );
        assert!(est.achieved_tol.unwrap() < 1e-10);
        // the Gaussian closed form is leading order only
        let analytic = beam_power_analytic(&beam);
        assert!((est.value / analytic - 1.0).abs() < 0.1);
    }
}

#[test]
fn tophat_on_its_cap_is_exact_at_low_order() {
    let r = 0.6;
    let beam = IncidentBeam::unit(BeamShape::tophat(r).unwrap()).unwrap();
    let grid = SphericalGrid::new(8, 8, Domain::Cap { theta_max: r }).unwrap();
    let got: f64 = grid.integrate(|d| incident_intensity(&beam, d));
    let want = 4.0 * PI * (0.5 * r).sin().powi(2) / 2.0;
    assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn tophat_on_full_sphere_does_not_converge() {
    let beam = IncidentBeam::unit(BeamShape::tophat(0.6).unwrap()).unwrap();
    let opts = AdaptiveOptions {
        rel_tol: 1e-10,
        start_nodes: 16,
        max_nodes: 512,
    };
    let err = integrate_adaptive(|d| incident_intensity(&beam, d), Domain::Full, opts).unwrap_err();
    assert!(matches!(err, Error::NoConvergence { .. }), "{err:?}");
}

#[test]
fn fixed_spec_reports_no_tolerance() {
    let spec = QuadratureSpec::Fixed {
        n_theta: 8,
        n_phi: 8,
    };
    let est = spec.integrate(Domain::Full, |_| 1.0).unwrap();
    assert_eq!(est.achieved_tol, None);
    assert_eq!((est.n_theta, est.n_phi), (8, 8));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let beam = IncidentBeam::unit(BeamShape::gaussian(0.3).unwrap()).unwrap();
    let dip = Dipole::new(Handedness::Plus, 0.8, 0.01, 0.4).unwrap();
    let run = || {
        let grid = SphericalGrid::new(
            96,
            128,
            Domain::Cap {
                theta_max: PI / 2.0,
            },
        )
        .unwrap();
        let p: f64 = grid.integrate(|d| incident_intensity(&beam, d));
        let k: RVec3 = grid.integrate(|d: Direction| {
            d.unit_vector() * magnus_core::radiometry::interference_intensity(&beam, &dip, d)
        });
        (p.to_bits(), k.x.to_bits(), k.y.to_bits(), k.z.to_bits())
    };
    let reference = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    for threads in [2, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        for _ in 0..3 {
            assert_eq!(pool.install(run), reference, "{threads} threads");
        }
    }
}

#[test]
fn grid_rejects_tiny_rules() {
    assert!(SphericalGrid::new(2, 8, Domain::Full).is_err());
    assert!(SphericalGrid::new(8, 2, Domain::Full).is_err());
}
