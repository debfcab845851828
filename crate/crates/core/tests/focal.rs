use std::f64::consts::PI;

use magnus_core::fields::{BeamShape, IncidentBeam};
use magnus_core::focal::*;
use magnus_core::radiometry::beam_power_numeric;
use magnus_core::{AdaptiveOptions, CVec3, Domain, Error, QuadratureSpec, SphericalGrid};

fn gauss(w: f64) -> IncidentBeam {
    IncidentBeam::unit(BeamShape::gaussian(w).unwrap()).unwrap()
}

fn tophat(r: f64) -> IncidentBeam {
    IncidentBeam::unit(BeamShape::tophat(r).unwrap()).unwrap()
}

fn default_map(beam: &IncidentBeam) -> FocalMap {
    focal_map(beam, default_samples(&beam.shape())).unwrap()
}

#[test]
fn exact_gaussian_is_recovered_by_the_fit() {
    let samples: Vec<(f64, f64)> = (0..400)
        .map(|i| {
            let r = i as f64 * 0.05;
            (r, 3.0 * (-2.0 * r * r / 49.0).exp())
        })
        .collect();
    let fit = fit_gaussian_waist(&samples).unwrap();
    assert!((fit.waist - 7.0).abs() < 1e-10);
    assert!((fit.peak - 3.0).abs() < 1e-10);
    assert!(fit.residual < 1e-10);
}

#[test]
fn gaussian_waist_at_narrow_width() {
    let map = default_map(&gauss(0.1));
    let m = spot_metrics(&map, &BeamShape::gaussian(0.1).unwrap()).unwrap();
    assert!((m.radius() / 20.0 - 1.0).abs() < 0.01, "{}", m.radius());
    assert!(m.peak_ratio() > 0.9 && m.peak_ratio() <= 1.0 + 1e-12);
}

#[test]
fn waist_times_width_is_constant() {
    let products: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&w| {
            let map = default_map(&gauss(w));
            spot_metrics(&map, &BeamShape::gaussian(w).unwrap())
                .unwrap()
                .radius()
                * w
        })
        .collect();
    let lo = products.iter().cloned().fold(f64::MAX, f64::min);
    let hi = products.iter().cloned().fold(f64::MIN, f64::max);
    assert!(hi / lo - 1.0 < 0.02, "{products:?}");
}

#[test]
fn tophat_first_null_is_airy() {
    for r in [0.3, 0.6] {
        let map = default_map(&tophat(r));
        let null = spot_metrics(&map, &BeamShape::tophat(r).unwrap())
            .unwrap()
            .radius();
        let nominal = AIRY_FIRST_ZERO / f64::sin(r);
        let tol = if r <= 0.3 { 0.02 } else { 0.05 };
        assert!(
            (null / nominal - 1.0).abs() < tol,
            "r={r}: {null} vs {nominal}"
        );
    }
    assert!((nominal_spot_radius(&BeamShape::tophat(0.3).unwrap()) - 12.96).abs() < 0.01);
}

#[test]
fn tophat_is_brightest_on_axis() {
    let b = tophat(0.6);
    let synth = FocalSynthesizer::new(&b, 20.0).unwrap();
    let center = synth.field(0.0, 0.0).norm_sqr();
    // cross-polarized components cancel on axis; the co-polarized ones add
    assert!(center / synth.in_phase_bound() > 0.9);
    for (x, y) in [(0.5, 0.0), (0.0, 0.5), (2.0, 1.0), (-3.0, 4.0)] {
        assert!(synth.field(x, y).norm_sqr() < center);
    }
}

#[test]
fn on_axis_field_is_the_bare_spectrum_integral() {
    let b = gauss(0.3);
    let grid = SphericalGrid::new(
        64,
        64,
        Domain::Cap {
            theta_max: PI / 2.0,
        },
    )
    .unwrap();
    let bare: CVec3 = grid.integrate(|d| b.field(d));
    let got = focal_field(&b, 0.0, 0.0).unwrap();
    assert!((got - bare).norm_sqr().sqrt() < 1e-10 * bare.norm_sqr().sqrt());
}

#[test]
fn map_matches_pointwise_synthesis() {
    let b = gauss(0.2);
    let synth = FocalSynthesizer::new(&b, 60.0).unwrap();
    let map = synth.map(40.0, 65).unwrap();
    let c = map.coords();
    for (ix, iy) in [(0, 0), (32, 32), (10, 50), (64, 3), (40, 33)] {
        let direct = synth.field(c[ix], c[iy]);
        let err = (map.e(ix, iy) - direct).norm_sqr().sqrt();
        assert!(
            err < 1e-10 * synth.in_phase_bound().sqrt(),
            "({ix},{iy}): {err}"
        );
    }
}

#[test]
fn flux_through_focal_plane_equals_beam_power() {
    let quad = QuadratureSpec::Adaptive(AdaptiveOptions::with_tol(1e-12));
    for w in [0.1, 0.2, 0.3] {
        let b = gauss(w);
        let map = default_map(&b);
        let p = beam_power_numeric(&b, &quad).unwrap().value;
        let flux = map.transverse_power();
        assert!((flux / p - 1.0).abs() < 0.02, "w={w}: {flux} vs {p}");
    }
}

#[test]
fn maps_are_mirror_symmetric_in_y() {
    for b in [gauss(0.3), tophat(0.4)] {
        let map = default_map(&b);
        let n = map.samples();
        for iy in 0..n {
            for ix in (0..n).step_by(7) {
                let a = map.intensity(ix, iy);
                let m = map.intensity(ix, n - 1 - iy);
                assert!((a - m).abs() <= 1e-9 * map.peak_intensity());
                assert!(a >= 0.0);
            }
        }
    }
}

#[test]
fn coarse_maps_are_rejected() {
    let b = tophat(0.3);
    let map = focal_map(&b, 129).unwrap();
    assert!(map.spacing() > MAX_SPACING);
    assert!(matches!(
        spot_metrics(&map, &b.shape()),
        Err(Error::InvalidParameter { .. })
    ));
    let even = focal_map(&b, 180).unwrap();
    assert!(first_null_along_y(&even).is_err());
}

#[test]
fn default_sampling_resolves_every_width() {
    for shape in [
        BeamShape::gaussian(0.05).unwrap(),
        BeamShape::tophat(0.2).unwrap(),
        BeamShape::tophat(1.2).unwrap(),
    ] {
        let n = default_samples(&shape);
        assert!(n % 2 == 1 && n >= 129);
        assert!(2.0 * default_extent(&shape) / (n - 1) as f64 <= MAX_SPACING);
    }
}
