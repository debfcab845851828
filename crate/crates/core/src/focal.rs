//! Focal-plane field synthesized from the angular spectrum,
//! `Ẽ(x, y, 0) = k² ∫ E(Ω) e^{ik(u_x x + u_y y)} dΩ`, and spot-size metrics.
//!
//! The plane-wave phase factor is what turns the angular spectrum into a
//! spatial profile; at the origin it reduces to the bare integral of `E(Ω)`.
//! Lengths are in units of `1/k`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fields::{BeamShape, CVec3, IncidentBeam, RVec3};
use crate::quadrature::{Domain, SphericalGrid};

/// First zero of `J₁`.
pub const AIRY_FIRST_ZERO: f64 = 3.831_705_970_207_512;

/// Polar angle beyond which a Gaussian spectrum is dropped from the synthesis
/// (`exp(-49)` of the peak amplitude).
const GAUSSIAN_CUTOFF_WIDTHS: f64 = 7.0;

/// Nodes per block in [`FocalSynthesizer::map`].
const NODE_CHUNK: usize = 512;
/// Output columns per parallel task in [`FocalSynthesizer::map`].
const COLUMN_BLOCK: usize = 32;

#[derive(Debug, Clone, Copy)]
struct Node {
    ux: f64,
    uy: f64,
    /// Quadrature-weighted `E(Ω)`; real for an x-polarized beam.
    e: RVec3,
    /// Quadrature-weighted `u × E`.
    h: RVec3,
}

/// Precomputed quadrature of a beam's angular spectrum for repeated
/// focal-plane evaluation.
#[derive(Debug, Clone)]
pub struct FocalSynthesizer {
    nodes: Vec<Node>,
    in_phase_bound: f64,
}

/// Angular extent used for synthesis.
pub fn synthesis_cap(shape: &BeamShape) -> f64 {
    match *shape {
        BeamShape::Gaussian { w_theta } => (GAUSSIAN_CUTOFF_WIDTHS * w_theta).min(PI / 2.0),
        BeamShape::Tophat { r_theta } => r_theta,
    }
}

/// Nominal spot radius: `2/w_θ` (1/e² waist) or the Airy first null.
pub fn nominal_spot_radius(shape: &BeamShape) -> f64 {
    match *shape {
        BeamShape::Gaussian { w_theta } => 2.0 / w_theta,
        BeamShape::Tophat { r_theta } => AIRY_FIRST_ZERO / r_theta.sin(),
    }
}

impl FocalSynthesizer {
    /// Chooses a rule that resolves the plane-wave phases out to `max_radius`.
    pub fn new(beam: &IncidentBeam, max_radius: f64) -> Result<Self> {
        if !(max_radius >= 0.0 && max_radius.is_finite()) {
            return Err(invalid(
                "radius",
                format!("must be finite, got {max_radius}"),
            ));
        }
        let cap = synthesis_cap(&beam.shape());
        let bandwidth = max_radius * cap.sin();
        let n_phi = (bandwidth.ceil() as usize + 40).next_multiple_of(4);
        let n_theta = (0.6 * bandwidth).ceil() as usize + 48;
        let grid = SphericalGrid::new(n_theta, n_phi, Domain::Cap { theta_max: cap })?;
        Self::with_grid(beam, &grid)
    }

    /// Uses the given rule. [`map`](Self::map) relies on the mirror symmetry
    /// of the nodes, so `n_phi` must be even.
    pub fn with_grid(beam: &IncidentBeam, grid: &SphericalGrid) -> Result<Self> {
        if !grid.n_phi().is_multiple_of(2) {
            return Err(invalid(
                "n_phi",
                format!("must be even, got {}", grid.n_phi()),
            ));
        }
        let mut in_phase_bound = 0.0;
        let nodes = grid
            .nodes()
            .map(|(dir, w)| {
                let u = dir.unit_vector();
                let e = beam.field(dir).re();
                in_phase_bound += w * e.norm();
                Node {
                    ux: u.x,
                    uy: u.y,
                    e: e * w,
                    h: u.cross(&e) * w,
                }
            })
            .collect();
        Ok(Self {
            nodes,
            in_phase_bound: in_phase_bound * in_phase_bound,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(∫|E(Ω)| dΩ)²`, the intensity reached if every partial wave were in
    /// phase and co-polarized.
    pub fn in_phase_bound(&self) -> f64 {
        self.in_phase_bound
    }

    pub fn field(&self, x: f64, y: f64) -> CVec3 {
        self.fields(x, y).0
    }

    /// Electric and magnetic (`u × E`, vacuum impedance one) fields.
    pub fn fields(&self, x: f64, y: f64) -> (CVec3, CVec3) {
        let mut e = CVec3::ZERO;
        let mut h = CVec3::ZERO;
        for n in &self.nodes {
            let p = Complex64::from_polar(1.0, n.ux * x + n.uy * y);
            e = e + CVec3::from_real(&n.e) * p;
            h = h + CVec3::from_real(&n.h) * p;
        }
        (e, h)
    }

    /// Square map over `[-extent, extent]²` with `samples` points per side.
    ///
    /// An x-polarized spectrum is even or odd under `u_x → -u_x` and under
    /// `u_y → -u_y`, component by component, so on a mirror-symmetric rule
    /// each field component is a single separable sum such as
    /// `Σ E_x cos(u_x x) cos(u_y y)`. Those sums are evaluated as real
    /// matrix products over blocks of nodes.
    pub fn map(&self, extent: f64, samples: usize) -> Result<FocalMap> {
        if samples < 2 {
            return Err(invalid(
                "samples",
                format!("need at least 2, got {samples}"),
            ));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(invalid("extent", format!("must be positive, got {extent}")));
        }
        let coords = crate::deflection::linspace(-extent, extent, samples);
        let n = samples;
        // one set of six component sums per block of output columns (y)
        let mut blocks: Vec<(usize, [DMatrix<f64>; 6])> = (0..n)
            .step_by(COLUMN_BLOCK)
            .map(|y0| {
                let width = COLUMN_BLOCK.min(n - y0);
                (y0, std::array::from_fn(|_| DMatrix::zeros(n, width)))
            })
            .collect();
        for chunk in self.nodes.chunks(NODE_CHUNK) {
            let m = chunk.len();
            let cos_x = DMatrix::from_fn(n, m, |i, k| (chunk[k].ux * coords[i]).cos());
            let sin_x = DMatrix::from_fn(n, m, |i, k| (chunk[k].ux * coords[i]).sin());
            blocks.par_iter_mut().for_each(|(y0, acc)| {
                let width = acc[0].ncols();
                let ys = &coords[*y0..*y0 + width];
                let cos_y = DMatrix::from_fn(m, width, |k, j| (chunk[k].uy * ys[j]).cos());
                let sin_y = DMatrix::from_fn(m, width, |k, j| (chunk[k].uy * ys[j]).sin());
                let right = |coef: &dyn Fn(&Node) -> f64, odd: bool| {
                    let trig = if odd { &sin_y } else { &cos_y };
                    DMatrix::from_fn(m, width, |k, j| coef(&chunk[k]) * trig[(k, j)])
                };
                // Re E_x, Re E_y, Im E_z, Re H_x, Re H_y, Im H_z
                acc[0].gemm(1.0, &cos_x, &right(&|n| n.e.x, false), 1.0);
                acc[1].gemm(-1.0, &sin_x, &right(&|n| n.e.y, true), 1.0);
                acc[2].gemm(1.0, &sin_x, &right(&|n| n.e.z, false), 1.0);
                acc[3].gemm(-1.0, &sin_x, &right(&|n| n.h.x, true), 1.0);
                acc[4].gemm(1.0, &cos_x, &right(&|n| n.h.y, false), 1.0);
                acc[5].gemm(1.0, &cos_x, &right(&|n| n.h.z, true), 1.0);
            });
        }
        let mut e = vec![CVec3::ZERO; n * n];
        let mut h = vec![CVec3::ZERO; n * n];
        for (y0, acc) in &blocks {
            for j in 0..acc[0].ncols() {
                for i in 0..n {
                    let at = (y0 + j) * n + i;
                    e[at] = CVec3::new(
                        Complex64::new(acc[0][(i, j)], 0.0),
                        Complex64::new(acc[1][(i, j)], 0.0),
                        Complex64::new(0.0, acc[2][(i, j)]),
                    );
                    h[at] = CVec3::new(
                        Complex64::new(acc[3][(i, j)], 0.0),
                        Complex64::new(acc[4][(i, j)], 0.0),
                        Complex64::new(0.0, acc[5][(i, j)]),
                    );
                }
            }
        }
        Ok(FocalMap {
            coords,
            e,
            h,
            in_phase_bound: self.in_phase_bound,
        })
    }
}

/// Focal-plane field at `(x, y, 0)`.
pub fn focal_field(beam: &IncidentBeam, x: f64, y: f64) -> Result<CVec3> {
    Ok(FocalSynthesizer::new(beam, x.hypot(y))?.field(x, y))
}

/// Half-width of a default map: four nominal spot radii.
pub fn default_extent(shape: &BeamShape) -> f64 {
    4.0 * nominal_spot_radius(shape)
}

/// Smallest odd sample count, at least 129, that keeps the spacing within
/// [`MAX_SPACING`] over [`default_extent`].
pub fn default_samples(shape: &BeamShape) -> usize {
    let needed = (2.0 * default_extent(shape) / (0.9 * MAX_SPACING)).ceil() as usize + 1;
    needed.max(129) | 1
}

/// Map over [`default_extent`]. Use an odd `samples` so the optical axis is a
/// sample.
pub fn focal_map(beam: &IncidentBeam, samples: usize) -> Result<FocalMap> {
    let extent = default_extent(&beam.shape());
    FocalSynthesizer::new(beam, extent * std::f64::consts::SQRT_2)?.map(extent, samples)
}

/// Field samples on a uniform square grid, row-major in `y`.
#[derive(Debug, Clone)]
pub struct FocalMap {
    coords: Vec<f64>,
    e: Vec<CVec3>,
    h: Vec<CVec3>,
    in_phase_bound: f64,
}

impl FocalMap {
    /// Builds a map from externally supplied fields.
    pub fn from_fields(
        coords: Vec<f64>,
        e: Vec<CVec3>,
        h: Vec<CVec3>,
        in_phase_bound: f64,
    ) -> Result<Self> {
        let n = coords.len();
        if n < 2 || e.len() != n * n || h.len() != n * n {
            return Err(invalid(
                "map",
                "field arrays must be n x n over the coordinates",
            ));
        }
        Ok(Self {
            coords,
            e,
            h,
            in_phase_bound,
        })
    }

    /// Sample coordinates along either axis.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn samples(&self) -> usize {
        self.coords.len()
    }

    pub fn spacing(&self) -> f64 {
        self.coords[1] - self.coords[0]
    }

    pub fn e(&self, ix: usize, iy: usize) -> CVec3 {
        self.e[iy * self.samples() + ix]
    }

    pub fn h(&self, ix: usize, iy: usize) -> CVec3 {
        self.h[iy * self.samples() + ix]
    }

    pub fn intensity(&self, ix: usize, iy: usize) -> f64 {
        self.e(ix, iy).norm_sqr()
    }

    pub fn peak_intensity(&self) -> f64 {
        self.e.iter().map(CVec3::norm_sqr).fold(0.0, f64::max)
    }

    pub fn in_phase_bound(&self) -> f64 {
        self.in_phase_bound
    }

    /// Time-averaged `S_z = ½ Re(E × H*)_z`.
    pub fn poynting_z(&self, ix: usize, iy: usize) -> f64 {
        let e = self.e(ix, iy);
        let h = self.h(ix, iy);
        0.5 * (e.x * h.y.conj() - e.y * h.x.conj()).re
    }

    /// `∫S_z dx dy / (2π)²`, comparable to the angular beam power.
    pub fn transverse_power(&self) -> f64 {
        let n = self.samples();
        let mut acc = crate::quadrature::KahanSum::new();
        for iy in 0..n {
            for ix in 0..n {
                acc.add(self.poynting_z(ix, iy));
            }
        }
        acc.total() * self.spacing().powi(2) / (4.0 * PI * PI)
    }

    fn center_index(&self) -> Option<usize> {
        let n = self.samples();
        let tol = 1e-9 * self.spacing();
        (n % 2 == 1 && self.coords[n / 2].abs() < tol).then_some(n / 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    /// 1/e² intensity radius.
    pub waist: f64,
    pub peak: f64,
    /// Largest deviation from the fit relative to the peak.
    pub residual: f64,
}

/// Least-squares fit of `A exp(-2r²/W²)` to radial intensity samples.
pub fn fit_gaussian_waist(samples: &[(f64, f64)]) -> Result<GaussianFit> {
    let total: f64 = samples.iter().map(|s| s.1).sum();
    let peak_data = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if !(total > 0.0) {
        return Err(Error::FitFailed {
            residual: f64::INFINITY,
        });
    }
    // Start from the second moment; for the model ⟨r²⟩ = W²/2.
    let moment: f64 = samples.iter().map(|(r, i)| r * r * i).sum::<f64>() / total;
    let guess = (2.0 * moment).sqrt();

    let amplitude_for = |w: f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for &(r, i) in samples {
            let m = (-2.0 * r * r / (w * w)).exp();
            num += i * m;
            den += m * m;
        }
        num / den
    };
    let cost = |w: f64| {
        let a = amplitude_for(w);
        samples
            .iter()
            .map(|&(r, i)| (i - a * (-2.0 * r * r / (w * w)).exp()).powi(2))
            .sum::<f64>()
    };

    // golden section
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.3 * guess, 3.0 * guess);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while (b - a) > 1e-13 * guess {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    let waist = 0.5 * (a + b);
    let peak = amplitude_for(waist);
    let residual = samples
        .iter()
        .map(|&(r, i)| (i - peak * (-2.0 * r * r / (waist * waist)).exp()).abs())
        .fold(0.0, f64::max)
        / peak_data;
    Ok(GaussianFit {
        waist,
        peak,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpotMetrics {
    Waist {
        waist: f64,
        residual: f64,
        peak_ratio: f64,
    },
    FirstNull {
        radius: f64,
        peak_ratio: f64,
    },
}

impl SpotMetrics {
    /// Waist or first-null radius.
    pub fn radius(&self) -> f64 {
        match *self {
            SpotMetrics::Waist { waist, .. } => waist,
            SpotMetrics::FirstNull { radius, .. } => radius,
        }
    }

    /// Peak intensity over the in-phase bound.
    pub fn peak_ratio(&self) -> f64 {
        match *self {
            SpotMetrics::Waist { peak_ratio, .. } | SpotMetrics::FirstNull { peak_ratio, .. } => {
                peak_ratio
            }
        }
    }
}

/// Minimum sampling: eight samples per wavelength.
pub const MAX_SPACING: f64 = 2.0 * PI / 8.0;

/// Gaussian fit for Gaussian beams, first field zero along `y` for tophats.
pub fn spot_metrics(map: &FocalMap, shape: &BeamShape) -> Result<SpotMetrics> {
    if map.spacing() > MAX_SPACING {
        return Err(invalid(
            "map",
            format!(
                "spacing {} exceeds {MAX_SPACING:.4} (8 samples per wavelength)",
                map.spacing()
            ),
        ));
    }
    let peak_ratio = map.peak_intensity() / map.in_phase_bound();
    match shape {
        BeamShape::Gaussian { .. } => {
            let n = map.samples();
            let mut pts = Vec::with_capacity(n * n);
            for iy in 0..n {
                for ix in 0..n {
                    pts.push((map.coords[ix].hypot(map.coords[iy]), map.intensity(ix, iy)));
                }
            }
            let fit = fit_gaussian_waist(&pts)?;
            if fit.residual > 0.1 {
                return Err(Error::FitFailed {
                    residual: fit.residual,
                });
            }
            Ok(SpotMetrics::Waist {
                waist: fit.waist,
                residual: fit.residual,
                peak_ratio,
            })
        }
        BeamShape::Tophat { .. } => Ok(SpotMetrics::FirstNull {
            radius: first_null_along_y(map)?,
            peak_ratio,
        }),
    }
}

/// First sign change of the co-polarized field along `+y`, located on a
/// cubic through the four neighbouring samples. On the `y` axis the field of
/// an x-polarized beam is purely `E_x`, so this is a true intensity zero.
pub fn first_null_along_y(map: &FocalMap) -> Result<f64> {
    let c = map
        .center_index()
        .ok_or_else(|| invalid("map", "needs an odd sample count so the axis is sampled"))?;
    let n = map.samples();
    let reference = map.e(c, c).x;
    if reference.norm() == 0.0 {
        return Err(Error::FitFailed {
            residual: f64::INFINITY,
        });
    }
    let phase = reference.conj() / reference.norm();
    let values: Vec<(f64, f64)> = (c..n)
        .map(|iy| (map.coords[iy], (map.e(c, iy).x * phase).re))
        .collect();
    let k = values
        .windows(2)
        .position(|w| w[0].1.signum() != w[1].1.signum())
        .ok_or(Error::FitFailed {
            residual: f64::INFINITY,
        })?;
    let lo = k.saturating_sub(1).min(values.len().saturating_sub(4));
    let pts = &values[lo..(lo + 4).min(values.len())];
    let interp = |x: f64| -> f64 {
        let mut s = 0.0;
        for (i, &(xi, yi)) in pts.iter().enumerate() {
            let mut l = 1.0;
            for (j, &(xj, _)) in pts.iter().enumerate() {
                if i != j {
                    l *= (x - xj) / (xi - xj);
                }
            }
            s += yi * l;
        }
        s
    };
    crate::deflection::find_root(|x| Ok(interp(x)), values[k].0, values[k + 1].0, 0.0, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn synthetic_gaussian_fit_is_exact() {
        let w = 7.3;
        let pts: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let r = 0.1 * i as f64;
                (r, 2.5 * (-2.0 * r * r / (w * w)).exp())
            })
            .collect();
        let fit = fit_gaussian_waist(&pts).unwrap();
        assert_relative_eq!(fit.waist, w, max_relative = 1e-10);
        assert!(fit.residual < 1e-10, "{}", fit.residual);
    }

    #[test]
    fn on_axis_is_the_bare_integral() {
        let beam = IncidentBeam::unit(BeamShape::tophat(0.4).unwrap()).unwrap();
        let grid = SphericalGrid::new(32, 32, Domain::Cap { theta_max: 0.4 }).unwrap();
        let direct = grid.integrate(|d| beam.field(d));
        let synth = FocalSynthesizer::with_grid(&beam, &grid)
            .unwrap()
            .field(0.0, 0.0);
        assert!((synth - direct).norm_sqr().sqrt() < 1e-14);
    }

    #[test]
    fn tophat_peak_on_axis() {
        let beam = IncidentBeam::unit(BeamShape::tophat(0.6).unwrap()).unwrap();
        let s = FocalSynthesizer::new(&beam, 10.0).unwrap();
        let center = s.field(0.0, 0.0).norm_sqr();
        for (x, y) in [(0.5, 0.0), (0.0, 0.5), (1.0, 1.0), (3.0, -2.0)] {
            assert!(s.field(x, y).norm_sqr() < center);
        }
    }

    #[test]
    fn map_matches_pointwise_evaluation() {
        let beam = IncidentBeam::unit(BeamShape::gaussian(0.3).unwrap()).unwrap();
        let s = FocalSynthesizer::new(&beam, 40.0).unwrap();
        let map = s.map(20.0, 41).unwrap();
        for (ix, iy) in [(0, 0), (20, 20), (33, 7), (40, 40)] {
            let direct = s.field(map.coords()[ix], map.coords()[iy]);
            assert!(
                (direct - map.e(ix, iy)).norm_sqr().sqrt()
                    < 1e-12 * direct.norm_sqr().sqrt().max(1e-3)
            );
        }
    }

    #[test]
    fn rejects_coarse_maps() {
        let beam = IncidentBeam::unit(BeamShape::gaussian(0.3).unwrap()).unwrap();
        let map = FocalSynthesizer::new(&beam, 60.0)
            .unwrap()
            .map(40.0, 33)
            .unwrap();
        assert!(spot_metrics(&map, &beam.shape()).is_err());
    }
}
