//! Tensor-product quadrature on the sphere: Gauss–Legendre in `cos θ`, uniform
//! trapezoid in `φ`.
//!
//! Rows of constant `θ` are evaluated in parallel, but every row is summed in a
//! fixed node order with compensated summation and the row sums are reduced in
//! order, so results are bit-identical for any thread count.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fields::{CVec3, Direction, RVec3};

/// Hard limit on nodes per axis for adaptive refinement.
pub const MAX_NODES: usize = 1 << 14;

/// Values that can be integrated: a vector space over `f64` with a magnitude.
pub trait Integrand:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Integrand for RVec3 {
    fn zero() -> Self {
        RVec3::zeros()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Integrand for CVec3 {
    fn zero() -> Self {
        CVec3::ZERO
    }
    fn magnitude(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Integrand> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, value: T) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum
    }
}

impl<T: Integrand> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Region of the sphere to integrate over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Full,
    /// Polar cap `θ ≤ theta_max`.
    Cap {
        theta_max: f64,
    },
}

impl Domain {
    pub fn theta_max(&self) -> f64 {
        match *self {
            Domain::Full => PI,
            Domain::Cap { theta_max } => theta_max,
        }
    }

    pub fn solid_angle(&self) -> f64 {
        2.0 * PI * (1.0 - self.theta_max().cos())
    }

    fn validate(&self) -> Result<()> {
        let t = self.theta_max();
        if !(t > 0.0 && t <= PI) {
            return Err(invalid(
                "theta_max",
                format!("must lie in (0, pi], got {t}"),
            ));
        }
        Ok(())
    }
}

/// Immutable tensor-product rule over a [`Domain`].
#[derive(Debug, Clone)]
pub struct SphericalGrid {
    domain: Domain,
    theta: Vec<f64>,
    theta_weights: Vec<f64>,
    n_phi: usize,
}

impl SphericalGrid {
    pub fn new(n_theta: usize, n_phi: usize, domain: Domain) -> Result<Self> {
        if n_theta < 4 || n_phi < 4 {
            return Err(invalid(
                "grid",
                format!("need at least 4 nodes per axis, got {n_theta}x{n_phi}"),
            ));
        }
        domain.validate()?;
        let (t, w) = gauss_legendre(n_theta);
        // 1 - cos θ_max, computed without cancellation for small caps
        let span = 2.0 * (0.5 * domain.theta_max()).sin().powi(2);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut theta = Vec::with_capacity(n_theta);
        let mut theta_weights = Vec::with_capacity(n_theta);
        // Descending t so θ ascends.
        for (&ti, &wi) in t.iter().zip(&w).rev() {
            let one_minus_cos = 0.5 * span * (1.0 - ti);
            theta.push(2.0 * (0.5 * one_minus_cos).sqrt().asin());
            theta_weights.push(0.5 * span * wi * dphi);
        }
        Ok(Self {
            domain,
            theta,
            theta_weights,
            n_phi,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    /// All nodes with their weights, in summation order.
    pub fn nodes(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        self.theta
            .iter()
            .zip(&self.theta_weights)
            .flat_map(move |(&t, &w)| {
                (0..self.n_phi).map(move |j| (Direction::new(t, self.phi(j)), w))
            })
    }

    pub fn weight_sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for w in &self.theta_weights {
            acc.add(w * self.n_phi as f64);
        }
        acc.total()
    }

    /// `∫ f dΩ` over the grid's domain. Works for scalar and vector integrands.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: Integrand,
        F: Fn(Direction) -> T + Sync,
    {
        let rows: Vec<T> = self
            .theta
            .par_iter()
            .zip(self.theta_weights.par_iter())
            .map(|(&t, &w)| {
                let mut row = KahanSum::new();
                for j in 0..self.n_phi {
                    row.add(f(Direction::new(t, self.phi(j))));
                }
                row.total() * w
            })
            .collect();
        let mut acc = KahanSum::new();
        for r in rows {
            acc.add(r);
        }
        acc.total()
    }
}

/// Settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub start_nodes: usize,
    pub max_nodes: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            start_nodes: 16,
            max_nodes: MAX_NODES,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// An integral together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Relative change over the last refinement; `None` for a fixed rule.
    pub achieved_tol: Option<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl<T> Estimate<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate {
            value: f(self.value),
            achieved_tol: self.achieved_tol,
            n_theta: self.n_theta,
            n_phi: self.n_phi,
        }
    }
}

/// Doubles both node counts until two successive estimates agree to
/// `rel_tol`. Fails with [`Error::NoConvergence`] past `max_nodes`.
pub fn integrate_adaptive<T, F>(f: F, domain: Domain, opts: AdaptiveOptions) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(Direction) -> T + Sync,
{
    if !(opts.rel_tol > 0.0) {
        return Err(invalid(
            "rel_tol",
            format!("must be positive, got {}", opts.rel_tol),
        ));
    }
    let mut n = opts.start_nodes.max(4);
    if n > opts.max_nodes {
        return Err(invalid(
            "max_nodes",
            format!("node cap {} is below the starting rule {n}", opts.max_nodes),
        ));
    }
    let mut previous = SphericalGrid::new(n, n, domain)?.integrate(&f);
    let mut change = f64::INFINITY;
    while 2 * n <= opts.max_nodes {
        n *= 2;
        let current = SphericalGrid::new(n, n, domain)?.integrate(&f);
        let diff = (current - previous).magnitude();
        let scale = current.magnitude();
        change = if diff == 0.0 { 0.0 } else { diff / scale };
        if change < opts.rel_tol {
            return Ok(Estimate {
                value: current,
                achieved_tol: Some(change),
                n_theta: n,
                n_phi: n,
            });
        }
        previous = current;
    }
    Err(Error::NoConvergence {
        nodes: n,
        achieved: change,
        requested: opts.rel_tol,
    })
}

/// How the numerical paths choose their quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureSpec {
    Fixed { n_theta: usize, n_phi: usize },
    Adaptive(AdaptiveOptions),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::Adaptive(AdaptiveOptions::default())
    }
}

impl QuadratureSpec {
    pub fn integrate<T, F>(&self, domain: Domain, f: F) -> Result<Estimate<T>>
    where
        T: Integrand,
        F: Fn(Direction) -> T + Sync,
    {
        match *self {
            QuadratureSpec::Fixed { n_theta, n_phi } => {
                let grid = SphericalGrid::new(n_theta, n_phi, domain)?;
                Ok(Estimate {
                    value: grid.integrate(f),
                    achieved_tol: None,
                    n_theta,
                    n_phi,
                })
            }
            QuadratureSpec::Adaptive(opts) => integrate_adaptive(f, domain, opts),
        }
    }
}
