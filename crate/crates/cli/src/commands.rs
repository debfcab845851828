//! One function per subcommand, each turning a validated configuration into
//! a [`Table`].

use magnus_core::deflection::{
    deflection_analytic, deflection_numeric, equilibrium_displacement, radiant_profile,
    scan as sweep, DeflectionResult, ForceModel, ScanAxis,
};
use magnus_core::dynamics::{
    adiabaticity_check, max_step, resonant_escape_estimate, simulate, trap_frequency, ShakeSetup,
};
use magnus_core::focal::{
    default_samples, focal_map, nominal_spot_radius, spot_metrics, SpotMetrics,
};
use magnus_core::radiometry::beam_power_analytic;
use magnus_core::IncidentBeam;

use crate::config::{Axis, Resolved};
use crate::error::CliError;
use crate::output::{col, Cell, Table};

fn beam(r: &Resolved) -> Result<IncidentBeam, CliError> {
    Ok(IncidentBeam::unit(r.shape)?)
}

fn deflection_row(d: &DeflectionResult) -> Vec<Cell> {
    let k = d.delta_k();
    vec![
        d.method().as_str().into(),
        d.delta_theta().into(),
        k.x.into(),
        k.y.into(),
        k.z.into(),
        d.force_x().into(),
        d.scattered_amplitude().into(),
        d.achieved_tol().into(),
    ]
}

pub fn deflect(r: &Resolved) -> Result<Table, CliError> {
    let b = beam(r)?;
    let analytic = deflection_analytic(&r.shape, r.detuning, r.sigma, r.kd);
    let numeric = deflection_numeric(&b, r.detuning, r.sigma, r.kd, &r.grid)?;
    let mut t = Table::new(
        "deflect",
        vec![
            col("method", "-"),
            col("delta_theta", "rad"),
            col("delta_k_x", "k"),
            col("delta_k_y", "k"),
            col("delta_k_z", "k"),
            col("force_x", "P/c"),
            col("scattered_amplitude", "E0"),
            col("achieved_tol", "1"),
        ],
    );
    t.push(deflection_row(&analytic));
    t.push(deflection_row(&numeric));
    let rel = if analytic.delta_theta() != 0.0 {
        Some(numeric.delta_theta() / analytic.delta_theta() - 1.0)
    } else {
        None
    };
    t.summary.push("numeric_over_analytic_minus_one", rel);
    Ok(t)
}

pub fn scan(r: &Resolved) -> Result<Table, CliError> {
    if r.axis == Axis::Profile {
        return profile(r);
    }
    let b = beam(r)?;
    let (from, to) = r.range;
    let axis = match r.axis {
        Axis::Detuning => ScanAxis::Detuning { from, to, kd: r.kd },
        _ => ScanAxis::Displacement {
            from,
            to,
            detuning: r.detuning,
        },
    };
    let rows = sweep(&b, r.sigma, axis, r.points, &r.grid)?;
    let mut t = Table::new(
        "scan",
        vec![
            col("detuning", "gamma"),
            col("kd", "1"),
            col("delta_theta_analytic", "rad"),
            col("delta_theta_numeric", "rad"),
            col("force_x_analytic", "P/c"),
            col("force_x_numeric", "P/c"),
            col("delta_k_z_numeric", "k"),
            col("scattered_amplitude", "E0"),
            col("achieved_tol", "1"),
        ],
    );
    for row in &rows {
        t.push(vec![
            row.detuning.into(),
            row.kd.into(),
            row.analytic.delta_theta().into(),
            row.numeric.delta_theta().into(),
            row.analytic.force_x().into(),
            row.numeric.force_x().into(),
            row.numeric.delta_k().z.into(),
            row.numeric.scattered_amplitude().into(),
            row.numeric.achieved_tol().into(),
        ]);
    }
    Ok(t)
}

/// Radiant intensity in the plane of the dipole, `θ < 0` standing for the
/// half plane `φ = π`.
pub fn profile(r: &Resolved) -> Result<Table, CliError> {
    let b = beam(r)?;
    let points = radiant_profile(&b, r.detuning, r.sigma, r.points, &r.grid)?;
    let mut t = Table::new(
        "profile",
        vec![col("theta", "rad"), col("j_in", "J0"), col("j_total", "J0")],
    );
    let mut best = (f64::NEG_INFINITY, 0.0);
    for p in &points {
        if p.j_total > best.0 {
            best = (p.j_total, p.theta);
        }
        t.push(vec![p.theta.into(), p.j_in.into(), p.j_total.into()]);
    }
    t.summary.push("theta_at_max_j_total", best.1);
    Ok(t)
}

pub fn equilibrium(r: &Resolved) -> Result<Table, CliError> {
    let b = beam(r)?;
    let mut t = Table::new(
        "equilibrium",
        vec![
            col("model", "-"),
            col("kd_star", "1"),
            col("kd_star_minus_sigma", "1"),
        ],
    );
    for (name, model) in [
        ("analytic", ForceModel::Analytic),
        ("numeric", ForceModel::Numeric(r.grid)),
    ] {
        let kd = equilibrium_displacement(&b, r.detuning, r.sigma, model)?;
        t.push(vec![name.into(), kd.into(), (kd - r.sigma.sign()).into()]);
    }
    Ok(t)
}

pub fn shake(r: &Resolved) -> Result<Table, CliError> {
    let setup = ShakeSetup {
        potential: r.potential,
        ..ShakeSetup::default()
    };
    let traj = simulate(&r.trap, &r.drive, &setup, r.dt, r.t_max)?;
    let omega = trap_frequency(&r.trap);
    let estimate = resonant_escape_estimate(&r.trap);
    let adiabatic = adiabaticity_check(&r.drive);
    let mut t = Table::new(
        "shake",
        vec![col("t", "s"), col("x", "m"), col("v", "m/s"), col("E", "J")],
    );
    for i in 0..traj.len() {
        t.push(vec![
            traj.times[i].into(),
            traj.positions[i].into(),
            traj.velocities[i].into(),
            traj.energies[i].into(),
        ]);
    }
    let none = || Cell::Text("none".into());
    let s = &mut t.summary;
    s.push("trap_frequency_rad_per_s", omega);
    s.push("drive_over_trap_frequency", r.drive.omega_b / omega);
    s.push("step_limit_s", max_step(&r.trap, &r.drive));
    s.push("n_cycles_estimate", estimate.n_cycles);
    s.push("exit_speed_estimate_m_per_s", estimate.exit_speed);
    match traj.escape_time {
        Some(te) => {
            let last = traj.len() - 1;
            let criterion = if traj.energies[last] > r.trap.depth {
                "energy above trap depth"
            } else {
                "displacement beyond 3 waists"
            };
            s.push("escape_time_s", te);
            s.push("n_cycles_simulated", traj.escape_cycles(r.drive.omega_b));
            s.push("exit_speed_m_per_s", traj.velocities[last].abs());
            s.push("escape_criterion", criterion);
        }
        None => {
            s.0.push(("escape_time_s", none()));
            s.0.push(("n_cycles_simulated", none()));
            s.0.push(("exit_speed_m_per_s", none()));
            s.0.push(("escape_criterion", none()));
        }
    }
    let peak = traj.energies.iter().fold(0.0f64, |m, &e| m.max(e));
    s.push("max_energy_over_depth", peak / r.trap.depth);
    s.push("adiabaticity_ratio", adiabatic.ratio);
    s.push("adiabatic", if adiabatic.adiabatic { "yes" } else { "no" });
    Ok(t)
}

pub fn focal(r: &Resolved) -> Result<Table, CliError> {
    let b = beam(r)?;
    let map = focal_map(&b, default_samples(&r.shape))?;
    let metrics = spot_metrics(&map, &r.shape)?;
    let nominal = nominal_spot_radius(&r.shape);
    let mut t = Table::new(
        "focal",
        vec![
            col("x", "1/k"),
            col("y", "1/k"),
            col("intensity", "E0^2"),
            col("poynting_z", "E0^2"),
        ],
    );
    let c = map.coords();
    for iy in 0..map.samples() {
        for ix in 0..map.samples() {
            t.push(vec![
                c[ix].into(),
                c[iy].into(),
                map.intensity(ix, iy).into(),
                map.poynting_z(ix, iy).into(),
            ]);
        }
    }
    let s = &mut t.summary;
    match metrics {
        SpotMetrics::Waist {
            waist, residual, ..
        } => {
            s.push("spot_metric", "gaussian waist of |E|^2");
            s.push("spot_radius", waist);
            s.push("fit_residual", residual);
        }
        SpotMetrics::FirstNull { radius, .. } => {
            s.push("spot_metric", "first null along y");
            s.push("spot_radius", radius);
        }
    }
    s.push("nominal_radius", nominal);
    s.push("spot_over_nominal", metrics.radius() / nominal);
    s.push("peak_over_in_phase_bound", metrics.peak_ratio());
    s.push("transverse_power", map.transverse_power());
    s.push("beam_power_analytic", beam_power_analytic(&b));
    s.push("samples", Cell::Int(map.samples() as i64));
    s.push("spacing", map.spacing());
    Ok(t)
}
