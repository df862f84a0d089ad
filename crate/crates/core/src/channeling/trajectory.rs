//! Leapfrog integration of single proton trajectories and the
//! small-amplitude transverse oscillation frequency.

use super::potential::ChannelPotential;
use super::{ChannelGeometry, DEFAULT_STEPS, R_MIN_NM};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const PARAXIAL_LIMIT_RAD: f64 = 0.1;

/// Paraxial particle state: transverse position (nm), transverse angles
/// (rad), kinetic energy (eV) and depth along the beam axis (nm).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtonState {
    pub x_nm: f64,
    pub y_nm: f64,
    pub psi_x_rad: f64,
    pub psi_y_rad: f64,
    pub energy_ev: f64,
    pub z_nm: f64,
}

impl ProtonState {
    pub fn at_entry(x_nm: f64, y_nm: f64, psi_x_rad: f64, psi_y_rad: f64, energy_ev: f64) -> Self {
        ProtonState {
            x_nm,
            y_nm,
            psi_x_rad,
            psi_y_rad,
            energy_ev,
            z_nm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy_ev > 0.0) {
            return Err(Error::domain(format!(
                "kinetic energy must be positive, got {}",
                self.energy_ev
            )));
        }
        let psi = (self.psi_x_rad * self.psi_x_rad + self.psi_y_rad * self.psi_y_rad).sqrt();
        if psi > PARAXIAL_LIMIT_RAD {
            return Err(Error::domain(format!(
                "angle {psi} rad violates the paraxial bound {PARAXIAL_LIMIT_RAD}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IntegrationOptions {
    pub steps: usize,
    /// Record (z, x, y, psi_x, psi_y) every `n` steps when Some(n).
    pub trace_every: Option<usize>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            steps: DEFAULT_STEPS,
            trace_every: None,
        }
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    pub exit: ProtonState,
    pub e_perp_entry_ev: f64,
    pub e_perp_exit_ev: f64,
    pub channeled: bool,
    pub min_string_distance_nm: f64,
    pub trace: Vec<[f64; 5]>,
}

/// Integrate the paraxial equations dx/dz = psi, dpsi/dz = -grad U / (2E)
/// with a fixed-step kick-drift-kick scheme over the crystal thickness.
///
/// A trajectory counts as channeled when its entry transverse energy is
/// below the channel barrier, it never approaches a string closer than the
/// clamp radius, and it stays inside the transverse box for the whole
/// thickness.
pub fn integrate_trajectory(
    initial: &ProtonState,
    potential: &ChannelPotential,
    string_offsets: &[[f64; 2]],
    options: &IntegrationOptions,
) -> Result<TrajectoryResult> {
    initial.validate()?;
    if initial.z_nm != 0.0 {
        return Err(Error::domain("trajectory must start at z = 0"));
    }
    if options.steps == 0 {
        return Err(Error::config("integration needs at least one step"));
    }

    let energy = initial.energy_ev;
    let thickness = potential.geometry().thickness_nm;
    let dz = thickness / options.steps as f64;
    let kick_scale = -1.0 / (2.0 * energy);

    let mut x = initial.x_nm;
    let mut y = initial.y_nm;
    let mut px = initial.psi_x_rad;
    let mut py = initial.psi_y_rad;
    let mut z = 0.0;

    let e_perp_entry = energy * (px * px + py * py)
        + potential.value_displaced(x, y, string_offsets);
    let barrier = potential.barrier_ev(string_offsets);
    let below_barrier = e_perp_entry < barrier;

    let mut min_dist = potential.nearest_string_distance(x, y, string_offsets);
    let mut exited_box = false;
    let mut trace = Vec::new();
    if options.trace_every.is_some() {
        trace.push([z, x, y, px, py]);
    }

    let mut grad = potential.gradient(x, y, string_offsets);
    for step in 0..options.steps {
        // kick (half)
        px += 0.5 * dz * kick_scale * grad[0];
        py += 0.5 * dz * kick_scale * grad[1];
        // drift
        x += dz * px;
        y += dz * py;
        z = (step + 1) as f64 * dz;
        // kick (half) with the updated force, reused next iteration
        grad = potential.gradient(x, y, string_offsets);
        px += 0.5 * dz * kick_scale * grad[0];
        py += 0.5 * dz * kick_scale * grad[1];

        if !(x.is_finite() && y.is_finite() && px.is_finite() && py.is_finite()) {
            return Err(Error::numerical(format!(
                "non-finite state at z = {z} nm (last good min distance {min_dist} nm)"
            )));
        }

        let dist = potential.nearest_string_distance(x, y, string_offsets);
        if dist < min_dist {
            min_dist = dist;
        }
        if let Some(every) = options.trace_every {
            if (step + 1) % every == 0 {
                trace.push([z, x, y, px, py]);
            }
        }
        if !potential.in_box(x, y) {
            exited_box = true;
            break;
        }
    }

    let e_perp_exit =
        energy * (px * px + py * py) + potential.value_displaced(x, y, string_offsets);
    let channeled = below_barrier && !exited_box && min_dist > R_MIN_NM;

    Ok(TrajectoryResult {
        exit: ProtonState {
            x_nm: x,
            y_nm: y,
            psi_x_rad: px,
            psi_y_rad: py,
            energy_ev: energy,
            z_nm: z,
        },
        e_perp_entry_ev: e_perp_entry,
        e_perp_exit_ev: e_perp_exit,
        channeled,
        min_string_distance_nm: min_dist,
        trace,
    })
}

/// Small-amplitude transverse oscillation frequency at the channel axis,
/// Hz: harmonic curvature of the potential via central finite difference,
/// converted to a temporal frequency with the relativistic proton speed.
pub fn axis_oscillation_frequency(energy_ev: f64, geom: &ChannelGeometry) -> Result<f64> {
    if !(energy_ev > 0.0) {
        return Err(Error::domain("kinetic energy must be positive"));
    }
    geom.validate()?;
    let potential = ChannelPotential::new(geom.clone())?;
    let [cx, cy] = potential.centroid();
    let h = 1e-3;
    let curvature = (potential.raw(cx + h, cy, &[]) - 2.0 * potential.raw(cx, cy, &[])
        + potential.raw(cx - h, cy, &[]))
        / (h * h);
    if curvature <= 0.0 {
        return Err(Error::geometry(format!(
            "channel center is not a potential minimum (curvature {curvature} eV/nm^2)"
        )));
    }
    let v = CONSTANTS.proton_speed_nm_s(energy_ev);
    Ok((curvature * v * v / (2.0 * energy_ev)).sqrt() / (2.0 * PI))
}
