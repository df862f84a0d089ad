//! Paraxial proton transport in the continuum potential of an axial
//! crystal channel: string potential, trajectory integration and beam
//! ensembles with exit statistics.

mod beam;
mod potential;
mod trajectory;

pub use beam::{
    simulate_beam, AngleSpec, BeamConfig, BeamResult, BeamSummary, EntryDistribution, Histogram,
    ThermalMode,
};
pub use potential::{
    channel_potential, critical_angle, moliere_string_potential, ChannelPotential,
};
pub use trajectory::{
    axis_oscillation_frequency, integrate_trajectory, IntegrationOptions, ProtonState,
    TrajectoryResult,
};

use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default number of leapfrog steps over the crystal thickness.
pub const DEFAULT_STEPS: usize = 4096;

/// Clamp radius for the string potential, nm. The potential is constant
/// below this distance and trajectories that get this close to a string
/// are flagged dechanneled.
pub const R_MIN_NM: f64 = 1e-4;

const ALPHA_SUM_TOL: f64 = 1e-12;

/// Crystal channel geometry: atomic strings of the axial channel plus the
/// screening parameters of the string potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelGeometry {
    /// Projectile atomic number.
    pub z1: u32,
    /// Target atomic number.
    pub z2: u32,
    /// Atomic spacing along a string, nm.
    pub period_nm: f64,
    /// Screening radius, nm. Defaults to the Thomas-Fermi value for z2.
    pub screening_radius_nm: f64,
    /// Transverse string positions, nm.
    pub string_positions_nm: Vec<[f64; 2]>,
    /// Crystal length along the beam axis, nm.
    pub thickness_nm: f64,
    /// One-dimensional thermal vibration amplitude, nm.
    pub sigma_thermal_nm: f64,
    pub moliere_alphas: [f64; 3],
    pub moliere_betas: [f64; 3],
    /// Distance from a string at which the channeling barrier is probed,
    /// nm. Defaults to sigma_thermal + screening radius.
    pub barrier_distance_nm: Option<f64>,
}

impl Default for ChannelGeometry {
    fn default() -> Self {
        let quarter = 0.5431 / 4.0;
        ChannelGeometry {
            z1: 1,
            z2: 14,
            period_nm: 0.5431,
            screening_radius_nm: CONSTANTS.screening_radius_nm(14),
            // The four strings bounding the Si <100> axial channel sit a
            // quarter lattice period from the channel axis.
            string_positions_nm: vec![
                [quarter, 0.0],
                [-quarter, 0.0],
                [0.0, quarter],
                [0.0, -quarter],
            ],
            thickness_nm: 92.0,
            sigma_thermal_nm: 0.0074,
            moliere_alphas: [0.35, 0.55, 0.10],
            moliere_betas: [0.30, 1.20, 6.00],
            barrier_distance_nm: None,
        }
    }
}

impl ChannelGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.z1 < 1 || self.z2 < 1 {
            return Err(Error::config("atomic numbers must be >= 1"));
        }
        for (name, v) in [
            ("period_nm", self.period_nm),
            ("screening_radius_nm", self.screening_radius_nm),
            ("thickness_nm", self.thickness_nm),
            ("sigma_thermal_nm", self.sigma_thermal_nm),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        let alpha_sum: f64 = self.moliere_alphas.iter().sum();
        if (alpha_sum - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(Error::config(format!(
                "screening weights must sum to 1, got {alpha_sum}"
            )));
        }
        if self.moliere_betas.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::config("screening exponents must be positive"));
        }
        if self.string_positions_nm.is_empty() {
            return Err(Error::config("at least one string is required"));
        }
        if let Some(b) = self.barrier_distance_nm {
            if !(b > 0.0) {
                return Err(Error::config("barrier_distance_nm must be positive"));
            }
        }
        Ok(())
    }

    /// Distance from a string at which the barrier is evaluated.
    pub fn barrier_distance(&self) -> f64 {
        self.barrier_distance_nm
            .unwrap_or(self.sigma_thermal_nm + self.screening_radius_nm)
    }

    /// Centroid of the string positions (the channel axis).
    pub fn centroid(&self) -> [f64; 2] {
        let n = self.string_positions_nm.len() as f64;
        let (sx, sy) = self
            .string_positions_nm
            .iter()
            .fold((0.0, 0.0), |(ax, ay), p| (ax + p[0], ay + p[1]));
        [sx / n, sy / n]
    }

    /// Half-width of the channel: max coordinate extent of any string
    /// relative to the centroid.
    pub fn half_width(&self) -> f64 {
        let c = self.centroid();
        self.string_positions_nm
            .iter()
            .map(|p| (p[0] - c[0]).abs().max((p[1] - c[1]).abs()))
            .fold(0.0, f64::max)
            .max(self.screening_radius_nm)
    }
}
