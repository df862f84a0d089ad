//! Beam ensembles: per-particle RNG substreams, entry sampling, frozen
//! thermal string displacements, exit histograms and summary statistics.

use super::potential::{channel_bbox, point_in_channel, ChannelPotential};
use super::trajectory::{integrate_trajectory, IntegrationOptions, ProtonState, TrajectoryResult};
use super::{critical_angle, ChannelGeometry, DEFAULT_STEPS};
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Beam angle given either directly in radians or as a fraction of the
/// critical channeling angle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum AngleSpec {
    Rad(f64),
    FracPsiC(f64),
}

impl AngleSpec {
    pub fn resolve(&self, psi_c: f64) -> f64 {
        match *self {
            AngleSpec::Rad(v) => v,
            AngleSpec::FracPsiC(f) => f * psi_c,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum EntryDistribution {
    /// Uniform over the channel interior (convex hull of the strings).
    UniformChannel,
    /// Fixed entry point.
    Point([f64; 2]),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ThermalMode {
    /// Each trajectory samples independent Gaussian string displacements.
    FrozenStrings,
    /// Strings fixed at their ideal positions (smooth reproducible field).
    Static,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    pub tilt: AngleSpec,
    pub divergence: AngleSpec,
    pub n_particles: usize,
    pub entry: EntryDistribution,
    pub seed: u64,
    pub thermal_mode: ThermalMode,
    pub energy_ev: f64,
    pub steps: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            tilt: AngleSpec::Rad(0.0),
            divergence: AngleSpec::Rad(0.0),
            n_particles: 1000,
            entry: EntryDistribution::UniformChannel,
            seed: 0,
            thermal_mode: ThermalMode::FrozenStrings,
            energy_ev: 2.0e6,
            steps: DEFAULT_STEPS,
        }
    }
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::config("n_particles must be >= 1"));
        }
        if !(self.energy_ev > 0.0) {
            return Err(Error::config("energy_ev must be positive"));
        }
        if self.steps == 0 {
            return Err(Error::config("steps must be >= 1"));
        }
        let div = match self.divergence {
            AngleSpec::Rad(v) => v,
            AngleSpec::FracPsiC(f) => f,
        };
        if div < 0.0 {
            return Err(Error::config("divergence must be >= 0"));
        }
        Ok(())
    }
}

/// Integer histogram with fixed, config-derived bin edges. Samples outside
/// the range are counted in the end bins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram {
            lo,
            hi,
            counts: vec![0; bins],
        }
    }

    fn add(&mut self, value: f64) {
        let bins = self.counts.len();
        let t = (value - self.lo) / (self.hi - self.lo);
        let idx = ((t * bins as f64).floor() as i64).clamp(0, bins as i64 - 1) as usize;
        self.counts[idx] += 1;
    }

    pub fn edges(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let bins = self.counts.len();
        let width = (self.hi - self.lo) / bins as f64;
        (0..bins).map(move |i| (self.lo + i as f64 * width, self.lo + (i + 1) as f64 * width))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamSummary {
    pub n_particles: usize,
    pub channeled_fraction: f64,
    /// RMS exit radius of channeled particles about the channel axis, nm.
    pub rms_spot_nm: Option<f64>,
    pub psi_c_rad: f64,
    pub tilt_rad: f64,
    pub divergence_rad: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BeamResult {
    pub trajectories: Vec<TrajectoryResult>,
    pub summary: BeamSummary,
    pub exit_angle_hist: Histogram,
    pub exit_radius_hist: Histogram,
}

/// Simulate an ensemble of trajectories. Particle `i` draws from the
/// substream (seed, i); integer histograms and all floating summaries are
/// accumulated in particle-index order after the parallel map, so the
/// output is bit-identical for a fixed seed regardless of worker count.
pub fn simulate_beam(beam: &BeamConfig, geom: &ChannelGeometry) -> Result<BeamResult> {
    beam.validate()?;
    geom.validate()?;
    let potential = ChannelPotential::new(geom.clone())?;
    let psi_c = critical_angle(beam.energy_ev, geom)?;
    let tilt = beam.tilt.resolve(psi_c);
    let divergence = beam.divergence.resolve(psi_c);
    let options = IntegrationOptions {
        steps: beam.steps,
        trace_every: None,
    };
    let n_strings = geom.string_positions_nm.len();

    let trajectories: Vec<TrajectoryResult> = (0..beam.n_particles)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(beam.seed, Stream::BeamParticle, i as u64);
            let (x, y) = sample_entry(&beam.entry, &potential, &mut rng);
            // Angle normals are always drawn so streams align across
            // divergence settings.
            let gx: f64 = StandardNormal.sample(&mut rng);
            let gy: f64 = StandardNormal.sample(&mut rng);
            let psi_x = tilt + divergence * gx;
            let psi_y = divergence * gy;
            let offsets: Vec<[f64; 2]> = match beam.thermal_mode {
                ThermalMode::FrozenStrings => (0..n_strings)
                    .map(|_| {
                        let ox: f64 = StandardNormal.sample(&mut rng);
                        let oy: f64 = StandardNormal.sample(&mut rng);
                        [geom.sigma_thermal_nm * ox, geom.sigma_thermal_nm * oy]
                    })
                    .collect(),
                ThermalMode::Static => Vec::new(),
            };
            let init = ProtonState::at_entry(x, y, psi_x, psi_y, beam.energy_ev);
            integrate_trajectory(&init, &potential, &offsets, &options)
        })
        .collect::<Result<Vec<_>>>()?;

    let centroid = potential.centroid();
    let mut angle_hist = Histogram::new(tilt - 3.0 * psi_c, tilt + 3.0 * psi_c, 120);
    let mut radius_hist = Histogram::new(0.0, 3.0 * geom.half_width(), 120);
    let mut channeled = 0usize;
    let mut spot_sq_sum = 0.0;
    for t in &trajectories {
        angle_hist.add(t.exit.psi_x_rad);
        let dx = t.exit.x_nm - centroid[0];
        let dy = t.exit.y_nm - centroid[1];
        radius_hist.add((dx * dx + dy * dy).sqrt());
        if t.channeled {
            channeled += 1;
            spot_sq_sum += dx * dx + dy * dy;
        }
    }
    let channeled_fraction = channeled as f64 / beam.n_particles as f64;
    let rms_spot_nm = if channeled > 0 {
        Some((spot_sq_sum / channeled as f64).sqrt())
    } else {
        None
    };

    Ok(BeamResult {
        summary: BeamSummary {
            n_particles: beam.n_particles,
            channeled_fraction,
            rms_spot_nm,
            psi_c_rad: psi_c,
            tilt_rad: tilt,
            divergence_rad: divergence,
            seed: beam.seed,
        },
        trajectories,
        exit_angle_hist: angle_hist,
        exit_radius_hist: radius_hist,
    })
}

fn sample_entry(
    entry: &EntryDistribution,
    potential: &ChannelPotential,
    rng: &mut impl Rng,
) -> (f64, f64) {
    match entry {
        EntryDistribution::Point(p) => (p[0], p[1]),
        EntryDistribution::UniformChannel => {
            let [lo_x, hi_x, lo_y, hi_y] = channel_bbox(potential);
            loop {
                let x = rng.random_range(lo_x..hi_x);
                let y = rng.random_range(lo_y..hi_y);
                if point_in_channel(potential, x, y) {
                    return (x, y);
                }
            }
        }
    }
}
