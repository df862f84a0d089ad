//! Continuum string potential of the channel and its cached offset.

use super::{ChannelGeometry, R_MIN_NM};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::special::{bessel_k0, bessel_k1};

const OFFSET_GRID: usize = 512;

/// Continuum potential of a single atomic string at distance `r_nm`, eV.
/// Clamped to its value at `R_MIN_NM` for smaller distances.
pub fn moliere_string_potential(r_nm: f64, geom: &ChannelGeometry) -> f64 {
    let r = r_nm.max(R_MIN_NM);
    let prefactor =
        2.0 * geom.z1 as f64 * geom.z2 as f64 * CONSTANTS.coulomb_e2_ev_nm / geom.period_nm;
    let mut sum = 0.0;
    for i in 0..3 {
        sum += geom.moliere_alphas[i]
            * bessel_k0(geom.moliere_betas[i] * r / geom.screening_radius_nm);
    }
    prefactor * sum
}

/// d/dr of the single-string potential, eV/nm (zero inside the clamp).
fn moliere_string_gradient(r_nm: f64, geom: &ChannelGeometry) -> f64 {
    if r_nm < R_MIN_NM {
        return 0.0;
    }
    let prefactor =
        2.0 * geom.z1 as f64 * geom.z2 as f64 * CONSTANTS.coulomb_e2_ev_nm / geom.period_nm;
    let mut sum = 0.0;
    for i in 0..3 {
        let scale = geom.moliere_betas[i] / geom.screening_radius_nm;
        sum -= geom.moliere_alphas[i] * scale * bessel_k1(scale * r_nm);
    }
    prefactor * sum
}

/// Critical channeling angle sqrt(2 Z1 Z2 e^2 / (d E)), rad.
pub fn critical_angle(energy_ev: f64, geom: &ChannelGeometry) -> Result<f64> {
    if !(energy_ev > 0.0) {
        return Err(Error::domain(format!(
            "kinetic energy must be positive, got {energy_ev}"
        )));
    }
    Ok(
        (2.0 * geom.z1 as f64 * geom.z2 as f64 * CONSTANTS.coulomb_e2_ev_nm
            / (geom.period_nm * energy_ev))
            .sqrt(),
    )
}

/// Channel potential with its offset cached: the sum of string potentials
/// shifted so the minimum over the channel interior (convex hull of the
/// strings) is zero.
#[derive(Debug, Clone)]
pub struct ChannelPotential {
    geom: ChannelGeometry,
    offset_ev: f64,
    half_width: f64,
    centroid: [f64; 2],
    /// Convex hull of the strings, counterclockwise. Empty when the
    /// strings are collinear; the bounding box is used instead.
    hull: Vec<[f64; 2]>,
    bbox: [f64; 4],
}

impl ChannelPotential {
    pub fn new(geom: ChannelGeometry) -> Result<Self> {
        geom.validate()?;
        let hull = convex_hull(&geom.string_positions_nm);
        let margin = geom.screening_radius_nm;
        let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &geom.string_positions_nm {
            lo_x = lo_x.min(p[0]);
            hi_x = hi_x.max(p[0]);
            lo_y = lo_y.min(p[1]);
            hi_y = hi_y.max(p[1]);
        }
        if hull.is_empty() {
            lo_x -= margin;
            hi_x += margin;
            lo_y -= margin;
            hi_y += margin;
        }
        let bbox = [lo_x, hi_x, lo_y, hi_y];
        let mut pot = ChannelPotential {
            half_width: geom.half_width(),
            centroid: geom.centroid(),
            geom,
            offset_ev: 0.0,
            hull,
            bbox,
        };
        pot.offset_ev = pot.compute_offset();
        Ok(pot)
    }

    fn compute_offset(&self) -> f64 {
        let [lo_x, hi_x, lo_y, hi_y] = self.bbox;
        let mut min = f64::INFINITY;
        for i in 0..OFFSET_GRID {
            let x = lo_x + (hi_x - lo_x) * i as f64 / (OFFSET_GRID - 1) as f64;
            for j in 0..OFFSET_GRID {
                let y = lo_y + (hi_y - lo_y) * j as f64 / (OFFSET_GRID - 1) as f64;
                if !self.hull.is_empty() && !point_in_hull(&self.hull, x, y) {
                    continue;
                }
                let v = self.raw(x, y, &[]);
                if v < min {
                    min = v;
                }
            }
        }
        min
    }

    pub fn geometry(&self) -> &ChannelGeometry {
        &self.geom
    }

    pub fn offset_ev(&self) -> f64 {
        self.offset_ev
    }

    /// Simulation box bound: twice the channel half-width from the centroid.
    pub fn box_bound(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn in_box(&self, x: f64, y: f64) -> bool {
        (x - self.centroid[0]).abs() <= self.box_bound()
            && (y - self.centroid[1]).abs() <= self.box_bound()
    }

    pub fn centroid(&self) -> [f64; 2] {
        self.centroid
    }

    /// Unshifted sum of string potentials; `offsets` displaces each string.
    pub fn raw(&self, x: f64, y: f64, offsets: &[[f64; 2]]) -> f64 {
        let mut total = 0.0;
        for (i, p) in self.geom.string_positions_nm.iter().enumerate() {
            let (dx, dy) = match offsets.get(i) {
                Some(o) => (x - p[0] - o[0], y - p[1] - o[1]),
                None => (x - p[0], y - p[1]),
            };
            total += moliere_string_potential((dx * dx + dy * dy).sqrt(), &self.geom);
        }
        total
    }

    /// Shifted channel potential, eV. Errors outside the simulation box.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        if !self.in_box(x, y) {
            return Err(Error::domain(format!(
                "point ({x}, {y}) outside the simulation box"
            )));
        }
        Ok(self.raw(x, y, &[]) - self.offset_ev)
    }

    /// Shifted potential with displaced strings (no box check; used by the
    /// integrator which handles box exit itself).
    pub fn value_displaced(&self, x: f64, y: f64, offsets: &[[f64; 2]]) -> f64 {
        self.raw(x, y, offsets) - self.offset_ev
    }

    /// Gradient of the potential, eV/nm, with displaced strings.
    pub fn gradient(&self, x: f64, y: f64, offsets: &[[f64; 2]]) -> [f64; 2] {
        let mut gx = 0.0;
        let mut gy = 0.0;
        for (i, p) in self.geom.string_positions_nm.iter().enumerate() {
            let (dx, dy) = match offsets.get(i) {
                Some(o) => (x - p[0] - o[0], y - p[1] - o[1]),
                None => (x - p[0], y - p[1]),
            };
            let r = (dx * dx + dy * dy).sqrt();
            if r < R_MIN_NM {
                continue;
            }
            let slope = moliere_string_gradient(r, &self.geom);
            gx += slope * dx / r;
            gy += slope * dy / r;
        }
        [gx, gy]
    }

    /// Distance to the nearest (displaced) string.
    pub fn nearest_string_distance(&self, x: f64, y: f64, offsets: &[[f64; 2]]) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.geom.string_positions_nm.iter().enumerate() {
            let (dx, dy) = match offsets.get(i) {
                Some(o) => (x - p[0] - o[0], y - p[1] - o[1]),
                None => (x - p[0], y - p[1]),
            };
            best = best.min((dx * dx + dy * dy).sqrt());
        }
        best
    }

    /// Channeling barrier: the shifted potential probed at the configured
    /// distance from the nearest string, on the segment toward the channel
    /// axis. Transverse energies above this value count as dechanneled.
    pub fn barrier_ev(&self, offsets: &[[f64; 2]]) -> f64 {
        let probe = self.geom.barrier_distance();
        let mut lowest = f64::INFINITY;
        for (i, p) in self.geom.string_positions_nm.iter().enumerate() {
            let (sx, sy) = match offsets.get(i) {
                Some(o) => (p[0] + o[0], p[1] + o[1]),
                None => (p[0], p[1]),
            };
            let mut dir = [self.centroid[0] - sx, self.centroid[1] - sy];
            let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
            if len < 1e-12 {
                dir = [1.0, 0.0];
            } else {
                dir = [dir[0] / len, dir[1] / len];
            }
            let v = self.value_displaced(sx + probe * dir[0], sy + probe * dir[1], offsets);
            lowest = lowest.min(v);
        }
        lowest
    }
}

/// Convenience one-shot evaluation; builds the offset cache each call.
/// Prefer `ChannelPotential` when evaluating repeatedly.
pub fn channel_potential(x: f64, y: f64, geom: &ChannelGeometry) -> Result<f64> {
    ChannelPotential::new(geom.clone())?.value(x, y)
}

/// Andrew monotone chain; returns an empty hull for < 3 non-collinear points.
fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if points.len() < 3 {
        return Vec::new();
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    if pts.len() < 3 {
        return Vec::new();
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        Vec::new()
    } else {
        lower
    }
}

fn point_in_hull(hull: &[[f64; 2]], x: f64, y: f64) -> bool {
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let cross = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
        if cross < -1e-15 {
            return false;
        }
    }
    true
}

pub(super) fn point_in_channel(pot: &ChannelPotential, x: f64, y: f64) -> bool {
    if pot.hull.is_empty() {
        let [lo_x, hi_x, lo_y, hi_y] = pot.bbox;
        x >= lo_x && x <= hi_x && y >= lo_y && y <= hi_y
    } else {
        point_in_hull(&pot.hull, x, y)
    }
}

pub(super) fn channel_bbox(pot: &ChannelPotential) -> [f64; 4] {
    pot.bbox
}
