//! Physical constants, collected in one immutable table so derived
//! quantities never duplicate literals.

/// Physical constants in the unit system used throughout the crate:
/// energies in eV, lengths in nm, times in s, angles in rad.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    /// Coulomb constant times e^2, in eV nm.
    pub coulomb_e2_ev_nm: f64,
    /// Bohr radius, in nm.
    pub bohr_radius_nm: f64,
    /// Reduced Planck constant, in eV s.
    pub hbar_ev_s: f64,
    /// Proton rest energy, in eV.
    pub proton_rest_energy_ev: f64,
    /// Speed of light, in nm/s.
    pub speed_of_light_nm_s: f64,
    /// Bohr magneton, in eV/T.
    pub bohr_magneton_ev_t: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    coulomb_e2_ev_nm: 1.439964,
    bohr_radius_nm: 0.0529177,
    hbar_ev_s: 6.582e-16,
    proton_rest_energy_ev: 938.272e6,
    speed_of_light_nm_s: 2.99792458e17,
    bohr_magneton_ev_t: 5.788381806e-5,
};

impl PhysicalConstants {
    /// Speed of a proton with kinetic energy `energy_ev`, in nm/s,
    /// from relativistic kinematics.
    pub fn proton_speed_nm_s(&self, energy_ev: f64) -> f64 {
        let gamma = 1.0 + energy_ev / self.proton_rest_energy_ev;
        let beta = (1.0 - 1.0 / (gamma * gamma)).sqrt();
        beta * self.speed_of_light_nm_s
    }

    /// Thomas-Fermi screening radius for a target of atomic number `z2`, in nm.
    pub fn screening_radius_nm(&self, z2: u32) -> f64 {
        0.8853 * self.bohr_radius_nm * (z2 as f64).powf(-1.0 / 3.0)
    }
}
