//! Hybrid electron-nuclear spin dynamics: the 8-dimensional
//! electron-1H-29Si Hamiltonian with secular and anisotropic hyperfine
//! couplings, unitary evolution, ideal pulses and pulse sequences.

use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::qmat::{self, Axis, CMat};
use crate::state::DensityMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const HERMITICITY_TOL: f64 = 1e-12;

/// The three spin-1/2 factors, in tensor order electron (x) 1H (x) 29Si.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinTarget {
    Electron,
    Proton,
    Silicon,
}

impl SpinTarget {
    pub fn index(&self) -> usize {
        match self {
            SpinTarget::Electron => 0,
            SpinTarget::Proton => 1,
            SpinTarget::Silicon => 2,
        }
    }
}

/// Parameters of the electron-1H-29Si spin system. All frequencies and
/// couplings are angular (rad/s); conversions from field strength and MHz
/// happen here and nowhere else.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinSystem {
    /// Static field along z, tesla.
    pub b0_tesla: f64,
    /// Electron g-factor.
    pub g_electron: f64,
    /// 1H gyromagnetic ratio, rad s^-1 T^-1.
    pub gamma_h: f64,
    /// 29Si gyromagnetic ratio, rad s^-1 T^-1.
    pub gamma_si: f64,
    /// Secular hyperfine coupling to 1H, rad/s.
    pub a_h: f64,
    /// Anisotropic hyperfine coupling to 1H, rad/s.
    pub b_h: f64,
    /// Secular hyperfine coupling to 29Si, rad/s.
    pub a_si: f64,
    /// Anisotropic hyperfine coupling to 29Si, rad/s. The magnitude is a
    /// free model parameter; the default is 0.3 |a_si|.
    pub b_si: f64,
}

/// Hyperfine constant of the 29Si coupling, MHz (signed).
pub const A_SI_MHZ: f64 = -160.1;

impl Default for SpinSystem {
    fn default() -> Self {
        let a_si = 2.0 * PI * A_SI_MHZ * 1e6;
        SpinSystem {
            b0_tesla: 2.0,
            g_electron: 2.0023,
            gamma_h: 2.6752e8,
            gamma_si: -5.31e7,
            a_h: 0.0,
            b_h: 0.0,
            a_si,
            b_si: 0.3 * a_si.abs(),
        }
    }
}

impl SpinSystem {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.b0_tesla,
            self.g_electron,
            self.gamma_h,
            self.gamma_si,
            self.a_h,
            self.b_h,
            self.a_si,
            self.b_si,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("spin system parameters must be finite"));
        }
        Ok(())
    }

    /// Electron Zeeman angular frequency g mu_B B / hbar, rad/s.
    pub fn omega_e(&self) -> f64 {
        self.g_electron * CONSTANTS.bohr_magneton_ev_t * self.b0_tesla / CONSTANTS.hbar_ev_s
    }

    /// 1H Zeeman angular frequency, rad/s.
    pub fn omega_h(&self) -> f64 {
        self.gamma_h * self.b0_tesla
    }

    /// 29Si Zeeman angular frequency, rad/s.
    pub fn omega_si(&self) -> f64 {
        self.gamma_si * self.b0_tesla
    }
}

/// Embed a single-qubit operator on factor `target` of an n-qubit space.
fn embed(op: &CMat, target: usize, n_qubits: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for q in 0..n_qubits {
        let factor = if q == target {
            op.clone()
        } else {
            qmat::identity(2)
        };
        out = qmat::kron(&out, &factor);
    }
    out
}

/// The 8x8 spin Hamiltonian in rad/s, basis |electron> (x) |1H> (x) |29Si>
/// with spin-up first in each factor:
/// H = w_e S_z + w_H I_z^H + w_Si I_z^Si
///   + S_z (x) [A_H I_z^H + B_H I_x^H + A_Si I_z^Si + B_Si I_x^Si].
pub fn build_hamiltonian(sys: &SpinSystem) -> Result<CMat> {
    sys.validate()?;
    let sz = qmat::spin_half(Axis::Z);
    let sx = qmat::spin_half(Axis::X);
    let c = |v: f64| Complex64::new(v, 0.0);

    let mut h = embed(&sz, 0, 3) * c(sys.omega_e());
    h += embed(&sz, 1, 3) * c(sys.omega_h());
    h += embed(&sz, 2, 3) * c(sys.omega_si());

    let sz_e = embed(&sz, 0, 3);
    h += &sz_e * embed(&sz, 1, 3) * c(sys.a_h);
    h += &sz_e * embed(&sx, 1, 3) * c(sys.b_h);
    h += &sz_e * embed(&sz, 2, 3) * c(sys.a_si);
    h += &sz_e * embed(&sx, 2, 3) * c(sys.b_si);

    debug_assert!(qmat::hermiticity_defect(&h) < HERMITICITY_TOL);
    Ok(h)
}

/// Unitary evolution rho -> U rho U^dagger with U = exp(-i H t), computed
/// by eigendecomposition of the Hermitian generator.
pub fn evolve(rho: &DensityMatrix, hamiltonian: &CMat, t_s: f64) -> Result<DensityMatrix> {
    if hamiltonian.nrows() != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: hamiltonian.nrows(),
        });
    }
    if t_s < 0.0 {
        return Err(Error::domain("evolution time must be >= 0"));
    }
    let (values, vectors) = qmat::hermitian_eigen(hamiltonian)?;
    let dim = rho.dim();
    let mut phases = CMat::zeros(dim, dim);
    for (i, &w) in values.iter().enumerate() {
        phases[(i, i)] = Complex64::from_polar(1.0, -w * t_s);
    }
    let unitary = &vectors * phases * vectors.adjoint();
    let evolved = &unitary * rho.matrix() * unitary.adjoint();
    DensityMatrix::new(evolved)
}

/// Ideal instantaneous rotation exp(-i angle S_axis) on one spin factor.
pub fn apply_pulse(
    rho: &DensityMatrix,
    target: SpinTarget,
    axis: Axis,
    angle_rad: f64,
) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: dim,
        });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    if target.index() >= n_qubits {
        return Err(Error::domain(format!(
            "target {:?} out of range for a {n_qubits}-spin state",
            target
        )));
    }
    if !angle_rad.is_finite() {
        return Err(Error::domain("rotation angle must be finite"));
    }
    // exp(-i theta sigma/2) = cos(theta/2) I - i sin(theta/2) sigma
    let half = angle_rad / 2.0;
    let rot = qmat::identity(2) * Complex64::new(half.cos(), 0.0)
        + qmat::pauli(axis) * Complex64::new(0.0, -half.sin());
    let full = embed(&rot, target.index(), n_qubits);
    DensityMatrix::new(&full * rho.matrix() * full.adjoint())
}

/// One step of a pulse sequence.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    FreeEvolution {
        duration_s: f64,
    },
    Rotation {
        target: SpinTarget,
        axis: Axis,
        angle_rad: f64,
    },
}

/// A pulse sequence: steps applied in order, repeated `repetitions` times.
/// With `phase_inversion`, rotation angles are negated on every second
/// repetition to cancel accumulated phase noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequence {
    pub steps: Vec<Step>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub phase_inversion: bool,
}

fn one() -> usize {
    1
}

impl PulseSequence {
    pub fn validate(&self) -> Result<()> {
        for step in &self.steps {
            match step {
                Step::FreeEvolution { duration_s } => {
                    if *duration_s < 0.0 || !duration_s.is_finite() {
                        return Err(Error::config("durations must be >= 0 and finite"));
                    }
                }
                Step::Rotation { angle_rad, .. } => {
                    if !angle_rad.is_finite() {
                        return Err(Error::config("rotation angles must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    /// (pi/2)_x preparation followed by n spin-echo blocks tau - (pi)_y - tau
    /// on the given target.
    pub fn meiboom_gill(target: SpinTarget, tau_s: f64, echoes: usize) -> Self {
        let mut steps = vec![Step::Rotation {
            target,
            axis: Axis::X,
            angle_rad: PI / 2.0,
        }];
        for _ in 0..echoes {
            steps.push(Step::FreeEvolution { duration_s: tau_s });
            steps.push(Step::Rotation {
                target,
                axis: Axis::Y,
                angle_rad: PI,
            });
            steps.push(Step::FreeEvolution { duration_s: tau_s });
        }
        PulseSequence {
            steps,
            repetitions: 1,
            phase_inversion: false,
        }
    }
}

/// Spin-z expectation values recorded after each sequence step.
#[derive(Debug, Clone, Serialize)]
pub struct ObservableSample {
    /// Cumulative free-evolution time when the sample was taken, s.
    pub t_s: f64,
    /// <S_z> for each spin factor, leftmost first.
    pub sz: Vec<f64>,
}

fn sz_expectations(rho: &DensityMatrix, n_qubits: usize) -> Vec<f64> {
    (0..n_qubits)
        .map(|q| rho.expectation(&embed(&qmat::spin_half(Axis::Z), q, n_qubits)))
        .collect()
}

/// Run a pulse sequence, emitting per-step observables.
pub fn run_sequence(
    rho: &DensityMatrix,
    sequence: &PulseSequence,
    hamiltonian: &CMat,
) -> Result<(DensityMatrix, Vec<ObservableSample>)> {
    sequence.validate()?;
    let dim = rho.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: dim,
        });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let mut state = rho.clone();
    let mut t = 0.0;
    let mut samples = vec![ObservableSample {
        t_s: 0.0,
        sz: sz_expectations(&state, n_qubits),
    }];
    for rep in 0..sequence.repetitions {
        let sign = if sequence.phase_inversion && rep % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        for step in &sequence.steps {
            state = match step {
                Step::FreeEvolution { duration_s } => {
                    t += duration_s;
                    evolve(&state, hamiltonian, *duration_s)?
                }
                Step::Rotation {
                    target,
                    axis,
                    angle_rad,
                } => apply_pulse(&state, *target, *axis, sign * angle_rad)?,
            };
            samples.push(ObservableSample {
                t_s: t,
                sz: sz_expectations(&state, n_qubits),
            });
        }
    }
    Ok((state, samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeKind {
    Symmetric,
    Antisymmetric,
}

/// Two-qubit exchange Hamiltonian (rad/s).
/// Symmetric: J (Sx Sx + Sy Sy) + K (Sx Sy - Sy Sx), coupling |01> <-> |10>.
/// Antisymmetric: j (Sx Sx - Sy Sy) + k (Sx Sy + Sy Sx), coupling |00> <-> |11>.
pub fn exchange_hamiltonian(kind: ExchangeKind, j: f64, k: f64) -> Result<CMat> {
    if !j.is_finite() || !k.is_finite() {
        return Err(Error::config("exchange couplings must be finite"));
    }
    let sx = qmat::spin_half(Axis::X);
    let sy = qmat::spin_half(Axis::Y);
    let xx = qmat::kron(&sx, &sx);
    let yy = qmat::kron(&sy, &sy);
    let xy = qmat::kron(&sx, &sy);
    let yx = qmat::kron(&sy, &sx);
    let c = |v: f64| Complex64::new(v, 0.0);
    let h = match kind {
        ExchangeKind::Symmetric => (&xx + &yy) * c(j) + (&xy - &yx) * c(k),
        ExchangeKind::Antisymmetric => (&xx - &yy) * c(j) + (&xy + &yx) * c(k),
    };
    Ok(h)
}

/// Partial trace keeping the listed spin factors.
pub fn reduced_density_matrix(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: dim,
        });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let reduced = qmat::partial_trace(rho.matrix(), n_qubits, keep)?;
    DensityMatrix::new(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{frobenius_distance, C_ONE, C_ZERO};
    use crate::state::PureState;

    fn basis_state(labels: [usize; 3]) -> DensityMatrix {
        let idx = labels[0] * 4 + labels[1] * 2 + labels[2];
        let mut amps = [C_ZERO; 8];
        amps[idx] = C_ONE;
        PureState::from_slice(&amps).unwrap().projector()
    }

    #[test]
    fn zero_parameters_give_zero_hamiltonian() {
        let sys = SpinSystem {
            b0_tesla: 0.0,
            a_h: 0.0,
            b_h: 0.0,
            a_si: 0.0,
            b_si: 0.0,
            ..SpinSystem::default()
        };
        let h = build_hamiltonian(&sys).unwrap();
        assert!(h.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn secular_hamiltonian_is_diagonal_with_known_entries() {
        let sys = SpinSystem {
            b_h: 0.0,
            b_si: 0.0,
            a_h: 3.0e6,
            ..SpinSystem::default()
        };
        let h = build_hamiltonian(&sys).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                if r != c {
                    assert!(h[(r, c)].norm() < 1e-9, "off-diagonal at ({r},{c})");
                }
            }
        }
        // |up up up> entry: (w_e + w_H + w_Si)/2 + (A_H + A_Si)/4
        let want =
            (sys.omega_e() + sys.omega_h() + sys.omega_si()) / 2.0 + (sys.a_h + sys.a_si) / 4.0;
        assert!(
            (h[(0, 0)].re - want).abs() / want.abs() < 1e-12,
            "got {}, want {want}",
            h[(0, 0)].re
        );
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let h = build_hamiltonian(&SpinSystem::default()).unwrap();
        assert!(qmat::hermiticity_defect(&h) < 1e-12);
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let h = build_hamiltonian(&SpinSystem::default()).unwrap();
        let rho = basis_state([0, 1, 1]);
        let out = evolve(&rho, &h, 0.0).unwrap();
        assert!(frobenius_distance(rho.matrix(), out.matrix()) < 1e-12);
    }

    #[test]
    fn rabi_oscillation_matches_analytic_formula() {
        // H = (Omega/2) sigma_x, starting from |up>: P(down, t) = sin^2(Omega t / 2).
        let omega = 2.0 * PI * 5.0e6;
        let h = qmat::pauli(Axis::X) * Complex64::new(omega / 2.0, 0.0);
        let rho = PureState::from_slice(&[C_ONE, C_ZERO]).unwrap().projector();
        for k in 1..=20 {
            let t = k as f64 * 7.3e-9;
            let out = evolve(&rho, &h, t).unwrap();
            let p_down = out.matrix()[(1, 1)].re;
            let want = (omega * t / 2.0).sin().powi(2);
            assert!(
                (p_down - want).abs() < 1e-8,
                "t = {t}: got {p_down}, want {want}"
            );
        }
    }

    #[test]
    fn purity_preserved_under_evolution() {
        let h = build_hamiltonian(&SpinSystem::default()).unwrap();
        let rho = basis_state([0, 0, 1]);
        let out = evolve(&rho, &h, 3.7e-8).unwrap();
        assert!((out.purity() - rho.purity()).abs() < 1e-10);
    }

    #[test]
    fn energy_conserved_under_free_evolution() {
        let sys = SpinSystem::default();
        let h = build_hamiltonian(&sys).unwrap();
        let psi = PureState::normalized(crate::qmat::CVec::from_fn(8, |i, _| {
            Complex64::new(1.0 + i as f64, (i as f64) * 0.3 - 1.0)
        }))
        .unwrap();
        let rho = psi.projector();
        let e0 = rho.expectation(&h);
        let out = evolve(&rho, &h, 5.0e-8).unwrap();
        let e1 = out.expectation(&h);
        assert!((e1 - e0).abs() / e0.abs() < 1e-9, "{e0} vs {e1}");
    }

    #[test]
    fn pi_pulse_flips_electron_only() {
        let rho = basis_state([0, 1, 1]);
        let out = apply_pulse(&rho, SpinTarget::Electron, Axis::X, PI).unwrap();
        let want = basis_state([1, 1, 1]);
        assert!(frobenius_distance(out.matrix(), want.matrix()) < 1e-12);
    }

    #[test]
    fn two_half_pulses_equal_one_pi_pulse() {
        let rho = basis_state([0, 0, 0]);
        let two = apply_pulse(
            &apply_pulse(&rho, SpinTarget::Proton, Axis::X, PI / 2.0).unwrap(),
            SpinTarget::Proton,
            Axis::X,
            PI / 2.0,
        )
        .unwrap();
        let one = apply_pulse(&rho, SpinTarget::Proton, Axis::X, PI).unwrap();
        assert!(frobenius_distance(two.matrix(), one.matrix()) < 1e-10);
    }

    #[test]
    fn detuned_flip_probability_peaks_on_resonance() {
        // H = (delta/2) sigma_z + (Omega/2) sigma_x; flip probability after a
        // pi-time pulse is maximal at delta = 0 (checked against the
        // analytic detuned Rabi formula).
        let omega = 2.0 * PI * 1.0e6;
        let t = PI / omega;
        let rho = PureState::from_slice(&[C_ONE, C_ZERO]).unwrap().projector();
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for k in -10..=10 {
            let delta = k as f64 * 0.4 * omega;
            let h = qmat::pauli(Axis::Z) * Complex64::new(delta / 2.0, 0.0)
                + qmat::pauli(Axis::X) * Complex64::new(omega / 2.0, 0.0);
            let out = evolve(&rho, &h, t).unwrap();
            let p = out.matrix()[(1, 1)].re;
            let rabi = (omega * omega + delta * delta).sqrt();
            let analytic = omega * omega / (rabi * rabi) * (rabi * t / 2.0).sin().powi(2);
            assert!((p - analytic).abs() < 1e-9, "delta {delta}");
            if p > best.0 {
                best = (p, delta);
            }
        }
        assert_eq!(best.1, 0.0, "flip probability must peak at zero detuning");
    }

    #[test]
    fn empty_sequence_is_identity() {
        let h = build_hamiltonian(&SpinSystem::default()).unwrap();
        let rho = basis_state([1, 0, 1]);
        let seq = PulseSequence {
            steps: vec![],
            repetitions: 3,
            phase_inversion: false,
        };
        let (out, samples) = run_sequence(&rho, &seq, &h).unwrap();
        assert!(frobenius_distance(out.matrix(), rho.matrix()) < 1e-14);
        assert_eq!(samples.len(), 1);
    }

    #[test]
    fn echo_sequence_refocuses_dephasing() {
        // Two-level system under H = delta S_z. After the (pi/2)_x
        // preparation, each tau - (pi)_y - tau block acts as a bare (pi)_y,
        // so an even number of echoes returns the prepared state exactly.
        let delta = 2.0 * PI * 3.0e6;
        let h = qmat::spin_half(Axis::Z) * Complex64::new(delta, 0.0);
        let rho = PureState::from_slice(&[C_ONE, C_ZERO]).unwrap().projector();
        let prepared = apply_pulse(&rho, SpinTarget::Electron, Axis::X, PI / 2.0).unwrap();
        let seq = PulseSequence::meiboom_gill(SpinTarget::Electron, 1.7e-7, 2);
        let (out, _) = run_sequence(&rho, &seq, &h).unwrap();
        assert!(frobenius_distance(out.matrix(), prepared.matrix()) < 1e-10);
    }

    #[test]
    fn free_evolution_composes() {
        let h = build_hamiltonian(&SpinSystem::default()).unwrap();
        let rho = basis_state([0, 1, 0]);
        let tau = 2.3e-9;
        let n = 5;
        let seq = PulseSequence {
            steps: vec![Step::FreeEvolution { duration_s: tau }],
            repetitions: n,
            phase_inversion: false,
        };
        let (stepped, _) = run_sequence(&rho, &seq, &h).unwrap();
        let direct = evolve(&rho, &h, n as f64 * tau).unwrap();
        assert!(frobenius_distance(stepped.matrix(), direct.matrix()) < 1e-9);
    }

    #[test]
    fn phase_inversion_negates_odd_repetitions() {
        let h = qmat::identity(2) * C_ZERO;
        let rho = PureState::from_slice(&[C_ONE, C_ZERO]).unwrap().projector();
        let seq = PulseSequence {
            steps: vec![Step::Rotation {
                target: SpinTarget::Electron,
                axis: Axis::X,
                angle_rad: PI / 3.0,
            }],
            repetitions: 2,
            phase_inversion: true,
        };
        // +pi/3 then -pi/3 returns the initial state.
        let (out, _) = run_sequence(&rho, &seq, &h).unwrap();
        assert!(frobenius_distance(out.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn symmetric_exchange_couples_antiparallel_pair_only() {
        let h = exchange_hamiltonian(ExchangeKind::Symmetric, 1.0e6, 0.3e6).unwrap();
        // Rows/cols 0 = |00>, 3 = |11> are annihilated; support is {01, 10}.
        for idx in [0usize, 3] {
            for c in 0..4 {
                assert!(h[(idx, c)].norm() < 1e-12);
                assert!(h[(c, idx)].norm() < 1e-12);
            }
        }
        assert!(h[(1, 2)].norm() > 0.0);
    }

    #[test]
    fn antisymmetric_exchange_couples_parallel_pair_only() {
        let h = exchange_hamiltonian(ExchangeKind::Antisymmetric, 1.0e6, 0.3e6).unwrap();
        for idx in [1usize, 2] {
            for c in 0..4 {
                assert!(h[(idx, c)].norm() < 1e-12);
                assert!(h[(c, idx)].norm() < 1e-12);
            }
        }
        assert!(h[(0, 3)].norm() > 0.0);
    }

    #[test]
    fn zero_couplings_give_zero_exchange() {
        for kind in [ExchangeKind::Symmetric, ExchangeKind::Antisymmetric] {
            let h = exchange_hamiltonian(kind, 0.0, 0.0).unwrap();
            assert!(h.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn reduced_matrix_of_product_state() {
        let rho = basis_state([0, 1, 0]);
        let reduced = reduced_density_matrix(&rho, &[1]).unwrap();
        assert_eq!(reduced.dim(), 2);
        assert!((reduced.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn secular_nuclear_spins_are_conserved() {
        // With B_n = 0 the nuclear I_z commute with H: their expectations
        // are constant under free evolution.
        let sys = SpinSystem {
            b_h: 0.0,
            b_si: 0.0,
            a_h: 1.0e6,
            ..SpinSystem::default()
        };
        let h = build_hamiltonian(&sys).unwrap();
        let iz_h = embed(&qmat::spin_half(Axis::Z), 1, 3);
        let iz_si = embed(&qmat::spin_half(Axis::Z), 2, 3);
        // Commutators vanish.
        assert!((&h * &iz_h - &iz_h * &h).norm() < 1e-6);
        assert!((&h * &iz_si - &iz_si * &h).norm() < 1e-6);
        let psi = PureState::normalized(crate::qmat::CVec::from_fn(8, |i, _| {
            Complex64::new((i * i) as f64 + 0.2, 1.0 - i as f64 * 0.1)
        }))
        .unwrap();
        let rho = psi.projector();
        let before = (rho.expectation(&iz_h), rho.expectation(&iz_si));
        let after_rho = evolve(&rho, &h, 8.3e-8).unwrap();
        let after = (after_rho.expectation(&iz_h), after_rho.expectation(&iz_si));
        assert!((before.0 - after.0).abs() < 1e-9);
        assert!((before.1 - after.1).abs() < 1e-9);
    }

    #[test]
    fn singlet_triplet_states_are_exchange_eigenvectors() {
        // |T0> and |S> diagonalize the J term of the symmetric exchange,
        // and free evolution keeps population inside span{|01>, |10>}.
        let j = 2.0 * PI * 1.0e6;
        let h = exchange_hamiltonian(ExchangeKind::Symmetric, j, 0.0).unwrap();
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let t0 = crate::qmat::CVec::from_column_slice(&[C_ZERO, inv_sqrt2, inv_sqrt2, C_ZERO]);
        let s = crate::qmat::CVec::from_column_slice(&[C_ZERO, inv_sqrt2, -inv_sqrt2, C_ZERO]);
        let ht0 = &h * &t0;
        let hs = &h * &s;
        // Eigenvector check: H|v> parallel to |v>.
        let lam_t0 = t0.dotc(&ht0);
        let lam_s = s.dotc(&hs);
        assert!((&ht0 - &t0 * lam_t0).norm() < 1e-9);
        assert!((&hs - &s * lam_s).norm() < 1e-9);

        let psi = PureState::from_slice(&[C_ZERO, C_ONE, C_ZERO, C_ZERO]).unwrap();
        let rho = psi.projector();
        let out = evolve(&rho, &h, 0.37e-6).unwrap();
        let leakage = out.matrix()[(0, 0)].re + out.matrix()[(3, 3)].re;
        assert!(leakage < 1e-9, "leakage {leakage}");
    }
}
