//! Named entangled states (Bell, Werner, tripartite, atom-cavity, cat)
//! and entanglement measures: Wootters concurrence, entanglement of
//! formation and the coherent-amplitude concurrence.

use crate::error::{Error, Result};
use crate::qmat::{self, Axis, CMat, CVec, C_ZERO};
use crate::state::{DensityMatrix, PureState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Bell-state labels in the singlet-triplet convention used throughout:
/// Phi couples the antiparallel pair |01>, |10>; Psi couples |00>, |11>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Normalized Bell vector in the two-qubit product basis.
pub fn bell_state(which: BellState) -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amps = match which {
        BellState::PhiPlus => [C_ZERO, h, h, C_ZERO],
        BellState::PhiMinus => [C_ZERO, h, -h, C_ZERO],
        BellState::PsiPlus => [h, C_ZERO, C_ZERO, h],
        BellState::PsiMinus => [h, C_ZERO, C_ZERO, -h],
    };
    PureState::from_slice(&amps).expect("bell vectors are normalized")
}

/// Parameters of the Werner family: mixing probability and the relative
/// phase of the entangled component.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WernerParams {
    pub p: f64,
    #[serde(default)]
    pub phi: f64,
}

impl WernerParams {
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("werner p must lie in [0,1], got {p}")));
        }
        if !phi.is_finite() {
            return Err(Error::domain("werner phase must be finite"));
        }
        Ok(WernerParams { p, phi })
    }
}

/// The entangled component (|HH> + e^{i phi} |VV>)/sqrt(2) of the Werner
/// state, with H mapped to |0>.
pub fn werner_projector_state(phi: f64) -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::from_slice(&[h, C_ZERO, C_ZERO, h * Complex64::from_polar(1.0, phi)])
        .expect("normalized")
}

/// Werner state (1-p)/4 I + p |Phi><Phi|.
pub fn werner_state(params: &WernerParams) -> Result<DensityMatrix> {
    WernerParams::new(params.p, params.phi)?;
    let psi = werner_projector_state(params.phi);
    let projector = psi.projector();
    let m = qmat::identity(4) * Complex64::new((1.0 - params.p) / 4.0, 0.0)
        + projector.matrix() * Complex64::new(params.p, 0.0);
    DensityMatrix::new(m)
}

/// Spin-flipped matrix (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y).
fn spin_flip(rho: &CMat) -> CMat {
    let yy = qmat::kron(&qmat::pauli(Axis::Y), &qmat::pauli(Axis::Y));
    let conj = rho.map(|z| z.conj());
    &yy * conj * &yy
}

/// Wootters concurrence of a two-qubit density matrix:
/// C = max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of
/// the eigenvalues of rho rho~. Since rho rho~ = X X^dagger for
/// X = sqrt(rho) (sy (x) sy) conj(sqrt(rho)), the l_i are the singular
/// values of X, which stay machine-precise even when some vanish.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho.dim(),
        });
    }
    let root = qmat::sqrt_psd(rho.matrix())?;
    let yy = qmat::kron(&qmat::pauli(Axis::Y), &qmat::pauli(Axis::Y));
    let x = &root * yy * root.map(|z| z.conj());
    let lambdas = qmat::singular_values(&x)?;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Binary entropy, base 2.
fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Entanglement of formation as a function of concurrence:
/// E = h((1 + sqrt(1 - C^2))/2).
pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    // Tolerate tiny numerical overshoot from the concurrence computation.
    if !(-1e-12..=1.0 + 1e-12).contains(&concurrence) {
        return Err(Error::domain(format!(
            "concurrence must lie in [0,1], got {concurrence}"
        )));
    }
    let c = concurrence.clamp(0.0, 1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Even,
    Odd,
}

/// Parameters of an even/odd coherent superposition in truncated Fock space.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatStateParams {
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub parity: CatParity,
    pub truncation: usize,
}

impl CatStateParams {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }

    /// Smallest cutoff satisfying the truncation rule |a|^2 + 6|a| + 10.
    pub fn minimum_truncation(alpha: Complex64) -> usize {
        let a = alpha.norm();
        (a * a + 6.0 * a + 10.0).ceil() as usize
    }

    /// Recommended cutoff: the rule minimum plus headroom that keeps the
    /// truncated norm within 1e-12 across the supported amplitude range
    /// (the bare minimum leaves a ~2e-12 tail at |a| = 3).
    pub fn required_truncation(alpha: Complex64) -> usize {
        Self::minimum_truncation(alpha) + 4
    }

    pub fn validate(&self) -> Result<()> {
        let alpha = self.alpha();
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::domain("cat amplitude must be finite"));
        }
        if self.parity == CatParity::Odd && alpha.norm() == 0.0 {
            return Err(Error::domain(
                "odd cat state with zero amplitude has zero norm",
            ));
        }
        let needed = Self::minimum_truncation(alpha);
        if self.truncation < needed {
            return Err(Error::domain(format!(
                "truncation {} too small, need at least {needed}",
                self.truncation
            )));
        }
        Ok(())
    }
}

/// Even/odd coherent superposition (|alpha> +- |-alpha>)/N_pm with the
/// analytic normalization N_pm = sqrt(2 (1 +- e^{-2|alpha|^2})).
pub fn cat_state(params: &CatStateParams) -> Result<PureState> {
    params.validate()?;
    let alpha = params.alpha();
    let a2 = alpha.norm_sqr();
    let sign = match params.parity {
        CatParity::Even => 1.0,
        CatParity::Odd => -1.0,
    };
    let norm = (2.0 * (1.0 + sign * (-2.0 * a2).exp())).sqrt();
    let mut amps = CVec::zeros(params.truncation);
    // Coherent amplitude: e^{-|a|^2/2} a^n / sqrt(n!), built recursively.
    let mut coherent = Complex64::new((-a2 / 2.0).exp(), 0.0);
    for n in 0..params.truncation {
        if n > 0 {
            coherent *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        }
        let parity_factor = if n % 2 == 0 { 1.0 + sign } else { 1.0 - sign };
        amps[n] = coherent * Complex64::new(parity_factor / norm, 0.0);
    }
    PureState::new(amps)
}

/// Concurrence of the two-mode coherent-state entangled pair:
/// C = sqrt([1 - e^{-4 |psi1|^2}] [1 - e^{-4 |psi2|^2}]).
pub fn coherent_concurrence(psi1_amp: f64, psi2_amp: f64) -> Result<f64> {
    if psi1_amp < 0.0 || psi2_amp < 0.0 {
        return Err(Error::domain("coherent amplitudes must be >= 0"));
    }
    let f = |a: f64| 1.0 - (-4.0 * a * a).exp();
    Ok((f(psi1_amp) * f(psi2_amp)).sqrt())
}

/// Three-qubit entangled state
/// (|0>(|0>+|1>)|0> + |1>(|0>-|1>)|1>)/2 in the computational basis.
pub fn tripartite_state() -> PureState {
    let h = Complex64::new(0.5, 0.0);
    let mut amps = [C_ZERO; 8];
    amps[0b000] = h;
    amps[0b010] = h;
    amps[0b101] = h;
    amps[0b111] = -h;
    PureState::from_slice(&amps).expect("normalized")
}

/// Single-excitation atom-cavity state (|e,0> + |g,1>)/sqrt(2), encoded as
/// (|00> + |11>)/sqrt(2).
pub fn cavity_state() -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::from_slice(&[h, C_ZERO, C_ZERO, h]).expect("normalized")
}

/// Closed-form Werner concurrence max(0, (3p-1)/2), used as an oracle
/// against the generic eigenvalue path.
pub fn werner_concurrence_closed_form(p: f64) -> f64 {
    ((3.0 * p - 1.0) / 2.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::frobenius_distance;

    #[test]
    fn bell_states_are_orthonormal() {
        let states = [
            bell_state(BellState::PhiPlus),
            bell_state(BellState::PhiMinus),
            bell_state(BellState::PsiPlus),
            bell_state(BellState::PsiMinus),
        ];
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let overlap = a.inner(b).norm();
                if i == j {
                    assert!((overlap - 1.0).abs() < 1e-12);
                } else {
                    assert!(overlap < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phi_plus_couples_antiparallel_pair() {
        let phi = bell_state(BellState::PhiPlus);
        let amps = phi.amplitudes();
        assert!((amps[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[2].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(amps[0], C_ZERO);
        assert_eq!(amps[3], C_ZERO);
    }

    #[test]
    fn bell_mixture_is_maximally_mixed() {
        let mut sum = CMat::zeros(4, 4);
        for which in [
            BellState::PhiPlus,
            BellState::PhiMinus,
            BellState::PsiPlus,
            BellState::PsiMinus,
        ] {
            sum += bell_state(which).projector().matrix();
        }
        sum *= Complex64::new(0.25, 0.0);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(frobenius_distance(&sum, mixed.matrix()) < 1e-12);
    }

    #[test]
    fn werner_endpoints() {
        let id = werner_state(&WernerParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!(
            frobenius_distance(id.matrix(), DensityMatrix::maximally_mixed(4).matrix()) < 1e-12
        );
        let pure = werner_state(&WernerParams::new(1.0, 0.0).unwrap()).unwrap();
        let proj = werner_projector_state(0.0).projector();
        assert!(frobenius_distance(pure.matrix(), proj.matrix()) < 1e-12);
    }

    #[test]
    fn werner_eigenvalues_at_p065() {
        let rho = werner_state(&WernerParams::new(0.65, 0.0).unwrap()).unwrap();
        let eigs = rho.eigenvalues().unwrap();
        // (1-p)/4 three times, (1+3p)/4 once.
        assert!((eigs[0] - 0.0875).abs() < 1e-12);
        assert!((eigs[1] - 0.0875).abs() < 1e-12);
        assert!((eigs[2] - 0.0875).abs() < 1e-12);
        assert!((eigs[3] - 0.7375).abs() < 1e-12);
    }

    #[test]
    fn werner_rejects_bad_p() {
        assert!(WernerParams::new(-0.1, 0.0).is_err());
        assert!(WernerParams::new(1.1, 0.0).is_err());
    }

    #[test]
    fn concurrence_of_werner_family() {
        for &(p, want) in &[(1.0, 1.0), (1.0 / 3.0, 0.0), (0.65, 0.475)] {
            let rho = werner_state(&WernerParams::new(p, 0.0).unwrap()).unwrap();
            let c = concurrence(&rho).unwrap();
            assert!((c - want).abs() < 1e-10, "p = {p}: C = {c}, want {want}");
        }
    }

    #[test]
    fn werner_concurrence_matches_closed_form_with_phase() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let rho = werner_state(&WernerParams::new(p, 0.73).unwrap()).unwrap();
            let c = concurrence(&rho).unwrap();
            assert!(
                (c - werner_concurrence_closed_form(p)).abs() < 1e-10,
                "p = {p}"
            );
        }
    }

    #[test]
    fn eof_endpoints_and_monotonicity() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert!((entanglement_of_formation(1.0).unwrap() - 1.0).abs() < 1e-12);
        let at_0475 = entanglement_of_formation(0.475).unwrap();
        assert!(
            (at_0475 - 0.3274731121058563).abs() < 1e-12,
            "EoF(0.475) = {at_0475}"
        );
        let mut prev = 0.0;
        for k in 1..1000 {
            let c = k as f64 / 999.0;
            let e = entanglement_of_formation(c).unwrap();
            assert!(e >= prev, "not monotone at C = {c}");
            prev = e;
        }
        assert!(entanglement_of_formation(1.5).is_err());
        assert!(entanglement_of_formation(-0.5).is_err());
    }

    #[test]
    fn cat_state_basics() {
        // alpha = 0, even parity: the vacuum state.
        let vac = cat_state(&CatStateParams {
            alpha_re: 0.0,
            alpha_im: 0.0,
            parity: CatParity::Even,
            truncation: 12,
        })
        .unwrap();
        assert!((vac.amplitudes()[0].re - 1.0).abs() < 1e-12);

        // Odd cat with alpha = 0 is degenerate.
        assert!(cat_state(&CatStateParams {
            alpha_re: 0.0,
            alpha_im: 0.0,
            parity: CatParity::Odd,
            truncation: 12,
        })
        .is_err());
    }

    #[test]
    fn cat_parities_are_orthogonal() {
        let trunc = CatStateParams::required_truncation(Complex64::new(1.2, 0.0));
        let even = cat_state(&CatStateParams {
            alpha_re: 1.2,
            alpha_im: 0.0,
            parity: CatParity::Even,
            truncation: trunc,
        })
        .unwrap();
        let odd = cat_state(&CatStateParams {
            alpha_re: 1.2,
            alpha_im: 0.0,
            parity: CatParity::Odd,
            truncation: trunc,
        })
        .unwrap();
        assert!(even.inner(&odd).norm() < 1e-12);
        // Parity structure: even cat has no odd Fock support and vice versa.
        for (n, amp) in even.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(amp.norm(), 0.0);
            }
        }
        for (n, amp) in odd.amplitudes().iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(amp.norm(), 0.0);
            }
        }
    }

    #[test]
    fn cat_norm_matches_analytic_normalization() {
        for &a in &[0.5, 1.0, 2.0, 3.0] {
            for parity in [CatParity::Even, CatParity::Odd] {
                let alpha = Complex64::new(a, 0.0);
                let params = CatStateParams {
                    alpha_re: a,
                    alpha_im: 0.0,
                    parity,
                    truncation: CatStateParams::required_truncation(alpha),
                };
                let state = cat_state(&params).unwrap();
                let norm: f64 = state.amplitudes().norm();
                assert!((norm - 1.0).abs() < 1e-12, "alpha {a}: norm {norm}");
            }
        }
    }

    #[test]
    fn cat_truncation_rule_is_enforced() {
        assert!(cat_state(&CatStateParams {
            alpha_re: 2.0,
            alpha_im: 0.0,
            parity: CatParity::Even,
            truncation: 5,
        })
        .is_err());
    }

    #[test]
    fn coherent_concurrence_values() {
        assert_eq!(coherent_concurrence(0.0, 3.0).unwrap(), 0.0);
        let c = coherent_concurrence(1.0, 1.0).unwrap();
        let want = 1.0 - (-4.0_f64).exp();
        assert!((c - want).abs() < 1e-12, "C(1,1) = {c}");
        // Symmetric and monotone in each argument, approaching 1.
        let a = coherent_concurrence(0.7, 1.9).unwrap();
        let b = coherent_concurrence(1.9, 0.7).unwrap();
        assert!((a - b).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 0..40 {
            let amp = k as f64 * 0.25;
            let v = coherent_concurrence(amp, 2.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(coherent_concurrence(6.0, 6.0).unwrap() > 1.0 - 1e-10);
        assert!(coherent_concurrence(-1.0, 1.0).is_err());
    }

    #[test]
    fn tripartite_state_structure() {
        let t = tripartite_state();
        assert_eq!(t.dim(), 8);
        // Reduced state of the third qubit is maximally mixed.
        let rho3 = crate::spin::reduced_density_matrix(&t.projector(), &[2]).unwrap();
        assert!(
            frobenius_distance(rho3.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12
        );
        // Entanglement entropy across the 1|23 cut is 1 bit.
        let rho1 = crate::spin::reduced_density_matrix(&t.projector(), &[0]).unwrap();
        let eigs = rho1.eigenvalues().unwrap();
        let entropy: f64 = eigs
            .iter()
            .filter(|&&v| v > 1e-15)
            .map(|&v| -v * v.log2())
            .sum();
        assert!((entropy - 1.0).abs() < 1e-10, "entropy {entropy}");
    }

    #[test]
    fn cavity_state_is_maximally_entangled() {
        let psi = cavity_state();
        let c = concurrence(&psi.projector()).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let orth = PureState::from_slice(&[h, C_ZERO, C_ZERO, -h]).unwrap();
        assert!(psi.inner(&orth).norm() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(8);
        assert!(concurrence(&rho).is_err());
    }
}
