//! Quantum state carriers: normalized pure states and validated density
//! matrices (Hermitian, unit trace, PSD within tolerance).

use crate::error::{Error, Result};
use crate::qmat::{self, CMat, CVec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;
const NORM_TOL: f64 = 1e-10;

/// Normalized complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVec,
}

impl PureState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "pure state norm {norm} deviates from 1 beyond {NORM_TOL}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize a raw amplitude vector. Errors on (near-)zero norm.
    pub fn normalized(raw: CVec) -> Result<Self> {
        let norm = raw.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::domain("cannot normalize a zero-norm vector"));
        }
        Ok(Self {
            amplitudes: raw / Complex64::new(norm, 0.0),
        })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVec::from_column_slice(amps))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |psi><psi| as a density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { matrix: m }
    }
}

/// Trace-1 Hermitian positive-semidefinite complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within tolerance.
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let defect = qmat::hermiticity_defect(&matrix);
        if !defect.is_finite() || defect > HERMITICITY_TOL {
            return Err(Error::domain(format!(
                "density matrix asymmetry {defect} exceeds {HERMITICITY_TOL}"
            )));
        }
        let tr = qmat::trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::domain(format!(
                "density matrix trace {tr} deviates from 1 beyond {TRACE_TOL}"
            )));
        }
        let matrix = qmat::hermitize(&matrix);
        let (values, _) = qmat::hermitian_eigen(&matrix)?;
        if values[0] < -PSD_TOL {
            return Err(Error::domain(format!(
                "density matrix minimum eigenvalue {} below -{PSD_TOL}",
                values[0]
            )));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: qmat::identity(dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        qmat::trace(&(&self.matrix * &self.matrix)).re
    }

    /// <P> = Tr(op rho), real part.
    pub fn expectation(&self, op: &CMat) -> f64 {
        qmat::trace(&(op * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(qmat::hermitian_eigen(&self.matrix)?.0)
    }
}

/// Serialization as dim plus interleaved re/im arrays, used by the JSON
/// interfaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixData {
    pub dim: usize,
    /// Row-major [re0, im0, re1, im1, ...].
    pub entries: Vec<f64>,
}

impl From<&DensityMatrix> for DensityMatrixData {
    fn from(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut entries = Vec::with_capacity(2 * dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = rho.matrix[(r, c)];
                entries.push(z.re);
                entries.push(z.im);
            }
        }
        Self { dim, entries }
    }
}

impl TryFrom<&DensityMatrixData> for DensityMatrix {
    type Error = Error;

    fn try_from(data: &DensityMatrixData) -> Result<Self> {
        let dim = data.dim;
        if data.entries.len() != 2 * dim * dim {
            return Err(Error::config(format!(
                "density matrix data length {} does not match dim {}",
                data.entries.len(),
                dim
            )));
        }
        let mut m = CMat::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let k = 2 * (r * dim + c);
                m[(r, c)] = Complex64::new(data.entries[k], data.entries[k + 1]);
            }
        }
        DensityMatrix::new(m)
    }
}

/// Pure-state JSON form (dim + interleaved re/im amplitudes).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureStateData {
    pub dim: usize,
    pub amplitudes: Vec<f64>,
}

impl From<&PureState> for PureStateData {
    fn from(psi: &PureState) -> Self {
        let mut amplitudes = Vec::with_capacity(2 * psi.dim());
        for z in psi.amplitudes().iter() {
            amplitudes.push(z.re);
            amplitudes.push(z.im);
        }
        Self {
            dim: psi.dim(),
            amplitudes,
        }
    }
}

impl TryFrom<&PureStateData> for PureState {
    type Error = Error;

    fn try_from(data: &PureStateData) -> Result<Self> {
        if data.amplitudes.len() != 2 * data.dim {
            return Err(Error::config("amplitude list does not match dim"));
        }
        let amps: Vec<Complex64> = data
            .amplitudes
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        PureState::from_slice(&amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::C_ZERO;

    #[test]
    fn rejects_unnormalized_pure_state() {
        let v = CVec::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(PureState::new(v).is_err());
    }

    #[test]
    fn projector_of_basis_state() {
        let psi = PureState::from_slice(&[qmat::C_ONE, C_ZERO]).unwrap();
        let rho = psi.projector();
        assert_eq!(rho.dim(), 2);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_trace() {
        let m = qmat::identity(2);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_negative_matrix() {
        let mut m = qmat::identity(2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rho = DensityMatrix::maximally_mixed(4);
        let data = DensityMatrixData::from(&rho);
        let text = serde_json::to_string(&data).unwrap();
        let back: DensityMatrixData = serde_json::from_str(&text).unwrap();
        let rho2 = DensityMatrix::try_from(&back).unwrap();
        assert!(qmat::frobenius_distance(rho.matrix(), rho2.matrix()) < 1e-14);
    }
}
