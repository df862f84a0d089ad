//! Complex matrix utilities shared by the spin, entanglement and
//! tomography modules: Kronecker products, Hermitian eigendecomposition,
//! partial traces, matrix square roots and PSD projections.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Spin-1/2 operator S_axis = sigma_axis / 2 in the {up, down} basis.
pub fn spin_half(axis: Axis) -> CMat {
    let h = Complex64::new(0.5, 0.0);
    match axis {
        Axis::X => CMat::from_row_slice(2, 2, &[C_ZERO, h, h, C_ZERO]),
        Axis::Y => CMat::from_row_slice(2, 2, &[C_ZERO, -C_I * 0.5, C_I * 0.5, C_ZERO]),
        Axis::Z => CMat::from_row_slice(2, 2, &[h, C_ZERO, C_ZERO, -h]),
    }
}

/// Pauli matrix sigma_axis.
pub fn pauli(axis: Axis) -> CMat {
    spin_half(axis) * Complex64::new(2.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Max |m[i,j] - conj(m[j,i])| over all entries.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Replace m by (m + m^dagger)/2.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
/// Returns (eigenvalues, eigenvectors as columns).
///
/// Cyclic complex Jacobi: quadratically convergent and accurate to a few
/// ulps even for rank-deficient or clustered spectra, which the
/// entanglement and fidelity paths rely on.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    let mut a = hermitize(m);
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("non-finite matrix entry"));
    }
    let mut vectors = CMat::identity(n, n);
    let scale = a.norm().max(1e-300);
    let tol = 1e-16 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs_apq = apq.norm();
                if abs_apq <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / Complex64::new(abs_apq, 0.0);
                // Real Jacobi angle after factoring out the phase of apq.
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation: col_p' = c col_p - s phase^* col_q,
                //                  col_q' = s phase col_p + c col_q.
                let cs = Complex64::new(c, 0.0);
                let s_p = Complex64::new(s, 0.0) * phase;
                let s_pc = s_p.conj();
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * cs - arq * s_pc;
                    a[(r, q)] = arp * s_p + arq * cs;
                }
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = apc * cs - aqc * s_p;
                    a[(q, col)] = apc * s_pc + aqc * cs;
                }
                for r in 0..n {
                    let vrp = vectors[(r, p)];
                    let vrq = vectors[(r, q)];
                    vectors[(r, p)] = vrp * cs - vrq * s_pc;
                    vectors[(r, q)] = vrp * s_p + vrq * cs;
                }
                a[(p, q)] = C_ZERO;
                a[(q, p)] = C_ZERO;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut sorted_vectors = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        sorted_vectors.set_column(col, &vectors.column(i));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite eigenvalue"));
    }
    Ok((values, sorted_vectors))
}

/// Hermitian PSD square root. Eigenvalues within rounding noise of zero
/// are clamped to exactly zero so the square root does not amplify
/// eps-level noise into sqrt(eps) artifacts on rank-deficient inputs.
pub fn sqrt_psd(m: &CMat) -> Result<CMat> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = m.nrows();
    let floor = 64.0 * f64::EPSILON * values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let mut d = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = Complex64::new(if v > floor { v.sqrt() } else { 0.0 }, 0.0);
    }
    Ok(&vectors * d * vectors.adjoint())
}

/// Singular values, descending, via the Hermitian embedding
/// [[0, M], [M^dagger, 0]] whose eigenvalues are the pairs +-s_i. Keeps
/// full precision for zero singular values, unlike sqrt(eig(M M^dagger)).
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    let mut embedded = CMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            embedded[(r, n + c)] = m[(r, c)];
            embedded[(n + r, c)] = m[(c, r)].conj();
        }
    }
    let (values, _) = hermitian_eigen(&embedded)?;
    // The top n eigenvalues are the singular values.
    let mut out: Vec<f64> = values[n..].iter().rev().map(|&v| v.max(0.0)).collect();
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(out)
}

/// Apply f to the (clamped nonnegative) eigenvalues of a Hermitian matrix.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = m.nrows();
    let mut d = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = Complex64::new(f(v), 0.0);
    }
    Ok(&vectors * d * vectors.adjoint())
}

/// Euclidean projection of a Hermitian matrix onto the set of PSD
/// unit-trace matrices (projects the eigenvalue vector onto the simplex).
pub fn project_to_density(m: &CMat) -> Result<CMat> {
    let (values, vectors) = hermitian_eigen(m)?;
    let projected = project_to_simplex(&values);
    let n = m.nrows();
    let mut d = CMat::zeros(n, n);
    for (i, &v) in projected.iter().enumerate() {
        d[(i, i)] = Complex64::new(v, 0.0);
    }
    Ok(&vectors * d * vectors.adjoint())
}

/// Euclidean projection of a real vector onto {x >= 0, sum x = 1}.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &val) in sorted.iter().enumerate() {
        cumulative += val;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if val - candidate > 0.0 {
            theta = candidate;
        }
    }
    (0..n).map(|i| (v[i] - theta).max(0.0)).collect()
}

/// Partial trace of an n-qubit density operator, keeping the listed
/// qubit factors (0-indexed, leftmost factor = 0) in their original order.
pub fn partial_trace(m: &CMat, n_qubits: usize, keep: &[usize]) -> Result<CMat> {
    let dim = 1usize << n_qubits;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: m.nrows(),
        });
    }
    if keep.is_empty() {
        return Err(Error::domain("partial trace must keep at least one factor"));
    }
    let mut seen = vec![false; n_qubits];
    for &q in keep {
        if q >= n_qubits {
            return Err(Error::domain(format!(
                "subsystem label {q} out of range for {n_qubits} qubits"
            )));
        }
        if seen[q] {
            return Err(Error::domain(format!("subsystem label {q} repeated")));
        }
        seen[q] = true;
    }
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !seen[*q]).collect();
    let keep_dim = 1usize << keep.len();
    let trace_dim = 1usize << traced.len();

    // Bit q of a basis index addresses qubit q counted from the left
    // (qubit 0 is the most significant bit).
    let bit = |index: usize, qubit: usize| (index >> (n_qubits - 1 - qubit)) & 1;

    let mut out = CMat::zeros(keep_dim, keep_dim);
    for row_k in 0..keep_dim {
        for col_k in 0..keep_dim {
            let mut acc = C_ZERO;
            for t in 0..trace_dim {
                let mut row = 0usize;
                let mut col = 0usize;
                for (pos, &q) in keep.iter().enumerate() {
                    let rb = (row_k >> (keep.len() - 1 - pos)) & 1;
                    let cb = (col_k >> (keep.len() - 1 - pos)) & 1;
                    row |= rb << (n_qubits - 1 - q);
                    col |= cb << (n_qubits - 1 - q);
                }
                for (pos, &q) in traced.iter().enumerate() {
                    let tb = (t >> (traced.len() - 1 - pos)) & 1;
                    row |= tb << (n_qubits - 1 - q);
                    col |= tb << (n_qubits - 1 - q);
                }
                debug_assert_eq!(bit(row, keep[0]), (row_k >> (keep.len() - 1)) & 1);
                acc += m[(row, col)];
            }
            out[(row_k, col_k)] = acc;
        }
    }
    Ok(out)
}

/// Frobenius norm of (a - b).
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_hermitian(n: usize, seed: u64) -> CMat {
        use rand::Rng;
        let mut rng = crate::rng::substream(seed, crate::rng::Stream::Generic, 0);
        let m = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        hermitize(&m)
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = rand_hermitian(8, 3);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let mut d = CMat::zeros(8, 8);
        for (i, &v) in vals.iter().enumerate() {
            d[(i, i)] = Complex64::new(v, 0.0);
        }
        let rebuilt = &vecs * d * vecs.adjoint();
        assert!(frobenius_distance(&m, &rebuilt) < 1e-10);
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let m = rand_hermitian(4, 5);
        let psd = &m * m.adjoint();
        let root = sqrt_psd(&psd).unwrap();
        assert!(frobenius_distance(&(&root * &root), &psd) < 1e-9);
    }

    #[test]
    fn simplex_projection_basics() {
        let p = project_to_simplex(&[0.5, 0.5]);
        assert!((p[0] - 0.5).abs() < 1e-15);
        let p = project_to_simplex(&[1.2, -0.1, 0.0, -0.1]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn partial_trace_of_product_state() {
        // rho_A (x) rho_B, keep A -> rho_A
        let a = {
            let m = rand_hermitian(2, 11);
            let p = &m * m.adjoint();
            let t = trace(&p);
            p / t
        };
        let b = {
            let m = rand_hermitian(2, 12);
            let p = &m * m.adjoint();
            let t = trace(&p);
            p / t
        };
        let joint = kron(&a, &b);
        let got = partial_trace(&joint, 2, &[0]).unwrap();
        assert!(frobenius_distance(&got, &a) < 1e-12);
        let got_b = partial_trace(&joint, 2, &[1]).unwrap();
        assert!(frobenius_distance(&got_b, &b) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_labels() {
        let m = identity(4);
        assert!(partial_trace(&m, 2, &[2]).is_err());
        assert!(partial_trace(&m, 2, &[0, 0]).is_err());
        assert!(partial_trace(&m, 2, &[]).is_err());
    }
}
