//! Independent brute-force oracles used by the integration and acceptance
//! suites. Everything here deliberately avoids the library's fast paths:
//! quadrature instead of series/Chebyshev, characteristic-polynomial root
//! finding instead of Jacobi rotations, explicit index loops instead of
//! bit tricks.

#![allow(dead_code)]

use channelion_core::qmat::CMat;
use num_complex::Complex64;
use rand::Rng;

/// K_n(x) by trapezoidal quadrature of int_0^inf e^{-x cosh t} cosh(nt) dt.
/// The integrand is even with double-exponential decay, so the trapezoid
/// rule is spectrally accurate.
pub fn bessel_k_quadrature(order: u32, x: f64) -> f64 {
    assert!(x > 0.0);
    let h = (0.35 / x.sqrt()).min(0.02);
    let t_max = (1.0 + 730.0 / x).acosh();
    let n = (t_max / h) as usize + 2;
    let mut sum = 0.0;
    for i in 0..n {
        let t = i as f64 * h;
        let w = (-x * t.cosh()).exp() * (order as f64 * t).cosh();
        sum += if i == 0 { 0.5 * w } else { w };
    }
    sum * h
}

/// Eigenvalues of a general complex matrix via Faddeev-LeVerrier
/// characteristic-polynomial coefficients and Durand-Kerner root finding.
/// The matrix is normalized first so coefficient growth stays tame.
pub fn eigenvalues_durand_kerner(matrix: &CMat) -> Vec<Complex64> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols());
    let scale = matrix
        .iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let a = matrix / Complex64::new(scale, 0.0);

    // p(z) = z^n + c[0] z^{n-1} + ... + c[n-1]
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    let mut m = a.clone();
    let mut c = -trace(&m);
    coeffs[0] = c;
    for k in 1..n {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += c;
        }
        m = &a * shifted;
        c = -trace(&m) / Complex64::new((k + 1) as f64, 0.0);
        coeffs[k] = c;
    }

    let eval = |z: Complex64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for &ck in &coeffs {
            acc = acc * z + ck;
        }
        acc
    };

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|j| seed.powu(j as u32 + 1)).collect();
    for _ in 0..600 {
        let mut worst = 0.0_f64;
        for j in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            let update = eval(roots[j]) / denom;
            roots[j] -= update;
            worst = worst.max(update.norm());
        }
        if worst < 1e-15 {
            break;
        }
    }
    roots
        .into_iter()
        .map(|r| r * Complex64::new(scale, 0.0))
        .collect()
}

fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Partial trace by explicit index loops over row-major qubit labels.
pub fn naive_partial_trace(m: &CMat, n_qubits: usize, keep: &[usize]) -> CMat {
    let keep_dim = 1usize << keep.len();
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let trace_dim = 1usize << traced.len();
    let assemble = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept_bits >> (keep.len() - 1 - pos)) & 1;
            idx |= bit << (n_qubits - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << (n_qubits - 1 - q);
        }
        idx
    };
    let mut out = CMat::zeros(keep_dim, keep_dim);
    for r in 0..keep_dim {
        for c in 0..keep_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..trace_dim {
                acc += m[(assemble(r, t), assemble(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// Random density matrix from the Ginibre ensemble.
pub fn random_density_matrix(dim: usize, seed: u64) -> channelion_core::DensityMatrix {
    let mut rng = channelion_core::rng::substream(seed, channelion_core::rng::Stream::Generic, 17);
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(gaussian(&mut rng), gaussian(&mut rng))
    });
    let psd = &g * g.adjoint();
    let tr = (0..dim).map(|i| psd[(i, i)].re).sum::<f64>();
    channelion_core::DensityMatrix::new(psd / Complex64::new(tr, 0.0)).expect("ginibre state")
}

/// Random pure product state on two qubits.
pub fn random_product_state(seed: u64) -> channelion_core::PureState {
    let mut rng = channelion_core::rng::substream(seed, channelion_core::rng::Stream::Generic, 23);
    let single = |rng: &mut rand_chacha::ChaCha12Rng| {
        let v = nalgebra::DVector::from_fn(2, |_, _| {
            Complex64::new(gaussian(rng), gaussian(rng))
        });
        let norm = v.norm();
        v / Complex64::new(norm, 0.0)
    };
    let a = single(&mut rng);
    let b = single(&mut rng);
    let joint = a.kronecker(&b);
    channelion_core::PureState::new(joint).expect("normalized product state")
}

/// Random single-qubit unitary (Gram-Schmidt on a Ginibre pair).
pub fn random_unitary_2(seed: u64) -> CMat {
    let mut rng = channelion_core::rng::substream(seed, channelion_core::rng::Stream::Generic, 29);
    let col0 = nalgebra::DVector::from_fn(2, |_, _| {
        Complex64::new(gaussian(&mut rng), gaussian(&mut rng))
    });
    let n0 = col0.norm();
    let col0 = col0 / Complex64::new(n0, 0.0);
    // Orthogonal complement in 2 dimensions is unique up to phase.
    let col1 = nalgebra::DVector::from_column_slice(&[-col0[1].conj(), col0[0].conj()]);
    let mut u = CMat::zeros(2, 2);
    u.set_column(0, &col0);
    u.set_column(1, &col1);
    u
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller, kept local so oracle randomness is independent of the
    // library's distribution choices.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Wootters concurrence through the non-Hermitian product rho rho~ and
/// Durand-Kerner eigenvalues, exactly as defined.
pub fn concurrence_durand_kerner(rho: &channelion_core::DensityMatrix) -> f64 {
    let sy = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let yy = sy.kronecker(&sy);
    let conj = rho.matrix().map(|z| z.conj());
    let product = rho.matrix() * &yy * conj * &yy;
    let mut lambdas: Vec<f64> = eigenvalues_durand_kerner(&product)
        .into_iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Poisson pmf by direct multiplication, valid for small integer counts.
pub fn poisson_pmf_direct(c: u64, mean: f64) -> f64 {
    let mut value = (-mean).exp();
    for k in 1..=c {
        value *= mean / k as f64;
    }
    value
}

pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}
