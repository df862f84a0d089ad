//! Two-qubit polarization tomography: Poisson-noisy coincidence counts
//! over the 16 standard projectors, linear and maximum-likelihood
//! reconstruction, Uhlmann fidelity and the Monte-Carlo fidelity pipeline.

use crate::error::{Error, Result};
use crate::qmat::{self, Axis, CMat, CVec, C_ONE, C_ZERO};
use crate::rng::{mix, substream, Stream};
use crate::state::{DensityMatrix, PureState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::FRAC_1_SQRT_2;

/// Single-qubit polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
    D,
    L,
    R,
}

impl Polarization {
    /// |H> = (1,0), |V> = (0,1), |D> = (|H>+|V>)/sqrt2,
    /// |L> = (|H>+i|V>)/sqrt2, |R> = (|H>-i|V>)/sqrt2.
    pub fn ket(&self) -> CVec {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
        match self {
            Polarization::H => CVec::from_column_slice(&[C_ONE, C_ZERO]),
            Polarization::V => CVec::from_column_slice(&[C_ZERO, C_ONE]),
            Polarization::D => CVec::from_column_slice(&[h, h]),
            Polarization::L => CVec::from_column_slice(&[h, ih]),
            Polarization::R => CVec::from_column_slice(&[h, -ih]),
        }
    }
}

/// The 16 two-qubit product projectors used for state tomography, in the
/// fixed measurement order below. The set is informationally complete.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    labels: Vec<(Polarization, Polarization)>,
    projectors: Vec<CMat>,
}

pub const STANDARD_LABELS: [(Polarization, Polarization); 16] = {
    use Polarization::*;
    [
        (H, H),
        (R, H),
        (D, R),
        (V, D),
        (H, V),
        (R, V),
        (D, D),
        (V, L),
        (V, V),
        (D, V),
        (R, D),
        (H, L),
        (V, H),
        (D, H),
        (H, D),
        (R, L),
    ]
};

/// Indices of the {HH, HV, VV, VH} projectors whose expectations sum to 1.
const FLUX_INDICES: [usize; 4] = [0, 4, 8, 12];

impl ProjectorSet {
    pub fn standard() -> Self {
        let labels: Vec<_> = STANDARD_LABELS.to_vec();
        let projectors = labels
            .iter()
            .map(|(a, b)| {
                let ket = a.ket().kronecker(&b.ket());
                &ket * ket.adjoint()
            })
            .collect();
        ProjectorSet { labels, projectors }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn labels(&self) -> &[(Polarization, Polarization)] {
        &self.labels
    }

    pub fn label_strings(&self) -> Vec<String> {
        self.labels
            .iter()
            .map(|(a, b)| format!("{a:?}{b:?}"))
            .collect()
    }

    pub fn projector(&self, j: usize) -> &CMat {
        &self.projectors[j]
    }

    /// Expected probabilities Tr(P_j rho), clamped to [0, 1].
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.projectors
            .iter()
            .map(|p| qmat::trace(&(p * rho.matrix())).re.clamp(0.0, 1.0))
            .collect()
    }

    /// Gram matrix G[j][k] = Tr(P_j P_k).
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |j, k| {
            qmat::trace(&(&self.projectors[j] * &self.projectors[k])).re
        })
    }

    /// Condition number of the Gram matrix (ratio of extreme eigenvalues).
    pub fn gram_condition_number(&self) -> f64 {
        let g = self.gram();
        let n = g.nrows();
        let gc = CMat::from_fn(n, n, |r, c| Complex64::new(g[(r, c)], 0.0));
        let (vals, _) = qmat::hermitian_eigen(&gc).expect("gram is symmetric");
        vals[n - 1] / vals[0]
    }

    /// Measurement-design matrix over the Pauli product basis:
    /// A[j][m] = Tr(P_j (s_u (x) s_v)) / 4 with m = 4u + v, so that
    /// A s = p for s_m = Tr(rho (s_u (x) s_v)).
    pub fn design_matrix(&self) -> DMatrix<f64> {
        let basis = pauli_product_basis();
        DMatrix::from_fn(self.len(), 16, |j, m| {
            qmat::trace(&(&self.projectors[j] * &basis[m])).re / 4.0
        })
    }
}

impl Default for ProjectorSet {
    fn default() -> Self {
        Self::standard()
    }
}

/// The 16 Pauli products s_u (x) s_v, u,v in {I, x, y, z}, row-major.
pub fn pauli_product_basis() -> Vec<CMat> {
    let singles = [
        qmat::identity(2),
        qmat::pauli(Axis::X),
        qmat::pauli(Axis::Y),
        qmat::pauli(Axis::Z),
    ];
    let mut basis = Vec::with_capacity(16);
    for u in &singles {
        for v in &singles {
            basis.push(qmat::kron(u, v));
        }
    }
    basis
}

/// One tomography acquisition: 16 Poisson counts plus metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyRecord {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    /// Intended counts scale N (mean counts for a unit-probability projector).
    pub n_scale: f64,
    pub seed: u64,
}

impl TomographyRecord {
    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Draw c_j ~ Poisson(N Tr(P_j rho)) independently, one RNG substream per
/// projector. Bit-identical for a fixed seed.
pub fn simulate_counts(
    rho: &DensityMatrix,
    projectors: &ProjectorSet,
    n_scale: f64,
    seed: u64,
) -> Result<TomographyRecord> {
    if !(n_scale >= 1.0) {
        return Err(Error::config(format!(
            "counts scale must be >= 1, got {n_scale}"
        )));
    }
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho.dim(),
        });
    }
    let probabilities = projectors.probabilities(rho);
    let counts = probabilities
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let mean = n_scale * p;
            if mean <= 0.0 {
                0
            } else {
                let mut rng = substream(seed, Stream::TomoProjector, j as u64);
                Poisson::new(mean)
                    .expect("positive mean")
                    .sample(&mut rng) as u64
            }
        })
        .collect();
    Ok(TomographyRecord {
        labels: projectors.label_strings(),
        counts,
        n_scale,
        seed,
    })
}

/// Linear reconstruction result: Hermitian and unit-trace but possibly
/// indefinite; negative eigenvalues are reported.
#[derive(Debug, Clone)]
pub struct LinearReconstruction {
    pub matrix: CMat,
    pub negative_eigenvalues: Vec<f64>,
    /// Total-flux normalizer estimated from the {HH, HV, VV, VH} counts.
    pub flux: f64,
}

impl LinearReconstruction {
    /// Nearest PSD unit-trace state (eigenvalue simplex projection).
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(qmat::project_to_density(&self.matrix)?)
    }
}

/// Solve Tr(P_j rho) = c_j / flux for the Pauli coefficients of rho.
/// Counts are accepted as reals so exact expectations can be reconstructed
/// without rounding.
pub fn linear_reconstruct(
    counts: &[f64],
    projectors: &ProjectorSet,
) -> Result<LinearReconstruction> {
    if counts.len() != projectors.len() {
        return Err(Error::Dimension {
            expected: projectors.len(),
            got: counts.len(),
        });
    }
    if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::domain("counts must be finite and nonnegative"));
    }
    let flux: f64 = FLUX_INDICES.iter().map(|&j| counts[j]).sum();
    if flux <= 0.0 {
        return Err(Error::numerical(
            "zero total flux in the complete-basis projectors",
        ));
    }
    let probs = DMatrix::from_fn(projectors.len(), 1, |j, _| counts[j] / flux);
    let design = projectors.design_matrix();
    let solution = design
        .lu()
        .solve(&probs)
        .ok_or_else(|| Error::numerical("singular tomography design matrix"))?;
    let basis = pauli_product_basis();
    let mut rho = CMat::zeros(4, 4);
    for (m, gamma) in basis.iter().enumerate() {
        rho += gamma * Complex64::new(solution[(m, 0)] / 4.0, 0.0);
    }
    let rho = qmat::hermitize(&rho);
    let tr = qmat::trace(&rho).re;
    if tr.abs() < 1e-12 {
        return Err(Error::numerical("reconstructed state has zero trace"));
    }
    let rho = rho / Complex64::new(tr, 0.0);
    let (values, _) = qmat::hermitian_eigen(&rho)?;
    let negative_eigenvalues = values.iter().copied().filter(|&v| v < 0.0).collect();
    Ok(LinearReconstruction {
        matrix: rho,
        negative_eigenvalues,
        flux,
    })
}

#[derive(Debug, Clone)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the scaled gradient norm.
    pub gradient_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_iterations: 10_000,
            gradient_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MleReconstruction {
    pub rho: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
}

/// Poisson log-likelihood of means m_j = Tr(P_j T^dagger T) given counts,
/// dropping the count-only factorial term.
fn poisson_loglik(means: &[f64], counts: &[f64]) -> f64 {
    means
        .iter()
        .zip(counts)
        .map(|(&m, &c)| {
            let m = m.max(1e-300);
            c * m.ln() - m
        })
        .sum()
}

fn means_of(sigma: &CMat, projectors: &ProjectorSet) -> Vec<f64> {
    (0..projectors.len())
        .map(|j| qmat::trace(&(projectors.projector(j) * sigma)).re.max(0.0))
        .collect()
}

/// Keep only the lower triangle, with a real diagonal.
fn project_lower_triangular(m: &mut CMat) {
    let n = m.nrows();
    for r in 0..n {
        m[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
        for c in (r + 1)..n {
            m[(r, c)] = C_ZERO;
        }
    }
}

/// Maximum-likelihood reconstruction over the Cholesky cone
/// rho = T^dagger T / Tr(T^dagger T): gradient ascent on the Poisson
/// likelihood with step-halving line search. The scale of T absorbs the
/// total flux, so no separate flux parameter is needed.
pub fn mle_reconstruct(
    counts: &[f64],
    projectors: &ProjectorSet,
    options: &MleOptions,
) -> Result<MleReconstruction> {
    if counts.len() != projectors.len() {
        return Err(Error::Dimension {
            expected: projectors.len(),
            got: counts.len(),
        });
    }
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::numerical("all counts are zero"));
    }

    // The Poisson likelihood over sigma = T T^dagger separates into a
    // shape term and a total-flux term whose optimum is analytic
    // (flux = total counts / 4 for unit-trace shape). Optimizing the
    // scale-invariant objective L(T) = sum_j c_j ln m_j - C ln Tr(sigma)
    // removes the stiff flux direction entirely.
    //
    // Warm start: PSD-projected linear estimate blended toward the
    // maximally mixed state so the Cholesky factor exists.
    let linear = linear_reconstruct(counts, projectors)?;
    let projected = qmat::project_to_density(&linear.matrix)?;
    let blend = projected * Complex64::new(0.98, 0.0)
        + qmat::identity(4) * Complex64::new(0.02 / 4.0, 0.0);
    let chol = nalgebra::Cholesky::new(qmat::hermitize(&blend))
        .ok_or_else(|| Error::numerical("warm-start state not positive definite"))?;
    // nalgebra returns lower-triangular L with L L^dagger = A; we keep T
    // lower-triangular and use sigma = T T^dagger (same cone).
    let mut t = chol.l();

    // S = sum_j P_j appears in the profiled flux term.
    let mut s_total = CMat::zeros(4, 4);
    for j in 0..projectors.len() {
        s_total += projectors.projector(j);
    }

    let sigma = |t: &CMat| t * t.adjoint();
    // Profiled objective: with means m_j = flux Tr(P_j sigma), the optimal
    // flux given the shape is C / Tr(S sigma), leaving the scale-invariant
    // L(T) = sum_j c_j ln Tr(P_j sigma) - C ln Tr(S sigma) (+ const).
    let objective = |means: &[f64]| -> f64 {
        let sum_means: f64 = means.iter().sum();
        means
            .iter()
            .zip(counts)
            .map(|(&m, &c)| c * m.max(1e-300).ln())
            .sum::<f64>()
            - total * sum_means.max(1e-300).ln()
    };
    let mut means = means_of(&sigma(&t), projectors);
    let mut value = objective(&means);
    let mut step = 1.0_f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut prev_grad: Option<CMat> = None;
    let mut direction = CMat::zeros(4, 4);

    for iter in 0..options.max_iterations {
        iterations = iter + 1;
        // Gradient wrt T^*: [sum_j (c_j/m_j) P_j - (C / Tr(S sigma)) S] T,
        // kept lower-triangular.
        let sum_means: f64 = means.iter().sum();
        let mut g = &s_total * Complex64::new(-total / sum_means.max(1e-300), 0.0);
        for (j, (&m, &c)) in means.iter().zip(counts).enumerate() {
            g += projectors.projector(j) * Complex64::new(c / m.max(1e-300), 0.0);
        }
        let mut grad = &g * &t;
        project_lower_triangular(&mut grad);
        let gradient_scale = grad.norm() / total.max(1.0);
        if gradient_scale < options.gradient_tol {
            converged = true;
            break;
        }

        // Polak-Ribiere conjugate direction, reset when it stops ascending.
        let beta = match &prev_grad {
            Some(pg) => {
                let num = (grad.conjugate().component_mul(&(&grad - pg))).sum().re;
                let den = pg.norm_squared();
                (num / den.max(1e-300)).max(0.0)
            }
            None => 0.0,
        };
        direction = &grad + &direction * Complex64::new(beta, 0.0);
        let ascent = direction.conjugate().component_mul(&grad).sum().re;
        if ascent <= 0.0 {
            direction = grad.clone();
        }
        prev_grad = Some(grad);

        // Step-halving line search with a growing initial step.
        step = (step * 4.0).min(1e2);
        let mut accepted = false;
        for _ in 0..80 {
            let candidate = &t + &direction * Complex64::new(step / total.max(1.0), 0.0);
            let sig = sigma(&candidate);
            let cand_means = means_of(&sig, projectors);
            let cand_value = objective(&cand_means);
            if cand_value > value {
                // Renormalize to unit trace; the objective is
                // scale-invariant so this only conditions the numbers.
                let norm = qmat::trace(&sig).re.max(1e-300);
                t = candidate / Complex64::new(norm.sqrt(), 0.0);
                means = cand_means.iter().map(|m| m / norm).collect();
                value = objective(&means);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No uphill step at any scale: numerically at the optimum.
            converged = true;
            break;
        }
    }

    let sigma_final = sigma(&t);
    let tr = qmat::trace(&sigma_final).re;
    if tr <= 0.0 {
        return Err(Error::numerical("MLE collapsed to the zero matrix"));
    }
    let rho = DensityMatrix::new(sigma_final / Complex64::new(tr, 0.0))?;
    // Report the likelihood at the analytic flux optimum.
    let shape_means = means_of(rho.matrix(), projectors);
    let flux = total / shape_means.iter().sum::<f64>().max(1e-300);
    let flux_means: Vec<f64> = shape_means.iter().map(|m| flux * m).collect();
    let log_likelihood = poisson_loglik(&flux_means, counts);
    Ok(MleReconstruction {
        rho,
        iterations,
        converged,
        log_likelihood,
    })
}

/// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated
/// as the squared trace norm of sqrt(rho) sqrt(sigma) so zero modes do
/// not inject sqrt(eps) noise.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let product = qmat::sqrt_psd(rho.matrix())? * qmat::sqrt_psd(sigma.matrix())?;
    let sum: f64 = qmat::singular_values(&product)?.iter().sum();
    Ok((sum * sum).clamp(0.0, 1.0 + 1e-12).min(1.0))
}

/// log of the Poisson pmf with real-valued count c >= 0.
fn poisson_log_pmf(c: f64, mean: f64) -> f64 {
    let m = mean.max(1e-300);
    c * m.ln() - m - ln_gamma(c + 1.0)
}

/// Two-hypothesis Poisson mixture likelihood:
/// f(p, c) = prod_j [p D(c_j|m_k,j) + (1-p) D(c_j|m_i,j)]
///           / [D(c_j|m_k,j) + D(c_j|m_i,j)],
/// evaluated in log space.
pub fn poisson_likelihood(
    p: f64,
    counts: &[f64],
    means_k: &[f64],
    means_i: &[f64],
) -> Result<f64> {
    Ok(poisson_log_likelihood(p, counts, means_k, means_i)?.exp())
}

/// Log of `poisson_likelihood`; stays finite for counts up to 1e9+.
pub fn poisson_log_likelihood(
    p: f64,
    counts: &[f64],
    means_k: &[f64],
    means_i: &[f64],
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("mixing weight {p} outside [0,1]")));
    }
    if counts.len() != means_k.len() || counts.len() != means_i.len() {
        return Err(Error::Dimension {
            expected: counts.len(),
            got: means_k.len().min(means_i.len()),
        });
    }
    if means_k.iter().chain(means_i).any(|&m| !(m > 0.0)) {
        return Err(Error::domain(
            "hypothesis means must be positive (degenerate model otherwise)",
        ));
    }
    let mut log_f = 0.0;
    for (j, &c) in counts.iter().enumerate() {
        if c < 0.0 || !c.is_finite() {
            return Err(Error::domain("counts must be finite and nonnegative"));
        }
        let lk = poisson_log_pmf(c, means_k[j]);
        let li = poisson_log_pmf(c, means_i[j]);
        let numerator = log_sum_exp_weighted(p, lk, 1.0 - p, li);
        let denominator = log_sum_exp_weighted(1.0, lk, 1.0, li);
        if !numerator.is_finite() && p > 0.0 && p < 1.0 {
            return Err(Error::numerical("likelihood underflow"));
        }
        log_f += numerator - denominator;
    }
    Ok(log_f)
}

/// log(a e^x + b e^y), stable for large negative x, y.
fn log_sum_exp_weighted(a: f64, x: f64, b: f64, y: f64) -> f64 {
    let (hi, lo, wh, wl) = if x >= y { (x, y, a, b) } else { (y, x, b, a) };
    if wh == 0.0 {
        return if wl == 0.0 {
            f64::NEG_INFINITY
        } else {
            wl.ln() + lo
        };
    }
    hi + (wh + wl * (lo - hi).exp()).ln()
}

/// Normalized posterior weights of candidate states given observed counts:
/// w_i proportional to prod_j Poisson(c_j | means_i[j]), in log space.
pub fn posterior_weights(counts: &[f64], candidate_means: &[Vec<f64>]) -> Result<Vec<f64>> {
    if candidate_means.is_empty() {
        return Err(Error::domain("at least one candidate state required"));
    }
    let log_liks: Vec<f64> = candidate_means
        .iter()
        .map(|means| {
            if means.len() != counts.len() {
                return Err(Error::Dimension {
                    expected: counts.len(),
                    got: means.len(),
                });
            }
            Ok(counts
                .iter()
                .zip(means)
                .map(|(&c, &m)| poisson_log_pmf(c, m))
                .sum())
        })
        .collect::<Result<_>>()?;
    let max = log_liks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::numerical(
            "all candidate likelihoods underflowed to zero",
        ));
    }
    let unnormalized: Vec<f64> = log_liks.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = unnormalized.iter().sum();
    Ok(unnormalized.into_iter().map(|w| w / total).collect())
}

/// Iteration weighting for the Monte-Carlo fidelity aggregate.
#[derive(Debug, Clone)]
pub enum McWeighting {
    /// p^i = 1/iterations.
    Uniform,
    /// Weight each iteration by the posterior probability of the first
    /// candidate given that iteration's counts.
    Posterior { candidates: Vec<DensityMatrix> },
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityStats {
    pub mean: f64,
    pub std: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelities: Option<Vec<f64>>,
}

/// Monte-Carlo fidelity statistics: repeat
/// {simulate counts -> MLE reconstruct -> fidelity vs target}, then
/// aggregate the weighted mean and spread
/// (Delta F = sqrt(sum_i p^i (F_i - F)^2)).
/// Iterations run on independent substreams; aggregation is in iteration
/// order, so results are deterministic for a fixed seed.
pub fn mc_fidelity(
    truth: &DensityMatrix,
    target: &PureState,
    projectors: &ProjectorSet,
    n_scale: f64,
    iterations: usize,
    seed: u64,
    weighting: &McWeighting,
    keep_fidelities: bool,
) -> Result<FidelityStats> {
    if iterations == 0 {
        return Err(Error::config("at least one iteration required"));
    }
    if target.dim() != truth.dim() {
        return Err(Error::Dimension {
            expected: truth.dim(),
            got: target.dim(),
        });
    }
    let target_rho = target.projector();
    let options = MleOptions::default();
    let candidate_means: Option<Vec<Vec<f64>>> = match weighting {
        McWeighting::Uniform => None,
        McWeighting::Posterior { candidates } => Some(
            candidates
                .iter()
                .map(|c| {
                    projectors
                        .probabilities(c)
                        .iter()
                        .map(|p| (n_scale * p).max(1e-12))
                        .collect()
                })
                .collect(),
        ),
    };

    let per_iteration: Vec<(f64, f64)> = (0..iterations)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let iter_seed = mix(seed, Stream::TomoIteration, i as u64);
            let record = simulate_counts(truth, projectors, n_scale, iter_seed)?;
            let counts = record.counts_f64();
            let reconstruction = mle_reconstruct(&counts, projectors, &options)?;
            let fidelity = uhlmann_fidelity(&reconstruction.rho, &target_rho)?;
            let weight = match &candidate_means {
                None => 1.0,
                Some(means) => posterior_weights(&counts, means)?[0],
            };
            Ok((fidelity, weight))
        })
        .collect::<Result<_>>()?;

    let weight_total: f64 = per_iteration.iter().map(|(_, w)| w).sum();
    if weight_total <= 0.0 {
        return Err(Error::numerical("all iteration weights vanished"));
    }
    let mean: f64 = per_iteration
        .iter()
        .map(|(f, w)| f * w / weight_total)
        .sum();
    let variance: f64 = per_iteration
        .iter()
        .map(|(f, w)| w / weight_total * (f - mean) * (f - mean))
        .sum();
    Ok(FidelityStats {
        mean,
        std: variance.max(0.0).sqrt(),
        iterations,
        fidelities: keep_fidelities
            .then(|| per_iteration.iter().map(|(f, _)| *f).collect()),
    })
}
