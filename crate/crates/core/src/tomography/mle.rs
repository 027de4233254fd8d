use nalgebra::linalg::Cholesky;
use nalgebra::DMatrix;

use super::inversion::linear_inversion;
use super::settings::{canonical_settings, setting_projector, TomoCounts};
use super::TomoError;
use crate::qmath::{c64, validate_density, ComplexMatrix, DensityMatrix, C64};

#[derive(Clone, Copy, Debug)]
pub struct MleOptions {
    /// Stop when the relative log-likelihood improvement falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Reserved for callers that seed their own count sampling; the
    /// reconstruction itself is deterministic and does not consume it.
    pub seed: u64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            tol: 1e-10,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MleOutcome {
    pub rho: DensityMatrix,
    /// False when the iteration budget ran out first; `rho` then carries the
    /// best iterate found.
    pub converged: bool,
    pub iterations: usize,
    /// Poisson log-likelihood at the optimum, detection scale profiled out.
    pub log_likelihood: f64,
}

const Q_FLOOR: f64 = 1e-300;

/// The likelihood surface for 16-setting Poisson counts over the Gram
/// parametrization ρ = G†G / tr(G†G), with G lower-triangular complex and a
/// real diagonal: 16 real parameters in the order [g₀₀..g₃₃, then
/// (re, im) per sub-diagonal entry, row by row].
///
/// The detection scale is profiled out analytically, leaving
/// f = Σ n_ν ln q_ν − n_tot ln Σ q_ν with q_ν = tr(ρ Π_ν).
pub struct MleProblem {
    counts: [f64; 16],
    total: f64,
    projectors: Vec<DMatrix<C64>>,
}

impl MleProblem {
    pub fn new(counts: &TomoCounts) -> Result<Self, TomoError> {
        let total = counts.total();
        if total <= 0.0 {
            return Err(TomoError::ZeroTotalCounts);
        }
        let projectors = canonical_settings()
            .iter()
            .map(|&s| setting_projector(s).into_dmatrix())
            .collect();
        Ok(MleProblem {
            counts: *counts.counts(),
            total,
            projectors,
        })
    }

    fn probabilities(&self, g: &DMatrix<C64>) -> Option<(DMatrix<C64>, f64, [f64; 16])> {
        let gram = g.adjoint() * g;
        let t = gram.trace().re;
        if !(t > 1e-100) {
            return None;
        }
        let mut q = [0.0; 16];
        for (nu, p) in self.projectors.iter().enumerate() {
            q[nu] = ((&gram * p).trace().re / t).max(0.0);
        }
        Some((gram, t, q))
    }

    pub fn objective(&self, params: &[f64; 16]) -> f64 {
        let g = params_to_g(params);
        let Some((_, _, q)) = self.probabilities(&g) else {
            return f64::NEG_INFINITY;
        };
        let sum_q: f64 = q.iter().sum();
        if sum_q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut f = -self.total * sum_q.ln();
        for nu in 0..16 {
            if self.counts[nu] > 0.0 {
                f += self.counts[nu] * q[nu].max(Q_FLOOR).ln();
            }
        }
        f
    }

    pub fn gradient(&self, params: &[f64; 16]) -> [f64; 16] {
        let g = params_to_g(params);
        let Some((gram, t, q)) = self.probabilities(&g) else {
            return [0.0; 16];
        };
        let sum_q: f64 = q.iter().sum();
        // W = Σ (n/q) Π − (n_tot / Σq) Σ Π, the Hermitian gradient in ρ.
        let mut w: DMatrix<C64> = DMatrix::zeros(4, 4);
        for nu in 0..16 {
            let mut coeff = -self.total / sum_q;
            if self.counts[nu] > 0.0 {
                coeff += self.counts[nu] / q[nu].max(Q_FLOOR);
            }
            w += &self.projectors[nu] * c64(coeff, 0.0);
        }
        let rho = &gram / c64(t, 0.0);
        let a = (&w * &rho).trace().re;
        let w_tilde = (w - DMatrix::identity(4, 4) * c64(a, 0.0)) / c64(t, 0.0);
        let grad_mat = (&g * &w_tilde) * c64(2.0, 0.0);
        let mut grad = [0.0; 16];
        for i in 0..4 {
            grad[i] = grad_mat[(i, i)].re;
        }
        let mut k = 4;
        for i in 1..4 {
            for j in 0..i {
                grad[k] = grad_mat[(i, j)].re;
                grad[k + 1] = grad_mat[(i, j)].im;
                k += 2;
            }
        }
        grad
    }

    fn density(&self, params: &[f64; 16]) -> Result<DensityMatrix, TomoError> {
        let g = params_to_g(params);
        let gram = g.adjoint() * &g;
        let t = gram.trace().re;
        let mat = ComplexMatrix::from_fn(4, 4, |i, j| gram[(i, j)] / c64(t, 0.0))
            .map_err(crate::qmath::QmathError::from)?;
        Ok(validate_density(mat, 1e-9)?)
    }
}

pub(crate) fn params_to_g(params: &[f64; 16]) -> DMatrix<C64> {
    let mut g: DMatrix<C64> = DMatrix::zeros(4, 4);
    for i in 0..4 {
        g[(i, i)] = c64(params[i], 0.0);
    }
    let mut k = 4;
    for i in 1..4 {
        for j in 0..i {
            g[(i, j)] = c64(params[k], params[k + 1]);
            k += 2;
        }
    }
    g
}

fn g_to_params(g: &DMatrix<C64>) -> [f64; 16] {
    let mut params = [0.0; 16];
    for i in 0..4 {
        params[i] = g[(i, i)].re;
    }
    let mut k = 4;
    for i in 1..4 {
        for j in 0..i {
            params[k] = g[(i, j)].re;
            params[k + 1] = g[(i, j)].im;
            k += 2;
        }
    }
    params
}

/// Lower-triangular T with T†T = ρ, via a Cholesky factorization in the
/// index-reversed basis.
fn lower_gram_factor(rho: &ComplexMatrix) -> Option<DMatrix<C64>> {
    let n = rho.rows();
    let flip = DMatrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            c64(1.0, 0.0)
        } else {
            C64::ZERO
        }
    });
    let flipped = &flip * rho.as_dmatrix() * &flip;
    let chol = Cholesky::new(flipped)?;
    let upper = &flip * chol.l() * &flip;
    Some(upper.adjoint())
}

/// Hermitian part with eigenvalues floored at `floor`, trace renormalized.
fn clamped_state(m: &ComplexMatrix, floor: f64) -> ComplexMatrix {
    let herm = (m + &m.adjoint()).scale(0.5);
    let (values, vectors) = herm.hermitian_eigen().expect("square");
    let clamped: Vec<f64> = values.iter().map(|&v| v.max(floor)).collect();
    let total: f64 = clamped.iter().sum();
    let scaled: Vec<f64> = clamped.iter().map(|&v| v / total).collect();
    let diag = ComplexMatrix::diagonal(&scaled).expect("finite");
    &(&vectors * &diag) * &vectors.adjoint()
}

fn initial_params(counts: &TomoCounts) -> [f64; 16] {
    let rho0 = match linear_inversion(counts) {
        Ok(m) => clamped_state(&m, 1e-6),
        Err(_) => ComplexMatrix::identity(4).scale(0.25),
    };
    match lower_gram_factor(&rho0) {
        Some(g) => g_to_params(&g),
        None => g_to_params(&(DMatrix::identity(4, 4) * c64(0.5, 0.0))),
    }
}

/// Maximum-likelihood reconstruction by gradient ascent with backtracking
/// line search. Deterministic; the likelihood never decreases across
/// accepted iterations, and the result is a valid density matrix whatever
/// the input noise.
pub fn mle_reconstruct(counts: &TomoCounts, opts: &MleOptions) -> Result<MleOutcome, TomoError> {
    let problem = MleProblem::new(counts)?;
    let mut params = initial_params(counts);
    let mut value = problem.objective(&params);
    let mut step = 0.1;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        iterations += 1;
        let grad = problem.gradient(&params);
        let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            converged = true;
            break;
        }
        let mut accepted = false;
        let mut s = step;
        for _ in 0..70 {
            let mut trial = params;
            for (p, g) in trial.iter_mut().zip(grad.iter()) {
                *p += s * g;
            }
            let trial_value = problem.objective(&trial);
            if trial_value > value {
                let improvement = (trial_value - value) / value.abs().max(1.0);
                params = trial;
                value = trial_value;
                step = (s * 2.0).min(1e3);
                accepted = true;
                if improvement < opts.tol {
                    converged = true;
                }
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // No float-representable ascent step remains.
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    let rho = problem.density(&params)?;
    let n = problem.total;
    let log_likelihood = value + n * (n.ln() - 1.0);
    Ok(MleOutcome {
        rho,
        converged,
        iterations,
        log_likelihood,
    })
}
