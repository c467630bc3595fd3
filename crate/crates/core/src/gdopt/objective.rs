use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::basis::GeneratorBasis;
use crate::error::{Error, Result};
use crate::math;
use crate::numeric::NumericConfig;
use crate::qlinalg::{eig_hermitian_with, partial_trace, ComplexMatrix, HermitianEigen, Keep};
use crate::states::{entropy_of_spectrum, DensityMatrix};

/// Floor applied to marginal eigenvalues before taking logarithms in the gradient.
const LOG_FLOOR: f64 = 1e-15;

/// Real coefficients over a [`GeneratorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        Ok(Self(h))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `U = exp(i Σ_a h_a G_a)`.
pub fn build_unitary(basis: &GeneratorBasis, params: &ParamVector) -> Result<ComplexMatrix> {
    let h = basis.combine(params.as_slice())?;
    let eig = eig_hermitian_with(&h, &NumericConfig::DEFAULT)?;
    Ok(eig.map_values(|x| Complex64::from_polar(1.0, x)))
}

fn check_dims(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    if rho.rows() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: rho.rows() });
    }
    Ok(())
}

fn marginal_entropies(sigma: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<(HermitianEigen, HermitianEigen)> {
    let cfg = NumericConfig::DEFAULT;
    let ea = eig_hermitian_with(&partial_trace(sigma, (d_a, d_b), Keep::First)?.hermitize(), &cfg)?;
    let eb = eig_hermitian_with(&partial_trace(sigma, (d_a, d_b), Keep::Second)?.hermitize(), &cfg)?;
    Ok((ea, eb))
}

pub(crate) fn delta_s_of_matrix(sigma: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    let (ea, eb) = marginal_entropies(sigma, d_a, d_b)?;
    let cfg = NumericConfig::DEFAULT;
    Ok(entropy_of_spectrum(&ea.values, &cfg) - entropy_of_spectrum(&eb.values, &cfg))
}

/// `S(Tr_B UρU†) − S(Tr_A UρU†)` in bits.
pub fn delta_s_objective(rho_ab: &DensityMatrix, d_a: usize, d_b: usize, u: &ComplexMatrix) -> Result<f64> {
    check_dims(rho_ab.matrix(), d_a, d_b)?;
    let n = d_a * d_b;
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.rows() });
    }
    let deviation = u.unitary_deviation();
    if deviation > NumericConfig::DEFAULT.unitary_tol {
        return Err(Error::NotUnitary { deviation });
    }
    delta_s_of_matrix(&rho_ab.matrix().conjugate_by(u), d_a, d_b)
}

fn objective_at(rho: &ComplexMatrix, d_a: usize, d_b: usize, basis: &GeneratorBasis, h: &[f64]) -> Result<f64> {
    let u = build_unitary(basis, &ParamVector(h.to_vec()))?;
    delta_s_of_matrix(&rho.conjugate_by(&u), d_a, d_b)
}

/// `ΔS` at `U(h)` for the given parameters.
pub fn objective_at_params(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    params: &ParamVector,
) -> Result<f64> {
    check_dims(rho_ab.matrix(), d_a, d_b)?;
    objective_at(rho_ab.matrix(), d_a, d_b, basis, params.as_slice())
}

/// Central-difference gradient of `h ↦ ΔS(U(h) ρ U(h)†)`.
pub fn numeric_gradient(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    params: &ParamVector,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    check_dims(rho_ab.matrix(), d_a, d_b)?;
    if params.len() != basis.len() {
        return Err(Error::LengthMismatch { expected: basis.len(), found: params.len() });
    }
    let rho = rho_ab.matrix();
    let mut h = params.as_slice().to_vec();
    let mut grad = Vec::with_capacity(h.len());
    for a in 0..h.len() {
        let h0 = h[a];
        h[a] = h0 + step;
        let fp = objective_at(rho, d_a, d_b, basis, &h)?;
        h[a] = h0 - step;
        let fm = objective_at(rho, d_a, d_b, basis, &h)?;
        h[a] = h0;
        grad.push((fp - fm) / (2.0 * step));
    }
    Ok(grad)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        math::sin(x) / x
    }
}

/// Objective value and exact gradient at `h`.
///
/// With `H = V Λ V†` and `K = −log₂σ_A ⊗ I + I ⊗ log₂σ_B`, the derivative of
/// `exp(iH)` along `G` is expressed through the divided differences
/// `Φ_jk = e^{i(λ_j+λ_k)/2} sinc((λ_j−λ_k)/2)`, giving
/// `∂ΔS/∂h_a = −2 Im Tr(G_a M)` with `M = V (Γ̃ ∘ Φᵀ) V†`, `Γ̃ = V† ρ U† K V`.
pub fn value_and_gradient(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    params: &ParamVector,
) -> Result<(f64, Vec<f64>)> {
    check_dims(rho_ab.matrix(), d_a, d_b)?;
    let mut ws = GradientWorkspace::new(rho_ab.matrix().clone(), d_a, d_b);
    ws.evaluate(basis, params.as_slice())
}

/// Reusable state for repeated gradient evaluations on one `ρ`.
pub(crate) struct GradientWorkspace {
    rho: ComplexMatrix,
    d_a: usize,
    d_b: usize,
}

impl GradientWorkspace {
    pub(crate) fn new(rho: ComplexMatrix, d_a: usize, d_b: usize) -> Self {
        Self { rho, d_a, d_b }
    }

    pub(crate) fn evaluate(&mut self, basis: &GeneratorBasis, h: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (d_a, d_b) = (self.d_a, self.d_b);
        let n = d_a * d_b;
        let cfg = NumericConfig::DEFAULT;
        let eig = eig_hermitian_with(&basis.combine(h)?, &cfg)?;
        let v = &eig.vectors;
        let vh = v.adjoint();
        let phases: Vec<Complex64> = eig.values.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();

        // ρ̃ = V†ρV, σ = V e^{iΛ} ρ̃ e^{−iΛ} V†
        let rho_t = vh.matmul(&self.rho).matmul(v);
        let inner = ComplexMatrix::from_fn(n, n, |j, k| phases[j] * rho_t[(j, k)] * phases[k].conj());
        let sigma = v.matmul(&inner).matmul(&vh).hermitize();

        let (ea, eb) = marginal_entropies(&sigma, d_a, d_b)?;
        let value = entropy_of_spectrum(&ea.values, &cfg) - entropy_of_spectrum(&eb.values, &cfg);
        let log_a = ea.map_values(|x| Complex64::new(math::log2(x.max(LOG_FLOOR)), 0.0));
        let log_b = eb.map_values(|x| Complex64::new(math::log2(x.max(LOG_FLOOR)), 0.0));

        // K̃ = V† K V, with K V built from the tensor structure of K
        let mut kv = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            for a in 0..d_a {
                for b in 0..d_b {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a2 in 0..d_a {
                        acc -= log_a[(a, a2)] * v[(a2 * d_b + b, col)];
                    }
                    for b2 in 0..d_b {
                        acc += log_b[(b, b2)] * v[(a * d_b + b2, col)];
                    }
                    kv[(a * d_b + b, col)] = acc;
                }
            }
        }
        let k_t = vh.matmul(&kv);

        // Γ̃ = ρ̃ e^{−iΛ} K̃, then M̃_kj = Γ̃_kj Φ_jk
        let rho_phase = ComplexMatrix::from_fn(n, n, |j, k| rho_t[(j, k)] * phases[k].conj());
        let gamma_t = rho_phase.matmul(&k_t);
        let m_t = ComplexMatrix::from_fn(n, n, |k, j| {
            let (lj, lk) = (eig.values[j], eig.values[k]);
            let phi = Complex64::from_polar(1.0, 0.5 * (lj + lk)) * sinc(0.5 * (lj - lk));
            gamma_t[(k, j)] * phi
        });
        let m = v.matmul(&m_t).matmul(&vh);
        let grad = basis.generators().iter().map(|g| -2.0 * g.trace_product(&m).im).collect();
        Ok((value, grad))
    }
}
