use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::basis::GeneratorBasis;
use super::objective::{build_unitary, delta_s_of_matrix, ParamVector};
use crate::error::{Error, Result};
use crate::math;
use crate::numeric::NumericConfig;
use crate::qlinalg::{eig_hermitian_with, ComplexMatrix};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMaxConfig {
    /// Central-difference step for first derivatives.
    pub grad_step: f64,
    /// Step for second differences.
    pub hess_step: f64,
    pub tol_grad: f64,
    pub tol_hess: f64,
}

impl Default for LocalMaxConfig {
    fn default() -> Self {
        Self { grad_step: 1e-5, hess_step: 1e-4, tol_grad: 1e-4, tol_hess: 1e-4 }
    }
}

/// Finite-difference derivatives of `h ↦ ΔS(W(h) u ρ u† W(h)†)` at `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub gradient: Vec<f64>,
    /// `‖∇ΔS‖_∞`.
    pub grad_norm: f64,
    pub hessian_diag: Vec<f64>,
    pub hessian_offdiag_max: f64,
    pub hessian_max_eigenvalue: f64,
    /// Gradient below `tol_grad`, every diagonal entry below `tol_hess`, and
    /// no Hessian eigenvalue above `tol_hess`.
    pub is_local_max: bool,
}

pub fn verify_local_max(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    u_candidate: &ComplexMatrix,
) -> Result<StationarityReport> {
    verify_local_max_with(rho_ab, d_a, d_b, basis, u_candidate, &LocalMaxConfig::default())
}

pub fn verify_local_max_with(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    u_candidate: &ComplexMatrix,
    cfg: &LocalMaxConfig,
) -> Result<StationarityReport> {
    let n = d_a * d_b;
    if rho_ab.dim() != n || basis.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho_ab.dim() });
    }
    if u_candidate.rows() != n || u_candidate.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u_candidate.rows() });
    }
    let deviation = u_candidate.unitary_deviation();
    if deviation > NumericConfig::DEFAULT.unitary_tol {
        return Err(Error::NotUnitary { deviation });
    }
    let sigma = rho_ab.matrix().conjugate_by(u_candidate);
    let k = basis.len();
    let f = |h: &[f64]| -> Result<f64> {
        let w = build_unitary(basis, &ParamVector::new(h.to_vec())?)?;
        delta_s_of_matrix(&sigma.conjugate_by(&w), d_a, d_b)
    };
    let mut h = vec![0.0; k];
    let f0 = f(&h)?;

    let (gs, hs) = (cfg.grad_step, cfg.hess_step);
    let mut gradient = Vec::with_capacity(k);
    let mut diag = Vec::with_capacity(k);
    for a in 0..k {
        h[a] = gs;
        let gp = f(&h)?;
        h[a] = -gs;
        let gm = f(&h)?;
        h[a] = hs;
        let hp = f(&h)?;
        h[a] = -hs;
        let hm = f(&h)?;
        h[a] = 0.0;
        gradient.push((gp - gm) / (2.0 * gs));
        diag.push((hp - 2.0 * f0 + hm) / (hs * hs));
    }

    let mut hessian = vec![vec![0.0; k]; k];
    let mut offdiag_max: f64 = 0.0;
    for a in 0..k {
        hessian[a][a] = diag[a];
        for b in a + 1..k {
            let mut eval = |sa: f64, sb: f64| -> Result<f64> {
                h[a] = sa * hs;
                h[b] = sb * hs;
                let v = f(&h);
                h[a] = 0.0;
                h[b] = 0.0;
                v
            };
            let v = (eval(1.0, 1.0)? - eval(1.0, -1.0)? - eval(-1.0, 1.0)? + eval(-1.0, -1.0)?) / (4.0 * hs * hs);
            hessian[a][b] = v;
            hessian[b][a] = v;
            offdiag_max = offdiag_max.max(v.abs());
        }
    }
    let hm = ComplexMatrix::from_fn(k, k, |i, j| Complex64::new(hessian[i][j], 0.0));
    let max_eig = eig_hermitian_with(&hm, &NumericConfig::DEFAULT)?.values[0];

    let grad_norm = gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let is_local_max =
        grad_norm <= cfg.tol_grad && diag.iter().all(|&x| x <= cfg.tol_hess) && max_eig <= cfg.tol_hess;
    Ok(StationarityReport {
        gradient,
        grad_norm,
        hessian_diag: diag,
        hessian_offdiag_max: offdiag_max,
        hessian_max_eigenvalue: max_eig,
        is_local_max,
    })
}

/// Groups of qubit-pair generators `σ_m ⊗ σ_n` sharing a closed-form second
/// derivative at the optimal permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D2Family {
    /// `(1,1), (1,2), (2,1), (2,2)`.
    H11,
    /// `(1,3), (2,3)`.
    H13,
    /// `(3,1), (3,2)`.
    H31,
    /// Local generators `(0,n), (m,0)` and `(3,3)`: no effect on the marginals.
    Zero,
}

impl D2Family {
    pub const ALL: [D2Family; 4] = [D2Family::H11, D2Family::H13, D2Family::H31, D2Family::Zero];

    pub fn of_label(m: usize, n: usize) -> Self {
        match (m, n) {
            (1 | 2, 1 | 2) => D2Family::H11,
            (1 | 2, 3) => D2Family::H13,
            (3, 1 | 2) => D2Family::H31,
            _ => D2Family::Zero,
        }
    }
}

/// `c · ln(r)`, taken as 0 when `c = 0`.
fn coef_ln(c: f64, r: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * math::ln(r)
    }
}

/// `ln((t − x)/(t + x)) / x`, continued to `−2/t` at `x = 0`.
fn log_ratio_over(t: f64, x: f64) -> f64 {
    if x.abs() < 1e-9 * t.max(f64::MIN_POSITIVE) {
        -2.0 / t
    } else {
        math::ln((t - x) / (t + x)) / x
    }
}

fn check_distribution(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::InvalidSpectrum(format!("expected {len} entries, got {}", p.len())));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidSpectrum("entries must be finite and nonnegative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum(format!("entries sum to {total}")));
    }
    Ok(())
}

/// `∂²ΔS/∂h²` along a qubit-pair generator family at `U_{s₅} D`, where the
/// permuted state is `diag(p₁, p₄, p₂, p₃)`.
///
/// `probs` must be descending and sum to one.
pub fn second_derivative_closed_form_d2(probs: &[f64], which: D2Family) -> Result<f64> {
    check_distribution(probs, 4)?;
    if probs.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidSpectrum("entries must be in descending order".into()));
    }
    let (p1, p2, p3, p4) = (probs[0], probs[1], probs[2], probs[3]);
    let ln2 = core::f64::consts::LN_2;
    let value = match which {
        D2Family::H11 => {
            (2.0 / ln2)
                * (coef_ln(p1 + p2 - p3 - p4, (p3 + p4) / (p1 + p2))
                    + coef_ln(p1 + p4 - p2 - p3, (p1 + p4) / (p2 + p3)))
        }
        D2Family::H13 => {
            let c = 8.0 * (p1 - p2) * (p3 - p4);
            let x = (-1.0 + 2.0 * p2 + 2.0 * p3).abs();
            if c == 0.0 { 0.0 } else { c * log_ratio_over(1.0, x) / ln2 }
        }
        D2Family::H31 => {
            let c = 8.0 * (p2 - p3) * (p1 - p4);
            let y = (-1.0 + 2.0 * p1 + 2.0 * p2).abs();
            if c == 0.0 { 0.0 } else { c * log_ratio_over(1.0, y) / ln2 }
        }
        D2Family::Zero => 0.0,
    };
    Ok(value)
}

/// The three qutrit-pair second-derivative shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D3Form {
    Form1,
    Form2,
    Form3,
}

impl D3Form {
    pub const ALL: [D3Form; 3] = [D3Form::Form1, D3Form::Form2, D3Form::Form3];

    /// Generator `λ_m ⊗ λ_n` whose second derivative the form evaluates.
    pub fn generator_label(self) -> (usize, usize) {
        match self {
            D3Form::Form1 => (1, 2),
            D3Form::Form2 => (1, 3),
            D3Form::Form3 => (1, 8),
        }
    }
}

/// `∂²ΔS/∂h²` along `λ_1⊗λ_2`, `λ_1⊗λ_3` or `λ_1⊗λ_8` at a diagonal qutrit-pair
/// state with lattice entries `s = (s₁, …, s₉)` (row-major `m·3 + n`).
pub fn second_derivative_closed_form_d3(s: &[f64], which: D3Form) -> Result<f64> {
    check_distribution(s, 9)?;
    let (s1, s2, s3, s4, s5, s6, s7, s8) = (s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7]);
    let ln2 = core::f64::consts::LN_2;
    let t = s1 + s2 + s3 + s4 + s5 + s6;
    let x = (s1 + s2 + s3 - s4 - s5 - s6).abs();
    let value = match which {
        D3Form::Form1 => {
            (2.0 / ln2)
                * (coef_ln(s1 + s2 - s4 - s5, (s1 + s2 + s3) / (s4 + s5 + s6))
                    + coef_ln(-s1 + s2 - s4 + s5, (s1 + s4 + s7) / (s2 + s5 + s8)))
        }
        D3Form::Form2 => {
            let part1 = 4.0 * (s1 - s4) * (s2 - s5) + (s6 - s3) * (s4 + s5) + (s1 + s2) * (s3 - s6);
            if part1 == 0.0 || t == 0.0 {
                0.0
            } else {
                part1 * (-2.0 / ln2) * log_ratio_over(t, x)
            }
        }
        D3Form::Form3 => {
            let part1 = (s1 + s2 - s4 - s5) * (s3 - s6);
            if part1 == 0.0 || t == 0.0 {
                0.0
            } else {
                part1 * (-6.0 / ln2) * log_ratio_over(t, x)
            }
        }
    };
    Ok(value)
}
