//! Tripartite pure states, entropies and the mutual-information bookkeeping.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;
use crate::numeric::NumericConfig;
use crate::qlinalg::{eig_hermitian_with, partial_trace, ComplexMatrix, Keep};

/// Subsystem dimensions `(d_A, d_B, d_C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Dims {
    pub const fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }

    /// `d_A · d_B`.
    pub const fn ab(&self) -> usize {
        self.a * self.b
    }

    pub const fn total(&self) -> usize {
        self.a * self.b * self.c
    }
}

/// `|ψ⟩_ABC` with amplitudes indexed as `(a·d_B + b)·d_C + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartitePureState {
    dims: Dims,
    amps: Vec<Complex64>,
}

impl TripartitePureState {
    /// Wraps normalized amplitudes.
    pub fn new(dims: Dims, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_dims(dims, amps.len())?;
        let norm = norm(&amps);
        if (norm - 1.0).abs() > NumericConfig::DEFAULT.norm_tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(dims: Dims, mut amps: Vec<Complex64>) -> Result<Self> {
        Self::check_dims(dims, amps.len())?;
        let n = norm(&amps);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        for z in amps.iter_mut() {
            *z /= n;
        }
        Ok(Self { dims, amps })
    }

    /// Computational basis state `|a b c⟩`.
    pub fn basis(dims: Dims, a: usize, b: usize, c: usize) -> Result<Self> {
        if a >= dims.a || b >= dims.b || c >= dims.c {
            return Err(Error::InvalidInput(format!("basis index ({a},{b},{c}) out of range")));
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); dims.total()];
        amps[(a * dims.b + b) * dims.c + c] = Complex64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    fn check_dims(dims: Dims, len: usize) -> Result<()> {
        if dims.a == 0 || dims.b == 0 || dims.c == 0 {
            return Err(Error::InvalidInput("subsystem dimensions must be positive".into()));
        }
        if len != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: len });
        }
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitudes as a `d_A d_B × d_C` matrix.
    pub fn as_ab_c_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dims.ab(), self.dims.c, |r, c| self.amps[r * self.dims.c + c])
    }
}

fn norm(amps: &[Complex64]) -> f64 {
    math::sqrt(amps.iter().map(|z| z.norm_sqr()).sum())
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::new_with(mat, &NumericConfig::DEFAULT)
    }

    pub fn new_with(mat: ComplexMatrix, cfg: &NumericConfig) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NonSquare { rows: mat.rows(), cols: mat.cols() });
        }
        let tol = cfg.density_tol;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let dev = mat.hermitian_deviation();
        if dev > tol * mat.frobenius_norm().max(1.0) {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let eig = eig_hermitian_with(&mat, cfg)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// Trusted constructor for matrices that are density matrices by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat: mat.hermitize() }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = norm(psi);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(psi, psi)))
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidDensity("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("probabilities sum to {total}")));
        }
        Ok(Self::from_trusted(ComplexMatrix::from_real_diag(probs)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        Ok(Self::from_trusted(self.mat.conjugate_by(u)))
    }

    /// Reduced state of a `d1 × d2` bipartite density matrix.
    pub fn reduce(&self, dims: (usize, usize), keep: Keep) -> Result<Self> {
        Ok(Self::from_trusted(partial_trace(&self.mat, dims, keep)?))
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian_with(&self.mat, &NumericConfig::DEFAULT)?.values)
    }
}

/// Shannon entropy in bits; nonpositive entries contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| math::xlog2x_neg(p)).sum::<f64>().max(0.0)
}

/// Entropy in bits of an eigenvalue list, skipping eigenvalues `≤ zero_eigenvalue`.
pub fn entropy_of_spectrum(values: &[f64], cfg: &NumericConfig) -> f64 {
    values
        .iter()
        .filter(|&&x| x > cfg.zero_eigenvalue)
        .map(|&x| math::xlog2x_neg(x))
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    von_neumann_entropy_with(rho, &NumericConfig::DEFAULT)
}

pub fn von_neumann_entropy_with(rho: &DensityMatrix, cfg: &NumericConfig) -> Result<f64> {
    let values = eig_hermitian_with(rho.matrix(), cfg)?.values;
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > cfg.density_tol {
        return Err(Error::InvalidDensity(format!("trace {total}")));
    }
    if let Some(&min) = values.last() {
        if min < -cfg.density_tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
    }
    Ok(entropy_of_spectrum(&values, cfg))
}

/// Reductions of `|ψ⟩_ABC`.
#[derive(Debug, Clone)]
pub struct ReducedStates {
    pub a: DensityMatrix,
    pub b: DensityMatrix,
    pub c: DensityMatrix,
    pub ab: DensityMatrix,
}

/// `ρ_AB = Tr_C |ψ⟩⟨ψ|`, computed as `Ψ Ψ†` with `Ψ` the `AB × C` amplitude matrix.
pub fn rho_ab(psi: &TripartitePureState) -> DensityMatrix {
    let m = psi.as_ab_c_matrix();
    DensityMatrix::from_trusted(m.matmul(&m.adjoint()))
}

/// `ρ_C = Tr_AB |ψ⟩⟨ψ|`, i.e. `Ψᵀ Ψ*`.
pub fn rho_c(psi: &TripartitePureState) -> DensityMatrix {
    let m = psi.as_ab_c_matrix();
    let dc = psi.dims().c;
    let nab = psi.dims().ab();
    let mat = ComplexMatrix::from_fn(dc, dc, |c1, c2| {
        (0..nab).map(|r| m[(r, c1)] * m[(r, c2)].conj()).sum()
    });
    DensityMatrix::from_trusted(mat)
}

pub fn reduced_states(psi: &TripartitePureState) -> Result<ReducedStates> {
    let dims = psi.dims();
    let ab = rho_ab(psi);
    let a = ab.reduce((dims.a, dims.b), Keep::First)?;
    let b = ab.reduce((dims.a, dims.b), Keep::Second)?;
    let c = rho_c(psi);
    Ok(ReducedStates { a, b, c, ab })
}

/// Entropies and mutual informations of a tripartite pure state, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInfoReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_c: f64,
    pub s_ab: f64,
    /// `I(A:C) = S_C + S_A − S_B`.
    pub i_ac: f64,
    /// `I(B:C) = S_C + S_B − S_A`.
    pub i_bc: f64,
    /// `I(AB:C) = S_AB + S_C` (the joint state is pure).
    pub i_ab_c: f64,
    /// `S_A − S_B`.
    pub delta_s: f64,
    pub rank_c: usize,
}

pub fn mutual_info_report(psi: &TripartitePureState) -> Result<MutualInfoReport> {
    mutual_info_report_with(psi, &NumericConfig::DEFAULT)
}

pub fn mutual_info_report_with(psi: &TripartitePureState, cfg: &NumericConfig) -> Result<MutualInfoReport> {
    let r = reduced_states(psi)?;
    let s_a = von_neumann_entropy_with(&r.a, cfg)?;
    let s_b = von_neumann_entropy_with(&r.b, cfg)?;
    let s_ab = von_neumann_entropy_with(&r.ab, cfg)?;
    let spec_c = r.c.spectrum()?;
    let s_c = entropy_of_spectrum(&spec_c, cfg);
    let rank_c = spec_c.iter().filter(|&&x| x > cfg.rank_eps).count();
    Ok(MutualInfoReport {
        s_a,
        s_b,
        s_c,
        s_ab,
        i_ac: s_c + s_a - s_b,
        i_bc: s_c + s_b - s_a,
        i_ab_c: s_ab + s_c,
        delta_s: s_a - s_b,
        rank_c,
    })
}

/// `(U ⊗ I_C)|ψ⟩`; the result is renormalized to absorb rounding in `U`.
pub fn apply_bipartite_unitary(psi: &TripartitePureState, u: &ComplexMatrix) -> Result<TripartitePureState> {
    let dims = psi.dims();
    let nab = dims.ab();
    if u.rows() != nab || u.cols() != nab {
        return Err(Error::DimensionMismatch { expected: nab, found: u.rows().max(u.cols()) });
    }
    let deviation = u.unitary_deviation();
    if deviation > NumericConfig::DEFAULT.unitary_tol {
        return Err(Error::NotUnitary { deviation });
    }
    let out = u.matmul(&psi.as_ab_c_matrix());
    TripartitePureState::from_unnormalized(dims, out.into_vec())
}

/// Unitary on `AB` reaching `ΔS = S(ρ_C)` when `rank(ρ_C) ≤ d_A`.
///
/// Writes `|ψ⟩ = Σ_n √q_n |χ_n⟩|n⟩` (Schmidt form across `AB|C`) and maps each
/// `|χ_n⟩` to `|n⟩_A ⊗ |0⟩_B`; the remaining directions are completed by
/// Gram–Schmidt over the computational basis.
pub fn theorem1_optimal_unitary(psi: &TripartitePureState) -> Result<(ComplexMatrix, MutualInfoReport)> {
    let cfg = NumericConfig::DEFAULT;
    let dims = psi.dims();
    let nab = dims.ab();
    let eig_c = eig_hermitian_with(rho_c(psi).matrix(), &cfg)?;
    let rank = eig_c.values.iter().filter(|&&x| x > cfg.rank_eps).count();
    if rank > dims.a {
        return Err(Error::RankTooLarge { rank, d_a: dims.a });
    }

    let m = psi.as_ab_c_matrix();
    // χ_n = Ψ · conj(e_n) / √q_n
    let mut sources: Vec<Vec<Complex64>> = Vec::with_capacity(nab);
    for n in 0..rank {
        let q = eig_c.values[n];
        let e = eig_c.vectors.column(n);
        let chi: Vec<Complex64> = (0..nab)
            .map(|r| (0..dims.c).map(|c| m[(r, c)] * e[c].conj()).sum::<Complex64>() / math::sqrt(q))
            .collect();
        sources.push(chi);
    }
    // re-orthonormalize the Schmidt vectors against rounding
    orthonormalize_in_place(&mut sources);
    complete_basis(&mut sources, nab);

    // targets: |n,0⟩ for n < rank, then the remaining computational states in order
    let mut targets: Vec<usize> = (0..rank).map(|n| n * dims.b).collect();
    targets.extend((0..nab).filter(|i| !(i % dims.b == 0 && i / dims.b < rank)));

    let mut u = ComplexMatrix::zeros(nab, nab);
    for (src, &t) in sources.iter().zip(&targets) {
        for (col, z) in src.iter().enumerate() {
            u[(t, col)] = z.conj();
        }
    }
    let out = apply_bipartite_unitary(psi, &u)?;
    let report = mutual_info_report_with(&out, &cfg)?;
    Ok((u, report))
}

fn orthonormalize_in_place(vecs: &mut [Vec<Complex64>]) {
    for i in 0..vecs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let dot: Complex64 = vecs[j].iter().zip(&vecs[i]).map(|(a, b)| a.conj() * b).sum();
                let (head, tail) = vecs.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= dot * y;
                }
            }
        }
        let n = norm(&vecs[i]);
        for z in vecs[i].iter_mut() {
            *z /= n;
        }
    }
}

/// Extends an orthonormal set to a basis of `C^n` using canonical vectors.
fn complete_basis(vecs: &mut Vec<Vec<Complex64>>, n: usize) {
    for k in 0..n {
        if vecs.len() == n {
            break;
        }
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in vecs.iter() {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            for z in v.iter_mut() {
                *z /= nv;
            }
            vecs.push(v);
        }
    }
}

/// `(2S(ρ_C) − I_max, I_max)`: the attainable range of `I(A:C)` when `d_A = d_B`.
pub fn mutual_info_range(psi: &TripartitePureState, i_max: f64) -> Result<(f64, f64)> {
    let dims = psi.dims();
    if dims.a != dims.b {
        return Err(Error::AsymmetricDims { d_a: dims.a, d_b: dims.b });
    }
    let s_c = von_neumann_entropy(&rho_c(psi))?;
    Ok((2.0 * s_c - i_max, i_max))
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes, normalized.
pub fn random_pure_state(dims: Dims, seed: u64) -> Result<TripartitePureState> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    random_pure_state_with(dims, &mut rng)
}

pub fn random_pure_state_with<R: Rng + ?Sized>(dims: Dims, rng: &mut R) -> Result<TripartitePureState> {
    let amps = (0..dims.total())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    TripartitePureState::from_unnormalized(dims, amps)
}

/// Random pure state whose `ρ_C` has rank at most `rank_c` (exactly `rank_c`
/// with probability one when `rank_c ≤ min(d_A d_B, d_C)`).
///
/// The `AB × C` amplitude matrix is a product of Gaussian `AB × r` and `r × C`
/// factors.
pub fn random_pure_state_with_rank(dims: Dims, rank_c: usize, seed: u64) -> Result<TripartitePureState> {
    if rank_c == 0 || rank_c > dims.c || rank_c > dims.ab() {
        return Err(Error::InvalidInput(format!(
            "rank {rank_c} not attainable with d_AB = {}, d_C = {}",
            dims.ab(),
            dims.c
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut gauss = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let left = ComplexMatrix::from_fn(dims.ab(), rank_c, |_, _| gauss());
    let right = ComplexMatrix::from_fn(rank_c, dims.c, |_, _| gauss());
    TripartitePureState::from_unnormalized(dims, left.matmul(&right).into_vec())
}
