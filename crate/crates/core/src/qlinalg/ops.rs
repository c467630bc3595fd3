use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{eig_hermitian_with, ComplexMatrix};
use crate::error::{Error, Result};
use crate::math;
use crate::numeric::NumericConfig;

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Partial trace of a `d1·d2`-dimensional operator over the factor not kept.
pub fn partial_trace(rho: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    let n = d1 * d2;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho.rows().max(rho.cols()) });
    }
    let out = match keep {
        Keep::First => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| rho[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|i| rho[(i * d2 + k, i * d2 + l)]).sum()
        }),
    };
    Ok(out)
}

/// `exp(iH)` for Hermitian `H`, computed through its eigendecomposition.
pub fn expm_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    expm_i_hermitian_with(h, &NumericConfig::DEFAULT)
}

pub fn expm_i_hermitian_with(h: &ComplexMatrix, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    let eig = eig_hermitian_with(h, cfg)?;
    Ok(eig.map_values(|x| Complex64::from_polar(1.0, x)))
}

/// Haar-random unitary of size `n`: Gram–Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for u in &cols {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm < 1e-8 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}
