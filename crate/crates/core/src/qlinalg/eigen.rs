//! Hermitian eigendecomposition.
//!
//! [`eig_hermitian`] reduces to a real symmetric tridiagonal matrix with
//! complex Householder reflections and a diagonal phase change, then runs
//! implicit-shift QL with eigenvector accumulation. [`eig_hermitian_jacobi`]
//! is an independent cyclic Jacobi solver used as a cross-check; it is slower
//! but needs no reduction step.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::numeric::NumericConfig;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues in descending order; column `j` of `vectors` belongs to `values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn map_values(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * f(self.values[j]));
        scaled.matmul(&self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|v| Complex64::new(v, 0.0))
    }
}

fn check_hermitian(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let deviation = a.hermitian_deviation();
    if deviation > cfg.hermitian_tol * a.frobenius_norm().max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with default tolerances.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with(a, &NumericConfig::DEFAULT)
}

pub fn eig_hermitian_with(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<HermitianEigen> {
    check_hermitian(a, cfg)?;
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: ComplexMatrix::zeros(0, 0) });
    }
    let a = a.hermitize();
    let (diag, offdiag, basis) = tridiagonalize(&a);
    let mut d = diag;
    let mut e = offdiag;
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, &mut z, n)?;

    // vectors = basis · z, with basis complex and z real
    let mut vectors = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let b = basis[(i, k)];
            if b == ZERO {
                continue;
            }
            for j in 0..n {
                vectors[(i, j)] += b * z[k * n + j];
            }
        }
    }
    Ok(sorted_descending(d, vectors))
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian_jacobi(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let cfg = NumericConfig::DEFAULT;
    check_hermitian(a, &cfg)?;
    let n = a.rows();
    let mut m = a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if math::sqrt(off) <= 1e-15 * scale {
            let values = (0..n).map(|i| m[(i, i)].re).collect();
            return Ok(sorted_descending(values, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = apq / g;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::hypot(theta, 1.0))
                } else {
                    -1.0 / (-theta + math::hypot(theta, 1.0))
                };
                let c = 1.0 / math::hypot(t, 1.0);
                let s = t * c;
                // J = [[c, s·e^{iφ}], [-s·e^{-iφ}, c]] on (p, q); A ← J† A J
                let jpp = Complex64::new(c, 0.0);
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                let jqq = Complex64::new(c, 0.0);
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * jpp + akq * jqp;
                    m[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    m[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    Err(Error::NoConvergence)
}

fn sorted_descending(values: Vec<f64>, vectors: ComplexMatrix) -> HermitianEigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    HermitianEigen { values: sorted_values, vectors: sorted_vectors }
}

/// Reduces Hermitian `a` to real symmetric tridiagonal form.
///
/// Returns `(d, e, B)` with `a = B · T · B†`, `T` having diagonal `d` and
/// sub/super-diagonal `e[0..n-1]` (`e[n-1] = 0`).
fn tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>, ComplexMatrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut q = ComplexMatrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let xnorm = math::sqrt(x.iter().map(|z| z.norm_sqr()).sum());
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail <= f64::MIN_POSITIVE || xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let len = v.len();
        let off = k + 1;

        // p = A_sub v, w = p − (v†p) v, A_sub ← A_sub − 2 v w† − 2 w v†
        let mut p = vec![ZERO; len];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, &vj) in v.iter().enumerate() {
                acc += m[(off + i, off + j)] * vj;
            }
            *pi = acc;
        }
        let kappa: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kappa * vi).collect();
        for i in 0..len {
            for j in 0..len {
                m[(off + i, off + j)] -= (v[i] * w[j].conj() + w[i] * v[j].conj()) * 2.0;
            }
        }
        // column k below the diagonal becomes (alpha, 0, ...)
        m[(off, k)] = alpha;
        m[(k, off)] = alpha.conj();
        for i in 1..len {
            m[(off + i, k)] = ZERO;
            m[(k, off + i)] = ZERO;
        }
        // Q ← Q · H with H = I − 2 v v† acting on indices off..n
        for r in 0..n {
            let mut dot = ZERO;
            for (j, &vj) in v.iter().enumerate() {
                dot += q[(r, off + j)] * vj;
            }
            for (j, &vj) in v.iter().enumerate() {
                q[(r, off + j)] -= dot * vj.conj() * 2.0;
            }
        }
    }

    let d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    // phases φ with φ_{i+1} = φ_i · e_i/|e_i| turn the sub-diagonal real
    let mut phi = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let sub = m[(i + 1, i)];
        let mag = sub.norm();
        e[i] = mag;
        phi[i + 1] = if mag > 0.0 { phi[i] * sub / mag } else { phi[i] };
    }
    for r in 0..n {
        for (c, &ph) in phi.iter().enumerate() {
            q[(r, c)] *= ph;
        }
    }
    (d, e, q)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, accumulating
/// rotations into the row-major `z`.
fn tql(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[k * n + i + 1];
                    let zk = z[k * n + i];
                    z[k * n + i + 1] = s * zk + c * zk1;
                    z[k * n + i] = c * zk - s * zk1;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
