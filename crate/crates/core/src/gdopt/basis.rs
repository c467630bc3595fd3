use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::qlinalg::ComplexMatrix;

/// Hermitian matrix stored as its nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if z != Complex64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        Self { dim: m.rows(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for &(i, j, z) in &self.entries {
            m[(i, j)] = z;
        }
        m
    }

    /// `Tr(G · M)`.
    pub fn trace_product(&self, m: &ComplexMatrix) -> Complex64 {
        self.entries.iter().map(|&(i, j, z)| z * m[(j, i)]).sum()
    }

    /// `acc += c · G`.
    pub fn add_scaled_to(&self, c: f64, acc: &mut ComplexMatrix) {
        for &(i, j, z) in &self.entries {
            acc[(i, j)] += z * c;
        }
    }
}

/// Generalized Gell-Mann matrices of `su(d)` in the usual order: for each
/// `k = 1..d`, the symmetric and antisymmetric pairs `(j, k)` with `j < k`,
/// then the diagonal matrix with `k` leading ones.
///
/// For `d = 2` these are the Pauli matrices `X, Y, Z`; for `d = 3` the eight
/// standard Gell-Mann matrices.
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for k in 1..d {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(1.0, 0.0);
            sym[(k, j)] = Complex64::new(1.0, 0.0);
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = Complex64::new(0.0, -1.0);
            anti[(k, j)] = Complex64::new(0.0, 1.0);
            out.push(anti);
        }
        let scale = math::sqrt(2.0 / (k * (k + 1)) as f64);
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(k) {
            *x = scale;
        }
        diag[k] = -(k as f64) * scale;
        out.push(ComplexMatrix::from_real_diag(&diag));
    }
    out
}

/// Generators `λ_m ⊗ λ_n` of bipartite unitaries, `(m, n) ≠ (0, 0)`, with
/// `λ_0 = I` and `λ_{1..}` the Gell-Mann matrices of each factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    d_a: usize,
    d_b: usize,
    gens: Vec<SparseHermitian>,
    labels: Vec<(usize, usize)>,
}

impl GeneratorBasis {
    /// Full product basis: `(d_A d_B)² − 1` traceless generators.
    pub fn gell_mann_product(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::InvalidInput("subsystem dimensions must be at least 2".into()));
        }
        let with_identity = |d: usize| {
            let mut v = vec![ComplexMatrix::identity(d)];
            v.extend(gell_mann(d));
            v
        };
        let la = with_identity(d_a);
        let lb = with_identity(d_b);
        let mut gens = Vec::with_capacity(la.len() * lb.len() - 1);
        let mut labels = Vec::with_capacity(gens.capacity());
        for (m, a) in la.iter().enumerate() {
            for (n, b) in lb.iter().enumerate() {
                if (m, n) != (0, 0) {
                    gens.push(SparseHermitian::from_dense(&crate::qlinalg::kron(a, b)));
                    labels.push((m, n));
                }
            }
        }
        Ok(Self { d_a, d_b, gens, labels })
    }

    /// `σ_m ⊗ σ_n` for two qubits, with `σ_0 = I, σ_1 = X, σ_2 = Y, σ_3 = Z`.
    pub fn pauli_product() -> Self {
        Self::gell_mann_product(2, 2).expect("qubit dimensions are valid")
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Dimension `d_A d_B` of the matrices.
    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[SparseHermitian] {
        &self.gens
    }

    /// `(m, n)` of each generator `λ_m ⊗ λ_n`.
    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// Position of `λ_m ⊗ λ_n`.
    pub fn index_of(&self, m: usize, n: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == (m, n))
    }

    /// `Σ_a h_a G_a`.
    pub fn combine(&self, h: &[f64]) -> Result<ComplexMatrix> {
        if h.len() != self.gens.len() {
            return Err(Error::LengthMismatch { expected: self.gens.len(), found: h.len() });
        }
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for (g, &c) in self.gens.iter().zip(h) {
            if c != 0.0 {
                g.add_scaled_to(c, &mut acc);
            }
        }
        Ok(acc)
    }
}
