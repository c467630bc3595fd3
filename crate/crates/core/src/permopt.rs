//! Disentangle-then-permute optimization of `S(ρ_A) − S(ρ_B)`.
//!
//! `ρ_AB` is first rotated into its eigenbasis (`D`), then the eigenvalues are
//! rearranged on the `d_A × d_B` lattice by a basis permutation `U_s`. The
//! entropies of the row and column sums are the resulting `S(ρ_A)` and `S(ρ_B)`.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::npp::{rgnp_indices, PartitionInput};
use crate::numeric::NumericConfig;
use crate::qlinalg::{eig_hermitian_with, ComplexMatrix};
use crate::states::{shannon_entropy, DensityMatrix};

/// Largest `d_A · d_B` for which [`exhaustive_search`] enumerates assignments.
pub const EXHAUSTIVE_MAX_CELLS: usize = 9;

/// Eigenvalues of `ρ_AB` in descending order with their eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    d_a: usize,
    d_b: usize,
    probs: Vec<f64>,
    eigvecs: ComplexMatrix,
}

impl Spectrum {
    pub fn new(d_a: usize, d_b: usize, probs: Vec<f64>, eigvecs: ComplexMatrix) -> Result<Self> {
        let n = d_a * d_b;
        if probs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: probs.len() });
        }
        if eigvecs.rows() != n || eigvecs.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: eigvecs.rows() });
        }
        check_probs(&probs)?;
        Ok(Self { d_a, d_b, probs, eigvecs })
    }

    /// A spectrum already in the computational basis (`D = I`).
    pub fn from_probs(d_a: usize, d_b: usize, probs: Vec<f64>) -> Result<Self> {
        let n = d_a * d_b;
        Self::new(d_a, d_b, probs, ComplexMatrix::identity(n))
    }

    /// Sorts `probs` descending before wrapping them.
    pub fn from_unsorted_probs(d_a: usize, d_b: usize, mut probs: Vec<f64>) -> Result<Self> {
        probs.sort_by(|a, b| b.total_cmp(a));
        Self::from_probs(d_a, d_b, probs)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn eigvecs(&self) -> &ComplexMatrix {
        &self.eigvecs
    }

    /// Disentangling unitary `D = V†`.
    pub fn disentangler(&self) -> ComplexMatrix {
        self.eigvecs.adjoint()
    }

    /// `S(ρ_AB)` in bits.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.probs)
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidSpectrum("entries must be finite and nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum(format!("entries sum to {total}")));
    }
    if probs.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidSpectrum("entries must be in descending order".into()));
    }
    Ok(())
}

/// Flat-Dirichlet random spectrum, sorted descending.
pub fn random_spectrum(d_a: usize, d_b: usize, seed: u64) -> Spectrum {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    random_spectrum_with(d_a, d_b, &mut rng)
}

pub fn random_spectrum_with<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> Spectrum {
    let raw: Vec<f64> = (0..d_a * d_b).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    Spectrum::from_unsorted_probs(d_a, d_b, raw.into_iter().map(|x| x / total).collect())
        .expect("normalized exponential samples form a valid spectrum")
}

/// Bijection from eigenvalue index to lattice cell `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeAssignment {
    d_a: usize,
    d_b: usize,
    cell_of: Vec<(usize, usize)>,
}

impl LatticeAssignment {
    pub fn new(d_a: usize, d_b: usize, cell_of: Vec<(usize, usize)>) -> Result<Self> {
        let n = d_a * d_b;
        if cell_of.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: cell_of.len() });
        }
        let mut seen = alloc::vec![false; n];
        for &(m, k) in &cell_of {
            if m >= d_a || k >= d_b || seen[m * d_b + k] {
                return Err(Error::InvalidInput(format!("cell ({m}, {k}) out of range or repeated")));
            }
            seen[m * d_b + k] = true;
        }
        Ok(Self { d_a, d_b, cell_of })
    }

    /// Eigenvalue `i` goes to cell `(i / d_B, i mod d_B)`.
    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Self { d_a, d_b, cell_of: (0..d_a * d_b).map(|i| (i / d_b, i % d_b)).collect() }
    }

    /// Builds from a table `rows[m][n]` of eigenvalue indices.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let d_a = rows.len();
        let d_b = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d_b) {
            return Err(Error::InvalidInput("rows must have equal length".into()));
        }
        let n = d_a * d_b;
        let mut cell_of = alloc::vec![(usize::MAX, usize::MAX); n];
        for (m, row) in rows.iter().enumerate() {
            for (k, &i) in row.iter().enumerate() {
                if i >= n || cell_of[i].0 != usize::MAX {
                    return Err(Error::InvalidInput(format!("eigenvalue index {i} out of range or repeated")));
                }
                cell_of[i] = (m, k);
            }
        }
        Self::new(d_a, d_b, cell_of)
    }

    /// Inverse of [`cells`](Self::cells): `cell_index → eigenvalue index`.
    fn from_cell_indices(d_a: usize, d_b: usize, cells: &[usize]) -> Self {
        Self { d_a, d_b, cell_of: cells.iter().map(|&c| (c / d_b, c % d_b)).collect() }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn cell_of(&self) -> &[(usize, usize)] {
        &self.cell_of
    }

    /// Flat cell index `m·d_B + n` of each eigenvalue.
    pub fn cells(&self) -> Vec<usize> {
        self.cell_of.iter().map(|&(m, n)| m * self.d_b + n).collect()
    }

    /// Table `rows[m][n]` of eigenvalue indices.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows = alloc::vec![alloc::vec![0; self.d_b]; self.d_a];
        for (i, &(m, n)) in self.cell_of.iter().enumerate() {
            rows[m][n] = i;
        }
        rows
    }

    /// Applies independent row and column relabelings `(m, n) ↦ (r(m), t(n))`.
    pub fn relabel(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != self.d_a || cols.len() != self.d_b {
            return Err(Error::DimensionMismatch { expected: self.d_a, found: rows.len() });
        }
        Self::new(self.d_a, self.d_b, self.cell_of.iter().map(|&(m, n)| (rows[m], cols[n])).collect())
    }

    /// Permutation matrix sending `|i⟩` to `|m n⟩`.
    pub fn permutation_matrix(&self) -> ComplexMatrix {
        let n = self.cell_of.len();
        let mut u = ComplexMatrix::zeros(n, n);
        for (i, c) in self.cells().into_iter().enumerate() {
            u[(c, i)] = num_complex::Complex64::new(1.0, 0.0);
        }
        u
    }
}

/// Marginals, entropies and the composite unitary for one assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PermResult {
    pub assignment: LatticeAssignment,
    pub row_sums: Vec<f64>,
    pub col_sums: Vec<f64>,
    pub s_a: f64,
    pub s_b: f64,
    pub delta_s: f64,
    /// `U_s · D`.
    pub unitary: ComplexMatrix,
}

/// Diagonalizes `ρ_AB`; `D ρ_AB D†` is diagonal with descending entries.
pub fn disentangle(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<(ComplexMatrix, Spectrum)> {
    let n = d_a * d_b;
    if rho_ab.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho_ab.dim() });
    }
    let eig = eig_hermitian_with(rho_ab.matrix(), &NumericConfig::DEFAULT)?;
    // tiny negative eigenvalues are rounding noise
    let mut probs: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    let spec = Spectrum::new(d_a, d_b, probs, eig.vectors)?;
    Ok((spec.disentangler(), spec))
}

fn marginals(probs: &[f64], cells: &[usize], d_a: usize, d_b: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rows = alloc::vec![0.0; d_a];
    let mut cols = alloc::vec![0.0; d_b];
    for (&p, &c) in probs.iter().zip(cells) {
        rows[c / d_b] += p;
        cols[c % d_b] += p;
    }
    (rows, cols)
}

fn delta_s_of_cells(probs: &[f64], cells: &[usize], d_a: usize, d_b: usize) -> f64 {
    let (rows, cols) = marginals(probs, cells, d_a, d_b);
    shannon_entropy(&rows) - shannon_entropy(&cols)
}

/// Evaluates an assignment on a spectrum.
pub fn apply_assignment(spec: &Spectrum, s: &LatticeAssignment) -> Result<PermResult> {
    if spec.d_a != s.d_a || spec.d_b != s.d_b {
        return Err(Error::DimensionMismatch { expected: spec.d_a * spec.d_b, found: s.d_a * s.d_b });
    }
    let (row_sums, col_sums) = marginals(&spec.probs, &s.cells(), spec.d_a, spec.d_b);
    let s_a = shannon_entropy(&row_sums);
    let s_b = shannon_entropy(&col_sums);
    let unitary = s.permutation_matrix().matmul(&spec.disentangler());
    Ok(PermResult { assignment: s.clone(), row_sums, col_sums, s_a, s_b, delta_s: s_a - s_b, unitary })
}

/// GF(2) matrices whose inverses represent the six right cosets of `S₂ ⊗ S₂` in `S₄`.
/// Entry `k` is `s_{k+1}⁻¹`, row-major.
pub const D2_COSET_MATRICES: [[[u8; 2]; 2]; 6] = [
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[1, 0], [1, 1]],
    [[1, 1], [0, 1]],
    [[0, 1], [1, 1]],
    [[1, 1], [1, 0]],
];

/// Qubit-pair assignment for coset representative `s_{k+1}`: cell `(m', n')`
/// holds the eigenvalue with lattice index `s⁻¹(m', n')`.
pub fn d2_coset_assignment(k: usize) -> LatticeAssignment {
    let m = D2_COSET_MATRICES[k];
    let mut cell_of = alloc::vec![(0, 0); 4];
    for mp in 0..2 {
        for np in 0..2 {
            let a = (usize::from(m[0][0]) * mp + usize::from(m[0][1]) * np) % 2;
            let b = (usize::from(m[1][0]) * mp + usize::from(m[1][1]) * np) % 2;
            cell_of[2 * a + b] = (mp, np);
        }
    }
    LatticeAssignment { d_a: 2, d_b: 2, cell_of }
}

/// Exact maximum of `ΔS` over all lattice assignments.
///
/// For `2 × 2` the six coset representatives are scanned. Other shapes up to
/// nine cells enumerate every assignment in lexicographic order of the cell
/// indices; ties keep the first (lexicographically smallest) assignment.
pub fn exhaustive_search(spec: &Spectrum) -> Result<PermResult> {
    let (d_a, d_b) = (spec.d_a, spec.d_b);
    let n = d_a * d_b;
    if n > EXHAUSTIVE_MAX_CELLS {
        return Err(Error::TooLarge { size: n, max: EXHAUSTIVE_MAX_CELLS });
    }
    if d_a == 2 && d_b == 2 {
        let mut best: Option<(f64, LatticeAssignment)> = None;
        for k in 0..6 {
            let s = d2_coset_assignment(k);
            let ds = delta_s_of_cells(&spec.probs, &s.cells(), 2, 2);
            if best.as_ref().is_none_or(|(b, _)| ds > *b + 1e-14) {
                best = Some((ds, s));
            }
        }
        return apply_assignment(spec, &best.expect("six candidates").1);
    }

    let mut cells: Vec<usize> = (0..n).collect();
    let mut best_cells = cells.clone();
    let mut best = delta_s_of_cells(&spec.probs, &cells, d_a, d_b);
    while next_permutation(&mut cells) {
        let ds = delta_s_of_cells(&spec.probs, &cells, d_a, d_b);
        if ds > best + 1e-14 {
            best = ds;
            best_cells.copy_from_slice(&cells);
        }
    }
    apply_assignment(spec, &LatticeAssignment::from_cell_indices(d_a, d_b, &best_cells))
}

/// Advances to the next lexicographic permutation; `false` after the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Qubit-pair optimum: rows `{p₀₀, p₁₁}` and `{p₀₁, p₁₀}`.
pub fn closed_form_d2(spec: &Spectrum) -> Result<PermResult> {
    if spec.d_a != 2 || spec.d_b != 2 {
        return Err(Error::WrongDims { d_a: spec.d_a, d_b: spec.d_b });
    }
    apply_assignment(spec, &d2_coset_assignment(4))
}

/// Heuristic for general dimensions: balance the row sums with recurrent greedy
/// partitioning, then place each row's numbers in descending order across columns.
pub fn rgnp_two_step(spec: &Spectrum) -> Result<PermResult> {
    let input = PartitionInput::balanced(spec.probs.clone(), spec.d_a, spec.d_b)?;
    let rows = rgnp_indices(&input)?.sets;
    apply_assignment(spec, &LatticeAssignment::from_rows(&rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn h2(p: f64) -> f64 {
        shannon_entropy(&[p, 1.0 - p])
    }

    #[test]
    fn s5_layout() {
        let s = d2_coset_assignment(4);
        assert_eq!(s.rows(), vec![vec![0, 3], vec![1, 2]]);
        assert_eq!(d2_coset_assignment(0), LatticeAssignment::identity(2, 2));
    }

    #[test]
    fn cosets_are_distinct() {
        // each coset is fixed by its row pairing and column pairing
        let key = |s: &LatticeAssignment| {
            let rows = s.rows();
            let mut r: Vec<Vec<usize>> = rows.iter().map(|r| {
                let mut r = r.clone();
                r.sort();
                r
            }).collect();
            r.sort();
            let mut c: Vec<Vec<usize>> = (0..2).map(|n| {
                let mut c = vec![rows[0][n], rows[1][n]];
                c.sort();
                c
            }).collect();
            c.sort();
            (r, c)
        };
        let keys: Vec<_> = (0..6).map(|k| key(&d2_coset_assignment(k))).collect();
        for i in 0..6 {
            for j in i + 1..6 {
                assert_ne!(keys[i], keys[j]);
            }
        }
    }

    #[test]
    fn worked_d2_example() {
        let spec = Spectrum::from_probs(2, 2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let r = closed_form_d2(&spec).unwrap();
        assert!((r.s_a - 1.0).abs() < 1e-15);
        assert!((r.s_b - h2(0.7)).abs() < 1e-15);
        assert!((r.delta_s - (1.0 - h2(0.7))).abs() < 1e-15);
        assert!((r.delta_s - 0.1187).abs() < 1e-4);
        let e = exhaustive_search(&spec).unwrap();
        assert!((e.delta_s - r.delta_s).abs() < 1e-12);
    }

    #[test]
    fn closed_form_edge_spectra() {
        let pure = Spectrum::from_probs(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(closed_form_d2(&pure).unwrap().delta_s, 0.0);
        let two = Spectrum::from_probs(2, 2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let r = closed_form_d2(&two).unwrap();
        assert_eq!(r.row_sums, vec![0.5, 0.5]);
        assert!((r.delta_s - 1.0).abs() < 1e-15);
        let d3 = random_spectrum(3, 3, 1);
        assert!(matches!(closed_form_d2(&d3), Err(Error::WrongDims { d_a: 3, d_b: 3 })));
    }

    #[test]
    fn uniform_gives_zero() {
        let spec = Spectrum::from_probs(3, 3, vec![1.0 / 9.0; 9]).unwrap();
        assert!(apply_assignment(&spec, &LatticeAssignment::identity(3, 3)).unwrap().delta_s.abs() < 1e-15);
        assert!(rgnp_two_step(&spec).unwrap().delta_s.abs() < 1e-15);
        assert!(exhaustive_search(&spec).unwrap().delta_s.abs() < 1e-14);
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::from_probs(2, 2, vec![0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(Spectrum::from_probs(2, 2, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(Spectrum::from_probs(2, 2, vec![0.5, 0.3]).is_err());
        assert!(Spectrum::from_unsorted_probs(2, 2, vec![0.1, 0.2, 0.3, 0.4]).is_ok());
    }

    #[test]
    fn assignment_validation() {
        assert!(LatticeAssignment::new(2, 2, vec![(0, 0), (0, 0), (1, 0), (1, 1)]).is_err());
        assert!(LatticeAssignment::new(2, 2, vec![(0, 0), (0, 2), (1, 0), (1, 1)]).is_err());
        assert!(LatticeAssignment::from_rows(&[vec![0, 1], vec![1, 2]]).is_err());
        let s = LatticeAssignment::from_rows(&[vec![3, 0], vec![2, 1]]).unwrap();
        assert_eq!(s.cell_of(), &[(0, 1), (1, 1), (1, 0), (0, 0)]);
    }

    #[test]
    fn too_large_is_refused() {
        assert!(matches!(exhaustive_search(&random_spectrum(4, 4, 0)), Err(Error::TooLarge { size: 16, max: 9 })));
    }

    #[test]
    fn next_permutation_counts() {
        let mut v: Vec<usize> = (0..5).collect();
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 120);
        assert_eq!(v, vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn rectangular_exhaustive_beats_heuristic() {
        for seed in 0..5 {
            let spec = random_spectrum(2, 3, seed);
            let e = exhaustive_search(&spec).unwrap();
            let r = rgnp_two_step(&spec).unwrap();
            assert!(e.delta_s >= r.delta_s - 1e-12);
        }
    }
}
