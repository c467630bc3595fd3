/// Tolerances shared by the numerical kernels.
///
/// Matrix tolerances are relative to the Frobenius norm of the operand,
/// with an absolute floor of 1 (`tol · max(1, ‖A‖_F)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Allowed `‖A − A†‖_F` for Hermitian inputs.
    pub hermitian_tol: f64,
    /// Eigenvalues at or below this are dropped from entropy sums.
    pub zero_eigenvalue: f64,
    /// Eigenvalues of `ρ_C` above this count towards its rank.
    pub rank_eps: f64,
    /// Allowed `‖U†U − I‖_F` for unitary inputs.
    pub unitary_tol: f64,
    /// Trace, Hermiticity and positivity tolerance for density matrices.
    pub density_tol: f64,
    /// Allowed deviation of a state norm from 1.
    pub norm_tol: f64,
}

impl NumericConfig {
    pub const DEFAULT: NumericConfig = NumericConfig {
        hermitian_tol: 1e-10,
        zero_eigenvalue: 1e-12,
        rank_eps: 1e-10,
        unitary_tol: 1e-9,
        density_tol: 1e-10,
        norm_tol: 1e-12,
    };
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}
