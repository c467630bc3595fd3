//! Dense complex linear algebra for small (≤ 256) Hermitian problems.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{eig_hermitian, eig_hermitian_jacobi, eig_hermitian_with, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use ops::{expm_i_hermitian, expm_i_hermitian_with, kron, partial_trace, random_unitary, Keep};
