//! Dense complex linear algebra for the small Hilbert spaces this crate works
//! with (a handful of qubits).

mod eigen;
mod funcs;
mod matrix;

pub use eigen::{eigh, HermitianEigen, HERMITIAN_TOL};
pub use funcs::{
    bures_angle, exp_hermitian, exp_i, fidelity, log_regularized, matrix_fn, matrix_log_unitary,
    sqrt_psd, trace_distance, EIGEN_FLOOR, UNITARY_TOL,
};
pub use matrix::{
    partial_trace, pauli_x, pauli_y, pauli_z, tensor, tensor_all, ComplexMatrix, C64, I, ONE, ZERO,
};
