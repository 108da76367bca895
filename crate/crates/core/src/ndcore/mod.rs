//! Dense matrices, activations, MLP forward/backward and a finite-difference
//! gradient oracle.

mod activation;
mod gradcheck;
pub mod matrix;
mod mlp;

pub use activation::{apply_activation, sigmoid, softplus, Activation};
pub use gradcheck::{grad_check, grad_check_piecewise, relative_error, Coordinates, GradCheckReport};
pub use matrix::{gemm, matmul, Matrix, Transpose};
pub use mlp::{Backward, Dense, Mlp, MlpGrads, Tape};
