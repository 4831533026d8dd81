//! Dense complex linear algebra shared by the game engines.

mod decomp;
mod density;
mod fixed_point;
mod matrix;
mod stochastic;

pub use decomp::{
    gram_schmidt_extend, hermitian_eigenvalues, orthonormal_columns, singular_values, solve,
    symmetric_eigenvalues,
};
pub use density::{superoperator, unvec2, unvec_matrix, vec2, vec_matrix, DensityMatrix};
pub use fixed_point::{
    pf_fixed_point, quantum_pf_fixed_point, ChannelApplier, FixedPointReport, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
pub use matrix::{inner, norm, ComplexMatrix, RealMatrix};
pub use stochastic::{ProbVector, StochasticMatrix};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sum of singular values.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    if !a.is_square() {
        return Err(Error::Validation(format!(
            "trace norm needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(trace_norm_unchecked(a))
}

pub(crate) fn trace_norm_unchecked<T: Real>(a: &ComplexMatrix<T>) -> T {
    singular_values(a).into_iter().sum()
}
