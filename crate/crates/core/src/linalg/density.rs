use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::decomp::hermitian_eigenvalues;
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::{re, Cx, Real};

/// Hermitian positive semidefinite matrix with real trace.
///
/// The trace is not forced to one: branch outputs of a pince-nez are
/// sub-normalized states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real>(ComplexMatrix<T>);

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Validation("density matrix must be square".into()));
        }
        if !m.is_hermitian(T::tol(1e-12)) {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        let ev = hermitian_eigenvalues(&m)?;
        if ev[0] < -T::tol(1e-10) {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {}",
                ev[0]
            )));
        }
        Ok(Self(m))
    }

    /// Pure state `ψψ†`; `ψ` is used as given.
    pub fn pure(psi: &[Cx<T>]) -> Self {
        Self(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(T::one() / T::from_usize_lossy(dim)))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix<T>) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn trace_real(&self) -> T {
        self.0.trace().re
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }
}

impl<T: Real> Deref for DensityMatrix<T> {
    type Target = ComplexMatrix<T>;
    fn deref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

/// Column-stacking vectorization: `vec(ρ)[i + j·d] = ρ_ij`.
pub fn vec_matrix<T: Real>(m: &ComplexMatrix<T>) -> Vec<Cx<T>> {
    let d = m.rows();
    (0..d * m.cols()).map(|k| m[(k % d, k / d)]).collect()
}

pub fn unvec_matrix<T: Real>(x: &[Cx<T>], d: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(d, x.len() / d, |i, j| x[i + j * d])
}

/// `(ρ11, ρ21, ρ12, ρ22)`, the column-stacking order.
///
/// This is the order under which the bottom row `(1, 0, 0, 1)` of the
/// extremal-channel matrix `M` pairs with the trace and its other rows pair
/// with the `(1,1)`, `(2,1)` and `(1,2)` entries of `(N - I)ρ`.
pub fn vec2<T: Real>(rho: &ComplexMatrix<T>) -> Result<[Cx<T>; 4]> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok([rho[(0, 0)], rho[(1, 0)], rho[(0, 1)], rho[(1, 1)]])
}

pub fn unvec2<T: Real>(x: &[Cx<T>]) -> Result<ComplexMatrix<T>> {
    if x.len() != 4 {
        return Err(Error::Dimension {
            expected: "4-vector".into(),
            found: format!("{}-vector", x.len()),
        });
    }
    Ok(unvec_matrix(x, 2))
}

/// Superoperator matrix of a linear map on `d×d` matrices in the
/// column-stacking basis.
pub fn superoperator<T: Real>(
    d: usize,
    map: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let n = d * d;
    let mut s = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = vec![Cx::new(T::zero(), T::zero()); n];
        e[k] = re(T::one());
        let col = vec_matrix(&map(&unvec_matrix(&e, d)));
        for (i, z) in col.into_iter().enumerate() {
            s[(i, k)] = z;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cxf;

    #[test]
    fn vec2_examples() {
        let half = DensityMatrix::<f64>::maximally_mixed(2);
        let v = vec2(&half).unwrap();
        assert_eq!(v.map(|z| z.re), [0.5, 0.0, 0.0, 0.5]);
        let zero = DensityMatrix::pure(&[cxf::<f64>(1.0, 0.0), cxf(0.0, 0.0)]);
        assert_eq!(vec2(&zero).unwrap().map(|z| z.re), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn vec2_roundtrip_offdiagonal_placement() {
        let rho = ComplexMatrix::<f64>::from_rows(&[
            vec![cxf(0.7, 0.0), cxf(0.1, 0.2)],
            vec![cxf(0.1, -0.2), cxf(0.3, 0.0)],
        ])
        .unwrap();
        let v = vec2(&rho).unwrap();
        assert_eq!(v[1], cxf(0.1, -0.2));
        assert_eq!(unvec2(&v).unwrap(), rho);
        assert!(vec2(&ComplexMatrix::<f64>::identity(3)).is_err());
    }

    #[test]
    fn rejects_non_psd() {
        let m = ComplexMatrix::<f64>::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -0.1]]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }
}
