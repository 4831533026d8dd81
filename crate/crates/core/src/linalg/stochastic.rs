use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::matrix::RealMatrix;
use crate::scalar::Real;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector<T: Real>(Vec<T>);

impl<T: Real> ProbVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("probability vector is empty".into()));
        }
        let tol = T::tol(STOCHASTIC_TOL);
        if let Some((i, &x)) = entries
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x >= T::zero()))
        {
            return Err(Error::Validation(format!(
                "probability entry {i} = {x} is negative or not finite"
            )));
        }
        let total: T = entries.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return Err(Error::Validation(format!(
                "probability entries sum to {total}, not 1"
            )));
        }
        Ok(Self(entries))
    }

    pub fn uniform(dim: usize) -> Self {
        Self(vec![T::one() / T::from_usize_lossy(dim); dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![T::zero(); dim];
        v[k] = T::one();
        Self(v)
    }

    /// Clips tiny negative roundoff and renormalizes; used on solver output.
    pub(crate) fn from_iterate(mut v: Vec<T>) -> Self {
        for x in v.iter_mut() {
            if *x < T::zero() {
                *x = T::zero();
            }
        }
        let s: T = v.iter().copied().sum();
        if s > T::zero() {
            for x in v.iter_mut() {
                *x /= s;
            }
        }
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T: Real> Deref for ProbVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Column-stochastic square matrix; `m[(i, j)]` is the weight into `i` from `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<T: Real>(RealMatrix<T>);

impl<T: Real> StochasticMatrix<T> {
    pub fn new(m: RealMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Validation(format!(
                "stochastic matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let tol = T::tol(STOCHASTIC_TOL);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x = m[(i, j)];
                if !(x.is_finite() && x >= T::zero()) {
                    return Err(Error::Validation(format!(
                        "entry ({i},{j}) = {x} is negative or not finite"
                    )));
                }
            }
        }
        for (j, s) in m.column_sums().into_iter().enumerate() {
            if (s - T::one()).abs() > tol {
                return Err(Error::Validation(format!("column {j} sums to {s}, not 1")));
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(RealMatrix::from_rows(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self(RealMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &RealMatrix<T> {
        &self.0
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.0.mul_vec(v)
    }

    /// Convex combination `p·self + (1-p)·other`.
    pub fn mix(&self, other: &Self, p: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: format!("dim {}", self.dim()),
                found: format!("dim {}", other.dim()),
            });
        }
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::Parameter {
                name: "p",
                value: p.to_f64_lossy(),
                interval: "[0, 1]".into(),
            });
        }
        Ok(Self(self.0.lin_comb(p, &other.0, T::one() - p)))
    }
}

impl<T: Real> Deref for StochasticMatrix<T> {
    type Target = RealMatrix<T>;
    fn deref(&self) -> &RealMatrix<T> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_row_stochastic() {
        let r = StochasticMatrix::<f64>::from_rows(&[vec![0.2, 0.8], vec![0.5, 0.5]]);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_negative_entries() {
        let r = StochasticMatrix::<f64>::from_rows(&[vec![1.1, 0.0], vec![-0.1, 1.0]]);
        assert!(r.is_err());
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.3, 0.7]).is_ok());
        assert!(ProbVector::new(vec![0.3, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn midpoint_mix() {
        let a = StochasticMatrix::<f64>::identity(2);
        let b = StochasticMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = a.mix(&b, 0.5).unwrap();
        assert_eq!(m.to_rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }
}
