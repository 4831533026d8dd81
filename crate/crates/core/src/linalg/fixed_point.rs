//! Perron-Frobenius fixed points by multi-start power iteration.
//!
//! The map is raised to powers `2^k` by repeated squaring, so slowly mixing
//! chains (spectral gaps of order 1e-6 appear in the three-state constructions)
//! still converge in a few dozen matrix products. `iterations` counts the
//! effective number of map applications, i.e. the final power.

use crate::error::{Error, Result};
use crate::linalg::density::{superoperator, unvec_matrix, vec_matrix, DensityMatrix};
use crate::linalg::matrix::{ComplexMatrix, RealMatrix};
use crate::linalg::stochastic::{ProbVector, StochasticMatrix};
use crate::linalg::trace_norm_unchecked;
use crate::scalar::{czero, re, Cx, Real};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport<V, T> {
    pub result: V,
    pub iterations: u64,
    pub residual: T,
    pub converged: bool,
}

fn check_args<T: Real>(tol: T, max_iter: u64, starts: usize) -> Result<()> {
    if !(tol > T::zero()) {
        return Err(Error::Validation("tolerance must be positive".into()));
    }
    if max_iter == 0 {
        return Err(Error::Validation("max_iter must be positive".into()));
    }
    if starts < 2 {
        return Err(Error::Validation(
            "at least two starts are needed to certify start-independence".into(),
        ));
    }
    Ok(())
}

fn l1<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).sum()
}

fn renormalize_columns<T: Real>(m: &mut RealMatrix<T>) {
    for (j, s) in m.column_sums().into_iter().enumerate() {
        if s > T::zero() {
            for i in 0..m.rows() {
                m[(i, j)] /= s;
            }
        }
    }
}

/// Start vectors: uniform first, then basis vectors.
fn classical_starts<T: Real>(dim: usize, starts: usize) -> Vec<Vec<T>> {
    let mut out = vec![ProbVector::uniform(dim).into_inner()];
    out.extend((0..dim).map(|k| ProbVector::basis(dim, k).into_inner()));
    out.truncate(starts);
    out
}

/// Unique attracting fixed point of a column-stochastic `m`.
///
/// Converged means every start lands within `tol` (L1) of the uniform start's
/// iterate and that iterate has residual `‖Mν − ν‖₁ ≤ tol`.
pub fn pf_fixed_point<T: Real>(
    m: &StochasticMatrix<T>,
    tol: T,
    max_iter: u64,
    starts: usize,
) -> Result<FixedPointReport<ProbVector<T>, T>> {
    check_args(tol, max_iter, starts)?;
    let dim = m.dim();
    let inits = classical_starts::<T>(dim, starts);
    let mut power = m.matrix().clone();
    let mut k: u64 = 1;
    loop {
        let images: Vec<Vec<T>> = inits.iter().map(|x| power.mul_vec(x)).collect();
        let cand = ProbVector::from_iterate(images[0].clone());
        let residual = l1(&m.apply(&cand), &cand);
        let agree = images.iter().all(|y| l1(y, &cand) <= tol);
        let done = agree && residual <= tol;
        if done || k.saturating_mul(2) > max_iter {
            return Ok(FixedPointReport {
                result: cand,
                iterations: k,
                residual,
                converged: done,
            });
        }
        power = power.matmul(&power);
        renormalize_columns(&mut power);
        k *= 2;
    }
}

/// A linear map on `dim × dim` matrices, expected to be a quantum channel.
pub trait ChannelApplier<T: Real> {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T>;
}

impl<T: Real, F> ChannelApplier<T> for (usize, F)
where
    F: Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
{
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        (self.1)(rho)
    }
}

/// Maximally mixed state, basis projectors, then `(e₀ + e_k)/√2` and
/// `(e₀ + i e_k)/√2` so that coherences are probed too.
fn quantum_starts<T: Real>(dim: usize, starts: usize) -> Vec<ComplexMatrix<T>> {
    let mut out = vec![DensityMatrix::<T>::maximally_mixed(dim).into_matrix()];
    let basis = |k: usize| {
        let mut v = vec![czero::<T>(); dim];
        v[k] = re(T::one());
        v
    };
    for k in 0..dim {
        out.push(DensityMatrix::pure(&basis(k)).into_matrix());
    }
    let h = T::one() / T::lit(2.0).sqrt();
    for phase in [re(h), Cx::new(T::zero(), h)] {
        for k in 1..dim {
            let mut v = vec![czero::<T>(); dim];
            v[0] = re(h);
            v[k] = phase;
            out.push(DensityMatrix::pure(&v).into_matrix());
        }
    }
    out.truncate(starts);
    out
}

/// Quantum analogue of [`pf_fixed_point`], with trace-norm distances.
pub fn quantum_pf_fixed_point<T: Real, C: ChannelApplier<T> + ?Sized>(
    channel: &C,
    tol: T,
    max_iter: u64,
    starts: usize,
) -> Result<FixedPointReport<DensityMatrix<T>, T>> {
    check_args(tol, max_iter, starts)?;
    let d = channel.dim();
    let sup = superoperator(d, |r| channel.apply(r));
    // Trace preservation: tr Φ(E_ij) = δ_ij.
    let tp_tol = T::tol(1e-9);
    for i in 0..d {
        for j in 0..d {
            let t = (0..d).map(|r| sup[(r + r * d, i + j * d)]).sum::<Cx<T>>();
            let expect = if i == j { re(T::one()) } else { czero() };
            if (t - expect).norm() > tp_tol {
                return Err(Error::Validation(format!(
                    "channel does not preserve trace: tr Φ(E_{i}{j}) = {t}"
                )));
            }
        }
    }
    let inits: Vec<Vec<Cx<T>>> = quantum_starts::<T>(d, starts)
        .iter()
        .map(vec_matrix)
        .collect();
    let mut power = sup.clone();
    let mut k: u64 = 1;
    loop {
        let images: Vec<ComplexMatrix<T>> = inits
            .iter()
            .map(|x| unvec_matrix(&power.mul_vec(x), d))
            .collect();
        let cand = normalize_state(&images[0]);
        let residual = trace_norm_unchecked(&(&channel.apply(&cand) - &cand));
        let agree = images
            .iter()
            .all(|y| trace_norm_unchecked(&(y - &cand)) <= tol);
        let done = agree && residual <= tol;
        if done || k.saturating_mul(2) > max_iter {
            return Ok(FixedPointReport {
                result: DensityMatrix::new_unchecked(cand),
                iterations: k,
                residual,
                converged: done,
            });
        }
        power = power.matmul(&power);
        k *= 2;
    }
}

fn normalize_state<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let h = m.hermitian_part();
    let t = h.trace().re;
    if t > T::zero() {
        h.scale_real(T::one() / t)
    } else {
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cxf;

    fn sm(rows: &[[f64; 2]]) -> StochasticMatrix<f64> {
        StochasticMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rank_one_converges_in_one_step() {
        let r = pf_fixed_point(&sm(&[[0.5, 0.5], [0.5, 0.5]]), 1e-10, DEFAULT_MAX_ITER, 3).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(&*r.result, &[0.5, 0.5]);
    }

    #[test]
    fn permutation_does_not_converge() {
        let r = pf_fixed_point(&sm(&[[0.0, 1.0], [1.0, 0.0]]), 1e-10, DEFAULT_MAX_ITER, 3).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn identity_does_not_converge() {
        let r = pf_fixed_point(&StochasticMatrix::<f64>::identity(3), 1e-10, 1000, 4).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn slow_chain_reaches_fixed_point() {
        // Flip rate 1e-6: stationary (a, b)/(a+b) with a, b the rates into each state.
        let m = sm(&[[1.0 - 2e-6, 1e-6], [2e-6, 1.0 - 1e-6]]);
        let r = pf_fixed_point(&m, 1e-10, 1 << 40, 3).unwrap();
        assert!(r.converged);
        assert!((r.result[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn argument_validation() {
        let m = StochasticMatrix::<f64>::identity(2);
        assert!(pf_fixed_point(&m, 0.0, 10, 2).is_err());
        assert!(pf_fixed_point(&m, 1e-10, 10, 1).is_err());
    }

    fn sigma() -> ComplexMatrix<f64> {
        ComplexMatrix::from_rows(&[
            vec![cxf(0.7, 0.0), cxf(0.1, 0.2)],
            vec![cxf(0.1, -0.2), cxf(0.3, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn constant_channel_one_step() {
        let s = sigma();
        let ch = (2usize, move |r: &ComplexMatrix<f64>| s.scale(r.trace()));
        let r = quantum_pf_fixed_point(&ch, 1e-10, DEFAULT_MAX_ITER, 4).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.result.max_abs_diff(&sigma()) < 1e-14);
    }

    #[test]
    fn identity_and_dephasing_fail() {
        let id = (2usize, |r: &ComplexMatrix<f64>| r.clone());
        assert!(!quantum_pf_fixed_point(&id, 1e-10, DEFAULT_MAX_ITER, 4).unwrap().converged);
        let deph = (2usize, |r: &ComplexMatrix<f64>| {
            let mut o = r.clone();
            o[(0, 1)] = czero();
            o[(1, 0)] = czero();
            o
        });
        assert!(!quantum_pf_fixed_point(&deph, 1e-10, DEFAULT_MAX_ITER, 4).unwrap().converged);
    }

    #[test]
    fn rejects_trace_decreasing_map() {
        let half = (2usize, |r: &ComplexMatrix<f64>| r.scale_real(0.5));
        assert!(matches!(
            quantum_pf_fixed_point(&half, 1e-10, 100, 3),
            Err(Error::Validation(_))
        ));
    }
}
