//! Seeded random draws of unitaries, states and effects for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{orthonormal_columns, ComplexMatrix};
use crate::quantum::{ExtremalParams, QuantumPinceNez};
use crate::scalar::{cx, re, Cx, Real};

fn gaussian<T: Real>(rng: &mut impl Rng) -> Cx<T> {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    cx(T::lit(a), T::lit(b))
}

/// Unitary factor of the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<T: Real>(d: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    loop {
        let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
        if let Ok(q) = orthonormal_columns(&g) {
            return q;
        }
    }
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector<T: Real>(d: usize, rng: &mut impl Rng) -> Vec<Cx<T>> {
    loop {
        let v: Vec<Cx<T>> = (0..d).map(|_| gaussian(rng)).collect();
        let n = crate::linalg::norm(&v);
        if n > T::lit(1e-8) {
            return v.into_iter().map(|z| z / re(n)).collect();
        }
    }
}

/// `W diag(λ) W†` with `λ_i` uniform in `[0, 1]`.
pub fn random_effect<T: Real>(d: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let w = random_unitary::<T>(d, rng);
    let lam: Vec<Cx<T>> = (0..d).map(|_| re(T::lit(rng.gen::<f64>()))).collect();
    w.matmul(&ComplexMatrix::diag(&lam)).matmul(&w.adjoint())
}

/// Random density matrix `G G† / tr(G G†)`.
pub fn random_density<T: Real>(d: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian::<T>(rng));
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_real(T::one() / t).hermitian_part()
}

/// Random complex Gaussian matrix.
pub fn random_matrix<T: Real>(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Pince-nez with `m` Kraus operators per branch, cut from the first `d`
/// columns of a random unitary of size `2·m·d`.
pub fn random_pince_nez<T: Real>(d: usize, m: usize, rng: &mut impl Rng) -> QuantumPinceNez<T> {
    let u = random_unitary::<T>(2 * m * d, rng);
    let k = |b: usize| u.block(b * d, 0, d, d);
    QuantumPinceNez::new((0..m).map(k).collect(), (m..2 * m).map(k).collect())
        .expect("isometry blocks form a channel")
}

/// Orthonormal `u, v` from two Gaussian 4-vectors.
pub fn random_extremal_params<T: Real>(rng: &mut impl Rng) -> ExtremalParams<T> {
    loop {
        let g = |rng: &mut _| [0; 4].map(|_| gaussian::<T>(rng));
        let (u, v) = (g(rng), g(rng));
        if let Ok(p) = ExtremalParams::orthonormalized(u, v) {
            return p;
        }
    }
}
