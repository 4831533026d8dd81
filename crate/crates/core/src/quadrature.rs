//! Composite Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nodes and weights of the `order`-point rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(order: usize) -> Result<(Vec<T>, Vec<T>)> {
    if order == 0 {
        return Err(Error::Validation("quadrature order must be positive".into()));
    }
    let n = order;
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let one = T::one();
    let two = one + one;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like starting guess, then Newton on P_n.
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75))
            / (T::from_usize_lossy(n) + T::lit(0.5)))
        .cos();
        let mut dp = T::zero();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kf = T::from_usize_lossy(k);
                let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { one } else { p0 };
            dp = T::from_usize_lossy(n) * (x * pn - pm) / (x * x - one);
            let dx = pn / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        if n == 1 {
            x = T::zero();
            dp = one;
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

/// `∫_a^b f` with `panels` equal panels of an `order`-point rule each.
pub fn integrate<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    panels: usize,
    order: usize,
) -> Result<T> {
    if panels == 0 {
        return Err(Error::Validation("need at least one panel".into()));
    }
    let (x, w) = gauss_legendre::<T>(order)?;
    let h = (b - a) / T::from_usize_lossy(panels);
    let half = h / (T::one() + T::one());
    let mut total = T::zero();
    for p in 0..panels {
        let mid = a + h * (T::from_usize_lossy(p) + T::lit(0.5));
        for (xi, wi) in x.iter().zip(&w) {
            total = total + *wi * f(mid + half * *xi);
        }
    }
    Ok(total * half)
}
