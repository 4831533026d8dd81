//! Small dense decompositions: LU solves, Jacobi eigenvalues, Hestenes SVD and
//! Gram-Schmidt orthonormalization.

use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, norm, ComplexMatrix, RealMatrix};
use crate::scalar::{czero, re, Cx, Real};

/// Solves `A x = b` by LU with partial pivoting.
///
/// A pivot below `tol · max|A_ij|` is treated as singular.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &[Cx<T>], tol: T) -> Result<Vec<Cx<T>>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::Dimension {
            expected: format!("square {n}x{n} system"),
            found: format!("{}x{} with rhs {}", a.rows(), a.cols(), b.len()),
        });
    }
    let mut m: Vec<Vec<Cx<T>>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut x = b.to_vec();
    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return Err(Error::Singular);
    }
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, m[i][k].norm()))
            .fold((k, -T::one()), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= tol * scale {
            return Err(Error::Singular);
        }
        m.swap(k, p);
        x.swap(k, p);
        let piv = m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / piv;
            if f == czero() {
                continue;
            }
            for j in k..n {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Ok(x)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &RealMatrix<T>) -> Vec<T> {
    let n = a.rows();
    let mut m = a.clone();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= eps * eps * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Uses the real symmetric embedding `[[A, -B], [B, A]]` of `A + iB`, whose
/// spectrum is that of the input with every value doubled.
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if !h.is_square() {
        return Err(Error::Validation("eigenvalues need a square matrix".into()));
    }
    let n = h.rows();
    let herm = h.hermitian_part();
    let emb = RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = herm[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let all = symmetric_eigenvalues(&emb);
    Ok(all.into_iter().step_by(2).collect())
}

/// Singular values by one-sided Jacobi (Hestenes), descending.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    // Work on the wider orientation so columns outnumber rows at most.
    let mut cols: Vec<Vec<Cx<T>>> = if a.rows() >= a.cols() {
        (0..a.cols()).map(|j| a.column(j)).collect()
    } else {
        let adj = a.adjoint();
        (0..adj.cols()).map(|j| adj.column(j)).collect()
    };
    let k = cols.len();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                // gamma = <col_q, col_p> = col_p^† col_q
                let gamma = inner(&cols[q], &cols[p]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                // Divide by the real magnitude: complex division squares `g`, which
                // underflows for residual-sized inputs.
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (g + g);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (zeta * zeta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = c * t;
                for i in 0..cols[p].len() {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    // Rotation in the plane of (p, q), with the phase folded into q.
                    let yq = xq * phase.conj();
                    cols[p][i] = xp * re(c) - yq * re(s);
                    cols[q][i] = (xp * re(s) + yq * re(c)) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Orthonormalizes `vectors` against `basis` and each other with two passes of
/// modified Gram-Schmidt; vectors whose residual falls below `tol` are dropped.
pub fn gram_schmidt_extend<T: Real>(
    basis: &mut Vec<Vec<Cx<T>>>,
    vectors: impl IntoIterator<Item = Vec<Cx<T>>>,
    tol: T,
) {
    for mut v in vectors {
        for _ in 0..2 {
            for b in basis.iter() {
                let c = inner(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > tol {
            for x in v.iter_mut() {
                *x /= re(nv);
            }
            basis.push(v);
        }
    }
}

/// Unitary factor of the QR decomposition, computed column by column.
pub fn orthonormal_columns<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let mut basis = Vec::new();
    let tol = T::lit(1e3) * T::epsilon();
    gram_schmidt_extend(&mut basis, (0..a.cols()).map(|j| a.column(j)), tol);
    if basis.len() != a.cols() {
        return Err(Error::Numerical("columns are linearly dependent".into()));
    }
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| basis[j][i]))
}
