//! One-round geodesic game on projective Hilbert space.
//!
//! Alice's win probability for a state `γ` is `⟨ηγ, γ⟩` for an effect `η`.
//! Along the minimizing geodesic from `[ψ]` to `[ξ]` this reduces to a
//! quadratic form in the 2×2 matrix `B` built from `η`, `ψ` and the
//! phase-aligned `ξ̂`.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, inner, norm, ComplexMatrix};
use crate::scalar::{czero, re, Cx, Real};

/// Below this overlap two states are treated as orthogonal.
const ORTHO_CUTOFF: f64 = 1e-14;

/// Unit vector in `ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction<T: Real>(Vec<Cx<T>>);

impl<T: Real> Wavefunction<T> {
    pub fn new(amplitudes: Vec<Cx<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if amplitudes.is_empty() || (n - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::Validation(format!("wavefunction norm {n} is not 1")));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<Cx<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > T::zero()) {
            return Err(Error::Validation("cannot normalize the zero vector".into()));
        }
        Ok(Self(amplitudes.into_iter().map(|z| z / re(n)).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<Cx<T>> {
        self.0
    }
}

impl<T: Real> Deref for Wavefunction<T> {
    type Target = [Cx<T>];
    fn deref(&self) -> &[Cx<T>] {
        &self.0
    }
}

/// Hermitian `η` with `0 ≤ η ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectOperator<T: Real>(ComplexMatrix<T>);

impl<T: Real> EffectOperator<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Validation("effect operator must be square".into()));
        }
        if !m.is_hermitian(T::tol(1e-10)) {
            return Err(Error::Validation("effect operator is not Hermitian".into()));
        }
        let ev = hermitian_eigenvalues(&m)?;
        let tol = T::tol(1e-10);
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -tol || hi > T::one() + tol {
            return Err(Error::Validation(format!(
                "effect eigenvalues span [{lo}, {hi}], outside [0, 1]"
            )));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// `⟨ηφ, φ⟩`.
    pub fn expectation(&self, phi: &[Cx<T>]) -> T {
        inner(&self.0.mul_vec(phi), phi).re
    }
}

impl<T: Real> Deref for EffectOperator<T> {
    type Target = ComplexMatrix<T>;
    fn deref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

fn overlap_abs<T: Real>(psi: &[Cx<T>], xi: &[Cx<T>]) -> T {
    inner(psi, xi).norm().min(T::one())
}

/// `arccos|⟨ψ, ξ⟩|`, in `[0, π/2]`.
pub fn dist_round<T: Real>(psi: &Wavefunction<T>, xi: &Wavefunction<T>) -> T {
    overlap_abs(psi, xi).acos()
}

/// `2√(1 − |⟨ψ, ξ⟩|²)`, the trace norm of `ξξ* − ψψ*`.
pub fn dist_trace<T: Real>(psi: &Wavefunction<T>, xi: &Wavefunction<T>) -> T {
    let c = overlap_abs(psi, xi);
    (T::one() + T::one()) * (T::one() - c * c).max(T::zero()).sqrt()
}

/// Representative `ξ̂` of `[ξ]` with `⟨ψ, ξ̂⟩ = |⟨ψ, ξ⟩|`; for orthogonal
/// states `ξ` itself.
pub fn phase_align<T: Real>(psi: &Wavefunction<T>, xi: &Wavefunction<T>) -> Wavefunction<T> {
    let ov = inner(psi, xi);
    let a = ov.norm();
    if a < T::lit(ORTHO_CUTOFF) {
        return xi.clone();
    }
    let phase = ov / re(a);
    Wavefunction(xi.iter().map(|&z| z * phase).collect())
}

fn check_dims<T: Real>(a: &Wavefunction<T>, b: &Wavefunction<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: format!("dim {}", a.dim()),
            found: format!("dim {}", b.dim()),
        });
    }
    Ok(())
}

fn distinct_delta<T: Real>(psi: &Wavefunction<T>, xi: &Wavefunction<T>) -> Result<T> {
    let delta = dist_round(psi, xi);
    if delta.sin() < T::tol(1e-12) {
        return Err(Error::Validation(
            "endpoints are phase-equivalent; the geodesic is degenerate".into(),
        ));
    }
    Ok(delta)
}

/// Point at arclength `θ` from `[ψ]` on the minimizing geodesic to `[ξ]`.
pub fn geodesic_point<T: Real>(
    psi: &Wavefunction<T>,
    xi: &Wavefunction<T>,
    theta: T,
) -> Result<Wavefunction<T>> {
    check_dims(psi, xi)?;
    let delta = distinct_delta(psi, xi)?;
    let slack = T::tol(1e-12);
    if theta < -slack || theta > delta + slack {
        return Err(Error::Parameter {
            name: "theta",
            value: theta.to_f64_lossy(),
            interval: format!("[0, {}]", delta.to_f64_lossy()),
        });
    }
    let xh = phase_align(psi, xi);
    let c = inner(&xh, psi);
    let perp: Vec<Cx<T>> = xh.iter().zip(psi.iter()).map(|(&x, &p)| x - c * p).collect();
    let pn = norm(&perp);
    let (s, co) = theta.sin_cos();
    let v = psi
        .iter()
        .zip(&perp)
        .map(|(&p, &q)| p * re(co) + q * re(s / pn))
        .collect();
    Wavefunction::normalized(v)
}

/// Hermitian 2×2 matrix `B` with its geodesic length `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix<T: Real> {
    b: [[Cx<T>; 2]; 2],
    delta: T,
}

impl<T: Real> BMatrix<T> {
    /// Checks `0 ≤ B ≤ [[1, cos δ], [cos δ, 1]]`.
    pub fn new(b: [[Cx<T>; 2]; 2], delta: T) -> Result<Self> {
        let half_pi = T::FRAC_PI_2();
        let tol = T::tol(1e-10);
        if !(delta >= -tol && delta <= half_pi + tol) {
            return Err(Error::Parameter {
                name: "delta",
                value: delta.to_f64_lossy(),
                interval: "[0, pi/2]".into(),
            });
        }
        let m = ComplexMatrix::from_rows(&[b[0].to_vec(), b[1].to_vec()])?;
        if !m.is_hermitian(tol) {
            return Err(Error::Validation("B is not Hermitian".into()));
        }
        let cd = re(delta.cos());
        let upper = ComplexMatrix::from_rows(&[vec![re(T::one()), cd], vec![cd, re(T::one())]])?;
        let lo = hermitian_eigenvalues(&m)?[0];
        let gap = hermitian_eigenvalues(&(&upper - &m))?[0];
        if lo < -tol || gap < -tol {
            return Err(Error::Validation(format!(
                "B lies outside its order interval (min eigenvalues {lo}, {gap})"
            )));
        }
        Ok(Self { b, delta })
    }

    pub fn entries(&self) -> [[Cx<T>; 2]; 2] {
        self.b
    }

    pub fn b11(&self) -> T {
        self.b[0][0].re
    }

    pub fn b22(&self) -> T {
        self.b[1][1].re
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Same matrix with the imaginary parts of the off-diagonals dropped.
    pub fn real_part(&self) -> Result<Self> {
        let off = re(self.b[0][1].re);
        Self::new([[self.b[0][0], off], [off, self.b[1][1]]], self.delta)
    }
}

/// `B = [[⟨ηψ,ψ⟩, ⟨ηψ,ξ̂⟩], [⟨ηξ̂,ψ⟩, ⟨ηξ,ξ⟩]]` with `δ = dist_round(ψ, ξ)`.
pub fn build_b<T: Real>(
    eta: &EffectOperator<T>,
    psi: &Wavefunction<T>,
    xi: &Wavefunction<T>,
) -> Result<BMatrix<T>> {
    check_dims(psi, xi)?;
    if eta.dim() != psi.dim() {
        return Err(Error::Dimension {
            expected: format!("effect of dim {}", psi.dim()),
            found: format!("dim {}", eta.dim()),
        });
    }
    let xh = phase_align(psi, xi);
    let ep = eta.mul_vec(psi);
    let ex = eta.mul_vec(&xh);
    let b11 = re(inner(&ep, psi).re);
    let b22 = re(inner(&ex, &xh).re);
    let b12 = inner(&ep, &xh);
    let b21 = b12.conj();
    BMatrix::new([[b11, b12], [b21, b22]], dist_round(psi, xi))
}

/// `(1/sin²δ) · [sin(δ−θ), sin θ] B [sin(δ−θ), sin θ]ᵀ`.
pub fn geo_prob<T: Real>(b: &BMatrix<T>, theta: T) -> Result<T> {
    let delta = b.delta;
    let sd = delta.sin();
    if sd < T::tol(1e-12) {
        return Err(Error::Validation("geodesic of zero length (delta = 0)".into()));
    }
    let slack = T::tol(1e-12);
    if theta < -slack || theta > delta + slack {
        return Err(Error::Parameter {
            name: "theta",
            value: theta.to_f64_lossy(),
            interval: format!("[0, {}]", delta.to_f64_lossy()),
        });
    }
    let u = (delta - theta).sin();
    let v = theta.sin();
    let two = T::one() + T::one();
    let q = u * u * b.b[0][0].re + v * v * b.b[1][1].re + two * u * v * b.b[0][1].re;
    Ok(q / (sd * sd))
}

/// Closed region of achievable `P_geo` for given `P_A`, `P′_A`.
pub fn geo_bounds<T: Real>(p_a: T, p_aprime: T) -> (T, T) {
    let s = p_a + p_aprime;
    ((s - T::one()).max(T::zero()), s.min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicExtreme<T: Real> {
    pub b: BMatrix<T>,
    pub delta0: T,
    pub theta0: T,
    pub value: T,
}

/// Extremal `(B, δ₀, θ₀)` attaining the lower or upper end of [`geo_bounds`].
///
/// The maximum uses a rank-one `B`; the minimum uses `B` with
/// `[[1, cos δ], [cos δ, 1]] − B` of rank one. Inputs must lie in `(0, 1)`,
/// where the angle formulas are nondegenerate.
pub fn achieve_extreme<T: Real>(p_a: T, p_aprime: T, which: Extreme) -> Result<GeodesicExtreme<T>> {
    for (name, x) in [("P_A", p_a), ("P_Aprime", p_aprime)] {
        if !(x > T::zero() && x < T::one()) {
            return Err(Error::Parameter {
                name,
                value: x.to_f64_lossy(),
                interval: "(0, 1); the boundary cases are attained by degenerate B".into(),
            });
        }
    }
    let one = T::one();
    let (b11, b22) = (p_a, p_aprime);
    let half_pi = T::FRAC_PI_2();
    let s = b11 + b22;
    let root = (b11 * b22).sqrt();
    let coroot = ((one - b11) * (one - b22)).sqrt();
    let (delta0, theta0, off) = match which {
        Extreme::Max if s <= one => (half_pi, (b22 / s).sqrt().asin(), root),
        Extreme::Max => {
            let cd = (root - coroot).max(T::zero()).min(one);
            (cd.acos(), (one - b11).sqrt().asin(), root)
        }
        Extreme::Min if s <= one => {
            let cd = (coroot - root).max(T::zero()).min(one);
            (cd.acos(), b11.sqrt().asin(), cd - coroot)
        }
        Extreme::Min => (
            half_pi,
            ((one - b22) / (one + one - s)).sqrt().asin(),
            -coroot,
        ),
    };
    let theta0 = theta0.min(delta0);
    let b = BMatrix::new([[re(b11), re(off)], [re(off), re(b22)]], delta0)?;
    let value = geo_prob(&b, theta0)?;
    Ok(GeodesicExtreme {
        b,
        delta0,
        theta0,
        value,
    })
}

/// Effect and endpoints in `ℂ²` realizing a given `B`:
/// `ψ = e₁`, `ξ = cos δ e₁ + sin δ e₂` and `η = F⁻ᵀ B F⁻¹` with
/// `F = [[1, cos δ], [0, sin δ]]`.
pub fn realize_b<T: Real>(
    b: &BMatrix<T>,
) -> Result<(EffectOperator<T>, Wavefunction<T>, Wavefunction<T>)> {
    let (s, c) = b.delta.sin_cos();
    if s < T::tol(1e-12) {
        return Err(Error::Validation("cannot realize B with delta = 0".into()));
    }
    let finv = ComplexMatrix::from_rows(&[
        vec![re(T::one()), re(-c / s)],
        vec![czero(), re(T::one() / s)],
    ])?;
    let bm = ComplexMatrix::from_rows(&[b.b[0].to_vec(), b.b[1].to_vec()])?;
    let eta = finv.adjoint().matmul(&bm).matmul(&finv).hermitian_part();
    let psi = Wavefunction::new(vec![re(T::one()), czero()])?;
    let xi = Wavefunction::new(vec![re(c), re(s)])?;
    Ok((EffectOperator::new(eta)?, psi, xi))
}

/// True when the restriction `C` of the win effect to a 2-plane has trace at
/// most one, which rules out the paradox for states in that plane.
pub fn no_paradox_check<T: Real>(c: &ComplexMatrix<T>) -> Result<bool> {
    if c.rows() != 2 || c.cols() != 2 {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            found: format!("{}x{}", c.rows(), c.cols()),
        });
    }
    EffectOperator::new(c.clone())?;
    Ok(c.trace().re <= T::one() + T::tol(1e-12))
}
