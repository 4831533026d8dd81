//! Quantum walks on the line with spin `{↑, ↓}`: CMV matrices, coined walks,
//! exact finite-window evolution and the geodesic game on walks.
//!
//! Basis ordering is position-major, `…, −1↑, −1↓, 0↑, 0↓, 1↑, …`, so the
//! amplitude of `(x, s)` in a window starting at `lo` sits at
//! `2(x − lo) + s`.
//!
//! A CMV matrix is the product `L·M` of two block-diagonal unitaries. `L`
//! carries the blocks `Θ(α_{2k}) = [[ᾱ, ρ], [ρ, −α]]` on `(k↑, k↓)`, and `M`
//! carries `Θ(α_{2k+1})` on `(k↓, (k+1)↑)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geodesic::{geo_prob, geodesic_point, phase_align, BMatrix, Wavefunction};
use crate::linalg::{norm, ComplexMatrix};
use crate::quadrature::integrate;
use crate::scalar::{cone, cx, czero, re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    HalfLine,
    FullLine,
}

/// Verblunsky coefficients; unspecified indices are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyConfig<T: Real> {
    kind: LineKind,
    coeffs: BTreeMap<i64, Cx<T>>,
}

impl<T: Real> VerblunskyConfig<T> {
    pub fn new(kind: LineKind, coeffs: impl IntoIterator<Item = (i64, Cx<T>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (j, a) in coeffs {
            if a.norm() > T::one() + T::tol(1e-12) {
                return Err(Error::Validation(format!("|alpha_{j}| = {} exceeds 1", a.norm())));
            }
            if kind == LineKind::HalfLine && j < 0 {
                return Err(Error::Validation(format!(
                    "half-line configuration has negative index {j}"
                )));
            }
            if a != czero() {
                map.insert(j, a);
            }
        }
        Ok(Self { kind, coeffs: map })
    }

    pub fn kind(&self) -> LineKind {
        self.kind
    }

    pub fn alpha(&self, j: i64) -> Cx<T> {
        self.coeffs.get(&j).copied().unwrap_or_else(czero)
    }

    /// Indices with nonzero coefficient, ascending.
    pub fn support(&self) -> impl Iterator<Item = (i64, Cx<T>)> + '_ {
        self.coeffs.iter().map(|(&j, &a)| (j, a))
    }

    fn max_abs_index(&self) -> i64 {
        self.coeffs.keys().map(|j| j.abs()).max().unwrap_or(0)
    }
}

fn theta_block<T: Real>(a: Cx<T>) -> [[Cx<T>; 2]; 2] {
    let rho = (T::one() - a.norm_sqr()).max(T::zero()).sqrt();
    [[a.conj(), re(rho)], [re(rho), -a]]
}

const SWAP_BLOCK: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];

fn swap_block<T: Real>() -> [[Cx<T>; 2]; 2] {
    SWAP_BLOCK.map(|r| r.map(|x| re(T::lit(x))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinForm {
    /// Coin after shift: `U = C·S`.
    First,
    /// Shift after coin: `U = S·C`.
    Second,
}

/// Constant 2×2 unitary coin.
#[derive(Debug, Clone, PartialEq)]
pub struct Coin<T: Real> {
    m: [[Cx<T>; 2]; 2],
    form: CoinForm,
}

impl<T: Real> Coin<T> {
    pub fn new(m: [[Cx<T>; 2]; 2], form: CoinForm) -> Result<Self> {
        let mat = ComplexMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()])?;
        if !mat.is_unitary(T::tol(1e-12)) {
            return Err(Error::Validation("coin is not unitary".into()));
        }
        Ok(Self { m, form })
    }

    /// `(1/√2)[[1, 1], [1, −1]]`.
    pub fn hadamard(form: CoinForm) -> Self {
        let h = re(T::FRAC_1_SQRT_2());
        Self { m: [[h, h], [h, -h]], form }
    }

    pub fn matrix(&self) -> [[Cx<T>; 2]; 2] {
        self.m
    }

    pub fn form(&self) -> CoinForm {
        self.form
    }
}

/// A 2×2 block acting on two basis indices; an index outside the window is
/// `None` and its row and column are cut.
#[derive(Debug, Clone)]
struct Block<T: Real> {
    i: Option<usize>,
    j: Option<usize>,
    m: [[Cx<T>; 2]; 2],
}

/// Truncated walk unitary stored as two layers of 2×2 blocks, `U = outer·inner`.
#[derive(Debug, Clone)]
pub struct WalkOperator<T: Real> {
    lo: i64,
    hi: i64,
    half_line: bool,
    outer: Vec<Block<T>>,
    inner: Vec<Block<T>>,
}

fn index(lo: i64, hi: i64, x: i64, s: Spin) -> Option<usize> {
    (lo..=hi).contains(&x).then(|| 2 * (x - lo) as usize + s as usize)
}

/// Blocks on `(k↑, k↓)` for every position in the window.
fn site_layer<T: Real>(lo: i64, hi: i64, f: impl Fn(i64) -> [[Cx<T>; 2]; 2]) -> Vec<Block<T>> {
    (lo..=hi)
        .map(|k| Block {
            i: index(lo, hi, k, Spin::Up),
            j: index(lo, hi, k, Spin::Down),
            m: f(k),
        })
        .collect()
}

/// Blocks on `(k↓, (k+1)↑)` touching the window.
fn bond_layer<T: Real>(
    lo: i64,
    hi: i64,
    from: i64,
    f: impl Fn(i64) -> [[Cx<T>; 2]; 2],
) -> Vec<Block<T>> {
    (from..=hi)
        .map(|k| Block {
            i: index(lo, hi, k, Spin::Down),
            j: index(lo, hi, k + 1, Spin::Up),
            m: f(k),
        })
        .collect()
}

fn check_window(lo: i64, hi: i64) -> Result<()> {
    if hi < lo {
        return Err(Error::Validation(format!("empty window [{lo}, {hi}]")));
    }
    Ok(())
}

impl<T: Real> WalkOperator<T> {
    /// CMV matrix restricted to positions `[lo, hi]`. Half-line
    /// configurations require `lo = 0`.
    pub fn cmv(cfg: &VerblunskyConfig<T>, lo: i64, hi: i64) -> Result<Self> {
        check_window(lo, hi)?;
        let half_line = cfg.kind == LineKind::HalfLine;
        if half_line && lo != 0 {
            return Err(Error::Validation("half-line windows must start at 0".into()));
        }
        for (j, _) in cfg.support() {
            let (a, b) = (j.div_euclid(2), j.div_euclid(2) + j.rem_euclid(2));
            if a < lo || b > hi {
                return Err(Error::Validation(format!(
                    "alpha_{j} lies outside the window [{lo}, {hi}]"
                )));
            }
        }
        let outer = site_layer(lo, hi, |k| theta_block(cfg.alpha(2 * k)));
        let first_bond = if half_line { lo } else { lo - 1 };
        let inner = bond_layer(lo, hi, first_bond, |k| theta_block(cfg.alpha(2 * k + 1)));
        Ok(Self { lo, hi, half_line, outer, inner })
    }

    /// Constant-coin walk on the full line restricted to `[lo, hi]`.
    pub fn coined(coin: &Coin<T>, lo: i64, hi: i64) -> Result<Self> {
        check_window(lo, hi)?;
        let c = site_layer(lo, hi, |_| coin.m);
        let s = bond_layer(lo, hi, lo - 1, |_| swap_block());
        let (outer, inner) = match coin.form {
            CoinForm::First => (c, s),
            CoinForm::Second => (s, c),
        };
        Ok(Self { lo, hi, half_line: false, outer, inner })
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn dim(&self) -> usize {
        2 * (self.hi - self.lo + 1) as usize
    }

    fn apply_layer(layer: &[Block<T>], v: &mut [Cx<T>]) {
        for b in layer {
            let x = b.i.map_or_else(czero, |i| v[i]);
            let y = b.j.map_or_else(czero, |j| v[j]);
            if let Some(i) = b.i {
                v[i] = b.m[0][0] * x + b.m[0][1] * y;
            }
            if let Some(j) = b.j {
                v[j] = b.m[1][0] * x + b.m[1][1] * y;
            }
        }
    }

    /// `U v`.
    pub fn apply(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut w = v.to_vec();
        Self::apply_layer(&self.inner, &mut w);
        Self::apply_layer(&self.outer, &mut w);
        w
    }

    pub fn to_dense(&self) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        let mut e = vec![czero(); d];
        for j in 0..d {
            e[j] = cone();
            for (i, z) in self.apply(&e).into_iter().enumerate() {
                m[(i, j)] = z;
            }
            e[j] = czero();
        }
        m
    }
}

/// Dense CMV matrix on the window `[lo, hi]`.
pub fn cmv_matrix<T: Real>(cfg: &VerblunskyConfig<T>, lo: i64, hi: i64) -> Result<ComplexMatrix<T>> {
    Ok(WalkOperator::cmv(cfg, lo, hi)?.to_dense())
}

/// Dense coined-walk matrix on the window `[lo, hi]`.
pub fn coined_walk_matrix<T: Real>(coin: &Coin<T>, lo: i64, hi: i64) -> Result<ComplexMatrix<T>> {
    Ok(WalkOperator::coined(coin, lo, hi)?.to_dense())
}

/// Walk wavefunction on a finite window of positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState<T: Real> {
    lo: i64,
    amps: Vec<Cx<T>>,
}

impl<T: Real> WalkState<T> {
    pub fn new(lo: i64, amps: Vec<Cx<T>>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_multiple_of(2) {
            return Err(Error::Validation("walk state needs two amplitudes per site".into()));
        }
        let n = norm(&amps);
        if (n - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::Validation(format!("walk state norm {n} is not 1")));
        }
        Ok(Self { lo, amps })
    }

    /// State supported at location zero with spin amplitudes `(up, down)`.
    pub fn at_origin(lo: i64, hi: i64, up: Cx<T>, down: Cx<T>) -> Result<Self> {
        check_window(lo, hi)?;
        if !(lo..=hi).contains(&0) {
            return Err(Error::Validation("window does not contain location 0".into()));
        }
        let mut amps = vec![czero(); 2 * (hi - lo + 1) as usize];
        amps[2 * (-lo) as usize] = up;
        amps[2 * (-lo) as usize + 1] = down;
        Self::new(lo, amps)
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.lo + (self.amps.len() / 2) as i64 - 1)
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amps
    }

    pub fn amplitude(&self, x: i64, s: Spin) -> Cx<T> {
        let (lo, hi) = self.window();
        index(lo, hi, x, s).map_or_else(czero, |i| self.amps[i])
    }

    fn weight(&self, keep: impl Fn(i64) -> bool) -> T {
        self.amps
            .chunks(2)
            .enumerate()
            .filter(|(k, _)| keep(self.lo + *k as i64))
            .fold(T::zero(), |acc, (_, c)| acc + c[0].norm_sqr() + c[1].norm_sqr())
    }

    fn as_wavefunction(&self) -> Result<Wavefunction<T>> {
        Wavefunction::new(self.amps.clone())
    }
}

/// `Uⁿ` applied to `state`, with a leakage check on the outer two sites.
pub fn evolve<T: Real>(u: &WalkOperator<T>, state: &WalkState<T>, n: usize) -> Result<WalkState<T>> {
    if state.window() != u.window() {
        return Err(Error::Dimension {
            expected: format!("window {:?}", u.window()),
            found: format!("window {:?}", state.window()),
        });
    }
    let mut v = state.amps.clone();
    for _ in 0..n {
        v = u.apply(&v);
    }
    let out = WalkState { lo: state.lo, amps: v };
    let (lo, hi) = u.window();
    let edge = out.weight(|x| (x > hi - 2) || (!u.half_line && x < lo + 2)).sqrt();
    let lost = (norm(&out.amps) - T::one()).abs();
    if edge > T::tol(1e-12) || lost > T::tol(1e-10) {
        return Err(Error::Leakage {
            amplitude: edge.max(lost).to_f64_lossy(),
        });
    }
    Ok(out)
}

/// `‖P₊ψ‖²`: weight on positions `> 0`.
pub fn walk_win_prob<T: Real>(state: &WalkState<T>) -> T {
    state.weight(|x| x > 0)
}

/// `‖P₋ψ‖²`: weight on positions `< 0`.
pub fn walk_loss_side_prob<T: Real>(state: &WalkState<T>) -> T {
    state.weight(|x| x < 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkGame<T: Real> {
    pub p_a: T,
    pub p_aprime: T,
    pub p_geo: T,
    /// `B` for the effect `U*ⁿ P₊ Uⁿ`, from the evolved endpoints.
    pub b: BMatrix<T>,
    /// `geo_prob(B, θ)`, the second route to `p_geo`.
    pub p_geo_from_b: T,
}

fn p_plus_inner<T: Real>(a: &WalkState<T>, b: &WalkState<T>) -> Cx<T> {
    a.amps
        .chunks(2)
        .zip(b.amps.chunks(2))
        .enumerate()
        .filter(|(k, _)| a.lo + *k as i64 > 0)
        .fold(czero(), |acc, (_, (x, y))| acc + x[0] * y[0].conj() + x[1] * y[1].conj())
}

/// Win probabilities after `n` steps from `ψ`, `ξ` and the geodesic point at `θ`.
pub fn walk_geo_game<T: Real>(
    u: &WalkOperator<T>,
    psi: &WalkState<T>,
    xi: &WalkState<T>,
    n: usize,
    theta: T,
) -> Result<WalkGame<T>> {
    let (pw, xw) = (psi.as_wavefunction()?, xi.as_wavefunction()?);
    let gamma = geodesic_point(&pw, &xw, theta)?;
    let xh = phase_align(&pw, &xw);
    let wrap = |w: Wavefunction<T>| WalkState { lo: psi.lo, amps: w.into_inner() };
    let psi_n = evolve(u, psi, n)?;
    let xh_n = evolve(u, &wrap(xh), n)?;
    let gamma_n = evolve(u, &wrap(gamma), n)?;
    let b11 = p_plus_inner(&psi_n, &psi_n).re;
    let b22 = p_plus_inner(&xh_n, &xh_n).re;
    let b12 = p_plus_inner(&psi_n, &xh_n);
    let delta = crate::geodesic::dist_round(&pw, &xw);
    let b = BMatrix::new([[re(b11), b12], [b12.conj(), re(b22)]], delta)?;
    let p_geo_from_b = geo_prob(&b, theta)?;
    Ok(WalkGame {
        p_a: b11,
        p_aprime: b22,
        p_geo: walk_win_prob(&gamma_n),
        b,
        p_geo_from_b,
    })
}

/// `P₊(Uⁿη₀↑) + P₊(Uⁿη₀↓)`, the trace of the effect restricted to location zero.
pub fn origin_trace<T: Real>(u: &WalkOperator<T>, n: usize) -> Result<T> {
    let (lo, hi) = u.window();
    let up = WalkState::at_origin(lo, hi, cone(), czero())?;
    let down = WalkState::at_origin(lo, hi, czero(), cone())?;
    Ok(walk_win_prob(&evolve(u, &up, n)?) + walk_win_prob(&evolve(u, &down, n)?))
}

/// Restrictions `C_n` of `U*ⁿ P₊ Uⁿ` to `span{η₀↑, η₀↓}` for `n = 0..=n_max`,
/// with `C_ab = ⟨P₊ Uⁿη_b, Uⁿη_a⟩`.
pub fn origin_effects<T: Real>(u: &WalkOperator<T>, n_max: usize) -> Result<Vec<ComplexMatrix<T>>> {
    let (lo, hi) = u.window();
    let mut up = WalkState::at_origin(lo, hi, cone(), czero())?;
    let mut down = WalkState::at_origin(lo, hi, czero(), cone())?;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            up = evolve(u, &up, 1)?;
            down = evolve(u, &down, 1)?;
        }
        let c = [[p_plus_inner(&up, &up), p_plus_inner(&down, &up)],
                 [p_plus_inner(&up, &down), p_plus_inner(&down, &down)]];
        out.push(ComplexMatrix::from_rows(&[c[0].to_vec(), c[1].to_vec()])?.hermitian_part());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryCase {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl SymmetryCase {
    pub const ALL: [SymmetryCase; 6] = [Self::I, Self::II, Self::III, Self::IV, Self::V, Self::VI];

    /// Sign `s` and conjugation flag in `α_j = s · [conj] α_{−j}` for the
    /// conjugate-type cases (iii)–(vi).
    fn conj_sign(self, j: i64) -> f64 {
        let even = j % 2 == 0;
        match self {
            Self::III => 1.0,
            Self::IV => -1.0,
            Self::V if even => 1.0,
            Self::V => -1.0,
            Self::VI if even => -1.0,
            Self::VI => 1.0,
            Self::I | Self::II => unreachable!(),
        }
    }

    /// Extra sign in `α_j = s ω^j α_{−j}` for the cases (i) and (ii).
    fn omega_sign(self, j: i64) -> f64 {
        match self {
            Self::II if j % 2 == 0 => -1.0,
            _ => 1.0,
        }
    }
}

/// Match of a symmetry case; `omega` is set for cases (i) and (ii).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryMatch<T: Real> {
    pub case: SymmetryCase,
    pub omega: Option<Cx<T>>,
}

fn omega_case<T: Real>(cfg: &VerblunskyConfig<T>, case: SymmetryCase, tol: T) -> Option<Cx<T>> {
    let top = cfg.max_abs_index();
    let holds = |w: Cx<T>| {
        (0..=top).all(|j| {
            let s = T::lit(case.omega_sign(j));
            (cfg.alpha(j) - w.powi(j as i32) * cfg.alpha(-j) * re(s)).norm() <= tol
        })
    };
    let pivot = (1..=top).find(|&j| cfg.alpha(j) != czero() && cfg.alpha(-j) != czero());
    let Some(j0) = pivot else {
        return holds(cone()).then(cone);
    };
    // ω^{j0} is fixed by the pivot pair; try each of its j0-th roots.
    let target = cfg.alpha(j0) / (cfg.alpha(-j0) * re(T::lit(case.omega_sign(j0))));
    if (target.norm() - T::one()).abs() > tol {
        return None;
    }
    let arg = target.arg();
    let j0f = T::lit(j0 as f64);
    (0..j0)
        .map(|k| {
            let phi = (arg + T::TAU() * T::lit(k as f64)) / j0f;
            cx(phi.cos(), phi.sin())
        })
        .find(|&w| holds(w))
}

/// Every symmetry case the configuration satisfies, within `1e-12`.
pub fn detect_symmetry_case<T: Real>(cfg: &VerblunskyConfig<T>) -> Vec<SymmetryMatch<T>> {
    if cfg.kind != LineKind::FullLine {
        return Vec::new();
    }
    let tol = T::tol(1e-12);
    let top = cfg.max_abs_index();
    let mut out = Vec::new();
    for case in SymmetryCase::ALL {
        match case {
            SymmetryCase::I | SymmetryCase::II => {
                if let Some(w) = omega_case(cfg, case, tol) {
                    out.push(SymmetryMatch { case, omega: Some(w) });
                }
            }
            _ => {
                let ok = (0..=top).all(|j| {
                    let s = T::lit(case.conj_sign(j));
                    (cfg.alpha(j) - cfg.alpha(-j).conj() * re(s)).norm() <= tol
                });
                if ok {
                    out.push(SymmetryMatch { case, omega: None });
                }
            }
        }
    }
    out
}

/// Sum of the positive-side probabilities from `η₀↑` and `η₀↓` after `n`
/// steps of a constant-coin walk in the second form.
pub fn konno_sum_check<T: Real>(coin: &Coin<T>, n: usize) -> Result<T> {
    if coin.form != CoinForm::Second {
        return Err(Error::Validation("the Konno check takes a second-form coin".into()));
    }
    let a = coin.m[0][1].norm();
    let tol = T::tol(1e-12);
    if a < tol || a > T::one() - tol {
        return Err(Error::Parameter {
            name: "|a|",
            value: a.to_f64_lossy(),
            interval: "(0, 1)".into(),
        });
    }
    let m = n as i64 + 2;
    origin_trace(&WalkOperator::coined(coin, -m, m)?, n)
}

/// Result of the Gaussian-wavepacket construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Example934<T: Real> {
    pub a: T,
    pub p_a: T,
    pub p_aprime: T,
    pub p_geo: T,
    /// `|⟨ψ, ξ⟩|` of the normalized initial states.
    pub overlap: T,
}

/// `∫_{(−π/2, 0)} −sin k / √(1 + cos²k) dNormal(a, σ)(k)`.
pub fn packet_velocity_weight<T: Real>(a: T, sigma: T) -> Result<T> {
    let two = T::one() + T::one();
    let norm_c = T::one() / (sigma * (two * T::PI()).sqrt());
    let f = |k: T| {
        let z = (k - a) / sigma;
        let g = (-(z * z) / two).exp() * norm_c;
        -k.sin() / (T::one() + k.cos() * k.cos()).sqrt() * g
    };
    integrate(f, -T::FRAC_PI_2(), T::zero(), 2000, 8)
}

/// Solves `packet_velocity_weight(a, σ) = 1/3` for `a ∈ (−π/2, 0)` by bisection.
pub fn solve_packet_center<T: Real>(sigma: T) -> Result<T> {
    let third = T::one() / T::lit(3.0);
    let (mut lo, mut hi) = (-T::FRAC_PI_2(), T::zero());
    let g = |a: T| packet_velocity_weight(a, sigma).map(|v| v - third);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo.signum() == ghi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change for sigma = {sigma}: g(-pi/2) = {glo}, g(0) = {ghi}"
        )));
    }
    for _ in 0..200 {
        let mid = (lo + hi) / (T::one() + T::one());
        if g(mid)?.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::tol(1e-14) {
            break;
        }
    }
    Ok((lo + hi) / (T::one() + T::one()))
}

/// Gaussian packet `(2σ²/π)^{1/4} e^{−σ²j² + i k j}` on `[−r, r]`, renormalized.
fn packet<T: Real>(sigma: T, k: T, r: i64) -> Vec<Cx<T>> {
    let v: Vec<Cx<T>> = (-r..=r)
        .map(|j| {
            let jf = T::lit(j as f64);
            let amp = (-(sigma * sigma * jf * jf)).exp();
            cx(amp * (k * jf).cos(), amp * (k * jf).sin())
        })
        .collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / re(n)).collect()
}

/// Wavepacket walk with coin `(1/√2)[[1, 1], [−1, 1]]` in the second form
/// approaching `(2/3, 2/3, 1/3)` as `ε, σ₁, σ₂ → 0` and `n → ∞`.
pub fn example_934_game<T: Real>(eps: T, sigma1: T, sigma2: T, n: usize) -> Result<Example934<T>> {
    for (name, v) in [("epsilon", eps), ("sigma1", sigma1), ("sigma2", sigma2)] {
        if !(v > T::zero() && v < T::one()) {
            return Err(Error::Parameter {
                name,
                value: v.to_f64_lossy(),
                interval: "(0, 1)".into(),
            });
        }
    }
    let a = solve_packet_center(sigma2)?;
    let h = re(T::FRAC_1_SQRT_2());
    let coin = Coin::new([[h, h], [-h, h]], CoinForm::Second)?;
    // Packets decay like e^{−σ²j²}; 7/σ keeps the tails below 1e-20.
    let r = (T::lit(7.0) / sigma1.min(sigma2)).ceil().to_f64_lossy() as i64;
    let m = r + n as i64 + 3;
    let phi = packet(sigma1, T::FRAC_PI_2() - eps, r);
    let zeta = packet(sigma2, a, r);
    let spin = [cx(T::zero(), T::one()), cone()];
    let build = |sign: T| {
        let mut amps = vec![czero(); 2 * (2 * m + 1) as usize];
        for (k, (z, f)) in zeta.iter().zip(&phi).enumerate() {
            let base = 2 * (m - r) as usize + 2 * k;
            let c = (*z + *f * re(sign)) * re(T::lit(0.5));
            amps[base] = c * spin[0];
            amps[base + 1] = c * spin[1];
        }
        Wavefunction::normalized(amps)
    };
    let psi = build(T::one())?;
    let xi = build(-T::one())?;
    let overlap = crate::linalg::inner(&psi, &xi).norm();
    let delta = crate::geodesic::dist_round(&psi, &xi);
    let u = WalkOperator::coined(&coin, -m, m)?;
    let to_state = |w: Wavefunction<T>| WalkState::new(-m, w.into_inner());
    let game = walk_geo_game(&u, &to_state(psi)?, &to_state(xi)?, n, delta / (T::one() + T::one()))?;
    Ok(Example934 {
        a,
        p_a: game.p_a,
        p_aprime: game.p_aprime,
        p_geo: game.p_geo,
        overlap,
    })
}
