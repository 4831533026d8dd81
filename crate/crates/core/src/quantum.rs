//! Markov-Bayesian-quantum games.
//!
//! A quantum pince-nez is a pair of Kraus lists: the branch observed in `A`
//! and the branch observed in `Ã`. Their sum `N` must preserve trace. The
//! probability of observing `A` at round `n` is `tr S_A L N^{n-1} ρ₀`.
//!
//! For the extremal single-Kraus form on `ℂ²` the limit is
//! `w · M⁻¹ · e₄`, where `x = vec(σ) = (σ₁₁, σ₂₁, σ₁₂, σ₂₂)` is the
//! column-stacked fixed state, the first three rows of `M` are the
//! `11, 21, 12` components of `N(σ) − σ` and the last row is the trace.

use std::collections::BTreeSet;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::classical::{clamp01, PfOptions};
use crate::error::{Error, Result};
use crate::geodesic::Extreme;
use crate::hidden::HiddenPinceNez;
use crate::linalg::{
    gram_schmidt_extend, inner, norm, quantum_pf_fixed_point, solve, superoperator, vec_matrix,
    ComplexMatrix, DensityMatrix, FixedPointReport, StochasticMatrix,
};
use crate::scalar::{czero, re, Cx, Real};

const TP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPinceNez<T: Real> {
    dim: usize,
    kraus_a: Vec<ComplexMatrix<T>>,
    kraus_atilde: Vec<ComplexMatrix<T>>,
}

impl<T: Real> QuantumPinceNez<T> {
    pub fn new(kraus_a: Vec<ComplexMatrix<T>>, kraus_atilde: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let dim = kraus_a
            .first()
            .or(kraus_atilde.first())
            .map(|k| k.rows())
            .ok_or_else(|| Error::Validation("pince-nez needs at least one Kraus operator".into()))?;
        for k in kraus_a.iter().chain(&kraus_atilde) {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::Dimension {
                    expected: format!("{dim}x{dim} Kraus operators"),
                    found: format!("{}x{}", k.rows(), k.cols()),
                });
            }
        }
        let pn = Self {
            dim,
            kraus_a,
            kraus_atilde,
        };
        let dev = pn
            .kraus_sum()
            .max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > T::tol(TP_TOL) {
            return Err(Error::Validation(format!(
                "combined channel is not trace preserving: |ΣK†K - I| = {:e}", dev.to_f64_lossy()
            )));
        }
        Ok(pn)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_a(&self) -> &[ComplexMatrix<T>] {
        &self.kraus_a
    }

    pub fn kraus_atilde(&self) -> &[ComplexMatrix<T>] {
        &self.kraus_atilde
    }

    fn kraus_sum(&self) -> ComplexMatrix<T> {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for k in self.kraus_a.iter().chain(&self.kraus_atilde) {
            s = &s + &k.adjoint().matmul(k);
        }
        s
    }

    /// `Σ J†J` over the `A` branch, so that `tr S_A L ρ = tr(E ρ)`.
    pub fn win_effect(&self) -> ComplexMatrix<T> {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus_a {
            s = &s + &k.adjoint().matmul(k);
        }
        s
    }

    pub fn branch_a(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        kraus_apply(&self.kraus_a, rho, self.dim)
    }

    pub fn branch_atilde(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        kraus_apply(&self.kraus_atilde, rho, self.dim)
    }

    /// The hidden channel `N`, i.e. both branches summed.
    pub fn channel(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &self.branch_a(rho) + &self.branch_atilde(rho)
    }

    /// Superoperator of `N` in the column-stacking basis.
    pub fn superoperator(&self) -> ComplexMatrix<T> {
        superoperator(self.dim, |r| self.channel(r))
    }
}

fn kraus_apply<T: Real>(ks: &[ComplexMatrix<T>], rho: &ComplexMatrix<T>, d: usize) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(d, d);
    for k in ks {
        out = &out + &k.matmul(rho).matmul(&k.adjoint());
    }
    out
}

fn check_dim<T: Real>(pn: &QuantumPinceNez<T>, d: usize) -> Result<()> {
    if pn.dim != d {
        return Err(Error::Dimension {
            expected: format!("{}x{}", pn.dim, pn.dim),
            found: format!("{d}x{d}"),
        });
    }
    Ok(())
}

/// The two partial outputs of `L`; their traces sum to `tr ρ`.
pub fn apply_pince_nez<T: Real>(
    pn: &QuantumPinceNez<T>,
    rho: &DensityMatrix<T>,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    check_dim(pn, rho.dim())?;
    Ok((pn.branch_a(rho), pn.branch_atilde(rho)))
}

/// `tr S_A L N^{n-1} ρ₀`.
pub fn quantum_win_prob<T: Real>(pn: &QuantumPinceNez<T>, rho0: &DensityMatrix<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::Validation("round index n starts at 1".into()));
    }
    check_dim(pn, rho0.dim())?;
    let d = pn.dim;
    let rho = if n - 1 <= 64 {
        let mut r = rho0.matrix().clone();
        for _ in 1..n {
            r = pn.channel(&r);
        }
        r
    } else {
        let x = complex_power_apply(&pn.superoperator(), n - 1, &vec_matrix(rho0));
        crate::linalg::unvec_matrix(&x, d)
    };
    Ok(clamp01(pn.win_effect().matmul(&rho).trace().re))
}

fn complex_power_apply<T: Real>(m: &ComplexMatrix<T>, mut k: u64, v: &[Cx<T>]) -> Vec<Cx<T>> {
    let mut out = v.to_vec();
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            out = base.mul_vec(&out);
        }
        k >>= 1;
        if k > 0 {
            base = base.matmul(&base);
        }
    }
    out
}

/// Limit of [`quantum_win_prob`] through the quantum Perron-Frobenius state.
pub fn quantum_limit<T: Real>(
    pn: &QuantumPinceNez<T>,
    opts: PfOptions<T>,
) -> Result<FixedPointReport<T, T>> {
    let ch = (pn.dim, |r: &ComplexMatrix<T>| pn.channel(r));
    let r = quantum_pf_fixed_point(&ch, opts.tol, opts.max_iter, opts.starts)?;
    Ok(FixedPointReport {
        result: clamp01(pn.win_effect().matmul(&r.result).trace().re),
        iterations: r.iterations,
        residual: r.residual,
        converged: r.converged,
    })
}

/// `L″ = pL + (1−p)L′`, realized by scaling the Kraus lists.
pub fn combine_quantum<T: Real>(
    pn: &QuantumPinceNez<T>,
    pn2: &QuantumPinceNez<T>,
    p: T,
) -> Result<QuantumPinceNez<T>> {
    check_dim(pn, pn2.dim)?;
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Parameter {
            name: "p",
            value: p.to_f64_lossy(),
            interval: "[0, 1]".into(),
        });
    }
    let (a, b) = (re(p.sqrt()), re((T::one() - p).sqrt()));
    let scaled = |ks: &[ComplexMatrix<T>], s: Cx<T>| ks.iter().map(|k| k.scale(s)).collect::<Vec<_>>();
    let mut ka = scaled(&pn.kraus_a, a);
    ka.extend(scaled(&pn2.kraus_a, b));
    let mut kt = scaled(&pn.kraus_atilde, a);
    kt.extend(scaled(&pn2.kraus_atilde, b));
    QuantumPinceNez::new(ka, kt)
}

/// Diagonal embedding of a hidden pince-nez: each entry `B_ij` becomes the
/// Kraus operator `√B_ij |e_i⟩⟨e_j|` in the same branch.
pub fn embed_hidden<T: Real>(h: &HiddenPinceNez<T>) -> Result<QuantumPinceNez<T>> {
    let d = h.dim();
    let ops = |b: &crate::linalg::RealMatrix<T>| {
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if b[(i, j)] > T::zero() {
                    let mut k = ComplexMatrix::zeros(d, d);
                    k[(i, j)] = re(b[(i, j)].sqrt());
                    out.push(k);
                }
            }
        }
        out
    };
    QuantumPinceNez::new(ops(h.branch_a()), ops(h.branch_atilde()))
}

/// Block embedding of an observed chain: the state is a basis projector and
/// landing in a winning state is observed as `A`.
pub fn embed_classical<T: Real>(
    t: &StochasticMatrix<T>,
    win_states: &BTreeSet<usize>,
) -> Result<QuantumPinceNez<T>> {
    let d = t.dim();
    if win_states.iter().any(|&i| i >= d) {
        return Err(Error::Validation(format!("winning state outside 0..{d}")));
    }
    let mut a = crate::linalg::RealMatrix::zeros(d, d);
    let mut b = crate::linalg::RealMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if win_states.contains(&i) {
                a[(i, j)] = t[(i, j)];
            } else {
                b[(i, j)] = t[(i, j)];
            }
        }
    }
    embed_hidden(&HiddenPinceNez::new(a, b)?)
}

/// Parameters `u, v` of the single-Kraus pince-nez on `ℂ²` with
/// `J = [[u₁, v₁], [u₂, v₂]]` and `K = [[u₃, v₃], [u₄, v₄]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalParams<T: Real> {
    pub u: [Cx<T>; 4],
    pub v: [Cx<T>; 4],
}

impl<T: Real> ExtremalParams<T> {
    pub fn new(u: [Cx<T>; 4], v: [Cx<T>; 4]) -> Result<Self> {
        let tol = T::tol(1e-10);
        let (nu, nv, ov) = (norm(&u), norm(&v), inner(&u, &v).norm());
        if (nu * nu - T::one()).abs() > tol || (nv * nv - T::one()).abs() > tol || ov > tol {
            return Err(Error::Validation(format!(
                "u, v must be orthonormal: |u|² = {}, |v|² = {}, |⟨u,v⟩| = {:e}",
                nu * nu,
                nv * nv,
                ov.to_f64_lossy()
            )));
        }
        Ok(Self { u, v })
    }

    /// Gram-Schmidt of arbitrary `u, v`; fails when they are nearly parallel.
    pub fn orthonormalized(u: [Cx<T>; 4], v: [Cx<T>; 4]) -> Result<Self> {
        let mut basis = Vec::new();
        gram_schmidt_extend(&mut basis, [u.to_vec(), v.to_vec()], T::tol(1e-8));
        if basis.len() != 2 {
            return Err(Error::Validation("u and v are linearly dependent".into()));
        }
        let arr = |x: &Vec<Cx<T>>| [x[0], x[1], x[2], x[3]];
        Self::new(arr(&basis[0]), arr(&basis[1]))
    }

    pub fn kraus(&self) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
        let (u, v) = (&self.u, &self.v);
        let j = ComplexMatrix::from_row_major(2, 2, vec![u[0], v[0], u[1], v[1]]).expect("2x2");
        let k = ComplexMatrix::from_row_major(2, 2, vec![u[2], v[2], u[3], v[3]]).expect("2x2");
        (j, k)
    }

    pub fn to_pince_nez(&self) -> QuantumPinceNez<T> {
        let (j, k) = self.kraus();
        QuantumPinceNez::new(vec![j], vec![k]).expect("orthonormal u, v give a channel")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WMPair<T: Real> {
    pub w: [Cx<T>; 4],
    pub m: [[Cx<T>; 4]; 4],
}

impl<T: Real> WMPair<T> {
    /// `p·(w, M) + (1−p)·(w′, M′)`; the trace row stays `(1, 0, 0, 1)`.
    pub fn mix(&self, other: &Self, p: T) -> Self {
        let q = T::one() - p;
        let mut out = self.clone();
        for c in 0..4 {
            out.w[c] = self.w[c] * p + other.w[c] * q;
            for r in 0..3 {
                out.m[r][c] = self.m[r][c] * p + other.m[r][c] * q;
            }
        }
        out
    }

    /// `M⁻¹ e₄`, the column-stacked fixed state.
    pub fn fixed_state(&self) -> Result<[Cx<T>; 4]> {
        let m = ComplexMatrix::from_rows(&self.m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
        let e4 = [czero(), czero(), czero(), re(T::one())];
        match solve(&m, &e4, T::tol(1e-12)) {
            Ok(x) => Ok([x[0], x[1], x[2], x[3]]),
            Err(Error::Singular) => Err(Error::NoFixedPoint(
                "M is singular: the channel has no unique fixed state".into(),
            )),
            Err(e) => Err(e),
        }
    }

    /// `w · M⁻¹ · e₄`.
    pub fn limit(&self) -> Result<T> {
        let x = self.fixed_state()?;
        let z: Cx<T> = self.w.iter().zip(&x).map(|(a, b)| *a * *b).sum();
        let scale = x.iter().map(|c| c.norm()).fold(T::one(), T::max);
        if z.im.abs() > T::tol(1e-9) * scale {
            return Err(Error::Numerical(format!("w·M⁻¹e₄ has imaginary part {}", z.im)));
        }
        Ok(z.re)
    }
}

pub fn build_wm<T: Real>(params: &ExtremalParams<T>) -> WMPair<T> {
    let (j, k) = params.kraus();
    let mut w = [czero(); 4];
    let mut m = [[czero(); 4]; 4];
    // Column index c = i + 2j' addresses σ_{i j'}; row r = a + 2b addresses N(σ)_{ab}.
    for c in 0..4 {
        let (i, jj) = (c % 2, c / 2);
        w[c] = (0..2).map(|a| j[(a, i)] * j[(a, jj)].conj()).sum();
        for r in 0..3 {
            let (a, b) = (r % 2, r / 2);
            m[r][c] = j[(a, i)] * j[(b, jj)].conj() + k[(a, i)] * k[(b, jj)].conj();
            if r == c {
                m[r][c] -= re(T::one());
            }
        }
    }
    m[3] = [re(T::one()), czero(), czero(), re(T::one())];
    WMPair { w, m }
}

pub fn quantum_limit_via_wm<T: Real>(params: &ExtremalParams<T>) -> Result<T> {
    build_wm(params).limit()
}

/// Combined limit of two extremal games mixed with weight `p`.
pub fn combined_limit_via_wm<T: Real>(a: &ExtremalParams<T>, b: &ExtremalParams<T>, p: T) -> Result<T> {
    build_wm(a).mix(&build_wm(b), p).limit()
}

// ---------------------------------------------------------------------------
// Region optimizer

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Feasibility tolerance on the two constraints.
    pub tol: f64,
    /// Nelder-Mead iterations per restart.
    pub max_iters: u64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 0,
            tol: 1e-6,
            max_iters: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegionResult {
    pub value: f64,
    pub game: ExtremalParams<f64>,
    pub game_prime: ExtremalParams<f64>,
    /// Limits of the two games actually reached, for the record.
    pub p_a: f64,
    pub p_aprime: f64,
    pub feasible_restarts: usize,
}

/// Penalties sit above every feasible objective value.
const INFEASIBLE: f64 = 4.0;

/// Rotates the Kraus pair `(J, K) ↦ (cJ + s e^{iφ}K, −s e^{−iφ}J + cK)`.
/// This leaves `N` and its fixed state alone and moves `P_A` along
/// `½ + (a−½)cos 2t + |h| sin 2t` with `h = tr(J†Kσ)`, so any target within
/// `½ ± √((a−½)² + |h|²)` is hit exactly. Returns the shortfall otherwise.
fn project_to_target(params: &ExtremalParams<f64>, target: f64) -> std::result::Result<ExtremalParams<f64>, f64> {
    let x = build_wm(params).fixed_state().map_err(|_| INFEASIBLE)?;
    let (u, v) = (&params.u, &params.v);
    // x[i + 2j] = σ_ij; J = [u₁₂ | v₁₂], K = [u₃₄ | v₃₄] as columns.
    let col = |i: usize, lo: usize| if i == 0 { [u[lo], u[lo + 1]] } else { [v[lo], v[lo + 1]] };
    let mut a = 0.0;
    let mut h = Cx::new(0.0, 0.0);
    for i in 0..2 {
        for jj in 0..2 {
            let s = x[jj + 2 * i];
            let (ji, jj_) = (col(i, 0), col(jj, 0));
            let kj = col(jj, 2);
            // (J†J)_{ij} and (J†K)_{ij}
            let jtj: Cx<f64> = (0..2).map(|r| ji[r].conj() * jj_[r]).sum();
            let jtk: Cx<f64> = (0..2).map(|r| ji[r].conj() * kj[r]).sum();
            a += (jtj * s).re;
            h += jtk * s;
        }
    }
    let rad = ((a - 0.5).powi(2) + h.norm_sqr()).sqrt();
    let q = target - 0.5;
    if q.abs() > rad {
        return Err(q.abs() - rad);
    }
    let beta = h.norm().atan2(a - 0.5);
    let acos = (q / rad).clamp(-1.0, 1.0).acos();
    let wrap = |x: f64| {
        let y = x.rem_euclid(2.0 * std::f64::consts::PI);
        if y > std::f64::consts::PI {
            y - 2.0 * std::f64::consts::PI
        } else {
            y
        }
    };
    let (t1, t2) = (wrap(beta + acos) / 2.0, wrap(beta - acos) / 2.0);
    let t = if t1.abs() <= t2.abs() { t1 } else { t2 };
    let (c, s) = (t.cos(), t.sin());
    let ph = if h.norm() > 0.0 { Cx::from_polar(1.0, -h.arg()) } else { Cx::new(1.0, 0.0) };
    let rot = |w: &[Cx<f64>; 4]| {
        [
            w[0] * c + ph * w[2] * s,
            w[1] * c + ph * w[3] * s,
            -ph.conj() * w[0] * s + w[2] * c,
            -ph.conj() * w[1] * s + w[3] * c,
        ]
    };
    Ok(ExtremalParams {
        u: rot(u),
        v: rot(v),
    })
}

fn params_from_raw(x: &[f64]) -> Option<ExtremalParams<f64>> {
    let c = |k: usize| [0, 1, 2, 3].map(|i| Cx::new(x[k + 2 * i], x[k + 2 * i + 1]));
    ExtremalParams::orthonormalized(c(0), c(8)).ok()
}

struct RegionProblem {
    p: f64,
    targets: (f64, f64),
    sign: f64,
}

impl RegionProblem {
    /// Projected parameter pair, or the total constraint shortfall.
    fn feasible(&self, x: &[f64]) -> std::result::Result<(ExtremalParams<f64>, ExtremalParams<f64>), f64> {
        let a = params_from_raw(&x[..16]).ok_or(INFEASIBLE)?;
        let b = params_from_raw(&x[16..]).ok_or(INFEASIBLE)?;
        match (project_to_target(&a, self.targets.0), project_to_target(&b, self.targets.1)) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            (ra, rb) => Err(ra.err().unwrap_or(0.0) + rb.err().unwrap_or(0.0)),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self.feasible(x) {
            Ok((a, b)) => match combined_limit_via_wm(&a, &b, self.p) {
                Ok(v) => self.sign * v,
                Err(_) => INFEASIBLE,
            },
            Err(short) => INFEASIBLE + short,
        }
    }
}

impl CostFunction for RegionProblem {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(x))
    }
}

fn nelder_mead(prob: &RegionProblem, x0: Vec<f64>, step: f64, iters: u64) -> (Vec<f64>, f64) {
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut y = x0.clone();
        y[i] += step;
        simplex.push(y);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .expect("positive tolerance");
    let res = Executor::new(
        RegionProblem {
            p: prob.p,
            targets: prob.targets,
            sign: prob.sign,
        },
        solver,
    )
    .configure(|s| s.max_iters(iters))
    .run();
    match res {
        Ok(r) => {
            let st = r.state();
            let x = st.get_best_param().cloned().unwrap_or(x0);
            let f = prob.eval(&x);
            (x, f)
        }
        Err(_) => {
            let f = prob.eval(&x0);
            (x0, f)
        }
    }
}

/// One seeded local search: random start, then Nelder-Mead restarted around
/// the incumbent with a shrinking simplex.
fn one_restart(prob: &RegionProblem, seed: u64, index: usize, iters: u64) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut x: Vec<f64> = (0..32).map(|_| rng.sample(StandardNormal)).collect();
    let mut f = prob.eval(&x);
    for step in [0.5, 0.1, 0.02] {
        let (y, g) = nelder_mead(prob, x.clone(), step, iters);
        if g <= f {
            x = y;
            f = g;
        }
    }
    (x, f)
}

/// Extremizes the combined limit over pairs of extremal games whose own
/// limits are `P_A` and `P′_A`. Deterministic given `opts`.
pub fn quantum_region_extreme(
    p: f64,
    p_a: f64,
    p_aprime: f64,
    which: Extreme,
    opts: &RegionOptions,
) -> Result<QuantumRegionResult> {
    for (name, x) in [("p", p), ("P_A", p_a), ("P_Aprime", p_aprime)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Parameter {
                name,
                value: x,
                interval: "(0, 1)".into(),
            });
        }
    }
    if opts.restarts == 0 {
        return Err(Error::Validation("need at least one restart".into()));
    }
    // (L, L′, p) and (L′, L, 1−p) give the same combined game; always solve
    // one orientation so mirrored cells agree exactly.
    if p > 0.5 || (p == 0.5 && p_a > p_aprime) {
        let r = quantum_region_extreme(1.0 - p, p_aprime, p_a, which, opts)?;
        return Ok(QuantumRegionResult {
            game: r.game_prime,
            game_prime: r.game,
            p_a: r.p_aprime,
            p_aprime: r.p_a,
            ..r
        });
    }
    let prob = RegionProblem {
        p,
        targets: (p_a, p_aprime),
        sign: if which == Extreme::Min { 1.0 } else { -1.0 },
    };
    let runs: Vec<(Vec<f64>, f64)> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| one_restart(&prob, opts.seed, i, opts.max_iters))
        .collect();
    let mut best: Option<QuantumRegionResult> = None;
    let mut feasible = 0;
    for (x, _) in &runs {
        let Ok((a, b)) = prob.feasible(x) else { continue };
        let (Ok(la), Ok(lb), Ok(v)) = (
            quantum_limit_via_wm(&a),
            quantum_limit_via_wm(&b),
            combined_limit_via_wm(&a, &b, p),
        ) else {
            continue;
        };
        if (la - p_a).abs() > opts.tol || (lb - p_aprime).abs() > opts.tol {
            continue;
        }
        feasible += 1;
        let better = match &best {
            None => true,
            Some(cur) => prob.sign * v < prob.sign * cur.value,
        };
        if better {
            best = Some(QuantumRegionResult {
                value: v,
                game: a,
                game_prime: b,
                p_a: la,
                p_aprime: lb,
                feasible_restarts: 0,
            });
        }
    }
    let mut best = best.ok_or(Error::Infeasible {
        restarts: opts.restarts,
    })?;
    best.feasible_restarts = feasible;
    Ok(best)
}

pub fn quantum_region_min(p: f64, p_a: f64, p_aprime: f64, opts: &RegionOptions) -> Result<QuantumRegionResult> {
    quantum_region_extreme(p, p_a, p_aprime, Extreme::Min, opts)
}

pub fn quantum_region_max(p: f64, p_a: f64, p_aprime: f64, opts: &RegionOptions) -> Result<QuantumRegionResult> {
    quantum_region_extreme(p, p_a, p_aprime, Extreme::Max, opts)
}

/// One cell of a region scan; failed cells keep NaN extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegionCell {
    pub p_a: f64,
    pub p_aprime: f64,
    pub min: f64,
    pub max: f64,
    pub converged: bool,
}

/// Interior `K × K` grid `{1, …, K}/(K+1)` squared, row-major in `P_A`.
pub fn region_grid(k: usize) -> Vec<(f64, f64)> {
    let c = |i: usize| (i + 1) as f64 / (k + 1) as f64;
    (0..k).flat_map(|i| (0..k).map(move |j| (c(i), c(j)))).collect()
}

/// Runs the optimizer on every grid point. `with_max` also fills the
/// maximum column; otherwise it stays NaN.
pub fn region_scan(p: f64, grid: &[(f64, f64)], with_max: bool, opts: &RegionOptions) -> Vec<QuantumRegionCell> {
    grid.iter()
        .map(|&(a, b)| {
            let lo = quantum_region_min(p, a, b, opts);
            let hi = if with_max {
                quantum_region_max(p, a, b, opts).map(|r| r.value)
            } else {
                Ok(f64::NAN)
            };
            QuantumRegionCell {
                p_a: a,
                p_aprime: b,
                min: lo.as_ref().map(|r| r.value).unwrap_or(f64::NAN),
                max: *hi.as_ref().unwrap_or(&f64::NAN),
                converged: lo.is_ok() && hi.is_ok(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dilation

/// Isometry `V: ℂ^d → ℂ² ⊗ ℂ^d ⊗ ℂ^m` (register, system, environment) with
/// `Vφ = |A⟩⊗Σ J_iφ⊗|i⟩ + |Ã⟩⊗Σ K_iφ⊗|i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation<T: Real> {
    pub v: ComplexMatrix<T>,
    pub dim: usize,
    pub env: usize,
}

impl<T: Real> Dilation<T> {
    fn index(&self, reg: usize, sys: usize, env: usize) -> usize {
        (reg * self.dim + sys) * self.env + env
    }

    /// Projector onto register value `c` (0 for `A`, 1 for `Ã`).
    pub fn register_projector(&self, c: usize) -> ComplexMatrix<T> {
        let n = 2 * self.dim * self.env;
        let mut p = ComplexMatrix::zeros(n, n);
        for s in 0..self.dim {
            for e in 0..self.env {
                let k = self.index(c, s, e);
                p[(k, k)] = re(T::one());
            }
        }
        p
    }

    /// Unitary on register ⊗ system ⊗ environment that agrees with `V` on
    /// inputs `|A⟩ ⊗ φ ⊗ |0⟩`.
    pub fn unitary(&self) -> Result<ComplexMatrix<T>> {
        let n = 2 * self.dim * self.env;
        let mut basis: Vec<Vec<Cx<T>>> = (0..self.dim).map(|j| self.v.column(j)).collect();
        let unit = (0..n).map(|k| {
            let mut e = vec![czero(); n];
            e[k] = re(T::one());
            e
        });
        gram_schmidt_extend(&mut basis, unit, T::tol(1e-8));
        if basis.len() != n {
            return Err(Error::Numerical("unitary completion failed".into()));
        }
        let inputs: Vec<usize> = (0..self.dim).map(|s| self.index(0, s, 0)).collect();
        let mut rest = (0..n).filter(|k| !inputs.contains(k));
        let mut u = ComplexMatrix::zeros(n, n);
        for (b, col) in basis.iter().enumerate() {
            let target = if b < self.dim { inputs[b] } else { rest.next().expect("n columns") };
            for (i, z) in col.iter().enumerate() {
                u[(i, target)] = *z;
            }
        }
        Ok(u)
    }

    /// The same unitary with factors reordered to system ⊗ (register ⊗
    /// environment), for [`extract_pince_nez`].
    pub fn system_first_unitary(&self) -> Result<ComplexMatrix<T>> {
        let u = self.unitary()?;
        let (d, m) = (self.dim, self.env);
        let perm = |k: usize| {
            let (e, rest) = (k % m, k / m);
            let (s, r) = (rest % d, rest / d);
            s * 2 * m + r * m + e
        };
        let n = u.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm(i), perm(j))] = u[(i, j)];
            }
        }
        Ok(out)
    }
}

pub fn dilate_pince_nez<T: Real>(pn: &QuantumPinceNez<T>) -> Result<Dilation<T>> {
    let d = pn.dim;
    let m = pn.kraus_a.len().max(pn.kraus_atilde.len()).max(1);
    let mut dil = Dilation {
        v: ComplexMatrix::zeros(2 * d * m, d),
        dim: d,
        env: m,
    };
    for (c, ks) in [&pn.kraus_a, &pn.kraus_atilde].into_iter().enumerate() {
        for (e, k) in ks.iter().enumerate() {
            for s in 0..d {
                for j in 0..d {
                    let row = dil.index(c, s, e);
                    dil.v[(row, j)] = k[(s, j)];
                }
            }
        }
    }
    if !dil.v.is_isometry(T::tol(1e-10)) {
        return Err(Error::Validation("dilation is not an isometry".into()));
    }
    Ok(dil)
}

/// Joint probabilities of the `2ⁿ` observation sequences, propagating the
/// branch maps. Bit `k` of the index is the outcome of round `k+1`
/// (0 for `A`).
pub fn chain_joint_probs<T: Real>(pn: &QuantumPinceNez<T>, rho0: &DensityMatrix<T>, n: usize) -> Result<Vec<T>> {
    check_dim(pn, rho0.dim())?;
    let mut states = vec![rho0.matrix().clone()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(states.len() * 2);
        // Lower half keeps earlier bits; the new round sets the top bit.
        for c in 0..2 {
            for r in &states {
                next.push(if c == 0 { pn.branch_a(r) } else { pn.branch_atilde(r) });
            }
        }
        states = next;
    }
    Ok(states.iter().map(|r| r.trace().re).collect())
}

/// The same probabilities from a purified evolution: the system is entangled
/// with a reference, each round couples it to a fresh register and
/// environment through the dilation unitary, and the registers are measured
/// jointly at the end.
pub fn dilated_joint_probs<T: Real>(dil: &Dilation<T>, rho0: &DensityMatrix<T>, n: usize) -> Result<Vec<T>> {
    let d = dil.dim;
    if rho0.dim() != d {
        return Err(Error::Dimension {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", rho0.dim(), rho0.dim()),
        });
    }
    let u = dil.unitary()?;
    let anc = 2 * dil.env;
    // Purification |Ψ⟩ = Σ_j |j⟩_ref ⊗ F e_j with F F† = ρ₀.
    let factor = psd_factor(rho0.matrix());
    // Layout: ref (d) ⊗ sys (d) ⊗ anc_1 ⊗ … ⊗ anc_n, anc_k = reg ⊗ env.
    let tail = anc.pow(n as u32);
    let total = d * d * tail;
    let mut psi = vec![czero::<T>(); total];
    for j in 0..d {
        for s in 0..d {
            psi[(j * d + s) * tail] = factor[(s, j)];
        }
    }
    for round in 0..n {
        // anc_round sits at stride anc^(n-1-round) in the tail index.
        let stride = anc.pow((n - 1 - round) as u32);
        let mut out = vec![czero::<T>(); total];
        for (idx, amp) in psi.iter().enumerate() {
            if *amp == czero() {
                continue;
            }
            let t = idx % tail;
            let head = idx / tail;
            let (r, s) = (head / d, head % d);
            let a = (t / stride) % anc;
            let (reg, env) = (a / dil.env, a % dil.env);
            let col = dil.index(reg, s, env);
            for row in 0..u.rows() {
                let z = u[(row, col)];
                if z == czero() {
                    continue;
                }
                let (reg2, rest) = (row / (d * dil.env), row % (d * dil.env));
                let (s2, env2) = (rest / dil.env, rest % dil.env);
                let a2 = reg2 * dil.env + env2;
                let t2 = t - a * stride + a2 * stride;
                out[(r * d + s2) * tail + t2] += z * *amp;
            }
        }
        psi = out;
    }
    let mut probs = vec![T::zero(); 1 << n];
    for (idx, amp) in psi.iter().enumerate() {
        let t = idx % tail;
        let mut key = 0;
        for round in 0..n {
            let stride = anc.pow((n - 1 - round) as u32);
            let reg = ((t / stride) % anc) / dil.env;
            key |= reg << round;
        }
        probs[key] += amp.norm_sqr();
    }
    Ok(probs)
}

/// Lower-triangular `F` with `F F† = ρ`; pivots below round-off are treated
/// as zero so rank-deficient states work too.
fn psd_factor<T: Real>(rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d = rho.rows();
    let mut f = ComplexMatrix::zeros(d, d);
    let tiny = T::tol(1e-14);
    for j in 0..d {
        let mut diag = rho[(j, j)].re;
        for k in 0..j {
            diag -= f[(j, k)].norm_sqr();
        }
        if diag <= tiny {
            continue;
        }
        let l = diag.sqrt();
        f[(j, j)] = re(l);
        for i in j + 1..d {
            let mut s = rho[(i, j)];
            for k in 0..j {
                s -= f[(i, k)] * f[(j, k)].conj();
            }
            f[(i, j)] = s / re(l);
        }
    }
    f
}

/// Branch maps `ρ ↦ tr_anc[(I⊗Q_C) U (ρ⊗ψ₁ψ₁*) U† (I⊗Q_C)]` for a unitary on
/// system ⊗ ancilla, as Kraus operators `(I⊗⟨e_j|)(I⊗Q_C) U (I⊗ψ₁)`.
pub fn extract_pince_nez<T: Real>(
    u: &ComplexMatrix<T>,
    sys_dim: usize,
    psi1: &[Cx<T>],
    projectors: [&ComplexMatrix<T>; 2],
) -> Result<QuantumPinceNez<T>> {
    let m = psi1.len();
    if !u.is_square() || u.rows() != sys_dim * m {
        return Err(Error::Dimension {
            expected: format!("{0}x{0} unitary", sys_dim * m),
            found: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    if !u.is_unitary(T::tol(1e-10)) {
        return Err(Error::Validation("U is not unitary".into()));
    }
    if (norm(psi1) - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::Validation("ψ₁ must have unit length".into()));
    }
    let [qa, qb] = projectors;
    let tol = T::tol(1e-10);
    let id = ComplexMatrix::identity(m);
    let ok = qa.rows() == m
        && qb.rows() == m
        && qa.matmul(qa).max_abs_diff(qa) <= tol
        && qb.matmul(qb).max_abs_diff(qb) <= tol
        && qa.is_hermitian(tol)
        && qb.is_hermitian(tol)
        && (qa + qb).max_abs_diff(&id) <= tol;
    if !ok {
        return Err(Error::Validation(
            "projectors must be orthogonal and sum to the identity".into(),
        ));
    }
    // U (I⊗ψ₁): sys_dim·m × sys_dim.
    let w = ComplexMatrix::from_fn(sys_dim * m, sys_dim, |row, j| {
        (0..m).map(|b| u[(row, j * m + b)] * psi1[b]).sum()
    });
    let branch = |q: &ComplexMatrix<T>| {
        let mut ks = Vec::new();
        for e in 0..m {
            let k = ComplexMatrix::from_fn(sys_dim, sys_dim, |s, j| {
                (0..m).map(|b| q[(e, b)] * w[(s * m + b, j)]).sum()
            });
            if k.frobenius_norm() > T::tol(1e-14) {
                ks.push(k);
            }
        }
        ks
    };
    QuantumPinceNez::new(branch(qa), branch(qb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_density, random_extremal_params};
    use crate::scalar::cxf;

    fn c(a: f64) -> Cx<f64> {
        cxf(a, 0.0)
    }

    fn projective() -> QuantumPinceNez<f64> {
        let e = ComplexMatrix::diag(&[c(1.0), c(0.0)]);
        let f = ComplexMatrix::diag(&[c(0.0), c(1.0)]);
        QuantumPinceNez::new(vec![e], vec![f]).unwrap()
    }

    #[test]
    fn projective_measurement_splits_mixed_state() {
        let pn = projective();
        let rho = DensityMatrix::maximally_mixed(2);
        let (a, b) = apply_pince_nez(&pn, &rho).unwrap();
        assert!((a.trace().re - 0.5).abs() < 1e-15 && (b.trace().re - 0.5).abs() < 1e-15);
        for n in [1, 2, 7, 100] {
            assert!((quantum_win_prob(&pn, &rho, n).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_trace_preserving_lists() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(QuantumPinceNez::new(vec![half.clone()], vec![half]).is_err());
        assert!(QuantumPinceNez::<f64>::new(vec![], vec![]).is_err());
        let bad = ExtremalParams::new([c(1.0), c(0.0), c(0.0), c(0.0)], [c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn wm_has_trace_row_and_displayed_w() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let prm = random_extremal_params::<f64>(&mut rng);
            let wm = build_wm(&prm);
            assert_eq!(wm.m[3], [c(1.0), c(0.0), c(0.0), c(1.0)]);
            let (u, v) = (prm.u, prm.v);
            let expect = [
                u[0].norm_sqr() + u[1].norm_sqr(),
                0.0,
                0.0,
                v[0].norm_sqr() + v[1].norm_sqr(),
            ];
            assert!((wm.w[0].re - expect[0]).abs() < 1e-15 && (wm.w[3].re - expect[3]).abs() < 1e-15);
            assert!((wm.w[1] - (u[0].conj() * v[0] + u[1].conj() * v[1])).norm() < 1e-15);
            assert!((wm.w[2] - (u[0] * v[0].conj() + u[1] * v[1].conj())).norm() < 1e-15);
            // Top-left entry of M from the display.
            assert!((wm.m[0][0].re - (u[0].norm_sqr() + u[2].norm_sqr() - 1.0)).abs() < 1e-15);
            assert!((wm.m[1][1] - (u[0].conj() * v[1] + u[2].conj() * v[3] - 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_channel_has_no_fixed_state() {
        let e = |k: usize| {
            let mut x = [c(0.0); 4];
            x[k] = c(1.0);
            x
        };
        let prm = ExtremalParams::new(e(0), e(1)).unwrap();
        assert!(matches!(quantum_limit_via_wm(&prm), Err(Error::NoFixedPoint(_))));
        // A full decay onto e₁ from the same u is fine.
        let prm = ExtremalParams::new(e(0), e(2)).unwrap();
        assert!((quantum_limit_via_wm(&prm).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_hits_target_and_keeps_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hit = 0;
        for k in 0..200 {
            let prm = random_extremal_params::<f64>(&mut rng);
            let target = 0.05 + 0.9 * (k as f64 / 200.0);
            if let Ok(q) = project_to_target(&prm, target) {
                hit += 1;
                assert!((quantum_limit_via_wm(&q).unwrap() - target).abs() < 1e-10);
                let (s1, s2) = (prm.to_pince_nez().superoperator(), q.to_pince_nez().superoperator());
                assert!(s1.max_abs_diff(&s2) < 1e-12);
                ExtremalParams::new(q.u, q.v).unwrap();
            }
        }
        assert!(hit > 100);
    }

    #[test]
    fn combined_channel_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = crate::sampling::random_pince_nez::<f64>(3, 2, &mut rng);
        let b = crate::sampling::random_pince_nez::<f64>(3, 1, &mut rng);
        let m = combine_quantum(&a, &b, 0.3).unwrap();
        let rho = DensityMatrix::new(random_density(3, &mut rng)).unwrap();
        let (x, y) = apply_pince_nez(&m, &rho).unwrap();
        assert!((x.trace().re + y.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_is_interior() {
        let g = region_grid(4);
        assert_eq!(g.len(), 16);
        assert_eq!(g[1], (0.2, 0.4));
    }
}
