//! Classical hidden-Markov games with back-reaction.
//!
//! A pince-nez splits the hidden-state update into the part observed in `A`
//! and the part observed in `Ã`; their sum `N` is the hidden transition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{clamp01, make_t, make_tprime, PfOptions};
use crate::error::{Error, Result};
use crate::linalg::{pf_fixed_point, FixedPointReport, ProbVector, RealMatrix, StochasticMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct HiddenPinceNez<T: Real> {
    branch_a: RealMatrix<T>,
    branch_atilde: RealMatrix<T>,
}

impl<T: Real> HiddenPinceNez<T> {
    pub fn new(branch_a: RealMatrix<T>, branch_atilde: RealMatrix<T>) -> Result<Self> {
        if !branch_a.is_square()
            || branch_a.rows() != branch_atilde.rows()
            || branch_a.cols() != branch_atilde.cols()
        {
            return Err(Error::Dimension {
                expected: "two square branches of equal size".into(),
                found: format!(
                    "{}x{} and {}x{}",
                    branch_a.rows(),
                    branch_a.cols(),
                    branch_atilde.rows(),
                    branch_atilde.cols()
                ),
            });
        }
        for m in [&branch_a, &branch_atilde] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if !(m[(i, j)] >= T::zero()) {
                        return Err(Error::Validation(format!(
                            "branch entry ({i},{j}) = {} is negative",
                            m[(i, j)]
                        )));
                    }
                }
            }
        }
        StochasticMatrix::new(branch_a.lin_comb(T::one(), &branch_atilde, T::one()))?;
        Ok(Self {
            branch_a,
            branch_atilde,
        })
    }

    pub fn dim(&self) -> usize {
        self.branch_a.rows()
    }

    pub fn branch_a(&self) -> &RealMatrix<T> {
        &self.branch_a
    }

    pub fn branch_atilde(&self) -> &RealMatrix<T> {
        &self.branch_atilde
    }

    /// Hidden transition `N = S_ℛ∘L`.
    pub fn hidden_transition(&self) -> StochasticMatrix<T> {
        StochasticMatrix::new(self.branch_a.lin_comb(T::one(), &self.branch_atilde, T::one()))
            .expect("validated at construction")
    }

    /// Row vector `v = 1ᵀ·(S_A∘L)`.
    pub fn win_functional(&self) -> Vec<T> {
        self.branch_a.column_sums()
    }
}

/// `1ᵀ · A · N^{n-1} · μ`.
pub fn hidden_win_prob<T: Real>(pn: &HiddenPinceNez<T>, initial: &ProbVector<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::Validation("round index n starts at 1".into()));
    }
    if initial.dim() != pn.dim() {
        return Err(Error::Dimension {
            expected: format!("initial vector of dim {}", pn.dim()),
            found: format!("dim {}", initial.dim()),
        });
    }
    let v = crate::classical::apply_power(pn.hidden_transition().matrix(), n - 1, initial);
    let w = pn.win_functional();
    Ok(clamp01(w.iter().zip(&v).map(|(a, b)| *a * *b).sum()))
}

/// `v · ν` with `ν` the Perron-Frobenius vector of `N`.
pub fn hidden_limit<T: Real>(
    pn: &HiddenPinceNez<T>,
    opts: PfOptions<T>,
) -> Result<FixedPointReport<T, T>> {
    let r = pf_fixed_point(&pn.hidden_transition(), opts.tol, opts.max_iter, opts.starts)?;
    let w = pn.win_functional();
    Ok(FixedPointReport {
        result: clamp01(w.iter().zip(r.result.iter()).map(|(a, b)| *a * *b).sum()),
        iterations: r.iterations,
        residual: r.residual,
        converged: r.converged,
    })
}

/// Branch-wise `p·pn + (1-p)·pn′`.
pub fn combine_hidden<T: Real>(
    pn: &HiddenPinceNez<T>,
    pn2: &HiddenPinceNez<T>,
    p: T,
) -> Result<HiddenPinceNez<T>> {
    if pn.dim() != pn2.dim() {
        return Err(Error::Dimension {
            expected: format!("dim {}", pn.dim()),
            found: format!("dim {}", pn2.dim()),
        });
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Parameter {
            name: "p",
            value: p.to_f64_lossy(),
            interval: "[0, 1]".into(),
        });
    }
    let q = T::one() - p;
    HiddenPinceNez::new(
        pn.branch_a.lin_comb(p, &pn2.branch_a, q),
        pn.branch_atilde.lin_comb(p, &pn2.branch_atilde, q),
    )
}

/// Open interval of achievable combined limits for two hidden states.
pub fn hidden_bounds<T: Real>(p: T, p_a: T, p_aprime: T) -> (T, T) {
    let one = T::one();
    let lo = (p * p_a).min((one - p) * p_aprime);
    let hi = (one - p + p * p_a).max(p + (one - p) * p_aprime);
    (lo, hi)
}

/// Two-state hidden game reduced to `v = (a, b)` and
/// `N = [[1-c, d], [c, 1-d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHiddenGame<T: Real> {
    v: [T; 2],
    n: StochasticMatrix<T>,
    c: T,
    d: T,
}

impl<T: Real> ReducedHiddenGame<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !(x >= T::zero() && x <= T::one()) {
                return Err(Error::Parameter {
                    name,
                    value: x.to_f64_lossy(),
                    interval: "[0, 1]".into(),
                });
            }
        }
        if c == T::zero() && d == T::zero() {
            return Err(Error::Validation(
                "c = d = 0 leaves both states absorbing; no unique fixed point".into(),
            ));
        }
        if c == T::one() && d == T::one() {
            return Err(Error::Validation(
                "c = d = 1 is a period-two flip; no fixed point is attracting".into(),
            ));
        }
        let one = T::one();
        let n = StochasticMatrix::from_rows(&[vec![one - c, d], vec![c, one - d]])?;
        Ok(Self { v: [a, b], n, c, d })
    }

    pub fn v(&self) -> [T; 2] {
        self.v
    }

    pub fn transition(&self) -> &StochasticMatrix<T> {
        &self.n
    }

    /// `(a, b, c, d)`.
    pub fn params(&self) -> (T, T, T, T) {
        (self.v[0], self.v[1], self.c, self.d)
    }

    /// Convex combination `p·self + (1-p)·other` of both `v` and `N`.
    pub fn mix(&self, other: &Self, p: T) -> Result<Self> {
        let q = T::one() - p;
        let (a, b, c, d) = self.params();
        let (a2, b2, c2, d2) = other.params();
        Self::new(p * a + q * a2, p * b + q * b2, p * c + q * c2, p * d + q * d2)
    }

    /// Limit from the explicit two-state stationary vector `(d, c)/(c + d)`.
    pub fn limit_closed_form(&self) -> T {
        let (a, b, c, d) = self.params();
        (a * d + b * c) / (c + d)
    }
}

/// `v · pf(N)`, with the fixed point found by iteration.
pub fn reduced_limit<T: Real>(rg: &ReducedHiddenGame<T>) -> Result<T> {
    let opts = PfOptions::<T>::slow_mixing();
    let r = pf_fixed_point(&rg.n, opts.tol, opts.max_iter, opts.starts)?;
    if !r.converged {
        return Err(Error::NoFixedPoint(format!(
            "reduced game with c = {}, d = {} (residual {})",
            rg.c, rg.d, r.residual
        )));
    }
    Ok(rg.v[0] * r.result[0] + rg.v[1] * r.result[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenSample<T> {
    pub observed_min: T,
    pub observed_max: T,
    pub violations: usize,
    pub samples: usize,
}

/// Draws one reduced game with `v·pf(N) = target`.
///
/// `(a, c, d)` are uniform and `b` solves the linear constraint; draws with
/// `b ∉ [0, 1]` are rejected. Half the draws then rescale `(c, d)` by a
/// log-uniform factor in `[1e-6, 1]`, which leaves the constraint unchanged and
/// reaches the slow-mixing corner where the combined limit is extremal.
pub fn sample_reduced<T: Real>(target: T, rng: &mut impl Rng) -> ReducedHiddenGame<T> {
    loop {
        let a = T::lit(rng.gen::<f64>());
        let c = T::lit(rng.gen::<f64>());
        let d = T::lit(rng.gen::<f64>());
        if c <= T::zero() {
            continue;
        }
        let b = (target * (c + d) - a * d) / c;
        if !(b >= T::zero() && b <= T::one()) {
            continue;
        }
        let scale = if rng.gen_bool(0.5) {
            T::lit(10f64.powf(-6.0 * rng.gen::<f64>()))
        } else {
            T::one()
        };
        if let Ok(g) = ReducedHiddenGame::new(a, b, c * scale, d * scale) {
            return g;
        }
    }
}

/// Monte Carlo over pairs of reduced games with the prescribed limits,
/// recording the extremes of the combined limit and any escapes from
/// [`hidden_bounds`].
pub fn hidden_region_sample<T: Real>(
    p: T,
    p_a: T,
    p_aprime: T,
    samples: usize,
    seed: u64,
) -> Result<HiddenSample<T>> {
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let (lo, hi) = hidden_bounds(p, p_a, p_aprime);
    let slack = T::tol(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = HiddenSample {
        observed_min: T::infinity(),
        observed_max: T::neg_infinity(),
        violations: 0,
        samples,
    };
    for _ in 0..samples {
        let g = sample_reduced(p_a, &mut rng);
        let g2 = sample_reduced(p_aprime, &mut rng);
        let v = g.mix(&g2, p)?.limit_closed_form();
        out.observed_min = out.observed_min.min(v);
        out.observed_max = out.observed_max.max(v);
        if v < lo - slack || v > hi + slack {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// Two-state family approaching the lower and upper ends of the interval
/// `((1-p)P′_A, p + (1-p)P′_A)` as `s` runs from 0 to 1.
///
/// With `swapped`, the roles of the games are exchanged so that the same sweep
/// approaches `(pP_A, 1-p+pP_A)`.
pub fn epsilon_family<T: Real>(
    p_a: T,
    p_aprime: T,
    eps: T,
    s: T,
    swapped: bool,
) -> Result<(HiddenPinceNez<T>, HiddenPinceNez<T>)> {
    let (fast_target, slow_target) = if swapped {
        (p_aprime, p_a)
    } else {
        (p_a, p_aprime)
    };
    let gated = gated_pince_nez(fast_target, eps)?;
    let spread = spread_pince_nez(slow_target, s)?;
    Ok(if swapped { (spread, gated) } else { (gated, spread) })
}

/// `A`-branch keeps the first column's flow, `Ã` the second's.
fn gated_pince_nez<T: Real>(p_a: T, eps: T) -> Result<HiddenPinceNez<T>> {
    if !(p_a > T::zero() && p_a <= T::one()) {
        return Err(Error::Parameter {
            name: "P_A",
            value: p_a.to_f64_lossy(),
            interval: "(0, 1]".into(),
        });
    }
    let one = T::one();
    let k = (one / p_a - one) * eps;
    if !(eps > T::zero() && k <= one && eps <= one) {
        return Err(Error::Parameter {
            name: "epsilon",
            value: eps.to_f64_lossy(),
            interval: format!("(0, {}]", (p_a / (one - p_a)).min(one).to_f64_lossy()),
        });
    }
    let z = T::zero();
    HiddenPinceNez::new(
        RealMatrix::from_rows(&[vec![one - k, z], vec![k, z]])?,
        RealMatrix::from_rows(&[vec![z, eps], vec![z, one - eps]])?,
    )
}

/// Observation independent of the hidden state: `L′ = P′·N′ ⊕ (1-P′)·N′`.
fn spread_pince_nez<T: Real>(p_a: T, s: T) -> Result<HiddenPinceNez<T>> {
    if !(p_a >= T::zero() && p_a <= T::one() && s >= T::zero() && s <= T::one()) {
        return Err(Error::Validation("P_A and s must lie in [0, 1]".into()));
    }
    let one = T::one();
    let h = T::lit(0.5);
    let n = RealMatrix::from_rows(&[vec![h * (one + s), h * s], vec![h * (one - s), one - h * s]])?;
    HiddenPinceNez::new(n.scale(p_a), n.scale(one - p_a))
}

/// Three-state embedding of the observed games `T`, `T′`: the `A` branch keeps
/// the first row of the transition and the `Ã` branch the other two.
pub fn make_hidden_embedding_3state<T: Real>(
    p_a: T,
    p_aprime: T,
    eps: T,
    s: T,
) -> Result<(HiddenPinceNez<T>, HiddenPinceNez<T>)> {
    let split = |m: &RealMatrix<T>| {
        let keep = |rows: &[usize]| {
            RealMatrix::from_fn(3, 3, |i, j| if rows.contains(&i) { m[(i, j)] } else { T::zero() })
        };
        HiddenPinceNez::new(keep(&[0]), keep(&[1, 2]))
    };
    let t = make_t(p_a, eps, s)?;
    let tp = make_tprime(p_aprime, eps)?;
    Ok((split(t.matrix())?, split(tp.matrix())?))
}
