//! Classical observed Markov-chain games.
//!
//! A game is a column-stochastic transition `L`, a winning set `A` and an
//! initial distribution `μ`; the probability of being in `A` at round `n` is
//! `Σ_{i∈A} (L^{n-1} μ)_i`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{pf_fixed_point, FixedPointReport, ProbVector, RealMatrix, StochasticMatrix};
use crate::scalar::Real;

/// Tolerance and iteration budget for limit computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfOptions<T> {
    pub tol: T,
    pub max_iter: u64,
    pub starts: usize,
}

impl<T: Real> Default for PfOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::tol(crate::linalg::DEFAULT_TOL),
            max_iter: crate::linalg::DEFAULT_MAX_ITER,
            starts: 4,
        }
    }
}

impl<T: Real> PfOptions<T> {
    /// Budget for chains whose gap is tiny (the three-state constructions
    /// mix on a scale of `1/ε²`).
    pub fn slow_mixing() -> Self {
        Self {
            max_iter: 1 << 50,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGame<T: Real> {
    transition: StochasticMatrix<T>,
    win_states: BTreeSet<usize>,
    initial: ProbVector<T>,
}

impl<T: Real> ClassicalGame<T> {
    pub fn new(
        transition: StochasticMatrix<T>,
        win_states: impl IntoIterator<Item = usize>,
        initial: ProbVector<T>,
    ) -> Result<Self> {
        let dim = transition.dim();
        let win_states: BTreeSet<usize> = win_states.into_iter().collect();
        if win_states.is_empty() || win_states.len() >= dim {
            return Err(Error::Validation(
                "winning set must be a nonempty strict subset of the states".into(),
            ));
        }
        if let Some(&i) = win_states.iter().find(|&&i| i >= dim) {
            return Err(Error::Validation(format!("winning state {i} out of range for dim {dim}")));
        }
        if initial.dim() != dim {
            return Err(Error::Dimension {
                expected: format!("initial vector of dim {dim}"),
                found: format!("dim {}", initial.dim()),
            });
        }
        Ok(Self {
            transition,
            win_states,
            initial,
        })
    }

    /// Game winning in state 0, starting uniform.
    pub fn first_state(transition: StochasticMatrix<T>) -> Result<Self> {
        let dim = transition.dim();
        Self::new(transition, [0], ProbVector::uniform(dim))
    }

    pub fn transition(&self) -> &StochasticMatrix<T> {
        &self.transition
    }

    pub fn win_states(&self) -> &BTreeSet<usize> {
        &self.win_states
    }

    pub fn initial(&self) -> &ProbVector<T> {
        &self.initial
    }

    pub fn dim(&self) -> usize {
        self.transition.dim()
    }

    fn mass_on_a(&self, v: &[T]) -> T {
        self.win_states.iter().map(|&i| v[i]).sum()
    }
}

/// Applies `m^k` to `v` by binary powering.
pub(crate) fn apply_power<T: Real>(m: &RealMatrix<T>, mut k: u64, v: &[T]) -> Vec<T> {
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

/// Probability of observing the state in `A` at round `n ≥ 1`.
pub fn classical_win_prob<T: Real>(g: &ClassicalGame<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::Validation("round index n starts at 1".into()));
    }
    let v = apply_power(g.transition.matrix(), n - 1, &g.initial);
    Ok(clamp01(g.mass_on_a(&v)))
}

/// Limit of [`classical_win_prob`] via the Perron-Frobenius vector.
pub fn classical_limit<T: Real>(
    g: &ClassicalGame<T>,
    opts: PfOptions<T>,
) -> Result<FixedPointReport<T, T>> {
    let r = pf_fixed_point(&g.transition, opts.tol, opts.max_iter, opts.starts)?;
    Ok(FixedPointReport {
        result: clamp01(g.mass_on_a(&r.result)),
        iterations: r.iterations,
        residual: r.residual,
        converged: r.converged,
    })
}

pub(crate) fn clamp01<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// Game with transition `p·L + (1-p)·L′`, keeping `g`'s initial vector.
pub fn combine_classical<T: Real>(
    g: &ClassicalGame<T>,
    g2: &ClassicalGame<T>,
    p: T,
) -> Result<ClassicalGame<T>> {
    if g.win_states != g2.win_states {
        return Err(Error::Validation("games have different winning sets".into()));
    }
    let transition = g.transition.mix(&g2.transition, p)?;
    ClassicalGame::new(transition, g.win_states.iter().copied(), g.initial.clone())
}

fn check_open_unit(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter {
            name,
            value: x,
            interval: "(0, 1)".into(),
        })
    }
}

/// Validates every entry lies in `[0, 1]` and names the first one that does not.
fn checked_stochastic<T: Real>(label: &str, rows: Vec<Vec<T>>) -> Result<StochasticMatrix<T>> {
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !(x >= T::zero() && x <= T::one()) {
                return Err(Error::EntryOutOfRange {
                    entry: format!("{label}[{}][{}]", i + 1, j + 1),
                    value: x.to_f64_lossy(),
                });
            }
        }
    }
    StochasticMatrix::from_rows(&rows)
}

/// Three-state matrix `T(P_A, ε, s)` whose Perron-Frobenius vector has first
/// entry `P_A` for every `s ∈ [0, 1]`.
pub fn make_t<T: Real>(p_a: T, eps: T, s: T) -> Result<StochasticMatrix<T>> {
    check_open_unit("P_A", p_a.to_f64_lossy())?;
    if !(eps > T::zero()) {
        return Err(Error::Parameter {
            name: "epsilon",
            value: eps.to_f64_lossy(),
            interval: "(0, small]".into(),
        });
    }
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::Parameter {
            name: "s",
            value: s.to_f64_lossy(),
            interval: "[0, 1]".into(),
        });
    }
    let one = T::one();
    let e2 = eps * eps;
    let k = one / p_a - one - eps;
    let denom = one - (one + eps) * p_a;
    if !(denom > T::zero()) {
        return Err(Error::EntryOutOfRange {
            entry: "T[3][2] (denominator 1-(1+ε)P_A)".into(),
            value: denom.to_f64_lossy(),
        });
    }
    let r = p_a * s * eps / denom;
    let rows = vec![
        vec![one - (one - s) * eps - k * e2, e2, one - s],
        vec![k * e2, one - r - e2, s],
        vec![(one - s) * eps, r, T::zero()],
    ];
    checked_stochastic("T", rows)
}

/// Three-state matrix `T′(P′_A, ε)` with Perron-Frobenius first entry `P′_A`.
pub fn make_tprime<T: Real>(p_a: T, eps: T) -> Result<StochasticMatrix<T>> {
    check_open_unit("P_Aprime", p_a.to_f64_lossy())?;
    if !(eps > T::zero()) {
        return Err(Error::Parameter {
            name: "epsilon",
            value: eps.to_f64_lossy(),
            interval: "(0, small]".into(),
        });
    }
    let one = T::one();
    let half = T::lit(0.5);
    let e2 = eps * eps;
    let k = (one - p_a) / p_a * e2;
    let rows = vec![
        vec![one - k, e2, half],
        vec![k, one - e2, half],
        vec![T::zero(), T::zero(), T::zero()],
    ];
    checked_stochastic("T'", rows)
}

/// Largest admissible `ζ` for [`make_s`].
pub fn zeta_max<T: Real>(p_a: T) -> T {
    if p_a <= T::zero() || p_a >= T::one() {
        T::one()
    } else {
        (p_a / (T::one() - p_a)).min(T::one())
    }
}

/// Two-state matrix `S(P_A, ζ)`; `P_A = 0` uses the absorbing-loss form.
pub fn make_s<T: Real>(p_a: T, zeta: T) -> Result<StochasticMatrix<T>> {
    if !(p_a >= T::zero() && p_a <= T::one()) {
        return Err(Error::Parameter {
            name: "P_A",
            value: p_a.to_f64_lossy(),
            interval: "[0, 1]".into(),
        });
    }
    let zmax = zeta_max(p_a);
    if !(zeta > T::zero() && zeta <= zmax * (T::one() + T::epsilon() * T::lit(4.0))) {
        return Err(Error::Parameter {
            name: "zeta",
            value: zeta.to_f64_lossy(),
            interval: format!("(0, {}]", zmax.to_f64_lossy()),
        });
    }
    let one = T::one();
    let rows = if p_a == T::zero() {
        vec![vec![one - zeta, T::zero()], vec![zeta, one]]
    } else {
        let k = (one / p_a - one) * zeta;
        vec![vec![one - k, zeta], vec![k, one - zeta]]
    };
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(clamp01).collect())
        .collect();
    checked_stochastic("S", rows)
}

/// Same construction as [`make_s`], for the primed game.
pub fn make_sprime<T: Real>(p_aprime: T, xi: T) -> Result<StochasticMatrix<T>> {
    make_s(p_aprime, xi)
}

/// One sampled `(P_A, P′_A, P_comb, p)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint<T> {
    pub p_a: T,
    pub p_aprime: T,
    pub p_comb: T,
    pub p: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCheck<T> {
    /// Every sampled combined limit lies in the closed naive interval.
    pub holds: bool,
    pub min: T,
    pub max: T,
    pub samples: usize,
    pub violations: usize,
    pub nonconverged: usize,
}

/// Grid over the admissible interval of `ζ`, with the endpoints pulled inward
/// by `1e-6` where the Perron-Frobenius property fails.
pub fn zeta_grid<T: Real>(p_a: T, grid: usize) -> Vec<T> {
    let clip = T::lit(1e-6);
    let lo = clip;
    let hi = zeta_max(p_a) - clip;
    let n = grid.max(2);
    (0..n)
        .map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1))
        .collect()
}

/// Sweeps `ζ, ξ` and checks the two-state combined limit stays between the
/// individual limits.
pub fn two_state_region_check<T: Real>(
    p_a: T,
    p_aprime: T,
    p: T,
    grid: usize,
) -> Result<RegionCheck<T>> {
    for (name, x) in [("P_A", p_a), ("P_Aprime", p_aprime), ("p", p)] {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::Parameter {
                name,
                value: x.to_f64_lossy(),
                interval: "[0, 1]".into(),
            });
        }
    }
    let zs = zeta_grid(p_a, grid);
    let xs = zeta_grid(p_aprime, grid);
    let lo = p_a.min(p_aprime) - T::tol(1e-9);
    let hi = p_a.max(p_aprime) + T::tol(1e-9);
    let opts = PfOptions::<T>::slow_mixing();
    let values: Vec<Option<T>> = zs
        .par_iter()
        .flat_map_iter(|&z| xs.iter().map(move |&x| (z, x)))
        .map(|(z, x)| -> Result<Option<T>> {
            let s = make_s(p_a, z)?;
            let s2 = make_sprime(p_aprime, x)?;
            let r = pf_fixed_point(&s.mix(&s2, p)?, opts.tol, opts.max_iter, opts.starts)?;
            Ok(r.converged.then(|| r.result[0]))
        })
        .collect::<Result<_>>()?;
    let mut out = RegionCheck {
        holds: true,
        min: T::infinity(),
        max: T::neg_infinity(),
        samples: values.len(),
        violations: 0,
        nonconverged: 0,
    };
    for v in values {
        match v {
            Some(c) => {
                out.min = out.min.min(c);
                out.max = out.max.max(c);
                if c < lo || c > hi {
                    out.violations += 1;
                    out.holds = false;
                }
            }
            None => out.nonconverged += 1,
        }
    }
    Ok(out)
}
