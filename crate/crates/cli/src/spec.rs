//! Game spec files (see `docs/spec-file.md`).
//!
//! Parsing is strict: unknown keys are rejected, and every error carries the
//! line it refers to. serde_json supplies the line for syntax and shape
//! errors; for invariant failures we point at the offending key.

use num_complex::Complex64;
use parrondo_core::classical::{combine_classical, ClassicalGame};
use parrondo_core::geodesic::{EffectOperator, Wavefunction};
use parrondo_core::hidden::{combine_hidden, HiddenPinceNez};
use parrondo_core::linalg::{ComplexMatrix, DensityMatrix, ProbVector, RealMatrix, StochasticMatrix};
use parrondo_core::quantum::{combine_quantum, QuantumPinceNez};
use parrondo_core::walks::{Coin, CoinForm, LineKind, VerblunskyConfig, WalkOperator, WalkState};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::Failure;

/// `[re, im]`.
pub type ComplexEntry = [f64; 2];
pub type ComplexRows = Vec<Vec<ComplexEntry>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSpec {
    pub transition: Vec<Vec<f64>>,
    pub win_states: Option<Vec<usize>>,
    pub initial: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenSpec {
    pub branch_a: Vec<Vec<f64>>,
    pub branch_atilde: Vec<Vec<f64>>,
    pub initial: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    pub kraus_a: Vec<ComplexRows>,
    pub kraus_atilde: Vec<ComplexRows>,
    pub initial: Option<ComplexRows>,
}

/// A game, optionally mixed with a second one of the same model with weight `p`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Combinable<G> {
    pub model: String,
    pub game: G,
    pub game_prime: Option<G>,
    pub p: Option<f64>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicSpec {
    pub model: String,
    pub effect: ComplexRows,
    pub psi: Vec<ComplexEntry>,
    pub xi: Vec<ComplexEntry>,
    pub theta: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    First,
    Second,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    pub matrix: [[ComplexEntry; 2]; 2],
    pub form: Form,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpec {
    pub up: ComplexEntry,
    pub down: ComplexEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    pub model: String,
    pub line: Option<Line>,
    /// `[index, [re, im]]` pairs; unlisted coefficients are zero.
    pub verblunsky: Option<Vec<(i64, ComplexEntry)>>,
    pub coin: Option<CoinSpec>,
    pub psi: SpinSpec,
    pub xi: SpinSpec,
    pub theta: f64,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

/// A walk ready to run, minus the window (which depends on `n`).
#[derive(Debug, Clone)]
pub struct Walk {
    pub generator: WalkGenerator,
    pub psi: (Complex64, Complex64),
    pub xi: (Complex64, Complex64),
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub enum WalkGenerator {
    Cmv(VerblunskyConfig<f64>),
    Coined(Coin<f64>),
}

impl Walk {
    /// Operator and start states on a window wide enough that `n` steps never
    /// reach the boundary.
    pub fn setup(&self, n: u64) -> parrondo_core::Result<(WalkOperator<f64>, WalkState<f64>, WalkState<f64>)> {
        let n = n as i64;
        let (u, lo, hi) = match &self.generator {
            WalkGenerator::Cmv(cfg) => {
                let reach = cfg.support().map(|(j, _)| j.abs() / 2 + 1).max().unwrap_or(0);
                let hi = n + reach + 2;
                let lo = if cfg.kind() == LineKind::HalfLine { 0 } else { -hi };
                (WalkOperator::cmv(cfg, lo, hi)?, lo, hi)
            }
            WalkGenerator::Coined(c) => {
                let hi = n + 2;
                (WalkOperator::coined(c, -hi, hi)?, -hi, hi)
            }
        };
        let psi = WalkState::at_origin(lo, hi, self.psi.0, self.psi.1)?;
        let xi = WalkState::at_origin(lo, hi, self.xi.0, self.xi.1)?;
        Ok((u, psi, xi))
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    Classical(ClassicalGame<f64>),
    Hidden(HiddenPinceNez<f64>, ProbVector<f64>),
    Quantum(QuantumPinceNez<f64>, DensityMatrix<f64>),
    Geodesic {
        effect: EffectOperator<f64>,
        psi: Wavefunction<f64>,
        xi: Wavefunction<f64>,
        theta: f64,
    },
    Walk(Walk),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Classical(_) => "classical",
            Model::Hidden(..) => "hidden",
            Model::Quantum(..) => "quantum",
            Model::Geodesic { .. } => "geodesic",
            Model::Walk(_) => "walk",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub model: Model,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
struct Header {
    model: Option<String>,
}

/// 1-based line of the first `"key"` found after each earlier key in `path`.
fn locate(text: &str, path: &[&str]) -> usize {
    let mut at = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[at..].find(&needle) {
            Some(off) => at += off,
            None => break,
        }
    }
    text[..at].matches('\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn fail(&self, path: &[&str], msg: impl std::fmt::Display) -> Failure {
        Failure::Input(format!("line {}: {}: {msg}", locate(self.text, path), path.join(".")))
    }

    fn check<T>(&self, path: &[&str], r: parrondo_core::Result<T>) -> Result<T, Failure> {
        r.map_err(|e| self.fail(path, e))
    }

    fn parse<T: DeserializeOwned>(&self) -> Result<T, Failure> {
        serde_json::from_str(self.text).map_err(|e| match e.line() {
            0 => Failure::Input(format!("spec: {e}")),
            l => Failure::Input(format!("line {l}: {e}")),
        })
    }
}

fn cx(e: ComplexEntry) -> Complex64 {
    Complex64::new(e[0], e[1])
}

fn cmatrix(rows: &ComplexRows) -> parrondo_core::Result<ComplexMatrix<f64>> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().copied().map(cx).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

fn probe_weight(ctx: &Ctx, p: Option<f64>, has_prime: bool) -> Result<Option<f64>, Failure> {
    match (p, has_prime) {
        (None, false) => Ok(None),
        (Some(p), true) if (0.0..=1.0).contains(&p) => Ok(Some(p)),
        (Some(p), true) => Err(ctx.fail(&["p"], format!("{p} is outside [0, 1]"))),
        (Some(_), false) => Err(ctx.fail(&["p"], "\"p\" needs a \"game_prime\" to mix with")),
        (None, true) => Err(ctx.fail(&["game_prime"], "\"game_prime\" needs a mixing weight \"p\"")),
    }
}

fn build_classical(ctx: &Ctx, key: &str, g: &ClassicalSpec) -> Result<ClassicalGame<f64>, Failure> {
    let t = ctx.check(&[key, "transition"], StochasticMatrix::from_rows(&g.transition))?;
    let d = t.dim();
    let init = match &g.initial {
        Some(v) => ctx.check(&[key, "initial"], ProbVector::new(v.clone()))?,
        None => ProbVector::uniform(d),
    };
    let win = g.win_states.clone().unwrap_or_else(|| vec![0]);
    ctx.check(&[key, "win_states"], ClassicalGame::new(t, win, init))
}

fn build_hidden(ctx: &Ctx, key: &str, g: &HiddenSpec) -> Result<(HiddenPinceNez<f64>, ProbVector<f64>), Failure> {
    let a = ctx.check(&[key, "branch_a"], RealMatrix::from_rows(&g.branch_a))?;
    let at = ctx.check(&[key, "branch_atilde"], RealMatrix::from_rows(&g.branch_atilde))?;
    let pn = ctx.check(&[key, "branch_a"], HiddenPinceNez::new(a, at))?;
    let init = match &g.initial {
        Some(v) => ctx.check(&[key, "initial"], ProbVector::new(v.clone()))?,
        None => ProbVector::uniform(pn.dim()),
    };
    if init.dim() != pn.dim() {
        return Err(ctx.fail(&[key, "initial"], format!("length {} but the game has {} states", init.dim(), pn.dim())));
    }
    Ok((pn, init))
}

fn build_quantum(ctx: &Ctx, key: &str, g: &QuantumSpec) -> Result<(QuantumPinceNez<f64>, DensityMatrix<f64>), Failure> {
    let ops = |field: &str, list: &[ComplexRows]| -> Result<Vec<ComplexMatrix<f64>>, Failure> {
        list.iter().map(|m| ctx.check(&[key, field], cmatrix(m))).collect()
    };
    let (ka, kt) = (ops("kraus_a", &g.kraus_a)?, ops("kraus_atilde", &g.kraus_atilde)?);
    let pn = ctx.check(&[key, "kraus_a"], QuantumPinceNez::new(ka, kt))?;
    let rho = match &g.initial {
        Some(m) => ctx.check(&[key, "initial"], cmatrix(m).and_then(DensityMatrix::new))?,
        None => DensityMatrix::maximally_mixed(pn.dim()),
    };
    if rho.dim() != pn.dim() {
        return Err(ctx.fail(&[key, "initial"], format!("dimension {} but the game acts on {}", rho.dim(), pn.dim())));
    }
    Ok((pn, rho))
}

fn combined<G: DeserializeOwned, B>(
    ctx: &Ctx,
    build: impl Fn(&Ctx, &str, &G) -> Result<B, Failure>,
    mix: impl Fn(&B, &B, f64) -> parrondo_core::Result<B>,
) -> Result<(B, Option<u64>, Option<u64>), Failure> {
    let f: Combinable<G> = ctx.parse()?;
    let p = probe_weight(ctx, f.p, f.game_prime.is_some())?;
    let g = build(ctx, "game", &f.game)?;
    let out = match (p, &f.game_prime) {
        (Some(p), Some(g2)) => {
            let g2 = build(ctx, "game_prime", g2)?;
            ctx.check(&["game_prime"], mix(&g, &g2, p))?
        }
        _ => g,
    };
    Ok((out, f.n, f.seed))
}

fn build_walk(ctx: &Ctx) -> Result<SpecFile, Failure> {
    let f: WalkSpec = ctx.parse()?;
    let generator = match (&f.verblunsky, &f.coin) {
        (Some(coeffs), None) => {
            let kind = match f.line.unwrap_or(Line::Full) {
                Line::Full => LineKind::FullLine,
                Line::Half => LineKind::HalfLine,
            };
            let cfg = VerblunskyConfig::new(kind, coeffs.iter().map(|&(j, a)| (j, cx(a))));
            WalkGenerator::Cmv(ctx.check(&["verblunsky"], cfg)?)
        }
        (None, Some(c)) => {
            if f.line == Some(Line::Half) {
                return Err(ctx.fail(&["line"], "coined walks live on the full line"));
            }
            let m = c.matrix.map(|r| r.map(cx));
            let form = match c.form {
                Form::First => CoinForm::First,
                Form::Second => CoinForm::Second,
            };
            WalkGenerator::Coined(ctx.check(&["coin"], Coin::new(m, form))?)
        }
        _ => return Err(ctx.fail(&["model"], "a walk needs exactly one of \"verblunsky\" and \"coin\"")),
    };
    let walk = Walk {
        generator,
        psi: (cx(f.psi.up), cx(f.psi.down)),
        xi: (cx(f.xi.up), cx(f.xi.down)),
        theta: f.theta,
    };
    // Validate the start states now rather than at run time.
    ctx.check(&["psi"], walk.setup(1).map(|_| ()))?;
    Ok(SpecFile { model: Model::Walk(walk), n: f.n, seed: f.seed })
}

fn build_geodesic(ctx: &Ctx) -> Result<SpecFile, Failure> {
    let f: GeodesicSpec = ctx.parse()?;
    let effect = ctx.check(&["effect"], cmatrix(&f.effect).and_then(EffectOperator::new))?;
    let psi = ctx.check(&["psi"], Wavefunction::new(f.psi.iter().copied().map(cx).collect()))?;
    let xi = ctx.check(&["xi"], Wavefunction::new(f.xi.iter().copied().map(cx).collect()))?;
    if psi.dim() != effect.dim() || xi.dim() != effect.dim() {
        return Err(ctx.fail(&["psi"], "wavefunctions and effect have different dimensions"));
    }
    Ok(SpecFile { model: Model::Geodesic { effect, psi, xi, theta: f.theta }, n: None, seed: f.seed })
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<SpecFile, Failure> {
    let ctx = Ctx { text };
    let header: Header = ctx.parse()?;
    let model = header.model.ok_or_else(|| Failure::Input("line 1: missing top-level \"model\"".into()))?;
    match model.as_str() {
        "classical" => {
            let (g, n, seed) = combined(&ctx, build_classical, combine_classical)?;
            Ok(SpecFile { model: Model::Classical(g), n, seed })
        }
        "hidden" => {
            let ((pn, init), n, seed) = combined(&ctx, build_hidden, |a, b, p| {
                Ok((combine_hidden(&a.0, &b.0, p)?, a.1.clone()))
            })?;
            Ok(SpecFile { model: Model::Hidden(pn, init), n, seed })
        }
        "quantum" => {
            let ((pn, rho), n, seed) = combined(&ctx, build_quantum, |a, b, p| {
                Ok((combine_quantum(&a.0, &b.0, p)?, a.1.clone()))
            })?;
            Ok(SpecFile { model: Model::Quantum(pn, rho), n, seed })
        }
        "geodesic" => build_geodesic(&ctx),
        "walk" => build_walk(&ctx),
        other => Err(ctx.fail(
            &["model"],
            format!("unknown model {other:?}; expected classical, hidden, quantum, geodesic or walk"),
        )),
    }
}
