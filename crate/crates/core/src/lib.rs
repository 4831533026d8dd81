//! Numerical laboratory for Parrondo-type games: classical observed and hidden
//! Markov games, Markov-Bayesian-quantum games, the one-round geodesic game and
//! CMV quantum-walk games.
//!
//! All engines are generic over [`Real`] (`f32` or `f64`). The `*64` aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI and the
//! acceptance suite use.

pub mod classical;
pub mod error;
pub mod geodesic;
pub mod hidden;
pub mod linalg;
pub mod quadrature;
pub mod quantum;
pub mod sampling;
pub mod scalar;
pub mod walks;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type RealMatrix64 = linalg::RealMatrix<f64>;
pub type StochasticMatrix64 = linalg::StochasticMatrix<f64>;
pub type ProbVector64 = linalg::ProbVector<f64>;
pub type DensityMatrix64 = linalg::DensityMatrix<f64>;
pub type Wavefunction64 = geodesic::Wavefunction<f64>;
pub type EffectOperator64 = geodesic::EffectOperator<f64>;
pub type BMatrix64 = geodesic::BMatrix<f64>;
pub type WalkOperator64 = walks::WalkOperator<f64>;
pub type WalkState64 = walks::WalkState<f64>;
pub type QuantumPinceNez64 = quantum::QuantumPinceNez<f64>;
pub type ExtremalParams64 = quantum::ExtremalParams<f64>;
pub type WMPair64 = quantum::WMPair<f64>;
