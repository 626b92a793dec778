//! Random Fourier-Jacobi series driven by symmetric α-stable processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`jacobi`] and [`quadrature`]: Jacobi weights and polynomials, the
//!   orthonormal basis, Gauss-Jacobi rules and the weighted sup-norm spaces.
//! * [`stable`]: symmetric α-stable variates and independent-increment grids
//!   standing in for `dX(t, ω)` on `[-1, 1]`.
//! * [`integral`]: left-endpoint Stieltjes sums and the random
//!   Fourier-Jacobi coefficients `A_n(ω)`.
//! * [`series`] and [`summation`]: deterministic coefficients, kernels,
//!   partial sums, θ-summation matrices and their regularity conditions.
//! * [`lab`]: coupled Monte Carlo experiments and tail/expectation bounds.
//!
//! The numerical core is generic over [`Scalar`]; the Monte Carlo lab works
//! in `f64`. Concrete aliases for both precisions live at the crate root.

pub mod catalog;
pub mod error;
pub mod integral;
pub mod jacobi;
pub mod lab;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod stable;
pub mod summation;

pub use catalog::FunctionId;
pub use error::{Error, Result};
pub use integral::{BasisTable, RandomCoefficientSet};
pub use jacobi::{GateReport, JacobiParams, WeightedSpaceParams};
pub use quadrature::QuadratureRule;
pub use scalar::Scalar;
pub use series::CoefficientSet;
pub use stable::{GridSpec, SeedInfo, StableIncrements, StableIndex};
pub use summation::{ConditionReport, SummationFamily, SummationMatrix};

pub type JacobiParams64 = JacobiParams<f64>;
pub type WeightedSpaceParams64 = WeightedSpaceParams<f64>;
pub type QuadratureRule64 = QuadratureRule<f64>;
pub type StableIndex64 = StableIndex<f64>;
pub type StableIncrements64 = StableIncrements<f64>;
pub type RandomCoefficientSet64 = RandomCoefficientSet<f64>;
pub type CoefficientSet64 = CoefficientSet<f64>;
pub type SummationMatrix64 = SummationMatrix<f64>;

pub type JacobiParams32 = JacobiParams<f32>;
pub type WeightedSpaceParams32 = WeightedSpaceParams<f32>;
pub type QuadratureRule32 = QuadratureRule<f32>;
pub type StableIndex32 = StableIndex<f32>;
pub type StableIncrements32 = StableIncrements<f32>;
pub type RandomCoefficientSet32 = RandomCoefficientSet<f32>;
pub type CoefficientSet32 = CoefficientSet<f32>;
pub type SummationMatrix32 = SummationMatrix<f32>;
