//! Two-qubit "glocal" dissipative dynamics.
//!
//! Two qubits decay into a mixture (weight `gamma`) of one shared thermal bath
//! and two independent local baths. The crate builds the Lindblad generator,
//! evolves states numerically and (at `gamma = 1`, `n_g = 0`) in closed form,
//! computes stationary states, exposes the dynamical map as Choi matrices and
//! Kraus sets, and evaluates the concurrence and entangling power of the
//! stationary map.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`.
//!
//! ```
//! use glocal::{entanglement, ModelParams};
//!
//! let p = ModelParams::new(0.9, 0.0, 0.5).unwrap();
//! let e = entanglement::entangling_power_closed_form(&p, entanglement::ClosedFormMode::Exact).unwrap();
//! assert!(e.value > 0.0);
//! ```

pub mod channel;
pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod model;
pub mod numerics;
pub mod scalar;
pub mod selftest;
pub mod steady;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = numerics::CMatrix<f64>;
pub type ComplexVector = numerics::CVector<f64>;
pub type EigenDecomposition = numerics::EigenDecomposition<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type DensityMatrix = model::DensityMatrix<f64>;
pub type Liouvillian = model::Liouvillian<f64>;
pub type AnalyticCoefficients = evolution::AnalyticCoefficients<f64>;
pub type RationalCoefficients = steady::RationalCoefficients<f64>;
pub type SteadyCoefficients = steady::SteadyCoefficients<f64>;
pub type ChoiMatrix = channel::ChoiMatrix<f64>;
pub type KrausSet = channel::KrausSet<f64>;
pub type ProductStateParams = entanglement::ProductStateParams<f64>;
pub type EntanglingPowerResult = entanglement::EntanglingPowerResult<f64>;
pub type OptimalNoise = entanglement::OptimalNoise<f64>;

pub use entanglement::{ClosedFormMode, PowerMode};
pub use model::BasisLabel;
