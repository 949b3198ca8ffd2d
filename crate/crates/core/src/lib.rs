//! Simulation and asymptotic diagnostics for forced sublinear Volterra
//! summation equations
//!
//! ```text
//! x(n+1) = H(n+1) + sum_{j=0}^{n} k(n-j) f(x(j)),   x(0) = xi,
//! ```
//!
//! with a summable kernel `k` and an odd, sublinear nonlinearity `f`.
//!
//! Numeric code is generic over [`Scalar`] (`f32` and `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod fingerprint;
pub mod io;
pub mod forcing;
pub mod scalar;
pub mod seqcore;
pub mod theorems;

pub use engine::{recover_forcing, simulate, volterra_term, SimConfig, SolverKind, SolverMode};
pub use error::{Error, Result};
pub use forcing::{generate, ForcingSpec};
pub use scalar::Scalar;

pub type Kernel = seqcore::KernelSpec<f64>;
pub type Nonlinearity = seqcore::NonlinearitySpec<f64>;
pub type Scaler = seqcore::ScalerSpec<f64>;
pub type Sequence = seqcore::RealSeq<f64>;
pub type Forcing = forcing::ForcingSequence<f64>;
pub type SolutionPath = engine::Path<f64>;
pub type Config = engine::SimConfig<f64>;
