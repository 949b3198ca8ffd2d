//! Domain types shared by every other module: kernels, nonlinearities,
//! indexed sequences and auxiliary scalers.

mod kernel;
mod nonlinearity;
mod scaler;
mod sequence;

pub use kernel::{KernelShape, KernelSpec, MAX_MATERIALISED_WINDOW};
pub use nonlinearity::{
    Envelope, EnvelopeShape, NonlinearityShape, NonlinearitySpec, ENVELOPE_SLACK,
};
pub use scaler::ScalerSpec;
pub use sequence::RealSeq;
