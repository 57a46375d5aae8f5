//! Field-network machinery: sinusoidal input encoding, batched forward
//! evaluation with exact reverse-mode parameter/input gradients, a
//! finite-difference gradient surrogate for the SDF, geometric sphere
//! initialization, and the Adam optimizer.

pub mod adam;
pub mod encoding;
pub mod init;
pub mod network;
pub mod sdf;

pub use adam::{adam_step, adam_step_default, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use encoding::EncodingSpec;
pub use init::{fibonacci_directions, random_init, sphere_init};
pub use network::{FieldNetwork, ForwardCache, NetworkSpec};
pub use sdf::{
    appearance_eval, sdf_eval, AppearanceBatch, AppearanceInputGrads, AppearanceNetwork, SdfBatch,
    SdfNetwork, SdfSample,
};
