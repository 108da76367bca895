//! Generator and discriminator definitions, initialization, the Adam
//! optimizer and checkpoint serialization.

mod adam;
pub mod checkpoint;
mod head;
mod spec;

pub use adam::{AdamConfig, AdamState, Direction};
pub use checkpoint::{Checkpoint, NetworkState, RawCheckpoint, RngState};
pub use head::{discriminator_prob, DiscriminatorHead};
pub use spec::{init_params, init_with_rng, DiscriminatorSpec, GeneratorSpec, NetworkSpec};
