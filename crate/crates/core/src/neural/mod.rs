//! A minimal trainable stack: leaky-ReLU MLPs, a block-diagonal latent head,
//! Adam, and the two training setups (toy MLP and branched autoencoder).

pub mod adam;
pub mod autoencoder;
mod matrix;
pub mod mlp;
pub mod toy;
pub mod train;

pub use adam::{Adam, AdamConfig};
pub use autoencoder::{slice, AeSpec, BlockLinear, BranchedAutoencoder, ModelFile};
pub use matrix::Matrix;
pub use mlp::{Mlp, MlpSpec};
pub use toy::{toy_experiment, ToyConfig, ToyResult};
pub use train::{backward_combined, objective, train, IterationRecord, LossBreakdown, TrainConfig};
