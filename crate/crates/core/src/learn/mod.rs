//! Gradient-based learning of fact probabilities and neural-fact models, driven by
//! evaluating compiled circuits in the gradient semiring.

mod models;
mod store;
mod train;

pub use models::{ConstantModel, LogisticModel, Mlp, ModelRegistry, NeuralModel};
pub use store::{clamp_probability, neural_input_dims, ParameterStore, Slot, EPSILON};
pub use train::{loss, loss_derivative, query_gradient, train, LossKind, TrainConfig, TrainReport, TrainingExample};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("the dataset is empty")]
    EmptyDataset,
    #[error("training query {0} must be ground")]
    NonGroundQuery(String),
    #[error("target {0} is not a probability")]
    BadTarget(f64),
    #[error("cannot encode neural input: {0}")]
    Encoding(String),
    #[error("loss diverged in epoch {epoch}; trace so far: {trace:?}")]
    Diverged { epoch: usize, trace: Vec<f64> },
}
