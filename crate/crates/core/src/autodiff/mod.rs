//! Minimal differentiable compute: dense matrices, named parameters, a
//! reverse-mode tape, the layers the models need and a finite-difference
//! gradient checker.

mod gradcheck;
mod layers;
mod matrix;
pub mod ops;
mod param;
mod tape;

pub use gradcheck::{grad_check, relative_error, tape_objective, GradCheckConfig, GradCheckReport};
pub use layers::{attention_pool, Linear, Lstm};
pub use matrix::Matrix;
pub use ops::{euclidean_distance, linear_forward, lstm_step, LinearInput, LstmCell};
pub use param::{Param, ParamId, ParamSet};
pub use tape::{NodeId, Tape};

#[cfg(test)]
mod tests;
