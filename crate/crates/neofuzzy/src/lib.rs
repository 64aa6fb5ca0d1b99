//! Neo-fuzzy neurons with online adaptive learning.
//!
//! A neo-fuzzy neuron (NFN) is a multi-input single-output learner in which
//! each input passes through a nonlinear synapse: a bank of locally supported
//! membership functions, each carrying a scalar weight, summed into the
//! output. The extended neo-fuzzy neuron (ENFN) attaches a degree-`p`
//! polynomial consequent to every membership function instead of a constant,
//! which realizes p-order Takagi-Sugeno rules while keeping the model linear
//! in its weights.
//!
//! The crate is organized along that pipeline:
//!
//! - [`membership`] — triangular and B-spline membership grids over \[0, 1\]
//! - [`synapse`] — model configuration, fuzzification and the forward map
//! - [`learning`] — online weight adaptation (fixed-rate gradient and the
//!   normalized tracking/filtering rule) plus a batch least-squares oracle
//! - [`signals`] — deterministic benchmark generators and windowing into
//!   one-step-ahead regression datasets
//! - [`metrics`] — RMSE / MSE / SMAPE over a frozen test segment
//! - [`harness`] — experiment presets, the train/freeze protocol, and table
//!   and trace emission for the CLI

pub mod error;
pub mod harness;
pub mod learning;
pub mod membership;
pub mod metrics;
pub mod signals;
pub mod synapse;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentReport, Preset, TracePoint};
pub use learning::{LearnerState, LearningRule, StepOutcome};
pub use membership::{MembershipGrid, MembershipKind};
pub use metrics::MetricRow;
pub use signals::{Dataset, InputScaler, SignalSpec, WindowSpec};
pub use synapse::{EnfnModel, ModelConfig, Regressor};
