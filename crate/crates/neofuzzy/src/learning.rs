//! Online weight adaptation and the batch least-squares oracle.
//!
//! Two update rules are provided. The fixed-rate gradient rule moves the
//! weights along `η·e(k)·μ̃(x(k))`, the exact negative gradient of the
//! squared one-step error. The adaptive tracking/filtering rule normalizes
//! the same direction by a running denominator
//!
//! ```text
//! r(k) = α·r(k-1) + ‖μ̃(x(k))‖²,   0 ≤ α ≤ 1,
//! w̃(k) = w̃(k-1) + e(k)·μ̃(x(k)) / max(r(k), ε).
//! ```
//!
//! `α = 0` reduces to the one-step Kaczmarz-Widrow-Hoff projection (the
//! post-step residual on the projected sample is zero), `α = 1` to the
//! Goodwin-Ramage-Caines stochastic approximation with a non-decreasing
//! denominator. Intermediate `α` trades tracking speed against smoothing.
//!
//! Predictions are always made with the weights from the previous step;
//! the update happens after the error is measured.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synapse::{EnfnModel, ModelConfig, ModelRecord};

/// Default division guard and initial denominator: the first adaptive step
/// then acts as a Kaczmarz projection regardless of `α`.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Which update rule a learner applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LearningRule {
    /// Fixed-rate gradient descent on the squared one-step error.
    FixedGradient { eta: f64 },
    /// Normalized rule with smoothing parameter `alpha`.
    Adaptive { alpha: f64 },
}

/// Mutable learner state: the rule plus the running denominator `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    rule: LearningRule,
    r: f64,
    epsilon: f64,
}

/// What one online step observed: the prediction made with the pre-update
/// weights, the resulting error `e = y - ŷ`, and the denominator after the
/// update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub prediction: f64,
    pub error: f64,
    pub r_after: f64,
}

impl LearnerState {
    pub fn new(rule: LearningRule) -> Result<Self> {
        Self::with_epsilon(rule, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(rule: LearningRule, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config(format!(
                "division guard must be a small positive real, got {epsilon}"
            )));
        }
        Self::resume(rule, epsilon, epsilon)
    }

    /// Rebuilds a learner mid-stream (checkpoint restore).
    pub fn resume(rule: LearningRule, r: f64, epsilon: f64) -> Result<Self> {
        match rule {
            LearningRule::FixedGradient { eta } => {
                if !(eta.is_finite() && eta > 0.0) {
                    return Err(Error::config(format!(
                        "learning rate must be positive, got {eta}"
                    )));
                }
            }
            LearningRule::Adaptive { alpha } => {
                if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
                    return Err(Error::config(format!(
                        "smoothing parameter must lie in [0, 1], got {alpha}"
                    )));
                }
            }
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::config(format!("denominator must be >= 0, got {r}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config(format!(
                "division guard must be a small positive real, got {epsilon}"
            )));
        }
        Ok(Self { rule, r, epsilon })
    }

    pub fn rule(&self) -> LearningRule {
        self.rule
    }

    /// Current running denominator `r(k)`.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// One online step: predict with the current weights, measure the
    /// error, then update the model in place. Non-finite inputs or targets
    /// are rejected before any state changes.
    pub fn step(&mut self, model: &mut EnfnModel, x: &[f64], y: f64) -> Result<StepOutcome> {
        if !y.is_finite() {
            return Err(Error::input(format!("non-finite target {y}")));
        }
        let regressor = model.config().fuzzify(x)?;
        let prediction = model.predict_regressor(&regressor);
        let error = y - prediction;
        let gain = match self.rule {
            LearningRule::Adaptive { alpha } => {
                self.r = alpha * self.r + regressor.norm_sq();
                error / self.r.max(self.epsilon)
            }
            LearningRule::FixedGradient { eta } => eta * error,
        };
        for (w, mu) in model.weights_mut().iter_mut().zip(regressor.values()) {
            *w += gain * mu;
        }
        Ok(StepOutcome {
            prediction,
            error,
            r_after: self.r,
        })
    }

    /// Prediction and error without touching the weights or `r`.
    pub fn evaluate(&self, model: &EnfnModel, x: &[f64], y: f64) -> Result<StepOutcome> {
        if !y.is_finite() {
            return Err(Error::input(format!("non-finite target {y}")));
        }
        let prediction = model.predict(x)?;
        Ok(StepOutcome {
            prediction,
            error: y - prediction,
            r_after: self.r,
        })
    }
}

/// Feeds a finite stream through the learner: samples before `freeze_after`
/// adapt the weights, the rest are evaluated with everything frozen (no
/// weight or denominator updates). `None` adapts on every sample.
pub fn run_online<'a, I>(
    model: &mut EnfnModel,
    state: &mut LearnerState,
    stream: I,
    freeze_after: Option<usize>,
) -> Result<Vec<StepOutcome>>
where
    I: IntoIterator<Item = (&'a [f64], f64)>,
{
    let stream = stream.into_iter();
    let mut outcomes = Vec::with_capacity(stream.size_hint().0);
    for (k, (x, y)) in stream.enumerate() {
        let adapt = freeze_after.is_none_or(|limit| k < limit);
        let outcome = if adapt {
            state.step(model, x, y)?
        } else {
            state.evaluate(model, x, y)?
        };
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Minimum-norm least-squares fit of the weights over a whole dataset,
/// via a singular value decomposition of the stacked regressor matrix.
/// Serves as the convergence oracle for the online rules: no online
/// learner can beat its in-sample mean squared error.
pub fn batch_least_squares<'a, I>(config: &ModelConfig, data: I) -> Result<EnfnModel>
where
    I: IntoIterator<Item = (&'a [f64], f64)>,
{
    let width = config.weight_count();
    let mut rows: Vec<f64> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    for (x, y) in data {
        if !y.is_finite() {
            return Err(Error::input(format!("non-finite target {y}")));
        }
        let regressor = config.fuzzify(x)?;
        rows.extend_from_slice(regressor.values());
        targets.push(y);
    }
    if targets.is_empty() {
        return Err(Error::input("least squares needs at least one sample"));
    }
    let matrix = nalgebra::DMatrix::from_row_slice(targets.len(), width, &rows);
    let rhs = nalgebra::DVector::from_vec(targets);
    let svd = matrix.svd(true, true);
    let cutoff = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s))
        * f64::EPSILON
        * (width.max(rhs.len()) as f64);
    let solution = svd
        .solve(&rhs, cutoff.max(f64::MIN_POSITIVE))
        .map_err(Error::input)?;
    EnfnModel::from_weights(config.clone(), solution.iter().copied().collect())
}

/// A serializable snapshot of a model plus its learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ModelRecord,
    #[serde(flatten)]
    pub rule: LearningRule,
    pub r: f64,
    pub epsilon: f64,
}

impl Checkpoint {
    pub fn capture(model: &EnfnModel, state: &LearnerState) -> Result<Self> {
        Ok(Self {
            model: model.to_record()?,
            rule: state.rule(),
            r: state.r(),
            epsilon: state.epsilon(),
        })
    }

    pub fn restore(self) -> Result<(EnfnModel, LearnerState)> {
        let model = EnfnModel::from_record(self.model)?;
        let state = LearnerState::resume(self.rule, self.r, self.epsilon)?;
        Ok((model, state))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}
