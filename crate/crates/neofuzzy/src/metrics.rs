//! Error measures over a frozen test segment: MSE, RMSE and SMAPE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominators below this contribute 0 to SMAPE instead of dividing by
/// (near-)zero; benchmark series do cross zero.
const SMAPE_GUARD: f64 = 1e-12;

/// One row of an experiment's error table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    /// Fuzzy inference order this row was measured at.
    pub p: usize,
    pub rmse: f64,
    pub mse: f64,
    /// Symmetric mean absolute percentage error, in percent.
    pub smape: f64,
}

impl MetricRow {
    pub fn from_series(p: usize, targets: &[f64], predictions: &[f64]) -> Result<Self> {
        let mse = mse(targets, predictions)?;
        Ok(Self {
            p,
            rmse: mse.sqrt(),
            mse,
            smape: smape(targets, predictions)?,
        })
    }
}

fn check_lengths(targets: &[f64], predictions: &[f64]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::input("metrics need at least one pair"));
    }
    if targets.len() != predictions.len() {
        return Err(Error::shape(format!(
            "{} targets vs {} predictions",
            targets.len(),
            predictions.len()
        )));
    }
    Ok(())
}

/// Mean squared error `(1/N)·Σ (y - ŷ)²`.
pub fn mse(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    check_lengths(targets, predictions)?;
    let sum: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(y, yhat)| {
            let e = y - yhat;
            e * e
        })
        .sum();
    Ok(sum / targets.len() as f64)
}

/// Root mean squared error, `sqrt(mse)`.
pub fn rmse(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    Ok(mse(targets, predictions)?.sqrt())
}

/// Symmetric mean absolute percentage error in percent:
/// `(100/N)·Σ |y - ŷ| / ((|y| + |ŷ|)/2)`, with zero-denominator terms
/// contributing 0. The result lies in [0, 200].
pub fn smape(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    check_lengths(targets, predictions)?;
    let sum: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(y, yhat)| {
            let denom = (y.abs() + yhat.abs()) / 2.0;
            if denom < SMAPE_GUARD {
                0.0
            } else {
                (y - yhat).abs() / denom
            }
        })
        .sum();
    Ok(100.0 * sum / targets.len() as f64)
}
