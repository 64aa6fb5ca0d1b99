//! Deterministic benchmark signal generators and dataset windowing.
//!
//! Five benchmark processes are built in: the Mackey-Glass chaotic delay
//! differential equation and four discrete nonlinear plants in the style of
//! Narendra's identification benchmarks. All generators are pure functions
//! of their parameters — no randomness anywhere — so experiments are
//! reproducible bit for bit.
//!
//! [`windowize`] turns a scalar series (plus an optional exogenous input
//! channel) into one-step-ahead regression pairs, and [`InputScaler`]
//! min-max scales each input component into \[0, 1\] using statistics from
//! the training prefix only, so no test-set information leaks into the
//! scaling.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};

/// Declarative description of a benchmark generator.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    /// Chaotic delay differential equation
    /// `y'(t) = 0.2·y(t-τ) / (1 + y¹⁰(t-τ)) - 0.1·y(t)`.
    MackeyGlass { tau: f64, dt: f64, n_points: usize },
    /// `y(k+1) = y(k)/(1 + y²(k)) + f(k)` with a sine-cubed forcing for the
    /// first 500 steps and a two-sine mix afterwards.
    Narendra1 { n_points: usize },
    /// Three-lag plant `y(k+3) = f(y(k+2), y(k+1), y(k), u(k+3), u(k+2))`
    /// driven by a piecewise exogenous input `u`.
    Narendra2 { n_points: usize },
    /// `y(k+1) = y(k)/(1 + y²(k) + f(k))` with a cubed two-cosine forcing
    /// switching to a cubed two-sine forcing at step 2000.
    Narendra3 {
        n_points: usize,
        y0: f64,
        /// Move the forcing out of the denominator: `y/(1+y²) + f(k)`.
        additive: bool,
    },
    /// `y(k+1) = y(k)/(1 + y²(k) + sin(2πk/25) + sin(2πk/10))`.
    Narendra4 {
        n_points: usize,
        y0: f64,
        additive: bool,
    },
}

/// Default initial condition for the Narendra 3/4 plants: a zero start
/// makes both recursions identically zero, so a small offset is required.
pub const NARENDRA_Y0: f64 = 0.1;

impl SignalSpec {
    pub fn mackey_glass() -> Self {
        SignalSpec::MackeyGlass {
            tau: 17.0,
            dt: 0.1,
            n_points: 12000,
        }
    }

    pub fn narendra1() -> Self {
        SignalSpec::Narendra1 { n_points: 2000 }
    }

    pub fn narendra2() -> Self {
        SignalSpec::Narendra2 { n_points: 1500 }
    }

    pub fn narendra3() -> Self {
        SignalSpec::Narendra3 {
            n_points: 4000,
            y0: NARENDRA_Y0,
            additive: false,
        }
    }

    pub fn narendra4() -> Self {
        SignalSpec::Narendra4 {
            n_points: 500,
            y0: NARENDRA_Y0,
            additive: false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignalSpec::MackeyGlass { .. } => "mackey-glass",
            SignalSpec::Narendra1 { .. } => "narendra1",
            SignalSpec::Narendra2 { .. } => "narendra2",
            SignalSpec::Narendra3 { .. } => "narendra3",
            SignalSpec::Narendra4 { .. } => "narendra4",
        }
    }

    pub fn n_points(&self) -> usize {
        match *self {
            SignalSpec::MackeyGlass { n_points, .. }
            | SignalSpec::Narendra1 { n_points }
            | SignalSpec::Narendra2 { n_points }
            | SignalSpec::Narendra3 { n_points, .. }
            | SignalSpec::Narendra4 { n_points, .. } => n_points,
        }
    }

    pub fn set_n_points(&mut self, n: usize) {
        match self {
            SignalSpec::MackeyGlass { n_points, .. }
            | SignalSpec::Narendra1 { n_points }
            | SignalSpec::Narendra2 { n_points }
            | SignalSpec::Narendra3 { n_points, .. }
            | SignalSpec::Narendra4 { n_points, .. } => *n_points = n,
        }
    }

    /// Runs the generator. Only Narendra 2 produces an exogenous channel.
    pub fn generate(&self) -> Result<GeneratedSignal> {
        match *self {
            SignalSpec::MackeyGlass { tau, dt, n_points } => Ok(GeneratedSignal {
                values: gen_mackey_glass(tau, dt, n_points)?,
                exogenous: None,
            }),
            SignalSpec::Narendra1 { n_points } => Ok(GeneratedSignal {
                values: gen_narendra1(n_points)?,
                exogenous: None,
            }),
            SignalSpec::Narendra2 { n_points } => {
                let (u, y) = gen_narendra2(n_points)?;
                Ok(GeneratedSignal {
                    values: y,
                    exogenous: Some(u),
                })
            }
            SignalSpec::Narendra3 {
                n_points,
                y0,
                additive,
            } => Ok(GeneratedSignal {
                values: gen_narendra3_detailed(n_points, y0, additive)?.0,
                exogenous: None,
            }),
            SignalSpec::Narendra4 {
                n_points,
                y0,
                additive,
            } => Ok(GeneratedSignal {
                values: gen_narendra4_detailed(n_points, y0, additive)?.0,
                exogenous: None,
            }),
        }
    }

    /// Generates the signal and windows it into raw (unscaled) regression
    /// pairs. An exogenous channel known `horizon` steps ahead is shifted
    /// so its lag-0 column reads the input driving the predicted step.
    pub fn build_dataset(&self, window: &WindowSpec) -> Result<Dataset> {
        let signal = self.generate()?;
        match (&signal.exogenous, window.exo_lags().is_empty()) {
            (Some(u), false) => {
                let horizon = window.horizon();
                if signal.values.len() <= horizon {
                    return Err(Error::config("series shorter than the horizon"));
                }
                let trimmed = &signal.values[..signal.values.len() - horizon];
                let shifted = &u[horizon..];
                windowize(trimmed, Some(shifted), window)
            }
            (None, false) => Err(Error::config(format!(
                "window spec has exogenous lags but signal `{}` has no input channel",
                self.name()
            ))),
            (_, true) => windowize(&signal.values, None, window),
        }
    }
}

/// A generated series plus its exogenous input channel, when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSignal {
    pub values: Vec<f64>,
    pub exogenous: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Mackey-Glass
// ---------------------------------------------------------------------------

/// Mackey-Glass integrator with explicit control over the pre-history value
/// and the discarded transient.
#[derive(Debug, Clone, PartialEq)]
pub struct MackeyGlass {
    pub tau: f64,
    pub dt: f64,
    pub n_points: usize,
    /// Constant pre-history `y(t)` for `t <= 0`.
    pub history: f64,
    /// Time units integrated and discarded before emission starts.
    pub transient: f64,
}

impl MackeyGlass {
    pub fn new(tau: f64, dt: f64, n_points: usize) -> Self {
        Self {
            tau,
            dt,
            n_points,
            history: 1.2,
            transient: 100.0 * tau,
        }
    }

    /// Fixed-step fourth-order integration; delayed values are read from
    /// the computed history with linear interpolation.
    pub fn generate(&self) -> Result<Vec<f64>> {
        let (tau, dt) = (self.tau, self.dt);
        if !(tau.is_finite() && tau > 0.0) || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::config(format!(
                "delay and time step must be positive, got tau = {tau}, dt = {dt}"
            )));
        }
        if dt > tau {
            return Err(Error::config(format!(
                "time step {dt} must not exceed the delay {tau}"
            )));
        }
        if self.n_points < 1 {
            return Err(Error::config("need at least one output point"));
        }
        if !(self.transient.is_finite() && self.transient >= 0.0) {
            return Err(Error::config("transient must be non-negative"));
        }

        let skip = (self.transient / dt).ceil() as usize;
        let total = skip + self.n_points;
        let delay_steps = tau / dt;
        let mut ys = Vec::with_capacity(total);
        ys.push(self.history);

        let delayed = |ys: &[f64], idx: f64| -> f64 {
            if idx <= 0.0 {
                return self.history;
            }
            let i0 = idx.floor() as usize;
            let frac = idx - i0 as f64;
            if frac == 0.0 || i0 + 1 >= ys.len() {
                ys[i0.min(ys.len() - 1)]
            } else {
                ys[i0] + frac * (ys[i0 + 1] - ys[i0])
            }
        };
        let rhs = |y: f64, z: f64| 0.2 * z / (1.0 + z.powi(10)) - 0.1 * y;

        for j in 0..total - 1 {
            let jf = j as f64;
            let y = ys[j];
            let z0 = delayed(&ys, jf - delay_steps);
            let z_half = delayed(&ys, jf + 0.5 - delay_steps);
            let z1 = delayed(&ys, jf + 1.0 - delay_steps);
            let k1 = rhs(y, z0);
            let k2 = rhs(y + 0.5 * dt * k1, z_half);
            let k3 = rhs(y + 0.5 * dt * k2, z_half);
            let k4 = rhs(y + dt * k3, z1);
            ys.push(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        }
        ys.drain(..skip);
        Ok(ys)
    }
}

/// Mackey-Glass series with the standard setup: constant pre-history 1.2
/// and a discarded transient of `100·tau` time units, so emission starts on
/// the attractor.
pub fn gen_mackey_glass(tau: f64, dt: f64, n_points: usize) -> Result<Vec<f64>> {
    MackeyGlass::new(tau, dt, n_points).generate()
}

// ---------------------------------------------------------------------------
// Narendra plants
// ---------------------------------------------------------------------------

fn check_len(n_points: usize, min: usize) -> Result<()> {
    if n_points < min {
        return Err(Error::config(format!(
            "need at least {min} points, got {n_points}"
        )));
    }
    Ok(())
}

/// First plant: `y(k+1) = y(k)/(1 + y²(k)) + f(k)`, `y(0) = 0`, with
/// `f(k) = sin³(πk/250)` for the first 500 steps and
/// `0.8·sin(πk/250) + 0.2·sin(πk/25)` afterwards.
pub fn gen_narendra1(n_points: usize) -> Result<Vec<f64>> {
    check_len(n_points, 1)?;
    let mut y = Vec::with_capacity(n_points);
    y.push(0.0);
    for k in 0..n_points - 1 {
        let kf = k as f64;
        let f = if k < 500 {
            (PI * kf / 250.0).sin().powi(3)
        } else {
            0.8 * (PI * kf / 250.0).sin() + 0.2 * (PI * kf / 25.0).sin()
        };
        let prev = y[k];
        y.push(prev / (1.0 + prev * prev) + f);
    }
    Ok(y)
}

/// The piecewise input driving the second plant.
pub fn narendra2_input(k: usize) -> f64 {
    let kf = k as f64;
    if k < 250 {
        (PI * kf / 25.0).sin()
    } else if k <= 500 {
        1.0
    } else if k <= 750 {
        -1.0
    } else {
        // The printed blocks leave k = 751 unassigned; the sine mix starts
        // there.
        0.4 * (PI * kf / 25.0).sin() + 0.1 * (PI * kf / 32.0).sin() + 0.6 * (PI * kf / 10.0).sin()
    }
}

/// Plant response to an arbitrary input series, starting from
/// `y(0) = y(1) = y(2) = 0`.
pub fn narendra2_response(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut y = vec![0.0; n.min(3)];
    if n < 4 {
        return y;
    }
    y.reserve(n - 3);
    for k in 0..n - 3 {
        let (x1, x2, x3) = (y[k + 2], y[k + 1], y[k]);
        let (x4, x5) = (u[k + 3], u[k + 2]);
        y.push((x1 * x2 * x4 * x5 * (x3 - 1.0) + x4) / (1.0 + x3 * x3 + x2 * x2));
    }
    y
}

/// Second plant: returns `(u, y)` so the input can be used as an exogenous
/// regressor channel.
pub fn gen_narendra2(n_points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(n_points, 4)?;
    let u: Vec<f64> = (0..n_points).map(narendra2_input).collect();
    let y = narendra2_response(&u);
    Ok((u, y))
}

/// Denominators this close to zero are clamped (sign-preserving); the third
/// and fourth plant recursions can otherwise divide by values near zero.
pub const DENOMINATOR_GUARD: f64 = 1e-6;

fn guarded_div(num: f64, den: f64, guard_hits: &mut usize) -> f64 {
    if den.abs() < DENOMINATOR_GUARD {
        *guard_hits += 1;
        let sign = if den < 0.0 { -1.0 } else { 1.0 };
        num / (sign * DENOMINATOR_GUARD)
    } else {
        num / den
    }
}

/// Third plant with explicit initial condition and the additive variant;
/// returns the series and the number of denominator-guard activations.
pub fn gen_narendra3_detailed(
    n_points: usize,
    y0: f64,
    additive: bool,
) -> Result<(Vec<f64>, usize)> {
    check_len(n_points, 1)?;
    let mut y = Vec::with_capacity(n_points);
    y.push(y0);
    let mut guard_hits = 0;
    for k in 0..n_points - 1 {
        let kf = k as f64;
        let f = if k < 2000 {
            ((2.0 * PI * kf / 25.0).cos() + (2.0 * PI * kf / 2.0).cos()).powi(3)
        } else {
            ((2.0 * PI * kf / 250.0).sin() + (2.0 * PI * kf / 10.0).sin()).powi(3)
        };
        let prev = y[k];
        let next = if additive {
            prev / (1.0 + prev * prev) + f
        } else {
            guarded_div(prev, 1.0 + prev * prev + f, &mut guard_hits)
        };
        y.push(next);
    }
    Ok((y, guard_hits))
}

/// Third plant: `y(k+1) = y(k)/(1 + y²(k) + f(k))` exactly as printed, with
/// the forcing inside the denominator.
pub fn gen_narendra3(n_points: usize) -> Result<Vec<f64>> {
    Ok(gen_narendra3_detailed(n_points, NARENDRA_Y0, false)?.0)
}

/// Fourth plant with explicit initial condition and the additive variant;
/// returns the series and the number of denominator-guard activations.
pub fn gen_narendra4_detailed(
    n_points: usize,
    y0: f64,
    additive: bool,
) -> Result<(Vec<f64>, usize)> {
    check_len(n_points, 1)?;
    let mut y = Vec::with_capacity(n_points);
    y.push(y0);
    let mut guard_hits = 0;
    for k in 0..n_points - 1 {
        let kf = k as f64;
        let s25 = (2.0 * PI * kf / 25.0).sin();
        let s10 = (2.0 * PI * kf / 10.0).sin();
        let prev = y[k];
        // The denominator accumulates left to right exactly as written in
        // the recursion, so independent re-implementations agree bit for
        // bit.
        let next = if additive {
            prev / (1.0 + prev * prev) + s25 + s10
        } else {
            guarded_div(prev, 1.0 + prev * prev + s25 + s10, &mut guard_hits)
        };
        y.push(next);
    }
    Ok((y, guard_hits))
}

/// Fourth plant: `y(k+1) = y(k)/(1 + y²(k) + sin(2πk/25) + sin(2πk/10))`.
pub fn gen_narendra4(n_points: usize) -> Result<Vec<f64>> {
    Ok(gen_narendra4_detailed(n_points, NARENDRA_Y0, false)?.0)
}

// ---------------------------------------------------------------------------
// Windowing and scaling
// ---------------------------------------------------------------------------

/// Which past values become regressor components and how far ahead the
/// target lies.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    lags: Vec<usize>,
    exo_lags: Vec<usize>,
    horizon: usize,
}

impl WindowSpec {
    /// Lags on the target series only.
    pub fn new(lags: Vec<usize>, horizon: usize) -> Result<Self> {
        Self::with_exogenous(lags, Vec::new(), horizon)
    }

    /// Lags on the target series plus lags on a shifted exogenous channel.
    pub fn with_exogenous(
        mut lags: Vec<usize>,
        mut exo_lags: Vec<usize>,
        horizon: usize,
    ) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::config("need at least one lag"));
        }
        if horizon < 1 {
            return Err(Error::config("horizon must be at least 1"));
        }
        lags.sort_unstable_by(|a, b| b.cmp(a));
        exo_lags.sort_unstable_by(|a, b| b.cmp(a));
        if lags.windows(2).any(|w| w[0] == w[1]) || exo_lags.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("lags must be distinct"));
        }
        Ok(Self {
            lags,
            exo_lags,
            horizon,
        })
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn exo_lags(&self) -> &[usize] {
        &self.exo_lags
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Regressor dimension: one component per lag.
    pub fn input_dim(&self) -> usize {
        self.lags.len() + self.exo_lags.len()
    }

    pub fn max_lag(&self) -> usize {
        self.lags[0].max(self.exo_lags.first().copied().unwrap_or(0))
    }
}

impl Default for WindowSpec {
    /// One-step prediction from the last four values.
    fn default() -> Self {
        Self::new(vec![3, 2, 1, 0], 1).unwrap()
    }
}

/// Regression pairs in row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Input dimension of every pair.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input(&self, k: usize) -> &[f64] {
        &self.inputs[k * self.n..(k + 1) * self.n]
    }

    pub fn target(&self, k: usize) -> f64 {
        self.targets[k]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.inputs
            .chunks_exact(self.n)
            .zip(self.targets.iter().copied())
    }

    /// Pairs `[start, end)`, e.g. a training prefix or a test suffix.
    pub fn range_iter(&self, start: usize, end: usize) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        (start..end).map(|k| (self.input(k), self.target(k)))
    }
}

/// Turns a series into regression pairs: at base index `j`, the input
/// collects `series[j - lag]` for every lag (then `exo[j - lag]` for every
/// exogenous lag), and the target is `series[j + horizon]`. Emits exactly
/// `len - max_lag - horizon` pairs. No scaling is applied.
pub fn windowize(series: &[f64], exogenous: Option<&[f64]>, spec: &WindowSpec) -> Result<Dataset> {
    match (exogenous, spec.exo_lags().is_empty()) {
        (None, false) => {
            return Err(Error::shape(
                "window spec has exogenous lags but no exogenous series was given",
            ))
        }
        (Some(_), true) => {
            return Err(Error::shape(
                "exogenous series given but the window spec has no exogenous lags",
            ))
        }
        _ => {}
    }
    if let Some(exo) = exogenous {
        if exo.len() != series.len() {
            return Err(Error::shape(format!(
                "exogenous series has {} points, target series {}",
                exo.len(),
                series.len()
            )));
        }
    }
    let reach = spec.max_lag() + spec.horizon();
    if series.len() <= reach {
        return Err(Error::config(format!(
            "series of {} points is too short for max lag {} + horizon {}",
            series.len(),
            spec.max_lag(),
            spec.horizon()
        )));
    }
    let count = series.len() - reach;
    let n = spec.input_dim();
    let mut inputs = Vec::with_capacity(count * n);
    let mut targets = Vec::with_capacity(count);
    for j in spec.max_lag()..series.len() - spec.horizon() {
        for &lag in spec.lags() {
            inputs.push(series[j - lag]);
        }
        if let Some(exo) = exogenous {
            for &lag in spec.exo_lags() {
                inputs.push(exo[j - lag]);
            }
        }
        targets.push(series[j + spec.horizon()]);
    }
    Ok(Dataset { n, inputs, targets })
}

/// Per-component min-max scaling fitted on a training prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl InputScaler {
    /// Fits on the first `prefix` pairs only.
    pub fn fit(dataset: &Dataset, prefix: usize) -> Result<Self> {
        if prefix == 0 || prefix > dataset.len() {
            return Err(Error::config(format!(
                "scaling prefix {prefix} outside 1..={}",
                dataset.len()
            )));
        }
        let n = dataset.n();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for k in 0..prefix {
            for (j, &v) in dataset.input(k).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    /// `(v - min) / (max - min)`; a degenerate component (max = min) maps
    /// to the constant 0.5. Values outside the fitted range scale beyond
    /// \[0, 1\] and are clamped later by the membership grid.
    pub fn scale_component(&self, j: usize, v: f64) -> f64 {
        let range = self.maxs[j] - self.mins[j];
        if range == 0.0 {
            0.5
        } else {
            (v - self.mins[j]) / range
        }
    }

    pub fn apply(&self, dataset: &mut Dataset) -> Result<()> {
        if dataset.n() != self.mins.len() {
            return Err(Error::shape(format!(
                "scaler fitted on {} components, dataset has {}",
                self.mins.len(),
                dataset.n()
            )));
        }
        let n = dataset.n();
        for (idx, v) in dataset.inputs.iter_mut().enumerate() {
            let j = idx % n;
            let range = self.maxs[j] - self.mins[j];
            *v = if range == 0.0 {
                0.5
            } else {
                (*v - self.mins[j]) / range
            };
        }
        Ok(())
    }
}

/// Windowize plus train-prefix scaling in one call.
pub fn windowize_scaled(
    series: &[f64],
    exogenous: Option<&[f64]>,
    spec: &WindowSpec,
    train_prefix: usize,
) -> Result<Dataset> {
    let mut dataset = windowize(series, exogenous, spec)?;
    let scaler = InputScaler::fit(&dataset, train_prefix)?;
    scaler.apply(&mut dataset)?;
    Ok(dataset)
}

/// Writes a series as CSV with columns `k,value` (plus `u` when an
/// exogenous channel is present), 17 significant digits so values
/// round-trip exactly.
pub fn write_series_csv<W: Write>(
    mut out: W,
    values: &[f64],
    exogenous: Option<&[f64]>,
) -> Result<()> {
    if let Some(exo) = exogenous {
        if exo.len() != values.len() {
            return Err(Error::shape("exogenous channel length mismatch"));
        }
        writeln!(out, "k,value,u")?;
        for (k, (v, u)) in values.iter().zip(exo).enumerate() {
            writeln!(out, "{k},{v:.16e},{u:.16e}")?;
        }
    } else {
        writeln!(out, "k,value")?;
        for (k, v) in values.iter().enumerate() {
            writeln!(out, "{k},{v:.16e}")?;
        }
    }
    Ok(())
}
