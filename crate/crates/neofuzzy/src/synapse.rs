//! Model structure and the forward map.
//!
//! Every input component `x_i` passes through its own nonlinear synapse: the
//! membership grid fuzzifies `x_i` into activations, and each membership
//! function carries a polynomial consequent `w⁰ + w¹·x_i + … + wᵖ·x_iᵖ`.
//! Flattening the products of activations and input powers into one
//! regressor vector μ̃(x) makes the model output a plain dot product
//! `ŷ = w̃ᵀ μ̃(x)`, linear in the weights. `p = 0` recovers the classic
//! neo-fuzzy neuron with one scalar weight per membership function.
//!
//! Weight layout is frozen as input-major, then membership index, then
//! power: `w[offset(i) + l·(p+1) + j]` is the power-`j` coefficient of rule
//! `(i, l)`. Serialized records use the same order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::{MembershipGrid, MembershipKind};

#[derive(Debug, Clone, PartialEq)]
enum Grids {
    Shared(MembershipGrid),
    PerInput(Vec<MembershipGrid>),
}

/// Structural parameters of a model: input dimension `n`, inference order
/// `p`, and the membership grid(s).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    n: usize,
    p: usize,
    grids: Grids,
}

impl ModelConfig {
    /// A config with one grid shared by all `n` inputs (the common case).
    pub fn shared(n: usize, p: usize, grid: MembershipGrid) -> Result<Self> {
        if n < 1 {
            return Err(Error::config("input dimension must be at least 1"));
        }
        Ok(Self {
            n,
            p,
            grids: Grids::Shared(grid),
        })
    }

    /// A config with a separate grid per input.
    pub fn per_input(p: usize, grids: Vec<MembershipGrid>) -> Result<Self> {
        if grids.is_empty() {
            return Err(Error::config("need at least one input grid"));
        }
        Ok(Self {
            n: grids.len(),
            p,
            grids: Grids::PerInput(grids),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Fuzzy inference order `p` (0 for the classic neo-fuzzy neuron).
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn grid(&self, input: usize) -> &MembershipGrid {
        match &self.grids {
            Grids::Shared(g) => g,
            Grids::PerInput(gs) => &gs[input],
        }
    }

    pub fn shared_grid(&self) -> Option<&MembershipGrid> {
        match &self.grids {
            Grids::Shared(g) => Some(g),
            Grids::PerInput(_) => None,
        }
    }

    /// Number of membership functions on input `i`.
    pub fn memberships(&self, input: usize) -> usize {
        self.grid(input).len()
    }

    /// Total weight count: `(p + 1) · Σᵢ hᵢ`, which is `(p+1)·h·n` for a
    /// shared grid with `h` membership functions.
    pub fn weight_count(&self) -> usize {
        (self.p + 1) * (0..self.n).map(|i| self.memberships(i)).sum::<usize>()
    }

    /// Offset of input `i`'s weight block in the flattened vector.
    fn block_offset(&self, input: usize) -> usize {
        match &self.grids {
            Grids::Shared(g) => input * (self.p + 1) * g.len(),
            Grids::PerInput(gs) => {
                (self.p + 1) * gs[..input].iter().map(|g| g.len()).sum::<usize>()
            }
        }
    }

    /// Fuzzifies an input vector into the flattened regressor μ̃(x): for
    /// each input `i` and membership `l`, the block
    /// `(μ_li(x_i), x_i·μ_li(x_i), …, x_iᵖ·μ_li(x_i))`, powers accumulated
    /// by iterated multiplication. Components are clamped onto the grid's
    /// center span before both the activation and the powers.
    pub fn fuzzify(&self, x: &[f64]) -> Result<Regressor> {
        if x.len() != self.n {
            return Err(Error::shape(format!(
                "input has {} components, model expects {}",
                x.len(),
                self.n
            )));
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite input component {bad}")));
        }
        let mut values = Vec::with_capacity(self.weight_count());
        for (i, &xi) in x.iter().enumerate() {
            let grid = self.grid(i);
            let xc = grid.clamp(xi);
            for mu in grid.activations(xc) {
                let mut term = mu;
                values.push(term);
                for _ in 0..self.p {
                    term *= xc;
                    values.push(term);
                }
            }
        }
        Ok(Regressor { values })
    }
}

/// The flattened regressor vector μ̃(x).
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    values: Vec<f64>,
}

impl Regressor {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Squared Euclidean norm ‖μ̃(x)‖².
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// A model: config plus the flattened weight vector w̃.
#[derive(Debug, Clone, PartialEq)]
pub struct EnfnModel {
    config: ModelConfig,
    weights: Vec<f64>,
}

impl EnfnModel {
    /// A zero-initialized model; the first prediction is always 0.
    pub fn zeros(config: ModelConfig) -> Self {
        let weights = vec![0.0; config.weight_count()];
        Self { config, weights }
    }

    pub fn from_weights(config: ModelConfig, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != config.weight_count() {
            return Err(Error::shape(format!(
                "weight vector has {} entries, config needs {}",
                weights.len(),
                config.weight_count()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::input(format!("non-finite weight {bad}")));
        }
        Ok(Self { config, weights })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// The model output `w̃ᵀ μ̃(x)`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let regressor = self.config.fuzzify(x)?;
        Ok(dot(&self.weights, regressor.values()))
    }

    /// Prediction from an already-computed regressor.
    pub fn predict_regressor(&self, regressor: &Regressor) -> f64 {
        dot(&self.weights, regressor.values())
    }

    /// The THEN-part polynomial of rule `(input, membership)` evaluated at
    /// `x_i`: `w⁰ + w¹·x_i + … + wᵖ·x_iᵖ` (Horner form). For `p = 0` this
    /// is the rule's scalar weight, independent of `x_i`.
    pub fn rule_consequent(&self, input: usize, membership: usize, x_i: f64) -> Result<f64> {
        if input >= self.config.n {
            return Err(Error::shape(format!(
                "input index {input} out of range for n = {}",
                self.config.n
            )));
        }
        if membership >= self.config.memberships(input) {
            return Err(Error::shape(format!(
                "membership index {membership} out of range for h = {}",
                self.config.memberships(input)
            )));
        }
        let p = self.config.p;
        let start = self.config.block_offset(input) + membership * (p + 1);
        let coeffs = &self.weights[start..start + p + 1];
        let mut acc = coeffs[p];
        for &c in coeffs[..p].iter().rev() {
            acc = acc * x_i + c;
        }
        Ok(acc)
    }

    /// Snapshot for serialization. Only models with a shared grid have the
    /// flat record form.
    pub fn to_record(&self) -> Result<ModelRecord> {
        let grid = self
            .config
            .shared_grid()
            .ok_or_else(|| Error::config("per-input grids have no flat record form"))?;
        Ok(ModelRecord {
            n: self.config.n,
            h: grid.len(),
            p: self.config.p,
            kind: grid.kind(),
            q: grid.degree(),
            centers: grid.centers().to_vec(),
            weights: self.weights.clone(),
        })
    }

    pub fn from_record(record: ModelRecord) -> Result<Self> {
        let grid = MembershipGrid::new(record.centers, record.kind, record.q)?;
        if grid.len() != record.h {
            return Err(Error::shape(format!(
                "record says h = {} but the grid evaluates {} memberships",
                record.h,
                grid.len()
            )));
        }
        let config = ModelConfig::shared(record.n, record.p, grid)?;
        Self::from_weights(config, record.weights)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Flat serialized form of a shared-grid model. `h` is the number of
/// membership functions per input, so `weights.len() = (p+1)·h·n` always
/// holds. Finite values round-trip bit-exactly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub n: usize,
    pub h: usize,
    pub p: usize,
    pub kind: MembershipKind,
    pub q: usize,
    pub centers: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ModelRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::make_uniform_centers;
    use crate::test_util::XorShift;
    use proptest::prelude::*;

    fn model_config(n: usize, h: usize, p: usize) -> ModelConfig {
        ModelConfig::shared(n, p, make_uniform_centers(h).unwrap()).unwrap()
    }

    /// Independent double-sum form of the classic neo-fuzzy map:
    /// ŷ = Σᵢ Σₗ w_li · μ_li(x_i), for p = 0 models.
    fn nfn_double_sum(model: &EnfnModel, x: &[f64]) -> f64 {
        let cfg = model.config();
        assert_eq!(cfg.order(), 0);
        let mut acc = 0.0;
        let mut w = model.weights().iter();
        for (i, &xi) in x.iter().enumerate() {
            for mu in cfg.grid(i).activations(xi) {
                acc += w.next().unwrap() * mu;
            }
        }
        acc
    }

    #[test]
    fn fuzzify_p0_is_the_plain_membership_vector() {
        let cfg = model_config(2, 3, 0);
        let x = [0.25, 0.9];
        let reg = cfg.fuzzify(&x).unwrap();
        let mut expected = cfg.grid(0).activations(0.25);
        expected.extend(cfg.grid(1).activations(0.9));
        assert_eq!(reg.values(), expected.as_slice());
    }

    #[test]
    fn fuzzify_pairs_memberships_with_powers() {
        let cfg = model_config(1, 3, 1);
        let reg = cfg.fuzzify(&[0.25]).unwrap();
        assert_eq!(reg.values(), &[0.5, 0.125, 0.5, 0.125, 0.0, 0.0]);
    }

    #[test]
    fn fuzzify_at_zero_kills_positive_powers() {
        let cfg = model_config(1, 3, 2);
        let reg = cfg.fuzzify(&[0.0]).unwrap();
        assert_eq!(reg.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fuzzify_rejects_wrong_dimension_and_nonfinite() {
        let cfg = model_config(2, 3, 1);
        assert!(matches!(cfg.fuzzify(&[0.5]), Err(Error::Shape(_))));
        assert!(matches!(
            cfg.fuzzify(&[0.5, f64::NAN]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn regressor_power0_blocks_sum_to_one_per_input() {
        let mut rng = XorShift::new(0x5eed_0010);
        for _ in 0..100 {
            let n = 1 + (rng.next_u64() % 4) as usize;
            let h = 2 + (rng.next_u64() % 5) as usize;
            let p = (rng.next_u64() % 4) as usize;
            let cfg = model_config(n, h, p);
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let reg = cfg.fuzzify(&x).unwrap();
            for i in 0..n {
                let block = &reg.values()[i * (p + 1) * h..(i + 1) * (p + 1) * h];
                let sum: f64 = block.iter().step_by(p + 1).sum();
                assert!((sum - 1.0).abs() < 1e-12, "input {i}: sum {sum}");
            }
        }
    }

    #[test]
    fn predict_zero_weights_is_zero() {
        let model = EnfnModel::zeros(model_config(3, 4, 2));
        assert_eq!(model.predict(&[0.1, 0.5, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn predict_constant_synapse_outputs_the_constant() {
        // p = 0, all weights of synapse 0 equal to c: unity partition makes
        // that synapse contribute exactly c for any input.
        let cfg = model_config(2, 3, 0);
        let mut weights = vec![0.0; cfg.weight_count()];
        for w in weights[..3].iter_mut() {
            *w = 2.5;
        }
        let model = EnfnModel::from_weights(cfg, weights).unwrap();
        for x in [[0.0, 0.3], [0.42, 0.9], [1.0, 0.5]] {
            let y = model.predict(&x).unwrap();
            assert!((y - 2.5).abs() < 1e-12, "got {y}");
        }
    }

    #[test]
    fn predict_matches_hand_computed_dot_product() {
        let cfg = model_config(1, 3, 1);
        let model = EnfnModel::from_weights(cfg, vec![1.0, 2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let y = model.predict(&[0.25]).unwrap();
        assert!((y - 0.75).abs() < 1e-15, "got {y}");
    }

    #[test]
    fn rule_consequent_p0_is_the_scalar_weight() {
        let cfg = model_config(2, 3, 0);
        let mut weights = vec![0.0; cfg.weight_count()];
        weights[4] = 7.0; // input 1, membership 1
        let model = EnfnModel::from_weights(cfg, weights).unwrap();
        for x in [0.0, 0.37, 1.0] {
            assert_eq!(model.rule_consequent(1, 1, x).unwrap(), 7.0);
        }
        assert_eq!(model.rule_consequent(0, 2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn rule_consequent_evaluates_the_polynomial() {
        let cfg = model_config(1, 3, 2);
        let mut weights = vec![0.0; cfg.weight_count()];
        weights[3..6].copy_from_slice(&[1.0, -1.0, 2.0]); // membership 1
        let model = EnfnModel::from_weights(cfg, weights).unwrap();
        let v = model.rule_consequent(0, 1, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn rule_consequent_rejects_out_of_range_indices() {
        let model = EnfnModel::zeros(model_config(2, 3, 1));
        assert!(matches!(
            model.rule_consequent(2, 0, 0.5),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            model.rule_consequent(0, 3, 0.5),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn p0_predict_matches_double_sum_oracle() {
        let mut rng = XorShift::new(0x5eed_0011);
        for _ in 0..1000 {
            let n = 1 + (rng.next_u64() % 4) as usize;
            let h = 2 + (rng.next_u64() % 5) as usize;
            let cfg = model_config(n, h, 0);
            let weights: Vec<f64> = (0..cfg.weight_count())
                .map(|_| rng.range(-2.0, 2.0))
                .collect();
            let model = EnfnModel::from_weights(cfg, weights).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let flat = model.predict(&x).unwrap();
            let double = nfn_double_sum(&model, &x);
            assert!((flat - double).abs() < 1e-12, "{flat} vs {double}");
        }
    }

    #[test]
    fn predict_decomposes_into_weighted_rule_consequents() {
        let mut rng = XorShift::new(0x5eed_0012);
        for _ in 0..200 {
            let n = 1 + (rng.next_u64() % 3) as usize;
            let h = 2 + (rng.next_u64() % 4) as usize;
            let p = (rng.next_u64() % 4) as usize;
            let cfg = model_config(n, h, p);
            let weights: Vec<f64> = (0..cfg.weight_count())
                .map(|_| rng.range(-2.0, 2.0))
                .collect();
            let model = EnfnModel::from_weights(cfg, weights).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let direct = model.predict(&x).unwrap();
            let mut decomposed = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                for (l, mu) in model.config().grid(i).activations(xi).iter().enumerate() {
                    decomposed += mu * model.rule_consequent(i, l, xi).unwrap();
                }
            }
            assert!(
                (direct - decomposed).abs() < 1e-12,
                "{direct} vs {decomposed}"
            );
        }
    }

    #[test]
    fn weight_count_is_p_plus_1_h_n() {
        for n in 1..=4 {
            for h in 2..=5 {
                for p in 0..=5 {
                    let cfg = model_config(n, h, p);
                    assert_eq!(cfg.weight_count(), (p + 1) * h * n);
                    let model = EnfnModel::zeros(cfg);
                    assert_eq!(model.weights().len(), (p + 1) * h * n);
                }
            }
        }
    }

    #[test]
    fn per_input_grids_track_their_own_sizes() {
        let grids = vec![
            make_uniform_centers(3).unwrap(),
            make_uniform_centers(5).unwrap(),
        ];
        let cfg = ModelConfig::per_input(1, grids).unwrap();
        assert_eq!(cfg.n(), 2);
        assert_eq!(cfg.weight_count(), 2 * (3 + 5));
        let reg = cfg.fuzzify(&[0.5, 0.5]).unwrap();
        assert_eq!(reg.len(), 16);
    }

    #[test]
    fn from_weights_validates_length_and_finiteness() {
        let cfg = model_config(1, 3, 0);
        assert!(EnfnModel::from_weights(cfg.clone(), vec![0.0; 2]).is_err());
        assert!(EnfnModel::from_weights(cfg, vec![0.0, f64::INFINITY, 0.0]).is_err());
    }

    /// Newton divided-difference interpolation, used as an independent
    /// polynomial-degree probe.
    fn newton_interp<'a>(xs: &'a [f64], ys: &[f64]) -> impl Fn(f64) -> f64 + 'a {
        let n = xs.len();
        let mut coef = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
            }
        }
        move |x: f64| {
            let mut acc = coef[n - 1];
            for i in (0..n - 1).rev() {
                acc = acc * (x - xs[i]) + coef[i];
            }
            acc
        }
    }

    #[test]
    fn output_is_piecewise_polynomial_of_degree_p_plus_1() {
        let mut rng = XorShift::new(0x5eed_0013);
        for p in 0..=3usize {
            let cfg = model_config(1, 3, p);
            let weights: Vec<f64> = (0..cfg.weight_count())
                .map(|_| rng.range(-2.0, 2.0))
                .collect();
            let model = EnfnModel::from_weights(cfg, weights).unwrap();
            // Sample p + 3 points inside the first inter-center interval:
            // interpolate degree p + 1 through the first p + 2, then check
            // the remaining point lies on the same polynomial.
            let m = p + 3;
            let xs: Vec<f64> = (0..m)
                .map(|k| 0.05 + 0.4 * k as f64 / (m - 1) as f64)
                .collect();
            let ys: Vec<f64> = xs.iter().map(|&x| model.predict(&[x]).unwrap()).collect();
            let poly = newton_interp(&xs[..m - 1], &ys[..m - 1]);
            let resid = (poly(xs[m - 1]) - ys[m - 1]).abs();
            assert!(resid < 1e-9, "p={p}: residual {resid}");
        }
    }

    #[test]
    fn record_round_trips_special_values() {
        let cfg = model_config(1, 3, 1);
        let weights = vec![0.0, -0.0, 5e-324, 1.5e308, -2.2250738585072014e-308, 1.0];
        let model = EnfnModel::from_weights(cfg, weights.clone()).unwrap();
        let json = model.to_record().unwrap().to_json().unwrap();
        let back = EnfnModel::from_record(ModelRecord::from_json(&json).unwrap()).unwrap();
        for (a, b) in back.weights().iter().zip(&weights) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn per_input_models_have_no_flat_record() {
        let grids = vec![
            make_uniform_centers(3).unwrap(),
            make_uniform_centers(4).unwrap(),
        ];
        let model = EnfnModel::zeros(ModelConfig::per_input(0, grids).unwrap());
        assert!(model.to_record().is_err());
    }

    proptest! {
        #[test]
        fn predict_is_linear_in_weights(
            seed in any::<u64>(),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let mut rng = XorShift::new(seed | 1);
            let n = 1 + (rng.next_u64() % 3) as usize;
            let h = 2 + (rng.next_u64() % 4) as usize;
            let p = (rng.next_u64() % 3) as usize;
            let cfg = model_config(n, h, p);
            let w = cfg.weight_count();
            let u: Vec<f64> = (0..w).map(|_| rng.range(-1.0, 1.0)).collect();
            let v: Vec<f64> = (0..w).map(|_| rng.range(-1.0, 1.0)).collect();
            let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();

            let mu = EnfnModel::from_weights(cfg.clone(), u).unwrap();
            let mv = EnfnModel::from_weights(cfg.clone(), v).unwrap();
            let mc = EnfnModel::from_weights(cfg, combo).unwrap();
            let lhs = mc.predict(&x).unwrap();
            let rhs = a * mu.predict(&x).unwrap() + b * mv.predict(&x).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn record_round_trip_is_bit_exact(
            seed in any::<u64>(),
            scale in prop::sample::select(vec![1e-300f64, 1e-10, 1.0, 1e10, 1e300]),
        ) {
            let mut rng = XorShift::new(seed | 1);
            let cfg = model_config(2, 3, 1);
            let weights: Vec<f64> = (0..cfg.weight_count())
                .map(|_| rng.range(-1.0, 1.0) * scale)
                .collect();
            let model = EnfnModel::from_weights(cfg, weights.clone()).unwrap();
            let json = model.to_record().unwrap().to_json().unwrap();
            let back = EnfnModel::from_record(ModelRecord::from_json(&json).unwrap()).unwrap();
            for (a, b) in back.weights().iter().zip(&weights) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
