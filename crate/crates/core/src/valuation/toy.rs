//! Gradient-influence valuation on a linear least-squares model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub target: f64,
}

/// Linear regression with per-sample loss `0.5 * (w . x - y)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyModel {
    pub weights: Vec<f64>,
}

impl ToyModel {
    fn check(&self, sample: &Sample) -> Result<()> {
        if sample.features.len() != self.weights.len() {
            return Err(Error::Dimension { expected: self.weights.len(), found: sample.features.len() });
        }
        Ok(())
    }

    fn residual(&self, sample: &Sample) -> f64 {
        dot(&self.weights, &sample.features) - sample.target
    }

    pub fn loss(&self, sample: &Sample) -> Result<f64> {
        self.check(sample)?;
        let r = self.residual(sample);
        Ok(0.5 * r * r)
    }

    pub fn gradient(&self, sample: &Sample) -> Result<Vec<f64>> {
        self.check(sample)?;
        let r = self.residual(sample);
        let grad: Vec<f64> = sample.features.iter().map(|x| r * x).collect();
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::param("gradient is not finite"));
        }
        Ok(grad)
    }

    /// Copy of the model after one gradient step on `sample`.
    pub fn step(&self, sample: &Sample, eta: f64) -> Result<ToyModel> {
        let grad = self.gradient(sample)?;
        Ok(ToyModel { weights: self.weights.iter().zip(&grad).map(|(w, g)| w - eta * g).collect() })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean inner product between the gradient on `train` and the gradients on `test`.
pub fn infl_ip(model: &ToyModel, train: &Sample, test: &[Sample]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::config("test set is empty"));
    }
    let g = model.gradient(train)?;
    let mut total = 0.0;
    for t in test {
        total += dot(&g, &model.gradient(t)?);
    }
    Ok(total / test.len() as f64)
}

/// Mean decrease in test loss after actually taking one step of size `eta` on `train`.
pub fn oracle_one_step(model: &ToyModel, train: &Sample, test: &[Sample], eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("learning rate must be positive, got {eta}")));
    }
    if test.is_empty() {
        return Err(Error::config("test set is empty"));
    }
    let updated = model.step(train, eta)?;
    let mut total = 0.0;
    for t in test {
        total += model.loss(t)? - updated.loss(t)?;
    }
    Ok(total / test.len() as f64)
}

/// Seeded synthetic regression problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyInstance {
    pub model: ToyModel,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

impl ToyInstance {
    /// Features uniform on `[-1, 1]`, targets from a hidden linear model plus
    /// noise, and a current model drawn independently of the hidden one.
    pub fn random(seed: u64, dim: usize, n_train: usize, n_test: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
        };
        let hidden = vector(&mut rng);
        let model = ToyModel { weights: vector(&mut rng) };
        let sample = |rng: &mut ChaCha8Rng| {
            let features = vector(rng);
            let target = dot(&hidden, &features) + 0.1 * rng.random_range(-1.0..=1.0);
            Sample { features, target }
        };
        let train = (0..n_train).map(|_| sample(&mut rng)).collect();
        let test = (0..n_test).map(|_| sample(&mut rng)).collect();
        ToyInstance { model, train, test }
    }

    pub fn sample_id(i: usize) -> String {
        format!("sample-{i}")
    }

    pub fn influence_scores(&self) -> Result<Vec<(String, f64)>> {
        self.train
            .iter()
            .enumerate()
            .map(|(i, d)| Ok((Self::sample_id(i), infl_ip(&self.model, d, &self.test)?)))
            .collect()
    }

    pub fn oracle_scores(&self, eta: f64) -> Result<Vec<(String, f64)>> {
        self.train
            .iter()
            .enumerate()
            .map(|(i, d)| Ok((Self::sample_id(i), oracle_one_step(&self.model, d, &self.test, eta)?)))
            .collect()
    }
}
