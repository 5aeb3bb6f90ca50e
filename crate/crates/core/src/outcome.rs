//! Mappings from normalized valuation scores to economic utility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Money;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeMapping {
    /// `gamma * v + beta`.
    Linear { gamma: f64, beta: f64 },
    /// Reward `rewards[h]` when `v` lies in `[thresholds[h], thresholds[h + 1])`.
    /// `thresholds` carries one more entry than `rewards`; the last entry closes
    /// the top bucket.
    Discrete { thresholds: Vec<f64>, rewards: Vec<Money> },
    /// Expected reward of an outcome that pays `reward_normal` with
    /// probability `v` and `reward_rare` otherwise.
    ZeroOne { reward_normal: Money, reward_rare: Money },
    /// `theta . (per-task utilities) + epsilon`.
    MultiTask { theta: Vec<f64>, epsilon: f64, per_task: Vec<OutcomeMapping> },
}

impl OutcomeMapping {
    pub fn validate(&self) -> Result<()> {
        match self {
            OutcomeMapping::Linear { gamma, beta } => {
                if !(*gamma > 0.0 && gamma.is_finite() && beta.is_finite()) {
                    return Err(Error::param("linear mapping needs gamma > 0 and finite beta"));
                }
            }
            OutcomeMapping::Discrete { thresholds, rewards } => {
                if rewards.is_empty() || thresholds.len() != rewards.len() + 1 {
                    return Err(Error::Dimension {
                        expected: rewards.len() + 1,
                        found: thresholds.len(),
                    });
                }
                if !strictly_increasing(thresholds) {
                    return Err(Error::param("discrete thresholds must be strictly increasing"));
                }
                if !strictly_increasing(rewards) {
                    return Err(Error::param("discrete rewards must be strictly increasing"));
                }
            }
            OutcomeMapping::ZeroOne { reward_normal, reward_rare } => {
                if !(*reward_normal > 0.0 && *reward_rare < 0.0) {
                    return Err(Error::param(
                        "zero-one mapping needs a positive normal reward and a negative rare reward",
                    ));
                }
            }
            OutcomeMapping::MultiTask { theta, epsilon, per_task } => {
                if theta.len() != per_task.len() {
                    return Err(Error::Dimension { expected: per_task.len(), found: theta.len() });
                }
                if !epsilon.is_finite() {
                    return Err(Error::param("epsilon must be finite"));
                }
                for m in per_task {
                    if matches!(m, OutcomeMapping::MultiTask { .. }) {
                        return Err(Error::param("multi-task mappings cannot nest"));
                    }
                    m.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Number of scores the mapping consumes.
    pub fn arity(&self) -> usize {
        match self {
            OutcomeMapping::MultiTask { per_task, .. } => per_task.len(),
            _ => 1,
        }
    }

    /// Utility for a scalar score. Multi-task mappings need [`Self::map_tasks`].
    pub fn map(&self, v: f64) -> Result<Money> {
        match self {
            OutcomeMapping::Linear { gamma, beta } => Ok(gamma * v + beta),
            OutcomeMapping::Discrete { thresholds, rewards } => {
                let low = thresholds[0];
                let high = thresholds[thresholds.len() - 1];
                if !(v >= low && v < high) {
                    return Err(Error::OutOfRange { value: v, low, high });
                }
                // half-open buckets [c_h, c_{h+1})
                let h = thresholds[1..].iter().position(|&c| v < c).unwrap_or(rewards.len() - 1);
                Ok(rewards[h])
            }
            OutcomeMapping::ZeroOne { reward_normal, reward_rare } => {
                Ok(v * (reward_normal - reward_rare) + reward_rare)
            }
            OutcomeMapping::MultiTask { .. } => self.map_tasks(&[v]),
        }
    }

    /// Utility for a vector of per-task scores; scalar variants accept length one.
    pub fn map_tasks(&self, v: &[f64]) -> Result<Money> {
        if v.len() != self.arity() {
            return Err(Error::Dimension { expected: self.arity(), found: v.len() });
        }
        match self {
            OutcomeMapping::MultiTask { theta, epsilon, per_task } => {
                let mut acc = *epsilon;
                for ((w, m), &score) in theta.iter().zip(per_task).zip(v) {
                    acc += w * m.map(score)?;
                }
                Ok(acc)
            }
            _ => self.map(v[0]),
        }
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}
