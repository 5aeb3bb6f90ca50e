use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Money;

/// How a seller turns its fairshare price into a posted price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PricingStrategy {
    Fairshare,
    /// Post `c * p*`.
    Reduced { c: f64 },
    /// Uniform on `(0, p*)`. Without a seed the scenario's own stream is used.
    RandomBelowFair {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Post `fraction` of the dataset's mean utility across buyers.
    Exploitative { fraction: f64 },
}

impl PricingStrategy {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match self {
            PricingStrategy::Reduced { c } => ("reduced c", *c),
            PricingStrategy::Exploitative { fraction } => ("exploitative fraction", *fraction),
            _ => return Ok(()),
        };
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::config(format!("{name} must lie in (0, 1), got {v}")));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PricingStrategy::Fairshare => "fairshare",
            PricingStrategy::Reduced { .. } => "reduced",
            PricingStrategy::RandomBelowFair { .. } => "random_below_fair",
            PricingStrategy::Exploitative { .. } => "exploitative",
        }
    }

    /// Name with parameters, e.g. `reduced(0.5)`.
    pub fn label(&self) -> String {
        match self {
            PricingStrategy::Reduced { c } => format!("reduced({c})"),
            PricingStrategy::Exploitative { fraction } => format!("exploitative({fraction})"),
            other => other.name().to_string(),
        }
    }

    /// Posted price, clamped to `[0, p*]`.
    pub fn post<R: Rng + ?Sized>(&self, p_star: Money, mean_utility: Money, rng: &mut R) -> Money {
        let p = match *self {
            PricingStrategy::Fairshare => p_star,
            PricingStrategy::Reduced { c } => c * p_star,
            PricingStrategy::RandomBelowFair { .. } => {
                if p_star <= 0.0 {
                    0.0
                } else {
                    loop {
                        let p = rng.random_range(0.0..p_star);
                        if p > 0.0 {
                            break p;
                        }
                    }
                }
            }
            PricingStrategy::Exploitative { fraction } => fraction * mean_utility,
        };
        p.clamp(0.0, p_star.max(0.0))
    }
}
