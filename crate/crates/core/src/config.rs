//! Scenario configuration, read from TOML.
//!
//! ```toml
//! [market]
//! horizon = 100
//! discount = 0.98
//! seed = 7
//! mode = "expected"          # or "stochastic"
//!
//! [buyers]
//! count = 2
//! budgets = [
//!     { rule = "fraction", low = 0.95, high = 1.0 },
//!     { rule = "fraction", low = 0.90, high = 0.95 },
//! ]
//!
//! [sellers]
//! count = 10
//! cost = 0.0
//!
//! [strategy]
//! kind = "exploitative"      # fairshare | reduced | random_below_fair | exploitative
//! fraction = 0.1
//!
//! [participation]
//! kind = "ratio"             # or "tabulated" with points = [[0.0, 0.0], ..., [1.0, 1.0]]
//!
//! [valuation]
//! kind = "uniform"           # uniform | constant | mapped
//! low = 0.5
//! high = 1.5
//!
//! [output]
//! trace = "trace.jsonl"
//! summary = "summary.csv"
//! checkpoints = [10, 25, 50, 100]
//! ```

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ParticipationModel, PricingStrategy};
use crate::error::{Error, Result};
use crate::market::{Money, MAX_EXHAUSTIVE};
use crate::outcome::OutcomeMapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Each seller stays with probability `pi`, drawn every step.
    #[default]
    Stochastic,
    /// Sellers never leave; their sales and purchases are weighted by survival probability.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub horizon: usize,
    pub discount: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: SamplingMode,
}

/// A buyer's budget for one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BudgetRule {
    /// A uniform draw from `[low, high]` times the buyer's total utility over the step's datasets.
    Fraction { low: f64, high: f64 },
    Fixed { amount: Money },
}

impl BudgetRule {
    fn validate(&self) -> Result<()> {
        match *self {
            BudgetRule::Fraction { low, high } => {
                if !(0.0 <= low && low < high && high <= 1.0) {
                    return Err(Error::config(format!(
                        "budget band [{low}, {high}] must satisfy 0 <= low < high <= 1"
                    )));
                }
            }
            BudgetRule::Fixed { amount } => {
                if !(amount >= 0.0 && amount.is_finite()) {
                    return Err(Error::config(format!("fixed budget must be finite and >= 0, got {amount}")));
                }
            }
        }
        Ok(())
    }

    /// Always consumes one draw so streams stay aligned across rules.
    pub fn draw<R: Rng + ?Sized>(&self, total_utility: Money, rng: &mut R) -> Money {
        let u: f64 = rng.random();
        match *self {
            BudgetRule::Fraction { low, high } => (low + (high - low) * u) * total_utility.max(0.0),
            BudgetRule::Fixed { amount } => amount,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyersSection {
    pub count: usize,
    /// One rule shared by every buyer, or one per buyer.
    pub budgets: Vec<BudgetRule>,
}

impl BuyersSection {
    pub fn budget_rule(&self, k: usize) -> BudgetRule {
        if self.budgets.len() == 1 {
            self.budgets[0]
        } else {
            self.budgets[k]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellersSection {
    pub count: usize,
    #[serde(default)]
    pub cost: Money,
}

/// Per-buyer utility of a freshly created dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilityDistribution {
    Uniform { low: Money, high: Money },
    Constant { value: Money },
    /// A score uniform on `[0, 1]` passed through an outcome mapping.
    Mapped { mapping: OutcomeMapping },
}

impl Default for UtilityDistribution {
    fn default() -> Self {
        UtilityDistribution::Uniform { low: 0.5, high: 1.5 }
    }
}

impl UtilityDistribution {
    fn validate(&self) -> Result<()> {
        match self {
            UtilityDistribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && 0.0 <= *low && low <= high) {
                    return Err(Error::config(format!("utility range [{low}, {high}] is invalid")));
                }
            }
            UtilityDistribution::Constant { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(Error::config(format!("constant utility must be finite and >= 0, got {value}")));
                }
            }
            UtilityDistribution::Mapped { mapping } => {
                mapping.validate()?;
                if mapping.arity() != 1 {
                    return Err(Error::config("mapped utilities need a single-score outcome mapping"));
                }
            }
        }
        Ok(())
    }

    /// Always consumes one draw so streams stay aligned across distributions.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Money> {
        let u: f64 = rng.random();
        match self {
            UtilityDistribution::Uniform { low, high } => Ok(low + (high - low) * u),
            UtilityDistribution::Constant { value } => Ok(*value),
            UtilityDistribution::Mapped { mapping } => mapping.map(u),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<usize>,
}

fn default_trace() -> String {
    "trace.jsonl".into()
}

fn default_summary() -> String {
    "summary.csv".into()
}

pub fn default_checkpoints() -> Vec<usize> {
    vec![10, 25, 50, 100]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { trace: default_trace(), summary: default_summary(), checkpoints: default_checkpoints() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub market: MarketSection,
    pub buyers: BuyersSection,
    pub sellers: SellersSection,
    pub strategy: PricingStrategy,
    #[serde(default = "ratio")]
    pub participation: ParticipationModel,
    #[serde(default)]
    pub valuation: UtilityDistribution,
    #[serde(default)]
    pub output: OutputSection,
}

fn ratio() -> ParticipationModel {
    ParticipationModel::Ratio
}

impl ScenarioConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.market.discount;
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::config(format!("discount must lie in (0, 1), got {d}")));
        }
        if self.buyers.count == 0 {
            return Err(Error::config("at least one buyer is required"));
        }
        let rules = self.buyers.budgets.len();
        if rules != 1 && rules != self.buyers.count {
            return Err(Error::config(format!(
                "expected 1 or {} budget rules, got {rules}",
                self.buyers.count
            )));
        }
        for rule in &self.buyers.budgets {
            rule.validate()?;
        }
        if self.sellers.count > MAX_EXHAUSTIVE {
            return Err(Error::config(format!(
                "at most {MAX_EXHAUSTIVE} sellers are supported, got {}",
                self.sellers.count
            )));
        }
        let c = self.sellers.cost;
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::config(format!("seller cost must be finite and >= 0, got {c}")));
        }
        self.strategy.validate()?;
        self.participation.validate()?;
        for (r, expected) in [(0.0, 0.0), (1.0, 1.0)] {
            let found = self.participation.at_ratio(r);
            if found != expected {
                return Err(Error::config(format!(
                    "participation at price ratio {r} must be {expected}, got {found}"
                )));
            }
        }
        self.valuation.validate()
    }

    /// Whether `self` and `other` describe the same market apart from pricing strategy and output.
    pub fn same_market(&self, other: &ScenarioConfig) -> bool {
        let strip = |c: &ScenarioConfig| ScenarioConfig {
            strategy: PricingStrategy::Fairshare,
            output: OutputSection::default(),
            ..c.clone()
        };
        strip(self) == strip(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[market]
horizon = 100
discount = 0.98
seed = 7
mode = "expected"

[buyers]
count = 2
budgets = [
    { rule = "fraction", low = 0.95, high = 1.0 },
    { rule = "fraction", low = 0.90, high = 0.95 },
]

[sellers]
count = 10

[strategy]
kind = "exploitative"
fraction = 0.1

[participation]
kind = "ratio"

[valuation]
kind = "uniform"
low = 0.5
high = 1.5
"#;

    #[test]
    fn parses_documented_example() {
        let c = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(c.market.mode, SamplingMode::Expected);
        assert_eq!(c.strategy, PricingStrategy::Exploitative { fraction: 0.1 });
        assert_eq!(c.buyers.budget_rule(1), BudgetRule::Fraction { low: 0.90, high: 0.95 });
        assert_eq!(c.output.checkpoints, vec![10, 25, 50, 100]);
        assert_eq!(c.sellers.cost, 0.0);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap(), c);
    }

    #[test]
    fn rejects_invalid_values() {
        for (from, to) in [
            ("discount = 0.98", "discount = 1.0"),
            ("low = 0.95, high = 1.0", "low = 0.95, high = 1.1"),
            ("low = 0.90, high = 0.95", "low = 0.95, high = 0.90"),
            ("fraction = 0.1", "fraction = 1.5"),
            ("count = 2", "count = 3"),
            ("count = 10", "count = 30"),
            ("kind = \"ratio\"", "kind = \"tabulated\"\npoints = [[0.0, 0.0], [1.0, 0.9]]"),
            ("seed = 7", "seed = 7\nunknown = 1"),
        ] {
            let text = EXAMPLE.replace(from, to);
            assert!(
                matches!(ScenarioConfig::from_toml_str(&text), Err(Error::Configuration(_))),
                "accepted {to}"
            );
        }
    }

    #[test]
    fn same_market_ignores_strategy_only() {
        let a = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        let mut b = a.clone();
        b.strategy = PricingStrategy::Fairshare;
        assert!(a.same_market(&b));
        b.market.seed = 8;
        assert!(!a.same_market(&b));
    }
}
