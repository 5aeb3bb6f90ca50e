//! Market snapshots for `fairshare price`, in TOML:
//!
//! ```toml
//! cost = 0.2
//! old_prices = []            # prices of datasets already listed (flat, grid)
//! old_rates = []             # royalty rates of datasets already listed (royalty)
//! grid = [0.5, 0.75, 1.0]    # candidate prices for grid mode
//!
//! [[buyers]]
//! id = "b0"
//! budget = 1.5               # flat, grid
//! cap = 0.3                  # royalty
//! utilities = [2.0]          # additive, old datasets first, new dataset last
//! # table = [0.0, 2.0]       # or a value for every subset, indexed by bitmask
//! ```

use std::path::PathBuf;

use anyhow::{anyhow, bail};
use clap::{Args, ValueEnum};
use fairshare_core::royalty::{price_royalty_curve, RateDecision, RoyaltyBuyer, RoyaltyProblem};
use fairshare_core::seller::{price_flat, price_grid, PriceDecision, PricingBuyer, PricingProblem, DEFAULT_PRICE_GRID};
use fairshare_core::{Money, UtilityFunction};
use serde::Deserialize;

use crate::failure::{read_input, Failure, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Flat,
    Grid,
    Royalty,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long, value_enum, default_value = "flat")]
    mode: Mode,
    /// Candidate prices for grid mode, overriding the snapshot's grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    #[serde(default)]
    cost: Money,
    #[serde(default)]
    old_prices: Vec<Money>,
    #[serde(default)]
    old_rates: Vec<f64>,
    grid: Option<Vec<Money>>,
    buyers: Vec<SnapshotBuyer>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotBuyer {
    id: String,
    budget: Option<Money>,
    cap: Option<f64>,
    utilities: Option<Vec<Money>>,
    table: Option<Vec<Money>>,
}

impl SnapshotBuyer {
    fn utility(&self, len: usize) -> anyhow::Result<UtilityFunction> {
        match (&self.utilities, &self.table) {
            (Some(u), None) => Ok(UtilityFunction::additive(u.clone())),
            (None, Some(t)) => Ok(UtilityFunction::tabulated(len, t.clone())?),
            _ => bail!("buyer `{}` needs exactly one of `utilities` or `table`", self.id),
        }
    }

    fn field<T: Copy>(&self, v: Option<T>, name: &str) -> anyhow::Result<T> {
        v.ok_or_else(|| anyhow!("buyer `{}` has no `{name}`", self.id))
    }
}

impl Snapshot {
    fn pricing(&self) -> anyhow::Result<PricingProblem> {
        let len = self.old_prices.len() + 1;
        let buyers = self
            .buyers
            .iter()
            .map(|b| {
                Ok(PricingBuyer {
                    buyer_id: b.id.clone(),
                    utility: b.utility(len)?,
                    budget: b.field(b.budget, "budget")?,
                })
            })
            .collect::<anyhow::Result<_>>()?;
        Ok(PricingProblem { old_prices: self.old_prices.clone(), buyers, cost: self.cost })
    }

    fn royalty(&self) -> anyhow::Result<RoyaltyProblem> {
        let len = self.old_rates.len() + 1;
        let buyers = self
            .buyers
            .iter()
            .map(|b| Ok(RoyaltyBuyer { buyer_id: b.id.clone(), utility: b.utility(len)?, cap: b.field(b.cap, "cap")? }))
            .collect::<anyhow::Result<_>>()?;
        Ok(RoyaltyProblem { old_rates: self.old_rates.clone(), buyers, cost: self.cost })
    }
}

pub fn run(args: &PriceArgs) -> Result<(), Failure> {
    let text = read_input(&args.snapshot)?;
    let snapshot: Snapshot = toml::from_str(&text).input(args.snapshot.display())?;
    match args.mode {
        Mode::Flat | Mode::Grid => {
            let problem = snapshot.pricing()?;
            let (decision, curve) = if args.mode == Mode::Flat {
                price_flat(&problem)?
            } else {
                let grid = args.grid.clone().or(snapshot.grid).unwrap_or_else(|| DEFAULT_PRICE_GRID.to_vec());
                price_grid(&problem, &grid)?
            };
            match decision {
                PriceDecision::Priced { price, profit, buyers } => {
                    println!("price {price} profit {profit} buyers {buyers}")
                }
                PriceDecision::NoProfitablePrice => println!("no-profitable-price"),
            }
            println!("price,buyers,profit");
            for p in &curve.points {
                println!("{},{},{}", p.price, p.buyers, p.profit);
            }
        }
        Mode::Royalty => {
            let (decision, curve) = price_royalty_curve(&snapshot.royalty()?)?;
            match decision {
                RateDecision::Rated { rate, revenue, profit } => {
                    println!("rate {rate} revenue {revenue} profit {profit}")
                }
                RateDecision::NoProfitableRate => println!("no-profitable-rate"),
            }
            println!("rate,revenue");
            for (rate, revenue) in curve {
                println!("{rate},{revenue}");
            }
        }
    }
    Ok(())
}
