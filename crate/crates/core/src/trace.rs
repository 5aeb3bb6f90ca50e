//! Line-delimited trace records: one JSON object per (step, entity, metric).
//!
//! | entity_kind | metrics |
//! |---|---|
//! | `market` | `active_sellers` (at the start of the step) |
//! | `seller` | `present`, `listed`, `fair_price`, `posted_price`, `sales`, `profit`, `participation`, `survival`, `active`, `cumulative_profit` |
//! | `buyer` | `budget`, `spend`, `purchases`, `net_utility`, `cumulative_utility` |
//!
//! Prices appear only for sellers that listed. Booleans are written as 0 or 1.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::SimulationTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Market,
    Seller,
    Buyer,
}

impl EntityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Market => "market",
            EntityKind::Seller => "seller",
            EntityKind::Buyer => "buyer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub step: usize,
    pub entity_kind: EntityKind,
    pub entity_id: String,
    pub metric: String,
    pub value: f64,
}

pub const MARKET_ID: &str = "market";

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn flatten(trace: &SimulationTrace) -> Vec<TraceLine> {
    let mut lines = Vec::new();
    for record in &trace.steps {
        let step = record.step;
        let mut push = |kind, id: &str, metric: &str, value: f64| {
            lines.push(TraceLine { step, entity_kind: kind, entity_id: id.to_string(), metric: metric.to_string(), value })
        };
        push(EntityKind::Market, MARKET_ID, "active_sellers", record.active_sellers);
        for (id, s) in trace.seller_ids.iter().zip(&record.sellers) {
            push(EntityKind::Seller, id, "present", flag(s.present));
            push(EntityKind::Seller, id, "listed", flag(s.listed));
            if let Some(p) = s.fair_price {
                push(EntityKind::Seller, id, "fair_price", p);
            }
            if let Some(p) = s.posted_price {
                push(EntityKind::Seller, id, "posted_price", p);
            }
            push(EntityKind::Seller, id, "sales", s.sales as f64);
            push(EntityKind::Seller, id, "profit", s.profit);
            push(EntityKind::Seller, id, "participation", s.participation);
            push(EntityKind::Seller, id, "survival", s.survival);
            push(EntityKind::Seller, id, "active", flag(s.active));
            push(EntityKind::Seller, id, "cumulative_profit", s.cumulative_profit);
        }
        for (id, b) in trace.buyer_ids.iter().zip(&record.buyers) {
            push(EntityKind::Buyer, id, "budget", b.budget);
            push(EntityKind::Buyer, id, "spend", b.spend);
            push(EntityKind::Buyer, id, "purchases", b.purchases as f64);
            push(EntityKind::Buyer, id, "net_utility", b.net_utility);
            push(EntityKind::Buyer, id, "cumulative_utility", b.cumulative_utility);
        }
    }
    lines
}

pub fn write_trace(mut out: impl Write, lines: &[TraceLine]) -> Result<()> {
    for line in lines {
        serde_json::to_writer(&mut out, line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceLine>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() }))
        .collect()
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceLine>> {
    parse_trace(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::dynamics::run_scenario;

    const CONFIG: &str = r#"
[market]
horizon = 4
discount = 0.9
seed = 11
[buyers]
count = 2
budgets = [{ rule = "fraction", low = 0.9, high = 1.0 }]
[sellers]
count = 3
[strategy]
kind = "reduced"
c = 0.5
"#;

    #[test]
    fn written_trace_reads_back() {
        let trace = run_scenario(&ScenarioConfig::from_toml_str(CONFIG).unwrap()).unwrap();
        let lines = flatten(&trace);
        let mut buf = Vec::new();
        write_trace(&mut buf, &lines).unwrap();
        assert_eq!(parse_trace(std::str::from_utf8(&buf).unwrap()).unwrap(), lines);
        assert_eq!(lines.iter().filter(|l| l.metric == "active_sellers").count(), 4);
    }

    #[test]
    fn bad_line_is_reported() {
        let text = "{\"step\":1,\"entity_kind\":\"market\",\"entity_id\":\"market\",\"metric\":\"active_sellers\",\"value\":3.0}\n{\"step\":\"x\"}\n";
        assert!(matches!(parse_trace(text), Err(Error::Parse { line: 2, .. })));
    }
}
