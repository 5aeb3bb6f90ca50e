//! Statistics over traces and valuation scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::trace::{EntityKind, TraceLine, MARKET_ID};

/// Ranks starting at 1, tied values sharing the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::param(format!("lengths differ: {} and {}", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::param("spearman needs at least two pairs"));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::param("inputs contain NaN"));
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let mean = (xs.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::param("spearman is undefined for a constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// One row of the summary table, written as CSV with header
/// `kind,entity_id,step,metric,value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub kind: EntityKind,
    pub entity_id: String,
    pub step: usize,
    pub metric: String,
    pub value: f64,
}

/// Rows: `market/active_sellers` for every step; at the final step
/// `market/mean_cumulative_profit`, `market/total_cumulative_utility`,
/// each seller's `cumulative_profit` and each buyer's `cumulative_utility`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn get(&self, kind: EntityKind, entity_id: &str, step: usize, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.kind == kind && r.entity_id == entity_id && r.step == step && r.metric == metric)
            .map(|r| r.value)
    }
}

pub fn summarize(lines: &[TraceLine]) -> Summary {
    let Some(last) = lines.iter().map(|l| l.step).max() else { return Summary::default() };
    let row = |kind, id: &str, step, metric: &str, value| SummaryRow {
        kind,
        entity_id: id.to_string(),
        step,
        metric: metric.to_string(),
        value,
    };
    let mut rows: Vec<SummaryRow> = lines
        .iter()
        .filter(|l| l.entity_kind == EntityKind::Market && l.metric == "active_sellers")
        .map(|l| row(EntityKind::Market, MARKET_ID, l.step, "active_sellers", l.value))
        .collect();
    let finals = |kind: EntityKind, metric: &str| -> Vec<(String, f64)> {
        lines
            .iter()
            .filter(|l| l.step == last && l.entity_kind == kind && l.metric == metric)
            .map(|l| (l.entity_id.clone(), l.value))
            .collect()
    };
    let profits = finals(EntityKind::Seller, "cumulative_profit");
    let utilities = finals(EntityKind::Buyer, "cumulative_utility");
    if !profits.is_empty() {
        let mean = profits.iter().map(|p| p.1).sum::<f64>() / profits.len() as f64;
        rows.push(row(EntityKind::Market, MARKET_ID, last, "mean_cumulative_profit", mean));
    }
    if !utilities.is_empty() {
        rows.push(row(EntityKind::Market, MARKET_ID, last, "total_cumulative_utility", utilities.iter().map(|u| u.1).sum()));
    }
    rows.extend(profits.into_iter().map(|(id, v)| row(EntityKind::Seller, &id, last, "cumulative_profit", v)));
    rows.extend(utilities.into_iter().map(|(id, v)| row(EntityKind::Buyer, &id, last, "cumulative_utility", v)));
    Summary { rows }
}

/// Row-wise arithmetic mean of summaries with identical layouts, such as
/// one configuration run under several seeds.
pub fn summarize_batch(summaries: &[Summary]) -> Result<Summary> {
    let Some(first) = summaries.first() else { return Ok(Summary::default()) };
    let mut rows = first.rows.clone();
    for s in &summaries[1..] {
        if s.rows.len() != rows.len() {
            return Err(Error::config("summaries have different layouts"));
        }
        for (acc, r) in rows.iter_mut().zip(&s.rows) {
            if (acc.kind, &acc.entity_id, acc.step, &acc.metric) != (r.kind, &r.entity_id, r.step, &r.metric) {
                return Err(Error::config(format!(
                    "summaries differ at {} {} step {} {}",
                    r.kind.as_str(),
                    r.entity_id,
                    r.step,
                    r.metric
                )));
            }
            acc.value += r.value;
        }
    }
    let n = summaries.len() as f64;
    for r in &mut rows {
        r.value /= n;
    }
    Ok(Summary { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonMetric {
    /// Mean cumulative profit across sellers.
    SellerAvgProfit,
    /// Sum of buyers' discounted cumulative utility.
    BuyerUtility,
    ActiveSellers,
}

impl ComparisonMetric {
    pub const ALL: [ComparisonMetric; 3] =
        [ComparisonMetric::SellerAvgProfit, ComparisonMetric::BuyerUtility, ComparisonMetric::ActiveSellers];

    pub fn as_str(&self) -> &'static str {
        match self {
            ComparisonMetric::SellerAvgProfit => "seller_avg_profit",
            ComparisonMetric::BuyerUtility => "buyer_utility",
            ComparisonMetric::ActiveSellers => "active_sellers",
        }
    }
}

/// Strategy ordering for one metric at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRanking {
    pub step: usize,
    pub metric: ComparisonMetric,
    /// `(strategy label, value)` in input order.
    pub values: Vec<(String, f64)>,
    /// Groups of tied strategies, best first.
    pub ranking: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rankings: Vec<CheckpointRanking>,
}

impl ComparisonReport {
    pub fn at(&self, step: usize, metric: ComparisonMetric) -> Option<&CheckpointRanking> {
        self.rankings.iter().find(|r| r.step == step && r.metric == metric)
    }
}

fn metric_at(lines: &[TraceLine], step: usize, metric: ComparisonMetric) -> Option<f64> {
    let at_step = lines.iter().filter(|l| l.step == step);
    match metric {
        ComparisonMetric::ActiveSellers => at_step
            .filter(|l| l.entity_kind == EntityKind::Market && l.metric == "active_sellers")
            .map(|l| l.value)
            .next(),
        ComparisonMetric::SellerAvgProfit => {
            let v: Vec<f64> = at_step
                .filter(|l| l.entity_kind == EntityKind::Seller && l.metric == "cumulative_profit")
                .map(|l| l.value)
                .collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        }
        ComparisonMetric::BuyerUtility => {
            let v: Vec<f64> = at_step
                .filter(|l| l.entity_kind == EntityKind::Buyer && l.metric == "cumulative_utility")
                .map(|l| l.value)
                .collect();
            (!v.is_empty()).then(|| v.iter().sum())
        }
    }
}

/// Orders strategies per metric at each checkpoint step that every trace
/// reaches. Values within `1e-9 (1 + |v|)` of each other tie.
pub fn compare_strategies(runs: &[(ScenarioConfig, Vec<TraceLine>)], checkpoints: &[usize]) -> Result<ComparisonReport> {
    let Some((base, _)) = runs.first() else { return Ok(ComparisonReport::default()) };
    if let Some((other, _)) = runs.iter().find(|(c, _)| !c.same_market(base)) {
        return Err(Error::config(format!(
            "configurations differ beyond pricing strategy ({} vs {})",
            base.strategy.label(),
            other.strategy.label()
        )));
    }
    let mut rankings = Vec::new();
    for &step in checkpoints {
        for metric in ComparisonMetric::ALL {
            let values: Option<Vec<(String, f64)>> = runs
                .iter()
                .map(|(c, lines)| metric_at(lines, step, metric).map(|v| (c.strategy.label(), v)))
                .collect();
            let Some(values) = values else { continue };
            rankings.push(CheckpointRanking { step, metric, ranking: rank_groups(&values), values });
        }
    }
    Ok(ComparisonReport { rankings })
}

fn rank_groups(values: &[(String, f64)]) -> Vec<Vec<String>> {
    let mut sorted: Vec<&(String, f64)> = values.iter().collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut groups: Vec<(f64, Vec<String>)> = Vec::new();
    for (label, v) in sorted {
        match groups.last_mut() {
            Some((head, g)) if (*head - v).abs() <= 1e-9 * (1.0 + head.abs()) => g.push(label.clone()),
            _ => groups.push((*v, vec![label.clone()])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Mean of `metric` across runs at every step.
pub fn mean_metric_by_step(runs: &[Vec<TraceLine>], metric: ComparisonMetric) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for lines in runs {
        let last = lines.iter().map(|l| l.step).max().unwrap_or(0);
        for step in 1..=last {
            if let Some(v) = metric_at(lines, step, metric) {
                let e = acc.entry(step).or_default();
                e.0 += v;
                e.1 += 1;
            }
        }
    }
    acc.into_iter().map(|(s, (sum, n))| (s, sum / n as f64)).collect()
}
