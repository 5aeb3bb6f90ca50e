//! Data-valuation providers. Every provider returns scores normalized to
//! `[0, 1]` by min-max over the scored batch.

mod bm25;
mod ingest;
mod toy;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use bm25::{tokenize, value_bm25, Bm25, Corpus, Document};
pub use ingest::{ingest_scores, parse_scores, write_scores, ScoreRecord};
pub use toy::{infl_ip, oracle_one_step, Sample, ToyInstance, ToyModel};

/// Where a buyer's valuation scores come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationSource {
    Constant,
    Random { seed: u64 },
    Bm25,
    ToyInfluence,
    ToyOracle,
    Ingested { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationScore {
    pub dataset_id: String,
    pub buyer_id: String,
    pub raw: f64,
    pub normalized: f64,
}

/// Min-max normalization to `[0, 1]`; a constant batch maps to all ones.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if raw.is_empty() || hi <= lo {
        return vec![1.0; raw.len()];
    }
    raw.iter().map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
}

/// Builds normalized scores for `(dataset_id, raw)` pairs of one buyer.
pub fn score_batch<S: AsRef<str>>(buyer: &str, raw: impl IntoIterator<Item = (S, f64)>) -> Vec<ValuationScore> {
    let (ids, raw): (Vec<S>, Vec<f64>) = raw.into_iter().unzip();
    let normalized = normalize(&raw);
    ids.into_iter()
        .zip(raw)
        .zip(normalized)
        .map(|((id, raw), normalized)| ValuationScore {
            dataset_id: id.as_ref().to_string(),
            buyer_id: buyer.to_string(),
            raw,
            normalized,
        })
        .collect()
}

/// Every dataset gets the same value.
pub fn value_constant<S: AsRef<str>>(datasets: &[S], buyer: &str) -> Vec<ValuationScore> {
    score_batch(buyer, datasets.iter().map(|d| (d.as_ref(), 1.0)))
}

/// Independent uniform draws on `[0, 1)`, reproducible per seed.
pub fn value_random<S: AsRef<str>>(datasets: &[S], buyer: &str, seed: u64) -> Vec<ValuationScore> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    score_batch(buyer, datasets.iter().map(|d| (d.as_ref(), rng.random::<f64>())))
}
