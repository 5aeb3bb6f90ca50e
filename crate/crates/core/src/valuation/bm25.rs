use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{score_batch, ValuationScore};
use crate::error::{Error, Result};

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn from_text(id: impl Into<String>, text: &str) -> Self {
        Document { id: id.into(), tokens: tokenize(text) }
    }
}

/// Reference documents; scoring compares against the representative subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub representative_ids: Vec<String>,
}

impl Corpus {
    pub fn validate(&self) -> Result<()> {
        if self.representative_ids.is_empty() {
            return Err(Error::config("representative set is empty"));
        }
        let ids: HashSet<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();
        if let Some(missing) = self.representative_ids.iter().find(|r| !ids.contains(r.as_str())) {
            return Err(Error::config(format!("representative `{missing}` is not in the corpus")));
        }
        if let Some(empty) = self.documents.iter().find(|d| d.tokens.is_empty()) {
            return Err(Error::config(format!("document `{}` has no tokens", empty.id)));
        }
        Ok(())
    }
}

/// Okapi BM25 over a fixed corpus.
#[derive(Debug, Clone)]
pub struct Bm25 {
    pub k1: f64,
    pub b: f64,
    doc_freq: HashMap<String, usize>,
    num_docs: usize,
    avg_len: f64,
}

impl Bm25 {
    pub const K1: f64 = 1.2;
    pub const B: f64 = 0.75;

    pub fn new(documents: &[Document]) -> Self {
        let mut doc_freq = HashMap::new();
        for doc in documents {
            let unique: HashSet<&String> = doc.tokens.iter().collect();
            for term in unique {
                *doc_freq.entry(term.clone()).or_insert(0) += 1;
            }
        }
        let total: usize = documents.iter().map(|d| d.tokens.len()).sum();
        let avg_len = if documents.is_empty() { 0.0 } else { total as f64 / documents.len() as f64 };
        Bm25 { k1: Self::K1, b: Self::B, doc_freq, num_docs: documents.len(), avg_len }
    }

    /// `ln(1 + (N - n + 0.5) / (n + 0.5))`, never negative.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_freq.get(term).copied().unwrap_or(0) as f64;
        let total = self.num_docs as f64;
        (1.0 + (total - n + 0.5) / (n + 0.5)).ln()
    }

    pub fn score(&self, query: &[String], doc: &Document) -> f64 {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for t in &doc.tokens {
            *tf.entry(t.as_str()).or_insert(0) += 1;
        }
        let len_norm = if self.avg_len > 0.0 { doc.tokens.len() as f64 / self.avg_len } else { 0.0 };
        let mut seen = HashSet::new();
        let mut score = 0.0;
        for term in query {
            if !seen.insert(term.as_str()) {
                continue;
            }
            let Some(&f) = tf.get(term.as_str()) else { continue };
            let f = f as f64;
            score += self.idf(term) * f * (self.k1 + 1.0) / (f + self.k1 * (1.0 - self.b + self.b * len_norm));
        }
        score
    }
}

/// Mean BM25 score of each dataset text against the representative documents.
pub fn value_bm25<S: AsRef<str>>(
    corpus: &Corpus,
    dataset_texts: &[(S, S)],
    buyer: &str,
) -> Result<Vec<ValuationScore>> {
    corpus.validate()?;
    let index = Bm25::new(&corpus.documents);
    let reps: Vec<&Document> = corpus
        .representative_ids
        .iter()
        .filter_map(|id| corpus.documents.iter().find(|d| &d.id == id))
        .collect();
    let raw = dataset_texts.iter().map(|(id, text)| {
        let query = tokenize(text.as_ref());
        let mean = reps.iter().map(|d| index.score(&query, d)).sum::<f64>() / reps.len() as f64;
        (id.as_ref().to_string(), mean)
    });
    Ok(score_batch(buyer, raw))
}
