//! Score files: one JSON object per line with `dataset_id`, `buyer_id` and
//! `score`. Written files also carry `normalized`, which readers ignore and
//! recompute over the whole file.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{normalize, ValuationScore};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub dataset_id: String,
    pub buyer_id: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<f64>,
}

pub fn ingest_scores(path: impl AsRef<Path>) -> Result<Vec<ValuationScore>> {
    parse_scores(&std::fs::read_to_string(path)?)
}

/// Parses a score file and min-max normalizes the raw scores as one batch.
/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_scores(text: &str) -> Result<Vec<ValuationScore>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line)
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        let field = |name: &str| {
            value
                .get(name)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::Parse { line: line_no, message: format!("missing string field `{name}`") })
        };
        let dataset_id = field("dataset_id")?;
        let buyer_id = field("buyer_id")?;
        let score = match value.get("score") {
            Some(Value::Number(n)) => n.as_f64().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "score is not representable as f64".into(),
            })?,
            Some(Value::String(s)) => s.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("score `{s}` is not numeric"),
            })?,
            _ => {
                return Err(Error::Parse { line: line_no, message: "missing numeric field `score`".into() })
            }
        };
        if !score.is_finite() {
            return Err(Error::Data { line: line_no, message: format!("score is {score}") });
        }
        records.push((dataset_id, buyer_id, score));
    }
    let raw: Vec<f64> = records.iter().map(|r| r.2).collect();
    Ok(records
        .into_iter()
        .zip(normalize(&raw))
        .map(|((dataset_id, buyer_id, raw), normalized)| ValuationScore { dataset_id, buyer_id, raw, normalized })
        .collect())
}

pub fn write_scores(mut out: impl Write, scores: &[ValuationScore]) -> Result<()> {
    for s in scores {
        let record = ScoreRecord {
            dataset_id: s.dataset_id.clone(),
            buyer_id: s.buyer_id.clone(),
            score: s.raw,
            normalized: Some(s.normalized),
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_lines() {
        let text = r#"{"dataset_id":"a","buyer_id":"k","score":2.0}
{"dataset_id":"b","buyer_id":"k","score":6}
{"dataset_id":"c","buyer_id":"k","score":"4"}
"#;
        let s = parse_scores(text).unwrap();
        assert_eq!(s.iter().map(|s| s.normalized).collect::<Vec<_>>(), vec![0.0, 1.0, 0.5]);
        assert_eq!(s[2].raw, 4.0);
    }

    #[test]
    fn empty_file() {
        assert!(parse_scores("").unwrap().is_empty());
    }

    #[test]
    fn non_numeric_score_names_the_line() {
        let text = "{\"dataset_id\":\"a\",\"buyer_id\":\"k\",\"score\":1}\n{\"dataset_id\":\"b\",\"buyer_id\":\"k\",\"score\":\"high\"}\n";
        match parse_scores(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nan_is_a_data_error() {
        let text = "{\"dataset_id\":\"a\",\"buyer_id\":\"k\",\"score\":\"NaN\"}\n";
        assert!(matches!(parse_scores(text), Err(Error::Data { line: 1, .. })));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_scores("{not json"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn written_scores_read_back_identically() {
        let scores = super::super::value_random(&["a", "b", "c", "d"], "k", 5);
        let mut buf = Vec::new();
        write_scores(&mut buf, &scores).unwrap();
        assert_eq!(parse_scores(std::str::from_utf8(&buf).unwrap()).unwrap(), scores);
    }
}
