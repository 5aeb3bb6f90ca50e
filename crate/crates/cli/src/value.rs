use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use fairshare_core::valuation::{
    ingest_scores, score_batch, value_bm25, value_constant, value_random, write_scores, Corpus, Document,
    ToyInstance,
};
use serde::Deserialize;

use crate::failure::{read_input, write_file, Failure, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Constant,
    Random,
    Bm25,
    ToyInfluence,
    ToyOracle,
    Ingest,
}

#[derive(Debug, Args)]
pub struct ValueArgs {
    #[arg(value_enum)]
    method: Method,
    /// Score file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "buyer-0")]
    buyer: String,
    /// Dataset ids (constant, random).
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference corpus, one `{"id", "text"}` object per line (bm25).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Corpus ids that represent the buyer's task (bm25).
    #[arg(long, value_delimiter = ',')]
    representatives: Vec<String>,
    /// Datasets to score, one `{"id", "text"}` object per line (bm25).
    #[arg(long)]
    texts: Option<PathBuf>,
    /// Feature dimension of the toy regression.
    #[arg(long, default_value_t = 5)]
    dim: usize,
    /// Training samples to score (toy methods).
    #[arg(long, default_value_t = 100)]
    train: usize,
    /// Test samples (toy methods).
    #[arg(long, default_value_t = 20)]
    test: usize,
    /// Learning rate of the one-step oracle.
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    /// Score file to normalize (ingest).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct TextRecord {
    id: String,
    text: String,
}

fn read_texts(path: &Path) -> Result<Vec<TextRecord>, Failure> {
    let text = read_input(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), i + 1)))
        .collect::<anyhow::Result<_>>()
        .map_err(Failure::from)
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> anyhow::Result<&'a T> {
    v.as_ref().ok_or_else(|| anyhow!("--{flag} is required for this method"))
}

pub fn run(args: &ValueArgs) -> Result<(), Failure> {
    let toy = || ToyInstance::random(args.seed, args.dim, args.train, args.test);
    let scores = match args.method {
        Method::Constant => value_constant(&args.datasets, &args.buyer),
        Method::Random => value_random(&args.datasets, &args.buyer, args.seed),
        Method::Bm25 => {
            let corpus = Corpus {
                documents: read_texts(required(&args.corpus, "corpus")?)?
                    .into_iter()
                    .map(|r| Document::from_text(r.id, &r.text))
                    .collect(),
                representative_ids: args.representatives.clone(),
            };
            let texts: Vec<(String, String)> =
                read_texts(required(&args.texts, "texts")?)?.into_iter().map(|r| (r.id, r.text)).collect();
            value_bm25(&corpus, &texts, &args.buyer)?
        }
        Method::ToyInfluence => score_batch(&args.buyer, toy().influence_scores()?),
        Method::ToyOracle => score_batch(&args.buyer, toy().oracle_scores(args.eta)?),
        Method::Ingest => {
            let input = required(&args.input, "input")?;
            ingest_scores(input).input(input.display())?
        }
    };
    write_file(&args.out, |w| Ok(write_scores(w, &scores)?))?;
    println!("wrote {} scores to {}", scores.len(), args.out.display());
    Ok(())
}
