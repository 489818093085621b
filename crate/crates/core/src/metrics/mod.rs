//! Translation metrics and significance tests.
//!
//! BLEU, chrF++ and CER work on [`EvalPair`]s of one hypothesis and one or
//! more references. Scores are on a 0–100 scale. Each metric returns a
//! [`MetricReport`] that records its parameters alongside the result.

mod bleu;
mod bootstrap;
mod cer;
mod chrf;
mod wilcoxon;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{normalize, Sentence};

pub use bleu::{bleu, sentence_bleu, BleuStats, Smoothing};
pub use bootstrap::{
    bootstrap_bleu_significance, paired_bootstrap_mean, BootstrapOptions, BootstrapResult, ScoreSummary,
};
pub use cer::{cer, levenshtein};
pub use chrf::{chrfpp, ChrfParams};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonMethod, WilcoxonResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("no hypotheses to score")]
    Empty,
    #[error("n-gram order must be at least 1")]
    Order,
    #[error("pair {0} has no references")]
    NoReference(usize),
    #[error("pair {0} has an empty reference")]
    EmptyReference(usize),
    #[error("hypothesis count {hyps} does not match reference count {refs}")]
    Length { hyps: usize, refs: usize },
    #[error("the two systems are scored against different references (pair {0})")]
    ReferenceMismatch(usize),
    #[error("all paired differences are zero")]
    Degenerate,
    #[error("signed-rank test needs at least {min} non-zero differences, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("parameter out of range: {0}")]
    Parameter(String),
}

/// One hypothesis and its references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalPair {
    pub hypothesis: Sentence,
    pub references: Vec<Sentence>,
}

impl EvalPair {
    pub fn new(hypothesis: &str, references: &[&str]) -> Self {
        EvalPair {
            hypothesis: normalize(hypothesis),
            references: references.iter().map(|r| normalize(r)).collect(),
        }
    }
}

/// Zip a hypothesis list with one or more reference lists into pairs.
pub fn eval_pairs(hyps: &[Sentence], refs: &[Vec<Sentence>]) -> Result<Vec<EvalPair>, MetricError> {
    for r in refs {
        if r.len() != hyps.len() {
            return Err(MetricError::Length {
                hyps: hyps.len(),
                refs: r.len(),
            });
        }
    }
    Ok(hyps
        .iter()
        .enumerate()
        .map(|(i, h)| EvalPair {
            hypothesis: h.clone(),
            references: refs.iter().map(|r| r[i].clone()).collect(),
        })
        .collect())
}

fn check_pairs(pairs: &[EvalPair]) -> Result<(), MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    if let Some(i) = pairs.iter().position(|p| p.references.is_empty()) {
        return Err(MetricError::NoReference(i + 1));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub score: f64,
    pub params: BTreeMap<String, ParamValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_sentence: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl MetricReport {
    fn new(metric: &str, score: f64) -> Self {
        MetricReport {
            metric: metric.to_string(),
            score,
            params: BTreeMap::new(),
            per_sentence: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn param(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}
