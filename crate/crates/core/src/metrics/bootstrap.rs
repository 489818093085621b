//! Paired bootstrap resampling.
//!
//! Sentences are grouped into consecutive documents of `doc_size`. Each
//! iteration draws as many documents as there are, with replacement, using
//! the same draw for both systems, and compares the two corpus scores.
//! Iteration `i` seeds its own generator with `derive_seed(seed, i)`, so the
//! result does not depend on how iterations are scheduled.
//!
//! `p` is the fraction of resamples in which A does not beat B, counting a
//! tie as half.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bleu::{BleuStats, Smoothing};
use super::{check_pairs, EvalPair, MetricError};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub iterations: usize,
    /// Sentences per document; `None` means `ceil(n / 1000)`.
    pub doc_size: Option<usize>,
    pub seed: u64,
    pub max_n: usize,
    pub smoothing: Smoothing,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            iterations: 1000,
            doc_size: None,
            seed: 0,
            max_n: 4,
            smoothing: Smoothing::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub mean: f64,
    pub std: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl ScoreSummary {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let at = |q: f64| sorted[((q * (sorted.len() - 1) as f64).round()) as usize];
        ScoreSummary {
            mean,
            std: var.sqrt(),
            ci95_low: at(0.025),
            ci95_high: at(0.975),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub test: &'static str,
    pub p_value: f64,
    pub iterations: usize,
    pub seed: u64,
    pub documents: usize,
    pub doc_size: usize,
    pub observed_a: f64,
    pub observed_b: f64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// Every resample tied.
    pub indistinguishable: bool,
    pub a: ScoreSummary,
    pub b: ScoreSummary,
    pub delta: ScoreSummary,
}

/// Document indices drawn by iteration `iteration`.
pub fn resample_indices(seed: u64, iteration: usize, documents: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, iteration as u64));
    (0..documents).map(|_| rng.gen_range(0..documents)).collect()
}

fn summarize(
    test: &'static str,
    samples: Vec<(f64, f64)>,
    observed: (f64, f64),
    seed: u64,
    documents: usize,
    doc_size: usize,
) -> BootstrapResult {
    let (mut wins_a, mut wins_b, mut ties) = (0, 0, 0);
    for &(a, b) in &samples {
        match a.partial_cmp(&b) {
            Some(std::cmp::Ordering::Greater) => wins_a += 1,
            Some(std::cmp::Ordering::Less) => wins_b += 1,
            _ => ties += 1,
        }
    }
    let iterations = samples.len();
    let a: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let b: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let d: Vec<f64> = samples.iter().map(|s| s.0 - s.1).collect();
    BootstrapResult {
        test,
        p_value: (wins_b as f64 + 0.5 * ties as f64) / iterations as f64,
        iterations,
        seed,
        documents,
        doc_size,
        observed_a: observed.0,
        observed_b: observed.1,
        wins_a,
        wins_b,
        ties,
        indistinguishable: ties == iterations,
        a: ScoreSummary::of(&a),
        b: ScoreSummary::of(&b),
        delta: ScoreSummary::of(&d),
    }
}

/// Paired bootstrap test of corpus BLEU for systems A and B.
pub fn bootstrap_bleu_significance(
    pairs_a: &[EvalPair],
    pairs_b: &[EvalPair],
    opts: &BootstrapOptions,
) -> Result<BootstrapResult, MetricError> {
    check_pairs(pairs_a)?;
    check_pairs(pairs_b)?;
    if pairs_a.len() != pairs_b.len() {
        return Err(MetricError::Length {
            hyps: pairs_a.len(),
            refs: pairs_b.len(),
        });
    }
    if let Some(i) = pairs_a
        .iter()
        .zip(pairs_b)
        .position(|(a, b)| a.references != b.references)
    {
        return Err(MetricError::ReferenceMismatch(i + 1));
    }
    if opts.iterations == 0 {
        return Err(MetricError::Parameter("iterations must be at least 1".into()));
    }
    if opts.max_n == 0 {
        return Err(MetricError::Order);
    }
    let n = pairs_a.len();
    let doc_size = match opts.doc_size {
        Some(0) => return Err(MetricError::Parameter("doc_size must be at least 1".into())),
        Some(d) => d,
        None => n.div_ceil(1000),
    };
    let doc_stats = |pairs: &[EvalPair]| -> Vec<BleuStats> {
        pairs
            .chunks(doc_size)
            .map(|doc| {
                let mut s = BleuStats::zero(opts.max_n);
                for p in doc {
                    s.add(&BleuStats::of_pair(p, opts.max_n));
                }
                s
            })
            .collect()
    };
    let docs_a = doc_stats(pairs_a);
    let docs_b = doc_stats(pairs_b);
    let documents = docs_a.len();
    let corpus = |docs: &[BleuStats], idx: &mut dyn Iterator<Item = usize>| {
        let mut s = BleuStats::zero(opts.max_n);
        for i in idx {
            s.add(&docs[i]);
        }
        s.score(opts.smoothing)
    };
    let observed = (
        corpus(&docs_a, &mut (0..documents)),
        corpus(&docs_b, &mut (0..documents)),
    );
    let samples: Vec<(f64, f64)> = (0..opts.iterations)
        .into_par_iter()
        .map(|it| {
            let idx = resample_indices(opts.seed, it, documents);
            (
                corpus(&docs_a, &mut idx.iter().copied()),
                corpus(&docs_b, &mut idx.iter().copied()),
            )
        })
        .collect();
    Ok(summarize(
        "paired-bootstrap-bleu",
        samples,
        observed,
        opts.seed,
        documents,
        doc_size,
    ))
}

/// Paired bootstrap on per-item scores, comparing means. Suited to
/// sentence-level scores produced elsewhere.
pub fn paired_bootstrap_mean(
    a: &[f64],
    b: &[f64],
    iterations: usize,
    seed: u64,
) -> Result<BootstrapResult, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::Length {
            hyps: a.len(),
            refs: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricError::Empty);
    }
    if iterations == 0 {
        return Err(MetricError::Parameter("iterations must be at least 1".into()));
    }
    let mean = |v: &[f64], idx: &[usize]| idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64;
    let all: Vec<usize> = (0..a.len()).collect();
    let observed = (mean(a, &all), mean(b, &all));
    let samples: Vec<(f64, f64)> = (0..iterations)
        .into_par_iter()
        .map(|it| {
            let idx = resample_indices(seed, it, a.len());
            (mean(a, &idx), mean(b, &idx))
        })
        .collect();
    Ok(summarize("paired-bootstrap-mean", samples, observed, seed, a.len(), 1))
}
