use std::collections::HashMap;

use super::{check_pairs, EvalPair, MetricError, MetricReport, ParamValue};

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "kebab-case")]
pub enum Smoothing {
    #[default]
    None,
    /// Add `k` to matches and totals of every order above one.
    AddK(f64),
}

/// Additive BLEU sufficient statistics. Summing the statistics of several
/// sentences and scoring the sum gives their corpus BLEU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn zero(max_n: usize) -> Self {
        BleuStats {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    pub fn add(&mut self, other: &BleuStats) {
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    pub fn of_pair(pair: &EvalPair, max_n: usize) -> Self {
        let hyp: Vec<&str> = pair.hypothesis.tokens().collect();
        let refs: Vec<Vec<&str>> = pair.references.iter().map(|r| r.tokens().collect()).collect();
        let mut stats = BleuStats::zero(max_n);
        stats.hyp_len = hyp.len() as u64;
        // closest reference length, shorter on ties
        stats.ref_len = refs
            .iter()
            .map(|r| r.len())
            .min_by_key(|&l| (l.abs_diff(hyp.len()), l))
            .unwrap_or(0) as u64;
        for n in 1..=max_n {
            let hyp_counts = ngram_counts(&hyp, n);
            let mut max_ref: HashMap<&[&str], u64> = HashMap::new();
            for r in &refs {
                for (g, c) in ngram_counts(r, n) {
                    let slot = max_ref.entry(g).or_insert(0);
                    *slot = (*slot).max(c);
                }
            }
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    /// BLEU in [0, 100].
    pub fn score(&self, smoothing: Smoothing) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for (i, (&m, &t)) in self.matches.iter().zip(&self.totals).enumerate() {
            let (m, t) = match smoothing {
                Smoothing::AddK(k) if i > 0 => (m as f64 + k, t as f64 + k),
                _ => (m as f64, t as f64),
            };
            if m <= 0.0 || t <= 0.0 {
                return 0.0;
            }
            log_sum += (m / t).ln();
        }
        let log_precision = log_sum / self.matches.len() as f64;
        let bp = if self.hyp_len >= self.ref_len {
            0.0
        } else {
            1.0 - self.ref_len as f64 / self.hyp_len as f64
        };
        100.0 * (log_precision + bp).exp()
    }
}

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU with clipped n-gram precisions and a corpus-level brevity
/// penalty.
///
/// ```
/// use lrtk::metrics::{bleu, EvalPair, Smoothing};
/// let pairs = [EvalPair::new("li pa tap panse", &["li pa tap panse dèsann"])];
/// let report = bleu(&pairs, 4, Smoothing::None).unwrap();
/// assert!((report.score - 100.0 * (-0.25f64).exp()).abs() < 1e-9);
/// ```
pub fn bleu(pairs: &[EvalPair], max_n: usize, smoothing: Smoothing) -> Result<MetricReport, MetricError> {
    check_pairs(pairs)?;
    if max_n < 1 {
        return Err(MetricError::Order);
    }
    let per: Vec<BleuStats> = pairs.iter().map(|p| BleuStats::of_pair(p, max_n)).collect();
    let mut total = BleuStats::zero(max_n);
    for s in &per {
        total.add(s);
    }
    let smoothing_name = match smoothing {
        Smoothing::None => "none".to_string(),
        Smoothing::AddK(k) => format!("add-k:{k}"),
    };
    let mut report = MetricReport::new("bleu", total.score(smoothing))
        .param("max_n", ParamValue::Int(max_n as i64))
        .param("smoothing", ParamValue::Text(smoothing_name))
        .param("tokenize", ParamValue::Text("whitespace".into()));
    report.per_sentence = per.iter().map(|s| s.score(smoothing)).collect();
    Ok(report)
}

/// BLEU of a single pair.
pub fn sentence_bleu(pair: &EvalPair, max_n: usize, smoothing: Smoothing) -> f64 {
    BleuStats::of_pair(pair, max_n).score(smoothing)
}
