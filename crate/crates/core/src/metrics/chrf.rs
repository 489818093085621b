use std::collections::HashMap;
use std::hash::Hash;

use super::{check_pairs, EvalPair, MetricError, MetricReport, ParamValue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfParams {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            word_order: 2,
            beta: 2.0,
        }
    }
}

/// Per-order (hypothesis n-grams, reference n-grams, matched n-grams).
type OrderStats = Vec<[u64; 3]>;

fn overlap<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> [u64; 3] {
    fn counts<T: Eq + Hash>(s: &[T], n: usize) -> HashMap<&[T], u64> {
        let mut m = HashMap::new();
        if s.len() >= n {
            for w in s.windows(n) {
                *m.entry(w).or_insert(0) += 1;
            }
        }
        m
    }
    let h = counts(hyp, n);
    let r = counts(reference, n);
    let matched = h.iter().map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0))).sum();
    [
        hyp.len().saturating_sub(n - 1) as u64,
        reference.len().saturating_sub(n - 1) as u64,
        matched,
    ]
}

fn pair_stats(hyp: &str, reference: &str, params: &ChrfParams) -> OrderStats {
    let hc: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let rc: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let hw: Vec<&str> = hyp.split_whitespace().collect();
    let rw: Vec<&str> = reference.split_whitespace().collect();
    let mut stats = Vec::with_capacity(params.char_order + params.word_order);
    for n in 1..=params.char_order {
        stats.push(overlap(&hc, &rc, n));
    }
    for n in 1..=params.word_order {
        stats.push(overlap(&hw, &rw, n));
    }
    stats
}

/// F-beta of the precision and recall averaged over every order present in
/// either hypothesis or reference. Orders absent from both are skipped.
fn f_score(stats: &OrderStats, beta: f64) -> f64 {
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    let mut orders = 0usize;
    for &[h, r, m] in stats {
        if h == 0 && r == 0 {
            continue;
        }
        orders += 1;
        if h > 0 {
            p_sum += m as f64 / h as f64;
        }
        if r > 0 {
            r_sum += m as f64 / r as f64;
        }
    }
    if orders == 0 {
        return 0.0;
    }
    let p = p_sum / orders as f64;
    let r = r_sum / orders as f64;
    let b2 = beta * beta;
    if p + r == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + b2) * p * r / (b2 * p + r)
}

/// chrF++: character n-grams (whitespace removed) plus word n-grams. The
/// corpus score sums n-gram statistics over sentences; with several
/// references each sentence contributes its best-scoring one.
pub fn chrfpp(pairs: &[EvalPair], params: ChrfParams) -> Result<MetricReport, MetricError> {
    check_pairs(pairs)?;
    if params.char_order + params.word_order == 0 {
        return Err(MetricError::Order);
    }
    if params.beta.is_nan() || params.beta <= 0.0 {
        return Err(MetricError::Parameter(format!("beta = {}", params.beta)));
    }
    let width = params.char_order + params.word_order;
    let mut total: OrderStats = vec![[0; 3]; width];
    let mut per_sentence = Vec::with_capacity(pairs.len());
    for p in pairs {
        let best = p
            .references
            .iter()
            .map(|r| {
                let s = pair_stats(p.hypothesis.text(), r.text(), &params);
                (f_score(&s, params.beta), s)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one reference");
        per_sentence.push(best.0);
        for (acc, s) in total.iter_mut().zip(&best.1) {
            for k in 0..3 {
                acc[k] += s[k];
            }
        }
    }
    let mut report = MetricReport::new("chrf++", f_score(&total, params.beta))
        .param("char_order", ParamValue::Int(params.char_order as i64))
        .param("word_order", ParamValue::Int(params.word_order as i64))
        .param("beta", ParamValue::Float(params.beta));
    report.per_sentence = per_sentence;
    Ok(report)
}
