use unicode_normalization::UnicodeNormalization;

use super::{check_pairs, EvalPair, MetricError, MetricReport, ParamValue};

/// Edit distance with unit insert, delete and substitute costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Corpus character error rate, in percent: total character edit distance
/// over total reference characters. Spaces count; only the first
/// reference of each pair is used.
pub fn cer(pairs: &[EvalPair]) -> Result<MetricReport, MetricError> {
    check_pairs(pairs)?;
    let mut edits = 0usize;
    let mut ref_chars = 0usize;
    let mut per_sentence = Vec::with_capacity(pairs.len());
    let mut multi_ref = false;
    for (i, p) in pairs.iter().enumerate() {
        multi_ref |= p.references.len() > 1;
        let r: Vec<char> = p.references[0].text().nfc().collect();
        if r.is_empty() {
            return Err(MetricError::EmptyReference(i + 1));
        }
        let h: Vec<char> = p.hypothesis.text().nfc().collect();
        let d = levenshtein(&h, &r);
        per_sentence.push(100.0 * d as f64 / r.len() as f64);
        edits += d;
        ref_chars += r.len();
    }
    let mut report = MetricReport::new("cer", 100.0 * edits as f64 / ref_chars as f64)
        .param("unit", ParamValue::Text("char".into()))
        .param("spaces", ParamValue::Text("included".into()));
    report.per_sentence = per_sentence;
    if multi_ref {
        report
            .warnings
            .push("multiple references given; CER uses only the first".into());
    }
    Ok(report)
}
