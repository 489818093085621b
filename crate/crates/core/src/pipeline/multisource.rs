use super::PipelineError;
use crate::corpus::{normalize, Lang, ParallelCorpus, Provenance};

/// Language code used for the source side of a bitext mixing several
/// source languages.
pub const MULTIPLE_LANGS: &str = "mul";

/// The reserved token prefixed to tagged source sentences.
pub fn source_tag(lang: &Lang) -> String {
    format!("<{lang}>")
}

/// Concatenate bitexts that share a target language, in order. With
/// `tag_sources`, every source sentence is prefixed with `<lang>`.
pub fn assemble_multisource(parts: &[ParallelCorpus], tag_sources: bool) -> Result<ParallelCorpus, PipelineError> {
    let Some(first) = parts.first() else {
        return Err(PipelineError::Schedule(
            "multi-source assembly needs at least one part".into(),
        ));
    };
    let target = first.target_lang();
    if let Some((i, p)) = parts.iter().enumerate().find(|(_, p)| p.target_lang() != target) {
        return Err(PipelineError::Language {
            part: format!("part {}", i + 1),
            expected: target.to_string(),
            found: p.target_lang().to_string(),
        });
    }
    let source = if parts.iter().all(|p| p.source_lang() == first.source_lang()) {
        first.source_lang().clone()
    } else {
        Lang::new(MULTIPLE_LANGS).expect("valid code")
    };
    let provenance = if parts.iter().all(|p| p.provenance() == first.provenance()) {
        first.provenance()
    } else {
        Provenance::Mixed
    };
    let pairs = parts
        .iter()
        .flat_map(|p| {
            let tag = source_tag(p.source_lang());
            p.pairs().iter().map(move |(s, t)| {
                let s = if tag_sources {
                    normalize(&format!("{tag} {s}"))
                } else {
                    s.clone()
                };
                (s, t.clone())
            })
        })
        .collect();
    Ok(ParallelCorpus::new(source, target.clone(), pairs, provenance)?)
}
