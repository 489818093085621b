//! The three synthetic bitext constructions.

use serde::{Deserialize, Serialize};

use super::translator::{translate_batched, Translator};
use super::PipelineError;
use crate::corpus::{normalize, Lang, MonoCorpus, ParallelCorpus, Provenance, Sentence};

/// Batch size used when none is given.
pub const DEFAULT_BATCH: usize = 256;

/// Where a synthetic bitext came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub provenance: Provenance,
    /// Name of the corpus whose text was translated.
    pub source_corpus: String,
    /// Translators in application order.
    pub translators: Vec<String>,
    /// Languages the text passed through, first to last.
    pub chain: Vec<Lang>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthBitext {
    pub corpus: ParallelCorpus,
    pub lineage: Lineage,
}

impl SynthBitext {
    pub fn provenance(&self) -> Provenance {
        self.lineage.provenance
    }

    pub fn len(&self) -> usize {
        self.corpus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpus.is_empty()
    }
}

fn run(
    t: &dyn Translator,
    lines: &[String],
    from: &Lang,
    to: &Lang,
    batch: usize,
) -> Result<Vec<String>, PipelineError> {
    Ok(translate_batched(t, lines, from, to, batch)?)
}

fn pair_up(
    stage: &'static str,
    synthetic: Vec<String>,
    authentic: impl Iterator<Item = Sentence>,
) -> Result<Vec<(Sentence, Sentence)>, PipelineError> {
    synthetic
        .iter()
        .zip(authentic)
        .enumerate()
        .map(|(i, (s, t))| {
            let s = normalize(s);
            if s.is_empty() {
                Err(PipelineError::EmptyTranslation { stage, line: i + 1 })
            } else {
                Ok((s, t))
            }
        })
        .collect()
}

/// Back-translate target-language text: pairs are `(t(x), x)`.
pub fn build_synth_mono(
    mono: &MonoCorpus,
    corpus_name: &str,
    t: &dyn Translator,
    lrl: &Lang,
    batch: usize,
) -> Result<SynthBitext, PipelineError> {
    let tgt = mono.lang();
    let out = run(t, &mono.lines(), tgt, lrl, batch)?;
    let pairs = pair_up("synth_mono", out, mono.sentences().iter().cloned())?;
    Ok(SynthBitext {
        corpus: ParallelCorpus::new(lrl.clone(), tgt.clone(), pairs, Provenance::SynthMono)?,
        lineage: Lineage {
            provenance: Provenance::SynthMono,
            source_corpus: corpus_name.to_string(),
            translators: vec![t.name()],
            chain: vec![tgt.clone(), lrl.clone()],
        },
    })
}

/// Translate the high-resource side of an HRL-TGT bitext: pairs are
/// `(t(hrl), tgt)`.
pub fn build_synth_mix1(
    hrl_tgt: &ParallelCorpus,
    corpus_name: &str,
    t: &dyn Translator,
    lrl: &Lang,
    batch: usize,
) -> Result<SynthBitext, PipelineError> {
    let hrl = hrl_tgt.source_lang();
    let lines: Vec<String> = hrl_tgt.sources().map(|s| s.text().to_string()).collect();
    let out = run(t, &lines, hrl, lrl, batch)?;
    let pairs = pair_up("synth_mix1", out, hrl_tgt.targets().cloned())?;
    Ok(SynthBitext {
        corpus: ParallelCorpus::new(lrl.clone(), hrl_tgt.target_lang().clone(), pairs, Provenance::SynthMix1)?,
        lineage: Lineage {
            provenance: Provenance::SynthMix1,
            source_corpus: corpus_name.to_string(),
            translators: vec![t.name()],
            chain: vec![hrl.clone(), lrl.clone()],
        },
    })
}

/// Pivot target-language text through the HRL: pairs are `(t2(t1(x)), x)`.
pub fn build_synth_mix2(
    mono: &MonoCorpus,
    corpus_name: &str,
    t1: &dyn Translator,
    hrl: &Lang,
    t2: &dyn Translator,
    lrl: &Lang,
    batch: usize,
) -> Result<SynthBitext, PipelineError> {
    let tgt = mono.lang();
    let mid = run(t1, &mono.lines(), tgt, hrl, batch)?;
    // normalize between hops, as any corpus would be
    let mid: Vec<String> = mid.iter().map(|l| normalize(l).into_string()).collect();
    if let Some(i) = mid.iter().position(String::is_empty) {
        return Err(PipelineError::EmptyTranslation {
            stage: "synth_mix2",
            line: i + 1,
        });
    }
    let out = run(t2, &mid, hrl, lrl, batch)?;
    let pairs = pair_up("synth_mix2", out, mono.sentences().iter().cloned())?;
    Ok(SynthBitext {
        corpus: ParallelCorpus::new(lrl.clone(), tgt.clone(), pairs, Provenance::SynthMix2)?,
        lineage: Lineage {
            provenance: Provenance::SynthMix2,
            source_corpus: corpus_name.to_string(),
            translators: vec![t1.name(), t2.name()],
            chain: vec![tgt.clone(), hrl.clone(), lrl.clone()],
        },
    })
}
