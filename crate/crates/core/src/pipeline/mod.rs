//! Synthetic bitexts, augmentation schedules and multi-source assembly.
//!
//! Translation itself is external: anything implementing [`Translator`]
//! can produce synthetic text. Built-ins cover tests and rule-based
//! transformation.

mod manifest;
mod multisource;
mod schedule;
mod synth;
mod translator;

use std::path::PathBuf;

pub use manifest::{
    build, build_file, validate_dataset, BuildReport, CorpusSpec, DatasetMeta, Manifest, MultisourceSpec,
    ScheduleSection, SynthRecipe, SynthSpecs, TranslatorSpec, MANIFEST_VERSION,
};
pub use multisource::{assemble_multisource, source_tag, MULTIPLE_LANGS};
pub use schedule::{build_schedule, stage_name, Schedule, ScheduleSpec, TrainingSet};
pub use synth::{build_synth_mix1, build_synth_mix2, build_synth_mono, Lineage, SynthBitext, DEFAULT_BATCH};
pub use translator::{
    translate_batched, CommandTranslator, HttpTranslator, IdentityTranslator, RuleTranslator, TranslateError,
    Translator,
};

use crate::corpus::CorpusError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{stage}: translation of line {line} is empty")]
    EmptyTranslation { stage: &'static str, line: usize },
    #[error("stage {stage}: needs {requested} {part} pairs, only {available} available")]
    Capacity {
        stage: String,
        part: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("{part}: expected {expected}, found {found}")]
    Language {
        part: String,
        expected: String,
        found: String,
    },
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
