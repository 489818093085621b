//! Resources shipped with the toolkit.
//!
//! Every file can also be named as `builtin:NAME` wherever a path is
//! accepted, e.g. `builtin:fra_hat.rules`.
//!
//! The FRA→HAT orthographic and syntactic rules are a small starter set
//! written for this toolkit, not a reconstruction of any larger engine.
//! The English–Jamaican lexicon is illustrative.

use std::path::{Path, PathBuf};

use crate::codeswitch::CodeSwitchLexicon;
use crate::phonvec::PhoneFeatureTable;
use crate::syntree::SyntaxRuleSet;
use crate::translit::RewriteRuleSet;

pub const BUILTIN_PREFIX: &str = "builtin:";

const FILES: &[(&str, &str)] = &[
    ("fra_hat.rules", include_str!("../data/fra_hat.rules")),
    ("fra_ipa.rules", include_str!("../data/fra_ipa.rules")),
    ("hat_ipa.rules", include_str!("../data/hat_ipa.rules")),
    ("eng_ipa.rules", include_str!("../data/eng_ipa.rules")),
    ("jam_ipa.rules", include_str!("../data/jam_ipa.rules")),
    ("fra_hat.syn", include_str!("../data/fra_hat.syn")),
    ("fra_hat.lex.tsv", include_str!("../data/fra_hat.lex.tsv")),
    ("features.csv", include_str!("../data/features.csv")),
    ("eng_jam.tsv", include_str!("../data/eng_jam.tsv")),
    ("cognates_fra_hat.tsv", include_str!("../data/cognates_fra_hat.tsv")),
];

/// Names of all shipped files.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Contents of a shipped file.
pub fn builtin(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("unknown built-in resource {0:?}")]
    Unknown(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Read `spec`, which is either `builtin:NAME` or a path. Relative paths
/// are taken against `base`.
pub fn read_resource(spec: &str, base: &Path) -> Result<String, ResourceError> {
    if let Some(name) = spec.strip_prefix(BUILTIN_PREFIX) {
        return builtin(name)
            .map(str::to_string)
            .ok_or_else(|| ResourceError::Unknown(name.to_string()));
    }
    let path = base.join(spec);
    std::fs::read_to_string(&path).map_err(|source| ResourceError::Io { path, source })
}

fn rules(name: &str) -> RewriteRuleSet {
    RewriteRuleSet::parse(builtin(name).expect("shipped")).expect("shipped rules parse")
}

/// Starter French→Haitian orthography.
pub fn fra_hat_rules() -> RewriteRuleSet {
    rules("fra_hat.rules")
}

pub fn fra_ipa_rules() -> RewriteRuleSet {
    rules("fra_ipa.rules")
}

pub fn hat_ipa_rules() -> RewriteRuleSet {
    rules("hat_ipa.rules")
}

pub fn eng_ipa_rules() -> RewriteRuleSet {
    rules("eng_ipa.rules")
}

pub fn jam_ipa_rules() -> RewriteRuleSet {
    rules("jam_ipa.rules")
}

/// Starter French→Haitian syntax rules with their leaf lexicon.
pub fn fra_hat_syntax() -> SyntaxRuleSet {
    SyntaxRuleSet::parse(builtin("fra_hat.syn").expect("shipped"))
        .and_then(|r| r.with_lexicon_tsv(builtin("fra_hat.lex.tsv").expect("shipped")))
        .expect("shipped syntax rules parse")
}

/// The articulatory feature table.
pub fn feature_table() -> PhoneFeatureTable {
    PhoneFeatureTable::parse_csv(builtin("features.csv").expect("shipped")).expect("shipped table parses")
}

pub fn eng_jam_lexicon() -> CodeSwitchLexicon {
    CodeSwitchLexicon::parse("eng_jam", builtin("eng_jam.tsv").expect("shipped")).expect("shipped lexicon parses")
}

/// French/Haitian cognate pairs, `(french, haitian)`.
pub fn cognates_fra_hat() -> Vec<(&'static str, &'static str)> {
    builtin("cognates_fra_hat.tsv")
        .expect("shipped")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_once('\t').expect("two columns"))
        .collect()
}
