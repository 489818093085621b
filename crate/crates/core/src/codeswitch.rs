//! Lexicon-driven code-switching: swap high-resource words for their
//! low-resource translations so augmentation text looks more like the
//! low-resource language.
//!
//! Matching is whole-token and case-folded. With `strip_punct`, trailing
//! punctuation is detached before lookup and put back afterwards.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{normalize, Sentence};
use crate::rng::derive_seed;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `hrl<TAB>lrl`: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("duplicate entry {token:?} on lines {first} and {second}")]
    Duplicate { token: String, first: usize, second: usize },
    #[error("replacement rate {0} is outside [0, 1]")]
    Rate(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodeSwitchLexicon {
    name: String,
    entries: HashMap<String, String>,
}

impl CodeSwitchLexicon {
    /// Parse `hrl<TAB>lrl` lines. `#` lines and blank lines are skipped.
    pub fn parse(name: &str, text: &str) -> Result<Self, LexiconError> {
        let mut entries = HashMap::new();
        let mut lines: HashMap<String, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || LexiconError::Malformed {
                line: line_no,
                text: line.to_string(),
            };
            let (k, v) = line.split_once('\t').ok_or_else(malformed)?;
            let key = normalize(k).into_string().to_lowercase();
            let value = normalize(v).into_string();
            if key.is_empty() || value.is_empty() || key.contains(' ') || value.contains(' ') {
                return Err(malformed());
            }
            if let Some(&first) = lines.get(&key) {
                return Err(LexiconError::Duplicate {
                    token: key,
                    first,
                    second: line_no,
                });
            }
            lines.insert(key.clone(), line_no);
            entries.insert(key, value);
        }
        Ok(CodeSwitchLexicon {
            name: name.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&name, &text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(&token.to_lowercase()).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CodeSwitchStats {
    pub seen: u64,
    pub matched: u64,
    pub replaced: u64,
}

impl CodeSwitchStats {
    fn add(&mut self, o: &CodeSwitchStats) {
        self.seen += o.seen;
        self.matched += o.matched;
        self.replaced += o.replaced;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSwitchOptions {
    pub rate: f64,
    pub seed: u64,
    pub strip_punct: bool,
}

impl Default for CodeSwitchOptions {
    fn default() -> Self {
        CodeSwitchOptions {
            rate: 1.0,
            seed: 0,
            strip_punct: false,
        }
    }
}

/// Uppercase the first character of `replacement` when `original` starts
/// with an uppercase character.
pub fn restore_initial_capital(original: &str, replacement: &str) -> String {
    if !original.chars().next().is_some_and(char::is_uppercase) {
        return replacement.to_string();
    }
    let mut it = replacement.chars();
    match it.next() {
        Some(first) => first.to_uppercase().chain(it).collect(),
        None => String::new(),
    }
}

fn split_trailing_punct(token: &str) -> (&str, &str) {
    let core = token.trim_end_matches(|c: char| c.is_ascii_punctuation() || is_unicode_punct(c));
    if core.is_empty() {
        (token, "")
    } else {
        token.split_at(core.len())
    }
}

fn is_unicode_punct(c: char) -> bool {
    matches!(c, '«' | '»' | '…' | '“' | '”' | '’' | '‘' | '¿' | '¡' | '–' | '—')
}

/// Result of switching one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDecision {
    pub matched: bool,
    pub replaced: bool,
}

fn switch_sentence(
    lex: &CodeSwitchLexicon,
    sentence: &Sentence,
    opts: &CodeSwitchOptions,
    index: u64,
) -> (Sentence, CodeSwitchStats, Vec<TokenDecision>) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, index));
    let mut stats = CodeSwitchStats::default();
    let mut decisions = Vec::new();
    let out: Vec<String> = sentence
        .tokens()
        .map(|tok| {
            stats.seen += 1;
            let (core, tail) = if opts.strip_punct {
                split_trailing_punct(tok)
            } else {
                (tok, "")
            };
            let Some(lrl) = lex.get(core) else {
                decisions.push(TokenDecision {
                    matched: false,
                    replaced: false,
                });
                return tok.to_string();
            };
            stats.matched += 1;
            // one draw per matched token, so the replaced set only grows with the rate
            let draw: f64 = rng.gen();
            let replace = draw < opts.rate;
            decisions.push(TokenDecision {
                matched: true,
                replaced: replace,
            });
            if replace {
                stats.replaced += 1;
                restore_initial_capital(core, lrl) + tail
            } else {
                tok.to_string()
            }
        })
        .collect();
    (normalize(&out.join(" ")), stats, decisions)
}

/// Code-switch a sequence of sentences. Randomness is seeded per sentence
/// from `(seed, index)`, so parallel and serial runs agree.
///
/// ```
/// use lrtk::codeswitch::{apply_code_switch, CodeSwitchLexicon, CodeSwitchOptions};
/// use lrtk::corpus::normalize;
/// let lex = CodeSwitchLexicon::parse("toy", "water\twata\n").unwrap();
/// let (out, stats) =
///     apply_code_switch(&lex, &[normalize("Water water")], &CodeSwitchOptions::default()).unwrap();
/// assert_eq!(out[0].text(), "Wata wata");
/// assert_eq!(stats.replaced, 2);
/// ```
pub fn apply_code_switch(
    lex: &CodeSwitchLexicon,
    sentences: &[Sentence],
    opts: &CodeSwitchOptions,
) -> Result<(Vec<Sentence>, CodeSwitchStats), LexiconError> {
    let (out, stats, _) = apply_code_switch_traced(lex, sentences, opts)?;
    Ok((out, stats))
}

/// Output sentences, totals, and one decision per input token.
pub type Traced = (Vec<Sentence>, CodeSwitchStats, Vec<Vec<TokenDecision>>);

/// Like [`apply_code_switch`], also returning per-token decisions.
pub fn apply_code_switch_traced(
    lex: &CodeSwitchLexicon,
    sentences: &[Sentence],
    opts: &CodeSwitchOptions,
) -> Result<Traced, LexiconError> {
    if !(0.0..=1.0).contains(&opts.rate) {
        return Err(LexiconError::Rate(opts.rate));
    }
    let results: Vec<_> = sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| switch_sentence(lex, s, opts, i as u64))
        .collect();
    let mut total = CodeSwitchStats::default();
    let mut out = Vec::with_capacity(results.len());
    let mut trace = Vec::with_capacity(results.len());
    for (s, st, d) in results {
        total.add(&st);
        out.push(s);
        trace.push(d);
    }
    Ok((out, total, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> CodeSwitchLexicon {
        CodeSwitchLexicon::parse("toy", "water\twata\nchild\tpikni\n").unwrap()
    }

    fn run(text: &str, rate: f64) -> (String, CodeSwitchStats) {
        let opts = CodeSwitchOptions {
            rate,
            ..Default::default()
        };
        let (out, st) = apply_code_switch(&lex(), &[normalize(text)], &opts).unwrap();
        (out[0].text().to_string(), st)
    }

    #[test]
    fn lexicon_loading() {
        assert_eq!(CodeSwitchLexicon::parse("x", "water\twata\n").unwrap().len(), 1);
        assert!(CodeSwitchLexicon::parse("x", "").unwrap().is_empty());
        assert_eq!(CodeSwitchLexicon::parse("x", "# c\n\nwater\twata\n").unwrap().len(), 1);
        match CodeSwitchLexicon::parse("x", "water\twata\nWater\twaata\n").unwrap_err() {
            LexiconError::Duplicate { token, first, second } => {
                assert_eq!((token.as_str(), first, second), ("water", 1, 2))
            }
            e => panic!("{e}"),
        }
        assert!(matches!(
            CodeSwitchLexicon::parse("x", "a\tb\nno-tab\n"),
            Err(LexiconError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn replacement_examples() {
        assert_eq!(run("the water is cold", 1.0).0, "the wata is cold");
        assert_eq!(run("the water is cold", 0.0).0, "the water is cold");
        let (out, st) = run("Water water", 1.0);
        assert_eq!(out, "Wata wata");
        assert_eq!(
            st,
            CodeSwitchStats {
                seen: 2,
                matched: 2,
                replaced: 2
            }
        );
    }

    #[test]
    fn punctuation_handling() {
        assert_eq!(run("cold water, please", 1.0).0, "cold water, please");
        let opts = CodeSwitchOptions {
            strip_punct: true,
            ..Default::default()
        };
        let (out, _) = apply_code_switch(&lex(), &[normalize("cold Water, child.")], &opts).unwrap();
        assert_eq!(out[0].text(), "cold Wata, pikni.");
    }

    #[test]
    fn rate_outside_unit_interval() {
        let opts = CodeSwitchOptions {
            rate: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            apply_code_switch(&lex(), &[], &opts),
            Err(LexiconError::Rate(_))
        ));
    }

    proptest! {
        #[test]
        fn partial_rate_replaces_a_deterministic_subset(
            words in proptest::collection::vec(prop_oneof!["water", "child", "cold", "Water"], 1..30),
            rate in 0.0f64..=1.0,
            seed: u64,
        ) {
            let s = vec![normalize(&words.join(" "))];
            let opts = CodeSwitchOptions { rate, seed, strip_punct: false };
            let (a, st, trace) = apply_code_switch_traced(&lex(), &s, &opts).unwrap();
            let (b, _) = apply_code_switch(&lex(), &s, &opts).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a[0].token_count(), s[0].token_count());
            prop_assert!(st.replaced <= st.matched);
            for ((orig, new), d) in s[0].tokens().zip(a[0].tokens()).zip(&trace[0]) {
                prop_assert!(!d.replaced || d.matched);
                if !d.replaced {
                    prop_assert_eq!(orig, new);
                }
            }
        }
    }
}
