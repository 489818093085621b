//! Ordered, context-sensitive string rewriting.
//!
//! One engine serves both orthographic conversion (French spelling to
//! Haitian spelling, say) and grapheme-to-phoneme conversion. A rule file
//! looks like this:
//!
//! ```text
//! # direction: fra -> hat
//! ::V:: = a e i o u
//! ou -> w / _ ::V::
//! ou -> ou
//! é -> e
//! s -> 0 / _ #
//! ```
//!
//! Matching is a single left-to-right scan. At each position every rule is
//! tried; the longest pattern match whose contexts hold wins, with file
//! order breaking ties. The cursor then jumps past the matched span, so
//! output is never rewritten again within the same call. Characters no rule
//! covers are copied unchanged. Contexts are always checked against the
//! input, never the partially built output.
//!
//! Rules are written in lowercase. Each token is lowercased before matching
//! and an initial capital is put back on the output.

mod parse;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{normalize, Lang, MonoCorpus, ParallelCorpus, Provenance, Sentence, Side};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: {reason}: {text:?}")]
    Malformed { line: usize, text: String, reason: String },
    #[error("line {line}: undefined class ::{name}::")]
    UndefinedClass { line: usize, name: String },
    #[error("line {line}: class ::{name}:: defined twice")]
    DuplicateClass { line: usize, name: String },
}

/// A named set of strings usable in patterns and contexts as `::NAME::`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharClass {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Text(Vec<char>),
    Class(usize),
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pattern: Vec<Atom>,
    replacement: String,
    left: Vec<Atom>,
    right: Vec<Atom>,
    index: usize,
    line: usize,
    source: String,
}

impl RewriteRule {
    /// Position in the rule set, which is also its priority.
    pub fn index(&self) -> usize {
        self.index
    }

    /// 1-based line in the rule file.
    pub fn line(&self) -> usize {
        self.line
    }

    pub fn replacement(&self) -> &str {
        &self.replacement
    }

    /// The rule as written.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn has_context(&self) -> bool {
        !self.left.is_empty() || !self.right.is_empty()
    }
}

/// Declared by a `# direction: from -> to` line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Direction {
    pub source: String,
    pub target: String,
}

/// Counters collected while applying rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ApplyStats {
    /// Firings per rule, indexed like the rule set.
    pub fired: Vec<u64>,
    /// Input characters inside spans whose replacement differs from the span.
    pub chars_changed: u64,
    /// Input characters no rule covered.
    pub passthrough: u64,
}

impl ApplyStats {
    pub fn total_fired(&self) -> u64 {
        self.fired.iter().sum()
    }

    pub fn merge(&mut self, other: &ApplyStats) {
        if self.fired.len() < other.fired.len() {
            self.fired.resize(other.fired.len(), 0);
        }
        for (a, b) in self.fired.iter_mut().zip(&other.fired) {
            *a += b;
        }
        self.chars_changed += other.chars_changed;
        self.passthrough += other.passthrough;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRuleSet {
    classes: Vec<CharClass>,
    class_chars: Vec<Vec<Vec<char>>>,
    rules: Vec<RewriteRule>,
    direction: Option<Direction>,
    by_first_char: HashMap<char, Vec<usize>>,
}

impl Default for RewriteRuleSet {
    fn default() -> Self {
        RewriteRuleSet::from_parts(Vec::new(), Vec::new(), None)
    }
}

impl RewriteRuleSet {
    /// Parse a rule file.
    ///
    /// ```
    /// let rules = lrtk::translit::RewriteRuleSet::parse("::V:: = a e i o u\nou -> w / _ ::V::").unwrap();
    /// assert_eq!(rules.classes().len(), 1);
    /// assert!(rules.rules()[0].has_context());
    /// ```
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        parse::parse(text)
    }

    /// The identity transform.
    pub fn empty() -> Self {
        Self::default()
    }

    fn from_parts(classes: Vec<CharClass>, rules: Vec<RewriteRule>, direction: Option<Direction>) -> Self {
        let class_chars: Vec<Vec<Vec<char>>> = classes
            .iter()
            .map(|c| c.members.iter().map(|m| m.chars().collect()).collect())
            .collect();
        let mut by_first_char: HashMap<char, Vec<usize>> = HashMap::new();
        for rule in &rules {
            let firsts: Vec<char> = match &rule.pattern[0] {
                Atom::Text(t) => vec![t[0]],
                Atom::Class(c) => class_chars[*c].iter().map(|m| m[0]).collect(),
                Atom::Boundary => unreachable!("patterns never contain boundaries"),
            };
            for c in firsts {
                let slot = by_first_char.entry(c).or_default();
                if slot.last() != Some(&rule.index) {
                    slot.push(rule.index);
                }
            }
        }
        RewriteRuleSet {
            classes,
            class_chars,
            rules,
            direction,
            by_first_char,
        }
    }

    pub fn classes(&self) -> &[CharClass] {
        &self.classes
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn direction(&self) -> Option<&Direction> {
        self.direction.as_ref()
    }

    pub fn with_direction(mut self, source: &str, target: &str) -> Self {
        self.direction = Some(Direction {
            source: source.to_string(),
            target: target.to_string(),
        });
        self
    }

    /// Rewrite a string. Whitespace separates tokens and counts as a word
    /// boundary for `#` contexts.
    ///
    /// ```
    /// let rules = lrtk::translit::RewriteRuleSet::parse("u -> i\né -> e").unwrap();
    /// assert_eq!(rules.apply("unité"), "inite");
    /// ```
    pub fn apply(&self, input: &str) -> String {
        let mut stats = ApplyStats::default();
        self.apply_with_stats(input, &mut stats)
    }

    pub fn apply_with_stats(&self, input: &str, stats: &mut ApplyStats) -> String {
        if stats.fired.len() < self.rules.len() {
            stats.fired.resize(self.rules.len(), 0);
        }
        let mut out = String::with_capacity(input.len());
        let mut token = String::new();
        for c in input.chars() {
            if c.is_whitespace() {
                if !token.is_empty() {
                    self.apply_token(&token, &mut out, stats);
                    token.clear();
                }
                out.push(c);
            } else {
                token.push(c);
            }
        }
        if !token.is_empty() {
            self.apply_token(&token, &mut out, stats);
        }
        out
    }

    fn apply_token(&self, token: &str, out: &mut String, stats: &mut ApplyStats) {
        let capitalized = token.chars().next().is_some_and(char::is_uppercase);
        let chars: Vec<char> = token.to_lowercase().chars().collect();
        let start = out.len();
        let mut pos = 0;
        while pos < chars.len() {
            match self.best_match(&chars, pos) {
                Some((rule, end)) => {
                    let rule = &self.rules[rule];
                    stats.fired[rule.index] += 1;
                    if !rule.replacement.chars().eq(chars[pos..end].iter().copied()) {
                        stats.chars_changed += (end - pos) as u64;
                    }
                    out.push_str(&rule.replacement);
                    pos = end;
                }
                None => {
                    stats.passthrough += 1;
                    out.push(chars[pos]);
                    pos += 1;
                }
            }
        }
        if capitalized {
            let rest = out.split_off(start);
            let mut it = rest.chars();
            if let Some(first) = it.next() {
                out.extend(first.to_uppercase());
                out.push_str(it.as_str());
            }
        }
    }

    /// Longest match at `pos`; among equally long matches the lowest index.
    fn best_match(&self, input: &[char], pos: usize) -> Option<(usize, usize)> {
        let candidates = self.by_first_char.get(&input[pos])?;
        let mut best: Option<(usize, usize)> = None;
        for &idx in candidates {
            let rule = &self.rules[idx];
            if !self.matches_backward(&rule.left, input, pos) {
                continue;
            }
            let end = self
                .match_forward(&rule.pattern, input, pos)
                .into_iter()
                .filter(|&end| !self.match_forward(&rule.right, input, end).is_empty())
                .max();
            if let Some(end) = end {
                if best.is_none_or(|(_, e)| end > e) {
                    best = Some((idx, end));
                }
            }
        }
        best
    }

    /// All end positions reachable by matching `atoms` from `pos`.
    fn match_forward(&self, atoms: &[Atom], input: &[char], pos: usize) -> Vec<usize> {
        let mut frontier = vec![pos];
        for atom in atoms {
            let mut next = Vec::new();
            for &p in &frontier {
                match atom {
                    Atom::Text(t) => {
                        if input[p..].starts_with(t) {
                            next.push(p + t.len());
                        }
                    }
                    Atom::Class(c) => {
                        for m in &self.class_chars[*c] {
                            if input[p..].starts_with(m) {
                                next.push(p + m.len());
                            }
                        }
                    }
                    Atom::Boundary => {
                        if p == input.len() || input[p].is_whitespace() {
                            next.push(p);
                        }
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return next;
            }
            frontier = next;
        }
        frontier
    }

    /// Whether `atoms` can match ending exactly at `pos`.
    fn matches_backward(&self, atoms: &[Atom], input: &[char], pos: usize) -> bool {
        let mut frontier = vec![pos];
        for atom in atoms.iter().rev() {
            let mut next = Vec::new();
            for &p in &frontier {
                match atom {
                    Atom::Text(t) => {
                        if input[..p].ends_with(t) {
                            next.push(p - t.len());
                        }
                    }
                    Atom::Class(c) => {
                        for m in &self.class_chars[*c] {
                            if input[..p].ends_with(m) {
                                next.push(p - m.len());
                            }
                        }
                    }
                    Atom::Boundary => {
                        if p == 0 || input[p - 1].is_whitespace() {
                            next.push(p);
                        }
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            frontier = next;
        }
        true
    }
}

/// Grapheme-to-phoneme conversion: [`RewriteRuleSet::apply`] with an IPA
/// rule set. Unmapped characters are copied and surface later as residue
/// during phone segmentation.
pub fn g2p(rules: &RewriteRuleSet, word: &str) -> String {
    rules.apply(word)
}

fn apply_all(rules: &RewriteRuleSet, sentences: &[Sentence]) -> (Vec<Sentence>, ApplyStats) {
    let results: Vec<(Sentence, ApplyStats)> = sentences
        .par_iter()
        .map(|s| {
            let mut stats = ApplyStats::default();
            let out = rules.apply_with_stats(s.text(), &mut stats);
            (normalize(&out), stats)
        })
        .collect();
    let mut total = ApplyStats {
        fired: vec![0; rules.len()],
        ..ApplyStats::default()
    };
    let sentences = results
        .into_iter()
        .map(|(s, st)| {
            total.merge(&st);
            s
        })
        .collect();
    (sentences, total)
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: rules deleted the whole sentence")]
pub struct EmptyOutput {
    pub line: usize,
}

/// Transliterate a monolingual corpus, keeping order. The output is labeled
/// with `lang`.
pub fn transliterate_mono(
    rules: &RewriteRuleSet,
    corpus: &MonoCorpus,
    lang: Lang,
) -> Result<(MonoCorpus, ApplyStats), EmptyOutput> {
    let (sentences, stats) = apply_all(rules, corpus.sentences());
    let out = MonoCorpus::new(lang, sentences).map_err(|e| match e {
        crate::corpus::CorpusError::EmptySegment { line, .. } => EmptyOutput { line },
        _ => unreachable!("only emptiness is checked"),
    })?;
    Ok((out, stats))
}

/// Transliterate one side of a bitext; the other side is untouched and the
/// result is tagged `transformed`.
pub fn transliterate_side(
    rules: &RewriteRuleSet,
    corpus: &ParallelCorpus,
    side: Side,
    lang: Lang,
) -> Result<(ParallelCorpus, ApplyStats), EmptyOutput> {
    let input = corpus.side(side);
    let (changed, stats) = apply_all(rules, input.sentences());
    let pairs = corpus
        .pairs()
        .iter()
        .zip(changed)
        .map(|((s, t), new)| match side {
            Side::Source => (new, t.clone()),
            Side::Target => (s.clone(), new),
        })
        .collect();
    let (src_lang, tgt_lang) = match side {
        Side::Source => (lang, corpus.target_lang().clone()),
        Side::Target => (corpus.source_lang().clone(), lang),
    };
    let out = ParallelCorpus::new(src_lang, tgt_lang, pairs, Provenance::Transformed).map_err(|e| match e {
        crate::corpus::CorpusError::EmptySegment { line, .. } => EmptyOutput { line },
        _ => unreachable!("only emptiness is checked"),
    })?;
    Ok((out, stats))
}
