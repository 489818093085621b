//! Constituency-tree rewriting.
//!
//! Trees come in as PTB-style bracketed strings (one per line in a treebank
//! file) from an external parser. Rules match a node by label and by its
//! complete child label sequence, then rebuild the children from a
//! template:
//!
//! ```text
//! # determiners follow the noun
//! NP: D=d N=n => n d
//! # insert a preverbal marker, keep the rest
//! VP#imp: V=v *=rest => "te" v rest
//! ```
//!
//! A single top-down pass is made. At each node the first matching rule
//! fires, then the rewritten children are visited. Omitting a variable from
//! the template deletes that child. Quoted template items become new leaves
//! labeled `LIT`. A leaf lexicon, if any, is applied last.

mod tree;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::codeswitch::restore_initial_capital;
use crate::corpus::{normalize, Lang, MonoCorpus};

pub use tree::{Label, ParseTree, TreeError};

/// Label given to inserted literal tokens.
pub const LITERAL_LABEL: &str = "LIT";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxRuleError {
    #[error("line {line}: {reason}: {text:?}")]
    Malformed { line: usize, text: String, reason: String },
    #[error("line {line}: variable {var:?} is not bound by the child pattern")]
    Unbound { line: usize, var: String },
    #[error("line {line}: variable {var:?} used more than once")]
    Reused { line: usize, var: String },
    #[error("line {line}: lexicon key {key:?} already defined")]
    DuplicateLexeme { line: usize, key: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ChildPattern {
    One { label: Label, var: String },
    Rest { var: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TemplateItem {
    Var(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxRule {
    parent: Label,
    pattern: Vec<ChildPattern>,
    template: Vec<TemplateItem>,
    index: usize,
    line: usize,
}

impl SyntaxRule {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn parent(&self) -> &Label {
        &self.parent
    }

    /// Number of literal tokens this rule inserts when it fires.
    pub fn insertions(&self) -> usize {
        self.template
            .iter()
            .filter(|t| matches!(t, TemplateItem::Literal(_)))
            .count()
    }

    /// Reorders only: no literal insertions and every pattern variable kept.
    pub fn is_pure_reorder(&self) -> bool {
        self.insertions() == 0 && self.template.len() == self.pattern.len()
    }

    /// Bind children to pattern variables if the whole sequence matches.
    fn bind<'a>(&self, children: &'a [ParseTree]) -> Option<HashMap<&str, &'a [ParseTree]>> {
        let rest_at = self.pattern.iter().position(|p| matches!(p, ChildPattern::Rest { .. }));
        let fixed = self.pattern.len() - usize::from(rest_at.is_some());
        match rest_at {
            None if children.len() != fixed => return None,
            Some(_) if children.len() < fixed => return None,
            _ => {}
        }
        let mut bindings = HashMap::new();
        let rest_len = children.len() - fixed;
        let mut ci = 0;
        for p in &self.pattern {
            match p {
                ChildPattern::One { label, var } => {
                    if !label.matches(children[ci].label()) {
                        return None;
                    }
                    bindings.insert(var.as_str(), &children[ci..ci + 1]);
                    ci += 1;
                }
                ChildPattern::Rest { var } => {
                    bindings.insert(var.as_str(), &children[ci..ci + rest_len]);
                    ci += rest_len;
                }
            }
        }
        Some(bindings)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntaxRuleSet {
    rules: Vec<SyntaxRule>,
    lexicon: HashMap<String, String>,
}

fn malformed(line: usize, text: &str, reason: &str) -> SyntaxRuleError {
    SyntaxRuleError::Malformed {
        line,
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

impl SyntaxRuleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parse a rule file: `PARENT: CHILD=var ... => template` per line.
    pub fn parse(text: &str) -> Result<Self, SyntaxRuleError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rule = parse_rule(line, i + 1, rules.len())?;
            rules.push(rule);
        }
        Ok(SyntaxRuleSet {
            rules,
            lexicon: HashMap::new(),
        })
    }

    /// Add leaf substitutions from `token<TAB>replacement` lines.
    pub fn with_lexicon_tsv(mut self, text: &str) -> Result<Self, SyntaxRuleError> {
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('\t') else {
                return Err(malformed(i + 1, line, "expected `token<TAB>replacement`"));
            };
            let (k, v) = (k.trim().to_lowercase(), v.trim());
            if k.is_empty() || v.is_empty() || v.contains(char::is_whitespace) {
                return Err(malformed(i + 1, line, "empty or multi-word entry"));
            }
            if seen.insert(k.clone(), i + 1).is_some() {
                return Err(SyntaxRuleError::DuplicateLexeme { line: i + 1, key: k });
            }
            self.lexicon.insert(k, v.to_string());
        }
        Ok(self)
    }

    pub fn rules(&self) -> &[SyntaxRule] {
        &self.rules
    }

    pub fn lexicon(&self) -> &HashMap<String, String> {
        &self.lexicon
    }

    /// Rewrite a tree. Returns `None` when the rules delete every leaf.
    pub fn apply(&self, tree: &ParseTree) -> Option<ParseTree> {
        match tree {
            ParseTree::Leaf { label, token } => Some(ParseTree::Leaf {
                label: label.clone(),
                token: self.lookup(token),
            }),
            ParseTree::Node { label, children } => {
                let rewritten = match self.rules.iter().find_map(|r| {
                    r.parent
                        .matches(label)
                        .then(|| r.bind(children).map(|b| (r, b)))
                        .flatten()
                }) {
                    Some((rule, bindings)) => instantiate(rule, &bindings),
                    None => children.clone(),
                };
                let children: Vec<ParseTree> = rewritten.iter().filter_map(|c| self.apply(c)).collect();
                (!children.is_empty()).then(|| ParseTree::Node {
                    label: label.clone(),
                    children,
                })
            }
        }
    }

    fn lookup(&self, token: &str) -> String {
        if self.lexicon.is_empty() {
            return token.to_string();
        }
        if let Some(v) = self.lexicon.get(token) {
            return v.clone();
        }
        match self.lexicon.get(&token.to_lowercase()) {
            Some(v) => restore_initial_capital(token, v),
            None => token.to_string(),
        }
    }
}

fn instantiate(rule: &SyntaxRule, bindings: &HashMap<&str, &[ParseTree]>) -> Vec<ParseTree> {
    let mut out = Vec::new();
    for item in &rule.template {
        match item {
            TemplateItem::Var(v) => out.extend_from_slice(bindings[v.as_str()]),
            TemplateItem::Literal(t) => out.push(ParseTree::leaf(LITERAL_LABEL, t)),
        }
    }
    out
}

fn parse_rule(line: &str, line_no: usize, index: usize) -> Result<SyntaxRule, SyntaxRuleError> {
    let (head, template) = line
        .split_once("=>")
        .ok_or_else(|| malformed(line_no, line, "expected `=>`"))?;
    let (parent, pattern) = head
        .split_once(':')
        .ok_or_else(|| malformed(line_no, line, "expected `PARENT:`"))?;
    let parent = parent.trim();
    if parent.is_empty() || parent.contains(char::is_whitespace) {
        return Err(malformed(line_no, line, "invalid parent label"));
    }

    let mut vars = HashSet::new();
    let mut children = Vec::new();
    for item in pattern.split_whitespace() {
        let (sym, var) = item
            .split_once('=')
            .ok_or_else(|| malformed(line_no, line, "child pattern items are SYMBOL=var"))?;
        if sym.is_empty() || var.is_empty() {
            return Err(malformed(line_no, line, "child pattern items are SYMBOL=var"));
        }
        if !vars.insert(var.to_string()) {
            return Err(malformed(line_no, line, "variable bound twice"));
        }
        children.push(if sym == "*" {
            ChildPattern::Rest { var: var.to_string() }
        } else {
            ChildPattern::One {
                label: Label::parse(sym),
                var: var.to_string(),
            }
        });
    }
    if children.is_empty() {
        return Err(malformed(line_no, line, "empty child pattern"));
    }
    if children
        .iter()
        .filter(|c| matches!(c, ChildPattern::Rest { .. }))
        .count()
        > 1
    {
        return Err(malformed(line_no, line, "at most one `*` per pattern"));
    }

    let mut used = HashSet::new();
    let mut items = Vec::new();
    for item in template.split_whitespace() {
        if let Some(lit) = item.strip_prefix('"') {
            let lit = lit
                .strip_suffix('"')
                .filter(|l| !l.is_empty() && !l.contains('"'))
                .ok_or_else(|| malformed(line_no, line, "bad quoted literal"))?;
            items.push(TemplateItem::Literal(lit.to_string()));
        } else {
            if !vars.contains(item) {
                return Err(SyntaxRuleError::Unbound {
                    line: line_no,
                    var: item.to_string(),
                });
            }
            if !used.insert(item) {
                return Err(SyntaxRuleError::Reused {
                    line: line_no,
                    var: item.to_string(),
                });
            }
            items.push(TemplateItem::Var(item.to_string()));
        }
    }

    Ok(SyntaxRule {
        parent: Label::parse(parent),
        pattern: children,
        template: items,
        index,
        line: line_no,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreebankError {
    #[error("tree {index}: {source}")]
    Parse {
        index: usize,
        #[source]
        source: TreeError,
    },
    #[error("tree {index}: rules deleted every token")]
    EmptyYield { index: usize },
}

/// Parse a treebank file body, one bracketed tree per non-blank line.
pub fn parse_treebank(text: &str) -> Result<Vec<ParseTree>, TreebankError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| ParseTree::parse(l).map_err(|source| TreebankError::Parse { index: i + 1, source }))
        .collect()
}

/// Transform every tree and flatten to its yield, preserving order.
pub fn transform_treebank(rules: &SyntaxRuleSet, trees: &[ParseTree], lang: Lang) -> Result<MonoCorpus, TreebankError> {
    let sentences = trees
        .par_iter()
        .enumerate()
        .map(|(i, t)| match rules.apply(t) {
            Some(out) => Ok(normalize(&out.yield_string())),
            None => Err(TreebankError::EmptyYield { index: i + 1 }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MonoCorpus::new(lang, sentences).expect("non-empty yields"))
}
