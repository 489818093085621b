//! Translators: anything that maps a batch of lines in one language to the
//! same number of lines in another.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::corpus::Lang;
use crate::syntree::{ParseTree, SyntaxRuleSet};
use crate::translit::RewriteRuleSet;

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("{name}: expected {expected} output lines, got {got}")]
    Count { name: String, expected: usize, got: usize },
    #[error("{name} translates {supports}, asked for {from}->{to}")]
    Direction {
        name: String,
        supports: String,
        from: Lang,
        to: Lang,
    },
    #[error("{name}: line {line}: {reason}")]
    Line { name: String, line: usize, reason: String },
    #[error("{name}: {reason}")]
    External { name: String, reason: String },
}

pub trait Translator: Send + Sync {
    /// Short name recorded in dataset lineage.
    fn name(&self) -> String;

    /// The `(from, to)` pair this translator serves, if it is fixed.
    fn direction(&self) -> Option<(&Lang, &Lang)> {
        None
    }

    fn translate(&self, lines: &[String], from: &Lang, to: &Lang) -> Result<Vec<String>, TranslateError>;
}

fn check_direction(t: &dyn Translator, from: &Lang, to: &Lang) -> Result<(), TranslateError> {
    match t.direction() {
        Some((f, g)) if f != from || g != to => Err(TranslateError::Direction {
            name: t.name(),
            supports: format!("{f}->{g}"),
            from: from.clone(),
            to: to.clone(),
        }),
        _ => Ok(()),
    }
}

/// Translate in batches, possibly concurrently, checking the line-count
/// contract of every batch and returning results in input order.
pub fn translate_batched(
    t: &dyn Translator,
    lines: &[String],
    from: &Lang,
    to: &Lang,
    batch_size: usize,
) -> Result<Vec<String>, TranslateError> {
    use rayon::prelude::*;
    check_direction(t, from, to)?;
    let batch_size = batch_size.max(1);
    let batches: Vec<Vec<String>> = lines
        .par_chunks(batch_size)
        .map(|chunk| {
            let out = t.translate(chunk, from, to)?;
            if out.len() != chunk.len() {
                return Err(TranslateError::Count {
                    name: t.name(),
                    expected: chunk.len(),
                    got: out.len(),
                });
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(batches.into_iter().flatten().collect())
}

/// Returns its input.
#[derive(Debug, Clone, Default)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn name(&self) -> String {
        "identity".into()
    }

    fn translate(&self, lines: &[String], _: &Lang, _: &Lang) -> Result<Vec<String>, TranslateError> {
        Ok(lines.to_vec())
    }
}

/// Rule engines as a translator. With syntax rules, each input line must be
/// a bracketed tree; it is rewritten and flattened before any orthographic
/// rules run.
#[derive(Debug, Clone)]
pub struct RuleTranslator {
    name: String,
    from: Lang,
    to: Lang,
    syntax: Option<SyntaxRuleSet>,
    orthography: Option<RewriteRuleSet>,
}

impl RuleTranslator {
    pub fn new(name: &str, from: Lang, to: Lang) -> Self {
        RuleTranslator {
            name: name.to_string(),
            from,
            to,
            syntax: None,
            orthography: None,
        }
    }

    pub fn with_orthography(mut self, rules: RewriteRuleSet) -> Self {
        self.orthography = Some(rules);
        self
    }

    pub fn with_syntax(mut self, rules: SyntaxRuleSet) -> Self {
        self.syntax = Some(rules);
        self
    }

    fn one(&self, i: usize, line: &str) -> Result<String, TranslateError> {
        let text = match &self.syntax {
            None => line.to_string(),
            Some(rules) => {
                let tree = ParseTree::parse(line).map_err(|e| TranslateError::Line {
                    name: self.name.clone(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
                rules.apply(&tree).map(|t| t.yield_string()).unwrap_or_default()
            }
        };
        Ok(match &self.orthography {
            None => text,
            Some(r) => r.apply(&text),
        })
    }
}

impl Translator for RuleTranslator {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn direction(&self) -> Option<(&Lang, &Lang)> {
        Some((&self.from, &self.to))
    }

    fn translate(&self, lines: &[String], _: &Lang, _: &Lang) -> Result<Vec<String>, TranslateError> {
        lines.iter().enumerate().map(|(i, l)| self.one(i, l)).collect()
    }
}

/// Runs a program per batch: lines on stdin, the same number of lines
/// expected on stdout. `{from}` and `{to}` in arguments are substituted.
#[derive(Debug, Clone)]
pub struct CommandTranslator {
    name: String,
    program: String,
    args: Vec<String>,
}

impl CommandTranslator {
    pub fn new(name: &str, program: &str, args: &[String]) -> Self {
        CommandTranslator {
            name: name.to_string(),
            program: program.to_string(),
            args: args.to_vec(),
        }
    }
}

impl Translator for CommandTranslator {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn translate(&self, lines: &[String], from: &Lang, to: &Lang) -> Result<Vec<String>, TranslateError> {
        let ext = |reason: String| TranslateError::External {
            name: self.name.clone(),
            reason,
        };
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| a.replace("{from}", from.as_str()).replace("{to}", to.as_str()))
            .collect();
        let mut child = Command::new(&self.program)
            .args(&args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| ext(format!("cannot start {}: {e}", self.program)))?;
        let mut stdin = child.stdin.take().expect("piped");
        let input = lines.join("\n") + if lines.is_empty() { "" } else { "\n" };
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped");
        let out: Vec<String> = BufReader::new(stdout)
            .lines()
            .collect::<Result<_, _>>()
            .map_err(|e| ext(e.to_string()))?;
        writer
            .join()
            .expect("writer thread")
            .map_err(|e| ext(format!("writing stdin: {e}")))?;
        let status = child.wait().map_err(|e| ext(e.to_string()))?;
        if !status.success() {
            return Err(ext(format!("exited with {status}")));
        }
        Ok(out)
    }
}

#[derive(Debug, Serialize)]
struct HttpRequest<'a> {
    from: &'a str,
    to: &'a str,
    lines: &'a [String],
}

#[derive(Debug, Deserialize)]
struct HttpResponse {
    lines: Vec<String>,
}

/// POSTs `{"from","to","lines"}` JSON and expects `{"lines": [...]}` back.
#[derive(Debug, Clone)]
pub struct HttpTranslator {
    name: String,
    url: String,
}

impl HttpTranslator {
    pub fn new(name: &str, url: &str) -> Self {
        HttpTranslator {
            name: name.to_string(),
            url: url.to_string(),
        }
    }
}

impl Translator for HttpTranslator {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn translate(&self, lines: &[String], from: &Lang, to: &Lang) -> Result<Vec<String>, TranslateError> {
        let ext = |reason: String| TranslateError::External {
            name: self.name.clone(),
            reason,
        };
        let body = HttpRequest {
            from: from.as_str(),
            to: to.as_str(),
            lines,
        };
        let mut resp = ureq::post(&self.url).send_json(&body).map_err(|e| ext(e.to_string()))?;
        let parsed: HttpResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| ext(format!("bad response: {e}")))?;
        Ok(parsed.lines)
    }
}
