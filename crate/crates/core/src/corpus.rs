//! Sentences, monolingual corpora and parallel bitexts.
//!
//! Every piece of text that enters the toolkit passes through [`normalize`]:
//! NFC composition, control characters turned into spaces, whitespace runs
//! collapsed and the ends trimmed. Case is never touched here.
//!
//! Corpora are plain UTF-8 files with one sentence per line. A bitext is
//! either two line-aligned files or a single TSV file of `source<TAB>target`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid UTF-8 at byte offset {offset}{}", fmt_line(*line))]
    Decode { line: Option<usize>, offset: usize },
    #[error("alignment error: source has {source_lines} lines, target has {target_lines}")]
    Alignment { source_lines: usize, target_lines: usize },
    #[error("empty segment at line {line} ({side} side)")]
    EmptySegment { line: usize, side: Side },
    #[error("malformed TSV at line {line}: expected exactly one tab")]
    Tsv { line: usize },
    #[error("cannot take {requested} items from a corpus of {available}")]
    Capacity { requested: usize, available: usize },
    #[error("invalid language code {0:?}")]
    Lang(String),
}

fn fmt_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

/// Which half of a bitext.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

/// A language code such as `hat`, `fra` or `eng`. Stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Lang(String);

impl Lang {
    pub fn new(code: &str) -> Result<Self, CorpusError> {
        let code = code.trim();
        if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(CorpusError::Lang(code.to_string()));
        }
        Ok(Lang(code.to_ascii_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Lang {
    type Error = CorpusError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Lang::new(&s)
    }
}

impl From<Lang> for String {
    fn from(l: Lang) -> String {
        l.0
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Where a bitext came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Authentic,
    SynthMono,
    SynthMix1,
    SynthMix2,
    Transformed,
    /// Concatenation of parts with differing provenance (training sets).
    Mixed,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Authentic => "authentic",
            Provenance::SynthMono => "synth_mono",
            Provenance::SynthMix1 => "synth_mix1",
            Provenance::SynthMix2 => "synth_mix2",
            Provenance::Transformed => "transformed",
            Provenance::Mixed => "mixed",
        }
    }
}

/// A normalized sentence. Tokens are the single-space separated pieces of
/// the text, so joining them with spaces always gives the text back.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sentence {
    text: String,
}

impl Sentence {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.text.split(' ').filter(|t| !t.is_empty())
    }

    pub fn token_count(&self) -> usize {
        self.tokens().count()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// NFC-normalize, collapse whitespace and trim. Case is preserved.
///
/// ```
/// use lrtk::corpus::normalize;
/// assert_eq!(normalize("  kay  li ").text(), "kay li");
/// assert_eq!(normalize("unite\u{301}").text(), "unit\u{e9}");
/// ```
pub fn normalize(raw: &str) -> Sentence {
    let mut text = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.nfc() {
        if c.is_whitespace() || c.is_control() {
            pending_space = true;
            continue;
        }
        if pending_space && !text.is_empty() {
            text.push(' ');
        }
        pending_space = false;
        text.push(c);
    }
    Sentence { text }
}

/// Decode then [`normalize`]; invalid UTF-8 reports the byte offset.
pub fn normalize_bytes(raw: &[u8]) -> Result<Sentence, CorpusError> {
    match std::str::from_utf8(raw) {
        Ok(s) => Ok(normalize(s)),
        Err(e) => Err(CorpusError::Decode {
            line: None,
            offset: e.valid_up_to(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoCorpus {
    lang: Lang,
    sentences: Vec<Sentence>,
}

impl MonoCorpus {
    /// Empty sentences are rejected; `line` in the error is 1-based.
    pub fn new(lang: Lang, sentences: Vec<Sentence>) -> Result<Self, CorpusError> {
        if let Some(i) = sentences.iter().position(Sentence::is_empty) {
            return Err(CorpusError::EmptySegment {
                line: i + 1,
                side: Side::Source,
            });
        }
        Ok(MonoCorpus { lang, sentences })
    }

    pub fn from_lines<I, S>(lang: Lang, lines: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sentences = lines.into_iter().map(|l| normalize(l.as_ref())).collect();
        MonoCorpus::new(lang, sentences)
    }

    pub fn lang(&self) -> &Lang {
        &self.lang
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.sentences.iter().map(|s| s.text.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    source_lang: Lang,
    target_lang: Lang,
    pairs: Vec<(Sentence, Sentence)>,
    provenance: Provenance,
}

impl ParallelCorpus {
    pub fn new(
        source_lang: Lang,
        target_lang: Lang,
        pairs: Vec<(Sentence, Sentence)>,
        provenance: Provenance,
    ) -> Result<Self, CorpusError> {
        for (i, (s, t)) in pairs.iter().enumerate() {
            let side = if s.is_empty() {
                Side::Source
            } else if t.is_empty() {
                Side::Target
            } else {
                continue;
            };
            return Err(CorpusError::EmptySegment { line: i + 1, side });
        }
        Ok(ParallelCorpus {
            source_lang,
            target_lang,
            pairs,
            provenance,
        })
    }

    /// Normalizes both sides; the lengths must agree.
    pub fn from_lines<S: AsRef<str>, T: AsRef<str>>(
        source_lang: Lang,
        target_lang: Lang,
        sources: &[S],
        targets: &[T],
        provenance: Provenance,
    ) -> Result<Self, CorpusError> {
        if sources.len() != targets.len() {
            return Err(CorpusError::Alignment {
                source_lines: sources.len(),
                target_lines: targets.len(),
            });
        }
        let pairs = sources
            .iter()
            .zip(targets)
            .map(|(s, t)| (normalize(s.as_ref()), normalize(t.as_ref())))
            .collect();
        ParallelCorpus::new(source_lang, target_lang, pairs, provenance)
    }

    pub fn source_lang(&self) -> &Lang {
        &self.source_lang
    }

    pub fn target_lang(&self) -> &Lang {
        &self.target_lang
    }

    pub fn pairs(&self) -> &[(Sentence, Sentence)] {
        &self.pairs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &Sentence> {
        self.pairs.iter().map(|(s, _)| s)
    }

    pub fn targets(&self) -> impl Iterator<Item = &Sentence> {
        self.pairs.iter().map(|(_, t)| t)
    }

    pub fn side(&self, side: Side) -> MonoCorpus {
        let (lang, sentences) = match side {
            Side::Source => (self.source_lang.clone(), self.sources().cloned().collect()),
            Side::Target => (self.target_lang.clone(), self.targets().cloned().collect()),
        };
        MonoCorpus { lang, sentences }
    }

    /// The target side as a monolingual corpus.
    pub fn target_side(&self) -> MonoCorpus {
        self.side(Side::Target)
    }

    /// Pairs at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> ParallelCorpus {
        ParallelCorpus {
            source_lang: self.source_lang.clone(),
            target_lang: self.target_lang.clone(),
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
            provenance: self.provenance,
        }
    }
}

/// Seeded permutation of `0..len`. Independent of how many items are later
/// taken from it, which is what makes [`sample_slice`] nest.
pub fn shuffled_order(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}

/// Deterministic sample of `n` pairs without replacement.
///
/// For a fixed seed, `sample_slice(c, n1, s)` is a prefix of
/// `sample_slice(c, n2, s)` whenever `n1 <= n2`.
pub fn sample_slice(corpus: &ParallelCorpus, n: usize, seed: u64) -> Result<ParallelCorpus, CorpusError> {
    if n > corpus.len() {
        return Err(CorpusError::Capacity {
            requested: n,
            available: corpus.len(),
        });
    }
    let order = shuffled_order(corpus.len(), seed);
    Ok(corpus.select(&order[..n]))
}

/// Pair the source sides of two bitexts that share a target language by
/// exact match on the target text. For every pair of `left` whose target
/// also appears in `right`, emits `(left.source, right.source)` using the
/// first matching pair of `right`.
pub fn join_on_target(left: &ParallelCorpus, right: &ParallelCorpus) -> ParallelCorpus {
    let mut index: HashMap<&str, &Sentence> = HashMap::new();
    for (s, t) in right.pairs() {
        index.entry(t.text()).or_insert(s);
    }
    let pairs = left
        .pairs()
        .iter()
        .filter_map(|(s, t)| index.get(t.text()).map(|r| (s.clone(), (*r).clone())))
        .collect();
    ParallelCorpus {
        source_lang: left.source_lang.clone(),
        target_lang: right.source_lang.clone(),
        pairs,
        provenance: Provenance::Authentic,
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CorpusError> {
    fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Split into lines (LF; a trailing newline does not start a new line) and
/// decode each one.
fn decode_lines(bytes: &[u8]) -> Result<Vec<&str>, CorpusError> {
    if bytes.is_empty() {
        return Ok(Vec::new());
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let mut offset = 0;
    let mut lines = Vec::new();
    for (i, raw) in body.split(|&b| b == b'\n').enumerate() {
        match std::str::from_utf8(raw) {
            Ok(s) => lines.push(s),
            Err(e) => {
                return Err(CorpusError::Decode {
                    line: Some(i + 1),
                    offset: offset + e.valid_up_to(),
                })
            }
        }
        offset += raw.len() + 1;
    }
    Ok(lines)
}

/// Decode and normalize corpus text, rejecting empty lines.
pub fn parse_lines(bytes: &[u8]) -> Result<Vec<Sentence>, CorpusError> {
    decode_lines(bytes)?
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let s = normalize(l);
            if s.is_empty() {
                Err(CorpusError::EmptySegment {
                    line: i + 1,
                    side: Side::Source,
                })
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// Decode and normalize text where empty lines are meaningful, such as
/// system output.
pub fn parse_lines_allow_empty(bytes: &[u8]) -> Result<Vec<Sentence>, CorpusError> {
    Ok(decode_lines(bytes)?.into_iter().map(normalize).collect())
}

/// Read a corpus file into normalized lines, rejecting empty ones.
pub fn read_lines(path: &Path) -> Result<Vec<Sentence>, CorpusError> {
    parse_lines(&read_file(path)?)
}

pub fn load_mono(path: &Path, lang: Lang) -> Result<MonoCorpus, CorpusError> {
    let sentences = read_lines(path)?;
    Ok(MonoCorpus { lang, sentences })
}

/// Load two line-aligned files. Provenance is `authentic`.
pub fn load_bitext(
    source_path: &Path,
    target_path: &Path,
    source_lang: Lang,
    target_lang: Lang,
) -> Result<ParallelCorpus, CorpusError> {
    let src_bytes = read_file(source_path)?;
    let tgt_bytes = read_file(target_path)?;
    let src = decode_lines(&src_bytes)?;
    let tgt = decode_lines(&tgt_bytes)?;
    ParallelCorpus::from_lines(source_lang, target_lang, &src, &tgt, Provenance::Authentic)
}

/// Load a `source<TAB>target` file. Provenance is `authentic`.
pub fn load_tsv_bitext(path: &Path, source_lang: Lang, target_lang: Lang) -> Result<ParallelCorpus, CorpusError> {
    let bytes = read_file(path)?;
    let mut pairs = Vec::new();
    for (i, line) in decode_lines(&bytes)?.into_iter().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut fields = line.split('\t');
        let (Some(s), Some(t), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CorpusError::Tsv { line: i + 1 });
        };
        pairs.push((normalize(s), normalize(t)));
    }
    ParallelCorpus::new(source_lang, target_lang, pairs, Provenance::Authentic)
}

fn write_with(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn write_lines<'a, I>(path: &Path, lines: I) -> Result<(), CorpusError>
where
    I: IntoIterator<Item = &'a Sentence>,
{
    write_with(path, |w| {
        for s in lines {
            writeln!(w, "{}", s.text())?;
        }
        Ok(())
    })
}

pub fn save_mono(corpus: &MonoCorpus, path: &Path) -> Result<(), CorpusError> {
    write_lines(path, corpus.sentences())
}

pub fn save_bitext(corpus: &ParallelCorpus, source_path: &Path, target_path: &Path) -> Result<(), CorpusError> {
    write_lines(source_path, corpus.sources())?;
    write_lines(target_path, corpus.targets())
}

pub fn save_tsv_bitext(corpus: &ParallelCorpus, path: &Path) -> Result<(), CorpusError> {
    write_with(path, |w| {
        for (s, t) in corpus.pairs() {
            writeln!(w, "{}\t{}", s.text(), t.text())?;
        }
        Ok(())
    })
}
