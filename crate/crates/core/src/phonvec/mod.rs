//! Articulatory feature vectors for IPA strings.
//!
//! A [`PhoneFeatureTable`] maps IPA segments to ternary features
//! (`+` → 1, `-` → -1, `0` → 0). A word is segmented by greedy longest
//! match against the table and embedded as the elementwise sum of its phone
//! vectors. Summation forgets phone order, so anagrams share an embedding.

mod export;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

pub use export::{export_embedding_matrix, EmbeddingMatrix, ExportError};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no entries")]
    NoEntries,
    #[error("header must start with `segment` followed by feature names")]
    Header,
    #[error("line {line}: expected {expected} cells, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}: duplicate segment {segment:?}")]
    Duplicate { line: usize, segment: String },
    #[error("line {line}: invalid cell {cell:?} (expected +, - or 0)")]
    Cell { line: usize, cell: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneFeatureTable {
    feature_names: Vec<String>,
    entries: BTreeMap<String, Vec<i8>>,
    longest_key: usize,
}

impl PhoneFeatureTable {
    /// Parse CSV with header `segment,f1,...,fF` and cells in `{-,0,+}`.
    pub fn parse_csv(text: &str) -> Result<Self, TableError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(TableError::NoEntries)?;
        let mut cols = header.split(',').map(str::trim);
        if cols.next() != Some("segment") {
            return Err(TableError::Header);
        }
        let feature_names: Vec<String> = cols.map(str::to_string).collect();
        if feature_names.is_empty() || feature_names.iter().any(String::is_empty) {
            return Err(TableError::Header);
        }
        let width = feature_names.len();
        let mut entries = BTreeMap::new();
        for (line, row) in lines {
            let cells: Vec<&str> = row.split(',').map(str::trim).collect();
            if cells.len() != width + 1 {
                return Err(TableError::Ragged {
                    line,
                    expected: width + 1,
                    found: cells.len(),
                });
            }
            let segment: String = cells[0].nfc().collect();
            if segment.is_empty() {
                return Err(TableError::Cell {
                    line,
                    cell: String::new(),
                });
            }
            let values = cells[1..]
                .iter()
                .map(|c| match *c {
                    "+" => Ok(1),
                    "-" => Ok(-1),
                    "0" => Ok(0),
                    other => Err(TableError::Cell {
                        line,
                        cell: other.to_string(),
                    }),
                })
                .collect::<Result<Vec<i8>, _>>()?;
            if entries.insert(segment.clone(), values).is_some() {
                return Err(TableError::Duplicate { line, segment });
            }
        }
        if entries.is_empty() {
            return Err(TableError::NoEntries);
        }
        let longest_key = entries.keys().map(|k| k.chars().count()).max().unwrap_or(1);
        Ok(PhoneFeatureTable {
            feature_names,
            entries,
            longest_key,
        })
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        let text = fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_csv(&text)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of features, `F`.
    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, segment: &str) -> Option<&[i8]> {
        self.entries.get(segment).map(Vec::as_slice)
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Greedy longest-match segmentation, left to right. Characters that
    /// start no table key are recorded as residue.
    ///
    /// ```
    /// use lrtk::phonvec::PhoneFeatureTable;
    /// let table = PhoneFeatureTable::parse_csv("segment,voi\nt,-\ns,-\nts,-\n").unwrap();
    /// let seq = table.segment("tsa");
    /// assert_eq!(seq.phone_strings(), ["ts"]);
    /// assert_eq!(seq.residue_string(), "a");
    /// ```
    pub fn segment(&self, ipa: &str) -> PhoneSequence {
        let chars: Vec<char> = ipa.nfc().collect();
        let mut phones = Vec::new();
        let mut residue = Vec::new();
        let mut pos = 0;
        let mut key = String::new();
        'outer: while pos < chars.len() {
            for len in (1..=self.longest_key.min(chars.len() - pos)).rev() {
                key.clear();
                key.extend(&chars[pos..pos + len]);
                if self.entries.contains_key(&key) {
                    phones.push(Phone {
                        segment: key.clone(),
                        position: pos,
                    });
                    pos += len;
                    continue 'outer;
                }
            }
            residue.push(Residue {
                ch: chars[pos],
                position: pos,
            });
            pos += 1;
        }
        PhoneSequence { phones, residue }
    }

    fn sum(&self, phones: &[Phone]) -> Vec<i32> {
        let mut v = vec![0i32; self.dim()];
        for p in phones {
            for (acc, &f) in v.iter_mut().zip(&self.entries[&p.segment]) {
                *acc += i32::from(f);
            }
        }
        v
    }

    /// Embed an IPA string; the embedding's word is the IPA string itself.
    pub fn embed_ipa(&self, ipa: &str) -> WordEmbedding {
        self.embed_word(ipa, ipa).0
    }

    /// Embed `word` via its pronunciation `ipa`, also returning the
    /// segmentation so callers can inspect residue.
    pub fn embed_word(&self, word: &str, ipa: &str) -> (WordEmbedding, PhoneSequence) {
        let seq = self.segment(ipa);
        let vector = self.sum(&seq.phones);
        (
            WordEmbedding {
                word: word.to_string(),
                vector,
            },
            seq,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phone {
    pub segment: String,
    /// Character offset in the NFC input.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub ch: char,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhoneSequence {
    pub phones: Vec<Phone>,
    pub residue: Vec<Residue>,
}

impl PhoneSequence {
    pub fn phone_strings(&self) -> Vec<&str> {
        self.phones.iter().map(|p| p.segment.as_str()).collect()
    }

    pub fn residue_string(&self) -> String {
        self.residue.iter().map(|r| r.ch).collect()
    }

    /// Interleave phones and residue by position, rebuilding the input.
    pub fn reconstruct(&self) -> String {
        let mut pieces: Vec<(usize, String)> = self
            .phones
            .iter()
            .map(|p| (p.position, p.segment.clone()))
            .chain(self.residue.iter().map(|r| (r.position, r.ch.to_string())))
            .collect();
        pieces.sort_by_key(|(p, _)| *p);
        pieces.into_iter().map(|(_, s)| s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordEmbedding {
    pub word: String,
    pub vector: Vec<i32>,
}

impl WordEmbedding {
    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&v| v == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NeighborError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("dimension mismatch: {word:?} has {found} features, expected {expected}")]
    Dimension {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("cosine similarity is undefined for the zero vector of {0:?}")]
    ZeroVector(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub word: String,
    /// Distance for euclidean, similarity for cosine.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborList {
    pub query: String,
    pub neighbors: Vec<Neighbor>,
}

fn euclidean(a: &[i32], b: &[i32]) -> f64 {
    let s: i64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = i64::from(x - y);
            d * d
        })
        .sum();
    (s as f64).sqrt()
}

fn cosine(a: &[i32], b: &[i32]) -> f64 {
    let dot: i64 = a.iter().zip(b).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum();
    let na: i64 = a.iter().map(|&x| i64::from(x) * i64::from(x)).sum();
    let nb: i64 = b.iter().map(|&x| i64::from(x) * i64::from(x)).sum();
    dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt())
}

/// Brute-force k nearest neighbors of each query in `pool`. Ties are broken
/// by word, ascending.
pub fn nearest_neighbors(
    queries: &[WordEmbedding],
    pool: &[WordEmbedding],
    k: usize,
    metric: Metric,
) -> Result<Vec<NeighborList>, NeighborError> {
    if k == 0 {
        return Err(NeighborError::ZeroK);
    }
    let dim = queries.first().or(pool.first()).map(|e| e.vector.len()).unwrap_or(0);
    for e in queries.iter().chain(pool) {
        if e.vector.len() != dim {
            return Err(NeighborError::Dimension {
                word: e.word.clone(),
                expected: dim,
                found: e.vector.len(),
            });
        }
        if metric == Metric::Cosine && e.is_zero() {
            return Err(NeighborError::ZeroVector(e.word.clone()));
        }
    }
    Ok(queries
        .iter()
        .map(|q| {
            let mut scored: Vec<Neighbor> = pool
                .iter()
                .map(|p| Neighbor {
                    word: p.word.clone(),
                    score: match metric {
                        Metric::Euclidean => euclidean(&q.vector, &p.vector),
                        Metric::Cosine => cosine(&q.vector, &p.vector),
                    },
                })
                .collect();
            scored.sort_by(|a, b| {
                let ord = match metric {
                    Metric::Euclidean => a.score.total_cmp(&b.score),
                    Metric::Cosine => b.score.total_cmp(&a.score),
                };
                ord.then_with(|| a.word.cmp(&b.word))
            });
            scored.truncate(k);
            NeighborList {
                query: q.word.clone(),
                neighbors: scored,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "segment,syl,voi,nas\n\
                       a,+,+,-\n\
                       i,+,+,-\n\
                       e,+,+,-\n\
                       n,-,+,+\n\
                       t,-,-,-\n\
                       s,-,-,-\n\
                       ts,-,-,0\n";

    fn toy() -> PhoneFeatureTable {
        PhoneFeatureTable::parse_csv(TOY).unwrap()
    }

    #[test]
    fn table_loading() {
        let t = toy();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("n"), Some(&[-1, 1, 1][..]));
        assert!(matches!(
            PhoneFeatureTable::parse_csv("segment,a,b\nx,+\n"),
            Err(TableError::Ragged {
                line: 2,
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(PhoneFeatureTable::parse_csv(""), Err(TableError::NoEntries)));
        assert!(matches!(
            PhoneFeatureTable::parse_csv("segment,a\n"),
            Err(TableError::NoEntries)
        ));
        assert!(matches!(
            PhoneFeatureTable::parse_csv("segment,a\nx,+\nx,-\n"),
            Err(TableError::Duplicate { line: 3, .. })
        ));
        assert!(matches!(
            PhoneFeatureTable::parse_csv("segment,a\nx,1\n"),
            Err(TableError::Cell { line: 2, .. })
        ));
        assert!(matches!(
            PhoneFeatureTable::parse_csv("seg,a\nx,1\n"),
            Err(TableError::Header)
        ));
    }

    #[test]
    fn segmentation_examples() {
        let t = toy();
        let s = t.segment("inite");
        assert_eq!(s.phone_strings(), ["i", "n", "i", "t", "e"]);
        assert!(s.residue.is_empty());
        assert!(t.segment("").phones.is_empty());
        let s = t.segment("tsa");
        assert_eq!(s.phone_strings(), ["ts", "a"]);
        let s = t.segment("xtsy");
        assert_eq!(s.phone_strings(), ["ts"]);
        assert_eq!(s.residue_string(), "xy");
        assert_eq!(s.reconstruct(), "xtsy");
    }

    #[test]
    fn embedding_examples() {
        let t = toy();
        assert_eq!(t.embed_ipa("a").vector, [1, 1, -1]);
        assert_eq!(t.embed_ipa("").vector, [0, 0, 0]);
        assert_eq!(t.embed_ipa("inite").vector, t.embed_ipa("eniti").vector);
        let (e, seq) = t.embed_word("word", "a?");
        assert_eq!(e.vector, [1, 1, -1]);
        assert_eq!(seq.residue_string(), "?");
    }

    #[test]
    fn neighbor_ranking() {
        let t = toy();
        let pool: Vec<_> = ["inite", "tat", "nan"].iter().map(|w| t.embed_ipa(w)).collect();
        let q = [t.embed_ipa("inite")];
        let res = nearest_neighbors(&q, &pool, 1, Metric::Euclidean).unwrap();
        assert_eq!(res[0].neighbors[0].word, "inite");
        assert_eq!(res[0].neighbors[0].score, 0.0);
        let res = nearest_neighbors(&q, &pool, 10, Metric::Cosine).unwrap();
        assert_eq!(res[0].neighbors.len(), 3);
        assert!((res[0].neighbors[0].score - 1.0).abs() < 1e-12);
        assert_eq!(
            nearest_neighbors(&q, &pool, 0, Metric::Euclidean),
            Err(NeighborError::ZeroK)
        );
    }

    #[test]
    fn ties_break_by_word() {
        let pool = vec![
            WordEmbedding {
                word: "b".into(),
                vector: vec![1, 0],
            },
            WordEmbedding {
                word: "a".into(),
                vector: vec![-1, 0],
            },
        ];
        let q = [WordEmbedding {
            word: "q".into(),
            vector: vec![0, 0],
        }];
        let res = nearest_neighbors(&q, &pool, 2, Metric::Euclidean).unwrap();
        assert_eq!(res[0].neighbors[0].word, "a");
        assert_eq!(
            nearest_neighbors(&q, &pool, 1, Metric::Cosine),
            Err(NeighborError::ZeroVector("q".into()))
        );
    }
}
