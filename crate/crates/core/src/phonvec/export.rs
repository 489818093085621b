use std::io::{self, Write};

use super::PhoneFeatureTable;
use crate::translit::RewriteRuleSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("target dimension {dim} is smaller than the feature count {features}")]
    Dimension { dim: usize, features: usize },
}

/// Phone-sum rows scaled to unit max-absolute-value and zero-padded to a
/// model dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub dim: usize,
    pub rows: Vec<(String, Vec<f64>)>,
    /// Tokens with no recognized phone, paired with their unmatched characters.
    pub unknown: Vec<(String, String)>,
}

impl EmbeddingMatrix {
    /// `token v1 ... vD`, one line per row.
    pub fn write_text(&self, w: &mut impl Write) -> io::Result<()> {
        for (token, row) in &self.rows {
            write!(w, "{token}")?;
            for v in row {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// `token<TAB>residue` for every token that received the zero row.
    pub fn write_report(&self, w: &mut impl Write) -> io::Result<()> {
        for (token, residue) in &self.unknown {
            writeln!(w, "{token}\t{residue}")?;
        }
        Ok(())
    }
}

/// Build an initialization matrix for `vocab`: pronounce each token with
/// `g2p`, sum its phone vectors, scale, pad to `dim`.
pub fn export_embedding_matrix(
    vocab: &[String],
    g2p: &RewriteRuleSet,
    table: &PhoneFeatureTable,
    dim: usize,
) -> Result<EmbeddingMatrix, ExportError> {
    if dim < table.dim() {
        return Err(ExportError::Dimension {
            dim,
            features: table.dim(),
        });
    }
    let mut rows = Vec::with_capacity(vocab.len());
    let mut unknown = Vec::new();
    for token in vocab {
        let ipa = g2p.apply(token);
        let (emb, seq) = table.embed_word(token, &ipa);
        if seq.phones.is_empty() {
            unknown.push((token.clone(), seq.residue_string()));
        }
        let max = emb.vector.iter().map(|v| v.abs()).max().unwrap_or(0);
        let mut row: Vec<f64> = emb
            .vector
            .iter()
            .map(|&v| if max == 0 { 0.0 } else { f64::from(v) / f64::from(max) })
            .collect();
        row.resize(dim, 0.0);
        rows.push((token.clone(), row));
    }
    Ok(EmbeddingMatrix { dim, rows, unknown })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PhoneFeatureTable {
        PhoneFeatureTable::parse_csv("segment,syl,voi,hi\na,+,+,-\ni,+,+,+\nt,-,-,0\n").unwrap()
    }

    #[test]
    fn rows_are_scaled_and_padded() {
        let t = table();
        let m = export_embedding_matrix(&["a".into()], &RewriteRuleSet::empty(), &t, 3).unwrap();
        assert_eq!(m.rows[0].1, [1.0, 1.0, -1.0]);
        let m = export_embedding_matrix(&["a".into()], &RewriteRuleSet::empty(), &t, 5).unwrap();
        assert_eq!(m.rows[0].1, [1.0, 1.0, -1.0, 0.0, 0.0]);
        let m = export_embedding_matrix(&["ata".into()], &RewriteRuleSet::empty(), &t, 3).unwrap();
        // sum = [1, 1, -2]
        assert_eq!(m.rows[0].1, [0.5, 0.5, -1.0]);
    }

    #[test]
    fn unknown_tokens_get_zero_rows() {
        let t = table();
        let vocab = vec!["xyz".to_string(), "a".to_string(), "ax".to_string()];
        let m = export_embedding_matrix(&vocab, &RewriteRuleSet::empty(), &t, 4).unwrap();
        assert_eq!(m.rows[0].1, [0.0; 4]);
        assert_eq!(m.unknown, [("xyz".to_string(), "xyz".to_string())]);
        let mut text = Vec::new();
        m.write_text(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert_eq!(text.lines().next().unwrap(), "xyz 0 0 0 0");
        assert_eq!(text.lines().nth(1).unwrap(), "a 1 1 -1 0");
        let mut rep = Vec::new();
        m.write_report(&mut rep).unwrap();
        assert_eq!(rep, b"xyz\txyz\n");
    }

    #[test]
    fn dimension_must_cover_features() {
        assert_eq!(
            export_embedding_matrix(&[], &RewriteRuleSet::empty(), &table(), 2),
            Err(ExportError::Dimension { dim: 2, features: 3 })
        );
    }

    #[test]
    fn g2p_is_applied_first() {
        let g2p = RewriteRuleSet::parse("e -> i").unwrap();
        let m = export_embedding_matrix(&["e".into()], &g2p, &table(), 3).unwrap();
        assert_eq!(m.rows[0].1, [1.0, 1.0, 1.0]);
    }
}
