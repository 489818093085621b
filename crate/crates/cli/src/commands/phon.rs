use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, Subcommand};
use lrtk::corpus::Sentence;
use lrtk::phonvec::{export_embedding_matrix, nearest_neighbors, Metric, PhoneFeatureTable, WordEmbedding};
use lrtk::translit::RewriteRuleSet;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::load_rules;
use crate::context::Context;

const DEFAULT_TABLE: &str = "builtin:features.csv";

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhonCommand {
    /// Phone-sum vectors, one word per input line.
    ///
    /// Example: lrtk phon embed --g2p builtin:hat_ipa.rules --in words.txt
    Embed(EmbedArgs),
    /// Brute-force nearest neighbors, as `query<TAB>rank<TAB>neighbor<TAB>score`.
    ///
    /// Example: lrtk phon neighbors --queries fr.txt --query-g2p builtin:fra_ipa.rules
    ///          --pool ht.txt --pool-g2p builtin:hat_ipa.rules --k 3
    Neighbors(NeighborArgs),
    /// Scaled, padded embedding matrix for model initialization.
    ///
    /// Example: lrtk phon export --vocab vocab.txt --g2p builtin:hat_ipa.rules --dim 512 --out emb.txt
    Export(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    /// Feature table CSV.
    #[arg(long, default_value = DEFAULT_TABLE)]
    table: String,
    /// G2P rules; without them the input is read as IPA.
    #[arg(long)]
    g2p: Option<String>,
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write `word<TAB>unmatched-characters` for words with residue.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct NeighborArgs {
    #[arg(long, default_value = DEFAULT_TABLE)]
    table: String,
    #[arg(long, value_name = "PATH")]
    queries: PathBuf,
    #[arg(long, value_name = "PATH")]
    pool: PathBuf,
    #[arg(long)]
    query_g2p: Option<String>,
    #[arg(long)]
    pool_g2p: Option<String>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "euclidean", value_parser = ["euclidean", "cosine"])]
    metric: String,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long, default_value = DEFAULT_TABLE)]
    table: String,
    /// One token per line.
    #[arg(long, value_name = "PATH")]
    vocab: PathBuf,
    #[arg(long)]
    g2p: String,
    /// Row width; at least the feature count.
    #[arg(long)]
    dim: usize,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write `token<TAB>residue` for tokens that got the zero row.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

impl PhonCommand {
    pub fn name(&self) -> &'static str {
        match self {
            PhonCommand::Embed(_) => "embed",
            PhonCommand::Neighbors(_) => "neighbors",
            PhonCommand::Export(_) => "export",
        }
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        match self {
            PhonCommand::Embed(a) => embed(ctx, a),
            PhonCommand::Neighbors(a) => neighbors(ctx, a),
            PhonCommand::Export(a) => export(ctx, a),
        }
    }
}

fn load_table(ctx: &mut Context, spec: &str) -> anyhow::Result<PhoneFeatureTable> {
    let text = ctx.resource(spec)?;
    PhoneFeatureTable::parse_csv(&text).with_context(|| format!("feature table {spec}"))
}

fn words(lines: &[Sentence]) -> Vec<String> {
    lines.iter().map(|s| s.text().to_string()).collect()
}

/// Embed each word, returning embeddings and per-word residue.
fn embed_words(
    table: &PhoneFeatureTable,
    g2p: Option<&RewriteRuleSet>,
    words: &[String],
) -> Vec<(WordEmbedding, String)> {
    words
        .par_iter()
        .map(|w| {
            let ipa = match g2p {
                Some(r) => r.apply(w),
                None => w.clone(),
            };
            let (emb, seq) = table.embed_word(w, &ipa);
            (emb, seq.residue_string())
        })
        .collect()
}

fn residue_report(rows: &[(WordEmbedding, String)]) -> (String, usize) {
    let mut out = String::new();
    let mut n = 0;
    for (e, r) in rows {
        if !r.is_empty() {
            out.push_str(&format!("{}\t{}\n", e.word, r));
            n += 1;
        }
    }
    (out, n)
}

fn embed(ctx: &mut Context, a: &EmbedArgs) -> anyhow::Result<()> {
    let table = load_table(ctx, &a.table)?;
    let g2p = a.g2p.as_deref().map(|g| load_rules(ctx, g)).transpose()?;
    let lines = ctx.read_corpus(a.input.as_deref())?;
    let rows = embed_words(&table, g2p.as_ref(), &words(&lines));
    let mut out = String::new();
    for (e, _) in &rows {
        out.push_str(&e.word);
        for v in &e.vector {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    ctx.write_output(a.output.as_deref(), out.as_bytes())?;
    let (report, with_residue) = residue_report(&rows);
    if let Some(p) = &a.report {
        ctx.write_output(Some(p), report.as_bytes())?;
    }
    ctx.stat(json!({"stage": "phon_embed", "words": rows.len(), "dim": table.dim(), "with_residue": with_residue}));
    Ok(())
}

fn neighbors(ctx: &mut Context, a: &NeighborArgs) -> anyhow::Result<()> {
    let metric: Metric = a.metric.parse().map_err(anyhow::Error::msg)?;
    let table = load_table(ctx, &a.table)?;
    let qg = a.query_g2p.as_deref().map(|g| load_rules(ctx, g)).transpose()?;
    let pg = a.pool_g2p.as_deref().map(|g| load_rules(ctx, g)).transpose()?;
    let q_lines = ctx.read_corpus(Some(&a.queries))?;
    let p_lines = ctx.read_corpus(Some(&a.pool))?;
    let queries: Vec<WordEmbedding> = embed_words(&table, qg.as_ref(), &words(&q_lines))
        .into_iter()
        .map(|r| r.0)
        .collect();
    let pool: Vec<WordEmbedding> = embed_words(&table, pg.as_ref(), &words(&p_lines))
        .into_iter()
        .map(|r| r.0)
        .collect();
    let lists = nearest_neighbors(&queries, &pool, a.k, metric)?;
    let mut out = String::new();
    for l in &lists {
        for (rank, n) in l.neighbors.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", l.query, rank + 1, n.word, n.score));
        }
    }
    ctx.write_output(a.output.as_deref(), out.as_bytes())?;
    ctx.stat(
        json!({"stage": "phon_neighbors", "queries": queries.len(), "pool": pool.len(), "k": a.k, "metric": a.metric}),
    );
    Ok(())
}

fn export(ctx: &mut Context, a: &ExportArgs) -> anyhow::Result<()> {
    let table = load_table(ctx, &a.table)?;
    let g2p = load_rules(ctx, &a.g2p)?;
    let vocab = words(&ctx.read_corpus(Some(&a.vocab))?);
    let m = export_embedding_matrix(&vocab, &g2p, &table, a.dim)?;
    let mut out = Vec::new();
    m.write_text(&mut out)?;
    ctx.write_output(a.output.as_deref(), &out)?;
    if let Some(p) = &a.report {
        let mut rep = Vec::new();
        m.write_report(&mut rep)?;
        ctx.write_output(Some(p), &rep)?;
    }
    ctx.stat(json!({"stage": "phon_export", "tokens": m.rows.len(), "dim": m.dim, "unknown": m.unknown.len()}));
    Ok(())
}
