use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, Subcommand};
use lrtk::syntree::{parse_treebank, SyntaxRuleSet};
use serde::Serialize;
use serde_json::json;

use super::load_rules;
use super::translit::apply_lines;
use crate::context::{join_lines, Context};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntaxCommand {
    /// Rewrite bracketed trees (one per line) and print their yields.
    ///
    /// Example: lrtk syntax reorder --rules builtin:fra_hat.syn --lexicon builtin:fra_hat.lex.tsv
    ///          --orthography builtin:fra_hat.rules --in trees.txt
    Reorder(ReorderArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ReorderArgs {
    /// Syntax rule file, or `builtin:NAME`.
    #[arg(long)]
    rules: String,
    /// Leaf substitutions, `token<TAB>replacement`.
    #[arg(long)]
    lexicon: Option<String>,
    /// Orthographic rules applied to each yield afterwards.
    #[arg(long)]
    orthography: Option<String>,
    /// Print rewritten trees instead of yields.
    #[arg(long, conflicts_with = "orthography")]
    trees: bool,
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

impl SyntaxCommand {
    pub fn name(&self) -> &'static str {
        "reorder"
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        let SyntaxCommand::Reorder(a) = self;
        let text = ctx.resource(&a.rules)?;
        let mut rules = SyntaxRuleSet::parse(&text).with_context(|| format!("syntax rules {}", a.rules))?;
        if let Some(lex) = &a.lexicon {
            let text = ctx.resource(lex)?;
            rules = rules
                .with_lexicon_tsv(&text)
                .with_context(|| format!("lexicon {lex}"))?;
        }
        let ortho = a.orthography.as_deref().map(|o| load_rules(ctx, o)).transpose()?;
        let bytes = ctx.read_input(a.input.as_deref())?;
        let text = String::from_utf8(bytes).context("treebank is not UTF-8")?;
        let trees = parse_treebank(&text)?;
        let mut out = Vec::with_capacity(trees.len());
        let mut fired_nodes = 0usize;
        for (i, t) in trees.iter().enumerate() {
            let new = rules
                .apply(t)
                .with_context(|| format!("tree {}: rules deleted every token", i + 1))?;
            if new != *t {
                fired_nodes += 1;
            }
            out.push(if a.trees { new.to_string() } else { new.yield_string() });
        }
        if let Some(o) = &ortho {
            let refs: Vec<&str> = out.iter().map(String::as_str).collect();
            out = apply_lines(o, &refs).0;
        }
        ctx.write_output(a.output.as_deref(), &join_lines(&out))?;
        ctx.stat(json!({
            "stage": "syntax",
            "trees": trees.len(),
            "changed": fired_nodes,
            "rules": rules.rules().len(),
            "lexicon": rules.lexicon().len(),
        }));
        Ok(())
    }
}
