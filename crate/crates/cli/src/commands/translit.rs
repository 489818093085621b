use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, Subcommand};
use lrtk::corpus::normalize;
use lrtk::translit::{ApplyStats, RewriteRuleSet};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::load_rules;
use crate::context::{join_lines, Context};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslitCommand {
    /// Rewrite every line of a corpus.
    ///
    /// Example: lrtk translit apply --rules builtin:fra_hat.rules --in fr.txt --out ht.txt
    Apply(RulesIo),
}

impl TranslitCommand {
    pub fn name(&self) -> &'static str {
        "apply"
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        let TranslitCommand::Apply(io) = self;
        io.run(ctx, "translit", false)
    }
}

/// Convert words or lines to IPA.
///
/// Example: echo unité | lrtk g2p --rules builtin:fra_ipa.rules
#[derive(Debug, Args, Serialize)]
pub struct G2pArgs {
    #[command(flatten)]
    #[serde(flatten)]
    io: RulesIo,
}

impl G2pArgs {
    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        self.io.run(ctx, "g2p", true)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RulesIo {
    /// Rule file, or `builtin:NAME`.
    #[arg(long)]
    rules: String,
    /// Input (default stdin).
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output (default stdout).
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

impl RulesIo {
    fn run(&self, ctx: &mut Context, stage: &str, allow_empty_output: bool) -> anyhow::Result<()> {
        let rules = load_rules(ctx, &self.rules)?;
        let lines = ctx.read_corpus(self.input.as_deref())?;
        let texts: Vec<&str> = lines.iter().map(|s| s.text()).collect();
        let (out, stats) = apply_lines(&rules, &texts);
        if !allow_empty_output {
            if let Some(i) = out.iter().position(String::is_empty) {
                bail!("line {}: rules deleted the whole sentence", i + 1);
            }
        }
        ctx.write_output(self.output.as_deref(), &join_lines(&out))?;
        ctx.stat(json!({
            "stage": stage,
            "lines": out.len(),
            "rules": rules.len(),
            "rules_fired": stats.total_fired(),
            "chars_changed": stats.chars_changed,
            "passthrough": stats.passthrough,
        }));
        Ok(())
    }
}

/// Apply `rules` to each line in parallel, keeping order.
pub fn apply_lines(rules: &RewriteRuleSet, lines: &[&str]) -> (Vec<String>, ApplyStats) {
    let results: Vec<(String, ApplyStats)> = lines
        .par_iter()
        .map(|l| {
            let mut st = ApplyStats::default();
            let out = rules.apply_with_stats(l, &mut st);
            (normalize(&out).into_string(), st)
        })
        .collect();
    let mut total = ApplyStats::default();
    let out = results
        .into_iter()
        .map(|(s, st)| {
            total.merge(&st);
            s
        })
        .collect();
    (out, total)
}
