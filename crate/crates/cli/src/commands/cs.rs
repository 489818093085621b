use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, Subcommand};
use lrtk::codeswitch::{apply_code_switch, CodeSwitchLexicon, CodeSwitchOptions};
use serde::Serialize;
use serde_json::json;

use crate::context::{join_lines, Context};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CsCommand {
    /// Replace lexicon words with their translations.
    ///
    /// Example: lrtk cs apply --lexicon builtin:eng_jam.tsv --rate 0.5 --seed 7 --in en.txt
    Apply(CsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CsArgs {
    /// `hrl<TAB>lrl` lexicon, or `builtin:NAME`.
    #[arg(long)]
    lexicon: String,
    /// Probability of replacing each matched token.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Match tokens with trailing punctuation detached.
    #[arg(long)]
    strip_punct: bool,
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

impl CsCommand {
    pub fn name(&self) -> &'static str {
        "apply"
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        let CsCommand::Apply(a) = self;
        let text = ctx.resource(&a.lexicon)?;
        let lex = CodeSwitchLexicon::parse(&a.lexicon, &text).with_context(|| format!("lexicon {}", a.lexicon))?;
        let lines = ctx.read_corpus(a.input.as_deref())?;
        let opts = CodeSwitchOptions {
            rate: a.rate,
            seed: ctx.seed(),
            strip_punct: a.strip_punct,
        };
        let (out, stats) = apply_code_switch(&lex, &lines, &opts)?;
        let texts: Vec<&str> = out.iter().map(|s| s.text()).collect();
        ctx.write_output(a.output.as_deref(), &join_lines(&texts))?;
        ctx.stat(json!({
            "stage": "codeswitch",
            "lexicon": lex.name(),
            "entries": lex.len(),
            "rate": a.rate,
            "seen": stats.seen,
            "matched": stats.matched,
            "replaced": stats.replaced,
        }));
        Ok(())
    }
}
