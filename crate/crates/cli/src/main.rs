//! `lrtk`: command-line front end.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for data errors
//! (unreadable or malformed input, failed checks).

mod commands;
mod context;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use context::{Context, UsageError};

#[derive(Debug, Parser)]
#[command(
    name = "lrtk",
    version,
    about = "Corpus transformation, augmentation and evaluation for low-resource MT"
)]
struct Cli {
    /// Seed for every random choice (default 0; `pipeline build` uses the
    /// manifest's seed unless this is given).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for line-parallel work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print statistics as JSON lines on stderr.
    #[arg(long, global = true)]
    stats: bool,
    /// Write the run record here instead of beside the output.
    #[arg(long, global = true, value_name = "PATH")]
    record: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Orthographic rewrite rules.
    #[command(subcommand)]
    Translit(commands::translit::TranslitCommand),
    /// Grapheme-to-phoneme conversion, one line in, one line out.
    G2p(commands::translit::G2pArgs),
    /// Constituency-tree rewriting.
    #[command(subcommand)]
    Syntax(commands::syntax::SyntaxCommand),
    /// Phonological embeddings.
    #[command(subcommand)]
    Phon(commands::phon::PhonCommand),
    /// Lexicon-based code-switching.
    #[command(subcommand)]
    Cs(commands::cs::CsCommand),
    /// Synthetic data and training-set builds.
    #[command(subcommand)]
    Pipeline(commands::pipeline::PipelineCommand),
    /// Evaluation metrics and significance tests.
    #[command(subcommand)]
    Eval(commands::eval::EvalCommand),
}

impl Command {
    fn name(&self) -> String {
        let sub = match self {
            Command::Translit(c) => Some(c.name()),
            Command::G2p(_) => None,
            Command::Syntax(c) => Some(c.name()),
            Command::Phon(c) => Some(c.name()),
            Command::Cs(c) => Some(c.name()),
            Command::Pipeline(c) => Some(c.name()),
            Command::Eval(c) => Some(c.name()),
        };
        let top = match self {
            Command::Translit(_) => "translit",
            Command::G2p(_) => "g2p",
            Command::Syntax(_) => "syntax",
            Command::Phon(_) => "phon",
            Command::Cs(_) => "cs",
            Command::Pipeline(_) => "pipeline",
            Command::Eval(_) => "eval",
        };
        match sub {
            Some(s) => format!("{top} {s}"),
            None => top.to_string(),
        }
    }

    fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        match self {
            Command::Translit(c) => c.run(ctx),
            Command::G2p(a) => a.run(ctx),
            Command::Syntax(c) => c.run(ctx),
            Command::Phon(c) => c.run(ctx),
            Command::Cs(c) => c.run(ctx),
            Command::Pipeline(c) => c.run(ctx),
            Command::Eval(c) => c.run(ctx),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let config = serde_json::to_value(&cli.command)?;
    let mut ctx = Context::new(cli.command.name(), config, cli.seed, cli.stats, cli.record.clone());
    cli.command.run(&mut ctx)?;
    ctx.finish()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
