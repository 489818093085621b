use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Subcommand, ValueEnum};
use lrtk::corpus::Sentence;
use lrtk::metrics::{
    bleu, bootstrap_bleu_significance, cer, chrfpp, eval_pairs, paired_bootstrap_mean, wilcoxon_signed_rank,
    BootstrapOptions, ChrfParams, EvalPair, MetricReport, Smoothing, WilcoxonMethod,
};
use serde::Serialize;
use serde_json::json;

use crate::context::{usage, Context};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalCommand {
    /// Corpus BLEU over whitespace tokens.
    ///
    /// Example: lrtk eval bleu --hyp out.txt --ref ref1.txt --ref ref2.txt
    Bleu(BleuArgs),
    /// Character error rate, in percent.
    Cer(RefArgs),
    /// chrF++.
    Chrf(ChrfArgs),
    /// Two-sided Wilcoxon signed-rank test on paired scores.
    ///
    /// Example: lrtk eval wilcoxon --scores-a a.txt --scores-b b.txt
    Wilcoxon(WilcoxonArgs),
    /// Paired bootstrap resampling test.
    ///
    /// Example: lrtk eval bootstrap --hyp-a a.txt --hyp-b b.txt --ref ref.txt --iterations 1000
    Bootstrap(BootstrapArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RefArgs {
    #[arg(long, value_name = "PATH")]
    hyp: PathBuf,
    /// Reference file; repeat for multiple references.
    #[arg(long = "ref", value_name = "PATH", required = true)]
    refs: Vec<PathBuf>,
    /// Include per-sentence scores.
    #[arg(long)]
    per_sentence: bool,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BleuArgs {
    #[command(flatten)]
    #[serde(flatten)]
    io: RefArgs,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// `none` or `add-k:K`.
    #[arg(long, default_value = "none", value_parser = parse_smoothing)]
    #[serde(serialize_with = "ser_smoothing")]
    smoothing: Smoothing,
}

#[derive(Debug, Args, Serialize)]
pub struct ChrfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    io: RefArgs,
    #[arg(long, default_value_t = 6)]
    char_order: usize,
    #[arg(long, default_value_t = 2)]
    word_order: usize,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceMetric {
    Bleu,
    Chrf,
    Cer,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Args, Serialize)]
pub struct PairedInputs {
    /// Per-item scores of system A, one number per line.
    #[arg(long, value_name = "PATH", requires = "scores_b", conflicts_with_all = ["hyp_a", "hyp_b"])]
    scores_a: Option<PathBuf>,
    #[arg(long, value_name = "PATH", requires = "scores_a")]
    scores_b: Option<PathBuf>,
    /// Output of system A, scored per sentence against `--ref`.
    #[arg(long, value_name = "PATH", requires_all = ["hyp_b", "refs"])]
    hyp_a: Option<PathBuf>,
    #[arg(long, value_name = "PATH", requires = "hyp_a")]
    hyp_b: Option<PathBuf>,
    #[arg(long = "ref", value_name = "PATH")]
    refs: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WilcoxonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inputs: PairedInputs,
    /// Sentence metric for hypothesis inputs.
    #[arg(long, value_enum, default_value = "chrf")]
    metric: SentenceMetric,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapTest {
    /// Corpus BLEU of resampled documents.
    Bleu,
    /// Mean of per-item scores.
    Mean,
}

#[derive(Debug, Args, Serialize)]
pub struct BootstrapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inputs: PairedInputs,
    #[arg(long, value_enum, default_value = "bleu")]
    test: BootstrapTest,
    /// Sentence metric when `--test mean` is run on hypotheses.
    #[arg(long, value_enum, default_value = "chrf")]
    metric: SentenceMetric,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Sentences per document (default: enough for at most 1000 documents).
    #[arg(long)]
    doc_size: Option<usize>,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

fn parse_smoothing(s: &str) -> Result<Smoothing, String> {
    if s == "none" {
        return Ok(Smoothing::None);
    }
    let k = s
        .strip_prefix("add-k:")
        .ok_or_else(|| format!("expected `none` or `add-k:K`, got {s:?}"))?;
    let k: f64 = k.parse().map_err(|_| format!("bad smoothing constant {k:?}"))?;
    if !(k > 0.0 && k.is_finite()) {
        return Err("smoothing constant must be positive".into());
    }
    Ok(Smoothing::AddK(k))
}

fn ser_smoothing<S: serde::Serializer>(s: &Smoothing, ser: S) -> Result<S::Ok, S::Error> {
    match s {
        Smoothing::None => ser.serialize_str("none"),
        Smoothing::AddK(k) => ser.serialize_str(&format!("add-k:{k}")),
    }
}

impl EvalCommand {
    pub fn name(&self) -> &'static str {
        match self {
            EvalCommand::Bleu(_) => "bleu",
            EvalCommand::Cer(_) => "cer",
            EvalCommand::Chrf(_) => "chrf",
            EvalCommand::Wilcoxon(_) => "wilcoxon",
            EvalCommand::Bootstrap(_) => "bootstrap",
        }
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        match self {
            EvalCommand::Bleu(a) => {
                let pairs = load_pairs(ctx, &a.io.hyp, &a.io.refs)?;
                emit_report(ctx, &a.io, bleu(&pairs, a.max_n, a.smoothing)?)
            }
            EvalCommand::Cer(a) => {
                let pairs = load_pairs(ctx, &a.hyp, &a.refs)?;
                emit_report(ctx, a, cer(&pairs)?)
            }
            EvalCommand::Chrf(a) => {
                let pairs = load_pairs(ctx, &a.io.hyp, &a.io.refs)?;
                let params = ChrfParams {
                    char_order: a.char_order,
                    word_order: a.word_order,
                    beta: a.beta,
                };
                emit_report(ctx, &a.io, chrfpp(&pairs, params)?)
            }
            EvalCommand::Wilcoxon(a) => wilcoxon(ctx, a),
            EvalCommand::Bootstrap(a) => bootstrap(ctx, a),
        }
    }
}

fn load_pairs(ctx: &mut Context, hyp: &Path, refs: &[PathBuf]) -> anyhow::Result<Vec<EvalPair>> {
    let hyps = ctx.read_output_lines(hyp)?;
    let refs: Vec<Vec<Sentence>> = refs
        .iter()
        .map(|r| ctx.read_corpus(Some(r)))
        .collect::<anyhow::Result<_>>()?;
    Ok(eval_pairs(&hyps, &refs)?)
}

fn write_json(ctx: &mut Context, output: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    ctx.write_output(output, text.as_bytes())
}

fn emit_report(ctx: &mut Context, io: &RefArgs, mut report: MetricReport) -> anyhow::Result<()> {
    let n = report.per_sentence.len();
    if !io.per_sentence {
        report.per_sentence.clear();
    }
    ctx.stat(json!({"stage": "eval", "metric": report.metric, "sentences": n, "references": io.refs.len()}));
    write_json(ctx, io.output.as_deref(), &report)
}

fn sentence_scores(pairs: &[EvalPair], metric: SentenceMetric) -> anyhow::Result<Vec<f64>> {
    let report = match metric {
        SentenceMetric::Bleu => bleu(pairs, 4, Smoothing::AddK(1.0))?,
        SentenceMetric::Chrf => chrfpp(pairs, ChrfParams::default())?,
        SentenceMetric::Cer => cer(pairs)?,
    };
    Ok(report.per_sentence)
}

fn read_scores(ctx: &mut Context, path: &Path) -> anyhow::Result<Vec<f64>> {
    let bytes = ctx.read_input(Some(path))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{} line {}: not a number: {l:?}", path.display(), i + 1))
        })
        .collect()
}

enum Paired {
    Scores(Vec<f64>, Vec<f64>),
    Hyps(Vec<EvalPair>, Vec<EvalPair>),
}

fn load_paired(ctx: &mut Context, p: &PairedInputs) -> anyhow::Result<Paired> {
    match (&p.scores_a, &p.scores_b, &p.hyp_a, &p.hyp_b) {
        (Some(a), Some(b), None, None) => Ok(Paired::Scores(read_scores(ctx, a)?, read_scores(ctx, b)?)),
        (None, None, Some(a), Some(b)) if !p.refs.is_empty() => {
            let pa = load_pairs(ctx, a, &p.refs)?;
            let pb = load_pairs(ctx, b, &p.refs)?;
            Ok(Paired::Hyps(pa, pb))
        }
        _ => usage("give either --scores-a and --scores-b, or --hyp-a, --hyp-b and --ref"),
    }
}

fn wilcoxon(ctx: &mut Context, a: &WilcoxonArgs) -> anyhow::Result<()> {
    let (sa, sb) = match load_paired(ctx, &a.inputs)? {
        Paired::Scores(x, y) => (x, y),
        Paired::Hyps(x, y) => (sentence_scores(&x, a.metric)?, sentence_scores(&y, a.metric)?),
    };
    let method = match a.method {
        MethodArg::Auto => WilcoxonMethod::Auto,
        MethodArg::Exact => WilcoxonMethod::Exact,
        MethodArg::Normal => WilcoxonMethod::Normal,
    };
    let r = wilcoxon_signed_rank(&sa, &sb, method)?;
    ctx.stat(json!({"stage": "eval", "test": "wilcoxon", "items": sa.len(), "nonzero": r.n}));
    let mut value = serde_json::to_value(&r)?;
    value["test"] = json!("wilcoxon-signed-rank");
    write_json(ctx, a.output.as_deref(), &value)
}

fn bootstrap(ctx: &mut Context, a: &BootstrapArgs) -> anyhow::Result<()> {
    let seed = ctx.seed();
    let paired = load_paired(ctx, &a.inputs)?;
    let result = match (a.test, paired) {
        (BootstrapTest::Bleu, Paired::Hyps(x, y)) => {
            let opts = BootstrapOptions {
                iterations: a.iterations,
                doc_size: a.doc_size,
                seed,
                max_n: a.max_n,
                ..BootstrapOptions::default()
            };
            bootstrap_bleu_significance(&x, &y, &opts)?
        }
        (BootstrapTest::Bleu, Paired::Scores(..)) => return usage("--test bleu needs --hyp-a, --hyp-b and --ref"),
        (BootstrapTest::Mean, Paired::Scores(x, y)) => paired_bootstrap_mean(&x, &y, a.iterations, seed)?,
        (BootstrapTest::Mean, Paired::Hyps(x, y)) => {
            let (sx, sy) = (sentence_scores(&x, a.metric)?, sentence_scores(&y, a.metric)?);
            paired_bootstrap_mean(&sx, &sy, a.iterations, seed)?
        }
    };
    ctx.stat(
        json!({"stage": "eval", "test": result.test, "iterations": result.iterations, "documents": result.documents}),
    );
    write_json(ctx, a.output.as_deref(), &result)
}
