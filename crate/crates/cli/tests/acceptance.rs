//! Acceptance suite. Each criterion runs in isolation and prints one
//! PASS/FAIL line; the process fails if any criterion fails.
//!
//! Every expected value comes from an oracle written here, independent of
//! the library code it checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lrtk::codeswitch::{apply_code_switch_traced, CodeSwitchLexicon, CodeSwitchOptions};
use lrtk::corpus::{normalize, Lang, MonoCorpus, ParallelCorpus, Provenance};
use lrtk::data;
use lrtk::metrics::{bleu, cer, chrfpp, wilcoxon_signed_rank, ChrfParams, EvalPair, Smoothing, WilcoxonMethod};
use lrtk::pipeline::{
    build, build_schedule, build_synth_mix1, build_synth_mix2, build_synth_mono, validate_dataset, IdentityTranslator,
    Lineage, Manifest, ScheduleSpec, SynthBitext, TranslateError, Translator,
};
use lrtk::syntree::{ParseTree, SyntaxRuleSet};
use lrtk::translit::RewriteRuleSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let checks: [(&str, Check); 8] = [
        ("metric oracles (CER exhaustive, BLEU, chrF++)", criterion_1),
        ("Wilcoxon exact vs enumeration, normal approximation", criterion_2),
        ("rewrite engine semantics and unité pair", criterion_3),
        ("phone-sum invariants and cognate neighbors", criterion_4),
        ("tree engine yield conservation and Table 1 order", criterion_5),
        ("synthetic constructions, 30-set schedule, reproducibility", criterion_6),
        ("code-switching replaced set and token counts", criterion_7),
        ("end-to-end pipeline build smoke test", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} [{detail}] ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lang(code: &str) -> Lang {
    Lang::new(code).unwrap()
}

// ---------------------------------------------------------------- 1

/// Edit distance by the recursive definition, memoized on suffix offsets.
fn edit_distance_oracle(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut [Option<usize>]) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        let key = i * (b.len() + 1) + j;
        if let Some(d) = memo[key] {
            return d;
        }
        let sub = go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
        let del = go(a, b, i + 1, j, memo) + 1;
        let ins = go(a, b, i, j + 1, memo) + 1;
        let d = sub.min(del).min(ins);
        memo[key] = Some(d);
        d
    }
    let mut memo = vec![None; (a.len() + 1) * (b.len() + 1)];
    go(a, b, 0, 0, &mut memo)
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion_1() -> Result<String, String> {
    let mut spent = Duration::ZERO;
    let strings = all_strings(&['a', 'b', 'c'], 6);
    ensure!(strings.len() == 1093, "expected 1093 strings, got {}", strings.len());
    let chars: Vec<Vec<char>> = strings.iter().map(|s| s.chars().collect()).collect();
    let mut compared = 0usize;
    for (ri, r) in strings.iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        let pairs: Vec<EvalPair> = strings.iter().map(|h| EvalPair::new(h, &[r])).collect();
        let t = Instant::now();
        let report = cer(&pairs).map_err(|e| e.to_string())?;
        spent += t.elapsed();
        let mut edits = 0usize;
        for (hi, got) in report.per_sentence.iter().enumerate() {
            let d = edit_distance_oracle(&chars[hi], &chars[ri]);
            edits += d;
            let want = 100.0 * d as f64 / r.len() as f64;
            ensure!(*got == want, "CER({:?}, {:?}) = {got}, oracle {want}", strings[hi], r);
            compared += 1;
        }
        let want = 100.0 * edits as f64 / (r.len() * strings.len()) as f64;
        ensure!(
            (report.score - want).abs() < 1e-9,
            "corpus CER for ref {r:?}: {} vs {want}",
            report.score
        );
    }

    // BLEU, hand-computed
    let same = [
        EvalPair::new("li pa tap panse dèsann", &["li pa tap panse dèsann"]),
        EvalPair::new("kay li pou rann li liv la", &["kay li pou rann li liv la"]),
    ];
    let b = bleu(&same, 4, Smoothing::None).map_err(|e| e.to_string())?.score;
    ensure!((b - 100.0).abs() < 1e-6, "identical corpus BLEU {b}");
    let b = bleu(&[EvalPair::new("the the the the", &["the cat"])], 4, Smoothing::None)
        .map_err(|e| e.to_string())?
        .score;
    ensure!(b.abs() < 1e-6, "clipped-precision example BLEU {b}, want 0");
    // all precisions 1; BP = exp(1 - 5/4)
    let want = 100.0 * (1.0f64 - 5.0 / 4.0).exp();
    let b = bleu(
        &[EvalPair::new("li pa tap panse", &["li pa tap panse dèsann"])],
        4,
        Smoothing::None,
    )
    .map_err(|e| e.to_string())?
    .score;
    ensure!((b - want).abs() < 1e-6, "brevity example BLEU {b}, want {want}");

    let c = chrfpp(&same, ChrfParams::default()).map_err(|e| e.to_string())?.score;
    ensure!(c == 100.0, "chrF++ identity {c}");
    let c = chrfpp(&[EvalPair::new("abc def", &["xyz uvw"])], ChrfParams::default())
        .map_err(|e| e.to_string())?
        .score;
    ensure!(c == 0.0, "chrF++ disjoint {c}");

    ensure!(spent < Duration::from_secs(60), "CER over all pairs took {spent:?}");
    Ok(format!(
        "{compared} CER pairs, library time {:.1}s",
        spent.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 2

/// Two-sided exact p by listing all 2^n sign assignments. Ranks are
/// doubled so ties stay integral.
fn wilcoxon_enumeration(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let mut abs: Vec<(f64, usize)> = d.iter().map(|x| x.abs()).zip(0..).collect();
    abs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut rank2 = vec![0u64; d.len()];
    let mut i = 0;
    while i < abs.len() {
        let mut j = i;
        while j + 1 < abs.len() && abs[j + 1].0 == abs[i].0 {
            j += 1;
        }
        // average of ranks i+1..=j+1, doubled
        let r2 = (i + 1 + j + 1) as u64;
        for item in &abs[i..=j] {
            rank2[item.1] = r2;
        }
        i = j + 1;
    }
    let n = d.len();
    let observed: u64 = (0..n).filter(|&k| d[k] > 0.0).map(|k| rank2[k]).sum();
    let total: u64 = rank2.iter().sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: u64 = (0..n).filter(|&k| mask & (1 << k) != 0).map(|k| rank2[k]).sum();
        le += u64::from(w <= observed);
        ge += u64::from(w >= observed);
    }
    let all = (1u64 << n) as f64;
    let p = (2.0 * le.min(ge) as f64 / all).min(1.0);
    let stat = observed.min(total - observed) as f64 / 2.0;
    (p, stat)
}

fn criterion_2() -> Result<String, String> {
    let mut g = rng(2);
    let mut max_exact_err = 0.0f64;
    for sample in 0..100 {
        let n = g.gen_range(6..=12);
        let a: Vec<f64> = (0..n).map(|_| f64::from(g.gen_range(0..20))).collect();
        // integer offsets give ties; never zero so n is exact
        let b: Vec<f64> = a
            .iter()
            .map(|x| {
                let mut off = g.gen_range(-4..=4);
                if off == 0 {
                    off = 5;
                }
                x + f64::from(off)
            })
            .collect();
        let (p, stat) = wilcoxon_enumeration(&a, &b);
        let r = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Exact).map_err(|e| e.to_string())?;
        ensure!(r.n == n, "sample {sample}: n {} vs {n}", r.n);
        ensure!(
            r.statistic == stat,
            "sample {sample}: statistic {} vs {stat}",
            r.statistic
        );
        max_exact_err = max_exact_err.max((r.p_value - p).abs());
        ensure!(
            (r.p_value - p).abs() < 1e-12,
            "sample {sample}: exact p {} vs enumeration {p}",
            r.p_value
        );
    }
    let mut max_normal_err = 0.0f64;
    for sample in 0..100 {
        let a: Vec<f64> = (0..12).map(|_| g.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..12).map(|_| g.gen_range(0.0..1.0)).collect();
        let (p, _) = wilcoxon_enumeration(&a, &b);
        let r = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Normal).map_err(|e| e.to_string())?;
        let err = (r.p_value - p).abs();
        max_normal_err = max_normal_err.max(err);
        ensure!(err < 1e-3, "sample {sample}: normal p {} vs exact {p}", r.p_value);
    }
    Ok(format!("max |normal - exact| = {max_normal_err:.2e}"))
}

// ---------------------------------------------------------------- 3

#[derive(Debug, Clone)]
enum Ctx {
    Boundary,
    Lit(String),
    Class(Vec<char>),
}

#[derive(Debug, Clone)]
struct OracleRule {
    pattern: Vec<char>,
    replacement: String,
    left: Option<Ctx>,
    right: Option<Ctx>,
}

const CLASS_V: (&str, &[char]) = ("V", &['a', 'b']);
const CLASS_K: (&str, &[char]) = ("K", &['c', 'd']);

fn ctx_text(c: &Ctx) -> String {
    match c {
        Ctx::Boundary => "#".into(),
        Ctx::Lit(s) => s.clone(),
        Ctx::Class(m) if m == CLASS_V.1 => format!("::{}::", CLASS_V.0),
        Ctx::Class(_) => format!("::{}::", CLASS_K.0),
    }
}

fn rule_file(rules: &[OracleRule]) -> String {
    let mut out = format!("::{}:: = a b\n::{}:: = c d\n", CLASS_V.0, CLASS_K.0);
    for r in rules {
        let pat: String = r.pattern.iter().collect();
        let rep = if r.replacement.is_empty() {
            "0".to_string()
        } else {
            r.replacement.clone()
        };
        out.push_str(&format!("{pat} -> {rep}"));
        if r.left.is_some() || r.right.is_some() {
            let l = r.left.as_ref().map(ctx_text).unwrap_or_default();
            let rr = r.right.as_ref().map(ctx_text).unwrap_or_default();
            out.push_str(format!(" / {l} _ {rr}").replace("  ", " ").trim_end());
        }
        out.push('\n');
    }
    out
}

fn left_ok(c: &Option<Ctx>, tok: &[char], pos: usize) -> bool {
    match c {
        None => true,
        Some(Ctx::Boundary) => pos == 0,
        Some(Ctx::Lit(s)) => {
            let s: Vec<char> = s.chars().collect();
            tok[..pos].ends_with(&s)
        }
        Some(Ctx::Class(m)) => pos > 0 && m.contains(&tok[pos - 1]),
    }
}

fn right_ok(c: &Option<Ctx>, tok: &[char], end: usize) -> bool {
    match c {
        None => true,
        Some(Ctx::Boundary) => end == tok.len(),
        Some(Ctx::Lit(s)) => {
            let s: Vec<char> = s.chars().collect();
            tok[end..].starts_with(&s)
        }
        Some(Ctx::Class(m)) => end < tok.len() && m.contains(&tok[end]),
    }
}

/// One pass per token: longest pattern wins, then lowest index; contexts
/// see the original token; output is never rescanned.
fn rewrite_oracle(rules: &[OracleRule], input: &str) -> String {
    input
        .split(' ')
        .map(|token| {
            let tok: Vec<char> = token.chars().collect();
            let mut out = String::new();
            let mut pos = 0;
            while pos < tok.len() {
                let mut best: Option<(usize, usize)> = None;
                for (i, r) in rules.iter().enumerate() {
                    let end = pos + r.pattern.len();
                    if end <= tok.len()
                        && tok[pos..end] == r.pattern[..]
                        && left_ok(&r.left, &tok, pos)
                        && right_ok(&r.right, &tok, end)
                        && best.is_none_or(|(_, l)| r.pattern.len() > l)
                    {
                        best = Some((i, r.pattern.len()));
                    }
                }
                match best {
                    Some((i, l)) => {
                        out.push_str(&rules[i].replacement);
                        pos += l;
                    }
                    None => {
                        out.push(tok[pos]);
                        pos += 1;
                    }
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn random_word(g: &mut ChaCha8Rng, alphabet: &[char], min: usize, max: usize) -> String {
    let n = g.gen_range(min..=max);
    (0..n).map(|_| *alphabet.choose(g).unwrap()).collect()
}

fn random_ctx(g: &mut ChaCha8Rng) -> Option<Ctx> {
    match g.gen_range(0..6) {
        0 => Some(Ctx::Boundary),
        1 => Some(Ctx::Lit(random_word(g, &['a', 'b', 'c', 'd'], 1, 2))),
        2 => Some(Ctx::Class(CLASS_V.1.to_vec())),
        3 => Some(Ctx::Class(CLASS_K.1.to_vec())),
        _ => None,
    }
}

fn criterion_3() -> Result<String, String> {
    const ABCD: &[char] = &['a', 'b', 'c', 'd'];
    let mut g = rng(3);
    for case in 0..10_000 {
        // random rule set against the oracle
        let n_rules = g.gen_range(0..=6);
        let rules: Vec<OracleRule> = (0..n_rules)
            .map(|_| OracleRule {
                pattern: random_word(&mut g, ABCD, 1, 3).chars().collect(),
                replacement: random_word(&mut g, &['a', 'b', 'x', 'y'], 0, 3),
                left: random_ctx(&mut g),
                right: random_ctx(&mut g),
            })
            .collect();
        let text = rule_file(&rules);
        let set = RewriteRuleSet::parse(&text).map_err(|e| format!("case {case}: {e}\n{text}"))?;
        let words: Vec<String> = (0..g.gen_range(1..=3))
            .map(|_| random_word(&mut g, ABCD, 1, 6))
            .collect();
        let input = words.join(" ");
        let want = rewrite_oracle(&rules, &input);
        let got = set.apply(&input);
        ensure!(
            got == want,
            "case {case}: {input:?} -> {got:?}, oracle {want:?}\n{text}"
        );

        // no cascade: x -> y, y -> z maps each character once
        let mut letters = ['a', 'b', 'c', 'd', 'e'];
        letters.shuffle(&mut g);
        let (x, y, z) = (letters[0], letters[1], letters[2]);
        let chain = RewriteRuleSet::parse(&format!("{x} -> {y}\n{y} -> {z}")).map_err(|e| e.to_string())?;
        let s = random_word(&mut g, &[x, y], 1, 8);
        let want: String = s.chars().map(|c| if c == x { y } else { z }).collect();
        ensure!(chain.apply(&s) == want, "cascade on {s:?} with {x}->{y}->{z}");

        // leftmost-longest regardless of file order
        let long = random_word(&mut g, ABCD, 2, 4);
        let short: String = long.chars().take(g.gen_range(1..long.chars().count())).collect();
        let file = if g.gen_bool(0.5) {
            format!("{short} -> y\n{long} -> x")
        } else {
            format!("{long} -> x\n{short} -> y")
        };
        let ll = RewriteRuleSet::parse(&file).map_err(|e| e.to_string())?;
        ensure!(ll.apply(&long) == "x", "longest match lost on {long:?} with\n{file}");

        // identity
        let s = random_word(&mut g, &['a', 'b', 'é', 'ç', 'z'], 0, 8);
        ensure!(RewriteRuleSet::empty().apply(&s) == s, "empty rule set changed {s:?}");

        // boundary-anchored rules never fire inside a token
        let p = random_word(&mut g, ABCD, 1, 2);
        let anchored = RewriteRuleSet::parse(&format!("{p} -> X / # _")).map_err(|e| e.to_string())?;
        for w in &words {
            let out = anchored.apply(w);
            let want = match w.strip_prefix(p.as_str()) {
                Some(rest) => format!("X{rest}"),
                None => w.clone(),
            };
            ensure!(out == want, "anchored {p:?} on {w:?} gave {out:?}");
        }
    }
    let fra_hat = data::fra_hat_rules().apply("unité");
    ensure!(fra_hat == "inite", "fra_hat(unité) = {fra_hat:?}");
    let fra_ipa = data::fra_ipa_rules().apply("unité");
    ensure!(fra_ipa == "ynite", "fra_ipa(unité) = {fra_ipa:?}");
    Ok("10000 cases; unité -> inite, ynite".into())
}

// ---------------------------------------------------------------- 4

/// The feature table read straight from CSV: `+` = 1, `-` = -1, `0` = 0.
fn table_oracle() -> HashMap<String, Vec<i32>> {
    let text = data::builtin("features.csv").unwrap();
    let mut rows = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    rows.next();
    rows.map(|l| {
        let mut cells = l.split(',');
        let seg = cells.next().unwrap().to_string();
        let v = cells
            .map(|c| match c.trim() {
                "+" => 1,
                "-" => -1,
                _ => 0,
            })
            .collect();
        (seg, v)
    })
    .collect()
}

fn add(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn criterion_4() -> Result<String, String> {
    let table = data::feature_table();
    let oracle = table_oracle();
    ensure!(
        oracle.len() == table.len(),
        "table sizes {} vs {}",
        oracle.len(),
        table.len()
    );
    let mut segments: Vec<&String> = oracle.keys().collect();
    segments.sort();
    let dim = table.dim();
    let mut g = rng(4);
    for case in 0..10_000 {
        let phones: Vec<&str> = (0..g.gen_range(1..=8))
            .map(|_| segments.choose(&mut g).unwrap().as_str())
            .collect();
        let s = phones.join(" ");
        let e = table.embed_ipa(&s).vector;
        let want = phones.iter().fold(vec![0; dim], |acc, p| add(&acc, &oracle[*p]));
        ensure!(e == want, "case {case}: {s:?} sum mismatch");
        let mut shuffled = phones.clone();
        shuffled.shuffle(&mut g);
        let e2 = table.embed_ipa(&shuffled.join(" ")).vector;
        ensure!(
            e2 == e,
            "case {case}: anagram {:?} of {s:?} differs",
            shuffled.join(" ")
        );
        let other: Vec<&str> = (0..g.gen_range(1..=4))
            .map(|_| segments.choose(&mut g).unwrap().as_str())
            .collect();
        let t = other.join(" ");
        let joint = table.embed_ipa(&format!("{s} {t}")).vector;
        ensure!(
            joint == add(&e, &table.embed_ipa(&t).vector),
            "case {case}: not additive over {s:?} + {t:?}"
        );
    }

    // cognates: brute-force euclidean scan, ties by word
    let fra_g2p = data::fra_ipa_rules();
    let hat_g2p = data::hat_ipa_rules();
    let pairs = data::cognates_fra_hat();
    ensure!(pairs.len() == 20, "{} cognate pairs", pairs.len());
    let pool: Vec<(&str, Vec<i32>)> = pairs
        .iter()
        .map(|(_, h)| (*h, table.embed_ipa(&hat_g2p.apply(h)).vector))
        .collect();
    let mut hits = 0;
    let mut misses = Vec::new();
    for (f, h) in &pairs {
        let q = table.embed_ipa(&fra_g2p.apply(f)).vector;
        let dist = |v: &[i32]| -> f64 {
            q.iter()
                .zip(v)
                .map(|(a, b)| f64::from(a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let best = pool
            .iter()
            .min_by(|a, b| dist(&a.1).partial_cmp(&dist(&b.1)).unwrap().then(a.0.cmp(b.0)))
            .unwrap();
        if best.0 == *h {
            hits += 1;
        } else {
            misses.push(format!("{f}->{}", best.0));
        }
    }
    ensure!(hits == 20, "{hits}/20 top-1 matches; misses: {}", misses.join(", "));
    Ok("10000 strings; cognates 20/20".into())
}

// ---------------------------------------------------------------- 5

#[derive(Debug, Clone, PartialEq)]
enum T {
    Leaf(String, String),
    Node(String, Vec<T>),
}

impl T {
    fn label(&self) -> &str {
        match self {
            T::Leaf(l, _) | T::Node(l, _) => l,
        }
    }

    fn render(&self) -> String {
        match self {
            T::Leaf(l, w) => format!("({l} {w})"),
            T::Node(l, cs) => format!("({l} {})", cs.iter().map(T::render).collect::<Vec<_>>().join(" ")),
        }
    }

    fn tokens(&self, out: &mut Vec<String>) {
        match self {
            T::Leaf(_, w) => out.push(w.clone()),
            T::Node(_, cs) => cs.iter().for_each(|c| c.tokens(out)),
        }
    }
}

struct Reorder {
    parent: String,
    children: Vec<String>,
    perm: Vec<usize>,
}

fn reorder_oracle(rules: &[Reorder], t: &T) -> T {
    match t {
        T::Leaf(..) => t.clone(),
        T::Node(l, cs) => {
            let labels: Vec<&str> = cs.iter().map(T::label).collect();
            let cs: Vec<T> = match rules.iter().find(|r| &r.parent == l && r.children == labels) {
                Some(r) => r.perm.iter().map(|&i| cs[i].clone()).collect(),
                None => cs.clone(),
            };
            T::Node(l.clone(), cs.iter().map(|c| reorder_oracle(rules, c)).collect())
        }
    }
}

fn random_tree(g: &mut ChaCha8Rng, depth: usize, next: &mut usize) -> T {
    const LABELS: [&str; 4] = ["A", "B", "C", "D"];
    let label = LABELS.choose(g).unwrap().to_string();
    if depth == 0 || g.gen_bool(0.3) {
        *next += 1;
        return T::Leaf(label, format!("w{next}"));
    }
    let n = g.gen_range(1..=3);
    T::Node(label, (0..n).map(|_| random_tree(g, depth - 1, next)).collect())
}

fn criterion_5() -> Result<String, String> {
    const LABELS: [&str; 4] = ["A", "B", "C", "D"];
    let mut g = rng(5);
    for case in 0..1000 {
        let rules: Vec<Reorder> = (0..g.gen_range(1..=5))
            .map(|_| {
                let k = g.gen_range(1..=3);
                let children: Vec<String> = (0..k).map(|_| LABELS.choose(&mut g).unwrap().to_string()).collect();
                let mut perm: Vec<usize> = (0..k).collect();
                perm.shuffle(&mut g);
                Reorder {
                    parent: LABELS.choose(&mut g).unwrap().to_string(),
                    children,
                    perm,
                }
            })
            .collect();
        let text: String = rules
            .iter()
            .map(|r| {
                let pat: Vec<String> = r
                    .children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{c}=v{i}"))
                    .collect();
                let tpl: Vec<String> = r.perm.iter().map(|i| format!("v{i}")).collect();
                format!("{}: {} => {}\n", r.parent, pat.join(" "), tpl.join(" "))
            })
            .collect();
        let set = SyntaxRuleSet::parse(&text).map_err(|e| format!("case {case}: {e}\n{text}"))?;
        ensure!(
            set.rules().iter().all(|r| r.is_pure_reorder()),
            "case {case}: rules not pure reorders"
        );
        let mut counter = 0;
        let tree = random_tree(&mut g, 4, &mut counter);
        let parsed = ParseTree::parse(&tree.render()).map_err(|e| e.to_string())?;
        let out = set.apply(&parsed).ok_or("pure reorder deleted the tree")?;
        let want = reorder_oracle(&rules, &tree);
        ensure!(
            out.to_string() == want.render(),
            "case {case}: {} vs oracle {}",
            out,
            want.render()
        );
        let mut before = Vec::new();
        tree.tokens(&mut before);
        let mut after: Vec<String> = out.tokens().iter().map(|s| s.to_string()).collect();
        ensure!(after.len() == before.len(), "case {case}: leaf count changed");
        before.sort();
        after.sort();
        ensure!(after == before, "case {case}: yield multiset changed");
    }
    let np = SyntaxRuleSet::parse("NP: D=d N=n => n d").map_err(|e| e.to_string())?;
    // the shipped rules, without their leaf lexicon
    let shipped = SyntaxRuleSet::parse(data::builtin("fra_hat.syn").unwrap()).map_err(|e| e.to_string())?;
    for set in [&np, &shipped] {
        for (tree, want) in [
            ("(NP (D le) (N livre))", "livre le"),
            ("(NP (D ce) (N matin))", "matin ce"),
        ] {
            let t = ParseTree::parse(tree).map_err(|e| e.to_string())?;
            let got = set.apply(&t).unwrap().yield_string();
            ensure!(got == want, "{tree} -> {got:?}, want {want:?}");
        }
    }
    Ok("1000 trees; livre le, matin ce".into())
}

// ---------------------------------------------------------------- 6

struct Reverse;

impl Translator for Reverse {
    fn name(&self) -> String {
        "reverse".into()
    }
    fn translate(&self, lines: &[String], _: &Lang, _: &Lang) -> Result<Vec<String>, TranslateError> {
        Ok(lines
            .iter()
            .map(|l| l.split(' ').rev().collect::<Vec<_>>().join(" "))
            .collect())
    }
}

struct Suffix;

impl Translator for Suffix {
    fn name(&self) -> String {
        "suffix".into()
    }
    fn translate(&self, lines: &[String], _: &Lang, _: &Lang) -> Result<Vec<String>, TranslateError> {
        Ok(lines
            .iter()
            .map(|l| l.split(' ').map(|w| format!("{w}-x")).collect::<Vec<_>>().join(" "))
            .collect())
    }
}

fn texts(c: &ParallelCorpus) -> Vec<(String, String)> {
    c.pairs()
        .iter()
        .map(|(s, t)| (s.text().to_string(), t.text().to_string()))
        .collect()
}

fn rev(s: &str) -> String {
    s.split(' ').rev().collect::<Vec<_>>().join(" ")
}

fn suf(s: &str) -> String {
    s.split(' ').map(|w| format!("{w}-x")).collect::<Vec<_>>().join(" ")
}

fn synth(prov: Provenance, n: usize, src: &str) -> SynthBitext {
    let s: Vec<String> = (0..n).map(|i| format!("{src} {i}")).collect();
    let t: Vec<String> = (0..n).map(|i| format!("eng {src} {i}")).collect();
    SynthBitext {
        corpus: ParallelCorpus::from_lines(lang("hat"), lang("eng"), &s, &t, prov).unwrap(),
        lineage: Lineage {
            provenance: prov,
            source_corpus: src.into(),
            translators: vec!["identity".into()],
            chain: vec![lang("eng"), lang("hat")],
        },
    }
}

fn criterion_6() -> Result<String, String> {
    let (eng, fra, hat) = (lang("eng"), lang("fra"), lang("hat"));
    let mono_lines: Vec<String> = (0..50)
        .map(|i| format!("the {i} morning book house {}", i % 7))
        .collect();
    let mono = MonoCorpus::from_lines(eng.clone(), &mono_lines).unwrap();
    let fra_src: Vec<String> = (0..40).map(|i| format!("le livre {i} ce matin")).collect();
    let fra_tgt: Vec<String> = (0..40).map(|i| format!("the book {i} this morning")).collect();
    let bitext =
        ParallelCorpus::from_lines(fra.clone(), eng.clone(), &fra_src, &fra_tgt, Provenance::Authentic).unwrap();
    let e = |e: lrtk::pipeline::PipelineError| e.to_string();

    let m = build_synth_mono(&mono, "mono", &IdentityTranslator, &hat, 7).map_err(e)?;
    let want: Vec<_> = mono_lines.iter().map(|x| (x.clone(), x.clone())).collect();
    ensure!(texts(&m.corpus) == want, "synth_mono with identity is not (x, x)");
    ensure!(
        m.corpus.source_lang() == &hat && m.corpus.target_lang() == &eng,
        "synth_mono languages"
    );
    let m = build_synth_mono(&mono, "mono", &Reverse, &hat, 7).map_err(e)?;
    let want: Vec<_> = mono_lines.iter().map(|x| (rev(x), x.clone())).collect();
    ensure!(texts(&m.corpus) == want, "synth_mono is not (t(x), x)");
    ensure!(m.provenance() == Provenance::SynthMono, "synth_mono provenance");

    let x1 = build_synth_mix1(&bitext, "fra_eng", &Suffix, &hat, 3).map_err(e)?;
    let want: Vec<_> = fra_src.iter().zip(&fra_tgt).map(|(h, t)| (suf(h), t.clone())).collect();
    ensure!(texts(&x1.corpus) == want, "synth_mix1 is not (t(hrl), tgt)");
    ensure!(x1.provenance() == Provenance::SynthMix1, "synth_mix1 provenance");

    let x2 = build_synth_mix2(&mono, "mono", &Reverse, &fra, &Suffix, &hat, 5).map_err(e)?;
    let want: Vec<_> = mono_lines.iter().map(|x| (suf(&rev(x)), x.clone())).collect();
    ensure!(texts(&x2.corpus) == want, "synth_mix2 is not (t2(t1(x)), x)");
    ensure!(x2.provenance() == Provenance::SynthMix2, "synth_mix2 provenance");
    ensure!(
        x2.lineage.chain == vec![eng.clone(), fra.clone(), hat.clone()],
        "synth_mix2 chain"
    );
    let via_id = build_synth_mix2(&mono, "mono", &IdentityTranslator, &fra, &Reverse, &hat, 5).map_err(e)?;
    ensure!(
        texts(&via_id.corpus) == texts(&m.corpus),
        "mix2 through an identity pivot differs from mono"
    );

    // paper-scale schedule, checked on indices
    let starts = [5_000usize, 25_000, 189_182];
    let incs = [5_000usize, 25_000, 200_000];
    let auth_s: Vec<String> = (0..189_182).map(|i| format!("hat {i}")).collect();
    let auth_t: Vec<String> = (0..189_182).map(|i| format!("eng {i}")).collect();
    let authentic =
        ParallelCorpus::from_lines(hat.clone(), eng.clone(), &auth_s, &auth_t, Provenance::Authentic).unwrap();
    let synths = vec![
        synth(Provenance::SynthMono, 200_000, "mono"),
        synth(Provenance::SynthMix1, 200_000, "mix1"),
        synth(Provenance::SynthMix2, 200_000, "mix2"),
    ];
    let spec = ScheduleSpec {
        starts: starts.to_vec(),
        increments: incs.to_vec(),
    };
    let sched = build_schedule(&spec, &authentic, &synths, 11).map_err(e)?;
    let mut want = Vec::new();
    for s in starts {
        want.push((s, 0, 0, 0));
        want.extend(incs.iter().map(|&i| (s, i, 0, 0)));
        want.extend(incs.iter().map(|&i| (s, 200_000, i, 0)));
        want.extend(incs.iter().map(|&i| (s, 200_000, 200_000, i)));
    }
    let got: Vec<_> = sched
        .sets()
        .iter()
        .map(|t| (t.authentic, t.synth_mono, t.synth_mix1, t.synth_mix2))
        .collect();
    ensure!(got.len() == 30, "{} sets, want 30", got.len());
    ensure!(got == want, "set composition differs from the plan");
    let names: BTreeSet<&str> = sched.sets().iter().map(|s| s.name.as_str()).collect();
    ensure!(names.len() == 30, "set names are not unique");
    let sizes = [189_182usize, 200_000, 200_000, 200_000];
    let mut prev: Option<[Vec<usize>; 4]> = None;
    let mut prev_track = usize::MAX;
    for set in sched.sets() {
        let (a, mo, x1, x2) = (set.authentic, set.synth_mono, set.synth_mix1, set.synth_mix2);
        ensure!(set.len() == a + mo + x1 + x2, "{}: length", set.name);
        let idx = sched.indices(set);
        let counts = [a, mo, x1, x2];
        for k in 0..4 {
            ensure!(
                idx[k].len() == counts[k],
                "{}: part {k} has {} indices",
                set.name,
                idx[k].len()
            );
            let distinct: BTreeSet<usize> = idx[k].iter().copied().collect();
            ensure!(distinct.len() == idx[k].len(), "{}: repeated pairs", set.name);
            ensure!(idx[k].iter().all(|&i| i < sizes[k]), "{}: index out of range", set.name);
        }
        if set.track == prev_track {
            let p = prev.as_ref().unwrap();
            for k in 0..4 {
                ensure!(
                    idx[k].starts_with(&p[k]),
                    "{}: part {k} does not extend the previous stage",
                    set.name
                );
            }
        }
        prev = Some(idx.map(|s| s.to_vec()));
        prev_track = set.track;
    }
    // authentic slices nest across starts too
    let first = |s: usize| sched.indices(sched.sets().iter().find(|t| t.authentic == s).unwrap())[0].to_vec();
    ensure!(
        first(25_000).starts_with(&first(5_000)),
        "5K start is not inside the 25K start"
    );
    ensure!(
        first(189_182).starts_with(&first(25_000)),
        "25K start is not inside the 189K start"
    );

    // byte-identical rebuilds of a small 3 x 10 manifest
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_toy_corpora(dir.path(), 400);
    fs::write(
        dir.path().join("m.toml"),
        manifest_toml("[10, 40, 400]", "[10, 20, 50]"),
    )
    .unwrap();
    let manifest = Manifest::load(&dir.path().join("m.toml")).map_err(e)?;
    let r1 = build(&manifest, dir.path(), None).map_err(e)?;
    let snap1 = snapshot(&r1.output_dir);
    fs::remove_dir_all(&r1.output_dir).unwrap();
    let r2 = build(&manifest, dir.path(), None).map_err(e)?;
    let snap2 = snapshot(&r2.output_dir);
    ensure!(snap1 == snap2, "rebuild under the same seed is not byte-identical");
    let sets = r1
        .datasets
        .iter()
        .filter(|d| d.name.starts_with('s') && !d.name.starts_with("synth"))
        .count();
    ensure!(sets == 30, "{sets} schedule datasets written, want 30");
    let r3 = build(&manifest, dir.path(), Some(99)).map_err(e)?;
    ensure!(
        snapshot(&r3.output_dir) != snap1,
        "a different seed produced identical output"
    );
    Ok(format!("30 sets, {} files byte-identical", snap1.len()))
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
    }
    out
}

const FRA_WORDS: &[&str] = &[
    "elle",
    "ne",
    "pensait",
    "pas",
    "descendre",
    "de",
    "sa",
    "maison",
    "pour",
    "lui",
    "rendre",
    "le",
    "livre",
    "comme",
    "fait",
    "ce",
    "matin",
    "unité",
    "chat",
    "jour",
    "pain",
    "table",
    "porte",
    "lune",
    "jardin",
    "chemin",
];
const ENG_WORDS: &[&str] = &[
    "the", "water", "is", "cold", "she", "did", "not", "want", "to", "descend", "from", "her", "house", "give", "him",
    "book", "like", "this", "morning", "child", "little", "yard", "go", "eat",
];
const HAT_WORDS: &[&str] = &[
    "li", "pa", "tap", "panse", "kay", "liv", "la", "maten", "sa", "pou", "rann", "fè",
];

fn sentences(g: &mut ChaCha8Rng, words: &[&str], n: usize, tag: &str) -> String {
    let mut out = String::new();
    for i in 0..n {
        let k = g.gen_range(3..=9);
        let s: Vec<&str> = (0..k).map(|_| *words.choose(g).unwrap()).collect();
        // a per-line tag keeps lines distinct
        out.push_str(&format!("{} {tag}{i}\n", s.join(" ")));
    }
    out
}

fn write_toy_corpora(dir: &Path, n: usize) {
    let mut g = rng(6);
    fs::write(dir.join("hat.txt"), sentences(&mut g, HAT_WORDS, n, "n")).unwrap();
    fs::write(dir.join("hat_eng.txt"), sentences(&mut g, ENG_WORDS, n, "n")).unwrap();
    fs::write(dir.join("fra.txt"), sentences(&mut g, FRA_WORDS, n, "n")).unwrap();
    fs::write(dir.join("fra_eng.txt"), sentences(&mut g, ENG_WORDS, n, "n")).unwrap();
    fs::write(dir.join("eng.txt"), sentences(&mut g, ENG_WORDS, n, "n")).unwrap();
    fs::write(dir.join("eng_fra.rules"), "th -> d\nwa -> oua\nsh -> ch\nw -> ou\n").unwrap();
    fs::write(dir.join("eng_hat.rules"), "th -> d\nsh -> ch\nc -> k\ny -> i\n").unwrap();
}

fn manifest_toml(starts: &str, increments: &str) -> String {
    format!(
        r#"manifest_version = 1
seed = 5
output_dir = "out"

[corpora.hat_eng]
source = "hat.txt"
target = "hat_eng.txt"
source_lang = "hat"
target_lang = "eng"

[corpora.fra_eng]
source = "fra.txt"
target = "fra_eng.txt"
source_lang = "fra"
target_lang = "eng"

[corpora.eng_mono]
mono = "eng.txt"
lang = "eng"

[translators.eng_hat]
kind = "rules"
from = "eng"
to = "hat"
orthography = "eng_hat.rules"

[translators.eng_fra]
kind = "rules"
from = "eng"
to = "fra"
orthography = "eng_fra.rules"

[translators.fra_hat]
kind = "rules"
from = "fra"
to = "hat"
orthography = "builtin:fra_hat.rules"

[synth.mono]
corpus = "eng_mono"
translator = "eng_hat"

[synth.mix1]
corpus = "fra_eng"
translator = "fra_hat"

[synth.mix2]
corpus = "eng_mono"
translators = ["eng_fra", "fra_hat"]
pivot = "fra"

[schedule]
authentic = "hat_eng"
starts = {starts}
increments = {increments}

[[multisource]]
name = "hat_fra_eng"
parts = ["hat_eng", "fra_eng"]
"#
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Result<String, String> {
    let text = data::builtin("eng_jam.tsv").unwrap();
    let lexicon: HashMap<String, String> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (k, v) = l.split_once('\t').unwrap();
            (k.to_lowercase(), v.to_string())
        })
        .collect();
    let mut keys: Vec<&String> = lexicon.keys().collect();
    keys.sort();
    let fillers = [
        "the", "a", "of", "Boston", "runs", "water,", "quickly", "Zebra", "is", "and",
    ];
    let mut g = rng(7);
    let corpus: Vec<String> = (0..1000)
        .map(|_| {
            (0..g.gen_range(1..=12))
                .map(|_| {
                    let w = if g.gen_bool(0.4) {
                        keys.choose(&mut g).unwrap().to_string()
                    } else {
                        fillers.choose(&mut g).unwrap().to_string()
                    };
                    if g.gen_bool(0.2) {
                        let mut c = w.chars();
                        let f = c.next().unwrap();
                        f.to_uppercase().chain(c).collect()
                    } else {
                        w
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();

    // independent scan of which tokens match
    let mut matched = BTreeSet::new();
    for (i, s) in corpus.iter().enumerate() {
        for (j, tok) in s.split(' ').enumerate() {
            if lexicon.contains_key(&tok.to_lowercase()) {
                matched.insert((i, j));
            }
        }
    }

    let lex = CodeSwitchLexicon::parse("eng_jam", text).map_err(|e| e.to_string())?;
    let input: Vec<_> = corpus.iter().map(|s| normalize(s)).collect();
    let opts = CodeSwitchOptions {
        rate: 1.0,
        seed: 3,
        strip_punct: false,
    };
    let (out, stats, trace) = apply_code_switch_traced(&lex, &input, &opts).map_err(|e| e.to_string())?;
    let replaced: BTreeSet<(usize, usize)> = trace
        .iter()
        .enumerate()
        .flat_map(|(i, d)| {
            d.iter()
                .enumerate()
                .filter(|(_, t)| t.replaced)
                .map(move |(j, _)| (i, j))
        })
        .collect();
    ensure!(
        replaced == matched,
        "replaced set ({}) differs from matched set ({})",
        replaced.len(),
        matched.len()
    );
    ensure!(
        stats.replaced as usize == matched.len() && stats.matched == stats.replaced,
        "statistics disagree"
    );
    for (i, (src, dst)) in corpus.iter().zip(&out).enumerate() {
        let a: Vec<&str> = src.split(' ').collect();
        let b: Vec<&str> = dst.text().split(' ').collect();
        ensure!(
            a.len() == b.len(),
            "sentence {i}: token count {} -> {}",
            a.len(),
            b.len()
        );
        for (j, (x, y)) in a.iter().zip(&b).enumerate() {
            let want = match lexicon.get(&x.to_lowercase()) {
                Some(v) if x.chars().next().unwrap().is_uppercase() => {
                    let mut c = v.chars();
                    c.next().unwrap().to_uppercase().chain(c).collect()
                }
                Some(v) => v.clone(),
                None => x.to_string(),
            };
            ensure!(*y == want, "sentence {i} token {j}: {x:?} -> {y:?}, want {want:?}");
        }
    }
    Ok(format!("{} of {} tokens replaced", replaced.len(), stats.seen))
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_toy_corpora(dir.path(), 500);
    let manifest = dir.path().join("m.toml");
    fs::write(&manifest, manifest_toml("[50, 150, 500]", "[25, 50, 100]")).unwrap();
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lrtk"))
        .args(["--jobs", "1", "pipeline", "build", "--manifest"])
        .arg(&manifest)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");

    let out_dir = dir.path().join("out");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("build.json")).unwrap()).map_err(|e| e.to_string())?;
    let datasets = report["datasets"].as_array().ok_or("build.json has no datasets")?;
    ensure!(datasets.len() == 3 + 30 + 1, "{} datasets, want 34", datasets.len());
    for d in datasets {
        let name = d["name"].as_str().unwrap();
        let src = fs::read_to_string(out_dir.join(format!("{name}.src"))).unwrap();
        let tgt = fs::read_to_string(out_dir.join(format!("{name}.tgt"))).unwrap();
        let (s, t): (Vec<&str>, Vec<&str>) = (src.lines().collect(), tgt.lines().collect());
        ensure!(s.len() == t.len(), "{name}: {} vs {} lines", s.len(), t.len());
        ensure!(
            s.len() as u64 == d["pairs"].as_u64().unwrap(),
            "{name}: metadata pair count"
        );
        for line in s.iter().chain(&t) {
            ensure!(
                !line.is_empty() && line.trim() == *line && !line.contains("  "),
                "{name}: bad line {line:?}"
            );
        }
        validate_dataset(&out_dir, name).map_err(|e| format!("{name}: {e}"))?;
    }
    ensure!(out_dir.join("run.json").exists(), "no run record");
    Ok(format!("{} datasets in {:.1}s", datasets.len(), elapsed.as_secs_f64()))
}
