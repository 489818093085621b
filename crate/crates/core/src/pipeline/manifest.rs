//! Declarative dataset builds.
//!
//! A manifest is a TOML file:
//!
//! ```toml
//! manifest_version = 1
//! seed = 7
//! output_dir = "out"        # relative to the manifest
//! shuffle = true            # shuffle each training set (seeded)
//! batch_size = 256
//!
//! [corpora.hat_eng]         # two line-aligned files ...
//! source = "hat_eng.hat"
//! target = "hat_eng.eng"
//! source_lang = "hat"
//! target_lang = "eng"
//! genre = "broadcast"       # free text, copied into metadata
//!
//! [corpora.fra_eng]         # ... or one TSV file ...
//! tsv = "fra_eng.tsv"
//! source_lang = "fra"
//! target_lang = "eng"
//!
//! [corpora.eng_mono]        # ... or a monolingual file
//! mono = "eng.txt"
//! lang = "eng"
//!
//! [translators.fra_hat]
//! kind = "rules"            # identity | rules | command | http
//! from = "fra"
//! to = "hat"
//! orthography = "builtin:fra_hat.rules"
//!
//! [translators.eng_hat]
//! kind = "command"
//! program = "my-nmt"
//! args = ["--src", "{from}", "--tgt", "{to}"]
//!
//! [synth.mono]              # TGT mono -> LRL
//! corpus = "eng_mono"
//! translator = "eng_hat"
//!
//! [synth.mix1]              # HRL side of an HRL-TGT bitext -> LRL
//! corpus = "fra_eng"
//! translator = "fra_hat"
//!
//! [synth.mix2]              # TGT mono -> HRL -> LRL
//! corpus = "eng_mono"
//! translators = ["eng_fra", "fra_hat"]
//! pivot = "fra"
//!
//! [schedule]
//! authentic = "hat_eng"
//! starts = [5000, 25000]
//! increments = [5000, 25000, 200000]
//!
//! [[multisource]]
//! name = "hat_fra_eng"
//! parts = ["hat_eng", "fra_eng"]   # corpora or synth_mono/mix1/mix2
//! tag_sources = true
//! ```
//!
//! The low-resource language of every synthetic recipe is the source
//! language of the schedule's authentic corpus unless the recipe sets
//! `lrl`.
//!
//! Each dataset is written as `NAME.src`, `NAME.tgt` and `NAME.meta.json`
//! in the output directory, and `build.json` lists them all.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::multisource::assemble_multisource;
use super::schedule::{build_schedule, ScheduleSpec};
use super::synth::{build_synth_mix1, build_synth_mix2, build_synth_mono, Lineage, SynthBitext};
use super::translator::{CommandTranslator, HttpTranslator, IdentityTranslator, RuleTranslator, Translator};
use super::PipelineError;
use crate::corpus::{self, Lang, MonoCorpus, ParallelCorpus, Provenance, Side};
use crate::data::read_resource;
use crate::syntree::SyntaxRuleSet;
use crate::translit::RewriteRuleSet;

pub const MANIFEST_VERSION: u32 = 1;

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

fn default_batch() -> usize {
    super::synth::DEFAULT_BATCH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifest_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub shuffle: bool,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub corpora: BTreeMap<String, CorpusSpec>,
    #[serde(default)]
    pub translators: BTreeMap<String, TranslatorSpec>,
    #[serde(default)]
    pub synth: SynthSpecs,
    #[serde(default)]
    pub schedule: Option<ScheduleSection>,
    #[serde(default)]
    pub multisource: Vec<MultisourceSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub source: Option<String>,
    pub target: Option<String>,
    pub tsv: Option<String>,
    pub mono: Option<String>,
    pub source_lang: Option<Lang>,
    pub target_lang: Option<Lang>,
    pub lang: Option<Lang>,
    pub genre: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TranslatorSpec {
    Identity,
    Rules {
        from: Lang,
        to: Lang,
        orthography: Option<String>,
        syntax: Option<String>,
        lexicon: Option<String>,
    },
    Command {
        program: String,
        #[serde(default)]
        args: Vec<String>,
    },
    Http {
        url: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpecs {
    pub mono: Option<SynthRecipe>,
    pub mix1: Option<SynthRecipe>,
    pub mix2: Option<SynthRecipe>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthRecipe {
    pub corpus: String,
    pub translator: Option<String>,
    pub translators: Option<Vec<String>>,
    pub pivot: Option<Lang>,
    pub lrl: Option<Lang>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub authentic: String,
    pub starts: Vec<usize>,
    pub increments: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultisourceSpec {
    pub name: String,
    pub parts: Vec<String>,
    #[serde(default = "default_true")]
    pub tag_sources: bool,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let m: Manifest = toml::from_str(text).map_err(|e| PipelineError::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Manifest::parse(&text)
    }

    /// Check references and shapes without touching the filesystem.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Manifest(m));
        if self.manifest_version != MANIFEST_VERSION {
            return bad(format!(
                "unsupported manifest_version {} (expected {MANIFEST_VERSION})",
                self.manifest_version
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        for (name, c) in &self.corpora {
            match (c.kind(), c.langs()) {
                (Some(_), Some(_)) => {}
                (None, _) => return bad(format!("corpus {name}: give `source`+`target`, `tsv`, or `mono`")),
                (Some(k), None) => return bad(format!("corpus {name}: {k} corpus is missing its language codes")),
            }
        }
        let translator = |recipe: &str, t: &str| -> Result<(), PipelineError> {
            if self.translators.contains_key(t) {
                Ok(())
            } else {
                Err(PipelineError::Manifest(format!(
                    "synth.{recipe}: unknown translator {t:?}"
                )))
            }
        };
        let recipes = [
            ("mono", &self.synth.mono),
            ("mix1", &self.synth.mix1),
            ("mix2", &self.synth.mix2),
        ];
        for (recipe, r) in recipes {
            let Some(r) = r else { continue };
            let want_mono = recipe != "mix1";
            match self.corpora.get(&r.corpus) {
                None => return bad(format!("synth.{recipe}: unknown corpus {:?}", r.corpus)),
                Some(c) if c.is_mono() != want_mono => {
                    return bad(format!(
                        "synth.{recipe}: corpus {:?} must be {}",
                        r.corpus,
                        if want_mono { "monolingual" } else { "a bitext" }
                    ))
                }
                _ => {}
            }
            if recipe == "mix2" {
                match &r.translators {
                    Some(ts) if ts.len() == 2 => ts.iter().try_for_each(|t| translator(recipe, t))?,
                    _ => return bad("synth.mix2: `translators` must name exactly two translators".into()),
                }
                if r.pivot.is_none() {
                    return bad("synth.mix2: `pivot` language is required".into());
                }
            } else {
                match &r.translator {
                    Some(t) => translator(recipe, t)?,
                    None => return bad(format!("synth.{recipe}: `translator` is required")),
                }
            }
            if r.lrl.is_none() && self.schedule.is_none() {
                return bad(format!("synth.{recipe}: set `lrl` or declare a schedule"));
            }
        }
        if let Some(s) = &self.schedule {
            match self.corpora.get(&s.authentic) {
                Some(c) if !c.is_mono() => {}
                _ => {
                    return bad(format!(
                        "schedule: authentic corpus {:?} must be a declared bitext",
                        s.authentic
                    ))
                }
            }
        }
        let mut names = std::collections::HashSet::new();
        for m in &self.multisource {
            if !names.insert(&m.name) {
                return bad(format!("multisource {:?} declared twice", m.name));
            }
            for p in &m.parts {
                let ok = match p.as_str() {
                    "synth_mono" => self.synth.mono.is_some(),
                    "synth_mix1" => self.synth.mix1.is_some(),
                    "synth_mix2" => self.synth.mix2.is_some(),
                    _ => self.corpora.get(p).is_some_and(|c| !c.is_mono()),
                };
                if !ok {
                    return bad(format!("multisource {}: unknown bitext {p:?}", m.name));
                }
            }
        }
        Ok(())
    }
}

impl CorpusSpec {
    fn kind(&self) -> Option<&'static str> {
        match (&self.source, &self.target, &self.tsv, &self.mono) {
            (Some(_), Some(_), None, None) => Some("bitext"),
            (None, None, Some(_), None) => Some("tsv"),
            (None, None, None, Some(_)) => Some("mono"),
            _ => None,
        }
    }

    fn langs(&self) -> Option<()> {
        if self.is_mono() {
            self.lang.as_ref().map(|_| ())
        } else {
            self.source_lang.as_ref().zip(self.target_lang.as_ref()).map(|_| ())
        }
    }

    fn is_mono(&self) -> bool {
        self.mono.is_some()
    }
}

/// Metadata written beside each dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetMeta {
    pub name: String,
    pub provenance: Provenance,
    pub source_lang: Lang,
    pub target_lang: Lang,
    pub pairs: usize,
    pub seed: u64,
    pub shuffled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shuffle_seed: Option<u64>,
    /// Pairs contributed by each part.
    pub composition: BTreeMap<String, usize>,
    pub lineage: Vec<Lineage>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub genre: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tagged_sources: Option<bool>,
    pub manifest_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub datasets: Vec<DatasetMeta>,
    /// Every file written, in write order.
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

enum Loaded {
    Mono(MonoCorpus),
    Bitext(ParallelCorpus),
}

struct Builder<'m> {
    manifest: &'m Manifest,
    base: PathBuf,
    out: PathBuf,
    seed: u64,
    files: Vec<PathBuf>,
    datasets: Vec<DatasetMeta>,
}

/// Run a manifest. Relative paths are resolved against `base` (normally the
/// manifest's directory). `seed` overrides the manifest's seed.
pub fn build(manifest: &Manifest, base: &Path, seed: Option<u64>) -> Result<BuildReport, PipelineError> {
    manifest.validate()?;
    let mut b = Builder {
        manifest,
        base: base.to_path_buf(),
        out: base.join(&manifest.output_dir),
        seed: seed.unwrap_or(manifest.seed),
        files: Vec::new(),
        datasets: Vec::new(),
    };
    b.run()?;
    Ok(BuildReport {
        output_dir: b.out,
        seed: b.seed,
        datasets: b.datasets,
        files: b.files,
    })
}

/// Load and run the manifest at `path`.
pub fn build_file(path: &Path, seed: Option<u64>) -> Result<BuildReport, PipelineError> {
    let manifest = Manifest::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build(&manifest, base, seed)
}

impl Builder<'_> {
    fn path(&self, p: &str) -> PathBuf {
        self.base.join(p)
    }

    fn load_corpus(&self, name: &str) -> Result<Loaded, PipelineError> {
        let c = &self.manifest.corpora[name];
        let lang = |l: &Option<Lang>| l.clone().expect("validated");
        Ok(if let Some(m) = &c.mono {
            Loaded::Mono(corpus::load_mono(&self.path(m), lang(&c.lang))?)
        } else if let Some(t) = &c.tsv {
            Loaded::Bitext(corpus::load_tsv_bitext(
                &self.path(t),
                lang(&c.source_lang),
                lang(&c.target_lang),
            )?)
        } else {
            Loaded::Bitext(corpus::load_bitext(
                &self.path(c.source.as_deref().expect("validated")),
                &self.path(c.target.as_deref().expect("validated")),
                lang(&c.source_lang),
                lang(&c.target_lang),
            )?)
        })
    }

    fn translator(&self, name: &str) -> Result<Box<dyn Translator>, PipelineError> {
        let resource = |spec: &str| {
            read_resource(spec, &self.base).map_err(|e| PipelineError::Manifest(format!("translator {name}: {e}")))
        };
        let rule_err = |e: String| PipelineError::Manifest(format!("translator {name}: {e}"));
        Ok(match &self.manifest.translators[name] {
            TranslatorSpec::Identity => Box::new(IdentityTranslator),
            TranslatorSpec::Rules {
                from,
                to,
                orthography,
                syntax,
                lexicon,
            } => {
                let mut t = RuleTranslator::new(name, from.clone(), to.clone());
                if let Some(o) = orthography {
                    let rules = RewriteRuleSet::parse(&resource(o)?).map_err(|e| rule_err(e.to_string()))?;
                    t = t.with_orthography(rules);
                }
                if let Some(s) = syntax {
                    let mut rules = SyntaxRuleSet::parse(&resource(s)?).map_err(|e| rule_err(e.to_string()))?;
                    if let Some(l) = lexicon {
                        rules = rules
                            .with_lexicon_tsv(&resource(l)?)
                            .map_err(|e| rule_err(e.to_string()))?;
                    }
                    t = t.with_syntax(rules);
                } else if lexicon.is_some() {
                    return Err(rule_err("`lexicon` needs `syntax`".into()));
                }
                Box::new(t)
            }
            TranslatorSpec::Command { program, args } => Box::new(CommandTranslator::new(name, program, args)),
            TranslatorSpec::Http { url } => Box::new(HttpTranslator::new(name, url)),
        })
    }

    fn mono(&self, name: &str) -> Result<MonoCorpus, PipelineError> {
        match self.load_corpus(name)? {
            Loaded::Mono(m) => Ok(m),
            Loaded::Bitext(_) => unreachable!("validated"),
        }
    }

    fn bitext(&self, name: &str) -> Result<ParallelCorpus, PipelineError> {
        match self.load_corpus(name)? {
            Loaded::Bitext(b) => Ok(b),
            Loaded::Mono(_) => unreachable!("validated"),
        }
    }

    fn genre(&self, corpora: &[&str]) -> BTreeMap<String, String> {
        corpora
            .iter()
            .filter_map(|c| {
                let g = self.manifest.corpora.get(*c)?.genre.clone()?;
                Some((c.to_string(), g))
            })
            .collect()
    }

    fn write(&mut self, corpus: &ParallelCorpus, meta: DatasetMeta) -> Result<(), PipelineError> {
        let src = self.out.join(format!("{}.src", meta.name));
        let tgt = self.out.join(format!("{}.tgt", meta.name));
        let meta_path = self.out.join(format!("{}.meta.json", meta.name));
        corpus::save_bitext(corpus, &src, &tgt)?;
        let json = serde_json::to_string_pretty(&meta).expect("serializable") + "\n";
        std::fs::write(&meta_path, json).map_err(|source| PipelineError::Io {
            path: meta_path.clone(),
            source,
        })?;
        self.files.extend([src, tgt, meta_path]);
        self.datasets.push(meta);
        Ok(())
    }

    fn meta(&self, name: &str, corpus: &ParallelCorpus) -> DatasetMeta {
        DatasetMeta {
            name: name.to_string(),
            provenance: corpus.provenance(),
            source_lang: corpus.source_lang().clone(),
            target_lang: corpus.target_lang().clone(),
            pairs: corpus.len(),
            seed: self.seed,
            shuffled: false,
            shuffle_seed: None,
            composition: BTreeMap::from([(corpus.provenance().as_str().to_string(), corpus.len())]),
            lineage: Vec::new(),
            genre: BTreeMap::new(),
            tagged_sources: None,
            manifest_version: MANIFEST_VERSION,
        }
    }

    fn lrl(&self, r: &SynthRecipe) -> Result<Lang, PipelineError> {
        if let Some(l) = &r.lrl {
            return Ok(l.clone());
        }
        let s = self.manifest.schedule.as_ref().expect("validated");
        let c = &self.manifest.corpora[&s.authentic];
        Ok(c.source_lang.clone().expect("validated"))
    }

    fn synths(&self) -> Result<Vec<SynthBitext>, PipelineError> {
        let m = self.manifest;
        let batch = m.batch_size;
        let mut out = Vec::new();
        if let Some(r) = &m.synth.mono {
            let t = self.translator(r.translator.as_deref().expect("validated"))?;
            out.push(build_synth_mono(
                &self.mono(&r.corpus)?,
                &r.corpus,
                t.as_ref(),
                &self.lrl(r)?,
                batch,
            )?);
        }
        if let Some(r) = &m.synth.mix1 {
            let t = self.translator(r.translator.as_deref().expect("validated"))?;
            out.push(build_synth_mix1(
                &self.bitext(&r.corpus)?,
                &r.corpus,
                t.as_ref(),
                &self.lrl(r)?,
                batch,
            )?);
        }
        if let Some(r) = &m.synth.mix2 {
            let ts = r.translators.as_ref().expect("validated");
            let (t1, t2) = (self.translator(&ts[0])?, self.translator(&ts[1])?);
            out.push(build_synth_mix2(
                &self.mono(&r.corpus)?,
                &r.corpus,
                t1.as_ref(),
                r.pivot.as_ref().expect("validated"),
                t2.as_ref(),
                &self.lrl(r)?,
                batch,
            )?);
        }
        Ok(out)
    }

    fn run(&mut self) -> Result<(), PipelineError> {
        std::fs::create_dir_all(&self.out).map_err(|source| PipelineError::Io {
            path: self.out.clone(),
            source,
        })?;
        let m = self.manifest;
        let synths = self.synths()?;
        for s in &synths {
            let name = s.provenance().as_str();
            let mut meta = self.meta(name, &s.corpus);
            meta.lineage = vec![s.lineage.clone()];
            meta.genre = self.genre(&[&s.lineage.source_corpus]);
            self.write(&s.corpus, meta)?;
        }

        if let Some(sched) = &m.schedule {
            let authentic = self.bitext(&sched.authentic)?;
            let spec = ScheduleSpec {
                starts: sched.starts.clone(),
                increments: sched.increments.clone(),
            };
            let schedule = build_schedule(&spec, &authentic, &synths, self.seed)?;
            let mut genre_sources: Vec<&str> = vec![&sched.authentic];
            genre_sources.extend(synths.iter().map(|s| s.lineage.source_corpus.as_str()));
            let genre = self.genre(&genre_sources);
            for set in schedule.sets() {
                let corpus = schedule.materialize(set, m.shuffle);
                let mut meta = self.meta(&set.name, &corpus);
                meta.shuffled = m.shuffle;
                meta.shuffle_seed = m.shuffle.then(|| schedule.shuffle_seed(set));
                meta.composition = [
                    ("authentic", set.authentic),
                    ("synth_mono", set.synth_mono),
                    ("synth_mix1", set.synth_mix1),
                    ("synth_mix2", set.synth_mix2),
                ]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
                meta.lineage = synths
                    .iter()
                    .filter(|s| meta.composition[s.provenance().as_str()] > 0)
                    .map(|s| s.lineage.clone())
                    .collect();
                meta.genre = genre.clone();
                self.write(&corpus, meta)?;
            }
        }

        for ms in &m.multisource {
            let mut parts = Vec::new();
            let mut lineage = Vec::new();
            let mut composition = BTreeMap::new();
            for p in &ms.parts {
                let part = match synths.iter().find(|s| s.provenance().as_str() == p) {
                    Some(s) => {
                        lineage.push(s.lineage.clone());
                        s.corpus.clone()
                    }
                    None => self.bitext(p)?,
                };
                composition.insert(p.clone(), part.len());
                parts.push(part);
            }
            let corpus = assemble_multisource(&parts, ms.tag_sources).map_err(|e| match e {
                PipelineError::Language { part, expected, found } => PipelineError::Language {
                    part: format!("multisource {}: {part} ({})", ms.name, ms.parts[part_index(&part)]),
                    expected,
                    found,
                },
                e => e,
            })?;
            let mut meta = self.meta(&ms.name, &corpus);
            meta.composition = composition;
            meta.lineage = lineage;
            let names: Vec<&str> = ms.parts.iter().map(String::as_str).collect();
            meta.genre = self.genre(&names);
            meta.tagged_sources = Some(ms.tag_sources);
            self.write(&corpus, meta)?;
        }

        let index = self.out.join("build.json");
        let report = serde_json::json!({
            "manifest_version": MANIFEST_VERSION,
            "seed": self.seed,
            "datasets": self.datasets.iter().map(|d| serde_json::json!({
                "name": d.name,
                "pairs": d.pairs,
                "provenance": d.provenance,
            })).collect::<Vec<_>>(),
        });
        std::fs::write(
            &index,
            serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        )
        .map_err(|source| PipelineError::Io {
            path: index.clone(),
            source,
        })?;
        self.files.push(index);
        Ok(())
    }
}

fn part_index(label: &str) -> usize {
    label
        .strip_prefix("part ")
        .and_then(|n| n.parse::<usize>().ok())
        .map_or(0, |n| n - 1)
}

/// Check the invariants every written dataset must satisfy: equal line
/// counts, no empty or padded lines, and the pair count recorded in the
/// metadata.
pub fn validate_dataset(dir: &Path, name: &str) -> Result<usize, PipelineError> {
    let src = dir.join(format!("{name}.src"));
    let tgt = dir.join(format!("{name}.tgt"));
    let lang = Lang::new("und").expect("valid");
    let corpus = corpus::load_bitext(&src, &tgt, lang.clone(), lang)?;
    for (i, (s, t)) in corpus.pairs().iter().enumerate() {
        for (side, sentence) in [(Side::Source, s), (Side::Target, t)] {
            if corpus::normalize(sentence.text()) != *sentence {
                return Err(PipelineError::Manifest(format!(
                    "{name}: line {} ({side} side) is not normalized",
                    i + 1
                )));
            }
        }
    }
    let meta_path = dir.join(format!("{name}.meta.json"));
    let meta: serde_json::Value =
        serde_json::from_str(
            &std::fs::read_to_string(&meta_path).map_err(|source| PipelineError::Io {
                path: meta_path.clone(),
                source,
            })?,
        )
        .map_err(|e| PipelineError::Manifest(format!("{}: {e}", meta_path.display())))?;
    if meta["pairs"].as_u64() != Some(corpus.len() as u64) {
        return Err(PipelineError::Manifest(format!(
            "{name}: metadata records {} pairs, files hold {}",
            meta["pairs"],
            corpus.len()
        )));
    }
    Ok(corpus.len())
}
