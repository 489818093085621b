//! Augmentation schedules.
//!
//! For every authentic starting size, a track of training sets is built:
//! the authentic slice alone, then the authentic slice plus each synth_mono
//! increment, then (synth_mono held at its largest increment) each
//! synth_mix1 increment, then likewise synth_mix2. With `k` increments a
//! track has `1 + 3k` sets.
//!
//! All slices are prefixes of seeded permutations, so within a track every
//! set contains the previous one, and smaller starts are contained in
//! larger ones.

use serde::Serialize;

use super::synth::SynthBitext;
use super::PipelineError;
use crate::corpus::{shuffled_order, ParallelCorpus, Provenance};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
pub struct ScheduleSpec {
    /// Authentic pair counts, one track each.
    pub starts: Vec<usize>,
    /// Synthetic pair counts added at each step, strictly increasing.
    pub increments: Vec<usize>,
}

/// One planned training set. Counts are absolute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainingSet {
    pub name: String,
    pub track: usize,
    pub stage: usize,
    pub authentic: usize,
    pub synth_mono: usize,
    pub synth_mix1: usize,
    pub synth_mix2: usize,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.authentic + self.synth_mono + self.synth_mix1 + self.synth_mix2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn counts(&self) -> [usize; 4] {
        [self.authentic, self.synth_mono, self.synth_mix1, self.synth_mix2]
    }
}

const PARTS: [Provenance; 4] = [
    Provenance::Authentic,
    Provenance::SynthMono,
    Provenance::SynthMix1,
    Provenance::SynthMix2,
];

/// A validated schedule over borrowed corpora. Sets are materialized on
/// demand.
#[derive(Debug)]
pub struct Schedule<'a> {
    sets: Vec<TrainingSet>,
    parts: [Option<&'a ParallelCorpus>; 4],
    orders: [Vec<usize>; 4],
    seed: u64,
}

pub fn stage_name(start: usize, mono: usize, mix1: usize, mix2: usize) -> String {
    format!("s{start}_mono{mono}_mix1{mix1}_mix2{mix2}")
}

/// Plan every training set and check that the corpora can supply them.
pub fn build_schedule<'a>(
    spec: &ScheduleSpec,
    authentic: &'a ParallelCorpus,
    synths: &'a [SynthBitext],
    seed: u64,
) -> Result<Schedule<'a>, PipelineError> {
    if spec.starts.is_empty() {
        return Err(PipelineError::Schedule("no starting sizes".into()));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(s) = spec.starts.iter().find(|s| !seen.insert(**s)) {
        return Err(PipelineError::Schedule(format!("starting size {s} listed twice")));
    }
    if spec.increments.first() == Some(&0) || spec.increments.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PipelineError::Schedule(
            "increments must be positive and strictly increasing".into(),
        ));
    }

    let mut parts: [Option<&ParallelCorpus>; 4] = [Some(authentic), None, None, None];
    for s in synths {
        let slot = PARTS.iter().position(|p| *p == s.provenance()).unwrap_or(0);
        if slot == 0 {
            return Err(PipelineError::Schedule(format!(
                "{} is not a synthetic construction",
                s.provenance().as_str()
            )));
        }
        if parts[slot].is_some() {
            return Err(PipelineError::Schedule(format!(
                "two {} corpora",
                s.provenance().as_str()
            )));
        }
        if s.corpus.source_lang() != authentic.source_lang() || s.corpus.target_lang() != authentic.target_lang() {
            return Err(PipelineError::Language {
                part: s.provenance().as_str().to_string(),
                expected: format!("{}-{}", authentic.source_lang(), authentic.target_lang()),
                found: format!("{}-{}", s.corpus.source_lang(), s.corpus.target_lang()),
            });
        }
        parts[slot] = Some(&s.corpus);
    }

    let max = spec.increments.last().copied().unwrap_or(0);
    let mut sets = Vec::new();
    for (track, &start) in spec.starts.iter().enumerate() {
        let mut push = |mono, mix1, mix2| {
            let stage = sets.iter().filter(|s: &&TrainingSet| s.track == track).count();
            sets.push(TrainingSet {
                name: stage_name(start, mono, mix1, mix2),
                track,
                stage,
                authentic: start,
                synth_mono: mono,
                synth_mix1: mix1,
                synth_mix2: mix2,
            });
        };
        push(0, 0, 0);
        for &i in &spec.increments {
            push(i, 0, 0);
        }
        for &i in &spec.increments {
            push(max, i, 0);
        }
        for &i in &spec.increments {
            push(max, max, i);
        }
    }

    for set in &sets {
        for (k, &need) in set.counts().iter().enumerate() {
            let available = parts[k].map_or(0, ParallelCorpus::len);
            if need > available {
                return Err(PipelineError::Capacity {
                    stage: set.name.clone(),
                    part: PARTS[k].as_str(),
                    requested: need,
                    available,
                });
            }
        }
    }

    let orders = std::array::from_fn(|k| {
        parts[k].map_or_else(Vec::new, |c| shuffled_order(c.len(), derive_seed(seed, k as u64)))
    });
    Ok(Schedule {
        sets,
        parts,
        orders,
        seed,
    })
}

impl Schedule<'_> {
    pub fn sets(&self) -> &[TrainingSet] {
        &self.sets
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Indices into each part (authentic, synth_mono, synth_mix1,
    /// synth_mix2) that make up `set`.
    pub fn indices(&self, set: &TrainingSet) -> [&[usize]; 4] {
        let counts = set.counts();
        std::array::from_fn(|k| &self.orders[k][..counts[k]])
    }

    /// Concatenate the set's slices: authentic first, then each synthetic
    /// part in construction order. With `shuffle`, the pairs are permuted
    /// with a seed derived from the schedule seed and the set's name.
    pub fn materialize(&self, set: &TrainingSet, shuffle: bool) -> ParallelCorpus {
        let mut pairs = Vec::with_capacity(set.len());
        for (k, idx) in self.indices(set).iter().enumerate() {
            if let Some(c) = self.parts[k] {
                pairs.extend(idx.iter().map(|&i| c.pairs()[i].clone()));
            }
        }
        if shuffle {
            let order = shuffled_order(pairs.len(), self.shuffle_seed(set));
            let mut slots: Vec<Option<_>> = pairs.into_iter().map(Some).collect();
            pairs = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();
        }
        let provenance = if set.len() == set.authentic {
            Provenance::Authentic
        } else {
            Provenance::Mixed
        };
        let auth = self.parts[0].expect("authentic part");
        ParallelCorpus::new(
            auth.source_lang().clone(),
            auth.target_lang().clone(),
            pairs,
            provenance,
        )
        .expect("slices of validated corpora are non-empty")
    }

    pub fn shuffle_seed(&self, set: &TrainingSet) -> u64 {
        let tag = set.name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
        });
        derive_seed(self.seed, tag)
    }
}
