//! `F_k` estimation on top of the heavy-element finder.
//!
//! Each trial hashes ids into nested levels: an id is present at level `j`
//! with probability `2^-j`, and present at every shallower level too. Every
//! level spreads its ids over `B` buckets and runs one doubling-mode finder
//! per bucket, so each bucket reports its dominant id and a lower bound on
//! that id's frequency.
//!
//! Recovered ids are grouped into frequency classes `[2^c, 2^(c+1))`. Class
//! `c` is read off the shallowest level at which fewer than `gamma * B`
//! recovered ids have class `c` or above, so a class-`c` id is rarely
//! shadowed by a larger one in its bucket, and that level's class-`c` ids
//! are scaled by `2^j`. Each id therefore contributes at most once. The
//! reported estimate is the median over independent trials.
//!
//! This is a subsample-and-recover scheme with empirical, not proven,
//! accuracy.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heavy_hitter::{HeavyHitter, HeavyHitterConfig};
use crate::rng::{derive_seed, mix64};
use crate::stream_model::ElementId;

const FLUSH: usize = 64;
const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkConfig {
    pub universe: u64,
    pub k: u32,
    pub eps: f64,
    /// Defaults to `ceil(log2 n) + 1`.
    pub levels: Option<u32>,
    pub trials: u32,
    pub buckets: u32,
    /// Crowding threshold `gamma` as a fraction of the bucket count.
    pub crowding: f64,
    /// Repetition constant of the per-bucket finders. Buckets are small,
    /// so their fallback summaries do most of the recovery.
    pub reps_constant: f64,
    pub seed: u64,
}

impl FkConfig {
    pub fn new(universe: u64, k: u32, eps: f64) -> Self {
        FkConfig {
            universe,
            k,
            eps,
            levels: None,
            trials: 5,
            buckets: 256,
            crowding: 0.125,
            reps_constant: 0.25,
            seed: 0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn trials(mut self, trials: u32) -> Self {
        self.trials = trials;
        self
    }

    pub fn level_count(&self) -> u32 {
        self.levels
            .unwrap_or_else(|| 64 - (self.universe.max(2) - 1).leading_zeros() + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.buckets == 0 || self.level_count() == 0 {
            return Err(Error::InvalidParameter(
                "trials, buckets and levels must be positive".into(),
            ));
        }
        if !(self.crowding > 0.0 && self.crowding <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "crowding {} outside (0, 1]",
                self.crowding
            )));
        }
        self.finder_config(0).validate()
    }

    /// Accuracy handed to each bucket's finder; `f~^k` compounds its error
    /// `k` times.
    fn finder_eps(&self) -> f64 {
        self.eps / f64::from(self.k)
    }

    fn finder_config(&self, seed: u64) -> HeavyHitterConfig {
        HeavyHitterConfig::new(self.universe, self.k, self.finder_eps())
            .reps_constant(self.reps_constant)
            .seed(seed)
            .doubling()
    }
}

/// Deepest level holding `item`: the leading zeros of its seeded hash.
pub fn item_level(item: ElementId, seed: u64) -> u32 {
    mix64(u64::from(item.0) ^ mix64(seed)).leading_zeros()
}

/// Whether `item` belongs to the level-`level` substream.
pub fn level_substream(item: ElementId, level: u32, seed: u64) -> bool {
    item_level(item, seed) >= level
}

fn bucket_of(item: ElementId, level_seed: u64, buckets: u32) -> u32 {
    (mix64(u64::from(item.0) ^ level_seed) % u64::from(buckets)) as u32
}

struct Bucket {
    finder: HeavyHitter,
    pending: Vec<ElementId>,
}

impl Bucket {
    fn flush(&mut self) -> Result<()> {
        self.finder.push_chunk(&self.pending)?;
        self.pending.clear();
        Ok(())
    }
}

/// One level of one trial: a finder per nonempty bucket.
pub struct LevelSketch {
    level: u32,
    hash_seed: u64,
    bucket_seed: u64,
    buckets: HashMap<u32, Bucket>,
}

impl LevelSketch {
    fn push(&mut self, item: ElementId, cfg: &FkConfig) -> Result<()> {
        let b = bucket_of(item, self.bucket_seed, cfg.buckets);
        let bucket = match self.buckets.get_mut(&b) {
            Some(bucket) => bucket,
            None => {
                let seed = derive_seed(self.hash_seed, &[u64::from(self.level), u64::from(b)]);
                let finder = HeavyHitter::new(cfg.finder_config(seed))?.sequential();
                self.buckets.entry(b).or_insert(Bucket {
                    finder,
                    pending: Vec::with_capacity(FLUSH),
                })
            }
        };
        bucket.pending.push(item);
        if bucket.pending.len() == FLUSH {
            bucket.flush()?;
        }
        Ok(())
    }

    fn live_runs(&self) -> u64 {
        self.buckets.values().map(|b| b.finder.live_runs()).sum()
    }

    fn flush(&mut self) -> Result<()> {
        self.buckets.values_mut().try_for_each(Bucket::flush)
    }

    /// `(id, f~)` from every nonempty bucket.
    fn finish(self) -> Result<Vec<(ElementId, u64)>> {
        let mut out = Vec::with_capacity(self.buckets.len());
        let mut buckets: Vec<_> = self.buckets.into_iter().collect();
        buckets.sort_by_key(|(b, _)| *b);
        for (_, bucket) in buckets {
            let e = bucket.finder.finish()?.estimate;
            if !e.is_sentinel() {
                out.push((e.element, e.count));
            }
        }
        Ok(out)
    }
}

struct Trial {
    seed: u64,
    levels: Vec<LevelSketch>,
    peak_live_runs: u64,
}

impl Trial {
    fn new(cfg: &FkConfig, index: u32) -> Self {
        let seed = derive_seed(cfg.seed, &[u64::from(index)]);
        let levels = (0..cfg.level_count())
            .map(|level| LevelSketch {
                level,
                hash_seed: seed,
                bucket_seed: derive_seed(seed, &[0xb0c4e7, u64::from(level)]),
                buckets: HashMap::new(),
            })
            .collect();
        Trial {
            seed,
            levels,
            peak_live_runs: 0,
        }
    }

    fn push_chunk(&mut self, items: &[ElementId], cfg: &FkConfig) -> Result<()> {
        for &x in items {
            let deepest = item_level(x, self.seed);
            for sketch in self.levels.iter_mut().take(deepest as usize + 1) {
                sketch.push(x, cfg)?;
            }
        }
        self.track_peak();
        Ok(())
    }

    fn track_peak(&mut self) {
        let live = self.levels.iter().map(LevelSketch::live_runs).sum();
        self.peak_live_runs = self.peak_live_runs.max(live);
    }

    fn finish(mut self, cfg: &FkConfig) -> Result<TrialResult> {
        for sketch in &mut self.levels {
            sketch.flush()?;
        }
        self.track_peak();
        let recovered = self
            .levels
            .into_iter()
            .map(LevelSketch::finish)
            .collect::<Result<Vec<_>>>()?;
        Ok(combine(&recovered, cfg, self.peak_live_runs))
    }
}

fn class_of(count: u64) -> u32 {
    63 - count.leading_zeros()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    pub recovered: usize,
    /// Classes read off this level.
    pub classes: Vec<u32>,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub estimate: f64,
    pub levels: Vec<LevelSummary>,
    pub peak_live_runs: u64,
}

fn combine(recovered: &[Vec<(ElementId, u64)>], cfg: &FkConfig, peak_live_runs: u64) -> TrialResult {
    let limit = cfg.crowding * f64::from(cfg.buckets);
    let top = recovered
        .iter()
        .flatten()
        .map(|&(_, f)| class_of(f))
        .max();
    let mut levels: Vec<LevelSummary> = recovered
        .iter()
        .enumerate()
        .map(|(j, r)| LevelSummary {
            level: j as u32,
            recovered: r.len(),
            classes: Vec::new(),
            contribution: 0.0,
        })
        .collect();
    for c in 0..=top.unwrap_or(0) {
        if top.is_none() {
            break;
        }
        let crowd = |r: &Vec<(ElementId, u64)>| r.iter().filter(|&&(_, f)| class_of(f) >= c).count();
        let j = recovered
            .iter()
            .position(|r| (crowd(r) as f64) < limit)
            .unwrap_or(recovered.len() - 1);
        let scale = 2f64.powi(j as i32);
        let sum: f64 = recovered[j]
            .iter()
            .filter(|&&(_, f)| class_of(f) == c)
            .map(|&(_, f)| (f as f64).powi(cfg.k as i32))
            .sum();
        levels[j].classes.push(c);
        levels[j].contribution += scale * sum;
    }
    TrialResult {
        estimate: levels.iter().map(|l| l.contribution).sum(),
        levels,
        peak_live_runs,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkReport {
    pub estimate: f64,
    pub trials: Vec<TrialResult>,
    pub items: u64,
}

impl FkReport {
    /// The trial whose estimate is the reported median.
    pub fn median_trial(&self) -> &TrialResult {
        let mut idx: Vec<usize> = (0..self.trials.len()).collect();
        idx.sort_by(|&a, &b| self.trials[a].estimate.total_cmp(&self.trials[b].estimate));
        &self.trials[idx[(idx.len() - 1) / 2]]
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// One pass over `items`; the median of `cfg.trials` independent estimates.
pub fn estimate_fk_report<I>(items: I, cfg: &FkConfig) -> Result<FkReport>
where
    I: IntoIterator<Item = ElementId>,
{
    cfg.validate()?;
    let mut trials: Vec<Trial> = (0..cfg.trials).map(|i| Trial::new(cfg, i)).collect();
    let mut buf = Vec::with_capacity(CHUNK);
    let mut seen = 0u64;
    let mut feed = |trials: &mut Vec<Trial>, buf: &[ElementId]| -> Result<()> {
        if let Some((pos, x)) = buf
            .iter()
            .enumerate()
            .find(|(_, x)| x.is_sentinel() || u64::from(x.0) > cfg.universe)
        {
            return Err(Error::OutOfRange {
                item: u64::from(x.0),
                position: seen as usize + pos,
                universe: cfg.universe,
            });
        }
        seen += buf.len() as u64;
        trials
            .par_iter_mut()
            .map(|t| t.push_chunk(buf, cfg))
            .collect::<Result<()>>()
    };
    for x in items {
        buf.push(x);
        if buf.len() == CHUNK {
            feed(&mut trials, &buf)?;
            buf.clear();
        }
    }
    feed(&mut trials, &buf)?;
    let results = trials
        .into_par_iter()
        .map(|t| t.finish(cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut values: Vec<f64> = results.iter().map(|r| r.estimate).collect();
    Ok(FkReport {
        estimate: median(&mut values),
        trials: results,
        items: seen,
    })
}

/// Median-of-trials estimate of `F_k`.
pub fn estimate_fk<I>(items: I, cfg: &FkConfig) -> Result<f64>
where
    I: IntoIterator<Item = ElementId>,
{
    Ok(estimate_fk_report(items, cfg)?.estimate)
}
