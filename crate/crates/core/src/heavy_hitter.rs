//! One-pass heavy-element finder.
//!
//! For every `delta` of the grid the finder runs `T(delta)` independent
//! pick-and-drop samplers over the matrix shape derived for that `delta`,
//! keeps the best estimate per `delta`, and returns the overall best. A
//! Misra-Gries summary runs alongside for streams dominated by a single
//! element. Every estimate is a lower bound on a true frequency, so the
//! answer satisfies `f~ <= f` on every stream and every seed.
//!
//! Two modes:
//!
//! * **Known length**: `F_1` is given up front, so each `delta` fixes its
//!   shape before the first item.
//! * **Doubling**: generation `g` guesses `F_1 = 2^g`. It starts once the
//!   stream reaches `floor(2^g * eps / 4)` items, so it misses at most an
//!   `eps / 4` share of a stream its guess fits, and is retired (its best
//!   estimate frozen) once the stream grows past `2^(g + 1)` items.
//!   Generations retired before the stream outgrows the fallback summary
//!   are never started: on such short streams the summary is exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fallback::MisraGries;
use crate::param_engine::{
    delta_grid, fallback_counters, params_for_delta, repetitions, ParamSet, DEFAULT_REPS_CONSTANT,
    FALLBACK_BETA,
};
use crate::pick_drop::{ColumnSource, Estimate, PickDropState};
use crate::rng::{derive_seed, rng_from_seed, RunRng};
use crate::stream_model::ElementId;

const CHUNK: usize = 4096;
const PARALLEL_WORK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "length")]
pub enum Mode {
    KnownLength(u64),
    Doubling,
}

/// Manual overrides of the derived shape.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub delta: Option<u64>,
    pub lambda: Option<u64>,
    pub cols: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeavyHitterConfig {
    pub universe: u64,
    pub k: u32,
    pub eps: f64,
    pub mode: Mode,
    pub reps_constant: f64,
    pub seed: u64,
    /// Independent copies of the whole finder, merged by max.
    pub boost: u32,
    pub overrides: ParamOverrides,
}

impl HeavyHitterConfig {
    pub fn new(universe: u64, k: u32, eps: f64) -> Self {
        HeavyHitterConfig {
            universe,
            k,
            eps,
            mode: Mode::Doubling,
            reps_constant: DEFAULT_REPS_CONSTANT,
            seed: 0,
            boost: 1,
            overrides: ParamOverrides::default(),
        }
    }

    pub fn known_length(mut self, len: u64) -> Self {
        self.mode = Mode::KnownLength(len);
        self
    }

    pub fn doubling(mut self) -> Self {
        self.mode = Mode::Doubling;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn reps_constant(mut self, c: f64) -> Self {
        self.reps_constant = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps {} outside (0, 1)", self.eps)));
        }
        if self.k < 3 {
            return Err(Error::InvalidParameter(format!("moment order {} < 3", self.k)));
        }
        if self.universe < 2 {
            return Err(Error::InvalidParameter(format!("universe size {} < 2", self.universe)));
        }
        if self.boost == 0 {
            return Err(Error::InvalidParameter("boost must be >= 1".into()));
        }
        if let Some(d) = self.overrides.delta {
            if d == 0 || !d.is_power_of_two() {
                return Err(Error::InvalidParameter(format!("delta {d} is not a power of two")));
            }
        }
        if self.overrides.lambda == Some(0) || self.overrides.cols == Some(0) {
            return Err(Error::InvalidParameter("lambda and t overrides must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Result<Vec<u64>> {
        match self.overrides.delta {
            Some(d) => Ok(vec![d]),
            None => delta_grid(self.universe, self.k),
        }
    }

    fn shape(&self, stream_len: u64, delta: u64) -> Result<ParamSet> {
        let mut p = params_for_delta(self.universe, self.k, stream_len, delta)?;
        if let Some(l) = self.overrides.lambda {
            p.lambda = l;
        }
        if let Some(t) = self.overrides.cols {
            p.cols = t;
            p.rows = stream_len.div_ceil(t);
            p.padding = p.rows * t - stream_len;
        }
        Ok(p)
    }

    /// Runs per generation: `boost * sum over the grid of T(delta)`.
    pub fn runs_per_generation(&self) -> Result<u64> {
        let mut total = 0;
        for d in self.grid()? {
            total += repetitions(self.universe, self.k, self.eps, d, self.reps_constant)?;
        }
        Ok(total * u64::from(self.boost))
    }
}

#[derive(Clone, Debug)]
struct Run {
    state: PickDropState,
    rng: RunRng,
}

impl Run {
    #[inline]
    fn advance(&mut self, mut col: u64, cols: u64, lambda: u64, items: &[ElementId]) {
        for &x in items {
            if col == 0 {
                self.state.begin_row(self.rng.next_column(cols));
            }
            col += 1;
            self.state.observe(col, x);
            if col == cols {
                self.state.end_row(lambda);
                col = 0;
            }
        }
    }
}

/// The `T(delta)` runs sharing one matrix shape.
#[derive(Clone, Debug)]
struct RunGroup {
    params: ParamSet,
    col: u64,
    runs: Vec<Run>,
}

impl RunGroup {
    fn new(params: ParamSet, reps: u64, seed: u64, generation: u32) -> Self {
        let runs = (0..reps)
            .map(|rep| Run {
                state: PickDropState::new(),
                rng: rng_from_seed(derive_seed(seed, &[u64::from(generation), params.delta, rep])),
            })
            .collect();
        RunGroup { params, col: 0, runs }
    }

    fn feed(&mut self, items: &[ElementId], parallel: bool) {
        let (col, cols, lambda) = (self.col, self.params.cols, self.params.lambda);
        if parallel && self.runs.len() * items.len() >= PARALLEL_WORK {
            self.runs
                .par_iter_mut()
                .with_min_len(8)
                .for_each(|r| r.advance(col, cols, lambda, items));
        } else {
            for r in &mut self.runs {
                r.advance(col, cols, lambda, items);
            }
        }
        self.col = (col + items.len() as u64 % cols) % cols;
    }

    /// Pads the row in progress with sentinels and closes it.
    fn close(&mut self) {
        if self.col == 0 {
            return;
        }
        let pad = vec![ElementId::SENTINEL; (self.params.cols - self.col) as usize];
        self.feed(&pad, false);
    }

    fn best(&self) -> Estimate {
        self.runs
            .iter()
            .map(|r| r.state.estimate())
            .fold(Estimate::sentinel(), Estimate::max)
    }
}

#[derive(Clone, Debug)]
struct Generation {
    index: u32,
    guess: u64,
    start: u64,
    groups: Vec<RunGroup>,
}

impl Generation {
    fn summary(&self, retired_at: Option<u64>) -> GenerationSummary {
        GenerationSummary {
            index: self.index,
            guess: self.guess,
            start: self.start,
            retired_at,
            params: self.groups.iter().map(|g| g.params).collect(),
            repetitions: self.groups.iter().map(|g| g.runs.len() as u64).collect(),
        }
    }

    fn candidates(&self) -> impl Iterator<Item = Candidate> + '_ {
        self.groups.iter().map(move |g| Candidate {
            generation: self.index,
            delta: g.params.delta,
            estimate: g.best(),
        })
    }

    fn live_runs(&self) -> u64 {
        self.groups.iter().map(|g| g.runs.len() as u64).sum()
    }
}

/// Best estimate of one `(generation, delta)` group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub generation: u32,
    pub delta: u64,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub entries: Vec<Candidate>,
    pub fallback: Option<Estimate>,
}

impl CandidateSet {
    pub fn estimates(&self) -> impl Iterator<Item = Estimate> + '_ {
        self.entries
            .iter()
            .map(|c| c.estimate)
            .chain(self.fallback)
    }

    pub fn aggregate(&self) -> Result<Estimate> {
        aggregate(self.estimates())
    }
}

/// Argmax by count, ties to the smaller id; all-sentinel input gives the
/// sentinel.
pub fn aggregate<I: IntoIterator<Item = Estimate>>(candidates: I) -> Result<Estimate> {
    candidates
        .into_iter()
        .reduce(Estimate::max)
        .ok_or(Error::EmptyCandidates)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub index: u32,
    pub guess: u64,
    pub start: u64,
    pub retired_at: Option<u64>,
    pub params: Vec<ParamSet>,
    pub repetitions: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeavyReport {
    pub estimate: Estimate,
    pub mode: Mode,
    pub items: u64,
    pub candidates: CandidateSet,
    pub generations: Vec<GenerationSummary>,
    pub peak_live_runs: u64,
}

/// Push-based heavy-element finder.
#[derive(Clone, Debug)]
pub struct HeavyHitter {
    cfg: HeavyHitterConfig,
    grid: Vec<u64>,
    live: Vec<Generation>,
    retired: Vec<(GenerationSummary, Vec<Candidate>)>,
    next_generation: u32,
    fallback: MisraGries,
    seen: u64,
    peak_live_runs: u64,
    parallel: bool,
}

impl HeavyHitter {
    pub fn new(cfg: HeavyHitterConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let fallback = MisraGries::new(fallback_counters(cfg.eps, FALLBACK_BETA));
        let mut hh = HeavyHitter {
            cfg,
            grid,
            live: Vec::new(),
            retired: Vec::new(),
            next_generation: 0,
            fallback,
            seen: 0,
            peak_live_runs: 0,
            parallel: true,
        };
        hh.next_generation = (0..63)
            .find(|&g| (1u64 << (g + 1)) > hh.fallback.capacity() as u64)
            .unwrap_or(0);
        if let Mode::KnownLength(len) = hh.cfg.mode {
            if len > 0 {
                let generation = hh.build_generation(0, len, 0)?;
                hh.live.push(generation);
            }
        }
        hh.track_peak();
        Ok(hh)
    }

    /// Disables intra-chunk parallelism (for callers that parallelize above).
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn config(&self) -> &HeavyHitterConfig {
        &self.cfg
    }

    pub fn items_seen(&self) -> u64 {
        self.seen
    }

    /// Pick-and-drop states currently held.
    pub fn live_runs(&self) -> u64 {
        self.live.iter().map(Generation::live_runs).sum()
    }

    /// Words of sampler state currently held, fallback summary excluded.
    pub fn live_state_words(&self) -> u64 {
        self.live_runs() * PickDropState::WORDS as u64
    }

    fn build_generation(&self, index: u32, guess: u64, start: u64) -> Result<Generation> {
        let mut groups = Vec::with_capacity(self.grid.len());
        for &delta in &self.grid {
            let params = self.cfg.shape(guess, delta)?;
            let reps = repetitions(self.cfg.universe, self.cfg.k, self.cfg.eps, delta, self.cfg.reps_constant)?
                * u64::from(self.cfg.boost);
            groups.push(RunGroup::new(params, reps, self.cfg.seed, index));
        }
        Ok(Generation {
            index,
            guess,
            start,
            groups,
        })
    }

    fn generation_start(&self, g: u32) -> u64 {
        ((1u128 << g) as f64 * self.cfg.eps / 4.0).floor() as u64
    }

    fn track_peak(&mut self) {
        self.peak_live_runs = self.peak_live_runs.max(self.live_runs());
    }

    /// Starts and retires generations due at the current position.
    fn apply_events(&mut self) -> Result<()> {
        if self.cfg.mode != Mode::Doubling {
            return Ok(());
        }
        let seen = self.seen;
        let mut i = 0;
        while i < self.live.len() {
            if (1u128 << (self.live[i].index + 1)) <= u128::from(seen) {
                let generation = self.live.remove(i);
                let candidates = generation.candidates().collect();
                self.retired.push((generation.summary(Some(seen)), candidates));
            } else {
                i += 1;
            }
        }
        while self.generation_start(self.next_generation) <= seen {
            let g = self.next_generation;
            let generation = self.build_generation(g, 1u64 << g, seen)?;
            self.live.push(generation);
            self.next_generation += 1;
        }
        self.track_peak();
        Ok(())
    }

    fn next_event(&self) -> Option<u64> {
        if self.cfg.mode != Mode::Doubling {
            return None;
        }
        let start = self.generation_start(self.next_generation);
        let retire = self.live.iter().map(|g| 1u64 << (g.index + 1)).min();
        Some(retire.map_or(start, |r| r.min(start)))
    }

    pub fn push(&mut self, item: ElementId) -> Result<()> {
        self.push_chunk(std::slice::from_ref(&item))
    }

    pub fn push_chunk(&mut self, items: &[ElementId]) -> Result<()> {
        if let Mode::KnownLength(len) = self.cfg.mode {
            if self.seen + items.len() as u64 > len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    actual: self.seen + items.len() as u64,
                });
            }
        }
        if items.iter().any(|x| x.is_sentinel() || u64::from(x.0) > self.cfg.universe) {
            let (position, item) = items
                .iter()
                .enumerate()
                .find(|(_, x)| x.is_sentinel() || u64::from(x.0) > self.cfg.universe)
                .unwrap();
            return Err(Error::OutOfRange {
                item: u64::from(item.0),
                position: self.seen as usize + position,
                universe: self.cfg.universe,
            });
        }
        let mut rest = items;
        while !rest.is_empty() {
            self.apply_events()?;
            let take = match self.next_event() {
                Some(at) => ((at - self.seen) as usize).min(rest.len()),
                None => rest.len(),
            };
            let (now, later) = rest.split_at(take);
            let parallel = self.parallel;
            let groups: Vec<&mut RunGroup> =
                self.live.iter_mut().flat_map(|g| g.groups.iter_mut()).collect();
            if parallel && groups.len() > 1 {
                groups.into_par_iter().for_each(|g| g.feed(now, parallel));
            } else {
                for g in groups {
                    g.feed(now, parallel);
                }
            }
            for &x in now {
                self.fallback.insert(x);
            }
            self.seen += now.len() as u64;
            rest = later;
        }
        Ok(())
    }

    /// Closes every live run and aggregates.
    pub fn finish(mut self) -> Result<HeavyReport> {
        if let Mode::KnownLength(len) = self.cfg.mode {
            if self.seen != len {
                return Err(Error::PrematureEnd {
                    seen: self.seen,
                    expected: len,
                });
            }
        }
        let mut candidates = CandidateSet::default();
        let mut generations = Vec::new();
        for (summary, c) in self.retired.drain(..) {
            generations.push(summary);
            candidates.entries.extend(c);
        }
        for g in &mut self.live {
            for group in &mut g.groups {
                group.close();
            }
            generations.push(g.summary(None));
            candidates.entries.extend(g.candidates());
        }
        candidates.fallback = Some(self.fallback.best());
        let estimate = candidates.aggregate()?;
        Ok(HeavyReport {
            estimate,
            mode: self.cfg.mode,
            items: self.seen,
            candidates,
            generations,
            peak_live_runs: self.peak_live_runs,
        })
    }
}

fn drive<I>(items: I, cfg: HeavyHitterConfig) -> Result<HeavyReport>
where
    I: IntoIterator<Item = ElementId>,
{
    let mut hh = HeavyHitter::new(cfg)?;
    let mut buf = Vec::with_capacity(CHUNK);
    for x in items {
        buf.push(x);
        if buf.len() == CHUNK {
            hh.push_chunk(&buf)?;
            buf.clear();
        }
    }
    hh.push_chunk(&buf)?;
    hh.finish()
}

/// Full report of one pass over `items`.
pub fn find_heavy_report<I>(items: I, cfg: &HeavyHitterConfig) -> Result<HeavyReport>
where
    I: IntoIterator<Item = ElementId>,
{
    drive(items, cfg.clone())
}

/// `(i, f~_i)` with `f~_i <= f_i`; the sentinel on an empty stream.
pub fn find_heavy<I>(items: I, cfg: &HeavyHitterConfig) -> Result<Estimate>
where
    I: IntoIterator<Item = ElementId>,
{
    Ok(drive(items, cfg.clone())?.estimate)
}

/// [`find_heavy`] without a known stream length.
pub fn find_heavy_doubling<I>(items: I, cfg: &HeavyHitterConfig) -> Result<Estimate>
where
    I: IntoIterator<Item = ElementId>,
{
    Ok(drive(items, cfg.clone().doubling())?.estimate)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::stream_model::{ExactStats, StreamView};

    fn ids(v: &[u32]) -> Vec<ElementId> {
        v.iter().copied().map(ElementId).collect()
    }

    #[test]
    fn aggregate_examples() {
        let a = Estimate::new(ElementId(7), 10);
        let b = Estimate::new(ElementId(3), 10);
        assert_eq!(aggregate([a, b]).unwrap(), b);
        assert_eq!(aggregate([a]).unwrap(), a);
        assert_eq!(
            aggregate([Estimate::sentinel(), Estimate::sentinel()]).unwrap(),
            Estimate::sentinel()
        );
        assert!(matches!(aggregate(std::iter::empty()), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn empty_stream_gives_sentinel() {
        let cfg = HeavyHitterConfig::new(64, 3, 0.25);
        assert!(find_heavy(Vec::new(), &cfg).unwrap().is_sentinel());
        assert!(find_heavy(Vec::new(), &cfg.clone().known_length(0)).unwrap().is_sentinel());
    }

    #[test]
    fn distinct_stream_counts_at_most_one() {
        let items = ids(&(1..=500).collect::<Vec<_>>());
        for cfg in [
            HeavyHitterConfig::new(500, 3, 0.25).seed(3),
            HeavyHitterConfig::new(500, 3, 0.25).seed(3).known_length(500),
        ] {
            let e = find_heavy(items.clone(), &cfg).unwrap();
            assert_eq!(e.count, 1);
        }
    }

    #[test]
    fn known_length_mismatch() {
        let cfg = HeavyHitterConfig::new(8, 3, 0.25).known_length(4);
        assert!(matches!(find_heavy(ids(&[1, 2, 3]), &cfg), Err(Error::PrematureEnd { .. })));
        assert!(matches!(
            find_heavy(ids(&[1, 2, 3, 4, 5]), &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_out_of_universe() {
        let cfg = HeavyHitterConfig::new(8, 3, 0.25);
        assert!(matches!(find_heavy(ids(&[1, 9]), &cfg), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn dominant_element_found_by_fallback() {
        let mut v = vec![5u32; 900];
        v.extend(1..=100);
        let items = ids(&v);
        let cfg = HeavyHitterConfig::new(128, 3, 0.25).known_length(1000).seed(1);
        let e = find_heavy(items, &cfg).unwrap();
        assert_eq!(e.element, ElementId(5));
        assert!(e.count <= 901 && e.count as f64 >= 0.75 * 901.0);
    }

    #[test]
    fn short_doubling_stream_is_exact() {
        // 40 counters hold every distinct id of a 30-item stream
        let items = ids(&[3, 1, 3, 2, 3, 4, 3, 5, 3, 6, 7, 3, 8, 9, 3, 10, 11, 12, 13, 3, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23]);
        let report = find_heavy_report(items, &HeavyHitterConfig::new(64, 3, 0.25).seed(2)).unwrap();
        assert_eq!(report.estimate, Estimate { element: ElementId(3), count: 8 });
        assert!(report.generations.iter().all(|g| 2 * g.guess > 40));
    }

    #[test]
    fn doubling_last_generation_matches_known_length_shape() {
        let m = 1u64 << 10;
        let items: Vec<ElementId> = (0..m).map(|i| ElementId(1 + (i % 300) as u32)).collect();
        let cfg = HeavyHitterConfig::new(1024, 3, 0.25).seed(5);
        let known = find_heavy_report(items.clone(), &cfg.clone().known_length(m)).unwrap();
        let doubling = find_heavy_report(items, &cfg).unwrap();
        let governing = doubling
            .generations
            .iter()
            .find(|g| g.guess == m)
            .expect("generation for the exact length");
        assert_eq!(governing.params, known.generations[0].params);
        assert_eq!(governing.repetitions, known.generations[0].repetitions);
    }

    #[test]
    fn run_count_independent_of_length() {
        let cfg = HeavyHitterConfig::new(1 << 12, 3, 0.25);
        let expected = cfg.runs_per_generation().unwrap();
        for m in [10u64, 1000, 100_000] {
            let hh = HeavyHitter::new(cfg.clone().known_length(m)).unwrap();
            assert_eq!(hh.live_runs(), expected);
        }
    }

    #[test]
    fn boost_multiplies_runs() {
        let mut cfg = HeavyHitterConfig::new(1 << 8, 3, 0.25).known_length(100);
        let one = HeavyHitter::new(cfg.clone()).unwrap().live_runs();
        cfg.boost = 3;
        assert_eq!(HeavyHitter::new(cfg).unwrap().live_runs(), 3 * one);
    }

    #[test]
    fn overrides_pin_the_shape() {
        let mut cfg = HeavyHitterConfig::new(1 << 8, 3, 0.25).known_length(100);
        cfg.overrides = ParamOverrides { delta: Some(2), lambda: Some(7), cols: Some(9) };
        let items: Vec<ElementId> = (0..100).map(|i| ElementId(1 + i % 50)).collect();
        let r = find_heavy_report(items, &cfg).unwrap();
        assert_eq!(r.generations.len(), 1);
        let p = r.generations[0].params[0];
        assert_eq!((p.delta, p.lambda, p.cols, p.rows, p.padding), (2, 7, 9, 12, 8));
        cfg.overrides.delta = Some(3);
        assert!(HeavyHitter::new(cfg).is_err());
    }

    #[test]
    fn more_repetitions_never_lower_the_answer() {
        let mut v: Vec<u32> = (1..=600).collect();
        for i in 0..60 {
            v[i * 10] = 7;
        }
        let items = ids(&v);
        let base = HeavyHitterConfig::new(600, 3, 0.25).known_length(600).seed(11);
        let small = find_heavy(items.clone(), &base).unwrap();
        let mut boosted = base.clone();
        boosted.boost = 4;
        let big = find_heavy(items, &boosted).unwrap();
        assert!(big.count >= small.count);
    }

    #[test]
    fn chunking_does_not_change_the_answer() {
        let items: Vec<ElementId> = (0..5000u32).map(|i| ElementId(1 + (i * 7919) % 900)).collect();
        for cfg in [
            HeavyHitterConfig::new(1000, 3, 0.25).seed(2),
            HeavyHitterConfig::new(1000, 3, 0.25).seed(2).known_length(5000),
        ] {
            let whole = find_heavy_report(items.clone(), &cfg).unwrap();
            let mut hh = HeavyHitter::new(cfg.clone()).unwrap().sequential();
            for x in &items {
                hh.push(*x).unwrap();
            }
            assert_eq!(hh.finish().unwrap(), whole);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn answer_is_a_lower_bound(items in prop::collection::vec(1u32..64, 0..600), seed in any::<u64>(), known in any::<bool>()) {
            let n = 64;
            let stats = ExactStats::from_stream(&StreamView::new(items.clone(), n).unwrap());
            let mut cfg = HeavyHitterConfig::new(n, 3, 0.25).seed(seed);
            if known {
                cfg = cfg.known_length(items.len() as u64);
            }
            let report = find_heavy_report(ids(&items), &cfg).unwrap();
            for e in report.candidates.estimates() {
                prop_assert!(e.count <= stats.frequency(e.element));
            }
            prop_assert!(report.estimate.count <= stats.frequency(report.estimate.element));
        }
    }
}
