//! The two-case promise problem and its duplicate-check sampler.
//!
//! The stream is an `r x t` matrix with `r = ceil(n^(1/k))` and `rt <= n`.
//! Case 1: all frequencies are 0 or 1. Case 2: one id `z` appears exactly
//! once in every row and all others at most once. One repetition of the
//! sampler draws a column per row and, for rows `1..r-1`, looks for a
//! duplicate of the sampled cell in the next row; any hit answers "case 2".
//!
//! A repetition that samples `z` in one of rows `1..r-1` always finds its
//! duplicate. Sampling `z` only in row `r` is not checked, so the decision
//! misses with probability `(1 - 1/t)^((r-1)T)`, slightly above the
//! probability `(1 - 1/t)^(rT)` of never sampling `z` at all. Both are
//! reported.

use serde::{Deserialize, Serialize};

use super::Probability;
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorSpec, Kind};
use crate::pick_drop::draw_column;
use crate::rng::{derive_seed, rng_from_seed, RunRng};
use crate::stream_model::ElementId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    Case1,
    Case2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromiseConfig {
    pub universe: u64,
    pub k: u32,
    /// Repetitions `T`; defaults to the smallest with
    /// `(1 - 1/t)^((r-1)T) < 1/3`.
    pub reps: Option<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl PromiseConfig {
    pub fn new(universe: u64, k: u32, trials: u64) -> Self {
        PromiseConfig {
            universe,
            k,
            reps: None,
            trials,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromiseReport {
    pub universe: u64,
    pub k: u32,
    pub rows: u64,
    pub cols: u64,
    pub reps: u64,
    pub trials: u64,
    /// Case-1 inputs answered "case 2".
    pub case1_false_positives: u64,
    /// Case-2 inputs on which no repetition sampled `z` in any row.
    pub case2_never_sampled: Probability,
    /// Case-2 inputs answered "case 1".
    pub case2_misses: Probability,
    /// `(1 - 1/t)^(rT)`
    pub never_sampled_bound: f64,
    /// `(1 - 1/t)^((r-1)T)`
    pub miss_bound: f64,
}

impl PromiseReport {
    pub fn case1_clean(&self) -> bool {
        self.case1_false_positives == 0
    }

    pub fn never_sampled_within_bound(&self) -> bool {
        self.case2_never_sampled.at_most(self.never_sampled_bound)
    }

    pub fn misses_within_bound(&self) -> bool {
        self.case2_misses.at_most(self.miss_bound)
    }
}

/// One run of the sampler over the rows of `matrix`; also reports whether
/// any repetition sampled `z`.
pub fn decide(
    matrix: &[ElementId],
    cols: usize,
    reps: u64,
    z: Option<ElementId>,
    rng: &mut RunRng,
) -> (Answer, bool) {
    let rows: Vec<&[ElementId]> = matrix.chunks(cols).collect();
    let mut answer = Answer::Case1;
    let mut sampled_z = false;
    for _ in 0..reps {
        for (i, row) in rows.iter().enumerate() {
            let x = row[draw_column(rng, cols as u64) as usize - 1];
            sampled_z |= Some(x) == z;
            if answer == Answer::Case1 && i + 1 < rows.len() && rows[i + 1].contains(&x) {
                answer = Answer::Case2;
            }
        }
    }
    (answer, sampled_z)
}

/// Smallest `T` with `(1 - 1/t)^(e T) < 1/3`.
pub fn default_reps(rows: u64, cols: u64) -> u64 {
    let e = rows.saturating_sub(1).max(1) as f64;
    let q = 1.0 - 1.0 / cols as f64;
    (1..)
        .find(|&t| q.powf(e * t as f64) < 1.0 / 3.0)
        .expect("bound decreases in T")
}

pub fn promise_problem_experiment(cfg: &PromiseConfig) -> Result<PromiseReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let shape = GeneratorSpec::new(Kind::PromiseCase1, cfg.universe, 0);
    let shape = GeneratorSpec { k: cfg.k, ..shape };
    let rows = shape.promise_rows();
    let cols = cfg.universe / rows;
    if cols < 2 {
        return Err(Error::InvalidParameter(format!(
            "n = {} leaves fewer than two columns",
            cfg.universe
        )));
    }
    let reps = cfg.reps.unwrap_or_else(|| default_reps(rows, cols));
    let mut false_positives = 0;
    let mut never = 0;
    let mut misses = 0;
    for trial in 0..cfg.trials {
        for case2 in [false, true] {
            let spec = GeneratorSpec {
                kind: if case2 { Kind::PromiseCase2 } else { Kind::PromiseCase1 },
                seed: derive_seed(cfg.seed, &[trial, u64::from(case2)]),
                ..shape.clone()
            };
            let stream = generate(&spec)?;
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[trial, u64::from(case2), 1]));
            let z = case2.then_some(ElementId(spec.heavy_id));
            let (answer, sampled) = decide(stream.items(), cols as usize, reps, z, &mut rng);
            match (case2, answer) {
                (false, Answer::Case2) => false_positives += 1,
                (true, Answer::Case1) => misses += 1,
                _ => {}
            }
            if case2 && !sampled {
                never += 1;
            }
        }
    }
    let q = 1.0 - 1.0 / cols as f64;
    Ok(PromiseReport {
        universe: cfg.universe,
        k: cfg.k,
        rows,
        cols,
        reps,
        trials: cfg.trials,
        case1_false_positives: false_positives,
        case2_never_sampled: Probability::estimated(never, cfg.trials),
        case2_misses: Probability::estimated(misses, cfg.trials),
        never_sampled_bound: q.powf((rows * reps) as f64),
        miss_bound: q.powf(((rows - 1) * reps) as f64),
    })
}
