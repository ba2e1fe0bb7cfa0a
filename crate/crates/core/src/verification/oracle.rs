//! Exact law of a run's output.
//!
//! A run's only randomness is the column tuple `(I_1, ..., I_r)`, uniform
//! over `[t]^r`. [`exact_distribution`] replays the recurrence once per
//! tuple from precomputed tables, so it shares no code with the sampler it
//! checks.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pick_drop::Estimate;
use crate::rng::RunRng;
use crate::stream_model::{ElementId, MatrixOverlay};

/// Largest `t^r` the enumeration accepts.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

/// Per-cell suffix counts and per-row frequencies of an overlay.
#[derive(Clone, Debug)]
pub struct ReplayTable {
    rows: usize,
    cols: usize,
    /// `(m_{i,j}, d_{i,j})` row-major, `d = 0` on sentinel cells.
    cells: Vec<(ElementId, u64)>,
    row_freq: Vec<HashMap<ElementId, u64>>,
}

impl ReplayTable {
    pub fn new(ov: &MatrixOverlay) -> Self {
        let (rows, cols) = (ov.rows(), ov.cols());
        let mut cells = Vec::with_capacity(rows * cols);
        let mut row_freq = Vec::with_capacity(rows);
        for row in ov.cells().chunks(cols) {
            let mut seen: HashMap<ElementId, u64> = HashMap::new();
            let mut suffix = vec![0u64; cols];
            for j in (0..cols).rev() {
                let x = row[j];
                if !x.is_sentinel() {
                    let c = seen.entry(x).or_insert(0);
                    *c += 1;
                    suffix[j] = *c;
                }
            }
            cells.extend(row.iter().copied().zip(suffix));
            row_freq.push(seen);
        }
        ReplayTable {
            rows,
            cols,
            cells,
            row_freq,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The recurrence under `column(i)`, a 0-based column for 0-based row `i`.
    pub fn replay(&self, lambda: u64, mut column: impl FnMut(usize) -> usize) -> Estimate {
        let (mut s, mut c, mut q) = (ElementId::SENTINEL, 0u64, 0u64);
        for i in 0..self.rows {
            let (si, ci) = self.cells[i * self.cols + column(i)];
            if i == 0 || c < (lambda.saturating_mul(q)).max(ci) {
                (s, c, q) = (si, ci, 1);
            } else {
                c += self.row_freq[i].get(&s).copied().unwrap_or(0);
                q += 1;
            }
        }
        if s.is_sentinel() {
            Estimate::sentinel()
        } else {
            Estimate::new(s, c)
        }
    }

    /// One replay with columns drawn from `rng`.
    pub fn sample(&self, lambda: u64, rng: &mut RunRng) -> Estimate {
        self.replay(lambda, |_| {
            crate::pick_drop::draw_column(rng, self.cols as u64) as usize - 1
        })
    }
}

/// One outcome of the exact law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub element: ElementId,
    pub count: u64,
    /// Column tuples producing this outcome.
    pub tuples: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    tuples: u64,
    counts: BTreeMap<(ElementId, u64), u64>,
}

impl ExactDistribution {
    /// `t^r`.
    pub fn tuples(&self) -> u64 {
        self.tuples
    }

    pub fn probability(&self, e: Estimate) -> f64 {
        self.counts.get(&(e.element, e.count)).copied().unwrap_or(0) as f64 / self.tuples as f64
    }

    /// Tuples ending on `element`, with any count.
    pub fn element_tuples(&self, element: ElementId) -> u64 {
        self.counts
            .iter()
            .filter(|((id, _), _)| *id == element)
            .map(|(_, &n)| n)
            .sum()
    }

    pub fn element_probability(&self, element: ElementId) -> f64 {
        self.element_tuples(element) as f64 / self.tuples as f64
    }

    /// Law of the output count.
    pub fn count_law(&self) -> BTreeMap<u64, f64> {
        let mut law = BTreeMap::new();
        for (&(_, c), &n) in &self.counts {
            *law.entry(c).or_insert(0.0) += n as f64 / self.tuples as f64;
        }
        law
    }

    pub fn outcomes(&self) -> Vec<Outcome> {
        self.counts
            .iter()
            .map(|(&(element, count), &tuples)| Outcome {
                element,
                count,
                tuples,
                probability: tuples as f64 / self.tuples as f64,
            })
            .collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.counts.values().sum::<u64>() as f64 / self.tuples as f64
    }
}

/// `t^r` for the overlay, or [`Error::GuardExceeded`] past the guard.
pub fn tuple_count(ov: &MatrixOverlay) -> Result<u64> {
    let tuples = (ov.cols() as u128).checked_pow(ov.rows() as u32);
    match tuples {
        Some(n) if n <= ENUMERATION_GUARD => Ok(n as u64),
        _ => Err(Error::GuardExceeded {
            tuples: tuples.unwrap_or(u128::MAX),
            limit: ENUMERATION_GUARD,
        }),
    }
}

/// Exact law of `(S_r, C_r)` over all `t^r` column tuples.
pub fn exact_distribution(ov: &MatrixOverlay, lambda: u64) -> Result<ExactDistribution> {
    if lambda == 0 {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let tuples = tuple_count(ov)?;
    let table = ReplayTable::new(ov);
    let (rows, cols) = (ov.rows(), ov.cols());
    let mut tuple = vec![0usize; rows];
    let mut counts = BTreeMap::new();
    for _ in 0..tuples {
        let e = table.replay(lambda, |i| tuple[i]);
        *counts.entry((e.element, e.count)).or_insert(0) += 1;
        for slot in tuple.iter_mut().rev() {
            *slot += 1;
            if *slot < cols {
                break;
            }
            *slot = 0;
        }
    }
    Ok(ExactDistribution { tuples, counts })
}
