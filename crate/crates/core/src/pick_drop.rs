//! A single pick-and-drop run.
//!
//! Row `i` draws a column `I_i` uniformly from `[1, t]`. The local sample is
//! `s_i = m_{i,I_i}` with local counter `c_i = d_{i,I_i}`, its occurrences in
//! the row from `I_i` on. The first row initializes the global state to
//! `(S_1, C_1, q_1) = (s_1, c_1, 1)`. Every later row either picks the local
//! sample, when `C_{i-1} < max(lambda * q_{i-1}, c_i)`, setting
//! `(S_i, C_i, q_i) = (s_i, c_i, 1)`, or keeps the global sample and adds its
//! whole-row count: `(S_{i-1}, C_{i-1} + f_{S_{i-1},i}, q_{i-1} + 1)`.
//! Ties keep the global sample.
//!
//! `C_i` only ever counts real occurrences of `S_i`, so the output count is
//! a lower bound on the true frequency for every stream and every seed.

use rand::distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, RunRng};
use crate::stream_model::{ElementId, MatrixOverlay};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickDropConfig {
    pub rows: u64,
    pub cols: u64,
    pub lambda: u64,
    pub seed: u64,
}

impl PickDropConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.lambda == 0 {
            return Err(Error::InvalidParameter(format!(
                "rows, cols and lambda must be positive (got {}, {}, {})",
                self.rows, self.cols, self.lambda
            )));
        }
        Ok(())
    }

    /// `r * t`, the number of cells the run consumes.
    pub fn cells(&self) -> u64 {
        self.rows * self.cols
    }
}

/// An element paired with a lower bound on its frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Estimate {
    pub element: ElementId,
    pub count: u64,
}

impl Estimate {
    pub const fn new(element: ElementId, count: u64) -> Self {
        Estimate { element, count }
    }

    /// The "no sample" estimate: a failed repetition.
    pub const fn sentinel() -> Self {
        Estimate {
            element: ElementId::SENTINEL,
            count: 0,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        self.element.is_sentinel()
    }

    /// Whether `self` should replace `other` as the running best: larger
    /// count wins, equal counts go to the smaller non-sentinel id.
    pub fn beats(&self, other: &Estimate) -> bool {
        if self.is_sentinel() {
            return false;
        }
        if other.is_sentinel() {
            return true;
        }
        self.count > other.count || (self.count == other.count && self.element < other.element)
    }

    /// Commutative, associative max with the [`Estimate::beats`] order.
    pub fn max(self, other: Estimate) -> Estimate {
        if other.beats(&self) {
            other
        } else {
            self
        }
    }
}

/// Supplies the column `I_i` for each row.
pub trait ColumnSource {
    /// A column in `[1, cols]`.
    fn next_column(&mut self, cols: u64) -> u64;
}

impl ColumnSource for RunRng {
    #[inline]
    fn next_column(&mut self, cols: u64) -> u64 {
        draw_column(self, cols)
    }
}

/// Uniform column in `[1, cols]` by threshold rejection.
#[inline]
pub fn draw_column<R: rand::Rng + ?Sized>(rng: &mut R, cols: u64) -> u64 {
    Uniform::new_inclusive(1, cols)
        .expect("cols >= 1")
        .sample(rng)
}

/// Replays a fixed sequence of columns, one per row.
#[derive(Clone, Debug)]
pub struct FixedColumns {
    columns: Vec<u64>,
    next: usize,
}

impl FixedColumns {
    pub fn new(columns: Vec<u64>) -> Self {
        FixedColumns { columns, next: 0 }
    }
}

impl ColumnSource for FixedColumns {
    fn next_column(&mut self, cols: u64) -> u64 {
        let c = self.columns[self.next];
        self.next += 1;
        assert!((1..=cols).contains(&c), "column {c} outside [1, {cols}]");
        c
    }
}

/// The recurrence state of one run: the global triple `(S, C, q)` and the
/// scratch of the row in progress. Fixed size, independent of `m` and `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PickDropState {
    global: ElementId,
    global_count: u64,
    survived: u64,
    rows_done: u64,
    pick_col: u64,
    local: ElementId,
    local_count: u64,
    global_in_row: u64,
}

impl PickDropState {
    /// Counters and ids held by the state; used by space accounting.
    pub const WORDS: usize = 7;

    pub const fn new() -> Self {
        PickDropState {
            global: ElementId::SENTINEL,
            global_count: 0,
            survived: 0,
            rows_done: 0,
            pick_col: 0,
            local: ElementId::SENTINEL,
            local_count: 0,
            global_in_row: 0,
        }
    }

    /// Starts a row whose local sample sits at `pick_col`.
    #[inline]
    pub fn begin_row(&mut self, pick_col: u64) {
        self.pick_col = pick_col;
        self.local = ElementId::SENTINEL;
        self.local_count = 0;
        self.global_in_row = 0;
    }

    /// Feeds the cell at 1-based column `col` of the current row.
    #[inline]
    pub fn observe(&mut self, col: u64, item: ElementId) {
        if item.is_sentinel() {
            return;
        }
        if item == self.global {
            self.global_in_row += 1;
        }
        if col == self.pick_col {
            self.local = item;
            self.local_count = 1;
        } else if col > self.pick_col && item == self.local {
            self.local_count += 1;
        }
    }

    /// Closes the current row and applies the pick-or-keep rule.
    #[inline]
    pub fn end_row(&mut self, lambda: u64) {
        let pick = self.rows_done == 0
            || self.global_count < (lambda.saturating_mul(self.survived)).max(self.local_count);
        if pick {
            self.global = self.local;
            self.global_count = self.local_count;
            self.survived = 1;
        } else {
            self.global_count += self.global_in_row;
            self.survived += 1;
        }
        self.global_in_row = 0;
        self.rows_done += 1;
    }

    /// `(S_i, C_i)` after the last completed row.
    pub fn estimate(&self) -> Estimate {
        if self.global.is_sentinel() {
            Estimate::sentinel()
        } else {
            Estimate::new(self.global, self.global_count)
        }
    }

    pub fn rows_done(&self) -> u64 {
        self.rows_done
    }

    pub fn survived(&self) -> u64 {
        self.survived
    }
}

/// Pull-free streaming driver: push items one at a time.
#[derive(Clone, Debug)]
pub struct PickDrop<C = RunRng> {
    cfg: PickDropConfig,
    state: PickDropState,
    columns: C,
    col: u64,
    seen: u64,
}

impl PickDrop<RunRng> {
    pub fn new(cfg: PickDropConfig) -> Result<Self> {
        Self::with_columns(cfg, rng_from_seed(cfg.seed))
    }
}

impl<C: ColumnSource> PickDrop<C> {
    pub fn with_columns(cfg: PickDropConfig, columns: C) -> Result<Self> {
        cfg.validate()?;
        Ok(PickDrop {
            cfg,
            state: PickDropState::new(),
            columns,
            col: 0,
            seen: 0,
        })
    }

    #[inline]
    pub fn push(&mut self, item: ElementId) -> Result<()> {
        if self.seen == self.cfg.cells() {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.cells(),
                actual: self.seen + 1,
            });
        }
        if self.col == 0 {
            self.state.begin_row(self.columns.next_column(self.cfg.cols));
        }
        self.col += 1;
        self.seen += 1;
        self.state.observe(self.col, item);
        if self.col == self.cfg.cols {
            self.state.end_row(self.cfg.lambda);
            self.col = 0;
        }
        Ok(())
    }

    pub fn state(&self) -> &PickDropState {
        &self.state
    }

    pub fn finish(self) -> Result<Estimate> {
        if self.seen != self.cfg.cells() {
            return Err(Error::PrematureEnd {
                seen: self.seen,
                expected: self.cfg.cells(),
            });
        }
        Ok(self.state.estimate())
    }
}

/// One run over a materialized overlay, evaluating `d_{i,I_i}` and
/// `f_{S,i}` directly on the matrix.
///
/// Draws the same columns, in the same order, as [`run_streaming`] with the
/// same seed, so both return the same estimate.
pub fn run(ov: &MatrixOverlay, cfg: &PickDropConfig) -> Result<Estimate> {
    cfg.validate()?;
    if ov.rows() as u64 != cfg.rows || ov.cols() as u64 != cfg.cols {
        return Err(Error::DimensionMismatch {
            expected: cfg.cells(),
            actual: ov.cells().len() as u64,
        });
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut global = ElementId::SENTINEL;
    let mut count = 0u64;
    let mut survived = 0u64;
    for i in 1..=ov.rows() {
        let col = draw_column(&mut rng, cfg.cols) as usize;
        let local = ov.entry(i, col)?;
        let local_count = if local.is_sentinel() {
            0
        } else {
            ov.suffix_count(i, col)?
        };
        if i == 1 || count < (cfg.lambda.saturating_mul(survived)).max(local_count) {
            global = local;
            count = local_count;
            survived = 1;
        } else {
            count += ov.row_frequency(global, i)?;
            survived += 1;
        }
    }
    Ok(if global.is_sentinel() {
        Estimate::sentinel()
    } else {
        Estimate::new(global, count)
    })
}

/// One run consuming `items` exactly once; the source must yield exactly
/// `rows * cols` items (sentinel padding included).
pub fn run_streaming<I>(items: I, cfg: &PickDropConfig) -> Result<Estimate>
where
    I: IntoIterator<Item = ElementId>,
{
    let mut pd = PickDrop::new(*cfg)?;
    let mut items = items.into_iter();
    for _ in 0..cfg.cells() {
        match items.next() {
            Some(item) => pd.push(item)?,
            None => {
                return Err(Error::PrematureEnd {
                    seen: pd.seen,
                    expected: cfg.cells(),
                })
            }
        }
    }
    if items.next().is_some() {
        return Err(Error::DimensionMismatch {
            expected: cfg.cells(),
            actual: cfg.cells() + 1,
        });
    }
    pd.finish()
}
