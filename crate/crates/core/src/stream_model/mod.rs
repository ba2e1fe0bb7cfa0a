//! Streams over the universe `[1, n]`, their row-major matrix overlay and
//! exact ground-truth statistics.
//!
//! Entry `(i, j)` of an `r x t` overlay (both 1-based) is stream item
//! `p_{(i-1)t + j}`. When the stream length is not a multiple of `t` the
//! last row is padded with [`ElementId::SENTINEL`], which never counts
//! toward any frequency.

pub mod format;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the universe `[1, n]`; `0` is reserved for padding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    pub const SENTINEL: ElementId = ElementId(0);

    #[inline]
    pub fn is_sentinel(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sentinel() {
            f.write_str("none")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<u32> for ElementId {
    fn from(v: u32) -> Self {
        ElementId(v)
    }
}

/// A finite insertion-only stream with a declared universe size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamView {
    items: Vec<ElementId>,
    universe: u64,
}

impl StreamView {
    /// Validates that every item lies in `[1, universe]`.
    pub fn new(items: Vec<u32>, universe: u64) -> Result<Self> {
        Self::from_ids(items.into_iter().map(ElementId).collect(), universe)
    }

    pub fn from_ids(items: Vec<ElementId>, universe: u64) -> Result<Self> {
        if let Some((position, item)) = items
            .iter()
            .enumerate()
            .find(|(_, id)| id.is_sentinel() || u64::from(id.0) > universe)
        {
            return Err(Error::OutOfRange {
                item: u64::from(item.0),
                position,
                universe,
            });
        }
        Ok(StreamView { items, universe })
    }

    pub fn items(&self) -> &[ElementId] {
        &self.items
    }

    pub fn into_items(self) -> Vec<ElementId> {
        self.items
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Row-major `rows x cols` view of a stream, padded with sentinels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixOverlay {
    cells: Vec<ElementId>,
    rows: usize,
    cols: usize,
    padding: usize,
    universe: u64,
}

impl MatrixOverlay {
    /// Lays `stream` out with `cols` columns, padding the last row.
    pub fn new(stream: &StreamView, cols: usize) -> Result<Self> {
        if cols == 0 {
            return Err(Error::InvalidParameter("column count must be positive".into()));
        }
        let m = stream.len();
        let rows = m.div_ceil(cols).max(1);
        let padding = rows * cols - m;
        let mut cells = Vec::with_capacity(rows * cols);
        cells.extend_from_slice(stream.items());
        cells.resize(rows * cols, ElementId::SENTINEL);
        Ok(MatrixOverlay {
            cells,
            rows,
            cols,
            padding,
            universe: stream.universe(),
        })
    }

    /// Builds an overlay from explicit rows of equal length; the universe is
    /// the largest entry.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter(
                "matrix rows must be non-empty and of equal length".into(),
            ));
        }
        let items: Vec<u32> = rows.iter().flatten().copied().collect();
        let universe = u64::from(items.iter().copied().max().unwrap_or(1));
        let stream = StreamView::new(items, universe)?;
        MatrixOverlay::new(&stream, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of sentinel cells appended to the last row.
    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// All cells in row-major order, padding included.
    pub fn cells(&self) -> &[ElementId] {
        &self.cells
    }

    /// The underlying stream items (padding stripped).
    pub fn stream_items(&self) -> &[ElementId] {
        &self.cells[..self.cells.len() - self.padding]
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row == 0 || row > self.rows || col == 0 || col > self.cols {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Row `row` (1-based).
    pub fn row(&self, row: usize) -> Result<&[ElementId]> {
        self.check(row, 1)?;
        let start = (row - 1) * self.cols;
        Ok(&self.cells[start..start + self.cols])
    }

    /// Entry `m_{row,col}` (1-based).
    pub fn entry(&self, row: usize, col: usize) -> Result<ElementId> {
        self.check(row, col)?;
        Ok(self.cells[(row - 1) * self.cols + col - 1])
    }

    /// `d_{i,j}`: occurrences of `m_{i,j}` in row `i` at columns `>= j`.
    pub fn suffix_count(&self, row: usize, col: usize) -> Result<u64> {
        let value = self.entry(row, col)?;
        let r = self.row(row)?;
        Ok(r[col - 1..].iter().filter(|&&x| x == value).count() as u64)
    }

    /// `f_{l,i}`: occurrences of `element` in row `row`; zero for the sentinel.
    pub fn row_frequency(&self, element: ElementId, row: usize) -> Result<u64> {
        if element.is_sentinel() {
            self.check(row, 1)?;
            return Ok(0);
        }
        Ok(self.row(row)?.iter().filter(|&&x| x == element).count() as u64)
    }
}

/// `d_{i,j}` for overlay `ov`.
pub fn suffix_count(ov: &MatrixOverlay, row: usize, col: usize) -> Result<u64> {
    ov.suffix_count(row, col)
}

/// Exact multiplicity of every id in `stream`.
pub fn frequency_vector(stream: &StreamView) -> BTreeMap<ElementId, u64> {
    let mut freqs = BTreeMap::new();
    for &id in stream.items() {
        *freqs.entry(id).or_insert(0) += 1;
    }
    freqs
}

/// Ground truth for a stream: frequencies, optional per-row frequencies of a
/// matrix overlay, and exact moments.
///
/// Holds `O(n)` state; it is oracle infrastructure, not a sketch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactStats {
    freqs: BTreeMap<ElementId, u64>,
    row_freqs: HashMap<(ElementId, usize), u64>,
    len: u64,
    universe: u64,
}

impl ExactStats {
    pub fn from_stream(stream: &StreamView) -> Self {
        ExactStats {
            freqs: frequency_vector(stream),
            row_freqs: HashMap::new(),
            len: stream.len() as u64,
            universe: stream.universe(),
        }
    }

    /// Statistics of the overlay's stream plus `f_{l,i}` for every row.
    pub fn from_overlay(ov: &MatrixOverlay) -> Self {
        let mut freqs = BTreeMap::new();
        let mut row_freqs = HashMap::new();
        for (pos, &id) in ov.cells().iter().enumerate() {
            if id.is_sentinel() {
                continue;
            }
            *freqs.entry(id).or_insert(0) += 1;
            *row_freqs.entry((id, pos / ov.cols() + 1)).or_insert(0) += 1;
        }
        ExactStats {
            freqs,
            row_freqs,
            len: ov.stream_items().len() as u64,
            universe: ov.universe(),
        }
    }

    pub fn frequencies(&self) -> &BTreeMap<ElementId, u64> {
        &self.freqs
    }

    pub fn frequency(&self, id: ElementId) -> u64 {
        self.freqs.get(&id).copied().unwrap_or(0)
    }

    /// `f_{l,i}`; zero unless built with [`ExactStats::from_overlay`].
    pub fn row_frequency(&self, id: ElementId, row: usize) -> u64 {
        self.row_freqs.get(&(id, row)).copied().unwrap_or(0)
    }

    /// Stream length `m` (equals `F_1`).
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn distinct(&self) -> usize {
        self.freqs.len()
    }

    /// `F_k = sum_i f_i^k` in exact 128-bit arithmetic.
    pub fn moment(&self, k: u32) -> Result<u128> {
        if k == 0 {
            return Err(Error::InvalidParameter("moment order must be >= 1".into()));
        }
        self.freqs.values().try_fold(0u128, |acc, &f| {
            u128::from(f)
                .checked_pow(k)
                .and_then(|p| acc.checked_add(p))
                .ok_or(Error::Overflow { k })
        })
    }

    /// `G_k = F_k - f_excluded^k`.
    pub fn residual_moment(&self, k: u32, excluded: ElementId) -> Result<u128> {
        let total = self.moment(k)?;
        let own = u128::from(self.frequency(excluded))
            .checked_pow(k)
            .ok_or(Error::Overflow { k })?;
        Ok(total - own)
    }

    /// Most frequent element, ties broken toward the smaller id.
    pub fn max_element(&self) -> Option<(ElementId, u64)> {
        self.freqs
            .iter()
            .fold(None, |best: Option<(ElementId, u64)>, (&id, &f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((id, f)),
            })
    }

    /// Whether `id` is heavy: `f_id^k > 100 * sum_{j != id} f_j^k`.
    pub fn is_heavy(&self, id: ElementId, k: u32) -> Result<bool> {
        let own = u128::from(self.frequency(id))
            .checked_pow(k)
            .ok_or(Error::Overflow { k })?;
        let rest = self.residual_moment(k, id)?;
        Ok(match rest.checked_mul(100) {
            Some(bound) => own > bound,
            None => false,
        })
    }
}

/// `F_k` of `stats`.
pub fn moment(stats: &ExactStats, k: u32) -> Result<u128> {
    stats.moment(k)
}

/// `G_k` of `stats` with respect to `excluded`.
pub fn residual_moment(stats: &ExactStats, k: u32, excluded: ElementId) -> Result<u128> {
    stats.residual_moment(k, excluded)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn stream(items: &[u32]) -> StreamView {
        let n = items.iter().copied().max().unwrap_or(1).into();
        StreamView::new(items.to_vec(), n).unwrap()
    }

    fn ids(pairs: &[(u32, u64)]) -> BTreeMap<ElementId, u64> {
        pairs.iter().map(|&(k, v)| (ElementId(k), v)).collect()
    }

    #[test]
    fn frequency_vector_examples() {
        assert_eq!(frequency_vector(&stream(&[1, 2, 1, 3])), ids(&[(1, 2), (2, 1), (3, 1)]));
        assert!(frequency_vector(&stream(&[])).is_empty());
        assert_eq!(frequency_vector(&stream(&[5, 5, 5, 5])), ids(&[(5, 4)]));
    }

    #[test]
    fn out_of_range_items_are_rejected() {
        assert!(matches!(
            StreamView::new(vec![1, 9, 2], 8),
            Err(Error::OutOfRange { item: 9, position: 1, universe: 8 })
        ));
        assert!(matches!(
            StreamView::new(vec![0], 8),
            Err(Error::OutOfRange { item: 0, .. })
        ));
    }

    #[test]
    fn moment_examples() {
        let s = ExactStats::from_stream(&stream(&[1, 2, 1, 3]));
        assert_eq!(s.moment(3).unwrap(), 10);
        assert_eq!(s.moment(1).unwrap(), 4);
        let s = ExactStats::from_stream(&stream(&[1, 1, 1]));
        assert_eq!(s.moment(2).unwrap(), 9);
        assert!(s.moment(0).is_err());
    }

    #[test]
    fn moment_overflow_is_an_error() {
        let items = vec![1u32; 1 << 17];
        let s = ExactStats::from_stream(&StreamView::new(items, 1).unwrap());
        assert_eq!(s.moment(7).unwrap(), 1u128 << 119);
        assert!(matches!(s.moment(8), Err(Error::Overflow { k: 8 })));
    }

    #[test]
    fn residual_moment_examples() {
        let s = ExactStats::from_stream(&stream(&[1, 1, 1, 2]));
        assert_eq!(s.residual_moment(2, ElementId(1)).unwrap(), 1);
        assert_eq!(s.residual_moment(2, ElementId(3)).unwrap(), 10);
        let distinct: Vec<u32> = (1..=9).collect();
        let s = ExactStats::from_stream(&stream(&distinct));
        for k in 1..=5 {
            assert_eq!(s.residual_moment(k, ElementId(1)).unwrap(), 8);
        }
    }

    #[test]
    fn suffix_count_examples() {
        let ov = MatrixOverlay::from_rows(&[vec![7, 7, 7]]).unwrap();
        assert_eq!(ov.suffix_count(1, 2).unwrap(), 2);
        let ov = MatrixOverlay::from_rows(&[vec![1, 2, 3]]).unwrap();
        for j in 1..=3 {
            assert_eq!(suffix_count(&ov, 1, j).unwrap(), 1);
        }
        let ov = MatrixOverlay::from_rows(&[vec![2, 1, 2, 1]]).unwrap();
        assert_eq!(ov.suffix_count(1, 1).unwrap(), 2);
        assert!(matches!(ov.suffix_count(2, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(ov.suffix_count(1, 0).is_err());
        assert!(ov.suffix_count(1, 5).is_err());
    }

    #[test]
    fn padding_uses_sentinels() {
        let ov = MatrixOverlay::new(&stream(&[1, 2, 3, 4, 5]), 2).unwrap();
        assert_eq!((ov.rows(), ov.cols(), ov.padding()), (3, 2, 1));
        assert_eq!(ov.entry(3, 2).unwrap(), ElementId::SENTINEL);
        assert_eq!(ov.stream_items().len(), 5);
        let stats = ExactStats::from_overlay(&ov);
        assert_eq!(stats.len(), 5);
        assert_eq!(stats.frequency(ElementId::SENTINEL), 0);
        assert_eq!(ov.row_frequency(ElementId::SENTINEL, 3).unwrap(), 0);
    }

    #[test]
    fn empty_stream_has_zero_moments() {
        let s = ExactStats::from_stream(&stream(&[]));
        for k in 1..=8 {
            assert_eq!(s.moment(k).unwrap(), 0);
        }
        assert!(s.max_element().is_none());
    }

    #[test]
    fn heavy_definition() {
        // 5^3 = 125 > 100 * 1
        let s = ExactStats::from_stream(&stream(&[1, 1, 1, 1, 1, 2]));
        assert!(s.is_heavy(ElementId(1), 3).unwrap());
        assert!(!s.is_heavy(ElementId(1), 2).unwrap());
        assert!(!s.is_heavy(ElementId(2), 3).unwrap());
    }

    fn arb_stream() -> impl Strategy<Value = (Vec<u32>, u32)> {
        (1u32..40).prop_flat_map(|n| (prop::collection::vec(1..=n, 0..200), Just(n)))
    }

    proptest! {
        #[test]
        fn frequencies_sum_to_length((items, n) in arb_stream()) {
            let s = StreamView::new(items.clone(), n.into()).unwrap();
            let stats = ExactStats::from_stream(&s);
            prop_assert_eq!(stats.frequencies().values().sum::<u64>(), items.len() as u64);
            prop_assert_eq!(stats.moment(1).unwrap(), items.len() as u128);
        }

        #[test]
        fn residual_plus_own_is_moment((items, n) in arb_stream(), k in 1u32..6, x in 1u32..45) {
            let stats = ExactStats::from_stream(&StreamView::new(items, n.into()).unwrap());
            let own = u128::from(stats.frequency(ElementId(x))).pow(k);
            prop_assert_eq!(stats.residual_moment(k, ElementId(x)).unwrap() + own, stats.moment(k).unwrap());
        }

        #[test]
        fn overlay_flattens_to_stream((items, n) in arb_stream(), t in 1usize..12) {
            let s = StreamView::new(items.clone(), n.into()).unwrap();
            let ov = MatrixOverlay::new(&s, t).unwrap();
            prop_assert_eq!(ov.rows() * ov.cols(), ov.cells().len());
            prop_assert!(ov.padding() < t || items.is_empty());
            let flat: Vec<u32> = ov.stream_items().iter().map(|id| id.0).collect();
            prop_assert_eq!(flat, items);
            for i in 1..=ov.rows() {
                prop_assert_eq!(ov.suffix_count(i, t).unwrap(), 1);
                for j in 1..=t {
                    prop_assert_eq!(ov.entry(i, j).unwrap(), ov.cells()[(i - 1) * t + j - 1]);
                }
            }
        }
    }
}
