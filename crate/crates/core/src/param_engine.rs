//! Matrix shape, drop threshold and repetition schedule.
//!
//! With `G_k` the residual moment of the candidate heavy element:
//!
//! ```text
//! psi    = n^(1 - 1/k) * G_k^(1/k) / F_1
//! delta  = 2^ceil(0.5 * log2(psi))
//! t      = ceil(delta * F_1 / n^(1/k))
//! lambda = ceil(F_1 * delta^3 / n)
//! r      = ceil(F_1 / t)          (last row padded with sentinels)
//! ```
//!
//! When `G_k` is unknown the finder runs every `delta` of [`delta_grid`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream_model::{ElementId, ExactStats};

pub const DEFAULT_REPS_CONSTANT: f64 = 4.0;

/// Fraction of the stream above which the counter-based fallback takes over.
pub const FALLBACK_BETA: f64 = 0.1;

const SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    /// `None` when `delta` came from the grid or an override.
    pub psi: Option<f64>,
    pub delta: u64,
    pub cols: u64,
    pub lambda: u64,
    pub rows: u64,
    /// `F_1` the shape was derived for.
    pub stream_len: u64,
    /// Sentinel cells needed to fill `rows * cols`.
    pub padding: u64,
    /// Set when `0.5 * log2(psi)` fell outside the admissible delta range.
    pub delta_clamped: bool,
}

impl ParamSet {
    /// `t > F_1`: the matrix degenerates to a single short row and the
    /// counter-based fallback is the meaningful answer.
    pub fn needs_fallback(&self) -> bool {
        self.cols > self.stream_len
    }

    pub fn cells(&self) -> u64 {
        self.rows * self.cols
    }
}

fn check_order(n: u64, k: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("universe size {n} < 2")));
    }
    if k < 3 {
        return Err(Error::InvalidParameter(format!("moment order {k} < 3")));
    }
    Ok(())
}

/// `n^(1/k)`, exact when `n` is a perfect k-th power.
pub fn kth_root(n: u64, k: u32) -> f64 {
    let approx = (n as f64).powf(1.0 / f64::from(k));
    let rounded = approx.round();
    if rounded >= 1.0 && (rounded as u128).checked_pow(k) == Some(u128::from(n)) {
        rounded
    } else {
        approx
    }
}

/// `2 * n^((k-1)/(2k))`, the largest admissible delta.
pub fn delta_upper_bound(n: u64, k: u32) -> f64 {
    let k = f64::from(k);
    2.0 * (n as f64).powf((k - 1.0) / (2.0 * k))
}

fn max_delta_exponent(n: u64, k: u32) -> u32 {
    let bound = delta_upper_bound(n, k);
    let mut e = 0u32;
    while 2f64.powi(e as i32 + 1) <= bound * (1.0 + SNAP_TOLERANCE) {
        e += 1;
    }
    e
}

/// `ceil(x)`, treating values within rounding noise of an integer as that integer.
fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOLERANCE * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Shape for a given `delta` and stream length.
pub fn params_for_delta(n: u64, k: u32, stream_len: u64, delta: u64) -> Result<ParamSet> {
    check_order(n, k)?;
    if stream_len == 0 {
        return Err(Error::InvalidParameter("stream length must be >= 1".into()));
    }
    if delta == 0 || !delta.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("delta {delta} is not a power of two")));
    }
    let root = kth_root(n, k);
    let cols = if root.fract() == 0.0 {
        (u128::from(delta) * u128::from(stream_len))
            .div_ceil(root as u128)
            .max(1)
    } else {
        snapped_ceil(delta as f64 * stream_len as f64 / root).max(1.0) as u128
    };
    let cols = u64::try_from(cols).map_err(|_| Error::InvalidParameter("t overflows".into()))?;
    let lambda = (u128::from(stream_len) * u128::from(delta).pow(3))
        .div_ceil(u128::from(n))
        .max(1);
    let lambda = u64::try_from(lambda).map_err(|_| Error::InvalidParameter("lambda overflows".into()))?;
    let rows = stream_len.div_ceil(cols);
    Ok(ParamSet {
        psi: None,
        delta,
        cols,
        lambda,
        rows,
        stream_len,
        padding: rows * cols - stream_len,
        delta_clamped: false,
    })
}

/// Parameters from known stream statistics.
///
/// Returns [`Error::Degenerate`] when `G_k = 0`: the stream holds a single
/// distinct element and needs no sampling.
pub fn derive_params(n: u64, k: u32, stream_len: u64, residual: u128) -> Result<ParamSet> {
    check_order(n, k)?;
    if stream_len == 0 {
        return Err(Error::InvalidParameter("stream length must be >= 1".into()));
    }
    if residual == 0 {
        return Err(Error::Degenerate);
    }
    let kf = f64::from(k);
    let psi = (n as f64).powf(1.0 - 1.0 / kf) * (residual as f64).powf(1.0 / kf) / stream_len as f64;
    let raw = snapped_ceil(0.5 * psi.log2());
    let max_e = max_delta_exponent(n, k);
    let exponent = raw.clamp(0.0, f64::from(max_e));
    let mut p = params_for_delta(n, k, stream_len, 1u64 << exponent as u32)?;
    p.psi = Some(psi);
    p.delta_clamped = exponent != raw;
    Ok(p)
}

/// Every power of two in `[1, 2 * n^((k-1)/(2k))]`, ascending.
pub fn delta_grid(n: u64, k: u32) -> Result<Vec<u64>> {
    check_order(n, k)?;
    Ok((0..=max_delta_exponent(n, k)).map(|e| 1u64 << e).collect())
}

/// `T = ceil(c_T * n^(1 - 2/k) / (eps * delta))` independent runs for one delta.
pub fn repetitions(n: u64, k: u32, eps: f64, delta: u64, reps_constant: f64) -> Result<u64> {
    check_order(n, k)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} outside (0, 1)")));
    }
    if reps_constant.is_nan() || reps_constant <= 0.0 {
        return Err(Error::InvalidParameter("repetition constant must be positive".into()));
    }
    let scale = (n as f64).powf(1.0 - 2.0 / f64::from(k));
    Ok(snapped_ceil(reps_constant * scale / (eps * delta as f64)).max(1.0) as u64)
}

/// Counters for the fallback summary: enough that its additive error
/// `m / (K + 1)` stays below `eps * f` whenever `f >= beta * m`.
pub fn fallback_counters(eps: f64, beta: f64) -> usize {
    (1.0 / (eps * beta)).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(lhs: f64, rhs: f64) -> Self {
        Inequality {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + 1e-12),
        }
    }
}

/// Concrete check of the three bounds that tie the parameters to `G_k^(1/k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SanityReport {
    /// `lambda * r <= 4 * G_k^(1/k)`
    pub lambda_rows: Inequality,
    /// `G_2 / t <= G_k^(1/k)`
    pub second_moment: Inequality,
    /// `G_3 / (lambda * t) <= G_k^(1/k)`
    pub third_moment: Inequality,
}

impl SanityReport {
    pub fn all_hold(&self) -> bool {
        self.lambda_rows.holds && self.second_moment.holds && self.third_moment.holds
    }
}

pub fn sanity_inequalities(
    stats: &ExactStats,
    p: &ParamSet,
    k: u32,
    heavy: ElementId,
) -> Result<SanityReport> {
    let gk = stats.residual_moment(k, heavy)? as f64;
    let g2 = stats.residual_moment(2, heavy)? as f64;
    let g3 = stats.residual_moment(3, heavy)? as f64;
    let root = gk.powf(1.0 / f64::from(k));
    let (t, lambda, r) = (p.cols as f64, p.lambda as f64, p.rows as f64);
    Ok(SanityReport {
        lambda_rows: Inequality::new(lambda * r, 4.0 * root),
        second_moment: Inequality::new(g2 / t, root),
        third_moment: Inequality::new(g3 / (lambda * t), root),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::stream_model::StreamView;

    #[test]
    fn worked_example() {
        // psi = 16^(2/3) * 64^(1/3) / 64 = 6.3496 * 4 / 64
        let p = derive_params(16, 3, 64, 64).unwrap();
        assert!((p.psi.unwrap() - 0.396_850_262_992_05).abs() < 1e-9);
        assert_eq!(p.delta, 1);
        assert_eq!(p.cols, 26);
        assert_eq!(p.lambda, 4);
        assert_eq!(p.rows, 3);
        assert_eq!(p.padding, 3 * 26 - 64);
        assert!(!p.delta_clamped);
    }

    #[test]
    fn zero_residual_is_degenerate() {
        assert!(matches!(derive_params(16, 3, 10, 0), Err(Error::Degenerate)));
        assert!(derive_params(1, 3, 10, 1).is_err());
        assert!(derive_params(16, 2, 10, 1).is_err());
    }

    #[test]
    fn delta_grid_examples() {
        assert_eq!(delta_grid(16, 3).unwrap(), vec![1, 2, 4]);
        for k in 3..10 {
            assert_eq!(delta_grid(2, k).unwrap(), vec![1, 2]);
        }
        for e in 1..40u32 {
            let n = 1u64 << e;
            let len = delta_grid(n, 3).unwrap().len() as f64;
            assert!(len <= 2.0 + (n as f64).log2() / 2.0);
        }
    }

    #[test]
    fn repetitions_examples() {
        // 4 * 256^(1/3) / 0.25 = 101.59
        assert_eq!(repetitions(256, 3, 0.25, 1, 4.0).unwrap(), 102);
        // 4096^(1/3) = 16 exactly: 4 * 16 / 0.25 = 256 halves cleanly
        assert_eq!(repetitions(4096, 3, 0.25, 1, 4.0).unwrap(), 256);
        assert_eq!(repetitions(4096, 3, 0.25, 2, 4.0).unwrap(), 128);
        assert!(repetitions(256, 3, 0.0, 1, 4.0).is_err());
        assert!(repetitions(256, 3, 1.0, 1, 4.0).is_err());
    }

    #[test]
    fn grid_repetitions_form_a_geometric_series() {
        for e in 6..=20u32 {
            let n = 1u64 << e;
            let head = (n as f64).powf(1.0 / 3.0) * 4.0 / 0.25;
            let total: u64 = delta_grid(n, 3)
                .unwrap()
                .iter()
                .map(|&d| repetitions(n, 3, 0.25, d, 4.0).unwrap())
                .sum();
            let grid = delta_grid(n, 3).unwrap().len() as f64;
            assert!((total as f64) <= 2.0 * head + grid, "n={n}");
        }
    }

    #[test]
    fn uniform_stream_has_small_delta() {
        for e in 4..=16u32 {
            let n = 1u64 << e;
            let p = derive_params(n, 3, n, u128::from(n - 1)).unwrap();
            assert!(p.delta <= 2, "n={n} delta={}", p.delta);
        }
    }

    #[test]
    fn perfect_power_shape_is_exact() {
        // 4096^(1/3) = 16, t = 4096 / 16
        let p = params_for_delta(4096, 3, 4096, 1).unwrap();
        assert_eq!((p.cols, p.rows, p.lambda, p.padding), (256, 16, 1, 0));
        let p = params_for_delta(4096, 3, 4096, 4).unwrap();
        assert_eq!((p.cols, p.rows, p.lambda), (1024, 4, 64));
    }

    #[test]
    fn fallback_flag() {
        let p = params_for_delta(64, 3, 10, 8).unwrap();
        assert!(p.needs_fallback());
        assert_eq!(p.rows, 1);
        assert_eq!(fallback_counters(0.25, FALLBACK_BETA), 40);
    }

    #[test]
    fn violated_lambda_can_break_sanity() {
        let items: Vec<u32> = (1..=512).collect();
        let stats = ExactStats::from_stream(&StreamView::new(items, 512).unwrap());
        let mut p = derive_params(512, 3, 512, 511).unwrap();
        assert!(sanity_inequalities(&stats, &p, 3, ElementId(1)).unwrap().all_hold());
        p.lambda *= 1000;
        let report = sanity_inequalities(&stats, &p, 3, ElementId(1)).unwrap();
        assert!(!report.lambda_rows.holds);
    }

    proptest! {
        #[test]
        fn delta_stays_in_bounds(e in 1u32..30, k in 3u32..9, len in 1u64..1_000_000, g in 1u128..1_000_000_000) {
            let n = 1u64 << e;
            let p = derive_params(n, k, len, g).unwrap();
            prop_assert!(p.delta.is_power_of_two());
            prop_assert!(p.delta >= 1);
            prop_assert!(p.delta as f64 <= delta_upper_bound(n, k) * (1.0 + 1e-9));
        }

        #[test]
        fn params_are_a_fixed_point(n in 2u64..100_000, k in 3u32..7, len in 1u64..1_000_000, g in 1u128..1_000_000_000) {
            let p = derive_params(n, k, len, g).unwrap();
            let mut q = params_for_delta(n, k, len, p.delta).unwrap();
            q.psi = p.psi;
            q.delta_clamped = p.delta_clamped;
            prop_assert_eq!(p, q);
            prop_assert_eq!(p.rows * p.cols, len + p.padding);
            prop_assert!(p.padding < p.cols);
        }
    }
}
