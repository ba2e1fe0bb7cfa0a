//! Pick-and-drop sampling over insertion-only streams.
//!
//! A stream of ids in `[1, n]` is laid out row-major as an `r x t` matrix.
//! Each pick-and-drop run keeps one global sample and a counter that never
//! exceeds the sample's true frequency; the global sample is replaced by the
//! current row's local sample whenever its counter falls behind. Independent
//! runs over a grid of matrix shapes find a heavy element in one pass, and
//! hash-subsampled levels of those finders approximate `F_k` for `k >= 3`.
//!
//! Module map:
//!
//! * [`stream_model`]: streams, the matrix overlay and exact statistics.
//! * [`pick_drop`]: a single run of the sampler, materialized or streaming.
//! * [`param_engine`]: matrix shape, drop threshold and repetition schedule.
//! * [`heavy_hitter`]: the one-pass heavy-element finder.
//! * [`moment_estimator`]: the `F_k` estimator built on the finder.
//! * [`verification`]: enumeration oracle, Monte Carlo bound checks and
//!   the winning-pairs checker.
//! * [`generator`]: synthetic stream families with known ground truth.

pub mod error;
pub mod fallback;
pub mod generator;
pub mod heavy_hitter;
pub mod moment_estimator;
pub mod param_engine;
pub mod pick_drop;
pub mod rng;
pub mod stream_model;
pub mod verification;

pub use error::{Error, Result};
pub use heavy_hitter::{find_heavy, find_heavy_doubling, HeavyHitter, HeavyHitterConfig, Mode};
pub use moment_estimator::{estimate_fk, FkConfig};
pub use param_engine::ParamSet;
pub use pick_drop::{Estimate, PickDropConfig};
pub use stream_model::{ElementId, ExactStats, MatrixOverlay, StreamView};
