//! Checks of the two lower bounds on `P(S_r = heavy)`.
//!
//! * Fixed shape: if `alpha (lambda r + G_3/(lambda t) + G_2/t) <= f <= beta t`
//!   then `P(S_r = heavy) >= f / (2t)`.
//! * Derived shape: with `(t, lambda, r)` from the parameter engine, if
//!   `alpha G_k^(1/k) <= f <= beta t` then
//!   `P(S_r = heavy) >= delta / (2 n^(1 - 2/k))`.
//!
//! The constants `alpha` and `beta` are unspecified, so they are inputs
//! here, and [`calibrate`] sweeps a grid of them over a fixed instance
//! family. A check whose hypothesis fails still reports the probability but
//! is not a violation.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::oracle::{exact_distribution, tuple_count, ReplayTable};
use super::Probability;
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorSpec, Placement};
use crate::param_engine::{derive_params, sanity_inequalities, ParamSet, SanityReport};
use crate::pick_drop::{run, PickDropConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stream_model::{ElementId, ExactStats, MatrixOverlay, StreamView};

pub const ALPHA_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
pub const BETA_GRID: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Hypothesis met and the probability clears the bound.
    Holds,
    /// Hypothesis met and the probability falls below the bound.
    Violated,
    HypothesisUnmet,
}

fn verdict(hypothesis: bool, clears: bool) -> Verdict {
    match (hypothesis, clears) {
        (false, _) => Verdict::HypothesisUnmet,
        (true, true) => Verdict::Holds,
        (true, false) => Verdict::Violated,
    }
}

/// The fixed-shape hypothesis on a concrete matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeHypothesis {
    pub alpha: f64,
    pub beta: f64,
    /// `lambda r + G_3/(lambda t) + G_2/t`
    pub load: f64,
    pub frequency: u64,
    pub upper: f64,
    pub holds: bool,
}

impl ShapeHypothesis {
    pub fn evaluate(stats: &ExactStats, heavy: ElementId, rows: u64, cols: u64, lambda: u64, alpha: f64, beta: f64) -> Result<Self> {
        let g2 = stats.residual_moment(2, heavy)? as f64;
        let g3 = stats.residual_moment(3, heavy)? as f64;
        let (r, t, l) = (rows as f64, cols as f64, lambda as f64);
        let load = l * r + g3 / (l * t) + g2 / t;
        let f = stats.frequency(heavy);
        let upper = beta * t;
        Ok(ShapeHypothesis {
            alpha,
            beta,
            load,
            frequency: f,
            upper,
            holds: alpha * load <= f as f64 && f as f64 <= upper,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm21Report {
    pub heavy: ElementId,
    pub rows: u64,
    pub cols: u64,
    pub lambda: u64,
    pub hypothesis: ShapeHypothesis,
    pub probability: Probability,
    /// `f / (2t)`
    pub bound: f64,
    pub verdict: Verdict,
}

fn heavy_or_max(stats: &ExactStats, heavy: Option<ElementId>) -> Result<ElementId> {
    match heavy {
        Some(h) => Ok(h),
        None => stats
            .max_element()
            .map(|(id, _)| id)
            .ok_or_else(|| Error::InvalidParameter("empty stream".into())),
    }
}

/// `P(S_r = heavy)` exactly when `t^r` is within the enumeration guard,
/// otherwise from `trials` table replays.
pub fn heavy_probability(ov: &MatrixOverlay, lambda: u64, heavy: ElementId, trials: u64, seed: u64) -> Result<Probability> {
    match tuple_count(ov) {
        Ok(_) => {
            let d = exact_distribution(ov, lambda)?;
            Ok(Probability::exact(d.element_tuples(heavy), d.tuples()))
        }
        Err(Error::GuardExceeded { .. }) => {
            if trials == 0 {
                return Err(Error::InvalidParameter("trials must be positive".into()));
            }
            let table = ReplayTable::new(ov);
            let mut rng = rng_from_seed(seed);
            let hits = (0..trials)
                .filter(|_| table.sample(lambda, &mut rng).element == heavy)
                .count() as u64;
            Ok(Probability::estimated(hits, trials))
        }
        Err(e) => Err(e),
    }
}

pub fn check_theorem_2_1(
    ov: &MatrixOverlay,
    lambda: u64,
    alpha: f64,
    beta: f64,
    heavy: Option<ElementId>,
    trials: u64,
    seed: u64,
) -> Result<Thm21Report> {
    let stats = ExactStats::from_overlay(ov);
    let heavy = heavy_or_max(&stats, heavy)?;
    let (rows, cols) = (ov.rows() as u64, ov.cols() as u64);
    let hypothesis = ShapeHypothesis::evaluate(&stats, heavy, rows, cols, lambda, alpha, beta)?;
    let probability = heavy_probability(ov, lambda, heavy, trials, seed)?;
    let bound = stats.frequency(heavy) as f64 / (2.0 * cols as f64);
    Ok(Thm21Report {
        heavy,
        rows,
        cols,
        lambda,
        hypothesis,
        verdict: verdict(hypothesis.holds, probability.at_least(bound)),
        probability,
        bound,
    })
}

/// The derived-shape hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentHypothesis {
    pub alpha: f64,
    pub beta: f64,
    /// `G_k^(1/k)`
    pub residual_root: f64,
    pub frequency: u64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm31Report {
    pub universe: u64,
    pub k: u32,
    pub heavy: ElementId,
    pub params: ParamSet,
    pub hypothesis: MomentHypothesis,
    pub sanity: SanityReport,
    pub probability: Probability,
    /// `delta / (2 n^(1 - 2/k))`
    pub bound: f64,
    pub verdict: Verdict,
}

/// Monte Carlo over `trials` seeded runs of the sampler itself.
pub fn check_theorem_3_1(
    stream: &StreamView,
    k: u32,
    alpha: f64,
    beta: f64,
    heavy: Option<ElementId>,
    trials: u64,
    seed: u64,
) -> Result<Thm31Report> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let stats = ExactStats::from_stream(stream);
    let heavy = heavy_or_max(&stats, heavy)?;
    let n = stream.universe();
    let residual = stats.residual_moment(k, heavy)?;
    let params = derive_params(n, k, stats.len(), residual)?;
    let root = (residual as f64).powf(1.0 / f64::from(k));
    let f = stats.frequency(heavy);
    let upper = beta * params.cols as f64;
    let hypothesis = MomentHypothesis {
        alpha,
        beta,
        residual_root: root,
        frequency: f,
        upper,
        holds: alpha * root <= f as f64 && f as f64 <= upper,
    };
    let sanity = sanity_inequalities(&stats, &params, k, heavy)?;
    let ov = MatrixOverlay::new(stream, params.cols as usize)?;
    let hits = (0..trials)
        .filter(|&i| {
            let cfg = PickDropConfig {
                rows: params.rows,
                cols: params.cols,
                lambda: params.lambda,
                seed: derive_seed(seed, &[i]),
            };
            run(&ov, &cfg).map(|e| e.element == heavy).unwrap_or(false)
        })
        .count() as u64;
    let probability = Probability::estimated(hits, trials);
    let bound = params.delta as f64 / (2.0 * (n as f64).powf(1.0 - 2.0 / f64::from(k)));
    Ok(Thm31Report {
        universe: n,
        k,
        heavy,
        params,
        hypothesis,
        sanity,
        verdict: verdict(hypothesis.holds, probability.at_least(bound)),
        probability,
        bound,
    })
}

/// Where the heavy id sits in a constructed matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellPlacement {
    /// Spread over the rows as evenly as possible, random columns.
    Spread,
    /// The first `f` cells, row-major.
    Head,
    /// Spread over the rows, in the last columns of each row.
    Tail,
    /// Uniformly random cells.
    Random,
}

/// How the non-heavy cells are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filler {
    Distinct,
    /// Every filler id fills two consecutive free cells.
    Pairs,
}

/// An `rows x cols` matrix with id 1 in `f` cells and filler ids from 2.
pub fn planted_matrix(rows: usize, cols: usize, f: usize, placement: CellPlacement, filler: Filler, seed: u64) -> Result<MatrixOverlay> {
    let cells = rows * cols;
    if f > cells {
        return Err(Error::InvalidParameter("more heavy cells than cells".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut heavy = vec![false; cells];
    let per_row = |i: usize| f / rows + usize::from(i < f % rows);
    match placement {
        CellPlacement::Head => heavy[..f].fill(true),
        CellPlacement::Random => index::sample(&mut rng, cells, f).into_iter().for_each(|c| heavy[c] = true),
        CellPlacement::Spread | CellPlacement::Tail => {
            if f.div_ceil(rows) > cols {
                return Err(Error::InvalidParameter("row overflow".into()));
            }
            for i in 0..rows {
                let cols_here: Vec<usize> = if placement == CellPlacement::Tail {
                    (cols - per_row(i)..cols).collect()
                } else {
                    index::sample(&mut rng, cols, per_row(i)).into_vec()
                };
                for c in cols_here {
                    heavy[i * cols + c] = true;
                }
            }
        }
    }
    let mut next = 2u32;
    let mut used = 0;
    let mut matrix = Vec::with_capacity(rows);
    let mut row = Vec::with_capacity(cols);
    for (c, &h) in heavy.iter().enumerate() {
        if h {
            row.push(1);
        } else {
            row.push(next);
            used += 1;
            if filler == Filler::Distinct || used % 2 == 0 {
                next += 1;
            }
        }
        if (c + 1) % cols == 0 {
            matrix.push(std::mem::take(&mut row));
        }
    }
    MatrixOverlay::from_rows(&matrix)
}

/// One matrix of the calibration family and its exact heavy probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationInstance {
    pub rows: u64,
    pub cols: u64,
    pub lambda: u64,
    pub frequency: u64,
    pub placement: CellPlacement,
    pub filler: Filler,
    pub load: f64,
    pub probability: f64,
    pub bound: f64,
}

impl CalibrationInstance {
    pub fn satisfies(&self, alpha: f64, beta: f64) -> bool {
        alpha * self.load <= self.frequency as f64 && self.frequency as f64 <= beta * self.cols as f64
    }

    pub fn clears(&self) -> bool {
        self.probability >= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub alpha: f64,
    pub beta: f64,
    /// Instances satisfying the hypothesis.
    pub eligible: usize,
    pub violations: usize,
}

impl CalibrationCell {
    pub fn feasible(&self) -> bool {
        self.eligible > 0 && self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub instances: usize,
    pub cells: Vec<CalibrationCell>,
    /// Smallest feasible `alpha`, then the largest feasible `beta` for it.
    pub chosen: Option<(f64, f64)>,
}

/// Shapes `(r, t)` of the calibration family; all enumerable exactly.
pub const CALIBRATION_SHAPES: [(usize, usize); 5] = [(2, 64), (2, 256), (2, 1000), (3, 32), (3, 100)];

/// The calibration family: every shape, `lambda` in `{1, 2, 4}`, heavy
/// frequencies `4, 8, ..., 256` up to `0.3 t`, every placement and filler.
pub fn calibration_family(seed: u64) -> Result<Vec<CalibrationInstance>> {
    let mut out = Vec::new();
    for (si, &(r, t)) in CALIBRATION_SHAPES.iter().enumerate() {
        for lambda in [1u64, 2, 4] {
            for f in (2..=8).map(|e| 1usize << e).filter(|&f| f as f64 <= 0.3 * t as f64) {
                for (pi, placement) in [CellPlacement::Spread, CellPlacement::Head, CellPlacement::Tail, CellPlacement::Random].into_iter().enumerate() {
                    for filler in [Filler::Distinct, Filler::Pairs] {
                        let s = derive_seed(seed, &[si as u64, lambda, f as u64, pi as u64]);
                        let ov = planted_matrix(r, t, f, placement, filler, s)?;
                        let report = check_theorem_2_1(&ov, lambda, 1.0, 1.0, Some(ElementId(1)), 0, s)?;
                        out.push(CalibrationInstance {
                            rows: r as u64,
                            cols: t as u64,
                            lambda,
                            frequency: f as u64,
                            placement,
                            filler,
                            load: report.hypothesis.load,
                            probability: report.probability.value,
                            bound: report.bound,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn sweep<I>(alphas: &[f64], betas: &[f64], family: &[I], satisfies: impl Fn(&I, f64, f64) -> bool, clears: impl Fn(&I) -> bool) -> Calibration {
    let mut cells = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let eligible: Vec<&I> = family.iter().filter(|i| satisfies(i, alpha, beta)).collect();
            cells.push(CalibrationCell {
                alpha,
                beta,
                eligible: eligible.len(),
                violations: eligible.iter().filter(|i| !clears(i)).count(),
            });
        }
    }
    let chosen = cells
        .iter()
        .filter(|c| c.feasible())
        .min_by(|a, b| a.alpha.total_cmp(&b.alpha).then(b.beta.total_cmp(&a.beta)))
        .map(|c| (c.alpha, c.beta));
    Calibration {
        instances: family.len(),
        cells,
        chosen,
    }
}

/// Sweeps `alphas x betas` over [`calibration_family`].
pub fn calibrate(alphas: &[f64], betas: &[f64], seed: u64) -> Result<Calibration> {
    let family = calibration_family(seed)?;
    Ok(sweep(alphas, betas, &family, CalibrationInstance::satisfies, CalibrationInstance::clears))
}

/// One planted stream of the derived-shape family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentInstance {
    pub universe: u64,
    /// Copies of every filler id.
    pub copies: u64,
    pub placement: Placement,
    pub frequency: u64,
    pub seed: u64,
    pub residual_root: f64,
    pub cols: u64,
    pub delta: u64,
    pub probability: Probability,
    pub bound: f64,
}

impl MomentInstance {
    pub fn satisfies(&self, alpha: f64, beta: f64) -> bool {
        let f = self.frequency as f64;
        alpha * self.residual_root <= f && f <= beta * self.cols as f64
    }

    pub fn clears(&self) -> bool {
        self.probability.at_least(self.bound)
    }

    /// Regenerates the stream.
    pub fn stream(&self) -> Result<StreamView> {
        let n = self.universe;
        generate(&GeneratorSpec::planted(n, (n - 1) * self.copies + self.frequency, self.frequency, self.placement).seed(self.seed))
    }
}

/// Ratios `f / G_k^(1/k)` swept by [`moment_family`].
pub const MOMENT_RATIOS: [f64; 9] = [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0];

/// Planted streams over every universe in `universes` with `k = 3`: every
/// other id appears 1, 2 or 4 times, the heavy frequency is each of
/// [`MOMENT_RATIOS`] times `G_3^(1/3)`, and each placement is used.
pub fn moment_family(universes: &[u64], trials: u64, seed: u64) -> Result<Vec<MomentInstance>> {
    let mut out = Vec::new();
    for &n in universes {
        for copies in [1u64, 2, 4] {
            let filler = (n - 1) * copies;
            let root = ((n - 1) as f64).cbrt() * copies as f64;
            for ratio in MOMENT_RATIOS {
                let f = (ratio * root).ceil() as u64;
                for (pi, placement) in [Placement::UniformRows, Placement::BurstyPrefix, Placement::Random].into_iter().enumerate() {
                    let s = derive_seed(seed, &[n, copies, f, pi as u64]);
                    let stream = generate(&GeneratorSpec::planted(n, filler + f, f, placement).seed(s))?;
                    let r = check_theorem_3_1(&stream, 3, 1.0, 1.0, Some(ElementId(1)), trials, s)?;
                    out.push(MomentInstance {
                        universe: n,
                        copies,
                        placement,
                        frequency: f,
                        seed: s,
                        residual_root: r.hypothesis.residual_root,
                        cols: r.params.cols,
                        delta: r.params.delta,
                        probability: r.probability,
                        bound: r.bound,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Sweeps `alphas x betas` over [`moment_family`].
pub fn calibrate_moment(alphas: &[f64], betas: &[f64], universes: &[u64], trials: u64, seed: u64) -> Result<(Calibration, Vec<MomentInstance>)> {
    let family = moment_family(universes, trials, seed)?;
    Ok((sweep(alphas, betas, &family, MomentInstance::satisfies, MomentInstance::clears), family))
}
