//! Synthetic stream families with known ground truth.

use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::param_engine::kth_root;
use crate::rng::{derive_seed, rng_from_seed, RunRng};
use crate::stream_model::{ElementId, ExactStats, StreamView};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Kind {
    /// One id at the requested frequency, the rest spread evenly over the
    /// other ids.
    PlantedHeavy,
    /// `m` independent Zipf(`s`) draws over `[1, n]`; id 1 is the most likely.
    Zipf { s: f64 },
    /// `m <= n` distinct ids.
    UniformDistinct,
    /// `m` copies of the heavy id.
    AllEqual,
    /// `r * t` distinct ids with `r = ceil(n^(1/k))`.
    PromiseCase1,
    /// As case 1 but the heavy id occupies one random cell of every row.
    PromiseCase2,
    /// Heavy id first, then every other id in one consecutive block.
    AdversarialPlacement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Evenly spaced positions.
    #[default]
    UniformRows,
    /// The first `f` positions.
    BurstyPrefix,
    /// A uniformly random set of positions.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: Kind,
    pub universe: u64,
    /// Stream length; `0` lets the promise families pick `r * floor(n / r)`.
    pub length: u64,
    pub heavy_frequency: u64,
    pub heavy_id: u32,
    pub placement: Placement,
    /// Moment order fixing the promise-problem row count.
    pub k: u32,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: Kind, universe: u64, length: u64) -> Self {
        GeneratorSpec {
            kind,
            universe,
            length,
            heavy_frequency: 0,
            heavy_id: 1,
            placement: Placement::default(),
            k: 3,
            seed: 0,
        }
    }

    pub fn planted(universe: u64, length: u64, heavy_frequency: u64, placement: Placement) -> Self {
        GeneratorSpec {
            heavy_frequency,
            placement,
            ..Self::new(Kind::PlantedHeavy, universe, length)
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Row count of the promise-problem matrix, `ceil(n^(1/k))`.
    pub fn promise_rows(&self) -> u64 {
        let root = kth_root(self.universe, self.k);
        let r = root.ceil() as u64;
        if root.fract() != 0.0 && (r - 1).checked_pow(self.k).is_some_and(|p| p >= self.universe) {
            r - 1
        } else {
            r.max(1)
        }
    }

    fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }

    fn validate(&self) -> Result<()> {
        if self.universe == 0 || self.universe > u64::from(u32::MAX) {
            return Err(Self::invalid(format!("universe size {} out of range", self.universe)));
        }
        if self.heavy_id == 0 || u64::from(self.heavy_id) > self.universe {
            return Err(Self::invalid(format!("heavy id {} outside [1, n]", self.heavy_id)));
        }
        match self.kind {
            Kind::PlantedHeavy | Kind::AdversarialPlacement => {
                if self.heavy_frequency > self.length {
                    return Err(Self::invalid("heavy frequency exceeds stream length"));
                }
                if self.universe == 1 && self.heavy_frequency < self.length {
                    return Err(Self::invalid("no other ids to fill the stream with"));
                }
            }
            Kind::Zipf { s } => {
                if s.is_nan() || s <= 0.0 {
                    return Err(Self::invalid(format!("zipf exponent {s} must be positive")));
                }
            }
            Kind::UniformDistinct => {
                if self.length > self.universe {
                    return Err(Self::invalid("more distinct items than ids"));
                }
            }
            Kind::AllEqual => {}
            Kind::PromiseCase1 | Kind::PromiseCase2 => {
                if self.k == 0 {
                    return Err(Self::invalid("moment order must be positive"));
                }
                let r = self.promise_rows();
                let m = self.promise_length();
                if m == 0 || !m.is_multiple_of(r) || m > self.universe {
                    return Err(Self::invalid(format!(
                        "promise length {m} must be a positive multiple of r = {r} and at most n"
                    )));
                }
            }
        }
        Ok(())
    }

    fn promise_length(&self) -> u64 {
        if self.length == 0 {
            let r = self.promise_rows();
            r * (self.universe / r)
        } else {
            self.length
        }
    }

    fn rng(&self) -> RunRng {
        rng_from_seed(derive_seed(self.seed, &[0x6765_6e65_7261_7465]))
    }
}

/// Ids other than `heavy`, `count` copies in total, spread as evenly as
/// possible and grouped by id.
fn filler(n: u64, heavy: u32, count: u64) -> Vec<ElementId> {
    let others = n - 1;
    let (base, extra) = (count / others, count % others);
    let mut out = Vec::with_capacity(count as usize);
    let ids = (1..=n as u32).filter(|&i| i != heavy);
    for (idx, id) in ids.enumerate() {
        let copies = base + u64::from((idx as u64) < extra);
        out.extend(std::iter::repeat_n(ElementId(id), copies as usize));
    }
    out
}

fn place(
    heavy: ElementId,
    f: u64,
    mut rest: Vec<ElementId>,
    placement: Placement,
    rng: &mut RunRng,
) -> Vec<ElementId> {
    let m = (rest.len() as u64 + f) as usize;
    let mut is_heavy = vec![false; m];
    match placement {
        Placement::UniformRows => {
            for i in 0..f {
                is_heavy[(u128::from(i) * m as u128 / u128::from(f)) as usize] = true;
            }
        }
        Placement::BurstyPrefix => is_heavy[..f as usize].fill(true),
        Placement::Random => {
            for p in index::sample(rng, m, f as usize) {
                is_heavy[p] = true;
            }
        }
    }
    rest.reverse();
    is_heavy
        .into_iter()
        .map(|h| if h { heavy } else { rest.pop().expect("filler length") })
        .collect()
}

/// Draws a stream from `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<StreamView> {
    spec.validate()?;
    let n = spec.universe;
    let m = spec.length;
    let heavy = ElementId(spec.heavy_id);
    let mut rng = spec.rng();
    let items = match spec.kind {
        Kind::PlantedHeavy => {
            let f = spec.heavy_frequency;
            let mut rest = filler(n, spec.heavy_id, m - f);
            rest.shuffle(&mut rng);
            place(heavy, f, rest, spec.placement, &mut rng)
        }
        Kind::AdversarialPlacement => {
            let f = spec.heavy_frequency;
            let mut items = vec![heavy; f as usize];
            items.extend(filler(n, spec.heavy_id, m - f));
            items
        }
        Kind::Zipf { s } => {
            let zipf = Zipf::new(n as f64, s).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..m)
                .map(|_| ElementId(zipf.sample(&mut rng) as u32))
                .collect()
        }
        Kind::UniformDistinct => {
            let mut items: Vec<ElementId> = index::sample(&mut rng, n as usize, m as usize)
                .into_iter()
                .map(|i| ElementId(i as u32 + 1))
                .collect();
            items.shuffle(&mut rng);
            items
        }
        Kind::AllEqual => vec![heavy; m as usize],
        Kind::PromiseCase1 | Kind::PromiseCase2 => {
            let m = spec.promise_length();
            let r = spec.promise_rows();
            let t = m / r;
            let case2 = spec.kind == Kind::PromiseCase2;
            let pool = (1..=n as u32).filter(|&i| !case2 || i != spec.heavy_id).count();
            let need = if case2 { m - r } else { m };
            if (pool as u64) < need {
                return Err(GeneratorSpec::invalid("not enough distinct ids"));
            }
            let mut distinct = (1..=n as u32)
                .filter(|&i| !case2 || i != spec.heavy_id)
                .map(ElementId)
                .collect::<Vec<_>>();
            distinct.shuffle(&mut rng);
            distinct.truncate(need as usize);
            let mut items = Vec::with_capacity(m as usize);
            for _ in 0..r {
                let z_col = if case2 { Some(rng.random_range(0..t)) } else { None };
                for c in 0..t {
                    if z_col == Some(c) {
                        items.push(heavy);
                    } else {
                        items.push(distinct.pop().expect("distinct pool"));
                    }
                }
            }
            items
        }
    };
    StreamView::from_ids(items, n)
}

pub const SIDECAR_SCHEMA: u32 = 1;
pub const SIDECAR_MAX_K: u32 = 8;

/// Ground truth that travels with a generated stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema: u32,
    pub universe: u64,
    pub length: u64,
    pub frequencies: BTreeMap<u32, u64>,
    /// `F_1 ..= F_8` as decimal strings; `None` where the moment overflows.
    pub moments: BTreeMap<u32, Option<String>>,
    pub max_element: Option<u32>,
    pub max_frequency: u64,
    /// Whether the most frequent id is heavy for each `k` in `3 ..= 8`.
    pub heavy: BTreeMap<u32, Option<bool>>,
}

impl Sidecar {
    pub fn from_stats(stats: &ExactStats) -> Self {
        let frequencies = stats
            .frequencies()
            .iter()
            .map(|(id, &f)| (id.0, f))
            .collect();
        let moments = (1..=SIDECAR_MAX_K)
            .map(|k| (k, stats.moment(k).ok().map(|v| v.to_string())))
            .collect();
        let max = stats.max_element();
        let heavy = (3..=SIDECAR_MAX_K)
            .map(|k| (k, max.and_then(|(id, _)| stats.is_heavy(id, k).ok())))
            .collect();
        Sidecar {
            schema: SIDECAR_SCHEMA,
            universe: stats.universe(),
            length: stats.len(),
            frequencies,
            moments,
            max_element: max.map(|(id, _)| id.0),
            max_frequency: max.map_or(0, |(_, f)| f),
            heavy,
        }
    }

    pub fn frequency(&self, id: ElementId) -> u64 {
        self.frequencies.get(&id.0).copied().unwrap_or(0)
    }

    pub fn moment(&self, k: u32) -> Option<u128> {
        self.moments.get(&k)?.as_ref()?.parse().ok()
    }
}
