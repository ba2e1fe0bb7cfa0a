//! Winning and losing pairs of two integer sequences.
//!
//! For `U = (u_1..u_t)` and `W = (w_1..w_t)`, a pair `(i, j)` with
//! `1 <= j <= u_i` is losing when some `h >= i` has
//! `-j + sum_{s=i..h} (u_s - w_s) < 0`, and winning otherwise. The counting
//! lemma says a positive `sum (u_s - w_s)` guarantees at least that many
//! winning pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSequences {
    u: Vec<u64>,
    w: Vec<u64>,
}

impl PairSequences {
    pub fn new(u: Vec<u64>, w: Vec<u64>) -> Result<Self> {
        if u.len() != w.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len() as u64,
                actual: w.len() as u64,
            });
        }
        Ok(PairSequences { u, w })
    }

    pub fn u(&self) -> &[u64] {
        &self.u
    }

    pub fn w(&self) -> &[u64] {
        &self.w
    }

    /// `sum (u_s - w_s)`.
    pub fn surplus(&self) -> i64 {
        self.u.iter().zip(&self.w).map(|(&u, &w)| u as i64 - w as i64).sum()
    }

    /// Direct evaluation of the definition for 1-based `(i, j)`.
    pub fn is_losing(&self, i: usize, j: u64) -> bool {
        let mut sum = -(j as i64);
        for s in i - 1..self.u.len() {
            sum += self.u[s] as i64 - self.w[s] as i64;
            if sum < 0 {
                return true;
            }
        }
        false
    }
}

/// Every winning pair, 1-based, in lexicographic order.
pub fn winning_pairs(p: &PairSequences) -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for i in 1..=p.u.len() {
        for j in 1..=p.u[i - 1] {
            if !p.is_losing(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairsReport {
    pub max_len: usize,
    pub max_entry: u64,
    /// All `(U, W)` pairs enumerated.
    pub cases: u64,
    /// Cases with a positive surplus, where the lemma says something.
    pub positive: u64,
    pub counterexamples: u64,
    pub first_counterexample: Option<PairSequences>,
}

fn decode(mut code: u64, len: usize, base: u64) -> PairSequences {
    let mut digits = Vec::with_capacity(2 * len);
    for _ in 0..2 * len {
        digits.push(code % base);
        code /= base;
    }
    let w = digits.split_off(len);
    PairSequences { u: digits, w }
}

/// Checks the lemma on every `(U, W)` with lengths `1..=max_len` and entries
/// in `0..=max_entry`.
pub fn check_lemma_exhaustive(max_len: usize, max_entry: u64) -> Result<PairsReport> {
    let base = max_entry + 1;
    let mut report = PairsReport {
        max_len,
        max_entry,
        cases: 0,
        positive: 0,
        counterexamples: 0,
        first_counterexample: None,
    };
    for len in 1..=max_len {
        let total = base
            .checked_pow(2 * len as u32)
            .ok_or_else(|| Error::InvalidParameter("search space overflows".into()))?;
        let (positive, bad, first) = (0..total)
            .into_par_iter()
            .map(|code| {
                let p = decode(code, len, base);
                let surplus = p.surplus();
                if surplus <= 0 {
                    return (0u64, 0u64, None);
                }
                let ok = winning_pairs(&p).len() as i64 >= surplus;
                (1, u64::from(!ok), (!ok).then_some(code))
            })
            .reduce(
                || (0, 0, None),
                |a, b| (a.0 + b.0, a.1 + b.1, a.2.min(b.2).or(a.2).or(b.2)),
            );
        report.cases += total;
        report.positive += positive;
        report.counterexamples += bad;
        if report.first_counterexample.is_none() {
            report.first_counterexample = first.map(|c| decode(c, len, base));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn seqs(u: &[u64], w: &[u64]) -> PairSequences {
        PairSequences::new(u.to_vec(), w.to_vec()).unwrap()
    }

    #[test]
    fn single_entry_example() {
        let p = seqs(&[2], &[1]);
        assert_eq!(winning_pairs(&p), vec![(1, 1)]);
        assert!(p.is_losing(1, 2));
    }

    #[test]
    fn equal_sequences_have_zero_surplus() {
        let p = seqs(&[3, 0, 2], &[3, 0, 2]);
        assert_eq!(p.surplus(), 0);
        // every prefix sum is zero, so (i, j) loses for any j >= 1
        assert!(winning_pairs(&p).is_empty());
    }

    #[test]
    fn later_deficit_makes_pairs_lose() {
        let p = seqs(&[3, 0], &[0, 2]);
        // from row 1: -j + 3 then -j + 1; winning iff j <= 1
        assert_eq!(winning_pairs(&p), vec![(1, 1)]);
        assert_eq!(p.surplus(), 1);
    }

    #[test]
    fn length_mismatch() {
        assert!(PairSequences::new(vec![1], vec![]).is_err());
    }

    #[test]
    fn small_grid_has_no_counterexample() {
        let r = check_lemma_exhaustive(3, 3).unwrap();
        assert_eq!(r.cases, 16 + 256 + 4096);
        assert_eq!(r.counterexamples, 0);
        assert!(r.positive > 0);
    }

    #[test]
    fn decode_covers_the_grid() {
        let p = decode(0b11_10_01_00, 2, 4);
        assert_eq!((p.u(), p.w()), (&[0, 1][..], &[2, 3][..]));
    }

    proptest! {
        #[test]
        fn winning_count_matches_running_minimum(
            pairs in prop::collection::vec((0u64..6, 0u64..6), 1..9)
        ) {
            let (u, w): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
            let p = PairSequences::new(u.clone(), w.clone()).unwrap();
            // (i, j) wins iff j <= min over h of sum_{i..h}, so row i holds
            // clamp(that minimum, 0, u_i) winners
            let mut expected = 0i64;
            for i in 0..u.len() {
                let mut sum = 0i64;
                let mut low = i64::MAX;
                for s in i..u.len() {
                    sum += u[s] as i64 - w[s] as i64;
                    low = low.min(sum);
                }
                expected += low.clamp(0, u[i] as i64);
            }
            prop_assert_eq!(winning_pairs(&p).len() as i64, expected);
        }
    }
}
