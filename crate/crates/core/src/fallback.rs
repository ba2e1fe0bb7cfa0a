//! Misra-Gries summary used when one element holds a large share of the
//! stream (`f > beta * F_1`) or the matrix would have fewer than one full row.
//!
//! With `K` counters every reported count `c_i` satisfies
//! `f_i - m / (K + 1) <= c_i <= f_i`, so it is a valid lower bound and
//! composes with the pick-and-drop estimates under `max`.

use std::collections::HashMap;

use crate::pick_drop::Estimate;
use crate::stream_model::ElementId;

#[derive(Clone, Debug)]
pub struct MisraGries {
    capacity: usize,
    counters: HashMap<ElementId, u64>,
}

impl MisraGries {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "Misra-Gries needs at least one counter");
        MisraGries {
            capacity,
            counters: HashMap::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, item: ElementId) {
        if item.is_sentinel() {
            return;
        }
        if let Some(c) = self.counters.get_mut(&item) {
            *c += 1;
        } else if self.counters.len() < self.capacity {
            self.counters.insert(item, 1);
        } else {
            self.counters.retain(|_, c| {
                *c -= 1;
                *c > 0
            });
        }
    }

    pub fn count(&self, item: ElementId) -> u64 {
        self.counters.get(&item).copied().unwrap_or(0)
    }

    /// Largest surviving counter; ties to the smaller id.
    pub fn best(&self) -> Estimate {
        self.counters
            .iter()
            .map(|(&id, &c)| Estimate::new(id, c))
            .fold(Estimate::sentinel(), Estimate::max)
    }
}
