//! Exhaustive placement search for tiny instances.
//!
//! Enumerates every multiset of `n` eligible cells and scores it with a
//! bitset union of covered interest cells. Coverage sets are computed here by
//! direct distance checks so the result stays independent of
//! [`crate::coverage`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::region::{Cell, Region};

/// Upper bound on enumerated configurations.
pub const MAX_CONFIGURATIONS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best_f: usize,
    /// Optimal placements in lexicographic order of eligible-cell index, at most `cap`.
    pub best_placements: Vec<Vec<Cell>>,
    pub evaluated: u64,
}

/// `C(e + n - 1, n)`, or `None` once it exceeds `limit`.
fn multiset_count(e: u128, n: u128, limit: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for k in 1..=n {
        acc = acc * (e + k - 1) / k;
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

struct Masks {
    words: usize,
    sets: Vec<Vec<u64>>,
}

fn coverage_masks(region: &Region, eligible: &[Cell], radius: u32) -> Masks {
    let interest: Vec<Cell> = (0..region.cell_count())
        .map(|i| region.cell_at(i))
        .filter(|&c| region.cover(c))
        .collect();
    let words = interest.len().div_ceil(64).max(1);
    let r2 = (radius as i64).pow(2);
    let sets = eligible
        .iter()
        .map(|p| {
            let mut mask = vec![0u64; words];
            for (bit, q) in interest.iter().enumerate() {
                let dx = q.x as i64 - p.x as i64;
                let dy = q.y as i64 - p.y as i64;
                if dx * dx + dy * dy < r2 {
                    mask[bit / 64] |= 1 << (bit % 64);
                }
            }
            mask
        })
        .collect();
    Masks { words, sets }
}

struct Search<'a> {
    masks: &'a Masks,
    n: usize,
    cap: usize,
    best_f: usize,
    best: Vec<Vec<usize>>,
    evaluated: u64,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, start: usize, acc: &[u64]) {
        if self.chosen.len() == self.n {
            self.evaluated += 1;
            let f = acc.iter().map(|w| w.count_ones() as usize).sum();
            if f > self.best_f {
                self.best_f = f;
                self.best.clear();
            }
            if f == self.best_f && self.best.len() < self.cap {
                self.best.push(self.chosen.clone());
            }
            return;
        }
        let mut next = vec![0u64; self.masks.words];
        for i in start..self.masks.sets.len() {
            for (o, (a, m)) in next.iter_mut().zip(acc.iter().zip(&self.masks.sets[i])) {
                *o = a | m;
            }
            self.chosen.push(i);
            self.descend(i, &next);
            self.chosen.pop();
        }
    }
}

/// Best achievable fitness for `n` routers of radius `radius`.
pub fn exhaustive_best(region: &Region, n: usize, radius: u32, cap: usize) -> Result<OracleResult> {
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    let eligible = region.eligible_cells();
    if n == 0 {
        return Ok(OracleResult {
            best_f: 0,
            best_placements: if cap > 0 { vec![vec![]] } else { vec![] },
            evaluated: 1,
        });
    }
    if multiset_count(eligible.len() as u128, n as u128, MAX_CONFIGURATIONS).is_none() {
        let mut exact: u128 = 1;
        for k in 1..=n as u128 {
            exact = exact.saturating_mul(eligible.len() as u128 + k - 1) / k;
        }
        return Err(Error::InstanceTooLarge {
            configurations: exact,
            limit: MAX_CONFIGURATIONS,
        });
    }
    let masks = coverage_masks(region, &eligible, radius);

    // Partition on the first router's cell; merging in index order keeps the
    // result identical to a sequential scan.
    let parts: Vec<(usize, Vec<Vec<usize>>, u64)> = (0..eligible.len())
        .into_par_iter()
        .map(|first| {
            let mut s = Search {
                masks: &masks,
                n,
                cap,
                best_f: 0,
                best: Vec::new(),
                evaluated: 0,
                chosen: vec![first],
            };
            let acc = masks.sets[first].clone();
            s.descend(first, &acc);
            (s.best_f, s.best, s.evaluated)
        })
        .collect();

    let best_f = parts.iter().map(|p| p.0).max().unwrap_or(0);
    let evaluated = parts.iter().map(|p| p.2).sum();
    let best_placements = parts
        .into_iter()
        .filter(|p| p.0 == best_f)
        .flat_map(|p| p.1)
        .take(cap)
        .map(|idx| idx.into_iter().map(|i| eligible[i]).collect())
        .collect();
    Ok(OracleResult {
        best_f,
        best_placements,
        evaluated,
    })
}
