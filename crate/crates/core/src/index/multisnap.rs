//! Exhaustive index: every snap-rounding of every stored set, at every
//! level, is a trie path. A nearest query is then a plain walk.
//!
//! Grid points are handled through their Morton keys (x bit above y bit,
//! most significant level first). Sorting keys sorts the ancestor-chain
//! strings, the last two bits of a key are the last symbol, and dropping
//! them gives the parent. So the level-`d` block of a distribution is read
//! off its sorted keys, and its level-`(d-1)` node is that of the shifted
//! keys.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{
    check_max_level, read_header, read_max_level, read_tries, write_header, write_tries, IndexKind,
    LevelStats, QueryResult, Registry,
};
use crate::codec::{put_varint, Reader};
use crate::encoding::Direction;
use crate::geometry::{nearest_grid_point, snap_candidates, GridPoint, PointSet};
use crate::trie::{NodeId, Trie};
use crate::{Error, Result};

/// Default cap on `4^n * max_level`.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Certified hit bound `3 * delta` and the original `1.5 * delta`.
const BOUND_FACTORS: (f64, f64) = (3.0, 1.5);

#[derive(Clone, Debug, PartialEq)]
pub struct MultiSnapIndex {
    registry: Registry,
    tries: BTreeMap<usize, Trie>,
    max_level: u32,
    budget: u64,
}

fn morton(g: GridPoint) -> u64 {
    let mut key = 0u64;
    for bit in (0..g.level).rev() {
        key = (key << 2) | (((g.ix >> bit) & 1) << 1 | ((g.iy >> bit) & 1)) as u64;
    }
    key
}

fn symbol(digit: u64) -> Direction {
    match digit & 3 {
        0 => Direction::I,
        1 => Direction::N,
        2 => Direction::E,
        _ => Direction::NE,
    }
}

/// The block of sorted `keys` at the level `shift / 2` levels above theirs.
fn block(keys: &[u64], shift: u32) -> impl Iterator<Item = Direction> + '_ {
    keys.iter().map(move |&k| symbol(k >> shift))
}

fn sorted_keys(points: impl IntoIterator<Item = GridPoint>) -> Vec<u64> {
    let mut keys: Vec<u64> = points.into_iter().map(morton).collect();
    keys.sort_unstable();
    keys
}

impl MultiSnapIndex {
    pub fn new(max_level: u32) -> Result<Self> {
        Self::with_budget(max_level, DEFAULT_BUDGET)
    }

    pub fn with_budget(max_level: u32, budget: u64) -> Result<Self> {
        check_max_level(max_level)?;
        Ok(MultiSnapIndex {
            registry: Registry::default(),
            tries: BTreeMap::new(),
            max_level,
            budget,
        })
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn tries(&self) -> &BTreeMap<usize, Trie> {
        &self.tries
    }

    pub fn node_count(&self) -> usize {
        self.tries.values().map(Trie::node_count).sum()
    }

    /// `Err(BudgetExceeded)` if a set of `n` points is too large to store.
    pub fn check_budget(&self, n: usize) -> Result<()> {
        let required = 4u128
            .checked_pow(n as u32)
            .map_or(u128::MAX, |p| p.saturating_mul(self.max_level as u128));
        if required > self.budget as u128 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    pub fn insert(&mut self, set: PointSet) -> Result<u32> {
        self.check_budget(set.len())?;
        let k = set.len();
        if !self.tries.contains_key(&k) {
            self.tries.insert(k, Trie::new(k, self.max_level)?);
        }
        let points: Vec<_> = set.points().to_vec();
        let owner = self.registry.add(set)?;
        let trie = self.tries.get_mut(&k).expect("created above");

        let mut previous: BTreeMap<Vec<u64>, NodeId> = BTreeMap::new();
        previous.insert(alloc::vec![0; k], trie.root());
        for d in 1..=self.max_level {
            // Distinct snap-roundings, built one point at a time.
            let mut partial: BTreeSet<Vec<u64>> = BTreeSet::new();
            partial.insert(Vec::new());
            for &p in &points {
                let candidates: Vec<u64> = snap_candidates(p, d).into_iter().map(morton).collect();
                let mut grown = BTreeSet::new();
                for keys in &partial {
                    for &c in &candidates {
                        let mut next = keys.clone();
                        let at = next.partition_point(|&x| x <= c);
                        next.insert(at, c);
                        grown.insert(next);
                    }
                }
                partial = grown;
            }
            let mut current = BTreeMap::new();
            let mut symbols = Vec::with_capacity(k);
            for keys in partial {
                let parent: Vec<u64> = keys.iter().map(|&x| x >> 2).collect();
                let from = *previous
                    .get(&parent)
                    .expect("the parent of a snap-rounding is a snap-rounding one level up");
                symbols.clear();
                symbols.extend(block(&keys, 0));
                let node = trie.extend(from, &symbols, owner)?;
                current.insert(keys, node);
            }
            previous = current;
        }
        Ok(owner)
    }

    /// Nearest stored sets of the query's size.
    ///
    /// At each level the query's nearest-point distribution is looked up;
    /// the walk resumes from the previous node whenever that distribution
    /// rounds to the previous level's one, and restarts at the root when
    /// double rounding breaks the chain. Stops at the first level missing.
    pub fn query_nearest(&self, query: &PointSet) -> QueryResult {
        let n = query.len();
        let Some(trie) = self.tries.get(&n) else {
            return QueryResult::empty();
        };
        let mut stats: BTreeMap<u32, LevelStats> = BTreeMap::new();
        let mut prev_keys: Vec<u64> = alloc::vec![0; n];
        let mut prev_node = trie.root();
        let mut d_star = 0;
        let mut symbols = Vec::with_capacity(n * self.max_level as usize);
        for d in 1..=self.max_level {
            let keys = sorted_keys(query.points().iter().map(|&q| nearest_grid_point(q, d)));
            let chained = keys.iter().zip(&prev_keys).all(|(&k, &p)| k >> 2 == p);
            symbols.clear();
            let from = if chained {
                symbols.extend(block(&keys, 0));
                prev_node
            } else {
                for level in 1..=d {
                    symbols.extend(block(&keys, 2 * (d - level)));
                }
                trie.root()
            };
            let (node, used) = trie.walk_from(from, &symbols);
            stats.insert(
                d,
                LevelStats {
                    level: d,
                    states: used as u64,
                    matching_calls: 0,
                    hits: if used == symbols.len() {
                        trie.finishers(node).len()
                    } else {
                        0
                    },
                },
            );
            if used < symbols.len() {
                break;
            }
            d_star = d;
            prev_keys = keys;
            prev_node = node;
        }
        if d_star == 0 {
            let mut empty = QueryResult::empty();
            empty.levels = stats.into_values().collect();
            return empty;
        }
        let owners = trie.finishers(prev_node).iter().copied();
        QueryResult::finish(&self.registry, owners, d_star, BOUND_FACTORS, stats)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_header(&mut out, IndexKind::MultiSnap, self.max_level);
        put_varint(&mut out, self.budget);
        self.registry.write_to(&mut out);
        write_tries(&mut out, &self.tries);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if read_header(&mut r)? != IndexKind::MultiSnap {
            return Err(Error::Corrupt("not a multisnap index"));
        }
        let max_level = read_max_level(&mut r)?;
        let budget = r.varint()?;
        let registry = Registry::read_from(&mut r)?;
        let tries = read_tries(&mut r, max_level, &registry)?;
        if !r.is_empty() {
            return Err(Error::Corrupt("trailing bytes after index"));
        }
        Ok(MultiSnapIndex {
            registry,
            tries,
            max_level,
            budget,
        })
    }
}
