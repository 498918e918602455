//! Linear-space index: each set is stored once, as the string of its
//! nearest grid points at every level.
//!
//! A query searches the trie level by level. Inside a level block every
//! child edge places one more grid point of the stored set; a node stays
//! alive while the placed points can still be matched, cell by cell, into
//! the query's nearest grid points on that level. Nodes closing a block are
//! hits for the sets finishing there.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;

use super::{
    check_max_level, read_header, read_max_level, read_tries, write_header, write_tries, IndexKind,
    LevelStats, QueryMode, QueryResult, Registry,
};
use crate::codec::Reader;
use crate::encoding::{apply_step, walk_string};
use crate::geometry::{GridDistribution, GridPoint, PointSet};
use crate::matching::{matching_size, Adjacency};
use crate::trie::{NodeId, Trie};
use crate::{Error, Result};

/// Certified hit bound `4 * delta` and the original `2 * delta`.
const BOUND_FACTORS: (f64, f64) = (4.0, 2.0);

/// How the trie search tests matchability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// After every placed point.
    PerNode,
    /// Only on completed level distributions.
    LeafOnly,
    /// Per trie, whichever of `10^k` (per-node) and the number of stored
    /// sets (leaf-only) is smaller.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryOptions {
    pub strategy: Strategy,
    pub adjacency: Adjacency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompactIndex {
    registry: Registry,
    tries: BTreeMap<usize, Trie>,
    max_level: u32,
}

struct State {
    node: NodeId,
    /// Previous-level grid points of the stored set, in string order.
    pending: Rc<Vec<GridPoint>>,
    placed: Vec<GridPoint>,
}

impl CompactIndex {
    pub fn new(max_level: u32) -> Result<Self> {
        check_max_level(max_level)?;
        Ok(CompactIndex {
            registry: Registry::default(),
            tries: BTreeMap::new(),
            max_level,
        })
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
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

    /// Adds `set` as a single path of depth `max_level * |set|`.
    pub fn insert(&mut self, set: PointSet) -> Result<u32> {
        let string = walk_string(set.points(), self.max_level);
        let k = set.len();
        let owner = self.registry.add(set)?;
        let trie = match self.tries.entry(k) {
            alloc::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            alloc::collections::btree_map::Entry::Vacant(e) => e.insert(Trie::new(k, self.max_level)?),
        };
        trie.insert(&string.symbols, owner)?;
        Ok(owner)
    }

    pub fn nearest(&self, query: &PointSet, strategy: Strategy) -> QueryResult {
        self.query(
            query,
            QueryMode::Nearest,
            &QueryOptions {
                strategy,
                ..Default::default()
            },
        )
    }

    pub fn subset(&self, query: &PointSet) -> QueryResult {
        self.query(query, QueryMode::Subset, &QueryOptions::default())
    }

    pub fn superset(&self, query: &PointSet) -> QueryResult {
        self.query(query, QueryMode::Superset, &QueryOptions::default())
    }

    pub fn query(&self, query: &PointSet, mode: QueryMode, options: &QueryOptions) -> QueryResult {
        let n = query.len();
        let tries: Vec<&Trie> = self
            .tries
            .iter()
            .filter(|(&k, _)| match mode {
                QueryMode::Nearest => k == n,
                QueryMode::Subset => k <= n,
                QueryMode::Superset => k >= n,
            })
            .map(|(_, t)| t)
            .collect();
        if tries.is_empty() {
            return QueryResult::empty();
        }
        let targets: Vec<GridDistribution> = (1..=self.max_level)
            .map(|d| GridDistribution::nearest(query.points(), d))
            .collect();

        let mut stats: BTreeMap<u32, LevelStats> = BTreeMap::new();
        let mut best = 0;
        let mut owners: BTreeSet<u32> = BTreeSet::new();
        for trie in tries {
            let strategy = self.resolve(options.strategy, trie);
            let (d_star, found) = search(trie, &targets, n, mode, strategy, options.adjacency, &mut stats);
            if d_star > best {
                best = d_star;
                owners.clear();
            }
            if d_star == best && d_star > 0 {
                owners.extend(found);
            }
        }
        if best == 0 {
            let mut empty = QueryResult::empty();
            empty.levels = stats.into_values().collect();
            return empty;
        }
        let hits_at_best = owners.len();
        if let Some(s) = stats.get_mut(&best) {
            s.hits = hits_at_best;
        }
        QueryResult::finish(&self.registry, owners, best, BOUND_FACTORS, stats)
    }

    fn resolve(&self, strategy: Strategy, trie: &Trie) -> Strategy {
        match strategy {
            Strategy::Auto => {
                let stored = self
                    .registry
                    .iter()
                    .filter(|s| s.len() == trie.cardinality())
                    .count() as u64;
                let per_node_cost = 10u64.saturating_pow(trie.cardinality() as u32);
                if per_node_cost <= stored {
                    Strategy::PerNode
                } else {
                    Strategy::LeafOnly
                }
            }
            s => s,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_header(&mut out, IndexKind::Compact, self.max_level);
        self.registry.write_to(&mut out);
        write_tries(&mut out, &self.tries);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if read_header(&mut r)? != IndexKind::Compact {
            return Err(Error::Corrupt("not a compact index"));
        }
        let max_level = read_max_level(&mut r)?;
        let registry = Registry::read_from(&mut r)?;
        let tries = read_tries(&mut r, max_level, &registry)?;
        if !r.is_empty() {
            return Err(Error::Corrupt("trailing bytes after index"));
        }
        Ok(CompactIndex {
            registry,
            tries,
            max_level,
        })
    }
}

/// Matching size a node holding `placed` of `block` points must reach.
fn required(mode: QueryMode, query_size: usize, block: usize, placed: usize) -> u64 {
    match mode {
        QueryMode::Nearest | QueryMode::Subset => placed as u64,
        // Query points left unmatched may still go to the points not yet placed.
        QueryMode::Superset => (query_size + placed).saturating_sub(block) as u64,
    }
}

fn viable(
    placed: &[GridPoint],
    target: &GridDistribution,
    need: u64,
    adjacency: Adjacency,
    stats: &mut LevelStats,
) -> bool {
    if need == 0 {
        return true;
    }
    stats.matching_calls += 1;
    let dist = GridDistribution::from_grid_points(target.level(), placed.iter().copied())
        .expect("placed points share the level");
    let size = matching_size(&dist, target, adjacency, need).expect("same-level distributions");
    size as u64 >= need
}

/// Level-synchronous search of one trie. Returns the deepest hit level and
/// the sets hitting there.
fn search(
    trie: &Trie,
    targets: &[GridDistribution],
    query_size: usize,
    mode: QueryMode,
    strategy: Strategy,
    adjacency: Adjacency,
    stats: &mut BTreeMap<u32, LevelStats>,
) -> (u32, Vec<u32>) {
    let block = trie.cardinality();
    let mut frontier: Vec<(NodeId, Rc<Vec<GridPoint>>)> =
        alloc::vec![(trie.root(), Rc::new(alloc::vec![GridPoint::ORIGIN; block]))];
    let mut d_star = 0;
    let mut hits = Vec::new();

    for (level, target) in (1..).zip(targets) {
        let level_stats = stats.entry(level).or_insert(LevelStats {
            level,
            ..Default::default()
        });
        let ends = match strategy {
            Strategy::LeafOnly => {
                expand_leaf_only(trie, &frontier, target, query_size, mode, adjacency, level_stats)
            }
            _ => expand_per_node(trie, &frontier, target, query_size, mode, adjacency, level_stats),
        };
        if ends.is_empty() {
            break;
        }
        let mut found: BTreeSet<u32> = BTreeSet::new();
        for (node, _) in &ends {
            found.extend(trie.finishers(*node).iter().copied());
        }
        level_stats.hits += found.len();
        d_star = level;
        hits = found.into_iter().collect();
        frontier = ends
            .into_iter()
            .map(|(node, placed)| (node, Rc::new(placed)))
            .collect();
    }
    (d_star, hits)
}

fn expand_per_node(
    trie: &Trie,
    frontier: &[(NodeId, Rc<Vec<GridPoint>>)],
    target: &GridDistribution,
    query_size: usize,
    mode: QueryMode,
    adjacency: Adjacency,
    stats: &mut LevelStats,
) -> Vec<(NodeId, Vec<GridPoint>)> {
    let block = trie.cardinality();
    let mut layer: Vec<State> = frontier
        .iter()
        .map(|(node, pending)| State {
            node: *node,
            pending: Rc::clone(pending),
            placed: Vec::with_capacity(block),
        })
        .collect();
    for k in 0..block {
        let need = required(mode, query_size, block, k + 1);
        let mut next = Vec::new();
        for state in &layer {
            for (symbol, child) in trie.children(state.node) {
                let Some(g) = apply_step(state.pending[k], symbol) else {
                    continue;
                };
                stats.states += 1;
                let mut placed = state.placed.clone();
                placed.push(g);
                if viable(&placed, target, need, adjacency, stats) {
                    next.push(State {
                        node: child,
                        pending: Rc::clone(&state.pending),
                        placed,
                    });
                }
            }
        }
        layer = next;
    }
    layer.into_iter().map(|s| (s.node, s.placed)).collect()
}

fn expand_leaf_only(
    trie: &Trie,
    frontier: &[(NodeId, Rc<Vec<GridPoint>>)],
    target: &GridDistribution,
    query_size: usize,
    mode: QueryMode,
    adjacency: Adjacency,
    stats: &mut LevelStats,
) -> Vec<(NodeId, Vec<GridPoint>)> {
    let block = trie.cardinality();
    let need = required(mode, query_size, block, block);
    let mut ends = Vec::new();
    for (start, pending) in frontier {
        let mut stack: Vec<(NodeId, Vec<GridPoint>)> = alloc::vec![(*start, Vec::with_capacity(block))];
        while let Some((node, placed)) = stack.pop() {
            let k = placed.len();
            if k == block {
                if viable(&placed, target, need, adjacency, stats) {
                    ends.push((node, placed));
                }
                continue;
            }
            // Reverse so that children pop in symbol order.
            let children: Vec<_> = trie.children(node).collect();
            for &(symbol, child) in children.iter().rev() {
                let Some(g) = apply_step(pending[k], symbol) else {
                    continue;
                };
                stats.states += 1;
                let mut next = placed.clone();
                next.push(g);
                stack.push((child, next));
            }
        }
    }
    ends
}
