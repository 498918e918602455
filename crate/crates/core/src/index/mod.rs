//! Point-set databases keyed by grid distribution strings.
//!
//! [`CompactIndex`] stores one nearest-point string per set and answers
//! nearest, subset and superset queries with a matching-guided trie search.
//! [`MultiSnapIndex`] stores every snap-rounding of each set, so a nearest
//! query is a plain trie walk, at exponential space cost.
//!
//! Both keep one trie per point-set cardinality.
//!
//! # Binary layout
//!
//! ```text
//! index    := "GMIX" version:u8 kind:u8 varint(max_level) [varint(budget) if multisnap]
//!             registry varint(trie_count) trie*
//! registry := varint(count) (string(id) varint(n) (f64le(x) f64le(y)){n})*
//! string   := varint(len) utf8-bytes
//! ```
//!
//! Tries follow in ascending cardinality; see [`crate::trie`] for their layout.

mod compact;
mod multisnap;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use compact::{CompactIndex, QueryOptions, Strategy};
pub use multisnap::{MultiSnapIndex, DEFAULT_BUDGET};

use crate::codec::{put_f64, put_str, put_varint, Reader};
use crate::geometry::{Point, PointSet, LEVEL_LIMIT};
use crate::trie::Trie;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"GMIX";
const VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Compact,
    MultiSnap,
}

impl IndexKind {
    fn tag(self) -> u8 {
        match self {
            IndexKind::Compact => 0,
            IndexKind::MultiSnap => 1,
        }
    }
}

/// Reads the kind tag of a serialized index without decoding it.
pub fn peek_kind(bytes: &[u8]) -> Result<IndexKind> {
    let mut r = Reader::new(bytes);
    read_header(&mut r)
}

fn read_header(r: &mut Reader<'_>) -> Result<IndexKind> {
    if r.take(4)? != MAGIC {
        return Err(Error::Corrupt("bad magic"));
    }
    if r.byte()? != VERSION {
        return Err(Error::Corrupt("unsupported version"));
    }
    match r.byte()? {
        0 => Ok(IndexKind::Compact),
        1 => Ok(IndexKind::MultiSnap),
        _ => Err(Error::Corrupt("unknown index kind")),
    }
}

fn write_header(out: &mut Vec<u8>, kind: IndexKind, max_level: u32) {
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(kind.tag());
    put_varint(out, max_level as u64);
}

fn read_max_level(r: &mut Reader<'_>) -> Result<u32> {
    let level = r.varint_u32()?;
    if level == 0 || level > LEVEL_LIMIT {
        return Err(Error::Corrupt("max level out of range"));
    }
    Ok(level)
}

fn check_max_level(max_level: u32) -> Result<()> {
    if max_level == 0 || max_level > LEVEL_LIMIT {
        Err(Error::InvalidLevel(max_level))
    } else {
        Ok(())
    }
}

/// Which query relation to answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryMode {
    /// Stored sets of the query's size, nearest in bottleneck distance.
    Nearest,
    /// Stored sets matching part of the query.
    Subset,
    /// Stored sets containing a match for the whole query.
    Superset,
}

/// Work done at one grid level of a query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub level: u32,
    /// Trie nodes visited.
    pub states: u64,
    pub matching_calls: u64,
    /// Distinct point sets hitting at this level.
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult {
    /// Ids of the point sets hitting at `d_star`, sorted.
    pub hits: Vec<String>,
    /// Deepest level with a hit; 0 when nothing hit.
    pub d_star: u32,
    /// Certified upper bound on the distance of every returned set.
    pub bound: Option<f64>,
    /// The tighter bound the original analysis claims; reported, not relied on.
    pub claimed_bound: Option<f64>,
    pub levels: Vec<LevelStats>,
}

impl QueryResult {
    pub(crate) fn empty() -> Self {
        QueryResult {
            hits: Vec::new(),
            d_star: 0,
            bound: None,
            claimed_bound: None,
            levels: Vec::new(),
        }
    }

    pub(crate) fn finish(
        registry: &Registry,
        owners: impl IntoIterator<Item = u32>,
        d_star: u32,
        factors: (f64, f64),
        levels: BTreeMap<u32, LevelStats>,
    ) -> Self {
        let mut hits: Vec<String> = owners
            .into_iter()
            .map(|o| String::from(registry.get(o).id()))
            .collect();
        hits.sort();
        hits.dedup();
        let step = crate::geometry::delta(d_star).ok();
        QueryResult {
            hits,
            d_star,
            bound: step.map(|s| factors.0 * s),
            claimed_bound: step.map(|s| factors.1 * s),
            levels: levels.into_values().collect(),
        }
    }
}

/// Stored point sets, addressed by a dense internal id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    sets: Vec<PointSet>,
    by_id: BTreeMap<String, u32>,
}

impl Registry {
    pub fn add(&mut self, set: PointSet) -> Result<u32> {
        if self.by_id.contains_key(set.id()) {
            return Err(Error::DuplicateId(String::from(set.id())));
        }
        let owner = self.sets.len() as u32;
        self.by_id.insert(String::from(set.id()), owner);
        self.sets.push(set);
        Ok(owner)
    }

    /// Panics on an unknown internal id.
    pub fn get(&self, owner: u32) -> &PointSet {
        &self.sets[owner as usize]
    }

    pub fn lookup(&self, id: &str) -> Option<&PointSet> {
        self.by_id.get(id).map(|&o| self.get(o))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PointSet> {
        self.sets.iter()
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        put_varint(out, self.sets.len() as u64);
        for set in &self.sets {
            put_str(out, set.id());
            put_varint(out, set.len() as u64);
            for p in set.points() {
                put_f64(out, p.x());
                put_f64(out, p.y());
            }
        }
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let count = r.varint()?;
        let mut reg = Registry::default();
        for _ in 0..count {
            let id = r.string()?;
            let n = r.varint()? as usize;
            let mut points = Vec::with_capacity(n.min(1 << 16));
            for _ in 0..n {
                let (x, y) = (r.f64()?, r.f64()?);
                points.push(Point::new(x, y).map_err(|_| Error::Corrupt("stored point outside box"))?);
            }
            let set = PointSet::new(id, points).map_err(|_| Error::Corrupt("empty stored set"))?;
            reg.add(set).map_err(|_| Error::Corrupt("duplicate stored id"))?;
        }
        Ok(reg)
    }
}

fn write_tries(out: &mut Vec<u8>, tries: &BTreeMap<usize, Trie>) {
    put_varint(out, tries.len() as u64);
    for trie in tries.values() {
        trie.write_to(out);
    }
}

fn read_tries(r: &mut Reader<'_>, max_level: u32, registry: &Registry) -> Result<BTreeMap<usize, Trie>> {
    let count = r.varint()?;
    let mut tries = BTreeMap::new();
    for _ in 0..count {
        let trie = Trie::read_from(r)?;
        if trie.max_level() != max_level {
            return Err(Error::Corrupt("trie depth disagrees with index"));
        }
        if tries.insert(trie.cardinality(), trie).is_some() {
            return Err(Error::Corrupt("two tries with one cardinality"));
        }
    }
    for trie in tries.values() {
        for node in 0..trie.node_count() {
            let id = crate::trie::NodeId::from_index(node);
            for &owner in trie.finishers(id) {
                if owner as usize >= registry.len() || registry.get(owner).len() != trie.cardinality() {
                    return Err(Error::Corrupt("finisher does not name a stored set of that size"));
                }
            }
        }
    }
    Ok(tries)
}
