//! Direction strings.
//!
//! A grid point at level `d` is spelled by the `d` compass steps that walk
//! from the origin through its coarser ancestors. A multiset of `n` grid
//! points becomes one string of length `n * d`: the point strings are sorted
//! lexicographically and emitted column by column, so block `i` holds the
//! `i`-th step of every point and the level-`(d-1)` string is a prefix of the
//! level-`d` one.
//!
//! Query strings are built the same way but from the sequence of nearest
//! grid points `n_1(q), n_2(q), ...` of a free point, one block per level
//! ([`LazyQueryState`]).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{max_index, nearest_grid_point, GridDistribution, GridPoint, Point};
use crate::{Error, Result};

/// One step between consecutive grid levels.
///
/// The declaration order is the lexicographic order of strings and the byte
/// value used in serialized tries; it must not change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Direction {
    I = 0,
    N = 1,
    S = 2,
    E = 3,
    W = 4,
    NE = 5,
    SE = 6,
    NW = 7,
    SW = 8,
}

impl Direction {
    pub const ALL: [Direction; 9] = [
        Direction::I,
        Direction::N,
        Direction::S,
        Direction::E,
        Direction::W,
        Direction::NE,
        Direction::SE,
        Direction::NW,
        Direction::SW,
    ];

    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<Direction> {
        Direction::ALL.get(i as usize).copied()
    }

    /// Index offset `(dx, dy)` on the finer level.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::I => (0, 0),
            Direction::N => (0, 1),
            Direction::S => (0, -1),
            Direction::E => (1, 0),
            Direction::W => (-1, 0),
            Direction::NE => (1, 1),
            Direction::SE => (1, -1),
            Direction::NW => (-1, 1),
            Direction::SW => (-1, -1),
        }
    }

    pub fn from_offset(dx: i64, dy: i64) -> Option<Direction> {
        Some(match (dx, dy) {
            (0, 0) => Direction::I,
            (0, 1) => Direction::N,
            (0, -1) => Direction::S,
            (1, 0) => Direction::E,
            (-1, 0) => Direction::W,
            (1, 1) => Direction::NE,
            (1, -1) => Direction::SE,
            (-1, 1) => Direction::NW,
            (-1, -1) => Direction::SW,
            _ => return None,
        })
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Direction::I => "I",
            Direction::N => "N",
            Direction::S => "S",
            Direction::E => "E",
            Direction::W => "W",
            Direction::NE => "NE",
            Direction::SE => "SE",
            Direction::NW => "NW",
            Direction::SW => "SW",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.mnemonic() == s)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// Comma-separated mnemonics, e.g. `I,NE,NE,I`.
pub fn format_symbols(symbols: &[Direction]) -> String {
    let mut out = String::new();
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(s.mnemonic());
    }
    out
}

/// Inverse of [`format_symbols`]. The empty string parses to no symbols.
pub fn parse_symbols(text: &str) -> Option<Vec<Direction>> {
    if text.trim().is_empty() {
        return Some(Vec::new());
    }
    text.split(',')
        .map(|s| Direction::from_mnemonic(s.trim()))
        .collect()
}

/// The string of a single grid point.
pub type PointString = Vec<Direction>;

/// A multiset of `cardinality` grid points on `level`, interleaved
/// column-major from the sorted point strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistributionString {
    pub cardinality: usize,
    pub level: u32,
    pub symbols: Vec<Direction>,
}

impl DistributionString {
    /// Symbols of level `d` (1-based).
    pub fn block(&self, d: u32) -> &[Direction] {
        let start = (d as usize - 1) * self.cardinality;
        &self.symbols[start..start + self.cardinality]
    }
}

impl fmt::Display for DistributionString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_symbols(&self.symbols))
    }
}

/// Step from `from` (level `d-1`) to `to` (level `d`).
pub fn direction_step(from: GridPoint, to: GridPoint) -> Result<Direction> {
    if to.level != from.level + 1 {
        return Err(Error::LevelMismatch {
            left: from.level,
            right: to.level,
        });
    }
    let base = from.rescaled(to.level);
    let dx = to.ix as i64 - base.ix as i64;
    let dy = to.iy as i64 - base.iy as i64;
    Direction::from_offset(dx, dy).ok_or(Error::NotANeighbor)
}

/// Applies one step; `None` if the result leaves the box.
pub fn apply_step(from: GridPoint, dir: Direction) -> Option<GridPoint> {
    let base = from.rescaled(from.level + 1);
    let (dx, dy) = dir.offset();
    let ix = base.ix as i64 + dx as i64;
    let iy = base.iy as i64 + dy as i64;
    let side = max_index(base.level) as i64;
    if (0..=side).contains(&ix) && (0..=side).contains(&iy) {
        Some(GridPoint {
            level: base.level,
            ix: ix as u32,
            iy: iy as u32,
        })
    } else {
        None
    }
}

/// Encodes a grid point by walking its ancestor chain
/// `origin, n_1(c_2), ..., n_{d-1}(g), g`, one symbol per level.
///
/// Every symbol is one of `I, N, E, NE`, and the string of
/// `nearest_grid_point(g, d-1)` is the prefix of length `d-1`.
pub fn encode_point(g: GridPoint) -> PointString {
    let d = g.level;
    let mut out = Vec::with_capacity(d as usize);
    for i in 1..=d {
        let shift = d - i;
        // Each index bit below the ancestor is a +1 step on that axis.
        let bx = (g.ix >> shift) & 1;
        let by = (g.iy >> shift) & 1;
        // At level 1 the whole index is the step (the origin rescales to 0).
        let dir = match (bx, by) {
            (0, 0) => Direction::I,
            (0, 1) => Direction::N,
            (1, 0) => Direction::E,
            _ => Direction::NE,
        };
        out.push(dir);
    }
    out
}

/// Walks `symbols` from the origin and returns the final grid point.
///
/// Any in-box walk decodes; `encode_point` returns the same string only for
/// ancestor-chain walks (those produced by `encode_point`).
pub fn decode_point(symbols: &[Direction]) -> Result<GridPoint> {
    if symbols.len() > crate::geometry::LEVEL_LIMIT as usize {
        return Err(Error::InvalidLevel(symbols.len() as u32));
    }
    let mut g = GridPoint::ORIGIN;
    for &s in symbols {
        g = apply_step(g, s).ok_or(Error::InvalidString)?;
    }
    Ok(g)
}

/// Sorts equal-length strings lexicographically with one stable counting
/// pass per column, last column first. Returns the sorting permutation.
pub fn radix_sort_order(strings: &[PointString]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..strings.len()).collect();
    let Some(len) = strings.first().map(Vec::len) else {
        return order;
    };
    debug_assert!(strings.iter().all(|s| s.len() == len));
    let mut scratch = alloc::vec![0usize; strings.len()];
    for col in (0..len).rev() {
        let mut starts = [0usize; 10];
        for s in strings {
            starts[s[col].index() as usize + 1] += 1;
        }
        for k in 1..10 {
            starts[k] += starts[k - 1];
        }
        for &i in &order {
            let bucket = strings[i][col].index() as usize;
            scratch[starts[bucket]] = i;
            starts[bucket] += 1;
        }
        core::mem::swap(&mut order, &mut scratch);
    }
    order
}

/// Emits sorted equal-length strings column by column.
#[allow(clippy::needless_range_loop)]
pub fn interleave(strings: &[PointString], order: &[usize]) -> Vec<Direction> {
    let len = strings.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(len * strings.len());
    for col in 0..len {
        out.extend(order.iter().map(|&i| strings[i][col]));
    }
    out
}

/// Interleaved string of a grid distribution.
pub fn encode_distribution(dist: &GridDistribution) -> DistributionString {
    let strings: Vec<PointString> = dist.expand().into_iter().map(encode_point).collect();
    let order = radix_sort_order(&strings);
    DistributionString {
        cardinality: strings.len(),
        level: dist.level(),
        symbols: interleave(&strings, &order),
    }
}

/// Builds the string of a free point set one level at a time.
///
/// Each point follows its nearest grid points `n_1(q), n_2(q), ...`. The
/// permutation that sorts the walks is refined per block: points whose
/// walks agree so far form a group, and each group is counting-sorted on
/// the new symbol.
#[derive(Clone, Debug)]
pub struct LazyQueryState {
    points: Vec<Point>,
    current: Vec<GridPoint>,
    order: Vec<usize>,
    group_start: Vec<bool>,
    level: u32,
    max_level: u32,
}

impl LazyQueryState {
    pub fn new(points: &[Point], max_level: u32) -> Self {
        let n = points.len();
        let mut group_start = alloc::vec![false; n];
        if let Some(first) = group_start.first_mut() {
            *first = true;
        }
        LazyQueryState {
            points: points.to_vec(),
            current: alloc::vec![GridPoint::ORIGIN; n],
            order: (0..n).collect(),
            group_start,
            level: 0,
            max_level,
        }
    }

    /// Level described by the blocks produced so far.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Current nearest grid points in string order.
    pub fn sorted_grid_points(&self) -> Vec<GridPoint> {
        self.order.iter().map(|&i| self.current[i]).collect()
    }

    /// `n_d(Q)` for the current level.
    pub fn distribution(&self) -> GridDistribution {
        let mut dist = GridDistribution::new(self.level);
        for &g in &self.current {
            dist.add(g, 1);
        }
        dist
    }

    /// The next block, or `None` once `max_level` is reached.
    pub fn next_block(&mut self) -> Option<Vec<Direction>> {
        if self.level >= self.max_level {
            return None;
        }
        let d = self.level + 1;
        let mut symbols = Vec::with_capacity(self.points.len());
        for (p, cur) in self.points.iter().zip(self.current.iter_mut()) {
            let next = nearest_grid_point(*p, d);
            let step = direction_step(*cur, next)
                .expect("nearest grid points of consecutive levels are one step apart");
            symbols.push(step);
            *cur = next;
        }
        self.refine(&symbols);
        self.level = d;
        Some(self.order.iter().map(|&i| symbols[i]).collect())
    }

    fn refine(&mut self, symbols: &[Direction]) {
        let n = self.order.len();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && !self.group_start[end] {
                end += 1;
            }
            let group = &mut self.order[start..end];
            if group.len() > 1 {
                let mut buckets: [Vec<usize>; 9] = Default::default();
                for &i in group.iter() {
                    buckets[symbols[i].index() as usize].push(i);
                }
                let mut pos = start;
                for bucket in buckets.iter().filter(|b| !b.is_empty()) {
                    self.group_start[pos] = true;
                    for (k, &i) in bucket.iter().enumerate() {
                        self.order[pos + k] = i;
                        if k > 0 {
                            self.group_start[pos + k] = false;
                        }
                    }
                    pos += bucket.len();
                }
            }
            start = end;
        }
    }

    /// Runs the remaining blocks and returns the full string so far.
    pub fn finish(mut self, mut prefix: Vec<Direction>) -> DistributionString {
        while let Some(block) = self.next_block() {
            prefix.extend(block);
        }
        DistributionString {
            cardinality: self.points.len(),
            level: self.level,
            symbols: prefix,
        }
    }
}

/// The full nearest-point walk string of `points` through `max_level`.
pub fn walk_string(points: &[Point], max_level: u32) -> DistributionString {
    LazyQueryState::new(points, max_level).finish(Vec::new())
}
