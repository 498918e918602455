//! Nested grids over the unit box.
//!
//! Level `d >= 1` is the lattice of spacing `delta(d) = 2^(1-d)`, so it has
//! `2^(d-1) + 1` vertices per axis. Level 0 is the origin alone. A grid
//! point is stored by its integer lattice indices, which keeps snapping,
//! rescaling and adjacency exact.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Default deepest grid level of an index (`delta ~ 1.9e-6`).
pub const DEFAULT_MAX_LEVEL: u32 = 20;

/// Deepest level supported by the `u32` lattice indices.
pub const LEVEL_LIMIT: u32 = 30;

/// Coordinates this close to a half-way point between two grid lines are
/// rounded as exact ties.
pub const TIE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

/// A point of the unit box `[0,1]^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
            Ok(Point { x, y })
        } else {
            Err(Error::PointOutOfBox { x, y })
        }
    }

    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub fn x(self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.y
    }
}

/// A named, non-empty sequence of points. Duplicates are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    id: String,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Ok(PointSet {
            id: id.into(),
            points,
        })
    }

    /// Validates raw coordinate pairs.
    pub fn from_coords(id: impl Into<String>, coords: &[(f64, f64)]) -> Result<Self> {
        let points = coords
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(id, points)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A vertex of the level-`level` grid at `(ix, iy) * delta(level)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub level: u32,
    pub ix: u32,
    pub iy: u32,
}

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint {
        level: 0,
        ix: 0,
        iy: 0,
    };

    pub fn new(level: u32, ix: u32, iy: u32) -> Result<Self> {
        if level > LEVEL_LIMIT {
            return Err(Error::InvalidLevel(level));
        }
        let side = max_index(level);
        if ix > side || iy > side {
            return Err(Error::PointOutOfBox {
                x: ix as f64 * level_spacing(level),
                y: iy as f64 * level_spacing(level),
            });
        }
        Ok(GridPoint { level, ix, iy })
    }

    /// The embedded position in the unit box.
    pub fn to_point(self) -> Point {
        let step = level_spacing(self.level);
        Point {
            x: self.ix as f64 * step,
            y: self.iy as f64 * step,
        }
    }

    pub fn is_origin(self) -> bool {
        self.ix == 0 && self.iy == 0
    }

    /// The same position expressed on the finer level `level`.
    pub fn rescaled(self, level: u32) -> GridPoint {
        debug_assert!(level >= self.level);
        if self.level == 0 {
            return GridPoint { level, ix: 0, iy: 0 };
        }
        let shift = level - self.level;
        GridPoint {
            level,
            ix: self.ix << shift,
            iy: self.iy << shift,
        }
    }

    /// `nearest_grid_point(self, level - 1)`; for lattice points the S/W
    /// tie rule reduces to halving the indices and rounding down.
    pub fn parent(self) -> GridPoint {
        match self.level {
            0 | 1 => GridPoint::ORIGIN,
            level => GridPoint {
                level: level - 1,
                ix: self.ix >> 1,
                iy: self.iy >> 1,
            },
        }
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.to_point();
        write!(f, "L{}({}, {})", self.level, p.x, p.y)
    }
}

/// Largest lattice index on `level` (`2^(level-1)`, or 0 for the origin level).
#[inline]
pub fn max_index(level: u32) -> u32 {
    if level == 0 {
        0
    } else {
        1u32 << (level - 1)
    }
}

/// `2^(1-d)` built from its bit pattern, so it is exact for every level.
#[inline]
fn level_spacing(level: u32) -> f64 {
    if level == 0 {
        return 1.0;
    }
    f64::from_bits(((1024 - level) as u64) << 52)
}

/// Grid length `delta_d = 2^(1-d)` of level `d`.
pub fn delta(d: u32) -> Result<f64> {
    if d == 0 || d > 1023 {
        return Err(Error::InvalidLevel(d));
    }
    Ok(level_spacing(d))
}

/// L1 distance, the norm bottleneck distances are measured in.
pub fn l1_dist(p: Point, q: Point) -> f64 {
    (p.x - q.x).abs() + (p.y - q.y).abs()
}

/// Chebyshev distance.
pub fn linf_dist(p: Point, q: Point) -> f64 {
    let dx = (p.x - q.x).abs();
    let dy = (p.y - q.y).abs();
    if dx >= dy {
        dx
    } else {
        dy
    }
}

/// Rounds a non-negative scaled coordinate to the nearest integer, sending
/// exact and near half-ties down.
#[inline]
fn round_half_down(scaled: f64, tolerance: f64) -> u32 {
    let floor = scaled as u32;
    if scaled - floor as f64 > 0.5 + tolerance {
        floor + 1
    } else {
        floor
    }
}

/// Nearest level-`d` grid point, ties broken toward South and West.
/// Level 0 always yields the origin.
///
/// Panics if `d > LEVEL_LIMIT`.
pub fn nearest_grid_point(p: Point, d: u32) -> GridPoint {
    assert!(d <= LEVEL_LIMIT, "grid level {d} exceeds {LEVEL_LIMIT}");
    if d == 0 {
        return GridPoint::ORIGIN;
    }
    let scale = max_index(d) as f64;
    let tolerance = TIE_TOLERANCE * scale;
    GridPoint {
        level: d,
        ix: round_half_down(p.x * scale, tolerance),
        iy: round_half_down(p.y * scale, tolerance),
    }
}

/// `n_0(p)`: the origin, whatever `p` is.
pub fn nearest_grid_point_level0(_p: Point) -> GridPoint {
    GridPoint::ORIGIN
}

fn axis_candidates(coord: f64, scale: f64, nearest: u32) -> ([u32; 2], usize) {
    let scaled = coord * scale;
    let floor = scaled as u32;
    if scaled == floor as f64 {
        // Neighbouring lines sit at distance exactly delta and are excluded.
        ([floor, floor], 1)
    } else {
        debug_assert!(nearest == floor || nearest == floor + 1);
        ([floor, floor + 1], 2)
    }
}

/// Grid points within Chebyshev distance `< delta_d` of `p`, together with
/// `nearest_grid_point(p, d)`: the corners of the cell containing `p`.
/// Sorted by `(ix, iy)`, between one and four entries.
pub fn snap_candidates(p: Point, d: u32) -> Vec<GridPoint> {
    let nearest = nearest_grid_point(p, d);
    if d == 0 {
        return alloc::vec![nearest];
    }
    let scale = max_index(d) as f64;
    let (xs, nx) = axis_candidates(p.x, scale, nearest.ix);
    let (ys, ny) = axis_candidates(p.y, scale, nearest.iy);
    let mut out = Vec::with_capacity(nx * ny);
    for &ix in &xs[..nx] {
        for &iy in &ys[..ny] {
            out.push(GridPoint { level: d, ix, iy });
        }
    }
    if !out.contains(&nearest) {
        out.push(nearest);
        out.sort_unstable();
    }
    out
}

/// Whether two same-level grid points are corners of a common grid cell.
pub fn cell_adjacent(a: GridPoint, b: GridPoint) -> Result<bool> {
    if a.level != b.level {
        return Err(Error::LevelMismatch {
            left: a.level,
            right: b.level,
        });
    }
    Ok(a.ix.abs_diff(b.ix) <= 1 && a.iy.abs_diff(b.iy) <= 1)
}

/// A multiset of grid points on one level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridDistribution {
    level: u32,
    counts: BTreeMap<(u32, u32), u32>,
}

impl GridDistribution {
    pub fn new(level: u32) -> Self {
        GridDistribution {
            level,
            counts: BTreeMap::new(),
        }
    }

    /// `n_d(points)`: every point snapped to its nearest level-`d` grid point.
    pub fn nearest(points: &[Point], d: u32) -> Self {
        let mut dist = GridDistribution::new(d);
        for &p in points {
            dist.add(nearest_grid_point(p, d), 1);
        }
        dist
    }

    pub fn from_grid_points(level: u32, points: impl IntoIterator<Item = GridPoint>) -> Result<Self> {
        let mut dist = GridDistribution::new(level);
        for g in points {
            if g.level != level {
                return Err(Error::LevelMismatch {
                    left: level,
                    right: g.level,
                });
            }
            dist.add(g, 1);
        }
        Ok(dist)
    }

    /// Adds `count` copies of `g`. Panics on a level mismatch.
    pub fn add(&mut self, g: GridPoint, count: u32) {
        assert_eq!(
            g.level, self.level,
            "grid point level does not match distribution"
        );
        if count > 0 {
            *self.counts.entry((g.ix, g.iy)).or_insert(0) += count;
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Total multiplicity.
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Number of distinct grid points.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, g: GridPoint) -> u32 {
        if g.level != self.level {
            return 0;
        }
        self.counts.get(&(g.ix, g.iy)).copied().unwrap_or(0)
    }

    /// Distinct grid points with their multiplicities, in `(ix, iy)` order.
    pub fn iter(&self) -> impl Iterator<Item = (GridPoint, u32)> + '_ {
        let level = self.level;
        self.counts
            .iter()
            .map(move |(&(ix, iy), &c)| (GridPoint { level, ix, iy }, c))
    }

    /// Members repeated by multiplicity.
    pub fn expand(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (g, c) in self.iter() {
            out.extend(core::iter::repeat_n(g, c as usize));
        }
        out
    }

    /// `n_{d-1}` applied to every member.
    pub fn parent(&self) -> GridDistribution {
        let mut out = GridDistribution::new(self.level.saturating_sub(1));
        for (g, c) in self.iter() {
            out.add(g.parent(), c);
        }
        out
    }

    /// Whether `self` is contained in `other` as a multiset.
    pub fn is_submultiset_of(&self, other: &GridDistribution) -> bool {
        self.level == other.level && self.iter().all(|(g, c)| other.count(g) >= c)
    }
}
