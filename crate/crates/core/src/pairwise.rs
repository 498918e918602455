//! Bottleneck distance estimate for two point sets, from the deepest level
//! at which their nearest grid points still match cell by cell.

use core::f64::consts::SQRT_2;

use crate::geometry::{delta, GridDistribution, PointSet};
use crate::index::{CompactIndex, Strategy};
use crate::matching::{matching_size, Adjacency};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxResult {
    /// `delta(d_star) / sqrt(2)`.
    pub estimate: f64,
    pub d_star: u32,
    /// `delta(d_star) / 4`, or 0 at the resolution floor.
    pub lower: f64,
    /// `4 * delta(d_star)`.
    pub upper: f64,
    /// `2 * delta(d_star)`, the original claim; reported only.
    pub claimed_upper: f64,
    /// The sets still matched at `max_level`; the distance may be anything
    /// down to zero.
    pub at_resolution_floor: bool,
}

/// Estimates `d_B(p, q)` by querying `q` against an index holding only `p`.
pub fn approx_bottleneck(p: &PointSet, q: &PointSet, max_level: u32) -> Result<ApproxResult> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut index = CompactIndex::new(max_level)?;
    index.insert(PointSet::new("p", p.points().to_vec())?)?;
    let found = index.nearest(q, Strategy::PerNode);
    // Level 1 has a single cell, so equal-size sets always match there.
    assert!(found.d_star >= 1, "equal-size sets must match at level 1");
    let step = delta(found.d_star)?;
    let at_resolution_floor = found.d_star == max_level;
    Ok(ApproxResult {
        estimate: step / SQRT_2,
        d_star: found.d_star,
        lower: if at_resolution_floor { 0.0 } else { step / 4.0 },
        upper: 4.0 * step,
        claimed_upper: 2.0 * step,
        at_resolution_floor,
    })
}

/// Whether `n_d(p)` and `n_d(q)` admit a saturating cell-adjacent matching.
pub fn matches_at_level(p: &PointSet, q: &PointSet, d: u32) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let a = GridDistribution::nearest(p.points(), d);
    let b = GridDistribution::nearest(q.points(), d);
    let size = matching_size(&a, &b, Adjacency::SharedCell, u64::MAX)?;
    Ok(size as usize == p.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::exact_bottleneck;

    fn set(id: &str, coords: &[(f64, f64)]) -> PointSet {
        PointSet::from_coords(id, coords).unwrap()
    }

    #[test]
    fn identical_sets_hit_the_floor() {
        let p = set("p", &[(0.2, 0.3), (0.7, 0.1)]);
        let r = approx_bottleneck(&p, &p, 16).unwrap();
        assert_eq!(r.d_star, 16);
        assert!(r.at_resolution_floor);
        assert_eq!(r.lower, 0.0);
        assert!(r.upper > 0.0);
    }

    #[test]
    fn single_point_window() {
        let p = set("p", &[(0.0, 0.0)]);
        let q = set("q", &[(0.3, 0.1)]);
        let exact = exact_bottleneck(p.points(), q.points()).unwrap();
        assert!((exact - 0.4).abs() < 1e-12);
        let r = approx_bottleneck(&p, &q, 20).unwrap();
        assert!(!r.at_resolution_floor);
        assert!(r.lower <= exact && exact <= r.upper);
        let ratio = r.estimate / exact;
        assert!((1.0 / (2.0 * SQRT_2)..=2.0 * SQRT_2).contains(&ratio));
        assert!(r.lower <= r.estimate && r.estimate <= r.upper);
        assert_eq!(approx_bottleneck(&q, &p, 20).unwrap().d_star, r.d_star);
    }

    #[test]
    fn levels_agree_with_direct_test() {
        let p = set("p", &[(0.1, 0.1), (0.6, 0.62)]);
        let q = set("q", &[(0.13, 0.09), (0.58, 0.6)]);
        let r = approx_bottleneck(&p, &q, 20).unwrap();
        for d in 1..=r.d_star {
            assert!(matches_at_level(&p, &q, d).unwrap());
        }
        assert!(!matches_at_level(&p, &q, r.d_star + 1).unwrap());
    }

    #[test]
    fn size_mismatch() {
        let p = set("p", &[(0.1, 0.1)]);
        let q = set("q", &[(0.1, 0.1), (0.2, 0.2)]);
        assert!(approx_bottleneck(&p, &q, 10).is_err());
    }
}
