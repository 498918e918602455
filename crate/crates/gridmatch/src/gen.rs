//! Seeded random instances.
//!
//! Every random choice comes from ChaCha8 seeded with `seed_from_u64`, so a
//! seed reproduces the same sets on every platform.

use gridmatch_core::geometry::{Point, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::Record;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut impl Rng) -> Point {
    Point::new(rng.random::<f64>(), rng.random::<f64>()).expect("uniform samples lie in the box")
}

pub fn random_points(rng: &mut impl Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| random_point(rng)).collect()
}

pub fn random_set(rng: &mut impl Rng, id: impl Into<String>, n: usize) -> PointSet {
    PointSet::new(id, random_points(rng, n)).expect("n > 0")
}

/// Shifts each coordinate uniformly by at most `eps`, clamped to the box.
pub fn perturb_points(rng: &mut impl Rng, points: &[Point], eps: f64) -> Vec<Point> {
    let mut shift = |v: f64| {
        let s = if eps > 0.0 {
            rng.random_range(-eps..=eps)
        } else {
            0.0
        };
        (v + s).clamp(0.0, 1.0)
    };
    points
        .iter()
        .map(|p| {
            let x = shift(p.x());
            let y = shift(p.y());
            Point::new(x, y).expect("clamped")
        })
        .collect()
}

pub fn perturb(rng: &mut impl Rng, set: &PointSet, id: impl Into<String>, eps: f64) -> PointSet {
    PointSet::new(id, perturb_points(rng, set.points(), eps)).expect("same size as the source")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    pub sets: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub eps: f64,
    pub seed: u64,
}

/// `sets` random point sets with sizes in `min_size..=max_size`, and one
/// perturbed copy of each as a query whose `source` names the original.
pub fn generate(config: &GenConfig) -> (Vec<Record>, Vec<Record>) {
    assert!(1 <= config.min_size && config.min_size <= config.max_size);
    let mut rng = rng(config.seed);
    let mut data = Vec::with_capacity(config.sets);
    let mut queries = Vec::with_capacity(config.sets);
    for i in 0..config.sets {
        let n = rng.random_range(config.min_size..=config.max_size);
        let set = random_set(&mut rng, format!("s{i}"), n);
        let query = perturb(&mut rng, &set, format!("q{i}"), config.eps);
        data.push(Record::from_set(&set, None));
        queries.push(Record::from_set(&query, Some(set.id().to_string())));
    }
    (data, queries)
}
