//! Approximate bottleneck-distance search over planar point sets.
//!
//! Points live in the unit box. Each point set is described, level by
//! level, by the grid points its members round to on the dyadic grids
//! `delta_d = 2^(1-d)`, written as strings over a nine-letter direction
//! alphabet and stored in tries. Two sets whose roundings at level `d` can
//! be matched within grid cells are within a constant times `delta_d` of
//! each other in bottleneck distance.
//!
//! - [`geometry`]: points, grids, nearest grid points and snap candidates.
//! - [`encoding`]: direction strings for grid points and distributions.
//! - [`trie`]: the 9-ary prefix tree.
//! - [`matching`]: cell-adjacent grid matching and exact distances.
//! - [`index`]: the compact and multisnap databases.
//! - [`pairwise`]: a two-set distance estimate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod codec;
pub mod encoding;
mod error;
pub mod geometry;
pub mod index;
pub mod matching;
pub mod pairwise;
pub mod trie;

pub use error::{Error, Result};
