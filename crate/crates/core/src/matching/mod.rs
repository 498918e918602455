//! Matching between grid distributions and between point sets.
//!
//! Grid-level feasibility asks how much of a placed distribution `F` can be
//! paired with a query distribution when pairs must be corners of a common
//! grid cell. It is answered by a max-flow over [`FlowNetwork`]. The exact
//! point-set distances in [`bottleneck`] serve as the reference oracle.

pub mod bottleneck;
pub mod flow;
pub mod network;

use alloc::collections::BTreeMap;

pub use bottleneck::{
    brute_force_bottleneck, exact_bottleneck, exact_partial_bottleneck, hopcroft_karp, BRUTE_FORCE_LIMIT,
};
pub use network::FlowNetwork;

use crate::geometry::{GridDistribution, GridPoint};
use crate::{Error, Result};

/// Which grid point pairs may be matched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Adjacency {
    /// Corners of a common grid cell.
    #[default]
    SharedCell,
    /// Identical grid points only. Too strict for the approximation
    /// guarantees; exists to check that the validation suites notice.
    SamePoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    pub flow_value: u32,
    /// `(placed, query)` pairs with multiplicities.
    pub assignment: BTreeMap<(GridPoint, GridPoint), u32>,
}

/// Maximum cell-adjacent matching of `placed` into `query`.
pub fn max_matching(placed: &GridDistribution, query: &GridDistribution) -> Result<MatchResult> {
    let net = FlowNetwork::build(placed, query)?;
    let (value, assignment) = net.solve();
    Ok(MatchResult {
        flow_value: value as u32,
        assignment,
    })
}

/// Matching size only, stopping once `limit` is reached.
pub fn matching_size(
    placed: &GridDistribution,
    query: &GridDistribution,
    adjacency: Adjacency,
    limit: u64,
) -> Result<u32> {
    match adjacency {
        Adjacency::SharedCell => Ok(FlowNetwork::build(placed, query)?.max_flow(limit) as u32),
        Adjacency::SamePoint => {
            if placed.level() != query.level() {
                return Err(Error::LevelMismatch {
                    left: placed.level(),
                    right: query.level(),
                });
            }
            Ok(placed.iter().map(|(g, c)| c.min(query.count(g))).sum())
        }
    }
}
