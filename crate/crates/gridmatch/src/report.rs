//! Query reports and batch query execution.

use std::time::Instant;

use gridmatch_core::geometry::PointSet;
use gridmatch_core::index::{QueryMode, QueryOptions};
use gridmatch_core::matching::{exact_bottleneck, exact_partial_bottleneck};
use serde::{Deserialize, Serialize};

use crate::persist::AnyIndex;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub id: String,
    /// Exact distance, when rescored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: u32,
    pub states: u64,
    pub matching_calls: u64,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub query: String,
    pub index: String,
    pub mode: String,
    pub matches: Vec<Match>,
    pub d_star: u32,
    /// Certified upper bound on the distance of every match.
    pub bound: Option<f64>,
    /// Bound under the original, unproven constants.
    pub claimed_bound: Option<f64>,
    pub levels: Vec<LevelReport>,
    pub elapsed_us: u64,
}

impl QueryReport {
    /// Copy with timings zeroed, for comparisons.
    pub fn without_timings(&self) -> Self {
        QueryReport {
            elapsed_us: 0,
            ..self.clone()
        }
    }
}

pub fn mode_name(mode: QueryMode) -> &'static str {
    match mode {
        QueryMode::Nearest => "nearest",
        QueryMode::Subset => "subset",
        QueryMode::Superset => "superset",
    }
}

/// Exact distance between a stored set and the query under `mode`.
pub fn exact_distance(stored: &PointSet, query: &PointSet, mode: QueryMode) -> Result<f64, Error> {
    let (p, q) = (stored.points(), query.points());
    Ok(match mode {
        QueryMode::Nearest => exact_bottleneck(p, q)?,
        QueryMode::Subset => exact_partial_bottleneck(p, q)?,
        QueryMode::Superset => exact_partial_bottleneck(q, p)?,
    })
}

pub fn run_query(
    index: &AnyIndex,
    query: &PointSet,
    mode: QueryMode,
    options: &QueryOptions,
    rescore: bool,
) -> Result<QueryReport, Error> {
    let start = Instant::now();
    let result = index.query(query, mode, options)?;
    let mut matches = Vec::with_capacity(result.hits.len());
    for id in result.hits {
        let distance = if rescore {
            let stored = index.registry().lookup(&id).expect("hits name stored sets");
            Some(exact_distance(stored, query, mode)?)
        } else {
            None
        };
        matches.push(Match { id, distance });
    }
    if rescore {
        matches.sort_by(|a, b| {
            a.distance
                .partial_cmp(&b.distance)
                .expect("distances are finite")
                .then_with(|| a.id.cmp(&b.id))
        });
    }
    Ok(QueryReport {
        query: query.id().to_string(),
        index: index.kind().name().to_string(),
        mode: mode_name(mode).to_string(),
        matches,
        d_star: result.d_star,
        bound: result.bound,
        claimed_bound: result.claimed_bound,
        levels: result
            .levels
            .iter()
            .map(|l| LevelReport {
                level: l.level,
                states: l.states,
                matching_calls: l.matching_calls,
                hits: l.hits,
            })
            .collect(),
        elapsed_us: start.elapsed().as_micros() as u64,
    })
}

/// Runs `queries` on `jobs` threads; reports come back in input order.
pub fn run_queries(
    index: &AnyIndex,
    queries: &[PointSet],
    mode: QueryMode,
    options: &QueryOptions,
    rescore: bool,
    jobs: usize,
) -> Result<Vec<QueryReport>, Error> {
    let jobs = jobs.max(1).min(queries.len().max(1));
    if jobs == 1 {
        return queries
            .iter()
            .map(|q| run_query(index, q, mode, options, rescore))
            .collect();
    }
    let chunk = queries.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = queries
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|q| run_query(index, q, mode, options, rescore))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(queries.len());
        for h in handles {
            out.extend(h.join().expect("query thread panicked")?);
        }
        Ok(out)
    })
}
