//! Randomized validation suites.
//!
//! Each suite draws independent instances from a per-trial seed, runs the
//! index or estimator on them, compares against the exact oracle, and
//! records the ratios it observes. Ratios above the certified ("safe")
//! constants are violations; ratios above the originally claimed constants
//! are only reported. A violating instance is kept as a [`Counterexample`]
//! that [`replay`] re-checks on its own.

use std::fmt::Write as _;

use gridmatch_core::geometry::{delta, Point, PointSet};
use gridmatch_core::index::{QueryMode, QueryOptions, Strategy, DEFAULT_BUDGET};
use gridmatch_core::matching::{brute_force_bottleneck, exact_bottleneck, Adjacency};
use gridmatch_core::pairwise::{approx_bottleneck, matches_at_level};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gen::{perturb, perturb_points, random_points, random_set, rng};
use crate::io::{to_sets, Record};
use crate::persist::{AnyIndex, Kind};
use crate::report::exact_distance;
use crate::Error;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Exact distance against bijection enumeration.
    Oracle,
    /// Hit soundness and completeness of the selected index.
    Windows,
    /// Nearest-query approximation ratio of the selected index.
    Approx,
    /// Per-node and leaf-only search agree; explored states stay bounded.
    Strategy,
    /// Pairwise estimate window and ratio.
    Pairwise,
    /// Planted subset and superset queries.
    Subset,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Oracle,
        Suite::Windows,
        Suite::Approx,
        Suite::Strategy,
        Suite::Pairwise,
        Suite::Subset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Windows => "windows",
            Suite::Approx => "approx",
            Suite::Strategy => "strategy",
            Suite::Pairwise => "pairwise",
            Suite::Subset => "subset",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub index: Kind,
    pub max_level: u32,
    /// Match identical grid points only, breaking the guarantees on purpose.
    pub fault: bool,
}

impl Settings {
    fn options(&self) -> QueryOptions {
        QueryOptions {
            strategy: Strategy::Auto,
            adjacency: if self.fault {
                Adjacency::SamePoint
            } else {
                Adjacency::SharedCell
            },
        }
    }

    /// (claimed, safe) hit-bound factors of the selected index.
    fn bound_factors(&self) -> (f64, f64) {
        match self.index {
            Kind::Compact => (2.0, 4.0),
            Kind::MultiSnap => (1.5, 3.0),
        }
    }

    fn build(&self, sets: Vec<PointSet>) -> Result<AnyIndex, Error> {
        AnyIndex::build(self.index, self.max_level, DEFAULT_BUDGET, sets)
    }

    fn query(
        &self,
        index: &AnyIndex,
        q: &PointSet,
        mode: QueryMode,
    ) -> Result<gridmatch_core::index::QueryResult, Error> {
        index.query(q, mode, &self.options())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub dataset: Vec<Record>,
    pub query: Record,
    #[serde(default = "nearest_name")]
    pub mode: String,
}

fn nearest_name() -> String {
    "nearest".into()
}

fn mode_of(name: &str) -> QueryMode {
    match name {
        "subset" => QueryMode::Subset,
        "superset" => QueryMode::Superset,
        _ => QueryMode::Nearest,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub suite: Suite,
    pub settings: Settings,
    pub seed: u64,
    pub trial: usize,
    pub instance: Instance,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Agg {
    Max,
    Min,
}

/// One line of the summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub suite: Suite,
    pub statistic: &'static str,
    pub trials: usize,
    pub samples: usize,
    pub observed: Option<f64>,
    pub claimed: Option<f64>,
    pub safe: Option<f64>,
    pub violations: usize,
    upper: bool,
}

impl Row {
    /// Whether the observed extreme respects the claimed constant.
    pub fn claimed_holds(&self) -> Option<bool> {
        let (o, c) = (self.observed?, self.claimed?);
        Some(if self.upper { o <= c } else { o >= c })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<Row>,
    pub counterexamples: Vec<Counterexample>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<9} {:<22} {:>6} {:>10} {:>10} {:>10} {:>7} {:>10}",
            "suite", "statistic", "trials", "observed", "claimed", "safe", "claim", "violations"
        );
        let num = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        for r in &self.rows {
            let claim = match r.claimed_holds() {
                Some(true) => "holds",
                Some(false) => "exceeded",
                None => "-",
            };
            let _ = writeln!(
                out,
                "{:<9} {:<22} {:>6} {:>10} {:>10} {:>10} {:>7} {:>10}",
                r.suite.name(),
                r.statistic,
                r.trials,
                num(r.observed),
                num(r.claimed),
                num(r.safe),
                claim,
                r.violations
            );
        }
        out
    }
}

struct StatSpec {
    name: &'static str,
    claimed: Option<f64>,
    safe: Option<f64>,
    agg: Agg,
}

fn stats_of(suite: Suite, settings: &Settings) -> Vec<StatSpec> {
    let (claimed_bound, safe_bound) = settings.bound_factors();
    let spec = |name, claimed, safe, agg| StatSpec {
        name,
        claimed,
        safe,
        agg,
    };
    match suite {
        Suite::Oracle => vec![spec("|exact - brute|", Some(0.0), Some(0.0), Agg::Max)],
        Suite::Windows => vec![spec(
            "d_B / delta(d*)",
            Some(claimed_bound),
            Some(safe_bound),
            Agg::Max,
        )],
        Suite::Approx => {
            let (claimed, safe) = match settings.index {
                Kind::Compact => (8.0, 16.0),
                Kind::MultiSnap => (6.0, 12.0),
            };
            vec![spec("returned / optimal", Some(claimed), Some(safe), Agg::Max)]
        }
        Suite::Strategy => vec![spec("states / 10^n", None, Some(10.0), Agg::Max)],
        Suite::Pairwise => vec![
            spec(
                "estimate / d_B (min)",
                Some(1.0 / (2.0 * SQRT_2)),
                Some(1.0 / (4.0 * SQRT_2)),
                Agg::Min,
            ),
            spec(
                "estimate / d_B (max)",
                Some(2.0 * SQRT_2),
                Some(2.0 * SQRT_2),
                Agg::Max,
            ),
            spec("d_B / delta(d*) (min)", Some(0.25), Some(0.25), Agg::Min),
            spec("d_B / delta(d*) (max)", Some(2.0), Some(4.0), Agg::Max),
        ],
        Suite::Subset => vec![
            spec("d_B / delta(d*)", Some(2.0), Some(4.0), Agg::Max),
            spec("returned / optimal", Some(8.0), Some(16.0), Agg::Max),
        ],
    }
}

/// Result of checking one instance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub observations: Vec<(&'static str, f64)>,
    pub violation: Option<String>,
}

impl Outcome {
    fn observe(&mut self, name: &'static str, value: f64) {
        self.observations.push((name, value));
    }

    fn fail(&mut self, message: String) {
        if self.violation.is_none() {
            self.violation = Some(message);
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.fail(message());
        }
    }
}

/// Independent stream per (seed, suite, trial).
fn trial_seed(seed: u64, suite: Suite, trial: usize) -> u64 {
    let tag = Suite::ALL.iter().position(|&s| s == suite).unwrap() as u64;
    seed ^ (tag + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn log_uniform_eps(r: &mut impl Rng) -> f64 {
    10f64.powf(r.random_range(-4.0..-1.0))
}

fn record(set: &PointSet) -> Record {
    Record::from_set(set, None)
}

fn query_record(id: &str, points: Vec<Point>, source: Option<&str>) -> Record {
    Record::from_set(
        &PointSet::new(id, points).expect("non-empty"),
        source.map(str::to_string),
    )
}

/// Query near `p` half of the time, unrelated otherwise.
fn nearby_or_random(r: &mut impl Rng, p: &PointSet) -> Vec<Point> {
    if r.random_bool(0.5) {
        let eps = log_uniform_eps(r);
        perturb_points(r, p.points(), eps)
    } else {
        random_points(r, p.len())
    }
}

pub fn generate(suite: Suite, settings: &Settings, seed: u64, trial: usize) -> Instance {
    let mut r = rng(trial_seed(seed, suite, trial));
    let max_size = match settings.index {
        Kind::Compact => 6,
        Kind::MultiSnap => 5,
    };
    let mut mode = nearest_name();
    let (dataset, query) = match suite {
        Suite::Oracle => {
            let n = r.random_range(2..=8);
            let p = random_set(&mut r, "p", n);
            let q = random_points(&mut r, n);
            (vec![record(&p)], query_record("q", q, None))
        }
        Suite::Windows | Suite::Pairwise => {
            let n = r.random_range(1..=max_size);
            let p = random_set(&mut r, "p", n);
            let q = nearby_or_random(&mut r, &p);
            (vec![record(&p)], query_record("q", q, Some("p")))
        }
        Suite::Approx | Suite::Strategy => {
            let n = r.random_range(1..=if suite == Suite::Strategy { 4 } else { max_size });
            let m = r.random_range(1..=10);
            let sets: Vec<PointSet> = (0..m).map(|i| random_set(&mut r, format!("s{i}"), n)).collect();
            let target = &sets[r.random_range(0..m)];
            let q = nearby_or_random(&mut r, target);
            let source = target.id().to_string();
            (
                sets.iter().map(record).collect(),
                query_record("q", q, Some(&source)),
            )
        }
        Suite::Subset => {
            let m = r.random_range(1..=6);
            let mut sets: Vec<PointSet> = (0..m)
                .map(|i| {
                    let n = r.random_range(1..=6);
                    random_set(&mut r, format!("s{i}"), n)
                })
                .collect();
            let eps = log_uniform_eps(&mut r);
            let planted = r.random_range(0..m);
            let superset = r.random_bool(0.5);
            let q = if superset {
                // The query is a perturbed part of the planted set.
                if sets[planted].len() < 2 {
                    let n = r.random_range(2..=6);
                    sets[planted] = random_set(&mut r, format!("s{planted}"), n);
                }
                let p = &sets[planted];
                let k = r.random_range(1..=p.len());
                let part: Vec<Point> = sample(&mut r, p.len(), k).iter().map(|i| p.points()[i]).collect();
                mode = "superset".into();
                perturb_points(&mut r, &part, eps)
            } else {
                // The query is the perturbed planted set plus extra points.
                let p = &sets[planted];
                let extra = r.random_range(0..=6 - p.len());
                let mut q = perturb(&mut r, p, "q", eps).points().to_vec();
                q.extend(random_points(&mut r, extra));
                mode = "subset".into();
                q
            };
            let source = sets[planted].id().to_string();
            (
                sets.iter().map(record).collect(),
                query_record("q", q, Some(&source)),
            )
        }
    };
    Instance { dataset, query, mode }
}

pub fn check(suite: Suite, settings: &Settings, instance: &Instance) -> Result<Outcome, Error> {
    let sets = to_sets(&instance.dataset);
    let q = instance.query.to_set()?;
    let mut out = Outcome::default();
    match suite {
        Suite::Oracle => {
            let p = &sets[0];
            let exact = exact_bottleneck(p.points(), q.points())?;
            let brute = brute_force_bottleneck(p.points(), q.points())?;
            out.observe("|exact - brute|", (exact - brute).abs());
            out.check(exact == brute, || format!("exact {exact} != brute force {brute}"));
        }
        Suite::Windows => check_windows(settings, &sets[0], &q, &mut out)?,
        Suite::Approx => check_approx(settings, sets, &q, &mut out)?,
        Suite::Strategy => check_strategy(settings, sets, &q, &mut out)?,
        Suite::Pairwise => check_pairwise(settings, &sets[0], &q, &mut out)?,
        Suite::Subset => check_subset(settings, sets, &q, mode_of(&instance.mode), instance, &mut out)?,
    }
    Ok(out)
}

/// Levels `d` with `delta(d) > 2 * distance`, which a query must reach.
fn required_level(distance: f64, max_level: u32) -> u32 {
    (1..=max_level)
        .take_while(|&d| delta(d).unwrap() > 2.0 * distance)
        .last()
        .unwrap_or(0)
}

fn check_windows(settings: &Settings, p: &PointSet, q: &PointSet, out: &mut Outcome) -> Result<(), Error> {
    let (_, safe) = settings.bound_factors();
    let index = settings.build(vec![p.clone()])?;
    let r = settings.query(&index, q, QueryMode::Nearest)?;
    let exact = exact_bottleneck(p.points(), q.points())?;
    if r.d_star > 0 {
        let ratio = exact / delta(r.d_star)?;
        out.observe("d_B / delta(d*)", ratio);
        out.check(ratio <= safe, || {
            format!(
                "hit at level {} with d_B = {exact}, above {safe} * delta",
                r.d_star
            )
        });
    }
    let need = required_level(exact, settings.max_level);
    out.check(r.d_star >= need, || {
        format!(
            "d_B = {exact} requires a hit at level {need}, deepest hit {}",
            r.d_star
        )
    });
    Ok(())
}

fn check_approx(
    settings: &Settings,
    sets: Vec<PointSet>,
    q: &PointSet,
    out: &mut Outcome,
) -> Result<(), Error> {
    let (_, safe_bound) = settings.bound_factors();
    let safe_ratio = 4.0 * safe_bound;
    let optimal = sets
        .iter()
        .filter(|s| s.len() == q.len())
        .map(|s| exact_bottleneck(s.points(), q.points()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let index = settings.build(sets)?;
    let r = settings.query(&index, q, QueryMode::Nearest)?;
    if r.hits.is_empty() {
        out.fail(format!("no hit although the optimum is {optimal}"));
        return Ok(());
    }
    let mut returned: f64 = 0.0;
    for id in &r.hits {
        let s = index.registry().lookup(id).expect("hit names a stored set");
        returned = returned.max(exact_bottleneck(s.points(), q.points())?);
    }
    let bound = r.bound.expect("hits carry a bound");
    out.check(returned <= bound, || {
        format!("returned distance {returned} above certified bound {bound}")
    });
    if r.d_star < settings.max_level {
        let ratio = if optimal > 0.0 {
            returned / optimal
        } else if returned == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        out.observe("returned / optimal", ratio);
        out.check(ratio <= safe_ratio, || {
            format!(
                "returned {returned} vs optimum {optimal} at d* = {}: ratio {ratio}",
                r.d_star
            )
        });
    }
    Ok(())
}

fn check_strategy(
    settings: &Settings,
    sets: Vec<PointSet>,
    q: &PointSet,
    out: &mut Outcome,
) -> Result<(), Error> {
    let mut index = gridmatch_core::index::CompactIndex::new(settings.max_level)?;
    for s in sets {
        index.insert(s)?;
    }
    let base = settings.options();
    let per_node = index.query(
        q,
        QueryMode::Nearest,
        &QueryOptions {
            strategy: Strategy::PerNode,
            ..base
        },
    );
    let leaf_only = index.query(
        q,
        QueryMode::Nearest,
        &QueryOptions {
            strategy: Strategy::LeafOnly,
            ..base
        },
    );
    out.check(
        (per_node.d_star, &per_node.hits) == (leaf_only.d_star, &leaf_only.hits),
        || {
            format!(
                "per-node found {:?} at {}, leaf-only {:?} at {}",
                per_node.hits, per_node.d_star, leaf_only.hits, leaf_only.d_star
            )
        },
    );
    let scale = 10f64.powi(q.len() as i32);
    for l in per_node.levels.iter().chain(&leaf_only.levels) {
        let ratio = l.states as f64 / scale;
        out.observe("states / 10^n", ratio);
        out.check(ratio < 10.0, || {
            format!("{} states at level {}", l.states, l.level)
        });
    }
    Ok(())
}

fn check_pairwise(settings: &Settings, p: &PointSet, q: &PointSet, out: &mut Outcome) -> Result<(), Error> {
    let r = approx_bottleneck(p, q, settings.max_level)?;
    let exact = exact_bottleneck(p.points(), q.points())?;
    out.check(exact <= r.upper, || {
        format!("d_B = {exact} above upper bound {}", r.upper)
    });
    let symmetric = approx_bottleneck(q, p, settings.max_level)?.d_star;
    out.check(symmetric == r.d_star, || {
        format!("d* is {} one way, {symmetric} the other", r.d_star)
    });
    if !r.at_resolution_floor {
        let step = delta(r.d_star)?;
        out.observe("d_B / delta(d*) (min)", exact / step);
        out.observe("d_B / delta(d*) (max)", exact / step);
        out.check(exact >= step / 4.0, || {
            format!("d_B = {exact} below delta/4 at d* = {}", r.d_star)
        });
        let ratio = r.estimate / exact;
        out.observe("estimate / d_B (min)", ratio);
        out.observe("estimate / d_B (max)", ratio);
        out.check((1.0 / (4.0 * SQRT_2)..=2.0 * SQRT_2).contains(&ratio), || {
            format!("estimate {} vs d_B {exact}: ratio {ratio}", r.estimate)
        });
        // No deeper level matches again.
        for d in r.d_star + 1..=settings.max_level.min(r.d_star + 4) {
            out.check(!matches_at_level(p, q, d)?, || {
                format!("match levels have a gap below {}", r.d_star)
            });
        }
    }
    Ok(())
}

/// Smallest bottleneck distance from `small` into a same-size subset of
/// `large`, by enumerating every subset.
fn brute_partial(small: &[Point], large: &[Point]) -> Result<f64, Error> {
    let (k, n) = (small.len(), large.len());
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let chosen: Vec<Point> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| large[i]).collect();
        best = best.min(brute_force_bottleneck(small, &chosen)?);
    }
    Ok(best)
}

fn check_subset(
    settings: &Settings,
    sets: Vec<PointSet>,
    q: &PointSet,
    mode: QueryMode,
    instance: &Instance,
    out: &mut Outcome,
) -> Result<(), Error> {
    let eligible = |s: &PointSet| match mode {
        QueryMode::Subset => s.len() <= q.len(),
        QueryMode::Superset => s.len() >= q.len(),
        QueryMode::Nearest => s.len() == q.len(),
    };
    let mut optimal = f64::INFINITY;
    for s in sets.iter().filter(|s| eligible(s)) {
        let exact = exact_distance(s, q, mode)?;
        let (small, large) = if s.len() <= q.len() { (s, q) } else { (q, s) };
        let brute = brute_partial(small.points(), large.points())?;
        out.check(exact == brute, || {
            format!("partial distance {exact} != enumeration {brute} for {}", s.id())
        });
        optimal = optimal.min(exact);
    }
    let planted = instance
        .query
        .source
        .as_deref()
        .and_then(|id| sets.iter().find(|s| s.id() == id))
        .cloned();

    let mut index = gridmatch_core::index::CompactIndex::new(settings.max_level)?;
    for s in sets {
        index.insert(s)?;
    }
    let r = index.query(q, mode, &settings.options());
    if let Some(p) = planted {
        let d = exact_distance(&p, q, mode)?;
        let need = required_level(d, settings.max_level);
        out.check(r.d_star >= need, || {
            format!(
                "planted {} at distance {d} needs level {need}, deepest hit {}",
                p.id(),
                r.d_star
            )
        });
    }
    if r.hits.is_empty() {
        return Ok(());
    }
    let step = delta(r.d_star)?;
    let mut returned: f64 = 0.0;
    for id in &r.hits {
        let s = index.registry().lookup(id).expect("hit names a stored set");
        let d = exact_distance(s, q, mode)?;
        out.observe("d_B / delta(d*)", d / step);
        out.check(d <= 4.0 * step, || {
            format!("{id} hit at level {} with distance {d}", r.d_star)
        });
        returned = returned.max(d);
    }
    if r.d_star < settings.max_level {
        let ratio = if optimal > 0.0 {
            returned / optimal
        } else if returned == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        out.observe("returned / optimal", ratio);
        out.check(ratio <= 16.0, || {
            format!("returned {returned} vs optimum {optimal}: ratio {ratio}")
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub settings: Settings,
    pub suites: Vec<Suite>,
    pub size: usize,
    pub seed: u64,
    pub jobs: usize,
}

fn run_trials(config: &RunConfig, suite: Suite) -> Result<Vec<(usize, Instance, Outcome)>, Error> {
    let one = |trial: usize| -> Result<(usize, Instance, Outcome), Error> {
        let instance = generate(suite, &config.settings, config.seed, trial);
        let outcome = check(suite, &config.settings, &instance)?;
        Ok((trial, instance, outcome))
    };
    let jobs = config.jobs.max(1).min(config.size.max(1));
    if jobs == 1 {
        return (0..config.size).map(one).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let one = &one;
                scope.spawn(move || {
                    (j..config.size)
                        .step_by(jobs)
                        .map(one)
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut all = Vec::with_capacity(config.size);
        for h in handles {
            all.extend(h.join().expect("validation thread panicked")?);
        }
        all.sort_by_key(|t| t.0);
        Ok(all)
    })
}

pub fn run(config: &RunConfig) -> Result<Summary, Error> {
    let mut summary = Summary::default();
    for &suite in &config.suites {
        let trials = run_trials(config, suite)?;
        let specs = stats_of(suite, &config.settings);
        let mut rows: Vec<Row> = specs
            .iter()
            .map(|s| Row {
                suite,
                statistic: s.name,
                trials: trials.len(),
                samples: 0,
                observed: None,
                claimed: s.claimed,
                safe: s.safe,
                violations: 0,
                upper: s.agg == Agg::Max,
            })
            .collect();
        for (trial, instance, outcome) in trials {
            for (name, value) in &outcome.observations {
                let (i, spec) = specs
                    .iter()
                    .enumerate()
                    .find(|(_, s)| s.name == *name)
                    .expect("known statistic");
                let row = &mut rows[i];
                row.samples += 1;
                row.observed = Some(match (row.observed, spec.agg) {
                    (None, _) => *value,
                    (Some(o), Agg::Max) => o.max(*value),
                    (Some(o), Agg::Min) => o.min(*value),
                });
            }
            if let Some(message) = outcome.violation {
                rows[0].violations += 1;
                summary.counterexamples.push(Counterexample {
                    suite,
                    settings: config.settings,
                    seed: config.seed,
                    trial,
                    instance,
                    message,
                });
            }
        }
        summary.rows.extend(rows);
    }
    Ok(summary)
}

/// Re-checks a dumped counterexample. `Some(message)` if it still fails.
pub fn replay(cx: &Counterexample) -> Result<Option<String>, Error> {
    Ok(check(cx.suite, &cx.settings, &cx.instance)?.violation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(fault: bool, size: usize) -> RunConfig {
        RunConfig {
            settings: Settings {
                index: Kind::Compact,
                max_level: 12,
                fault,
            },
            suites: Suite::ALL.to_vec(),
            size,
            seed: 5,
            jobs: 1,
        }
    }

    #[test]
    fn small_suite_passes() {
        let summary = run(&config(false, 12)).unwrap();
        assert!(summary.passed(), "{:?}", summary.counterexamples);
        assert!(summary.table().contains("returned / optimal"));
    }

    #[test]
    fn empty_suite_passes() {
        let summary = run(&config(false, 0)).unwrap();
        assert!(summary.passed());
        assert!(summary.rows.iter().all(|r| r.observed.is_none() && r.trials == 0));
    }

    #[test]
    fn fault_is_caught_and_replays() {
        let summary = run(&config(true, 20)).unwrap();
        assert!(!summary.passed());
        for cx in &summary.counterexamples {
            assert_eq!(replay(cx).unwrap().as_deref(), Some(cx.message.as_str()));
            let json = serde_json::to_string(cx).unwrap();
            let back: Counterexample = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, cx);
        }
    }

    #[test]
    fn jobs_do_not_change_results() {
        let mut c = config(false, 9);
        let serial = run(&c).unwrap();
        c.jobs = 3;
        assert_eq!(run(&c).unwrap(), serial);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = config(false, 1).settings;
        for suite in Suite::ALL {
            assert_eq!(generate(suite, &s, 9, 3), generate(suite, &s, 9, 3));
        }
    }
}
