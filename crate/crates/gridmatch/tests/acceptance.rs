//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! statistics alongside. Exits non-zero when any hard assertion fails.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use gridmatch::gen::{perturb_points, random_points, random_set, rng};
use gridmatch_core::encoding::{decode_point, encode_distribution, encode_point};
use gridmatch_core::geometry::{delta, max_index, GridDistribution, GridPoint, Point, PointSet, LEVEL_LIMIT};
use gridmatch_core::index::{CompactIndex, MultiSnapIndex, QueryMode, QueryOptions, QueryResult, Strategy};
use gridmatch_core::matching::{brute_force_bottleneck, exact_bottleneck, exact_partial_bottleneck};
use gridmatch_core::pairwise::approx_bottleneck;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const MAX_LEVEL: u32 = 14;

type Criterion = (&'static str, fn() -> Tally);

/// Hard failures plus measured notes for one criterion.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }
}

/// Running minimum and maximum of a statistic.
struct Range {
    min: f64,
    max: f64,
}

impl Range {
    fn new() -> Self {
        Range {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }
}

fn log_uniform_eps(r: &mut ChaCha8Rng) -> f64 {
    10f64.powf(r.random_range(-4.0..-1.0))
}

/// A perturbed copy of `p` half of the time, an unrelated set otherwise.
fn nearby_or_random(r: &mut ChaCha8Rng, p: &PointSet) -> Vec<Point> {
    if r.random_bool(0.5) {
        let eps = log_uniform_eps(r);
        perturb_points(r, p.points(), eps)
    } else {
        random_points(r, p.len())
    }
}

fn set(id: &str, points: Vec<Point>) -> PointSet {
    PointSet::new(id, points).unwrap()
}

/// Deepest level whose step exceeds twice `distance`; queries must hit there.
fn required_level(distance: f64, max_level: u32) -> u32 {
    (1..=max_level)
        .take_while(|&d| delta(d).unwrap() > 2.0 * distance)
        .last()
        .unwrap_or(0)
}

fn worst_hit(result: &QueryResult, sets: &[PointSet], q: &PointSet, mode: QueryMode) -> f64 {
    result
        .hits
        .iter()
        .map(|id| {
            let s = sets.iter().find(|s| s.id() == id).unwrap();
            distance(s, q, mode)
        })
        .fold(0.0, f64::max)
}

fn distance(stored: &PointSet, q: &PointSet, mode: QueryMode) -> f64 {
    match mode {
        QueryMode::Nearest => exact_bottleneck(stored.points(), q.points()).unwrap(),
        QueryMode::Subset => exact_partial_bottleneck(stored.points(), q.points()).unwrap(),
        QueryMode::Superset => exact_partial_bottleneck(q.points(), stored.points()).unwrap(),
    }
}

fn ratio(returned: f64, optimal: f64) -> f64 {
    if optimal > 0.0 {
        returned / optimal
    } else if returned == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn compact(sets: &[PointSet]) -> CompactIndex {
    let mut index = CompactIndex::new(MAX_LEVEL).unwrap();
    for s in sets {
        index.insert(s.clone()).unwrap();
    }
    index
}

fn oracle() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(1);
    let start = Instant::now();
    for trial in 0..1000 {
        let n = r.random_range(2..=8);
        let p = random_points(&mut r, n);
        let q = random_points(&mut r, n);
        let exact = exact_bottleneck(&p, &q).unwrap();
        let brute = brute_force_bottleneck(&p, &q).unwrap();
        t.check(exact == brute, || {
            format!("trial {trial}: exact {exact} != brute {brute}")
        });
    }
    let elapsed = start.elapsed();
    t.check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"));
    t.note(format!("1000 pairs in {:.2} s", elapsed.as_secs_f64()));
    t
}

fn encoding() -> Tally {
    let mut t = Tally::default();
    let mut count = 0;
    for level in 1..=8 {
        for ix in 0..=max_index(level) {
            for iy in 0..=max_index(level) {
                let g = GridPoint::new(level, ix, iy).unwrap();
                let back = decode_point(&encode_point(g)).unwrap();
                t.check(back == g, || format!("{g:?} decodes to {back:?}"));
                count += 1;
            }
        }
    }
    let mut r = rng(2);
    for _ in 0..10_000 {
        let level = r.random_range(9..=LEVEL_LIMIT);
        let m = max_index(level);
        let g = GridPoint::new(level, r.random_range(0..=m), r.random_range(0..=m)).unwrap();
        let back = decode_point(&encode_point(g)).unwrap();
        t.check(back == g, || format!("{g:?} decodes to {back:?}"));
    }
    for _ in 0..1000 {
        let n = r.random_range(1..=8);
        let d = r.random_range(2..=12);
        let dist = GridDistribution::nearest(&random_points(&mut r, n), d);
        let full = encode_distribution(&dist);
        let prefix = encode_distribution(&dist.parent());
        t.check(
            full.symbols.len() == n * d as usize && full.symbols.starts_with(&prefix.symbols),
            || format!("prefix property fails for {dist:?}"),
        );
    }
    t.note(format!(
        "{count} exhaustive points, 10000 deep points, 1000 distributions"
    ));
    t
}

fn windows() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(3);
    let mut observed = Range::new();
    for n in 1..=6 {
        for trial in 0..500 {
            let p = random_set(&mut r, "p", n);
            let q = set("q", nearby_or_random(&mut r, &p));
            let result = compact(std::slice::from_ref(&p)).nearest(&q, Strategy::Auto);
            let exact = exact_bottleneck(p.points(), q.points()).unwrap();
            if result.d_star > 0 {
                let rel = exact / delta(result.d_star).unwrap();
                observed.add(rel);
                t.check(rel <= 4.0, || {
                    format!(
                        "n={n} trial {trial}: hit at {} with d_B/delta = {rel}",
                        result.d_star
                    )
                });
            }
            let need = required_level(exact, MAX_LEVEL);
            t.check(result.d_star >= need, || {
                format!(
                    "n={n} trial {trial}: d_B = {exact} needs level {need}, got {}",
                    result.d_star
                )
            });
        }
    }
    t.note(format!(
        "max d_B/delta(d*) = {:.4} (claimed 2, hard 4)",
        observed.max
    ));
    t
}

fn approx() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(4);
    let (mut compact_ratio, mut multisnap_ratio) = (Range::new(), Range::new());
    let (mut compact_over, mut multisnap_over) = (0, 0);
    let start = Instant::now();
    for trial in 0..200 {
        let n = r.random_range(1..=6);
        let m = r.random_range(1..=20);
        let sets: Vec<PointSet> = (0..m).map(|i| random_set(&mut r, format!("s{i}"), n)).collect();
        let target = sets[r.random_range(0..m)].clone();
        let eps = log_uniform_eps(&mut r);
        let q = set("q", perturb_points(&mut r, target.points(), eps));
        let optimal = sets
            .iter()
            .map(|s| exact_bottleneck(s.points(), q.points()).unwrap())
            .fold(f64::INFINITY, f64::min);

        let mut ms = MultiSnapIndex::new(MAX_LEVEL).unwrap();
        for s in &sets {
            ms.insert(s.clone()).unwrap();
        }
        let results = [
            ("compact", compact(&sets).nearest(&q, Strategy::Auto), 16.0, 8.0),
            ("multisnap", ms.query_nearest(&q), 12.0, 6.0),
        ];
        for (i, (name, result, hard, claimed)) in results.into_iter().enumerate() {
            if result.hits.is_empty() {
                t.check(false, || format!("trial {trial}: {name} returned nothing"));
                continue;
            }
            let returned = worst_hit(&result, &sets, &q, QueryMode::Nearest);
            let bound = result.bound.unwrap();
            t.check(returned <= bound, || {
                format!("trial {trial}: {name} returned {returned} above bound {bound}")
            });
            if result.d_star < MAX_LEVEL {
                let rel = ratio(returned, optimal);
                let (range, over) = if i == 0 {
                    (&mut compact_ratio, &mut compact_over)
                } else {
                    (&mut multisnap_ratio, &mut multisnap_over)
                };
                range.add(rel);
                if rel > claimed {
                    *over += 1;
                }
                t.check(rel <= hard, || {
                    format!("trial {trial}: {name} ratio {rel} above {hard}")
                });
            }
        }
    }
    let elapsed = start.elapsed();
    t.check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"));
    t.note(format!(
        "compact max ratio {:.3} ({} trials above 8); multisnap max ratio {:.3} ({} trials above 6); {:.2} s",
        compact_ratio.max,
        compact_over,
        multisnap_ratio.max,
        multisnap_over,
        elapsed.as_secs_f64()
    ));
    t
}

fn strategy() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(5);
    let mut states = Range::new();
    for trial in 0..100 {
        let n = r.random_range(1..=5);
        let m = r.random_range(1..=20);
        let sets: Vec<PointSet> = (0..m).map(|i| random_set(&mut r, format!("s{i}"), n)).collect();
        let target = sets[r.random_range(0..m)].clone();
        let q = set("q", nearby_or_random(&mut r, &target));
        let index = compact(&sets);
        let run = |strategy| {
            index.query(
                &q,
                QueryMode::Nearest,
                &QueryOptions {
                    strategy,
                    ..Default::default()
                },
            )
        };
        let (a, b) = (run(Strategy::PerNode), run(Strategy::LeafOnly));
        t.check((a.d_star, &a.hits) == (b.d_star, &b.hits), || {
            format!(
                "trial {trial}: per-node {:?}@{} vs leaf-only {:?}@{}",
                a.hits, a.d_star, b.hits, b.d_star
            )
        });
        let cap = 10.0 * 10f64.powi(n as i32);
        for l in a.levels.iter().chain(&b.levels) {
            states.add(l.states as f64 / 10f64.powi(n as i32));
            t.check((l.states as f64) < cap, || {
                format!("trial {trial}: {} states at level {}", l.states, l.level)
            });
        }
    }
    t.note(format!("max states/10^n = {:.3} (hard 10)", states.max));
    t
}

fn pairwise() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(6);
    let (mut estimate, mut window) = (Range::new(), Range::new());
    let mut floor = 0;
    let claimed = 1.0 / (2.0 * SQRT_2)..=2.0 * SQRT_2;
    let mut outside_claim = 0;
    for trial in 0..500 {
        let n = r.random_range(1..=6);
        let p = random_set(&mut r, "p", n);
        let q = set("q", nearby_or_random(&mut r, &p));
        let a = approx_bottleneck(&p, &q, MAX_LEVEL).unwrap();
        let exact = exact_bottleneck(p.points(), q.points()).unwrap();
        let step = delta(a.d_star).unwrap();
        t.check(exact <= 4.0 * step, || {
            format!("trial {trial}: d_B {exact} above 4 delta")
        });
        t.check(a.at_resolution_floor == (a.d_star == MAX_LEVEL), || {
            format!("trial {trial}: floor flag wrong at d* = {}", a.d_star)
        });
        if a.at_resolution_floor {
            floor += 1;
            t.check(a.estimate > 0.0, || {
                format!("trial {trial}: zero estimate at the floor")
            });
            continue;
        }
        window.add(exact / step);
        t.check(exact >= step / 4.0, || {
            format!("trial {trial}: d_B {exact} below delta/4")
        });
        let rel = a.estimate / exact;
        estimate.add(rel);
        if !claimed.contains(&rel) {
            outside_claim += 1;
        }
    }
    t.note(format!(
        "estimate/d_B in [{:.3}, {:.3}] (claimed [0.354, 2.828]; {outside_claim} outside); \
         d_B/delta in [{:.3}, {:.3}]; {floor} floor cases flagged",
        estimate.min, estimate.max, window.min, window.max
    ));
    t
}

/// Smallest distance from `small` onto any same-size subset of `large`.
fn brute_partial(small: &[Point], large: &[Point]) -> f64 {
    let (k, n) = (small.len(), large.len());
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| {
            let chosen: Vec<Point> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| large[i]).collect();
            brute_force_bottleneck(small, &chosen).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

fn subset() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(7);
    let mut observed = Range::new();
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..100 {
        let m = r.random_range(1..=6);
        let mut sets: Vec<PointSet> = (0..m)
            .map(|i| {
                let n = r.random_range(1..=6);
                random_set(&mut r, format!("s{i}"), n)
            })
            .collect();
        let planted = r.random_range(0..m);
        let eps = log_uniform_eps(&mut r);
        let (mode, q) = if trial % 2 == 0 {
            let p = &sets[planted];
            let extra = r.random_range(0..=6 - p.len());
            let mut q = perturb_points(&mut r, p.points(), eps);
            q.extend(random_points(&mut r, extra));
            (QueryMode::Subset, q)
        } else {
            if sets[planted].len() < 2 {
                let n = r.random_range(2..=6);
                sets[planted] = random_set(&mut r, format!("s{planted}"), n);
            }
            let p = &sets[planted];
            let k = r.random_range(1..=p.len());
            let part: Vec<Point> = rand::seq::index::sample(&mut r, p.len(), k)
                .iter()
                .map(|i| p.points()[i])
                .collect();
            (QueryMode::Superset, perturb_points(&mut r, &part, eps))
        };
        let q = set("q", q);
        let eligible: Vec<&PointSet> = sets
            .iter()
            .filter(|s| match mode {
                QueryMode::Subset => s.len() <= q.len(),
                _ => s.len() >= q.len(),
            })
            .collect();
        let mut optimal = f64::INFINITY;
        for s in &eligible {
            let (small, large) = if s.len() <= q.len() { (*s, &q) } else { (&q, *s) };
            let brute = brute_partial(small.points(), large.points());
            let exact = distance(s, &q, mode);
            t.check(exact == brute, || {
                format!("trial {trial}: partial {exact} != enumeration {brute}")
            });
            optimal = optimal.min(brute);
        }
        let result = compact(&sets).query(&q, mode, &QueryOptions::default());
        let need = required_level(distance(&sets[planted], &q, mode), MAX_LEVEL);
        t.check(result.d_star >= need, || {
            format!(
                "trial {trial}: planted set needs level {need}, deepest hit {}",
                result.d_star
            )
        });
        if result.hits.is_empty() {
            continue;
        }
        let step = delta(result.d_star).unwrap();
        let returned = worst_hit(&result, &sets, &q, mode);
        observed.add(returned / step);
        t.check(returned <= 4.0 * step, || {
            format!("trial {trial}: returned {returned} above 4 delta")
        });
        if result.d_star < MAX_LEVEL {
            let rel = ratio(returned, optimal);
            worst_ratio = worst_ratio.max(rel);
            t.check(rel <= 16.0, || format!("trial {trial}: ratio {rel} above 16"));
        }
    }
    t.note(format!(
        "max d_B/delta(d*) = {:.3}; max returned/optimal = {worst_ratio:.3} (hard 16)",
        observed.max
    ));
    t
}

fn scaling() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(8);
    let n = 4;
    let mut per_query = Vec::new();
    for m in [10, 100, 1000] {
        let sets: Vec<PointSet> = (0..m).map(|i| random_set(&mut r, format!("s{i}"), n)).collect();
        let index = compact(&sets);
        let queries: Vec<PointSet> = (0..50)
            .map(|i| {
                let target = &sets[r.random_range(0..m)];
                let eps = log_uniform_eps(&mut r);
                set(&format!("q{i}"), perturb_points(&mut r, target.points(), eps))
            })
            .collect();
        let start = Instant::now();
        for q in &queries {
            std::hint::black_box(index.nearest(q, Strategy::Auto));
        }
        let us = start.elapsed().as_secs_f64() * 1e6 / queries.len() as f64;
        per_query.push((m, us));
    }
    let table: Vec<String> = per_query
        .iter()
        .map(|(m, us)| format!("m={m}: {us:.1} us/query"))
        .collect();
    let growth = per_query[2].1 / per_query[0].1;
    t.note(format!(
        "{}; time x{growth:.1} for m x100 (measured only)",
        table.join(", ")
    ));
    t
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle correctness", oracle),
        ("encoding soundness", encoding),
        ("compact index windows", windows),
        ("nearest-query approximation", approx),
        ("strategy equivalence", strategy),
        ("pairwise approximation", pairwise),
        ("subset and superset queries", subset),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let tally = run();
        let verdict = if tally.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name}", i + 1);
        for note in &tally.notes {
            println!("    {note}");
        }
        for f in tally.failures.iter().take(5) {
            println!("    failure: {f}");
        }
        if tally.failures.len() > 5 {
            println!("    ... {} failures in total", tally.failures.len());
        }
        failed += usize::from(!tally.failures.is_empty());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
