//! The flow network behind grid-level matching feasibility.
//!
//! Placed grid points feed a source node each, query grid points drain into
//! a sink node each, and every grid cell with at least one placed or query
//! corner gets a center node. Placed corners flow into the centers of their
//! cells, centers flow out to query corners, so a unit of flow is a pairing
//! of two corners of one cell.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::flow::{MaxFlow, UNLIMITED};
use crate::geometry::{delta, max_index, GridDistribution, GridPoint};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    SuperSource,
    SuperSink,
    /// `o_p`, a third of a cell north of a placed point.
    Supply(GridPoint),
    /// A placed grid point.
    Placed(GridPoint),
    /// A query grid point.
    Query(GridPoint),
    /// `i_q`, a third of a cell south of a query point.
    Demand(GridPoint),
    /// Center of the cell whose lower-left corner has indices `(cx, cy)`.
    Center {
        cx: u32,
        cy: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetNode {
    pub kind: NodeKind,
    /// Planar position; only used for drawing.
    pub position: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetEdge {
    pub from: usize,
    pub to: usize,
    /// `None` means unlimited.
    pub capacity: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowNetwork {
    level: u32,
    nodes: Vec<NetNode>,
    edges: Vec<NetEdge>,
}

const SOURCE: usize = 0;
const SINK: usize = 1;

impl FlowNetwork {
    /// Builds the network for placed points `placed` against `query`.
    pub fn build(placed: &GridDistribution, query: &GridDistribution) -> Result<Self> {
        if placed.level() != query.level() {
            return Err(Error::LevelMismatch {
                left: placed.level(),
                right: query.level(),
            });
        }
        let level = placed.level();
        if level == 0 {
            return Err(Error::InvalidLevel(0));
        }
        let step = delta(level)?;
        let mut net = FlowNetwork {
            level,
            nodes: alloc::vec![
                NetNode {
                    kind: NodeKind::SuperSource,
                    position: None,
                },
                NetNode {
                    kind: NodeKind::SuperSink,
                    position: None,
                },
            ],
            edges: Vec::new(),
        };
        let mut centers: BTreeMap<(u32, u32), usize> = BTreeMap::new();

        for (g, count) in placed.iter() {
            let (x, y) = xy(g);
            let supply = net.push(NodeKind::Supply(g), Some((x, y + step / 3.0)));
            let node = net.push(NodeKind::Placed(g), Some((x, y)));
            net.edges.push(NetEdge {
                from: SOURCE,
                to: supply,
                capacity: Some(count),
            });
            net.edges.push(NetEdge {
                from: supply,
                to: node,
                capacity: None,
            });
            for cell in cells_of(g) {
                let c = net.center(&mut centers, cell, step);
                net.edges.push(NetEdge {
                    from: node,
                    to: c,
                    capacity: None,
                });
            }
        }
        for (g, count) in query.iter() {
            let (x, y) = xy(g);
            let node = net.push(NodeKind::Query(g), Some((x, y)));
            let demand = net.push(NodeKind::Demand(g), Some((x, y - step / 3.0)));
            for cell in cells_of(g) {
                let c = net.center(&mut centers, cell, step);
                net.edges.push(NetEdge {
                    from: c,
                    to: node,
                    capacity: None,
                });
            }
            net.edges.push(NetEdge {
                from: node,
                to: demand,
                capacity: Some(count),
            });
            net.edges.push(NetEdge {
                from: demand,
                to: SINK,
                capacity: None,
            });
        }
        Ok(net)
    }

    fn push(&mut self, kind: NodeKind, position: Option<(f64, f64)>) -> usize {
        self.nodes.push(NetNode { kind, position });
        self.nodes.len() - 1
    }

    fn center(&mut self, centers: &mut BTreeMap<(u32, u32), usize>, cell: (u32, u32), step: f64) -> usize {
        if let Some(&id) = centers.get(&cell) {
            return id;
        }
        let pos = ((cell.0 as f64 + 0.5) * step, (cell.1 as f64 + 0.5) * step);
        let id = self.push(
            NodeKind::Center {
                cx: cell.0,
                cy: cell.1,
            },
            Some(pos),
        );
        centers.insert(cell, id);
        id
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nodes(&self) -> &[NetNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    pub fn center_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Center { .. }))
            .count()
    }

    /// Maximum integral flow, stopping early once `limit` is reached.
    pub fn max_flow(&self, limit: u64) -> u64 {
        self.solver_with_flow(limit).1
    }

    fn solver_with_flow(&self, limit: u64) -> (MaxFlow, u64) {
        let mut solver = MaxFlow::new(self.nodes.len());
        for e in &self.edges {
            solver.add_edge(e.from, e.to, e.capacity.map_or(UNLIMITED, u64::from));
        }
        let value = solver.run(SOURCE, SINK, limit);
        (solver, value)
    }

    /// Maximum flow decomposed into pairs `(placed, query)` of corners of a
    /// common cell, with multiplicities.
    pub fn solve(&self) -> (u64, BTreeMap<(GridPoint, GridPoint), u32>) {
        let (solver, value) = self.solver_with_flow(u64::MAX);
        let mut inflow: BTreeMap<usize, Vec<(GridPoint, u64)>> = BTreeMap::new();
        let mut outflow: BTreeMap<usize, Vec<(GridPoint, u64)>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let f = solver.flow(i);
            if f == 0 {
                continue;
            }
            match (self.nodes[e.from].kind, self.nodes[e.to].kind) {
                (NodeKind::Placed(g), NodeKind::Center { .. }) => {
                    inflow.entry(e.to).or_default().push((g, f));
                }
                (NodeKind::Center { .. }, NodeKind::Query(g)) => {
                    outflow.entry(e.from).or_default().push((g, f));
                }
                _ => {}
            }
        }
        let mut pairs: BTreeMap<(GridPoint, GridPoint), u32> = BTreeMap::new();
        for (center, mut ins) in inflow {
            let mut outs = outflow.remove(&center).unwrap_or_default();
            let (mut i, mut o) = (0, 0);
            while i < ins.len() && o < outs.len() {
                let amount = ins[i].1.min(outs[o].1);
                *pairs.entry((ins[i].0, outs[o].0)).or_insert(0) += amount as u32;
                ins[i].1 -= amount;
                outs[o].1 -= amount;
                if ins[i].1 == 0 {
                    i += 1;
                }
                if outs[o].1 == 0 {
                    o += 1;
                }
            }
        }
        (value, pairs)
    }

    /// Graphviz rendering for inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph flow {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = match n.kind {
                NodeKind::SuperSource => String::from("source"),
                NodeKind::SuperSink => String::from("sink"),
                NodeKind::Supply(g) => format!("o {}", g),
                NodeKind::Placed(g) => format!("F {}", g),
                NodeKind::Query(g) => format!("Q {}", g),
                NodeKind::Demand(g) => format!("i {}", g),
                NodeKind::Center { cx, cy } => format!("c ({cx}, {cy})"),
            };
            let _ = match n.position {
                Some((x, y)) => writeln!(out, "  n{i} [label=\"{label}\", pos=\"{x},{y}!\"];"),
                None => writeln!(out, "  n{i} [label=\"{label}\"];"),
            };
        }
        for e in &self.edges {
            let _ = match e.capacity {
                Some(c) => writeln!(out, "  n{} -> n{} [label=\"{c}\"];", e.from, e.to),
                None => writeln!(out, "  n{} -> n{};", e.from, e.to),
            };
        }
        out.push_str("}\n");
        out
    }
}

fn xy(g: GridPoint) -> (f64, f64) {
    let p = g.to_point();
    (p.x(), p.y())
}

/// Lower-left indices of the (up to four) cells having `g` as a corner.
fn cells_of(g: GridPoint) -> impl Iterator<Item = (u32, u32)> {
    let cells = max_index(g.level);
    let span = move |i: u32| i.saturating_sub(1)..=i.min(cells - 1);
    span(g.ix).flat_map(move |cx| span(g.iy).map(move |cy| (cx, cy)))
}
