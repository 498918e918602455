//! Dinic's blocking-flow maximum flow.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

/// Capacity treated as unlimited.
pub const UNLIMITED: u64 = u64::MAX / 4;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: u64,
}

#[derive(Clone, Debug)]
pub struct MaxFlow {
    // edges[2i] is the forward arc of edge i, edges[2i + 1] its residual twin.
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    original: Vec<u64>,
}

impl MaxFlow {
    pub fn new(nodes: usize) -> Self {
        MaxFlow {
            edges: Vec::new(),
            adj: alloc::vec![Vec::new(); nodes],
            original: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds a directed edge and returns its index.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.original.len();
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0 });
        self.original.push(cap);
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow(&self, id: usize) -> u64 {
        self.original[id] - self.edges[2 * id].cap
    }

    /// Pushes flow from `source` to `sink` until it is maximal or reaches
    /// `limit`, and returns the amount pushed by this call.
    pub fn run(&mut self, source: usize, sink: usize, limit: u64) -> u64 {
        let n = self.adj.len();
        let mut total = 0;
        let mut level = alloc::vec![usize::MAX; n];
        let mut next = alloc::vec![0usize; n];
        while total < limit && self.levels(source, sink, &mut level) {
            next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.augment(source, sink, limit - total, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
                if total >= limit {
                    break;
                }
            }
        }
        total
    }

    fn levels(&self, source: usize, sink: usize, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let edge = &self.edges[e];
                if edge.cap > 0 && level[edge.to] == usize::MAX {
                    level[edge.to] = level[u] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        level[sink] != usize::MAX
    }

    fn augment(&mut self, u: usize, sink: usize, want: u64, level: &[usize], next: &mut [usize]) -> u64 {
        if u == sink {
            return want;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, sink, want.min(cap), level, next);
                if pushed > 0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }
}
