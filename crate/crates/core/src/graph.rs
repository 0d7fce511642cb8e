//! Simple undirected graphs with dense vertex ids.
//!
//! Edges are stored in canonical form: each pair is normalised to `u < v`
//! and the list is sorted lexicographically. The position of an edge in that
//! list is its edge id, which every weighting in the crate indexes by.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TesError};

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<(Vertex, EdgeId)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub degree_sequence: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` vertices, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(TesError::Loop(u));
            }
            for x in [u, v] {
                if x >= n {
                    return Err(TesError::VertexOutOfRange { vertex: x, n });
                }
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(TesError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_canonical(n, list))
    }

    fn from_canonical(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbours of `v` with the id of the connecting edge, sorted by neighbour.
    pub fn incident(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Number of vertices with at least one incident edge.
    pub fn non_isolated(&self) -> usize {
        self.adj.iter().filter(|a| !a.is_empty()).count()
    }

    /// Canonical edge-list text: a `# vertices n` comment, then one `u v`
    /// per line, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# vertices {}\n", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Checks the structural invariants; used by tests and debug assertions.
    pub fn check_invariants(&self) -> bool {
        let deg_sum: usize = self.adj.iter().map(Vec::len).sum();
        if deg_sum != 2 * self.m() {
            return false;
        }
        let canonical = self.edges.windows(2).all(|w| w[0] < w[1])
            && self.edges.iter().all(|&(u, v)| u < v && v < self.n);
        canonical
            && self.edges.iter().enumerate().all(|(id, &(u, v))| {
                self.adj[u].contains(&(v, id)) && self.adj[v].contains(&(u, id))
            })
    }
}

/// Parses the line-oriented edge list format: `u v` per line, `#` starts a
/// comment, blank lines are skipped. Vertex count is one more than the largest
/// id seen, or the value of a `# vertices n` comment if that is larger.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = raw.split_once('#').unwrap_or((raw, ""));
        if let Some(count) = comment.trim().strip_prefix("vertices") {
            if let Ok(count) = count.trim().parse::<usize>() {
                n = n.max(count);
            }
        }
        let line = body.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(TesError::Parse {
                line: line_no,
                reason: format!("expected two vertex ids, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| TesError::Parse {
                line: line_no,
                reason: format!("'{s}' is not a non-negative integer"),
            })
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u == v {
            return Err(TesError::Parse {
                line: line_no,
                reason: format!("loop at vertex {u}"),
            });
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(TesError::Parse {
                line: line_no,
                reason: format!("duplicate edge {}-{}", key.0, key.1),
            });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push(key);
    }
    Graph::new(n, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Complete {
        n: usize,
    },
    /// `leaves` leaves around centre 0.
    Star {
        leaves: usize,
    },
    /// Path on `n` vertices.
    Path {
        n: usize,
    },
    RandomGnm {
        n: usize,
        m: usize,
    },
    RandomCappedDegree {
        n: usize,
        m: usize,
        cap: usize,
    },
    /// Random recursive tree on `n` vertices.
    RandomTree {
        n: usize,
    },
}

/// Deterministic graph generators. The seed is ignored by the fixed families.
pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GraphKind::Complete { n } => {
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::new(n, edges)
        }
        GraphKind::Star { leaves } => Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))),
        GraphKind::Path { n } => Graph::new(n, (1..n).map(|v| (v - 1, v))),
        GraphKind::RandomTree { n } => Graph::new(n, (1..n).map(|v| (rng.gen_range(0..v), v))),
        GraphKind::RandomGnm { n, m } => {
            let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
            if m > max_edges {
                return Err(TesError::Infeasible(format!(
                    "m = {m} exceeds n(n-1)/2 = {max_edges}"
                )));
            }
            if 2 * m > max_edges {
                // Dense: shuffle all pairs.
                let mut all: Vec<_> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .collect();
                all.shuffle(&mut rng);
                all.truncate(m);
                return Graph::new(n, all);
            }
            let mut seen = HashSet::with_capacity(m);
            while seen.len() < m {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    seen.insert((u.min(v), u.max(v)));
                }
            }
            let mut edges: Vec<_> = seen.into_iter().collect();
            edges.sort_unstable();
            Graph::new(n, edges)
        }
        GraphKind::RandomCappedDegree { n, m, cap } => random_capped(n, m, cap, &mut rng),
    }
}

fn random_capped(n: usize, m: usize, cap: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if cap == 0 {
        return Err(TesError::Infeasible("degree cap must be at least 1".into()));
    }
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges || 2 * m > n.saturating_mul(cap) {
        return Err(TesError::Infeasible(format!(
            "cannot place {m} edges on {n} vertices with degree cap {cap}"
        )));
    }
    let mut degree = vec![0usize; n];
    let mut open: Vec<Vertex> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::with_capacity(m);
    let mut stalls = 0usize;
    let stall_limit = 1000 + 100 * m;
    while seen.len() < m {
        if open.len() < 2 || stalls > stall_limit {
            return Err(TesError::Infeasible(format!(
                "rejection sampling stalled after {} of {m} edges",
                seen.len()
            )));
        }
        // Endpoints are drawn among vertices still below the cap.
        let u = open[rng.gen_range(0..open.len())];
        let v = open[rng.gen_range(0..open.len())];
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            stalls += 1;
            continue;
        }
        for x in [u, v] {
            degree[x] += 1;
            if degree[x] == cap {
                let p = pos[x];
                let last = *open.last().expect("open is non-empty");
                open.swap_remove(p);
                if last != x {
                    pos[last] = p;
                }
            }
        }
    }
    let mut edges: Vec<_> = seen.into_iter().collect();
    edges.sort_unstable();
    Graph::new(n, edges)
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let degree_sequence: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    DegreeStats {
        max_degree: degree_sequence.iter().copied().max().unwrap_or(0),
        degree_sequence,
    }
}

/// Pads `g` with a matching on fresh vertices until `m ≡ 1 (mod 3)`.
/// Original vertex and edge ids are preserved; the new edges sort last.
pub fn pad_to_residue(g: &Graph) -> (Graph, usize) {
    let added = (4 - g.m() % 3) % 3;
    if added == 0 {
        return (g.clone(), 0);
    }
    let n = g.n();
    let mut edges = g.edges().to_vec();
    for k in 0..added {
        edges.push((n + 2 * k, n + 2 * k + 1));
    }
    let padded = Graph::from_canonical(n + 2 * added, edges);
    (padded, added)
}

/// Merges `v` into `u`: `v`'s neighbours are rewired to `u`, `v` is removed
/// and vertices above `v` shift down by one.
pub fn identify_vertices(g: &Graph, u: Vertex, v: Vertex) -> Result<Graph> {
    let n = g.n();
    for x in [u, v] {
        if x >= n {
            return Err(TesError::VertexOutOfRange { vertex: x, n });
        }
    }
    if u == v {
        return Err(TesError::Identify {
            u,
            v,
            reason: "vertices coincide".into(),
        });
    }
    if g.has_edge(u, v) {
        return Err(TesError::Identify {
            u,
            v,
            reason: "vertices are adjacent".into(),
        });
    }
    if let Some(c) = g.neighbors(v).find(|&x| g.has_edge(u, x)) {
        return Err(TesError::Identify {
            u,
            v,
            reason: format!("common neighbour {c}"),
        });
    }
    let relabel = |x: Vertex| {
        let x = if x == v { u } else { x };
        if x > v {
            x - 1
        } else {
            x
        }
    };
    Graph::new(
        n - 1,
        g.edges().iter().map(|&(a, b)| (relabel(a), relabel(b))),
    )
}

/// Vertex id map of [`identify_vertices`]: old id → new id.
pub fn identify_map(n: usize, u: Vertex, v: Vertex) -> Vec<Vertex> {
    (0..n)
        .map(|x| {
            let x = if x == v { u } else { x };
            if x > v {
                x - 1
            } else {
                x
            }
        })
        .collect()
}

/// Connected-component label per vertex (labels are dense, in order of first vertex).
pub fn components(g: &Graph, skip: &[bool]) -> Vec<Option<usize>> {
    let mut label = vec![None; g.n()];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..g.n() {
        if skip[start] || label[start].is_some() {
            continue;
        }
        label[start] = Some(next);
        stack.push(start);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                if !skip[y] && label[y].is_none() {
                    label[y] = Some(next);
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}
