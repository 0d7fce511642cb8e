//! Vertex-switch searches and trimming used to pick the low-density set `X`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Result, TesError};
use crate::graph::{Graph, Vertex};

/// A vertex set with its induced edge count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimSet {
    pub set: Vec<Vertex>,
    pub inner_edges: usize,
}

struct Membership<'a> {
    g: &'a Graph,
    inside: Vec<bool>,
    /// Neighbours inside the set, for every vertex.
    deg_in: Vec<usize>,
}

impl<'a> Membership<'a> {
    fn new(g: &'a Graph, set: &[Vertex]) -> Self {
        let mut m = Membership {
            g,
            inside: vec![false; g.n()],
            deg_in: vec![0; g.n()],
        };
        for &v in set {
            m.insert(v);
        }
        m
    }

    fn insert(&mut self, v: Vertex) {
        self.inside[v] = true;
        for u in self.g.neighbors(v) {
            self.deg_in[u] += 1;
        }
    }

    fn remove(&mut self, v: Vertex) {
        self.inside[v] = false;
        for u in self.g.neighbors(v) {
            self.deg_in[u] -= 1;
        }
    }

    fn members(&self) -> Vec<Vertex> {
        (0..self.g.n()).filter(|&v| self.inside[v]).collect()
    }

    fn inner_edges(&self) -> usize {
        (0..self.g.n())
            .filter(|&v| self.inside[v])
            .map(|v| self.deg_in[v])
            .sum::<usize>()
            / 2
    }

    fn finish(&self) -> ClaimSet {
        ClaimSet {
            set: self.members(),
            inner_edges: self.inner_edges(),
        }
    }
}

/// Set of exactly `size` vertices from `allowed` with switch-minimal
/// `|E(X')|`: no exchange of one member and one non-member lowers it.
pub fn claim1_set(g: &Graph, allowed: &[bool], size: usize) -> Result<ClaimSet> {
    let mut pool: Vec<Vertex> = (0..g.n()).filter(|&v| allowed[v]).collect();
    if size > pool.len() {
        return Err(TesError::ClaimFailed {
            claim: "claim 1",
            detail: format!(
                "target size {size} exceeds the {} available vertices",
                pool.len()
            ),
        });
    }
    pool.sort_by_key(|&v| (g.degree(v), v));
    let mut mem = Membership::new(g, &pool[..size]);
    for _ in 0..50 * g.n().max(1) {
        let out = pool.iter().copied().filter(|&v| !mem.inside[v]);
        let Some(x) = pool
            .iter()
            .copied()
            .filter(|&v| mem.inside[v])
            .max_by_key(|&v| (mem.deg_in[v], Reverse(v)))
        else {
            break;
        };
        let Some(y) = out.min_by_key(|&v| (mem.deg_in[v], v)) else {
            break;
        };
        let (dx, dy) = (mem.deg_in[x], mem.deg_in[y]);
        let pair = if dy < dx {
            Some((x, y))
        } else if dy == dx {
            // Equal counts: an adjacent pair still gains one edge.
            pool.iter()
                .copied()
                .filter(|&v| mem.inside[v] && mem.deg_in[v] == dx)
                .find_map(|a| {
                    g.neighbors(a)
                        .find(|&b| allowed[b] && !mem.inside[b] && mem.deg_in[b] == dx)
                        .map(|b| (a, b))
                })
        } else {
            None
        };
        let Some((a, b)) = pair else { break };
        mem.remove(a);
        mem.insert(b);
    }
    Ok(mem.finish())
}

/// Deletes vertices of maximum degree into the set (lowest id first on ties)
/// until `target` remain, then adds `allowed` vertices with no neighbour in
/// the set while any exist.
pub fn claim2_trim(g: &Graph, set: &[Vertex], target: usize, allowed: &[bool]) -> ClaimSet {
    let mut mem = Membership::new(g, set);
    let mut size = set.len();
    let mut heap: BinaryHeap<(usize, Reverse<Vertex>)> =
        set.iter().map(|&v| (mem.deg_in[v], Reverse(v))).collect();
    while size > target {
        let Some((d, Reverse(v))) = heap.pop() else {
            break;
        };
        if !mem.inside[v] || d != mem.deg_in[v] {
            if mem.inside[v] {
                heap.push((mem.deg_in[v], Reverse(v)));
            }
            continue;
        }
        mem.remove(v);
        size -= 1;
    }
    for v in 0..g.n() {
        if allowed[v] && !mem.inside[v] && mem.deg_in[v] == 0 {
            mem.insert(v);
        }
    }
    mem.finish()
}

/// Bounds on `|E(X', {v2, v3})|`: `lower <= f < upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim3Window {
    pub lower: f64,
    pub upper: f64,
}

/// Two-hub set with switch-minimal `|E(X')|` inside the window; also
/// returns `|E(X', {v2, v3})|`.
pub fn claim3_set(
    g: &Graph,
    hubs: (Vertex, Vertex),
    allowed: &[bool],
    window: Claim3Window,
) -> Result<(ClaimSet, usize)> {
    let h = hub_degrees(g, hubs);
    let mut pool: Vec<Vertex> = (0..g.n()).filter(|&v| allowed[v] && h[v] > 0).collect();
    let total: usize = pool.iter().map(|&v| h[v]).sum();
    if (total as f64) < window.lower || window.lower >= window.upper {
        return Err(TesError::ClaimFailed {
            claim: "claim 3",
            detail: format!(
                "window [{}, {}) unreachable with {total} hub edges",
                window.lower, window.upper
            ),
        });
    }
    // Fewest other edges per hub edge first.
    pool.sort_by(|&a, &b| {
        (g.degree(a) * h[b])
            .cmp(&(g.degree(b) * h[a]))
            .then(a.cmp(&b))
    });
    let mut mem = Membership::new(g, &[]);
    let mut f = 0usize;
    for &v in &pool {
        if f as f64 >= window.lower {
            break;
        }
        mem.insert(v);
        f += h[v];
    }
    let inside = |f: usize| (f as f64) >= window.lower && (f as f64) < window.upper;
    if !inside(f) {
        return Err(TesError::ClaimFailed {
            claim: "claim 3",
            detail: format!("initial hub-edge count {f} outside the window"),
        });
    }
    for _ in 0..50 * g.n().max(1) {
        let mut best: Option<(i64, Option<Vertex>, Option<Vertex>)> = None;
        let mut consider = |delta: i64, x: Option<Vertex>, y: Option<Vertex>| {
            if delta < 0 && best.is_none_or(|b| delta < b.0) {
                best = Some((delta, x, y));
            }
        };
        for hx in 1..=2 {
            let Some(x) = pool
                .iter()
                .copied()
                .filter(|&v| mem.inside[v] && h[v] == hx)
                .max_by_key(|&v| (mem.deg_in[v], Reverse(v)))
            else {
                continue;
            };
            if inside(f - hx) {
                consider(-(mem.deg_in[x] as i64), Some(x), None);
            }
            for hy in 1..=2 {
                let Some(y) = pool
                    .iter()
                    .copied()
                    .filter(|&v| !mem.inside[v] && h[v] == hy)
                    .min_by_key(|&v| (mem.deg_in[v], v))
                else {
                    continue;
                };
                if inside(f - hx + hy) {
                    let adj = i64::from(g.has_edge(x, y));
                    consider(
                        mem.deg_in[y] as i64 - mem.deg_in[x] as i64 - adj,
                        Some(x),
                        Some(y),
                    );
                }
            }
        }
        let Some((_, x, y)) = best else { break };
        if let Some(x) = x {
            mem.remove(x);
            f -= h[x];
        }
        if let Some(y) = y {
            mem.insert(y);
            f += h[y];
        }
    }
    Ok((mem.finish(), f))
}

/// `|E(v, {v2, v3})|` for every vertex.
pub(crate) fn hub_degrees(g: &Graph, (a, b): (Vertex, Vertex)) -> Vec<usize> {
    let mut h = vec![0; g.n()];
    for u in g.neighbors(a).chain(g.neighbors(b)) {
        h[u] += 1;
    }
    h
}

/// Deletes the vertex maximising `|E(v,X)| / |E(v,{v2,v3})|` (lowest id on
/// ties) until at most `limit` hub edges remain; returns the set and its
/// hub-edge count.
pub fn claim4_trim(
    g: &Graph,
    hubs: (Vertex, Vertex),
    set: &[Vertex],
    limit: usize,
) -> (ClaimSet, usize) {
    let h = hub_degrees(g, hubs);
    let mut mem = Membership::new(g, set);
    let mut f: usize = set.iter().map(|&v| h[v]).sum();
    while f > limit {
        let members = mem.members();
        let Some(&v) = members.iter().filter(|&&v| h[v] > 0).reduce(|best, v| {
            // deg(v)/h(v) > deg(best)/h(best), strictly, keeps the lower id.
            if mem.deg_in[*v] * h[*best] > mem.deg_in[*best] * h[*v] {
                v
            } else {
                best
            }
        }) else {
            break;
        };
        mem.remove(v);
        f -= h[v];
    }
    (mem.finish(), f)
}
