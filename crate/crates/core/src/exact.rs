//! Exact total edge irregularity strength for small graphs.
//!
//! The search assigns vertex values depth first (descending degree, values
//! ascending). Once both endpoints of an edge are fixed its total sum can be
//! any point of `[w(u)+w(v)+1, w(u)+w(v)+t]`, so completing the edge values
//! is a matching of equal-length intervals onto distinct sums in `[3, 3t]`.
//! Sorting intervals by left end and handing out the smallest free sum
//! decides that matching exactly; it is run on the determined edges at every
//! node as the pruning test and on all edges at the leaves.

use serde::Serialize;

use crate::error::{Result, TesError};
use crate::graph::{degree_stats, Graph};
use crate::weighting::{verify_total_irregular, TotalWeighting};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_BRUTE_CAP: u64 = 20_000_000;

/// `max{⌈(m+2)/3⌉, ⌈(Δ+1)/2⌉}`.
pub fn lower_bound(g: &Graph) -> Result<usize> {
    if g.m() == 0 {
        return Err(TesError::NoEdges);
    }
    let delta = degree_stats(g).max_degree;
    Ok((g.m() + 2).div_ceil(3).max((delta + 1).div_ceil(2)))
}

/// K5, possibly with extra isolated vertices.
pub fn is_k5(g: &Graph) -> bool {
    g.m() == 10 && g.non_isolated() == 5
}

/// The conjectured value: the lower bound, except 5 for K5.
pub fn conjectured_tes(g: &Graph) -> Result<usize> {
    let lb = lower_bound(g)?;
    Ok(if is_k5(g) { 5 } else { lb })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(TotalWeighting),
    NoneExists,
    Indeterminate { nodes: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerProof {
    FormulaBound,
    ExhaustedSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TesResult {
    pub tes: usize,
    pub certificate: TotalWeighting,
    pub proof_of_lower: LowerProof,
    pub nodes: u64,
}

struct Search<'g> {
    g: &'g Graph,
    t: usize,
    order: Vec<usize>,
    /// For each position in `order`, edges whose later endpoint sits there.
    closing: Vec<Vec<usize>>,
    values: Vec<usize>,
    nodes: u64,
    budget: u64,
    scratch: Vec<(usize, usize)>,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, t: usize, budget: u64) -> Self {
        let mut order: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut closing = vec![Vec::new(); order.len()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            closing[pos[u].max(pos[v])].push(e);
        }
        Search {
            g,
            t,
            order,
            closing,
            values: vec![1; g.n()],
            nodes: 0,
            budget,
            scratch: Vec::with_capacity(g.m()),
        }
    }

    /// Greedy interval matching over the edges closed at positions `< depth`.
    fn feasible(&mut self, depth: usize) -> bool {
        self.scratch.clear();
        for list in &self.closing[..depth] {
            for &e in list {
                let (u, v) = self.g.edge(e);
                self.scratch.push((self.values[u] + self.values[v], e));
            }
        }
        self.scratch.sort_unstable();
        let mut next = 0usize;
        for &(base, _) in &self.scratch {
            let sum = next.max(base + 1);
            if sum > base + self.t {
                return false;
            }
            next = sum + 1;
        }
        true
    }

    fn dfs(&mut self, depth: usize) -> Step {
        if depth == self.order.len() {
            return Step::Found;
        }
        let v = self.order[depth];
        for x in 1..=self.t {
            if self.nodes >= self.budget {
                return Step::OutOfBudget;
            }
            self.nodes += 1;
            self.values[v] = x;
            if !self.feasible(depth + 1) {
                continue;
            }
            match self.dfs(depth + 1) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        self.values[v] = 1;
        Step::Exhausted
    }

    fn certificate(&mut self) -> Result<TotalWeighting> {
        let depth = self.order.len();
        assert!(self.feasible(depth));
        let mut edge_values = vec![0; self.g.m()];
        let mut next = 0usize;
        for &(base, e) in &self.scratch {
            let sum = next.max(base + 1);
            edge_values[e] = sum - base;
            next = sum + 1;
        }
        TotalWeighting::new(self.t, self.values.clone(), edge_values)
    }
}

/// Searches for an irregular total weighting with values in `{1..t}`.
/// Returns [`SearchOutcome::Indeterminate`] when the node budget runs out.
pub fn find_weighting(g: &Graph, t: usize, budget: u64) -> Result<SearchOutcome> {
    Ok(search(g, t, budget)?.0)
}

fn search(g: &Graph, t: usize, budget: u64) -> Result<(SearchOutcome, u64)> {
    if t == 0 {
        return Err(TesError::OutOfRange("strength must be at least 1".into()));
    }
    // Pigeonhole: m distinct sums in [3, 3t]; a vertex of degree d needs d
    // distinct sums sharing its own value.
    if g.m() > 3 * t - 2 || g.max_degree() > 2 * t - 1 {
        return Ok((SearchOutcome::NoneExists, 0));
    }
    let mut s = Search::new(g, t, budget);
    let outcome = match s.dfs(0) {
        Step::Found => {
            let tw = s.certificate()?;
            debug_assert!(verify_total_irregular(g, &tw)?.ok);
            SearchOutcome::Found(tw)
        }
        Step::Exhausted => SearchOutcome::NoneExists,
        Step::OutOfBudget => SearchOutcome::Indeterminate { nodes: s.nodes },
    };
    Ok((outcome, s.nodes))
}

/// Smallest strength admitting an irregular total weighting, starting the
/// search at [`lower_bound`]. The budget applies per strength level.
pub fn tes_exact(g: &Graph, budget: u64) -> Result<TesResult> {
    let lb = lower_bound(g)?;
    let mut nodes = 0;
    let mut t = lb;
    loop {
        let (outcome, used) = search(g, t, budget)?;
        nodes += used;
        match outcome {
            SearchOutcome::Found(certificate) => {
                return Ok(TesResult {
                    tes: t,
                    certificate,
                    proof_of_lower: if t == lb {
                        LowerProof::FormulaBound
                    } else {
                        LowerProof::ExhaustedSearch
                    },
                    nodes,
                })
            }
            SearchOutcome::NoneExists => t += 1,
            SearchOutcome::Indeterminate { .. } => {
                return Err(TesError::BudgetExhausted {
                    strength: t,
                    budget,
                })
            }
        }
    }
}

/// Plain enumeration of `{1..t}^(V ∪ E)`; no pruning. Independent of the
/// search above and only meant for tiny graphs.
pub fn brute_oracle(g: &Graph, t: usize, cap: u64) -> Result<bool> {
    if t == 0 {
        return Err(TesError::OutOfRange("strength must be at least 1".into()));
    }
    let slots = g.n() + g.m();
    let size = (t as f64).powi(slots as i32);
    if size > cap as f64 {
        return Err(TesError::EnumerationCap { size, cap });
    }
    let mut digits = vec![1usize; slots];
    let mut seen = vec![0u32; 3 * t + 1];
    let mut stamp = 0u32;
    loop {
        stamp += 1;
        let (vert, edge) = digits.split_at(g.n());
        let irregular = g.edges().iter().enumerate().all(|(e, &(u, v))| {
            let sum = edge[e] + vert[u] + vert[v];
            let fresh = seen[sum] != stamp;
            seen[sum] = stamp;
            fresh
        });
        if irregular {
            return Ok(true);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == slots {
                return Ok(false);
            }
            if digits[k] < t {
                digits[k] += 1;
                break;
            }
            digits[k] = 1;
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusRow {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub lower_bound: usize,
    pub conjectured: usize,
    pub tes: usize,
    pub matches: bool,
}

/// All labeled graphs on `n` vertices with at least one edge, as
/// `(edge mask, graph)`; bit `k` of the mask is the `k`-th pair in
/// lexicographic order.
pub fn labeled_graphs(n: usize) -> impl Iterator<Item = (u64, Graph)> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    assert!(pairs.len() < 64, "labeled enumeration limited to n <= 11");
    (1u64..(1u64 << pairs.len())).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p);
        (mask, Graph::new(n, edges).expect("pairs are simple"))
    })
}

/// Exact strength versus the conjectured value for every labeled graph on
/// `2..=max_vertices` vertices.
pub fn run_corpus(max_vertices: usize, budget: u64) -> Result<Vec<CorpusRow>> {
    let mut rows = Vec::new();
    for n in 2..=max_vertices {
        for (mask, g) in labeled_graphs(n) {
            let result = tes_exact(&g, budget)?;
            let conjectured = conjectured_tes(&g)?;
            rows.push(CorpusRow {
                graph_id: format!("n{n}_mask{mask}"),
                n,
                m: g.m(),
                max_degree: g.max_degree(),
                lower_bound: lower_bound(&g)?,
                conjectured,
                tes: result.tes,
                matches: result.tes == conjectured,
            });
        }
    }
    Ok(rows)
}
