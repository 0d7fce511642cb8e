//! One dominant vertex `v1` in `B0`.

use serde::Serialize;

use super::local::{claim1_set, claim2_trim};
use super::{dispatch_case, split_large_degree, CaseId, LargeGraphContext};
use crate::error::{Result, TesError};
use crate::graph::{components, Graph, Vertex};
use crate::lemma::{
    check_conditions, construct_with, ConditionReport, ConstructOptions, LemmaInstance,
};
use crate::weighting::{
    is_guarding_set, is_well_guarded, strength_parameter, EdgeSubset, VertexWeighting,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case1Route {
    Lemma,
    /// Condition (3) failed; members of `X` without `Y`-neighbours lead.
    LemmaLeadingIsolated,
    /// Condition (2) failed; explicit weighting through `Y3`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case1Outcome {
    #[serde(skip)]
    pub weighting: VertexWeighting,
    pub route: Case1Route,
    /// Vertices merged away before the construction.
    pub identified: usize,
    pub x_prime_size: usize,
    pub x_prime_edges: usize,
    pub x_size: usize,
    pub x_edges: usize,
    pub conditions: ConditionReport,
}

struct Reduced {
    graph: Graph,
    /// Original vertex to reduced vertex.
    map: Vec<Vertex>,
    merged: usize,
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Identifies every non-neighbour of `hub` with a vertex in another
/// component of `G - hub` until `V = {hub} ∪ N(hub)`. Identified vertices
/// are at distance at least 3, so the edge count is unchanged.
fn reduce_to_neighbourhood(g: &Graph, hub: Vertex) -> Result<Reduced> {
    let mut skip = vec![false; g.n()];
    skip[hub] = true;
    let comp = components(g, &skip);
    let ncomp = comp.iter().flatten().max().map_or(0, |c| c + 1);
    let mut uf: Vec<usize> = (0..ncomp).collect();
    let mut is_nb = vec![false; g.n()];
    for u in g.neighbors(hub) {
        is_nb[u] = true;
    }
    let nbs: Vec<Vertex> = (0..g.n()).filter(|&v| is_nb[v]).collect();
    let others: Vec<Vertex> = (0..g.n()).filter(|&v| v != hub && !is_nb[v]).collect();
    let mut target: Vec<Vertex> = (0..g.n()).collect();
    let mut alive = vec![true; g.n()];

    for (k, &u) in others.iter().enumerate() {
        let cu = find(&mut uf, comp[u].expect("only the hub is skipped"));
        let pick = nbs
            .iter()
            .chain(&others[k + 1..])
            .copied()
            .find(|&v| alive[v] && find(&mut uf, comp[v].unwrap()) != cu);
        let Some(v) = pick else {
            return Err(TesError::ClaimFailed {
                claim: "reduction",
                detail: format!("vertex {u} has no vertex in another component to merge with"),
            });
        };
        let cv = find(&mut uf, comp[v].unwrap());
        uf[cu] = cv;
        target[u] = v;
        alive[u] = false;
    }
    let mut new_id = vec![usize::MAX; g.n()];
    let mut next = 0;
    for v in 0..g.n() {
        if alive[v] {
            new_id[v] = next;
            next += 1;
        }
    }
    let map: Vec<Vertex> = (0..g.n())
        .map(|v| {
            let mut r = v;
            while !alive[r] {
                r = target[r];
            }
            new_id[r]
        })
        .collect();
    let graph = Graph::new(next, g.edges().iter().map(|&(u, v)| (map[u], map[v])))?;
    Ok(Reduced {
        graph,
        map,
        merged: others.len(),
    })
}

pub fn construct_case1(g: &Graph, ctx: &LargeGraphContext) -> Result<Case1Outcome> {
    let s = strength_parameter(g)?;
    if dispatch_case(ctx) != CaseId::Case1 {
        return Err(TesError::Precondition(format!(
            "context dispatches to {:?}",
            dispatch_case(ctx)
        )));
    }
    let red = reduce_to_neighbourhood(g, ctx.b0[0])?;
    let gr = &red.graph;
    let v1 = red.map[ctx.b0[0]];
    let big = split_large_degree(gr, ctx.eps).membership(gr.n());
    let delta = gr.degree(v1);
    let (si, di) = (s as i64, delta as i64);

    let mut allowed: Vec<bool> = (0..gr.n()).map(|v| !big[v] && v != v1).collect();
    let vh = gr.n() as i64 - 1;
    let eh = (gr.m() - delta) as i64;
    let size = (2 * (2 * vh - eh)).div_euclid(3);
    if size <= 0 {
        return Err(TesError::ClaimFailed {
            claim: "claim 1",
            detail: format!("target size {size} is not positive"),
        });
    }
    let available = allowed.iter().filter(|&&a| a).count();
    let xp = claim1_set(gr, &allowed, (size as usize).min(available))?;
    if 2 * xp.inner_edges > xp.set.len() {
        return Err(TesError::ClaimFailed {
            claim: "claim 1",
            detail: format!(
                "|E(X')| = {} exceeds |X'|/2 with |X'| = {}",
                xp.inner_edges,
                xp.set.len()
            ),
        });
    }
    if xp.set.len() < s + 1 {
        return Err(TesError::ClaimFailed {
            claim: "claim 2",
            detail: format!("|X'| = {} below s + 1 = {}", xp.set.len(), s + 1),
        });
    }
    // The bound only constrains the trimmed set; re-adding vertices with no
    // neighbour inside keeps |E(X)| fixed.
    let x = claim2_trim(gr, &xp.set, s + 1, &allowed);
    if x.inner_edges as i64 > 2 * si - di + 1 {
        return Err(TesError::ClaimFailed {
            claim: "claim 2",
            detail: format!(
                "|E(X)| = {} exceeds 2s - Δ + 1 = {}",
                x.inner_edges,
                2 * si - di + 1
            ),
        });
    }
    for &v in &x.set {
        allowed[v] = false;
    }
    let in_x: Vec<bool> = (0..gr.n())
        .map(|v| x.set.binary_search(&v).is_ok())
        .collect();
    let y: Vec<Vertex> = (0..gr.n()).filter(|&v| v != v1 && !in_x[v]).collect();
    let inst = LemmaInstance {
        a1: vec![v1],
        a2: y.clone(),
        c: x.set.clone(),
    };
    let report = check_conditions(gr, &inst)?;

    let (reduced_weighting, route) = if report.all_hold() {
        let out = construct_with(gr, &inst, &ConstructOptions::default())?;
        (out.weighting, Case1Route::Lemma)
    } else if report.first_failure() == Some(3)
        && report
            .conditions
            .iter()
            .enumerate()
            .all(|(j, c)| j == 2 || c.holds)
    {
        let mut in_y = vec![false; gr.n()];
        for &v in &y {
            in_y[v] = true;
        }
        let lead = x
            .set
            .iter()
            .copied()
            .filter(|&v| !gr.neighbors(v).any(|u| in_y[u]))
            .collect();
        let opts = ConstructOptions {
            waive_condition_3: true,
            lead,
        };
        let out = construct_with(gr, &inst, &opts)?;
        (out.weighting, Case1Route::LemmaLeadingIsolated)
    } else if !report.holds(2) {
        (
            explicit_weighting(gr, v1, &x.set, &y, s)?,
            Case1Route::Explicit,
        )
    } else {
        return Err(TesError::ConditionFailed(report.first_failure().unwrap()));
    };

    let values = red.map.iter().map(|&r| reduced_weighting.get(r)).collect();
    let weighting = VertexWeighting::new(s, values)?;
    let check = is_well_guarded(g, &weighting)?;
    if let Some(v) = check.first_violation {
        return Err(TesError::Certificate(format!(
            "lifted weighting fails at i = {}",
            v.i
        )));
    }
    Ok(Case1Outcome {
        weighting,
        route,
        identified: red.merged,
        x_prime_size: xp.set.len(),
        x_prime_edges: xp.inner_edges,
        x_size: x.set.len(),
        x_edges: x.inner_edges,
        conditions: report,
    })
}

/// `w(v1) = 0`, `w(Y3) = min{s - b, ⌈Δ/2⌉}`, `w(Y - Y3) = s`, and
/// `w(x_i) = min{s, i}` along `X` sorted by `|E(Y, x)|`.
fn explicit_weighting(
    g: &Graph,
    v1: Vertex,
    x: &[Vertex],
    y: &[Vertex],
    s: usize,
) -> Result<VertexWeighting> {
    let delta = g.degree(v1);
    let mut in_y = vec![false; g.n()];
    for &v in y {
        in_y[v] = true;
    }
    let small = s as f64 * 0.01;
    let target = (2 * s as i64 - delta as i64).max(0) as usize;
    let mut in_y3 = vec![false; g.n()];
    let (mut touching, mut inner) = (0usize, 0usize);
    for &v in y.iter().filter(|&&v| (g.degree(v) as f64) < small) {
        if touching >= target {
            break;
        }
        for u in g.neighbors(v).filter(|&u| u != v1) {
            if in_y3[u] {
                inner += 1;
            } else {
                touching += 1;
            }
        }
        in_y3[v] = true;
    }
    if touching < target {
        return Err(TesError::ClaimFailed {
            claim: "Y3 selection",
            detail: format!("low-degree part of Y reaches only {touching} of {target} edges"),
        });
    }
    let b = touching - inner;
    let y3_weight = s.saturating_sub(b).min(delta.div_ceil(2));

    let mut w = vec![0usize; g.n()];
    for &v in y {
        w[v] = if in_y3[v] { y3_weight } else { s };
    }
    let mut order = x.to_vec();
    order.sort_by_key(|&v| (g.neighbors(v).filter(|&u| in_y[u]).count(), v));
    for (i, &v) in order.iter().enumerate() {
        w[v] = i.min(s);
    }
    w[v1] = 0;
    let vw = VertexWeighting::new(s, w)?;
    let mut in_x = vec![false; g.n()];
    for &v in x {
        in_x[v] = true;
    }
    let eprime = EdgeSubset::from_fn(g, |_, (a, b)| !(in_x[a] && in_x[b]));
    let rep = is_guarding_set(g, &vw, &eprime)?;
    match rep.first_violation {
        None => Ok(vw),
        Some(v) => Err(TesError::ClaimFailed {
            claim: "explicit weighting",
            detail: format!(
                "count {} at i = {} outside [{}, {}]",
                v.count, v.i, v.lower, v.upper
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_merges_far_vertices() {
        // Hub 0 with leaves 1..=4; path 5-6 is outside the neighbourhood.
        let g = Graph::new(7, [(0, 1), (0, 2), (0, 3), (0, 4), (5, 6), (1, 2)]).unwrap();
        let red = reduce_to_neighbourhood(&g, 0).unwrap();
        assert_eq!(red.graph.m(), g.m());
        assert_eq!(red.graph.n(), 5);
        assert_eq!(red.merged, 2);
        assert_eq!(red.graph.degree(red.map[0]), 4);
        assert_eq!(red.graph.n() - 1, red.graph.neighbors(red.map[0]).count());
    }

    #[test]
    fn wrong_case_is_rejected() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let ctx = split_large_degree(&g, 0.5);
        assert!(matches!(
            construct_case1(&g, &ctx),
            Err(TesError::Precondition(_))
        ));
    }
}
