//! Two dominant vertices `B0 = {v2, v3}` with a third large vertex `v1`.

use serde::Serialize;

use super::local::{claim3_set, claim4_trim, hub_degrees, Claim3Window};
use super::{dispatch_case, CaseId, LargeGraphContext};
use crate::error::{Result, TesError};
use crate::graph::{Graph, Vertex};
use crate::lemma::{check_conditions, construct, ConditionReport, LemmaInstance};
use crate::repair::{repair, RepairOptions};
use crate::weighting::{is_well_guarded, strength_parameter, EdgeSubset, VertexWeighting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case2Route {
    Lemma,
    /// Condition (3) failed; completion around `w(v1) = 0`, `w(v2) = s`,
    /// `w(v3) = ⌈s/2⌉` with guarding set `E({v1, v2, v3}, V)`.
    HubCompletion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case2Outcome {
    #[serde(skip)]
    pub weighting: VertexWeighting,
    pub route: Case2Route,
    pub hubs: [Vertex; 3],
    /// `|E(v_i, V(H))|` for `H = G - {v1, v2, v3}`.
    pub d: [usize; 3],
    pub window: Claim3Window,
    /// The window's lower end with `-2` outside the `4/3` factor.
    pub stronger_lower_met: bool,
    pub x_prime_hub_edges: usize,
    pub x_prime_edges: usize,
    pub x_hub_edges: usize,
    pub x_edges: usize,
    /// Bound on `|E(X)|` after trimming, and whether it held.
    pub x_edges_bound: f64,
    pub conditions: ConditionReport,
}

pub fn construct_case2(g: &Graph, ctx: &LargeGraphContext, seed: u64) -> Result<Case2Outcome> {
    let s = strength_parameter(g)?;
    if dispatch_case(ctx) != CaseId::Case2 {
        return Err(TesError::Precondition(format!(
            "context dispatches to {:?}",
            dispatch_case(ctx)
        )));
    }
    let in_b = ctx.membership(g.n());
    let v1 = ctx
        .bs
        .iter()
        .copied()
        .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
        .or_else(|| {
            (0..g.n())
                .filter(|v| !ctx.b0.contains(v))
                .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
        })
        .ok_or_else(|| TesError::Precondition("no vertex outside B0".into()))?;
    let core = [v1, ctx.b0[0], ctx.b0[1]];
    let into_h = |v: Vertex| g.neighbors(v).filter(|u| !core.contains(u)).count();
    let (mut v2, mut v3) = (ctx.b0[0], ctx.b0[1]);
    if (into_h(v3), std::cmp::Reverse(v3)) > (into_h(v2), std::cmp::Reverse(v2)) {
        std::mem::swap(&mut v2, &mut v3);
    }
    let d = [into_h(v1), into_h(v2), into_h(v3)];
    let (m, bl) = (g.m() as f64, ctx.b.len() as f64);
    let (d1, d2, d3) = (d[0] as f64, d[1] as f64, d[2] as f64);
    let (fd1, fd2, fd3) = (
        g.degree(v1) as f64,
        g.degree(v2) as f64,
        g.degree(v3) as f64,
    );
    let weighted = d1 + 2.0 * d2 + 2.0 * d3;
    let window = Claim3Window {
        lower: (d2 + d3 - bl).min(4.0 / 3.0 * (weighted - m - 2.0)),
        upper: 4.0 / 3.0 * (fd1 + 2.0 * fd2 + 2.0 * fd3 - m),
    };
    let stronger_lower = (d2 + d3 - bl).min(4.0 / 3.0 * (weighted - m) - 2.0);

    let allowed: Vec<bool> = (0..g.n()).map(|v| !in_b[v]).collect();
    let (xp, fp) = claim3_set(g, (v2, v3), &allowed, window)?;
    if 4 * xp.inner_edges > fp {
        return Err(TesError::ClaimFailed {
            claim: "claim 3",
            detail: format!(
                "|E(X')| = {} exceeds a quarter of {fp} hub edges",
                xp.inner_edges
            ),
        });
    }
    if fp < s + 2 {
        return Err(TesError::ClaimFailed {
            claim: "claim 4",
            detail: format!("X' has {fp} hub edges, below s + 2 = {}", s + 2),
        });
    }
    let (x, fx) = claim4_trim(g, (v2, v3), &xp.set, s + 3);
    let sf = s as f64;
    let x_edges_bound = (0.5 * sf - 0.25 * (d2 + d3 - bl) + 1.5)
        .max(1.5 * sf - (d1 + 2.0 * d2 + 2.0 * d3) / 3.0 + 2.5);
    if fx < s + 2 || x.inner_edges as f64 > x_edges_bound {
        return Err(TesError::ClaimFailed {
            claim: "claim 4",
            detail: format!(
                "trimmed set has {fx} hub edges and {} inner edges (bound {x_edges_bound})",
                x.inner_edges
            ),
        });
    }

    // Maximal X: absorb vertices of V' with no neighbour in X.
    let mut in_x = vec![false; g.n()];
    for &v in &x.set {
        in_x[v] = true;
    }
    for v in 0..g.n() {
        if allowed[v] && !in_x[v] && !g.neighbors(v).any(|u| in_x[u]) {
            in_x[v] = true;
        }
    }
    let c: Vec<Vertex> = (0..g.n()).filter(|&v| in_x[v]).collect();
    let a1 = vec![v2.min(v3), v2.max(v3)];
    let a2: Vec<Vertex> = (0..g.n())
        .filter(|&v| !in_x[v] && v != v2 && v != v3)
        .collect();
    let inst = LemmaInstance { a1, a2, c };
    let report = check_conditions(g, &inst)?;

    let (weighting, route) = if report.all_hold() {
        (construct(g, &inst)?.weighting, Case2Route::Lemma)
    } else if report.first_failure() == Some(3)
        && report
            .conditions
            .iter()
            .enumerate()
            .all(|(j, c)| j == 2 || c.holds)
    {
        let mut fixed = vec![None; g.n()];
        fixed[v1] = Some(0);
        fixed[v2] = Some(s);
        fixed[v3] = Some(s.div_ceil(2));
        let eprime = EdgeSubset::from_fn(g, |_, (a, b)| core.contains(&a) || core.contains(&b));
        let opts = RepairOptions {
            seed,
            ..Default::default()
        };
        (
            repair(g, &eprime, &fixed, None, &opts)?,
            Case2Route::HubCompletion,
        )
    } else {
        return Err(TesError::ConditionFailed(report.first_failure().unwrap()));
    };

    let check = is_well_guarded(g, &weighting)?;
    if let Some(v) = check.first_violation {
        return Err(TesError::Certificate(format!(
            "weighting fails at i = {}",
            v.i
        )));
    }
    let h = hub_degrees(g, (v2, v3));
    Ok(Case2Outcome {
        weighting,
        route,
        hubs: [v1, v2, v3],
        d,
        window,
        stronger_lower_met: fp as f64 >= stronger_lower,
        x_prime_hub_edges: fp,
        x_prime_edges: xp.inner_edges,
        x_hub_edges: x.set.iter().map(|&v| h[v]).sum(),
        x_edges: x.inner_edges,
        x_edges_bound,
        conditions: report,
    })
}
