//! End-to-end construction: padding, regime choice, case dispatch, fallback
//! and conversion to a certified total weighting of the original graph.

use serde::Serialize;

use super::{
    construct_case1, construct_case2, construct_case3, dispatch_case, split_large_degree, CaseId,
};
use crate::error::{Result, TesError};
use crate::exact::{conjectured_tes, tes_exact, DEFAULT_BUDGET};
use crate::graph::{pad_to_residue, Graph};
use crate::prob::{sample_case4, EpsMode};
use crate::repair::{repair, RepairOptions};
use crate::weighting::{
    is_well_guarded, strength_parameter, verify_total_irregular, vertex_to_total, EdgeSubset,
    TotalWeighting, VertexWeighting,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Case4,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsChoice {
    /// Small-degree regime when `Δ <= m/4350`, main regime otherwise.
    Auto,
    Mode(EpsMode),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoOptions {
    pub method: Method,
    pub seed: u64,
    pub eps: EpsChoice,
    /// Graphs with at most this many edges go straight to the exact solver.
    pub exact_threshold: usize,
    pub exact_budget: u64,
    pub max_resamples: usize,
    pub repair_steps: usize,
}

impl Default for AutoOptions {
    fn default() -> Self {
        AutoOptions {
            method: Method::Auto,
            seed: 0,
            eps: EpsChoice::Auto,
            exact_threshold: 20,
            exact_budget: DEFAULT_BUDGET,
            max_resamples: 50,
            repair_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutoReport {
    /// `exact`, `case1`..`case4` or `local_search`.
    pub route: String,
    pub case: Option<CaseId>,
    pub m: usize,
    pub padded_edges: usize,
    pub strength: usize,
    pub conjectured: usize,
    pub eps: Option<f64>,
    pub e0: Option<f64>,
    pub es: Option<f64>,
    pub b0_len: Option<usize>,
    pub bs_len: Option<usize>,
    pub swapped: Option<bool>,
    pub attempts: Option<usize>,
    /// Failures of routes tried before the successful one.
    pub diagnostics: Vec<String>,
    /// Case-specific outcome details.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoOutcome {
    pub weighting: TotalWeighting,
    pub report: AutoReport,
}

fn run_exact(g: &Graph, opts: &AutoOptions, diagnostics: Vec<String>) -> Result<AutoOutcome> {
    let res = tes_exact(g, opts.exact_budget)?;
    Ok(AutoOutcome {
        report: AutoReport {
            route: "exact".into(),
            case: None,
            m: g.m(),
            padded_edges: 0,
            strength: res.tes,
            conjectured: conjectured_tes(g)?,
            eps: None,
            e0: None,
            es: None,
            b0_len: None,
            bs_len: None,
            swapped: None,
            attempts: None,
            diagnostics,
            details: serde_json::json!({ "nodes": res.nodes, "proof_of_lower": res.proof_of_lower }),
        },
        weighting: res.certificate,
    })
}

pub fn construct_auto(g: &Graph, opts: &AutoOptions) -> Result<AutoOutcome> {
    if g.m() == 0 {
        return Err(TesError::NoEdges);
    }
    if opts.method == Method::Exact
        || (opts.method == Method::Auto && g.m() <= opts.exact_threshold)
    {
        return run_exact(g, opts, Vec::new());
    }
    let conjectured = conjectured_tes(g)?;
    let delta = g.max_degree();
    if (delta + 1).div_ceil(2) > (g.m() + 2).div_ceil(3) {
        let why = format!(
            "⌈(Δ+1)/2⌉ = {} exceeds ⌈(m+2)/3⌉ = {}",
            (delta + 1).div_ceil(2),
            (g.m() + 2).div_ceil(3)
        );
        return match opts.method {
            Method::Auto => run_exact(g, opts, vec![why.clone()])
                .map_err(|e| TesError::Unsupported(format!("{why}; exact solver: {e}"))),
            _ => Err(TesError::Unsupported(why)),
        };
    }

    let (gp, added) = pad_to_residue(g);
    let s = strength_parameter(&gp)?;
    let eps = match opts.eps {
        EpsChoice::Value(e) => e,
        EpsChoice::Mode(mode) => mode.epsilon(),
        EpsChoice::Auto => {
            if (gp.max_degree() as f64) <= gp.m() as f64 / 4350.0 {
                EpsMode::SmallDegree.epsilon()
            } else {
                EpsMode::Main.epsilon()
            }
        }
    };
    let ctx = split_large_degree(&gp, eps);
    let case = dispatch_case(&ctx);
    let mut report = AutoReport {
        route: String::new(),
        case: Some(case),
        m: g.m(),
        padded_edges: added,
        strength: s + 1,
        conjectured,
        eps: Some(eps),
        e0: Some(ctx.e0),
        es: Some(ctx.es),
        b0_len: Some(ctx.b0.len()),
        bs_len: Some(ctx.bs.len()),
        swapped: Some(ctx.swapped),
        attempts: None,
        diagnostics: Vec::new(),
        details: serde_json::Value::Null,
    };

    let attempt: Result<(VertexWeighting, serde_json::Value, Option<usize>)> =
        match (opts.method, case) {
            (Method::Case4, c) if c != CaseId::Case4 => {
                return Err(TesError::Precondition(format!(
                    "method case4 requested but the graph dispatches to {c:?}"
                )))
            }
            (_, CaseId::Case4) => sample_case4(&gp, &ctx, opts.seed, opts.max_resamples)
                .map(|o| (o.weighting, serde_json::Value::Null, Some(o.attempts))),
            (_, CaseId::Case1) => construct_case1(&gp, &ctx).map(|o| {
                (
                    o.weighting.clone(),
                    serde_json::to_value(&o).unwrap_or_default(),
                    None,
                )
            }),
            (_, CaseId::Case2) => construct_case2(&gp, &ctx, opts.seed).map(|o| {
                (
                    o.weighting.clone(),
                    serde_json::to_value(&o).unwrap_or_default(),
                    None,
                )
            }),
            (_, CaseId::Case3) => construct_case3(&gp, &ctx).map(|o| {
                let details = serde_json::json!({
                    "ordering_inequality_held": o.ordering_inequality_held,
                    "conditions": o.report,
                });
                (o.weighting, details, None)
            }),
        };
    let label = match case {
        CaseId::Case1 => "case1",
        CaseId::Case2 => "case2",
        CaseId::Case3 => "case3",
        CaseId::Case4 => "case4",
    };
    let vw = match attempt {
        Ok((vw, details, attempts)) => {
            report.route = label.into();
            report.details = details;
            report.attempts = attempts;
            vw
        }
        Err(e) if opts.method == Method::Case4 => return Err(e),
        Err(e) => {
            report.diagnostics.push(format!("{label}: {e}"));
            let ropts = RepairOptions {
                seed: opts.seed,
                max_steps: opts.repair_steps,
                ..Default::default()
            };
            match repair(
                &gp,
                &EdgeSubset::all(&gp),
                &vec![None; gp.n()],
                None,
                &ropts,
            ) {
                Ok(vw) => {
                    report.route = "local_search".into();
                    vw
                }
                Err(e) => {
                    report.diagnostics.push(format!("local_search: {e}"));
                    return Err(TesError::AllRoutesFailed(report.diagnostics));
                }
            }
        }
    };

    let guard = is_well_guarded(&gp, &vw)?;
    if let Some(v) = guard.first_violation {
        return Err(TesError::NotWellGuarded(v));
    }
    let full = vertex_to_total(&gp, &vw)?;
    let weighting = TotalWeighting::new(
        s + 1,
        full.vertex_values()[..g.n()].to_vec(),
        full.edge_values()[..g.m()].to_vec(),
    )?;
    let check = verify_total_irregular(g, &weighting)?;
    if let Some((a, b)) = check.witness {
        return Err(TesError::NotIrregular(a, b));
    }
    Ok(AutoOutcome { weighting, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn k5_goes_exact() {
        let g = generate(GraphKind::Complete { n: 5 }, 0).unwrap();
        let out = construct_auto(&g, &AutoOptions::default()).unwrap();
        assert_eq!(out.report.route, "exact");
        assert_eq!(out.report.strength, 5);
        assert_eq!(out.weighting.t(), 5);
    }

    #[test]
    fn case4_request_on_star_is_rejected() {
        let g = generate(GraphKind::Star { leaves: 40 }, 0).unwrap();
        let opts = AutoOptions {
            method: Method::Case4,
            ..Default::default()
        };
        assert!(construct_auto(&g, &opts).is_err());
    }
}
