//! Three or more large vertices on the heavy side.

use super::{dispatch_case, CaseId, LargeGraphContext};
use crate::error::{Result, TesError};
use crate::graph::{Graph, Vertex};
use crate::lemma::{construct, LemmaConstruction, LemmaInstance};
use crate::weighting::strength_parameter;

/// Applies the partition `A1 = B0`, `A2 = BS`, `C = V \ B` directly.
pub fn construct_case3(g: &Graph, ctx: &LargeGraphContext) -> Result<LemmaConstruction> {
    strength_parameter(g)?;
    if dispatch_case(ctx) != CaseId::Case3 {
        return Err(TesError::Precondition(format!(
            "context dispatches to {:?}",
            dispatch_case(ctx)
        )));
    }
    let in_b = ctx.membership(g.n());
    let mut a1 = ctx.b0.clone();
    let mut a2 = ctx.bs.clone();
    a1.sort_unstable();
    a2.sort_unstable();
    let c: Vec<Vertex> = (0..g.n()).filter(|&v| !in_b[v]).collect();
    construct(g, &LemmaInstance { a1, a2, c })
}
