//! Vertex and total weightings, their certificate checkers, and the
//! conversions between well-guarded vertex weightings and irregular total
//! weightings of strength `s + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TesError};
use crate::graph::{EdgeId, Graph, Vertex};

/// `s = (m - 1) / 3` for a graph with `m ≡ 1 (mod 3)` edges.
pub fn strength_parameter(g: &Graph) -> Result<usize> {
    if g.m() % 3 != 1 {
        return Err(TesError::Residue { m: g.m() });
    }
    Ok((g.m() - 1) / 3)
}

/// Vertex weighting `w: V -> {0..s}`; an edge `uv` weighs `w(u) + w(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWeighting {
    s: usize,
    values: Vec<usize>,
}

impl VertexWeighting {
    pub fn new(s: usize, values: Vec<usize>) -> Result<Self> {
        if let Some((v, &x)) = values.iter().enumerate().find(|&(_, &x)| x > s) {
            return Err(TesError::InvalidWeighting(format!(
                "vertex {v} has weight {x} outside [0, {s}]"
            )));
        }
        Ok(VertexWeighting { s, values })
    }

    /// Weighting for `g` with `s` derived from its edge count.
    pub fn for_graph(g: &Graph, values: Vec<usize>) -> Result<Self> {
        let s = strength_parameter(g)?;
        if values.len() != g.n() {
            return Err(TesError::InvalidWeighting(format!(
                "{} values for {} vertices",
                values.len(),
                g.n()
            )));
        }
        Self::new(s, values)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, v: Vertex) -> usize {
        self.values[v]
    }

    pub fn edge_weight(&self, g: &Graph, e: EdgeId) -> usize {
        let (u, v) = g.edge(e);
        self.values[u] + self.values[v]
    }
}

/// Total weighting `ŵ: V ∪ E -> {1..t}`; edge values follow canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalWeighting {
    t: usize,
    vertex_values: Vec<usize>,
    edge_values: Vec<usize>,
}

impl TotalWeighting {
    pub fn new(t: usize, vertex_values: Vec<usize>, edge_values: Vec<usize>) -> Result<Self> {
        if t == 0 {
            return Err(TesError::InvalidWeighting(
                "strength must be at least 1".into(),
            ));
        }
        let bad = vertex_values
            .iter()
            .chain(&edge_values)
            .find(|&&x| x == 0 || x > t);
        if let Some(x) = bad {
            return Err(TesError::InvalidWeighting(format!(
                "value {x} outside [1, {t}]"
            )));
        }
        Ok(TotalWeighting {
            t,
            vertex_values,
            edge_values,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Largest value actually used.
    pub fn max_value(&self) -> usize {
        self.vertex_values
            .iter()
            .chain(&self.edge_values)
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn vertex_values(&self) -> &[usize] {
        &self.vertex_values
    }

    pub fn edge_values(&self) -> &[usize] {
        &self.edge_values
    }

    pub fn total_sum(&self, g: &Graph, e: EdgeId) -> usize {
        let (u, v) = g.edge(e);
        self.edge_values[e] + self.vertex_values[u] + self.vertex_values[v]
    }

    fn check_shape(&self, g: &Graph) -> Result<()> {
        if self.vertex_values.len() != g.n() || self.edge_values.len() != g.m() {
            return Err(TesError::InvalidWeighting(format!(
                "weighting covers {} vertices and {} edges, graph has {} and {}",
                self.vertex_values.len(),
                self.edge_values.len(),
                g.n(),
                g.m()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardViolation {
    pub i: usize,
    pub count: usize,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuardReport {
    pub ok: bool,
    pub first_violation: Option<GuardViolation>,
    /// Every violated threshold; only filled by [`guard_report_full`].
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<GuardViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrregularReport {
    pub ok: bool,
    /// Two edges with equal total sums.
    pub witness: Option<((Vertex, Vertex), (Vertex, Vertex))>,
}

/// Edge subset of a fixed graph, as a membership mask over edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSubset {
    mask: Vec<bool>,
    len: usize,
}

impl EdgeSubset {
    pub fn all(g: &Graph) -> Self {
        EdgeSubset {
            mask: vec![true; g.m()],
            len: g.m(),
        }
    }

    pub fn none(g: &Graph) -> Self {
        EdgeSubset {
            mask: vec![false; g.m()],
            len: 0,
        }
    }

    pub fn from_fn(g: &Graph, mut keep: impl FnMut(EdgeId, (Vertex, Vertex)) -> bool) -> Self {
        let mask: Vec<bool> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(id, &e)| keep(id, e))
            .collect();
        let len = mask.iter().filter(|&&b| b).count();
        EdgeSubset { mask, len }
    }

    pub fn from_pairs(g: &Graph, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut set = Self::none(g);
        for &(u, v) in pairs {
            let id = g
                .edge_id(u, v)
                .ok_or_else(|| TesError::NotAnEdge(format!("{u}-{v}")))?;
            if !set.mask[id] {
                set.mask[id] = true;
                set.len += 1;
            }
        }
        Ok(set)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.mask[e]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(id, _)| id)
    }
}

/// Checks that all `m` total sums are distinct. Sums lie in `[3, 3t]`, so a
/// flat table indexed by sum finds the first collision.
pub fn verify_total_irregular(g: &Graph, tw: &TotalWeighting) -> Result<IrregularReport> {
    tw.check_shape(g)?;
    let mut owner: Vec<Option<EdgeId>> = vec![None; 3 * tw.t + 1];
    for e in 0..g.m() {
        let sum = tw.total_sum(g, e);
        if let Some(prev) = owner[sum] {
            return Ok(IrregularReport {
                ok: false,
                witness: Some((g.edge(prev), g.edge(e))),
            });
        }
        owner[sum] = Some(e);
    }
    Ok(IrregularReport {
        ok: true,
        witness: None,
    })
}

fn guard_scan(
    g: &Graph,
    vw: &VertexWeighting,
    eprime: &EdgeSubset,
    full: bool,
) -> Result<GuardReport> {
    if vw.values.len() != g.n() {
        return Err(TesError::InvalidWeighting(format!(
            "{} values for {} vertices",
            vw.values.len(),
            g.n()
        )));
    }
    let s = vw.s;
    let outside = (g.m() - eprime.len()) as i64;
    let mut bucket = vec![0usize; 2 * s + 1];
    for e in eprime.ids() {
        bucket[vw.edge_weight(g, e)] += 1;
    }
    let mut report = GuardReport {
        ok: true,
        first_violation: None,
        violations: Vec::new(),
    };
    let mut count = 0usize;
    for (i, &b) in bucket.iter().enumerate() {
        count += b;
        let lower = i as i64 + 1;
        let upper = i as i64 + s as i64 + 1 - outside;
        let c = count as i64;
        if c < lower || c > upper {
            let v = GuardViolation {
                i,
                count,
                lower,
                upper,
            };
            if report.ok {
                report.ok = false;
                report.first_violation = Some(v);
                if !full {
                    break;
                }
            }
            report.violations.push(v);
        }
    }
    Ok(report)
}

/// `i + 1 <= |{e : w(e) <= i}| <= i + s + 1` for all `0 <= i <= 2s`.
pub fn is_well_guarded(g: &Graph, vw: &VertexWeighting) -> Result<GuardReport> {
    check_s(g, vw)?;
    guard_scan(g, vw, &EdgeSubset::all(g), false)
}

/// `i + 1 <= |{e ∈ E' : w(e) <= i}| <= i + s + 1 - |E \ E'|` for all `0 <= i <= 2s`.
pub fn is_guarding_set(
    g: &Graph,
    vw: &VertexWeighting,
    eprime: &EdgeSubset,
) -> Result<GuardReport> {
    check_s(g, vw)?;
    if eprime.mask.len() != g.m() {
        return Err(TesError::InvalidWeighting(
            "edge subset built for another graph".into(),
        ));
    }
    guard_scan(g, vw, eprime, false)
}

/// Like [`is_guarding_set`] but lists every violated threshold.
pub fn guard_report_full(
    g: &Graph,
    vw: &VertexWeighting,
    eprime: &EdgeSubset,
) -> Result<GuardReport> {
    check_s(g, vw)?;
    guard_scan(g, vw, eprime, true)
}

fn check_s(g: &Graph, vw: &VertexWeighting) -> Result<()> {
    let s = strength_parameter(g)?;
    if vw.s != s {
        return Err(TesError::InvalidWeighting(format!(
            "weighting has s = {}, graph needs s = {s}",
            vw.s
        )));
    }
    Ok(())
}

/// Extends a well-guarded vertex weighting to an irregular total weighting of
/// strength `s + 1` whose total sums are exactly `3..=m+2`.
///
/// Edges are ranked by `w(e)` (ties in canonical order); the edge of rank `j`
/// gets `j + 1 - w(e)`. The counting bounds force `w(e) <= j <= w(e) + s`.
pub fn vertex_to_total(g: &Graph, vw: &VertexWeighting) -> Result<TotalWeighting> {
    let report = is_well_guarded(g, vw)?;
    if let Some(v) = report.first_violation {
        return Err(TesError::NotWellGuarded(v));
    }
    let mut order: Vec<EdgeId> = (0..g.m()).collect();
    order.sort_by_key(|&e| (vw.edge_weight(g, e), e));
    let mut edge_values = vec![0; g.m()];
    for (j, &e) in order.iter().enumerate() {
        edge_values[e] = j + 1 - vw.edge_weight(g, e);
    }
    let vertex_values = vw.values.iter().map(|&x| x + 1).collect();
    TotalWeighting::new(vw.s + 1, vertex_values, edge_values)
}

/// Drops the edge values of an irregular strength-`(s+1)` weighting and shifts
/// vertex values down by one.
pub fn total_to_vertex(g: &Graph, tw: &TotalWeighting) -> Result<VertexWeighting> {
    let s = strength_parameter(g)?;
    if tw.t != s + 1 {
        return Err(TesError::InvalidWeighting(format!(
            "strength {} differs from s + 1 = {}",
            tw.t,
            s + 1
        )));
    }
    let report = verify_total_irregular(g, tw)?;
    if let Some((a, b)) = report.witness {
        return Err(TesError::NotIrregular(a, b));
    }
    let vw = VertexWeighting::new(s, tw.vertex_values.iter().map(|&x| x - 1).collect())?;
    if let Some(v) = is_well_guarded(g, &vw)?.first_violation {
        return Err(TesError::NotWellGuarded(v));
    }
    Ok(vw)
}

/// On-disk JSON form shared by vertex and total weightings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightingFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub vertex_weights: Vec<usize>,
    /// `[u, v, value]` in canonical edge order.
    pub edge_weights: Vec<(Vertex, Vertex, usize)>,
}

impl WeightingFile {
    pub fn from_total(g: &Graph, tw: &TotalWeighting) -> Self {
        WeightingFile {
            s: None,
            t: Some(tw.t),
            vertex_weights: tw.vertex_values.clone(),
            edge_weights: g
                .edges()
                .iter()
                .zip(&tw.edge_values)
                .map(|(&(u, v), &x)| (u, v, x))
                .collect(),
        }
    }

    /// Edge entries carry the induced edge weights `w(u) + w(v)`.
    pub fn from_vertex(g: &Graph, vw: &VertexWeighting) -> Self {
        WeightingFile {
            s: Some(vw.s),
            t: None,
            vertex_weights: vw.values.clone(),
            edge_weights: g
                .edges()
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| (u, v, vw.edge_weight(g, e)))
                .collect(),
        }
    }

    fn check_vertices(&self, g: &Graph) -> Result<()> {
        if self.vertex_weights.len() != g.n() {
            return Err(TesError::InvalidWeighting(format!(
                "{} vertex weights for {} vertices",
                self.vertex_weights.len(),
                g.n()
            )));
        }
        Ok(())
    }

    /// Reads a total weighting; edge entries may come in any order but must
    /// cover every edge exactly once.
    pub fn to_total(&self, g: &Graph) -> Result<TotalWeighting> {
        let t = self
            .t
            .ok_or_else(|| TesError::InvalidWeighting("missing field \"t\"".into()))?;
        self.check_vertices(g)?;
        if self.edge_weights.len() != g.m() {
            return Err(TesError::InvalidWeighting(format!(
                "{} edge weights for {} edges",
                self.edge_weights.len(),
                g.m()
            )));
        }
        let mut edge_values = vec![0; g.m()];
        for &(u, v, x) in &self.edge_weights {
            let id = g
                .edge_id(u, v)
                .ok_or_else(|| TesError::NotAnEdge(format!("{u}-{v}")))?;
            if edge_values[id] != 0 {
                return Err(TesError::InvalidWeighting(format!(
                    "edge {u}-{v} listed twice"
                )));
            }
            if x == 0 {
                return Err(TesError::InvalidWeighting(format!(
                    "edge {u}-{v} has value 0"
                )));
            }
            edge_values[id] = x;
        }
        TotalWeighting::new(t, self.vertex_weights.clone(), edge_values)
    }

    pub fn to_vertex(&self, g: &Graph) -> Result<VertexWeighting> {
        let s = self
            .s
            .ok_or_else(|| TesError::InvalidWeighting("missing field \"s\"".into()))?;
        self.check_vertices(g)?;
        VertexWeighting::new(s, self.vertex_weights.clone())
    }
}
