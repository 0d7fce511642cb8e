//! Deterministic guarding sets from a vertex tripartition `V = A1 ∪ A2 ∪ C`.
//!
//! `A1` is weighted 0, `A2` is weighted `s`, and `C` is laid out in an order
//! `x_1, ..., x_|C|` with `w(x_i) = ⌈s·|E(A1, {x_1..x_{i-1}})| / |E(A1, C')|⌉`
//! where `C' = C - x_|C|`. Below threshold `s` the prefix counts are bounded
//! whatever the order; at and above `s` the order is chosen greedily so that
//!
//! ```text
//! s + w(x_j) <= |E(A1,V)| + |E(A2,{x_1..x_{j-1}})| <= 2s + 1 - |E \ E'| + w(x_j) - Δ2
//! ```
//!
//! holds position by position. Candidates are also checked against every
//! threshold they settle, and when the greedy pass gets stuck the order is
//! decided by exhaustive search over `(|E(A1,x)|, |E(A2,x)|)` types. The set
//! `E' = E \ E(C)` is then guarding.

use serde::Serialize;

use crate::error::{Result, TesError};
use crate::graph::{Graph, Vertex};
use crate::weighting::{is_guarding_set, strength_parameter, EdgeSubset, VertexWeighting};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct LemmaInstance {
    pub a1: Vec<Vertex>,
    pub a2: Vec<Vertex>,
    pub c: Vec<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    A1,
    A2,
    C,
}

/// Edge counts the five conditions are stated in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaQuantities {
    pub s: usize,
    pub m: usize,
    pub e_prime: usize,
    /// `|E \ E'| = |E(C)|`
    pub outside: usize,
    pub e_a1: usize,
    pub e_a2: usize,
    pub e_a1_v: usize,
    pub e_a2_v: usize,
    pub e_a1_c: usize,
    pub e_a2_c: usize,
    pub delta1: usize,
    pub delta2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionValue {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub quantities: LemmaQuantities,
    /// Conditions (1)–(5) in order.
    pub conditions: [ConditionValue; 5],
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn holds(&self, number: u8) -> bool {
        self.conditions[usize::from(number) - 1].holds
    }

    /// Number (1-based) of the first failing condition.
    pub fn first_failure(&self) -> Option<u8> {
        self.conditions
            .iter()
            .position(|c| !c.holds)
            .map(|k| k as u8 + 1)
    }
}

struct Layout {
    side: Vec<Side>,
    /// `|E(A1, x)|` and `|E(A2, x)|` per vertex (meaningful on `C`).
    a1: Vec<usize>,
    a2: Vec<usize>,
    q: LemmaQuantities,
}

fn layout(g: &Graph, inst: &LemmaInstance) -> Result<Layout> {
    let s = strength_parameter(g)?;
    let mut side: Vec<Option<Side>> = vec![None; g.n()];
    for (list, tag) in [
        (&inst.a1, Side::A1),
        (&inst.a2, Side::A2),
        (&inst.c, Side::C),
    ] {
        for &v in list {
            if v >= g.n() {
                return Err(TesError::VertexOutOfRange {
                    vertex: v,
                    n: g.n(),
                });
            }
            if side[v].replace(tag).is_some() {
                return Err(TesError::InvalidPartition(format!(
                    "vertex {v} listed twice"
                )));
            }
        }
    }
    let side: Vec<Side> = side
        .into_iter()
        .enumerate()
        .map(|(v, s)| {
            s.ok_or_else(|| TesError::InvalidPartition(format!("vertex {v} not covered")))
        })
        .collect::<Result<_>>()?;

    let mut a1 = vec![0; g.n()];
    let mut a2 = vec![0; g.n()];
    let (mut e_a1, mut e_a2, mut e_c, mut e_a1_v, mut e_a2_v, mut e_a1_c, mut e_a2_c) =
        (0, 0, 0, 0, 0, 0, 0);
    for &(u, v) in g.edges() {
        let (su, sv) = (side[u], side[v]);
        match (su, sv) {
            (Side::A1, Side::A1) => e_a1 += 1,
            (Side::A2, Side::A2) => e_a2 += 1,
            (Side::C, Side::C) => e_c += 1,
            _ => {}
        }
        if su == Side::A1 || sv == Side::A1 {
            e_a1_v += 1;
        }
        if su == Side::A2 || sv == Side::A2 {
            e_a2_v += 1;
        }
        for (x, sx, sy) in [(u, su, sv), (v, sv, su)] {
            if sx == Side::C {
                match sy {
                    Side::A1 => {
                        a1[x] += 1;
                        e_a1_c += 1;
                    }
                    Side::A2 => {
                        a2[x] += 1;
                        e_a2_c += 1;
                    }
                    Side::C => {}
                }
            }
        }
    }
    let delta1 = inst.c.iter().map(|&x| a1[x]).max().unwrap_or(0);
    let delta2 = inst.c.iter().map(|&x| a2[x]).max().unwrap_or(0);
    let q = LemmaQuantities {
        s,
        m: g.m(),
        e_prime: g.m() - e_c,
        outside: e_c,
        e_a1,
        e_a2,
        e_a1_v,
        e_a2_v,
        e_a1_c,
        e_a2_c,
        delta1,
        delta2,
    };
    Ok(Layout { side, a1, a2, q })
}

fn evaluate(q: &LemmaQuantities) -> Result<[ConditionValue; 5]> {
    if q.e_a1_c <= q.delta1 {
        return Err(TesError::DegenerateInstance {
            e_a1_c: q.e_a1_c,
            delta1: q.delta1,
        });
    }
    let i = |x: usize| x as i64;
    let (s, ep, k) = (i(q.s), i(q.e_prime), i(q.outside));
    let (d1, d2) = (i(q.delta1), i(q.delta2));
    let le = |lhs: i64, rhs: i64| ConditionValue {
        holds: lhs <= rhs,
        lhs: lhs as f64,
        rhs: rhs as f64,
    };
    let denom = i(q.e_a1_c) - d1;
    // Δ2 + s·Δ1/denom <= s - k, cleared of the (positive) denominator.
    let fifth = ConditionValue {
        holds: d2 * denom + s * d1 <= (s - k) * denom,
        lhs: d2 as f64 + (s * d1) as f64 / denom as f64,
        rhs: (s - k) as f64,
    };
    Ok([
        le(i(q.e_a1), ep - 2 * s - d1),
        le(i(q.e_a2), ep - 2 * s - d2),
        le(i(q.e_a1_v), ep - s + 1 - d2),
        le(i(q.e_a2_v), ep - s + 1 - d1),
        fifth,
    ])
}

/// Evaluates conditions (1)–(5) for the instance.
pub fn check_conditions(g: &Graph, inst: &LemmaInstance) -> Result<ConditionReport> {
    let lay = layout(g, inst)?;
    let conditions = evaluate(&lay.q)?;
    Ok(ConditionReport {
        quantities: lay.q,
        conditions,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructOptions {
    /// Proceed although condition (3) fails.
    pub waive_condition_3: bool,
    /// Vertices of `C` placed first (lowest id first) for as long as the
    /// upper side of the ordering inequality is violated.
    pub lead: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaConstruction {
    pub weighting: VertexWeighting,
    pub eprime: EdgeSubset,
    /// `x_1, ..., x_|C|`.
    pub order: Vec<Vertex>,
    /// Whether the ordering inequality held at every position.
    pub ordering_inequality_held: bool,
    pub report: ConditionReport,
}

/// Builds the weighting for an instance satisfying all five conditions.
pub fn construct(g: &Graph, inst: &LemmaInstance) -> Result<LemmaConstruction> {
    construct_with(g, inst, &ConstructOptions::default())
}

pub fn construct_with(
    g: &Graph,
    inst: &LemmaInstance,
    opts: &ConstructOptions,
) -> Result<LemmaConstruction> {
    let lay = layout(g, inst)?;
    let conditions = evaluate(&lay.q)?;
    let report = ConditionReport {
        quantities: lay.q.clone(),
        conditions,
    };
    if let Some(k) = report.first_failure() {
        let waived = k == 3
            && opts.waive_condition_3
            && report
                .conditions
                .iter()
                .enumerate()
                .all(|(j, c)| j == 2 || c.holds);
        if !waived {
            return Err(TesError::ConditionFailed(k));
        }
    }

    // Last vertex: fewest A2-edges among those lifting |E(A2)| to Δ2. Ties
    // are tried by fewest A1-edges, which keeps |E(A1, C')| large.
    let q = &lay.q;
    let eligible = |x: &Vertex| q.e_a2 + lay.a2[*x] >= q.delta2;
    let least = inst
        .c
        .iter()
        .filter(|x| eligible(x))
        .map(|&x| lay.a2[x])
        .min()
        .expect("the vertex attaining Δ2 always qualifies");
    let mut lasts: Vec<Vertex> = inst
        .c
        .iter()
        .copied()
        .filter(|x| eligible(x) && lay.a2[*x] == least && lay.a1[*x] < q.e_a1_c)
        .collect();
    lasts.sort_unstable_by_key(|&x| (lay.a1[x], x));

    let mut first_err = None;
    for x_last in lasts {
        match build(g, inst, &lay, x_last, opts) {
            Ok((weighting, eprime, order, held)) => {
                return Ok(LemmaConstruction {
                    weighting,
                    eprime,
                    order,
                    ordering_inequality_held: held,
                    report,
                })
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or(TesError::OrderingDeadEnd { position: 0 }))
}

type Built = (VertexWeighting, EdgeSubset, Vec<Vertex>, bool);

fn build(
    g: &Graph,
    inst: &LemmaInstance,
    lay: &Layout,
    x_last: Vertex,
    opts: &ConstructOptions,
) -> Result<Built> {
    let q = &lay.q;
    let s = q.s as i64;
    let k = q.outside as i64;
    let delta2 = q.delta2 as i64;
    let e1 = q.e_a1 as i64;
    let mut remaining: Vec<Vertex> = inst.c.iter().copied().filter(|&x| x != x_last).collect();
    remaining.sort_unstable();
    let denom = q.e_a1_c - lay.a1[x_last];
    let weight_of = |p1: usize| -> i64 { ((q.s * p1).div_ceil(denom)) as i64 };

    let ie1 = |w: i64, r: i64| s + w <= r && r <= 2 * s + 1 - k + w - delta2;
    // Placing a vertex at weight `w` when the next one gets `w_next` fixes
    // the counts at thresholds `w..w_next` (A1-edges, counted from `p_next`)
    // and `s+w..s+w_next` (running count `r_next`).
    let block_ok = |w: i64, w_next: i64, p_next: i64, r_next: i64| {
        let low = w_next.min(s) > w && (w_next.min(s) > e1 + p_next || e1 + p_next > w + s + 1 - k);
        let high = r_next > 2 * s + 1 - k + w || (w_next > w && s + w_next > r_next);
        !(low || high)
    };

    let mut lead: Vec<Vertex> = opts
        .lead
        .iter()
        .copied()
        .filter(|&x| x != x_last && lay.side[x] == Side::C)
        .collect();
    lead.sort_unstable();
    lead.dedup();

    let mut order = Vec::with_capacity(inst.c.len());
    let mut p1 = 0usize;
    let mut r = q.e_a1_v as i64;
    let mut ie1_all = true;
    let mut searched = false;

    while !remaining.is_empty() {
        let w = weight_of(p1);
        ie1_all &= ie1(w, r);
        let next = |x: Vertex| {
            let p = p1 + lay.a1[x];
            (weight_of(p), p as i64, r + lay.a2[x] as i64)
        };
        let fits = |x: Vertex| {
            let (wn, pn, rn) = next(x);
            block_ok(w, wn, pn, rn)
        };
        let upper_violated = r > 2 * s + 1 - k + w - delta2;

        let mut pick = None;
        if upper_violated {
            pick = lead
                .iter()
                .copied()
                .find(|&x| remaining.binary_search(&x).is_ok() && fits(x));
        }
        if pick.is_none() {
            pick = remaining
                .iter()
                .copied()
                .find(|&x| {
                    let (wn, _, rn) = next(x);
                    fits(x) && ie1(wn, rn)
                })
                .or_else(|| remaining.iter().copied().find(|&x| fits(x)));
        }
        let Some(x) = pick else {
            // Greedy is stuck; decide the rest of the order exactly, and
            // failing that the whole order.
            let tail = search_tail(lay, &remaining, p1, r, &weight_of, &block_ok)
                .or_else(|| {
                    let all: Vec<Vertex> = order.iter().chain(&remaining).copied().collect();
                    let full = search_tail(lay, &all, 0, q.e_a1_v as i64, &weight_of, &block_ok)?;
                    (p1, r) = (0, q.e_a1_v as i64);
                    order.clear();
                    Some(full)
                })
                .ok_or(TesError::OrderingDeadEnd {
                    position: order.len() + 1,
                })?;
            for &x in &tail {
                p1 += lay.a1[x];
                r += lay.a2[x] as i64;
            }
            order.extend(tail);
            remaining.clear();
            searched = true;
            break;
        };
        let at = remaining
            .binary_search(&x)
            .expect("pick comes from remaining");
        remaining.remove(at);
        order.push(x);
        p1 += lay.a1[x];
        r += lay.a2[x] as i64;
    }
    let mut weights = vec![0usize; g.n()];
    let mut p = 0;
    for &x in &order {
        weights[x] = weight_of(p) as usize;
        p += lay.a1[x];
    }
    ie1_all &= !searched;
    debug_assert_eq!(p1, denom);
    ie1_all &= ie1(s, r);
    weights[x_last] = q.s;
    order.push(x_last);

    for v in 0..g.n() {
        match lay.side[v] {
            Side::A1 => weights[v] = 0,
            Side::A2 => weights[v] = q.s,
            Side::C => {}
        }
    }
    let weighting = VertexWeighting::new(q.s, weights)?;
    let side = &lay.side;
    let eprime = EdgeSubset::from_fn(g, |_, (u, v)| !(side[u] == Side::C && side[v] == Side::C));
    let guard = is_guarding_set(g, &weighting, &eprime)?;
    if let Some(v) = guard.first_violation {
        return Err(TesError::Certificate(format!(
            "E' is not guarding: count {} at i = {} outside [{}, {}]",
            v.count, v.i, v.lower, v.upper
        )));
    }
    Ok((weighting, eprime, order, ie1_all))
}

/// States explored by [`search_tail`] before giving up.
const SEARCH_BUDGET: usize = 2_000_000;

/// Exhaustive search for an order of `rest` continuing from prefix totals
/// `p1`, `r`. Only the (A1, A2)-degree type of each vertex matters, so the
/// search runs over multisets of types with failed states memoised.
fn search_tail(
    lay: &Layout,
    rest: &[Vertex],
    p1: usize,
    r: i64,
    weight_of: &dyn Fn(usize) -> i64,
    block_ok: &dyn Fn(i64, i64, i64, i64) -> bool,
) -> Option<Vec<Vertex>> {
    let mut types: Vec<(usize, usize)> = rest.iter().map(|&x| (lay.a1[x], lay.a2[x])).collect();
    types.sort_unstable();
    types.dedup();
    let mut left: Vec<u32> = vec![0; types.len()];
    for &x in rest {
        let t = types.binary_search(&(lay.a1[x], lay.a2[x])).unwrap();
        left[t] += 1;
    }

    struct Dfs<'a> {
        types: &'a [(usize, usize)],
        weight_of: &'a dyn Fn(usize) -> i64,
        block_ok: &'a dyn Fn(i64, i64, i64, i64) -> bool,
        dead: std::collections::HashSet<Vec<u32>>,
        path: Vec<usize>,
        visits: usize,
    }
    impl Dfs<'_> {
        fn go(&mut self, left: &mut Vec<u32>, p1: usize, r: i64) -> bool {
            if left.iter().all(|&c| c == 0) {
                return true;
            }
            if self.visits >= SEARCH_BUDGET || self.dead.contains(left) {
                return false;
            }
            self.visits += 1;
            let w = (self.weight_of)(p1);
            for t in 0..self.types.len() {
                if left[t] == 0 {
                    continue;
                }
                let (a1, a2) = self.types[t];
                let (pn, rn) = (p1 + a1, r + a2 as i64);
                if !(self.block_ok)(w, (self.weight_of)(pn), pn as i64, rn) {
                    continue;
                }
                left[t] -= 1;
                self.path.push(t);
                if self.go(left, pn, rn) {
                    return true;
                }
                self.path.pop();
                left[t] += 1;
            }
            self.dead.insert(left.clone());
            false
        }
    }

    let mut dfs = Dfs {
        types: &types,
        weight_of,
        block_ok,
        dead: Default::default(),
        path: Vec::new(),
        visits: 0,
    };
    if !dfs.go(&mut left, p1, r) {
        return None;
    }
    let mut pools: Vec<Vec<Vertex>> = vec![Vec::new(); types.len()];
    for &x in rest.iter().rev() {
        let t = types.binary_search(&(lay.a1[x], lay.a2[x])).unwrap();
        pools[t].push(x);
    }
    Some(dfs.path.iter().map(|&t| pools[t].pop().unwrap()).collect())
}
