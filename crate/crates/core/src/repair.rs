//! Min-conflicts local search for vertex weightings with a guarding set.
//!
//! The objective is the total violation `Σ_i dist(c_i, [i+1, i+s+1-k])`
//! where `c_i = |{e ∈ E' : w(e) <= i}|` and `k = |E \ E'|`. Each step picks
//! a violated threshold, proposes moving an endpoint of an edge on the wrong
//! side of it across, and keeps the best of a few sampled proposals.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TesError};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::weighting::{is_guarding_set, strength_parameter, EdgeSubset, VertexWeighting};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairOptions {
    pub seed: u64,
    pub max_steps: usize,
    /// Proposals sampled per step.
    pub candidates: usize,
    /// Probability of accepting a worsening proposal.
    pub noise: f64,
}

impl Default for RepairOptions {
    fn default() -> Self {
        RepairOptions {
            seed: 0,
            max_steps: 200_000,
            candidates: 16,
            noise: 0.03,
        }
    }
}

struct State<'a> {
    g: &'a Graph,
    s: usize,
    lo_shift: i64,
    hi_shift: i64,
    w: Vec<usize>,
    /// `c[i]` for `0 <= i <= 2s`.
    c: Vec<i64>,
    eprime: Vec<EdgeId>,
    in_eprime: &'a EdgeSubset,
    free: Vec<bool>,
    total: i64,
}

impl<'a> State<'a> {
    fn viol(&self, i: usize, c: i64) -> i64 {
        let i = i as i64;
        let lo = i + self.lo_shift;
        let hi = i + self.hi_shift;
        (lo - c).max(0) + (c - hi).max(0)
    }

    fn edge_weight(&self, e: EdgeId) -> usize {
        let (u, v) = self.g.edge(e);
        self.w[u] + self.w[v]
    }

    fn rebuild(&mut self) {
        let mut hist = vec![0i64; 2 * self.s + 1];
        for &e in &self.eprime {
            hist[self.edge_weight(e)] += 1;
        }
        let mut acc = 0;
        for (i, h) in hist.iter().enumerate() {
            acc += h;
            self.c[i] = acc;
        }
        self.total = (0..=2 * self.s).map(|i| self.viol(i, self.c[i])).sum();
    }

    /// Change in `c` over thresholds if `v` moves to `b`, as `(from, to, ±1)` runs.
    fn runs(&self, v: Vertex, b: usize) -> Vec<(usize, usize, i64)> {
        let a = self.w[v];
        let mut out = Vec::new();
        if a == b {
            return out;
        }
        for &(u, e) in self.g.incident(v) {
            if !self.in_eprime.contains(e) {
                continue;
            }
            let x = a + self.w[u];
            let y = b + self.w[u];
            if y < x {
                out.push((y, x - 1, 1));
            } else {
                out.push((x, y - 1, -1));
            }
        }
        out
    }

    fn delta(&self, v: Vertex, b: usize) -> i64 {
        let runs = self.runs(v, b);
        if runs.is_empty() {
            return 0;
        }
        let lo = runs.iter().map(|r| r.0).min().unwrap();
        let hi = runs.iter().map(|r| r.1).max().unwrap();
        let mut diff = vec![0i64; hi - lo + 2];
        for &(f, t, d) in &runs {
            diff[f - lo] += d;
            diff[t - lo + 1] -= d;
        }
        let mut run = 0;
        let mut change = 0;
        for i in lo..=hi {
            run += diff[i - lo];
            if run != 0 {
                change += self.viol(i, self.c[i] + run) - self.viol(i, self.c[i]);
            }
        }
        change
    }

    fn apply(&mut self, v: Vertex, b: usize) {
        let runs = self.runs(v, b);
        for (f, t, d) in runs {
            for i in f..=t {
                let before = self.viol(i, self.c[i]);
                self.c[i] += d;
                self.total += self.viol(i, self.c[i]) - before;
            }
        }
        self.w[v] = b;
    }

    fn violated(&self) -> Vec<usize> {
        (0..=2 * self.s)
            .filter(|&i| self.viol(i, self.c[i]) > 0)
            .collect()
    }
}

/// Searches for a weighting under which `eprime` is a guarding set.
///
/// `fixed[v] = Some(x)` pins `w(v) = x`; `init` seeds the free vertices
/// (uniformly random otherwise).
pub fn repair(
    g: &Graph,
    eprime: &EdgeSubset,
    fixed: &[Option<usize>],
    init: Option<&[usize]>,
    opts: &RepairOptions,
) -> Result<VertexWeighting> {
    let s = strength_parameter(g)?;
    if fixed.len() != g.n() || init.is_some_and(|w| w.len() != g.n()) {
        return Err(TesError::InvalidWeighting(
            "length does not match the graph".into(),
        ));
    }
    if let Some(x) = fixed.iter().flatten().find(|&&x| x > s) {
        return Err(TesError::InvalidWeighting(format!(
            "fixed value {x} exceeds s = {s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let w: Vec<usize> = (0..g.n())
        .map(|v| match (fixed[v], init) {
            (Some(x), _) => x,
            (None, Some(w)) => w[v].min(s),
            (None, None) => rng.gen_range(0..=s),
        })
        .collect();
    let k = (g.m() - eprime.len()) as i64;
    let mut st = State {
        g,
        s,
        lo_shift: 1,
        hi_shift: s as i64 + 1 - k,
        w,
        c: vec![0; 2 * s + 1],
        eprime: eprime.ids().collect(),
        in_eprime: eprime,
        free: fixed.iter().map(Option::is_none).collect(),
        total: 0,
    };
    st.rebuild();
    if st.eprime.is_empty() {
        return finish(g, &st, eprime);
    }

    let mut best = (st.total, st.w.clone());
    for _ in 0..opts.max_steps {
        if st.total == 0 {
            break;
        }
        let bad = st.violated();
        let i = *bad
            .choose(&mut rng)
            .expect("total > 0 implies a violated threshold");
        let need_lower = st.c[i] < i as i64 + st.lo_shift;

        let mut proposals: Vec<(Vertex, usize)> = Vec::with_capacity(opts.candidates);
        for _ in 0..opts.candidates * 4 {
            if proposals.len() >= opts.candidates {
                break;
            }
            let e = *st.eprime.choose(&mut rng).unwrap();
            let we = st.edge_weight(e);
            if need_lower == (we <= i) {
                continue;
            }
            let (u, v) = g.edge(e);
            let ends: Vec<Vertex> = [u, v].into_iter().filter(|&x| st.free[x]).collect();
            let Some(&x) = ends.choose(&mut rng) else {
                continue;
            };
            let jitter = rng.gen_range(0..=2usize);
            let b = if need_lower {
                (st.w[x] + i).saturating_sub(we + jitter)
            } else {
                (st.w[x] + i + 1 + jitter - we).min(s)
            };
            if b != st.w[x] {
                proposals.push((x, b));
            }
        }
        if proposals.is_empty() {
            // Nothing movable near this threshold; perturb a random free vertex.
            let free: Vec<Vertex> = (0..g.n()).filter(|&v| st.free[v]).collect();
            let Some(&v) = free.choose(&mut rng) else {
                break;
            };
            let b = rng.gen_range(0..=s);
            st.apply(v, b);
            continue;
        }
        let (v, b, d) = proposals
            .iter()
            .map(|&(v, b)| (v, b, st.delta(v, b)))
            .min_by_key(|&(_, _, d)| d)
            .unwrap();
        if d <= 0 || rng.gen_bool(opts.noise) {
            st.apply(v, b);
        }
        if st.total < best.0 {
            best = (st.total, st.w.clone());
        }
    }
    if st.total > 0 {
        return Err(TesError::ClaimFailed {
            claim: "local-search completion",
            detail: format!(
                "best total violation {} after {} steps",
                best.0, opts.max_steps
            ),
        });
    }
    finish(g, &st, eprime)
}

fn finish(g: &Graph, st: &State, eprime: &EdgeSubset) -> Result<VertexWeighting> {
    let vw = VertexWeighting::new(st.s, st.w.clone())?;
    let report = is_guarding_set(g, &vw, eprime)?;
    match report.first_violation {
        None => Ok(vw),
        Some(v) => Err(TesError::ClaimFailed {
            claim: "local-search completion",
            detail: format!("violation at i = {}", v.i),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::weighting::is_well_guarded;

    #[test]
    fn repairs_random_trees() {
        for seed in 0..10 {
            let g = generate(GraphKind::RandomTree { n: 101 }, seed).unwrap();
            let opts = RepairOptions {
                seed,
                ..Default::default()
            };
            let vw = repair(&g, &EdgeSubset::all(&g), &vec![None; g.n()], None, &opts).unwrap();
            assert!(is_well_guarded(&g, &vw).unwrap().ok);
        }
    }

    #[test]
    fn respects_fixed_values() {
        let g = generate(GraphKind::RandomGnm { n: 30, m: 61 }, 3).unwrap();
        let mut fixed = vec![None; g.n()];
        fixed[0] = Some(0);
        fixed[1] = Some(20);
        let vw = repair(
            &g,
            &EdgeSubset::all(&g),
            &fixed,
            None,
            &RepairOptions::default(),
        )
        .unwrap();
        assert_eq!(vw.get(0), 0);
        assert_eq!(vw.get(1), 20);
        assert!(is_well_guarded(&g, &vw).unwrap().ok);
    }

    #[test]
    fn impossible_instance_reports_failure() {
        // K1,4 has s = 1: centre weight 0 puts all four edges at weight <= 1,
        // centre weight 1 leaves threshold 0 empty.
        let g = Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let opts = RepairOptions {
            max_steps: 500,
            ..Default::default()
        };
        let err = repair(&g, &EdgeSubset::all(&g), &vec![None; 5], None, &opts).unwrap_err();
        assert!(matches!(err, TesError::ClaimFailed { .. }));
    }
}
