//! Instance generators and fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use tes_core::graph::{generate, Graph, GraphKind};
use tes_core::lemma::{check_conditions, LemmaInstance};
use tes_core::repair::{repair, RepairOptions};
use tes_core::weighting::{EdgeSubset, VertexWeighting};

pub const LEMMA_FIXTURES: &str = "lemma_fixtures.jsonl";

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaFixture {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
}

impl LemmaFixture {
    pub fn graph(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().copied()).expect("fixture graph is valid")
    }

    pub fn instance(&self) -> LemmaInstance {
        let c = (0..self.n)
            .filter(|v| !self.a1.contains(v) && !self.a2.contains(v))
            .collect();
        LemmaInstance {
            a1: self.a1.clone(),
            a2: self.a2.clone(),
            c,
        }
    }
}

pub fn load_lemma_fixtures() -> Vec<LemmaFixture> {
    let text = std::fs::read_to_string(data_path(LEMMA_FIXTURES)).expect("fixture file present");
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("fixture line parses"))
        .collect()
}

/// Hubs `A1`, `A2` over a pool `C`; each `C` vertex joins each hub with a
/// per-instance probability, with a few hub-hub and `C`-`C` edges.
/// `None` when the edge count cannot be brought to `1 mod 3`.
pub fn random_lemma_candidate(rng: &mut ChaCha8Rng) -> Option<LemmaFixture> {
    let n1 = rng.gen_range(1..=3usize);
    let n2 = rng.gen_range(0..=3usize);
    let nc = rng.gen_range(6..=45usize);
    let n = n1 + n2 + nc;
    let p1 = rng.gen_range(0.2..0.95);
    let p2 = rng.gen_range(0.0..0.8);
    let p_hub = rng.gen_range(0.0..0.6);
    let mut edges = std::collections::BTreeSet::new();
    for h in 0..n1 + n2 {
        for x in n1 + n2..n {
            let p = if h < n1 { p1 } else { p2 };
            if rng.gen_bool(p) {
                edges.insert((h, x));
            }
        }
        for h2 in h + 1..n1 + n2 {
            if rng.gen_bool(p_hub) {
                edges.insert((h, h2));
            }
        }
    }
    let inner = rng.gen_range(0..=nc / 3);
    let pool: Vec<usize> = (n1 + n2..n).collect();
    let mut tries = 0;
    let target = |len: usize| len >= 4 && len % 3 == 1;
    let mut wanted = edges.len() + inner;
    while wanted % 3 != 1 {
        wanted += 1;
    }
    while edges.len() < wanted && tries < 1000 {
        tries += 1;
        let a = *pool.choose(rng).unwrap();
        let b = *pool.choose(rng).unwrap();
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    if !target(edges.len()) {
        return None;
    }
    Some(LemmaFixture {
        n,
        edges: edges.into_iter().collect(),
        a1: (0..n1).collect(),
        a2: (n1..n1 + n2).collect(),
    })
}

/// A candidate on which all five conditions hold.
pub fn random_lemma_fixture(rng: &mut ChaCha8Rng) -> Option<LemmaFixture> {
    let fx = random_lemma_candidate(rng)?;
    let rep = check_conditions(&fx.graph(), &fx.instance()).ok()?;
    rep.all_hold().then_some(fx)
}

pub fn lemma_fixtures_from_seed(seed: u64, count: usize) -> Vec<LemmaFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(fx) = random_lemma_fixture(&mut rng) {
            out.push(fx);
        }
    }
    out
}

/// Random graph with `m ≡ 1 (mod 3)` and a well-guarded weighting for it,
/// found by local search. Graphs whose degree bound rules out strength
/// `s + 1` are skipped.
pub fn random_well_guarded(rng: &mut ChaCha8Rng) -> (Graph, VertexWeighting) {
    loop {
        let n = rng.gen_range(6..=30usize);
        let max_m = n * (n - 1) / 2;
        let mut m = rng.gen_range(4..=max_m.min(3 * n));
        while m % 3 != 1 {
            m -= 1;
        }
        if m < 4 {
            continue;
        }
        let g = generate(GraphKind::RandomGnm { n, m }, rng.gen()).expect("m fits");
        let s = (m - 1) / 3;
        if g.max_degree() > 2 * s + 1 {
            continue;
        }
        let opts = RepairOptions {
            seed: rng.gen(),
            max_steps: 20_000,
            ..Default::default()
        };
        if let Ok(vw) = repair(&g, &EdgeSubset::all(&g), &vec![None; n], None, &opts) {
            return (g, vw);
        }
    }
}

/// Graph with hub 0 on the light side, hub 1 on the heavy side and the
/// rest inner edges; `n_leaves` leaves, `d0`/`ds` hub degrees, `inner`
/// leaf-leaf edges. The two hubs are also joined.
pub fn two_sided_instance(n_leaves: usize, d0: usize, ds: usize, inner: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves: Vec<usize> = (2..n_leaves + 2).collect();
    let mut edges = std::collections::BTreeSet::new();
    edges.insert((0, 1));
    for &x in leaves.choose_multiple(&mut rng, d0) {
        edges.insert((0, x));
    }
    for &x in leaves.choose_multiple(&mut rng, ds) {
        edges.insert((1, x));
    }
    let target = edges.len() + inner;
    while edges.len() < target {
        let a = *leaves.choose(&mut rng).unwrap();
        let b = *leaves.choose(&mut rng).unwrap();
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Graph::new(n_leaves + 2, edges).unwrap()
}

/// Exact mean and variance of the number of edges outside `E(B)` whose
/// index sum is at most `i`, each vertex carrying the index distribution
/// `dist[v]`. Edges sharing a vertex contribute their covariance.
pub fn threshold_count_moments(
    g: &Graph,
    in_b: &[bool],
    dist: &[Vec<f64>],
    i: usize,
) -> (f64, f64) {
    let cdf = |v: usize, t: i64| -> f64 {
        if t < 0 {
            0.0
        } else {
            dist[v].iter().take(t as usize + 1).sum()
        }
    };
    let kmax = dist[0].len();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| !(in_b[u] && in_b[v]))
        .collect();
    let prob = |u: usize, v: usize| -> f64 {
        (0..kmax)
            .map(|k| dist[u][k] * cdf(v, i as i64 - k as i64))
            .sum()
    };
    let mut mean = 0.0;
    let mut var = 0.0;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for &(u, v) in &edges {
        let p = prob(u, v);
        mean += p;
        var += p * (1.0 - p);
        incident[u].push(v);
        incident[v].push(u);
    }
    // Pairs of edges (v,x), (v,y): P(both) - P(v,x) P(v,y).
    for v in 0..g.n() {
        let nb = &incident[v];
        if nb.len() < 2 {
            continue;
        }
        let mut both = 0.0;
        for k in 0..kmax {
            if dist[v][k] == 0.0 {
                continue;
            }
            let c: Vec<f64> = nb.iter().map(|&x| cdf(x, i as i64 - k as i64)).collect();
            let sum: f64 = c.iter().sum();
            let sq: f64 = c.iter().map(|x| x * x).sum();
            both += dist[v][k] * (sum * sum - sq) / 2.0;
        }
        let ps: Vec<f64> = nb.iter().map(|&x| prob(v, x)).collect();
        let sum: f64 = ps.iter().sum();
        let sq: f64 = ps.iter().map(|x| x * x).sum();
        var += 2.0 * (both - (sum * sum - sq) / 2.0);
    }
    (mean, var)
}
