//! Weight distribution for the random construction, exact expectations of
//! the threshold counts, the tabulated slacks and δ constants, the critical
//! curves of the expectation, and the Las Vegas sampler.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TesError};
use crate::graph::{Graph, Vertex};
use crate::pipeline::{dispatch_case, CaseId, LargeGraphContext};
use crate::weighting::{is_guarding_set, strength_parameter, EdgeSubset, VertexWeighting};

/// Number of weight steps; vertex weights are `s·k/20` for `k = 0..=20`.
pub const STEPS: usize = 20;
/// Largest `e0`/`eS` for which every probability is nonnegative.
pub const MAX_SIDE_FRACTION: f64 = 19.0 / 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightDistribution {
    pub e0: f64,
    pub es: f64,
    pub beta: f64,
    pub p: [f64; STEPS + 1],
}

impl WeightDistribution {
    /// Formula values with no range check; used for tabulated points that
    /// lie outside the probabilistic region.
    pub fn unchecked(e0: f64, es: f64) -> Self {
        let beta = 57.0 - 30.0 * (e0 + es);
        let mut p = [1.0 / beta; STEPS + 1];
        p[0] = (19.0 - 30.0 * e0) / beta;
        p[STEPS] = (19.0 - 30.0 * es) / beta;
        WeightDistribution { e0, es, beta, p }
    }
}

pub fn weight_distribution(e0: f64, es: f64) -> Result<WeightDistribution> {
    let ok = |x: f64| x.is_finite() && x >= 0.0 && 30.0 * x <= 19.0;
    if !ok(e0) || !ok(es) {
        return Err(TesError::OutOfRange(format!(
            "(e0, eS) = ({e0}, {es}) outside [0, 19/30]^2"
        )));
    }
    Ok(WeightDistribution::unchecked(e0, es))
}

/// `P(k1 + k2 = i)` for two independent indices, by convolution.
pub fn edge_pmf(d: &WeightDistribution, i: usize) -> f64 {
    if i > 2 * STEPS {
        return 0.0;
    }
    let lo = i.saturating_sub(STEPS);
    (lo..=i.min(STEPS)).map(|k| d.p[k] * d.p[i - k]).sum()
}

/// `P0²` at `i = 0`, `2·P0·Pi + (i−1)·Pi²` for `0 < i < 20`.
pub fn edge_pmf_closed_form(d: &WeightDistribution, i: usize) -> Result<f64> {
    match i {
        0 => Ok(d.p[0] * d.p[0]),
        1..=19 => Ok(2.0 * d.p[0] * d.p[i] + (i as f64 - 1.0) * d.p[i] * d.p[i]),
        _ => Err(TesError::OutOfRange(format!("index {i} not in 0..=19"))),
    }
}

/// Closed form of `E(X_i)/m'` without range checks.
pub fn expected_fraction_unchecked(e0: f64, es: f64, i: usize) -> f64 {
    let d = WeightDistribution::unchecked(e0, es);
    let (p0, p1) = (d.p[0], d.p[1]);
    let i = i as f64;
    e0 * (p0 + i * p1)
        + (1.0 - e0 - es) * (p0 * p0 + 2.0 * i * p0 * p1 + (i * i - i) / 2.0 * p1 * p1)
}

/// Expected fraction of `E'` whose index sum is at most `i`, for `i ≤ 19`.
pub fn expected_fraction(e0: f64, es: f64, i: usize) -> Result<f64> {
    weight_distribution(e0, es)?;
    if i >= STEPS {
        return Err(TesError::OutOfRange(format!("index {i} not in 0..=19")));
    }
    Ok(expected_fraction_unchecked(e0, es, i))
}

/// Same quantity over the full threshold range `0..=40`, by summation:
/// `B0` edges carry index `k`, `BS` edges `20 + k`, inner edges `k1 + k2`.
pub fn threshold_fraction(d: &WeightDistribution, j: usize) -> f64 {
    let inner = 1.0 - d.e0 - d.es;
    (0..=j.min(2 * STEPS))
        .map(|t| {
            let mut f = inner * edge_pmf(d, t);
            if t <= STEPS {
                f += d.e0 * d.p[t];
            }
            if t >= STEPS {
                f += d.es * d.p[t - STEPS];
            }
            f
        })
        .sum()
}

pub fn e_star(i: usize) -> f64 {
    let i = i as f64;
    (-361.0 + 18.0 * i + i * i) / (20.0 * (152.0 - 36.0 * i + i * i))
}

pub fn e_bar(i: usize) -> f64 {
    (361.0 + 19.0 * i as f64) / 1350.0
}

pub fn lower_slack(e0: f64, es: f64, i: usize) -> f64 {
    expected_fraction_unchecked(e0, es, i) - (i as f64 + 1.0) / (60.0 * 0.99)
}

pub fn upper_slack(e0: f64, es: f64, i: usize) -> f64 {
    (i as f64 + 20.0) / 60.0 - expected_fraction_unchecked(e0, es, i)
}

pub const SLACK_COLUMNS: [&str; 6] = [
    "(0,0.52)",
    "(0,0)",
    "(e*,e*)",
    "(0.43,0.43)",
    "(0.52,0)",
    "(ebar,0.86-ebar)",
];

/// Points `(e0, eS)` of the six columns at row `i`.
pub fn slack_points(i: usize) -> [(f64, f64); 6] {
    let (es, eb) = (e_star(i), e_bar(i));
    [
        (0.0, 0.52),
        (0.0, 0.0),
        (es, es),
        (0.43, 0.43),
        (0.52, 0.0),
        (eb, 0.86 - eb),
    ]
}

/// Reference slack values, rows `i = 0..20`, columns as [`SLACK_COLUMNS`].
pub const PRINTED_SLACKS: [[f64; 6]; 20] = [
    [
        0.0842642, 0.0942761, 0.0945847, 0.0725870, 0.0291077, 0.221914,
    ],
    [
        0.0780712, 0.0891370, 0.0894879, 0.0712887, 0.0267374, 0.226687,
    ],
    [
        0.0721583, 0.0843057, 0.0847193, 0.0701341, 0.0246472, 0.230987,
    ],
    [
        0.0665254, 0.0797821, 0.0803057, 0.0691234, 0.0228371, 0.234814,
    ],
    [
        0.0611725, 0.0755664, 0.0763530, 0.0682565, 0.0213070, 0.238167,
    ],
    [
        0.0560997, 0.0716584, 0.0741222, 0.0675334, 0.0200569, 0.241046,
    ],
    [
        0.0513070, 0.0680582, 0.0669080, 0.0669542, 0.0190869, 0.243452,
    ],
    [
        0.0467943, 0.0647658, 0.0644259, 0.0665187, 0.0183969, 0.245385,
    ],
    [
        0.0425617, 0.0617812, 0.0616330, 0.0662271, 0.0179871, 0.246844,
    ],
    [
        0.0386092, 0.0591044, 0.0590379, 0.0660793, 0.0178572, 0.247830,
    ],
    [
        0.0349366, 0.0567354, 0.0567098, 0.0660753, 0.0180074, 0.248342,
    ],
    [
        0.0315442, 0.0546742, 0.0546683, 0.0662151, 0.0184377, 0.248381,
    ],
    [
        0.0284318, 0.0529207, 0.0529207, 0.0664988, 0.0191480, 0.247946,
    ],
    [
        0.0255994, 0.0514750, 0.0514703, 0.0669263, 0.0201384, 0.247038,
    ],
    [
        0.0230471, 0.0503372, 0.0503181, 0.0674976, 0.0214088, 0.245657,
    ],
    [
        0.0207749, 0.0495071, 0.0494643, 0.0682127, 0.0229593, 0.243802,
    ],
    [
        0.0187827, 0.0489848, 0.0489084, 0.0690716, 0.0247898, 0.241473,
    ],
    [
        0.0170705, 0.0487703, 0.0486493, 0.0700744, 0.0269004, 0.238671,
    ],
    [
        0.0156384, 0.0488635, 0.0486852, 0.0712209, 0.0292910, 0.235396,
    ],
    [
        0.0144864, 0.0492646, 0.0490139, 0.0725113, 0.0319617, 0.231647,
    ],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackTable {
    /// `rows[i][c]` is the recomputed value at row `i`, column `c`.
    pub rows: Vec<[f64; 6]>,
}

impl SlackTable {
    pub fn max_abs_deviation(&self) -> f64 {
        self.rows
            .iter()
            .zip(PRINTED_SLACKS.iter())
            .flat_map(|(r, p)| r.iter().zip(p).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

pub fn slack_table() -> SlackTable {
    let rows = (0..STEPS)
        .map(|i| {
            let pts = slack_points(i);
            let mut row = [0.0; 6];
            for (c, &(e0, es)) in pts.iter().enumerate() {
                row[c] = if c == 5 {
                    upper_slack(e0, es, i)
                } else {
                    lower_slack(e0, es, i)
                };
            }
            row
        })
        .collect();
    SlackTable { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsMode {
    Main,
    SmallDegree,
}

impl EpsMode {
    pub fn epsilon(self) -> f64 {
        match self {
            EpsMode::Main => 2.7e-5,
            EpsMode::SmallDegree => 2.3e-4,
        }
    }
}

const DELTA_MAIN: [u16; 20] = [
    29, 26, 24, 22, 21, 20, 19, 18, 17, 17, 18, 18, 19, 20, 21, 22, 24, 26, 29, 31,
];
const DELTA_HAT_MAIN: [u16; 20] = [
    72, 71, 70, 66, 61, 56, 51, 46, 42, 38, 34, 31, 28, 25, 23, 20, 18, 17, 15, 14,
];
const DELTA_SMALL: [u16; 20] = [
    94, 89, 84, 80, 76, 72, 69, 66, 63, 60, 58, 56, 55, 53, 52, 52, 51, 51, 52, 52,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaTables {
    pub mode: EpsMode,
    pub delta: [f64; 20],
    pub delta_hat: [f64; 20],
}

pub fn delta_tables(mode: EpsMode) -> DeltaTables {
    let conv = |t: &[u16; 20]| t.map(|x| f64::from(x) / 1000.0);
    match mode {
        EpsMode::Main => DeltaTables {
            mode,
            delta: conv(&DELTA_MAIN),
            delta_hat: conv(&DELTA_HAT_MAIN),
        },
        EpsMode::SmallDegree => DeltaTables {
            mode,
            delta: conv(&DELTA_SMALL),
            delta_hat: conv(&DELTA_SMALL),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub i: usize,
    pub delta: f64,
    pub delta_slack: f64,
    pub delta_hat: f64,
    pub delta_hat_slack: f64,
    /// Both constants are at most their slack.
    pub valid: bool,
    /// Both constants equal their slack floored to three decimals.
    pub floor_matches: bool,
}

/// Minimum slacks the constants at row `i` must stay under.
///
/// In the main regime `δ` covers `e0 ≥ eS` (extremes `(0.52,0)`, `(0,0)`,
/// `(e*,e*)`, `(0.43,0.43)`) and `δ̂` covers `e0 ≤ eS` (with `(0,0.52)` in
/// place of `(0.52,0)`). Without large vertices only `e0 = eS = 0` occurs
/// and the `1/0.99` margin is not needed.
pub fn required_slacks(mode: EpsMode, i: usize) -> (f64, f64) {
    match mode {
        EpsMode::Main => {
            let pts = slack_points(i);
            let slack = |c: usize| lower_slack(pts[c].0, pts[c].1, i);
            let shared = slack(1).min(slack(2)).min(slack(3));
            (shared.min(slack(4)), shared.min(slack(0)))
        }
        EpsMode::SmallDegree => {
            let v = expected_fraction_unchecked(0.0, 0.0, i) - (i as f64 + 1.0) / 60.0;
            (v, v)
        }
    }
}

pub fn validate_delta_tables(mode: EpsMode) -> Vec<DeltaCheck> {
    let t = delta_tables(mode);
    let floor3 = |x: f64| (x * 1000.0 + 1e-9).floor() / 1000.0;
    (0..STEPS)
        .map(|i| {
            let (ds, hs) = required_slacks(mode, i);
            DeltaCheck {
                i,
                delta: t.delta[i],
                delta_slack: ds,
                delta_hat: t.delta_hat[i],
                delta_hat_slack: hs,
                valid: t.delta[i] <= ds && t.delta_hat[i] <= hs,
                floor_matches: (floor3(ds) - t.delta[i]).abs() < 1e-12
                    && (floor3(hs) - t.delta_hat[i]).abs() < 1e-12,
            }
        })
        .collect()
}

/// `40·exp(−0.0099/ε) + Σ_i (exp(−0.99δ_i²/4ε) + exp(−0.99δ̂_i²/4ε))`.
pub fn azuma_failure_bound(eps: f64, tables: &DeltaTables) -> f64 {
    let tail = |d: f64| (-0.99 * d * d / (4.0 * eps)).exp();
    40.0 * (-0.0099 / eps).exp()
        + tables
            .delta
            .iter()
            .zip(&tables.delta_hat)
            .map(|(&d, &h)| tail(d) + tail(h))
            .sum::<f64>()
}

/// Printed form of the first polynomial, `1444 + 39i + i²`.
pub fn printed_p0(i: usize) -> f64 {
    let i = i as f64;
    1444.0 + 39.0 * i + i * i
}

/// `p_j(i)` for `j = 0..=10`; `p_0` is `1444 + 39i − i²`, the form that
/// makes the first curve a stationary line of the expectation.
pub fn poly(j: usize, i: usize) -> f64 {
    let i = i as f64;
    let (i2, i3, i4) = (i * i, i * i * i, i * i * i * i);
    match j {
        0 => 1444.0 + 39.0 * i - i2,
        1 => 10.0 * (-1558.0 - 45.0 * i + i2),
        2 => 600.0 * (19.0 + i),
        3 => 10.0 * (2660.0 - 147.0 * i + i2),
        4 => 600.0 * (-35.0 + i),
        5 => 10.0 * (1216.0 + 27.0 * i - i2),
        6 => 600.0 * (19.0 + i),
        7 => 100.0 * (2085136.0 + 111336.0 * i - 2663.0 * i2 - 78.0 * i3 + i4),
        8 => 12000.0 * (-27436.0 - 2077.0 * i + 88.0 * i2 + i3),
        9 => 360000.0 * (361.0 + 38.0 * i + i2),
        10 => 1200.0 * (35.0 - i),
        _ => panic!("polynomial index {j} out of range"),
    }
}

pub fn polys(i: usize) -> [f64; 11] {
    std::array::from_fn(|j| poly(j, i))
}

/// `e0` on which `∂E(X_i)/∂e0` vanishes.
pub fn f1(i: usize, es: f64) -> Result<f64> {
    let p = polys(i);
    let den = p[3] + p[4] * es;
    if den == 0.0 {
        return Err(TesError::OutOfRange(format!(
            "f1 pole at i = {i}, eS = {es}"
        )));
    }
    Ok(-(p[0] + p[1] * es + p[2] * es * es) / den)
}

/// `e0` on which `∂E(X_i)/∂eS` vanishes.
pub fn f2(i: usize, es: f64) -> Result<f64> {
    let p = polys(i);
    let rad = p[7] + p[8] * es + p[9] * es * es;
    if rad < 0.0 {
        return Err(TesError::OutOfRange(format!(
            "f2 radicand {rad} negative at i = {i}, eS = {es}"
        )));
    }
    Ok((p[5] + p[6] * es - rad.sqrt()) / p[10])
}

/// Pole of `f1` in `eS`, if any lies in `[0, 1]`.
pub fn f1_pole(i: usize) -> Option<f64> {
    let root = -poly(3, i) / poly(4, i);
    (0.0..=1.0).contains(&root).then_some(root)
}

/// Vertex weight for index `k`: `s·k/20` rounded to nearest, ties up.
pub fn index_weight(s: usize, k: usize) -> usize {
    (2 * s * k + STEPS) / (2 * STEPS)
}

/// Draws an index for every vertex outside `B0 ∪ BS`; `B0` gets 0, `BS` 20.
pub fn sample_indices(
    n: usize,
    b0: &[Vertex],
    bs: &[Vertex],
    d: &WeightDistribution,
    rng: &mut ChaCha8Rng,
) -> Vec<u8> {
    let pick = WeightedIndex::new(d.p).expect("probabilities are nonnegative with positive sum");
    let mut idx: Vec<u8> = (0..n).map(|_| pick.sample(rng) as u8).collect();
    for &v in b0 {
        idx[v] = 0;
    }
    for &v in bs {
        idx[v] = STEPS as u8;
    }
    idx
}

pub fn attempt_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case4Sample {
    pub weighting: VertexWeighting,
    pub eprime: EdgeSubset,
    /// 1-based index of the accepted attempt.
    pub attempts: usize,
}

/// Las Vegas sampler: returns the first attempt whose `E' = E ∖ E(B)` is a
/// guarding set. Attempts use independent streams of the seed.
pub fn sample_case4(
    g: &Graph,
    ctx: &LargeGraphContext,
    seed: u64,
    max_resamples: usize,
) -> Result<Case4Sample> {
    let s = strength_parameter(g)?;
    let case = dispatch_case(ctx);
    if case != CaseId::Case4 {
        return Err(TesError::Precondition(format!(
            "context dispatches to {case:?}"
        )));
    }
    let (b0, bs, e0, es) = ctx.raw_sides();
    if e0.max(es) > 0.52 {
        return Err(TesError::Precondition(format!(
            "max(e0, eS) = {} exceeds 0.52",
            e0.max(es)
        )));
    }
    let d = weight_distribution(e0, es)?;
    let in_b = ctx.membership(g.n());
    let eprime = EdgeSubset::from_fn(g, |_, (u, v)| !(in_b[u] && in_b[v]));
    let mut best: Option<usize> = None;
    for attempt in 0..max_resamples {
        let mut rng = attempt_rng(seed, attempt);
        let idx = sample_indices(g.n(), b0, bs, &d, &mut rng);
        let values = idx
            .iter()
            .map(|&k| index_weight(s, usize::from(k)))
            .collect();
        let vw = VertexWeighting::new(s, values)?;
        let report = is_guarding_set(g, &vw, &eprime)?;
        match report.first_violation {
            None => {
                return Ok(Case4Sample {
                    weighting: vw,
                    eprime,
                    attempts: attempt + 1,
                })
            }
            Some(v) => best = Some(best.map_or(v.i, |b| b.max(v.i))),
        }
    }
    Err(TesError::ResamplesExhausted {
        attempts: max_resamples,
        best_violation_i: best,
    })
}
