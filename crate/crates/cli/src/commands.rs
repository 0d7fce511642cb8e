use std::path::Path;

use serde_json::{json, Value};
use tes_core::exact::{conjectured_tes, lower_bound, run_corpus, tes_exact};
use tes_core::graph::{generate, parse_edge_list, Graph, GraphKind};
use tes_core::lemma::{check_conditions, construct, LemmaInstance};
use tes_core::pipeline::{construct_auto, AutoOptions, EpsChoice, Method};
use tes_core::prob::{
    azuma_failure_bound, delta_tables, e_bar, e_star, polys, slack_table, validate_delta_tables,
    EpsMode, PRINTED_SLACKS, SLACK_COLUMNS, STEPS,
};
use tes_core::weighting::{is_well_guarded, verify_total_irregular, WeightingFile};
use tes_core::TesError;

use crate::output::{sig10, write_csv, write_json};
use crate::{Command, EpsModeArg, KindArg, MethodArg, ModeArg, Which};

/// Largest deviation tolerated between the recomputed and reference slack tables.
const SLACK_TOLERANCE: f64 = 1e-6;

pub struct Summary {
    pub code: u8,
    pub body: Value,
}

impl Summary {
    fn ok(body: Value) -> Self {
        Summary { code: 0, body }
    }

    fn with_code(code: u8, body: Value) -> Self {
        Summary { code, body }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        CliError {
            code: 2,
            kind: "input",
            message,
        }
    }
}

impl From<TesError> for CliError {
    fn from(e: TesError) -> Self {
        use TesError::*;
        let (code, kind) = match &e {
            NotWellGuarded(_) | NotIrregular(..) | ConditionFailed(_) | Certificate(_) => {
                (1, "verification")
            }
            BudgetExhausted { .. }
            | EnumerationCap { .. }
            | OrderingDeadEnd { .. }
            | ClaimFailed { .. }
            | Precondition(_)
            | ResamplesExhausted { .. }
            | AllRoutesFailed(_)
            | Unsupported(_) => (3, "indeterminate"),
            _ => (2, "input"),
        };
        CliError {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Summary, CliError>;

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Bound { graph } => bound(&read_graph(&graph)?),
        Command::Exact { graph, budget, out } => {
            exact(&read_graph(&graph)?, budget, out.as_deref())
        }
        Command::Verify { graph, weighting } => verify(&read_graph(&graph)?, &weighting),
        Command::Construct {
            graph,
            method,
            seed,
            eps_mode,
            eps,
            max_resamples,
            exact_threshold,
            budget,
            out,
            report,
        } => {
            let opts = AutoOptions {
                method: match method {
                    MethodArg::Auto => Method::Auto,
                    MethodArg::Case4 => Method::Case4,
                    MethodArg::Exact => Method::Exact,
                },
                seed,
                eps: match (eps, eps_mode) {
                    (Some(x), _) => EpsChoice::Value(x),
                    (None, EpsModeArg::Auto) => EpsChoice::Auto,
                    (None, EpsModeArg::Main) => EpsChoice::Mode(EpsMode::Main),
                    (None, EpsModeArg::SmallDegree) => EpsChoice::Mode(EpsMode::SmallDegree),
                },
                exact_threshold,
                exact_budget: budget,
                max_resamples,
                ..AutoOptions::default()
            };
            construct_cmd(
                &read_graph(&graph)?,
                &opts,
                out.as_deref(),
                report.as_deref(),
            )
        }
        Command::Lemma {
            graph,
            partition,
            out,
        } => lemma(&read_graph(&graph)?, &partition, out.as_deref()),
        Command::Corpus {
            max_vertices,
            budget,
            out,
        } => corpus(max_vertices, budget, out.as_deref()),
        Command::Appendix {
            which,
            eps_mode,
            out,
        } => appendix(which, mode(eps_mode), out.as_deref()),
        Command::Generate {
            kind,
            n,
            m,
            cap,
            seed,
            out,
        } => {
            let kind = match kind {
                KindArg::Complete => GraphKind::Complete { n },
                KindArg::Star => GraphKind::Star { leaves: n },
                KindArg::Path => GraphKind::Path { n },
                KindArg::Gnm => GraphKind::RandomGnm { n, m },
                KindArg::CappedDegree => GraphKind::RandomCappedDegree { n, m, cap },
                KindArg::Tree => GraphKind::RandomTree { n },
            };
            let g = generate(kind, seed)?;
            crate::output::write_file(&out, &g.to_edge_list())?;
            Ok(Summary::ok(json!({
                "status": "ok",
                "n": g.n(),
                "m": g.m(),
                "max_degree": g.max_degree(),
                "out": out,
            })))
        }
    }
}

fn mode(m: ModeArg) -> EpsMode {
    match m {
        ModeArg::Main => EpsMode::Main,
        ModeArg::SmallDegree => EpsMode::SmallDegree,
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    parse_edge_list(&read_text(path)?).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn bound(g: &Graph) -> Outcome {
    Ok(Summary::ok(json!({
        "lower_bound": lower_bound(g)?,
        "conjectured": conjectured_tes(g)?,
        "n": g.n(),
        "m": g.m(),
        "max_degree": g.max_degree(),
    })))
}

fn exact(g: &Graph, budget: u64, out: Option<&Path>) -> Outcome {
    let res = tes_exact(g, budget)?;
    if let Some(path) = out {
        write_json(path, &WeightingFile::from_total(g, &res.certificate))?;
    }
    Ok(Summary::ok(json!({
        "status": "ok",
        "tes": res.tes,
        "lower_bound": lower_bound(g)?,
        "conjectured": conjectured_tes(g)?,
        "proof_of_lower": res.proof_of_lower,
        "nodes": res.nodes,
        "certificate": out,
    })))
}

fn verify(g: &Graph, path: &Path) -> Outcome {
    let file: WeightingFile = read_json(path)?;
    if file.t.is_some() {
        let tw = file.to_total(g)?;
        let report = verify_total_irregular(g, &tw)?;
        let body = json!({
            "kind": "total",
            "ok": report.ok,
            "t": tw.t(),
            "witness": report.witness,
        });
        Ok(Summary::with_code(if report.ok { 0 } else { 1 }, body))
    } else if file.s.is_some() {
        let vw = file.to_vertex(g)?;
        let report = is_well_guarded(g, &vw)?;
        let body = json!({
            "kind": "vertex",
            "ok": report.ok,
            "s": vw.s(),
            "first_violation": report.first_violation,
        });
        Ok(Summary::with_code(if report.ok { 0 } else { 1 }, body))
    } else {
        Err(CliError::input(format!(
            "{}: weighting file needs a \"t\" or an \"s\" field",
            path.display()
        )))
    }
}

fn construct_cmd(
    g: &Graph,
    opts: &AutoOptions,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Outcome {
    let outcome = construct_auto(g, opts)?;
    let check = verify_total_irregular(g, &outcome.weighting)?;
    if !check.ok {
        return Err(
            TesError::Certificate(format!("edges {:?} share a total sum", check.witness)).into(),
        );
    }
    if let Some(path) = out {
        write_json(path, &WeightingFile::from_total(g, &outcome.weighting))?;
    }
    if let Some(path) = report {
        write_json(path, &outcome.report)?;
    }
    let r = &outcome.report;
    Ok(Summary::ok(json!({
        "status": "ok",
        "route": r.route,
        "case": r.case,
        "strength": r.strength,
        "conjectured": r.conjectured,
        "verified": true,
        "m": g.m(),
        "attempts": r.attempts,
        "weighting": out,
    })))
}

fn lemma(g: &Graph, partition: &Path, out: Option<&Path>) -> Outcome {
    let inst: LemmaInstance = read_json(partition)?;
    let report = check_conditions(g, &inst)?;
    if let Some(k) = report.first_failure() {
        return Ok(Summary::with_code(
            1,
            json!({ "status": "condition_failed", "condition": k, "report": report }),
        ));
    }
    let built = construct(g, &inst)?;
    if let Some(path) = out {
        write_json(path, &WeightingFile::from_vertex(g, &built.weighting))?;
    }
    Ok(Summary::ok(json!({
        "status": "ok",
        "report": report,
        "order": built.order,
        "guarding_edges": built.eprime.len(),
        "ordering_inequality_held": built.ordering_inequality_held,
        "weighting": out,
    })))
}

const CORPUS_HEADER: [&str; 8] = [
    "graph_id",
    "n",
    "m",
    "max_degree",
    "lower_bound",
    "conjectured",
    "tes",
    "matches",
];

fn corpus(max_vertices: usize, budget: u64, out: Option<&Path>) -> Outcome {
    if max_vertices > 7 {
        return Err(CliError::input(format!(
            "--max-vertices {max_vertices} is too large for exhaustive enumeration (at most 7)"
        )));
    }
    let rows = run_corpus(max_vertices, budget)?;
    if let Some(path) = out {
        let records: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.graph_id.clone(),
                    r.n.to_string(),
                    r.m.to_string(),
                    r.max_degree.to_string(),
                    r.lower_bound.to_string(),
                    r.conjectured.to_string(),
                    r.tes.to_string(),
                    r.matches.to_string(),
                ]
            })
            .collect();
        write_csv(path, &CORPUS_HEADER, &records)?;
    }
    let mismatches: Vec<&str> = rows
        .iter()
        .filter(|r| !r.matches)
        .map(|r| r.graph_id.as_str())
        .collect();
    let above_bound = rows.iter().filter(|r| r.tes > r.lower_bound).count();
    let body = json!({
        "graphs": rows.len(),
        "mismatches": mismatches,
        "above_lower_bound": above_bound,
        "out": out,
    });
    Ok(Summary::with_code(
        if mismatches.is_empty() { 0 } else { 1 },
        body,
    ))
}

fn appendix(which: Which, mode: EpsMode, out: Option<&Path>) -> Outcome {
    match which {
        Which::A => {
            let table = slack_table();
            let dev = table.max_abs_deviation();
            if let Some(path) = out {
                let mut header = vec!["i".to_string(), "e_star".into(), "e_bar".into()];
                header.extend(SLACK_COLUMNS.iter().map(|c| c.to_string()));
                header.extend(SLACK_COLUMNS.iter().map(|c| format!("diff {c}")));
                let rows: Vec<Vec<String>> = (0..STEPS)
                    .map(|i| {
                        let mut row = vec![i.to_string(), sig10(e_star(i)), sig10(e_bar(i))];
                        row.extend(table.rows[i].iter().map(|&x| sig10(x)));
                        row.extend(
                            table.rows[i]
                                .iter()
                                .zip(&PRINTED_SLACKS[i])
                                .map(|(a, b)| sig10(a - b)),
                        );
                        row
                    })
                    .collect();
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                write_csv(path, &header, &rows)?;
            }
            let ok = dev <= SLACK_TOLERANCE;
            Ok(Summary::with_code(
                if ok { 0 } else { 1 },
                json!({
                    "table": "slack",
                    "entries": STEPS * SLACK_COLUMNS.len(),
                    "max_abs_deviation": dev,
                    "tolerance": SLACK_TOLERANCE,
                    "ok": ok,
                    "out": out,
                }),
            ))
        }
        Which::B => {
            if let Some(path) = out {
                let names: Vec<String> = std::iter::once("i".to_string())
                    .chain((0..=10).map(|j| format!("p{j}")))
                    .collect();
                let header: Vec<&str> = names.iter().map(String::as_str).collect();
                let rows: Vec<Vec<String>> = (0..STEPS)
                    .map(|i| {
                        std::iter::once(i.to_string())
                            .chain(polys(i).iter().map(|&x| sig10(x)))
                            .collect()
                    })
                    .collect();
                write_csv(path, &header, &rows)?;
            }
            Ok(Summary::ok(json!({
                "table": "polynomials",
                "rows": STEPS,
                "p0_at_0": polys(0)[0],
                "p10_at_0": polys(0)[10],
                "out": out,
            })))
        }
        Which::Delta => {
            let checks = validate_delta_tables(mode);
            if let Some(path) = out {
                let header = [
                    "i",
                    "delta",
                    "delta_slack",
                    "delta_hat",
                    "delta_hat_slack",
                    "valid",
                    "floor_matches",
                ];
                let rows: Vec<Vec<String>> = checks
                    .iter()
                    .map(|c| {
                        vec![
                            c.i.to_string(),
                            sig10(c.delta),
                            sig10(c.delta_slack),
                            sig10(c.delta_hat),
                            sig10(c.delta_hat_slack),
                            c.valid.to_string(),
                            c.floor_matches.to_string(),
                        ]
                    })
                    .collect();
                write_csv(path, &header, &rows)?;
            }
            let tables = delta_tables(mode);
            let invalid: Vec<usize> = checks.iter().filter(|c| !c.valid).map(|c| c.i).collect();
            let floor_mismatch: Vec<usize> = checks
                .iter()
                .filter(|c| !c.floor_matches)
                .map(|c| c.i)
                .collect();
            Ok(Summary::with_code(
                if invalid.is_empty() { 0 } else { 1 },
                json!({
                    "table": "delta",
                    "mode": mode,
                    "delta": tables.delta,
                    "delta_hat": tables.delta_hat,
                    "invalid": invalid,
                    "floor_mismatch": floor_mismatch,
                    "out": out,
                }),
            ))
        }
        Which::Azuma => {
            let eps = mode.epsilon();
            let bound = azuma_failure_bound(eps, &delta_tables(mode));
            let below_one = bound < 1.0;
            let body = json!({
                "mode": mode,
                "eps": eps,
                "bound": bound,
                "below_one": below_one,
            });
            if let Some(path) = out {
                write_json(path, &body)?;
            }
            Ok(Summary::with_code(if below_one { 0 } else { 1 }, body))
        }
    }
}
