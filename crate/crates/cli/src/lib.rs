//! Library side of the `breakdiv` command-line tool: request dispatch, JSON
//! ingestion and reports, the aggregate verification suite, and the SVG
//! scene builder.

pub mod scene;

use std::fs;

use breakdiv_core::divisor::{dhar_reduce, is_equivalent, Divisor};
use breakdiv_core::graph::{spanning_trees, RawGraph, WeightedGraph};
use breakdiv_core::homology::{
    abel_jacobi_divisor, cauchy_binet_check, cell_volumes, dual_kirchhoff_check,
    reduced_laplacian_det, tree_weights, ConductanceMode,
};
use breakdiv_core::metric::{
    break_certificate, canonical_break_divisor_metric, MetricDivisor,
};
use breakdiv_core::orient::{
    break_divisor_verdict, break_set_from_orientation, enumerate_integral_break_divisors,
    make_orientable, make_q_orientable, realize_orientation, BreakDivisorVerdict,
};
use breakdiv_core::rational::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const DEFAULT_MAX_VERTICES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Canonical,
    Reduce,
    QOrient,
    Orient,
    IsBreak,
    EnumerateBreak,
    Trees,
    Volumes,
    Verify,
    Equiv,
    JacobianSvg,
}

impl Subcommand {
    pub fn parse(s: &str) -> Option<Subcommand> {
        Some(match s {
            "canonical" => Subcommand::Canonical,
            "reduce" => Subcommand::Reduce,
            "q-orient" => Subcommand::QOrient,
            "orient" => Subcommand::Orient,
            "is-break" => Subcommand::IsBreak,
            "enumerate-break" => Subcommand::EnumerateBreak,
            "trees" => Subcommand::Trees,
            "volumes" => Subcommand::Volumes,
            "verify" => Subcommand::Verify,
            "equiv" => Subcommand::Equiv,
            "jacobian-svg" => Subcommand::JacobianSvg,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct CommandRequest {
    pub subcommand: Subcommand,
    pub graph: String,
    pub divisor: Option<String>,
    pub divisor2: Option<String>,
    pub q: Option<String>,
    pub metric: bool,
    pub format: OutputFormat,
    pub seed: u64,
    pub conductance: ConductanceMode,
    pub out: Option<String>,
}

/// Invalid input of any kind; mapped to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for InputError {}

impl From<breakdiv_core::Error> for InputError {
    fn from(e: breakdiv_core::Error) -> InputError {
        InputError(e.to_string())
    }
}

pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
}

impl Outcome {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(&self.report).unwrap(),
            OutputFormat::Text => render_text(&self.report, 0),
        }
    }
}

fn render_text(value: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::Object(_) | Value::Array(_) => {
                    format!("{}{}:\n{}", pad, k, render_text(v, indent + 1))
                }
                _ => format!("{}{}: {}", pad, k, plain(v)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Object(_) | Value::Array(_) => {
                    format!("{}-\n{}", pad, render_text(v, indent + 1))
                }
                _ => format!("{}- {}", pad, plain(v)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        _ => format!("{}{}", pad, plain(value)),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn load_graph(path: &str) -> Result<WeightedGraph, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read graph file {}: {}", path, e)))?;
    let raw: RawGraph = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("invalid graph JSON in {}: {}", path, e)))?;
    Ok(WeightedGraph::validate(&raw)?)
}

/// A divisor argument is inline JSON when it starts with '{', otherwise a
/// file path.
fn divisor_source(arg: &str) -> Result<String, InputError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg)
            .map_err(|e| InputError(format!("cannot read divisor file {}: {}", arg, e)))
    }
}

fn load_divisor(arg: &str) -> Result<Divisor, InputError> {
    let text = divisor_source(arg)?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("invalid divisor JSON: {}", e)))
}

fn load_metric_divisor(arg: &str) -> Result<MetricDivisor, InputError> {
    let text = divisor_source(arg)?;
    serde_json::from_str(&text)
        .map_err(|e| InputError(format!("invalid metric divisor JSON: {}", e)))
}

fn require_divisor(req: &CommandRequest) -> Result<&str, InputError> {
    req.divisor
        .as_deref()
        .ok_or_else(|| InputError("this subcommand needs --divisor".into()))
}

fn check_divisor_support(g: &WeightedGraph, d: &Divisor) -> Result<(), InputError> {
    for (v, _) in d.iter() {
        if g.vertex_idx(v).is_none() {
            return Err(InputError(format!("divisor names unknown vertex {}", v)));
        }
    }
    Ok(())
}

fn resolve_q(g: &WeightedGraph, q: &Option<String>) -> Result<String, InputError> {
    match q {
        None => Ok(g.vertex_id(0).clone()),
        Some(q) => {
            if g.vertex_idx(q).is_none() {
                return Err(InputError(format!("unknown base point {}", q)));
            }
            Ok(q.clone())
        }
    }
}

fn max_vertices() -> usize {
    std::env::var("BREAKDIV_MAX_VERTICES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_VERTICES)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

pub fn run(req: &CommandRequest) -> Result<Outcome, InputError> {
    let g = load_graph(&req.graph)?;
    if g.vertex_count() > max_vertices() {
        return Err(InputError(format!(
            "graph has {} vertices; the exhaustive searches are capped at {} (BREAKDIV_MAX_VERTICES)",
            g.vertex_count(),
            max_vertices()
        )));
    }
    match req.subcommand {
        Subcommand::Canonical => run_canonical(req, &g),
        Subcommand::Reduce => run_reduce(req, &g),
        Subcommand::QOrient => run_q_orient(req, &g),
        Subcommand::Orient => run_orient(req, &g),
        Subcommand::IsBreak => run_is_break(req, &g),
        Subcommand::EnumerateBreak => run_enumerate(&g),
        Subcommand::Trees => run_trees(req, &g),
        Subcommand::Volumes => run_volumes(&g),
        Subcommand::Verify => run_verify(req, &g),
        Subcommand::Equiv => run_equiv(req, &g),
        Subcommand::JacobianSvg => run_svg(req, &g),
    }
}

fn run_canonical(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let arg = require_divisor(req)?;
    let report = if req.metric {
        let d = load_metric_divisor(arg)?;
        let q = req
            .q
            .as_ref()
            .map(|v| breakdiv_core::metric::MetricPoint::vertex(v));
        let out = canonical_break_divisor_metric(g, &d, q.as_ref())?;
        json!({ "break_divisor": to_value(&out) })
    } else {
        let d = load_divisor(arg)?;
        check_divisor_support(g, &d)?;
        let q = resolve_q(g, &req.q)?;
        let out = breakdiv_core::orient::canonical_break_divisor_via(g, &d, &q)?;
        json!({ "break_divisor": to_value(&out) })
    };
    Ok(Outcome {
        exit_code: 0,
        report,
    })
}

fn run_reduce(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let d = load_divisor(require_divisor(req)?)?;
    check_divisor_support(g, &d)?;
    let q = resolve_q(g, &req.q)?;
    let (reduced, witness) = dhar_reduce(g, &d, &q);
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "q": q,
            "reduced": to_value(&reduced),
            "witness": to_value(&witness),
        }),
    })
}

fn run_q_orient(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let d = load_divisor(require_divisor(req)?)?;
    check_divisor_support(g, &d)?;
    let q = resolve_q(g, &req.q)?;
    let (out, log) = make_q_orientable(g, &d, &q)?;
    let orientation = realize_orientation(g, &out)?;
    let break_set = break_set_from_orientation(g, &orientation, &q)?;
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "q": q,
            "divisor": to_value(&out),
            "fired_sets": to_value(&log),
            "orientation": to_value(&orientation),
            "break_set": to_value(&break_set.pairs),
        }),
    })
}

fn run_orient(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let d = load_divisor(require_divisor(req)?)?;
    check_divisor_support(g, &d)?;
    let (out, log) = make_orientable(g, &d)?;
    let orientation = realize_orientation(g, &out)?;
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "divisor": to_value(&out),
            "fired_sets": to_value(&log),
            "orientation": to_value(&orientation),
        }),
    })
}

fn run_is_break(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let d = load_divisor(require_divisor(req)?)?;
    check_divisor_support(g, &d)?;
    let verdict = break_divisor_verdict(g, &d)?;
    let mut report = serde_json::Map::new();
    report.insert("break".into(), json!(verdict.is_break()));
    match &verdict {
        BreakDivisorVerdict::IsBreak => {
            let cert = break_certificate(g, &MetricDivisor::from_divisor(&d))?;
            if let Some(cert) = cert {
                report.insert("certificate".into(), to_value(&cert));
            }
        }
        BreakDivisorVerdict::NotEffective { vertex } => {
            report.insert("reason".into(), json!("not effective"));
            report.insert("witness".into(), json!([vertex]));
        }
        BreakDivisorVerdict::WrongDegree { expected, got } => {
            report.insert("reason".into(), json!("wrong degree"));
            report.insert("expected_degree".into(), json!(expected));
            report.insert("degree".into(), json!(got));
        }
        BreakDivisorVerdict::Obstruction { set, chi } => {
            report.insert("reason".into(), json!("chi obstruction"));
            report.insert("witness".into(), to_value(set));
            report.insert("chi".into(), json!(chi));
        }
    }
    Ok(Outcome {
        exit_code: if verdict.is_break() { 0 } else { 1 },
        report: Value::Object(report),
    })
}

fn run_enumerate(g: &WeightedGraph) -> Result<Outcome, InputError> {
    let divisors = enumerate_integral_break_divisors(g);
    let tree_count = spanning_trees(g).len();
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "count": divisors.len(),
            "tree_count": tree_count,
            "count_matches_trees": divisors.len() == tree_count,
            "divisors": to_value(&divisors),
        }),
    })
}

fn run_trees(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let table = tree_weights(g, req.conductance);
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "count": table.weights.len(),
            "trees": to_value(&table.weights),
            "wG": to_value(&table.total_w),
            "w_prime_total": to_value(&table.total_w_prime),
            "conductance": match req.conductance {
                ConductanceMode::Length => "length",
                ConductanceMode::InverseLength => "inverse",
            },
        }),
    })
}

fn run_volumes(g: &WeightedGraph) -> Result<Outcome, InputError> {
    let report = cell_volumes(g)?;
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "det": to_value(&report.det),
            "ratio_sum": to_value(&report.ratio_sum()),
            "cells": to_value(&report.cells),
        }),
    })
}

fn run_equiv(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let a = require_divisor(req)?;
    let b = req
        .divisor2
        .as_deref()
        .ok_or_else(|| InputError("equiv needs --divisor2".into()))?;
    if req.metric {
        let d1 = load_metric_divisor(a)?;
        let d2 = load_metric_divisor(b)?;
        let q = resolve_q(g, &req.q)?;
        let t0 = spanning_trees(g)
            .into_iter()
            .next()
            .ok_or_else(|| InputError("graph has no spanning tree".into()))?;
        let eq = breakdiv_core::homology::jac_equivalent(g, &d1, &d2, &q, &t0)?;
        Ok(Outcome {
            exit_code: if eq { 0 } else { 1 },
            report: json!({ "equivalent": eq, "oracle": "abel-jacobi" }),
        })
    } else {
        let d1 = load_divisor(a)?;
        let d2 = load_divisor(b)?;
        check_divisor_support(g, &d1)?;
        check_divisor_support(g, &d2)?;
        let eq = is_equivalent(g, &d1, &d2);
        let q = g.vertex_id(0).clone();
        Ok(Outcome {
            exit_code: if eq { 0 } else { 1 },
            report: json!({
                "equivalent": eq,
                "oracle": "dhar",
                "reduced1": to_value(&dhar_reduce(g, &d1, &q).0),
                "reduced2": to_value(&dhar_reduce(g, &d2, &q).0),
            }),
        })
    }
}

fn run_svg(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let (svg_scene, svg) = scene::emit_svg(g)?;
    if let Some(path) = &req.out {
        fs::write(path, &svg)
            .map_err(|e| InputError(format!("cannot write SVG to {}: {}", path, e)))?;
    }
    let areas: Vec<Rational> = svg_scene.cells.iter().map(|c| c.area.clone()).collect();
    Ok(Outcome {
        exit_code: 0,
        report: json!({
            "cells": svg_scene.cells.len(),
            "areas": to_value(&areas),
            "area_sum": to_value(&svg_scene.area_sum()),
            "labels": svg_scene.cells.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
            "written": req.out.clone(),
        }),
    })
}

/// Aggregate verification: the dual Kirchhoff identity, the volume tiling,
/// the break-divisor count, both classical Kirchhoff conventions, the
/// Cauchy-Binet expansion, and the agreement of the torus and chip-firing
/// equivalence oracles on seeded samples (run on the unit-length variant of
/// the graph, where the integral theory and the metric theory coincide).
fn run_verify(req: &CommandRequest, g: &WeightedGraph) -> Result<Outcome, InputError> {
    let kirchhoff = dual_kirchhoff_check(g)?;
    let volumes = cell_volumes(g)?;
    let ratio_sum_one = volumes.ratio_sum() == Rational::one();

    let breaks = enumerate_integral_break_divisors(g);
    let break_count_matches = breaks.len() == kirchhoff.tree_count;

    let q = g.vertex_id(0).clone();
    let classic_length = reduced_laplacian_det(g, &q, ConductanceMode::Length)?;
    let classic_inverse = reduced_laplacian_det(g, &q, ConductanceMode::InverseLength)?;
    let classic_length_ok =
        classic_length == tree_weights(g, ConductanceMode::Length).total_w_prime;
    let classic_inverse_ok =
        classic_inverse == tree_weights(g, ConductanceMode::InverseLength).total_w_prime;

    let cauchy = cauchy_binet_check(g, &spanning_trees(g)[0])?;

    // oracle agreement on the unit-length variant
    let mut unit_raw = g.to_raw();
    let unit_lengths = unit_raw.edges.iter().all(|e| e.length == Rational::one());
    for e in unit_raw.edges.iter_mut() {
        e.length = Rational::one();
    }
    let unit = WeightedGraph::validate(&unit_raw)?;
    let t0 = spanning_trees(&unit)
        .into_iter()
        .next()
        .ok_or_else(|| InputError("graph has no spanning tree".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let pairs = 60;
    let mut agreements = 0;
    for _ in 0..pairs {
        let degree = rng.gen_range(-2..=3);
        let d1 = random_divisor(&mut rng, &unit, degree);
        let d2 = if rng.gen_bool(0.5) {
            let x: breakdiv_core::VertexSet = unit
                .vertices()
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            breakdiv_core::divisor::fire_set(&unit, &d1, &x)
        } else {
            random_divisor(&mut rng, &unit, degree)
        };
        let dhar = is_equivalent(&unit, &d1, &d2);
        let torus = abel_jacobi_divisor(&unit, &d1, &q, &t0)?
            == abel_jacobi_divisor(&unit, &d2, &q, &t0)?;
        if dhar == torus {
            agreements += 1;
        }
    }
    let oracles_agree = agreements == pairs;

    let all = kirchhoff.holds
        && ratio_sum_one
        && break_count_matches
        && classic_length_ok
        && classic_inverse_ok
        && cauchy.holds
        && oracles_agree;
    Ok(Outcome {
        exit_code: if all { 0 } else { 1 },
        report: json!({
            "det": to_value(&kirchhoff.det),
            "wG": to_value(&kirchhoff.total_weight),
            "trees": kirchhoff.tree_count,
            "identity": kirchhoff.holds,
            "vol_ratio_sum_one": ratio_sum_one,
            "break_count": breaks.len(),
            "break_count_matches_trees": break_count_matches,
            "kirchhoff_length": to_value(&classic_length),
            "kirchhoff_length_matches": classic_length_ok,
            "kirchhoff_inverse": to_value(&classic_inverse),
            "kirchhoff_inverse_matches": classic_inverse_ok,
            "cauchy_binet": cauchy.holds,
            "unit_lengths": unit_lengths,
            "oracle_pairs": pairs,
            "oracle_agreement": oracles_agree,
            "all": all,
        }),
    })
}

fn random_divisor(rng: &mut ChaCha8Rng, g: &WeightedGraph, degree: i64) -> Divisor {
    let mut d = Divisor::zero();
    for v in g.vertices() {
        d.set_coeff(v, rng.gen_range(-2..=2));
    }
    let fix = rng.gen_range(0..g.vertex_count());
    let v = g.vertex_id(fix).clone();
    d.add_coeff(&v, degree - d.degree());
    d
}
