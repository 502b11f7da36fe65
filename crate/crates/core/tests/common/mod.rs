#![allow(dead_code)]

use breakdiv_core::divisor::Divisor;
use breakdiv_core::graph::{VertexSet, WeightedGraph};
use breakdiv_core::rational::Rational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rat(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn theta() -> WeightedGraph {
    WeightedGraph::from_parts(
        &["u", "v"],
        &[
            ("a", "u", "v", rat("2")),
            ("b", "u", "v", rat("1")),
            ("c", "u", "v", rat("2")),
        ],
    )
    .unwrap()
}

pub fn theta_unit() -> WeightedGraph {
    WeightedGraph::from_parts(
        &["u", "v", "x", "y"],
        &[
            ("a1", "u", "x", rat("1")),
            ("a2", "x", "v", rat("1")),
            ("b", "u", "v", rat("1")),
            ("c1", "u", "y", rat("1")),
            ("c2", "y", "v", rat("1")),
        ],
    )
    .unwrap()
}

pub fn tri() -> WeightedGraph {
    WeightedGraph::from_parts(
        &["v1", "v2", "v3"],
        &[
            ("e12", "v1", "v2", rat("1")),
            ("e13", "v1", "v3", rat("1")),
            ("e23", "v2", "v3", rat("1")),
        ],
    )
    .unwrap()
}

pub fn path3() -> WeightedGraph {
    WeightedGraph::from_parts(
        &["p1", "p2", "p3"],
        &[("e1", "p1", "p2", rat("1")), ("e2", "p2", "p3", rat("1"))],
    )
    .unwrap()
}

pub fn div(entries: &[(&str, i64)]) -> Divisor {
    Divisor::from_entries(entries.iter().map(|(v, c)| (v.to_string(), *c)))
}

pub fn set(ids: &[&str]) -> VertexSet {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Seeded connected loopless multigraph with parallel edges, at most
/// `max_v` vertices and `max_e` edges, integer lengths in 1..=max_len.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_v: usize,
    max_e: usize,
    max_len: i64,
) -> WeightedGraph {
    let n = rng.gen_range(2..=max_v);
    let m = rng.gen_range(n - 1..=max_e.max(n - 1));
    let vertices: Vec<String> = (0..n).map(|i| format!("v{}", i)).collect();
    let mut edges: Vec<(String, String, String, Rational)> = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        edges.push((
            format!("e{}", i - 1),
            vertices[parent].clone(),
            vertices[i].clone(),
            Rational::from_int(rng.gen_range(1..=max_len)),
        ));
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let mut w = rng.gen_range(0..n);
        while w == u {
            w = rng.gen_range(0..n);
        }
        edges.push((
            format!("e{}", edges.len()),
            vertices[u].clone(),
            vertices[w].clone(),
            Rational::from_int(rng.gen_range(1..=max_len)),
        ));
    }
    let vertex_refs: Vec<&str> = vertices.iter().map(|s| s.as_str()).collect();
    let edge_refs: Vec<(&str, &str, &str, Rational)> = edges
        .iter()
        .map(|(id, u, w, len)| (id.as_str(), u.as_str(), w.as_str(), len.clone()))
        .collect();
    WeightedGraph::from_parts(&vertex_refs, &edge_refs).unwrap()
}

/// Same structure with every length set to one.
pub fn unit_variant(g: &WeightedGraph) -> WeightedGraph {
    let mut raw = g.to_raw();
    for e in raw.edges.iter_mut() {
        e.length = Rational::one();
    }
    WeightedGraph::validate(&raw).unwrap()
}

/// Unit-length model of a graph with integer edge lengths: every edge of
/// length L is split into L unit segments. Original vertices persist.
pub fn unit_subdivision(g: &WeightedGraph) -> WeightedGraph {
    let mut spec = Vec::new();
    for e in g.edges() {
        let len: i64 = e
            .length
            .to_string()
            .parse()
            .expect("integer edge lengths");
        if len > 1 {
            spec.push((
                e.id.clone(),
                (1..len).map(Rational::from_int).collect::<Vec<_>>(),
            ));
        }
    }
    breakdiv_core::graph::refine(g, &spec).unwrap()
}

/// Random divisor with coefficients in [-span, span], then corrected on a
/// random vertex to reach the target degree.
pub fn random_divisor(rng: &mut ChaCha8Rng, g: &WeightedGraph, degree: i64, span: i64) -> Divisor {
    let mut d = Divisor::zero();
    for v in g.vertices() {
        d.set_coeff(v, rng.gen_range(-span..=span));
    }
    let fix = rng.gen_range(0..g.vertex_count());
    let v = g.vertex_id(fix).clone();
    d.add_coeff(&v, degree - d.degree());
    d
}

/// Random subset of the vertices (possibly empty or full).
pub fn random_set(rng: &mut ChaCha8Rng, g: &WeightedGraph) -> VertexSet {
    g.vertices()
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect()
}
