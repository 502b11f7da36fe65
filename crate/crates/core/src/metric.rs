use std::collections::BTreeMap;

use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::divisor::{chi_mask, Divisor};
use crate::error::{Error, Result};
use crate::graph::{
    refine_with_map, spanning_trees, EdgeId, RefineMap, SpanningTree, VertexId, VertexSet,
    WeightedGraph,
};
use crate::rational::Rational;

/// A point of the metric graph: a vertex, or a strictly interior position on
/// an edge measured from the reference tail. Endpoint positions normalize to
/// the vertex form, so representations are unique.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricPoint {
    Vertex(VertexId),
    Interior { edge: EdgeId, offset: Rational },
}

impl MetricPoint {
    pub fn vertex(v: &str) -> MetricPoint {
        MetricPoint::Vertex(v.to_string())
    }

    pub fn interior(edge: &str, offset: Rational) -> MetricPoint {
        MetricPoint::Interior {
            edge: edge.to_string(),
            offset,
        }
    }

    /// Canonical form on the given graph; rejects positions off the graph.
    pub fn normalized(&self, g: &WeightedGraph) -> Result<MetricPoint> {
        match self {
            MetricPoint::Vertex(v) => {
                g.vertex_idx(v)
                    .ok_or_else(|| Error::PointOffGraph(v.clone()))?;
                Ok(self.clone())
            }
            MetricPoint::Interior { edge, offset } => {
                let e = g
                    .edge(edge)
                    .ok_or_else(|| Error::PointOffGraph(self.to_string()))?;
                if offset.is_negative() || offset > &e.length {
                    return Err(Error::PointOffGraph(self.to_string()));
                }
                if offset.is_zero() {
                    Ok(MetricPoint::Vertex(g.vertex_id(e.tail).clone()))
                } else if offset == &e.length {
                    Ok(MetricPoint::Vertex(g.vertex_id(e.head).clone()))
                } else {
                    Ok(self.clone())
                }
            }
        }
    }
}

impl std::fmt::Display for MetricPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricPoint::Vertex(v) => write!(f, "{}", v),
            MetricPoint::Interior { edge, offset } => write!(f, "{}@{}", edge, offset),
        }
    }
}

impl Serialize for MetricPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Finite formal sum of metric points with nonzero integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct MetricDivisor {
    coeffs: BTreeMap<MetricPoint, i64>,
}

impl MetricDivisor {
    pub fn zero() -> MetricDivisor {
        MetricDivisor::default()
    }

    pub fn from_points<I: IntoIterator<Item = (MetricPoint, i64)>>(points: I) -> MetricDivisor {
        let mut d = MetricDivisor::zero();
        for (p, c) in points {
            d.add_coeff(&p, c);
        }
        d
    }

    pub fn from_divisor(d: &Divisor) -> MetricDivisor {
        MetricDivisor::from_points(
            d.iter()
                .map(|(v, c)| (MetricPoint::Vertex(v.clone()), c)),
        )
    }

    /// Vertex-supported view, if no interior point carries a coefficient.
    pub fn to_vertex_divisor(&self) -> Option<Divisor> {
        let mut out = Divisor::zero();
        for (p, c) in self.iter() {
            match p {
                MetricPoint::Vertex(v) => out.add_coeff(v, c),
                MetricPoint::Interior { .. } => return None,
            }
        }
        Some(out)
    }

    pub fn coeff(&self, p: &MetricPoint) -> i64 {
        self.coeffs.get(p).copied().unwrap_or(0)
    }

    pub fn add_coeff(&mut self, p: &MetricPoint, c: i64) {
        let new = self.coeff(p) + c;
        if new == 0 {
            self.coeffs.remove(p);
        } else {
            self.coeffs.insert(p.clone(), new);
        }
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MetricPoint, i64)> {
        self.coeffs.iter().map(|(p, &c)| (p, c))
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    /// Support points repeated with multiplicity; requires effectiveness.
    pub fn point_instances(&self) -> Vec<MetricPoint> {
        let mut out = Vec::new();
        for (p, c) in self.iter() {
            for _ in 0..c.max(0) {
                out.push(p.clone());
            }
        }
        out
    }

    pub fn normalized(&self, g: &WeightedGraph) -> Result<MetricDivisor> {
        let mut out = MetricDivisor::zero();
        for (p, c) in self.iter() {
            out.add_coeff(&p.normalized(g)?, c);
        }
        Ok(out)
    }

    pub fn add(&self, other: &MetricDivisor) -> MetricDivisor {
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_coeff(p, c);
        }
        out
    }
}

impl std::fmt::Display for MetricDivisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(p, c)| match c {
                1 => format!("({})", p),
                -1 => format!("-({})", p),
                c => format!("{}({})", c, p),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct PointEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex: Option<VertexId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<EdgeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<Rational>,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
struct MetricDivisorWire {
    points: Vec<PointEntry>,
}

impl Serialize for MetricDivisor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let points = self
            .iter()
            .map(|(p, c)| match p {
                MetricPoint::Vertex(v) => PointEntry {
                    vertex: Some(v.clone()),
                    edge: None,
                    offset: None,
                    coeff: c,
                },
                MetricPoint::Interior { edge, offset } => PointEntry {
                    vertex: None,
                    edge: Some(edge.clone()),
                    offset: Some(offset.clone()),
                    coeff: c,
                },
            })
            .collect();
        MetricDivisorWire { points }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MetricDivisor {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<MetricDivisor, D::Error> {
        let wire = MetricDivisorWire::deserialize(deserializer)?;
        let mut d = MetricDivisor::zero();
        for entry in wire.points {
            let point = match (entry.vertex, entry.edge, entry.offset) {
                (Some(v), None, None) => MetricPoint::Vertex(v),
                (None, Some(edge), Some(offset)) => MetricPoint::Interior { edge, offset },
                _ => {
                    return Err(de::Error::custom(
                        "point needs either \"vertex\" or \"edge\" with \"offset\"",
                    ))
                }
            };
            d.add_coeff(&point, entry.coeff);
        }
        Ok(d)
    }
}

/// Coordinate transfer between a graph and one of its refinements.
#[derive(Debug, Clone)]
pub struct PointMap {
    refine: RefineMap,
    segment_home: BTreeMap<EdgeId, (EdgeId, Rational)>,
    split_vertices: BTreeMap<(EdgeId, Rational), VertexId>,
}

impl PointMap {
    pub fn new(refine: RefineMap) -> PointMap {
        let mut segment_home = BTreeMap::new();
        for (base, spans) in &refine.segments {
            for span in spans {
                segment_home.insert(span.id.clone(), (base.clone(), span.start.clone()));
            }
        }
        let split_vertices = refine
            .new_vertices
            .iter()
            .map(|(v, (e, off))| ((e.clone(), off.clone()), v.clone()))
            .collect();
        PointMap {
            refine,
            segment_home,
            split_vertices,
        }
    }

    pub fn identity() -> PointMap {
        PointMap::new(RefineMap {
            segments: BTreeMap::new(),
            new_vertices: BTreeMap::new(),
        })
    }

    /// Base coordinates -> refined-model coordinates.
    pub fn to_model(&self, p: &MetricPoint) -> MetricPoint {
        match p {
            MetricPoint::Vertex(_) => p.clone(),
            MetricPoint::Interior { edge, offset } => {
                if let Some(v) = self.split_vertices.get(&(edge.clone(), offset.clone())) {
                    return MetricPoint::Vertex(v.clone());
                }
                match self.refine.segments.get(edge) {
                    None => p.clone(),
                    Some(spans) => {
                        for span in spans {
                            if &span.start < offset && offset < &span.end {
                                return MetricPoint::Interior {
                                    edge: span.id.clone(),
                                    offset: offset - &span.start,
                                };
                            }
                        }
                        unreachable!("offset lies in some span of its edge")
                    }
                }
            }
        }
    }

    /// Refined-model coordinates -> base coordinates.
    pub fn to_base(&self, p: &MetricPoint) -> MetricPoint {
        match p {
            MetricPoint::Vertex(v) => match self.refine.new_vertices.get(v) {
                Some((edge, offset)) => MetricPoint::Interior {
                    edge: edge.clone(),
                    offset: offset.clone(),
                },
                None => p.clone(),
            },
            MetricPoint::Interior { edge, offset } => match self.segment_home.get(edge) {
                Some((base, start)) => MetricPoint::Interior {
                    edge: base.clone(),
                    offset: start + offset,
                },
                None => p.clone(),
            },
        }
    }

    pub fn divisor_to_model(&self, d: &MetricDivisor) -> MetricDivisor {
        MetricDivisor::from_points(d.iter().map(|(p, c)| (self.to_model(p), c)))
    }

    pub fn divisor_to_base(&self, d: &MetricDivisor) -> MetricDivisor {
        MetricDivisor::from_points(d.iter().map(|(p, c)| (self.to_base(p), c)))
    }
}

/// A model for (Gamma, D): the refinement whose vertices carry the support,
/// the re-coordinatized divisor, and the point mapping.
#[derive(Debug, Clone)]
pub struct MetricModel {
    pub graph: WeightedGraph,
    pub divisor: MetricDivisor,
    pub map: PointMap,
}

/// Refines `g0` so that the support of `d` (and `q`, when given) becomes
/// vertex-supported.
pub fn model_for(
    g0: &WeightedGraph,
    d: &MetricDivisor,
    q: Option<&MetricPoint>,
) -> Result<MetricModel> {
    let d = d.normalized(g0)?;
    let mut splits: BTreeMap<EdgeId, Vec<Rational>> = BTreeMap::new();
    let mut add_split = |edge: &EdgeId, offset: &Rational| {
        let offsets = splits.entry(edge.clone()).or_default();
        if !offsets.contains(offset) {
            offsets.push(offset.clone());
        }
    };
    for (p, _) in d.iter() {
        if let MetricPoint::Interior { edge, offset } = p {
            add_split(edge, offset);
        }
    }
    if let Some(q) = q {
        if let MetricPoint::Interior { edge, offset } = q.normalized(g0)? {
            add_split(&edge, &offset);
        }
    }
    let mut spec: Vec<(EdgeId, Vec<Rational>)> = splits.into_iter().collect();
    for (_, offsets) in spec.iter_mut() {
        offsets.sort();
    }
    let (graph, refine_map) = refine_with_map(g0, &spec)?;
    let map = PointMap::new(refine_map);
    let divisor = map.divisor_to_model(&d);
    Ok(MetricModel { graph, divisor, map })
}

/// The restriction data of a semi-model: the edges that survive after
/// deleting open edges meeting the support, and the vertex-supported part of
/// the divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiModelView {
    pub restricted_edges: Vec<EdgeId>,
    pub vertex_divisor: Divisor,
    pub interior_support: BTreeMap<EdgeId, Rational>,
}

/// Checks the semi-model condition: every open edge meets the support in
/// nothing or a single point of coefficient one.
pub fn restricted_graph(g: &WeightedGraph, d: &MetricDivisor) -> Result<SemiModelView> {
    let d = d.normalized(g)?;
    let mut vertex_divisor = Divisor::zero();
    let mut interior: BTreeMap<EdgeId, Vec<(Rational, i64)>> = BTreeMap::new();
    for (p, c) in d.iter() {
        match p {
            MetricPoint::Vertex(v) => vertex_divisor.add_coeff(v, c),
            MetricPoint::Interior { edge, offset } => {
                interior
                    .entry(edge.clone())
                    .or_default()
                    .push((offset.clone(), c));
            }
        }
    }
    let mut interior_support = BTreeMap::new();
    for (edge, points) in interior {
        if points.len() > 1 {
            return Err(Error::NotASemiModel(format!(
                "open edge {} meets the support in {} points",
                edge,
                points.len()
            )));
        }
        let (offset, coeff) = &points[0];
        if *coeff != 1 {
            return Err(Error::NotASemiModel(format!(
                "interior point {}@{} has coefficient {}",
                edge, offset, coeff
            )));
        }
        interior_support.insert(edge, offset.clone());
    }
    let restricted_edges = g
        .edges()
        .iter()
        .filter(|e| !interior_support.contains_key(&e.id))
        .map(|e| e.id.clone())
        .collect();
    Ok(SemiModelView {
        restricted_edges,
        vertex_divisor,
        interior_support,
    })
}

/// Index pairs of the surviving edges together with the dense vertex divisor.
pub(crate) type RestrictedSkeleton = (Vec<(usize, usize)>, Vec<i64>);

impl SemiModelView {
    pub(crate) fn skeleton(&self, g: &WeightedGraph) -> Result<RestrictedSkeleton> {
        let pairs = self
            .restricted_edges
            .iter()
            .map(|id| {
                let e = g.edge(id).ok_or_else(|| Error::UnknownEdge(id.clone()))?;
                Ok((e.tail, e.head))
            })
            .collect::<Result<Vec<_>>>()?;
        let dense = self.vertex_divisor.to_dense(g)?;
        Ok((pairs, dense))
    }

    /// Orientability of the vertex divisor on the restricted graph; by the
    /// semi-model transfer this decides orientability on the metric graph.
    pub fn orientable_on_restriction(&self, g: &WeightedGraph) -> Result<bool> {
        let (pairs, dense) = self.skeleton(g)?;
        Ok(restricted_min_chi(g.vertex_count(), &pairs, &dense).0)
    }

    pub fn q_orientable_on_restriction(&self, g: &WeightedGraph, q: &str) -> Result<bool> {
        let qi = g
            .vertex_idx(q)
            .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
        let (pairs, dense) = self.skeleton(g)?;
        if !restricted_min_chi(g.vertex_count(), &pairs, &dense).0 {
            return Ok(false);
        }
        Ok(zero_set_avoiding(g.vertex_count(), &pairs, &dense, qi).is_none())
    }
}

/// (orientable?, minimal minimizer mask when chi_D < 0).
fn restricted_min_chi(n: usize, pairs: &[(usize, usize)], dense: &[i64]) -> (bool, Option<u64>) {
    let full = (1u64 << n) - 1;
    if chi_mask(pairs, dense, full) != 0 {
        return (false, None);
    }
    let mut best: Option<(i64, u64)> = None;
    for mask in 1..full {
        let chi = chi_mask(pairs, dense, mask);
        best = Some(match best {
            None => (chi, mask),
            Some((b, _)) if chi < b => (chi, mask),
            Some((b, isect)) if chi == b => (b, isect & mask),
            Some(keep) => keep,
        });
    }
    match best {
        Some((chi, isect)) if chi < 0 => {
            assert_eq!(chi_mask(pairs, dense, isect), chi);
            (false, Some(isect))
        }
        _ => (true, None),
    }
}

/// Union of the nonempty chi = 0 subsets avoiding q, if any.
fn zero_set_avoiding(
    n: usize,
    pairs: &[(usize, usize)],
    dense: &[i64],
    qi: usize,
) -> Option<u64> {
    let full = (1u64 << n) - 1;
    let mut union = 0u64;
    for mask in 1..=full {
        if mask >> qi & 1 == 1 {
            continue;
        }
        if chi_mask(pairs, dense, mask) == 0 {
            union |= mask;
        }
    }
    if union == 0 {
        None
    } else {
        assert_eq!(chi_mask(pairs, dense, union), 0);
        Some(union)
    }
}

/// One corridor of the cut: the edge, the boundary vertex on the fired side,
/// the far endpoint, and the corridor length.
struct Corridor {
    edge_idx: usize,
    near_is_tail: bool,
    far: MetricPoint,
    far_offset: Rational,
    length: Rational,
}

fn corridors(
    g: &WeightedGraph,
    view: &SemiModelView,
    mask: u64,
) -> Vec<Corridor> {
    let mut out = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        let tin = mask >> e.tail & 1 == 1;
        let hin = mask >> e.head & 1 == 1;
        if tin == hin {
            continue;
        }
        let near_is_tail = tin;
        match view.interior_support.get(&e.id) {
            Some(offset) => {
                let length = if near_is_tail {
                    offset.clone()
                } else {
                    &e.length - offset
                };
                out.push(Corridor {
                    edge_idx: ei,
                    near_is_tail,
                    far: MetricPoint::Interior {
                        edge: e.id.clone(),
                        offset: offset.clone(),
                    },
                    far_offset: offset.clone(),
                    length,
                });
            }
            None => {
                let (far_v, far_offset) = if near_is_tail {
                    (e.head, e.length.clone())
                } else {
                    (e.tail, Rational::zero())
                };
                out.push(Corridor {
                    edge_idx: ei,
                    near_is_tail,
                    far: MetricPoint::Vertex(g.vertex_id(far_v).clone()),
                    far_offset,
                    length: e.length.clone(),
                });
            }
        }
    }
    out
}

/// Fires the cut around the vertex set `s` of the semi-model: every chip on a
/// cut corridor moves the minimal corridor length toward the fired side.
/// Chipless far endpoints go negative and are compensated at distance l
/// inward, so the operation is total. Returns the result and the distance.
pub fn metric_fire_cut(
    g: &WeightedGraph,
    d: &MetricDivisor,
    s: &VertexSet,
) -> Result<(MetricDivisor, Rational)> {
    let view = restricted_graph(g, d)?;
    let mask = g.set_to_mask(s)?;
    let cut = corridors(g, &view, mask);
    if cut.is_empty() {
        return Err(Error::EmptyCut);
    }
    let step = cut
        .iter()
        .map(|c| c.length.clone())
        .min()
        .expect("cut is nonempty");
    let mut out = d.normalized(g)?;
    for c in &cut {
        out.add_coeff(&c.far, -1);
        let e = &g.edges()[c.edge_idx];
        let deposit_offset = if c.near_is_tail {
            &c.far_offset - &step
        } else {
            &c.far_offset + &step
        };
        let deposit = MetricPoint::Interior {
            edge: e.id.clone(),
            offset: deposit_offset,
        }
        .normalized(g)?;
        out.add_coeff(&deposit, 1);
    }
    Ok((out, step))
}

/// One iteration of the metric algorithms, for audit and replay.
#[derive(Debug, Clone, Serialize)]
pub struct MetricFireStep {
    pub fired: VertexSet,
    pub distance: Rational,
    /// Divisor after the step, in base-graph coordinates.
    pub after: MetricDivisor,
}

fn check_metric_degree(d: &MetricDivisor, expected: i64) -> Result<()> {
    if d.degree() != expected {
        return Err(Error::WrongDegree {
            expected,
            got: d.degree(),
        });
    }
    Ok(())
}

/// Fires cuts toward minimal minimizers of the restricted graph until the
/// divisor becomes orientable on the metric graph.
pub fn metric_make_orientable(
    g0: &WeightedGraph,
    d: &MetricDivisor,
) -> Result<(MetricDivisor, Vec<MetricFireStep>)> {
    check_metric_degree(d, g0.genus() - 1)?;
    let model = model_for(g0, d, None)?;
    let mut current = model.divisor.clone();
    let mut log = Vec::new();
    loop {
        let view = restricted_graph(&model.graph, &current)?;
        let (pairs, dense) = view.skeleton(&model.graph)?;
        let (orientable, minimizer) =
            restricted_min_chi(model.graph.vertex_count(), &pairs, &dense);
        if orientable {
            break;
        }
        let s_mask = minimizer.expect("non-orientable divisor has a deficient set");
        let s = model.graph.mask_to_set(s_mask);
        let (next, step) = metric_fire_cut(&model.graph, &current, &s)?;
        current = next;
        log.push(MetricFireStep {
            fired: s,
            distance: step,
            after: model.map.divisor_to_base(&current),
        });
    }
    Ok((model.map.divisor_to_base(&current), log))
}

/// Phase one makes the divisor orientable; phase two fires cuts toward
/// maximal zero sets avoiding q, which strictly shrink, until the divisor is
/// q-orientable.
pub fn metric_make_q_orientable(
    g0: &WeightedGraph,
    d: &MetricDivisor,
    q: &MetricPoint,
) -> Result<(MetricDivisor, Vec<MetricFireStep>)> {
    check_metric_degree(d, g0.genus() - 1)?;
    let model = model_for(g0, d, Some(q))?;
    let q_model = match model.map.to_model(&q.normalized(g0)?) {
        MetricPoint::Vertex(v) => v,
        p => return Err(Error::PointOffGraph(p.to_string())),
    };
    let qi = model
        .graph
        .vertex_idx(&q_model)
        .ok_or_else(|| Error::UnknownVertex(q_model.clone()))?;
    let mut current = model.divisor.clone();
    let mut log = Vec::new();
    loop {
        let view = restricted_graph(&model.graph, &current)?;
        let (pairs, dense) = view.skeleton(&model.graph)?;
        let n = model.graph.vertex_count();
        let (orientable, minimizer) = restricted_min_chi(n, &pairs, &dense);
        let s_mask = if !orientable {
            minimizer.expect("non-orientable divisor has a deficient set")
        } else {
            match zero_set_avoiding(n, &pairs, &dense, qi) {
                None => break,
                Some(mask) => mask,
            }
        };
        let s = model.graph.mask_to_set(s_mask);
        let (next, step) = metric_fire_cut(&model.graph, &current, &s)?;
        current = next;
        log.push(MetricFireStep {
            fired: s,
            distance: step,
            after: model.map.divisor_to_base(&current),
        });
    }
    Ok((model.map.divisor_to_base(&current), log))
}

/// Canonical break-divisor representative of a degree-g metric class.
/// q defaults to the first vertex; the result does not depend on it.
pub fn canonical_break_divisor_metric(
    g0: &WeightedGraph,
    d: &MetricDivisor,
    q: Option<&MetricPoint>,
) -> Result<MetricDivisor> {
    check_metric_degree(d, g0.genus())?;
    let q_point = match q {
        Some(p) => p.normalized(g0)?,
        None => MetricPoint::Vertex(g0.vertex_id(0).clone()),
    };
    let mut shifted = d.normalized(g0)?;
    shifted.add_coeff(&q_point, -1);
    let (oriented, _) = metric_make_q_orientable(g0, &shifted, &q_point)?;
    let mut out = oriented;
    out.add_coeff(&q_point, 1);
    Ok(out)
}

/// Membership certificate for the break locus: a spanning tree of the base
/// model and a perfect matching of the divisor's points onto the closures of
/// the non-tree edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakCertificate {
    pub tree: SpanningTree,
    pub assignment: Vec<(MetricPoint, EdgeId)>,
}

fn point_on_closure(g: &WeightedGraph, p: &MetricPoint, edge: &str) -> bool {
    match p {
        MetricPoint::Interior { edge: e, .. } => e == edge,
        MetricPoint::Vertex(v) => {
            let e = g.edge(edge).expect("edge of the graph");
            g.vertex_id(e.tail) == v || g.vertex_id(e.head) == v
        }
    }
}

fn point_strictly_interior(p: &MetricPoint, edge: &str) -> bool {
    matches!(p, MetricPoint::Interior { edge: e, .. } if e == edge)
}

/// Kuhn matching of point instances onto cotree edges.
fn match_points(
    instances: &[MetricPoint],
    cotree: &[EdgeId],
    allowed: impl Fn(&MetricPoint, &str) -> bool,
) -> Option<Vec<usize>> {
    let g = cotree.len();
    if instances.len() != g {
        return None;
    }
    let mut owner: Vec<Option<usize>> = vec![None; g];

    fn try_assign(
        i: usize,
        instances: &[MetricPoint],
        cotree: &[EdgeId],
        allowed: &impl Fn(&MetricPoint, &str) -> bool,
        owner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for j in 0..cotree.len() {
            if visited[j] || !allowed(&instances[i], &cotree[j]) {
                continue;
            }
            visited[j] = true;
            if owner[j].is_none()
                || try_assign(owner[j].unwrap(), instances, cotree, allowed, owner, visited)
            {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..instances.len() {
        let mut visited = vec![false; g];
        if !try_assign(i, instances, cotree, &allowed, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut assignment = vec![usize::MAX; g];
    for (j, o) in owner.iter().enumerate() {
        assignment[o.expect("perfect matching")] = j;
    }
    Some(assignment)
}

/// Searches the spanning trees of the base model for a matching of the
/// divisor's points onto non-tree edge closures.
pub fn break_certificate(g0: &WeightedGraph, d: &MetricDivisor) -> Result<Option<BreakCertificate>> {
    let d = d.normalized(g0)?;
    if !d.is_effective() || d.degree() != g0.genus() {
        return Ok(None);
    }
    let instances = d.point_instances();
    for tree in spanning_trees(g0) {
        let cotree = tree.cotree_edges(g0);
        if let Some(assignment) =
            match_points(&instances, &cotree, |p, e| point_on_closure(g0, p, e))
        {
            let assignment = assignment
                .iter()
                .enumerate()
                .map(|(i, &j)| (instances[i].clone(), cotree[j].clone()))
                .collect();
            return Ok(Some(BreakCertificate { tree, assignment }));
        }
    }
    Ok(None)
}

/// Sufficient condition for universal reducedness: some tree certifies the
/// divisor with every point strictly interior to its assigned non-tree edge.
pub fn is_rigid_interior(g0: &WeightedGraph, d: &MetricDivisor) -> Result<bool> {
    let d = d.normalized(g0)?;
    if !d.is_effective() || d.degree() != g0.genus() {
        return Ok(false);
    }
    let instances = d.point_instances();
    for tree in spanning_trees(g0) {
        let cotree = tree.cotree_edges(g0);
        if match_points(&instances, &cotree, point_strictly_interior).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}
