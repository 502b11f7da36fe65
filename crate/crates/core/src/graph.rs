use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type VertexId = String;
pub type EdgeId = String;

/// Canonical sorted vertex subset.
pub type VertexSet = BTreeSet<VertexId>;

/// Wire format for graphs:
/// `{"vertices":["u","v"],"edges":[{"id":"a","ends":["u","v"],"length":"2"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
    pub length: Rational,
}

/// An edge of a validated graph. The stored endpoint order is the reference
/// orientation: `tail` -> `head`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
    pub length: Rational,
}

/// Loopless connected multigraph with positive rational edge lengths.
/// Vertex and edge order is the input order and fixes every deterministic
/// choice made elsewhere in the crate.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    vertex_index: HashMap<VertexId, usize>,
    edge_index: HashMap<EdgeId, usize>,
    incidence: Vec<Vec<usize>>,
}

impl WeightedGraph {
    /// Validates a raw description and builds the graph.
    pub fn validate(raw: &RawGraph) -> Result<WeightedGraph> {
        let mut vertex_index = HashMap::new();
        for (i, v) in raw.vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (i, e) in raw.edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            let tail = *vertex_index
                .get(&e.ends[0])
                .ok_or_else(|| Error::UnknownVertex(e.ends[0].clone()))?;
            let head = *vertex_index
                .get(&e.ends[1])
                .ok_or_else(|| Error::UnknownVertex(e.ends[1].clone()))?;
            if tail == head {
                return Err(Error::LoopEdge(e.id.clone()));
            }
            if !e.length.is_positive() {
                return Err(Error::NonPositiveLength(e.id.clone()));
            }
            edges.push(Edge {
                id: e.id.clone(),
                tail,
                head,
                length: e.length.clone(),
            });
        }
        if raw.vertices.is_empty() {
            return Err(Error::DisconnectedGraph);
        }

        let mut incidence = vec![Vec::new(); raw.vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.tail].push(i);
            incidence[e.head].push(i);
        }

        let g = WeightedGraph {
            vertices: raw.vertices.clone(),
            edges,
            vertex_index,
            edge_index,
            incidence,
        };
        if !g.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(g)
    }

    /// Convenience constructor from `(id, tail, head, length)` tuples.
    pub fn from_parts(
        vertices: &[&str],
        edges: &[(&str, &str, &str, Rational)],
    ) -> Result<WeightedGraph> {
        let raw = RawGraph {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, u, v, len)| RawEdge {
                    id: id.to_string(),
                    ends: [u.to_string(), v.to_string()],
                    length: len.clone(),
                })
                .collect(),
        };
        WeightedGraph::validate(&raw)
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    ends: [
                        self.vertices[e.tail].clone(),
                        self.vertices[e.head].clone(),
                    ],
                    length: e.length.clone(),
                })
                .collect(),
        }
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &ei in &self.incidence[v] {
                let e = &self.edges[ei];
                let w = if e.tail == v { e.head } else { e.tail };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number g = |E| - |V| + 1.
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_id(&self, idx: usize) -> &VertexId {
        &self.vertices[idx]
    }

    pub fn vertex_idx(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edge_idx(id).map(|i| &self.edges[i])
    }

    pub fn edge_length(&self, id: &str) -> Option<&Rational> {
        self.edge(id).map(|e| &e.length)
    }

    /// Edge indices incident to the vertex (parallel edges listed once each).
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    pub(crate) fn set_to_indices(&self, s: &VertexSet) -> Result<Vec<usize>> {
        s.iter()
            .map(|v| {
                self.vertex_idx(v)
                    .ok_or_else(|| Error::UnknownVertex(v.clone()))
            })
            .collect()
    }

    pub(crate) fn set_to_mask(&self, s: &VertexSet) -> Result<u64> {
        let mut mask = 0u64;
        for idx in self.set_to_indices(s)? {
            mask |= 1 << idx;
        }
        Ok(mask)
    }

    pub(crate) fn mask_to_set(&self, mask: u64) -> VertexSet {
        (0..self.vertices.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.vertices[i].clone())
            .collect()
    }

    pub(crate) fn endpoint_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.tail, e.head)).collect()
    }
}

/// Spanning tree as an edge-id subset; |T| = |V| - 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanningTree {
    pub edges: BTreeSet<EdgeId>,
}

impl SpanningTree {
    pub fn contains(&self, edge: &str) -> bool {
        self.edges.contains(edge)
    }

    /// Non-tree edges in graph edge order; these index the fundamental cycles.
    pub fn cotree_edges(&self, g: &WeightedGraph) -> Vec<EdgeId> {
        g.edges()
            .iter()
            .filter(|e| !self.contains(&e.id))
            .map(|e| e.id.clone())
            .collect()
    }

    pub(crate) fn edge_indices(&self, g: &WeightedGraph) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|id| g.edge_idx(id))
            .collect();
        out.sort_unstable();
        out
    }
}

/// All spanning trees, each exactly once, in lexicographic order of their
/// edge-index sets (graph edge order). Exhaustive by design; intended for
/// graphs with at most a couple dozen edges.
pub fn spanning_trees(g: &WeightedGraph) -> Vec<SpanningTree> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if n == 1 {
        out.push(SpanningTree {
            edges: BTreeSet::new(),
        });
        return out;
    }

    // Include/exclude each edge in index order; include-first yields
    // lexicographic order. A partial choice is abandoned when the remaining
    // edges cannot complete a tree.
    fn find(p: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while p[r] != r {
            r = p[r];
        }
        let mut v = v;
        while p[v] != r {
            let next = p[v];
            p[v] = r;
            v = next;
        }
        r
    }

    fn recurse(
        g: &WeightedGraph,
        next_edge: usize,
        chosen: &mut Vec<usize>,
        parent: &Vec<usize>,
        out: &mut Vec<SpanningTree>,
    ) {
        let n = g.vertex_count();
        let m = g.edge_count();
        if chosen.len() == n - 1 {
            out.push(SpanningTree {
                edges: chosen.iter().map(|&i| g.edges()[i].id.clone()).collect(),
            });
            return;
        }
        if next_edge >= m || chosen.len() + (m - next_edge) < n - 1 {
            return;
        }
        let e = &g.edges()[next_edge];
        let mut p = parent.clone();
        let (ru, rv) = (find(&mut p, e.tail), find(&mut p, e.head));
        if ru != rv {
            p[ru] = rv;
            chosen.push(next_edge);
            recurse(g, next_edge + 1, chosen, &p, out);
            chosen.pop();
        }
        recurse(g, next_edge + 1, chosen, parent, out);
    }

    let parent: Vec<usize> = (0..n).collect();
    recurse(g, 0, &mut Vec::new(), &parent, &mut out);
    out
}

/// Number of edges with one end in `s` and the other in `t` for disjoint
/// sets; with `s == t` it counts the edges internal to the set.
pub fn cut_count(g: &WeightedGraph, s: &VertexSet, t: &VertexSet) -> Result<usize> {
    let sm = g.set_to_mask(s)?;
    let tm = g.set_to_mask(t)?;
    if sm == tm {
        return Ok(internal_edge_count_mask(g, sm));
    }
    if sm & tm != 0 {
        return Err(Error::OverlappingSets);
    }
    let mut count = 0;
    for e in g.edges() {
        let (a, b) = (1u64 << e.tail, 1u64 << e.head);
        if (a & sm != 0 && b & tm != 0) || (a & tm != 0 && b & sm != 0) {
            count += 1;
        }
    }
    Ok(count)
}

pub(crate) fn internal_edge_count_mask(g: &WeightedGraph, mask: u64) -> usize {
    g.edges()
        .iter()
        .filter(|e| mask >> e.tail & 1 == 1 && mask >> e.head & 1 == 1)
        .count()
}

/// Integer 1-chain supported on edges, with respect to the reference
/// orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleVector {
    pub coeffs: BTreeMap<EdgeId, i64>,
}

impl CycleVector {
    pub fn coefficient(&self, edge: &str) -> i64 {
        self.coeffs.get(edge).copied().unwrap_or(0)
    }
}

/// Signed coefficient sum at every vertex; all-zero for a cycle.
pub fn chain_boundary(g: &WeightedGraph, c: &CycleVector) -> BTreeMap<VertexId, i64> {
    let mut boundary: BTreeMap<VertexId, i64> = BTreeMap::new();
    for (id, &coeff) in &c.coeffs {
        if let Some(e) = g.edge(id) {
            *boundary.entry(g.vertex_id(e.head).clone()).or_insert(0) += coeff;
            *boundary.entry(g.vertex_id(e.tail).clone()).or_insert(0) -= coeff;
        }
    }
    boundary.retain(|_, v| *v != 0);
    boundary
}

/// Walks the tree from `from` and records parent edges.
/// Returns, per vertex, the (edge index, sign) path step toward `from`.
fn tree_parents(
    g: &WeightedGraph,
    tree_edges: &[usize],
    from: usize,
) -> Vec<Option<(usize, i64)>> {
    let n = g.vertex_count();
    let mut parent: Vec<Option<(usize, i64)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &ei in tree_edges {
            let e = &g.edges()[ei];
            let (a, b) = (e.tail, e.head);
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                // sign +1 when the step v -> w follows the reference direction
                let sign = if a == v { 1 } else { -1 };
                parent[w] = Some((ei, sign));
                queue.push_back(w);
            }
        }
    }
    parent
}

/// Chain of the unique tree path `from` -> `to`: edge index -> signed count.
pub(crate) fn tree_path_chain(
    g: &WeightedGraph,
    tree_edges: &[usize],
    from: usize,
    to: usize,
) -> BTreeMap<usize, i64> {
    let parent = tree_parents(g, tree_edges, from);
    let mut chain: BTreeMap<usize, i64> = BTreeMap::new();
    let mut v = to;
    while v != from {
        let (ei, sign) = parent[v].expect("tree spans all vertices");
        // the parent step goes toward `to`, so it contributes with its sign
        *chain.entry(ei).or_insert(0) += sign;
        let e = &g.edges()[ei];
        v = if e.head == v { e.tail } else { e.head };
    }
    chain.retain(|_, c| *c != 0);
    chain
}

/// The unique cycle supported on T and the non-tree edge `e`, normalized to
/// coefficient +1 on `e`.
pub fn fundamental_cycle(g: &WeightedGraph, t: &SpanningTree, e: &str) -> Result<CycleVector> {
    let ei = g.edge_idx(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
    if t.contains(e) {
        return Err(Error::EdgeInTree(e.to_string()));
    }
    let tree_edges = t.edge_indices(g);
    let edge = &g.edges()[ei];
    // e runs tail -> head; close up with the tree path head -> tail
    let path = tree_path_chain(g, &tree_edges, edge.head, edge.tail);
    let mut coeffs: BTreeMap<EdgeId, i64> = BTreeMap::new();
    coeffs.insert(edge.id.clone(), 1);
    for (idx, c) in path {
        coeffs.insert(g.edges()[idx].id.clone(), c);
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(CycleVector { coeffs })
}

/// Where each slice of a refined edge went: absolute offsets are measured
/// from the original tail.
#[derive(Debug, Clone)]
pub struct RefineMap {
    pub segments: BTreeMap<EdgeId, Vec<SegmentSpan>>,
    pub new_vertices: BTreeMap<VertexId, (EdgeId, Rational)>,
}

#[derive(Debug, Clone)]
pub struct SegmentSpan {
    pub id: EdgeId,
    pub start: Rational,
    pub end: Rational,
}

/// Subdivides edges at the given interior offsets, preserving total length.
/// New vertex ids are `{edge}@{k}` and segment ids `{edge}:{k}`, 1-based in
/// offset order.
pub fn refine_with_map(
    g: &WeightedGraph,
    spec: &[(EdgeId, Vec<Rational>)],
) -> Result<(WeightedGraph, RefineMap)> {
    let mut by_edge: BTreeMap<usize, &Vec<Rational>> = BTreeMap::new();
    for (id, offsets) in spec {
        let ei = g
            .edge_idx(id)
            .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
        if by_edge.insert(ei, offsets).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
        let len = &g.edges()[ei].length;
        let mut prev: Option<&Rational> = None;
        for o in offsets {
            let increasing = prev.is_none_or(|p| p < o);
            if !increasing || !o.is_positive() || o >= len {
                return Err(Error::OffsetOutOfRange(id.clone()));
            }
            prev = Some(o);
        }
    }

    let mut raw = RawGraph {
        vertices: g.vertices().to_vec(),
        edges: Vec::new(),
    };
    let mut map = RefineMap {
        segments: BTreeMap::new(),
        new_vertices: BTreeMap::new(),
    };
    for (ei, e) in g.edges().iter().enumerate() {
        let offsets = match by_edge.get(&ei) {
            Some(o) if !o.is_empty() => *o,
            _ => {
                raw.edges.push(RawEdge {
                    id: e.id.clone(),
                    ends: [
                        g.vertex_id(e.tail).clone(),
                        g.vertex_id(e.head).clone(),
                    ],
                    length: e.length.clone(),
                });
                continue;
            }
        };
        let mut cuts: Vec<Rational> = vec![Rational::zero()];
        cuts.extend(offsets.iter().cloned());
        cuts.push(e.length.clone());
        let mut point_ids = vec![g.vertex_id(e.tail).clone()];
        for k in 1..=offsets.len() {
            let vid = format!("{}@{}", e.id, k);
            raw.vertices.push(vid.clone());
            map.new_vertices
                .insert(vid.clone(), (e.id.clone(), offsets[k - 1].clone()));
            point_ids.push(vid);
        }
        point_ids.push(g.vertex_id(e.head).clone());
        let mut spans = Vec::new();
        for k in 0..cuts.len() - 1 {
            let sid = format!("{}:{}", e.id, k + 1);
            raw.edges.push(RawEdge {
                id: sid.clone(),
                ends: [point_ids[k].clone(), point_ids[k + 1].clone()],
                length: &cuts[k + 1] - &cuts[k],
            });
            spans.push(SegmentSpan {
                id: sid,
                start: cuts[k].clone(),
                end: cuts[k + 1].clone(),
            });
        }
        map.segments.insert(e.id.clone(), spans);
    }
    let refined = WeightedGraph::validate(&raw)?;
    Ok((refined, map))
}

/// Refinement without the span bookkeeping.
pub fn refine(g: &WeightedGraph, spec: &[(EdgeId, Vec<Rational>)]) -> Result<WeightedGraph> {
    refine_with_map(g, spec).map(|(g, _)| g)
}
