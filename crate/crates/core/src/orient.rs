use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::divisor::{chi_mask, fire_mask, Divisor};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, VertexSet, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeDirection {
    Forward,
    Backward,
}

/// Direction assignment per edge, relative to the reference orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Orientation {
    pub directions: BTreeMap<EdgeId, EdgeDirection>,
}

impl Orientation {
    pub fn direction(&self, edge: &str) -> Option<EdgeDirection> {
        self.directions.get(edge).copied()
    }

    /// Index of the vertex the edge points at.
    pub(crate) fn head_idx(&self, g: &WeightedGraph, edge_idx: usize) -> usize {
        let e = &g.edges()[edge_idx];
        match self.directions[&e.id] {
            EdgeDirection::Forward => e.head,
            EdgeDirection::Backward => e.tail,
        }
    }
}

/// D_O = sum over vertices of (indeg(p) - 1)(p); always of degree g - 1.
pub fn divisor_of_orientation(g: &WeightedGraph, o: &Orientation) -> Divisor {
    let mut dense = vec![-1i64; g.vertex_count()];
    for i in 0..g.edge_count() {
        dense[o.head_idx(g, i)] += 1;
    }
    Divisor::from_entries(
        dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (g.vertex_id(i).clone(), c)),
    )
}

/// Directed reachability of every vertex from q.
pub fn is_q_connected(g: &WeightedGraph, o: &Orientation, q: &str) -> bool {
    let qi = match g.vertex_idx(q) {
        Some(i) => i,
        None => return false,
    };
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    seen[qi] = true;
    let mut stack = vec![qi];
    while let Some(v) = stack.pop() {
        for i in 0..g.edge_count() {
            let e = &g.edges()[i];
            let head = o.head_idx(g, i);
            let tail = e.tail + e.head - head;
            if tail == v && !seen[head] {
                seen[head] = true;
                stack.push(head);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MinimizerKind {
    Minimal,
    MaximalAvoiding(VertexId),
}

/// A subset attaining the minimum of chi(., D), with the attained value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimizerReport {
    pub chi: i64,
    pub witness: VertexSet,
    pub kind: MinimizerKind,
}

struct Scan {
    pairs: Vec<(usize, usize)>,
    dense: Vec<i64>,
    n: usize,
}

impl Scan {
    fn new(g: &WeightedGraph, d: &Divisor) -> Result<Scan> {
        Ok(Scan {
            pairs: g.endpoint_pairs(),
            dense: d.to_dense(g)?,
            n: g.vertex_count(),
        })
    }

    fn chi(&self, mask: u64) -> i64 {
        chi_mask(&self.pairs, &self.dense, mask)
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    /// Minimum of chi over nonempty proper subsets, with the set of masks
    /// attaining it folded into (intersection, union).
    fn scan_proper(&self) -> Option<(i64, u64, u64)> {
        let full = self.full_mask();
        let mut best: Option<(i64, u64, u64)> = None;
        for mask in 1..full {
            let chi = self.chi(mask);
            best = Some(match best {
                None => (chi, mask, mask),
                Some((b, _, _)) if chi < b => (chi, mask, mask),
                Some((b, isect, union)) if chi == b => (b, isect & mask, union | mask),
                Some(keep) => keep,
            });
        }
        best
    }
}

/// Hakimi test outcome: a realizing orientation, or why none exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OrientableVerdict {
    Orientable(Orientation),
    WrongDegree { expected: i64, got: i64 },
    Deficient { set: VertexSet, chi: i64 },
}

impl OrientableVerdict {
    pub fn is_orientable(&self) -> bool {
        matches!(self, OrientableVerdict::Orientable(_))
    }
}

/// A divisor is orientable iff it has degree g - 1 and chi(S, D) >= 0 for
/// every nonempty subset S.
pub fn orientable_verdict(g: &WeightedGraph, d: &Divisor) -> Result<OrientableVerdict> {
    let expected = g.genus() - 1;
    if d.degree() != expected {
        return Ok(OrientableVerdict::WrongDegree {
            expected,
            got: d.degree(),
        });
    }
    let scan = Scan::new(g, d)?;
    let full = scan.full_mask();
    let mut worst: Option<(i64, u64)> = None;
    for mask in 1..full {
        let chi = scan.chi(mask);
        if chi < 0 && worst.is_none_or(|(w, _)| chi < w) {
            worst = Some((chi, mask));
        }
    }
    if let Some((chi, mask)) = worst {
        return Ok(OrientableVerdict::Deficient {
            set: g.mask_to_set(mask),
            chi,
        });
    }
    let o = realize_orientation(g, d)?;
    Ok(OrientableVerdict::Orientable(o))
}

pub fn is_orientable(g: &WeightedGraph, d: &Divisor) -> bool {
    matches!(
        orientable_verdict(g, d),
        Ok(OrientableVerdict::Orientable(_))
    )
}

/// Builds an orientation with indeg(p) = d(p) + 1 through an integral
/// max-flow that assigns each edge to one of its endpoints. Deterministic:
/// augmenting paths are searched in edge order, tail before head.
pub fn realize_orientation(g: &WeightedGraph, d: &Divisor) -> Result<Orientation> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let dense = d.to_dense(g)?;
    let demand: Vec<i64> = dense.iter().map(|&c| c + 1).collect();
    if demand.iter().any(|&c| c < 0) || demand.iter().sum::<i64>() != m as i64 {
        return Err(Error::NotOrientable);
    }

    // nodes: source, edge nodes, vertex nodes, sink
    let source = 0usize;
    let edge_node = |e: usize| 1 + e;
    let vertex_node = |v: usize| 1 + m + v;
    let sink = 1 + m + n;
    let mut flow = MaxFlow::new(sink + 1);
    for (i, e) in g.edges().iter().enumerate() {
        flow.arc(source, edge_node(i), 1);
        flow.arc(edge_node(i), vertex_node(e.tail), 1);
        flow.arc(edge_node(i), vertex_node(e.head), 1);
    }
    for (v, &cap) in demand.iter().enumerate() {
        flow.arc(vertex_node(v), sink, cap);
    }
    if flow.run(source, sink) != m as i64 {
        return Err(Error::NotOrientable);
    }

    let directions = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let dir = if flow.saturated(edge_node(i), vertex_node(e.head)) {
                EdgeDirection::Forward
            } else {
                EdgeDirection::Backward
            };
            (e.id.clone(), dir)
        })
        .collect();
    Ok(Orientation { directions })
}

/// Minimal deterministic Ford-Fulkerson on an explicit arc list.
struct MaxFlow {
    adjacency: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<i64>,
}

impl MaxFlow {
    fn new(nodes: usize) -> MaxFlow {
        MaxFlow {
            adjacency: vec![Vec::new(); nodes],
            to: Vec::new(),
            residual: Vec::new(),
        }
    }

    fn arc(&mut self, from: usize, to: usize, cap: i64) {
        self.adjacency[from].push(self.to.len());
        self.to.push(to);
        self.residual.push(cap);
        self.adjacency[to].push(self.to.len());
        self.to.push(from);
        self.residual.push(0);
    }

    fn augment(&mut self, v: usize, sink: usize, seen: &mut Vec<bool>) -> bool {
        if v == sink {
            return true;
        }
        seen[v] = true;
        for i in 0..self.adjacency[v].len() {
            let arc = self.adjacency[v][i];
            let w = self.to[arc];
            if self.residual[arc] > 0 && !seen[w] && self.augment(w, sink, seen) {
                self.residual[arc] -= 1;
                self.residual[arc ^ 1] += 1;
                return true;
            }
        }
        false
    }

    fn run(&mut self, source: usize, sink: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut seen = vec![false; self.adjacency.len()];
            if !self.augment(source, sink, &mut seen) {
                return total;
            }
            total += 1;
        }
    }

    /// True when the unit arc from->to carries flow.
    fn saturated(&self, from: usize, to: usize) -> bool {
        self.adjacency[from]
            .iter()
            .any(|&arc| self.to[arc] == to && arc % 2 == 0 && self.residual[arc] == 0)
    }
}

/// Unique minimal element of the set of chi-minimizers over nonempty proper
/// subsets. Guaranteed to exist when chi_D < 0 <= chi(G, D).
pub fn minimal_minimizer(g: &WeightedGraph, d: &Divisor) -> Result<MinimizerReport> {
    if g.vertex_count() < 2 {
        return Err(Error::NoProperSubset);
    }
    let scan = Scan::new(g, d)?;
    let (chi, isect, _) = scan.scan_proper().expect("graph has proper subsets");
    assert_eq!(
        scan.chi(isect),
        chi,
        "intersection of minimizers must itself minimize chi"
    );
    Ok(MinimizerReport {
        chi,
        witness: g.mask_to_set(isect),
        kind: MinimizerKind::Minimal,
    })
}

/// Unique maximal element of the chi-minimizers avoiding q, for an orientable
/// but not q-orientable divisor.
pub fn maximal_minimizer_avoiding_q(
    g: &WeightedGraph,
    d: &Divisor,
    q: &str,
) -> Result<MinimizerReport> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    if !is_orientable(g, d) {
        return Err(Error::NotOrientable);
    }
    let scan = Scan::new(g, d)?;
    let full = scan.full_mask();
    let mut union = 0u64;
    for mask in 1..=full {
        if mask >> qi & 1 == 1 {
            continue;
        }
        if scan.chi(mask) == 0 {
            union |= mask;
        }
    }
    if union == 0 {
        return Err(Error::AlreadyQOrientable);
    }
    assert_eq!(scan.chi(union), 0, "union of minimizers must minimize chi");
    Ok(MinimizerReport {
        chi: 0,
        witness: g.mask_to_set(union),
        kind: MinimizerKind::MaximalAvoiding(q.to_string()),
    })
}

/// Fires complements of minimal minimizers until the divisor is orientable.
/// Returns the orientable divisor and the fired sets in order.
pub fn make_orientable(g: &WeightedGraph, d: &Divisor) -> Result<(Divisor, Vec<VertexSet>)> {
    let expected = g.genus() - 1;
    if d.degree() != expected {
        return Err(Error::WrongDegree {
            expected,
            got: d.degree(),
        });
    }
    let mut current = d.clone();
    let mut log = Vec::new();
    loop {
        if g.vertex_count() < 2 {
            break;
        }
        let scan = Scan::new(g, &current)?;
        let (chi, isect, _) = scan.scan_proper().expect("graph has proper subsets");
        if chi >= 0 {
            break;
        }
        // chi_D < 0 and chi(G, D) = 0, so the intersection of minimizers is
        // itself the unique minimal minimizer
        assert_eq!(scan.chi(isect), chi);
        let complement = !isect & scan.full_mask();
        current = fire_mask(g, &current, complement);
        log.push(g.mask_to_set(complement));
    }
    Ok((current, log))
}

/// Two-phase algorithm: make orientable, then fire complements of maximal
/// minimizers avoiding q until no zero set avoiding q remains.
pub fn make_q_orientable(
    g: &WeightedGraph,
    d: &Divisor,
    q: &str,
) -> Result<(Divisor, Vec<VertexSet>)> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    let (mut current, mut log) = make_orientable(g, d)?;
    loop {
        match maximal_minimizer_avoiding_q(g, &current, g.vertex_id(qi)) {
            Err(Error::AlreadyQOrientable) => break,
            Err(e) => return Err(e),
            Ok(report) => {
                let witness_mask = g.set_to_mask(&report.witness)?;
                let complement = !witness_mask & ((1u64 << g.vertex_count()) - 1);
                current = fire_mask(g, &current, complement);
                log.push(g.mask_to_set(complement));
            }
        }
    }
    Ok((current, log))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum QOrientableVerdict {
    QOrientable(Orientation),
    WrongDegree { expected: i64, got: i64 },
    Deficient { set: VertexSet, chi: i64 },
    /// A nonempty set avoiding q with chi = 0; edges leave it, so q cannot
    /// reach into it.
    ZeroSetAvoidingQ { set: VertexSet },
}

impl QOrientableVerdict {
    pub fn is_q_orientable(&self) -> bool {
        matches!(self, QOrientableVerdict::QOrientable(_))
    }
}

/// q-orientable iff orientable and chi(S, D) > 0 for every nonempty subset
/// avoiding q. Any realizing orientation is then q-connected.
pub fn q_orientable_verdict(
    g: &WeightedGraph,
    d: &Divisor,
    q: &str,
) -> Result<QOrientableVerdict> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    match orientable_verdict(g, d)? {
        OrientableVerdict::WrongDegree { expected, got } => {
            Ok(QOrientableVerdict::WrongDegree { expected, got })
        }
        OrientableVerdict::Deficient { set, chi } => {
            Ok(QOrientableVerdict::Deficient { set, chi })
        }
        OrientableVerdict::Orientable(o) => {
            let scan = Scan::new(g, d)?;
            let full = scan.full_mask();
            for mask in 1..=full {
                if mask >> qi & 1 == 1 {
                    continue;
                }
                if scan.chi(mask) == 0 {
                    return Ok(QOrientableVerdict::ZeroSetAvoidingQ {
                        set: g.mask_to_set(mask),
                    });
                }
            }
            Ok(QOrientableVerdict::QOrientable(o))
        }
    }
}

pub fn is_q_orientable(g: &WeightedGraph, d: &Divisor, q: &str) -> bool {
    matches!(
        q_orientable_verdict(g, d, q),
        Ok(QOrientableVerdict::QOrientable(_))
    )
}

/// Canonical break-divisor representative of a degree-g class, computed
/// through the q-orientable pipeline with the given base point.
pub fn canonical_break_divisor_via(
    g: &WeightedGraph,
    d: &Divisor,
    q: &str,
) -> Result<Divisor> {
    let expected = g.genus();
    if d.degree() != expected {
        return Err(Error::WrongDegree {
            expected,
            got: d.degree(),
        });
    }
    let mut shifted = d.clone();
    shifted.add_coeff(q, -1);
    let (oriented, _) = make_q_orientable(g, &shifted, q)?;
    let mut out = oriented;
    out.add_coeff(q, 1);
    Ok(out)
}

/// Same with q fixed to the first vertex; the result does not depend on the
/// choice of q.
pub fn canonical_break_divisor(g: &WeightedGraph, d: &Divisor) -> Result<Divisor> {
    canonical_break_divisor_via(g, d, &g.vertex_id(0).clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BreakDivisorVerdict {
    IsBreak,
    NotEffective { vertex: VertexId },
    WrongDegree { expected: i64, got: i64 },
    Obstruction { set: VertexSet, chi: i64 },
}

impl BreakDivisorVerdict {
    pub fn is_break(&self) -> bool {
        matches!(self, BreakDivisorVerdict::IsBreak)
    }
}

/// Integral break divisor test: effective, degree g, and d - (q) q-orientable
/// for q the first vertex.
pub fn break_divisor_verdict(g: &WeightedGraph, d: &Divisor) -> Result<BreakDivisorVerdict> {
    if let Some(v) = d.iter().find(|(_, c)| *c < 0).map(|(v, _)| v.clone()) {
        return Ok(BreakDivisorVerdict::NotEffective { vertex: v });
    }
    let expected = g.genus();
    if d.degree() != expected {
        return Ok(BreakDivisorVerdict::WrongDegree {
            expected,
            got: d.degree(),
        });
    }
    let q = g.vertex_id(0).clone();
    let mut shifted = d.clone();
    shifted.add_coeff(&q, -1);
    Ok(match q_orientable_verdict(g, &shifted, &q)? {
        QOrientableVerdict::QOrientable(_) => BreakDivisorVerdict::IsBreak,
        QOrientableVerdict::Deficient { set, chi } => {
            BreakDivisorVerdict::Obstruction { set, chi }
        }
        QOrientableVerdict::ZeroSetAvoidingQ { set } => {
            BreakDivisorVerdict::Obstruction { set, chi: 0 }
        }
        QOrientableVerdict::WrongDegree { expected, got } => {
            BreakDivisorVerdict::WrongDegree {
                expected: expected + 1,
                got: got + 1,
            }
        }
    })
}

pub fn is_integral_break_divisor(g: &WeightedGraph, d: &Divisor) -> bool {
    matches!(break_divisor_verdict(g, d), Ok(BreakDivisorVerdict::IsBreak))
}

/// All integral break divisors, ordered lexicographically by coefficient
/// vector in vertex order, largest leading coefficient first. Their number
/// equals the number of spanning trees.
pub fn enumerate_integral_break_divisors(g: &WeightedGraph) -> Vec<Divisor> {
    let n = g.vertex_count();
    let genus = g.genus();
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; n];

    fn recurse(
        g: &WeightedGraph,
        coeffs: &mut Vec<i64>,
        pos: usize,
        remaining: i64,
        out: &mut Vec<Divisor>,
    ) {
        if pos + 1 == coeffs.len() {
            coeffs[pos] = remaining;
            let d = Divisor::from_entries(
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| (g.vertex_id(i).clone(), c)),
            );
            if is_integral_break_divisor(g, &d) {
                out.push(d);
            }
            coeffs[pos] = 0;
            return;
        }
        for c in (0..=remaining).rev() {
            coeffs[pos] = c;
            recurse(g, coeffs, pos + 1, remaining - c, out);
        }
        coeffs[pos] = 0;
    }

    if n == 1 {
        // single vertex, genus 0: only the zero divisor
        if genus == 0 {
            out.push(Divisor::zero());
        }
        return out;
    }
    recurse(g, &mut coeffs, 0, genus, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeEnd {
    Tail,
    Head,
}

/// One broken edge germ: the point together with the tangent direction,
/// given as the incident edge and which of its ends the point is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakPair {
    pub point: VertexId,
    pub edge: EdgeId,
    pub end: EdgeEnd,
}

/// g pairs whose germ deletion leaves a spanning tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakSet {
    pub pairs: Vec<BreakPair>,
}

impl BreakSet {
    pub fn underlying_divisor(&self) -> Divisor {
        Divisor::from_entries(self.pairs.iter().map(|p| (p.point.clone(), 1)))
    }
}

/// True when the broken edges are distinct and their removal leaves a
/// spanning tree.
pub fn is_valid_break_set(g: &WeightedGraph, bs: &BreakSet) -> bool {
    let mut removed: Vec<usize> = Vec::new();
    for p in &bs.pairs {
        match g.edge_idx(&p.edge) {
            Some(i) if !removed.contains(&i) => removed.push(i),
            _ => return false,
        }
    }
    if removed.len() as i64 != g.genus() {
        return false;
    }
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut components = n;
    for (i, e) in g.edges().iter().enumerate() {
        if removed.contains(&i) {
            continue;
        }
        let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}

/// Breaks all incoming edges at q and all but one incoming edge elsewhere.
/// The kept edges are the parent edges of a breadth-first arborescence from
/// q, grown by lowest edge id, so they always form a spanning tree.
pub fn break_set_from_orientation(
    g: &WeightedGraph,
    o: &Orientation,
    q: &str,
) -> Result<BreakSet> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    if !is_q_connected(g, o, q) {
        return Err(Error::NotQConnected);
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut reached = vec![false; n];
    reached[qi] = true;
    let mut kept: Vec<Option<usize>> = vec![None; n];
    for _ in 1..n {
        let mut pick: Option<(usize, usize)> = None;
        for ei in 0..m {
            let head = o.head_idx(g, ei);
            let e = &g.edges()[ei];
            let tail = e.tail + e.head - head;
            if reached[tail] && !reached[head] {
                pick = Some((ei, head));
                break;
            }
        }
        let (ei, head) = pick.expect("q-connected orientation reaches every vertex");
        reached[head] = true;
        kept[head] = Some(ei);
    }

    let mut pairs = Vec::new();
    for (v, &kept_edge) in kept.iter().enumerate() {
        for ei in 0..m {
            if o.head_idx(g, ei) != v {
                continue;
            }
            if v != qi && kept_edge == Some(ei) {
                continue;
            }
            let e = &g.edges()[ei];
            let end = if e.tail == v {
                EdgeEnd::Tail
            } else {
                EdgeEnd::Head
            };
            pairs.push(BreakPair {
                point: g.vertex_id(v).clone(),
                edge: e.id.clone(),
                end,
            });
        }
    }
    assert_eq!(pairs.len() as i64, g.genus());
    Ok(BreakSet { pairs })
}
