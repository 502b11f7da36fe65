use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{
    fundamental_cycle, spanning_trees, EdgeId, SpanningTree, VertexId, WeightedGraph,
};
use crate::metric::{MetricDivisor, MetricPoint};
use crate::rational::Rational;

/// Exact determinant by fraction-free Bareiss elimination. Rows are cleared
/// of denominators first so the elimination runs over the integers.
pub fn det_exact(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");

    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in rows {
        let mut lcm = BigInt::one();
        for x in row {
            lcm = lcm.lcm(x.denom());
        }
        scale *= &lcm;
        m.push(
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
    }

    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                None => return Rational::zero(),
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                debug_assert!((&num % &prev).is_zero());
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut det = Rational::from_bigints(m[n - 1][n - 1].clone(), scale);
    if sign < 0 {
        det = -det;
    }
    det
}

/// Solves M x = b for square nonsingular M by Cramer's rule.
pub fn solve_exact(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    assert_eq!(b.len(), n);
    let det = det_exact(m);
    if det.is_zero() {
        return None;
    }
    let mut x = Vec::with_capacity(n);
    for col in 0..n {
        let replaced: Vec<Vec<Rational>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r[col] = b[i].clone();
                r
            })
            .collect();
        x.push(det_exact(&replaced) / det.clone());
    }
    Some(x)
}

/// Length-weighted Gram matrix of the fundamental-cycle basis of a spanning
/// tree: entry (i, j) is sum over edges of l(e) c_i(e) c_j(e).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<Rational>>,
    pub tree: SpanningTree,
    /// Non-tree edges in graph edge order; row i belongs to basis[i].
    pub basis: Vec<EdgeId>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Exact positive-definiteness via leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.size()).all(|k| {
            let minor: Vec<Vec<Rational>> = self.entries[..k]
                .iter()
                .map(|row| row[..k].to_vec())
                .collect();
            det_exact(&minor).is_positive()
        })
    }
}

/// Dense fundamental-cycle coefficients for the cotree edges of `t`.
fn cycle_rows(g: &WeightedGraph, t: &SpanningTree) -> Result<(Vec<EdgeId>, Vec<Vec<i64>>)> {
    let basis = t.cotree_edges(g);
    let mut rows = Vec::with_capacity(basis.len());
    for e in &basis {
        let cycle = fundamental_cycle(g, t, e)?;
        let mut dense = vec![0i64; g.edge_count()];
        for (id, &c) in &cycle.coeffs {
            dense[g.edge_idx(id).expect("cycle edges belong to the graph")] = c;
        }
        rows.push(dense);
    }
    Ok((basis, rows))
}

pub fn gram_matrix(g: &WeightedGraph, t: &SpanningTree) -> Result<GramMatrix> {
    let (basis, rows) = cycle_rows(g, t)?;
    let lengths: Vec<Rational> = g.edges().iter().map(|e| e.length.clone()).collect();
    let k = basis.len();
    let mut entries = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let mut sum = Rational::zero();
            for (e, len) in lengths.iter().enumerate() {
                let prod = rows[i][e] * rows[j][e];
                if prod != 0 {
                    sum += len * &Rational::from_int(prod);
                }
            }
            entries[i][j] = sum.clone();
            entries[j][i] = sum;
        }
    }
    Ok(GramMatrix {
        entries,
        tree: t.clone(),
        basis,
    })
}

/// Which per-edge conductance enters the reduced Laplacian and the coweight:
/// the edge length itself, or its reciprocal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConductanceMode {
    Length,
    InverseLength,
}

impl ConductanceMode {
    fn conductance(&self, length: &Rational) -> Rational {
        match self {
            ConductanceMode::Length => length.clone(),
            ConductanceMode::InverseLength => length.recip(),
        }
    }
}

/// w(T) = product of lengths outside T; w'(T) = product of conductances
/// inside T under the chosen convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeWeight {
    pub tree: SpanningTree,
    pub w: Rational,
    pub w_prime: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeWeightTable {
    pub weights: Vec<TreeWeight>,
    pub total_w: Rational,
    pub total_w_prime: Rational,
}

pub fn tree_weights(g: &WeightedGraph, mode: ConductanceMode) -> TreeWeightTable {
    let mut weights = Vec::new();
    let mut total_w = Rational::zero();
    let mut total_w_prime = Rational::zero();
    for tree in spanning_trees(g) {
        let mut w = Rational::one();
        let mut w_prime = Rational::one();
        for e in g.edges() {
            if tree.contains(&e.id) {
                w_prime *= mode.conductance(&e.length);
            } else {
                w *= e.length.clone();
            }
        }
        total_w += &w;
        total_w_prime += &w_prime;
        weights.push(TreeWeight { tree, w, w_prime });
    }
    TreeWeightTable {
        weights,
        total_w,
        total_w_prime,
    }
}

/// det(Gram) compared against the total tree weight w(G); the determinant is
/// also required to agree across all fundamental-cycle bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualKirchhoffReport {
    pub holds: bool,
    pub det: Rational,
    pub total_weight: Rational,
    pub tree_count: usize,
}

pub fn dual_kirchhoff_check(g: &WeightedGraph) -> Result<DualKirchhoffReport> {
    let trees = spanning_trees(g);
    let table = tree_weights(g, ConductanceMode::Length);
    let mut det: Option<Rational> = None;
    let mut all_equal = true;
    for t in &trees {
        let d = det_exact(&gram_matrix(g, t)?.entries);
        match &det {
            None => det = Some(d),
            Some(first) if *first != d => all_equal = false,
            _ => {}
        }
    }
    let det = det.unwrap_or_else(Rational::one);
    let holds = all_equal && det == table.total_w;
    Ok(DualKirchhoffReport {
        holds,
        det,
        total_weight: table.total_w,
        tree_count: trees.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellVolume {
    pub tree: SpanningTree,
    pub weight: Rational,
    /// Squared cell volume w(T)^2 / det(M); exact.
    pub vol_sq: Rational,
    /// Fraction of the torus the cell covers: w(T) / det(M).
    pub vol_ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeReport {
    pub det: Rational,
    pub cells: Vec<CellVolume>,
}

impl VolumeReport {
    pub fn ratio_sum(&self) -> Rational {
        self.cells.iter().map(|c| c.vol_ratio.clone()).sum()
    }
}

pub fn cell_volumes(g: &WeightedGraph) -> Result<VolumeReport> {
    let trees = spanning_trees(g);
    let det = det_exact(&gram_matrix(g, &trees[0])?.entries);
    let table = tree_weights(g, ConductanceMode::Length);
    let cells = table
        .weights
        .into_iter()
        .map(|tw| CellVolume {
            vol_sq: &tw.w * &tw.w / det.clone(),
            vol_ratio: &tw.w / &det,
            tree: tw.tree,
            weight: tw.w,
        })
        .collect();
    Ok(VolumeReport { det, cells })
}

/// Coordinates of the orthogonal projection of a 1-chain onto the cycle
/// space, in the fundamental-cycle basis of `t_base`: solves M x = <chain, c_i>.
pub fn project_chain(
    g: &WeightedGraph,
    t_base: &SpanningTree,
    chain: &BTreeMap<EdgeId, Rational>,
) -> Result<Vec<Rational>> {
    let gram = gram_matrix(g, t_base)?;
    let (_, rows) = cycle_rows(g, t_base)?;
    let mut rhs = Vec::with_capacity(gram.size());
    for row in &rows {
        let mut inner = Rational::zero();
        for (id, coeff) in chain {
            let ei = g
                .edge_idx(id)
                .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
            if row[ei] != 0 {
                inner += &g.edges()[ei].length * &(coeff * &Rational::from_int(row[ei]));
            }
        }
        rhs.push(inner);
    }
    if gram.size() == 0 {
        return Ok(Vec::new());
    }
    Ok(solve_exact(&gram.entries, &rhs).expect("Gram matrix is positive definite"))
}

/// Projection of a single oriented non-tree edge: l(e) times the matching
/// row of the inverse Gram matrix.
pub fn edge_projection(g: &WeightedGraph, t: &SpanningTree, e: &str) -> Result<Vec<Rational>> {
    let ei = g.edge_idx(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
    if t.contains(e) {
        return Err(Error::EdgeInTree(e.to_string()));
    }
    let chain = BTreeMap::from([(g.edges()[ei].id.clone(), Rational::one())]);
    project_chain(g, t, &chain)
}

/// Point of the Jacobian torus in the fundamental-cycle basis of a fixed
/// tree, with coordinates reduced into [0, 1). Coordinates from different
/// bases compare unequal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacCoordinate {
    pub coords: Vec<Rational>,
    pub base_point: VertexId,
    pub base_tree: SpanningTree,
}

/// Abel-Jacobi coordinates of a metric divisor: tree paths from q to each
/// point (with a fractional final edge segment for interior points) are
/// projected onto the cycle space and reduced modulo the integer lattice.
pub fn abel_jacobi(
    g: &WeightedGraph,
    d: &MetricDivisor,
    q: &str,
    t_base: &SpanningTree,
) -> Result<JacCoordinate> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    let d = d.normalized(g)?;
    let tree_edges = t_base.edge_indices(g);
    let mut chain: BTreeMap<EdgeId, Rational> = BTreeMap::new();
    let add_path_to_vertex = |chain: &mut BTreeMap<EdgeId, Rational>, v: usize, mult: i64| {
        for (ei, c) in crate::graph::tree_path_chain(g, &tree_edges, qi, v) {
            let entry = chain
                .entry(g.edges()[ei].id.clone())
                .or_insert_with(Rational::zero);
            *entry += Rational::from_int(c * mult);
        }
    };
    for (p, mult) in d.iter() {
        match p {
            MetricPoint::Vertex(v) => {
                let vi = g
                    .vertex_idx(v)
                    .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
                add_path_to_vertex(&mut chain, vi, mult);
            }
            MetricPoint::Interior { edge, offset } => {
                let e = g
                    .edge(edge)
                    .ok_or_else(|| Error::UnknownEdge(edge.clone()))?;
                add_path_to_vertex(&mut chain, e.tail, mult);
                let entry = chain.entry(edge.clone()).or_insert_with(Rational::zero);
                *entry += offset / &e.length * Rational::from_int(mult);
            }
        }
    }
    chain.retain(|_, c| !c.is_zero());
    let projected = project_chain(g, t_base, &chain)?;
    Ok(JacCoordinate {
        coords: projected.into_iter().map(|x| x.rem_unit()).collect(),
        base_point: q.to_string(),
        base_tree: t_base.clone(),
    })
}

pub fn abel_jacobi_divisor(
    g: &WeightedGraph,
    d: &Divisor,
    q: &str,
    t_base: &SpanningTree,
) -> Result<JacCoordinate> {
    abel_jacobi(g, &MetricDivisor::from_divisor(d), q, t_base)
}

/// Equivalence through the torus coordinates: equal degree and equal
/// Abel-Jacobi image.
pub fn jac_equivalent(
    g: &WeightedGraph,
    d1: &MetricDivisor,
    d2: &MetricDivisor,
    q: &str,
    t_base: &SpanningTree,
) -> Result<bool> {
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    Ok(abel_jacobi(g, d1, q, t_base)? == abel_jacobi(g, d2, q, t_base)?)
}

/// Determinant of the q-reduced weighted Laplacian, with per-edge
/// conductance chosen by the mode. Equals the conductance-weighted tree sum.
pub fn reduced_laplacian_det(g: &WeightedGraph, q: &str, mode: ConductanceMode) -> Result<Rational> {
    let qi = g
        .vertex_idx(q)
        .ok_or_else(|| Error::UnknownVertex(q.to_string()))?;
    let n = g.vertex_count();
    let mut lap = vec![vec![Rational::zero(); n]; n];
    for e in g.edges() {
        let c = mode.conductance(&e.length);
        lap[e.tail][e.tail] += &c;
        lap[e.head][e.head] += &c;
        lap[e.tail][e.head] -= &c;
        lap[e.head][e.tail] -= &c;
    }
    let reduced: Vec<Vec<Rational>> = lap
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != qi)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != qi)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect();
    Ok(det_exact(&reduced))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchyBinetReport {
    pub holds: bool,
    pub sum: Rational,
    pub det: Rational,
    /// Per-subset contributions: squared minor times the length product.
    pub terms: Vec<(BTreeSet<EdgeId>, Rational)>,
}

/// Expands det(C D^2 C^t) over g-column subsets: each term is a squared
/// unimodular minor times its length product, and the nonzero terms are
/// exactly the weights of complementary spanning trees.
pub fn cauchy_binet_check(g: &WeightedGraph, t: &SpanningTree) -> Result<CauchyBinetReport> {
    let gram = gram_matrix(g, t)?;
    let det = det_exact(&gram.entries);
    let (_, rows) = cycle_rows(g, t)?;
    let k = rows.len();
    let m = g.edge_count();

    let tree_sets: BTreeMap<BTreeSet<EdgeId>, Rational> = tree_weights(g, ConductanceMode::Length)
        .weights
        .into_iter()
        .map(|tw| (tw.tree.edges.clone(), tw.w))
        .collect();

    let mut sum = Rational::zero();
    let mut terms = Vec::new();
    let mut holds = true;
    for subset in combinations(m, k) {
        let minor: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| {
                subset
                    .iter()
                    .map(|&j| Rational::from_int(row[j]))
                    .collect()
            })
            .collect();
        let sub_det = det_exact(&minor);
        let mut term = &sub_det * &sub_det;
        for &j in &subset {
            term *= g.edges()[j].length.clone();
        }
        let ids: BTreeSet<EdgeId> = subset.iter().map(|&j| g.edges()[j].id.clone()).collect();
        let complement: BTreeSet<EdgeId> = g
            .edges()
            .iter()
            .filter(|e| !ids.contains(&e.id))
            .map(|e| e.id.clone())
            .collect();
        match tree_sets.get(&complement) {
            Some(w) => {
                if &term != w {
                    holds = false;
                }
            }
            None => {
                if !term.is_zero() {
                    holds = false;
                }
            }
        }
        sum += &term;
        terms.push((ids, term));
    }
    if sum != det {
        holds = false;
    }
    Ok(CauchyBinetReport {
        holds,
        sum,
        det,
        terms,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            recurse(n, k, i + 1, current, out);
            current.pop();
        }
    }
    recurse(n, k, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::Divisor;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn theta() -> WeightedGraph {
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

    fn theta_unit() -> WeightedGraph {
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

    fn tri() -> WeightedGraph {
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

    fn path3() -> WeightedGraph {
        WeightedGraph::from_parts(
            &["p1", "p2", "p3"],
            &[("e1", "p1", "p2", rat("1")), ("e2", "p2", "p3", rat("1"))],
        )
        .unwrap()
    }

    fn tree(ids: &[&str]) -> SpanningTree {
        SpanningTree {
            edges: ids.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn div(entries: &[(&str, i64)]) -> Divisor {
        Divisor::from_entries(entries.iter().map(|(v, c)| (v.to_string(), *c)))
    }

    #[test]
    fn det_exact_examples() {
        let m = vec![
            vec![rat("3"), rat("1")],
            vec![rat("1"), rat("3")],
        ];
        assert_eq!(det_exact(&m), rat("8"));
        assert_eq!(det_exact(&[]), rat("1"));
        assert_eq!(det_exact(&[vec![rat("3")]]), rat("3"));
        let id3: Vec<Vec<Rational>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { rat("1") } else { rat("0") })
                    .collect()
            })
            .collect();
        assert_eq!(det_exact(&id3), rat("1"));
        // pivoting and fractions
        let m = vec![
            vec![rat("0"), rat("1/2")],
            vec![rat("1/3"), rat("7")],
        ];
        assert_eq!(det_exact(&m), rat("-1/6"));
    }

    #[test]
    fn solve_exact_examples() {
        let m = vec![
            vec![rat("3"), rat("1")],
            vec![rat("1"), rat("3")],
        ];
        let x = solve_exact(&m, &[rat("-1"), rat("-1")]).unwrap();
        assert_eq!(x, vec![rat("-1/4"), rat("-1/4")]);
        let singular = vec![
            vec![rat("1"), rat("2")],
            vec![rat("2"), rat("4")],
        ];
        assert!(solve_exact(&singular, &[rat("1"), rat("0")]).is_none());
    }

    #[test]
    fn gram_theta() {
        let g = theta();
        let m = gram_matrix(&g, &tree(&["b"])).unwrap();
        assert_eq!(m.basis, vec!["a".to_string(), "c".to_string()]);
        assert_eq!(
            m.entries,
            vec![
                vec![rat("3"), rat("1")],
                vec![rat("1"), rat("3")],
            ]
        );
        assert!(m.is_positive_definite());
        assert_eq!(det_exact(&m.entries), rat("8"));
    }

    #[test]
    fn gram_det_is_basis_independent() {
        let g = theta_unit();
        for t in spanning_trees(&g) {
            let m = gram_matrix(&g, &t).unwrap();
            assert_eq!(det_exact(&m.entries), rat("8"));
            assert!(m.is_positive_definite());
        }
    }

    #[test]
    fn gram_triangle() {
        let g = tri();
        let m = gram_matrix(&g, &tree(&["e12", "e13"])).unwrap();
        assert_eq!(m.entries, vec![vec![rat("3")]]);
    }

    #[test]
    fn tree_weight_examples() {
        let g = theta();
        let table = tree_weights(&g, ConductanceMode::Length);
        let ws: Vec<Rational> = table.weights.iter().map(|t| t.w.clone()).collect();
        assert_eq!(ws, vec![rat("2"), rat("4"), rat("2")]);
        assert_eq!(table.total_w, rat("8"));

        let unit = theta_unit();
        let table = tree_weights(&unit, ConductanceMode::Length);
        assert!(table.weights.iter().all(|t| t.w == rat("1")));
        assert_eq!(table.total_w, rat("8"));
    }

    #[test]
    fn dual_kirchhoff_examples() {
        for (g, expected) in [
            (theta(), rat("8")),
            (tri(), rat("3")),
            (path3(), rat("1")),
        ] {
            let report = dual_kirchhoff_check(&g).unwrap();
            assert!(report.holds);
            assert_eq!(report.det, expected);
            assert_eq!(report.total_weight, expected);
        }
    }

    #[test]
    fn cell_volume_examples() {
        let g = theta();
        let report = cell_volumes(&g).unwrap();
        let ratios: Vec<Rational> = report.cells.iter().map(|c| c.vol_ratio.clone()).collect();
        assert_eq!(ratios, vec![rat("1/4"), rat("1/2"), rat("1/4")]);
        let sqs: Vec<Rational> = report.cells.iter().map(|c| c.vol_sq.clone()).collect();
        assert_eq!(sqs, vec![rat("1/2"), rat("2"), rat("1/2")]);
        assert_eq!(report.ratio_sum(), rat("1"));

        let unit = theta_unit();
        let report = cell_volumes(&unit).unwrap();
        assert_eq!(report.cells.len(), 8);
        assert!(report
            .cells
            .iter()
            .all(|c| c.vol_ratio == rat("1/8")));
        assert_eq!(report.ratio_sum(), rat("1"));

        let t = tri();
        let report = cell_volumes(&t).unwrap();
        assert!(report.cells.iter().all(|c| c.vol_ratio == rat("1/3")));
    }

    #[test]
    fn edge_projection_examples() {
        let g = theta();
        let t = tree(&["b"]);
        assert_eq!(
            edge_projection(&g, &t, "a").unwrap(),
            vec![rat("3/4"), rat("-1/4")]
        );
        assert_eq!(
            edge_projection(&g, &t, "b").unwrap_err(),
            Error::EdgeInTree("b".into())
        );

        let tr = tri();
        assert_eq!(
            edge_projection(&tr, &tree(&["e12", "e13"]), "e23").unwrap(),
            vec![rat("1/3")]
        );
    }

    #[test]
    fn projection_gram_consistency() {
        // det of the projected-edge Gram matrix equals w(T)^2 / det(M)
        let g = theta();
        let t = tree(&["b"]);
        let gram = gram_matrix(&g, &t).unwrap();
        let det = det_exact(&gram.entries);
        let projections: Vec<Vec<Rational>> = t
            .cotree_edges(&g)
            .iter()
            .map(|e| edge_projection(&g, &t, e).unwrap())
            .collect();
        let k = projections.len();
        let mut inner = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                // <x_i, x_j>_M = x_i^t M x_j
                let mut acc = Rational::zero();
                for (r, row) in gram.entries.iter().enumerate() {
                    for (c, val) in row.iter().enumerate() {
                        acc += &projections[i][r] * &(val * &projections[j][c]);
                    }
                }
                inner[i][j] = acc;
            }
        }
        let w = rat("4"); // w({b}) = l(a) l(c)
        assert_eq!(det_exact(&inner), &w * &w / det);
    }

    #[test]
    fn abel_jacobi_examples() {
        let tr = tri();
        let t = tree(&["e12", "e13"]);
        let aj = abel_jacobi_divisor(&tr, &div(&[("v2", 1)]), "v1", &t).unwrap();
        assert_eq!(aj.coords, vec![rat("1/3")]);

        let aj = abel_jacobi_divisor(&tr, &div(&[("v1", 3)]), "v1", &t).unwrap();
        assert_eq!(aj.coords, vec![rat("0")]);

        let g = theta();
        let tb = tree(&["b"]);
        let aj = abel_jacobi_divisor(&g, &div(&[("u", 1), ("v", 1)]), "u", &tb).unwrap();
        assert_eq!(aj.coords, vec![rat("3/4"), rat("3/4")]);
    }

    #[test]
    fn jac_equivalence_examples() {
        let tr = tri();
        let t = tree(&["e12", "e13"]);
        let d1 = MetricDivisor::from_divisor(&div(&[("v1", 2), ("v2", -1)]));
        let d2 = MetricDivisor::from_divisor(&div(&[("v3", 1)]));
        assert!(jac_equivalent(&tr, &d1, &d2, "v1", &t).unwrap());

        let e1 = MetricDivisor::from_divisor(&div(&[("v1", 1)]));
        let e2 = MetricDivisor::from_divisor(&div(&[("v2", 1)]));
        assert!(!jac_equivalent(&tr, &e1, &e2, "v1", &t).unwrap());
        assert!(jac_equivalent(&tr, &e1, &e1, "v1", &t).unwrap());
    }

    #[test]
    fn reduced_laplacian_examples() {
        let g = theta();
        assert_eq!(
            reduced_laplacian_det(&g, "u", ConductanceMode::InverseLength).unwrap(),
            rat("2")
        );
        assert_eq!(
            reduced_laplacian_det(&g, "u", ConductanceMode::Length).unwrap(),
            rat("5")
        );
        let unit = theta_unit();
        assert_eq!(
            reduced_laplacian_det(&unit, "u", ConductanceMode::Length).unwrap(),
            rat("8")
        );
        assert_eq!(
            reduced_laplacian_det(&unit, "u", ConductanceMode::InverseLength).unwrap(),
            rat("8")
        );
    }

    #[test]
    fn cauchy_binet_examples() {
        let g = theta();
        let report = cauchy_binet_check(&g, &tree(&["b"])).unwrap();
        assert!(report.holds);
        assert_eq!(report.sum, rat("8"));
        let mut term_values: Vec<Rational> =
            report.terms.iter().map(|(_, v)| v.clone()).collect();
        term_values.sort();
        assert_eq!(term_values, vec![rat("2"), rat("2"), rat("4")]);

        let tr = tri();
        let report = cauchy_binet_check(&tr, &tree(&["e12", "e13"])).unwrap();
        assert!(report.holds);
        assert_eq!(report.sum, rat("3"));

        let p = path3();
        let report = cauchy_binet_check(&p, &tree(&["e1", "e2"])).unwrap();
        assert!(report.holds);
        assert_eq!(report.sum, rat("1"));
    }
}
