use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};

/// Integer chip configuration on vertices; absent means 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Divisor {
    coeffs: BTreeMap<VertexId, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (String, i64)>>(entries: I) -> Divisor {
        let mut d = Divisor::zero();
        for (v, c) in entries {
            d.add_coeff(&v, c);
        }
        d
    }

    pub fn coeff(&self, v: &str) -> i64 {
        self.coeffs.get(v).copied().unwrap_or(0)
    }

    pub fn set_coeff(&mut self, v: &str, c: i64) {
        if c == 0 {
            self.coeffs.remove(v);
        } else {
            self.coeffs.insert(v.to_string(), c);
        }
    }

    pub fn add_coeff(&mut self, v: &str, c: i64) {
        self.set_coeff(v, self.coeff(v) + c);
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &VertexId> {
        self.coeffs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, i64)> {
        self.coeffs.iter().map(|(v, &c)| (v, c))
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    pub fn is_effective_outside(&self, q: &str) -> bool {
        self.coeffs.iter().all(|(v, &c)| c >= 0 || v == q)
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.add_coeff(v, c);
        }
        out
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.add_coeff(v, -c);
        }
        out
    }

    pub(crate) fn to_dense(&self, g: &WeightedGraph) -> Result<Vec<i64>> {
        let mut dense = vec![0i64; g.vertex_count()];
        for (v, c) in self.iter() {
            let i = g
                .vertex_idx(v)
                .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            dense[i] = c;
        }
        Ok(dense)
    }

    pub(crate) fn from_dense(g: &WeightedGraph, dense: &[i64]) -> Divisor {
        Divisor::from_entries(
            dense
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (g.vertex_id(i).clone(), c)),
        )
    }
}

impl std::fmt::Display for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(v, c)| match c {
                1 => format!("({})", v),
                -1 => format!("-({})", v),
                c => format!("{}({})", c, v),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Total integer function on vertices; absent means 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexFunction {
    values: BTreeMap<VertexId, i64>,
}

impl VertexFunction {
    pub fn zero() -> VertexFunction {
        VertexFunction::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (String, i64)>>(entries: I) -> VertexFunction {
        let mut f = VertexFunction::zero();
        for (v, c) in entries {
            f.set(&v, c);
        }
        f
    }

    pub fn value(&self, v: &str) -> i64 {
        self.values.get(v).copied().unwrap_or(0)
    }

    pub fn set(&mut self, v: &str, c: i64) {
        if c == 0 {
            self.values.remove(v);
        } else {
            self.values.insert(v.to_string(), c);
        }
    }

    pub fn add(&mut self, v: &str, c: i64) {
        self.set(v, self.value(v) + c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, i64)> {
        self.values.iter().map(|(v, &c)| (v, c))
    }

    /// True when the function differs from `other` by a constant.
    pub fn equal_up_to_constant(&self, other: &VertexFunction, g: &WeightedGraph) -> bool {
        let mut shift: Option<i64> = None;
        for v in g.vertices() {
            let d = self.value(v) - other.value(v);
            match shift {
                None => shift = Some(d),
                Some(s) if s != d => return false,
                _ => {}
            }
        }
        true
    }
}

/// chi(S, D) = deg(D|_S) + |S| - e(S).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    pub set: VertexSet,
    pub chi: i64,
    pub divisor: Divisor,
}

pub(crate) fn chi_mask(
    endpoint_pairs: &[(usize, usize)],
    dense: &[i64],
    mask: u64,
) -> i64 {
    let mut chi = mask.count_ones() as i64;
    for (i, &c) in dense.iter().enumerate() {
        if mask >> i & 1 == 1 {
            chi += c;
        }
    }
    for &(a, b) in endpoint_pairs {
        if mask >> a & 1 == 1 && mask >> b & 1 == 1 {
            chi -= 1;
        }
    }
    chi
}

pub fn chi(g: &WeightedGraph, s: &VertexSet, d: &Divisor) -> Result<i64> {
    let mask = g.set_to_mask(s)?;
    let dense = d.to_dense(g)?;
    Ok(chi_mask(&g.endpoint_pairs(), &dense, mask))
}

pub fn chi_report(g: &WeightedGraph, s: &VertexSet, d: &Divisor) -> Result<ChiReport> {
    Ok(ChiReport {
        set: s.clone(),
        chi: chi(g, s, d)?,
        divisor: d.clone(),
    })
}

/// Unit-conductance graph Laplacian: Delta(f)(p) = sum over edges pq of
/// (f(q) - f(p)). Edge lengths play no role in the integral theory.
pub fn laplacian(g: &WeightedGraph, f: &VertexFunction) -> Divisor {
    let mut dense = vec![0i64; g.vertex_count()];
    for e in g.edges() {
        let ft = f.value(g.vertex_id(e.tail));
        let fh = f.value(g.vertex_id(e.head));
        dense[e.tail] += fh - ft;
        dense[e.head] += ft - fh;
    }
    Divisor::from_dense(g, &dense)
}

/// Simultaneously fires every vertex of `x`: one chip crosses each boundary
/// edge outward. Equals d + laplacian(indicator of x).
pub fn fire_set(g: &WeightedGraph, d: &Divisor, x: &VertexSet) -> Divisor {
    let mask = g
        .set_to_mask(x)
        .expect("fire_set: set must consist of graph vertices");
    fire_mask(g, d, mask)
}

pub(crate) fn fire_mask(g: &WeightedGraph, d: &Divisor, mask: u64) -> Divisor {
    let mut out = d.clone();
    for e in g.edges() {
        let tin = mask >> e.tail & 1 == 1;
        let hin = mask >> e.head & 1 == 1;
        if tin && !hin {
            out.add_coeff(g.vertex_id(e.tail), -1);
            out.add_coeff(g.vertex_id(e.head), 1);
        } else if hin && !tin {
            out.add_coeff(g.vertex_id(e.head), -1);
            out.add_coeff(g.vertex_id(e.tail), 1);
        }
    }
    out
}

/// Outcome of the q-reduced test; `Reduced` or a witness for the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum QReducedVerdict {
    Reduced,
    NegativeAt(VertexId),
    FireableSet(VertexSet),
}

impl QReducedVerdict {
    pub fn is_reduced(&self) -> bool {
        matches!(self, QReducedVerdict::Reduced)
    }
}

/// Checks (R1) effectivity outside q and (R2) no subset avoiding q where
/// every vertex holds at least its outdegree.
pub fn q_reduced_verdict(g: &WeightedGraph, d: &Divisor, q: &str) -> QReducedVerdict {
    let qi = g.vertex_idx(q).expect("q must be a graph vertex");
    let dense = d.to_dense(g).expect("divisor must live on the graph");
    for (i, &c) in dense.iter().enumerate() {
        if i != qi && c < 0 {
            return QReducedVerdict::NegativeAt(g.vertex_id(i).clone());
        }
    }
    let n = g.vertex_count();
    let pairs = g.endpoint_pairs();
    for mask in 1u64..(1 << n) {
        if mask >> qi & 1 == 1 {
            continue;
        }
        if fireable_mask(&pairs, &dense, mask) {
            return QReducedVerdict::FireableSet(g.mask_to_set(mask));
        }
    }
    QReducedVerdict::Reduced
}

pub fn is_q_reduced(g: &WeightedGraph, d: &Divisor, q: &str) -> bool {
    q_reduced_verdict(g, d, q).is_reduced()
}

/// True when every vertex of the set can cover its outgoing edges.
fn fireable_mask(pairs: &[(usize, usize)], dense: &[i64], mask: u64) -> bool {
    let mut outdeg = vec![0i64; dense.len()];
    for &(a, b) in pairs {
        let ain = mask >> a & 1 == 1;
        let bin = mask >> b & 1 == 1;
        if ain && !bin {
            outdeg[a] += 1;
        } else if bin && !ain {
            outdeg[b] += 1;
        }
    }
    (0..dense.len())
        .filter(|i| mask >> i & 1 == 1)
        .all(|i| dense[i] >= outdeg[i])
}

/// Reduces `d` to the unique q-reduced representative of its class.
/// Returns the reduced divisor and a witness f with result = d + laplacian(f).
pub fn dhar_reduce(g: &WeightedGraph, d: &Divisor, q: &str) -> (Divisor, VertexFunction) {
    let qi = g.vertex_idx(q).expect("q must be a graph vertex");
    let mut dense = d.to_dense(g).expect("divisor must live on the graph");
    let n = g.vertex_count();
    let pairs = g.endpoint_pairs();
    let mut witness = vec![0i64; n];

    // distance layers from q
    let mut dist = vec![usize::MAX; n];
    dist[qi] = 0;
    let mut queue = std::collections::VecDeque::from([qi]);
    while let Some(v) = queue.pop_front() {
        for &ei in g.incident_edges(v) {
            let e = &g.edges()[ei];
            let w = if e.tail == v { e.head } else { e.tail };
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let max_layer = dist.iter().copied().max().unwrap_or(0);

    let fire = |dense: &mut Vec<i64>, witness: &mut Vec<i64>, mask: u64| {
        for &(a, b) in &pairs {
            let ain = mask >> a & 1 == 1;
            let bin = mask >> b & 1 == 1;
            if ain && !bin {
                dense[a] -= 1;
                dense[b] += 1;
            } else if bin && !ain {
                dense[b] -= 1;
                dense[a] += 1;
            }
        }
        for (i, w) in witness.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *w += 1;
            }
        }
    };

    // Stage 1: make the divisor effective outside q. Firing the ball of
    // radius k-1 delivers at least one chip to every vertex at distance k
    // and touches nothing farther out, so sweeping k downward terminates.
    for k in (1..=max_layer).rev() {
        let ball: u64 = (0..n)
            .filter(|&i| dist[i] < k)
            .fold(0, |m, i| m | 1 << i);
        loop {
            let deficit = (0..n).any(|i| dist[i] == k && dense[i] < 0);
            if !deficit {
                break;
            }
            fire(&mut dense, &mut witness, ball);
        }
    }

    // Stage 2: Dhar burning from q; fire the unburnt set until it is empty.
    loop {
        let mut burnt = 1u64 << qi;
        loop {
            let mut grew = false;
            for (v, &chips) in dense.iter().enumerate() {
                if burnt >> v & 1 == 1 {
                    continue;
                }
                let toward_burnt = pairs
                    .iter()
                    .filter(|&&(a, b)| {
                        (a == v && burnt >> b & 1 == 1) || (b == v && burnt >> a & 1 == 1)
                    })
                    .count() as i64;
                if chips < toward_burnt {
                    burnt |= 1 << v;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let unburnt = !burnt & ((1u64 << n) - 1);
        if unburnt == 0 {
            break;
        }
        fire(&mut dense, &mut witness, unburnt);
    }

    let reduced = Divisor::from_dense(g, &dense);
    let f = VertexFunction::from_entries(
        witness
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (g.vertex_id(i).clone(), c)),
    );
    (reduced, f)
}

/// Linear equivalence, decided through q-reduced uniqueness with q the first
/// vertex in graph order.
pub fn is_equivalent(g: &WeightedGraph, d1: &Divisor, d2: &Divisor) -> bool {
    if d1.degree() != d2.degree() {
        return false;
    }
    let q = g.vertex_id(0).clone();
    dhar_reduce(g, d1, &q).0 == dhar_reduce(g, d2, &q).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> crate::rational::Rational {
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

    fn div(entries: &[(&str, i64)]) -> Divisor {
        Divisor::from_entries(entries.iter().map(|(v, c)| (v.to_string(), *c)))
    }

    fn set(ids: &[&str]) -> VertexSet {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chi_examples() {
        let g = theta();
        assert_eq!(chi(&g, &set(&["u"]), &Divisor::zero()).unwrap(), 1);
        assert_eq!(chi(&g, &set(&["u", "v"]), &Divisor::zero()).unwrap(), -1);
        let gu = theta_unit();
        let d = div(&[("x", 2), ("u", -1)]);
        assert_eq!(chi(&gu, &set(&["u", "v", "y"]), &d).unwrap(), -1);
        assert_eq!(chi(&gu, &set(&[]), &d).unwrap(), 0);
        assert_eq!(
            chi(&gu, &set(&["nope"]), &d).unwrap_err(),
            Error::UnknownVertex("nope".into())
        );
    }

    #[test]
    fn chi_of_whole_graph_is_euler_characteristic() {
        for g in [theta(), theta_unit(), tri()] {
            let all: VertexSet = g.vertices().iter().cloned().collect();
            let d = div(&[(g.vertices()[0].as_str(), 3)]);
            assert_eq!(
                chi(&g, &all, &d).unwrap(),
                d.degree() + 1 - g.genus()
            );
        }
    }

    #[test]
    fn laplacian_examples() {
        let g = tri();
        let constant = VertexFunction::from_entries(
            g.vertices().iter().map(|v| (v.clone(), 5)),
        );
        assert_eq!(laplacian(&g, &constant), Divisor::zero());

        let f = VertexFunction::from_entries([("v1".to_string(), 1)]);
        assert_eq!(
            laplacian(&g, &f),
            div(&[("v1", -2), ("v2", 1), ("v3", 1)])
        );

        let th = theta();
        let f = VertexFunction::from_entries([("u".to_string(), 1)]);
        assert_eq!(laplacian(&th, &f), div(&[("u", -3), ("v", 3)]));
        assert_eq!(laplacian(&th, &f).degree(), 0);
    }

    #[test]
    fn fire_set_examples() {
        let g = tri();
        let d = div(&[("v1", 2), ("v2", -1)]);
        assert_eq!(fire_set(&g, &d, &set(&["v1"])), div(&[("v3", 1)]));

        let all: VertexSet = g.vertices().iter().cloned().collect();
        assert_eq!(fire_set(&g, &d, &all), d);

        let th = theta();
        let d = div(&[("u", 3), ("v", -2)]);
        assert_eq!(fire_set(&th, &d, &set(&["u"])), div(&[("v", 1)]));
    }

    #[test]
    fn fire_set_matches_laplacian_of_indicator() {
        let g = theta_unit();
        let d = div(&[("u", 2), ("y", -1)]);
        for s in [set(&["u"]), set(&["u", "x"]), set(&["v", "y"])] {
            let ind = VertexFunction::from_entries(s.iter().map(|v| (v.clone(), 1)));
            assert_eq!(fire_set(&g, &d, &s), d.add(&laplacian(&g, &ind)));
            assert_eq!(fire_set(&g, &d, &s).degree(), d.degree());
        }
    }

    #[test]
    fn dhar_reduce_examples() {
        let g = tri();
        let (r, f) = dhar_reduce(&g, &div(&[("v1", 2), ("v2", -1)]), "v3");
        assert_eq!(r, div(&[("v3", 1)]));
        assert_eq!(
            r,
            div(&[("v1", 2), ("v2", -1)]).add(&laplacian(&g, &f))
        );

        let (r, f) = dhar_reduce(&g, &div(&[("v3", 1)]), "v3");
        assert_eq!(r, div(&[("v3", 1)]));
        assert!(f.equal_up_to_constant(&VertexFunction::zero(), &g));

        let gu = theta_unit();
        let (r, f) = dhar_reduce(&gu, &div(&[("x", 2)]), "u");
        assert_eq!(r, div(&[("u", 1), ("v", 1)]));
        assert_eq!(r, div(&[("x", 2)]).add(&laplacian(&gu, &f)));
        assert!(is_q_reduced(&gu, &r, "u"));
    }

    #[test]
    fn dhar_reduce_handles_deep_deficits() {
        let g = theta_unit();
        let d = div(&[("v", -3), ("x", 1)]);
        let (r, f) = dhar_reduce(&g, &d, "u");
        assert!(r.is_effective_outside("u"));
        assert!(is_q_reduced(&g, &r, "u"));
        assert_eq!(r, d.add(&laplacian(&g, &f)));
    }

    #[test]
    fn q_reduced_verdicts() {
        let g = tri();
        assert!(is_q_reduced(&g, &div(&[("v3", 1)]), "v3"));
        // effective outside v1 and every set avoiding v1 has an underfunded vertex
        assert!(is_q_reduced(&g, &div(&[("v1", 2)]), "v1"));
        let th = theta();
        assert_eq!(
            q_reduced_verdict(&th, &div(&[("u", -1), ("v", 2)]), "v"),
            QReducedVerdict::NegativeAt("u".into())
        );
        // two chips at v2 can pay for firing {v2}
        assert_eq!(
            q_reduced_verdict(&g, &div(&[("v2", 2)]), "v1"),
            QReducedVerdict::FireableSet(set(&["v2"]))
        );
    }

    #[test]
    fn equivalence_examples() {
        let g = tri();
        assert!(is_equivalent(
            &g,
            &div(&[("v1", 2), ("v2", -1)]),
            &div(&[("v3", 1)])
        ));
        assert!(!is_equivalent(&g, &div(&[("v1", 1)]), &div(&[("v2", 1)])));
        let d = div(&[("v1", 4), ("v3", -2)]);
        assert!(is_equivalent(&g, &d, &d));
    }

    #[test]
    fn reduction_is_idempotent() {
        let g = theta_unit();
        for d in [
            div(&[("x", 2)]),
            div(&[("u", -2), ("v", 5)]),
            div(&[("y", 3), ("x", -1)]),
        ] {
            let (r, _) = dhar_reduce(&g, &d, "u");
            let (r2, f2) = dhar_reduce(&g, &r, "u");
            assert_eq!(r, r2);
            assert!(f2.equal_up_to_constant(&VertexFunction::zero(), &g));
        }
    }
}
