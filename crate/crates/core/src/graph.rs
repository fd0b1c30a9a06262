//! Finite weighted graphs, vertex measures and Dirichlet domains.
//!
//! Vertices carry opaque string identifiers which are mapped to dense
//! indices in insertion order. Everything downstream works with those
//! indices; the interior ordering of a [`DirichletDomain`] is fixed when the
//! domain is built so that matrices and eigenvectors are reproducible.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// How the vertex measure μ is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    /// μ ≡ 1.
    Unit,
    /// μ(x) = m(x), the total incident edge weight.
    Normalized,
    /// One positive value per vertex, in vertex order.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub w: f64,
}

impl Edge {
    pub fn new(a: impl Into<String>, b: impl Into<String>, w: f64) -> Self {
        Edge {
            a: a.into(),
            b: b.into(),
            w,
        }
    }
}

/// Undirected graph with positive symmetric edge weights and a positive
/// vertex measure. Immutable after construction.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    mu: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(ids: Vec<String>, edges: &[Edge], measure: Measure) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let mut indexed = Vec::with_capacity(edges.len());
        for e in edges {
            let a = *index.get(&e.a).ok_or_else(|| Error::UnknownVertex(e.a.clone()))?;
            let b = *index.get(&e.b).ok_or_else(|| Error::UnknownVertex(e.b.clone()))?;
            indexed.push((a, b, e.w));
        }
        Self::build(ids, index, &indexed, measure)
    }

    /// Builds a graph whose vertex identifiers are the decimal indices
    /// `"0"`, `"1"`, ….
    pub fn from_indexed(n: usize, edges: &[(usize, usize, f64)], measure: Measure) -> Result<Self> {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index = ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        for &(a, b, _) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
            }
        }
        Self::build(ids, index, edges, measure)
    }

    fn build(
        ids: Vec<String>,
        index: HashMap<String, usize>,
        edges: &[(usize, usize, f64)],
        measure: Measure,
    ) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = ids.len();
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            if a == b {
                return Err(Error::SelfLoop(ids[a].clone()));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidWeight {
                    a: ids[a].clone(),
                    b: ids[b].clone(),
                    w,
                });
            }
            if adjacency[a].iter().any(|&(y, _)| y == b) {
                return Err(Error::MultiEdge(ids[a].clone(), ids[b].clone()));
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(y, _)| y);
        }
        let mu = match measure {
            Measure::Unit => vec![1.0; n],
            Measure::Normalized => adjacency.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect(),
            Measure::Explicit(values) => {
                if values.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: values.len(),
                    });
                }
                values
            }
        };
        for (i, &m) in mu.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidMeasure(ids[i].clone()));
            }
        }
        Ok(WeightedGraph {
            ids,
            index,
            adjacency,
            mu,
        })
    }

    /// Same vertices and edges with a different measure.
    pub fn with_measure(&self, measure: Measure) -> Result<Self> {
        let mut edges = Vec::new();
        for (x, row) in self.adjacency.iter().enumerate() {
            edges.extend(row.iter().filter(|&&(y, _)| y > x).map(|&(y, w)| (x, y, w)));
        }
        Self::build(self.ids.clone(), self.index.clone(), &edges, measure)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Neighbours of `x` with their edge weights, sorted by index.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.mu[x]
    }

    pub fn measure(&self) -> &[f64] {
        &self.mu
    }

    /// Edges as `(x, y, w)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().filter(move |&&(y, _)| y > x).map(move |&(y, w)| (x, y, w)))
    }

    /// m(x) = Σ_{y~x} ω_xy.
    pub fn degree_weight_at(&self, x: usize) -> f64 {
        self.adjacency[x].iter().map(|&(_, w)| w).sum()
    }

    pub fn degree_weight(&self, id: &str) -> Result<f64> {
        Ok(self.degree_weight_at(self.index_of(id)?))
    }

    /// D_μ = max_x m(x)/μ(x).
    pub fn d_mu(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok((0..self.len())
            .map(|x| self.degree_weight_at(x) / self.mu[x])
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Whether the subgraph induced on `subset` is connected. An empty
    /// subset is reported as disconnected.
    pub fn is_connected(&self, subset: &[usize]) -> bool {
        let Some(&start) = subset.first() else {
            return false;
        };
        let mut member = vec![false; self.len()];
        for &x in subset {
            member[x] = true;
        }
        let dist = self.bfs_distances(start, &member);
        subset.iter().all(|&x| dist[x].is_some())
    }

    /// Unweighted hop distances from `source` inside the vertex set marked by
    /// `member`.
    pub fn bfs_distances(&self, source: usize, member: &[bool]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        if !member[source] {
            return dist;
        }
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap_or(0);
            for &(y, _) in &self.adjacency[x] {
                if member[y] && dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}

/// Path `v1 – v2 – … – vn` with unit weights.
pub fn path_graph(n: usize, measure: Measure) -> Result<WeightedGraph> {
    let ids: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let edges: Vec<Edge> = ids
        .windows(2)
        .map(|p| Edge::new(p[0].clone(), p[1].clone(), 1.0))
        .collect();
    WeightedGraph::new(ids, &edges, measure)
}

/// `rows × cols` grid with unit weights; vertex `r{i}c{j}`, row-major.
pub fn grid_graph(rows: usize, cols: usize, measure: Measure) -> Result<WeightedGraph> {
    let id = |i: usize, j: usize| format!("r{i}c{j}");
    let mut ids = Vec::with_capacity(rows * cols);
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            ids.push(id(i, j));
            if i + 1 < rows {
                edges.push(Edge::new(id(i, j), id(i + 1, j), 1.0));
            }
            if j + 1 < cols {
                edges.push(Edge::new(id(i, j), id(i, j + 1), 1.0));
            }
        }
    }
    WeightedGraph::new(ids, &edges, measure)
}

/// A bounded domain Ω split into its boundary ∂Ω (vertices of Ω with a
/// neighbour outside Ω) and interior Ω° = Ω \ ∂Ω.
#[derive(Clone, Debug)]
pub struct DirichletDomain {
    graph: Arc<WeightedGraph>,
    in_omega: Vec<bool>,
    omega: Vec<usize>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl DirichletDomain {
    pub fn split(graph: Arc<WeightedGraph>, omega: &[usize]) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let n = graph.len();
        let mut in_omega = vec![false; n];
        for &x in omega {
            if x >= n {
                return Err(Error::UnknownVertex(x.to_string()));
            }
            in_omega[x] = true;
        }
        let mut omega_sorted = Vec::new();
        let mut boundary = Vec::new();
        let mut interior = Vec::new();
        let mut slot = vec![None; n];
        for x in 0..n {
            if !in_omega[x] {
                continue;
            }
            omega_sorted.push(x);
            if graph.neighbors(x).iter().any(|&(y, _)| !in_omega[y]) {
                boundary.push(x);
            } else {
                slot[x] = Some(interior.len());
                interior.push(x);
            }
        }
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        Ok(DirichletDomain {
            graph,
            in_omega,
            omega: omega_sorted,
            boundary,
            interior,
            slot,
        })
    }

    pub fn split_ids<S: AsRef<str>>(graph: Arc<WeightedGraph>, omega: &[S]) -> Result<Self> {
        let idx = omega
            .iter()
            .map(|s| graph.index_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::split(graph, &idx)
    }

    /// The whole vertex set as domain.
    pub fn whole(graph: Arc<WeightedGraph>) -> Result<Self> {
        let all: Vec<usize> = (0..graph.len()).collect();
        Self::split(graph, &all)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<WeightedGraph> {
        &self.graph
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior vertices x₁,…,x_N in vertex order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// #Ω.
    pub fn omega_len(&self) -> usize {
        self.omega.len()
    }

    /// #Ω°.
    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_omega[x]
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.slot[x].is_some()
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.in_omega[x] && self.slot[x].is_none()
    }

    /// Position of `x` in the interior ordering.
    pub fn interior_slot(&self, x: usize) -> Option<usize> {
        self.slot[x]
    }

    /// μ restricted to the interior, in interior order.
    pub fn interior_measure(&self) -> Vec<f64> {
        self.interior.iter().map(|&x| self.graph.mu(x)).collect()
    }

    pub fn interior_ids(&self) -> impl Iterator<Item = &str> {
        self.interior.iter().map(|&x| self.graph.id(x))
    }

    /// Lifts interior-ordered values to a full-length vector, zero elsewhere.
    pub fn extend_by_zero(&self, interior_values: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.graph.len()];
        for (&x, &v) in self.interior.iter().zip(interior_values) {
            full[x] = v;
        }
        full
    }
}

/// Where a [`VertexFunction`] is declared to live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Vertices,
    Domain,
    Interior,
}

/// Real function on the vertices of a graph, stored densely. Values
/// outside the declared support are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction {
    support: Support,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn on_vertices(values: Vec<f64>) -> Self {
        VertexFunction {
            support: Support::Vertices,
            values,
        }
    }

    /// From values given in interior order.
    pub fn on_interior(domain: &DirichletDomain, interior_values: &[f64]) -> Result<Self> {
        if interior_values.len() != domain.interior_len() {
            return Err(Error::DimensionMismatch {
                expected: domain.interior_len(),
                got: interior_values.len(),
            });
        }
        Ok(VertexFunction {
            support: Support::Interior,
            values: domain.extend_by_zero(interior_values),
        })
    }

    /// Samples `f` on Ω and stores zero elsewhere.
    pub fn on_domain(domain: &DirichletDomain, f: impl Fn(usize) -> f64) -> Self {
        let mut values = vec![0.0; domain.graph().len()];
        for &x in domain.omega() {
            values[x] = f(x);
        }
        VertexFunction {
            support: Support::Domain,
            values,
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values.get(x).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior_values(&self, domain: &DirichletDomain) -> Vec<f64> {
        domain.interior().iter().map(|&x| self.get(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Arc<WeightedGraph> {
        Arc::new(path_graph(5, Measure::Unit).unwrap())
    }

    #[test]
    fn d_mu_examples() {
        assert_eq!(p5().d_mu().unwrap(), 2.0);

        let single =
            WeightedGraph::new(vec!["a".into(), "b".into()], &[Edge::new("a", "b", 3.0)], Measure::Unit).unwrap();
        assert_eq!(single.d_mu().unwrap(), 3.0);

        let star = WeightedGraph::from_indexed(
            5,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)],
            Measure::Explicit(vec![2.0; 5]),
        )
        .unwrap();
        assert_eq!(star.d_mu().unwrap(), 2.0);
    }

    #[test]
    fn empty_graph_rejected() {
        assert!(matches!(
            WeightedGraph::new(vec![], &[], Measure::Unit),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn degree_weight_examples() {
        let p3 = path_graph(3, Measure::Unit).unwrap();
        assert_eq!(p3.degree_weight("v2").unwrap(), 2.0);

        let g = WeightedGraph::new(
            vec!["a".into(), "b".into(), "c".into(), "lonely".into()],
            &[Edge::new("a", "b", 2.5), Edge::new("a", "c", 0.5)],
            Measure::Unit,
        )
        .unwrap();
        assert_eq!(g.degree_weight("a").unwrap(), 3.0);
        assert_eq!(g.degree_weight("lonely").unwrap(), 0.0);
        assert!(matches!(g.degree_weight("zzz"), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn rejects_malformed_graphs() {
        let ids = || vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            WeightedGraph::new(ids(), &[Edge::new("a", "a", 1.0)], Measure::Unit),
            Err(Error::SelfLoop(_))
        ));
        assert!(matches!(
            WeightedGraph::new(
                ids(),
                &[Edge::new("a", "b", 1.0), Edge::new("b", "a", 2.0)],
                Measure::Unit
            ),
            Err(Error::MultiEdge(..))
        ));
        assert!(matches!(
            WeightedGraph::new(ids(), &[Edge::new("a", "b", 0.0)], Measure::Unit),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(ids(), &[Edge::new("a", "c", 1.0)], Measure::Unit),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            WeightedGraph::new(vec!["a".into(), "a".into()], &[], Measure::Unit),
            Err(Error::DuplicateVertex(_))
        ));
        // isolated vertex has m = 0, so the normalized measure is invalid there
        assert!(matches!(
            WeightedGraph::new(ids(), &[], Measure::Normalized),
            Err(Error::InvalidMeasure(_))
        ));
    }

    #[test]
    fn split_p5_middle() {
        let d = DirichletDomain::split_ids(p5(), &["v2", "v3", "v4"]).unwrap();
        let g = d.graph();
        let b: Vec<&str> = d.boundary().iter().map(|&x| g.id(x)).collect();
        let i: Vec<&str> = d.interior_ids().collect();
        assert_eq!(b, ["v2", "v4"]);
        assert_eq!(i, ["v3"]);
        assert_eq!(d.omega_len(), 3);
        assert_eq!(d.interior_len(), 1);
    }

    #[test]
    fn whole_graph_has_no_boundary() {
        let d = DirichletDomain::whole(p5()).unwrap();
        assert!(d.boundary().is_empty());
        assert_eq!(d.interior_len(), 5);
    }

    #[test]
    fn grid_center_block() {
        // 3×3 centre block of a 5×5 grid: only the middle vertex is interior.
        let g = Arc::new(grid_graph(5, 5, Measure::Unit).unwrap());
        let omega: Vec<String> = (1..4).flat_map(|i| (1..4).map(move |j| format!("r{i}c{j}"))).collect();
        let d = DirichletDomain::split_ids(g, &omega).unwrap();
        assert_eq!(d.interior_ids().collect::<Vec<_>>(), ["r2c2"]);
        assert_eq!(d.boundary().len(), 8);
    }

    #[test]
    fn empty_interior_is_an_error() {
        assert!(matches!(
            DirichletDomain::split_ids(p5(), &["v2", "v3"]),
            Err(Error::EmptyInterior)
        ));
        assert!(matches!(DirichletDomain::split(p5(), &[]), Err(Error::EmptyDomain)));
    }

    #[test]
    fn connectivity() {
        let g = p5();
        assert!(g.is_connected(&[1, 2, 3]));
        assert!(g.is_connected(&[4]));
        let two_edges = WeightedGraph::from_indexed(4, &[(0, 1, 1.0), (2, 3, 1.0)], Measure::Unit).unwrap();
        assert!(!two_edges.is_connected(&[0, 1, 2, 3]));
        assert!(two_edges.is_connected(&[0, 1]));
    }

    #[test]
    fn zero_extension() {
        let d = DirichletDomain::split_ids(p5(), &["v2", "v3", "v4"]).unwrap();
        let u = VertexFunction::on_interior(&d, &[7.0]).unwrap();
        for &x in d.boundary() {
            assert_eq!(u.get(x), 0.0);
        }
        assert_eq!(u.get(2), 7.0);
        assert_eq!(u.get(99), 0.0);
    }

    #[test]
    fn normalized_measure_is_degree() {
        let g = path_graph(4, Measure::Normalized).unwrap();
        assert_eq!(g.measure(), &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(g.d_mu().unwrap(), 1.0);
    }
}
