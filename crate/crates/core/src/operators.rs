//! Integration, the μ-Laplacian, the Dirichlet Laplacian and the gradient
//! form on a weighted graph.
//!
//! The Dirichlet Laplacian Δ_Ω acts on functions of Ω° extended by zero to
//! the rest of V. Its negative, L = −Δ_Ω, is assembled in the interior
//! ordering of the domain:
//!
//! ```text
//! L[j][j] = m(x_j) / μ(x_j)
//! L[j][k] = −ω(x_j, x_k) / μ(x_j)     for x_k ~ x_j, x_k ∈ Ω°
//! ```
//!
//! L is self-adjoint in the μ-inner product but not symmetric as a matrix
//! unless μ is constant. [`SymmetrizedOperator`] is the similar matrix
//! S = M^{1/2} L M^{-1/2}, built directly from ω/√(μ_j μ_k) so that it is
//! symmetric bit for bit.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{DirichletDomain, VertexFunction, WeightedGraph};
use crate::linalg::CsrMatrix;

/// ∫_subset u dμ.
pub fn integrate(graph: &WeightedGraph, u: &VertexFunction, subset: &[usize]) -> f64 {
    subset.iter().map(|&x| u.get(x) * graph.mu(x)).sum()
}

/// (u, v) = Σ_subset u v μ.
pub fn inner_product(graph: &WeightedGraph, u: &VertexFunction, v: &VertexFunction, subset: &[usize]) -> f64 {
    subset.iter().map(|&x| u.get(x) * v.get(x) * graph.mu(x)).sum()
}

/// μ-weighted inner product of two interior-ordered vectors.
pub fn interior_inner(mu: &[f64], u: &[f64], v: &[f64]) -> f64 {
    mu.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
}

/// ‖u‖²_{L²} for an interior-ordered vector.
pub fn interior_norm_sq(mu: &[f64], u: &[f64]) -> f64 {
    interior_inner(mu, u, u)
}

/// Δu(x) = (1/μ(x)) Σ_{y~x} ω_xy (u(y) − u(x)).
pub fn mu_laplacian(graph: &WeightedGraph, u: &VertexFunction, x: usize) -> f64 {
    let ux = u.get(x);
    graph
        .neighbors(x)
        .iter()
        .map(|&(y, w)| w * (u.get(y) - ux))
        .sum::<f64>()
        / graph.mu(x)
}

/// Δ_Ω u on Ω°, with u zero-extended outside Ω°.
pub fn apply_dirichlet(domain: &DirichletDomain, u: &VertexFunction) -> VertexFunction {
    let g = domain.graph();
    let masked: Vec<f64> = domain.interior().iter().map(|&x| u.get(x)).collect();
    let full = VertexFunction::on_vertices(domain.extend_by_zero(&masked));
    let out: Vec<f64> = domain.interior().iter().map(|&x| mu_laplacian(g, &full, x)).collect();
    VertexFunction::on_interior(domain, &out).expect("interior length")
}

/// Γ(u,v)(x) = (1/2μ(x)) Σ_{y~x} ω_xy (u(y) − u(x))(v(y) − v(x)).
pub fn gradient_form(graph: &WeightedGraph, u: &VertexFunction, v: &VertexFunction, x: usize) -> f64 {
    let (ux, vx) = (u.get(x), v.get(x));
    graph
        .neighbors(x)
        .iter()
        .map(|&(y, w)| w * (u.get(y) - ux) * (v.get(y) - vx))
        .sum::<f64>()
        / (2.0 * graph.mu(x))
}

/// |∇u|(x) = √Γ(u,u)(x).
pub fn gradient_norm(graph: &WeightedGraph, u: &VertexFunction, x: usize) -> f64 {
    gradient_form(graph, u, u, x).max(0.0).sqrt()
}

/// ∫_Ω |∇u|² dμ, summed over the whole domain including ∂Ω.
pub fn gradient_energy(domain: &DirichletDomain, u: &VertexFunction) -> f64 {
    let g = domain.graph();
    domain
        .omega()
        .iter()
        .map(|&x| gradient_form(g, u, u, x) * g.mu(x))
        .sum()
}

/// Same as [`gradient_energy`] for an interior-ordered vector.
pub fn gradient_energy_interior(domain: &DirichletDomain, u: &[f64]) -> f64 {
    let full = VertexFunction::on_vertices(domain.extend_by_zero(u));
    gradient_energy(domain, &full)
}

/// The two sides of Green's formula for u, v ∈ C(Ω°):
/// `(∫_{Ω°} Δ_Ω u · v dμ, ∫_Ω Γ(u,v) dμ)`.
pub fn green_terms(domain: &DirichletDomain, u: &VertexFunction, v: &VertexFunction) -> (f64, f64) {
    let g = domain.graph();
    let uz = VertexFunction::on_vertices(domain.extend_by_zero(&u.interior_values(domain)));
    let vz = VertexFunction::on_vertices(domain.extend_by_zero(&v.interior_values(domain)));
    let lap = apply_dirichlet(domain, &uz);
    let lhs = inner_product(g, &lap, &vz, domain.interior());
    let rhs = domain
        .omega()
        .iter()
        .map(|&x| gradient_form(g, &uz, &vz, x) * g.mu(x))
        .sum();
    (lhs, rhs)
}

/// ∫_{Ω°} Δ_Ω u · v dμ + ∫_Ω Γ(u,v) dμ, which vanishes identically.
pub fn green_residual(domain: &DirichletDomain, u: &VertexFunction, v: &VertexFunction) -> f64 {
    let (lhs, rhs) = green_terms(domain, u, v);
    lhs + rhs
}

/// ‖u‖_{W^{1,2}(Ω)} = (∫_Ω |∇u|² + |u|² dμ)^{1/2}.
pub fn sobolev_norm(domain: &DirichletDomain, u: &VertexFunction) -> f64 {
    let g = domain.graph();
    let l2: f64 = domain.omega().iter().map(|&x| u.get(x).powi(2) * g.mu(x)).sum();
    (gradient_energy(domain, u) + l2).sqrt()
}

/// L = −Δ_Ω in the interior ordering.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    csr: CsrMatrix,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.csr.dim()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.csr.get(j, k)
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    /// L u for an interior-ordered vector.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.csr.mul(u)
    }

    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        self.csr.mul_into(u, out)
    }

    /// Writes `row col value` lines, zero-based, one per stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j, v) in self.csr.triplets() {
            writeln!(w, "{i} {j} {v:?}")?;
        }
        Ok(())
    }
}

/// S = M^{1/2} L M^{-1/2} with M = diag(μ) on Ω°.
#[derive(Clone, Debug)]
pub struct SymmetrizedOperator {
    csr: CsrMatrix,
    sqrt_mu: Vec<f64>,
}

impl SymmetrizedOperator {
    pub fn dim(&self) -> usize {
        self.csr.dim()
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    pub fn sqrt_mu(&self) -> &[f64] {
        &self.sqrt_mu
    }

    pub fn apply_into(&self, w: &[f64], out: &mut [f64]) {
        self.csr.mul_into(w, out)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.csr.to_dense()
    }
}

/// Both forms of −Δ_Ω for one domain.
#[derive(Clone, Debug)]
pub struct DirichletOperator {
    pub matrix: OperatorMatrix,
    pub symmetric: SymmetrizedOperator,
}

pub fn assemble(domain: &DirichletDomain) -> DirichletOperator {
    let g = domain.graph();
    let n = domain.interior_len();
    let mu = domain.interior_measure();
    let sqrt_mu: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let mut l_rows = Vec::with_capacity(n);
    let mut s_rows = Vec::with_capacity(n);
    for (j, &x) in domain.interior().iter().enumerate() {
        let diag = g.degree_weight_at(x) / mu[j];
        let mut l_row = vec![(j, diag)];
        let mut s_row = vec![(j, diag)];
        for &(y, w) in g.neighbors(x) {
            if let Some(k) = domain.interior_slot(y) {
                l_row.push((k, -w / mu[j]));
                s_row.push((k, -w / (mu[j] * mu[k]).sqrt()));
            }
        }
        l_rows.push(l_row);
        s_rows.push(s_row);
    }
    DirichletOperator {
        matrix: OperatorMatrix {
            csr: CsrMatrix::from_rows(l_rows),
        },
        symmetric: SymmetrizedOperator {
            csr: CsrMatrix::from_rows(s_rows),
            sqrt_mu,
        },
    }
}

/// Checks that an interior vector has the right length.
pub(crate) fn check_len(domain: &DirichletDomain, v: &[f64]) -> Result<()> {
    if v.len() != domain.interior_len() {
        return Err(Error::DimensionMismatch {
            expected: domain.interior_len(),
            got: v.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::{path_graph, Measure};

    /// P6 with Ω = {v2..v5}: interior {v3, v4}.
    fn two_interior(measure: Measure) -> DirichletDomain {
        let g = Arc::new(path_graph(6, measure).unwrap());
        DirichletDomain::split_ids(g, &["v2", "v3", "v4", "v5"]).unwrap()
    }

    fn single_interior() -> DirichletDomain {
        let g = Arc::new(path_graph(5, Measure::Unit).unwrap());
        DirichletDomain::split_ids(g, &["v2", "v3", "v4"]).unwrap()
    }

    #[test]
    fn integration_examples() {
        let g = WeightedGraph::from_indexed(2, &[(0, 1, 1.0)], Measure::Explicit(vec![1.0, 3.0])).unwrap();
        let u = VertexFunction::on_vertices(vec![1.0, 2.0]);
        assert_eq!(integrate(&g, &u, &[0, 1]), 7.0);
        let zero = VertexFunction::on_vertices(vec![0.0, 0.0]);
        assert_eq!(integrate(&g, &zero, &[0, 1]), 0.0);

        let d = two_interior(Measure::Unit);
        let one = VertexFunction::on_domain(&d, |_| 1.0);
        assert_eq!(integrate(d.graph(), &one, d.omega()), 4.0);
    }

    #[test]
    fn inner_product_examples() {
        let g = WeightedGraph::from_indexed(2, &[(0, 1, 1.0)], Measure::Explicit(vec![2.0, 3.0])).unwrap();
        let u = VertexFunction::on_vertices(vec![1.0, 1.0]);
        assert_eq!(inner_product(&g, &u, &u, &[0, 1]), 5.0);
        let a = VertexFunction::on_vertices(vec![1.0, 0.0]);
        let b = VertexFunction::on_vertices(vec![0.0, 1.0]);
        assert_eq!(inner_product(&g, &a, &b, &[0, 1]), 0.0);
    }

    #[test]
    fn mu_laplacian_examples() {
        let p3 = path_graph(3, Measure::Unit).unwrap();
        let c = VertexFunction::on_vertices(vec![4.0; 3]);
        assert!((0..3).all(|x| mu_laplacian(&p3, &c, x) == 0.0));
        let bump = VertexFunction::on_vertices(vec![0.0, 1.0, 0.0]);
        assert_eq!(mu_laplacian(&p3, &bump, 1), -2.0);
        let p6 = path_graph(6, Measure::Unit).unwrap();
        let lin = VertexFunction::on_vertices((0..6).map(|i| 3.0 * i as f64 - 1.0).collect());
        assert!((1..5).all(|x| mu_laplacian(&p6, &lin, x).abs() < 1e-14));
    }

    #[test]
    fn apply_dirichlet_examples() {
        let d = single_interior();
        let u = VertexFunction::on_interior(&d, &[1.0]).unwrap();
        assert_eq!(apply_dirichlet(&d, &u).interior_values(&d), vec![-2.0]);
        let z = VertexFunction::on_interior(&d, &[0.0]).unwrap();
        assert_eq!(apply_dirichlet(&d, &z).interior_values(&d), vec![0.0]);

        let d2 = two_interior(Measure::Unit);
        let u2 = VertexFunction::on_interior(&d2, &[1.0, 1.0]).unwrap();
        assert_eq!(apply_dirichlet(&d2, &u2).interior_values(&d2), vec![-1.0, -1.0]);
        // equals −L u
        let op = assemble(&d2);
        assert_eq!(op.matrix.apply(&[1.0, 1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn boundary_values_are_ignored_by_zero_extension() {
        let d = single_interior();
        let u = VertexFunction::on_domain(&d, |_| 1.0);
        assert_eq!(apply_dirichlet(&d, &u).interior_values(&d), vec![-2.0]);
    }

    #[test]
    fn assemble_examples() {
        let op = assemble(&two_interior(Measure::Unit));
        let dense = op.matrix.csr().to_dense();
        assert_eq!(dense, nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));

        // single interior vertex of a star: [k]
        // centre 0, leaves 1..=4, each leaf tied to an exterior vertex
        let mut edges = Vec::new();
        for leaf in 1..=4 {
            edges.push((0, leaf, 1.0));
            edges.push((leaf, leaf + 4, 1.0));
        }
        let star = WeightedGraph::from_indexed(9, &edges, Measure::Unit).unwrap();
        let d = DirichletDomain::split(Arc::new(star), &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(d.interior(), &[0]);
        let op = assemble(&d);
        assert_eq!(op.matrix.get(0, 0), 4.0);

        let op2 = assemble(&two_interior(Measure::Explicit(vec![2.0; 6])));
        assert_eq!(
            op2.matrix.csr().to_dense(),
            nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0])
        );
    }

    #[test]
    fn gradient_examples() {
        let d = single_interior();
        let g = d.graph();
        let u = VertexFunction::on_interior(&d, &[1.0]).unwrap();
        assert_eq!(gradient_norm(g, &u, 2), 1.0);
        let c = VertexFunction::on_vertices(vec![3.0; 5]);
        let v = VertexFunction::on_vertices(vec![1.0, -2.0, 0.5, 4.0, 0.0]);
        assert!((0..5).all(|x| gradient_form(g, &c, &v, x) == 0.0));
    }

    #[test]
    fn green_two_interior_hand_case() {
        let d = two_interior(Measure::Unit);
        let u = VertexFunction::on_interior(&d, &[1.0, 0.0]).unwrap();
        let v = VertexFunction::on_interior(&d, &[0.0, 1.0]).unwrap();
        let (lhs, rhs) = green_terms(&d, &u, &v);
        assert_eq!(lhs, 1.0);
        assert_eq!(rhs, -1.0);
        assert_eq!(green_residual(&d, &u, &v), 0.0);
        let z = VertexFunction::on_interior(&d, &[0.0, 0.0]).unwrap();
        assert_eq!(green_residual(&d, &z, &z), 0.0);
    }

    #[test]
    fn sobolev_norm_examples() {
        let d = single_interior();
        let u = VertexFunction::on_interior(&d, &[1.0]).unwrap();
        // |∇u|² over Ω: 1 at v3, 1/2 at v2 and v4; |u|² = 1
        assert!((sobolev_norm(&d, &u) - 3f64.sqrt()).abs() < 1e-15);
        let z = VertexFunction::on_interior(&d, &[0.0]).unwrap();
        assert_eq!(sobolev_norm(&d, &z), 0.0);
        let u2 = VertexFunction::on_interior(&d, &[2.0]).unwrap();
        assert!((sobolev_norm(&d, &u2) - 2.0 * sobolev_norm(&d, &u)).abs() < 1e-15);
    }

    #[test]
    fn triplet_export() {
        let op = assemble(&two_interior(Measure::Unit));
        let mut buf = Vec::new();
        op.matrix.write_triplets(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "0 0 2.0\n0 1 -1.0\n1 0 -1.0\n1 1 2.0\n"
        );
    }
}
