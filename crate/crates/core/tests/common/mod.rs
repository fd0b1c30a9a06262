//! Random instances shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use graphwave::{path_graph, DirichletDomain, Forcing, ForcingTerm, Measure, TimeProfile, WaveProblem, WeightedGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Path with `n_interior` interior vertices: Ω = v2..v_{n+3} inside P_{n+4}.
pub fn path_domain(n_interior: usize, measure: Measure) -> Arc<DirichletDomain> {
    let g = Arc::new(path_graph(n_interior + 4, measure).unwrap());
    let omega: Vec<usize> = (1..n_interior + 3).collect();
    Arc::new(DirichletDomain::split(g, &omega).unwrap())
}

#[derive(Clone, Copy, Debug)]
pub enum MeasureChoice {
    Unit,
    Normalized,
    Random,
}

/// Connected graph on `n` vertices: a random spanning tree plus `extra`
/// random chords, weights in [0.25, 4).
pub fn random_graph(rng: &mut TestRng, n: usize, extra: usize, measure: MeasureChoice) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let has = |edges: &[(usize, usize, f64)], a: usize, b: usize| {
        edges.iter().any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a))
    };
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((order[i], parent, rng.gen_range(0.25..4.0)));
    }
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !has(&edges, a, b) {
            edges.push((a, b, rng.gen_range(0.25..4.0)));
        }
    }
    let measure = match measure {
        MeasureChoice::Unit => Measure::Unit,
        MeasureChoice::Normalized => Measure::Normalized,
        MeasureChoice::Random => Measure::Explicit((0..n).map(|_| rng.gen_range(0.2..5.0)).collect()),
    };
    WeightedGraph::from_indexed(n, &edges, measure).unwrap()
}

/// A breadth-first ball around a random vertex, grown until it has a
/// nonempty interior while leaving at least one vertex outside. `None` if
/// the graph admits no such ball from the chosen centre.
pub fn random_domain(rng: &mut TestRng, graph: Arc<WeightedGraph>) -> Option<DirichletDomain> {
    let n = graph.len();
    let centre = rng.gen_range(0..n);
    let dist = graph.bfs_distances(centre, &vec![true; n]);
    let mut by_dist: Vec<usize> = (0..n).collect();
    by_dist.sort_by_key(|&x| (dist[x].unwrap(), x));
    let min_size = rng.gen_range(2..n.max(3));
    for size in min_size.min(n - 1)..n {
        let omega = &by_dist[..size];
        if let Ok(d) = DirichletDomain::split(graph.clone(), omega) {
            return Some(d);
        }
    }
    None
}

/// Random graph and domain; retries with fresh draws until a valid domain
/// appears.
pub fn random_instance(rng: &mut TestRng, max_n: usize, measure: MeasureChoice) -> DirichletDomain {
    loop {
        let n = rng.gen_range(4..=max_n);
        let extra = rng.gen_range(0..=n);
        let g = Arc::new(random_graph(rng, n, extra, measure));
        if let Some(d) = random_domain(rng, g) {
            return d;
        }
    }
}

pub fn random_vector(rng: &mut TestRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Problem with random data and optional forcing of each profile kind.
pub fn random_problem(rng: &mut TestRng, domain: Arc<DirichletDomain>, forced: bool) -> WaveProblem {
    let n = domain.interior_len();
    let g = random_vector(rng, n);
    let h = random_vector(rng, n);
    let forcing = if forced {
        Forcing::new(vec![
            ForcingTerm {
                amplitude: random_vector(rng, n),
                profile: TimeProfile::Constant(1.0),
            },
            ForcingTerm {
                amplitude: random_vector(rng, n),
                profile: TimeProfile::Sinusoid {
                    amplitude: 1.0,
                    frequency: rng.gen_range(0.5..3.0),
                    phase: rng.gen_range(0.0..1.0),
                },
            },
        ])
    } else {
        Forcing::zero()
    };
    WaveProblem::new(domain, g, h, forcing).unwrap()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
