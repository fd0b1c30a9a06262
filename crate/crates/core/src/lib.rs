//! Wave equation on finite weighted graphs with a Dirichlet boundary.
//!
//! A [`WaveProblem`] couples a [`DirichletDomain`] with initial data and a
//! forcing term. It can be solved two ways: with Rothe's implicit time
//! discretisation ([`solve_rothe`]) or exactly, mode by mode, in the
//! eigenbasis of the Dirichlet Laplacian ([`SpectralSolution`]). The
//! [`analysis`] module compares the two and runs the standard experiments.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod convolution;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod problem;
pub mod rothe;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{grid_graph, path_graph, DirichletDomain, Edge, Measure, Support, VertexFunction, WeightedGraph};
pub use operators::{assemble, DirichletOperator, OperatorMatrix, SymmetrizedOperator};
pub use problem::{Forcing, ForcingTerm, HolderCondition, TimeProfile, WaveProblem};
pub use rothe::{solve_rothe, AprioriBounds, RotheRun};
pub use spectral::{eigendecompose, solve_spectral, FormulaVariant, SpectralSolution, SpectralState, Spectrum};
