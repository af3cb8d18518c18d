//! Self-similar actions of groups on finite higher-rank graphs.
//!
//! The crate validates k-graphs and self-similar actions on them, computes
//! Perron-Frobenius data and the periodicity lattice, builds the dense
//! monomial algebra with its conditional expectation, and evaluates KMS
//! states through their classification by traces on the periodicity group.

pub mod action;
pub mod algebra;
pub mod kgraph;
pub mod kms;
pub mod lattice;
pub mod models;
pub mod periodicity;
pub mod perron;
pub mod report;

pub use action::{ActionError, ActionSystem, Caps, GeneratorTable, GroupElement};
pub use algebra::{AlgebraElement, AlgebraError, GaussRational, Monomial, Scalar};
pub use kgraph::{Degree, EdgeIdx, GraphBuilder, KGraph, KGraphError, Path, VertexId};
pub use lattice::IntLattice;
pub use kms::{KmsError, KmsState, TraceKind, TraceSpec};
pub use perron::{PerronData, PerronError};
pub use report::{Issue, IssueKind, ValidationReport};
