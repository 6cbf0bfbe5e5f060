//! Embeddability over the reals by interval branch-and-prune.
//!
//! A graph is turned into a [`ConstraintSystem`] over the coordinates of its
//! unpinned vertices. Boxes of the search space are narrowed by hull
//! consistency ([`contract`]), split ([`bisect`]) and tested for a root
//! ([`prove_root_in_box`]) until every box is refuted, a root is certified,
//! or the budget runs out. [`poly`] exports the same constraints as one
//! polynomial for external solvers.

pub mod arith;
pub mod contract;
pub mod newton;
pub mod poly;
pub mod shadow;
pub mod solver;
pub mod system;

pub use arith::Interval;
pub use contract::{bisect, contract, Contraction, Refutation};
pub use newton::{prove_root_in_box, Certificate, Existence};
pub use poly::{export_polynomial, EmbeddingPolynomial};
pub use solver::{
    decide_embeddability, resume_embeddability, BranchAndPrune, Checkpoint, SearchStats, SolverOptions, Verdict,
};
pub use system::{
    build_constraint_system, Constraint, ConstraintKind, ConstraintSystem, IntervalBox, Term, DEFAULT_DELTA,
};
