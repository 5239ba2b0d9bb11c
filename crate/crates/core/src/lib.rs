//! Optimal transport with the causal cost `c(x,y) = -d^p(x,y)` on flat
//! Minkowski space `R^{1,n}` (`+inf` on non-causal pairs, `0 < p < 1`).
//!
//! The crate provides:
//! - causal structure, Lorentzian distance, time-`t` actions, and the
//!   Lagrangian/Hamiltonian pair with its Legendre transform ([`geometry`]);
//! - discrete measures, couplings, and deterministic samplers ([`measures`]);
//! - an exact primal solver with forbidden arcs, feasibility flows,
//!   duality-gap evaluation, and cyclical-monotonicity certificates
//!   ([`transport`]);
//! - chain-built Kantorovich potentials, c-transforms, c-subdifferentials,
//!   Monge-map recovery, and grid regularity diagnostics ([`potentials`]);
//! - Lax-Oleinik semigroups, calibrated pairs, displacement interpolation,
//!   and the backward-forward regularization experiment ([`weakkam`]);
//! - turn-key reproductions of the bundled counterexample geometries with
//!   machine-checkable reports ([`scenarios`]).

pub mod ext;
pub mod geometry;
pub mod grid;
pub mod measures;
pub mod potentials;
pub mod report;
pub mod scenarios;
pub mod svg;
pub mod transport;
pub mod weakkam;

mod flow;

/// Scalar type used throughout. Costs are powers of Lorentzian distances,
/// hence irrational; all contracts are stated with f64 tolerances.
pub type Real = f64;

pub use ext::ExtendedCost;
pub use geometry::{CausalClass, CostParams, Covector, SpacetimePoint, TangentVector};
pub use measures::{Coupling, DiscreteMeasure};
pub use potentials::PotentialField;
pub use transport::{CostMatrix, TransportResult};
