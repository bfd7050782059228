//! Finite Heisenberg groups, stabilizer MUBs, and the frame potentials
//! `f_SIC` / `f_MUS` that measure how far a pure state is from the
//! stabilizer states, together with the searches and datasets built on them.
//!
//! The crate is organized in layers:
//!
//! * [`algebra`] — complex linear-algebra primitives, group construction,
//!   parity and the order-3 Zauner unitary;
//! * [`mubs`] — petals (maximal abelian subgroups), flowers and the
//!   stabilizer MUBs they generate;
//! * [`potentials`] — the two frame potentials, probability vectors,
//!   autocorrelations and analytic gradients;
//! * [`states`] — catalogs of special states (SIC, Alltop, MUB-balanced);
//! * [`explore`] — seeded Fubini-Study sampling, Monte Carlo averages and
//!   the multi-start penalty optimizer;
//! * [`analysis`] — higher-level reproductions (Zauner real-subspace map,
//!   orthogonality graphs, basis classification, closed-form tables).

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod explore;
pub mod mubs;
pub mod potentials;
pub mod states;

pub use algebra::{
    DisplacementIndex, GroupKind, HeisenbergGroup, ParityOperator, StateVector, UnitaryOperator,
    ZaunerUnitary,
};
pub use analysis::{OrthogonalityGraph, SubspaceMap};
pub use error::{Error, Result};
pub use explore::{
    Frame, Functional, MCEstimate, OptimizationProblem, OptimizationResult, Sampler,
};
pub use mubs::{Basis, Flower, MUBasisSet, Petal};
pub use potentials::{AutocorrelationVector, PotentialReport, ProbabilityVector};
pub use states::{BalancedSearch, NamedState, Rational, SicFamilyParameter};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
