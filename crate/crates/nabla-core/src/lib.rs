//! Exact series engine for integer- and real-order covariant derivatives
//! of tensor fields along a curve.
//!
//! The building blocks are truncated power series (jets) over exact
//! rational or float scalars. On top of those sit the P/Q symbol tables of
//! the derivative recursions, the closed multinomial formula for the k-th
//! covariant derivative, its fractional-order extension on generalized
//! power series, and series solvers for linear ODE systems.

pub mod comb;
pub mod covariant;
pub mod error;
pub mod fractional;
pub mod gamma;
pub mod geometry;
pub mod jet;
pub mod manifest;
pub mod ode;
pub mod poly;
pub mod pq;
pub mod scalar;
pub mod scenegen;
pub mod series;
pub mod verify;

pub use covariant::{
    covariant_derivative_k, covariant_derivative_once, enumerate_compositions,
    iterate_covariant_oracle, CompositionIndex,
};
pub use error::{Error, Result};
pub use fractional::{
    check_contraction_commutes, check_semigroup, frac_covariant, vandermonde_multinomial_check,
    FracResult, SeriesMatrix, TensorSeries,
};
pub use geometry::{
    jacobian_along_curve, pushforward_curve, transform_connection, ChartTransition, Connection,
    Curve, JacobianDirection, Scene, TensorFieldJet,
};
pub use jet::{Jet, JetMatrix};
pub use manifest::{emit_manifest, load_manifest, load_system, scene_digest, SystemDoc};
pub use ode::{solve_first_order, solve_second_order, LinearSystem, SampleGrid, SolveOutcome};
pub use poly::MultiPoly;
pub use pq::{
    check_derivative_expansion, check_orthogonality, check_transformation_law, ExpansionVariant,
    PqKind, PqTable,
};
pub use scalar::{Backend, Scalar};
pub use series::GenPowerSeries;
pub use verify::{run_verify, Failure, Suite, VerifyConfig, VerifyReport};
