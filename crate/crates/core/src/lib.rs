//! Exact minrank computation for unicast-uniprior index coding problems.
//!
//! A broadcast server holds `n` messages; each receiver demands one unique
//! set of messages and already caches another unique set as side
//! information. The minimum number of coded transmissions achievable with a
//! scalar linear code equals the minrank over GF(2) of the problem's
//! side-information graph. This crate computes that value two ways:
//!
//! * [`fitting::FittingPattern::brute_force_minrank`] sweeps every fitting
//!   matrix and minimizes the rank directly (exponential, used as the
//!   reference oracle);
//! * [`solver::minrank_fast`] enumerates demand tables and solves each
//!   column as a single-unicast uniprior sub-problem in linear time, which
//!   is exact for unicast-uniprior instances and vastly cheaper.
//!
//! The fast path also yields certificates: the per-column cycles are
//! unicycles of the side-information graph, and their edges identify the
//! critical side-information bits (see [`solver::critical_side_information`]).

pub mod fitting;
pub mod generator;
pub mod gf2;
pub mod graph;
pub mod problem;
pub mod samples;
pub mod solver;

pub use fitting::{BruteForceResult, FittingError, FittingPattern, FreeBits};
pub use generator::{generate_instance, GenerateError, SplitMix64};
pub use gf2::{Gf2Error, Gf2Matrix};
pub use graph::{GraphError, SideInformationGraph, Supergraph};
pub use num_bigint::BigUint;
pub use problem::{
    IndexCodingProblem, ParseError, Receiver, SingleUnicastProblem, Violation,
};
pub use solver::{
    CriticalBit, CriticalSideInfo, DemandTable, MinrankResult, SolveOptions, SolverError,
    SymmetricRate,
};
