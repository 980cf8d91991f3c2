//! Alpha-stable graphical models.
//!
//! A linear-regression Bayesian network whose per-node noise terms are
//! independent alpha-stable variables sharing one characteristic exponent.
//! This crate holds the numerical core: univariate stable primitives
//! ([`stable`]), least-l_p regression ([`regression`]), the model object and
//! its multivariate representations ([`model`]), the dispersion scores
//! ([`scoring`]), ordering-based structure search ([`search`]) and the
//! experiment drivers ([`pipelines`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command-line front end live in the `stablegm` companion crate.
#![no_std]

extern crate alloc;

mod error;
pub mod exec;
pub mod linalg;
pub mod math;
pub mod model;
pub mod pipelines;
pub mod regression;
pub mod rng;
pub mod scoring;
pub mod search;
pub mod stable;

pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use model::{Dag, DataMatrix, NoiseLaw, SGModel, SpectralAtom};
pub use regression::{RegressionProblem, RegressionResult};
pub use scoring::{ScoreKind, ScoreReport};
pub use search::{SearchConfig, SearchTrace};
pub use stable::{EstimatorReport, StableParams, StandardizedSample};
