//! Stochastic model-based minimization under Bregman geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`legendre`]: Legendre functions `Φ`, Bregman divergences, local norms.
//! * [`models`]: stochastic one-sided model oracles and their constant checks.
//! * [`subproblem`]: the Bregman proximal step and its three-point certificate.
//! * [`driver`]: the outer stochastic loops, step-size rules and rate sweeps.
//! * [`envelope`]: the Bregman–Moreau envelope and the stationarity report.
//! * [`problems`]: the registered test instances, ground-truth oracles and configs.
//! * [`cli`]: the `bregopt` command line front end.
//!
//! ```
//! use bregopt::legendre::LegendreFunction;
//! use nalgebra::dvector;
//!
//! let phi = LegendreFunction::euclidean();
//! let d = phi.bregman(&dvector![3.0, 4.0], &dvector![0.0, 0.0]).unwrap();
//! assert_eq!(d, 12.5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decimal;
pub mod driver;
pub mod envelope;
pub mod error;
pub mod legendre;
pub mod minimize;
pub mod models;
pub mod numdiff;
pub mod problems;
pub mod roots;
pub mod subproblem;

pub use error::{Error, Result};

/// Points and dual vectors in `R^d`.
pub type Point = nalgebra::DVector<f64>;
