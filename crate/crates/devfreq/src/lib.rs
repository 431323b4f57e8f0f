//! Brownian path simulation and deviation-frequency verification.
//!
//! The crate has three layers:
//!
//! * samplers for Brownian motion and related Gaussian objects built on a
//!   counter-based coefficient store ([`rng`], [`path`], [`paths`]),
//! * closed-form tail bounds for the deviation frequencies of classical
//!   path-property approximations, together with the quantitative
//!   Borel-Cantelli machinery behind them ([`bounds`], [`borel_cantelli`],
//!   [`special`], [`taut_string`]),
//! * a Monte Carlo harness that turns each approximation into an event
//!   schedule, estimates the empirical overlap tail and checks it against
//!   the analytic bound ([`experiments`], [`report`], [`runner`]).
//!
//! The `devfreq` binary drives runs from flat config files; see the README
//! for the config schema and the available experiment kinds.

pub mod borel_cantelli;
pub mod bounds;
pub mod config;
pub mod experiments;
pub mod numeric;
pub mod oracle;
pub mod path;
pub mod paths;
pub mod report;
pub mod rng;
pub mod runner;
pub mod selftest;
pub mod special;
pub mod taut_string;

pub use path::{GridKind, PathOnGrid};
pub use rng::{Coefficients, FixedCoefficients, GaussianCoefficients};
