//! Radial finite-volume laboratory for the doubly nonlinear diffusion
//! equation du/dt = Delta_p(u^gamma) and the entropy functionals attached
//! to it: Renyi entropy power, generalized Fisher information, and the
//! sharp functional inequalities (isoperimetric, Sobolev,
//! Gagliardo-Nirenberg) they encode.
//!
//! Structure:
//! - [`params`]: the exponent bookkeeping (b, q, sigma, a, regimes);
//! - [`special`]: Gamma-function machinery and every sharp constant in
//!   closed form;
//! - [`barenblatt`]: exact source-type solutions used as oracles;
//! - [`grid`]: the radial mesh and discrete differential/integral operators;
//! - [`solver`]: the explicit conservative time stepper;
//! - [`functionals`]: discrete entropy diagnostics along a run;
//! - [`suites`]: named verification suites combining all of the above;
//! - [`config`]/[`report`]: JSON experiment descriptions and results.

pub mod barenblatt;
pub mod config;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod params;
pub mod report;
pub mod solver;
pub mod special;
pub mod suites;
pub mod tolerances;

pub use barenblatt::SourceProfile;
pub use error::{Error, Result};
pub use params::{Params, Regime};
