//! Network SIR epidemic dynamics.
//!
//! Each node `i` carries a susceptible fraction `x_i` and an infected fraction
//! `y_i` evolving under
//!
//! ```text
//! dx/dt = -[x] A y
//! dy/dt =  [x] A y - gamma y
//! ```
//!
//! When the interaction matrix is rank one, `A = a b^T`, the model has one
//! conserved quantity per node, a closed-form limit state and a static
//! classifier for the shape of every `y_i(t)`; see [`rank1`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curves;
pub mod error;
pub mod integrate;
pub mod model;
pub mod rank1;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod svg;

pub use error::{Result, SirError};
pub use integrate::{integrate, integrate_until_extinction, IntegratorConfig, Trajectory};
pub use model::{EpidemicParams, Interaction, Matrix, RankOneFactors, State};
pub use rank1::{CurveShape, ShapeTag, Stability};
pub use scenario::{Analysis, Scenario, SweepSpec};
