//! Hes1 autorepression model with promoter binding sites and dimer dynamics.
//!
//! Four model levels are provided: the full binding model, the reduction
//! with dimers at quasi-equilibrium, the reduction with the binding chain at
//! quasi-equilibrium, and the classical two-variable loop. Around them sit an
//! adaptive integrator, steady-state and stability analysis, and a harness
//! comparing the levels as the small timescale parameters shrink.

pub mod config;
pub mod error;
pub mod linalg;
pub mod model;
pub mod numeric;
pub mod ode;
pub mod params;
pub mod stability;
pub mod state;
pub mod tikhonov;

pub use error::{Error, Result};
pub use model::Model;
pub use params::{BindingPolynomial, DimensionalParams, DimerParams, InvariantRegion, ModelParams};
pub use state::{StateVector, Variant};
