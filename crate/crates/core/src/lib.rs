//! SIR epidemics on configuration-model random graphs.
//!
//! * [`distributions`]: degree and infectious-period laws.
//! * [`analytics`]: extinction probabilities, growth and decay rates, the
//!   epidemic-duration constant, vaccination variants.
//! * [`sim`]: event-driven epidemic with the graph paired lazily during the outbreak.
//! * [`branching`]: continuous-time branching processes approximating the
//!   early and final phases.
//! * [`harness`]: seeded Monte Carlo experiments with CSV/JSON output.

// `!(x > 1.0)` deliberately sends NaN down the rejection path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod branching;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod rng;
pub mod sim;

pub use error::{EpiError, Result};
