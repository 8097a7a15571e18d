//! Degree and infectious-period laws, with the generating-function and
//! transform services consumed by the analytic solvers.

mod degree;
mod period;
pub mod special;

pub use degree::{DegreeFamily, DegreeModel, SERIES_TOL};
pub use period::{InfectiousPeriodModel, PeriodFamily};
