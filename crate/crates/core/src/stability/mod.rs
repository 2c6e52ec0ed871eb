//! Semi-stability: the spectral test on the linearized operator and the
//! sampled quadratic-form tests that cross-check it.

mod eigen;
mod form;
mod test_fns;

pub use eigen::{
    first_eigenpair, first_eigenvalue, potential_from_profile, EigenConfig, LinearizedOperator, Method, StabilityVerdict,
};
pub use form::{quadratic_form, radial_form_test, FormTest};
pub use test_fns::{CappedPower, LogBump, RadialTestFn, SineLog};
