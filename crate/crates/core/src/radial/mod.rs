//! Grids, profiles, nonlinearities, quadrature, differentiation and the
//! annulus norms used throughout.

pub mod diff;
pub mod dimension;
pub mod grid;
pub mod nonlinearity;
pub mod norms;
pub mod profile;
pub mod quadrature;

pub use diff::{differentiate, with_numerical_derivatives};
pub use dimension::{Dimension, Regime};
pub use grid::{Grading, RadialGrid};
pub use nonlinearity::{Flags, Nonlinearity, Table};
pub use norms::{annulus_norms, ball_h1_norm, AnnulusNorms};
pub use profile::RadialProfile;
pub use quadrature::{cumulative, gauss_legendre, integrate, power_tail, weighted_integral};
