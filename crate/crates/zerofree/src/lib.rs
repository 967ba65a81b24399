//! Limit law of the zero-free abscissa of random Epstein zeta functions, computed
//! by direct quadrature, by residue series over complex poles and by Monte Carlo,
//! together with lattice abscissae and Jessen zero densities.

pub mod error;
pub mod jet;
pub mod lattice_zeta;
pub mod limit_distribution;
pub mod poisson_oracle;
pub mod quadrature;
pub mod residue_engine;
pub mod special_functions;
pub mod zero_density;

pub use error::{Error, Result};
