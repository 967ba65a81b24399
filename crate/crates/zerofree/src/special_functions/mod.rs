//! Complex special functions: incomplete gamma functions, Φ_a, η_a, ξ(a), Π(y),
//! F_k(y), Bessel J₀/J₁ and log-weighted oscillatory primitives.

pub mod bessel;
pub mod gamma;
pub mod incomplete_gamma;
pub mod phi;
pub mod series;

pub use bessel::bessel_j;
pub use gamma::{digamma, gamma, ln_gamma_abs, trigamma, EULER_GAMMA};
pub use incomplete_gamma::{lower_incomplete_gamma, upper_incomplete_gamma};
pub use phi::{eta_a, eta_da, eta_dz, phi_a, phi_a_da, phi_a_dy, xi, xi_da};
pub use series::{capital_pi, f_k_series, log_weighted_integral};
