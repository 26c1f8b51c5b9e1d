//! Independent numerical checks of the exact tables: nested quadrature of the
//! defining external-angle integrals, samplers for beta and beta' points,
//! Monte Carlo estimates of vertex angles, and an arbitrary-precision
//! tanh-sinh rule. Nothing here uses the symbolic trigonometric engine.

mod mc;
pub mod precise;
mod quad;
mod sample;

pub use mc::{mc_vertex_angle, McConfig, McResult};
pub use quad::{quad_i, quad_i_tilde, QuadResult, F64_FLOOR};
pub use sample::{sample_beta_point, sample_beta_prime_point, sample_direction, Radial};
