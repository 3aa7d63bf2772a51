//! Special functions and quadrature: the numerical substrate for the
//! window transforms and distribution statistics.

mod bessel;
mod erf;
mod quad;

pub use bessel::{bessel_j, bessel_k0, bessel_y0, EULER_GAMMA};
pub use erf::{erfc, normal_cdf, normal_pdf};
pub use quad::{adaptive_quad, adaptive_quad_osc, QuadratureResult};
