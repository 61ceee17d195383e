//! Numerical foundation: special functions, adaptive quadrature, monotone
//! interpolation, and deterministic random-number streams.

mod interp;
mod quad;
mod rng;
mod special;

pub use interp::Grid1D;
pub use quad::{
    integrate, integrate_semiinf, integrate_semiinf_with_breakpoints,
    integrate_with_breakpoints, Quadrature,
};
pub use rng::RngStream;
pub use special::{bessel_i0, bessel_i0_scaled, gaussian_q, marcum_q1};
