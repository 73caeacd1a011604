//! Special functions: scaled modified Bessel functions of integer and
//! half-integer order, the dimension-extended kernels k_{n,d} and i_{n,d},
//! the scaled complementary error function, Legendre polynomials with
//! Gauss-Legendre rules, and logarithmic capacities of canonical shapes.
//!
//! Everything here is a pure function of its arguments.

pub mod bessel;
pub mod capacity;
pub mod erfcx;
pub mod gamma;
pub mod kernels;
pub mod legendre;
pub mod scaled;

pub use bessel::{
    bessel_i_ratio_up, bessel_i_scaled, bessel_k, bessel_k_ratio_down, bessel_k_scaled,
    bessel_k_scaled_ext, BesselOrder,
};
pub use capacity::{log_capacity, ShapeForCapacity};
pub use erfcx::erfcx;
pub use gamma::gamma;
pub use kernels::{
    i_nd_ratio_down, i_nd_scaled, k_nd, k_nd_prime, k_nd_prime_scaled, k_nd_ratio_down,
    k_nd_scaled, k_nd_scaled_ext,
};
pub use legendre::{assoc_legendre_all, gauss_legendre, legendre_p, legendre_p_all};
pub use scaled::Scaled;

pub(crate) const EULER_GAMMA: f64 = 0.577215664901532860606512090082;
