//! Generalized exterior Steklov eigenproblem toolkit.
//!
//! Solves (p - Laplace) V = 0 in the exterior of a compact obstacle with the
//! spectral boundary condition dV/dn = mu V, by a P1 finite-element method on
//! a truncated annular domain with a transparent boundary condition, computes
//! the exact spectrum for ball obstacles, classifies the small-p asymptotic
//! behavior of the eigenvalues, and evaluates first-passage-time statistics
//! for diffusion in exterior domains.

// `!(x >= 0.0)` guards are deliberate: they reject NaN along with the sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod ball;
pub mod error;
pub mod fem;
pub mod first_passage;
pub mod geometry;
pub mod special;

pub use error::{Error, Result};

// Run every fenced Rust snippet in the book as a doctest, so the guide and
// the library cannot drift apart.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(getting_started, "../../../book/src/getting-started.md");
    chapter!(special_functions, "../../../book/src/special-functions.md");
    chapter!(ball_spectrum, "../../../book/src/ball-spectrum.md");
    chapter!(meshing, "../../../book/src/meshing.md");
    chapter!(fem_solver, "../../../book/src/fem-solver.md");
    chapter!(small_p, "../../../book/src/small-p.md");
    chapter!(first_passage, "../../../book/src/first-passage.md");
    chapter!(cli, "../../../book/src/cli.md");
}
