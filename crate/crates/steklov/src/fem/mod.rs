//! Finite-element solver for the generalized exterior Steklov problem on the
//! truncated domain with a transparent boundary condition.

pub mod assemble;
pub mod dense;
pub mod export;
pub mod extend;
pub mod solve;
pub mod tbc;
pub mod validate;

pub use assemble::{assemble, AssembledSystem, FemMode};
pub use export::{spectrum_csv, spectrum_to_export, SpectrumExport};
pub use extend::{extend_exterior, outer_mismatch};
pub use solve::{FemProblem, SteklovSpectrum};
pub use tbc::{tbc_matrix, AngularFn, TbcData};
pub use validate::{validate_against_ball, BallModeReport, BallValidationReport};
