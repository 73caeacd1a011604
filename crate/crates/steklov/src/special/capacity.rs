//! Logarithmic capacities of canonical planar shapes.

use crate::error::{Error, Result};
use crate::special::gamma::gamma;
use std::f64::consts::PI;

/// A planar shape whose logarithmic capacity is known in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeForCapacity {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Square { side: f64 },
    EquilateralTriangle { side: f64 },
}

/// Logarithmic capacity R_c:
///   disk R, ellipse (a+b)/2, square Gamma(1/4)^2/(4 pi^{3/2}) side,
///   equilateral triangle Gamma(1/3)^3/(2 pi^2 sqrt(3)) side.
pub fn log_capacity(shape: ShapeForCapacity) -> Result<f64> {
    let positive = |v: f64, name: &str| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("{name} must be positive, got {v}")))
        }
    };
    match shape {
        ShapeForCapacity::Disk { radius } => positive(radius, "radius"),
        ShapeForCapacity::Ellipse { a, b } => {
            positive(a, "a")?;
            positive(b, "b")?;
            Ok(0.5 * (a + b))
        }
        ShapeForCapacity::Square { side } => {
            positive(side, "side")?;
            Ok(gamma(0.25).powi(2) / (4.0 * PI.powf(1.5)) * side)
        }
        ShapeForCapacity::EquilateralTriangle { side } => {
            positive(side, "side")?;
            // sqrt(3) Gamma(1/3)^3 / (8 pi^2) = 0.4217539... (classical value;
            // matches the capacity recovered numerically from mu_0(p -> 0))
            Ok(3.0_f64.sqrt() * gamma(1.0 / 3.0).powi(3) / (8.0 * PI * PI) * side)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(log_capacity(ShapeForCapacity::Disk { radius: 1.0 }).unwrap(), 1.0);
        assert_eq!(log_capacity(ShapeForCapacity::Ellipse { a: 1.0, b: 0.5 }).unwrap(), 0.75);
        // Gamma(1/4)^2 * 2 / (4 pi^{3/2}) against the 30-digit gamma reference
        let g14: f64 = 3.62560990822190831193068515587;
        let want = g14 * g14 * 2.0 / (4.0 * PI.powf(1.5));
        let got = log_capacity(ShapeForCapacity::Square { side: 2.0 }).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!((got - 1.1804).abs() < 1e-4);
        let g13: f64 = 2.67893853470774763365569294098;
        let want_t = 3.0_f64.sqrt() * g13.powi(3) / (8.0 * PI * PI) * 2.0;
        let got_t = log_capacity(ShapeForCapacity::EquilateralTriangle { side: 2.0 }).unwrap();
        assert!((got_t - want_t).abs() < 1e-10);
        assert!((got_t / 2.0 - 0.4217539).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_capacity(ShapeForCapacity::Disk { radius: 0.0 }).is_err());
        assert!(log_capacity(ShapeForCapacity::Ellipse { a: 1.0, b: -0.5 }).is_err());
    }
}
