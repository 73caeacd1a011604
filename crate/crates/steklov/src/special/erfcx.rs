//! Scaled complementary error function erfcx(z) = e^{z^2} erfc(z), z >= 0.

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772453850905516027298167483341;

/// e^{z^2} erfc(z) for z >= 0, relative error <= 1e-10.
pub fn erfcx(z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("erfcx requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 2.0 {
        // erfcx = e^{z^2} - (2/sqrt(pi)) sum_k z^{2k+1} 2^k / (2k+1)!!
        // (all-positive confluent series for e^{z^2} erf(z)).
        let mut term = z;
        let mut sum = z;
        let z2 = z * z;
        for k in 1..80 {
            term *= 2.0 * z2 / (2.0 * k as f64 + 1.0);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        Ok(z2.exp() - 2.0 / SQRT_PI * sum)
    } else if z < 8.0 {
        // Laplace continued fraction, evaluated by modified Lentz:
        // erfcx(z) = (1/sqrt(pi)) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
        let tiny = 1e-300;
        let mut f: f64 = z;
        let mut c: f64 = f;
        let mut d: f64 = 0.0;
        for k in 1..500 {
            let a = 0.5 * k as f64;
            c = z + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = a.mul_add(d, z);
            if d.abs() < tiny {
                d = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok(1.0 / (SQRT_PI * f))
    } else {
        // Asymptotic: erfcx(z) ~ 1/(z sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2z^2)^k
        let inv2z2 = 1.0 / (2.0 * z * z);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term *= -(2.0 * k as f64 - 1.0) * inv2z2;
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        Ok(sum / (z * SQRT_PI))
    }
}
