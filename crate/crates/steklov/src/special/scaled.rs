//! Extended-range floating point: value = mantissa * 2^exp2.
//!
//! Modified Bessel functions of large order at small argument overflow f64
//! (K_n(z) ~ (n-1)!/2 * (2/z)^n), but every formula downstream only ever
//! needs ratios or products where the huge factors cancel. Carrying an
//! explicit base-2 exponent through the recurrences keeps those ratios exact.

/// A nonnegative value `mantissa * 2^exp2` with `mantissa` in `[1, 2)` (or 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub exp2: i64,
}

#[allow(clippy::should_implement_trait)]
impl Scaled {
    pub const ZERO: Scaled = Scaled { mantissa: 0.0, exp2: 0 };

    pub fn new(value: f64) -> Scaled {
        if value == 0.0 {
            return Scaled::ZERO;
        }
        assert!(value > 0.0 && value.is_finite(), "Scaled requires a positive finite value");
        let (m, e) = frexp(value);
        // frexp gives m in [0.5, 1); shift to [1, 2).
        Scaled { mantissa: m * 2.0, exp2: e as i64 - 1 }
    }

    fn renorm(mantissa: f64, exp2: i64) -> Scaled {
        if mantissa == 0.0 {
            return Scaled::ZERO;
        }
        let (m, e) = frexp(mantissa);
        Scaled { mantissa: m * 2.0, exp2: exp2 + e as i64 - 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn mul(self, other: Scaled) -> Scaled {
        Scaled::renorm(self.mantissa * other.mantissa, self.exp2 + other.exp2)
    }

    pub fn mul_f64(self, factor: f64) -> Scaled {
        assert!(factor >= 0.0);
        if factor == 0.0 || self.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::new(factor).mul(self)
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp2 >= other.exp2 { (self, other) } else { (other, self) };
        let shift = hi.exp2 - lo.exp2;
        if shift > 120 {
            return hi;
        }
        let m = hi.mantissa + lo.mantissa * (-(shift as f64)).exp2();
        Scaled::renorm(m, hi.exp2)
    }

    /// self / other as f64; +inf on overflow, 0 on underflow.
    pub fn ratio(self, other: Scaled) -> f64 {
        assert!(!other.is_zero(), "division by zero Scaled");
        if self.is_zero() {
            return 0.0;
        }
        let m = self.mantissa / other.mantissa;
        let e = self.exp2 - other.exp2;
        if e > 1030 {
            return f64::INFINITY;
        }
        if e < -1080 {
            return 0.0;
        }
        m * (e as f64).exp2()
    }

    /// The plain f64 value, or None if it is not representable.
    pub fn to_f64(self) -> Option<f64> {
        if self.is_zero() {
            return Some(0.0);
        }
        if self.exp2 > 1022 {
            return None;
        }
        if self.exp2 < -1070 {
            return Some(0.0);
        }
        Some(self.mantissa * (self.exp2 as f64).exp2())
    }

    pub fn ln(self) -> f64 {
        assert!(!self.is_zero());
        self.mantissa.ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

/// Decompose into (m, e) with value = m * 2^e and m in [0.5, 1).
fn frexp(x: f64) -> (f64, i32) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    if exp_field == 0 {
        // Subnormal: renormalize through a fixed scale.
        let big = x * (1u64 << 54) as f64;
        let (m, e) = frexp(big);
        return (m, e - 54);
    }
    let e = exp_field - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}
