//! Exact complex dyadic rationals, `(re + i·im)·2^exp` with integer re, im.
//!
//! Every finite f64 is such a number and the set is closed under addition and
//! multiplication, so polynomials in f64 inputs can be evaluated without
//! rounding and converted back once.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExactComplex {
    re: BigInt,
    im: BigInt,
    exp: i64,
}

/// Splits a finite f64 into `mantissa · 2^exp`.
fn decompose(x: f64) -> (i64, i64) {
    debug_assert!(x.is_finite());
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & 0xf_ffff_ffff_ffff) as i64;
    let (mantissa, exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), raw_exp - 1075)
    };
    (sign * mantissa, exp)
}

impl ExactComplex {
    pub(crate) fn zero() -> Self {
        ExactComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
            exp: 0,
        }
    }

    pub(crate) fn from_complex(z: Complex64) -> Self {
        let (mr, er) = decompose(z.re);
        let (mi, ei) = decompose(z.im);
        let exp = er.min(ei);
        ExactComplex {
            re: BigInt::from(mr) << (er - exp) as usize,
            im: BigInt::from(mi) << (ei - exp) as usize,
            exp,
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn rescaled(&self, exp: i64) -> (BigInt, BigInt) {
        debug_assert!(exp <= self.exp);
        let shift = (self.exp - exp) as usize;
        (&self.re << shift, &self.im << shift)
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let (ar, ai) = self.rescaled(exp);
        let (br, bi) = other.rescaled(exp);
        ExactComplex {
            re: ar + br,
            im: ai + bi,
            exp,
        }
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        ExactComplex {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
            exp: self.exp + other.exp,
        }
    }

    pub(crate) fn scale(&self, w: u64) -> Self {
        ExactComplex {
            re: &self.re * w,
            im: &self.im * w,
            exp: self.exp,
        }
    }

    pub(crate) fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re, self.exp), to_f64(&self.im, self.exp))
    }
}

/// `m · 2^exp` to the nearest f64 up to a relative 2^-60 truncation.
fn to_f64(m: &BigInt, exp: i64) -> f64 {
    let excess = m.bits().saturating_sub(62) as i64;
    let head = (m >> excess as usize).to_f64().unwrap_or(0.0);
    let mut shift = exp + excess;
    let mut value = head;
    // apply the binary exponent in steps that cannot overflow powi
    while shift != 0 {
        let step = shift.clamp(-1000, 1000);
        value *= 2f64.powi(step as i32);
        shift -= step;
    }
    value
}
