//! Scalar abstractions shared by the exact and floating point code paths.
//!
//! [`Scalar`] is an ordered field: polytopes, the simplex solver and LLL are
//! generic over it and run either on exact rationals or on machine floats.
//! [`Real`] adds the transcendental operations the geometry needs and is
//! implemented by `f32`, `f64` and the interval type [`Ball`].

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::ball::Ball;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + 'static {
    /// Whether sign decisions are exact for this type.
    const EXACT: bool;

    fn from_bigint(v: &BigInt) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn floor_int(&self) -> BigInt;
    fn ceil_int(&self) -> BigInt;
    fn to_f64(&self) -> f64;

    /// Zero test used for pivoting decisions; tolerant for floats.
    fn near_zero(&self) -> bool;

    /// The exact rational value, for types that have one.
    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn is_pos(&self) -> bool {
        !self.near_zero() && self.is_positive()
    }

    fn is_neg(&self) -> bool {
        !self.near_zero() && self.is_negative()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn floor_int(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }
    fn ceil_int(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn near_zero(&self) -> bool {
        self.is_zero()
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

macro_rules! impl_scalar_float {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_bigint(v: &BigInt) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_rational(r: &BigRational) -> Self {
                rational_to_f64(r) as $t
            }
            fn floor_int(&self) -> BigInt {
                BigInt::from_f64(self.floor() as f64).expect("finite")
            }
            fn ceil_int(&self) -> BigInt {
                BigInt::from_f64(self.ceil() as f64).expect("finite")
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn near_zero(&self) -> bool {
                self.abs() <= $tol
            }
        }
    };
}

impl_scalar_float!(f64, 1e-9);
impl_scalar_float!(f32, 1e-4);

/// Converts without overflowing on rationals whose parts exceed the f64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 64;
    let q: BigInt = if shift >= 0 {
        r.numer() / (r.denom() << shift as u32)
    } else {
        (r.numer() << (-shift) as u32) / r.denom()
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powf(shift as f64)
}

/// Real numbers with transcendental functions at a requested precision.
///
/// Machine floats ignore the precision argument.
pub trait Real: Clone + Debug + Num + Neg<Output = Self> + PartialOrd {
    fn from_i64_prec(v: i64, prec: u32) -> Self;
    fn from_bigint_prec(v: &BigInt, prec: u32) -> Self;
    fn from_rational_prec(r: &BigRational, prec: u32) -> Self;
    fn pi(prec: u32) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn precision(&self) -> u32;

    /// Nearest integer, or `None` when it cannot be decided.
    fn round_int(&self) -> Option<BigInt>;
}

impl Real for Ball {
    fn from_i64_prec(v: i64, prec: u32) -> Self {
        Ball::from_i64(v, prec)
    }
    fn from_bigint_prec(v: &BigInt, prec: u32) -> Self {
        Ball::from_bigint(v, prec)
    }
    fn from_rational_prec(r: &BigRational, prec: u32) -> Self {
        Ball::from_rational(r, prec)
    }
    fn pi(prec: u32) -> Self {
        Ball::pi(prec)
    }
    fn sqrt(&self) -> Self {
        Ball::sqrt(self)
    }
    fn sin(&self) -> Self {
        Ball::sin(self)
    }
    fn cos(&self) -> Self {
        Ball::cos(self)
    }
    fn exp(&self) -> Self {
        Ball::exp(self)
    }
    fn ln(&self) -> Self {
        Ball::ln(self)
    }
    fn abs_val(&self) -> Self {
        Ball::abs(self)
    }
    fn to_f64(&self) -> f64 {
        Ball::to_f64(self)
    }
    fn precision(&self) -> u32 {
        Ball::precision(self)
    }
    fn round_int(&self) -> Option<BigInt> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let lo = (self.lower() + &half).floor().to_integer();
        let hi = (self.upper() + &half).floor().to_integer();
        (lo == hi).then_some(lo)
    }
}

macro_rules! impl_real_float {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            fn from_i64_prec(v: i64, _: u32) -> Self {
                v as $t
            }
            fn from_bigint_prec(v: &BigInt, _: u32) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_rational_prec(r: &BigRational, _: u32) -> Self {
                rational_to_f64(r) as $t
            }
            fn pi(_: u32) -> Self {
                std::f64::consts::PI as $t
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn abs_val(&self) -> Self {
                <$t>::abs(*self)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn precision(&self) -> u32 {
                $bits
            }
            fn round_int(&self) -> Option<BigInt> {
                BigInt::from_f64(self.round() as f64)
            }
        }
    };
}

impl_real_float!(f64, 53);
impl_real_float!(f32, 24);

/// `x` rounded to the nearest integer with halves going down, the tie rule used
/// for medians in the enumerator.
pub fn round_half_down(x: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (x - &half).ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_floor_ceil() {
        let r = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(r.floor_int(), BigInt::from(-4));
        assert_eq!(r.ceil_int(), BigInt::from(-3));
        assert_eq!(round_half_down(&r), BigInt::from(-4));
        let r = BigRational::new(BigInt::from(7), BigInt::from(2));
        assert_eq!(round_half_down(&r), BigInt::from(3));
        assert_eq!(round_half_down(&BigRational::new(BigInt::from(8), BigInt::from(3))), BigInt::from(3));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::one() << 2000u32;
        let r = BigRational::new(big.clone() * 3, big * 2);
        assert!((rational_to_f64(&r) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn float_pi() {
        assert_eq!(<f64 as Real>::pi(0), std::f64::consts::PI);
        assert!((<f32 as Real>::pi(0) - std::f32::consts::PI).abs() < 1e-6);
    }
}
