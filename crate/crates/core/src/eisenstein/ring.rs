use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::EisensteinError;

/// An element `a + b·ω` of Z[ω] with ω = e^(2πi/3), so ω² = -1 - ω.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EisensteinInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl EisensteinInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        EisensteinInt { a: a.into(), b: b.into() }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        EisensteinInt { a: a.into(), b: BigInt::zero() }
    }

    pub fn omega() -> Self {
        EisensteinInt::new(0, 1)
    }

    /// 1 + 2ω, a square root of -3 and the prime above 3.
    pub fn sqrt_minus3() -> Self {
        EisensteinInt::new(1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// a² - ab + b² = |x|².
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    /// Complex conjugate: (a - b) - bω.
    pub fn conj(&self) -> Self {
        EisensteinInt { a: &self.a - &self.b, b: -&self.b }
    }

    /// The six units ±1, ±ω, ±(1 + ω), in rotation order by π/3 steps.
    pub fn units() -> [EisensteinInt; 6] {
        [
            EisensteinInt::new(1, 0),
            EisensteinInt::new(1, 1),
            EisensteinInt::new(0, 1),
            EisensteinInt::new(-1, 0),
            EisensteinInt::new(-1, -1),
            EisensteinInt::new(0, -1),
        ]
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Representative among the six associates with a > 0 and b >= 0,
    /// smallest b on ties. Zero maps to itself.
    pub fn canonical_associate(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        EisensteinInt::units()
            .iter()
            .map(|u| self * u)
            .filter(|x| x.a.is_positive() && !x.b.is_negative())
            .min_by(|x, y| x.b.cmp(&y.b))
            .expect("some associate lies in the fundamental cone")
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = EisensteinInt::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: `x = q·y + r` with `norm(r) < norm(y)`.
    ///
    /// The exact quotient x·conj(y)/norm(y) is rounded coordinate-wise to the
    /// nearest integer (halves up); the rounding error e satisfies norm(e) ≤ 3/4.
    pub fn div_rem(&self, y: &EisensteinInt) -> Result<(EisensteinInt, EisensteinInt), EisensteinError> {
        if y.is_zero() {
            return Err(EisensteinError::DivisionByZero);
        }
        let n = y.norm();
        let t = self * &y.conj();
        let q = EisensteinInt { a: round_div(&t.a, &n), b: round_div(&t.b, &n) };
        let r = self - &(&q * y);
        Ok((q, r))
    }

    pub fn divides(&self, x: &EisensteinInt) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        let t = x * &self.conj();
        let n = self.norm();
        t.a.is_multiple_of(&n) && t.b.is_multiple_of(&n)
    }

    /// Exact quotient when `self` divides `x`.
    pub fn exact_div(x: &EisensteinInt, d: &EisensteinInt) -> Option<EisensteinInt> {
        if d.is_zero() {
            return None;
        }
        let t = x * &d.conj();
        let n = d.norm();
        if t.a.is_multiple_of(&n) && t.b.is_multiple_of(&n) {
            Some(EisensteinInt { a: t.a / &n, b: t.b / &n })
        } else {
            None
        }
    }
}

/// Nearest integer to n/d for d > 0, halves rounded up.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two_d: BigInt = d * 2;
    let num: BigInt = n * 2 + d;
    num.div_floor(&two_d)
}

/// Greatest common divisor, normalized to the canonical associate.
pub fn gcd(x: &EisensteinInt, y: &EisensteinInt) -> Result<EisensteinInt, EisensteinError> {
    if x.is_zero() && y.is_zero() {
        return Err(EisensteinError::GcdOfZeros);
    }
    let mut a = x.clone();
    let mut b = y.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.canonical_associate())
}

impl<'a> Add<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: &EisensteinInt) -> EisensteinInt {
        // (a + bω)(c + dω) = ac + (ad + bc)ω + bdω², ω² = -1 - ω
        let ac = &self.a * &o.a;
        let bd = &self.b * &o.b;
        let cross = &self.a * &o.b + &self.b * &o.a;
        EisensteinInt { a: &ac - &bd, b: cross - bd }
    }
}

impl Add for EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, o: EisensteinInt) -> EisensteinInt {
        &self + &o
    }
}

impl Sub for EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, o: EisensteinInt) -> EisensteinInt {
        &self - &o
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: EisensteinInt) -> EisensteinInt {
        &self * &o
    }
}

impl AddAssign<&EisensteinInt> for EisensteinInt {
    fn add_assign(&mut self, o: &EisensteinInt) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt { a: -self.a, b: -self.b }
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt { a: -&self.a, b: -&self.b }
    }
}

impl fmt::Debug for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{}-{}ω", self.a, -&self.b)
        } else {
            write!(f, "{}+{}ω", self.a, self.b)
        }
    }
}

/// Serialized as a pair of decimal strings `["a", "b"]`.
impl Serialize for EisensteinInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for EisensteinInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let a = a.parse::<BigInt>().map_err(serde::de::Error::custom)?;
        let b = b.parse::<BigInt>().map_err(serde::de::Error::custom)?;
        Ok(EisensteinInt { a, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(a: i64, b: i64) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    #[test]
    fn basic_values() {
        assert_eq!(e(2, 1).conj(), e(1, -1));
        assert_eq!(&e(1, 2) * &e(1, 2), e(-3, 0));
        assert_eq!(e(1, 2).norm(), BigInt::from(3));
        assert_eq!(&e(0, 1) * &e(0, 1), e(-1, -1));
        for u in EisensteinInt::units() {
            assert!(u.is_unit());
        }
    }

    #[test]
    fn conj_product_is_norm() {
        let x = e(7, -3);
        let p = &x * &x.conj();
        assert_eq!(p, EisensteinInt::from_int(x.norm()));
    }

    #[test]
    fn division_examples() {
        let (q, r) = e(3, 0).div_rem(&e(1, 2)).unwrap();
        assert_eq!(q, e(-1, -2));
        assert!(r.is_zero());
        let (q, r) = e(0, 0).div_rem(&e(5, 1)).unwrap();
        assert!(q.is_zero() && r.is_zero());
        assert_eq!(e(1, 1).div_rem(&e(0, 0)), Err(EisensteinError::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&e(-7, -3), &e(0, 0)).unwrap(), e(-7, -3).canonical_associate());
        let g = gcd(&e(7, 0), &e(3, 1)).unwrap();
        assert_eq!(g.norm(), BigInt::from(7));
        assert!(g.divides(&e(3, 1)));
        assert_eq!(g, e(3, 1).canonical_associate());
        assert_eq!(gcd(&e(2, 0), &e(3, 0)).unwrap(), e(1, 0));
        assert_eq!(gcd(&e(0, 0), &e(0, 0)), Err(EisensteinError::GcdOfZeros));
    }

    #[test]
    fn canonical_associate_rule() {
        assert_eq!(e(1, 1).canonical_associate(), e(1, 0));
        assert_eq!(e(3, 1).canonical_associate(), e(3, 1));
        assert_eq!(e(-3, -1).canonical_associate(), e(3, 1));
        assert_eq!(e(2, 3).canonical_associate(), e(3, 1));
        // every associate class has exactly one canonical member
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                let x = e(a, b);
                if x.is_zero() {
                    continue;
                }
                let c = x.canonical_associate();
                for u in EisensteinInt::units() {
                    assert_eq!((&x * &u).canonical_associate(), c);
                }
            }
        }
    }

    fn arb() -> impl Strategy<Value = EisensteinInt> {
        (-10_000_000i64..10_000_000, -10_000_000i64..10_000_000).prop_map(|(a, b)| e(a, b))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(x in arb(), y in arb()) {
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }

        #[test]
        fn euclidean_property(x in arb(), y in arb()) {
            prop_assume!(!y.is_zero());
            let (q, r) = x.div_rem(&y).unwrap();
            prop_assert_eq!(&(&q * &y) + &r, x);
            prop_assert!(r.norm() < y.norm());
        }

        #[test]
        fn gcd_divides_both(x in arb(), y in arb(), z in arb()) {
            prop_assume!(!z.is_zero());
            let xz = &x * &z;
            let yz = &y * &z;
            let g = gcd(&xz, &yz).unwrap();
            prop_assert!(g.divides(&xz));
            prop_assert!(g.divides(&yz));
            prop_assert!(g.divides(&(&z * &gcd(&x, &y).unwrap_or_else(|_| e(0, 0)))) || x.is_zero() && y.is_zero());
            prop_assert!(z.divides(&g));
        }

        #[test]
        fn norm_nonnegative(x in arb()) {
            let n = x.norm();
            prop_assert!(!n.is_negative());
            prop_assert_eq!(n.is_zero(), x.is_zero());
        }
    }
}
