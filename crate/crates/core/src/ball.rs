//! Midpoint-radius interval arithmetic over dyadic fixed point numbers.
//!
//! A [`Ball`] with precision `p` stands for the closed interval
//! `[(mid - rad) / 2^p, (mid + rad) / 2^p]`. Every operation returns a ball
//! that is guaranteed to contain the exact result for every choice of
//! operands inside the input balls, so comparisons that come back decided
//! are rigorous. Undecided comparisons are the caller's signal to retry at a
//! higher precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Extra working bits used inside transcendental evaluations.
const GUARD_BITS: u32 = 48;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

/// `floor(x / 2^s)` for `s >= 0`.
fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    x.div_floor(&(BigInt::one() << s))
}

/// `ceil(x / 2^s)` for `s >= 0`.
fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    -((-x).div_floor(&(BigInt::one() << s)))
}

/// Nearest integer to `x / 2^s`, halves rounded up.
fn shr_round(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    shr_floor(&(x + (BigInt::one() << (s - 1))), s)
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

impl Ball {
    pub fn exact_int(v: BigInt) -> Self {
        Ball { mid: v, rad: BigInt::zero(), prec: 0 }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Ball::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Ball { mid: v << prec, rad: BigInt::zero(), prec }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let scaled = num << prec;
        let (q, r) = scaled.div_mod_floor(&den);
        if r.is_zero() {
            Ball { mid: q, rad: BigInt::zero(), prec }
        } else {
            Ball { mid: q, rad: BigInt::one(), prec }
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Ball::from_ratio(r.numer(), r.denom(), prec)
    }

    /// Rounds an `f64` exactly: every finite double is a dyadic rational.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let r = BigRational::from_float(x).expect("finite f64");
        Ball::from_rational(&r, prec)
    }

    /// A ball spanning `[lo, hi]`.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational, prec: u32) -> Self {
        let l = Ball::from_rational(lo, prec);
        let h = Ball::from_rational(hi, prec);
        let lo_u = &l.mid - &l.rad;
        let hi_u = &h.mid + &h.rad;
        let mid = shr_floor(&(&lo_u + &hi_u), 1);
        let rad = (&hi_u - &mid).max(&mid - &lo_u);
        Ball { mid, rad, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn mid_raw(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad_raw(&self) -> &BigInt {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Re-expresses the ball at `prec` bits; rounding outward when bits are dropped.
    pub fn with_precision(&self, prec: u32) -> Ball {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                Ball { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let mid = shr_round(&self.mid, s);
                // |mid' * 2^s - mid| <= 2^(s-1), so one extra ulp covers the rounding.
                let rad = shr_ceil(&self.rad, s) + BigInt::one();
                Ball { mid, rad, prec }
            }
        }
    }

    fn aligned(a: &Ball, b: &Ball) -> (Ball, Ball, u32) {
        let p = a.prec.max(b.prec);
        (a.with_precision(p), b.with_precision(p), p)
    }

    /// Lower endpoint as an exact dyadic rational.
    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, BigInt::one() << self.prec)
    }

    /// Upper endpoint as an exact dyadic rational.
    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, BigInt::one() << self.prec)
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(self.mid.clone(), BigInt::one() << self.prec)
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(self.rad.clone(), BigInt::one() << self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    /// Decided ordering, or `None` when the balls overlap.
    pub fn compare(&self, other: &Ball) -> Option<Ordering> {
        let (a, b, _) = Ball::aligned(self, other);
        if &a.mid + &a.rad < &b.mid - &b.rad {
            Some(Ordering::Less)
        } else if &a.mid - &a.rad > &b.mid + &b.rad {
            Some(Ordering::Greater)
        } else if a.rad.is_zero() && b.rad.is_zero() && a.mid == b.mid {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decided ordering against an exact rational.
    pub fn compare_rational(&self, r: &BigRational) -> Option<Ordering> {
        let lo = self.lower();
        let hi = self.upper();
        if &hi < r {
            Some(Ordering::Less)
        } else if &lo > r {
            Some(Ordering::Greater)
        } else if lo == hi && &lo == r {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Ball {
        if self.mid.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn mul_pow2(&self, e: i64) -> Ball {
        if e >= 0 {
            Ball { mid: &self.mid << e as u32, rad: &self.rad << e as u32, prec: self.prec }
        } else {
            let s = (-e) as u32;
            Ball {
                mid: shr_round(&self.mid, s),
                rad: shr_ceil(&self.rad, s) + BigInt::one(),
                prec: self.prec,
            }
        }
    }

    pub fn square(&self) -> Ball {
        self.clone() * self.clone()
    }

    pub fn checked_div(&self, other: &Ball) -> Option<Ball> {
        let (a, b, p) = Ball::aligned(self, other);
        let bm = b.mid.abs();
        if bm <= b.rad {
            return None;
        }
        let sign_b = if b.mid.is_negative() { -1 } else { 1 };
        let scaled = &a.mid << p;
        let mid = Integer::div_floor(&(&scaled * sign_b), &bm);
        // |a/b - ma/mb| <= (ra*|mb| + |ma|*rb) / (|mb| * (|mb| - rb)), in value units.
        let num = (&a.rad * &bm + a.mid.abs() * &b.rad) << p;
        let den = &bm * (&bm - &b.rad);
        let rad = ceil_div(&num, &den) + BigInt::one();
        Some(Ball { mid, rad, prec: p })
    }

    pub fn recip(&self) -> Option<Ball> {
        Ball::exact_int(BigInt::one()).checked_div(self)
    }

    /// Square root; the negative part of a straddling ball is clamped to zero.
    pub fn sqrt(&self) -> Ball {
        let p = self.prec;
        let lo = (&self.mid - &self.rad).max(BigInt::zero());
        let hi = &self.mid + &self.rad;
        assert!(!hi.is_negative(), "square root of a negative ball");
        let lo_r = (lo << p).sqrt();
        let hi_r = (hi << p).sqrt() + BigInt::one();
        let mid = shr_floor(&(&lo_r + &hi_r), 1);
        let rad = (&hi_r - &mid).max(&mid - &lo_r);
        Ball { mid, rad, prec: p }
    }

    /// Integer part of the midpoint rounded to nearest; used only for argument reduction.
    fn mid_round(&self) -> BigInt {
        shr_round(&self.mid, self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.midpoint();
        let (n, d) = (r.numer(), r.denom());
        let nb = n.bits() as i64;
        let db = d.bits() as i64;
        let shift = (nb - db - 60).max(-1000);
        let q: BigInt = if shift >= 0 {
            n / (d << shift as u32)
        } else {
            (n << (-shift) as u32) / d
        };
        q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    }

    /// log2 of an upper bound on |x|, rounded up; at least `-(prec as i64)`.
    fn mag_bits(&self) -> i64 {
        let m = self.mid.abs() + &self.rad;
        m.bits() as i64 - self.prec as i64
    }

    pub fn pi(prec: u32) -> Ball {
        let w = prec + GUARD_BITS;
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        let (a5, e5) = atan_inv_fixed(5, w);
        let (a239, e239) = atan_inv_fixed(239, w);
        let mid = a5 * 16 - a239 * 4;
        let err = e5 * 16 + e239 * 4;
        Ball { mid, rad: err, prec: w }.with_precision(prec)
    }

    pub fn ln2(prec: u32) -> Ball {
        let w = prec + GUARD_BITS;
        let (t, e) = atanh_inv_fixed(3, w);
        Ball { mid: t * 2, rad: e * 2, prec: w }.with_precision(prec)
    }

    pub fn ln3(prec: u32) -> Ball {
        // ln 3 = ln 2 + ln(3/2) = ln 2 + 2 atanh(1/5)
        let w = prec + GUARD_BITS;
        let (t2, e2) = atanh_inv_fixed(3, w);
        let (t5, e5) = atanh_inv_fixed(5, w);
        Ball { mid: (t2 + t5) * 2, rad: (e2 + e5) * 2, prec: w }.with_precision(prec)
    }

    pub fn exp(&self) -> Ball {
        let p = self.prec;
        // exp(x) = exp(x / 2^s)^(2^s) with |x / 2^s| <= 1/2.
        let s = (self.mag_bits() + 1).max(0) as u32;
        let w = p + GUARD_BITS + 2 * s;
        let y = self.with_precision(w).mul_pow2(-(s as i64));
        let one = Ball::from_i64(1, w);
        let mut term = one.clone();
        let mut sum = one;
        let mut j: i64 = 1;
        loop {
            term = (term * y.clone()).checked_div(&Ball::from_i64(j, w)).expect("nonzero");
            sum = sum + term.clone();
            j += 1;
            if term.mag_bits() < 8 - (w as i64) {
                break;
            }
        }
        // Remaining tail is bounded by twice the next term since |y| <= 1/2.
        let tail = term.abs().mid + term.rad;
        sum.rad += tail * 2 + BigInt::one();
        let mut r = sum;
        for _ in 0..s {
            r = r.square();
        }
        r.with_precision(p)
    }

    /// Natural logarithm of a strictly positive ball.
    pub fn ln(&self) -> Ball {
        assert!(self.is_positive(), "logarithm of a non-positive ball");
        let p = self.prec;
        let w = p + GUARD_BITS;
        let x = self.with_precision(w);
        // x = m * 2^e with m in [1, 2) judged from the midpoint.
        let e = x.mid.bits() as i64 - 1 - w as i64;
        let m = x.mul_pow2(-e);
        let one = Ball::from_i64(1, w);
        let t = (m.clone() - one.clone()).checked_div(&(m + one)).expect("positive");
        let t2 = t.square();
        let mut pow = t.clone();
        let mut sum = t.clone();
        let mut j: i64 = 1;
        loop {
            pow = pow * t2.clone();
            let term = pow.checked_div(&Ball::from_i64(2 * j + 1, w)).expect("nonzero");
            sum = sum + term.clone();
            j += 1;
            if term.mag_bits() < 8 - (w as i64) {
                break;
            }
        }
        // |t| <= 1/3 + slack so the tail is below 2 * |next power|.
        let tail = (pow.abs().mid + pow.rad) * 2;
        sum.rad += tail + BigInt::one();
        let ln_m = sum.mul_pow2(1);
        let r = ln_m + Ball::ln2(w) * Ball::from_i64(e, w);
        r.with_precision(p)
    }

    pub fn sin(&self) -> Ball {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Ball {
        self.sin_cos().1
    }

    pub fn sin_cos(&self) -> (Ball, Ball) {
        let p = self.prec;
        let w = p + GUARD_BITS + (self.mag_bits().max(0) as u32);
        let x = self.with_precision(w);
        let two_pi = Ball::pi(w).mul_pow2(1);
        let k = x.checked_div(&two_pi).expect("pi is positive").mid_round();
        let r = x - two_pi * Ball::exact_int(k);
        // Halve until |r| <= 1/2, then double back with the angle-addition formulas.
        let h = (r.mag_bits() + 1).max(0) as u32;
        let w2 = w + 2 * h;
        let r = r.with_precision(w2).mul_pow2(-(h as i64));
        let (mut s, mut c) = sin_cos_taylor(&r);
        for _ in 0..h {
            let s2 = (s.clone() * c.clone()).mul_pow2(1);
            let c2 = c.square() - s.square();
            s = s2;
            c = c2;
        }
        (s.with_precision(p), c.with_precision(p))
    }

    /// `x^n` for an integer exponent.
    pub fn powi(&self, n: i64) -> Ball {
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        let mut acc = Ball::from_i64(1, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.square();
            e >>= 1;
        }
        if n < 0 {
            acc.recip().expect("nonzero base")
        } else {
            acc
        }
    }
}

fn sin_cos_taylor(r: &Ball) -> (Ball, Ball) {
    let w = r.prec;
    let one = Ball::from_i64(1, w);
    let r2 = r.square();
    let mut s_term = r.clone();
    let mut c_term = one.clone();
    let mut s = r.clone();
    let mut c = one;
    let mut j: i64 = 1;
    loop {
        c_term = -(c_term * r2.clone()).checked_div(&Ball::from_i64((2 * j - 1) * (2 * j), w)).expect("nonzero");
        s_term = -(s_term * r2.clone()).checked_div(&Ball::from_i64((2 * j) * (2 * j + 1), w)).expect("nonzero");
        c = c + c_term.clone();
        s = s + s_term.clone();
        j += 1;
        if s_term.mag_bits() < 8 - (w as i64) && c_term.mag_bits() < 8 - (w as i64) {
            break;
        }
    }
    // Alternating series with decreasing terms: the tail is below the last term.
    let ts = s_term.abs().mid + s_term.rad;
    let tc = c_term.abs().mid + c_term.rad;
    s.rad += ts + BigInt::one();
    c.rad += tc + BigInt::one();
    (s, c)
}

/// atan(1/n) at `w` fractional bits, with an error bound in ulps.
fn atan_inv_fixed(n: u64, w: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << w;
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = &one / &n;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    while !power.is_zero() {
        let t = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        power /= &n2;
        k += 1;
        terms += 1;
    }
    // Each truncating division loses at most one ulp, twice per term, plus the tail.
    (sum, BigInt::from(2 * terms + 2))
}

/// atanh(1/n) at `w` fractional bits, with an error bound in ulps.
fn atanh_inv_fixed(n: u64, w: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << w;
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = &one / &n;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power /= &n2;
        k += 1;
    }
    (sum, BigInt::from(2 * k + 2))
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, rhs: Ball) -> Ball {
        let (a, b, p) = Ball::aligned(&self, &rhs);
        Ball { mid: a.mid + b.mid, rad: a.rad + b.rad, prec: p }
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, rhs: Ball) -> Ball {
        let (a, b, p) = Ball::aligned(&self, &rhs);
        Ball { mid: a.mid - b.mid, rad: a.rad + b.rad, prec: p }
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, rhs: Ball) -> Ball {
        let (a, b, p) = Ball::aligned(&self, &rhs);
        let prod = &a.mid * &b.mid;
        let exact_prod = a.rad.is_zero() && b.rad.is_zero();
        let mid = shr_round(&prod, p);
        let spread = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let mut rad = shr_ceil(&spread, p);
        if !(exact_prod && (&mid << p) == prod) {
            rad += BigInt::one();
        }
        Ball { mid, rad, prec: p }
    }
}

impl Div for Ball {
    type Output = Ball;
    fn div(self, rhs: Ball) -> Ball {
        self.checked_div(&rhs).expect("division by a ball that contains zero")
    }
}

impl Rem for Ball {
    type Output = Ball;
    fn rem(self, rhs: Ball) -> Ball {
        let q = (self.clone() / rhs.clone()).with_precision(0);
        let q = Ball::exact_int(q.mid);
        self - rhs * q
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad, prec: self.prec }
    }
}

impl Zero for Ball {
    fn zero() -> Ball {
        Ball::exact_int(BigInt::zero())
    }
    fn is_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }
}

impl One for Ball {
    fn one() -> Ball {
        Ball::exact_int(BigInt::one())
    }
}

impl PartialOrd for Ball {
    fn partial_cmp(&self, other: &Ball) -> Option<Ordering> {
        self.compare(other)
    }
}

impl num_traits::Num for Ball {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Ball, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let r = crate::expr::parse_decimal(s).ok_or_else(|| format!("not a decimal number: {s}"))?;
        Ok(Ball::from_rational(&r, crate::DEFAULT_PRECISION_BITS))
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball({:e} ± 2^{}, {} bits)", self.to_f64(), {
            let b = self.rad.bits() as i64;
            b - self.prec as i64
        }, self.prec)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(30))
    }
}

impl Ball {
    /// Midpoint rendered with `digits` digits after the decimal point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let v = shr_round(&(&self.mid * &scale), self.prec);
        let neg = v.sign() == Sign::Minus;
        let s = v.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: &Ball, v: f64, tol: f64) {
        assert!((b.to_f64() - v).abs() < tol, "{b:?} vs {v}");
    }

    #[test]
    fn constants() {
        close(&Ball::pi(128), std::f64::consts::PI, 1e-15);
        close(&Ball::ln2(128), std::f64::consts::LN_2, 1e-15);
        close(&Ball::ln3(128), 3f64.ln(), 1e-15);
        let pi = Ball::pi(400);
        assert!(pi.rad_raw() < &BigInt::from(8));
        let s = pi.to_decimal_string(40);
        assert_eq!(s, "3.1415926535897932384626433832795028841972");
    }

    #[test]
    fn trig_and_exp() {
        let p = 256;
        let x = Ball::pi(p) / Ball::from_i64(9, p);
        let (s, c) = x.sin_cos();
        close(&s, (std::f64::consts::PI / 9.0).sin(), 1e-15);
        close(&c, (std::f64::consts::PI / 9.0).cos(), 1e-15);
        let one = s.square() + c.square() - Ball::from_i64(1, p);
        assert!(one.abs().to_f64() < 1e-70);
        let e = Ball::from_i64(1, p).exp();
        close(&e, std::f64::consts::E, 1e-15);
        let l = Ball::from_i64(10, p).ln();
        close(&l, 10f64.ln(), 1e-14);
        let back = l.exp() - Ball::from_i64(10, p);
        assert!(back.contains_zero());
        let big = Ball::from_i64(1000, p).sin();
        close(&big, 1000f64.sin(), 1e-12);
    }

    #[test]
    fn sqrt_and_division_enclose() {
        let p = 200;
        let two = Ball::from_i64(2, p);
        let r = two.sqrt();
        let sq = r.square() - Ball::from_i64(2, p);
        assert!(sq.contains_zero());
        let third = Ball::from_i64(1, p) / Ball::from_i64(3, p);
        let back = third * Ball::from_i64(3, p) - Ball::from_i64(1, p);
        assert!(back.contains_zero());
        assert!(Ball::from_i64(0, p).checked_div(&Ball::zero()).is_none());
    }

    #[test]
    fn comparisons_are_conservative() {
        let p = 64;
        let a = Ball::from_i64(1, p);
        let b = Ball::from_ratio(&BigInt::from(1), &BigInt::from(3), p) * Ball::from_i64(3, p);
        assert_eq!(a.compare(&b), None);
        assert_eq!(a.compare(&Ball::from_i64(2, p)), Some(Ordering::Less));
        assert_eq!(a.compare(&Ball::from_i64(1, 10)), Some(Ordering::Equal));
    }

    #[test]
    fn precision_change_keeps_enclosure() {
        let x = Ball::pi(300);
        let y = x.with_precision(60);
        let d = x - y;
        assert!(d.contains_zero());
    }
}
