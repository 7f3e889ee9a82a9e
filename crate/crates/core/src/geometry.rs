//! Real 4-space picture of two-level states and the Eisenstein lattice.
//!
//! A state `x0|i⟩ + x1|j⟩` becomes `r = (Re x0, Im x0, Re x1, Im x1)`. The
//! lattice point with coefficients `a = (a1, a2, a3, a4)` is
//! `q = (a1 - a2/2, a2·√3/2, a3 - a4/2, a4·√3/2)`, the image of
//! `u = a1 + a2ω`, `v = a3 + a4ω`. The search works with unscaled points and
//! the radius `R = √3^k`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::Ball;
use crate::eisenstein::EisensteinInt;
use crate::expr::{ExprError, Func, RealExpr};
use crate::lattice::{LatticeError, RationalPolytope};
use crate::norm::pow3;
use crate::DEFAULT_PRECISION_BITS;

/// How many times a comparison may double its precision before giving up.
pub const MAX_ESCALATIONS: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("levels must be two distinct values in 0..=2, got ({0}, {1})")]
    BadLevels(u8, u8),
    #[error("state is not normalized: |x0|²+|x1|² = {0}")]
    NotNormalized(String),
    #[error("precision must satisfy 0 < ε < √2")]
    BadEpsilon,
    #[error("candidate levels {candidate} do not match target levels {target}")]
    LevelMismatch { target: Levels, candidate: Levels },
    #[error("comparison undecided at {bits} bits")]
    Indeterminate { bits: u32 },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The two occupied basis levels; `u` sits on the first, `v` on the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u8; 2]", into = "[u8; 2]")]
pub struct Levels(u8, u8);

impl Levels {
    pub fn new(i: u8, j: u8) -> Result<Self, GeometryError> {
        if i > 2 || j > 2 || i == j {
            return Err(GeometryError::BadLevels(i, j));
        }
        Ok(Levels(i, j))
    }

    pub fn first(self) -> u8 {
        self.0
    }

    pub fn second(self) -> u8 {
        self.1
    }

    /// The level that carries `w`.
    pub fn third(self) -> u8 {
        3 - self.0 - self.1
    }
}

impl Default for Levels {
    fn default() -> Self {
        Levels(0, 1)
    }
}

impl TryFrom<[u8; 2]> for Levels {
    type Error = GeometryError;
    fn try_from(v: [u8; 2]) -> Result<Self, Self::Error> {
        Levels::new(v[0], v[1])
    }
}

impl From<Levels> for [u8; 2] {
    fn from(l: Levels) -> Self {
        [l.0, l.1]
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// `x0|i⟩ + x1|j⟩` with amplitudes kept as expressions so they can be
/// re-evaluated at any precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub x0: [RealExpr; 2],
    pub x1: [RealExpr; 2],
    pub levels: Levels,
}

fn norm_sq(x0: &[RealExpr; 2], x1: &[RealExpr; 2], prec: u32) -> Result<Ball, ExprError> {
    let mut s = Ball::from_i64(0, prec);
    for e in x0.iter().chain(x1) {
        s = s + e.eval::<Ball>(prec)?.square();
    }
    Ok(s)
}

impl TwoLevelState {
    /// Requires `| |x0|²+|x1|² - 1 | < 2^(8 - precision)` at the default precision.
    pub fn new(x0: [RealExpr; 2], x1: [RealExpr; 2], levels: Levels) -> Result<Self, GeometryError> {
        let prec = DEFAULT_PRECISION_BITS;
        let dev = norm_sq(&x0, &x1, prec)? - Ball::from_i64(1, prec);
        let tol = BigRational::new(BigInt::one(), BigInt::one() << (prec - 8));
        if dev.abs().upper() >= tol {
            return Err(GeometryError::NotNormalized(norm_sq(&x0, &x1, 64)?.to_decimal_string(12)));
        }
        Ok(TwoLevelState { x0, x1, levels })
    }

    /// Accepts amplitudes whose squared norm is within `tol` of one and
    /// divides them by their exact norm.
    pub fn normalized(x0: [RealExpr; 2], x1: [RealExpr; 2], levels: Levels, tol: f64) -> Result<Self, GeometryError> {
        if let Ok(s) = TwoLevelState::new(x0.clone(), x1.clone(), levels) {
            return Ok(s);
        }
        let n2 = norm_sq(&x0, &x1, 64)?;
        if (n2.to_f64() - 1.0).abs() > tol {
            return Err(GeometryError::NotNormalized(n2.to_decimal_string(12)));
        }
        let sq = |e: &RealExpr| RealExpr::Mul(Box::new(e.clone()), Box::new(e.clone()));
        let sum = x0.iter().chain(&x1).skip(1).fold(sq(&x0[0]), |acc, e| RealExpr::Add(Box::new(acc), Box::new(sq(e))));
        let norm = RealExpr::Call(Func::Sqrt, Box::new(sum));
        let div = |e: &RealExpr| RealExpr::Div(Box::new(e.clone()), Box::new(norm.clone()));
        TwoLevelState::new([div(&x0[0]), div(&x0[1])], [div(&x1[0]), div(&x1[1])], levels)
    }

    /// The basis state `|i⟩` viewed on levels `(i, j)`.
    pub fn basis(levels: Levels) -> Self {
        TwoLevelState { x0: [RealExpr::int(1), RealExpr::int(0)], x1: [RealExpr::int(0), RealExpr::int(0)], levels }
    }

    /// `(-e^(-πi/9)|0⟩ + e^(πi/9)|2⟩)/√2`.
    pub fn phi() -> Self {
        let e = |s: &str| RealExpr::parse(s).expect("constant expression");
        TwoLevelState {
            x0: [e("-cos(pi/9)/sqrt(2)"), e("sin(pi/9)/sqrt(2)")],
            x1: [e("cos(pi/9)/sqrt(2)"), e("sin(pi/9)/sqrt(2)")],
            levels: Levels(0, 2),
        }
    }

    /// `r[s]` at `prec` bits.
    pub fn embed(&self, prec: u32) -> Result<[Ball; 4], GeometryError> {
        Ok([
            self.x0[0].eval(prec)?,
            self.x0[1].eval(prec)?,
            self.x1[0].eval(prec)?,
            self.x1[1].eval(prec)?,
        ])
    }
}

/// `√3^k` as a ball.
pub fn sqrt3_pow(k: u32, prec: u32) -> Ball {
    let base = Ball::from_bigint(&pow3(k / 2), prec);
    if k % 2 == 1 {
        base * Ball::from_i64(3, prec).sqrt()
    } else {
        base
    }
}

/// `q(a)`: the real image of the lattice point with coefficients `a`.
pub fn lattice_point(a: &[BigInt; 4], prec: u32) -> [Ball; 4] {
    let s3h = Ball::from_i64(3, prec).sqrt().mul_pow2(-1);
    lattice_point_with(a, prec, &s3h)
}

fn lattice_point_with(a: &[BigInt; 4], prec: u32, s3h: &Ball) -> [Ball; 4] {
    let h = |x: &BigInt| Ball::from_ratio(x, &BigInt::from(2), prec);
    let b = |x: &BigInt| Ball::from_bigint(x, prec);
    [b(&a[0]) - h(&a[1]), b(&a[1]) * s3h.clone(), b(&a[2]) - h(&a[3]), b(&a[3]) * s3h.clone()]
}

fn dot4(x: &[Ball; 4], y: &[Ball; 4]) -> Ball {
    x.iter().zip(y).fold(Ball::from_i64(0, x[0].precision()), |s, (a, b)| s + a.clone() * b.clone())
}

/// `norm(a1+a2ω) + norm(a3+a4ω)`, the exact squared length of `q(a)`.
pub fn norm_sum(a: &[BigInt; 4]) -> BigInt {
    EisensteinInt::new(a[0].clone(), a[1].clone()).norm() + EisensteinInt::new(a[2].clone(), a[3].clone()).norm()
}

/// Largest `|a_i|` for a lattice point inside the ball of radius `√3^k`.
pub fn coefficient_bound(k: u32) -> BigInt {
    // norm(a1+a2ω) ≥ 3·a_i²/4 for either coefficient
    let four_r2: BigInt = pow3(k) * 4;
    let q: BigInt = four_r2 / 3;
    q.sqrt()
}

/// A lattice point `(u, v)` at level `k` on the given levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    pub k: u32,
    pub levels: Levels,
}

impl Candidate {
    pub fn from_coeffs(a: &[BigInt; 4], k: u32, levels: Levels) -> Self {
        Candidate {
            u: EisensteinInt::new(a[0].clone(), a[1].clone()),
            v: EisensteinInt::new(a[2].clone(), a[3].clone()),
            k,
            levels,
        }
    }

    pub fn coeffs(&self) -> [BigInt; 4] {
        [self.u.a.clone(), self.u.b.clone(), self.v.a.clone(), self.v.b.clone()]
    }

    pub fn norm_sum(&self) -> BigInt {
        self.u.norm() + self.v.norm()
    }
}

/// `dist(s, (u|i⟩+v|j⟩+w|l⟩)/√3^k)`. The third amplitude never enters:
/// the squared distance is `2(1 - ⟨r[s], q⟩/√3^k)`.
pub fn distance(
    s: &TwoLevelState,
    y: &Candidate,
    _w: Option<&EisensteinInt>,
    prec: u32,
) -> Result<Ball, GeometryError> {
    if s.levels != y.levels {
        return Err(GeometryError::LevelMismatch { target: s.levels, candidate: y.levels });
    }
    let r = s.embed(prec)?;
    let q = lattice_point(&y.coeffs(), prec);
    let ip = dot4(&q, &r) / sqrt3_pow(y.k, prec);
    let two = Ball::from_i64(2, prec);
    Ok((two * (Ball::from_i64(1, prec) - ip)).sqrt())
}

/// `log₃` of a distance, `None` for zero.
pub fn log3(d: &Ball) -> Option<f64> {
    let x = d.to_f64();
    (x > 0.0).then(|| x.ln() / 3f64.ln())
}

/// The ε-meniscus around `r[target]`.
#[derive(Debug, Clone)]
pub struct Meniscus {
    pub target: TwoLevelState,
    pub epsilon: RealExpr,
    eps_f64: f64,
    base: MeniscusAt,
}

impl Meniscus {
    pub fn new(target: TwoLevelState, epsilon: RealExpr) -> Result<Self, GeometryError> {
        Meniscus::with_precision(target, epsilon, None)
    }

    /// As [`Meniscus::new`] with the working precision overridden.
    pub fn with_precision(target: TwoLevelState, epsilon: RealExpr, prec: Option<u32>) -> Result<Self, GeometryError> {
        let e: Ball = epsilon.eval(128)?;
        let two = Ball::from_i64(2, 128);
        if !e.is_positive() || !(e.square().compare(&two) == Some(std::cmp::Ordering::Less)) {
            return Err(GeometryError::BadEpsilon);
        }
        let eps_f64 = e.to_f64();
        let prec = prec.unwrap_or_else(|| precision_for(eps_f64));
        let base = MeniscusAt::new(&target, &epsilon, prec)?;
        Ok(Meniscus { eps_f64, target, epsilon, base })
    }

    pub fn epsilon_f64(&self) -> f64 {
        self.eps_f64
    }

    /// `⌈4·log₂(1/ε)⌉ + 128` bits.
    pub fn working_precision(&self) -> u32 {
        self.base.prec
    }

    /// Constants evaluated at `prec` bits; the working precision is cached,
    /// anything else is computed from scratch.
    pub fn at(&self, prec: u32) -> Result<MeniscusAt, GeometryError> {
        if prec == self.base.prec {
            return Ok(self.base.clone());
        }
        MeniscusAt::new(&self.target, &self.epsilon, prec)
    }

    pub fn base(&self) -> &MeniscusAt {
        &self.base
    }

    /// Membership of the lattice point `a` in `√3^k·M_ε(p)`.
    pub fn contains(&self, a: &[BigInt; 4], k: u32) -> Result<bool, GeometryError> {
        if norm_sum(a) > pow3(k) {
            return Ok(false);
        }
        escalate(self.base.prec, |prec| {
            if prec == self.base.prec {
                Ok(self.base.decide_projection(a, k))
            } else {
                Ok(MeniscusAt::new(&self.target, &self.epsilon, prec)?.decide_projection(a, k))
            }
        })
    }

    /// The orthonormal completion `(p, q1, q2, q3)` of `p`.
    pub fn frame(p: &[Ball; 4]) -> [[Ball; 4]; 4] {
        let [p0, p1, p2, p3] = p.clone();
        [
            [p0.clone(), p1.clone(), p2.clone(), p3.clone()],
            [-p1.clone(), p0.clone(), -p3.clone(), p2.clone()],
            [-p2.clone(), p3.clone(), p0.clone(), -p1.clone()],
            [-p3, -p2, p1, p0],
        ]
    }

    /// Rational polytope in coefficient space containing every lattice point
    /// of `√3^k·M_ε(p)`.
    ///
    /// The box `[(1-ε²/2)R, R]` along `p` times `[-h, h]³` with
    /// `h = R·√(ε²-ε⁴/4)` in the orthogonal frame, pulled back to
    /// coefficients and rounded outward, plus the axis bounds implied by the
    /// ball.
    pub fn enclosing_polytope(&self, k: u32) -> Result<RationalPolytope, GeometryError> {
        let prec = self.working_precision();
        let m = self.at(prec)?;
        let r = sqrt3_pow(k, prec);
        let eps2 = m.eps.square();
        let half_width = r.clone() * (eps2.clone() - eps2.square().mul_pow2(-2)).sqrt();
        let bound = coefficient_bound(k);
        let bits = rounding_bits(&bound, self.eps_f64).min(prec);
        let frame = Meniscus::frame(&m.p);
        let mut rows = Vec::with_capacity(16);
        for (idx, f) in frame.iter().enumerate() {
            let c = pullback(f, &m.s3h);
            let neg: Vec<Ball> = c.iter().map(|x| -x.clone()).collect();
            let (hi, lo) = if idx == 0 {
                (r.clone(), -(m.cut.clone() * r.clone()))
            } else {
                (half_width.clone(), half_width.clone())
            };
            rows.push(rational_halfspace(&c, &hi, &bound, bits));
            rows.push(rational_halfspace(&neg, &lo, &bound, bits));
        }
        rows.extend(axis_rows(4, &bound));
        Ok(RationalPolytope::new(4, rows)?)
    }
}

/// `⌈4·log₂(1/ε)⌉ + 128`.
pub fn precision_for(eps: f64) -> u32 {
    let l = (1.0 / eps).log2().max(0.0);
    (4.0 * l).ceil() as u32 + 128
}

/// `Lᵀ f`: the coefficient-space normal of the functional `x ↦ ⟨x, f⟩`.
fn pullback(f: &[Ball; 4], s3h: &Ball) -> Vec<Ball> {
    vec![
        f[0].clone(),
        f[1].clone() * s3h.clone() - f[0].clone().mul_pow2(-1),
        f[2].clone(),
        f[3].clone() * s3h.clone() - f[2].clone().mul_pow2(-1),
    ]
}

/// Denominator bits for rounded normals: the rounding slack stays below
/// `2^-24` of the thinnest meniscus width.
pub(crate) fn rounding_bits(bound: &BigInt, eps: f64) -> u32 {
    let l = (1.0 / eps).log2().max(0.0);
    bound.bits() as u32 + (2.0 * l).ceil() as u32 + 32
}

/// `|x_i| ≤ bound` for every coordinate.
pub(crate) fn axis_rows(n: usize, bound: &BigInt) -> Vec<(Vec<BigRational>, BigRational)> {
    let b = BigRational::from_integer(bound.clone());
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1, -1] {
            let mut a = vec![BigRational::zero(); n];
            a[i] = BigRational::from_integer(BigInt::from(s));
            rows.push((a, b.clone()));
        }
    }
    rows
}

/// Rounds `⟨c, x⟩ ≤ b` to a rational half-space that keeps every solution
/// with `|x_i| ≤ bound`.
pub(crate) fn rational_halfspace(
    c: &[Ball],
    b: &Ball,
    bound: &BigInt,
    bits: u32,
) -> (Vec<BigRational>, BigRational) {
    let den = BigInt::one() << bits;
    let bound_r = BigRational::from_integer(bound.clone());
    let mut slack = b.upper();
    let mut coef = Vec::with_capacity(c.len());
    for x in c {
        let m = x.midpoint() * BigRational::from_integer(den.clone());
        let rounded = BigRational::new(m.round().to_integer(), den.clone());
        let err = (x.clone() - Ball::from_rational(&rounded, x.precision())).abs().upper();
        slack += err.abs() * &bound_r;
        coef.push(rounded);
    }
    let off = BigRational::new((slack * BigRational::from_integer(den.clone())).ceil().to_integer(), den);
    (coef, off)
}

/// Runs `f` at `prec`, doubling up to [`MAX_ESCALATIONS`] times while it
/// reports an undecided comparison.
pub fn escalate<T>(
    prec: u32,
    mut f: impl FnMut(u32) -> Result<Option<T>, GeometryError>,
) -> Result<T, GeometryError> {
    let mut p = prec;
    for _ in 0..=MAX_ESCALATIONS {
        if let Some(v) = f(p)? {
            return Ok(v);
        }
        p *= 2;
    }
    Err(GeometryError::Indeterminate { bits: p / 2 })
}

/// Meniscus constants at a fixed precision.
#[derive(Debug, Clone)]
pub struct MeniscusAt {
    pub prec: u32,
    pub p: [Ball; 4],
    pub eps: Ball,
    pub(crate) s3h: Ball,
    pub(crate) cut: Ball,
}

impl MeniscusAt {
    fn new(target: &TwoLevelState, epsilon: &RealExpr, prec: u32) -> Result<Self, GeometryError> {
        let p = target.embed(prec)?;
        let eps: Ball = epsilon.eval(prec)?;
        let s3h = Ball::from_i64(3, prec).sqrt().mul_pow2(-1);
        let cut = Ball::from_i64(1, prec) - eps.square().mul_pow2(-1);
        Ok(MeniscusAt { prec, p, eps, s3h, cut })
    }

    /// `⟨q(a), p⟩`.
    pub fn projection(&self, a: &[BigInt; 4]) -> Ball {
        dot4(&lattice_point_with(a, self.prec, &self.s3h), &self.p)
    }

    /// `⟨q(a), p⟩ > (1-ε²/2)·√3^k`, or `None` when undecided.
    pub fn decide_projection(&self, a: &[BigInt; 4], k: u32) -> Option<bool> {
        let diff = self.projection(a) - self.cut.clone() * sqrt3_pow(k, self.prec);
        sign_of(&diff).map(|s| s > 0)
    }
}

/// Element `r + s·√3` of `Q(√3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSqrt3 {
    pub r: BigRational,
    pub s: BigRational,
}

impl QSqrt3 {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        QSqrt3 { r, s }
    }

    pub fn zero() -> Self {
        QSqrt3::new(BigRational::zero(), BigRational::zero())
    }

    pub fn rational(r: BigRational) -> Self {
        QSqrt3::new(r, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn add(&self, o: &QSqrt3) -> QSqrt3 {
        QSqrt3::new(&self.r + &o.r, &self.s + &o.s)
    }

    pub fn mul(&self, o: &QSqrt3) -> QSqrt3 {
        let three = BigRational::from_integer(BigInt::from(3));
        QSqrt3::new(&self.r * &o.r + three * &self.s * &o.s, &self.r * &o.s + &self.s * &o.r)
    }

    pub fn scale(&self, c: &BigRational) -> QSqrt3 {
        QSqrt3::new(&self.r * c, &self.s * c)
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        Ball::from_rational(&self.r, prec) + Ball::from_rational(&self.s, prec) * Ball::from_i64(3, prec).sqrt()
    }
}

/// The lattice basis `v1..v4` of level `k`: the real images of
/// `1, ω` on each level, scaled by `√3^(-k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledLatticeBasis {
    pub k: u32,
    pub vectors: [[QSqrt3; 4]; 4],
}

impl ScaledLatticeBasis {
    pub fn new(k: u32) -> Self {
        let scale = Self::scale(k);
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let one = QSqrt3::rational(q(1, 1));
        let mhalf = QSqrt3::rational(q(-1, 2));
        let s3h = QSqrt3::new(q(0, 1), q(1, 2));
        let z = QSqrt3::zero;
        let raw = [
            [one.clone(), z(), z(), z()],
            [mhalf.clone(), s3h.clone(), z(), z()],
            [z(), z(), one, z()],
            [z(), z(), mhalf, s3h],
        ];
        let vectors = raw.map(|v| v.map(|x| x.mul(&scale)));
        ScaledLatticeBasis { k, vectors }
    }

    /// `√3^(-k)` in `Q(√3)`.
    pub fn scale(k: u32) -> QSqrt3 {
        let q = |n: BigInt, d: BigInt| BigRational::new(n, d);
        if k.is_multiple_of(2) {
            QSqrt3::rational(q(BigInt::one(), pow3(k / 2)))
        } else {
            // 3^(-(k+1)/2)·√3
            QSqrt3::new(BigRational::zero(), q(BigInt::one(), pow3(k.div_ceil(2))))
        }
    }

    /// Exact Gram matrix `⟨v_i, v_j⟩`.
    pub fn gram(&self) -> [[QSqrt3; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..4).fold(QSqrt3::zero(), |acc, t| acc.add(&self.vectors[i][t].mul(&self.vectors[j][t])))
            })
        })
    }

    /// `ι(a) = Σ a_i v_i`.
    pub fn iota(&self, a: &[BigInt; 4], prec: u32) -> [Ball; 4] {
        std::array::from_fn(|t| {
            (0..4).fold(Ball::from_i64(0, prec), |acc, i| {
                acc + Ball::from_bigint(&a[i], prec) * self.vectors[i][t].to_ball(prec)
            })
        })
    }

    /// Exact preimage coordinates of a point of `Q(√3)⁴`.
    pub fn iota_inv_exact(&self, x: &[QSqrt3; 4]) -> [QSqrt3; 4] {
        // unscaled: a2 = 2·x1/√3, a1 = x0 + a2/2; then multiply by √3^k
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let two_over_s3 = QSqrt3::new(q(0, 1), q(2, 3));
        let up = inverse_scale(self.k);
        let pair = |x0: &QSqrt3, x1: &QSqrt3| {
            let a2 = x1.mul(&two_over_s3);
            let a1 = x0.add(&a2.scale(&q(1, 2)));
            (a1.mul(&up), a2.mul(&up))
        };
        let (a1, a2) = pair(&x[0], &x[1]);
        let (a3, a4) = pair(&x[2], &x[3]);
        [a1, a2, a3, a4]
    }

    /// `ι⁻¹` on balls.
    pub fn iota_inv(&self, x: &[Ball; 4]) -> [Ball; 4] {
        let prec = x[0].precision();
        let s3 = Ball::from_i64(3, prec).sqrt();
        let up = sqrt3_pow(self.k, prec);
        let a2 = x[1].clone().mul_pow2(1) / s3.clone();
        let a4 = x[3].clone().mul_pow2(1) / s3;
        let a1 = x[0].clone() + a2.clone().mul_pow2(-1);
        let a3 = x[2].clone() + a4.clone().mul_pow2(-1);
        [a1 * up.clone(), a2 * up.clone(), a3 * up.clone(), a4 * up]
    }
}

fn inverse_scale(k: u32) -> QSqrt3 {
    if k.is_multiple_of(2) {
        QSqrt3::rational(BigRational::from_integer(pow3(k / 2)))
    } else {
        QSqrt3::new(BigRational::zero(), BigRational::from_integer(pow3(k / 2)))
    }
}

/// Signed comparisons on balls that may be undecided.
pub(crate) fn sign_of(b: &Ball) -> Option<i8> {
    if b.is_positive() {
        Some(1)
    } else if b.is_negative() {
        Some(-1)
    } else if b.is_exact() && b.mid_raw().is_zero() {
        Some(0)
    } else {
        None
    }
}
