//! Lenstra-style integer feasibility.
//!
//! The shape of the polytope is estimated from its LP extreme points; LLL on
//! that quadratic form yields integer directions along which the body is thin.
//! The search branches on the thinnest of those directions (or an axis),
//! slicing into lower-dimensional polytopes, and tries the rounded centre
//! first so that fat bodies are settled immediately.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lll::lll_gram;
use super::lp::LpOutcome;
use super::polytope::{hyperplane_lattice, Polytope};
use super::LatticeError;
use crate::scalar::Scalar;

/// More hyperplanes than this in a single branching step is reported as an error.
pub const SLICE_LIMIT: u64 = 1 << 20;

/// Shape information shared by the feasibility oracle and the enumerator.
#[derive(Debug, Clone)]
pub(crate) struct Analysis<S> {
    pub axial: Vec<(S, S)>,
    pub extremes: Vec<Vec<S>>,
    pub directions: Vec<(Vec<BigInt>, S, S)>,
}

impl<S: Scalar> Analysis<S> {
    /// Thinnest direction. An axis wins unless some other direction is less
    /// than half as wide; `prefer` wins whenever it is strictly thinner.
    pub fn choose(&self, prefer: Option<&(Vec<BigInt>, S, S)>) -> (Vec<BigInt>, S, S) {
        let n = self.axial.len();
        let width = |lo: &S, hi: &S| hi.clone() - lo.clone();
        let (ai, (alo, ahi)) = self
            .axial
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| width(&a.0, &a.1).partial_cmp(&width(&b.0, &b.1)).expect("ordered"))
            .expect("dimension at least one");
        let mut e = vec![BigInt::zero(); n];
        e[ai] = BigInt::one();
        let mut best = (e, alo.clone(), ahi.clone());
        let aw = width(alo, ahi);
        if let Some(d) = self
            .directions
            .iter()
            .min_by(|a, b| width(&a.1, &a.2).partial_cmp(&width(&b.1, &b.2)).expect("ordered"))
        {
            let two = S::one() + S::one();
            if width(&d.1, &d.2) * two < aw {
                best = d.clone();
            }
        }
        if let Some(p) = prefer {
            if width(&p.1, &p.2) < width(&best.1, &best.2) {
                best = p.clone();
            }
        }
        best
    }
}

/// LP-based shape analysis. `None` when the polytope is empty.
pub(crate) fn analyze<S: Scalar>(p: &Polytope<S>, with_lll: bool) -> Result<Option<Analysis<S>>, LatticeError> {
    let n = p.dim();
    let mut axial = Vec::with_capacity(n);
    let mut extremes = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut e = vec![S::zero(); n];
        e[i] = S::one();
        let hi = match p.maximize(&e) {
            LpOutcome::Optimal { value, point, .. } => {
                extremes.push(point);
                value
            }
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(LatticeError::Unbounded),
        };
        e[i] = -S::one();
        let lo = match p.maximize(&e) {
            LpOutcome::Optimal { value, point, .. } => {
                extremes.push(point);
                -value
            }
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(LatticeError::Unbounded),
        };
        axial.push((lo, hi));
    }
    let mut directions = Vec::new();
    if with_lll && n >= 2 {
        for d in lll_directions(&extremes) {
            if let Some((lo, hi)) = p.width_along_int(&d)? {
                directions.push((d, lo, hi));
            }
        }
    }
    Ok(Some(Analysis { axial, extremes, directions }))
}

/// Short integer directions for the covariance form of the extreme points.
///
/// The form is reduced in `f64`. For exact scalars the centred points are
/// then re-expressed in the reduced directions in fixed point and reduced
/// again until the basis settles, so bodies much thinner than `f64` can
/// resolve in one pass still yield their thin directions.
fn lll_directions<S: Scalar>(extremes: &[Vec<S>]) -> Vec<Vec<BigInt>> {
    let n = extremes[0].len();
    let raw: Vec<Vec<f64>> = extremes.iter().map(|x| x.iter().map(|v| v.to_f64()).collect()).collect();
    let mean: Vec<f64> = (0..n).map(|j| raw.iter().map(|x| x[j]).sum::<f64>() / raw.len() as f64).collect();
    let pts: Vec<Vec<f64>> = raw.iter().map(|x| x.iter().zip(&mean).map(|(a, b)| a - b).collect()).collect();
    let Some(mut u) = reduce_form(&pts) else { return Vec::new() };
    if let Some(centred) = fixed_point_centred(extremes) {
        for _ in 0..REFINE_ROUNDS {
            let pts: Vec<Vec<f64>> = centred
                .iter()
                .map(|c| {
                    u.iter()
                        .map(|row| {
                            let y = row.iter().zip(c).fold(BigInt::zero(), |acc, (d, x)| acc + d * x);
                            fixed_to_f64(&y)
                        })
                        .collect()
                })
                .collect();
            let Some(v) = reduce_form(&pts) else { break };
            if v.iter().all(|row| row.iter().filter(|x| !x.is_zero()).count() == 1) {
                break;
            }
            u = v
                .iter()
                .map(|row| {
                    (0..n).map(|j| row.iter().zip(&u).fold(BigInt::zero(), |acc, (a, r)| acc + a * &r[j])).collect()
                })
                .collect();
        }
    }
    u.into_iter().filter(|d| d.iter().filter(|x| !x.is_zero()).count() > 1).map(normalize_direction).collect()
}

/// Extra reduction passes for exact scalars.
const REFINE_ROUNDS: usize = 8;

/// Fractional bits of the fixed-point points.
const FIXED_BITS: u32 = 128;

/// Extreme points minus their mean, times `2^FIXED_BITS`, rounded. `None`
/// for inexact scalars.
fn fixed_point_centred<S: Scalar>(extremes: &[Vec<S>]) -> Option<Vec<Vec<BigInt>>> {
    if !S::EXACT {
        return None;
    }
    let scale = BigInt::one() << FIXED_BITS;
    let fixed: Vec<Vec<BigInt>> = extremes
        .iter()
        .map(|x| x.iter().map(|v| v.to_rational().map(|r| (r * &scale).round().to_integer())).collect())
        .collect::<Option<_>>()?;
    let n = fixed[0].len();
    let m = BigInt::from(fixed.len());
    let mean: Vec<BigInt> = (0..n).map(|j| fixed.iter().map(|x| &x[j]).sum::<BigInt>().div_floor(&m)).collect();
    Some(fixed.into_iter().map(|x| x.iter().zip(&mean).map(|(a, b)| a - b).collect()).collect())
}

fn fixed_to_f64(y: &BigInt) -> f64 {
    let bits = y.bits();
    if bits <= 1000 {
        y.to_f64().unwrap_or(0.0) * 2f64.powi(-(FIXED_BITS as i32))
    } else {
        let shift = bits - 1000;
        (y >> shift).to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32 - FIXED_BITS as i32)
    }
}

/// LLL transform of the covariance of `pts`, `None` when it is degenerate.
fn reduce_form(pts: &[Vec<f64>]) -> Option<Vec<Vec<BigInt>>> {
    let n = pts[0].len();
    let m = pts.len() as f64;
    let mut cov = vec![vec![0f64; n]; n];
    for x in pts {
        for i in 0..n {
            for j in 0..n {
                cov[i][j] += x[i] * x[j] / m;
            }
        }
    }
    let trace: f64 = (0..n).map(|i| cov[i][i]).sum();
    if !trace.is_finite() || trace == 0.0 {
        return None;
    }
    let ridge = trace * 1e-10 + 1e-18;
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += ridge;
    }
    lll_gram(cov, &0.99).ok()
}

/// Primitive representative whose first nonzero entry is positive.
pub(crate) fn normalize_direction(mut d: Vec<BigInt>) -> Vec<BigInt> {
    let g = d.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in d.iter_mut() {
            *x = &*x / &g;
        }
    }
    if d.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in d.iter_mut() {
            *x = -x.clone();
        }
    }
    d
}

/// Integers `lo..=hi` ordered from the middle outward.
pub(crate) fn middle_out(lo: &BigInt, hi: &BigInt) -> impl Iterator<Item = BigInt> {
    let mid: BigInt = (lo + hi).div_floor(&BigInt::from(2));
    let lo = lo.clone();
    let hi = hi.clone();
    let mut k = 0u64;
    std::iter::from_fn(move || loop {
        let off = BigInt::from(k.div_ceil(2));
        let z = if k % 2 == 1 { &mid + &off } else { &mid - &off };
        k += 1;
        if &mid + &off > hi && &mid - &off < lo {
            return None;
        }
        if z >= lo && z <= hi {
            return Some(z);
        }
    })
}

/// An integer point of `p` (strictly inside when `strict`), or `None`.
pub fn find_integer_point<S: Scalar>(p: &Polytope<S>, strict: bool) -> Result<Option<Vec<BigInt>>, LatticeError> {
    if p.dim() == 1 {
        return Ok(p.integer_range_1d(strict).map(|(lo, _)| vec![lo]));
    }
    let Some(an) = analyze(p, true)? else {
        return Ok(None);
    };
    find_with(p, &an, strict)
}

pub(crate) fn find_with<S: Scalar>(
    p: &Polytope<S>,
    an: &Analysis<S>,
    strict: bool,
) -> Result<Option<Vec<BigInt>>, LatticeError> {
    let n = p.dim();
    let inside = |x: &[BigInt]| if strict { p.contains_strict(x) } else { p.contains(x) };
    // Rounded centre of the extreme points.
    let m = S::from_u64(an.extremes.len() as u64).expect("small");
    let centre: Vec<BigInt> = (0..n)
        .map(|j| {
            let s = an.extremes.iter().fold(S::zero(), |acc, x| acc + x[j].clone());
            (s / m.clone() + S::one() / (S::one() + S::one())).floor_int()
        })
        .collect();
    if inside(&centre) {
        return Ok(Some(centre));
    }
    let (d, lo, hi) = an.choose(None);
    let zlo = lo.ceil_int();
    let zhi = hi.floor_int();
    if zlo > zhi {
        return Ok(None);
    }
    let count: BigInt = &zhi - &zlo + 1;
    if count > BigInt::from(SLICE_LIMIT) {
        return Err(LatticeError::SliceExplosion { count: count.to_string() });
    }
    for z in middle_out(&zlo, &zhi) {
        let Some((origin, cols)) = hyperplane_lattice(&d, &z) else { continue };
        let sub = p.substitute(&origin, &cols);
        if let Some(y) = find_integer_point(&sub, strict)? {
            let x = (0..n)
                .map(|i| cols.iter().zip(&y).fold(origin[i].clone(), |acc, (c, yj)| acc + &c[i] * yj))
                .collect();
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// `true` iff no integer point satisfies every inequality strictly.
pub fn em_feasible<S: Scalar>(p: &Polytope<S>) -> Result<bool, LatticeError> {
    Ok(find_integer_point(p, true)?.is_none())
}

/// `true` iff the closed polytope holds no integer point.
pub fn em_closed_empty<S: Scalar>(p: &Polytope<S>) -> Result<bool, LatticeError> {
    Ok(find_integer_point(p, false)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::polytope::{brute_force_enumerate, RationalPolytope};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn boxes() {
        let p = RationalPolytope::from_box(&vec![q(1, 10); 4], &vec![q(9, 10); 4]);
        assert!(em_feasible(&p).unwrap());
        let p = RationalPolytope::from_box(&vec![q(-1, 2); 4], &vec![q(1, 2); 4]);
        assert!(!em_feasible(&p).unwrap());
        // closed unit box: only corners, none strictly inside
        let p = RationalPolytope::from_box(&vec![q(0, 1); 3], &vec![q(1, 1); 3]);
        assert!(em_feasible(&p).unwrap());
        assert!(!em_closed_empty(&p).unwrap());
    }

    #[test]
    fn thin_slab_matches_brute_force() {
        // 0.3 ≤ x + y·(665857/470832) ≤ 0.300001, |x|, |y| ≤ 10³
        let r = q(665857, 470832);
        let mut rows = RationalPolytope::from_box(&[q(-1000, 1), q(-1000, 1)], &[q(1000, 1), q(1000, 1)])
            .rows()
            .to_vec();
        rows.push((vec![q(1, 1), r.clone()], q(300001, 1000000)));
        rows.push((vec![q(-1, 1), -r.clone()], q(-3, 10)));
        let p = RationalPolytope::new(2, rows).unwrap();
        let mut any = false;
        for y in -999i64..=999 {
            let lo = q(3, 10) - r.clone() * q(y, 1);
            let hi = q(300001, 1000000) - r.clone() * q(y, 1);
            let x = lo.ceil();
            if x < hi && x.abs() < q(1000, 1) && x > lo {
                any = true;
            }
        }
        assert_eq!(em_feasible(&p).unwrap(), !any);
        let closed = brute_force_enumerate(&p, 10_000_000).unwrap();
        assert_eq!(em_closed_empty(&p).unwrap(), closed.is_empty());
    }

    #[test]
    fn middle_out_order() {
        let v: Vec<i64> = middle_out(&BigInt::from(-2), &BigInt::from(2)).map(|z| z.try_into().unwrap()).collect();
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
        let v: Vec<i64> = middle_out(&BigInt::from(3), &BigInt::from(3)).map(|z| z.try_into().unwrap()).collect();
        assert_eq!(v, vec![3]);
        let v: Vec<i64> = middle_out(&BigInt::from(0), &BigInt::from(3)).map(|z| z.try_into().unwrap()).collect();
        assert_eq!(v, vec![1, 2, 0, 3]);
    }
}
