//! Recursive integer point enumeration with median splits.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::em::{analyze, find_with};
use super::polytope::{hyperplane_lattice, Polytope};
use super::LatticeError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumStats {
    /// Three-way splits performed in the full dimension.
    pub bisection_count: u64,
    pub oracle_calls: u64,
    pub max_recursion_depth: u32,
    /// Largest width along a direction used for a full-dimensional split.
    pub max_branch_width: f64,
}

impl EnumStats {
    pub fn merge(&mut self, other: &EnumStats) {
        self.bisection_count += other.bisection_count;
        self.oracle_calls += other.oracle_calls;
        self.max_recursion_depth = self.max_recursion_depth.max(other.max_recursion_depth);
        self.max_branch_width = self.max_branch_width.max(other.max_branch_width);
    }

    /// `m·(⌈log₂ W⌉ + 1)` for `m` output points; `None` when nothing was split.
    pub fn bisection_bound(&self, m: usize) -> Option<u64> {
        if self.bisection_count == 0 && self.max_branch_width == 0.0 {
            return None;
        }
        let w = self.max_branch_width.max(1.0);
        Some(m as u64 * (w.log2().ceil() as u64 + 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub points: BTreeSet<Vec<BigInt>>,
    pub stats: EnumStats,
    /// Set when the point limit stopped the search early.
    pub truncated: bool,
}

/// Affine map from the current slice coordinates back to the original space.
#[derive(Clone)]
struct Frame {
    origin: Vec<BigInt>,
    cols: Vec<Vec<BigInt>>,
}

impl Frame {
    fn identity(n: usize) -> Frame {
        let cols = (0..n)
            .map(|j| (0..n).map(|i| BigInt::from((i == j) as i32)).collect())
            .collect();
        Frame { origin: vec![BigInt::from(0); n], cols }
    }

    fn apply(&self, y: &[BigInt]) -> Vec<BigInt> {
        let mut x = self.origin.clone();
        for (c, yj) in self.cols.iter().zip(y) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += ci * yj;
            }
        }
        x
    }

    fn compose(&self, origin: &[BigInt], cols: &[Vec<BigInt>]) -> Frame {
        Frame { origin: self.apply(origin), cols: cols.iter().map(|c| self.apply_linear(c)).collect() }
    }

    fn apply_linear(&self, y: &[BigInt]) -> Vec<BigInt> {
        let mut x = vec![BigInt::from(0); self.origin.len()];
        for (c, yj) in self.cols.iter().zip(y) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += ci * yj;
            }
        }
        x
    }
}

struct Ctx {
    top_dim: usize,
    limit: Option<usize>,
    points: BTreeSet<Vec<BigInt>>,
    stats: EnumStats,
    truncated: bool,
}

impl Ctx {
    fn push(&mut self, x: Vec<BigInt>) {
        if let Some(l) = self.limit {
            if self.points.len() >= l {
                self.truncated = true;
                return;
            }
        }
        self.points.insert(x);
    }

    fn full(&self) -> bool {
        self.limit.is_some_and(|l| self.points.len() >= l)
    }
}

/// All integer points of the closed polytope `p`.
pub fn ip_enumerate<S: Scalar>(p: &Polytope<S>) -> Result<Enumeration, LatticeError> {
    ip_enumerate_limited(p, None)
}

/// As [`ip_enumerate`], stopping once `limit` points are collected.
pub fn ip_enumerate_limited<S: Scalar>(p: &Polytope<S>, limit: Option<usize>) -> Result<Enumeration, LatticeError> {
    let n = p.dim();
    let mut ctx = Ctx { top_dim: n, limit, points: BTreeSet::new(), stats: EnumStats::default(), truncated: false };
    if n == 0 {
        if p.rows().iter().all(|(_, b)| !b.is_neg()) {
            ctx.points.insert(vec![]);
        }
    } else {
        recurse(p, &Frame::identity(n), 0, None, &mut ctx)?;
    }
    Ok(Enumeration { points: ctx.points, stats: ctx.stats, truncated: ctx.truncated })
}

fn recurse<S: Scalar>(
    p: &Polytope<S>,
    frame: &Frame,
    depth: u32,
    inherited: Option<&Vec<BigInt>>,
    ctx: &mut Ctx,
) -> Result<(), LatticeError> {
    if ctx.full() {
        ctx.truncated = true;
        return Ok(());
    }
    ctx.stats.max_recursion_depth = ctx.stats.max_recursion_depth.max(depth);
    if p.dim() == 1 {
        if let Some((lo, hi)) = p.integer_range_1d(false) {
            let mut z = lo;
            while z <= hi {
                ctx.push(frame.apply(std::slice::from_ref(&z)));
                if ctx.full() {
                    break;
                }
                z += 1;
            }
        }
        return Ok(());
    }
    let Some(an) = analyze(p, true)? else {
        return Ok(());
    };
    ctx.stats.oracle_calls += 1;
    if find_with(p, &an, false)?.is_none() {
        return Ok(());
    }
    let prefer = match inherited {
        Some(d) => p.width_along_int(d)?.map(|(lo, hi)| (d.clone(), lo, hi)),
        None => None,
    };
    let (d, lo, hi) = an.choose(prefer.as_ref());
    let zlo = lo.ceil_int();
    let zhi = hi.floor_int();
    if zlo > zhi {
        return Ok(());
    }
    if zlo == zhi {
        return descend(p, frame, depth, &d, &zlo, ctx);
    }
    let half = S::one() / (S::one() + S::one());
    let mid = (lo.clone() + hi.clone()) * half.clone();
    let z = (mid - half).ceil_int().clamp(zlo, zhi);
    if p.dim() == ctx.top_dim {
        ctx.stats.bisection_count += 1;
        let w = (hi - lo).to_f64();
        if w > ctx.stats.max_branch_width {
            ctx.stats.max_branch_width = w;
        }
    }
    let ds: Vec<S> = d.iter().map(S::from_bigint).collect();
    let below = p.with_row(ds.clone(), S::from_bigint(&(&z - 1)));
    recurse(&below, frame, depth + 1, Some(&d), ctx)?;
    descend(p, frame, depth, &d, &z, ctx)?;
    let neg: Vec<S> = ds.iter().map(|x| -x.clone()).collect();
    let above = p.with_row(neg, -S::from_bigint(&(&z + 1)));
    recurse(&above, frame, depth + 1, Some(&d), ctx)
}

/// Recurses into the slice `{d·x = z}`.
fn descend<S: Scalar>(
    p: &Polytope<S>,
    frame: &Frame,
    depth: u32,
    d: &[BigInt],
    z: &BigInt,
    ctx: &mut Ctx,
) -> Result<(), LatticeError> {
    let Some((origin, cols)) = hyperplane_lattice(d, z) else {
        return Ok(());
    };
    let sub = p.substitute(&origin, &cols);
    let f = frame.compose(&origin, &cols);
    recurse(&sub, &f, depth + 1, None, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::em::em_feasible;
    use crate::lattice::polytope::{brute_force_enumerate, RationalPolytope};
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_has_nine_points() {
        let p = RationalPolytope::from_box(&[q(-3, 2), q(-3, 2)], &[q(3, 2), q(3, 2)]);
        let e = ip_enumerate(&p).unwrap();
        assert_eq!(e.points.len(), 9);
    }

    #[test]
    fn empty_interior_short_circuits() {
        let p = RationalPolytope::from_box(&vec![q(1, 10); 4], &vec![q(9, 10); 4]);
        let e = ip_enumerate(&p).unwrap();
        assert!(e.points.is_empty());
        assert_eq!(e.stats.bisection_count, 0);
    }

    #[test]
    fn limit_truncates() {
        let p = RationalPolytope::from_box(&[q(-5, 1), q(-5, 1)], &[q(5, 1), q(5, 1)]);
        let e = ip_enumerate_limited(&p, Some(7)).unwrap();
        assert_eq!(e.points.len(), 7);
        assert!(e.truncated);
    }

    #[test]
    fn float_polytope() {
        let p: Polytope<f64> = Polytope::from_box(&[-2.5, -0.5], &[2.5, 1.5]);
        assert_eq!(ip_enumerate(&p).unwrap().points.len(), 10);
    }

    fn random_polytope(rng: &mut ChaCha8Rng, dim: usize) -> RationalPolytope {
        let lo: Vec<BigRational> = (0..dim).map(|_| q(rng.gen_range(-60..=0), rng.gen_range(1..=3))).collect();
        let hi: Vec<BigRational> = lo.iter().map(|l| l + q(rng.gen_range(0..=36), rng.gen_range(1..=3))).collect();
        let mut rows = RationalPolytope::from_box(&lo, &hi).rows().to_vec();
        let centre: Vec<BigRational> = lo.iter().zip(&hi).map(|(l, h)| (l + h) / q(2, 1)).collect();
        for _ in 0..rng.gen_range(0..=4) {
            let a: Vec<BigRational> = (0..dim).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
            let at_c = a.iter().zip(&centre).fold(q(0, 1), |s, (x, y)| s + x * y);
            rows.push((a, at_c + q(rng.gen_range(-20..=40), rng.gen_range(1..=5))));
        }
        RationalPolytope::new(dim, rows).unwrap()
    }

    #[test]
    fn matches_brute_force_on_random_polytopes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..40 {
            let dim = 2 + case % 3;
            let p = random_polytope(&mut rng, dim);
            let e = ip_enumerate(&p).unwrap();
            let b = brute_force_enumerate(&p, 5_000_000).unwrap();
            assert_eq!(e.points, b, "case {case}");
            let interior_empty = b.iter().all(|x| !p.contains_strict(x));
            assert_eq!(em_feasible(&p).unwrap(), interior_empty, "case {case}");
            if let Some(bound) = e.stats.bisection_bound(e.points.len()) {
                if !e.points.is_empty() {
                    assert!(e.stats.bisection_count <= bound, "case {case}");
                }
            }
        }
    }
}
