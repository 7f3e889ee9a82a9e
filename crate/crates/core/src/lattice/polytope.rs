use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{dot, maximize, LpOutcome};
use super::LatticeError;
use crate::scalar::Scalar;

/// `{x ∈ Rⁿ : a_i·x ≤ b_i for every row}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<S> {
    dim: usize,
    rows: Vec<(Vec<S>, S)>,
}

impl<S: Scalar> Polytope<S> {
    pub fn new(dim: usize, rows: Vec<(Vec<S>, S)>) -> Result<Self, LatticeError> {
        if let Some((a, _)) = rows.iter().find(|(a, _)| a.len() != dim) {
            return Err(LatticeError::DimensionMismatch { expected: dim, found: a.len() });
        }
        Ok(Polytope { dim, rows })
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`.
    pub fn from_box(lo: &[S], hi: &[S]) -> Self {
        let dim = lo.len();
        let mut rows = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut a = vec![S::zero(); dim];
            a[i] = S::one();
            rows.push((a.clone(), hi[i].clone()));
            a[i] = -S::one();
            rows.push((a, -lo[i].clone()));
        }
        Polytope { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(Vec<S>, S)] {
        &self.rows
    }

    pub fn with_row(&self, a: Vec<S>, b: S) -> Self {
        let mut p = self.clone();
        p.rows.push((a, b));
        p
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let xs: Vec<S> = x.iter().map(S::from_bigint).collect();
        self.rows.iter().all(|(a, b)| dot(a, &xs) <= *b)
    }

    /// Membership in the interior: every inequality strict.
    pub fn contains_strict(&self, x: &[BigInt]) -> bool {
        let xs: Vec<S> = x.iter().map(S::from_bigint).collect();
        self.rows.iter().all(|(a, b)| dot(a, &xs) < *b)
    }

    pub fn maximize(&self, c: &[S]) -> LpOutcome<S> {
        maximize(&self.rows, c)
    }

    /// `(min, max)` of `d·x` over the polytope; `None` when it is empty.
    pub fn width_along(&self, d: &[S]) -> Result<Option<(S, S)>, LatticeError> {
        let neg: Vec<S> = d.iter().map(|x| -x.clone()).collect();
        let hi = match self.maximize(d) {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(LatticeError::Unbounded),
        };
        let lo = match self.maximize(&neg) {
            LpOutcome::Optimal { value, .. } => -value,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(LatticeError::Unbounded),
        };
        Ok(Some((lo, hi)))
    }

    /// Same as [`Self::width_along`] with an integer direction.
    pub fn width_along_int(&self, d: &[BigInt]) -> Result<Option<(S, S)>, LatticeError> {
        let ds: Vec<S> = d.iter().map(S::from_bigint).collect();
        self.width_along(&ds)
    }

    /// Per-axis bounds; `None` when empty.
    pub fn bounding_box(&self) -> Result<Option<(Vec<S>, Vec<S>)>, LatticeError> {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut e = vec![S::zero(); self.dim];
            e[i] = S::one();
            match self.width_along(&e)? {
                Some((l, h)) => {
                    lo.push(l);
                    hi.push(h);
                }
                None => return Ok(None),
            }
        }
        Ok(Some((lo, hi)))
    }

    /// Checks boundedness with an LP on `±e_i`.
    pub fn is_bounded(&self) -> bool {
        !matches!(self.bounding_box(), Err(LatticeError::Unbounded))
    }

    /// Pulls the polytope back along `x = origin + cols·y`, giving a polytope in `y`.
    pub fn substitute(&self, origin: &[BigInt], cols: &[Vec<BigInt>]) -> Polytope<S> {
        let xo: Vec<S> = origin.iter().map(S::from_bigint).collect();
        let rows = self
            .rows
            .iter()
            .map(|(a, b)| {
                let na: Vec<S> = cols
                    .iter()
                    .map(|col| {
                        a.iter().zip(col).fold(S::zero(), |acc, (ai, ci)| {
                            if ci.is_zero() {
                                acc
                            } else {
                                acc + ai.clone() * S::from_bigint(ci)
                            }
                        })
                    })
                    .collect();
                (na, b.clone() - dot(a, &xo))
            })
            .collect();
        Polytope { dim: cols.len(), rows }
    }

    /// Integer range of a one-dimensional polytope, read straight off the rows.
    /// `strict` asks for points satisfying every inequality strictly.
    pub fn integer_range_1d(&self, strict: bool) -> Option<(BigInt, BigInt)> {
        debug_assert_eq!(self.dim, 1);
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for (a, b) in &self.rows {
            let a = &a[0];
            if a.is_zero() {
                if b.is_negative() || (strict && b.is_zero()) {
                    return None;
                }
                continue;
            }
            let t = b.clone() / a.clone();
            if a.is_positive() {
                // z ≤ t  (z < t)
                let u = if strict { t.ceil_int() - 1 } else { t.floor_int() };
                hi = Some(match hi {
                    Some(h) if h < u => h,
                    _ => u,
                });
            } else {
                // z ≥ t  (z > t)
                let l = if strict { t.floor_int() + 1 } else { t.ceil_int() };
                lo = Some(match lo {
                    Some(x) if x > l => x,
                    _ => l,
                });
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l <= h => Some((l, h)),
            (Some(_), Some(_)) => None,
            _ => panic!("unbounded one-dimensional polytope"),
        }
    }
}

/// Unimodular `U` whose first column `u` satisfies `d·u = g = gcd(d)` and whose
/// other columns span `{x ∈ Zⁿ : d·x = 0}`.
pub fn unimodular_completion(d: &[BigInt]) -> (BigInt, Vec<Vec<BigInt>>) {
    let n = d.len();
    // Column operations on the row vector d, mirrored on U = I.
    let mut row = d.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect(); // u[j] is column j
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| !row[i].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let p = *nz.iter().min_by_key(|&&i| row[i].abs()).expect("nonempty");
        for &j in &nz {
            if j == p {
                continue;
            }
            let q = row[j].div_floor(&row[p]);
            let t = &q * &row[p];
            row[j] -= t;
            let col_p = u[p].clone();
            for (x, y) in u[j].iter_mut().zip(&col_p) {
                *x -= &q * y;
            }
        }
    }
    let p = (0..n).find(|&i| !row[i].is_zero()).unwrap_or(0);
    if p != 0 {
        row.swap(0, p);
        u.swap(0, p);
    }
    if row[0].is_negative() {
        row[0] = -row[0].clone();
        for x in u[0].iter_mut() {
            *x = -x.clone();
        }
    }
    (row[0].clone(), u)
}

/// Parametrization of the integer points on `{d·x = z}`: `x = origin + Σ y_j cols_j`.
/// `None` if the hyperplane holds no integer points.
pub fn hyperplane_lattice(d: &[BigInt], z: &BigInt) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let (g, u) = unimodular_completion(d);
    if g.is_zero() || !z.is_multiple_of(&g) {
        return None;
    }
    let t = z / &g;
    let origin: Vec<BigInt> = u[0].iter().map(|x| x * &t).collect();
    Some((origin, u[1..].to_vec()))
}

/// Exhaustive scan of the integer bounding box; the differential-testing oracle.
pub fn brute_force_enumerate<S: Scalar>(p: &Polytope<S>, cap: u64) -> Result<BTreeSet<Vec<BigInt>>, LatticeError> {
    let Some((lo, hi)) = p.bounding_box()? else {
        return Ok(BTreeSet::new());
    };
    let lo: Vec<BigInt> = lo.iter().map(|x| x.ceil_int()).collect();
    let hi: Vec<BigInt> = hi.iter().map(|x| x.floor_int()).collect();
    let mut count = BigInt::one();
    for (l, h) in lo.iter().zip(&hi) {
        if h < l {
            return Ok(BTreeSet::new());
        }
        count *= h - l + 1;
    }
    if count > BigInt::from(cap) {
        return Err(LatticeError::CapExceeded { count: count.to_string(), cap });
    }
    let mut out = BTreeSet::new();
    let mut x = lo.clone();
    loop {
        if p.contains(&x) {
            out.insert(x.clone());
        }
        let mut i = 0;
        loop {
            if i == x.len() {
                return Ok(out);
            }
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i].clone();
            i += 1;
        }
    }
}

pub type RationalPolytope = Polytope<BigRational>;

/// Formats a rational as `"num/den"`, or `"num"` for integers.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"num/den"`, an integer, or a finite decimal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    crate::expr::parse_decimal(s)
}

#[derive(Serialize, Deserialize)]
struct RowRepr {
    a: Vec<String>,
    b: String,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    dim: usize,
    rows: Vec<RowRepr>,
}

impl Serialize for Polytope<BigRational> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        PolytopeRepr {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|(a, b)| RowRepr { a: a.iter().map(rational_to_string).collect(), b: rational_to_string(b) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope<BigRational> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolytopeRepr::deserialize(d)?;
        let parse = |s: &str| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")));
        let mut rows = Vec::with_capacity(repr.rows.len());
        for r in &repr.rows {
            let a = r.a.iter().map(|x| parse(x)).collect::<Result<Vec<_>, _>>()?;
            rows.push((a, parse(&r.b)?));
        }
        Polytope::new(repr.dim, rows).map_err(D::Error::custom)
    }
}
