//! Linear programs `max c·x` subject to `A x ≤ b` with free `x`.
//!
//! The solver works on the dual `min b·y` subject to `Aᵀy = c`, `y ≥ 0`, which has
//! only `n ≤ 4` equality rows. Bland's rule keeps the exact path cycle free.
//! For exact scalars a floating point run first proposes a basis; it is
//! accepted only after exact primal and dual feasibility checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S>, basis: Vec<usize> },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

const FLOAT_PIVOT_CAP: usize = 2_000;

/// Maximizes `c·x` over `{x : a_i·x ≤ b_i}`.
pub fn maximize<S: Scalar>(rows: &[(Vec<S>, S)], c: &[S]) -> LpOutcome<S> {
    let n = c.len();
    debug_assert!(rows.iter().all(|(a, _)| a.len() == n));
    if n == 0 {
        return if rows.iter().all(|(_, b)| !b.is_neg()) {
            LpOutcome::Optimal { value: S::zero(), point: vec![], basis: vec![] }
        } else {
            LpOutcome::Infeasible
        };
    }
    if S::EXACT {
        if let Some(basis) = float_hint(rows, c) {
            if let Some(out) = verify_basis(rows, c, &basis) {
                return out;
            }
        }
    }
    match dual_simplex(rows, c, usize::MAX) {
        Some(out) => out,
        None => unreachable!("Bland's rule terminates"),
    }
}

/// Runs the solver in `f64` on row-normalized data and returns its optimal basis.
fn float_hint<S: Scalar>(rows: &[(Vec<S>, S)], c: &[S]) -> Option<Vec<usize>> {
    let frows: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .map(|(a, b)| {
            let af: Vec<f64> = a.iter().map(|x| x.to_f64()).collect();
            let scale = af.iter().fold(0f64, |m, x| m.max(x.abs()));
            let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
            (af.iter().map(|x| x / scale).collect(), b.to_f64() / scale)
        })
        .collect();
    let cf: Vec<f64> = c.iter().map(|x| x.to_f64()).collect();
    let cs = cf.iter().fold(0f64, |m, x| m.max(x.abs()));
    let cf: Vec<f64> = if cs > 0.0 { cf.iter().map(|x| x / cs).collect() } else { cf };
    if frows.iter().any(|(a, b)| !b.is_finite() || a.iter().any(|x| !x.is_finite())) {
        return None;
    }
    match dual_simplex(&frows, &cf, FLOAT_PIVOT_CAP)? {
        LpOutcome::Optimal { basis, .. } => Some(basis),
        _ => None,
    }
}

/// Accepts `basis` if it is primal and dual feasible in exact arithmetic.
fn verify_basis<S: Scalar>(rows: &[(Vec<S>, S)], c: &[S], basis: &[usize]) -> Option<LpOutcome<S>> {
    let n = c.len();
    if basis.len() != n {
        return None;
    }
    if let Some(out) = verify_integer(rows, c, basis) {
        return out;
    }
    let ab: Vec<Vec<S>> = basis.iter().map(|&i| rows[i].0.clone()).collect();
    let bb: Vec<S> = basis.iter().map(|&i| rows[i].1.clone()).collect();
    let x = solve_linear(&ab, &bb)?;
    for (a, b) in rows {
        if dot(a, &x) > *b {
            return None;
        }
    }
    // dual multipliers: A_Bᵀ y = c
    let abt: Vec<Vec<S>> = (0..n).map(|j| (0..n).map(|i| ab[i][j].clone()).collect()).collect();
    let y = solve_linear(&abt, c)?;
    if y.iter().any(|v| v.is_negative()) {
        return None;
    }
    let value = dot(c, &x);
    Some(LpOutcome::Optimal { value, point: x, basis: basis.to_vec() })
}

/// Row `a·x ≤ b` scaled to integer coefficients.
fn integer_row(a: &[BigRational], b: &BigRational) -> (Vec<BigInt>, BigInt) {
    let l = a.iter().chain(std::iter::once(b)).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scale = |x: &BigRational| x.numer() * (&l / x.denom());
    (a.iter().map(scale).collect(), scale(b))
}

/// Fraction-free (Bareiss) determinant.
fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Cramer numerators and denominator for `m x = rhs`, denominator positive.
fn cramer(m: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let d = det(m.to_vec());
    if d.is_zero() {
        return None;
    }
    let flip = d.is_negative();
    let nums = (0..m.len())
        .map(|j| {
            let mj: Vec<Vec<BigInt>> = m
                .iter()
                .zip(rhs)
                .map(|(row, r)| {
                    let mut row = row.clone();
                    row[j] = r.clone();
                    row
                })
                .collect();
            let v = det(mj);
            if flip {
                -v
            } else {
                v
            }
        })
        .collect();
    Some((nums, d.abs()))
}

/// Exact verification on integer-scaled data; `None` when the scalar type
/// has no rational view.
fn verify_integer<S: Scalar>(rows: &[(Vec<S>, S)], c: &[S], basis: &[usize]) -> Option<Option<LpOutcome<S>>> {
    let to_q = |v: &[S]| v.iter().map(|x| x.to_rational()).collect::<Option<Vec<BigRational>>>();
    let cq = to_q(c)?;
    let irows: Vec<(Vec<BigInt>, BigInt)> = rows
        .iter()
        .map(|(a, b)| Some(integer_row(&to_q(a)?, &b.to_rational()?)))
        .collect::<Option<_>>()?;
    let (ic, _) = integer_row(&cq, &BigRational::zero());
    let n = c.len();
    let ab: Vec<Vec<BigInt>> = basis.iter().map(|&i| irows[i].0.clone()).collect();
    let bb: Vec<BigInt> = basis.iter().map(|&i| irows[i].1.clone()).collect();
    let Some((xs, d)) = cramer(&ab, &bb) else { return Some(None) };
    for (a, b) in &irows {
        let lhs = a.iter().zip(&xs).fold(BigInt::zero(), |s, (p, q)| s + p * q);
        if lhs > b * &d {
            return Some(None);
        }
    }
    let abt: Vec<Vec<BigInt>> = (0..n).map(|j| (0..n).map(|i| ab[i][j].clone()).collect()).collect();
    let Some((ys, _)) = cramer(&abt, &ic) else { return Some(None) };
    if ys.iter().any(|v| v.is_negative()) {
        return Some(None);
    }
    let xq: Vec<BigRational> = xs.into_iter().map(|x| BigRational::new(x, d.clone())).collect();
    let value = cq.iter().zip(&xq).fold(BigRational::zero(), |s, (p, q)| s + p * q);
    let point = xq.iter().map(S::from_rational).collect();
    Some(Some(LpOutcome::Optimal { value: S::from_rational(&value), point, basis: basis.to_vec() }))
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Gaussian elimination; `None` when the matrix is singular.
pub(crate) fn solve_linear<S: Scalar>(m: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = if S::EXACT {
            (col..n).find(|&r| !a[r][col].is_zero())?
        } else {
            let r = (col..n).max_by(|&x, &y| {
                a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[r][col].near_zero() {
                return None;
            }
            r
        };
        a.swap(col, piv);
        let p = a[col][col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone() / p.clone();
                for k in col..=n {
                    let t = a[col][k].clone() * f.clone();
                    a[r][k] = a[r][k].clone() - t;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect())
}

/// Some solution of a consistent system with `k ≤ n` independent rows.
fn solve_any<S: Scalar>(m: &[Vec<S>], rhs: &[S], n: usize) -> Option<Vec<S>> {
    let k = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(k);
    let mut r = 0;
    for col in 0..n {
        if r == k {
            break;
        }
        let Some(p) = (r..k).find(|&i| !a[i][col].near_zero()) else { continue };
        a.swap(r, p);
        let pv = a[r][col].clone();
        for i in 0..k {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone() / pv.clone();
                for j in col..=n {
                    let t = a[r][j].clone() * f.clone();
                    a[i][j] = a[i][j].clone() - t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if r < k {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][n].clone() / a[i][col].clone();
    }
    Some(x)
}

/// Two-phase simplex on the dual. Returns `None` if the pivot cap is hit.
fn dual_simplex<S: Scalar>(rows: &[(Vec<S>, S)], c: &[S], cap: usize) -> Option<LpOutcome<S>> {
    let n = c.len();
    let m = rows.len();
    // Columns: y_0..y_{m-1}, artificials a_0..a_{n-1}, rhs.
    let width = m + n + 1;
    let mut t: Vec<Vec<S>> = (0..n)
        .map(|j| {
            let neg = c[j].is_negative();
            let mut row = Vec::with_capacity(width);
            for (a, _) in rows {
                row.push(if neg { -a[j].clone() } else { a[j].clone() });
            }
            for i in 0..n {
                row.push(if i == j { S::one() } else { S::zero() });
            }
            row.push(if neg { -c[j].clone() } else { c[j].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + n).collect();
    let mut pivots = 0usize;

    // Phase 1: minimize the sum of artificials.
    let phase1_cost: Vec<S> = (0..m + n).map(|i| if i >= m { S::one() } else { S::zero() }).collect();
    if !run_phase(&mut t, &mut basis, &phase1_cost, m + n, &mut pivots, cap)? {
        unreachable!("phase 1 is bounded below by zero");
    }
    let infeas = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= m)
        .fold(S::zero(), |acc, (r, _)| acc + t[r][width - 1].clone());
    if infeas.is_pos() {
        // The dual is infeasible: the primal is unbounded or infeasible. A zero
        // objective has a trivially feasible dual and tells the two apart.
        if c.iter().all(|x| x.is_zero()) {
            unreachable!("zero objective has a feasible dual");
        }
        let zero = vec![S::zero(); n];
        return match dual_simplex(rows, &zero, cap)? {
            LpOutcome::Infeasible => Some(LpOutcome::Infeasible),
            _ => Some(LpOutcome::Unbounded),
        };
    }
    // Drive artificials out of the basis; rows that cannot be cleared are redundant.
    let mut r = 0;
    while r < t.len() {
        if basis[r] >= m {
            match (0..m).find(|&j| !t[r][j].near_zero()) {
                Some(j) => pivot(&mut t, &mut basis, r, j),
                None => {
                    t.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    // Phase 2 over the y columns only.
    let cost: Vec<S> = rows.iter().map(|(_, b)| b.clone()).collect();
    if !run_phase(&mut t, &mut basis, &cost, m, &mut pivots, cap)? {
        return Some(LpOutcome::Infeasible);
    }
    // With a rank deficient constraint matrix fewer than n rows are tight and
    // the free coordinates of the optimum are set to zero.
    let ab: Vec<Vec<S>> = basis.iter().map(|&i| rows[i].0.clone()).collect();
    let bb: Vec<S> = basis.iter().map(|&i| rows[i].1.clone()).collect();
    let x = solve_any(&ab, &bb, n)?;
    let value = dot(c, &x);
    let mut sorted = basis.clone();
    sorted.sort_unstable();
    Some(LpOutcome::Optimal { value, point: x, basis: sorted })
}

fn pivot<S: Scalar>(t: &mut [Vec<S>], basis: &mut [usize], r: usize, col: usize) {
    let p = t[r][col].clone();
    for v in t[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    basis[r] = col;
}

/// Minimizes `cost` over the first `ncols` columns. Returns `Some(false)` when
/// unbounded, `None` on hitting the pivot cap.
fn run_phase<S: Scalar>(
    t: &mut [Vec<S>],
    basis: &mut [usize],
    cost: &[S],
    ncols: usize,
    pivots: &mut usize,
    cap: usize,
) -> Option<bool> {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        // Reduced costs c_j - c_B B⁻¹ A_j; Bland: first improving column.
        let entering = (0..ncols).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut rc = cost[j].clone();
            for (r, &bv) in basis.iter().enumerate() {
                if bv < cost.len() && !t[r][j].is_zero() {
                    rc = rc - cost[bv].clone() * t[r][j].clone();
                }
            }
            rc.is_neg()
        });
        let Some(col) = entering else {
            return Some(true);
        };
        let mut best: Option<(usize, S)> = None;
        for r in 0..t.len() {
            if t[r][col].is_pos() {
                let ratio = t[r][rhs].clone() / t[r][col].clone();
                let better = match &best {
                    None => true,
                    Some((br, bval)) => ratio < *bval || (ratio == *bval && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = best else {
            return Some(false);
        };
        pivot(t, basis, r, col);
        *pivots += 1;
        if *pivots > cap {
            return None;
        }
    }
}
