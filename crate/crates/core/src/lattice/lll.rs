use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::LatticeError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LllReduced<S> {
    /// Reduced basis vectors as rows.
    pub basis: Vec<Vec<S>>,
    /// Unimodular `U` with `reduced = U · original` (rows).
    pub transform: Vec<Vec<BigInt>>,
}

const MAX_SWAPS: usize = 100_000;

/// LLL reduction of the rows of `basis` with Lovász parameter `delta`.
pub fn lll_reduce<S: Scalar>(basis: &[Vec<S>], delta: &S) -> Result<LllReduced<S>, LatticeError> {
    let gram: Vec<Vec<S>> = basis
        .iter()
        .map(|x| basis.iter().map(|y| super::lp::dot(x, y)).collect())
        .collect();
    let transform = lll_gram(gram, delta)?;
    let reduced = transform
        .iter()
        .map(|row| {
            let m = basis.first().map_or(0, |b| b.len());
            (0..m)
                .map(|j| {
                    row.iter().zip(basis).fold(S::zero(), |acc, (c, b)| {
                        if c.is_zero() {
                            acc
                        } else {
                            acc + S::from_bigint(c) * b[j].clone()
                        }
                    })
                })
                .collect()
        })
        .collect();
    Ok(LllReduced { basis: reduced, transform })
}

/// LLL on a positive definite Gram matrix; returns the unimodular transform.
pub fn lll_gram<S: Scalar>(mut g: Vec<Vec<S>>, delta: &S) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    let n = g.len();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if n <= 1 {
        if n == 1 && !g[0][0].is_pos() {
            return Err(LatticeError::RankDeficient);
        }
        return Ok(u);
    }
    let half = S::one() / (S::one() + S::one());
    let mut k = 1;
    let mut swaps = 0;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(&g)?;
            let q = (mu[k][j].clone() + half.clone()).floor_int();
            if !q.is_zero() {
                let qs = S::from_bigint(&q);
                for i in 0..n {
                    let t = qs.clone() * g[j][i].clone();
                    g[k][i] = g[k][i].clone() - t;
                }
                for i in 0..n {
                    let t = qs.clone() * g[i][j].clone();
                    g[i][k] = g[i][k].clone() - t;
                }
                let uj = u[j].clone();
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= &q * y;
                }
            }
        }
        let (mu, bn) = gso(&g)?;
        let m = mu[k][k - 1].clone();
        if bn[k] >= (delta.clone() - m.clone() * m) * bn[k - 1].clone() {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = if k > 1 { k - 1 } else { 1 };
            swaps += 1;
            if swaps > MAX_SWAPS {
                return Err(LatticeError::NoConvergence);
            }
        }
    }
    Ok(u)
}

/// Gram-Schmidt coefficients and squared lengths from a Gram matrix.
fn gso<S: Scalar>(g: &[Vec<S>]) -> Result<(Vec<Vec<S>>, Vec<S>), LatticeError> {
    let n = g.len();
    let mut mu = vec![vec![S::zero(); n]; n];
    let mut bn: Vec<S> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for l in 0..j {
                s = s - mu[j][l].clone() * mu[i][l].clone() * bn[l].clone();
            }
            mu[i][j] = s / bn[j].clone();
        }
        let mut s = g[i][i].clone();
        for l in 0..i {
            s = s - mu[i][l].clone() * mu[i][l].clone() * bn[l].clone();
        }
        if !s.is_pos() {
            return Err(LatticeError::RankDeficient);
        }
        bn.push(s);
    }
    Ok((mu, bn))
}

/// Checks the size-reduction and Lovász conditions.
pub fn is_lll_reduced<S: Scalar>(basis: &[Vec<S>], delta: &S) -> bool {
    let g: Vec<Vec<S>> = basis
        .iter()
        .map(|x| basis.iter().map(|y| super::lp::dot(x, y)).collect())
        .collect();
    let Ok((mu, bn)) = gso(&g) else { return false };
    let half = S::one() / (S::one() + S::one());
    for i in 0..basis.len() {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 {
            let m = mu[i][i - 1].clone();
            if bn[i] < (delta.clone() - m.clone() * m) * bn[i - 1].clone() {
                return false;
            }
        }
    }
    true
}
