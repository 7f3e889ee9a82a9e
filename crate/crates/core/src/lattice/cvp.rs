use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;

use super::LatticeError;
use crate::scalar::Real;

fn dot2<R: Real>(a: &[R; 2], b: &[R; 2]) -> R {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone()
}

fn comb<R: Real>(basis: &[[R; 2]; 2], c: &[BigInt; 2], prec: u32) -> [R; 2] {
    let c0 = R::from_bigint_prec(&c[0], prec);
    let c1 = R::from_bigint_prec(&c[1], prec);
    [
        c0.clone() * basis[0][0].clone() + c1.clone() * basis[1][0].clone(),
        c0 * basis[0][1].clone() + c1 * basis[1][1].clone(),
    ]
}

fn round_real<R: Real>(x: &R) -> BigInt {
    x.round_int().unwrap_or_else(|| {
        let f = x.to_f64().round();
        num_traits::FromPrimitive::from_f64(f).unwrap_or_else(BigInt::zero)
    })
}

/// Lagrange-Gauss reduction; returns the reduced rows and `U` with `reduced = U · basis`.
pub fn gauss_reduce<R: Real>(basis: &[[R; 2]; 2]) -> Result<([[R; 2]; 2], [[BigInt; 2]; 2]), LatticeError> {
    let prec = basis[0][0].precision();
    let mut b = basis.clone();
    let one = || BigInt::from(1);
    let mut u = [[one(), BigInt::zero()], [BigInt::zero(), one()]];
    let det = b[0][0].clone() * b[1][1].clone() - b[0][1].clone() * b[1][0].clone();
    if det.to_f64() == 0.0 {
        return Err(LatticeError::DegenerateBasis);
    }
    for _ in 0..10_000 {
        if dot2(&b[0], &b[0]).to_f64() < dot2(&b[1], &b[1]).to_f64() {
            b.swap(0, 1);
            u.swap(0, 1);
        }
        // b0 is the longer vector; reduce it against b1.
        let n1 = dot2(&b[1], &b[1]);
        if n1.to_f64() == 0.0 {
            return Err(LatticeError::DegenerateBasis);
        }
        let ratio = dot2(&b[0], &b[1]) / n1;
        let mu = round_real(&ratio);
        if mu.is_zero() || ratio.to_f64().abs() <= 0.5 {
            b.swap(0, 1);
            u.swap(0, 1);
            return Ok((b, u));
        }
        let m = R::from_bigint_prec(&mu, prec);
        b[0] = [b[0][0].clone() - m.clone() * b[1][0].clone(), b[0][1].clone() - m * b[1][1].clone()];
        let (u1, u0) = (u[1].clone(), &mut u[0]);
        u0[0] -= &mu * &u1[0];
        u0[1] -= &mu * &u1[1];
    }
    Err(LatticeError::NoConvergence)
}

/// Closest lattice point to `target`, as integer coefficients in the given basis.
///
/// The basis is Gauss reduced, the target rounded in reduced coordinates, and
/// the 3×3 neighbourhood searched. Ties go to the lexicographically smallest
/// coefficient pair.
pub fn cvp_2d<R: Real>(basis: &[[R; 2]; 2], target: &[R; 2]) -> Result<[BigInt; 2], LatticeError> {
    let prec = target[0].precision();
    let (red, u) = gauss_reduce(basis)?;
    let det = red[0][0].clone() * red[1][1].clone() - red[0][1].clone() * red[1][0].clone();
    // target = c0·r0 + c1·r1, Cramer's rule
    let c0 = (target[0].clone() * red[1][1].clone() - target[1].clone() * red[1][0].clone()) / det.clone();
    let c1 = (red[0][0].clone() * target[1].clone() - red[0][1].clone() * target[0].clone()) / det;
    let (r0, r1) = (round_real(&c0), round_real(&c1));
    let mut best: Option<([BigInt; 2], R)> = None;
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            let c = [&r0 + i, &r1 + j];
            let pt = comb(&red, &c, prec);
            let diff = [pt[0].clone() - target[0].clone(), pt[1].clone() - target[1].clone()];
            let d2 = dot2(&diff, &diff);
            let orig = [&c[0] * &u[0][0] + &c[1] * &u[1][0], &c[0] * &u[0][1] + &c[1] * &u[1][1]];
            let better = match &best {
                None => true,
                Some((bc, bd)) => match d2.partial_cmp(bd) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Greater) => false,
                    _ => match (d2.clone() - bd.clone()).to_f64().partial_cmp(&0.0) {
                        Some(Ordering::Less) => true,
                        Some(Ordering::Greater) => false,
                        _ => orig < *bc,
                    },
                },
            };
            if better {
                best = Some((orig, d2));
            }
        }
    }
    Ok(best.expect("nine candidates").0)
}
