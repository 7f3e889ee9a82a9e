//! The norm equation `|w|² = n` over Z[ω].
//!
//! `n` is a norm iff every prime `q ≡ 2 (mod 3)` divides it to an even power.
//! Solutions are assembled prime by prime: `3 = N(1 + 2ω)`, a split prime
//! `p ≡ 1 (mod 3)` is the norm of `gcd(p, x - (1 + 2ω))` where `x² ≡ -3 (mod p)`,
//! and an inert `q` contributes `q^(f/2)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eisenstein::{factor, gcd, is_prime, sqrt_mod, Budget, EisensteinInt, FactorOutcome, Factorization};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error("negative norm target {0}")]
    Negative(BigInt),
    #[error("candidate lies outside the ball: N(u) + N(v) = {sum} > 3^{k}")]
    OutsideBall { sum: BigInt, k: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NormStatus {
    Solved { w: EisensteinInt },
    /// `prime` is ≡ 2 (mod 3) and divides n to the odd power `exponent`.
    Unsolvable {
        #[serde(with = "crate::decimal::big")]
        prime: BigInt,
        exponent: u32,
        witness: Factorization,
    },
    Unknown {
        partial: Factorization,
        #[serde(with = "crate::decimal::big")]
        cofactor: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormOutcome {
    #[serde(flatten)]
    pub status: NormStatus,
    pub work_spent: u64,
}

impl NormOutcome {
    pub fn solution(&self) -> Option<&EisensteinInt> {
        match &self.status {
            NormStatus::Solved { w } => Some(w),
            _ => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self.status, NormStatus::Solved { .. })
    }

    pub fn is_unsolvable(&self) -> bool {
        matches!(self.status, NormStatus::Unsolvable { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.status, NormStatus::Unknown { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceReason {
    PrimeCofactor,
    SmallCofactor,
    PowerOfThree,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceClass {
    pub easy: bool,
    pub reason: InstanceReason,
}

/// Tunable limits for [`classify_with`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Cofactors strictly below this are easy.
    pub small_cofactor: u64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds { small_cofactor: 1_000_000 }
    }
}

pub fn classify(n: &BigInt) -> InstanceClass {
    classify_with(n, &ClassifyThresholds::default())
}

/// Writes `n = 3^a·m` and calls the instance easy when `m` is 1, small or prime.
pub fn classify_with(n: &BigInt, t: &ClassifyThresholds) -> InstanceClass {
    if n.is_zero() {
        return InstanceClass { easy: true, reason: InstanceReason::SmallCofactor };
    }
    let mut m = n.abs();
    while (&m % 3u32).is_zero() {
        m /= 3u32;
    }
    let (easy, reason) = if m.is_one() {
        (true, InstanceReason::PowerOfThree)
    } else if m < BigInt::from(t.small_cofactor) {
        (true, InstanceReason::SmallCofactor)
    } else if is_prime(&m) {
        (true, InstanceReason::PrimeCofactor)
    } else {
        (false, InstanceReason::Other)
    };
    InstanceClass { easy, reason }
}

/// Solves `N(w) = n`, spending at most `budget` on factoring.
pub fn solve(n: &BigInt, budget: &mut Budget, seed: u64) -> Result<NormOutcome, NormError> {
    if n.is_negative() {
        return Err(NormError::Negative(n.clone()));
    }
    let start = budget.spent;
    let status = solve_status(n, budget, seed);
    Ok(NormOutcome { status, work_spent: budget.spent - start })
}

fn solve_status(n: &BigInt, budget: &mut Budget, seed: u64) -> NormStatus {
    if n.is_zero() {
        return NormStatus::Solved { w: EisensteinInt::from_int(0) };
    }
    let fac = match factor(n, budget, seed).expect("n is positive") {
        FactorOutcome::Complete(f) => f,
        FactorOutcome::Unknown { partial, cofactor } => {
            // A known inert prime with odd exponent that cannot reappear in the
            // cofactor already settles the question.
            for (p, e) in &partial.factors {
                if e % 2 == 1 && (p % 3u32).to_u8() == Some(2) && !(&cofactor % p).is_zero() {
                    return NormStatus::Unsolvable { prime: p.clone(), exponent: *e, witness: partial.clone() };
                }
            }
            return NormStatus::Unknown { partial, cofactor };
        }
    };
    for (p, e) in &fac.factors {
        if e % 2 == 1 && (p % 3u32).to_u8() == Some(2) {
            return NormStatus::Unsolvable { prime: p.clone(), exponent: *e, witness: fac.clone() };
        }
    }
    let mut w = EisensteinInt::from_int(1);
    for (p, e) in &fac.factors {
        let part = match (p % 3u32).to_u8().expect("small") {
            0 => EisensteinInt::sqrt_minus3().pow(*e),
            1 => split_prime(p).pow(*e),
            _ => EisensteinInt::from_int(num_traits::pow(p.clone(), (*e / 2) as usize)),
        };
        w = &w * &part;
    }
    let w = w.canonical_associate();
    debug_assert_eq!(&w.norm(), n);
    NormStatus::Solved { w }
}

/// A prime element of norm `p` for a rational prime `p ≡ 1 (mod 3)`.
fn split_prime(p: &BigInt) -> EisensteinInt {
    let x = sqrt_mod(&BigInt::from(-3), p)
        .expect("p is an odd prime")
        .expect("-3 is a square mod p ≡ 1 (mod 3)");
    let pi = gcd(&EisensteinInt::from_int(p.clone()), &(&EisensteinInt::from_int(x) - &EisensteinInt::sqrt_minus3()))
        .expect("p is nonzero");
    debug_assert_eq!(&pi.norm(), p);
    pi
}

pub fn pow3(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(3), k as usize)
}

/// Residual `3^k - N(u) - N(v)`, which must be nonnegative.
pub fn residual(u: &EisensteinInt, v: &EisensteinInt, k: u32) -> Result<BigInt, NormError> {
    let sum = u.norm() + v.norm();
    let r = pow3(k) - &sum;
    if r.is_negative() {
        return Err(NormError::OutsideBall { sum, k });
    }
    Ok(r)
}

/// Whether `(u, v)` completes to an exact state at level `k`.
pub fn k_feasible(
    u: &EisensteinInt,
    v: &EisensteinInt,
    k: u32,
    budget: &mut Budget,
    seed: u64,
) -> Result<NormOutcome, NormError> {
    let r = residual(u, v, k)?;
    solve(&r, budget, seed)
}

/// Brute-force oracle:
/// `n` is a norm iff some `(a, b)` with `a² - ab + b² = n` exists.
pub fn is_norm_brute_force(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    // a² - ab + b² = ((2a - b)² + 3b²)/4, so |b| ≤ 2√(n/3).
    let bmax = (2.0 * (n as f64 / 3.0).sqrt()).ceil() as i64 + 1;
    for b in -bmax..=bmax {
        let rest = 4 * n as i64 - 3 * b * b;
        if rest < 0 {
            continue;
        }
        let s = (rest as f64).sqrt().round() as i64;
        for t in [s - 1, s, s + 1] {
            if t >= 0 && t * t == rest && (t + b).is_even() {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::DEFAULT_FACTOR_SEED;
    use proptest::prelude::*;

    fn solve_n(n: u64) -> NormOutcome {
        solve(&BigInt::from(n), &mut Budget::default(), DEFAULT_FACTOR_SEED).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(solve_n(0).solution(), Some(&EisensteinInt::from_int(0)));
        assert_eq!(solve_n(1).solution(), Some(&EisensteinInt::from_int(1)));
        let w = solve_n(7).solution().cloned().unwrap();
        assert_eq!(w.norm(), BigInt::from(7));
        assert_eq!(w, EisensteinInt::new(3, 1));
        assert!(solve_n(2).is_unsolvable());
        match solve_n(6).status {
            NormStatus::Unsolvable { prime, exponent, .. } => {
                assert_eq!(prime, BigInt::from(2));
                assert_eq!(exponent, 1);
            }
            s => panic!("{s:?}"),
        }
        assert_eq!(solve_n(4).solution().unwrap().norm(), BigInt::from(4));
        assert_eq!(solve_n(27).solution().unwrap().norm(), BigInt::from(27));
    }

    #[test]
    fn agrees_with_brute_force() {
        for n in 0..=2000u64 {
            assert_eq!(solve_n(n).is_solved(), is_norm_brute_force(n), "{n}");
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&pow3(5)), InstanceClass { easy: true, reason: InstanceReason::PowerOfThree });
        let p = BigInt::from(1_099_511_627_791u64); // 40-bit prime
        assert!(is_prime(&p));
        assert_eq!(classify(&(&p * 3)).reason, InstanceReason::PrimeCofactor);
        let q1 = (BigInt::one() << 79u32) + 23; // 80-bit primes
        let q2 = (BigInt::one() << 79u32) + 29;
        assert!(is_prime(&q1) && is_prime(&q2));
        assert_eq!(classify(&(q1 * q2)), InstanceClass { easy: false, reason: InstanceReason::Other });
        assert_eq!(classify(&BigInt::from(2 * 5 * 7 * 11)).reason, InstanceReason::SmallCofactor);
        assert!(classify(&BigInt::zero()).easy);
        let strict = ClassifyThresholds { small_cofactor: 10 };
        assert!(!classify_with(&BigInt::from(35), &strict).easy);
    }

    #[test]
    fn easy_instances_never_unknown() {
        let p = BigInt::from(1_099_511_627_791u64);
        let out = solve(&(&p * 27), &mut Budget::new(10_000), 3).unwrap();
        assert!(!out.is_unknown());
    }

    #[test]
    fn k_feasible_examples() {
        let one = EisensteinInt::from_int(1);
        let zero = EisensteinInt::from_int(0);
        let out = k_feasible(&one, &one, 1, &mut Budget::default(), 0).unwrap();
        assert_eq!(out.solution(), Some(&one));
        assert!(k_feasible(&one, &zero, 1, &mut Budget::default(), 0).unwrap().is_unsolvable());
        let two = EisensteinInt::from_int(2);
        assert!(matches!(
            k_feasible(&two, &zero, 1, &mut Budget::default(), 0),
            Err(NormError::OutsideBall { .. })
        ));
    }

    #[test]
    fn unsolvable_before_factoring_completes() {
        // 2 · (product of two 60-bit primes): the factor 2 settles it.
        let p = (BigInt::one() << 61u32) - 1;
        let q: BigInt = "1152921504606847009".parse().unwrap();
        assert!(is_prime(&q));
        let out = solve(&(p * q * 2), &mut Budget::new(100), 0).unwrap();
        assert!(out.is_unsolvable());
    }

    proptest! {
        #[test]
        fn roundtrip(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            let w = EisensteinInt::new(a, b);
            let n = w.norm();
            let out = solve(&n, &mut Budget::default(), DEFAULT_FACTOR_SEED).unwrap();
            prop_assert_eq!(out.solution().map(|x| x.norm()), Some(n));
        }
    }
}
