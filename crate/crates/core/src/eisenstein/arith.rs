use std::sync::OnceLock;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EisensteinError;

pub const DEFAULT_FACTOR_SEED: u64 = 0x5eed_3a1f;

const TRIAL_LIMIT: u32 = 10_000;
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const EXTRA_MR_ROUNDS: usize = 16;

/// Work counter for factoring: one unit per Pollard-rho iteration and per
/// Miller-Rabin round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub limit: u64,
    pub spent: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(10_000_000)
    }
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, spent: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.spent)
    }

    pub fn exhausted(&self) -> bool {
        self.spent >= self.limit
    }

    /// Returns false once the limit is reached.
    fn charge(&mut self, units: u64) -> bool {
        self.spent = self.spent.saturating_add(units);
        self.spent <= self.limit
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    /// Primes in increasing order with positive exponents.
    #[serde(with = "crate::decimal::powers")]
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    fn insert(&mut self, p: BigInt, e: u32) {
        match self.factors.binary_search_by(|(q, _)| q.cmp(&p)) {
            Ok(i) => self.factors[i].1 += e,
            Err(i) => self.factors.insert(i, (p, e)),
        }
    }

    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    /// Residue of each prime mod 3, in the same order as `factors`.
    pub fn residues_mod3(&self) -> Vec<u8> {
        self.factors
            .iter()
            .map(|(p, _)| (p % 3u32).to_u8().expect("small"))
            .collect()
    }

    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorOutcome {
    Complete(Factorization),
    /// Budget ran out; `cofactor` is the unresolved composite part.
    Unknown {
        partial: Factorization,
        #[serde(with = "crate::decimal::big")]
        cofactor: BigInt,
    },
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

/// Miller-Rabin. Deterministic below 3.3·10²⁴, probabilistic (with a fixed
/// seed) above.
pub fn is_prime(n: &BigInt) -> bool {
    is_prime_budgeted(n, &mut Budget::unlimited())
}

fn is_prime_budgeted(n: &BigInt, budget: &mut Budget) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small, budget);
    }
    for &p in &small_primes()[..25] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> s;
    let witness = |a: &BigInt, budget: &mut Budget| -> bool {
        budget.charge(1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };
    for &a in &MR_BASES {
        if witness(&BigInt::from(a), budget) {
            return false;
        }
    }
    let deterministic_bound: BigInt = "3317044064679887385961981".parse().expect("literal");
    if n < &deterministic_bound {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d69_6c6c_6572);
    let two = BigInt::from(2);
    for _ in 0..EXTRA_MR_ROUNDS {
        let a = rng.gen_bigint_range(&two, &n_minus_1);
        if witness(&a, budget) {
            return false;
        }
    }
    true
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64, budget: &mut Budget) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        let p = p as u64;
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        budget.charge(1);
        let mut x = powmod(a as u64, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho on machine words. `None` on failure or when
/// the budget runs out.
fn brent_u64(n: u64, rng: &mut ChaCha8Rng, budget: &mut Budget) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let c = rng.gen_range(1..n);
    let f = |x: u64| ((mulmod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let mut y = rng.gen_range(0..n);
    let m = 128u64;
    let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        if !budget.charge(r) {
            return None;
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            if !budget.charge(steps) {
                return None;
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            if !budget.charge(1) {
                return None;
            }
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigInt, rng: &mut ChaCha8Rng, budget: &mut Budget) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let c = rng.gen_bigint_range(&BigInt::one(), n);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = rng.gen_bigint_range(&BigInt::zero(), n);
    let m = 128u64;
    let (mut g, mut r, mut q) = (BigInt::one(), 1u64, BigInt::one());
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        if !budget.charge(r) {
            return None;
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * (&x - &y).abs() % n;
            }
            if !budget.charge(steps) {
                return None;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            if !budget.charge(1) {
                return None;
            }
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Nontrivial divisor of a composite `n`, retrying with fresh constants until
/// the budget runs out.
fn find_divisor(n: &BigInt, rng: &mut ChaCha8Rng, budget: &mut Budget) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        return Some(r);
    }
    while !budget.exhausted() {
        let d = match n.to_u64() {
            Some(small) => brent_u64(small, rng, budget).map(BigInt::from),
            None => brent_big(n, rng, budget),
        };
        if let Some(d) = d {
            if !d.is_one() && &d != n {
                return Some(d);
            }
        }
    }
    None
}

/// Factorization of `n >= 1`: trial division to 10⁴, then Pollard-Brent.
pub fn factor(n: &BigInt, budget: &mut Budget, seed: u64) -> Result<FactorOutcome, EisensteinError> {
    if n.sign() != Sign::Plus {
        return Err(EisensteinError::NonPositive(n.clone()));
    }
    let mut out = Factorization::default();
    let mut m = n.clone();
    for &p in small_primes() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        while (&m % p).is_zero() {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.insert(pb, e);
        }
    }
    if m.is_one() {
        return Ok(FactorOutcome::Complete(out));
    }
    if m < BigInt::from(TRIAL_LIMIT as u64 * TRIAL_LIMIT as u64) {
        out.insert(m, 1);
        return Ok(FactorOutcome::Complete(out));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime_budgeted(&c, budget) {
            out.insert(c, 1);
            continue;
        }
        match find_divisor(&c, &mut rng, budget) {
            Some(d) => {
                let other = &c / &d;
                stack.push(d);
                stack.push(other);
            }
            None => {
                let cofactor = stack.iter().fold(c, |acc, x| acc * x);
                return Ok(FactorOutcome::Unknown { partial: out, cofactor });
            }
        }
    }
    Ok(FactorOutcome::Complete(out))
}

/// Tonelli-Shanks: `x` with x² ≡ a (mod p), the smaller of the two roots.
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Result<Option<BigInt>, EisensteinError> {
    if p.is_even() || !is_prime(p) {
        return Err(EisensteinError::NotPrime(p.clone()));
    }
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Ok(Some(BigInt::zero()));
    }
    let pm1: BigInt = p - 1;
    let half = &pm1 >> 1u32;
    if a.modpow(&half, p) != BigInt::one() {
        return Ok(None);
    }
    let s = pm1.trailing_zeros().expect("p > 1");
    let q = &pm1 >> s;
    let mut z = BigInt::from(2);
    while z.modpow(&half, p) != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) >> 1u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * b % p;
    }
    let other = p - &r;
    Ok(Some(r.min(other)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigInt {
        BigInt::from(n)
    }

    fn complete(n: &BigInt) -> Factorization {
        match factor(n, &mut Budget::default(), DEFAULT_FACTOR_SEED).unwrap() {
            FactorOutcome::Complete(f) => f,
            other => panic!("incomplete: {other:?}"),
        }
    }

    #[test]
    fn primality_table_below_one_million() {
        let n = 1_000_000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(&big(i as u64)), p, "{i}");
        }
    }

    #[test]
    fn primality_large() {
        let m61 = (BigInt::one() << 61u32) - 1;
        assert!(is_prime(&m61));
        let m127 = (BigInt::one() << 127u32) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m61 * &m127)));
        // strong pseudoprime to bases 2..37
        let psp: BigInt = "318665857834031151167461".parse().unwrap();
        assert!(!is_prime(&psp));
    }

    #[test]
    fn factor_small() {
        let f = complete(&big(12));
        assert_eq!(f.factors, vec![(big(2), 2), (big(3), 1)]);
        assert_eq!(complete(&big(1)).factors, vec![]);
        assert!(factor(&BigInt::zero(), &mut Budget::default(), 0).is_err());
    }

    #[test]
    fn factor_semiprime_of_32_bit_primes() {
        let p = big(4_294_967_291);
        let q = big(4_294_967_279);
        let f = complete(&(&p * &q));
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn factor_big_semiprime() {
        let p = big(1_000_000_007);
        let q = big(998_244_353);
        let n = &p * &q * 9 * &p;
        let f = complete(&n);
        assert_eq!(f.product(), n);
        assert_eq!(f.exponent_of(&p), 2);
        assert_eq!(f.exponent_of(&big(3)), 2);
    }

    #[test]
    fn factor_exhausts_budget() {
        let p: BigInt = "1000000000000000003".parse().unwrap();
        let q: BigInt = "1000000000000000009".parse().unwrap();
        match factor(&(&p * &q * 5), &mut Budget::new(50), 1).unwrap() {
            FactorOutcome::Unknown { partial, cofactor } => {
                assert_eq!(partial.factors, vec![(big(5), 1)]);
                assert_eq!(cofactor, p * q);
            }
            other => panic!("expected Unknown, got {other:?}"),
        }
    }

    #[test]
    fn table_row_residual_factors() {
        let three30 = num_traits::pow(big(3), 30);
        let nu = super::super::EisensteinInt::new(-7531010 + 4, 4006784).norm();
        let nv = super::super::EisensteinInt::new(11537794 + 4, 4006784).norm();
        let f = complete(&(three30 - nu - nv));
        for ((p, e), r) in f.factors.iter().zip(f.residues_mod3()) {
            if r == 2 {
                assert!(e % 2 == 0, "{p}^{e}");
            }
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        let r = sqrt_mod(&big(4), &big(7)).unwrap().unwrap();
        assert_eq!(r, big(2));
        let r = sqrt_mod(&BigInt::from(-3), &big(7)).unwrap().unwrap();
        assert!(r == big(2) || r == big(5));
        assert_eq!(sqrt_mod(&BigInt::zero(), &big(13)).unwrap(), Some(BigInt::zero()));
        assert!(sqrt_mod(&big(1), &big(9)).is_err());
        for q in [5u64, 11, 17, 23, 29, 41, 47, 53, 59, 71, 83, 89] {
            assert_eq!(sqrt_mod(&BigInt::from(-3), &big(q)).unwrap(), None, "{q}");
        }
        // p ≡ 1 mod 8 exercises the Tonelli-Shanks loop
        let p = big(7681);
        for a in 1..200u64 {
            if let Some(x) = sqrt_mod(&big(a), &p).unwrap() {
                assert_eq!((&x * &x) % &p, big(a) % &p);
            }
        }
    }
}
