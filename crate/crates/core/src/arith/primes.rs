use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::residue::{modpow_u64, mulmod_u64};
use super::Integer;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin; the fixed base set is exact for all `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = modpow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary integers: exact below `2^64`, Baillie-PSW above
/// (no known counterexample, but not a proof).
pub fn is_prime(n: &Integer) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    for p in prime_sieve(1000) {
        if (n % p).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, 2) && strong_lucas_probable_prime(n)
}

fn strong_probable_prime(n: &BigUint, base: u64) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigUint::from(base).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    assert!(n.is_odd(), "jacobi symbol needs odd modulus");
    let nn = BigInt::from(n.clone());
    let mut a = a.mod_floor(&nn).to_biguint().unwrap();
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n_mod8 == 3 || n_mod8 == 5) {
            result = -result;
        }
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            result = -result;
        }
        core::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas test with Selfridge parameters (method A).
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d = 5i64;
    loop {
        let j = jacobi(&BigInt::from(d), n);
        if j == -1 {
            break;
        }
        if j == 0 && BigUint::from(d.unsigned_abs()) != *n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let nn = BigInt::from(n.clone());
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);
    let dd = BigInt::from(d);
    let half = |x: BigInt| -> BigInt {
        let x = x.mod_floor(&nn);
        if x.is_odd() {
            (x + &nn) >> 1
        } else {
            x >> 1
        }
    };

    let np1 = n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(&nn);
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(&nn);
        v = (&v * &v - &qk - &qk).mod_floor(&nn);
        qk = (&qk * &qk).mod_floor(&nn);
        if k.bit(i) {
            let nu = half(&p * &u + &v);
            let nv = half(&dd * &u + &p * &v);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(&nn);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk - &qk).mod_floor(&nn);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&nn);
    }
    false
}

/// All primes `<= limit`, ascending.
pub fn prime_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // Index i stands for the odd number 2i+1.
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(limit / 10 + 4);
    out.push(2);
    for (i, &c) in composite.iter().enumerate().skip(1) {
        let n = 2 * i + 1;
        if n > limit {
            break;
        }
        if !c {
            out.push(n as u64);
        }
    }
    out
}

/// `pi(x)`.
pub fn prime_count(x: u64) -> usize {
    prime_sieve(x).len()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_u64(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

/// Unbounded ascending iterator over primes, starting after `start`.
#[derive(Debug, Clone)]
pub struct PrimeIter {
    current: u64,
}

impl PrimeIter {
    pub fn after(start: u64) -> Self {
        PrimeIter { current: start }
    }
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        self.current = next_prime_u64(self.current);
        Some(self.current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_examples() {
        assert!(!is_prime(&Integer::from(1)));
        assert!(is_prime(&Integer::from(2)));
        assert!(trial_division(6469));
        assert!(is_prime(&Integer::from(6469)));
        assert!(!is_prime(&Integer::from(-7)));
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(prime_sieve(10), vec![2, 3, 5, 7]);
        assert_eq!(prime_sieve(2), vec![2]);
        assert_eq!(prime_sieve(1), Vec::<u64>::new());
        assert_eq!(prime_count(1_000_000), 78498);
    }

    #[test]
    fn sieve_agrees_with_is_prime() {
        let sieve = prime_sieve(1_000_000);
        let mut it = sieve.iter().peekable();
        for n in 0..=1_000_000u64 {
            let in_sieve = it.peek() == Some(&&n);
            if in_sieve {
                it.next();
            }
            assert_eq!(in_sieve, is_prime_u64(n), "n = {n}");
        }
    }

    #[test]
    fn large_primes_and_pseudoprimes() {
        // 2^127 - 1 is prime; 2^128 + 1 is not.
        let m127 = (BigInt::one() << 127u32) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&((BigInt::one() << 128u32) + 1)));
        // Product of two 64-bit primes.
        let p = BigInt::from(18446744073709551557u64);
        let q = BigInt::from(18446744073709551533u64);
        assert!(is_prime(&p) && is_prime(&q));
        assert!(!is_prime(&(&p * &q)));
        // Strong pseudoprime to base 2 (2047 = 23 * 89) and a Carmichael number.
        assert!(!is_prime_u64(2047));
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(3215031751));
    }

    #[test]
    fn lucas_alone_rejects_composites() {
        for n in (1001u64..20001).step_by(2) {
            let big = BigUint::from(n);
            let root = big.sqrt();
            if &root * &root == big {
                continue;
            }
            if strong_lucas_probable_prime(&big) {
                // Strong Lucas pseudoprimes below 20000: 5459, 5777, 10877, 16109, 18971.
                assert!(
                    is_prime_u64(n) || [5459, 5777, 10877, 16109, 18971].contains(&n),
                    "unexpected lucas pseudoprime {n}"
                );
            } else {
                assert!(!is_prime_u64(n), "lucas rejected prime {n}");
            }
        }
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for &p in &[3u64, 5, 7, 11, 13, 101] {
            for a in 0..p {
                let e = modpow_u64(a, (p - 1) / 2, p);
                let expect = if a == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi(&BigInt::from(a), &BigUint::from(p)), expect);
            }
        }
    }
}
