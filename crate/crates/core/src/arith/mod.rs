//! Exact integers and rationals, primality, bounded-effort factoring and
//! arithmetic in `Z/p^k`.

mod factor;
mod primes;
mod residue;

use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

pub use factor::{factor, CofactorStatus, FactorBudget, FactoredInteger};
pub use primes::{
    is_prime, is_prime_u64, jacobi, next_prime_u64, prime_count, prime_sieve, PrimeIter,
};
pub use residue::{
    modinv, modpow, modpow_u64, mulmod_u64, BigRing, ResidueElement, ResidueRing, SmallRing,
};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;

/// Reduced rational with positive denominator.
pub type Rational = num_rational::BigRational;

/// A p-adic valuation; zero has valuation `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl core::ops::Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// Largest `e` with `p^e | n`, and `n / p^e`. `n` must be nonzero.
pub fn split_prime_power(n: &BigUint, p: u64) -> (u64, BigUint) {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut e = 0u64;
    let mut m = n.clone();
    // Strip p^(2^j) chunks first so huge valuations are cheap.
    let mut powers = alloc::vec![pb.clone()];
    loop {
        let last = powers.last().unwrap();
        let sq = last * last;
        if sq.bits() > m.bits() {
            break;
        }
        powers.push(sq);
    }
    for (j, pw) in powers.iter().enumerate().rev() {
        loop {
            let (q, r) = m.div_rem(pw);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1u64 << j;
        }
    }
    (e, m)
}

/// `ord_p` of a nonzero integer.
pub fn integer_valuation(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(split_prime_power(n.magnitude(), p).0 as i64)
}

/// `ord_p(x) = ord_p(numerator) - ord_p(denominator)`; `+inf` for zero.
pub fn padic_valuation(x: &Rational, p: u64) -> Result<Valuation> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(alloc::format!("{p}")));
    }
    Ok(padic_valuation_unchecked(x, p))
}

pub(crate) fn padic_valuation_unchecked(x: &Rational, p: u64) -> Valuation {
    if x.numer().is_zero() {
        return Valuation::Infinite;
    }
    let num = split_prime_power(x.numer().magnitude(), p).0 as i64;
    let den = split_prime_power(x.denom().magnitude(), p).0 as i64;
    Valuation::Finite(num - den)
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return libm::log(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    libm::log(top) + (shift as f64) * core::f64::consts::LN_2
}

/// Nearest f64 to a rational, robust for huge numerators and denominators.
pub fn rational_to_f64(x: &Rational) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Scale so both fit comfortably in f64 range before dividing.
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let nf = (n.magnitude() >> shift_n as u64).to_f64().unwrap();
    let df = (d.magnitude() >> shift_d as u64).to_f64().unwrap();
    let mag = nf / df * libm::exp2((shift_n - shift_d) as f64);
    if n.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// Reduce a p-integral rational into `Z/m` (denominator must be a unit mod m).
pub(crate) fn rational_mod(x: &Rational, m: &BigUint) -> Option<BigUint> {
    let mi = BigInt::from(m.clone());
    let num = x.numer().mod_floor(&mi);
    let den = x.denom().mod_floor(&mi);
    let inv = modinv(&den.to_biguint().unwrap(), m)?;
    Some((num.to_biguint().unwrap() * inv) % m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&q(50, 1), 5).unwrap(), Valuation::Finite(2));
        assert_eq!(padic_valuation(&q(0, 1), 7).unwrap(), Valuation::Infinite);
        assert_eq!(padic_valuation(&q(129, 100), 5).unwrap(), Valuation::Finite(-2));
        assert!(matches!(padic_valuation(&q(3, 1), 4), Err(Error::NotPrime(_))));
    }

    #[test]
    fn split_large_power() {
        let n = BigUint::from(3u32).pow(1000) * BigUint::from(7u32);
        let (e, rest) = split_prime_power(&n, 3);
        assert_eq!(e, 1000);
        assert_eq!(rest, BigUint::from(7u32));
    }

    #[test]
    fn ln_and_f64_conversions() {
        let big = BigUint::from(10u32).pow(400);
        assert!((ln_biguint(&big) - 400.0 * libm::log(10.0)).abs() < 1e-9);
        let r = Rational::new(BigInt::from(10u32).pow(500) * 3, BigInt::from(10u32).pow(500) * 4);
        assert!((rational_to_f64(&r) - 0.75).abs() < 1e-15);
        assert!((rational_to_f64(&q(-129, 100)) + 1.29).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in -10_000i64..10_000, b in 1i64..10_000,
                                 c in -10_000i64..10_000, d in 1i64..10_000,
                                 pi in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let x = q(a, b);
            let y = q(c, d);
            let lhs = padic_valuation(&(&x * &y), p).unwrap();
            let rhs = padic_valuation(&x, p).unwrap() + padic_valuation(&y, p).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
