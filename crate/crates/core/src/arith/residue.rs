//! Arithmetic in `Z/p^k`.

use core::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::{split_prime_power, Integer, Rational};

/// `a * b mod m` without overflow.
#[inline]
pub fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn modpow_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, b, m);
        }
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// `b^e mod m` for `m >= 2`, `e >= 0`; the result lies in `[0, m)`.
pub fn modpow(b: &Integer, e: &BigUint, m: &BigUint) -> BigUint {
    let mi = BigInt::from(m.clone());
    let base = b.mod_floor(&mi).to_biguint().unwrap();
    base.modpow(e, m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn modinv(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let mi = BigInt::from(m.clone());
    let ai = BigInt::from(a.clone()).mod_floor(&mi);
    let eg = ai.extended_gcd(&mi);
    if !eg.gcd.is_one() {
        return None;
    }
    Some(eg.x.mod_floor(&mi).to_biguint().unwrap())
}

/// A residue ring `Z/p^k` with `p` prime and `k >= 1`.
pub trait ResidueRing: Clone + Debug {
    type Elem: Clone + Debug + PartialEq;

    fn prime(&self) -> u64;
    fn precision(&self) -> u32;
    fn modulus(&self) -> BigUint;

    fn zero(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_integer(&self, v: &Integer) -> Self::Elem;
    /// Reduce a p-integral rational; `None` if `p` divides the denominator.
    fn from_rational(&self, v: &Rational) -> Option<Self::Elem>;
    fn to_biguint(&self, v: &Self::Elem) -> BigUint;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `ord_p(a)` if `a != 0` in the ring; `None` means `a ≡ 0 (mod p^k)`.
    fn valuation(&self, a: &Self::Elem) -> Option<u32>;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == Some(0)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn mul_small(&self, a: &Self::Elem, c: i64) -> Self::Elem {
        self.mul(a, &self.from_i64(c))
    }
}

/// `Z/p^k` with `p^k < 2^63`, backed by machine words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallRing {
    p: u64,
    k: u32,
    m: u64,
}

impl SmallRing {
    /// `None` if `p^k` does not fit.
    pub fn new(p: u64, k: u32) -> Option<Self> {
        assert!(k >= 1);
        let mut m: u64 = 1;
        for _ in 0..k {
            m = m.checked_mul(p)?;
        }
        if m >= 1 << 63 {
            return None;
        }
        Some(SmallRing { p, k, m })
    }

    pub fn modulus_u64(&self) -> u64 {
        self.m
    }
}

impl ResidueRing for SmallRing {
    type Elem = u64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.k
    }
    fn modulus(&self) -> BigUint {
        BigUint::from(self.m)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.m as i128) as u64
    }
    fn from_integer(&self, v: &Integer) -> u64 {
        v.mod_floor(&BigInt::from(self.m)).to_u64().unwrap()
    }
    fn from_rational(&self, v: &Rational) -> Option<u64> {
        super::rational_mod(v, &self.modulus()).map(|r| r.to_u64().unwrap())
    }
    fn to_biguint(&self, v: &u64) -> BigUint {
        BigUint::from(*v)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod_u64(*a, *b, self.m)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn valuation(&self, a: &u64) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = *a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }
    fn is_unit(&self, a: &u64) -> bool {
        a % self.p != 0
    }
}

/// `Z/p^k` for arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigRing {
    p: u64,
    k: u32,
    m: BigUint,
}

impl BigRing {
    pub fn new(p: u64, k: u32) -> Self {
        assert!(k >= 1);
        BigRing {
            p,
            k,
            m: BigUint::from(p).pow(k),
        }
    }
}

impl ResidueRing for BigRing {
    type Elem = BigUint;

    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.k
    }
    fn modulus(&self) -> BigUint {
        self.m.clone()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn from_i64(&self, v: i64) -> BigUint {
        self.from_integer(&BigInt::from(v))
    }
    fn from_integer(&self, v: &Integer) -> BigUint {
        v.mod_floor(&BigInt::from(self.m.clone())).to_biguint().unwrap()
    }
    fn from_rational(&self, v: &Rational) -> Option<BigUint> {
        super::rational_mod(v, &self.m)
    }
    fn to_biguint(&self, v: &BigUint) -> BigUint {
        v.clone()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.m - b
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.m
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn valuation(&self, a: &BigUint) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        Some(split_prime_power(a, self.p).0 as u32)
    }
    fn is_unit(&self, a: &BigUint) -> bool {
        !(a % self.p).is_zero()
    }
}

/// An element of `Z/m`, `0 <= value < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    modulus: BigUint,
    value: BigUint,
}

impl ResidueElement {
    pub fn new(value: &Integer, modulus: BigUint) -> Self {
        assert!(modulus > BigUint::one());
        let value = value
            .mod_floor(&BigInt::from(modulus.clone()))
            .to_biguint()
            .unwrap();
        ResidueElement { modulus, value }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modpow_examples() {
        let m = |b: i64, e: u32, m: u32| {
            modpow(&BigInt::from(b), &BigUint::from(e), &BigUint::from(m))
        };
        assert_eq!(m(7, 6, 19), BigUint::from(1u32));
        assert_eq!(m(7, 4, 13), BigUint::from(9u32));
        assert_eq!(m(12345, 0, 97), BigUint::from(1u32));
        assert_eq!(m(-2, 3, 11), BigUint::from(3u32));
        // direct multiplication oracle
        let mut acc = 1u64;
        for _ in 0..6 {
            acc = acc * 7 % 19;
        }
        assert_eq!(acc, 1);
    }

    #[test]
    fn small_and_big_rings_agree() {
        let s = SmallRing::new(7, 9).unwrap();
        let b = BigRing::new(7, 9);
        for (x, y) in [(3i64, -5i64), (7 * 7 * 2, 49), (-1, -1), (40_353_606, 12)] {
            let (sx, sy) = (s.from_i64(x), s.from_i64(y));
            let (bx, by) = (b.from_i64(x), b.from_i64(y));
            assert_eq!(s.to_biguint(&s.mul(&sx, &sy)), b.mul(&bx, &by));
            assert_eq!(s.to_biguint(&s.sub(&sx, &sy)), b.sub(&bx, &by));
            assert_eq!(s.valuation(&sx), b.valuation(&bx));
        }
        assert_eq!(s.valuation(&s.from_i64(0)), None);
        assert_eq!(s.valuation(&s.from_i64(98)), Some(2));
        assert!(SmallRing::new(7, 40).is_none());
    }

    #[test]
    fn rational_reduction() {
        let r = SmallRing::new(5, 3).unwrap();
        let x = Rational::new(BigInt::from(1), BigInt::from(3));
        let v = r.from_rational(&x).unwrap();
        assert_eq!(r.mul(&v, &3), 1);
        assert!(r.from_rational(&Rational::new(1.into(), 5.into())).is_none());
    }
}
