//! Cyclic degree-`p` fields inside prime-conductor cyclotomic fields:
//! choosing a conductor where a given prime splits, inertness, the set of
//! primes inert in several such fields, and valuations in real quadratic
//! fields.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use crate::arith::{integer_valuation, is_prime_u64, modpow_u64, mulmod_u64, prime_sieve, Valuation};
use crate::{Error, Result};

/// Largest conductor `find_conductor` will try.
pub const CONDUCTOR_SCAN_CAP: u64 = 10_000_000;

/// The degree-`p` subfield of the `ell`-th cyclotomic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicFieldSpec {
    pub degree: u64,
    pub conductor: u64,
}

impl CyclicFieldSpec {
    pub fn new(degree: u64, conductor: u64) -> Result<Self> {
        if degree < 3 || !is_prime_u64(degree) {
            return Err(Error::InvalidArgument(alloc::format!("degree {degree} must be an odd prime")));
        }
        if !is_prime_u64(conductor) || conductor % degree != 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "conductor {conductor} must be a prime = 1 mod {degree}"
            )));
        }
        Ok(CyclicFieldSpec { degree, conductor })
    }
}

/// Smallest prime `ell = 1 mod p`, `ell != q`, such that `q` splits
/// completely in the degree-`p` subfield, i.e. `q` is a `p`-th power mod `ell`.
pub fn find_conductor(p: u64, q: u64) -> Result<u64> {
    if p < 3 || !is_prime_u64(p) {
        return Err(Error::InvalidArgument(alloc::format!("degree {p} must be an odd prime")));
    }
    if !is_prime_u64(q) {
        return Err(Error::NotPrime(alloc::format!("{q}")));
    }
    let mut ell = p + 1;
    while ell <= CONDUCTOR_SCAN_CAP {
        if ell != q && is_prime_u64(ell) && modpow_u64(q % ell, (ell - 1) / p, ell) == 1 {
            return Ok(ell);
        }
        ell += p;
    }
    Err(Error::BudgetExceeded {
        what: "conductor scan",
        cap: CONDUCTOR_SCAN_CAP,
    })
}

/// Frobenius at `r` generates the order-`p` Galois group exactly when `r` is
/// not a `p`-th power mod `ell`.
pub fn is_inert(r: u64, spec: &CyclicFieldSpec) -> Result<bool> {
    if r == spec.conductor {
        return Err(Error::Ramified {
            prime: r,
            degree: spec.degree,
            conductor: spec.conductor,
        });
    }
    Ok(modpow_u64(r % spec.conductor, (spec.conductor - 1) / spec.degree, spec.conductor) != 1)
}

/// `{p_Q}` together with the primes up to `bound` inert in every field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WQSet {
    pub specs: Vec<CyclicFieldSpec>,
    pub p_q: u64,
    pub bound: u64,
    pub members: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub primes: usize,
    pub inert: usize,
    /// `inert / primes`.
    pub empirical: f64,
    /// `1 - sum 1/p_i`.
    pub union_bound: f64,
    /// `prod (1 - 1/p_i)`.
    pub chebotarev: f64,
}

/// Conductors are found with `p_Q` as the prime required to split.
pub fn build_wq(p_list: &[u64], p_q: u64, bound: u64) -> Result<(WQSet, DensityReport)> {
    let mut specs = Vec::with_capacity(p_list.len());
    for (i, &p) in p_list.iter().enumerate() {
        if p_list[..i].contains(&p) {
            return Err(Error::InvalidArgument(alloc::format!("degree {p} listed twice")));
        }
        specs.push(CyclicFieldSpec::new(p, find_conductor(p, p_q)?)?);
    }
    let primes = prime_sieve(bound);
    let mut members = Vec::new();
    let mut inert = 0;
    for &r in &primes {
        let all_inert = specs
            .iter()
            .all(|s| r != s.conductor && is_inert(r, s).unwrap_or(false));
        if all_inert {
            inert += 1;
        }
        if all_inert || r == p_q {
            members.push(r);
        }
    }
    let report = DensityReport {
        primes: primes.len(),
        inert,
        empirical: if primes.is_empty() { 1.0 } else { inert as f64 / primes.len() as f64 },
        union_bound: 1.0 - p_list.iter().map(|&p| 1.0 / p as f64).sum::<f64>(),
        chebotarev: p_list.iter().map(|&p| 1.0 - 1.0 / p as f64).product(),
    };
    if !members.contains(&p_q) {
        members.push(p_q);
        members.sort_unstable();
    }
    Ok((
        WQSet {
            specs,
            p_q,
            bound,
            members,
        },
        report,
    ))
}

/// Both sides of the minimum-valuation identity in `Q(sqrt d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadValuation {
    /// `min(ord_p u, ord_p v)`.
    pub lhs: Valuation,
    /// `min` over primes `P | p` of `ord_P(u + v sqrt d)`.
    pub rhs: Valuation,
    pub split: bool,
    pub equal: bool,
}

fn squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n % (q * q) == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Square root of a quadratic residue `a` mod an odd prime `p`.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if modpow_u64(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    // Tonelli-Shanks.
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| modpow_u64(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = modpow_u64(z, q, p);
    let mut t = modpow_u64(a, q, p);
    let mut r = modpow_u64(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod_u64(t2, t2, p);
            i += 1;
        }
        let b = modpow_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod_u64(b, b, p);
        t = mulmod_u64(t, c, p);
        r = mulmod_u64(r, b, p);
    }
    Some(r)
}

/// Lift a simple root of `t^2 - d` from mod `p` to mod `p^k`.
fn hensel_sqrt(d: &BigInt, r0: u64, p: u64, k: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(k);
    let mut r = BigInt::from(r0);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = BigInt::from(p).pow(prec);
        // Newton step r -= (r^2 - d) / (2r) mod p^prec.
        let f = (&r * &r - d).mod_floor(&m);
        let inv = modinv_big(&(BigInt::from(2) * &r), &m);
        r = (&r - f * inv).mod_floor(&m);
    }
    r.mod_floor(&modulus)
}

fn modinv_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// `min(ord_p u, ord_p v)` against the minimum over primes above `p` of
/// `ord_P(u + v sqrt d)` in `Z[sqrt d]`.
///
/// Split `p`: the two primes correspond to the roots `+-r` of `t^2 = d` in
/// `Z_p`, and `ord_P(u + v sqrt d) = ord_p(u + v r)`, computed modulo a power
/// of `p` exceeding `ord_p` of the norm. Inert `p`: `P = pO` has residue
/// degree 2, so `ord_P(x) = ord_p(N x) / 2`.
pub fn quadratic_min_valuation(d: i64, u: &BigInt, v: &BigInt, p: u64) -> Result<QuadValuation> {
    if !squarefree(d) || d == 1 || !matches!(d.rem_euclid(4), 2 | 3) {
        return Err(Error::Precondition(alloc::format!(
            "d = {d} must be squarefree and 2 or 3 mod 4"
        )));
    }
    if p == 2 || !is_prime_u64(p) || (d.unsigned_abs() % p == 0) {
        return Err(Error::Precondition(alloc::format!("p = {p} must be an odd prime not dividing d")));
    }
    let lhs = integer_valuation(u, p).min(integer_valuation(v, p));
    let db = BigInt::from(d);
    let norm = u * u - &db * v * v;
    let dp = d.rem_euclid(p as i64) as u64;
    let root = sqrt_mod_prime(dp, p);
    let split = root.is_some();
    let rhs = if u.is_zero() && v.is_zero() {
        Valuation::Infinite
    } else {
        let vn = match integer_valuation(&norm, p) {
            Valuation::Finite(e) => e,
            Valuation::Infinite => unreachable!("d is not a square, so the norm of a nonzero element is nonzero"),
        };
        match root {
            Some(r0) => {
                let k = vn as u32 + 1;
                let m = BigInt::from(p).pow(k);
                let r = hensel_sqrt(&db, r0, p, k);
                let ord = |r: &BigInt| {
                    let x = (u + v * r).mod_floor(&m);
                    match integer_valuation(&x, p) {
                        Valuation::Infinite => vn + 1,
                        Valuation::Finite(e) => e,
                    }
                };
                let neg_r = (-&r).mod_floor(&m);
                Valuation::Finite(ord(&r).min(ord(&neg_r)))
            }
            None => Valuation::Finite(vn / 2),
        }
    };
    Ok(QuadValuation {
        lhs,
        rhs,
        split,
        equal: lhs == rhs,
    })
}

/// `ord_P` at the two primes above a split `p`, for cross-checks.
pub fn split_valuations(d: i64, u: &BigInt, v: &BigInt, p: u64) -> Option<(i64, i64)> {
    let r0 = sqrt_mod_prime(d.rem_euclid(p as i64) as u64, p)?;
    let norm = u * u - BigInt::from(d) * v * v;
    let vn = integer_valuation(&norm, p).finite()?;
    let k = vn as u32 + 1;
    let m = BigInt::from(p).pow(k);
    let r = hensel_sqrt(&BigInt::from(d), r0, p, k);
    let ord = |r: &BigInt| integer_valuation(&(u + v * r).mod_floor(&m), p).finite().unwrap_or(k as i64);
    Some((ord(&r), ord(&(-&r).mod_floor(&m))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductor_examples() {
        assert_eq!(find_conductor(3, 7).unwrap(), 19);
        assert_eq!(find_conductor(3, 2).unwrap(), 31);
        for (p, q) in [(3, 5), (5, 7), (7, 2), (5, 11)] {
            let ell = find_conductor(p, q).unwrap();
            assert_eq!(ell % p, 1);
            let spec = CyclicFieldSpec::new(p, ell).unwrap();
            assert!(!is_inert(q, &spec).unwrap());
        }
        assert!(find_conductor(4, 7).is_err());
    }

    #[test]
    fn inert_examples() {
        let spec = CyclicFieldSpec::new(3, 19).unwrap();
        assert!(!is_inert(7, &spec).unwrap());
        assert!(is_inert(2, &spec).unwrap());
        assert!(matches!(is_inert(19, &spec), Err(Error::Ramified { .. })));
        // Direct cube test: r is a cube mod 19 iff some t has t^3 = r.
        for r in prime_sieve(500).into_iter().filter(|&r| r != 19) {
            let cube = (1..19u64).any(|t| t * t * t % 19 == r % 19);
            assert_eq!(is_inert(r, &spec).unwrap(), !cube, "r = {r}");
        }
    }

    #[test]
    fn wq_examples() {
        let (w, rep) = build_wq(&[], 7, 1000).unwrap();
        assert_eq!(rep.empirical, 1.0);
        assert_eq!(w.members.len(), prime_sieve(1000).len());
        let (w, rep) = build_wq(&[3], 7, 100_000).unwrap();
        assert!(w.members.contains(&7));
        assert!(!w.members.contains(&19));
        assert!((rep.empirical - 2.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn sqrt_and_lift() {
        for p in [3u64, 7, 13, 17, 41, 1_000_003] {
            for a in (1..30u64).filter(|a| a % p != 0) {
                if let Some(r) = sqrt_mod_prime(a, p) {
                    assert_eq!(mulmod_u64(r, r, p), a % p);
                    let lifted = hensel_sqrt(&BigInt::from(a), r, p, 7);
                    let m = BigInt::from(p).pow(7);
                    assert_eq!((&lifted * &lifted - BigInt::from(a)).mod_floor(&m), BigInt::zero());
                }
            }
        }
    }

    #[test]
    fn quadratic_examples() {
        let b = BigInt::from;
        // 3 is not a square mod 5: inert.
        let q = quadratic_min_valuation(3, &b(5), &b(10), 5).unwrap();
        assert!(!q.split && q.equal && q.lhs == Valuation::Finite(1));
        let q = quadratic_min_valuation(2, &b(7), &b(1), 7).unwrap();
        assert!(q.split && q.equal && q.rhs == Valuation::Finite(0));
        let z = quadratic_min_valuation(2, &b(0), &b(0), 7).unwrap();
        assert_eq!((z.lhs, z.rhs), (Valuation::Infinite, Valuation::Infinite));
        assert!(quadratic_min_valuation(5, &b(1), &b(1), 7).is_err());
        assert!(quadratic_min_valuation(3, &b(1), &b(1), 3).is_err());
        // x = 3 + sqrt 2 has norm 7: one prime above 7 sees it, the other not.
        let (a, c) = split_valuations(2, &b(3), &b(1), 7).unwrap();
        assert_eq!((a.min(c), a.max(c)), (0, 1));
    }

    const DS: [i64; 10] = [2, 3, 6, 7, 10, 11, -1, -2, 14, 15];
    const PS: [u64; 8] = [3, 5, 7, 11, 13, 17, 101, 1009];

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(2000))]
        #[test]
        fn min_valuation_identity(
            di in 0usize..10,
            pi in 0usize..8,
            u0 in -100_000i64..100_000,
            v0 in -100_000i64..100_000,
            eu in 0u32..6,
            ev in 0u32..6,
        ) {
            let (d, p) = (DS[di], PS[pi]);
            proptest::prop_assume!(d.unsigned_abs() % p != 0);
            let u = BigInt::from(u0) * BigInt::from(p).pow(eu);
            let v = BigInt::from(v0) * BigInt::from(p).pow(ev);
            let q = quadratic_min_valuation(d, &u, &v, p).unwrap();
            proptest::prop_assert!(q.equal);
            // Split primes: the two valuations add up to that of the norm.
            if let Some((a, b)) = split_valuations(d, &u, &v, p) {
                let norm = &u * &u - BigInt::from(d) * &v * &v;
                proptest::prop_assert_eq!(Valuation::Finite(a + b), integer_valuation(&norm, p));
                proptest::prop_assert!(q.split);
            }
        }
    }
}
