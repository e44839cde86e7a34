//! Trial division followed by Brent's variant of Pollard rho.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_prime, is_prime_u64, prime_sieve};
use super::residue::mulmod_u64;
use super::Integer;
use crate::{Error, Result};

/// Effort allowed for one call to [`factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Primes up to this bound are removed by trial division.
    pub trial_bound: u64,
    /// Total rho iterations shared by all splitting attempts.
    pub rho_iterations: u64,
}

impl FactorBudget {
    pub const fn new(trial_bound: u64, rho_iterations: u64) -> Self {
        FactorBudget {
            trial_bound,
            rho_iterations,
        }
    }

    /// Only trial division.
    pub const fn trial_only(trial_bound: u64) -> Self {
        FactorBudget::new(trial_bound, 0)
    }
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget::new(100_000, 2_000_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CofactorStatus {
    /// `|cofactor| = 1`.
    Unit,
    /// A single piece above `2^64` passing Baillie-PSW.
    ProbablePrime,
    /// A single piece known to be composite that the budget could not split.
    Composite,
    /// Several unsplit pieces remain.
    Unknown,
}

/// `value = cofactor * prod p^e`. Keys are proven primes (all below `2^64`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub factors: BTreeMap<u64, u32>,
    pub cofactor: Integer,
    pub cofactor_status: CofactorStatus,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            factors: BTreeMap::new(),
            cofactor: Integer::one(),
            cofactor_status: CofactorStatus::Unit,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor_status == CofactorStatus::Unit
    }

    pub fn value(&self) -> Integer {
        let mut v = self.cofactor.clone();
        for (&p, &e) in &self.factors {
            v *= BigInt::from(p).pow(e);
        }
        v
    }

    /// The largest prime factor seen, and whether it is certainly the largest.
    ///
    /// A probable-prime cofactor is reported as `None` here because it does
    /// not fit a `u64`; see [`FactoredInteger::largest_factor_big`].
    pub fn largest_prime_factor(&self) -> (Option<u64>, bool) {
        let top = self.factors.keys().next_back().copied();
        (top, self.is_complete())
    }

    /// Largest known prime factor, including a probable-prime cofactor.
    pub fn largest_factor_big(&self) -> Option<(BigUint, bool)> {
        match self.cofactor_status {
            CofactorStatus::ProbablePrime => Some((self.cofactor.magnitude().clone(), true)),
            CofactorStatus::Unit => self
                .factors
                .keys()
                .next_back()
                .map(|&p| (BigUint::from(p), true)),
            _ => self
                .factors
                .keys()
                .next_back()
                .map(|&p| (BigUint::from(p), false)),
        }
    }
}

/// Factor `n` within `budget`.
pub fn factor(n: &Integer, budget: &FactorBudget) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut factors = BTreeMap::new();
    let mut rest = n.magnitude().clone();

    for p in prime_sieve(budget.trial_bound) {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            // rest is 1 or prime
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.insert(p, e);
        }
    }

    let mut iterations_left = budget.rho_iterations;
    let mut stack = vec![rest];
    let mut leftovers: Vec<(BigUint, bool)> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            if is_prime_u64(small) {
                *factors.entry(small).or_insert(0) += 1;
                continue;
            }
        } else if is_prime(&BigInt::from(m.clone())) {
            leftovers.push((m, true));
            continue;
        }
        match split(&m, &mut iterations_left) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => leftovers.push((m, false)),
        }
    }

    // A prime split off one piece may still divide an unsplit leftover.
    for (piece, is_prime) in leftovers.iter_mut() {
        for (&p, e) in factors.iter_mut() {
            let (k, r) = crate::arith::split_prime_power(piece, p);
            if k > 0 {
                *e += k as u32;
                *piece = r;
                *is_prime = is_prime_u64_or_big(piece);
            }
        }
    }
    leftovers.retain(|(piece, _)| !piece.is_one());

    let mut cofactor = BigUint::one();
    for (piece, _) in &leftovers {
        cofactor *= piece;
    }
    let cofactor_status = match leftovers.as_slice() {
        [] => CofactorStatus::Unit,
        [(_, true)] => CofactorStatus::ProbablePrime,
        [(_, false)] => CofactorStatus::Composite,
        _ => CofactorStatus::Unknown,
    };
    let sign = if n.sign() == Sign::Minus {
        Sign::Minus
    } else {
        Sign::Plus
    };
    Ok(FactoredInteger {
        factors,
        cofactor: BigInt::from_biguint(sign, cofactor),
        cofactor_status,
    })
}

fn is_prime_u64_or_big(m: &BigUint) -> bool {
    match m.to_u64() {
        Some(small) => is_prime_u64(small),
        None => is_prime(&BigInt::from(m.clone())),
    }
}

/// A nontrivial divisor of composite `n`, or `None` when the budget runs out.
fn split(n: &BigUint, iterations_left: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let root = num_integer::Roots::sqrt(n);
    if &root * &root == *n {
        return Some(root);
    }
    // Fixed seed sequence: c = 1, 2, 3, ... with x0 = 2.
    let mut c = 1u64;
    while *iterations_left > 0 {
        let found = match n.to_u64() {
            Some(small) => brent_u64(small, c, iterations_left).map(BigUint::from),
            None => brent_big(n, c, iterations_left),
        };
        if let Some(d) = found {
            if !d.is_one() && d != *n {
                return Some(d);
            }
        }
        c += 1;
    }
    None
}

const BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, iterations_left: &mut u64) -> Option<u64> {
    let f = |x: u64| ((mulmod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x;
    let mut ys;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mulmod_u64(q, x.abs_diff(y), n);
            }
            *iterations_left = iterations_left.saturating_sub(steps);
            let g = q.gcd(&n);
            k += steps;
            if g != 1 {
                if g != n {
                    return Some(g);
                }
                // Backtrack one step at a time from the saved point.
                loop {
                    ys = f(ys);
                    let g = x.abs_diff(ys).gcd(&n);
                    if g != 1 {
                        return if g == n { None } else { Some(g) };
                    }
                }
            }
            if k >= r || *iterations_left == 0 {
                break;
            }
        }
        if *iterations_left == 0 {
            return None;
        }
        r *= 2;
    }
}

fn brent_big(n: &BigUint, c: u64, iterations_left: &mut u64) -> Option<BigUint> {
    let cb = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &cb) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x;
    let mut ys;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            *iterations_left = iterations_left.saturating_sub(steps);
            let g = q.gcd(n);
            k += steps;
            if !g.is_one() {
                if g != *n {
                    return Some(g);
                }
                loop {
                    ys = f(&ys);
                    let g = diff(&x, &ys).gcd(n);
                    if !g.is_one() {
                        return if g == *n { None } else { Some(g) };
                    }
                }
            }
            if k >= r || *iterations_left == 0 {
                break;
            }
        }
        if *iterations_left == 0 {
            return None;
        }
        r *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(n: i64) -> Integer {
        Integer::from(n)
    }

    #[test]
    fn small_examples() {
        let b = FactorBudget::default();
        let f = factor(&int(25), &b).unwrap();
        assert_eq!(f.factors, BTreeMap::from([(5, 2)]));
        assert_eq!(f.cofactor, int(1));
        let f = factor(&int(1024 * 3), &b).unwrap();
        assert_eq!(f.factors, BTreeMap::from([(2, 10), (3, 1)]));
        assert!(factor(&int(0), &b).is_err());
        let f = factor(&int(-12), &b).unwrap();
        assert_eq!(f.cofactor, int(-1));
        assert_eq!(f.value(), int(-12));
    }

    #[test]
    fn rho_splits_beyond_trial_bound() {
        // Two primes far above the trial bound.
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let n = Integer::from(p) * Integer::from(q);
        let f = factor(&n, &FactorBudget::new(1000, 1_000_000)).unwrap();
        assert_eq!(f.factors, BTreeMap::from([(q, 1), (p, 1)]));
        assert!(f.is_complete());

        // Same split with a product exceeding 2^64.
        let r = 4_294_967_311u64;
        let n = Integer::from(p) * Integer::from(q) * Integer::from(r);
        let f = factor(&n, &FactorBudget::new(1000, 5_000_000)).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.value(), n);
    }

    #[test]
    fn exhausted_budget_reports_composite() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let n = Integer::from(p) * Integer::from(q);
        let f = factor(&n, &FactorBudget::trial_only(1000)).unwrap();
        assert_eq!(f.cofactor_status, CofactorStatus::Composite);
        assert_eq!(f.value(), n);
        assert_eq!(f.largest_prime_factor(), (None, false));
    }

    #[test]
    fn large_prime_cofactor() {
        let m127 = (BigInt::one() << 127u32) - 1;
        let n = &m127 * 6;
        let f = factor(&n, &FactorBudget::default()).unwrap();
        assert_eq!(f.cofactor_status, CofactorStatus::ProbablePrime);
        assert_eq!(f.cofactor, m127);
        assert_eq!(f.largest_factor_big().unwrap().0, m127.to_biguint().unwrap());
    }

    #[test]
    fn remultiply_all_up_to_ten_thousand() {
        let b = FactorBudget::new(50, 100_000);
        for n in 1..=10_000i64 {
            let f = factor(&int(n), &b).unwrap();
            assert!(f.is_complete(), "{n}");
            assert!(f.factors.keys().all(|&p| is_prime_u64(p)));
            assert_eq!(f.value(), int(n));
        }
    }

    proptest! {
        #[test]
        fn remultiply_random(n in -1_000_000i64..=1_000_000) {
            prop_assume!(n != 0);
            let f = factor(&int(n), &FactorBudget::new(30, 100_000)).unwrap();
            prop_assert!(f.is_complete());
            prop_assert_eq!(f.value(), int(n));
        }
    }
}
