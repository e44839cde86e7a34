use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

use super::apparition::SupportScanner;
use super::{d_n, divides, exact_reach, remove_common_primes, EdsConfig};
#[cfg(test)]
use super::d_n_exact;
use crate::arith::{factor, is_prime_u64, prime_sieve};
use crate::curve::CurveFixture;
use crate::{Error, Result};

const MAX_EXPONENT: u32 = 8;

/// `a_ell`: the least `a` with `S_{ell^a}` nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AEll {
    pub ell: u64,
    pub a: u32,
    /// True when every smaller exponent was ruled out by an exact `d = 1`.
    pub exact: bool,
}

pub fn a_ell(fixture: &CurveFixture, ell: u64, scan_bound: u64, cfg: &EdsConfig) -> Result<AEll> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(format!("{ell}")));
    }
    let mut scanner: Option<SupportScanner> = None;
    let mut exact = true;
    let mut n = 1u64;
    for a in 1..=MAX_EXPONENT {
        n = n.checked_mul(ell).ok_or(Error::BudgetExceeded {
            what: "power of ell",
            cap: u64::MAX,
        })?;
        if n <= exact_reach(fixture, cfg) {
            if !d_n(fixture, n, cfg)?.is_one() {
                return Ok(AEll { ell, a, exact });
            }
        } else {
            let sc = match &scanner {
                Some(sc) => sc,
                None => scanner.insert(SupportScanner::new(fixture, scan_bound)?),
            };
            if !sc.support(n).is_empty() {
                return Ok(AEll { ell, a, exact });
            }
            // Empty below the scan bound does not prove d_n = 1.
            exact = false;
        }
    }
    Err(Error::BudgetExceeded {
        what: "a_ell exponent search",
        cap: MAX_EXPONENT as u64,
    })
}

/// `p_ell`: the largest prime factor of `d_{ell^{a_ell}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PEll {
    pub ell: u64,
    pub a: u32,
    pub prime: BigUint,
    /// False when part of `d_{ell^a}` is unfactored, so `prime` is only a
    /// witness in `S_{ell^a}` and not necessarily the largest.
    pub complete: bool,
}

pub fn p_ell(fixture: &CurveFixture, ell: u64, cfg: &EdsConfig) -> Result<PEll> {
    let ae = a_ell(fixture, ell, 100_000, cfg)?;
    let n = ell.pow(ae.a);
    let d = d_n(fixture, n, cfg)?;
    let f = factor(&BigInt::from(d), &cfg.budget)?;
    let (prime, complete) = f.largest_factor_big().ok_or_else(|| {
        Error::BudgetExceeded {
            what: "factoring effort for d_(ell^a)",
            cap: cfg.budget.rho_iterations,
        }
    })?;
    Ok(PEll {
        ell,
        a: ae.a,
        prime,
        complete: complete && ae.exact,
    })
}

/// Primitive part of `d_{ell m}`: the product of its prime powers for primes
/// dividing neither `d_ell` nor `d_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivePrime {
    pub ell: u64,
    pub m: u64,
    pub primitive_part: BigUint,
    /// Largest prime factor found in the primitive part.
    pub largest_prime: Option<BigUint>,
    pub complete: bool,
    /// `d_{ell m} / primitive_part` divides `(ell m)^2 d_ell d_m`.
    pub imprimitive_divides: bool,
}

impl PrimitivePrime {
    pub fn exists(&self) -> bool {
        !self.primitive_part.is_one()
    }
}

pub fn primitive_prime(
    fixture: &CurveFixture,
    ell: u64,
    m: u64,
    cfg: &EdsConfig,
) -> Result<PrimitivePrime> {
    if ell == m {
        return Err(Error::InvalidArgument("ell and m must be distinct".into()));
    }
    for q in [ell, m] {
        if !is_prime_u64(q) {
            return Err(Error::NotPrime(format!("{q}")));
        }
    }
    let lm = ell.saturating_mul(m);
    let d_lm = d_n(fixture, lm, cfg)?;
    let d_l = d_n(fixture, ell, cfg)?;
    let d_m = d_n(fixture, m, cfg)?;
    let old = &d_l * &d_m;
    let primitive_part = remove_common_primes(&d_lm, &old);
    let imprimitive = &d_lm / &primitive_part;
    let bound = BigUint::from(lm).pow(2) * &old;
    let imprimitive_divides = divides(&imprimitive, &bound);

    let (largest_prime, complete) = if primitive_part.is_one() {
        (None, true)
    } else {
        let f = factor(&BigInt::from(primitive_part.clone()), &cfg.budget)?;
        match f.largest_factor_big() {
            Some((p, c)) => (Some(p), c),
            None => (None, false),
        }
    };
    Ok(PrimitivePrime {
        ell,
        m,
        primitive_part,
        largest_prime,
        complete,
        imprimitive_divides,
    })
}

/// Outcome of checking `ell | #E(F_{p_ell})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOrderReport {
    Verified { ell: u64, p_ell: u64, count: u64 },
    Failed { ell: u64, p_ell: u64, count: u64 },
    Skipped { ell: u64, reason: String },
}

impl ExactOrderReport {
    pub fn failed(&self) -> bool {
        matches!(self, ExactOrderReport::Failed { .. })
    }
}

pub fn exactorder_check(
    fixture: &CurveFixture,
    ell: u64,
    count_cap: u64,
    cfg: &EdsConfig,
) -> Result<ExactOrderReport> {
    let pe = match p_ell(fixture, ell, cfg) {
        Ok(pe) => pe,
        Err(e @ Error::BudgetExceeded { .. }) => {
            return Ok(ExactOrderReport::Skipped {
                ell,
                reason: format!("{e}"),
            })
        }
        Err(e) => return Err(e),
    };
    let p = match pe.prime.to_u64() {
        Some(p) if p <= count_cap => p,
        _ => {
            return Ok(ExactOrderReport::Skipped {
                ell,
                reason: format!("p_ell = {} exceeds the point-count cap {count_cap}", pe.prime),
            })
        }
    };
    let count = fixture.curve.count_points_capped(p, count_cap)?;
    Ok(if count % ell == 0 {
        ExactOrderReport::Verified { ell, p_ell: p, count }
    } else {
        ExactOrderReport::Failed { ell, p_ell: p, count }
    })
}

/// Primes `ell` with `a_ell > 1` and `L = prod ell^(a_ell - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LExceptional {
    pub curly_l: BTreeMap<u64, u32>,
    pub l_value: BigUint,
    /// Primes whose `a_ell` could not be certified exactly.
    pub uncertain: Vec<u64>,
}

pub fn build_l(fixture: &CurveFixture, ell_max: u64, scan_bound: u64, cfg: &EdsConfig) -> Result<LExceptional> {
    let mut curly_l = BTreeMap::new();
    let mut l_value = BigUint::one();
    let mut uncertain = Vec::new();
    for ell in prime_sieve(ell_max) {
        let ae = a_ell(fixture, ell, scan_bound, cfg)?;
        if !ae.exact {
            uncertain.push(ell);
        }
        if ae.a > 1 {
            curly_l.insert(ell, ae.a);
            l_value *= BigUint::from(ell).pow(ae.a - 1);
        }
    }
    Ok(LExceptional {
        curly_l,
        l_value,
        uncertain,
    })
}
