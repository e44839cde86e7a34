use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{primitive_part, SequenceState};
use crate::arith::split_prime_power;
use crate::eds::{a_ell, d_n, exact_reach, p_ell, AEll};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// Which part of `T2` a prime was placed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `p_ell` for `ell` not in the sequence; `ell^a | n`.
    LargestOfPower { ell: u64, a: u32, prime: Option<BigUint> },
    /// `p_{ell_i ell_j}`, `i >= j`.
    SequencePair { ell_i: u64, ell_j: u64, primitive_bits: u64 },
    /// `p_{ell ell_i}` with `ell` exceptional.
    ExceptionalPair { ell: u64, ell_i: u64, primitive_bits: u64 },
}

/// Membership in `T1` and `T2` read off the sequence built so far.
///
/// A good prime `p` lies in `S_n` exactly when its apparition index `m_p`
/// divides `n`, so every question reduces to `m_p` and to whether `p` is the
/// largest prime of a given primitive part.
#[derive(Debug)]
pub struct TsetOracle<'a> {
    state: &'a SequenceState,
    ells: Vec<u64>,
    count_cap: u64,
    a_cache: RefCell<BTreeMap<u64, AEll>>,
}

/// Prime factorization of a small integer.
fn small_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl<'a> TsetOracle<'a> {
    /// Queries above `count_cap` are answered `Unknown`.
    pub fn new(state: &'a SequenceState, count_cap: u64) -> Self {
        TsetOracle {
            state,
            ells: state.ells(),
            count_cap,
            a_cache: RefCell::new(BTreeMap::new()),
        }
    }

    fn a_ell(&self, ell: u64) -> Result<AEll> {
        if let Some(a) = self.a_cache.borrow().get(&ell) {
            return Ok(a.clone());
        }
        let st = self.state;
        let a = a_ell(&st.fixture, ell, st.scanner()?.bound(), &st.conditions.eds)?;
        self.a_cache.borrow_mut().insert(ell, a.clone());
        Ok(a)
    }

    fn last(&self) -> u64 {
        self.ells.last().copied().unwrap_or(0)
    }

    fn chosen(&self, ell: u64) -> bool {
        self.ells.binary_search(&ell).is_ok()
    }

    /// May still join the sequence.
    fn open(&self, ell: u64) -> bool {
        ell > self.last() && !self.chosen(ell)
    }

    fn exceptional(&self, ell: u64) -> Result<Membership> {
        let l = self.state.exceptional()?;
        Ok(if l.curly_l.contains_key(&ell) {
            Membership::In
        } else if ell <= self.state.conditions.exceptional_max && !l.uncertain.contains(&ell) {
            Membership::Out
        } else {
            Membership::Unknown
        })
    }

    fn apparition(&self, p: u64) -> Result<Option<u64>> {
        if p > self.count_cap {
            return Ok(None);
        }
        Ok(Some(self.state.fixture.order_mod_p(p)?))
    }

    pub fn t1_member(&self, p: u64) -> Result<Membership> {
        let f = &self.state.fixture;
        if f.bad_primes.contains(&p) || !f.is_good(p) {
            return Ok(Membership::In);
        }
        let m = match self.apparition(p)? {
            Some(m) => m,
            None => return Ok(Membership::Unknown),
        };
        Ok(if self.chosen(m) {
            Membership::In
        } else if crate::arith::is_prime_u64(m) && self.open(m) {
            Membership::Unknown
        } else {
            Membership::Out
        })
    }

    pub fn t2_member(&self, p: u64) -> Result<Membership> {
        let f = &self.state.fixture;
        if f.bad_primes.contains(&p) || !f.is_good(p) {
            return Ok(Membership::Out);
        }
        let m = match self.apparition(p)? {
            Some(m) => m,
            None => return Ok(Membership::Unknown),
        };
        let fac = small_factors(m);
        let cfg = &self.state.conditions.eds;
        match *fac.as_slice() {
            [(ell, a)] => {
                if self.chosen(ell) {
                    if a == 2 {
                        return self.largest_primitive(p, m, ell, ell);
                    }
                    return Ok(Membership::Out);
                }
                if self.open(ell) {
                    return Ok(Membership::Unknown);
                }
                let ae = self.a_ell(ell)?;
                if ae.a != a || !ae.exact {
                    return Ok(if ae.exact { Membership::Out } else { Membership::Unknown });
                }
                if m > exact_reach(f, cfg) {
                    return Ok(Membership::Unknown);
                }
                let d = d_n(f, m, cfg)?;
                self.largest_of(p, m, d)
            }
            [(l1, 1), (l2, 1)] => {
                let (c1, c2) = (self.chosen(l1), self.chosen(l2));
                if c1 && c2 {
                    return self.largest_primitive(p, m, l1, l2);
                }
                for (a, b, cb) in [(l1, l2, c2), (l2, l1, c1)] {
                    if cb {
                        match self.exceptional(a)? {
                            Membership::In => return self.largest_primitive(p, m, a, b),
                            Membership::Unknown => return Ok(Membership::Unknown),
                            Membership::Out if self.open(a) => return Ok(Membership::Unknown),
                            Membership::Out => {}
                        }
                    }
                }
                // Undecided while either factor can still join the sequence.
                let maybe = |x: u64| -> Result<bool> {
                    Ok(self.open(x) || self.exceptional(x)? != Membership::Out)
                };
                if (c1 || maybe(l1)?) && (c2 || maybe(l2)?) {
                    Ok(Membership::Unknown)
                } else {
                    Ok(Membership::Out)
                }
            }
            _ => Ok(Membership::Out),
        }
    }

    fn largest_primitive(&self, p: u64, n: u64, l: u64, m: u64) -> Result<Membership> {
        let f = &self.state.fixture;
        let cfg = &self.state.conditions.eds;
        if n > exact_reach(f, cfg) {
            return Ok(Membership::Unknown);
        }
        let part = primitive_part(f, l, m, n, cfg)?;
        self.largest_of(p, n, part)
    }

    /// `p` is the largest prime of `value`, whose primes all lie in `S_n`.
    fn largest_of(&self, p: u64, n: u64, value: BigUint) -> Result<Membership> {
        let sc = self.state.scanner()?;
        if p > sc.bound() {
            return Ok(Membership::Unknown);
        }
        if !(&value % p).is_zero() {
            return Ok(Membership::Out);
        }
        let mut rest = value;
        for q in sc.support(n).into_iter().filter(|&q| q <= p) {
            rest = split_prime_power(&rest, q).1;
        }
        Ok(if rest.is_one() { Membership::In } else { Membership::Out })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointStatus {
    /// Integral for every admissible `S`.
    Integral(String),
    /// Not integral for any admissible `S`.
    NotIntegral(Witness),
    Undecided(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPointsReport {
    pub bound: u64,
    pub points: Vec<(u64, PointStatus)>,
    /// Integral multiples outside `{ell_i} ∪ {s : s | L}`, and sequence terms
    /// not found integral.
    pub violations: Vec<u64>,
    /// Primes of some `S_{ell_i}` below the scan bound that the oracle puts in `T2`.
    pub overlaps: Vec<u64>,
}

impl IntegerPointsReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty() && self.overlaps.is_empty()
    }

    pub fn status(&self, n: u64) -> Option<&PointStatus> {
        self.points.iter().find(|(k, _)| *k == n).map(|(_, s)| s)
    }
}

/// Classify `nP` for `1 <= n <= bound` as `S`-integral or not, for all `S`
/// containing `T1` and disjoint from `T2`.
pub fn integer_points_check(oracle: &TsetOracle<'_>, bound: u64) -> Result<IntegerPointsReport> {
    let state = oracle.state;
    let f = &state.fixture;
    let cfg = &state.conditions.eds;
    let l = state.exceptional()?;
    let l_value = l.l_value.to_u64();
    let reach = exact_reach(f, cfg);
    let mut points = Vec::new();
    let mut violations = Vec::new();
    for n in 1..=bound {
        let status = classify(oracle, n, reach)?;
        let divides_l = l_value.is_some_and(|lv| lv % n == 0);
        match &status {
            PointStatus::Integral(_) if !(oracle.chosen(n) || divides_l) => violations.push(n),
            PointStatus::Integral(_) => {}
            _ if oracle.chosen(n) => violations.push(n),
            _ => {}
        }
        points.push((n, status));
    }
    let mut overlaps = Vec::new();
    let sc = state.scanner()?;
    for &ell in &oracle.ells {
        for p in sc.support(ell) {
            if oracle.t2_member(p)? == Membership::In {
                overlaps.push(p);
            }
        }
    }
    Ok(IntegerPointsReport {
        bound,
        points,
        violations,
        overlaps,
    })
}

fn classify(oracle: &TsetOracle<'_>, n: u64, reach: u64) -> Result<PointStatus> {
    let state = oracle.state;
    let f = &state.fixture;
    let cfg = &state.conditions.eds;
    if n == 1 {
        return Ok(PointStatus::Integral("S_1 is empty".into()));
    }
    if oracle.chosen(n) {
        return Ok(PointStatus::Integral(format!("S_{n} lies in T1")));
    }
    let fac = small_factors(n);
    // A prime ell outside the sequence with ell^(a_ell) | n contributes p_ell.
    for &(ell, e) in &fac {
        if oracle.chosen(ell) || oracle.open(ell) {
            continue;
        }
        let ae = oracle.a_ell(ell)?;
        if ae.exact && ae.a <= e {
            let k = ell.pow(ae.a);
            let prime = if k <= 30 { p_ell(f, ell, cfg).ok().filter(|pe| pe.complete).map(|pe| pe.prime) } else { None };
            return Ok(PointStatus::NotIntegral(Witness::LargestOfPower { ell, a: ae.a, prime }));
        }
    }
    // Two sequence primes (or one squared), or an exceptional prime with one.
    let chosen: Vec<(u64, u32)> = fac.iter().copied().filter(|&(l, _)| oracle.chosen(l)).collect();
    let mut pairs: Vec<(u64, u64, bool)> = Vec::new();
    for (k, &(a, ea)) in chosen.iter().enumerate() {
        if ea >= 2 {
            pairs.push((a, a, false));
        }
        for &(b, _) in &chosen[k + 1..] {
            pairs.push((b, a, false));
        }
        for &(x, _) in &fac {
            if oracle.exceptional(x)? == Membership::In {
                pairs.push((x, a, true));
            }
        }
    }
    for (x, y, exc) in pairs {
        let m = x * y;
        if m > reach {
            continue;
        }
        let part = primitive_part(f, x, y, m, cfg)?;
        if !part.is_one() {
            let bits = part.bits();
            return Ok(PointStatus::NotIntegral(if exc {
                Witness::ExceptionalPair { ell: x, ell_i: y, primitive_bits: bits }
            } else {
                Witness::SequencePair { ell_i: x, ell_j: y, primitive_bits: bits }
            }));
        }
    }
    if let Some(lv) = state.exceptional()?.l_value.to_u64() {
        if lv % n == 0 && n <= reach && d_n(f, n, cfg)?.is_one() {
            return Ok(PointStatus::Integral(format!("d_{n} = 1")));
        }
    }
    Ok(PointStatus::Undecided(format!("no witness for {n} within the built sequence")))
}
