//! The prime sequence `ell_1 < ell_2 < ...` selected by congruence,
//! density, primitive-divisor and archimedean conditions, its model
//! variant, the prime sets `T1`, `T2` built from it, and the empirical
//! statistics behind the construction.

mod oracle;
mod stats;

pub use oracle::{integer_points_check, IntegerPointsReport, Membership, PointStatus, TsetOracle, Witness};
pub use stats::{
    mu_ell, omega, omega_profile, omega_statistics, weyl_equidistribution, Alpha, OmegaStat, WeylReport,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::arith::{is_prime_u64, prime_sieve, split_prime_power};
use crate::curve::{AngleWindow, CurveFixture, EllipticAngle, RealPeriod};
use crate::eds::{build_l, d_n, exact_reach, EdsConfig, LExceptional, SupportScanner};
use crate::zstruct::b_member;
use crate::{Error, Result};

/// `ell = 1 mod m`, with `p^i || (ell - 1)/m` and `q | (ell - 1)/m` exactly
/// when `i` lies in `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCongruence {
    pub p: u64,
    pub q: u64,
    pub m: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Discrete,
    Model(ModelCongruence),
}

/// Search limits and which conditions are enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqConditions {
    pub variant: Variant,
    /// Checkpoints `X` replacing the supremum in `mu_ell`.
    pub checkpoints: Vec<u64>,
    /// Lower bound every term must exceed.
    pub bound: u64,
    /// Largest product `ell_i ell_j` whose primitive part is computed.
    pub pair_cap: u64,
    /// Exceptional primes are searched up to here.
    pub exceptional_max: u64,
    /// Largest candidate prime (discrete) or multiplier (model) tried.
    pub scan_cap: u64,
    pub angle_tol: f64,
    pub enforce_mu: bool,
    pub enforce_primitive: bool,
    pub eds: EdsConfig,
}

impl SeqConditions {
    pub fn discrete() -> Self {
        SeqConditions {
            variant: Variant::Discrete,
            checkpoints: default_checkpoints(),
            bound: 13,
            pair_cap: 1000,
            exceptional_max: 100,
            scan_cap: 10_000_000,
            angle_tol: 1e-12,
            enforce_mu: true,
            enforce_primitive: true,
            eds: EdsConfig::default(),
        }
    }

    /// The model variant with the density and primitive-divisor conditions
    /// switched off.
    pub fn model(c: ModelCongruence) -> Self {
        SeqConditions {
            variant: Variant::Model(c),
            enforce_mu: false,
            enforce_primitive: false,
            ..Self::discrete()
        }
    }

    fn scan_bound(&self) -> u64 {
        self.checkpoints.iter().copied().max().unwrap_or(10)
    }
}

/// `10, 10^2, ..., 10^6`.
pub fn default_checkpoints() -> Vec<u64> {
    (1..=6).map(|e| 10u64.pow(e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    AboveBound,
    OutsideExceptional,
    Increasing,
    MuSmall,
    PairPrimitiveLarge,
    ExceptionalPrimitiveLarge,
    FactorialCongruence,
    ArchimedeanLarge,
    ModelModulus,
    ModelPPower,
    ModelQIndex,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::AboveBound => "above-bound",
            Condition::OutsideExceptional => "outside-exceptional",
            Condition::Increasing => "increasing",
            Condition::MuSmall => "mu-small",
            Condition::PairPrimitiveLarge => "pair-primitive-large",
            Condition::ExceptionalPrimitiveLarge => "exceptional-primitive-large",
            Condition::FactorialCongruence => "factorial-congruence",
            Condition::ArchimedeanLarge => "archimedean-large",
            Condition::ModelModulus => "model-modulus",
            Condition::ModelPPower => "model-p-power",
            Condition::ModelQIndex => "model-q-index",
        }
    }

    /// Conditions in evaluation order, cheapest first.
    pub fn for_variant(v: &Variant) -> &'static [Condition] {
        use Condition::*;
        match v {
            Variant::Discrete => &[
                AboveBound,
                Increasing,
                FactorialCongruence,
                OutsideExceptional,
                ArchimedeanLarge,
                MuSmall,
                ExceptionalPrimitiveLarge,
                PairPrimitiveLarge,
            ],
            Variant::Model(_) => &[
                AboveBound,
                Increasing,
                ModelModulus,
                ModelPPower,
                ModelQIndex,
                OutsideExceptional,
                MuSmall,
                ExceptionalPrimitiveLarge,
                PairPrimitiveLarge,
            ],
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionStatus {
    Passed(String),
    /// Not decided: disabled, or beyond the computable range.
    Skipped(String),
    Failed(String),
}

impl ConditionStatus {
    pub fn is_failed(&self) -> bool {
        matches!(self, ConditionStatus::Failed(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConditionStatus::Passed(_) => "passed",
            ConditionStatus::Skipped(_) => "skipped",
            ConditionStatus::Failed(_) => "failed",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            ConditionStatus::Passed(s) | ConditionStatus::Skipped(s) | ConditionStatus::Failed(s) => s,
        }
    }
}

/// Per-condition evidence for one chosen term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub index: usize,
    pub ell: u64,
    pub conditions: Vec<(Condition, ConditionStatus)>,
}

impl Certificate {
    pub fn status(&self, c: Condition) -> Option<&ConditionStatus> {
        self.conditions.iter().find(|(k, _)| *k == c).map(|(_, s)| s)
    }

    pub fn skipped(&self) -> Vec<Condition> {
        self.conditions
            .iter()
            .filter(|(_, s)| matches!(s, ConditionStatus::Skipped(_)))
            .map(|(c, _)| *c)
            .collect()
    }
}

/// A certificate entry whose re-evaluation differs from the stored one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayMismatch {
    pub index: usize,
    pub condition: Condition,
    pub stored: ConditionStatus,
    pub replayed: ConditionStatus,
}

/// The terms chosen so far and the data needed to test new candidates.
#[derive(Debug)]
pub struct SequenceState {
    fixture: CurveFixture,
    conditions: SeqConditions,
    scanner: OnceCell<SupportScanner>,
    exceptional: OnceCell<LExceptional>,
    angle: OnceCell<(RealPeriod, EllipticAngle)>,
    pub chosen: Vec<Certificate>,
}

/// `n!` or `None` past `u64`.
pub fn factorial(n: u64) -> Option<u64> {
    (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// Exponent of `p` in `n > 0`.
pub(crate) fn val_u64(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Tolerance factor for the retry after an ambiguous angle classification.
const REFINE: f64 = 1e-3;

/// Trial division of the primitive part stops here; `2^i` beyond it is skipped.
const SMALL_PRIME_LIMIT: u64 = 1 << 20;

impl SequenceState {
    pub fn new(fixture: &CurveFixture, conditions: SeqConditions) -> Result<Self> {
        if let Variant::Model(c) = conditions.variant {
            if c.p == c.q || !is_prime_u64(c.p) || !is_prime_u64(c.q) || c.m % (c.p * c.q) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "model congruence needs distinct primes p, q with pq | M, got {c:?}"
                )));
            }
        }
        if conditions.checkpoints.iter().any(|&x| x < 2) {
            return Err(Error::InvalidArgument("checkpoints must be at least 2".into()));
        }
        Ok(SequenceState {
            fixture: fixture.clone(),
            conditions,
            scanner: OnceCell::new(),
            exceptional: OnceCell::new(),
            angle: OnceCell::new(),
            chosen: Vec::new(),
        })
    }

    pub fn fixture(&self) -> &CurveFixture {
        &self.fixture
    }

    pub fn conditions(&self) -> &SeqConditions {
        &self.conditions
    }

    pub fn ells(&self) -> Vec<u64> {
        self.chosen.iter().map(|c| c.ell).collect()
    }

    pub(crate) fn scanner(&self) -> Result<&SupportScanner> {
        if let Some(s) = self.scanner.get() {
            return Ok(s);
        }
        let s = SupportScanner::new(&self.fixture, self.conditions.scan_bound())?;
        Ok(self.scanner.get_or_init(|| s))
    }

    /// The exceptional primes below `exceptional_max`.
    pub fn exceptional(&self) -> Result<&LExceptional> {
        if let Some(l) = self.exceptional.get() {
            return Ok(l);
        }
        let c = &self.conditions;
        let l = build_l(&self.fixture, c.exceptional_max, c.scan_bound(), &c.eds)?;
        Ok(self.exceptional.get_or_init(|| l))
    }

    fn angle(&self) -> Result<&(RealPeriod, EllipticAngle)> {
        if let Some(a) = self.angle.get() {
            return Ok(a);
        }
        let rp = RealPeriod::new(&self.fixture.curve, self.conditions.angle_tol);
        let theta = rp.angle(&self.fixture.point)?;
        Ok(self.angle.get_or_init(|| (rp, theta)))
    }

    /// Append the next term.
    pub fn next(&mut self) -> Result<&Certificate> {
        let i = self.chosen.len() + 1;
        let prev = self.ells();
        let cert = match self.conditions.variant {
            Variant::Discrete => self.search_discrete(i, &prev)?,
            Variant::Model(c) => self.search_model(i, &prev, c)?,
        };
        self.chosen.push(cert);
        Ok(self.chosen.last().expect("just pushed"))
    }

    /// Extend to `k` terms.
    pub fn build(&mut self, k: usize) -> Result<()> {
        while self.chosen.len() < k {
            self.next()?;
        }
        Ok(())
    }

    /// Evaluate every condition; `None` as soon as one fails.
    fn try_candidate(&self, i: usize, ell: u64, prev: &[u64]) -> Result<Option<Certificate>> {
        let mut conditions = Vec::new();
        for &c in Condition::for_variant(&self.conditions.variant) {
            let s = self.evaluate(c, i, ell, prev)?;
            if s.is_failed() {
                return Ok(None);
            }
            conditions.push((c, s));
        }
        Ok(Some(Certificate {
            index: i,
            ell,
            conditions,
        }))
    }

    fn search_discrete(&self, i: usize, prev: &[u64]) -> Result<Certificate> {
        let modulus = factorial(i as u64).ok_or(Error::BudgetExceeded {
            what: "factorial modulus",
            cap: u64::MAX,
        })?;
        let floor = prev.last().copied().unwrap_or(0).max(self.conditions.bound);
        // Smallest ell = 1 mod i! above the floor.
        let mut ell = (floor / modulus) * modulus + 1;
        while ell <= floor {
            ell += modulus;
        }
        while ell <= self.conditions.scan_cap {
            if is_prime_u64(ell) {
                if let Some(c) = self.try_candidate(i, ell, prev)? {
                    return Ok(c);
                }
            }
            ell += modulus;
        }
        Err(Error::BudgetExceeded {
            what: "prime search",
            cap: self.conditions.scan_cap,
        })
    }

    fn search_model(&self, i: usize, prev: &[u64], c: ModelCongruence) -> Result<Certificate> {
        let overflow = Error::BudgetExceeded {
            what: "model term size",
            cap: u64::MAX,
        };
        let step = c
            .p
            .checked_pow(i as u32)
            .and_then(|pi| pi.checked_mul(c.m))
            .ok_or_else(|| overflow.clone())?;
        let in_b = b_member(i as u64);
        let floor = prev.last().copied().unwrap_or(0).max(self.conditions.bound);
        let mut s = (floor / step).max(1);
        let mut tried = 0u64;
        while tried < self.conditions.scan_cap {
            let ell = step.checked_mul(s).and_then(|v| v.checked_add(1)).ok_or_else(|| overflow.clone())?;
            if ell > floor && s % c.p != 0 && (s % c.q == 0) == in_b && is_prime_u64(ell) {
                if let Some(cert) = self.try_candidate(i, ell, prev)? {
                    return Ok(cert);
                }
            }
            s += 1;
            tried += 1;
        }
        Err(Error::BudgetExceeded {
            what: "model multiplier search",
            cap: self.conditions.scan_cap,
        })
    }

    /// Re-evaluate every stored condition.
    pub fn replay(&self) -> Result<Vec<ReplayMismatch>> {
        let mut out = Vec::new();
        let ells = self.ells();
        for (k, cert) in self.chosen.iter().enumerate() {
            for (c, stored) in &cert.conditions {
                let replayed = self.evaluate(*c, cert.index, cert.ell, &ells[..k])?;
                if &replayed != stored {
                    out.push(ReplayMismatch {
                        index: cert.index,
                        condition: *c,
                        stored: stored.clone(),
                        replayed,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Status of one condition for candidate `ell` as the `i`-th term.
    pub fn evaluate(&self, c: Condition, i: usize, ell: u64, prev: &[u64]) -> Result<ConditionStatus> {
        use ConditionStatus::*;
        let cfg = &self.conditions;
        Ok(match c {
            Condition::AboveBound => {
                if ell > cfg.bound {
                    Passed(format!("{ell} > {}", cfg.bound))
                } else {
                    Failed(format!("{ell} <= {}", cfg.bound))
                }
            }
            Condition::Increasing => match prev.last() {
                Some(&last) if ell <= last => Failed(format!("{ell} <= {last}")),
                Some(&last) => Passed(format!("{ell} > {last}")),
                None => Passed("first term".into()),
            },
            Condition::FactorialCongruence => match factorial(i as u64) {
                Some(f) if ell % f == 1 % f => Passed(format!("{ell} = 1 mod {f}")),
                Some(f) => Failed(format!("{ell} = {} mod {f}", ell % f)),
                None => Skipped(format!("{i}! exceeds 64 bits")),
            },
            Condition::OutsideExceptional => self.outside_exceptional(ell)?,
            Condition::ArchimedeanLarge => self.archimedean(i, ell)?,
            Condition::MuSmall => {
                if !cfg.enforce_mu {
                    Skipped("disabled by configuration".into())
                } else {
                    let (num, den, x) = stats::mu_parts(self.scanner()?, ell, &cfg.checkpoints);
                    // mu <= 2^-i  <=>  num * 2^i <= den
                    let ok = i >= 64 || (num as u128) << i <= den as u128;
                    let ev = format!("mu = {num}/{den} at X = {x}, bound 2^-{i}");
                    if ok {
                        Passed(ev)
                    } else {
                        Failed(ev)
                    }
                }
            }
            Condition::PairPrimitiveLarge => {
                if !cfg.enforce_primitive {
                    Skipped("disabled by configuration".into())
                } else {
                    self.primitive_large(i, ell, prev, "earlier term")?
                }
            }
            Condition::ExceptionalPrimitiveLarge => {
                if !cfg.enforce_primitive {
                    Skipped("disabled by configuration".into())
                } else {
                    let l = self.exceptional()?;
                    let ls: Vec<u64> = l.curly_l.keys().copied().collect();
                    let base = self.primitive_large(i, ell, &ls, "exceptional prime")?;
                    if l.uncertain.is_empty() {
                        base
                    } else {
                        Skipped(format!(
                            "exceptional set uncertain at {:?}; {}",
                            l.uncertain,
                            base.detail()
                        ))
                    }
                }
            }
            Condition::ModelModulus | Condition::ModelPPower | Condition::ModelQIndex => {
                let mc = match cfg.variant {
                    Variant::Model(mc) => mc,
                    Variant::Discrete => return Ok(Skipped("discrete variant".into())),
                };
                model_condition(c, mc, i, ell)
            }
        })
    }

    fn outside_exceptional(&self, ell: u64) -> Result<ConditionStatus> {
        use ConditionStatus::*;
        let sc = self.scanner()?;
        if let Some(p) = sc.support(ell).into_iter().next() {
            return Ok(Passed(format!("{p} divides d_{ell}")));
        }
        let cfg = &self.conditions.eds;
        if ell <= exact_reach(&self.fixture, cfg) {
            return Ok(if d_n(&self.fixture, ell, cfg)?.is_one() {
                Failed(format!("d_{ell} = 1"))
            } else {
                Passed(format!("d_{ell} > 1"))
            });
        }
        Ok(Skipped(format!(
            "no prime of S_{ell} below {} and d_{ell} beyond exact reach",
            sc.bound()
        )))
    }

    fn archimedean(&self, i: usize, ell: u64) -> Result<ConditionStatus> {
        use ConditionStatus::*;
        let (rp, theta) = self.angle()?;
        let window = rp.abs_x_exceeds(i as f64);
        let n = ell - 1;
        if let Some(inside) = window.classify(&theta.times(n)) {
            return Ok(archimedean_status(i, n, theta.times(n), &window, inside));
        }
        // Tighter quadrature, then give up on this prime.
        let fine = RealPeriod::new(&self.fixture.curve, self.conditions.angle_tol * REFINE);
        let th = fine.angle(&self.fixture.point)?;
        let window = fine.abs_x_exceeds(i as f64);
        Ok(match window.classify(&th.times(n)) {
            Some(inside) => archimedean_status(i, n, th.times(n), &window, inside),
            None => Failed(format!("{n} theta is within the error bound of the window edge")),
        })
    }

    /// Every `m` in `others`: the primitive part of `d_{ell m}` has a prime
    /// factor above `2^i`.
    fn primitive_large(&self, i: usize, ell: u64, others: &[u64], what: &str) -> Result<ConditionStatus> {
        use ConditionStatus::*;
        if others.is_empty() {
            return Ok(Passed(format!("no {what}")));
        }
        let threshold = if i < 63 { 1u64 << i } else { u64::MAX };
        if threshold > SMALL_PRIME_LIMIT {
            return Ok(Skipped(format!("2^{i} beyond trial-division range")));
        }
        let small = prime_sieve(threshold);
        let mut passed = Vec::new();
        let mut skipped = Vec::new();
        for &m in others {
            let n = match ell.checked_mul(m) {
                Some(n) if n <= self.conditions.pair_cap => n,
                _ => {
                    skipped.push(m);
                    continue;
                }
            };
            let part = primitive_part(&self.fixture, ell, m, n, &self.conditions.eds)?;
            let mut rest = part;
            for &p in &small {
                if rest.is_one() {
                    break;
                }
                rest = split_prime_power(&rest, p).1;
            }
            if rest.is_one() {
                return Ok(Failed(format!(
                    "primitive part of d_{n} has no prime above 2^{i}"
                )));
            }
            passed.push(m);
        }
        Ok(if skipped.is_empty() {
            Passed(format!("primitive parts with a prime above 2^{i} for {what}s {passed:?}"))
        } else {
            Skipped(format!(
                "checked {what}s {passed:?}; products with {skipped:?} exceed {}",
                self.conditions.pair_cap
            ))
        })
    }
}

fn archimedean_status(i: usize, n: u64, a: EllipticAngle, w: &AngleWindow, inside: bool) -> ConditionStatus {
    let ev = format!(
        "{n} theta = {:.12} (+-{:.1e}), window radius {:.12}",
        a.theta, a.error, w.near_zero.0
    );
    if inside {
        ConditionStatus::Passed(format!("|x_{n}| > {i}: {ev}"))
    } else {
        ConditionStatus::Failed(format!("|x_{n}| <= {i}: {ev}"))
    }
}

fn model_condition(c: Condition, mc: ModelCongruence, i: usize, ell: u64) -> ConditionStatus {
    use ConditionStatus::*;
    if (ell - 1) % mc.m != 0 {
        return if c == Condition::ModelModulus {
            Failed(format!("{ell} != 1 mod {}", mc.m))
        } else {
            Failed("ell - 1 not divisible by M".into())
        };
    }
    let t = (ell - 1) / mc.m;
    match c {
        Condition::ModelModulus => Passed(format!("{ell} = 1 mod {}", mc.m)),
        Condition::ModelPPower => {
            let e = val_u64(t, mc.p);
            if e as usize == i {
                Passed(format!("ord_{}((ell - 1)/M) = {e}", mc.p))
            } else {
                Failed(format!("ord_{}((ell - 1)/M) = {e} != {i}", mc.p))
            }
        }
        _ => {
            let divides = t % mc.q == 0;
            let in_b = b_member(i as u64);
            let ev = format!("{} | (ell - 1)/M: {divides}; {i} in B: {in_b}", mc.q);
            if divides == in_b {
                Passed(ev)
            } else {
                Failed(ev)
            }
        }
    }
}

/// `d_{ell m}` with every prime of `d_ell d_m` removed.
pub(crate) fn primitive_part(fixture: &CurveFixture, ell: u64, m: u64, n: u64, cfg: &EdsConfig) -> Result<BigUint> {
    let d = d_n(fixture, n, cfg)?;
    let old = if ell == m {
        d_n(fixture, ell, cfg)?
    } else {
        d_n(fixture, ell, cfg)? * d_n(fixture, m, cfg)?
    };
    Ok(crate::eds::remove_common_primes(&d, &old))
}

#[cfg(test)]
mod tests;
