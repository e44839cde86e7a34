use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_integer::Integer as _;

use super::{with_precision, EdsConfig};
use crate::arith::prime_sieve;
use crate::curve::{CurveFixture, SmallCurveMod};
use crate::Result;

/// Apparition index of a good prime: the order of `P mod p`.
pub fn apparition_index(fixture: &CurveFixture, p: u64) -> Result<u64> {
    fixture.order_mod_p(p)
}

/// Apparition indices of all good primes up to a bound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ApparitionTable {
    pub bound: u64,
    pub indices: BTreeMap<u64, u64>,
}

impl ApparitionTable {
    pub fn build(fixture: &CurveFixture, bound: u64) -> Result<Self> {
        let mut indices = BTreeMap::new();
        for p in prime_sieve(bound) {
            if fixture.is_good(p) {
                indices.insert(p, apparition_index(fixture, p)?);
            }
        }
        Ok(ApparitionTable { bound, indices })
    }

    pub fn get(&self, p: u64) -> Option<u64> {
        self.indices.get(&p).copied()
    }

    /// `S_n ∩ [2, bound]`.
    pub fn support(&self, n: u64) -> BTreeSet<u64> {
        self.indices
            .iter()
            .filter(|(_, &m)| n % m == 0)
            .map(|(&p, _)| p)
            .collect()
    }
}

/// Reductions of `P` modulo every good prime up to a bound, for repeated
/// `nP ≡ O (mod p)` queries.
#[derive(Debug, Clone)]
pub struct SupportScanner {
    bound: u64,
    entries: Vec<(u64, SmallCurveMod, (u64, u64, u64))>,
}

impl SupportScanner {
    pub fn new(fixture: &CurveFixture, bound: u64) -> Result<Self> {
        let mut entries = Vec::new();
        for p in prime_sieve(bound) {
            if !fixture.is_good(p) {
                continue;
            }
            let e = fixture.curve.reduce_small(p, 1)?;
            // A point with p in its denominator reduces to O: apparition 1.
            let pt = e.reduce(&fixture.point).unwrap_or((0, 1, 0));
            entries.push((p, e, pt));
        }
        Ok(SupportScanner { bound, entries })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// `S_n ∩ [2, bound]`.
    pub fn support(&self, n: u64) -> BTreeSet<u64> {
        self.entries
            .iter()
            .filter(|(_, e, pt)| e.kills(n, pt))
            .map(|(p, _, _)| *p)
            .collect()
    }

    /// Whether `p ∈ S_n` for a prime `p` covered by the scanner.
    pub fn contains(&self, p: u64, n: u64) -> Option<bool> {
        self.entries
            .binary_search_by_key(&p, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1.kills(n, &self.entries[i].2))
    }
}

/// `S_n ∩ [2, bound]` from apparition behaviour alone (no factoring).
pub fn s_truncated(fixture: &CurveFixture, n: u64, bound: u64) -> Result<BTreeSet<u64>> {
    Ok(SupportScanner::new(fixture, bound)?.support(n))
}

/// `S_m ∩ S_n = S_gcd(m,n)` on truncated supports.
pub fn intersec_check(fixture: &CurveFixture, m: u64, n: u64, bound: u64) -> Result<bool> {
    let sc = SupportScanner::new(fixture, bound)?;
    let lhs: BTreeSet<u64> = sc.support(m).intersection(&sc.support(n)).copied().collect();
    Ok(lhs == sc.support(m.gcd(&n)))
}

/// `ord_p(d_n)` together with the precision exponent that decided it.
pub fn ord_in_denom_at(
    fixture: &CurveFixture,
    p: u64,
    n: u64,
    k0: u32,
    cfg: &EdsConfig,
) -> Result<(u32, u32)> {
    let (v, k) = with_precision(k0, cfg.precision_cap, |k| fixture.ord_x(n, p, k))?;
    Ok(((-v).max(0) as u32, k))
}

/// `ord_p(d_n)` via mod-`p^k` arithmetic.
///
/// The starting precision comes from the growth law: with `n = m_p p^e u`,
/// `ord_p d_n = ord_p d_{m_p} + 2e`.
pub fn ord_in_denom(fixture: &CurveFixture, p: u64, n: u64, cfg: &EdsConfig) -> Result<u32> {
    let m = apparition_index(fixture, p)?;
    ord_in_denom_with_apparition(fixture, p, n, m, cfg)
}

pub(crate) fn ord_in_denom_with_apparition(
    fixture: &CurveFixture,
    p: u64,
    n: u64,
    m: u64,
    cfg: &EdsConfig,
) -> Result<u32> {
    if n % m != 0 {
        return Ok(0);
    }
    let (base, _) = ord_in_denom_at(fixture, p, m, 8, cfg)?;
    let expected = base + 2 * p_adic_u64(n / m, p);
    let (v, _) = ord_in_denom_at(fixture, p, n, 8.max(2 + expected), cfg)?;
    Ok(v)
}

/// `ord_p(d_{m_p}) + 2 ord_p(n / m_p)` when `m_p | n`, else 0.
pub fn growth_law_prediction(fixture: &CurveFixture, p: u64, n: u64, cfg: &EdsConfig) -> Result<u32> {
    let m = apparition_index(fixture, p)?;
    if n % m != 0 {
        return Ok(0);
    }
    let (base, _) = ord_in_denom_at(fixture, p, m, 8, cfg)?;
    Ok(base + 2 * p_adic_u64(n / m, p))
}

pub(crate) fn p_adic_u64(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// `{n <= N : ord_p d_n >= e}` and the generator `z` it should have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupReport {
    pub p: u64,
    pub e: u32,
    pub bound: u64,
    pub members: Vec<u64>,
    /// Smallest member; `None` if no `n <= N` qualifies.
    pub z: Option<u64>,
    /// First `n` where membership disagrees with `z Z`.
    pub counterexample: Option<u64>,
}

impl SubgroupReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub fn verify_subgroup(
    fixture: &CurveFixture,
    p: u64,
    e: u32,
    bound: u64,
    cfg: &EdsConfig,
) -> Result<SubgroupReport> {
    let m = apparition_index(fixture, p)?;
    let mut members = Vec::new();
    for n in 1..=bound {
        if ord_in_denom_with_apparition(fixture, p, n, m, cfg)? >= e {
            members.push(n);
        }
    }
    let z = members.first().copied();
    let counterexample = match z {
        None => None,
        Some(z) => (1..=bound).find(|n| (n % z == 0) != members.binary_search(n).is_ok()),
    };
    Ok(SubgroupReport {
        p,
        e,
        bound,
        members,
        z,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eds::d_sequence_exact;
    use num_bigint::BigUint;

    #[test]
    fn apparition_examples() {
        let f = CurveFixture::standard();
        assert_eq!(apparition_index(&f, 5).unwrap(), 2);
        assert_eq!(apparition_index(&f, 7).unwrap(), 7);
        assert!(apparition_index(&f, 3).is_err());
        // p = 11 against the exact denominators.
        let cfg = EdsConfig::default();
        let ds = d_sequence_exact(&f, 60, &cfg).unwrap();
        let first = ds.iter().position(|d| (d % 11u32) == BigUint::from(0u32)).unwrap() as u64 + 1;
        assert_eq!(apparition_index(&f, 11).unwrap(), first);
    }

    #[test]
    fn ord_in_denom_examples() {
        let f = CurveFixture::standard();
        let cfg = EdsConfig::default();
        assert_eq!(ord_in_denom(&f, 5, 2, &cfg).unwrap(), 2);
        assert_eq!(ord_in_denom(&f, 5, 10, &cfg).unwrap(), 4);
        assert_eq!(ord_in_denom(&f, 5, 3, &cfg).unwrap(), 0);
    }

    #[test]
    fn truncated_support_examples() {
        let f = CurveFixture::standard();
        assert_eq!(s_truncated(&f, 2, 100_000).unwrap(), BTreeSet::from([5]));
        assert!(s_truncated(&f, 1, 100_000).unwrap().is_empty());
        let s14 = s_truncated(&f, 14, 100).unwrap();
        assert!(s14.contains(&5) && s14.contains(&7));
    }

    #[test]
    fn subgroup_examples() {
        let f = CurveFixture::standard();
        let cfg = EdsConfig::default();
        assert_eq!(verify_subgroup(&f, 5, 1, 60, &cfg).unwrap().z, Some(2));
        let r = verify_subgroup(&f, 5, 3, 60, &cfg).unwrap();
        assert_eq!(r.z, Some(10));
        assert!(r.holds());
        assert_eq!(verify_subgroup(&f, 7, 1, 60, &cfg).unwrap().z, Some(7));
    }

    #[test]
    fn intersection_examples() {
        let f = CurveFixture::standard();
        assert!(intersec_check(&f, 2, 3, 100_000).unwrap());
        assert!(intersec_check(&f, 4, 6, 100_000).unwrap());
        assert!(intersec_check(&f, 9, 9, 1000).unwrap());
        let sc = SupportScanner::new(&f, 100_000).unwrap();
        let both: BTreeSet<u64> = sc.support(4).intersection(&sc.support(6)).copied().collect();
        assert_eq!(both, BTreeSet::from([5]));
    }

    #[test]
    fn table_agrees_with_scanner() {
        let f = CurveFixture::standard();
        let t = ApparitionTable::build(&f, 2000).unwrap();
        let sc = SupportScanner::new(&f, 2000).unwrap();
        for n in 1..=40 {
            assert_eq!(t.support(n), sc.support(n), "n = {n}");
        }
    }
}
