//! Denominators of the multiples `nP`: exact profiles for small `n`,
//! apparition indices and truncated supports `S_n` for large `n`, the
//! valuation growth law, height slopes and primitive divisors.

mod apparition;
mod primitive;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, Zero};

use crate::arith::{factor, ln_biguint, split_prime_power, FactorBudget, FactoredInteger, Rational};
use crate::curve::CurveFixture;
use crate::{Error, Result};

pub use apparition::{
    apparition_index, growth_law_prediction, intersec_check, ord_in_denom, ord_in_denom_at,
    s_truncated, verify_subgroup, ApparitionTable, SubgroupReport, SupportScanner,
};
pub use primitive::{
    a_ell, build_l, exactorder_check, p_ell, primitive_prime, AEll, ExactOrderReport,
    LExceptional, PEll, PrimitivePrime,
};

/// Limits for exact and mod-`p^k` computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdsConfig {
    /// Largest `n` for which `x_n` is computed as an exact rational.
    pub exact_cap: u64,
    pub budget: FactorBudget,
    /// Largest precision exponent `k` tried in mod-`p^k` arithmetic.
    pub precision_cap: u32,
    /// Largest `n` for which `d_n` is taken from the division values
    /// `W_n` (integral `P` only).
    pub division_cap: u64,
}

impl Default for EdsConfig {
    fn default() -> Self {
        EdsConfig {
            exact_cap: 60,
            budget: FactorBudget::new(100_000, 20_000),
            precision_cap: 512,
            division_cap: 1000,
        }
    }
}

/// The divisor data of `x_n` split into good denominator, good numerator and
/// bad-prime parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DenomProfile {
    pub n: u64,
    /// `d_n`: the denominator of `x_n` with bad primes removed.
    pub d_n: BigUint,
    /// Factorization of `d_n` (exponents are `-ord_p x_n`).
    pub denom_ideal: FactoredInteger,
    /// Factorization of the numerator of `x_n` with bad primes removed.
    pub numerator_part: FactoredInteger,
    /// `ord_p x_n` for each bad prime.
    pub bad_part: BTreeMap<u64, i64>,
    pub log_denominator: f64,
    /// Whether every exponent found in `denom_ideal` is even.
    pub exponents_even: bool,
}

impl DenomProfile {
    /// Primes of `d_n` found by the factorization (all of `S_n` when complete).
    pub fn support(&self) -> Vec<u64> {
        self.denom_ideal.factors.keys().copied().collect()
    }
}

/// `|m|` with every bad prime removed, and the removed exponents.
fn strip_bad(m: &BigUint, bad: &[u64]) -> (BigUint, BTreeMap<u64, i64>) {
    let mut rest = m.clone();
    let mut exps = BTreeMap::new();
    for &p in bad {
        if rest.is_zero() {
            exps.insert(p, 0);
            continue;
        }
        let (e, r) = split_prime_power(&rest, p);
        rest = r;
        exps.insert(p, e as i64);
    }
    (rest, exps)
}

fn check_exact(fixture: &CurveFixture, n: u64, cfg: &EdsConfig) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    if n > cfg.exact_cap {
        return Err(Error::BudgetExceeded {
            what: "exact multiple index",
            cap: cfg.exact_cap,
        });
    }
    let _ = fixture;
    Ok(())
}

/// `d_n` from an exact `x_n`.
pub fn denominator_good_part(fixture: &CurveFixture, x: &Rational) -> BigUint {
    let bad: Vec<u64> = fixture.bad_primes.iter().copied().collect();
    strip_bad(x.denom().magnitude(), &bad).0
}

/// `d_n` computed exactly.
pub fn d_n_exact(fixture: &CurveFixture, n: u64, cfg: &EdsConfig) -> Result<BigUint> {
    check_exact(fixture, n, cfg)?;
    let pt = fixture.multiple(n as i64);
    Ok(denominator_good_part(fixture, pt.x().expect("P has infinite order")))
}

/// The division values `W_n = psi_n(P)` of an integral point: `W_1 = 1`,
/// `W_2 = 2y` and the usual duplication recurrences.
pub fn division_value(fixture: &CurveFixture, n: u64) -> Result<BigInt> {
    let (x, y) = match (fixture.x1().is_integer(), fixture.y1().is_integer()) {
        (true, true) => (fixture.x1().to_integer(), fixture.y1().to_integer()),
        _ => return Err(Error::Precondition("division values need an integral point".into())),
    };
    let (a, b) = (&fixture.curve.a, &fixture.curve.b);
    let x2 = &x * &x;
    let x3 = &x2 * &x;
    let w3 = BigInt::from(3) * &x2 * &x2 + BigInt::from(6) * a * &x2 + BigInt::from(12) * b * &x - a * a;
    let w4 = BigInt::from(4)
        * &y
        * (&x3 * &x3 + BigInt::from(5) * a * &x2 * &x2 + BigInt::from(20) * b * &x3
            - BigInt::from(5) * a * a * &x2
            - BigInt::from(4) * a * b * &x
            - BigInt::from(8) * b * b
            - a * a * a);
    let mut memo = BTreeMap::new();
    memo.insert(0u64, BigInt::zero());
    memo.insert(1, BigInt::one());
    memo.insert(2, BigInt::from(2) * &y);
    memo.insert(3, w3);
    memo.insert(4, w4);
    Ok(division_rec(n, &mut memo))
}

fn division_rec(n: u64, memo: &mut BTreeMap<u64, BigInt>) -> BigInt {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let m = n / 2;
    let mut w = |i: u64| division_rec(i, memo);
    let v = if n % 2 == 1 {
        let (wm2, wm, wm1, wmp1) = (w(m + 2), w(m), w(m - 1), w(m + 1));
        wm2 * wm.pow(3) - wm1 * wmp1.pow(3)
    } else {
        let (wm, wm2, wm1, wmm2, wmp1, w2) = (w(m), w(m + 2), w(m - 1), w(m - 2), w(m + 1), w(2));
        wm * (wm2 * wm1.pow(2) - wmm2 * wmp1.pow(2)) / w2
    };
    memo.insert(n, v.clone());
    v
}

/// `d_n` by the cheapest exact route: `W_n^2` with bad primes removed for
/// an integral point, else the exact multiple.
pub fn d_n(fixture: &CurveFixture, n: u64, cfg: &EdsConfig) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    let integral = fixture.x1().is_integer() && fixture.y1().is_integer();
    if integral && n <= cfg.division_cap {
        let w = division_value(fixture, n)?;
        let bad: Vec<u64> = fixture.bad_primes.iter().copied().collect();
        return Ok(strip_bad(&(w.magnitude() * w.magnitude()), &bad).0);
    }
    d_n_exact(fixture, n, cfg)
}

/// Largest `n` for which [`d_n`] succeeds.
pub fn exact_reach(fixture: &CurveFixture, cfg: &EdsConfig) -> u64 {
    let integral = fixture.x1().is_integer() && fixture.y1().is_integer();
    if integral {
        cfg.exact_cap.max(cfg.division_cap)
    } else {
        cfg.exact_cap
    }
}

/// `[d_1, ..., d_n]` computed exactly by repeated addition.
pub fn d_sequence_exact(fixture: &CurveFixture, n: u64, cfg: &EdsConfig) -> Result<Vec<BigUint>> {
    check_exact(fixture, n, cfg)?;
    let mult = fixture.curve.multiples(&fixture.point, n as usize)?;
    Ok(mult
        .iter()
        .map(|q| denominator_good_part(fixture, q.x().expect("P has infinite order")))
        .collect())
}

pub fn denom_profile_exact(fixture: &CurveFixture, n: u64, cfg: &EdsConfig) -> Result<DenomProfile> {
    check_exact(fixture, n, cfg)?;
    let pt = fixture.multiple(n as i64);
    let x = pt.x().expect("P has infinite order");
    profile_from_x(fixture, n, x, cfg)
}

pub(crate) fn profile_from_x(
    fixture: &CurveFixture,
    n: u64,
    x: &Rational,
    cfg: &EdsConfig,
) -> Result<DenomProfile> {
    let bad: Vec<u64> = fixture.bad_primes.iter().copied().collect();
    let (d_n, den_bad) = strip_bad(x.denom().magnitude(), &bad);
    let (num_good, num_bad) = strip_bad(x.numer().magnitude(), &bad);
    let bad_part = bad
        .iter()
        .map(|p| (*p, num_bad[p] - den_bad[p]))
        .collect::<BTreeMap<_, _>>();
    let denom_ideal = factor(&BigInt::from(d_n.clone()), &cfg.budget)?;
    let numerator_part = if num_good.is_zero() {
        FactoredInteger {
            cofactor: BigInt::zero(),
            ..FactoredInteger::one()
        }
    } else {
        factor(&BigInt::from(num_good), &cfg.budget)?
    };
    let exponents_even = denom_ideal.factors.values().all(|e| e % 2 == 0);
    Ok(DenomProfile {
        n,
        log_denominator: ln_biguint(&d_n),
        d_n,
        denom_ideal,
        numerator_part,
        bad_part,
        exponents_even,
    })
}

/// Rows `(n, log d_n / n^2)` and the median ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightSlope {
    pub rows: Vec<(u64, f64)>,
    pub median: f64,
}

impl HeightSlope {
    /// `max / min` over rows with positive ratio.
    pub fn spread(&self) -> f64 {
        let pos: Vec<f64> = self.rows.iter().map(|r| r.1).filter(|&v| v > 0.0).collect();
        if pos.is_empty() {
            return f64::INFINITY;
        }
        let max = pos.iter().cloned().fold(f64::MIN, f64::max);
        let min = pos.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

pub fn height_slope(
    fixture: &CurveFixture,
    lo: u64,
    hi: u64,
    cfg: &EdsConfig,
) -> Result<HeightSlope> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidArgument("empty or invalid index range".into()));
    }
    let ds = d_sequence_exact(fixture, hi, cfg)?;
    let rows: Vec<(u64, f64)> = (lo..=hi)
        .map(|n| {
            let d = &ds[(n - 1) as usize];
            let l = if d.is_one() { 0.0 } else { ln_biguint(d) };
            (n, l / (n * n) as f64)
        })
        .collect();
    let mut sorted: Vec<f64> = rows.iter().map(|r| r.1).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(HeightSlope { rows, median })
}

/// Run `f` at precision `k0`, doubling on insufficient precision up to `cap`.
pub(crate) fn with_precision<T>(k0: u32, cap: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<(T, u32)> {
    let mut k = k0.max(1);
    loop {
        match f(k) {
            Ok(v) => return Ok((v, k)),
            Err(Error::PrecisionInsufficient { .. }) if k < cap => {
                k = (k * 2).min(cap);
            }
            Err(Error::PrecisionInsufficient { .. }) => {
                return Err(Error::PrecisionInsufficient {
                    have: k,
                    required: k.saturating_mul(2),
                })
            }
            Err(e) => return Err(e),
        }
    }
}

/// Whether `g` divides `n`, for big integers.
pub(crate) fn divides(g: &BigUint, n: &BigUint) -> bool {
    (n % g).is_zero()
}

/// `gcd(a, b)`, reducing the larger argument first; much faster when the
/// sizes differ a lot.
pub(crate) fn gcd_reduced(a: &BigUint, b: &BigUint) -> BigUint {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return b.clone();
    }
    if a > b {
        b.gcd(&(a % b))
    } else {
        a.gcd(&(b % a))
    }
}

/// Remove from `g` every prime that also divides `h`.
pub(crate) fn remove_common_primes(g: &BigUint, h: &BigUint) -> BigUint {
    let mut g = g.clone();
    loop {
        let c = gcd_reduced(&g, h);
        if c.is_one() {
            return g;
        }
        g /= c;
    }
}
