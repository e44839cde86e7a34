//! A model of `(Z>=1, +, B)` inside the multiples of `P`: index `i` is
//! encoded by `x(ell_i P)`, and `p`- and `q`-adic valuations of
//! `x_{ell_i} - x_1` recover `i` and membership of `i` in `B`.
//!
//! Only valuations are stored; the coordinates themselves have millions of
//! digits.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::arith::{is_prime_u64, Rational};
use crate::curve::CurveFixture;
use crate::eds::with_precision;
use crate::primeseq::{Certificate, ModelCongruence, SeqConditions, SequenceState};
use crate::zstruct::b_member;
use crate::{Error, Result};

/// Starting precision exponent for `mod p^k` valuations.
pub const START_PRECISION: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    pub p: u64,
    pub q: u64,
    pub count_p: u64,
    pub count_q: u64,
    /// `p q #E(F_p) #E(F_q)`.
    pub m: u64,
    /// `ord_p(x_{M+1} - x_1)`.
    pub c: i64,
    /// `ord_q(x_{M+1} - x_1)`.
    pub cq: i64,
}

impl ModelParams {
    pub fn congruence(&self) -> ModelCongruence {
        ModelCongruence {
            p: self.p,
            q: self.q,
            m: self.m,
        }
    }
}

fn admissible(fixture: &CurveFixture, p: u64) -> bool {
    let integral = |r: &Rational| !(r.denom() % p).is_zero();
    let (x1, y1) = (fixture.x1(), fixture.y1());
    p > 2
        && is_prime_u64(p)
        && fixture.is_good(p)
        && integral(x1)
        && integral(y1)
        && !(y1.numer() % p).is_zero()
}

/// The two smallest odd good primes dividing neither `y_1` nor the
/// denominator of `P`.
pub fn choose_pq(fixture: &CurveFixture) -> Result<(u64, u64)> {
    let mut found = Vec::new();
    let mut p = 3u64;
    while found.len() < 2 {
        if admissible(fixture, p) {
            found.push(p);
        }
        p += 2;
    }
    Ok((found[0], found[1]))
}

/// `ord_p(x_{mN+1} - x_1)` by arithmetic in `E(Z/p^k)`, raising `k` until
/// the answer is determined. Requires `p | d_N`.
pub fn xdiff_valuation(fixture: &CurveFixture, m: u64, n: u64, p: u64, k: u32) -> Result<i64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and N must be positive".into()));
    }
    if !fixture.mul_mod(n, p, 1)?.is_identity_mod_p() {
        return Err(Error::Precondition(format!("{p} does not divide d_{n}")));
    }
    let idx = m
        .checked_mul(n)
        .and_then(|v| v.checked_add(1))
        .ok_or(Error::BudgetExceeded {
            what: "multiple index",
            cap: u64::MAX,
        })?;
    let x1 = fixture.x1().clone();
    let (v, _) = with_precision(k, 512, |k| fixture.mul_mod(idx, p, k)?.x_diff_valuation(&x1))?;
    Ok(v)
}

/// `ord_p(x_n - x_1)` for any `n`.
fn diff_valuation(fixture: &CurveFixture, n: u64, p: u64) -> Result<(i64, u32)> {
    let x1 = fixture.x1().clone();
    with_precision(START_PRECISION, 512, |k| fixture.mul_mod(n, p, k)?.x_diff_valuation(&x1))
}

pub fn build_params(fixture: &CurveFixture, p: u64, q: u64) -> Result<ModelParams> {
    if p == q || !admissible(fixture, p) || !admissible(fixture, q) {
        return Err(Error::InvalidArgument(format!("({p}, {q}) is not an admissible pair")));
    }
    let count_p = fixture.curve.count_points(p)?;
    let count_q = fixture.curve.count_points(q)?;
    let m = [p, q, count_p, count_q]
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(v))
        .ok_or(Error::BudgetExceeded {
            what: "modulus M",
            cap: u64::MAX,
        })?;
    let c = xdiff_valuation(fixture, 1, m, p, START_PRECISION)?;
    let cq = xdiff_valuation(fixture, 1, m, q, START_PRECISION)?;
    Ok(ModelParams {
        p,
        q,
        count_p,
        count_q,
        m,
        c,
        cq,
    })
}

/// Valuations of `x_{ell_i} - x_1` at `p` and `q`, with the precision used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermValuations {
    pub ell: u64,
    pub at_p: i64,
    pub at_q: i64,
    pub precision_p: u32,
    pub precision_q: u32,
}

#[derive(Debug)]
pub struct ModelInstance {
    pub params: ModelParams,
    pub sequence: SequenceState,
    /// `terms[i - 1]` belongs to `ell_i`.
    pub terms: Vec<TermValuations>,
}

impl ModelInstance {
    /// Build `ell_1, ..., ell_k` under the model congruences (density and
    /// primitive-divisor conditions skipped) and cache their valuations.
    pub fn build(fixture: &CurveFixture, params: ModelParams, k: usize) -> Result<Self> {
        Self::build_with(fixture, params, SeqConditions::model(params.congruence()), k)
    }

    pub fn build_with(fixture: &CurveFixture, params: ModelParams, conditions: SeqConditions, k: usize) -> Result<Self> {
        let mut sequence = SequenceState::new(fixture, conditions)?;
        sequence.build(k)?;
        let mut terms = Vec::with_capacity(k);
        for ell in sequence.ells() {
            let (at_p, precision_p) = diff_valuation(fixture, ell, params.p)?;
            let (at_q, precision_q) = diff_valuation(fixture, ell, params.q)?;
            terms.push(TermValuations {
                ell,
                at_p,
                at_q,
                precision_p,
                precision_q,
            });
        }
        Ok(ModelInstance {
            params,
            sequence,
            terms,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.sequence.chosen
    }

    fn term(&self, i: usize) -> Result<&TermValuations> {
        if i == 0 || i > self.terms.len() {
            return Err(Error::InvalidArgument(format!(
                "index {i} outside the built range 1..={}",
                self.terms.len()
            )));
        }
        Ok(&self.terms[i - 1])
    }

    /// `ord_p(x_{ell_i} - x_1) - c`.
    pub fn decode(&self, i: usize) -> Result<i64> {
        Ok(self.term(i)?.at_p - self.params.c)
    }

    /// The valuation relation standing for `i + j = k`.
    pub fn verify_addition(&self, i: usize, j: usize, k: usize) -> Result<bool> {
        Ok(self.term(i)?.at_p + self.term(j)?.at_p == self.term(k)?.at_p + self.params.c)
    }

    /// The valuation relation standing for `i` in `B`.
    pub fn b_test(&self, i: usize) -> Result<bool> {
        Ok(self.term(i)?.at_q > self.params.cq)
    }

    /// Whether the `q`-adic test agrees with direct membership of `i` in `B`.
    pub fn verify_b_membership(&self, i: usize) -> Result<bool> {
        Ok(self.b_test(i)? == b_member(i as u64))
    }

    /// `ord_v(x_{ell_i} - x_1)` for `i <= horizon`.
    pub fn convergence_profile(&self, v: u64, horizon: usize) -> Result<ConvergenceReport> {
        let fixture = self.sequence.fixture();
        let mut valuations = Vec::new();
        for t in self.terms.iter().take(horizon) {
            let val = if v == self.params.p {
                t.at_p
            } else if v == self.params.q {
                t.at_q
            } else {
                diff_valuation(fixture, t.ell, v)?.0
            };
            valuations.push(val);
        }
        let nondecreasing = valuations.windows(2).all(|w| w[0] <= w[1]);
        Ok(ConvergenceReport {
            v,
            valuations,
            nondecreasing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub v: u64,
    pub valuations: Vec<i64>,
    pub nondecreasing: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val7(mut m: u64) -> i64 {
        let mut e = 0;
        while m % 7 == 0 {
            m /= 7;
            e += 1;
        }
        e
    }

    /// `ord_p` of an exact rational, by repeated division.
    fn exact_ord(x: &Rational, p: u64) -> i64 {
        let p = num_bigint::BigInt::from(p);
        let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        while (&d % &p).is_zero() {
            d /= &p;
            e -= 1;
        }
        e
    }

    #[test]
    fn pair_selection() {
        let f = CurveFixture::standard();
        assert_eq!(choose_pq(&f).unwrap(), (7, 11));
        assert!(!admissible(&f, 5));
        assert!(!admissible(&f, 3));
        assert!(build_params(&f, 5, 7).is_err());
    }

    #[test]
    fn params_on_fixture() {
        let f = CurveFixture::standard();
        let mp = build_params(&f, 7, 11).unwrap();
        assert_eq!((mp.count_p, mp.count_q), (7, 12));
        assert_eq!(mp.m, 7 * 11 * 7 * 12);
        // Stable under more precision.
        for k in [START_PRECISION, START_PRECISION + 4, 20] {
            assert_eq!(xdiff_valuation(&f, 1, mp.m, 7, k).unwrap(), mp.c);
            assert_eq!(xdiff_valuation(&f, 1, mp.m, 11, k).unwrap(), mp.cq);
        }
        assert!(mp.c >= 1 && mp.cq >= 1);
    }

    #[test]
    fn xdiff_law_at_seven() {
        let f = CurveFixture::standard();
        let v0 = xdiff_valuation(&f, 1, 7, 7, 4).unwrap();
        assert!(v0 >= 1);
        let mult = f.curve.multiples(&f.point, 57).unwrap();
        for m in 1..=60u64 {
            let v = xdiff_valuation(&f, m, 7, 7, 4).unwrap();
            assert_eq!(v, v0 + val7(m), "m = {m}");
            let n = (7 * m + 1) as usize;
            if n <= mult.len() {
                let diff = mult[n - 1].x().unwrap() - f.x1();
                assert_eq!(exact_ord(&diff, 7), v, "m = {m}");
            }
        }
        assert!(matches!(xdiff_valuation(&f, 1, 3, 7, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn xdiff_law_at_eleven() {
        let f = CurveFixture::standard();
        let n = f.order_mod_p(11).unwrap();
        let v0 = xdiff_valuation(&f, 1, n, 11, 4).unwrap();
        for m in 1..=60u64 {
            let mut e = 0;
            let mut t = m;
            while t % 11 == 0 {
                t /= 11;
                e += 1;
            }
            assert_eq!(xdiff_valuation(&f, m, n, 11, 4).unwrap(), v0 + e);
        }
    }

    #[test]
    fn model_instance() {
        let f = CurveFixture::standard();
        let mp = build_params(&f, 7, 11).unwrap();
        let inst = ModelInstance::build(&f, mp, 4).unwrap();
        for i in 1..=4 {
            assert_eq!(inst.decode(i).unwrap(), i as i64);
            assert!(inst.verify_b_membership(i).unwrap());
            for j in 1..=4 {
                for k in 1..=4 {
                    assert_eq!(inst.verify_addition(i, j, k).unwrap(), i + j == k);
                }
            }
        }
        assert!(!inst.b_test(1).unwrap());
        assert!(inst.b_test(3).unwrap());
        assert!(inst.decode(5).is_err());
        let prof = inst.convergence_profile(7, 4).unwrap();
        assert!(prof.nondecreasing);
        assert_eq!(prof.valuations, [mp.c + 1, mp.c + 2, mp.c + 3, mp.c + 4]);
        let q = inst.convergence_profile(11, 4).unwrap();
        assert_eq!(q.valuations.iter().map(|&v| v > mp.cq).collect::<Vec<_>>(), [false, false, true, false]);
        // A prime away from p and q is only reported.
        assert_eq!(inst.convergence_profile(13, 4).unwrap().valuations.len(), 4);
    }
}
