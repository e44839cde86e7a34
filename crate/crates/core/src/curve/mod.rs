//! Short Weierstrass curves `y^2 = x^3 + a x + b` over the rationals, their
//! reductions modulo primes and prime powers, and the real elliptic logarithm.

mod ellog;
mod projective;

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    factor, FactorBudget, Integer, Rational, SmallRing,
};
use crate::{Error, Result};

pub use ellog::{elliptic_log_angle, AngleWindow, EllipticAngle, RealPeriod};
pub use projective::{ProjectivePointMod, SmallCurveMod};

/// Default ceiling on `p` for [`WeierstrassCurve::count_points`].
pub const POINT_COUNT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a: Integer,
    pub b: Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl Point {
    pub fn affine(x: Rational, y: Rational) -> Self {
        Point::Affine { x, y }
    }

    pub fn from_integers(x: i64, y: i64) -> Self {
        Point::Affine {
            x: Rational::from_integer(x.into()),
            y: Rational::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }
}

impl WeierstrassCurve {
    pub fn new(a: Integer, b: Integer) -> Result<Self> {
        let e = WeierstrassCurve { a, b };
        if e.disc_core().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(e)
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Self::new(a.into(), b.into())
    }

    /// `4a^3 + 27b^2`.
    pub fn disc_core(&self) -> Integer {
        BigInt::from(4) * self.a.pow(3) + BigInt::from(27) * self.b.pow(2)
    }

    /// `-16(4a^3 + 27b^2)`.
    pub fn discriminant(&self) -> Integer {
        -BigInt::from(16) * self.disc_core()
    }

    /// Whether `p` is a prime of good reduction for this model.
    pub fn has_good_reduction(&self, p: u64) -> bool {
        p != 2 && !(self.disc_core() % BigInt::from(p)).is_zero()
    }

    /// Right-hand side `x^3 + a x + b`.
    pub fn rhs(&self, x: &Rational) -> Rational {
        let a = Rational::from_integer(self.a.clone());
        let b = Rational::from_integer(self.b.clone());
        x * x * x + a * x + b
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn neg(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(neg_point(p))
    }

    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    /// Chord-tangent addition; inputs are assumed to lie on the curve.
    pub fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Infinity;
            }
            let three_x2 = x1 * x1 * Rational::from_integer(3.into());
            (three_x2 + Rational::from_integer(self.a.clone())) / (y1 * Rational::from_integer(2.into()))
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        Point::Affine { x: x3, y: y3 }
    }

    /// `n P` by double-and-add; `mul(0, P) = O`, `mul(-n, P) = -mul(n, P)`.
    pub fn mul(&self, n: i64, p: &Point) -> Result<Point> {
        self.check(p)?;
        let mut acc = Point::Infinity;
        let mut base = p.clone();
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        Ok(if n < 0 { neg_point(&acc) } else { acc })
    }

    /// `[P, 2P, ..., nP]` by repeated addition.
    pub fn multiples(&self, p: &Point, n: usize) -> Result<Vec<Point>> {
        self.check(p)?;
        let mut out = Vec::with_capacity(n);
        let mut acc = Point::Infinity;
        for _ in 0..n {
            acc = self.add_unchecked(&acc, p);
            out.push(acc.clone());
        }
        Ok(out)
    }

    /// `#E(F_p)` counted with a table of squares, `O(p)`.
    pub fn count_points(&self, p: u64) -> Result<u64> {
        self.count_points_capped(p, POINT_COUNT_CAP)
    }

    pub fn count_points_capped(&self, p: u64, cap: u64) -> Result<u64> {
        if !crate::arith::is_prime_u64(p) {
            return Err(Error::NotPrime(alloc::format!("{p}")));
        }
        if !self.has_good_reduction(p) {
            return Err(Error::BadReduction(p));
        }
        if p > cap {
            return Err(Error::BudgetExceeded {
                what: "point counting prime",
                cap,
            });
        }
        let a = reduce_i(&self.a, p);
        let b = reduce_i(&self.b, p);
        let mut is_square = vec![false; p as usize];
        for y in 0..=p / 2 {
            is_square[((y * y) % p) as usize] = true;
        }
        let mut count = 1u64;
        for x in 0..p {
            // x^3 + a x + b without u128: p < 2^32 is guaranteed by the cap.
            let x2 = x * x % p;
            let f = (x2 * x % p + a * x % p + b) % p;
            count += if f == 0 {
                1
            } else if is_square[f as usize] {
                2
            } else {
                0
            };
        }
        Ok(count)
    }

    /// Exact order of `E(Q)_tors`.
    ///
    /// The gcd of `#E(F_p)` over small good primes bounds it; the Lutz-Nagell
    /// candidates `(x, y)` with `y = 0` or `y^2 | 4a^3 + 27b^2` are then tested.
    pub fn torsion_order(&self) -> Result<u64> {
        let mut bound = 0u64;
        let mut used = 0;
        let mut p = 3u64;
        while used < 8 {
            p = crate::arith::next_prime_u64(p);
            if self.has_good_reduction(p) {
                bound = bound.gcd(&self.count_points(p)?);
                used += 1;
            }
        }

        let d = self.disc_core().abs();
        let budget = FactorBudget::default();
        let fd = factor(&d, &budget)?;
        if !fd.is_complete() {
            return Err(Error::BudgetExceeded {
                what: "discriminant factorization",
                cap: budget.rho_iterations,
            });
        }
        // y ranges over 0 and the nonnegative integers with y^2 | d.
        let mut ys: Vec<Integer> = vec![Integer::one()];
        for (&q, &e) in &fd.factors {
            let mut next = Vec::new();
            for y in &ys {
                let mut m = y.clone();
                for _ in 0..=e / 2 {
                    next.push(m.clone());
                    m *= q;
                }
            }
            ys = next;
        }
        ys.push(Integer::zero());

        let mut count = 1u64;
        for y in ys {
            for x in self.integer_roots_shifted(&(&y * &y))? {
                let pts = if y.is_zero() {
                    vec![(x, y.clone())]
                } else {
                    vec![(x.clone(), y.clone()), (x, -y.clone())]
                };
                for (x, y) in pts {
                    let pt = Point::Affine {
                        x: Rational::from_integer(x),
                        y: Rational::from_integer(y),
                    };
                    if self.is_torsion(&pt, bound.max(1)) {
                        count += 1;
                    }
                }
            }
        }
        if bound % count != 0 {
            return Err(Error::Precondition(alloc::format!(
                "torsion count {count} does not divide point-count gcd {bound}"
            )));
        }
        Ok(count)
    }

    /// Integer roots of `x^3 + a x + (b - c)`.
    fn integer_roots_shifted(&self, c: &Integer) -> Result<Vec<Integer>> {
        let k = &self.b - c;
        let eval = |x: &Integer| x * x * x + &self.a * x + &k;
        let mut candidates: Vec<Integer> = Vec::new();
        if k.is_zero() {
            candidates.push(Integer::zero());
            // x^2 + a = 0
            if !self.a.is_positive() {
                let r = (-self.a.clone()).sqrt();
                candidates.push(r.clone());
                candidates.push(-r);
            }
        } else {
            let fk = factor(&k, &FactorBudget::default())?;
            if !fk.is_complete() {
                return Err(Error::BudgetExceeded {
                    what: "constant-term factorization",
                    cap: FactorBudget::default().rho_iterations,
                });
            }
            let mut divs = vec![Integer::one()];
            for (&q, &e) in &fk.factors {
                let mut next = Vec::new();
                for dv in &divs {
                    let mut m = dv.clone();
                    for _ in 0..=e {
                        next.push(m.clone());
                        m *= q;
                    }
                }
                divs = next;
            }
            for dv in divs {
                candidates.push(-dv.clone());
                candidates.push(dv);
            }
        }
        let mut roots: Vec<Integer> = candidates.into_iter().filter(|x| eval(x).is_zero()).collect();
        roots.sort();
        roots.dedup();
        Ok(roots)
    }

    /// Whether `m P = O` for some `1 <= m <= max_order`, bailing out as soon
    /// as a multiple is non-integral (torsion points have integral multiples).
    fn is_torsion(&self, p: &Point, max_order: u64) -> bool {
        let mut acc = p.clone();
        for _ in 1..=max_order.max(12) {
            match &acc {
                Point::Infinity => return true,
                Point::Affine { x, y } => {
                    if !x.is_integer() || !y.is_integer() {
                        return false;
                    }
                }
            }
            acc = self.add_unchecked(&acc, p);
        }
        acc.is_infinity()
    }

    /// The reduction `E mod p` with `p^k` precision, as a small-word model.
    pub fn reduce_small(&self, p: u64, k: u32) -> Result<SmallCurveMod> {
        if !self.has_good_reduction(p) {
            return Err(Error::BadReduction(p));
        }
        let ring = SmallRing::new(p, k).ok_or(Error::BudgetExceeded {
            what: "word-sized precision",
            cap: 63,
        })?;
        Ok(SmallCurveMod::new(ring, &self.a, &self.b))
    }
}

pub(crate) fn neg_point(p: &Point) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine { x, y } => Point::Affine {
            x: x.clone(),
            y: -y.clone(),
        },
    }
}

fn reduce_i(v: &Integer, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// A curve with a distinguished point of infinite order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFixture {
    pub curve: WeierstrassCurve,
    pub point: Point,
    pub bad_primes: BTreeSet<u64>,
    pub torsion_order: u64,
    /// `P` is recorded as `r Q` for an unnamed `Q`; `r` is an even multiple of
    /// the torsion order and is metadata only.
    pub r: u64,
}

impl CurveFixture {
    /// Validate and complete fixture data: the point must lie on the curve and
    /// `r` must be an even multiple of the torsion order.
    pub fn new(curve: WeierstrassCurve, point: Point, r: u64) -> Result<Self> {
        curve.check(&point)?;
        if point.is_infinity() {
            return Err(Error::InvalidArgument("distinguished point is O".into()));
        }
        let torsion_order = curve.torsion_order()?;
        if r == 0 || r % 2 != 0 || r % torsion_order != 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "r = {r} is not an even multiple of the torsion order {torsion_order}"
            )));
        }
        if curve.is_torsion(&point, 12) {
            return Err(Error::InvalidArgument("distinguished point is torsion".into()));
        }
        let fd = factor(&curve.disc_core().abs(), &FactorBudget::default())?;
        if !fd.is_complete() {
            return Err(Error::BudgetExceeded {
                what: "discriminant factorization",
                cap: FactorBudget::default().rho_iterations,
            });
        }
        let mut bad_primes: BTreeSet<u64> = fd.factors.keys().copied().collect();
        bad_primes.insert(2);
        Ok(CurveFixture {
            curve,
            point,
            bad_primes,
            torsion_order,
            r,
        })
    }

    /// `y^2 = x^3 - 2` with `P = (3, 5)`.
    pub fn standard() -> Self {
        Self::new(
            WeierstrassCurve::from_i64(0, -2).unwrap(),
            Point::from_integers(3, 5),
            2,
        )
        .expect("standard fixture is valid")
    }

    pub fn is_good(&self, p: u64) -> bool {
        !self.bad_primes.contains(&p) && self.curve.has_good_reduction(p)
    }

    pub(crate) fn check_good(&self, p: u64) -> Result<()> {
        if !crate::arith::is_prime_u64(p) {
            return Err(Error::NotPrime(alloc::format!("{p}")));
        }
        if self.is_good(p) {
            Ok(())
        } else {
            Err(Error::BadReduction(p))
        }
    }

    pub fn x1(&self) -> &Rational {
        self.point.x().expect("fixture point is affine")
    }

    pub fn y1(&self) -> &Rational {
        self.point.y().expect("fixture point is affine")
    }

    /// `nP` exactly.
    pub fn multiple(&self, n: i64) -> Point {
        self.curve.mul(n, &self.point).expect("fixture point is on the curve")
    }

    /// `nP mod p^k` via projective arithmetic.
    pub fn mul_mod(&self, n: u64, p: u64, k: u32) -> Result<ProjectivePointMod> {
        self.check_good(p)?;
        projective::mul_mod(&self.curve, n, &self.point, p, k)
    }

    /// `ord_p(x_n)` from `nP mod p^k`.
    pub fn ord_x(&self, n: u64, p: u64, k: u32) -> Result<i64> {
        self.mul_mod(n, p, k)?.ord_x()
    }

    /// Order of `P mod p` in `E(F_p)`.
    pub fn order_mod_p(&self, p: u64) -> Result<u64> {
        self.check_good(p)?;
        let e = self.curve.reduce_small(p, 1)?;
        let pt = match e.reduce_point(&self.point) {
            Some(pt) => pt,
            None => return Ok(1),
        };
        let n = self.curve.count_points(p)?;
        Ok(e.order_dividing(&pt, n))
    }
}

/// `ord_p` of a rational, as a finite number (`None` for zero).
pub(crate) fn val(x: &Rational, p: u64) -> Option<i64> {
    crate::arith::padic_valuation_unchecked(x, p).finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn doubling_example() {
        let f = CurveFixture::standard();
        // lambda = 3*9 / (2*5) = 27/10
        let lambda = q(27, 10);
        let x2 = &lambda * &lambda - q(6, 1);
        let y2 = &lambda * (q(3, 1) - &x2) - q(5, 1);
        assert_eq!(x2, q(129, 100));
        assert_eq!(y2, q(-383, 1000));
        assert_eq!(f.multiple(2), Point::affine(x2, y2));
        assert_eq!(f.multiple(1), f.point);
        assert!(f.curve.add(&f.point, &f.curve.neg(&f.point).unwrap()).unwrap().is_infinity());
        assert!(f.multiple(0).is_infinity());
        assert_eq!(f.multiple(-2), neg_point(&f.multiple(2)));
    }

    #[test]
    fn off_curve_points_are_rejected() {
        let e = WeierstrassCurve::from_i64(0, -2).unwrap();
        let bad = Point::from_integers(3, 4);
        assert_eq!(e.add(&bad, &bad), Err(Error::PointNotOnCurve));
        assert_eq!(e.mul(3, &bad), Err(Error::PointNotOnCurve));
        assert!(WeierstrassCurve::from_i64(-3, 2).is_err());
    }

    fn brute_count(a: i64, b: i64, p: i64) -> u64 {
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if (y * y - x * x * x - a * x - b).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn point_counts() {
        let e = WeierstrassCurve::from_i64(0, -2).unwrap();
        assert_eq!(brute_count(0, -2, 5), 6);
        assert_eq!(brute_count(0, -2, 7), 7);
        assert_eq!(e.count_points(5).unwrap(), 6);
        assert_eq!(e.count_points(7).unwrap(), 7);
        assert_eq!(e.count_points(3), Err(Error::BadReduction(3)));
        assert_eq!(e.count_points(2), Err(Error::BadReduction(2)));
        assert!(matches!(
            e.count_points_capped(101, 100),
            Err(Error::BudgetExceeded { .. })
        ));
        for &(a, b) in &[(0, -2), (-1, 0), (2, 3), (-7, 10)] {
            let e = WeierstrassCurve::from_i64(a, b).unwrap();
            for p in crate::arith::prime_sieve(80).into_iter().skip(1) {
                if e.has_good_reduction(p) {
                    assert_eq!(e.count_points(p).unwrap(), brute_count(a, b, p as i64));
                }
            }
        }
    }

    #[test]
    fn hasse_bound() {
        let e = WeierstrassCurve::from_i64(0, -2).unwrap();
        for p in crate::arith::prime_sieve(20_000).into_iter().skip(2) {
            let n = e.count_points(p).unwrap() as f64;
            assert!((n - p as f64 - 1.0).abs() <= 2.0 * (p as f64).sqrt());
        }
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(WeierstrassCurve::from_i64(0, -2).unwrap().torsion_order().unwrap(), 1);
        assert_eq!(WeierstrassCurve::from_i64(0, 1).unwrap().torsion_order().unwrap(), 6);
        assert_eq!(WeierstrassCurve::from_i64(-1, 0).unwrap().torsion_order().unwrap(), 4);
        // y^2 = x^3 + 4x has (2, +-4) of order 4 and (0, 0).
        assert_eq!(WeierstrassCurve::from_i64(4, 0).unwrap().torsion_order().unwrap(), 4);
    }

    #[test]
    fn torsion_divides_point_counts() {
        for &(a, b) in &[(0, 1), (-1, 0), (0, -2), (4, 0), (-43, 166)] {
            let e = WeierstrassCurve::from_i64(a, b).unwrap();
            let t = e.torsion_order().unwrap();
            for p in crate::arith::prime_sieve(300).into_iter().skip(1) {
                if e.has_good_reduction(p) {
                    assert_eq!(e.count_points(p).unwrap() % t, 0, "({a},{b}) p={p}");
                }
            }
        }
        // y^2 = x^3 - 43x + 166 has a point of order 7.
        assert_eq!(WeierstrassCurve::from_i64(-43, 166).unwrap().torsion_order().unwrap(), 7);
    }

    #[test]
    fn fixture_metadata() {
        let f = CurveFixture::standard();
        assert_eq!(f.bad_primes, BTreeSet::from([2, 3]));
        assert_eq!(f.torsion_order, 1);
        assert_eq!(f.r, 2);
        let odd_r = CurveFixture::new(f.curve.clone(), f.point.clone(), 3);
        assert!(odd_r.is_err());
        let off = CurveFixture::new(f.curve.clone(), Point::from_integers(3, 4), 2);
        assert_eq!(off, Err(Error::PointNotOnCurve));
    }

    #[test]
    fn order_mod_p_examples() {
        let f = CurveFixture::standard();
        assert_eq!(f.order_mod_p(5).unwrap(), 2);
        assert_eq!(f.order_mod_p(7).unwrap(), 7);
        assert_eq!(f.order_mod_p(3), Err(Error::BadReduction(3)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn group_law_is_additive(m in -25i64..=25, n in -25i64..=25) {
            let f = CurveFixture::standard();
            let lhs = f.curve.add(&f.multiple(m), &f.multiple(n)).unwrap();
            prop_assert_eq!(lhs, f.multiple(m + n));
        }
    }
}
