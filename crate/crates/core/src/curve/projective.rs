//! Projective points modulo `p^k`.
//!
//! Three bidegree-(2,2) addition laws are tried in turn. Each returns a scalar
//! multiple of the true sum; a result with some coordinate prime to `p` is
//! therefore correct modulo `p^k`, and for any pair of inputs at least one of
//! the three laws produces such a result.

use alloc::format;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::{Point, WeierstrassCurve};
use crate::arith::{BigRing, Integer, Rational, ResidueElement, ResidueRing, SmallRing};
use crate::{Error, Result};

/// `(X : Y : Z)` modulo `p^k`, not all coordinates divisible by `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePointMod {
    pub p: u64,
    pub k: u32,
    pub x: ResidueElement,
    pub y: ResidueElement,
    pub z: ResidueElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Proj<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Curve constants reduced into a residue ring.
#[derive(Debug, Clone)]
pub struct CurveMod<R: ResidueRing> {
    pub(crate) ring: R,
    one: R::Elem,
    two: R::Elem,
    three: R::Elem,
    a: R::Elem,
    two_a: R::Elem,
    a2: R::Elem,
    b: R::Elem,
    b3: R::Elem,
    six_b: R::Elem,
}

pub type SmallCurveMod = CurveMod<SmallRing>;

macro_rules! poly {
    (@op $s:expr, +, $acc:expr, $t:expr) => { $s.ring.add(&$acc, &$t) };
    (@op $s:expr, -, $acc:expr, $t:expr) => { $s.ring.sub(&$acc, &$t) };
    ($s:expr; $( $sg:tt $c:ident [$($f:ident),*] )*) => {{
        let mut acc = $s.ring.zero();
        $(
            let term = $s.prod(&$s.$c, &[$(&$f),*]);
            acc = poly!(@op $s, $sg, acc, term);
        )*
        acc
    }};
}

impl<R: ResidueRing> CurveMod<R> {
    pub fn new(ring: R, a: &Integer, b: &Integer) -> Self {
        let ai = ring.from_integer(a);
        let bi = ring.from_integer(b);
        CurveMod {
            one: ring.from_i64(1),
            two: ring.from_i64(2),
            three: ring.from_i64(3),
            two_a: ring.add(&ai, &ai),
            a2: ring.mul(&ai, &ai),
            b3: ring.mul_small(&bi, 3),
            six_b: ring.mul_small(&bi, 6),
            a: ai,
            b: bi,
            ring,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    fn prod(&self, c: &R::Elem, xs: &[&R::Elem]) -> R::Elem {
        let mut acc = c.clone();
        for x in xs {
            acc = self.ring.mul(&acc, x);
        }
        acc
    }

    pub(crate) fn identity(&self) -> Proj<R::Elem> {
        Proj {
            x: self.ring.zero(),
            y: self.one.clone(),
            z: self.ring.zero(),
        }
    }

    pub(crate) fn is_primitive(&self, p: &Proj<R::Elem>) -> bool {
        self.ring.is_unit(&p.x) || self.ring.is_unit(&p.y) || self.ring.is_unit(&p.z)
    }

    /// `Y^2 Z = X^3 + a X Z^2 + b Z^3` in the ring.
    pub(crate) fn on_curve(&self, p: &Proj<R::Elem>) -> bool {
        let r = &self.ring;
        let lhs = r.mul(&r.mul(&p.y, &p.y), &p.z);
        let z2 = r.mul(&p.z, &p.z);
        let rhs = r.add(
            &r.add(
                &r.mul(&r.mul(&p.x, &p.x), &p.x),
                &r.mul(&r.mul(&self.a, &p.x), &z2),
            ),
            &r.mul(&r.mul(&self.b, &z2), &p.z),
        );
        lhs == rhs
    }

    /// Image of a rational point; `None` for the identity.
    pub(crate) fn reduce_point(&self, pt: &Point) -> Option<Proj<R::Elem>> {
        let (x, y) = match pt {
            Point::Infinity => return None,
            Point::Affine { x, y } => (x, y),
        };
        let p = self.ring.prime();
        // Scale by p^e with e = max(0, -ord_p y) to clear p from denominators.
        let e = (-super::val(y, p).unwrap_or(0)).max(0) as u32;
        let scale = Rational::from_integer(BigInt::from(p).pow(e));
        let xs = self.ring.from_rational(&(x * &scale))?;
        let ys = self.ring.from_rational(&(y * &scale))?;
        let zs = self.ring.from_rational(&scale)?;
        Some(Proj {
            x: xs,
            y: ys,
            z: zs,
        })
    }

    pub(crate) fn add(&self, p1: &Proj<R::Elem>, p2: &Proj<R::Elem>) -> Proj<R::Elem> {
        let out = self.add_rcb(p1, p2);
        if self.is_primitive(&out) {
            return out;
        }
        let out = self.add_l0(p1, p2);
        if self.is_primitive(&out) {
            return out;
        }
        let out = self.add_l1(p1, p2);
        debug_assert!(self.is_primitive(&out), "all addition laws degenerate");
        out
    }

    fn add_rcb(&self, p1: &Proj<R::Elem>, p2: &Proj<R::Elem>) -> Proj<R::Elem> {
        let r = &self.ring;
        let (x1, y1, z1) = (&p1.x, &p1.y, &p1.z);
        let (x2, y2, z2) = (&p2.x, &p2.y, &p2.z);
        let s = r.add(&r.mul(x1, z2), &r.mul(x2, z1));
        let t = r.add(&r.mul(y1, z2), &r.mul(y2, z1));
        let u = r.add(&r.mul(x1, y2), &r.mul(x2, y1));
        let y1y2 = r.mul(y1, y2);
        let x1x2 = r.mul(x1, x2);
        let z1z2 = r.mul(z1, z2);
        let as_ = r.mul(&self.a, &s);
        let bz = r.mul(&self.b3, &z1z2);
        let a_ = r.sub(&r.sub(&y1y2, &as_), &bz);
        let b_ = r.add(&r.add(&y1y2, &as_), &bz);
        let c_ = r.sub(
            &r.add(&r.mul(&self.a, &x1x2), &r.mul(&self.b3, &s)),
            &r.mul(&self.a2, &z1z2),
        );
        let d_ = r.add(&r.mul(&self.three, &x1x2), &r.mul(&self.a, &z1z2));
        Proj {
            x: r.sub(&r.mul(&u, &a_), &r.mul(&t, &c_)),
            y: r.add(&r.mul(&b_, &a_), &r.mul(&d_, &c_)),
            z: r.add(&r.mul(&t, &b_), &r.mul(&u, &d_)),
        }
    }

    fn add_l0(&self, p1: &Proj<R::Elem>, p2: &Proj<R::Elem>) -> Proj<R::Elem> {
        let (x1, y1, z1) = (p1.x.clone(), p1.y.clone(), p1.z.clone());
        let (x2, y2, z2) = (p2.x.clone(), p2.y.clone(), p2.z.clone());
        let x = poly!(self;
            + a [x1, x1, x2, z2] + one [x1, x1, y2, y2] + b3 [x1, x1, z2, z2]
            - a [x1, x2, x2, z1] - a2 [x1, z1, z2, z2] - one [x2, x2, y1, y1]
            - b3 [x2, x2, z1, z1] + a2 [x2, z1, z1, z2]);
        let y = poly!(self;
            + a [x1, x1, y2, z2] - two_a [x1, x2, y1, z2] + two_a [x1, x2, y2, z1]
            + one [x1, y1, y2, y2] - b3 [x1, y1, z2, z2] + six_b [x1, y2, z1, z2]
            - a [x2, x2, y1, z1] - one [x2, y1, y1, y2] - six_b [x2, y1, z1, z2]
            + b3 [x2, y2, z1, z1] + a2 [y1, z1, z2, z2] - a2 [y2, z1, z1, z2]);
        let z = poly!(self;
            - a [x1, x1, z2, z2] - two [x1, y1, y2, z2] + one [x1, y2, y2, z1]
            - b3 [x1, z1, z2, z2] + a [x2, x2, z1, z1] - one [x2, y1, y1, z2]
            + two [x2, y1, y2, z1] + b3 [x2, z1, z1, z2]);
        Proj { x, y, z }
    }

    fn add_l1(&self, p1: &Proj<R::Elem>, p2: &Proj<R::Elem>) -> Proj<R::Elem> {
        let (x1, y1, z1) = (p1.x.clone(), p1.y.clone(), p1.z.clone());
        let (x2, y2, z2) = (p2.x.clone(), p2.y.clone(), p2.z.clone());
        let x = poly!(self;
            + a [x1, x1, z2, z2] - two [x1, y1, y2, z2] - one [x1, y2, y2, z1]
            + b3 [x1, z1, z2, z2] - a [x2, x2, z1, z1] + one [x2, y1, y1, z2]
            + two [x2, y1, y2, z1] - b3 [x2, z1, z1, z2]);
        let y = poly!(self;
            + three [x1, x1, x2, y2] - three [x1, x2, x2, y1] - a [x1, y1, z2, z2]
            + two_a [x1, y2, z1, z2] - two_a [x2, y1, z1, z2] + a [x2, y2, z1, z1]
            + one [y1, y1, y2, z2] - one [y1, y2, y2, z1] - b3 [y1, z1, z2, z2]
            + b3 [y2, z1, z1, z2]);
        let z = poly!(self;
            - three [x1, x1, x2, z2] + three [x1, x2, x2, z1] - a [x1, z1, z2, z2]
            + a [x2, z1, z1, z2] + one [y1, y1, z2, z2] - one [y2, y2, z1, z1]);
        Proj { x, y, z }
    }

    /// `n * P`, left-to-right double-and-add.
    pub(crate) fn mul(&self, n: u64, pt: &Proj<R::Elem>) -> Proj<R::Elem> {
        if n == 0 {
            return self.identity();
        }
        let mut acc = pt.clone();
        for i in (0..63 - n.leading_zeros()).rev() {
            acc = self.add(&acc, &acc);
            if (n >> i) & 1 == 1 {
                acc = self.add(&acc, pt);
            }
        }
        acc
    }

    /// Whether the point reduces to `O` modulo `p`.
    pub(crate) fn is_identity_mod_p(&self, pt: &Proj<R::Elem>) -> bool {
        !self.ring.is_unit(&pt.z)
    }

    /// Smallest `m | n` with `m P = O mod p`, given `n P = O mod p`.
    pub(crate) fn order_dividing(&self, pt: &Proj<R::Elem>, n: u64) -> u64 {
        let mut m = n;
        let mut rest = n;
        let mut q = 2u64;
        while q * q <= rest {
            if rest % q == 0 {
                while rest % q == 0 {
                    rest /= q;
                }
                while m % q == 0 && self.is_identity_mod_p(&self.mul(m / q, pt)) {
                    m /= q;
                }
            }
            q += 1;
        }
        if rest > 1 && m % rest == 0 && self.is_identity_mod_p(&self.mul(m / rest, pt)) {
            m /= rest;
        }
        m
    }
}

impl SmallCurveMod {
    /// Reduction of a rational point modulo `p^k`, `None` for `O`.
    pub fn reduce(&self, pt: &Point) -> Option<(u64, u64, u64)> {
        self.reduce_point(pt).map(|q| (q.x, q.y, q.z))
    }

    /// Whether `n P ≡ O (mod p)` for the reduced point.
    pub fn kills(&self, n: u64, pt: &(u64, u64, u64)) -> bool {
        let p = Proj {
            x: pt.0,
            y: pt.1,
            z: pt.2,
        };
        self.is_identity_mod_p(&self.mul(n, &p))
    }
}

pub(crate) fn to_public<R: ResidueRing>(
    e: &CurveMod<R>,
    pt: &Proj<R::Elem>,
) -> ProjectivePointMod {
    let m = e.ring.modulus();
    let conv = |v: &R::Elem| ResidueElement::new(&BigInt::from(e.ring.to_biguint(v)), m.clone());
    ProjectivePointMod {
        p: e.ring.prime(),
        k: e.ring.precision(),
        x: conv(&pt.x),
        y: conv(&pt.y),
        z: conv(&pt.z),
    }
}

fn mul_mod_in<R: ResidueRing>(
    ring: R,
    curve: &WeierstrassCurve,
    n: u64,
    pt: &Point,
) -> Result<ProjectivePointMod> {
    let e = CurveMod::new(ring, &curve.a, &curve.b);
    let base = e.reduce_point(pt).unwrap_or_else(|| e.identity());
    if !e.on_curve(&base) {
        return Err(Error::PointNotOnCurve);
    }
    Ok(to_public(&e, &e.mul(n, &base)))
}

/// `n P mod p^k`.
pub(crate) fn mul_mod(
    curve: &WeierstrassCurve,
    n: u64,
    pt: &Point,
    p: u64,
    k: u32,
) -> Result<ProjectivePointMod> {
    if k == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    if !curve.has_good_reduction(p) {
        return Err(Error::BadReduction(p));
    }
    match SmallRing::new(p, k) {
        Some(ring) => mul_mod_in(ring, curve, n, pt),
        None => mul_mod_in(BigRing::new(p, k), curve, n, pt),
    }
}

fn value_valuation(v: &BigUint, p: u64) -> Option<u32> {
    if v.is_zero() {
        None
    } else {
        Some(crate::arith::split_prime_power(v, p).0 as u32)
    }
}

impl ProjectivePointMod {
    pub fn is_identity_mod_p(&self) -> bool {
        (self.z.value() % self.p).is_zero()
    }

    fn insufficient(&self) -> Error {
        Error::PrecisionInsufficient {
            have: self.k,
            required: self.k.saturating_mul(2),
        }
    }

    /// `ord_p(x)` of the represented point.
    ///
    /// Near `O` the formal parameter is `-X/Y` and `ord_p x = -2 ord_p X`;
    /// otherwise `x = X/Z` with `Z` a unit.
    pub fn ord_x(&self) -> Result<i64> {
        let vx = value_valuation(self.x.value(), self.p).ok_or_else(|| self.insufficient())?;
        if self.is_identity_mod_p() {
            Ok(-2 * vx as i64)
        } else {
            Ok(vx as i64)
        }
    }

    /// `ord_p(x - x0)` for a `p`-integral `x0`.
    pub fn x_diff_valuation(&self, x0: &Rational) -> Result<i64> {
        if self.is_identity_mod_p() {
            return self.ord_x();
        }
        let m = self.x.modulus().clone();
        let x0m = crate::arith::rational_mod(x0, &m).ok_or_else(|| {
            Error::Precondition(format!("x0 is not {}-integral", self.p))
        })?;
        // X - x0 Z
        let prod = (&x0m * self.z.value()) % &m;
        let diff = (self.x.value() + &m - prod) % &m;
        value_valuation(&diff, self.p)
            .map(|v| v as i64)
            .ok_or_else(|| self.insufficient())
    }
}
