//! The real elliptic logarithm, normalized so that the identity component of
//! `E(R)` becomes `R/Z`.
//!
//! With `e1` the largest real root of `f(t) = t^3 + a t + b`, the real period
//! is `w = int_{e1}^inf dt / sqrt(f)` and a point `(x, y)` on the identity
//! component has angle `h(x)` if `y < 0` and `1 - h(x)` otherwise, where
//! `h(x) = (1 / 2w) int_x^inf dt / sqrt(f)`. Writing `f = (t - e1) q(t)`, the
//! integral splits at `e1 + 1`: the substitution `t = e1 + s^2` removes the
//! square-root singularity and `t = e1 + 1/r^2` maps the tail to `(0, 1]`.

use alloc::vec::Vec;

use libm::{fabs, sqrt};

use super::{Point, WeierstrassCurve};
use crate::arith::rational_to_f64;
use crate::{Error, Result};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, fabs((kron - gauss) * h))
}

/// Adaptive quadrature of a smooth integrand; returns `(value, error bound)`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
    stack.push((a, b, tol.max(1e-16), 0));
    let mut total = 0.0;
    let mut err = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        if e <= t || depth >= 40 {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t, depth + 1));
            stack.push((mid, hi, 0.5 * t, depth + 1));
        }
    }
    (total, err + 4.0 * f64::EPSILON * fabs(total))
}

/// Real-period data of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPeriod {
    a: f64,
    b: f64,
    /// Largest real root of `x^3 + a x + b`.
    pub e1: f64,
    /// Middle root when there are three real roots.
    pub e2: Option<f64>,
    /// `int_{e1}^inf dt / sqrt(f)`.
    pub omega: f64,
    pub omega_err: f64,
    tol: f64,
}

fn cubic(a: f64, b: f64, t: f64) -> f64 {
    (t * t + a) * t + b
}

fn bisect_root(a: f64, b: f64, mut lo: f64, mut hi: f64) -> f64 {
    // cubic(lo) and cubic(hi) have opposite signs; the cubic increases on [lo, hi].
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cubic(a, b, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl RealPeriod {
    pub fn new(curve: &WeierstrassCurve, tol: f64) -> Self {
        let a = rational_to_f64(&crate::arith::Rational::from_integer(curve.a.clone()));
        let b = rational_to_f64(&crate::arith::Rational::from_integer(curve.b.clone()));
        let bound = 1.0 + fabs(a).max(fabs(b));
        let crit = if a < 0.0 { sqrt(-a / 3.0) } else { 0.0 };
        let three_roots = curve.disc_core() < 0.into();
        let e1 = if three_roots {
            bisect_root(a, b, crit, bound)
        } else {
            // One real root; the cubic is increasing on both sides of the
            // critical interval, and the root lies right of -bound.
            let lo = -bound;
            let hi = bound;
            if a < 0.0 && cubic(a, b, -crit) < 0.0 {
                bisect_root(a, b, crit, hi)
            } else if a < 0.0 {
                bisect_root(a, b, lo, -crit)
            } else {
                bisect_root(a, b, lo, hi)
            }
        };
        let e2 = if three_roots {
            // decreasing on [-crit, crit]
            let (mut lo, mut hi) = (-crit, crit);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cubic(a, b, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        } else {
            None
        };
        let tol = tol.max(1e-15);
        let mut rp = RealPeriod {
            a,
            b,
            e1,
            e2,
            omega: 0.0,
            omega_err: 0.0,
            tol,
        };
        let (w, we) = rp.tail_integral(e1);
        rp.omega = w;
        rp.omega_err = we;
        rp
    }

    /// `int_x^inf dt / sqrt(f)` for `x >= e1`, with error bound.
    fn tail_integral(&self, x: f64) -> (f64, f64) {
        let (a, e1) = (self.a, self.e1);
        let q = |t: f64| t * t + e1 * t + (e1 * e1 + a);
        let head = |s: f64| 2.0 / sqrt(q(e1 + s * s));
        let c1 = 3.0 * e1;
        let c2 = 3.0 * e1 * e1 + a;
        let tail = |r: f64| {
            let r2 = r * r;
            2.0 / sqrt(1.0 + c1 * r2 + c2 * r2 * r2)
        };
        let tol = 0.25 * self.tol;
        if !x.is_finite() {
            return (0.0, 0.0);
        }
        let d = (x - e1).max(0.0);
        if d >= 1.0 {
            integrate(&tail, 0.0, 1.0 / sqrt(d), tol)
        } else {
            let (v1, e1_) = integrate(&head, sqrt(d), 1.0, tol);
            let (v2, e2_) = integrate(&tail, 0.0, 1.0, tol);
            (v1 + v2, e1_ + e2_)
        }
    }

    /// `h(x)` and its error bound; `h(e1) = 1/2`, `h(inf) = 0`.
    pub fn h(&self, x: f64) -> (f64, f64) {
        let (v, e) = self.tail_integral(x);
        let h = v / (2.0 * self.omega);
        let err = e / (2.0 * self.omega) + h * self.omega_err / self.omega;
        (h, err + 4.0 * f64::EPSILON)
    }

    /// Angle of a point in `[0, 1)`.
    pub fn angle(&self, pt: &Point) -> Result<EllipticAngle> {
        let (x, y) = match pt {
            Point::Infinity => {
                return Ok(EllipticAngle {
                    theta: 0.0,
                    error: 0.0,
                })
            }
            Point::Affine { x, y } => (rational_to_f64(x), rational_to_f64(y)),
        };
        if let Some(e2) = self.e2 {
            if x < 0.5 * (self.e1 + e2) {
                return Err(Error::NonIdentityComponent);
            }
        }
        let (h, err) = self.h(x);
        let theta = if y < 0.0 { h } else { 1.0 - h };
        let theta = if theta >= 1.0 { theta - 1.0 } else { theta };
        Ok(EllipticAngle { theta, error: err })
    }

    /// The set of angles whose points satisfy `|x| > bound`.
    pub fn abs_x_exceeds(&self, bound: f64) -> AngleWindow {
        if bound < self.e1 {
            return AngleWindow {
                everything: true,
                near_zero: (0.5, 0.0),
                near_half: None,
            };
        }
        let near_zero = self.h(bound);
        let near_half = if -bound > self.e1 {
            let (h, e) = self.h(-bound);
            Some((0.5 - h, e))
        } else {
            None
        };
        AngleWindow {
            everything: false,
            near_zero,
            near_half,
        }
    }
}

/// Normalized elliptic logarithm with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticAngle {
    pub theta: f64,
    pub error: f64,
}

impl EllipticAngle {
    /// `n * theta mod 1` with the error scaled accordingly.
    pub fn times(&self, n: u64) -> EllipticAngle {
        let t = frac(self.theta * n as f64);
        EllipticAngle {
            theta: t,
            error: self.error * n as f64 + f64::EPSILON * n as f64,
        }
    }
}

pub(crate) fn frac(t: f64) -> f64 {
    let f = t - libm::floor(t);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance from `t` to the nearest integer.
pub(crate) fn circle_norm(t: f64) -> f64 {
    let f = frac(t);
    f.min(1.0 - f)
}

/// A union of arcs `||theta|| < r0` and `||theta - 1/2|| < r1`, each radius
/// carrying an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleWindow {
    pub everything: bool,
    pub near_zero: (f64, f64),
    pub near_half: Option<(f64, f64)>,
}

impl AngleWindow {
    /// `Some(inside)` when decided, `None` when the angle is within the
    /// combined error of an arc boundary.
    pub fn classify(&self, angle: &EllipticAngle) -> Option<bool> {
        if self.everything {
            return Some(true);
        }
        let mut arcs = alloc::vec![(circle_norm(angle.theta), self.near_zero)];
        if let Some(h) = self.near_half {
            arcs.push((circle_norm(angle.theta - 0.5), h));
        }
        let mut inside = false;
        for (dist, (r, re)) in arcs {
            let slack = re + angle.error;
            if fabs(dist - r) <= slack {
                return None;
            }
            inside |= dist < r;
        }
        Some(inside)
    }
}

/// Normalized elliptic logarithm of `pt` to absolute tolerance `tol`.
pub fn elliptic_log_angle(
    curve: &WeierstrassCurve,
    pt: &Point,
    tol: f64,
) -> Result<EllipticAngle> {
    RealPeriod::new(curve, tol).angle(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveFixture;

    #[test]
    fn quadrature_on_known_integrals() {
        let (v, e) = integrate(&|x: f64| libm::exp(x), 0.0, 1.0, 1e-14);
        assert!(fabs(v - (core::f64::consts::E - 1.0)) < 1e-13 && e < 1e-12);
        let (v, _) = integrate(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-14);
        assert!(fabs(v - core::f64::consts::FRAC_PI_4) < 1e-14);
    }

    #[test]
    fn identity_has_angle_zero() {
        let f = CurveFixture::standard();
        let a = elliptic_log_angle(&f.curve, &Point::Infinity, 1e-12).unwrap();
        assert_eq!(a.theta, 0.0);
    }

    #[test]
    fn period_of_fixture() {
        let f = CurveFixture::standard();
        let rp = RealPeriod::new(&f.curve, 1e-13);
        assert!(fabs(rp.e1 - libm::cbrt(2.0)) < 1e-14);
        // Compare against a brute midpoint rule on the head substitution.
        let (h, _) = rp.h(rp.e1);
        assert!(fabs(h - 0.5) < 1e-12);
    }

    #[test]
    fn homomorphism_and_signs() {
        let f = CurveFixture::standard();
        let rp = RealPeriod::new(&f.curve, 1e-13);
        let theta = rp.angle(&f.point).unwrap();
        let mult = f.curve.multiples(&f.point, 20).unwrap();
        for (i, q) in mult.iter().enumerate() {
            let n = i as u64 + 1;
            let direct = rp.angle(q).unwrap();
            let scaled = theta.times(n);
            let d = circle_norm(direct.theta - scaled.theta);
            assert!(d < 1e-9, "n = {n}: {d}");
            // Window on x agrees with the exact sign of x_n - x_1.
            let w = rp.abs_x_exceeds(3.0);
            let exact = rational_to_f64(q.x().unwrap()) > 3.0;
            if let Some(decided) = w.classify(&scaled) {
                if fabs(rational_to_f64(q.x().unwrap()) - 3.0) > 1e-9 {
                    assert_eq!(decided, exact, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn non_identity_component_is_rejected() {
        // y^2 = x^3 - x: the egg is x in [-1, 0].
        let e = WeierstrassCurve::from_i64(-1, 0).unwrap();
        let egg = Point::from_integers(0, 0);
        assert_eq!(elliptic_log_angle(&e, &egg, 1e-10), Err(Error::NonIdentityComponent));
        let on_main = Point::from_integers(1, 0);
        let a = elliptic_log_angle(&e, &on_main, 1e-10).unwrap();
        assert!(fabs(a.theta - 0.5) < 1e-9);
    }

    #[test]
    fn windows_shrink() {
        let f = CurveFixture::standard();
        let rp = RealPeriod::new(&f.curve, 1e-13);
        let mut last = 1.0;
        for i in 2..30 {
            let w = rp.abs_x_exceeds(i as f64);
            assert!(!w.everything);
            assert!(w.near_zero.0 < last);
            last = w.near_zero.0;
        }
        assert!(rp.abs_x_exceeds(1.0).everything);
    }
}
