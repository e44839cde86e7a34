use alloc::vec;
use alloc::vec::Vec;

use crate::arith::prime_sieve;
use crate::curve::CurveFixture;
use crate::eds::SupportScanner;
use crate::Result;

/// `(count, pi(X), X)` at the checkpoint maximizing `#(S_ell ∩ [2, X]) / pi(X)`.
pub(crate) fn mu_parts(scanner: &SupportScanner, ell: u64, checkpoints: &[u64]) -> (u64, u64, u64) {
    let support = scanner.support(ell);
    let mut xs: Vec<u64> = checkpoints.to_vec();
    xs.sort_unstable();
    let primes = prime_sieve(xs.last().copied().unwrap_or(2));
    let mut best = (0u64, 1u64, xs.first().copied().unwrap_or(2));
    for &x in &xs {
        let pi = primes.partition_point(|&p| p <= x) as u64;
        let c = support.range(..=x).count() as u64;
        // c / pi > best.0 / best.1
        if pi > 0 && (c as u128) * (best.1 as u128) > (best.0 as u128) * (pi as u128) {
            best = (c, pi, x);
        }
    }
    best
}

/// Maximum over the checkpoints `X` of `#(S_ell ∩ [2, X]) / #{p <= X}`.
pub fn mu_ell(fixture: &CurveFixture, ell: u64, checkpoints: &[u64]) -> Result<f64> {
    let bound = checkpoints.iter().copied().max().unwrap_or(2);
    let sc = SupportScanner::new(fixture, bound)?;
    let (c, pi, _) = mu_parts(&sc, ell, checkpoints);
    Ok(c as f64 / pi as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    /// `num / den`; the sample values are exact.
    Rational(i64, u64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylReport {
    pub samples: usize,
    pub histogram: Vec<usize>,
    /// `max |count / N - 1 / bins|`.
    pub max_deviation: f64,
    /// `|sum e(t)| / N`.
    pub weyl_sum: f64,
    pub insufficient_data: bool,
    /// Rational `alpha`: the values lie in finitely many points.
    pub degenerate: bool,
}

/// Distribution of `(ell - 1) alpha mod 1` over primes `ell <= x_cap`,
/// `ell = 1 mod d`.
pub fn weyl_equidistribution(alpha: Alpha, d: u64, x_cap: u64, bins: usize) -> WeylReport {
    let bins = bins.max(1);
    let d = d.max(1);
    let mut histogram = vec![0usize; bins];
    let (mut re, mut im) = (0.0f64, 0.0f64);
    let mut samples = 0usize;
    for ell in prime_sieve(x_cap).into_iter().filter(|&l| l % d == 1 % d) {
        let n = ell - 1;
        let t = match alpha {
            Alpha::Rational(num, den) => {
                let den = den.max(1) as i128;
                let r = ((n as i128) * (num as i128)).rem_euclid(den);
                r as f64 / den as f64
            }
            Alpha::Real(a) => {
                let x = n as f64 * a;
                let f = x - libm::floor(x);
                if f >= 1.0 {
                    0.0
                } else {
                    f
                }
            }
        };
        let b = ((t * bins as f64) as usize).min(bins - 1);
        histogram[b] += 1;
        let phase = 2.0 * core::f64::consts::PI * t;
        re += libm::cos(phase);
        im += libm::sin(phase);
        samples += 1;
    }
    let nf = samples.max(1) as f64;
    let max_deviation = histogram
        .iter()
        .map(|&c| libm::fabs(c as f64 / nf - 1.0 / bins as f64))
        .fold(0.0, f64::max);
    WeylReport {
        samples,
        histogram,
        max_deviation,
        weyl_sum: libm::sqrt(re * re + im * im) / nf,
        insufficient_data: samples < 100,
        degenerate: matches!(alpha, Alpha::Rational(..)),
    }
}

/// Number of distinct prime factors.
pub fn omega(mut n: u64) -> u32 {
    let mut k = 0;
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            k += 1;
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    k + u32::from(n > 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaStat {
    pub x: u64,
    pub t: u32,
    pub good_primes: usize,
    pub below: usize,
    pub density: f64,
}

/// Fraction of good primes `p <= x` with `omega(#E(F_p)) < t`.
pub fn omega_statistics(fixture: &CurveFixture, t: u32, x: u64) -> Result<OmegaStat> {
    Ok(omega_profile(fixture, &[x], &[t])?.remove(0))
}

/// One pass of point counts, reported at every checkpoint and threshold.
pub fn omega_profile(fixture: &CurveFixture, checkpoints: &[u64], ts: &[u32]) -> Result<Vec<OmegaStat>> {
    let top = checkpoints.iter().copied().max().unwrap_or(0);
    let mut omegas = Vec::new();
    for p in prime_sieve(top) {
        if fixture.is_good(p) {
            omegas.push((p, omega(fixture.curve.count_points(p)?)));
        }
    }
    let mut out = Vec::new();
    for &x in checkpoints {
        let upto = &omegas[..omegas.partition_point(|e| e.0 <= x)];
        for &t in ts {
            let below = upto.iter().filter(|e| e.1 < t).count();
            out.push(OmegaStat {
                x,
                t,
                good_primes: upto.len(),
                below,
                density: if upto.is_empty() { 0.0 } else { below as f64 / upto.len() as f64 },
            });
        }
    }
    Ok(out)
}
