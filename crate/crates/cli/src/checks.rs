//! The acceptance criteria as named, independently runnable checks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use dioph_core::arith::{integer_valuation, padic_valuation, prime_sieve, split_prime_power, Integer, Valuation};
use dioph_core::curve::{elliptic_log_angle, CurveFixture, Point};
use dioph_core::cyclofield::{build_wq, find_conductor, is_inert, quadratic_min_valuation, split_valuations, CyclicFieldSpec};
use dioph_core::eds::{
    apparition_index, d_n, d_n_exact, division_value, d_sequence_exact, exactorder_check, height_slope, ord_in_denom_at,
    primitive_prime, s_truncated, verify_subgroup, EdsConfig, ExactOrderReport, SupportScanner,
};
use dioph_core::model::{build_params, choose_pq, xdiff_valuation, ModelInstance, START_PRECISION};
use dioph_core::primeseq::{omega_profile, weyl_equidistribution, Alpha, Condition, ConditionStatus, SeqConditions};
use dioph_core::zstruct::{b_member, exceptional_set_scan, Domain, Zstruct};
use dioph_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::certificate_json;

/// Inputs shared by every check.
#[derive(Debug, Clone)]
pub struct Context {
    pub fixture: CurveFixture,
    pub eds: EdsConfig,
    pub count_cap: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub details: Value,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    fn new(details: Value, failures: Vec<String>) -> Self {
        CheckOutcome {
            passed: failures.is_empty(),
            details,
            counterexample: failures.into_iter().next(),
        }
    }

    fn error(e: Error) -> Self {
        CheckOutcome {
            passed: false,
            details: Value::Null,
            counterexample: Some(format!("error: {e}")),
        }
    }
}

pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub title: &'static str,
    run: fn(&Context) -> Result<CheckOutcome>,
}

impl Check {
    pub fn run(&self, ctx: &Context) -> CheckOutcome {
        (self.run)(ctx).unwrap_or_else(CheckOutcome::error)
    }
}

pub const CHECKS: &[Check] = &[
    Check { id: 1, name: "group-law", title: "exact group law and mod p^k valuations", run: group_law },
    Check { id: 2, name: "fixture-constants", title: "constants of the fixture", run: fixture_constants },
    Check { id: 3, name: "denominator-subgroups", title: "{n : ord_p d_n >= e} is a subgroup", run: denominator_subgroups },
    Check { id: 4, name: "support-intersections", title: "S_m and S_n meet in S_gcd(m,n)", run: support_intersections },
    Check { id: 5, name: "valuation-growth", title: "ord_p d_n grows by 2 under multiplication by p", run: valuation_growth },
    Check { id: 6, name: "denominator-height", title: "log d_n / n^2 is nearly constant", run: denominator_height },
    Check { id: 7, name: "primitive-divisors", title: "primitive parts of d_(ell m)", run: primitive_divisors },
    Check { id: 8, name: "largest-prime-order", title: "ell divides #E(F_p) for p the largest prime of d_ell", run: largest_prime_order },
    Check { id: 9, name: "x-difference", title: "ord_7(x_(7m+1) - x_1) grows with ord_7(m)", run: x_difference },
    Check { id: 10, name: "valuation-model", title: "addition and B read off valuations of x_ell - x_1", run: valuation_model },
    Check { id: 11, name: "structure-predicates", title: "squaring and multiplication from B", run: structure_predicates },
    Check { id: 12, name: "cyclic-fields", title: "conductors, inert densities and quadratic valuations", run: cyclic_fields },
    Check { id: 13, name: "equidistribution", title: "(ell - 1) alpha mod 1 over primes ell", run: equidistribution },
    Check { id: 14, name: "omega-trend", title: "density of small omega(#E(F_p))", run: omega_trend },
];

/// By name or numeric id.
pub fn find(key: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.name == key || key.parse() == Ok(c.id))
}

/// Run `checks` on up to `workers` threads; results come back in input order.
pub fn run_all(ctx: &Context, checks: &[&'static Check], workers: usize) -> Vec<(&'static Check, CheckOutcome, f64)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(CheckOutcome, f64)>>> = Mutex::new(vec![None; checks.len()]);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, checks.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(check) = checks.get(i) else { break };
                let t = Instant::now();
                let out = check.run(ctx);
                let ms = t.elapsed().as_secs_f64() * 1e3;
                slots.lock().unwrap()[i] = Some((out, ms));
            });
        }
    });
    let slots = slots.into_inner().unwrap();
    checks
        .iter()
        .zip(slots)
        .map(|(c, s)| {
            let (out, ms) = s.expect("every check ran");
            (*c, out, ms)
        })
        .collect()
}

fn ord_u64(mut n: u64, p: u64) -> i64 {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

fn finite(v: Valuation) -> i64 {
    v.finite().expect("nonzero value")
}

fn group_law(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let mut failures = Vec::new();
    // Multiples by repeated addition of P, independent of the ladder in `mul`.
    let mut pos = vec![Point::Infinity, f.point.clone()];
    while pos.len() <= 100 {
        let next = f.curve.add(pos.last().unwrap(), &f.point)?;
        pos.push(next);
    }
    let signed = |n: i64| -> Result<Point> {
        let p = &pos[n.unsigned_abs() as usize];
        if n < 0 {
            f.curve.neg(p)
        } else {
            Ok(p.clone())
        }
    };
    let mut ladder = BTreeMap::new();
    let mut mul = |k: i64| -> Result<Point> {
        if let Some(pt) = ladder.get(&k) {
            return Ok(Point::clone(pt));
        }
        let pt = f.curve.mul(k, &f.point)?;
        ladder.insert(k, pt.clone());
        Ok(pt)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..200 {
        let (m, n): (i64, i64) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50));
        let lhs = f.curve.add(&mul(m)?, &mul(n)?)?;
        if lhs != mul(m + n)? || lhs != signed(m + n)? {
            failures.push(format!("mul({m}, P) + mul({n}, P) != mul({}, P)", m + n));
        }
    }
    // Exact ord_p(x_n) from x_n = x_1 - W_(n-1) W_(n+1) / W_n^2.
    let w: Vec<Integer> = (0..=201).map(|k| division_value(f, k)).collect::<Result<_>>()?;
    let (mut determined, mut undetermined) = (0u32, 0u32);
    for n in 1..=200usize {
        let (a, b) = (f.x1().numer(), f.x1().denom());
        let wn2 = &w[n] * &w[n];
        let top = a * &wn2 - b * &w[n - 1] * &w[n + 1];
        for p in [5u64, 7, 11, 13] {
            let v = finite(integer_valuation(&top, p)) - finite(integer_valuation(b, p)) - finite(integer_valuation(&wn2, p));
            for k in 1..=6u32 {
                match f.ord_x(n as u64, p, k) {
                    Ok(got) => {
                        determined += 1;
                        if got != v {
                            failures.push(format!("ord_{p}(x_{n}) = {v}, mod {p}^{k} gave {got}"));
                        }
                    }
                    Err(Error::PrecisionInsufficient { .. }) => {
                        undetermined += 1;
                        // Only a valuation of size >= k can hide at precision k.
                        let hidden = if v < 0 { -v / 2 } else { v };
                        if hidden < k as i64 {
                            failures.push(format!("ord_{p}(x_{n}) = {v} not found at precision {p}^{k}"));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(CheckOutcome::new(
        json!({
            "random_pairs": 200,
            "valuations_determined": determined,
            "valuations_beyond_precision": undetermined,
        }),
        failures,
    ))
}

fn fixture_constants(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let d2 = d_n(f, 2, &ctx.eds)?;
    let s2 = s_truncated(f, 2, 100_000)?;
    let values = [
        ("d_2", d2.to_string(), "25".to_string()),
        ("S_2", format!("{s2:?}"), "{5}".to_string()),
        ("apparition(5)", apparition_index(f, 5)?.to_string(), "2".into()),
        ("apparition(7)", apparition_index(f, 7)?.to_string(), "7".into()),
        ("#E(F_5)", f.curve.count_points(5)?.to_string(), "6".into()),
        ("#E(F_7)", f.curve.count_points(7)?.to_string(), "7".into()),
        ("torsion order", f.torsion_order.to_string(), "1".into()),
    ];
    let failures = values
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(k, got, want)| format!("{k} = {got}, expected {want}"))
        .collect();
    let details = values.iter().map(|(k, got, _)| (k.to_string(), json!(got))).collect();
    Ok(CheckOutcome::new(Value::Object(details), failures))
}

fn denominator_subgroups(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let exact = d_sequence_exact(f, 60, &ctx.eds)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for p in [5u64, 7, 11, 13] {
        for e in [1u32, 2] {
            let r = verify_subgroup(f, p, e, 60, &ctx.eds)?;
            let direct: Vec<u64> = (1..=60u64)
                .filter(|&n| split_prime_power(&exact[n as usize - 1], p).0 >= u64::from(e))
                .collect();
            if let Some(n) = r.counterexample {
                failures.push(format!("p = {p}, e = {e}: membership of {n} disagrees with {:?} Z", r.z));
            }
            if r.members != direct {
                failures.push(format!("p = {p}, e = {e}: mod p^k members differ from exact denominators"));
            }
            rows.push(json!({"p": p, "e": e, "z": r.z, "members": r.members.len()}));
        }
    }
    Ok(CheckOutcome::new(json!(rows), failures))
}

fn support_intersections(ctx: &Context) -> Result<CheckOutcome> {
    let sc = SupportScanner::new(&ctx.fixture, 100_000)?;
    let supports: Vec<BTreeSet<u64>> = (0..=24).map(|n| if n == 0 { BTreeSet::new() } else { sc.support(n) }).collect();
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut failures = Vec::new();
    for m in 1..=24 {
        for n in 1..=24 {
            let meet: BTreeSet<u64> = supports[m].intersection(&supports[n]).copied().collect();
            if meet != supports[gcd(m, n)] {
                failures.push(format!("S_{m} and S_{n} meet in {meet:?}, S_gcd = {:?}", supports[gcd(m, n)]));
            }
        }
    }
    let sizes: Vec<usize> = supports[1..].iter().map(BTreeSet::len).collect();
    Ok(CheckOutcome::new(json!({"bound": 100_000, "pairs": 576, "support_sizes": sizes}), failures))
}

fn valuation_growth(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (p, small, big) in [(5u64, 2u64, 10u64), (7, 7, 49)] {
        let (a, _) = ord_in_denom_at(f, p, small, 8, &ctx.eds)?;
        let (b, k) = ord_in_denom_at(f, p, big, 8, &ctx.eds)?;
        if b != a + 2 {
            failures.push(format!("ord_{p} d_{big} = {b}, ord_{p} d_{small} + 2 = {}", a + 2));
        }
        for (n, v) in [(small, a), (big, b)] {
            let exact = split_prime_power(&d_n_exact(f, n, &ctx.eds)?, p).0;
            if exact != u64::from(v) {
                failures.push(format!("ord_{p} d_{n}: mod p^k gave {v}, exact {exact}"));
            }
        }
        rows.push(json!({"p": p, "n": [small, big], "ord": [a, b], "precision": k}));
    }
    if rows[0]["ord"][1] != json!(4) {
        failures.push(format!("ord_5 d_10 = {}, expected 4", rows[0]["ord"][1]));
    }
    Ok(CheckOutcome::new(json!(rows), failures))
}

fn denominator_height(ctx: &Context) -> Result<CheckOutcome> {
    let hs = height_slope(&ctx.fixture, 20, 48, &ctx.eds)?;
    let mut failures = Vec::new();
    if let Some((n, r)) = hs.rows.iter().find(|r| r.1 <= 0.0) {
        failures.push(format!("log d_{n} / {n}^2 = {r} is not positive"));
    }
    let spread = hs.spread();
    if spread >= 1.15 {
        failures.push(format!("max / min = {spread:.4} >= 1.15"));
    }
    Ok(CheckOutcome::new(json!({"median": hs.median, "spread": spread}), failures))
}

fn primitive_divisors(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let primes = prime_sieve(35);
    for (i, &l) in primes.iter().enumerate() {
        for &m in &primes[i + 1..] {
            let named = matches!((l, m), (3, 5) | (3, 7) | (5, 7));
            if l * m > 35 {
                continue;
            }
            let pp = primitive_prime(f, l, m, &ctx.eds)?;
            if !pp.imprimitive_divides {
                failures.push(format!("d_{} / primitive part does not divide ({})^2 d_{l} d_{m}", l * m, l * m));
            }
            if named && !pp.exists() {
                failures.push(format!("d_{} has trivial primitive part", l * m));
            }
            rows.push(json!({
                "ell": l,
                "m": m,
                "primitive_bits": pp.primitive_part.bits(),
                "imprimitive_divides": pp.imprimitive_divides,
            }));
        }
    }
    Ok(CheckOutcome::new(json!(rows), failures))
}

fn largest_prime_order(ctx: &Context) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for ell in [2u64, 3, 5] {
        let r = exactorder_check(&ctx.fixture, ell, ctx.count_cap, &ctx.eds)?;
        rows.push(match &r {
            ExactOrderReport::Verified { ell, p_ell, count } => {
                json!({"ell": ell, "p_ell": p_ell, "count": count, "status": "verified"})
            }
            ExactOrderReport::Failed { ell, p_ell, count } => {
                failures.push(format!("{ell} does not divide #E(F_{p_ell}) = {count}"));
                json!({"ell": ell, "p_ell": p_ell, "count": count, "status": "failed"})
            }
            ExactOrderReport::Skipped { ell, reason } => json!({"ell": ell, "status": "skipped", "reason": reason}),
        });
    }
    Ok(CheckOutcome::new(json!(rows), failures))
}

fn x_difference(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let base = xdiff_valuation(f, 1, 7, 7, START_PRECISION)?;
    let mut failures = Vec::new();
    let mut exact_checked = 0;
    for m in 1..=60u64 {
        let v = xdiff_valuation(f, m, 7, 7, START_PRECISION)?;
        if v != base + ord_u64(m, 7) {
            failures.push(format!("ord_7(x_{} - x_1) = {v}, expected {}", 7 * m + 1, base + ord_u64(m, 7)));
        }
        let idx = 7 * m + 1;
        if idx <= ctx.eds.exact_cap {
            let pt = f.multiple(idx as i64);
            let diff = pt.x().expect("affine") - f.x1();
            let exact = finite(padic_valuation(&diff, 7)?);
            exact_checked += 1;
            if exact != v {
                failures.push(format!("ord_7(x_{idx} - x_1): mod 7^k gave {v}, exact {exact}"));
            }
        }
    }
    Ok(CheckOutcome::new(json!({"base": base, "m_max": 60, "exact_cross_checks": exact_checked}), failures))
}

fn valuation_model(ctx: &Context) -> Result<CheckOutcome> {
    let f = &ctx.fixture;
    let (p, q) = choose_pq(f)?;
    let params = build_params(f, p, q)?;
    let mut failures = Vec::new();
    let m = p * q * f.curve.count_points(p)? * f.curve.count_points(q)?;
    if (p, q, params.m) != (7, 11, m) {
        failures.push(format!("(p, q, M) = ({p}, {q}, {}), expected (7, 11, {m})", params.m));
    }
    let conditions = SeqConditions { eds: ctx.eds, ..SeqConditions::model(params.congruence()) };
    let inst = ModelInstance::build_with(f, params, conditions, 4)?;
    for i in 1..=4usize {
        let d = inst.decode(i)?;
        if d != i as i64 {
            failures.push(format!("decode({i}) = {d}"));
        }
        if !inst.verify_b_membership(i)? {
            failures.push(format!("valuation test for {i} in B disagrees with direct membership {}", b_member(i as u64)));
        }
        for j in 1..=4 {
            for k in 1..=4 {
                if inst.verify_addition(i, j, k)? != (i + j == k) {
                    failures.push(format!("addition relation wrong for ({i}, {j}, {k})"));
                }
            }
        }
    }
    for cert in inst.certificates() {
        if let Some((c, s)) = cert.conditions.iter().find(|(_, s)| s.is_failed()) {
            failures.push(format!("term {}: condition {c} failed: {}", cert.index, s.detail()));
        }
        for c in [Condition::MuSmall, Condition::PairPrimitiveLarge, Condition::ExceptionalPrimitiveLarge] {
            if !matches!(cert.status(c), Some(ConditionStatus::Skipped(_))) {
                failures.push(format!("term {}: condition {c} was not recorded as skipped", cert.index));
            }
        }
    }
    Ok(CheckOutcome::new(
        json!({
            "p": p,
            "q": q,
            "M": params.m,
            "c": params.c,
            "cq": params.cq,
            "terms": inst.terms.iter().map(|t| json!({"ell": t.ell, "at_p": t.at_p, "at_q": t.at_q})).collect::<Vec<_>>(),
            "certificates": inst.certificates().iter().map(certificate_json).collect::<Vec<_>>(),
        }),
        failures,
    ))
}

fn structure_predicates(_ctx: &Context) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let z = Zstruct::new(200, Domain::Positive);
    'mult: for v in 1..=200i64 {
        for w in 1..=200i64 {
            for u in 1..=40_000i64 {
                if z.mult_defined(u, v, w) != (u == v * w) {
                    failures.push(format!("mult_defined({u}, {v}, {w}) disagrees with u = vw"));
                    break 'mult;
                }
            }
        }
    }
    'square: for u in 1..=40_000i64 {
        for v in 1..=400i64 {
            if z.square_pred(u, v) != (u == v * v) {
                failures.push(format!("square_pred({u}, {v}) disagrees with u = v^2"));
                break 'square;
            }
        }
    }
    let zi = Zstruct::new(200, Domain::Integers);
    'signed: for u in 0..=40_000i64 {
        for v in -200..=200i64 {
            if zi.square_pred(u, v) != (u == v * v) {
                failures.push(format!("square_pred({u}, {v}) over Z disagrees with u = v^2"));
                break 'signed;
            }
        }
    }
    let scan = exceptional_set_scan(1_000_000);
    Ok(CheckOutcome::new(
        json!({
            "mult_range": {"v": 200, "w": 200, "u": 40_000},
            "square_range": {"u": 40_000, "v": 400},
            "exceptional_pairs": scan,
        }),
        failures,
    ))
}

/// Squarefree `d != 1` with `d = 2, 3 mod 4`.
fn admissible_d(d: i64) -> bool {
    let n = d.unsigned_abs();
    d != 1 && matches!(d.rem_euclid(4), 2 | 3) && (2..).take_while(|q| q * q <= n).all(|q| n % (q * q) != 0)
}

fn cyclic_fields(ctx: &Context) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let c37 = find_conductor(3, 7)?;
    let c32 = find_conductor(3, 2)?;
    if (c37, c32) != (19, 31) {
        failures.push(format!("conductors (3,7) -> {c37}, (3,2) -> {c32}; expected 19, 31"));
    }
    let spec = CyclicFieldSpec::new(3, 19)?;
    let primes: Vec<u64> = prime_sieve(1_000_000).into_iter().filter(|&r| r != 19).collect();
    let mut inert = 0usize;
    for &r in &primes {
        if is_inert(r, &spec)? {
            inert += 1;
        }
    }
    let density = inert as f64 / primes.len() as f64;
    if (density - 2.0 / 3.0).abs() >= 0.01 {
        failures.push(format!("inert density {density:.4} is not within 0.01 of 2/3"));
    }
    let (_, wq) = build_wq(&[3, 5], 7, 1_000_000)?;
    if (wq.empirical - 8.0 / 15.0).abs() >= 0.02 {
        failures.push(format!("W_Q density {:.4} is not within 0.02 of 8/15", wq.empirical));
    }
    if wq.empirical < 1.0 - (1.0 / 3.0 + 1.0 / 5.0) {
        failures.push(format!("W_Q density {:.4} is below 1 - 1/3 - 1/5", wq.empirical));
    }

    let ds: Vec<i64> = (-60..=60).filter(|&d| admissible_d(d)).collect();
    let ps: Vec<u64> = prime_sieve(1000).into_iter().skip(1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x9e37_79b9_7f4a_7c15);
    let (mut split, mut tuples) = (0u32, 0u32);
    while tuples < 10_000 {
        let d = ds[rng.gen_range(0..ds.len())];
        let p = ps[rng.gen_range(0..ps.len())];
        if d.unsigned_abs() % p == 0 {
            continue;
        }
        let pp = |e: u32| Integer::from(p).pow(e);
        let u = Integer::from(rng.gen_range(-1_000_000i64..=1_000_000)) * pp(rng.gen_range(0..6));
        let v = Integer::from(rng.gen_range(-1_000_000i64..=1_000_000)) * pp(rng.gen_range(0..6));
        tuples += 1;
        let q = quadratic_min_valuation(d, &u, &v, p)?;
        let tuple = format!("(d, u, v, p) = ({d}, {u}, {v}, {p})");
        if !q.equal {
            failures.push(format!("{tuple}: {:?} != {:?}", q.lhs, q.rhs));
            break;
        }
        let norm = &u * &u - Integer::from(d) * &v * &v;
        if norm == Integer::from(0) {
            continue;
        }
        let vn = finite(integer_valuation(&norm, p));
        let agrees = match split_valuations(d, &u, &v, p) {
            Some((a, b)) => {
                split += 1;
                q.split && a + b == vn && q.rhs == Valuation::Finite(a.min(b))
            }
            None => !q.split && vn % 2 == 0 && q.rhs == Valuation::Finite(vn / 2),
        };
        if !agrees {
            failures.push(format!("{tuple}: prime decomposition disagrees with the norm"));
            break;
        }
    }
    Ok(CheckOutcome::new(
        json!({
            "conductors": {"3,7": c37, "3,2": c32},
            "inert_density_3_19": density,
            "wq_density_3_5": wq.empirical,
            "wq_union_bound": wq.union_bound,
            "random_tuples": tuples,
            "split_tuples": split,
        }),
        failures,
    ))
}

fn equidistribution(ctx: &Context) -> Result<CheckOutcome> {
    let theta = elliptic_log_angle(&ctx.fixture.curve, &ctx.fixture.point, 1e-12)?.theta;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (name, alpha) in [("sqrt2-1", std::f64::consts::SQRT_2 - 1.0), ("theta(P)", theta)] {
        for d in [2u64, 6] {
            let r = weyl_equidistribution(Alpha::Real(alpha), d, 2_000_000, 10);
            if r.insufficient_data || r.max_deviation >= 0.05 || r.weyl_sum >= 0.05 {
                failures.push(format!(
                    "alpha = {name}, d = {d}: deviation {:.4}, Weyl sum {:.4}, samples {}",
                    r.max_deviation, r.weyl_sum, r.samples
                ));
            }
            rows.push(json!({
                "alpha": name,
                "value": alpha,
                "d": d,
                "samples": r.samples,
                "max_deviation": r.max_deviation,
                "weyl_sum": r.weyl_sum,
            }));
        }
    }
    Ok(CheckOutcome::new(json!(rows), failures))
}

fn omega_trend(ctx: &Context) -> Result<CheckOutcome> {
    let prof = omega_profile(&ctx.fixture, &[10_000, 50_000, 100_000], &[2])?;
    let mut failures = Vec::new();
    for w in prof.windows(2) {
        if w[1].density > w[0].density {
            failures.push(format!("density rose from {:.4} at {} to {:.4} at {}", w[0].density, w[0].x, w[1].density, w[1].x));
        }
    }
    let rows: Vec<Value> = prof
        .iter()
        .map(|s| json!({"x": s.x, "good_primes": s.good_primes, "below": s.below, "density": s.density}))
        .collect();
    Ok(CheckOutcome::new(json!(rows), failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(find("4").unwrap().name, "support-intersections");
        assert_eq!(find("omega-trend").unwrap().id, 14);
        assert!(find("15").is_none());
        let ids: Vec<u32> = CHECKS.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=14).collect::<Vec<_>>());
    }

    #[test]
    fn admissible_discriminants() {
        let ds: Vec<i64> = (-10..=10).filter(|&d| admissible_d(d)).collect();
        assert_eq!(ds, [-10, -6, -5, -2, -1, 2, 3, 6, 7, 10]);
    }
}
