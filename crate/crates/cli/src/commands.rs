use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dioph_core::arith::Integer;
use dioph_core::curve::{CurveFixture, Point};
use dioph_core::cyclofield::{build_wq, find_conductor, quadratic_min_valuation, split_valuations};
use dioph_core::eds::{
    apparition_index, d_n, denom_profile_exact, height_slope, primitive_prime, verify_subgroup, SupportScanner,
};
use dioph_core::model::{build_params, choose_pq, ModelInstance};
use dioph_core::primeseq::{
    integer_points_check, Certificate, Condition, ConditionStatus, Membership, ModelCongruence, PointStatus,
    SeqConditions, SequenceState, TsetOracle, Variant, Witness,
};
use dioph_core::zstruct::{evaluate, exceptional_set_scan, parse_formula, Domain, Truth, Zstruct};
use dioph_core::Error;
use serde_json::{json, Value};

use crate::checks::{self, Context};
use crate::config::{Config, Format};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "dioph", version, about = "Elliptic divisibility sequences, prime sequences and the structures built from them")]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = Format::from_str)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The fixture curve and point.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Denominators d_n of the multiples nP.
    #[command(subcommand)]
    Eds(EdsCmd),
    /// Prime sequences and their certificates.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Addition and B encoded in valuations.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Formulas and predicates over (Z>=1, 1, +, B).
    #[command(subcommand)]
    Zstruct(ZstructCmd),
    /// Cyclic subfields of cyclotomic fields.
    #[command(subcommand)]
    Cyclo(CycloCmd),
    /// Run the acceptance checks.
    VerifyAll {
        /// Comma-separated check names or ids; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CurveCmd {
    Info,
    /// #E(F_p) and the order of P mod p.
    Count {
        #[arg(long)]
        p: u64,
    },
    /// nP as an exact rational point.
    Mul {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum EdsCmd {
    /// d_n and its prime support.
    Profile {
        #[arg(long)]
        n: u64,
        /// Support scan bound used when d_n is not factored exactly.
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Least n with p | d_n.
    Apparition {
        #[arg(long)]
        p: u64,
    },
    /// {n <= bound : ord_p d_n >= e} against z Z.
    Subgroup {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
        #[arg(long, default_value_t = 60)]
        bound: u64,
    },
    /// Primitive part of d_(ell m).
    Primitive {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        m: u64,
    },
    /// log d_n / n^2 over a range.
    Height {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Discrete,
    Model,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Discrete)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    /// Choose terms and emit a certificate per term.
    Build(SeqArgs),
    /// Re-evaluate the certificates of a `seq build` report.
    Replay {
        #[arg(long)]
        report: PathBuf,
    },
    /// Membership of a prime in T1 and T2.
    Oracle {
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Which nP are S-integral for every admissible S.
    Points {
        #[arg(long)]
        bound: u64,
        #[command(flatten)]
        seq: SeqArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelOp {
    Add,
    B,
    Decode,
}

#[derive(Debug, Subcommand)]
pub enum ModelCmd {
    Build {
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Check one relation on every index (or triple) up to `count`.
    Verify {
        #[arg(long, value_enum)]
        op: ModelOp,
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZstructCmd {
    /// Evaluate a formula file, or stdin with `-`.
    Eval {
        #[arg(long)]
        formula: String,
        /// `name=value` bindings for free variables.
        #[arg(long = "var")]
        vars: Vec<String>,
    },
    /// The squaring-based multiplication predicate on one triple.
    Mult {
        #[arg(long)]
        u: i64,
        #[arg(long)]
        v: i64,
        #[arg(long)]
        w: i64,
        /// Read the predicates over Z instead of Z>=1.
        #[arg(long)]
        integers: bool,
    },
    /// Pairs of B where index-consecutive and x < y < 3x disagree.
    Scan {
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CycloCmd {
    /// Smallest conductor of a degree-p field in which q splits.
    Find {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Density of primes inert in every listed field.
    Density {
        #[arg(long, value_delimiter = ',', required = true)]
        specs: Vec<u64>,
        #[arg(long = "x", visible_alias = "X", default_value_t = 1_000_000)]
        x: u64,
        /// The prime required to split.
        #[arg(long, default_value_t = 7)]
        pq: u64,
    },
    /// min(ord_p u, ord_p v) against the primes above p in Q(sqrt d).
    Valuation {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        p: u64,
    },
}

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit 2 without a report.
    Usage(String),
    /// A check or computation failed; exit 1 with the report.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::NotPrime(_)
            | Error::BadReduction(_)
            | Error::Parse { .. }
            | Error::UnboundVariable(_)
            | Error::Precondition(_)
            | Error::Ramified { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

pub fn execute(cmd: &Command, cfg: &Config, report: &mut Report) -> Outcome {
    match cmd {
        Command::Curve(c) => curve(c, cfg, report),
        Command::Eds(c) => eds(c, cfg, report),
        Command::Seq(c) => seq(c, cfg, report),
        Command::Model(c) => model(c, cfg, report),
        Command::Zstruct(c) => zstruct(c, report),
        Command::Cyclo(c) => cyclo(c, report),
        Command::VerifyAll { only } => verify_all(only, cfg, report),
    }
}

/// A rejected fixture is a failed assertion, not a usage error.
fn fixture(cfg: &Config) -> Result<CurveFixture, Failure> {
    cfg.fixture.build().map_err(|e| Failure::Check(format!("fixture rejected: {e}")))
}

fn point_json(p: &Point) -> Value {
    match p {
        Point::Infinity => json!("O"),
        Point::Affine { x, y } => json!({"x": x.to_string(), "y": y.to_string()}),
    }
}

fn curve(cmd: &CurveCmd, cfg: &Config, report: &mut Report) -> Outcome {
    let f = fixture(cfg)?;
    report.results = match *cmd {
        CurveCmd::Info => json!({
            "a": f.curve.a.to_string(),
            "b": f.curve.b.to_string(),
            "discriminant": f.curve.discriminant().to_string(),
            "point": point_json(&f.point),
            "bad_primes": f.bad_primes,
            "torsion_order": f.torsion_order,
            "r": f.r,
        }),
        CurveCmd::Count { p } => {
            let count = f.curve.count_points_capped(p, cfg.count_cap)?;
            let order = if f.is_good(p) { Some(f.order_mod_p(p)?) } else { None };
            json!({"p": p, "count": count, "good": f.is_good(p), "order_of_P": order})
        }
        CurveCmd::Mul { n } => {
            if n.unsigned_abs() > cfg.exact_cap {
                return Err(Error::BudgetExceeded { what: "exact multiple index", cap: cfg.exact_cap }.into());
            }
            json!({"n": n, "point": point_json(&f.multiple(n))})
        }
    };
    Ok(())
}

fn eds(cmd: &EdsCmd, cfg: &Config, report: &mut Report) -> Outcome {
    let f = fixture(cfg)?;
    let ec = cfg.eds();
    report.results = match *cmd {
        EdsCmd::Profile { n, bound } => {
            if n == 0 {
                return Err(Failure::Usage("n must be positive".into()));
            }
            if n <= ec.exact_cap {
                let prof = denom_profile_exact(&f, n, &ec)?;
                json!({
                    "n": n,
                    "d_n": prof.d_n.to_string(),
                    "support": prof.support(),
                    "support_complete": prof.denom_ideal.is_complete(),
                    "exponents": prof.denom_ideal.factors,
                    "exponents_even": prof.exponents_even,
                    "bad_part": prof.bad_part,
                })
            } else {
                let d = d_n(&f, n, &ec)?;
                let sc = SupportScanner::new(&f, bound)?;
                json!({
                    "n": n,
                    "d_n": d.to_string(),
                    "support": sc.support(n),
                    "support_complete": false,
                    "support_bound": bound,
                })
            }
        }
        EdsCmd::Apparition { p } => json!({"p": p, "apparition": apparition_index(&f, p)?}),
        EdsCmd::Subgroup { p, e, bound } => {
            let r = verify_subgroup(&f, p, e, bound, &ec)?;
            if let Some(n) = r.counterexample {
                report.fail(format!("membership of {n} disagrees with {:?} Z", r.z));
            }
            json!({"p": p, "e": e, "bound": bound, "z": r.z, "members": r.members})
        }
        EdsCmd::Primitive { ell, m } => {
            let pp = primitive_prime(&f, ell, m, &ec)?;
            if !pp.imprimitive_divides {
                report.fail(format!("imprimitive part of d_{} does not divide ({})^2 d_{ell} d_{m}", ell * m, ell * m));
            }
            json!({
                "ell": ell,
                "m": m,
                "primitive_part": pp.primitive_part.to_string(),
                "largest_prime": pp.largest_prime.map(|p| p.to_string()),
                "complete": pp.complete,
                "imprimitive_divides": pp.imprimitive_divides,
            })
        }
        EdsCmd::Height { lo, hi } => {
            let hs = height_slope(&f, lo, hi, &ec)?;
            json!({"median": hs.median, "spread": hs.spread(), "rows": hs.rows})
        }
    };
    Ok(())
}

pub fn certificate_json(c: &Certificate) -> Value {
    json!({
        "index": c.index,
        "ell": c.ell,
        "conditions": c.conditions.iter().map(|(k, s)| json!({
            "condition": k.name(),
            "status": s.label(),
            "detail": s.detail(),
        })).collect::<Vec<_>>(),
    })
}

fn certificate_from_json(v: &Value, variant: &Variant) -> Result<Certificate, Failure> {
    let bad = || Failure::Usage("malformed certificate".into());
    let index = v["index"].as_u64().ok_or_else(bad)? as usize;
    let ell = v["ell"].as_u64().ok_or_else(bad)?;
    let mut conditions = Vec::new();
    for c in v["conditions"].as_array().ok_or_else(bad)? {
        let name = c["condition"].as_str().ok_or_else(bad)?;
        let cond = *Condition::for_variant(variant)
            .iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Failure::Usage(format!("unknown condition `{name}`")))?;
        let detail = c["detail"].as_str().ok_or_else(bad)?.to_string();
        let status = match c["status"].as_str() {
            Some("passed") => ConditionStatus::Passed(detail),
            Some("skipped") => ConditionStatus::Skipped(detail),
            Some("failed") => ConditionStatus::Failed(detail),
            _ => return Err(bad()),
        };
        conditions.push((cond, status));
    }
    Ok(Certificate { index, ell, conditions })
}

fn congruence_json(c: &ModelCongruence) -> Value {
    json!({"p": c.p, "q": c.q, "m": c.m})
}

fn seq_conditions(f: &CurveFixture, variant: VariantArg, cfg: &Config) -> Result<SeqConditions, Failure> {
    let base = match variant {
        VariantArg::Discrete => SeqConditions::discrete(),
        VariantArg::Model => {
            let (p, q) = choose_pq(f)?;
            SeqConditions::model(build_params(f, p, q)?.congruence())
        }
    };
    Ok(SeqConditions { eds: cfg.eds(), ..base })
}

fn built_sequence(f: &CurveFixture, args: &SeqArgs, cfg: &Config) -> Result<SequenceState, Failure> {
    let mut st = SequenceState::new(f, seq_conditions(f, args.variant, cfg)?)?;
    st.build(args.count)?;
    Ok(st)
}

fn variant_json(v: &Variant) -> Value {
    match v {
        Variant::Discrete => json!({"name": "discrete"}),
        Variant::Model(c) => json!({"name": "model", "congruence": congruence_json(c)}),
    }
}

fn membership(m: Membership) -> &'static str {
    match m {
        Membership::In => "in",
        Membership::Out => "out",
        Membership::Unknown => "unknown",
    }
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::LargestOfPower { ell, a, prime } => {
            json!({"kind": "largest-of-power", "ell": ell, "a": a, "prime": prime.as_ref().map(|p| p.to_string())})
        }
        Witness::SequencePair { ell_i, ell_j, primitive_bits } => {
            json!({"kind": "sequence-pair", "ell_i": ell_i, "ell_j": ell_j, "primitive_bits": primitive_bits})
        }
        Witness::ExceptionalPair { ell, ell_i, primitive_bits } => {
            json!({"kind": "exceptional-pair", "ell": ell, "ell_i": ell_i, "primitive_bits": primitive_bits})
        }
    }
}

fn seq(cmd: &SeqCmd, cfg: &Config, report: &mut Report) -> Outcome {
    let f = fixture(cfg)?;
    match cmd {
        SeqCmd::Build(args) => {
            let st = built_sequence(&f, args, cfg)?;
            let c = st.conditions();
            report.results = json!({
                "variant": variant_json(&c.variant),
                "count": args.count,
                "bound": c.bound,
                "pair_cap": c.pair_cap,
                "exceptional_max": c.exceptional_max,
                "checkpoints": c.checkpoints,
                "ells": st.ells(),
            });
            report.certificates = st.chosen.iter().map(certificate_json).collect();
            if let Some(m) = st.replay()?.first() {
                report.fail(format!("term {}: {} stored {:?}, replayed {:?}", m.index, m.condition, m.stored, m.replayed));
            }
        }
        SeqCmd::Replay { report: path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let stored: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            if stored["config_hash"] != json!(report.config_hash) {
                report.fail("the stored report was produced under a different configuration");
                return Ok(());
            }
            let variant = match stored["results"]["variant"]["name"].as_str() {
                Some("discrete") => VariantArg::Discrete,
                Some("model") => VariantArg::Model,
                _ => return Err(Failure::Usage("not a `seq build` report".into())),
            };
            let mut st = SequenceState::new(&f, seq_conditions(&f, variant, cfg)?)?;
            let certs = stored["certificates"].as_array().cloned().unwrap_or_default();
            for c in &certs {
                st.chosen.push(certificate_from_json(c, &st.conditions().variant)?);
            }
            let mismatches = st.replay()?;
            for m in &mismatches {
                report.fail(format!("term {}: {} stored {:?}, replayed {:?}", m.index, m.condition, m.stored, m.replayed));
            }
            report.results = json!({"terms": certs.len(), "mismatches": mismatches.len(), "ells": st.ells()});
        }
        SeqCmd::Oracle { prime, seq } => {
            let st = built_sequence(&f, seq, cfg)?;
            let o = TsetOracle::new(&st, cfg.count_cap);
            let (t1, t2) = (o.t1_member(*prime)?, o.t2_member(*prime)?);
            if t1 == Membership::In && t2 == Membership::In {
                report.fail(format!("{prime} placed in both T1 and T2"));
            }
            report.results = json!({
                "prime": prime,
                "ells": st.ells(),
                "t1": membership(t1),
                "t2": membership(t2),
                "apparition": if f.is_good(*prime) && *prime <= cfg.count_cap { Some(f.order_mod_p(*prime)?) } else { None },
            });
        }
        SeqCmd::Points { bound, seq } => {
            let st = built_sequence(&f, seq, cfg)?;
            let o = TsetOracle::new(&st, cfg.count_cap);
            let r = integer_points_check(&o, *bound)?;
            if let Some(n) = r.violations.first() {
                report.fail(format!("{n}P classified against the sequence"));
            } else if let Some(p) = r.overlaps.first() {
                report.fail(format!("{p} lies in S of a term and in T2"));
            }
            let points: Vec<Value> = r
                .points
                .iter()
                .map(|(n, s)| match s {
                    PointStatus::Integral(why) => json!({"n": n, "status": "integral", "reason": why}),
                    PointStatus::NotIntegral(w) => json!({"n": n, "status": "not-integral", "witness": witness_json(w)}),
                    PointStatus::Undecided(why) => json!({"n": n, "status": "undecided", "reason": why}),
                })
                .collect();
            report.results = json!({"ells": st.ells(), "bound": bound, "points": points});
        }
    }
    Ok(())
}

fn model_instance(f: &CurveFixture, cfg: &Config, count: usize) -> Result<ModelInstance, Failure> {
    let (p, q) = choose_pq(f)?;
    let params = build_params(f, p, q)?;
    let conditions = SeqConditions { eds: cfg.eds(), ..SeqConditions::model(params.congruence()) };
    Ok(ModelInstance::build_with(f, params, conditions, count)?)
}

fn model(cmd: &ModelCmd, cfg: &Config, report: &mut Report) -> Outcome {
    let f = fixture(cfg)?;
    let count = match *cmd {
        ModelCmd::Build { count } | ModelCmd::Verify { count, .. } => count,
    };
    if count == 0 {
        return Err(Failure::Usage("count must be positive".into()));
    }
    let inst = model_instance(&f, cfg, count)?;
    let p = &inst.params;
    let params = json!({"p": p.p, "q": p.q, "count_p": p.count_p, "count_q": p.count_q, "M": p.m, "c": p.c, "cq": p.cq});
    report.certificates = inst.certificates().iter().map(certificate_json).collect();
    report.results = match *cmd {
        ModelCmd::Build { .. } => json!({
            "params": params,
            "terms": inst.terms.iter().map(|t| json!({
                "ell": t.ell,
                "at_p": t.at_p,
                "at_q": t.at_q,
                "precision_p": t.precision_p,
                "precision_q": t.precision_q,
            })).collect::<Vec<_>>(),
        }),
        ModelCmd::Verify { op, .. } => {
            let mut checked = 0u32;
            for i in 1..=count {
                match op {
                    ModelOp::Decode => {
                        checked += 1;
                        let d = inst.decode(i)?;
                        if d != i as i64 {
                            report.fail(format!("decode({i}) = {d}"));
                        }
                    }
                    ModelOp::B => {
                        checked += 1;
                        if !inst.verify_b_membership(i)? {
                            report.fail(format!("valuation test for {i} in B disagrees with direct membership"));
                        }
                    }
                    ModelOp::Add => {
                        for j in 1..=count {
                            for k in 1..=count {
                                checked += 1;
                                if inst.verify_addition(i, j, k)? != (i + j == k) {
                                    report.fail(format!("addition relation wrong for ({i}, {j}, {k})"));
                                }
                            }
                        }
                    }
                }
            }
            json!({"params": params, "op": format!("{op:?}").to_lowercase(), "cases": checked})
        }
    };
    Ok(())
}

fn parse_binding(s: &str) -> Result<(String, i128), Failure> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("binding `{s}` is not name=value")))?;
    let v = v.trim().parse().map_err(|e| Failure::Usage(format!("binding `{s}`: {e}")))?;
    Ok((k.trim().to_string(), v))
}

fn zstruct(cmd: &ZstructCmd, report: &mut Report) -> Outcome {
    report.results = match cmd {
        ZstructCmd::Eval { formula, vars } => {
            let text = if formula == "-" {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
                s
            } else {
                std::fs::read_to_string(formula).map_err(|e| Failure::Usage(format!("{formula}: {e}")))?
            };
            let f = parse_formula(&text)?;
            let env: BTreeMap<String, i128> = vars.iter().map(|s| parse_binding(s)).collect::<Result<_, _>>()?;
            let truth = evaluate(&f, &env)?;
            json!({
                "formula": f.to_string(),
                "bindings": env.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect::<serde_json::Map<_, _>>(),
                "value": match truth {
                    Truth::True => "true",
                    Truth::Unknown => "unknown",
                },
            })
        }
        &ZstructCmd::Mult { u, v, w, integers } => {
            let reach = v.unsigned_abs().max(w.unsigned_abs()).max(1);
            let reach = u32::try_from(reach).map_err(|_| Failure::Usage("v and w are too large".into()))?;
            let domain = if integers { Domain::Integers } else { Domain::Positive };
            let z = Zstruct::new(reach, domain);
            json!({
                "u": u,
                "v": v,
                "w": w,
                "domain": if integers { "integers" } else { "positive" },
                "mult_defined": z.mult_defined(u, v, w),
                "square_pred(u, v)": z.square_pred(u, v),
            })
        }
        &ZstructCmd::Scan { bound } => {
            let pairs = exceptional_set_scan(bound);
            json!({"bound": bound, "pairs": pairs})
        }
    };
    Ok(())
}

fn parse_integer(s: &str) -> Result<Integer, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("`{s}` is not an integer")))
}

fn cyclo(cmd: &CycloCmd, report: &mut Report) -> Outcome {
    report.results = match cmd {
        &CycloCmd::Find { p, q } => json!({"p": p, "q": q, "conductor": find_conductor(p, q)?}),
        CycloCmd::Density { specs, x, pq } => {
            let (w, d) = build_wq(specs, *pq, *x)?;
            json!({
                "fields": w.specs.iter().map(|s| json!({"degree": s.degree, "conductor": s.conductor})).collect::<Vec<_>>(),
                "p_q": pq,
                "bound": x,
                "primes": d.primes,
                "inert": d.inert,
                "empirical": d.empirical,
                "union_bound": d.union_bound,
                "chebotarev": d.chebotarev,
            })
        }
        CycloCmd::Valuation { d, u, v, p } => {
            let (u, v) = (parse_integer(u)?, parse_integer(v)?);
            let q = quadratic_min_valuation(*d, &u, &v, *p)?;
            if !q.equal {
                report.fail(format!("min(ord u, ord v) = {:?} but the ideal valuation is {:?}", q.lhs, q.rhs));
            }
            json!({
                "lhs": format!("{:?}", q.lhs),
                "rhs": format!("{:?}", q.rhs),
                "split": q.split,
                "equal": q.equal,
                "split_valuations": split_valuations(*d, &u, &v, *p),
            })
        }
    };
    Ok(())
}

fn verify_all(only: &[String], cfg: &Config, report: &mut Report) -> Outcome {
    let selected: Vec<&'static checks::Check> = if only.is_empty() {
        checks::CHECKS.iter().collect()
    } else {
        only.iter()
            .map(|k| checks::find(k).ok_or_else(|| Failure::Usage(format!("unknown check `{k}`"))))
            .collect::<Result<_, _>>()?
    };
    let f = fixture(cfg)?;
    let ctx = Context { fixture: f, eds: cfg.eds(), count_cap: cfg.count_cap, seed: cfg.seed };
    let t = Instant::now();
    let results = checks::run_all(&ctx, &selected, cfg.workers);
    let mut rows = Vec::new();
    for (check, out, ms) in results {
        if let Some(c) = &out.counterexample {
            report.fail(format!("{}: {c}", check.name));
        }
        report.timing.insert(check.name.to_string(), ms);
        rows.push(json!({
            "id": check.id,
            "check": check.name,
            "title": check.title,
            "passed": out.passed,
            "counterexample": out.counterexample,
            "details": out.details,
        }));
    }
    report.timing.insert("checks".into(), t.elapsed().as_secs_f64() * 1e3);
    let passed = rows.iter().filter(|r| r["passed"] == json!(true)).count();
    report.results = json!({"passed": passed, "total": rows.len(), "checks": rows});
    Ok(())
}
