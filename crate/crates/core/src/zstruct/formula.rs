//! Positive-existential formulas over `(Z>=1, 1, +, B)`: a parser for the
//! grammar in `docs/formula-grammar.md` and a bounded witness search.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A linear term `c + sum k_i x_i` with nonnegative coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Term {
    pub constant: i128,
    pub vars: BTreeMap<String, i128>,
}

impl Term {
    fn add(&mut self, other: &Term) {
        self.constant += other.constant;
        for (v, k) in &other.vars {
            *self.vars.entry(v.clone()).or_insert(0) += k;
        }
    }

    fn scale(&mut self, k: i128) {
        self.constant *= k;
        for c in self.vars.values_mut() {
            *c *= k;
        }
    }

    fn as_var(&self) -> Option<&str> {
        match (self.constant, self.vars.len()) {
            (0, 1) => {
                let (v, k) = self.vars.iter().next().unwrap();
                (*k == 1).then_some(v.as_str())
            }
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .vars
            .iter()
            .map(|(v, k)| if *k == 1 { v.clone() } else { format!("{k}*{v}") })
            .collect();
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Eq(Term, Term),
    B(Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists {
        var: String,
        bound: i128,
        body: Box<Formula>,
    },
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Formula], op: &str| {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::B(t) => write!(f, "B({t})"),
            Formula::And(xs) => join(f, xs, "&"),
            Formula::Or(xs) => join(f, xs, "|"),
            Formula::Exists { var, bound, body } => write!(f, "exists {var}<={bound} ({body})"),
        }
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            for v in t.vars.keys() {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::B(t) => term(t, bound),
            Formula::And(xs) | Formula::Or(xs) => {
                for x in xs {
                    x.collect_free(bound, out);
                }
            }
            Formula::Exists { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(i128),
    Plus,
    Star,
    Eq,
    Le,
    And,
    Or,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse::<i128>().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "number too large".into(),
                })?;
                out.push((start, Tok::Num(n)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                out.push((start, Tok::Le));
                i += 2;
            }
            _ => {
                let t = match c {
                    b'+' => Tok::Plus,
                    b'*' => Tok::Star,
                    b'=' => Tok::Eq,
                    b'&' => Tok::And,
                    b'|' => Tok::Or,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b',' => Tok::Comma,
                    _ => {
                        return Err(Error::Parse {
                            pos: start,
                            msg: format!("unexpected character `{}`", c as char),
                        })
                    }
                };
                out.push((start, t));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut xs = alloc::vec![self.conj()?];
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            xs.push(self.conj()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Formula::Or(xs) })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut xs = alloc::vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            xs.push(self.unary()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Formula::And(xs) })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(k)) if k == "exists" => {
                self.at += 1;
                let mut binders = Vec::new();
                loop {
                    let var = match self.peek() {
                        Some(Tok::Ident(v)) if v != "exists" && v != "B" => v.clone(),
                        _ => return self.err("expected a variable after `exists`"),
                    };
                    self.at += 1;
                    self.expect(Tok::Le, "`<=` and a search bound")?;
                    let bound = match self.peek() {
                        Some(Tok::Num(n)) => *n,
                        _ => return self.err("expected a numeric search bound"),
                    };
                    self.at += 1;
                    binders.push((var, bound));
                    if self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                    } else {
                        break;
                    }
                }
                // The body extends as far right as possible.
                let mut body = self.formula()?;
                for (var, bound) in binders.into_iter().rev() {
                    body = Formula::Exists {
                        var,
                        bound,
                        body: Box::new(body),
                    };
                }
                Ok(body)
            }
            Some(Tok::Ident(k)) if k == "B" && self.toks.get(self.at + 1).map(|t| &t.1) == Some(&Tok::LParen) => {
                self.at += 2;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::B(t))
            }
            _ => {
                let lhs = self.term()?;
                self.expect(Tok::Eq, "`=`")?;
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.summand()?;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            let s = self.summand()?;
            t.add(&s);
        }
        Ok(t)
    }

    fn summand(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                if self.peek() == Some(&Tok::Star) {
                    self.at += 1;
                    let mut s = self.summand()?;
                    s.scale(n);
                    Ok(s)
                } else {
                    Ok(Term {
                        constant: n,
                        vars: BTreeMap::new(),
                    })
                }
            }
            Some(Tok::Ident(v)) if v != "exists" && v != "B" => {
                self.at += 1;
                let mut vars = BTreeMap::new();
                vars.insert(v, 1);
                Ok(Term { constant: 0, vars })
            }
            _ => self.err("expected a term"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Outcome of a bounded search: a witness was found, or none within the
/// declared bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    Unknown,
}

/// Members of `B` up to `bound`.
fn b_members(bound: i128) -> Vec<i128> {
    (1..126u32)
        .map(|n| (1i128 << n) + i128::from(n) * i128::from(n))
        .take_while(|&v| v <= bound)
        .collect()
}

fn is_b(x: i128) -> bool {
    b_members(x).last() == Some(&x)
}

struct Env {
    stack: Vec<(String, i128)>,
    /// Free variables per subformula, keyed by address within one evaluation.
    free: BTreeMap<*const Formula, Vec<String>>,
}

enum Solved {
    Value(i128),
    NoSolution,
    Open,
}

impl Env {
    fn get(&self, v: &str) -> Option<i128> {
        self.stack.iter().rev().find(|e| e.0 == v).map(|e| e.1)
    }

    fn value(&self, t: &Term) -> Result<Option<i128>> {
        let mut acc = t.constant;
        for (v, k) in &t.vars {
            let x = match self.get(v) {
                Some(x) => x,
                None => return Ok(None),
            };
            acc = k
                .checked_mul(x)
                .and_then(|p| acc.checked_add(p))
                .ok_or_else(|| Error::InvalidArgument("term value overflows i128".into()))?;
        }
        Ok(Some(acc))
    }

    fn free_of(&mut self, f: &Formula) -> &[String] {
        self.free
            .entry(f as *const Formula)
            .or_insert_with(|| f.free_vars().into_iter().collect())
    }

    fn closed(&mut self, f: &Formula) -> bool {
        let free = self.free_of(f).to_vec();
        free.iter().all(|v| self.get(v).is_some())
    }

    fn mentions(&mut self, f: &Formula, v: &str) -> bool {
        self.free_of(f).iter().any(|x| x == v)
    }

    fn value_without(&self, t: &Term, skip: &str) -> Result<Option<i128>> {
        let mut acc = t.constant;
        for (v, k) in t.vars.iter().filter(|e| e.0 != skip) {
            let x = match self.get(v) {
                Some(x) => x,
                None => return Ok(None),
            };
            acc = k
                .checked_mul(x)
                .and_then(|p| acc.checked_add(p))
                .ok_or_else(|| Error::InvalidArgument("term value overflows i128".into()))?;
        }
        Ok(Some(acc))
    }

    /// Solve the linear equation `a = b` for `v`, other variables bound.
    fn solve(&self, a: &Term, b: &Term, v: &str) -> Result<Solved> {
        let k = a.vars.get(v).copied().unwrap_or(0) - b.vars.get(v).copied().unwrap_or(0);
        let (ra, rb) = match (self.value_without(a, v)?, self.value_without(b, v)?) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(Solved::Open),
        };
        if k == 0 {
            return Ok(if ra == rb { Solved::Open } else { Solved::NoSolution });
        }
        let num = rb - ra;
        Ok(if num % k == 0 {
            Solved::Value(num / k)
        } else {
            Solved::NoSolution
        })
    }

    /// A finite superset of the values of `v` in `[1, bound]` that can make
    /// `f` true, or `None` when no finite set is evident.
    fn candidates(&mut self, f: &Formula, v: &str, bound: i128) -> Result<Option<BTreeSet<i128>>> {
        let in_range = |x: i128| (1..=bound).contains(&x);
        if !self.mentions(f, v) {
            if self.closed(f) && !self.eval(f)? {
                return Ok(Some(BTreeSet::new()));
            }
            return Ok(None);
        }
        match f {
            Formula::Eq(a, b) => Ok(match self.solve(a, b, v)? {
                Solved::Value(x) => Some(Some(x).filter(|&x| in_range(x)).into_iter().collect()),
                Solved::NoSolution => Some(BTreeSet::new()),
                Solved::Open => None,
            }),
            Formula::B(t) if t.as_var() == Some(v) => Ok(Some(b_members(bound).into_iter().collect())),
            Formula::B(_) => Ok(None),
            Formula::And(xs) => {
                let mut acc: Option<BTreeSet<i128>> = None;
                // Cheap pruning first: children that do not involve `v`.
                for x in xs {
                    if !self.mentions(x, v) && self.closed(x) && !self.eval(x)? {
                        return Ok(Some(BTreeSet::new()));
                    }
                }
                // Atoms first; a finite superset from them is enough.
                let atoms_first = xs
                    .iter()
                    .filter(|x| matches!(x, Formula::Eq(..) | Formula::B(_)))
                    .chain(xs.iter().filter(|x| !matches!(x, Formula::Eq(..) | Formula::B(_))));
                for x in atoms_first {
                    if !self.mentions(x, v) {
                        continue;
                    }
                    if acc.is_some() && !matches!(x, Formula::Eq(..) | Formula::B(_)) {
                        break;
                    }
                    if let Some(c) = self.candidates(x, v, bound)? {
                        acc = Some(match acc {
                            None => c,
                            Some(a) => a.intersection(&c).copied().collect(),
                        });
                        if acc.as_ref().is_some_and(|a| a.is_empty()) {
                            break;
                        }
                    }
                }
                Ok(acc)
            }
            Formula::Or(xs) => {
                let mut acc = BTreeSet::new();
                for x in xs {
                    match self.candidates(x, v, bound)? {
                        Some(c) => acc.extend(c),
                        None => return Ok(None),
                    }
                }
                Ok(Some(acc))
            }
            Formula::Exists { var, bound: yb, body } => {
                let ys = match self.candidates(body, var, *yb)? {
                    Some(ys) => ys,
                    None => return Ok(None),
                };
                let mut acc = BTreeSet::new();
                for y in ys {
                    self.stack.push((var.clone(), y));
                    let c = self.candidates(body, v, bound);
                    self.stack.pop();
                    match c? {
                        Some(c) => acc.extend(c),
                        None => return Ok(None),
                    }
                }
                Ok(Some(acc))
            }
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<bool> {
        match f {
            Formula::Eq(a, b) => match (self.value(a)?, self.value(b)?) {
                (Some(x), Some(y)) => Ok(x == y),
                _ => Err(Error::UnboundVariable(f.free_vars().into_iter().next().unwrap_or_default())),
            },
            Formula::B(t) => match self.value(t)? {
                Some(x) => Ok(is_b(x)),
                None => Err(Error::UnboundVariable(f.free_vars().into_iter().next().unwrap_or_default())),
            },
            Formula::And(xs) => {
                for x in xs {
                    if !self.eval(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(xs) => {
                for x in xs {
                    if self.eval(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists { var, bound, body } => {
                let cands: Vec<i128> = match self.candidates(body, var, *bound)? {
                    Some(c) => c.into_iter().collect(),
                    None => (1..=*bound).collect(),
                };
                for x in cands {
                    self.stack.push((var.clone(), x));
                    let r = self.eval(body);
                    self.stack.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Search for witnesses of `f` under `env`, each quantifier ranging over
/// `1..=bound`.
///
/// Candidate values come from equations solvable for the quantified
/// variable, from `B(x)` conjuncts, or failing both from the full range.
pub fn evaluate(f: &Formula, env: &BTreeMap<String, i128>) -> Result<Truth> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !env.contains_key(v)) {
        return Err(Error::UnboundVariable(v));
    }
    let mut e = Env {
        stack: env.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        free: BTreeMap::new(),
    };
    Ok(if e.eval(f)? { Truth::True } else { Truth::Unknown })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i128)]) -> BTreeMap<String, i128> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    use crate::zstruct::MULTIPLICATION;

    #[test]
    fn parse_examples() {
        let f = parse_formula("exists z<=100 (x = y + z)").unwrap();
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), ["x", "y"]);
        let g = parse_formula("B(x) | 2*x + 1 = y & B(y)").unwrap();
        assert!(matches!(g, Formula::Or(ref xs) if xs.len() == 2));
        assert!(matches!(parse_formula("x = "), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_formula("x ~ y"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_formula("exists x (x = 1)"), Err(Error::Parse { .. })));
        let h = parse_formula("exists a<=3, b<=4 a = b").unwrap();
        assert_eq!(h.to_string(), "exists a<=3 (exists b<=4 (a = b))");
    }

    #[test]
    fn evaluate_examples() {
        let f = parse_formula("exists z<=100 (x = y + z)").unwrap();
        assert_eq!(evaluate(&f, &env(&[("x", 10), ("y", 3)])).unwrap(), Truth::True);
        assert_eq!(evaluate(&f, &env(&[("x", 3), ("y", 10)])).unwrap(), Truth::Unknown);
        let b = parse_formula("B(x)").unwrap();
        assert_eq!(evaluate(&b, &env(&[("x", 17)])).unwrap(), Truth::True);
        assert_eq!(evaluate(&b, &env(&[("x", 18)])).unwrap(), Truth::Unknown);
        assert_eq!(
            evaluate(&parse_formula("B(3)").unwrap(), &BTreeMap::new()).unwrap(),
            Truth::True
        );
        assert!(matches!(evaluate(&f, &env(&[("x", 1)])), Err(Error::UnboundVariable(v)) if v == "y"));
    }

    #[test]
    fn brute_force_when_nothing_pins_the_witness() {
        // z + z = x has no equation solvable by a unit coefficient only when
        // x is odd; the solver still handles the coefficient 2.
        let f = parse_formula("exists z<=50 (z + z = x)").unwrap();
        assert_eq!(evaluate(&f, &env(&[("x", 14)])).unwrap(), Truth::True);
        assert_eq!(evaluate(&f, &env(&[("x", 15)])).unwrap(), Truth::Unknown);
        let g = parse_formula("exists z<=50 (B(z + 1) | z = 70)").unwrap();
        assert_eq!(evaluate(&g, &BTreeMap::new()).unwrap(), Truth::True);
    }

    #[test]
    fn multiplication_formula() {
        let f = parse_formula(MULTIPLICATION).unwrap();
        let free: Vec<String> = f.free_vars().into_iter().collect();
        assert_eq!(free, ["u", "v", "w"]);
        assert_eq!(evaluate(&f, &env(&[("u", 35), ("v", 5), ("w", 7)])).unwrap(), Truth::True);
        assert_eq!(evaluate(&f, &env(&[("u", 36), ("v", 5), ("w", 7)])).unwrap(), Truth::Unknown);
        for v in 1..=8i128 {
            for w in 1..=8i128 {
                for u in 1..=70i128 {
                    let t = evaluate(&f, &env(&[("u", u), ("v", v), ("w", w)])).unwrap();
                    assert_eq!(t == Truth::True, u == v * w, "u={u} v={v} w={w}");
                }
            }
        }
    }
}
