//! The structure `(Z>=1, 1, +, B)` with `B = {2^n + n^2 : n >= 1}` and the
//! predicates built from it: consecutive members of `B`, the set
//! `T = {(2n - 1, n^2 - 2n - 1)}`, squaring and multiplication.

mod formula;

pub use formula::{evaluate, parse_formula, Formula, Term, Truth};

/// A positive-existential definition of `u = v w` in the formula grammar.
pub const MULTIPLICATION: &str = include_str!("../../formulas/multiplication.pe");

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// `2^n + n^2`, or `None` past `u64`.
pub fn b_value(n: u32) -> Option<u64> {
    if n >= 64 {
        return None;
    }
    (1u64 << n).checked_add(u64::from(n) * u64::from(n))
}

/// Streaming generator of `(n, 2^n + n^2)` with a membership cache.
#[derive(Debug, Clone, Default)]
pub struct BGen {
    values: Vec<u64>,
}

impl BGen {
    pub fn new() -> Self {
        BGen { values: Vec::new() }
    }

    fn extend_to(&mut self, x: u64) {
        loop {
            if matches!(self.values.last(), Some(&v) if v >= x) {
                return;
            }
            let n = self.values.len() as u32 + 1;
            match b_value(n) {
                Some(v) => self.values.push(v),
                None => return,
            }
        }
    }

    /// Index `n` with `x = 2^n + n^2`.
    pub fn index_of(&mut self, x: u64) -> Option<u32> {
        self.extend_to(x);
        self.values.binary_search(&x).ok().map(|i| i as u32 + 1)
    }

    pub fn contains(&mut self, x: u64) -> bool {
        self.index_of(x).is_some()
    }

    /// Members up to `bound`, in increasing order.
    pub fn members_upto(&mut self, bound: u64) -> Vec<u64> {
        self.extend_to(bound);
        self.values.iter().copied().take_while(|&v| v <= bound).collect()
    }
}

impl Iterator for BGen {
    type Item = (u32, u64);

    fn next(&mut self) -> Option<(u32, u64)> {
        let n = self.values.len() as u32 + 1;
        let v = b_value(n)?;
        self.values.push(v);
        Some((n, v))
    }
}

pub fn b_member(x: u64) -> bool {
    for n in 1..64 {
        match b_value(n) {
            Some(v) if v == x => return true,
            Some(v) if v > x => return false,
            Some(_) => {}
            None => return false,
        }
    }
    false
}

/// Index-based: `x = 2^n + n^2` and `y = 2^(n+1) + (n+1)^2`.
pub fn consecutive(x: u64, y: u64) -> bool {
    let mut g = BGen::new();
    match g.index_of(x) {
        Some(n) => b_value(n + 1) == Some(y),
        None => false,
    }
}

/// The definable version: `x, y` in `B` with `x < y < 3x`.
pub fn consecutive_by_inequality(x: u64, y: u64) -> bool {
    b_member(x) && b_member(y) && x < y && (y as u128) < 3 * x as u128
}

/// Pairs in `B^2` below `bound` where the two notions of consecutive differ.
pub fn exceptional_set_scan(bound: u64) -> Vec<(u64, u64)> {
    let members = BGen::new().members_upto(bound);
    let mut out = Vec::new();
    for (i, &x) in members.iter().enumerate() {
        for (j, &y) in members.iter().enumerate() {
            let by_index = j == i + 1;
            let by_ineq = x < y && (y as u128) < 3 * x as u128;
            if by_index != by_ineq {
                out.push((x, y));
            }
        }
    }
    out
}

/// Which integers the predicates are read over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    /// `Z>=1`, the universe of the structure.
    #[default]
    Positive,
    /// All of `Z`, for the clauses that mention `-v` and `0`.
    Integers,
}

/// Cached elements of `T`, each built from a chain `x, y, z` of consecutive
/// members of `B` as `((2y - z) - (2x - y), 2x - y)`.
#[derive(Debug, Clone)]
pub struct TSet {
    /// `elements[n - 1]` is the element coming from index `n`.
    elements: Vec<(i64, i64)>,
}

impl TSet {
    /// Elements whose first coordinate is at most `2 * max_v - 1`.
    pub fn new(max_v: u32) -> Self {
        let big = |n: u32| (BigInt::from(1) << n) + BigInt::from(n) * BigInt::from(n);
        let elements = (1..=max_v.max(1))
            .map(|n| {
                let (x, y, z) = (big(n), big(n + 1), big(n + 2));
                let second: BigInt = 2 * &x - &y;
                let first: BigInt = (2 * &y - &z) - &second;
                (
                    first.to_i64().expect("small coordinate"),
                    second.to_i64().expect("small coordinate"),
                )
            })
            .collect();
        TSet { elements }
    }

    pub fn elements(&self) -> &[(i64, i64)] {
        &self.elements
    }

    /// Membership for first coordinates covered by the cache; `None` beyond.
    pub fn contains(&self, u: i64, v: i64, domain: Domain) -> Option<bool> {
        if domain == Domain::Positive && (u < 1 || v < 1) {
            return Some(false);
        }
        let last = self.elements.last().map_or(0, |e| e.0);
        if u > last {
            return None;
        }
        // First coordinates are increasing.
        Some(self.elements.binary_search_by_key(&u, |e| e.0).is_ok_and(|i| self.elements[i].1 == v))
    }

    fn witness(&self, v: i64) -> Option<i64> {
        let first = 2 * v - 1;
        self.elements
            .binary_search_by_key(&first, |e| e.0)
            .ok()
            .map(|i| self.elements[i].1 + 2 * v + 1)
    }
}

/// The squaring and multiplication predicates over a cached `T`.
#[derive(Debug, Clone)]
pub struct Zstruct {
    t: TSet,
    domain: Domain,
    /// `squares[v]`: the `u` with `P(u, v)`, found from `T`.
    squares: Vec<Option<i64>>,
}

impl Zstruct {
    /// Predicates for arguments up to `max_v` (sums `v + w` up to `2 max_v`).
    pub fn new(max_v: u32, domain: Domain) -> Self {
        let reach = 2 * max_v;
        let t = TSet::new(reach);
        let squares = (0..=i64::from(reach))
            .map(|v| if v >= 1 { t.witness(v) } else { None })
            .collect();
        Zstruct { t, domain, squares }
    }

    pub fn t_member(&self, u: i64, v: i64) -> bool {
        self.t.contains(u, v, self.domain).unwrap_or(false)
    }

    /// `P(u, v)`: `(2v - 1, u - 2v - 1)` in `T`.
    fn p(&self, u: i64, v: i64) -> bool {
        self.t.contains(2 * v - 1, u - 2 * v - 1, self.domain).unwrap_or(false)
    }

    /// `u = v^2` through `T`.
    ///
    /// Over `Z>=1` the `T`-coordinates of `v = 1, 2` are not positive, so
    /// those two squares are added as constant clauses. Over `Z` the
    /// clauses `P(u, -v)` and `u = v = 0` are used instead.
    pub fn square_pred(&self, u: i64, v: i64) -> bool {
        match self.domain {
            Domain::Positive => {
                if u < 1 || v < 1 {
                    return false;
                }
                self.p(u, v) || (v == 1 && u == 1) || (v == 2 && u == 4)
            }
            Domain::Integers => self.p(u, v) || self.p(u, -v) || (u == 0 && v == 0),
        }
    }

    fn square_of(&self, v: i64) -> Option<i64> {
        match self.domain {
            Domain::Positive => match v {
                1 => Some(1),
                2 => Some(4),
                _ => self.squares.get(v as usize).copied().flatten(),
            },
            Domain::Integers => {
                let a = v.unsigned_abs() as usize;
                if a == 0 {
                    Some(0)
                } else {
                    self.squares.get(a).copied().flatten()
                }
            }
        }
    }

    /// `u = vw` decided as `(v + w)^2 = v^2 + w^2 + 2u` with each square
    /// taken from `square_pred`.
    pub fn mult_defined(&self, u: i64, v: i64, w: i64) -> bool {
        if self.domain == Domain::Positive && (u < 1 || v < 1 || w < 1) {
            return false;
        }
        match (self.square_of(v + w), self.square_of(v), self.square_of(w)) {
            (Some(s), Some(sv), Some(sw)) => s == sv + sw + 2 * u,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_examples() {
        assert!(b_member(3));
        assert!(b_member(8));
        assert!(b_member(17));
        assert!(!b_member(7));
        assert!(!b_member(1));
        let first: Vec<u64> = BGen::new().take(4).map(|p| p.1).collect();
        assert_eq!(first, [3, 8, 17, 32]);
        assert_eq!(BGen::new().index_of(17), Some(3));
    }

    #[test]
    fn consecutive_examples() {
        assert!(consecutive(3, 8));
        assert!(consecutive(8, 17));
        assert!(!consecutive(3, 17));
        assert!(consecutive_by_inequality(3, 8));
        assert!(!consecutive_by_inequality(3, 17));
        assert!(exceptional_set_scan(1_000_000).is_empty());
    }

    #[test]
    fn t_has_closed_form() {
        let t = TSet::new(60);
        for (i, &(u, v)) in t.elements().iter().enumerate() {
            let n = i as i64 + 1;
            assert_eq!((u, v), (2 * n - 1, n * n - 2 * n - 1));
        }
        assert_eq!(t.contains(1, -2, Domain::Positive), Some(false));
        assert_eq!(t.contains(1, -2, Domain::Integers), Some(true));
    }

    #[test]
    fn square_and_product_examples() {
        let z = Zstruct::new(10, Domain::Positive);
        assert!(z.square_pred(9, 3));
        assert!(z.square_pred(1, 1) && z.square_pred(4, 2));
        assert!(!z.square_pred(8, 3));
        assert!(z.mult_defined(12, 3, 4));
        assert!(!z.mult_defined(13, 3, 4));
        let zi = Zstruct::new(10, Domain::Integers);
        assert!(zi.square_pred(9, -3));
        assert!(zi.square_pred(0, 0));
        assert!(zi.mult_defined(-12, 3, -4));
    }

    #[test]
    fn predicates_match_arithmetic() {
        let z = Zstruct::new(40, Domain::Positive);
        for v in 1..=40i64 {
            for w in 1..=40i64 {
                for u in 1..=1700i64 {
                    assert_eq!(z.mult_defined(u, v, w), u == v * w);
                }
            }
            for u in 1..=1700i64 {
                assert_eq!(z.square_pred(u, v), u == v * v);
            }
        }
    }
}
