//! Exact arithmetic on Q ∪ {∞}, Farey triples and the 3-regular tree they
//! generate under mutation.
//!
//! Values are coprime pairs `num/den` with `den >= 0`; infinity is the
//! canonical pair `1/0` and is the greatest element in the total order.
//! All operations are pure and all types are immutable after construction,
//! so everything here is safe to share across threads.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An element of Q ∪ {∞} as a coprime pair, the slope value of the crate.
///
/// Invariants: `gcd(|num|, den) = 1`, `den >= 0`, and `den = 0` forces
/// `num = 1` (there is a single infinity).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat {
    num: BigInt,
    den: BigInt,
}

impl Rat {
    /// Builds the unique canonical representative of `num/den`.
    ///
    /// Any pair with zero denominator maps to infinity; a negative
    /// denominator moves the sign into the numerator. `(0, 0)` is rejected.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroOverZero);
        }
        if den.is_zero() {
            return Ok(Self {
                num: BigInt::one(),
                den: BigInt::zero(),
            });
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::one(),
        }
    }

    pub fn infinity() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    /// Numerator, the degree coordinate of the slope.
    pub fn num(&self) -> &BigInt {
        &self.num
    }

    /// Denominator, the rank coordinate; always nonnegative.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    /// Farey distance `|num(p)·den(q) − num(q)·den(p)|`.
    pub fn distance(&self, other: &Rat) -> BigInt {
        (&self.num * &other.den - &other.num * &self.den).abs()
    }

    /// Two values are Farey neighbours when their distance is 1.
    pub fn is_neighbour(&self, other: &Rat) -> bool {
        self.distance(other).is_one()
    }

    /// Farey sum (mediant): `(num(p)+num(q)) / (den(p)+den(q))`.
    pub fn farey_sum(&self, other: &Rat) -> Rat {
        Rat::new(&self.num + &other.num, &self.den + &other.den)
            .expect("farey sum of canonical pairs cannot be 0/0")
    }

    /// Farey difference: `(num(p)−num(q)) / (den(p)−den(q))`.
    ///
    /// Equal operands are rejected; a vanishing denominator difference
    /// normalizes to infinity.
    pub fn farey_diff(&self, other: &Rat) -> Result<Rat> {
        if self == other {
            return Err(Error::DiffOfEqual(self.to_string()));
        }
        let num = &self.num - &other.num;
        let den = &self.den - &other.den;
        if den.is_zero() {
            debug_assert!(
                num.abs().is_one(),
                "difference with equal denominators must have numerator ±1 between neighbours"
            );
        }
        Ok(Rat::new(num, den).expect("operands are distinct"))
    }

    /// The componentwise value `2q ⊖ p = (2·num(q)−num(p)) / (2·den(q)−den(p))`.
    ///
    /// This is not a chained Farey difference: the doubled pair `2q` is not
    /// in lowest terms, so the computation is done on raw components.
    pub fn double_diff(q: &Rat, p: &Rat) -> Result<Rat> {
        Rat::new(
            2 * &q.num - &p.num,
            2 * &q.den - &p.den,
        )
    }

    /// Complexity `|num| + den + |num − den|`.
    pub fn complexity(&self) -> BigInt {
        self.num.abs() + &self.den + (&self.num - &self.den).abs()
    }
}

impl Ord for Rat {
    /// Total order on Q ∪ {∞} with infinity strictly greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Parses `"num/den"`; a bare integer is read as `n/1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a fraction like 1/2 or 1/0, got {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let num: BigInt = n.trim().parse().map_err(|_| bad())?;
                let den: BigInt = d.trim().parse().map_err(|_| bad())?;
                Rat::new(num, den)
            }
            None => {
                let num: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(Rat::new(num, 1).expect("denominator 1"))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Three pairwise Farey neighbours, kept in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FareyTriple {
    elems: [Rat; 3],
}

impl FareyTriple {
    /// Validates distinctness and pairwise neighbourhood.
    pub fn new(a: Rat, b: Rat, c: Rat) -> Result<Self> {
        let mut elems = [a, b, c];
        elems.sort();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if elems[i] == elems[j] {
                return Err(Error::InvalidTriple(format!(
                    "repeated element {} in {},{},{}",
                    elems[i], elems[0], elems[1], elems[2]
                )));
            }
            if !elems[i].is_neighbour(&elems[j]) {
                return Err(Error::NotNeighbours(
                    elems[i].to_string(),
                    elems[j].to_string(),
                    elems[i].distance(&elems[j]).to_string(),
                ));
            }
        }
        Ok(Self { elems })
    }

    /// The minimal triple `{0, 1, ∞}`, root of the exchange tree.
    pub fn root() -> Self {
        Self {
            elems: [Rat::zero(), Rat::one(), Rat::infinity()],
        }
    }

    /// Elements in ascending order (infinity greatest).
    pub fn elems(&self) -> &[Rat; 3] {
        &self.elems
    }

    pub fn contains(&self, p: &Rat) -> bool {
        self.elems.iter().any(|e| e == p)
    }

    /// Mutation in direction `p ∈ t`: the middle element is exchanged for the
    /// Farey difference of the other two, an extreme element for their sum.
    pub fn mutate(&self, p: &Rat) -> Result<FareyTriple> {
        Ok(self.exchange(p)?.0)
    }

    /// Like [`mutate`](Self::mutate), also returning the fresh element.
    pub fn exchange(&self, p: &Rat) -> Result<(FareyTriple, Rat)> {
        let Some(pos) = self.elems.iter().position(|e| e == p) else {
            return Err(Error::DirectionNotInTriple(
                p.to_string(),
                self.to_string(),
            ));
        };
        let (q, r) = match pos {
            0 => (&self.elems[1], &self.elems[2]),
            1 => (&self.elems[0], &self.elems[2]),
            _ => (&self.elems[0], &self.elems[1]),
        };
        let fresh = if pos == 1 {
            q.farey_diff(r)?
        } else {
            q.farey_sum(r)
        };
        let triple = FareyTriple::new(fresh.clone(), q.clone(), r.clone())?;
        Ok((triple, fresh))
    }

    /// Sum of the complexities of the elements.
    pub fn complexity(&self) -> BigInt {
        self.elems.iter().map(Rat::complexity).sum()
    }

    /// The unique direction whose mutation lowers the complexity sum;
    /// `None` exactly for the root `{0, 1, ∞}`.
    pub fn descent_direction(&self) -> Result<Option<Rat>> {
        if *self == FareyTriple::root() {
            return Ok(None);
        }
        let own = self.complexity();
        let mut down = None;
        for p in &self.elems {
            if self.mutate(p)?.complexity() < own {
                if down.is_some() {
                    return Err(Error::AmbiguousDescent(self.to_string()));
                }
                down = Some(p.clone());
            }
        }
        if down.is_none() {
            return Err(Error::AmbiguousDescent(self.to_string()));
        }
        Ok(down)
    }
}

impl fmt::Display for FareyTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.elems[0], self.elems[1], self.elems[2])
    }
}

impl fmt::Debug for FareyTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl FromStr for FareyTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three comma-separated fractions, got {s:?}"
            )));
        }
        FareyTriple::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }
}

impl Serialize for FareyTriple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FareyTriple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[Rat; 3]>::deserialize(deserializer)?;
        FareyTriple::new(a, b, c).map_err(D::Error::custom)
    }
}

/// The two Farey triples containing a given pair of neighbours.
///
/// Writing the larger of `p, q` as `a/b` and the smaller as `c/d`, the third
/// element is `(εa − φc)/(εb − φd)` over the sign choices `ε, φ ∈ {1, −1}`,
/// which collapse to exactly two values. The pair is returned with the
/// lower-complexity completion first.
pub fn completions(p: &Rat, q: &Rat) -> Result<(FareyTriple, FareyTriple)> {
    if !p.is_neighbour(q) {
        return Err(Error::NotNeighbours(
            p.to_string(),
            q.to_string(),
            p.distance(q).to_string(),
        ));
    }
    let (hi, lo) = if p > q { (p, q) } else { (q, p) };
    let (a, b) = (hi.num(), hi.den());
    let (c, d) = (lo.num(), lo.den());
    let mut third: Vec<Rat> = Vec::new();
    for eps in [1, -1] {
        for phi in [1, -1] {
            let e = eps * a - phi * c;
            let f = eps * b - phi * d;
            let r = Rat::new(e, f)?;
            if !third.contains(&r) {
                third.push(r);
            }
        }
    }
    debug_assert_eq!(third.len(), 2, "the sign cases give exactly two triples");
    third.sort_by_key(|r| (r.complexity(), r.clone()));
    let first = FareyTriple::new(third[0].clone(), p.clone(), q.clone())?;
    let second = FareyTriple::new(third[1].clone(), p.clone(), q.clone())?;
    Ok((first, second))
}

/// A node of the Farey exchange tree.
///
/// `parent_direction` is the element created on arrival; mutating there
/// returns to the parent. It is `None` only for the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub triple: FareyTriple,
    pub depth: u32,
    pub parent_direction: Option<Rat>,
}

impl TreeNode {
    pub fn root() -> Self {
        Self {
            triple: FareyTriple::root(),
            depth: 0,
            parent_direction: None,
        }
    }

    /// Non-backtracking successors, in ascending direction order.
    pub fn children(&self) -> Vec<TreeNode> {
        self.triple
            .elems()
            .iter()
            .filter(|dir| Some(*dir) != self.parent_direction.as_ref())
            .map(|dir| {
                let (triple, fresh) = self
                    .triple
                    .exchange(dir)
                    .expect("directions are triple members");
                debug_assert!(triple.complexity() > self.triple.complexity());
                TreeNode {
                    triple,
                    depth: self.depth + 1,
                    parent_direction: Some(fresh),
                }
            })
            .collect()
    }
}

/// All triples at tree distance 1..n from the root, breadth first, each
/// exactly once; the count is `3·(2^n − 1)`.
pub fn tree_ball(depth: u32) -> Vec<TreeNode> {
    let mut out = Vec::new();
    let mut frontier = vec![TreeNode::root()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for node in &frontier {
            next.extend(node.children());
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
