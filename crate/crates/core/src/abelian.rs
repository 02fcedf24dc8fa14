//! Finite abelian groups written as direct sums of cyclic factors.
//!
//! A [`GroupSpec`] is the list of cyclic orders `Z_n1 + ... + Z_nk`. Elements are
//! residue vectors and are totally ordered lexicographically, which makes every
//! "pick the least element with property P" choice in the crate deterministic.
//! The zero vector is always the least element, so element index 0 is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest group order for which a dense [`CayleyTable`] is built.
pub const MAX_TABLE_ORDER: usize = 1024;

/// Largest group order for which [`GroupSpec::automorphisms`] enumerates.
pub const MAX_AUTOMORPHISM_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid group: {0}")]
    InvalidSpec(String),
    #[error("cannot parse group '{0}': expected forms like Z4, Z2+Z4 or V4")]
    Parse(String),
    #[error("cannot parse element '{text}' of {group}")]
    ParseElement { text: String, group: String },
    #[error("element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{target} is not a sum of {parts} nonzero elements of {group}")]
    Infeasible {
        target: String,
        parts: usize,
        group: String,
    },
}

/// A finite abelian group `Z_n1 + ... + Z_nk` with every `n_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GroupSpec {
    factors: Vec<u32>,
}

/// An element of a [`GroupSpec`], stored as one residue per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl GroupElement {
    pub fn new(residues: Vec<u32>) -> Self {
        GroupElement { residues }
    }

    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.len() == 1 {
            return write!(f, "{}", self.residues[0]);
        }
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors `d1 | d2 | ... | dk` (ascending) of the sum of the given cyclic orders.
fn invariant_factors(factors: &[u32]) -> Vec<u32> {
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in factors {
        for (p, e) in factorize(n as u64) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let k = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; k];
    for (p, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (j, e) in exps.into_iter().enumerate() {
            out[k - 1 - j] *= p.pow(e);
        }
    }
    out.into_iter().map(|d| d as u32).collect()
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl GroupSpec {
    pub fn new(factors: Vec<u32>) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::InvalidSpec("no cyclic factors".into()));
        }
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(GroupError::InvalidSpec(format!(
                "cyclic factor Z{bad} has order below 2"
            )));
        }
        let order = factors
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n as u64));
        match order {
            Some(o) if o <= u32::MAX as u64 => Ok(GroupSpec { factors }),
            _ => Err(GroupError::InvalidSpec("group order overflows".into())),
        }
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: u32) -> Result<Self, GroupError> {
        GroupSpec::new(vec![n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).product()
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// True when the factors are already the ascending invariant factors.
    pub fn is_canonical(&self) -> bool {
        invariant_factors(&self.factors) == self.factors
    }

    /// The isomorphic group written with invariant factors.
    pub fn canonical(&self) -> GroupSpec {
        GroupSpec {
            factors: invariant_factors(&self.factors),
        }
    }

    pub fn is_isomorphic(&self, other: &GroupSpec) -> bool {
        self.canonical() == other.canonical()
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &n| lcm(acc, n as u64))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::new(vec![0; self.factors.len()])
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.residues.len() == self.factors.len()
            && a.residues.iter().zip(&self.factors).all(|(r, n)| r < n)
    }

    fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(GroupError::Mismatch {
                element: a.to_string(),
                group: self.to_string(),
            })
        }
    }

    /// Builds an element from residues, reducing nothing and rejecting out-of-range values.
    pub fn element(&self, residues: &[u32]) -> Result<GroupElement, GroupError> {
        let e = GroupElement::new(residues.to_vec());
        self.check(&e)?;
        Ok(e)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::new(
            self.factors
                .iter()
                .zip(a.residues.iter().zip(&b.residues))
                .map(|(&n, (&x, &y))| ((x as u64 + y as u64) % n as u64) as u32)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(GroupElement::new(
            self.factors
                .iter()
                .zip(&a.residues)
                .map(|(&n, &x)| (n - x) % n)
                .collect(),
        ))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// `k * a` for any integer `k`, negative values included.
    pub fn scalar_mul(&self, k: i64, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(GroupElement::new(
            self.factors
                .iter()
                .zip(&a.residues)
                .map(|(&n, &x)| {
                    let n = n as i128;
                    ((k as i128 * x as i128).rem_euclid(n)) as u32
                })
                .collect(),
        ))
    }

    pub fn element_order(&self, a: &GroupElement) -> Result<u64, GroupError> {
        self.check(a)?;
        Ok(self
            .factors
            .iter()
            .zip(&a.residues)
            .fold(1, |acc, (&n, &x)| {
                lcm(acc, n as u64 / gcd(n as u64, x as u64))
            }))
    }

    /// Element with the given position in lexicographic order.
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0; self.factors.len()];
        for (slot, &n) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % n as usize) as u32;
            index /= n as usize;
        }
        GroupElement::new(residues)
    }

    /// Position of an element in lexicographic order.
    pub fn index_of(&self, a: &GroupElement) -> Result<usize, GroupError> {
        self.check(a)?;
        Ok(self
            .factors
            .iter()
            .zip(&a.residues)
            .fold(0, |acc, (&n, &x)| acc * n as usize + x as usize))
    }

    /// All elements in lexicographic order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (1..self.order()).map(move |i| self.element_at(i))
    }

    /// Nonzero elements of the form `2h`, ascending.
    pub fn squares(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = self
            .elements()
            .map(|h| self.add_unchecked(&h, &h))
            .filter(|g| !g.is_zero())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Elements of order exactly two, ascending.
    pub fn involutions(&self) -> Vec<GroupElement> {
        self.nonzero_elements()
            .filter(|h| self.add_unchecked(h, h).is_zero())
            .collect()
    }

    /// Lexicographically least element of prime order `p`.
    pub fn cauchy_element(&self, p: u64) -> Result<GroupElement, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::Domain(format!("{p} is not prime")));
        }
        if !(self.order() as u64).is_multiple_of(p) {
            return Err(GroupError::Domain(format!(
                "{p} does not divide the order {} of {self}",
                self.order()
            )));
        }
        self.nonzero_elements()
            .find(|a| self.element_order(a) == Ok(p))
            .ok_or_else(|| GroupError::Domain(format!("no element of order {p} in {self}")))
    }

    fn decomposable(&self, target: &GroupElement, n: usize) -> bool {
        match n {
            0 => target.is_zero(),
            1 => !target.is_zero(),
            _ if self.order() > 2 => true,
            _ => target.residues[0] as usize == n % 2,
        }
    }

    /// Writes `target` as a sum of `n` nonzero elements.
    ///
    /// The first summand is the least nonzero element that leaves a feasible
    /// remainder, and the rest follow recursively, so the answer is unique.
    /// `n = 0` is accepted for a zero target and yields no summands.
    pub fn decompose_sum(
        &self,
        target: &GroupElement,
        n: usize,
    ) -> Result<Vec<GroupElement>, GroupError> {
        self.check(target)?;
        if n == 1 && target.is_zero() {
            return Err(GroupError::Domain(
                "a single nonzero summand cannot add up to zero".into(),
            ));
        }
        if !self.decomposable(target, n) {
            return Err(GroupError::Infeasible {
                target: target.to_string(),
                parts: n,
                group: self.to_string(),
            });
        }
        let mut out = Vec::with_capacity(n);
        let mut rest = target.clone();
        for left in (1..=n).rev() {
            if left == 1 {
                out.push(rest.clone());
                break;
            }
            let first = self
                .nonzero_elements()
                .find(|g| {
                    let remainder = self.add_unchecked(&rest, &self.neg(g).expect("member"));
                    self.decomposable(&remainder, left - 1)
                })
                .expect("feasibility was checked");
            rest = self.add_unchecked(&rest, &self.neg(&first).expect("member"));
            out.push(first);
        }
        Ok(out)
    }

    /// Parses an element literal: `3` for one factor, `(1,2)` or `1,2` for several.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, GroupError> {
        let err = || GroupError::ParseElement {
            text: text.to_string(),
            group: self.to_string(),
        };
        let body = text.trim();
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .unwrap_or(body);
        let residues = body
            .split(',')
            .map(|part| part.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        let e = GroupElement::new(residues);
        if self.contains(&e) {
            Ok(e)
        } else {
            Err(err())
        }
    }

    /// Every automorphism as a permutation of element indices.
    ///
    /// Refuses groups above [`MAX_AUTOMORPHISM_ORDER`].
    pub fn automorphisms(&self) -> Result<Vec<Vec<usize>>, GroupError> {
        let order = self.order();
        if order > MAX_AUTOMORPHISM_ORDER {
            return Err(GroupError::Domain(format!(
                "automorphism enumeration is limited to order {MAX_AUTOMORPHISM_ORDER}"
            )));
        }
        // Candidate images of each generator: elements killed by its order.
        let candidates: Vec<Vec<GroupElement>> = self
            .factors
            .iter()
            .map(|&n| {
                self.elements()
                    .filter(|x| self.scalar_mul(n as i64, x).map(|y| y.is_zero()) == Ok(true))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; self.factors.len()];
        loop {
            let images: Vec<&GroupElement> = choice
                .iter()
                .zip(&candidates)
                .map(|(&c, cands)| &cands[c])
                .collect();
            let perm: Vec<usize> = self
                .elements()
                .map(|a| {
                    let mut acc = self.zero();
                    for (&r, img) in a.residues.iter().zip(&images) {
                        let term = self.scalar_mul(r as i64, img).expect("member");
                        acc = self.add_unchecked(&acc, &term);
                    }
                    self.index_of(&acc).expect("member")
                })
                .collect();
            let mut seen = vec![false; order];
            if perm.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                out.push(perm);
            }
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return Ok(out);
                }
                choice[k] += 1;
                if choice[k] < candidates[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Accepts `Z4`, `Z2+Z4`, `z2 + z2`, `Z2⊕Z4` and the alias `V4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::Parse(s.to_string());
        let mut factors = Vec::new();
        for part in s.split(['+', '⊕']) {
            let part = part.trim().to_ascii_lowercase();
            if part == "v4" {
                factors.extend([2, 2]);
                continue;
            }
            let n = part
                .strip_prefix('z')
                .and_then(|digits| digits.trim().parse::<u32>().ok())
                .ok_or_else(err)?;
            factors.push(n);
        }
        GroupSpec::new(factors)
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = GroupError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GroupSpec> for String {
    fn from(g: GroupSpec) -> String {
        g.to_string()
    }
}

/// Every abelian group of order `2..=max_order` up to isomorphism, in invariant
/// factor form, ordered by (order, number of factors, factors).
pub fn enumerate_abelian_groups(max_order: usize) -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for m in 2..=max_order {
        let mut shapes: Vec<Vec<u32>> = vec![vec![]];
        for (p, e) in factorize(m as u64) {
            let mut next = Vec::new();
            for shape in &shapes {
                for part in partitions(e, e) {
                    let mut s = shape.clone();
                    s.extend(part.iter().map(|&k| (p as u32).pow(k)));
                    next.push(s);
                }
            }
            shapes = next;
        }
        let mut groups: Vec<GroupSpec> = shapes
            .into_iter()
            .map(|s| GroupSpec {
                factors: invariant_factors(&s),
            })
            .collect();
        groups.sort_by(|a, b| (a.rank(), &a.factors).cmp(&(b.rank(), &b.factors)));
        groups.dedup();
        out.extend(groups);
    }
    out
}

/// Dense addition table over element indices, used by the search code.
#[derive(Debug, Clone)]
pub struct CayleyTable {
    spec: GroupSpec,
    order: usize,
    add: Vec<u16>,
    neg: Vec<u16>,
}

impl CayleyTable {
    pub fn new(spec: &GroupSpec) -> Result<Self, GroupError> {
        let order = spec.order();
        if order > MAX_TABLE_ORDER {
            return Err(GroupError::Domain(format!(
                "dense tables are limited to order {MAX_TABLE_ORDER}"
            )));
        }
        let elems: Vec<GroupElement> = spec.elements().collect();
        let mut add = vec![0u16; order * order];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let s = spec.add_unchecked(a, b);
                add[i * order + j] = spec.index_of(&s).expect("member") as u16;
            }
        }
        let neg = (0..order)
            .map(|i| {
                (0..order)
                    .find(|&j| add[i * order + j] == 0)
                    .expect("inverse") as u16
            })
            .collect();
        Ok(CayleyTable {
            spec: spec.clone(),
            order,
            add,
            neg,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn element(&self, index: u16) -> GroupElement {
        self.spec.element_at(index as usize)
    }
}
