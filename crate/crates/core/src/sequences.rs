//! Finitely described infinite sequences of naturals and infinite subsets of ℕ.
//!
//! An [`EpSeq`] is an explicit prefix followed by a repeating cycle that is
//! read either as values or as increments added to the last prefix value.
//! The second reading is what keeps partial sums (and therefore strictly
//! increasing sequences) inside the representable class. An [`EpSet`] is a
//! subset of ℕ with an eventually periodic characteristic sequence.
//!
//! Everything here is exact; no operation iterates up to the index it is
//! asked about.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("sequence is not strictly increasing")]
    NotIncreasing,
    #[error("set is finite and has no infinite increasing enumeration")]
    FiniteSet,
    #[error("value {0} exceeds the addressable range")]
    TooLarge(Nat),
    #[error("values are unbounded; partial sums have no eventually periodic increments")]
    Unbounded,
    #[error("result decreases inside its periodic tail and has no increments form")]
    NotRepresentable,
}

pub(crate) fn to_index(v: &Nat) -> Result<usize, SeqError> {
    v.to_usize().ok_or_else(|| SeqError::TooLarge(v.clone()))
}

/// Smallest `d` dividing `items.len()` such that `items` is `d`-periodic.
fn minimal_period<T: PartialEq>(items: &[T]) -> usize {
    let p = items.len();
    (1..=p)
        .filter(|&d| p.is_multiple_of(d))
        .find(|&d| (d..p).all(|i| items[i] == items[i - d]))
        .unwrap_or(p)
}

/// How the cycle of an [`EpSeq`] continues the prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailKind {
    /// `v(n) = cycle[(n - k) mod p]` for `n >= k`.
    Values,
    /// `v(n) = v(n - 1) + cycle[(n - k) mod p]` for `n >= k`.
    Increments,
}

/// An eventually periodic sequence of naturals, in values or in increments.
///
/// The prefix is never empty: an increments tail needs an anchor value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpSeq {
    prefix: Vec<Nat>,
    tail: TailKind,
    cycle: Vec<Nat>,
}

impl EpSeq {
    /// Builds a sequence. An empty prefix promotes the first cycle entry to
    /// `v(0)` and rotates the cycle, which for an increments tail is the same
    /// as anchoring the increments at an implicit `v(-1) = 0`.
    pub fn new(mut prefix: Vec<Nat>, tail: TailKind, mut cycle: Vec<Nat>) -> Result<Self, SeqError> {
        if cycle.is_empty() {
            return Err(SeqError::EmptyCycle);
        }
        if prefix.is_empty() {
            prefix.push(cycle[0].clone());
            cycle.rotate_left(1);
        }
        Ok(Self { prefix, tail, cycle })
    }

    pub fn from_u64(prefix: &[u64], tail: TailKind, cycle: &[u64]) -> Result<Self, SeqError> {
        Self::new(
            prefix.iter().map(|&v| Nat::from(v)).collect(),
            tail,
            cycle.iter().map(|&v| Nat::from(v)).collect(),
        )
    }

    pub fn constant(c: u64) -> Self {
        Self::from_u64(&[c], TailKind::Values, &[c]).expect("nonempty cycle")
    }

    /// `slope * n + offset`.
    pub fn linear(slope: u64, offset: u64) -> Self {
        Self::from_u64(&[offset], TailKind::Increments, &[slope]).expect("nonempty cycle")
    }

    pub fn prefix(&self) -> &[Nat] {
        &self.prefix
    }

    pub fn tail(&self) -> TailKind {
        self.tail
    }

    pub fn cycle(&self) -> &[Nat] {
        &self.cycle
    }

    pub fn preperiod(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Net change over one full cycle of the tail (zero for a values tail).
    pub fn cycle_growth(&self) -> Nat {
        match self.tail {
            TailKind::Values => Nat::zero(),
            TailKind::Increments => self.cycle.iter().sum(),
        }
    }

    /// Value at index `n`, in closed form.
    pub fn eval(&self, n: &Nat) -> Nat {
        let k = self.prefix.len();
        if let Some(i) = n.to_usize().filter(|&i| i < k) {
            return self.prefix[i].clone();
        }
        let p = Nat::from(self.cycle.len());
        match self.tail {
            TailKind::Values => {
                let r = ((n - Nat::from(k)) % &p).to_usize().expect("residue below period");
                self.cycle[r].clone()
            }
            TailKind::Increments => {
                let steps = n - Nat::from(k - 1);
                let (q, r) = steps.div_rem(&p);
                let r = r.to_usize().expect("residue below period");
                let partial: Nat = self.cycle[..r].iter().sum();
                &self.prefix[k - 1] + q * self.cycle_growth() + partial
            }
        }
    }

    pub fn at(&self, n: usize) -> Nat {
        self.eval(&Nat::from(n))
    }

    /// The value stream, starting at index 0.
    pub fn iter(&self) -> Iter<'_> {
        Iter { seq: self, n: 0, current: Nat::zero() }
    }

    pub fn take_values(&self, count: usize) -> Vec<Nat> {
        self.iter().take(count).collect()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.tail == TailKind::Increments
            && self.cycle.iter().all(|c| !c.is_zero())
            && self.prefix.windows(2).all(|w| w[0] < w[1])
    }

    pub(crate) fn require_increasing(&self) -> Result<(), SeqError> {
        if self.is_strictly_increasing() {
            Ok(())
        } else {
            Err(SeqError::NotIncreasing)
        }
    }

    /// Canonical representative of the value stream: minimal cycle, then
    /// minimal (nonempty) prefix. Eventually constant increment tails become
    /// value tails.
    pub fn normalize(&self) -> Self {
        let mut s = self.clone();
        if s.tail == TailKind::Increments && s.cycle.iter().all(Zero::is_zero) {
            let last = s.prefix.last().expect("nonempty prefix").clone();
            s.tail = TailKind::Values;
            s.cycle = vec![last];
        }
        let d = minimal_period(&s.cycle);
        s.cycle.truncate(d);
        while s.prefix.len() >= 2 {
            let k = s.prefix.len();
            let removable = match s.tail {
                TailKind::Values => s.prefix[k - 1] == s.cycle[d - 1],
                TailKind::Increments => {
                    s.prefix[k - 1] >= s.prefix[k - 2]
                        && &s.prefix[k - 1] - &s.prefix[k - 2] == s.cycle[d - 1]
                }
            };
            if !removable {
                break;
            }
            s.prefix.pop();
            s.cycle.rotate_right(1);
        }
        s
    }

    /// True when both describe the same value stream.
    pub fn same_stream(&self, other: &Self) -> bool {
        self.normalize() == other.normalize()
    }

    /// The sequence `n ↦ self(n + d)`.
    pub fn shift(&self, d: usize) -> Self {
        let k = self.prefix.len();
        if d < k {
            return Self { prefix: self.prefix[d..].to_vec(), tail: self.tail, cycle: self.cycle.clone() };
        }
        let mut cycle = self.cycle.clone();
        let r = (d + 1 - k) % cycle.len();
        cycle.rotate_left(r);
        Self { prefix: vec![self.at(d)], tail: self.tail, cycle }
    }

    /// Rebuilds a sequence from the window `values[0..k + p]`, which must be
    /// the true stream with the tail of the given kind periodic from `k`.
    pub(crate) fn from_window(values: &[Nat], k: usize, p: usize, tail: TailKind) -> Self {
        debug_assert!(k >= 1 && values.len() >= k + p);
        let cycle = match tail {
            TailKind::Values => values[k..k + p].to_vec(),
            TailKind::Increments => (k..k + p).map(|i| &values[i] - &values[i - 1]).collect(),
        };
        Self { prefix: values[..k].to_vec(), tail, cycle }.normalize()
    }

    /// Pointwise sum. Fails when an unbounded tail is added to an
    /// oscillating one and the sum is not eventually nondecreasing.
    pub fn add(&self, other: &Self) -> Result<Self, SeqError> {
        let k = self.preperiod().max(other.preperiod()) + 1;
        let p = self.period().lcm(&other.period());
        let tail = if self.tail == TailKind::Increments || other.tail == TailKind::Increments {
            TailKind::Increments
        } else {
            TailKind::Values
        };
        let values: Vec<Nat> = self.iter().zip(other.iter()).take(k + p).map(|(a, b)| a + b).collect();
        if tail == TailKind::Increments && values[k - 1..].windows(2).any(|w| w[1] < w[0]) {
            return Err(SeqError::NotRepresentable);
        }
        Ok(Self::from_window(&values, k, p, tail))
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix")?;
        for v in &self.prefix {
            write!(f, " {v}")?;
        }
        let kind = match self.tail {
            TailKind::Values => "val-cycle",
            TailKind::Increments => "inc-cycle",
        };
        write!(f, " ; {kind}")?;
        for v in &self.cycle {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

pub struct Iter<'a> {
    seq: &'a EpSeq,
    n: usize,
    current: Nat,
}

impl Iterator for Iter<'_> {
    type Item = Nat;

    fn next(&mut self) -> Option<Nat> {
        let k = self.seq.prefix.len();
        let n = self.n;
        self.n += 1;
        self.current = if n < k {
            self.seq.prefix[n].clone()
        } else {
            let c = &self.seq.cycle[(n - k) % self.seq.cycle.len()];
            match self.seq.tail {
                TailKind::Values => c.clone(),
                TailKind::Increments => &self.current + c,
            }
        };
        Some(self.current.clone())
    }
}

/// Outcome of an eventual-dominance decision `f ≤* g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceVerdict {
    pub holds: bool,
    /// Minimal `t` with `f(n) <= g(n)` for all `n >= t` (zero when the
    /// verdict fails).
    pub threshold: Nat,
    pub witness_note: String,
    /// Alignment period used by the decision.
    pub period: usize,
    /// When the verdict fails: from this index on every window of `period`
    /// consecutive indices contains a violation.
    pub violations_recur_from: Option<Nat>,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    (a + b - BigInt::one()) / b
}

fn to_nat(v: BigInt) -> Nat {
    v.to_biguint().expect("nonnegative")
}

/// Decides `f ≤* g` exactly and reports the minimal threshold.
///
/// Beyond the common prefix `k`, the difference `d = g - f` satisfies
/// `d(n + P) = d(n) + Δ` with `P` the lcm of the periods, so each residue
/// class mod `P` is an arithmetic progression.
pub fn le_star(f: &EpSeq, g: &EpSeq) -> DominanceVerdict {
    let k = f.preperiod().max(g.preperiod());
    let p = f.period().lcm(&g.period());
    let diffs: Vec<BigInt> = f
        .iter()
        .zip(g.iter())
        .take(k + p + 1)
        .map(|(a, b)| BigInt::from(b) - BigInt::from(a))
        .collect();
    let delta = &diffs[k + p] - &diffs[k];
    let mut last_violation: Option<Nat> = diffs[..k].iter().rposition(Signed::is_negative).map(Nat::from);
    let big_p = Nat::from(p);

    if delta.is_positive() {
        for r in 0..p {
            let d = &diffs[k + r];
            if d.is_negative() {
                let count = to_nat(ceil_div(&-d, &delta));
                let last = Nat::from(k + r) + (count - 1u32) * &big_p;
                if last_violation.as_ref().is_none_or(|v| &last > v) {
                    last_violation = Some(last);
                }
            }
        }
        return holds_verdict(last_violation, p);
    }

    if delta.is_zero() {
        let bad: Vec<usize> = (0..p).filter(|&r| diffs[k + r].is_negative()).collect();
        if bad.is_empty() {
            return holds_verdict(last_violation, p);
        }
        let residues: Vec<String> = bad.iter().map(|r| ((k + r) % p).to_string()).collect();
        return DominanceVerdict {
            holds: false,
            threshold: Nat::zero(),
            witness_note: format!(
                "equal growth over period {p}; f(n) > g(n) whenever n >= {k} and n mod {p} is in {{{}}}",
                residues.join(", ")
            ),
            period: p,
            violations_recur_from: Some(Nat::from(k)),
        };
    }

    // f outgrows g: every residue class eventually violates forever.
    let drop = -&delta;
    let mut from = Nat::zero();
    for r in 0..p {
        let d = &diffs[k + r];
        let j = if d.is_negative() { BigInt::zero() } else { d / &drop + 1 };
        let first = Nat::from(k + r) + to_nat(j) * &big_p;
        from = from.max(first);
    }
    DominanceVerdict {
        holds: false,
        threshold: Nat::zero(),
        witness_note: format!(
            "f gains {drop} more than g every {p} steps; f(n) > g(n) for every n >= {from}"
        ),
        period: p,
        violations_recur_from: Some(from),
    }
}

fn holds_verdict(last_violation: Option<Nat>, p: usize) -> DominanceVerdict {
    let threshold = last_violation.map_or_else(Nat::zero, |v| v + 1u32);
    DominanceVerdict {
        holds: true,
        witness_note: format!("f(n) <= g(n) for every n >= {threshold}"),
        threshold,
        period: p,
        violations_recur_from: None,
    }
}

/// `g(n) = f(0) + ... + f(n) + n`, the bijection from bounded-tail sequences
/// onto strictly increasing ones.
///
/// Only sequences with a values tail (after normalization) are accepted:
/// partial sums of an unbounded eventually periodic sequence grow
/// quadratically and leave the representable class.
pub fn diag_to_increasing(f: &EpSeq) -> Result<EpSeq, SeqError> {
    let f = f.normalize();
    if f.tail == TailKind::Increments {
        return Err(SeqError::Unbounded);
    }
    let mut prefix = Vec::with_capacity(f.prefix.len());
    let mut acc = Nat::zero();
    for (i, v) in f.prefix.iter().enumerate() {
        acc += v;
        prefix.push(if i == 0 { acc.clone() } else { &acc + Nat::from(i) });
    }
    let cycle = f.cycle.iter().map(|c| c + 1u32).collect();
    Ok(EpSeq { prefix, tail: TailKind::Increments, cycle }.normalize())
}

/// Inverse of [`diag_to_increasing`]: `f(0) = g(0)`, `f(n) = g(n) - g(n-1) - 1`.
pub fn undiag(g: &EpSeq) -> Result<EpSeq, SeqError> {
    g.require_increasing()?;
    let mut prefix = vec![g.prefix[0].clone()];
    prefix.extend(g.prefix.windows(2).map(|w| &w[1] - &w[0] - 1u32));
    let cycle = g.cycle.iter().map(|c| c - 1u32).collect();
    Ok(EpSeq { prefix, tail: TailKind::Values, cycle }.normalize())
}

/// Characteristic set of the range of a strictly increasing sequence.
pub fn range_encode(g: &EpSeq) -> Result<EpSet, SeqError> {
    g.require_increasing()?;
    let k = g.prefix.len();
    let anchor = to_index(&g.prefix[k - 1])?;
    let mut prefix = vec![false; anchor];
    for v in &g.prefix[..k - 1] {
        prefix[to_index(v)?] = true;
    }
    let span = to_index(&g.cycle_growth())?;
    let mut cycle = vec![false; span];
    let mut offset = 0usize;
    for c in &g.cycle {
        cycle[offset] = true;
        offset += to_index(c)?;
    }
    EpSet::new(prefix, cycle)
}

/// Increasing enumeration of an infinite set.
pub fn increasing_enum(a: &EpSet) -> Result<EpSeq, SeqError> {
    if !a.is_infinite() {
        return Err(SeqError::FiniteSet);
    }
    let base = a.prefix.len();
    let span = a.cycle.len();
    let mut prefix: Vec<Nat> = a.prefix.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| Nat::from(i)).collect();
    let offsets: Vec<usize> = a.cycle.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
    prefix.push(Nat::from(base + offsets[0]));
    let mut cycle: Vec<Nat> = offsets.windows(2).map(|w| Nat::from(w[1] - w[0])).collect();
    cycle.push(Nat::from(span + offsets[0] - offsets[offsets.len() - 1]));
    Ok(EpSeq { prefix, tail: TailKind::Increments, cycle }.normalize())
}

/// A subset of ℕ with an eventually periodic characteristic sequence.
///
/// Always stored in canonical form (minimal cycle, then minimal prefix), so
/// structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpSet {
    prefix: Vec<bool>,
    cycle: Vec<bool>,
}

impl EpSet {
    pub fn new(mut prefix: Vec<bool>, mut cycle: Vec<bool>) -> Result<Self, SeqError> {
        if cycle.is_empty() {
            return Err(SeqError::EmptyCycle);
        }
        let d = minimal_period(&cycle);
        cycle.truncate(d);
        while prefix.last() == Some(&cycle[d - 1]) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        Ok(Self { prefix, cycle })
    }

    /// Convenience constructor from 0/1 digits.
    pub fn from_bits(prefix: &[u8], cycle: &[u8]) -> Result<Self, SeqError> {
        Self::new(prefix.iter().map(|&b| b != 0).collect(), cycle.iter().map(|&b| b != 0).collect())
    }

    pub fn all() -> Self {
        Self { prefix: Vec::new(), cycle: vec![true] }
    }

    pub fn empty() -> Self {
        Self { prefix: Vec::new(), cycle: vec![false] }
    }

    pub fn finite<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let mut prefix = Vec::new();
        for e in elements {
            if e >= prefix.len() {
                prefix.resize(e + 1, false);
            }
            prefix[e] = true;
        }
        Self::new(prefix, vec![false]).expect("nonempty cycle")
    }

    /// `{ n : n mod modulus == residue }`.
    pub fn residue_class(modulus: usize, residue: usize) -> Self {
        let mut cycle = vec![false; modulus];
        cycle[residue % modulus] = true;
        Self::new(Vec::new(), cycle).expect("modulus >= 1")
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[bool] {
        &self.cycle
    }

    pub fn preperiod(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn contains(&self, n: usize) -> bool {
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.cycle[(n - self.prefix.len()) % self.cycle.len()],
        }
    }

    pub fn contains_nat(&self, n: &Nat) -> bool {
        match n.to_usize() {
            Some(i) => self.contains(i),
            None => {
                let r = ((n - Nat::from(self.prefix.len())) % Nat::from(self.cycle.len()))
                    .to_usize()
                    .expect("residue below period");
                self.cycle[r]
            }
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.cycle.iter().any(|&b| b)
    }

    pub fn is_empty(&self) -> bool {
        !self.is_infinite() && !self.prefix.iter().any(|&b| b)
    }

    /// Number of elements, when finite.
    pub fn len(&self) -> Option<usize> {
        (!self.is_infinite()).then(|| self.prefix.iter().filter(|&&b| b).count())
    }

    pub fn min(&self) -> Option<usize> {
        self.elements().next()
    }

    /// Least element `>= n`.
    pub fn next_at_or_after(&self, n: &Nat) -> Option<Nat> {
        let base = self.prefix.len();
        if let Some(i) = n.to_usize().filter(|&i| i < base) {
            if let Some(j) = (i..base).find(|&j| self.prefix[j]) {
                return Some(Nat::from(j));
            }
        }
        if !self.is_infinite() {
            return None;
        }
        let start = n.max(&Nat::from(base)).clone();
        let p = self.cycle.len();
        let r = ((&start - Nat::from(base)) % Nat::from(p)).to_usize().expect("residue below period");
        let j = (0..p).find(|j| self.cycle[(r + j) % p]).expect("cycle has an element");
        Some(start + Nat::from(j))
    }

    /// Elements in increasing order (an infinite iterator for infinite sets).
    pub fn elements(&self) -> Elements<'_> {
        let end = (!self.is_infinite()).then_some(self.prefix.len());
        Elements { set: self, n: 0, end }
    }

    /// Pointwise combination of characteristic sequences.
    pub fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let k = self.prefix.len().max(other.prefix.len());
        let p = self.cycle.len().lcm(&other.cycle.len());
        let bits: Vec<bool> = (0..k + p).map(|n| op(self.contains(n), other.contains(n))).collect();
        Self::new(bits[..k].to_vec(), bits[k..].to_vec()).expect("nonempty cycle")
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::new(self.prefix.iter().map(|b| !b).collect(), self.cycle.iter().map(|b| !b).collect())
            .expect("nonempty cycle")
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }
}

impl fmt::Display for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix")?;
        for &b in &self.prefix {
            write!(f, " {}", u8::from(b))?;
        }
        write!(f, " ; cycle")?;
        for &b in &self.cycle {
            write!(f, " {}", u8::from(b))?;
        }
        Ok(())
    }
}

pub struct Elements<'a> {
    set: &'a EpSet,
    n: usize,
    end: Option<usize>,
}

impl Iterator for Elements<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.end.is_none_or(|e| self.n < e) {
            let i = self.n;
            self.n += 1;
            if self.set.contains(i) {
                return Some(i);
            }
        }
        None
    }
}
