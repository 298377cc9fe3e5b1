//! Slaloms and the four conversions between bounds, slaloms and partitions
//! of ℕ into finite blocks.
//!
//! A slalom is a strictly increasing boundary `g`; interval `n` is
//! `[g(n), g(n+1))`. A strictly increasing `f` goes through it when all but
//! finitely many intervals contain a value of `f`.
//!
//! Boundaries built from a bound or from a partition are not eventually
//! periodic in general, so they are generated on demand and memoized. For
//! those, membership questions are answered by combining the threshold that
//! the construction guarantees with an exact scan of the finitely many
//! intervals below it.

use std::cell::RefCell;

use num_traits::Zero;
use thiserror::Error;

use crate::partition::{interval_profile, BlockPartition, MeetProfile, PartitionError};
use crate::sequences::{le_star, range_encode, DominanceVerdict, EpSeq, EpSet, Nat, SeqError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlalomError {
    #[error("sequence is not strictly increasing")]
    NotIncreasing,
    #[error("no exact decision available: {0}")]
    Undecided(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// Blocks scanned by one greedy step before the input is declared broken.
const GREEDY_SCAN_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone)]
enum Rule {
    /// `h(0) = g(0)`, `h(n+1) = g(h(n)) + 1`.
    Iterated(EpSeq),
    /// `g(0) = 0`; `g(n) = max F_m + 1` for the least `m` with
    /// `F_m ∩ [0, g(n-1)) = ∅`.
    Greedy(Box<BlockPartition>),
}

#[derive(Debug, Clone, Default)]
struct State {
    values: Vec<Nat>,
    /// `chosen[n]` is the block that fixed `values[n]` (greedy rule, `n >= 1`).
    chosen: Vec<usize>,
    next_block: usize,
}

#[derive(Debug, Clone)]
enum Boundary {
    Periodic(EpSeq),
    Lazy { rule: Rule, state: RefCell<State> },
}

/// The interval system `[g(n), g(n+1))`.
///
/// Lazy boundaries memoize through a `RefCell`: a slalom may be moved across
/// threads but is read by one consumer at a time.
#[derive(Debug, Clone)]
pub struct Slalom {
    boundary: Boundary,
}

impl Slalom {
    pub fn new(g: EpSeq) -> Result<Self, SlalomError> {
        g.require_increasing().map_err(|_| SlalomError::NotIncreasing)?;
        Ok(Self { boundary: Boundary::Periodic(g) })
    }

    fn lazy(rule: Rule) -> Self {
        Self { boundary: Boundary::Lazy { rule, state: RefCell::new(State::default()) } }
    }

    pub fn periodic_boundary(&self) -> Option<&EpSeq> {
        match &self.boundary {
            Boundary::Periodic(g) => Some(g),
            Boundary::Lazy { .. } => None,
        }
    }

    pub fn boundary_at(&self, n: usize) -> Result<Nat, SlalomError> {
        match &self.boundary {
            Boundary::Periodic(g) => Ok(g.at(n)),
            Boundary::Lazy { rule, state } => {
                let mut state = state.borrow_mut();
                while state.values.len() <= n {
                    extend(rule, &mut state)?;
                }
                Ok(state.values[n].clone())
            }
        }
    }

    /// `(g(n), g(n+1))`.
    pub fn interval(&self, n: usize) -> Result<(Nat, Nat), SlalomError> {
        Ok((self.boundary_at(n)?, self.boundary_at(n + 1)?))
    }

    /// Boundary values `g(0), g(1), ...` while they stay `<= bound`.
    pub fn boundary_up_to(&self, bound: &Nat) -> Result<Vec<Nat>, SlalomError> {
        let mut out = Vec::new();
        for n in 0.. {
            let v = self.boundary_at(n)?;
            if &v > bound {
                break;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// For a slalom built from a partition: a block `m` with
    /// `F_m ⊆ [g(n), g(n+1))`.
    pub fn covering_block(&self, n: usize) -> Result<Option<usize>, SlalomError> {
        match &self.boundary {
            Boundary::Lazy { rule: Rule::Greedy(_), state } => {
                self.boundary_at(n + 1)?;
                Ok(Some(state.borrow().chosen[n + 1]))
            }
            _ => Ok(None),
        }
    }
}

fn extend(rule: &Rule, state: &mut State) -> Result<(), SlalomError> {
    match rule {
        Rule::Iterated(g) => {
            let next = match state.values.last() {
                None => g.at(0),
                Some(h) => g.eval(h) + 1u32,
            };
            state.values.push(next);
        }
        Rule::Greedy(p) => {
            let Some(cur) = state.values.last().cloned() else {
                state.values.push(Nat::zero());
                state.chosen.push(usize::MAX);
                return Ok(());
            };
            let mut m = state.next_block;
            loop {
                if m - state.next_block > GREEDY_SCAN_LIMIT {
                    return Err(PartitionError::NotAPartition(format!("no block lies entirely at or above {cur}")).into());
                }
                let block = p.block(m)?;
                if let (Some(&lo), Some(&hi)) = (block.first(), block.last()) {
                    if Nat::from(lo) >= cur {
                        state.values.push(Nat::from(hi) + 1u32);
                        state.chosen.push(m);
                        state.next_block = m + 1;
                        return Ok(());
                    }
                }
                m += 1;
            }
        }
    }
    Ok(())
}

/// Outcome of "f goes through the slalom".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThroughVerdict {
    pub holds: bool,
    /// Minimal `t` such that every interval `n >= t` contains a value of `f`.
    pub threshold: usize,
    pub miss_note: String,
    /// Period of the miss pattern used by the decision (1 for certified scans).
    pub period: usize,
    /// When the verdict fails: every window of `period` intervals from here
    /// on contains a missed interval.
    pub misses_recur_from: Option<usize>,
}

fn verdict_from_profile(profile: &MeetProfile) -> ThroughVerdict {
    match profile.threshold() {
        Some(t) => ThroughVerdict {
            holds: true,
            threshold: t,
            miss_note: format!("every interval n >= {t} is hit"),
            period: profile.period,
            misses_recur_from: None,
        },
        None => {
            let window = profile.stable_from..profile.stable_from + profile.period;
            let missed: Vec<String> = window.filter(|&n| !profile.hits[n]).map(|n| n.to_string()).collect();
            ThroughVerdict {
                holds: false,
                threshold: 0,
                miss_note: format!(
                    "intervals {} are missed and the pattern repeats every {} intervals",
                    missed.join(", "),
                    profile.period
                ),
                period: profile.period,
                misses_recur_from: Some(profile.stable_from),
            }
        }
    }
}

fn interval_hit(set: &EpSet, s: &Slalom, n: usize) -> Result<bool, SlalomError> {
    let (lo, hi) = s.interval(n)?;
    Ok(set.next_at_or_after(&lo).is_some_and(|e| e < hi))
}

/// Given that every interval `n >= certified` is hit, finds the exact
/// minimal threshold by scanning the intervals below.
fn certified_verdict(set: &EpSet, s: &Slalom, certified: usize) -> Result<ThroughVerdict, SlalomError> {
    let mut last_miss = None;
    for n in 0..certified {
        if !interval_hit(set, s, n)? {
            last_miss = Some(n);
        }
    }
    let t = last_miss.map_or(0, |n| n + 1);
    Ok(ThroughVerdict {
        holds: true,
        threshold: t,
        miss_note: format!("every interval n >= {t} is hit (guaranteed from {certified})"),
        period: 1,
        misses_recur_from: None,
    })
}

/// Decides whether a strictly increasing `f` goes through `s`.
///
/// Exact for periodic boundaries. For a boundary iterated from a bound `g`
/// the answer is exact whenever `f ≤* g`; for a greedy boundary, whenever
/// the source partition is certified and `f` meets all but finitely many of
/// its blocks. Other cases report [`SlalomError::Undecided`].
pub fn goes_through(f: &EpSeq, s: &Slalom) -> Result<ThroughVerdict, SlalomError> {
    f.require_increasing().map_err(|_| SlalomError::NotIncreasing)?;
    let set = range_encode(f)?;
    match &s.boundary {
        Boundary::Periodic(g) => Ok(verdict_from_profile(&interval_profile(g, &set, false))),
        Boundary::Lazy { rule: Rule::Iterated(g), .. } => {
            let dom = le_star(f, g);
            if !dom.holds {
                return Err(SlalomError::Undecided(format!("f is not dominated by the generating bound: {}", dom.witness_note)));
            }
            // h(n) >= t gives h(n) <= f(h(n)) <= g(h(n)) < h(n+1).
            let mut n = 0;
            while s.boundary_at(n)? < dom.threshold {
                n += 1;
            }
            certified_verdict(&set, s, n)
        }
        Boundary::Lazy { rule: Rule::Greedy(p), state } => {
            let profile = p.meet_profile(&set, 0)?;
            let block_threshold = match (profile.exact, profile.threshold()) {
                (true, Some(t)) => t,
                _ => return Err(SlalomError::Undecided("f does not meet cofinitely many source blocks".into())),
            };
            // Interval n contains the block chosen for g(n+1); chosen blocks increase.
            let mut n = 0;
            loop {
                s.boundary_at(n + 1)?;
                if state.borrow().chosen[n + 1] >= block_threshold {
                    break;
                }
                n += 1;
            }
            certified_verdict(&set, s, n)
        }
    }
}

/// Slalom gone through by every strictly increasing `f ≤* g`.
pub fn slalom_from_bound(g: &EpSeq) -> Result<Slalom, SlalomError> {
    g.require_increasing().map_err(|_| SlalomError::NotIncreasing)?;
    Ok(Slalom::lazy(Rule::Iterated(g.clone())))
}

/// `h(n) = g(2n)` for a slalom boundary `g`.
#[derive(Debug, Clone)]
pub enum Bound {
    Periodic(EpSeq),
    Sampled(Slalom),
}

impl Bound {
    pub fn at(&self, n: usize) -> Result<Nat, SlalomError> {
        match self {
            Bound::Periodic(h) => Ok(h.at(n)),
            Bound::Sampled(s) => s.boundary_at(2 * n),
        }
    }

    pub fn periodic(&self) -> Option<&EpSeq> {
        match self {
            Bound::Periodic(h) => Some(h),
            Bound::Sampled(_) => None,
        }
    }

    /// Values `h(0), h(1), ...` while they stay `<= bound`.
    pub fn values_up_to(&self, bound: &Nat) -> Result<Vec<Nat>, SlalomError> {
        let mut out = Vec::new();
        for n in 0.. {
            let v = self.at(n)?;
            if &v > bound {
                break;
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Bound dominating every strictly increasing sequence that goes through
/// `s`: `h(n) = g(2n)`. If `f` goes through from `n_0`, then
/// `f(n) < g(n_0 + 1 + n) <= g(2n)` for `n > n_0`.
pub fn bound_from_slalom(s: &Slalom) -> Bound {
    match &s.boundary {
        Boundary::Periodic(g) => {
            let k = g.preperiod().div_ceil(2);
            let p = g.period();
            let values: Vec<Nat> = (0..=k + p).map(|n| g.at(2 * n)).collect();
            Bound::Periodic(EpSeq::from_window(&values, k + 1, p, crate::sequences::TailKind::Increments))
        }
        Boundary::Lazy { .. } => Bound::Sampled(s.clone()),
    }
}

/// Decides `f ≤* h` for a bound produced by [`bound_from_slalom`].
///
/// Exact for periodic bounds. For sampled bounds the domination threshold
/// follows from the through-threshold of `f`, and the indices below it are
/// scanned exactly.
pub fn bound_verdict(f: &EpSeq, bound: &Bound) -> Result<DominanceVerdict, SlalomError> {
    match bound {
        Bound::Periodic(h) => Ok(le_star(f, h)),
        Bound::Sampled(s) => {
            let through = goes_through(f, s)?;
            if !through.holds {
                return Err(SlalomError::Undecided(format!("f does not go through the slalom: {}", through.miss_note)));
            }
            let certified = through.threshold + 1;
            let mut last = None;
            for (n, v) in f.iter().take(certified).enumerate() {
                if v > bound.at(n)? {
                    last = Some(n);
                }
            }
            let threshold = Nat::from(last.map_or(0, |n| n + 1));
            Ok(DominanceVerdict {
                holds: true,
                witness_note: format!("f(n) <= g(2n) for every n >= {threshold} (guaranteed from {certified})"),
                threshold,
                period: 1,
                violations_recur_from: None,
            })
        }
    }
}

/// Interval blocks of `s`, with `[0, g(0))` folded into block 0.
pub fn partition_from_slalom(s: &Slalom) -> BlockPartition {
    BlockPartition::intervals(s.clone())
}

/// Greedy slalom whose every interval contains a whole block of `p`.
///
/// `p` must partition ℕ; this is checked exactly for certified partitions
/// and below `horizon` otherwise. Empty blocks are skipped by the greedy
/// choice.
pub fn slalom_from_partition(p: &BlockPartition, horizon: usize) -> Result<Slalom, SlalomError> {
    if p.domain() != &EpSet::all() {
        let missing = p.domain().complement().min().unwrap_or(0);
        return Err(PartitionError::NotAPartition(format!("index {missing} is not in the domain")).into());
    }
    p.validate(horizon)?;
    Ok(Slalom::lazy(Rule::Greedy(Box::new(p.clone()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::TailKind;

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| Nat::from(x)).collect()
    }

    fn boundary(s: &Slalom, count: usize) -> Vec<Nat> {
        (0..count).map(|n| s.boundary_at(n).unwrap()).collect()
    }

    #[test]
    fn goes_through_examples() {
        let g = EpSeq::linear(3, 0);
        let v = goes_through(&g, &Slalom::new(g.clone()).unwrap()).unwrap();
        assert_eq!((v.holds, v.threshold), (true, 0));
        let v = goes_through(&EpSeq::linear(2, 0), &Slalom::new(EpSeq::linear(3, 0)).unwrap()).unwrap();
        assert_eq!((v.holds, v.threshold), (true, 0));
        let v = goes_through(&EpSeq::linear(4, 0), &Slalom::new(EpSeq::linear(2, 0)).unwrap()).unwrap();
        assert!(!v.holds);
        assert_eq!(
            goes_through(&EpSeq::constant(1), &Slalom::new(EpSeq::linear(2, 0)).unwrap()),
            Err(SlalomError::NotIncreasing)
        );
    }

    #[test]
    fn slalom_from_bound_examples() {
        assert_eq!(boundary(&slalom_from_bound(&EpSeq::linear(1, 0)).unwrap(), 5), nats(&[0, 1, 2, 3, 4]));
        assert_eq!(boundary(&slalom_from_bound(&EpSeq::linear(2, 0)).unwrap(), 6), nats(&[0, 1, 3, 7, 15, 31]));
        assert_eq!(boundary(&slalom_from_bound(&EpSeq::linear(1, 1)).unwrap(), 4), nats(&[1, 3, 5, 7]));
    }

    #[test]
    fn exponential_boundary_does_not_overflow() {
        let s = slalom_from_bound(&EpSeq::linear(2, 0)).unwrap();
        let expected = (Nat::from(1u32) << 200usize) - 1u32;
        assert_eq!(s.boundary_at(200).unwrap(), expected);
    }

    #[test]
    fn bound_from_slalom_examples() {
        let h = bound_from_slalom(&Slalom::new(EpSeq::linear(2, 0)).unwrap());
        assert_eq!(h.periodic().unwrap(), &EpSeq::linear(4, 0));
        let h = bound_from_slalom(&Slalom::new(EpSeq::linear(1, 0)).unwrap());
        assert_eq!(h.periodic().unwrap(), &EpSeq::linear(2, 0));
        let f = EpSeq::linear(2, 1);
        let s = Slalom::new(EpSeq::linear(2, 0)).unwrap();
        assert!(goes_through(&f, &s).unwrap().holds);
        let v = bound_verdict(&f, &bound_from_slalom(&s)).unwrap();
        assert_eq!((v.holds, v.threshold), (true, Nat::from(1u32)));
    }

    #[test]
    fn bound_from_slalom_with_long_prefix() {
        let g = EpSeq::from_u64(&[1, 4, 5, 9], TailKind::Increments, &[2, 1, 3]).unwrap();
        let h = bound_from_slalom(&Slalom::new(g.clone()).unwrap());
        for n in 0..40 {
            assert_eq!(h.at(n).unwrap(), g.at(2 * n));
        }
    }

    #[test]
    fn partition_from_slalom_examples() {
        let p = partition_from_slalom(&Slalom::new(EpSeq::linear(2, 0)).unwrap());
        assert_eq!((0..3).map(|n| p.block(n).unwrap()).collect::<Vec<_>>(), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        let g = EpSeq::from_u64(&[3, 5], TailKind::Increments, &[2]).unwrap();
        let p = partition_from_slalom(&Slalom::new(g).unwrap());
        assert_eq!(p.block(0).unwrap(), vec![0, 1, 2, 3, 4]);
        let p = partition_from_slalom(&Slalom::new(EpSeq::linear(1, 0)).unwrap());
        assert_eq!(p.block(4).unwrap(), vec![4]);
        p.validate_to_horizon(50).unwrap();
    }

    #[test]
    fn slalom_from_partition_examples() {
        let pairs = BlockPartition::translated(&[vec![0, 1]], 2).unwrap();
        assert_eq!(boundary(&slalom_from_partition(&pairs, 100).unwrap(), 5), nats(&[0, 2, 4, 6, 8]));
        let singles = BlockPartition::enumerate(&EpSet::all()).unwrap();
        assert_eq!(boundary(&slalom_from_partition(&singles, 100).unwrap(), 5), nats(&[0, 1, 2, 3, 4]));
        let mixed = BlockPartition::translated(&[vec![0, 5], vec![1, 2], vec![3, 4], vec![6, 7]], 8).unwrap();
        let s = slalom_from_partition(&mixed, 100).unwrap();
        assert_eq!(boundary(&s, 3), nats(&[0, 6, 8]));
        assert_eq!(s.covering_block(0).unwrap(), Some(0));
        assert_eq!(s.covering_block(1).unwrap(), Some(3));
    }

    #[test]
    fn slalom_from_partition_rejects_broken_input() {
        let evens = BlockPartition::enumerate(&EpSet::residue_class(2, 0)).unwrap();
        assert!(matches!(slalom_from_partition(&evens, 100), Err(SlalomError::Partition(PartitionError::NotAPartition(_)))));
        let overlapping = BlockPartition::translated(&[vec![0, 1], vec![1]], 2).unwrap();
        assert!(slalom_from_partition(&overlapping, 100).is_err());
    }

    #[test]
    fn greedy_key_property() {
        let p = BlockPartition::diagonal(&[EpSet::residue_class(3, 0), EpSet::from_bits(&[], &[0, 1, 1]).unwrap()]).unwrap();
        let s = slalom_from_partition(&p, 1000).unwrap();
        for n in 0..12 {
            let (lo, hi) = s.interval(n).unwrap();
            let m = s.covering_block(n).unwrap().unwrap();
            let block = p.block(m).unwrap();
            assert!(block.iter().all(|&e| Nat::from(e) >= lo && Nat::from(e) < hi), "interval {n}");
        }
    }

    #[test]
    fn lazy_through_verdicts_are_exact() {
        let g = EpSeq::linear(2, 0);
        let s = slalom_from_bound(&g).unwrap();
        let f = EpSeq::linear(1, 5);
        let v = goes_through(&f, &s).unwrap();
        assert!(v.holds);
        // Direct scan of intervals [2^n - 1, 2^(n+1) - 1).
        let set = range_encode(&f).unwrap();
        let direct = (0..30).filter(|&n| !interval_hit(&set, &s, n).unwrap()).max().map_or(0, |n| n + 1);
        assert_eq!(v.threshold, direct);
        assert!(matches!(goes_through(&EpSeq::linear(3, 0), &s), Err(SlalomError::Undecided(_))));
    }
}
