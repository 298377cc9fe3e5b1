//! Brute-force reference checks on finite truncations.
//!
//! Every check here looks only at the values it is given; nothing is
//! extrapolated. Verdicts are labelled `HOLDS-AT-HORIZON` or
//! `FAILS-AT-HORIZON` so they are never mistaken for exact decisions.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::covers::{is_large, EpCover, PointSet};
use crate::sequences::{le_star, EpSeq, Nat};
use crate::slalom::{goes_through, Slalom, SlalomError};

/// Largest materialized cover accepted by [`exhaustive_groupability`].
pub const MAX_EXHAUSTIVE_INDICES: usize = 16;
/// Number of final blocks that must meet every point in a finite witness.
pub const TAIL_BLOCKS: usize = 2;
/// Default node budget of the arbitrary-block search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("sequences have different horizons ({0} and {1})")]
    HorizonMismatch(usize, usize),
    #[error("sequence is not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("family is empty")]
    EmptyFamily,
    #[error("exhaustive search takes at most {MAX_EXHAUSTIVE_INDICES} indices, got {0}")]
    TooManyIndices(usize),
    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(u64),
}

/// A finite list of naturals, optionally known to be strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSeq {
    values: Vec<Nat>,
    increasing: bool,
}

impl FinSeq {
    pub fn new(values: Vec<Nat>) -> Self {
        Self { values, increasing: false }
    }

    pub fn increasing(values: Vec<Nat>) -> Result<Self, OracleError> {
        if let Some(i) = (1..values.len()).find(|&i| values[i] <= values[i - 1]) {
            return Err(OracleError::NotIncreasing(i));
        }
        Ok(Self { values, increasing: true })
    }

    pub fn from_u64(values: &[u64]) -> Self {
        Self::new(values.iter().map(|&v| Nat::from(v)).collect())
    }

    /// The first `horizon` values of `f`.
    pub fn of(f: &EpSeq, horizon: usize) -> Self {
        let values = f.take_values(horizon);
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        Self { values, increasing }
    }

    pub fn values(&self) -> &[Nat] {
        &self.values
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    fn require_increasing(&self) -> Result<(), OracleError> {
        if self.increasing {
            return Ok(());
        }
        match (1..self.values.len()).find(|&i| self.values[i] <= self.values[i - 1]) {
            Some(i) => Err(OracleError::NotIncreasing(i)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonStatus {
    HoldsAtHorizon,
    FailsAtHorizon,
}

impl fmt::Display for HorizonStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HoldsAtHorizon => "HOLDS-AT-HORIZON",
            Self::FailsAtHorizon => "FAILS-AT-HORIZON",
        })
    }
}

/// Outcome of a finite check over positions `0..horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonVerdict {
    pub status: HorizonStatus,
    /// Least `t` such that every position in `t..horizon` is clean; equals
    /// `horizon` when the verdict fails.
    pub threshold: usize,
    /// First violating position, if any.
    pub counterexample: Option<usize>,
    /// Last violating position, if any.
    pub last_violation: Option<usize>,
    /// Number of positions inspected.
    pub horizon: usize,
}

impl HorizonVerdict {
    fn from_violations(violations: impl IntoIterator<Item = bool>) -> Self {
        let mut first = None;
        let mut last = None;
        let mut horizon = 0;
        for (i, bad) in violations.into_iter().enumerate() {
            if bad {
                first.get_or_insert(i);
                last = Some(i);
            }
            horizon = i + 1;
        }
        let threshold = last.map_or(0, |i| i + 1);
        let status = if horizon > 0 && threshold == horizon { HorizonStatus::FailsAtHorizon } else { HorizonStatus::HoldsAtHorizon };
        Self { status, threshold, counterexample: first, last_violation: last, horizon }
    }

    pub fn holds(&self) -> bool {
        self.status == HorizonStatus::HoldsAtHorizon
    }
}

impl fmt::Display for HorizonVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (horizon {})", self.status, self.horizon)?;
        match (self.holds(), self.counterexample) {
            (true, _) => write!(f, ", threshold {}", self.threshold),
            (false, Some(c)) => write!(f, ", first violation at {c}"),
            (false, None) => Ok(()),
        }
    }
}

/// `f(n) <= g(n)` for `n` in `t..H`, with `t` minimal.
pub fn check_le_star_h(f: &FinSeq, g: &FinSeq) -> Result<HorizonVerdict, OracleError> {
    if f.horizon() != g.horizon() {
        return Err(OracleError::HorizonMismatch(f.horizon(), g.horizon()));
    }
    Ok(HorizonVerdict::from_violations(f.values.iter().zip(&g.values).map(|(a, b)| a > b)))
}

/// Whether each interval `[g(n), g(n+1))` contains a value of `f`, for the
/// intervals lying inside `[0, f(last)]`, where the answer is determined.
pub fn check_through_h(f: &FinSeq, g: &FinSeq) -> Result<HorizonVerdict, OracleError> {
    f.require_increasing()?;
    g.require_increasing()?;
    let Some(top) = f.values.last() else {
        return Ok(HorizonVerdict::from_violations(std::iter::empty()));
    };
    let mut misses = Vec::new();
    let mut m = 0;
    for w in g.values.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if hi > &(top + 1u32) {
            break;
        }
        while m < f.values.len() && &f.values[m] < lo {
            m += 1;
        }
        misses.push(!(m < f.values.len() && &f.values[m] < hi));
    }
    Ok(HorizonVerdict::from_violations(misses))
}

/// Greedy boundaries produced by [`greedy_slalom_h`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedySlalom {
    Boundaries(FinSeq),
    UnsatAtHorizon,
}

/// From `a`, the next boundary is `1 + max_y min { e ∈ y : e >= a }`,
/// repeated while every member still has a value at or after `a`.
pub fn greedy_slalom_h(ys: &[FinSeq], start: &Nat) -> Result<GreedySlalom, OracleError> {
    if ys.is_empty() {
        return Err(OracleError::EmptyFamily);
    }
    for y in ys {
        y.require_increasing()?;
    }
    let mut cursors = vec![0usize; ys.len()];
    let mut a = start.clone();
    let mut boundaries = vec![a.clone()];
    'outer: loop {
        let mut reach = Nat::from(0u32);
        for (y, cur) in ys.iter().zip(cursors.iter_mut()) {
            while *cur < y.values.len() && y.values[*cur] < a {
                *cur += 1;
            }
            match y.values.get(*cur) {
                Some(e) => reach = reach.max(e.clone()),
                None => break 'outer,
            }
        }
        a = reach + 1u32;
        boundaries.push(a.clone());
    }
    if boundaries.len() < 2 {
        return Ok(GreedySlalom::UnsatAtHorizon);
    }
    Ok(GreedySlalom::Boundaries(FinSeq { values: boundaries, increasing: true }))
}

/// Traces of the first `n` members of `c`.
pub fn materialize(c: &EpCover, n: usize) -> Vec<PointSet> {
    (0..n).map(|i| c.trace(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeCheck {
    pub verdict: HorizonVerdict,
    /// Occurrences of each point among the materialized members.
    pub multiplicities: Vec<(String, usize)>,
}

/// Counts occurrences per point. A point passes when it still occurs in
/// the final quarter of the materialized members; the verdict's positions
/// are point positions.
pub fn check_large_h(traces: &[PointSet], ids: &[String]) -> LargeCheck {
    let n = traces.len();
    let tail_start = n - n / 4;
    let multiplicities = ids
        .iter()
        .enumerate()
        .map(|(x, id)| (id.clone(), traces.iter().filter(|t| t.contains(x)).count()))
        .collect();
    let late = (0..ids.len()).map(|x| !traces[tail_start..].iter().any(|t| t.contains(x)));
    let mut verdict = HorizonVerdict::from_violations(late);
    if verdict.last_violation.is_some() {
        verdict.status = HorizonStatus::FailsAtHorizon;
    }
    verdict.horizon = n;
    LargeCheck { verdict, multiplicities }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointBlocks {
    pub id: String,
    /// Least `t` such that every materialized block from `t` on meets the point.
    pub minimal: usize,
    /// First block at or above the claimed threshold that misses the point.
    pub failure: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    /// Positions are block indices.
    pub verdict: HorizonVerdict,
    pub points: Vec<PointBlocks>,
    /// An index outside `0..traces.len()` or in two blocks.
    pub bad_index: Option<usize>,
}

/// Re-checks materialized witness blocks against materialized traces.
///
/// Without claimed thresholds a point passes when the last block meets it.
pub fn check_witness_h(
    traces: &[PointSet],
    ids: &[String],
    blocks: &[Vec<usize>],
    claimed: Option<&BTreeMap<String, usize>>,
) -> WitnessCheck {
    let mut seen = vec![false; traces.len()];
    let mut bad_index = None;
    for &i in blocks.iter().flatten() {
        if i >= traces.len() || std::mem::replace(&mut seen[i], true) {
            bad_index.get_or_insert(i);
        }
    }
    let meets = |b: &Vec<usize>, x: usize| b.iter().any(|&i| i < traces.len() && traces[i].contains(x));
    let points: Vec<PointBlocks> = ids
        .iter()
        .enumerate()
        .map(|(x, id)| {
            let minimal = blocks.iter().rposition(|b| !meets(b, x)).map_or(0, |j| j + 1);
            let from = claimed.and_then(|c| c.get(id).copied()).unwrap_or(blocks.len().saturating_sub(1));
            let failure = (from..blocks.len()).find(|&j| !meets(&blocks[j], x));
            PointBlocks { id: id.clone(), minimal, failure }
        })
        .collect();
    let mut verdict = HorizonVerdict::from_violations((0..blocks.len()).map(|j| points.iter().any(|p| p.failure == Some(j))));
    if bad_index.is_some() || verdict.counterexample.is_some() {
        verdict.status = HorizonStatus::FailsAtHorizon;
    }
    WitnessCheck { verdict, points, bad_index }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    Consecutive,
    Arbitrary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExhaustiveOutcome {
    Witness { mode: SearchMode, blocks: Vec<Vec<usize>>, thresholds: Vec<usize> },
    UnsatAtHorizon,
}

/// Searches for an ordered partition of `0..N` into at most `max_blocks`
/// blocks in which every point meets each of the last [`TAIL_BLOCKS`]
/// blocks, i.e. its threshold lies strictly before them.
///
/// Consecutive blocks are tried first, most blocks first; then arbitrary
/// blocks (ordered by least element) within `budget` search nodes.
pub fn exhaustive_groupability(
    traces: &[PointSet],
    points: PointSet,
    max_blocks: usize,
    budget: u64,
) -> Result<ExhaustiveOutcome, OracleError> {
    let n = traces.len();
    if n > MAX_EXHAUSTIVE_INDICES {
        return Err(OracleError::TooManyIndices(n));
    }
    let max_blocks = max_blocks.min(n);
    if n == 0 || max_blocks < TAIL_BLOCKS {
        return Ok(ExhaustiveOutcome::UnsatAtHorizon);
    }
    let masks: Vec<PointSet> = traces.iter().map(|t| t.intersection(points)).collect();
    let block_mask = |b: &[usize]| b.iter().fold(PointSet::empty(), |acc, &i| acc.union(masks[i]));
    let accept = |blocks: &[Vec<usize>]| -> Option<Vec<usize>> {
        if blocks.len() < TAIL_BLOCKS {
            return None;
        }
        let hits: Vec<PointSet> = blocks.iter().map(|b| block_mask(b)).collect();
        if hits[hits.len() - TAIL_BLOCKS..].iter().all(|h| points.is_subset(*h)) {
            Some(points.iter().map(|x| hits.iter().rposition(|h| !h.contains(x)).map_or(0, |j| j + 1)).collect())
        } else {
            None
        }
    };

    let mut best: Option<(Vec<Vec<usize>>, Vec<usize>)> = None;
    for cuts in 0u32..(1 << (n - 1)) {
        let count = cuts.count_ones() as usize + 1;
        if count > max_blocks || best.as_ref().is_some_and(|(b, _)| b.len() >= count) {
            continue;
        }
        let mut blocks = vec![vec![0]];
        for i in 1..n {
            if cuts & (1 << (i - 1)) != 0 {
                blocks.push(Vec::new());
            }
            blocks.last_mut().expect("nonempty").push(i);
        }
        if let Some(t) = accept(&blocks) {
            best = Some((blocks, t));
        }
    }
    if let Some((blocks, thresholds)) = best {
        return Ok(ExhaustiveOutcome::Witness { mode: SearchMode::Consecutive, blocks, thresholds });
    }

    let mut nodes = 0u64;
    let mut assign = vec![0usize; n];
    match arbitrary_search(&mut assign, 0, 0, max_blocks, &mut nodes, budget, &accept)? {
        Some((blocks, thresholds)) => Ok(ExhaustiveOutcome::Witness { mode: SearchMode::Arbitrary, blocks, thresholds }),
        None => Ok(ExhaustiveOutcome::UnsatAtHorizon),
    }
}

type Found = Option<(Vec<Vec<usize>>, Vec<usize>)>;
/// Thresholds of a candidate block list, if it qualifies.
type Accept<'a> = &'a dyn Fn(&[Vec<usize>]) -> Option<Vec<usize>>;

/// Restricted-growth enumeration of set partitions of `0..assign.len()`.
fn arbitrary_search(
    assign: &mut Vec<usize>,
    i: usize,
    used: usize,
    max_blocks: usize,
    nodes: &mut u64,
    budget: u64,
    accept: Accept<'_>,
) -> Result<Found, OracleError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(OracleError::SearchBudgetExceeded(budget));
    }
    if i == assign.len() {
        let mut blocks = vec![Vec::new(); used];
        for (idx, &b) in assign.iter().enumerate() {
            blocks[b].push(idx);
        }
        return Ok(accept(&blocks).map(|t| (blocks, t)));
    }
    for b in 0..(used + 1).min(max_blocks) {
        assign[i] = b;
        let found = arbitrary_search(assign, i + 1, used.max(b + 1), max_blocks, nodes, budget, accept)?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Horizon at which an exact decision is compared with its finite check:
/// the summed prefix lengths, four full alignment periods, and 64 more.
pub fn agreement_horizon(prefixes: usize, period: usize) -> usize {
    prefixes + 4 * period + 64
}

/// An exact decision set against its horizon check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub exact_holds: bool,
    /// Exact minimal threshold when the exact verdict holds.
    pub exact_threshold: Option<usize>,
    pub horizon_verdict: HorizonVerdict,
    pub agree: bool,
}

impl fmt::Display for CrossCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_threshold {
            Some(t) => write!(f, "exact holds, threshold {t}")?,
            None => write!(f, "exact fails")?,
        }
        write!(f, "; {}; {}", self.horizon_verdict, if self.agree { "agree" } else { "DISAGREE" })
    }
}

/// Agreement rule shared by the sequence checks: a holding verdict must be
/// reproduced with the same threshold, and a failing one must show a
/// violation within the final `period` positions.
fn agreement(exact: Option<usize>, period: usize, v: &HorizonVerdict) -> bool {
    match exact {
        Some(t) => v.holds() && v.threshold == t,
        None => v.last_violation.is_some_and(|l| l + period >= v.horizon),
    }
}

fn small(n: &Nat) -> usize {
    usize::try_from(n).unwrap_or(usize::MAX / 4)
}

/// `le_star` against [`check_le_star_h`]. The horizon is
/// [`agreement_horizon`], extended when the exact threshold or the start of
/// the recurring violations lies beyond it.
pub fn cross_check_le_star(f: &EpSeq, g: &EpSeq, min_horizon: usize) -> CrossCheck {
    let exact = le_star(f, g);
    let p = f.period().lcm(&g.period());
    let threshold = exact.holds.then(|| small(&exact.threshold));
    let needed = match (&threshold, &exact.violations_recur_from) {
        (Some(t), _) => t + p + 1,
        (None, Some(r)) => small(r) + 2 * exact.period,
        (None, None) => 0,
    };
    let h = agreement_horizon(f.preperiod() + g.preperiod(), p).max(needed).max(min_horizon);
    let verdict = check_le_star_h(&FinSeq::of(f, h), &FinSeq::of(g, h)).expect("equal horizons");
    CrossCheck { exact_holds: exact.holds, exact_threshold: threshold, agree: agreement(threshold, exact.period, &verdict), horizon_verdict: verdict }
}

/// `goes_through` against [`check_through_h`]. `f` is materialized until
/// enough intervals are decided to cover the exact threshold or a full
/// period of recurring misses.
pub fn cross_check_through(f: &EpSeq, s: &Slalom, min_horizon: usize) -> Result<CrossCheck, SlalomError> {
    let exact = goes_through(f, s)?;
    let threshold = exact.holds.then_some(exact.threshold);
    let needed = match (&threshold, exact.misses_recur_from) {
        (Some(t), _) => t + 1,
        (None, Some(r)) => r + 2 * exact.period,
        (None, None) => 0,
    };
    let (k, p) = match s.periodic_boundary() {
        Some(g) => (f.preperiod() + g.preperiod(), f.period().lcm(&g.period())),
        None => (f.preperiod(), f.period()),
    };
    let mut h = agreement_horizon(k, p).max(min_horizon);
    loop {
        let fs = FinSeq::of(f, h);
        let top = fs.values().last().expect("positive horizon") + 1u32;
        let gs = FinSeq::increasing(s.boundary_up_to(&top)?).expect("slalom boundaries increase");
        let verdict = check_through_h(&fs, &gs).expect("increasing inputs");
        if verdict.horizon >= needed.max(1) {
            return Ok(CrossCheck {
                exact_holds: exact.holds,
                exact_threshold: threshold,
                agree: agreement(threshold, exact.period, &verdict),
                horizon_verdict: verdict,
            });
        }
        h *= 2;
    }
}

/// `is_large` against [`check_large_h`] at [`agreement_horizon`], point by point.
pub fn cross_check_large(c: &EpCover) -> CrossCheck {
    let exact = is_large(c);
    let n = agreement_horizon(c.preperiod(), c.period());
    let check = check_large_h(&materialize(c, n), c.space().ids());
    let tail_start = n - n / 4;
    let traces = materialize(c, n);
    let per_point = exact.points.iter().enumerate().all(|(x, p)| p.large == traces[tail_start..].iter().any(|t| t.contains(x)));
    CrossCheck {
        exact_holds: exact.large,
        exact_threshold: None,
        agree: per_point && exact.large == check.verdict.holds(),
        horizon_verdict: check.verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::PointSpace;
    use crate::sequences::TailKind;

    fn lin(slope: u64, offset: u64, h: usize) -> FinSeq {
        FinSeq::of(&EpSeq::linear(slope, offset), h)
    }

    #[test]
    fn le_star_examples() {
        let v = check_le_star_h(&lin(1, 5, 20), &lin(2, 0, 20)).unwrap();
        assert!(v.holds());
        assert_eq!(v.threshold, 5);
        assert_eq!(v.to_string(), "HOLDS-AT-HORIZON (horizon 20), threshold 5");
        let v = check_le_star_h(&lin(2, 0, 20), &lin(1, 0, 20)).unwrap();
        assert_eq!(v.status, HorizonStatus::FailsAtHorizon);
        assert_eq!((v.counterexample, v.last_violation), (Some(1), Some(19)));
        assert_eq!(check_le_star_h(&lin(1, 0, 3), &lin(1, 0, 4)), Err(OracleError::HorizonMismatch(3, 4)));
    }

    #[test]
    fn through_examples() {
        let v = check_through_h(&lin(2, 0, 100), &lin(3, 0, 100)).unwrap();
        assert!(v.holds());
        assert_eq!(v.threshold, 0);
        let v = check_through_h(&lin(4, 0, 100), &lin(2, 0, 300)).unwrap();
        assert!(!v.holds());
        assert_eq!(v.counterexample, Some(1));
        let v = check_through_h(&lin(5, 1, 50), &lin(5, 1, 50)).unwrap();
        assert_eq!((v.holds(), v.threshold), (true, 0));
        // Only intervals inside [0, f(last)] are decided.
        let v = check_through_h(&lin(1, 0, 10), &lin(1, 0, 1000)).unwrap();
        assert_eq!(v.horizon, 10);
        assert_eq!(check_through_h(&FinSeq::from_u64(&[1, 1]), &lin(1, 0, 3)), Err(OracleError::NotIncreasing(1)));
    }

    #[test]
    fn greedy_examples() {
        let bounds = |g: GreedySlalom| match g {
            GreedySlalom::Boundaries(b) => b.values().iter().map(|v| v.to_string().parse::<u64>().unwrap()).collect::<Vec<_>>(),
            GreedySlalom::UnsatAtHorizon => vec![],
        };
        let zero = Nat::from(0u32);
        let b = bounds(greedy_slalom_h(&[lin(3, 0, 20)], &zero).unwrap());
        assert_eq!(&b[..5], &[0, 1, 4, 7, 10]);
        let b = bounds(greedy_slalom_h(&[lin(1, 0, 20)], &zero).unwrap());
        assert_eq!(&b[..4], &[0, 1, 2, 3]);
        let b = bounds(greedy_slalom_h(&[lin(2, 0, 20), lin(2, 1, 20)], &zero).unwrap());
        assert_eq!(&b[..4], &[0, 2, 4, 6]);
        assert_eq!(greedy_slalom_h(&[], &zero), Err(OracleError::EmptyFamily));
        assert_eq!(greedy_slalom_h(&[lin(1, 0, 3)], &Nat::from(10u32)).unwrap(), GreedySlalom::UnsatAtHorizon);
    }

    #[test]
    fn greedy_passes_through_check() {
        let ys = [FinSeq::of(&EpSeq::from_u64(&[0, 7], TailKind::Increments, &[2, 5]).unwrap(), 200), lin(3, 1, 200)];
        let GreedySlalom::Boundaries(g) = greedy_slalom_h(&ys, &Nat::from(0u32)).unwrap() else { panic!("unsat") };
        for y in &ys {
            let v = check_through_h(y, &g).unwrap();
            assert_eq!((v.holds(), v.threshold), (true, 0));
        }
    }

    fn xy() -> (PointSpace, Vec<String>) {
        let s = PointSpace::new(["x", "y"]).unwrap();
        let ids = s.ids().to_vec();
        (s, ids)
    }

    #[test]
    fn large_examples() {
        let (s, ids) = xy();
        let c = EpCover::from_ids(s.clone(), &[], &[&["x"], &["y"]]).unwrap();
        let r = check_large_h(&materialize(&c, 10), &ids);
        assert!(r.verdict.holds());
        assert_eq!(r.multiplicities, vec![("x".to_string(), 5), ("y".to_string(), 5)]);
        let c = EpCover::from_ids(s, &[&["y"]], &[&["x"]]).unwrap();
        let r = check_large_h(&materialize(&c, 10), &ids);
        assert!(!r.verdict.holds());
        assert_eq!(r.verdict.counterexample, Some(1));
    }

    #[test]
    fn witness_examples() {
        let (s, ids) = xy();
        let c = EpCover::from_ids(s, &[], &[&["x"], &["y"]]).unwrap();
        let g = crate::covers::group_cover(&c).unwrap();
        let traces = materialize(&c, 40);
        let blocks = g.witness.partition.blocks_within(40).unwrap();
        let r = check_witness_h(&traces, &ids, &blocks, Some(&g.witness.thresholds));
        assert!(r.verdict.holds());
        assert_eq!(r.points[1].minimal, 1);

        let mut broken = blocks.clone();
        broken[5].retain(|i| i % 2 == 0);
        let r = check_witness_h(&traces, &ids, &broken, Some(&g.witness.thresholds));
        assert!(!r.verdict.holds());
        assert_eq!(r.verdict.counterexample, Some(5));
        broken[6].push(0);
        assert_eq!(check_witness_h(&traces, &ids, &broken, None).bad_index, Some(0));
    }

    #[test]
    fn exhaustive_examples() {
        let (s, _) = xy();
        let c = EpCover::from_ids(s.clone(), &[], &[&["x"], &["x", "y"]]).unwrap();
        let out = exhaustive_groupability(&materialize(&c, 8), c.space().full(), 8, DEFAULT_SEARCH_BUDGET).unwrap();
        let ExhaustiveOutcome::Witness { mode, blocks, .. } = out else { panic!("no witness") };
        assert_eq!(mode, SearchMode::Consecutive);
        assert_eq!(blocks.last(), Some(&vec![6, 7]));
        assert_eq!(blocks.len(), 7);

        let c = EpCover::from_ids(s, &[], &[&["x"]]).unwrap();
        let out = exhaustive_groupability(&materialize(&c, 8), c.space().full(), 8, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(out, ExhaustiveOutcome::UnsatAtHorizon);

        let one = EpCover::from_ids(PointSpace::new(["x"]).unwrap(), &[], &[&["x"]]).unwrap();
        let out = exhaustive_groupability(&materialize(&one, 4), one.space().full(), 4, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(
            out,
            ExhaustiveOutcome::Witness {
                mode: SearchMode::Consecutive,
                blocks: vec![vec![0], vec![1], vec![2], vec![3]],
                thresholds: vec![0]
            }
        );
        assert_eq!(exhaustive_groupability(&[PointSet::empty(); 17], PointSet::empty(), 4, 10), Err(OracleError::TooManyIndices(17)));
    }

    #[test]
    fn arbitrary_mode_and_budget() {
        // With two blocks, no consecutive split gives both blocks an x and a y.
        let space = PointSpace::new(["x", "y"]).unwrap();
        let x = space.set_of(&["x"]).unwrap();
        let y = space.set_of(&["y"]).unwrap();
        let traces = vec![x, x, y, y];
        let out = exhaustive_groupability(&traces, space.full(), 2, DEFAULT_SEARCH_BUDGET).unwrap();
        let ExhaustiveOutcome::Witness { mode, blocks, .. } = out else { panic!("no witness") };
        assert_eq!(mode, SearchMode::Arbitrary);
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(
            exhaustive_groupability(&[x, x, x, y, y, y, PointSet::empty(), PointSet::empty()], space.full(), 2, 5),
            Err(OracleError::SearchBudgetExceeded(5))
        );
    }
}
