//! Partitions of subsets of ℕ into finite blocks, generated on demand.
//!
//! Two layouts cover everything the crate builds:
//!
//! * **Strands.** Block `start + j * stride` receives the `j`-th value of a
//!   strictly increasing [`EpSeq`]; finitely many extra elements are pinned
//!   to explicit blocks. Diagonal groupings, translated period patterns,
//!   merges and leftover absorption all stay in this layout, and it doubles
//!   as the periodic certificate: well-formedness and every "all but
//!   finitely many blocks" question are decided exactly.
//! * **Intervals.** Block `n` is `[g(n), g(n+1))` for a slalom boundary `g`,
//!   with `[0, g(0))` folded into block 0.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::sequences::{increasing_enum, range_encode, to_index, EpSeq, EpSet, Nat, SeqError};
use crate::slalom::{Slalom, SlalomError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("domains overlap at index {0}")]
    DomainOverlap(usize),
    #[error("operation needs a strand layout")]
    Uncertified,
    #[error(transparent)]
    Seq(#[from] SeqError),
}

impl From<SlalomError> for PartitionError {
    fn from(e: SlalomError) -> Self {
        match e {
            SlalomError::Partition(p) => p,
            SlalomError::Seq(s) => PartitionError::Seq(s),
            other => PartitionError::NotAPartition(other.to_string()),
        }
    }
}

/// Block `start + j * stride` contains `seq(j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand {
    pub start: usize,
    pub stride: usize,
    pub seq: EpSeq,
}

impl Strand {
    pub fn new(start: usize, stride: usize, seq: EpSeq) -> Result<Self, PartitionError> {
        seq.require_increasing()?;
        if stride == 0 {
            return Err(PartitionError::NotAPartition("strand stride must be positive".into()));
        }
        Ok(Self { start, stride, seq })
    }

    fn position_in(&self, block: usize) -> Option<usize> {
        (block >= self.start && (block - self.start).is_multiple_of(self.stride)).then(|| (block - self.start) / self.stride)
    }
}

#[derive(Debug, Clone)]
pub enum Layout {
    Strands { pinned: BTreeMap<usize, BTreeSet<usize>>, strands: Vec<Strand> },
    Intervals(Slalom),
}

#[derive(Debug, Clone)]
pub struct BlockPartition {
    domain: EpSet,
    layout: Layout,
}

/// Which blocks meet a target set.
///
/// Exact profiles are periodic from `stable_from` with period `period`;
/// horizon profiles only know `hits` and say nothing beyond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetProfile {
    pub hits: Vec<bool>,
    pub stable_from: usize,
    pub period: usize,
    pub exact: bool,
}

impl MeetProfile {
    pub fn hit(&self, n: usize) -> Option<bool> {
        if n < self.hits.len() {
            return Some(self.hits[n]);
        }
        self.exact.then(|| self.hits[self.stable_from + (n - self.stable_from) % self.period])
    }

    /// Minimal `t` such that every block `n >= t` meets the target; `None`
    /// when misses recur (or, for a horizon profile, when the last inspected
    /// block misses).
    pub fn threshold(&self) -> Option<usize> {
        let recurring = if self.exact {
            self.hits[self.stable_from..].iter().any(|h| !h)
        } else {
            self.hits.last() == Some(&false)
        };
        if recurring {
            return None;
        }
        Some(self.hits.iter().rposition(|h| !h).map_or(0, |i| i + 1))
    }

    /// First missing block at or after `from`, if one is known.
    pub fn first_miss_from(&self, from: usize) -> Option<usize> {
        let end = if self.exact { self.hits.len().max(from) + self.period } else { self.hits.len() };
        (from..end).find(|&n| self.hit(n) == Some(false))
    }

    /// Blocks inspected, for horizon profiles.
    pub fn horizon(&self) -> Option<usize> {
        (!self.exact).then_some(self.hits.len())
    }
}

/// Exact meet profile of the interval blocks of a periodic boundary.
///
/// Past the point where `g` is in its tail and above the target's prefix,
/// whether block `n` meets the target depends only on `g(n)` modulo the
/// target period and on the increment `g(n+1) - g(n)`; both repeat after
/// `p_g * P / gcd(S_g, P)` blocks.
pub(crate) fn interval_profile(g: &EpSeq, target: &EpSet, absorb_head: bool) -> MeetProfile {
    let base = Nat::from(target.preperiod());
    let tp = target.period();
    let steady = g.preperiod().max(usize::from(absorb_head));
    let mut values = g.iter();
    let mut lo = values.next().expect("infinite");
    let mut start_seen = None;
    let mut hits = Vec::new();
    let growth_mod = (g.cycle_growth() % Nat::from(tp)).to_usize().expect("below period");
    let period = g.period() * (tp / growth_mod.gcd(&tp));
    let mut n = 0;
    loop {
        let hi = values.next().expect("infinite");
        if start_seen.is_none() && n >= steady && lo >= base {
            start_seen = Some(n);
        }
        if let Some(s) = start_seen {
            if n >= s + period {
                break;
            }
        }
        let from = if absorb_head && n == 0 { Nat::from(0u32) } else { lo.clone() };
        hits.push(target.next_at_or_after(&from).is_some_and(|e| e < hi));
        lo = hi;
        n += 1;
    }
    MeetProfile { hits, stable_from: start_seen.expect("loop exits after start"), period, exact: true }
}

impl BlockPartition {
    pub fn from_strands(domain: EpSet, pinned: BTreeMap<usize, BTreeSet<usize>>, strands: Vec<Strand>) -> Self {
        Self { domain, layout: Layout::Strands { pinned, strands } }
    }

    /// The empty partition of the empty set.
    pub fn empty() -> Self {
        Self::from_strands(EpSet::empty(), BTreeMap::new(), Vec::new())
    }

    /// Diagonal grouping: block `k` takes the `(k - i)`-th element of class
    /// `i` for every `i <= k`.
    pub fn diagonal(classes: &[EpSet]) -> Result<Self, PartitionError> {
        let mut domain = EpSet::empty();
        let mut strands = Vec::with_capacity(classes.len());
        for (i, class) in classes.iter().enumerate() {
            strands.push(Strand::new(i, 1, increasing_enum(class)?)?);
            domain = domain.union(class);
        }
        Ok(Self::from_strands(domain, BTreeMap::new(), strands))
    }

    /// Block `n` holds the `n`-th element of `set` (finitely many nonempty
    /// blocks when the set is finite).
    pub fn enumerate(set: &EpSet) -> Result<Self, PartitionError> {
        if set.is_infinite() {
            let strands = vec![Strand::new(0, 1, increasing_enum(set)?)?];
            return Ok(Self::from_strands(set.clone(), BTreeMap::new(), strands));
        }
        let pinned = set.elements().enumerate().map(|(n, e)| (n, BTreeSet::from([e]))).collect();
        Ok(Self::from_strands(set.clone(), pinned, Vec::new()))
    }

    /// The blocks `base[0..q]` repeated with translation: block `j*q + i`
    /// is `base[i] + j*shift`.
    pub fn translated(base: &[Vec<usize>], shift: usize) -> Result<Self, PartitionError> {
        if shift == 0 || base.is_empty() {
            return Err(PartitionError::NotAPartition("translation needs blocks and a positive shift".into()));
        }
        let q = base.len();
        let mut strands = Vec::new();
        let mut domain = EpSet::empty();
        for (i, block) in base.iter().enumerate() {
            for &e in block {
                let seq = EpSeq::linear(shift as u64, e as u64);
                domain = domain.union(&range_encode(&seq)?);
                strands.push(Strand::new(i, q, seq)?);
            }
        }
        Ok(Self::from_strands(domain, BTreeMap::new(), strands))
    }

    /// Interval blocks of a slalom: `[0, g(1))`, then `[g(n), g(n+1))`.
    pub fn intervals(slalom: Slalom) -> Self {
        Self { domain: EpSet::all(), layout: Layout::Intervals(slalom) }
    }

    pub fn domain(&self) -> &EpSet {
        &self.domain
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// True when block questions are decided exactly.
    pub fn is_certified(&self) -> bool {
        match &self.layout {
            Layout::Strands { .. } => true,
            Layout::Intervals(s) => s.periodic_boundary().is_some(),
        }
    }

    pub fn block(&self, n: usize) -> Result<Vec<usize>, PartitionError> {
        match &self.layout {
            Layout::Strands { pinned, strands } => {
                let mut out: BTreeSet<usize> = pinned.get(&n).cloned().unwrap_or_default();
                for s in strands {
                    if let Some(j) = s.position_in(n) {
                        out.insert(to_index(&s.seq.at(j))?);
                    }
                }
                Ok(out.into_iter().collect())
            }
            Layout::Intervals(s) => {
                let lo = if n == 0 { 0 } else { to_index(&s.boundary_at(n)?)? };
                let hi = to_index(&s.boundary_at(n + 1)?)?;
                Ok((lo..hi).collect())
            }
        }
    }

    /// Every `(element, block)` pair with `element < horizon`.
    pub fn elements_below(&self, horizon: usize) -> Result<Vec<(usize, usize)>, PartitionError> {
        let mut out = Vec::new();
        match &self.layout {
            Layout::Strands { pinned, strands } => {
                for (&b, elems) in pinned {
                    out.extend(elems.iter().filter(|&&e| e < horizon).map(|&e| (e, b)));
                }
                for s in strands {
                    for (j, v) in s.seq.iter().enumerate() {
                        match v.to_usize() {
                            Some(e) if e < horizon => out.push((e, s.start + j * s.stride)),
                            _ => break,
                        }
                    }
                }
            }
            Layout::Intervals(s) => {
                let mut n = 0;
                loop {
                    let block = self.block(n)?;
                    out.extend(block.iter().filter(|&&e| e < horizon).map(|&e| (e, n)));
                    if to_index(&s.boundary_at(n + 1)?)? >= horizon {
                        break;
                    }
                    n += 1;
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Checks disjointness and exact coverage of the domain below `horizon`.
    pub fn validate_to_horizon(&self, horizon: usize) -> Result<(), PartitionError> {
        let pairs = self.elements_below(horizon)?;
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(PartitionError::NotAPartition(format!(
                    "index {} lies in blocks {} and {}",
                    w[0].0, w[0].1, w[1].1
                )));
            }
        }
        let mut listed = pairs.iter().map(|p| p.0).peekable();
        for e in 0..horizon {
            let present = listed.next_if_eq(&e).is_some();
            match (present, self.domain.contains(e)) {
                (true, false) => {
                    return Err(PartitionError::NotAPartition(format!("index {e} is outside the domain")));
                }
                (false, true) => return Err(PartitionError::NotAPartition(format!("index {e} is in no block"))),
                _ => {}
            }
        }
        Ok(())
    }

    /// Exact well-formedness of a strand layout.
    pub fn validate_exact(&self) -> Result<(), PartitionError> {
        let Layout::Strands { pinned, strands } = &self.layout else {
            return Err(PartitionError::Uncertified);
        };
        let mut seen = BTreeSet::new();
        for (b, elems) in pinned {
            for &e in elems {
                if !seen.insert(e) {
                    return Err(PartitionError::NotAPartition(format!("index {e} pinned twice (block {b})")));
                }
            }
        }
        let mut covered = EpSet::finite(seen.iter().copied());
        for (i, s) in strands.iter().enumerate() {
            let range = range_encode(&s.seq)?;
            if let Some(e) = covered.intersection(&range).min() {
                return Err(PartitionError::NotAPartition(format!("index {e} repeated (strand {i})")));
            }
            covered = covered.union(&range);
        }
        if let Some(e) = self.domain.difference(&covered).min() {
            return Err(PartitionError::NotAPartition(format!("index {e} is in no block")));
        }
        if let Some(e) = covered.difference(&self.domain).min() {
            return Err(PartitionError::NotAPartition(format!("index {e} is outside the domain")));
        }
        Ok(())
    }

    /// Exact check when certified, otherwise up to `horizon`.
    pub fn validate(&self, horizon: usize) -> Result<(), PartitionError> {
        match &self.layout {
            Layout::Strands { .. } => self.validate_exact(),
            // Interval blocks of a strictly increasing boundary partition ℕ.
            Layout::Intervals(s) if s.periodic_boundary().is_some() => Ok(()),
            Layout::Intervals(_) => self.validate_to_horizon(horizon),
        }
    }

    /// Blocks `0, 1, ...` up to the first one reaching `horizon`.
    pub fn blocks_within(&self, horizon: usize) -> Result<Vec<Vec<usize>>, PartitionError> {
        let last = self.elements_below(horizon)?.iter().map(|p| p.1).max();
        let mut out = Vec::new();
        for n in 0..=last.unwrap_or(0) {
            let b = self.block(n)?;
            if b.iter().any(|&e| e >= horizon) {
                break;
            }
            out.push(b);
        }
        Ok(out)
    }

    /// Which blocks meet `target`. Exact for certified layouts; otherwise the
    /// blocks below `horizon` are inspected.
    pub fn meet_profile(&self, target: &EpSet, horizon: usize) -> Result<MeetProfile, PartitionError> {
        match &self.layout {
            Layout::Strands { pinned, strands } => self.strand_profile(pinned, strands, target),
            Layout::Intervals(s) => match s.periodic_boundary() {
                Some(g) => Ok(interval_profile(g, target, true)),
                None => {
                    let hits = self
                        .blocks_within(horizon)?
                        .iter()
                        .map(|b| b.iter().any(|&e| target.contains(e)))
                        .collect::<Vec<_>>();
                    Ok(MeetProfile { stable_from: hits.len(), hits, period: 1, exact: false })
                }
            },
        }
    }

    fn strand_profile(
        &self,
        pinned: &BTreeMap<usize, BTreeSet<usize>>,
        strands: &[Strand],
        target: &EpSet,
    ) -> Result<MeetProfile, PartitionError> {
        let base = Nat::from(target.preperiod());
        let tp = target.period();
        let mut stable_from = pinned.keys().next_back().map_or(0, |b| b + 1);
        let mut period = 1usize;
        for s in strands {
            // Membership of seq(j) in the target repeats once seq is in its
            // tail and past the target's prefix.
            let first = s.seq.preperiod() - 1;
            let j0 = s.seq.iter().enumerate().skip(first).find(|(_, v)| *v >= base).map(|(j, _)| j).expect("unbounded");
            let growth_mod = (s.seq.cycle_growth() % Nat::from(tp)).to_usize().expect("below period");
            let strand_period = s.seq.period() * (tp / growth_mod.gcd(&tp));
            stable_from = stable_from.max(s.start + j0 * s.stride);
            period = period.lcm(&(strand_period * s.stride));
        }
        let hits = (0..stable_from + period)
            .map(|n| Ok(self.block(n)?.iter().any(|&e| target.contains(e))))
            .collect::<Result<Vec<_>, PartitionError>>()?;
        Ok(MeetProfile { hits, stable_from, period, exact: true })
    }

    /// The same partition with block `n` dropped; the result no longer
    /// covers its domain. Used to exercise verification failures.
    pub fn remove_block(&self, n: usize) -> Result<Self, PartitionError> {
        let Layout::Strands { pinned, strands } = &self.layout else {
            return Err(PartitionError::Uncertified);
        };
        let mut pinned = pinned.clone();
        pinned.remove(&n);
        let mut kept = Vec::new();
        for s in strands {
            match s.position_in(n) {
                None => kept.push(s.clone()),
                Some(j) => {
                    for i in 0..j {
                        let e = to_index(&s.seq.at(i))?;
                        pinned.entry(s.start + i * s.stride).or_default().insert(e);
                    }
                    kept.push(Strand { start: n + s.stride, stride: s.stride, seq: s.seq.shift(j + 1) });
                }
            }
        }
        Ok(Self::from_strands(self.domain.clone(), pinned, kept))
    }

    /// `H_n = ⋃ { G^i_j : max(i, j) = n }` over partitions of pairwise
    /// disjoint domains.
    pub fn merge(parts: &[BlockPartition]) -> Result<Self, PartitionError> {
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                if let Some(e) = a.domain.intersection(&b.domain).min() {
                    return Err(PartitionError::DomainOverlap(e));
                }
            }
        }
        let mut domain = EpSet::empty();
        let mut pinned: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        let mut merged = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            let Layout::Strands { pinned: own, strands } = &part.layout else {
                return Err(PartitionError::Uncertified);
            };
            domain = domain.union(&part.domain);
            for (&b, elems) in own {
                pinned.entry(b.max(i)).or_default().extend(elems);
            }
            for s in strands {
                if s.start >= i {
                    merged.push(s.clone());
                    continue;
                }
                let lead = (i - s.start).div_ceil(s.stride);
                for j in 0..lead {
                    pinned.entry(i).or_default().insert(to_index(&s.seq.at(j))?);
                }
                merged.push(Strand { start: s.start + lead * s.stride, stride: s.stride, seq: s.seq.shift(lead) });
            }
        }
        Ok(Self::from_strands(domain, pinned, merged))
    }

    /// Block `n` additionally takes the `n`-th element of `leftover`.
    pub fn absorb(&self, leftover: &EpSet) -> Result<Self, PartitionError> {
        let Layout::Strands { pinned, strands } = &self.layout else {
            return Err(PartitionError::Uncertified);
        };
        if let Some(e) = self.domain.intersection(leftover).min() {
            return Err(PartitionError::DomainOverlap(e));
        }
        let mut pinned = pinned.clone();
        let mut strands = strands.clone();
        if leftover.is_infinite() {
            strands.push(Strand::new(0, 1, increasing_enum(leftover)?)?);
        } else {
            for (n, e) in leftover.elements().enumerate() {
                pinned.entry(n).or_default().insert(e);
            }
        }
        Ok(Self::from_strands(self.domain.union(leftover), pinned, strands))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::TailKind;

    fn blocks(p: &BlockPartition, count: usize) -> Vec<Vec<usize>> {
        (0..count).map(|n| p.block(n).unwrap()).collect()
    }

    #[test]
    fn diagonal_layout() {
        let p = BlockPartition::diagonal(&[EpSet::residue_class(2, 0), EpSet::residue_class(2, 1)]).unwrap();
        assert_eq!(blocks(&p, 3), vec![vec![0], vec![1, 2], vec![3, 4]]);
        p.validate_exact().unwrap();
        p.validate_to_horizon(100).unwrap();
    }

    #[test]
    fn translated_layout() {
        let p = BlockPartition::translated(&[vec![0, 5], vec![1, 2], vec![3, 4], vec![6, 7]], 8).unwrap();
        assert_eq!(p.block(4).unwrap(), vec![8, 13]);
        assert_eq!(p.domain(), &EpSet::all());
        p.validate_exact().unwrap();
        let bad = BlockPartition::translated(&[vec![0, 2], vec![1, 2]], 3).unwrap();
        assert!(matches!(bad.validate_exact(), Err(PartitionError::NotAPartition(_))));
    }

    #[test]
    fn enumerate_finite_and_infinite() {
        let p = BlockPartition::enumerate(&EpSet::finite([3, 7])).unwrap();
        assert_eq!(blocks(&p, 3), vec![vec![3], vec![7], vec![]]);
        p.validate_exact().unwrap();
        let q = BlockPartition::enumerate(&EpSet::residue_class(3, 1)).unwrap();
        assert_eq!(blocks(&q, 2), vec![vec![1], vec![4]]);
    }

    #[test]
    fn removing_a_block_breaks_coverage() {
        let p = BlockPartition::diagonal(&[EpSet::residue_class(2, 0), EpSet::residue_class(2, 1)]).unwrap();
        let broken = p.remove_block(2).unwrap();
        assert_eq!(broken.block(2).unwrap(), Vec::<usize>::new());
        assert_eq!(broken.block(3).unwrap(), p.block(3).unwrap());
        assert_eq!(broken.block(1).unwrap(), p.block(1).unwrap());
        assert!(matches!(broken.validate_exact(), Err(PartitionError::NotAPartition(_))));
        assert!(broken.validate_to_horizon(10).is_err());
    }

    #[test]
    fn merge_unfolds_the_max_rule() {
        // G^0 singletons of evens, G^1 singletons of odds.
        let g0 = BlockPartition::enumerate(&EpSet::residue_class(2, 0)).unwrap();
        let g1 = BlockPartition::enumerate(&EpSet::residue_class(2, 1)).unwrap();
        let h = BlockPartition::merge(&[g0.clone(), g1.clone()]).unwrap();
        assert_eq!(h.block(0).unwrap(), g0.block(0).unwrap());
        let mut h1 = g0.block(1).unwrap();
        h1.extend(g1.block(0).unwrap());
        h1.extend(g1.block(1).unwrap());
        h1.sort();
        assert_eq!(h.block(1).unwrap(), h1);
        for n in 2..20 {
            let mut hn = g0.block(n).unwrap();
            hn.extend(g1.block(n).unwrap());
            hn.sort();
            assert_eq!(h.block(n).unwrap(), hn);
        }
        h.validate_exact().unwrap();
        let single = BlockPartition::merge(std::slice::from_ref(&g0)).unwrap();
        assert_eq!(blocks(&single, 10), blocks(&g0, 10));
        let none = BlockPartition::merge(&[]).unwrap();
        assert!(none.domain().is_empty());
        assert_eq!(BlockPartition::merge(&[g0.clone(), g0]).unwrap_err(), PartitionError::DomainOverlap(0));
    }

    #[test]
    fn absorb_leftovers() {
        let evens = BlockPartition::enumerate(&EpSet::residue_class(2, 0)).unwrap();
        let all = evens.absorb(&EpSet::residue_class(2, 1)).unwrap();
        for n in 0..10 {
            assert_eq!(all.block(n).unwrap(), vec![2 * n, 2 * n + 1]);
        }
        all.validate_exact().unwrap();
        let same = evens.absorb(&EpSet::empty()).unwrap();
        assert_eq!(blocks(&same, 5), blocks(&evens, 5));
        let threes = BlockPartition::enumerate(&EpSet::residue_class(3, 0)).unwrap();
        let grown = threes.absorb(&EpSet::finite([1, 2])).unwrap();
        assert_eq!(blocks(&grown, 3), vec![vec![0, 1], vec![2, 3], vec![6]]);
        assert_eq!(threes.absorb(&EpSet::finite([3])).unwrap_err(), PartitionError::DomainOverlap(3));
    }

    #[test]
    fn exact_profile_matches_direct_scan() {
        let p = BlockPartition::diagonal(&[
            EpSet::from_bits(&[1, 0], &[0, 0, 1]).unwrap(),
            EpSet::from_bits(&[0, 1], &[1, 1, 0]).unwrap(),
        ])
        .unwrap();
        p.validate_exact().unwrap();
        let target = EpSet::from_bits(&[0, 0, 0, 1], &[1, 0, 0, 0, 0]).unwrap();
        let profile = p.meet_profile(&target, 0).unwrap();
        assert!(profile.exact);
        for n in 0..200 {
            let direct = p.block(n).unwrap().iter().any(|&e| target.contains(e));
            assert_eq!(profile.hit(n), Some(direct), "block {n}");
        }
    }

    #[test]
    fn interval_profile_matches_direct_scan() {
        let g = EpSeq::from_u64(&[2, 3], TailKind::Increments, &[1, 4]).unwrap();
        let target = EpSet::from_bits(&[1], &[0, 0, 1]).unwrap();
        let p = BlockPartition::intervals(Slalom::new(g.clone()).unwrap());
        let profile = p.meet_profile(&target, 0).unwrap();
        for n in 0..100 {
            let direct = p.block(n).unwrap().iter().any(|&e| target.contains(e));
            assert_eq!(profile.hit(n), Some(direct), "block {n}");
        }
        assert_eq!(p.block(0).unwrap(), vec![0, 1, 2]);
    }
}
