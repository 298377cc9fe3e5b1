//! Countable covers of finite point spaces and the grouping engine.
//!
//! A cover `⟨U_n⟩` is represented by its traces `X ∩ U_n`, an eventually
//! periodic sequence of subsets of a finite point space. Over a finite space
//! the refinement loop terminates after at most `|X| + 2` successor steps:
//! an infinite index set over finitely many traces always has an infinite
//! trace class, so the first step already absorbs every point.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::partition::{BlockPartition, PartitionError};
use crate::sequences::{EpSet, SeqError};

/// Largest supported point space.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("point space is empty")]
    EmptySpace,
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("point spaces hold at most {MAX_POINTS} points, got {0}")]
    TooManyPoints(usize),
    #[error("unknown point id {0:?}")]
    UnknownPoint(String),
    #[error("cover cycle must be nonempty")]
    EmptyCycle,
    #[error("realization of {0:?} must be an infinite set")]
    FiniteRealization(String),
    #[error("cover is not large: {} lie in finitely many members", .0.join(", "))]
    NotLarge(Vec<String>),
    #[error("map is not defined on {}", .0.join(", "))]
    NotTotal(Vec<String>),
    #[error("map is not onto: {} have no preimage", .0.join(", "))]
    NotSurjective(Vec<String>),
    #[error("refinement did not terminate within {0} steps")]
    InternalTermination(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A set of points of a [`PointSpace`], by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn full(len: usize) -> Self {
        if len >= 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << len) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// A finite nonempty set of named points, optionally realized as infinite
/// subsets of ℕ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSpace {
    ids: Vec<String>,
    realization: Option<Vec<EpSet>>,
}

impl PointSpace {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Result<Self, CoverError> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        if ids.is_empty() {
            return Err(CoverError::EmptySpace);
        }
        if ids.len() > MAX_POINTS {
            return Err(CoverError::TooManyPoints(ids.len()));
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(CoverError::DuplicatePoint(id.clone()));
            }
        }
        Ok(Self { ids, realization: None })
    }

    pub fn with_realization(ids: Vec<String>, sets: Vec<EpSet>) -> Result<Self, CoverError> {
        let mut space = Self::new(ids)?;
        if let Some(i) = sets.iter().position(|s| !s.is_infinite()) {
            return Err(CoverError::FiniteRealization(space.ids[i].clone()));
        }
        space.realization = Some(sets);
        Ok(space)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn realization(&self) -> Option<&[EpSet]> {
        self.realization.as_deref()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.ids.len())
    }

    pub fn index_of(&self, id: &str) -> Result<usize, CoverError> {
        self.ids.iter().position(|p| p == id).ok_or_else(|| CoverError::UnknownPoint(id.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<PointSet, CoverError> {
        ids.iter().map(|id| self.index_of(id.as_ref())).collect::<Result<Vec<_>, _>>().map(PointSet::from_indices)
    }

    pub fn names(&self, set: PointSet) -> Vec<&str> {
        set.iter().filter(|&i| i < self.ids.len()).map(|i| self.ids[i].as_str()).collect()
    }

    fn render_set(&self, set: PointSet) -> String {
        format!("{{{}}}", self.names(set).join(" "))
    }
}

/// A countable cover given by eventually periodic traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpCover {
    space: PointSpace,
    prefix: Vec<PointSet>,
    cycle: Vec<PointSet>,
}

impl EpCover {
    /// Builds a cover in canonical form (minimal cycle, then minimal prefix).
    pub fn new(space: PointSpace, mut prefix: Vec<PointSet>, mut cycle: Vec<PointSet>) -> Result<Self, CoverError> {
        if cycle.is_empty() {
            return Err(CoverError::EmptyCycle);
        }
        let full = space.full();
        if let Some(bad) = prefix.iter().chain(&cycle).find(|t| !t.is_subset(full)) {
            return Err(CoverError::UnknownPoint(format!("#{}", bad.difference(full).iter().next().unwrap_or(0))));
        }
        let p = cycle.len();
        let d = (1..=p).filter(|&d| p.is_multiple_of(d)).find(|&d| (d..p).all(|i| cycle[i] == cycle[i - d])).unwrap_or(p);
        cycle.truncate(d);
        while prefix.last() == Some(&cycle[d - 1]) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        Ok(Self { space, prefix, cycle })
    }

    /// Builds a cover from traces written with point ids.
    pub fn from_ids<S: AsRef<str>>(space: PointSpace, prefix: &[&[S]], cycle: &[&[S]]) -> Result<Self, CoverError> {
        let prefix = prefix.iter().map(|t| space.set_of(t)).collect::<Result<_, _>>()?;
        let cycle = cycle.iter().map(|t| space.set_of(t)).collect::<Result<_, _>>()?;
        Self::new(space, prefix, cycle)
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn prefix(&self) -> &[PointSet] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[PointSet] {
        &self.cycle
    }

    pub fn preperiod(&self) -> usize {
        self.prefix.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// `X ∩ U_n`.
    pub fn trace(&self, n: usize) -> PointSet {
        match self.prefix.get(n) {
            Some(&t) => t,
            None => self.cycle[(n - self.prefix.len()) % self.cycle.len()],
        }
    }

    /// `{ n : x ∈ U_n }`.
    pub fn indices_containing(&self, x: usize) -> EpSet {
        EpSet::new(
            self.prefix.iter().map(|t| t.contains(x)).collect(),
            self.cycle.iter().map(|t| t.contains(x)).collect(),
        )
        .expect("nonempty cycle")
    }
}

impl fmt::Display for EpCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "over {} = prefix", self.space.render_set(self.space.full()))?;
        for &t in &self.prefix {
            write!(f, " {}", self.space.render_set(t))?;
        }
        write!(f, " ; cycle")?;
        for &t in &self.cycle {
            write!(f, " {}", self.space.render_set(t))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointLargeness {
    pub id: String,
    pub large: bool,
    /// Number of members containing the point, when finite.
    pub multiplicity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargenessReport {
    pub large: bool,
    pub points: Vec<PointLargeness>,
}

impl LargenessReport {
    pub fn finite_multiplicity_points(&self) -> Vec<&str> {
        self.points.iter().filter(|p| !p.large).map(|p| p.id.as_str()).collect()
    }
}

/// A point lies in infinitely many members iff it lies in some cycle trace.
pub fn is_large(c: &EpCover) -> LargenessReport {
    let recurring = c.cycle.iter().fold(PointSet::empty(), |acc, &t| acc.union(t));
    let points: Vec<PointLargeness> = c
        .space
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let large = recurring.contains(i);
            let multiplicity = (!large).then(|| c.prefix.iter().filter(|t| t.contains(i)).count());
            PointLargeness { id: id.clone(), large, multiplicity }
        })
        .collect();
    LargenessReport { large: points.iter().all(|p| p.large), points }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivClass {
    /// Common trace restricted to the subspace.
    pub trace: PointSet,
    pub indices: EpSet,
    pub infinite: bool,
}

/// Classes of `idx` under `n ~ m ⇔ sub ∩ U_n = sub ∩ U_m`, ordered by least
/// index.
pub fn equiv_classes(c: &EpCover, sub: PointSet, idx: &EpSet) -> Vec<EquivClass> {
    let k = c.preperiod().max(idx.preperiod());
    let p = c.period().lcm(&idx.period());
    let mut order: Vec<PointSet> = Vec::new();
    let mut bits: BTreeMap<PointSet, Vec<bool>> = BTreeMap::new();
    for n in 0..k + p {
        if !idx.contains(n) {
            continue;
        }
        let t = c.trace(n).intersection(sub);
        let row = bits.entry(t).or_insert_with(|| {
            order.push(t);
            vec![false; k + p]
        });
        row[n] = true;
    }
    order
        .into_iter()
        .map(|t| {
            let row = &bits[&t];
            let indices = EpSet::new(row[..k].to_vec(), row[k..].to_vec()).expect("nonempty cycle");
            EquivClass { trace: t, infinite: indices.is_infinite(), indices }
        })
        .collect()
}

/// Result of one grouping step on `(sub, idx)`.
#[derive(Debug, Clone)]
pub struct OneStep {
    /// Indices whose trace class is infinite.
    pub a: EpSet,
    /// Points covered by some member indexed in `a`.
    pub v: PointSet,
    /// Diagonal grouping of `a`.
    pub grouping: BlockPartition,
    /// `idx ∖ a`.
    pub residual: EpSet,
    pub classes: Vec<EquivClass>,
}

/// One grouping step: the infinite trace classes are grouped diagonally, so
/// each block takes one index from every class that has started.
pub fn onestep(c: &EpCover, sub: PointSet, idx: &EpSet) -> Result<OneStep, CoverError> {
    let classes = equiv_classes(c, sub, idx);
    let infinite: Vec<&EquivClass> = classes.iter().filter(|cl| cl.infinite).collect();
    let v = infinite.iter().fold(PointSet::empty(), |acc, cl| acc.union(cl.trace));
    let uncovered = sub.difference(v);
    if !uncovered.is_empty() {
        return Err(CoverError::NotLarge(c.space.names(uncovered).iter().map(|s| s.to_string()).collect()));
    }
    let sets: Vec<EpSet> = infinite.iter().map(|cl| cl.indices.clone()).collect();
    let a = sets.iter().fold(EpSet::empty(), |acc, s| acc.union(s));
    let grouping = BlockPartition::diagonal(&sets)?;
    Ok(OneStep { residual: idx.difference(&a), a, v, grouping, classes })
}

/// Partition of all cover indices plus per-point thresholds from which every
/// block's members cover the point.
#[derive(Debug, Clone)]
pub struct GroupabilityWitness {
    pub partition: BlockPartition,
    pub thresholds: BTreeMap<String, usize>,
}

impl GroupabilityWitness {
    /// The same partition with thresholds kept only for `ids`.
    pub fn restrict<S: AsRef<str>>(&self, ids: &[S]) -> Self {
        let thresholds = self
            .thresholds
            .iter()
            .filter(|(k, _)| ids.iter().any(|id| id.as_ref() == k.as_str()))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Self { partition: self.partition.clone(), thresholds }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Index set `B` the step started from.
    pub b: EpSet,
    /// Points still to be handled.
    pub x: PointSet,
    pub a: EpSet,
    pub v: PointSet,
    pub class_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTrace {
    /// Every successor step, the last one (with empty `a`) included.
    pub steps: Vec<StepRecord>,
}

impl RefinementTrace {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Debug, Clone)]
pub struct Grouping {
    pub witness: GroupabilityWitness,
    pub trace: RefinementTrace,
}

/// Groups a large cover.
///
/// Each step removes the points covered so far, splits the remaining
/// indices into trace classes, groups the infinite classes diagonally and
/// keeps the rest for the next step. When no infinite class is left the
/// leftover indices (finitely many) become singleton blocks, and all step
/// groupings are merged with `H_n = ⋃ { G^i_j : max(i, j) = n }`.
pub fn group_cover(c: &EpCover) -> Result<Grouping, CoverError> {
    let report = is_large(c);
    if !report.large {
        return Err(CoverError::NotLarge(report.finite_multiplicity_points().iter().map(|s| s.to_string()).collect()));
    }
    let step_bound = c.space.len() + 2;
    let mut x = c.space.full();
    let mut b = EpSet::all();
    let mut covered = PointSet::empty();
    let mut steps = Vec::new();
    let mut groupings = Vec::new();
    loop {
        if steps.len() >= step_bound {
            return Err(CoverError::InternalTermination(step_bound));
        }
        x = x.difference(covered);
        let step = onestep(c, x, &b)?;
        let done = step.a.is_empty();
        steps.push(StepRecord { b: b.clone(), x, a: step.a.clone(), v: step.v, class_count: step.classes.len() });
        if done {
            break;
        }
        b = step.residual;
        covered = step.v;
        groupings.push(step.grouping);
    }
    if !x.is_empty() {
        return Err(CoverError::Internal(format!("refinement ended with {} points unhandled", x.len())));
    }
    if !b.is_empty() {
        if b.is_infinite() {
            return Err(CoverError::Internal("refinement ended with infinitely many indices".into()));
        }
        groupings.push(BlockPartition::enumerate(&b)?);
    }
    let partition = BlockPartition::merge(&groupings)?;
    let mut thresholds = BTreeMap::new();
    for (i, id) in c.space.ids.iter().enumerate() {
        let profile = partition.meet_profile(&c.indices_containing(i), 0)?;
        let t = profile.threshold().ok_or_else(|| CoverError::Internal(format!("{id} is missed by infinitely many blocks")))?;
        thresholds.insert(id.clone(), t);
    }
    Ok(Grouping { witness: GroupabilityWitness { partition, thresholds }, trace: RefinementTrace { steps } })
}

/// [`BlockPartition::merge`] under its covers-module name.
pub fn merge_partitions(parts: &[BlockPartition]) -> Result<BlockPartition, CoverError> {
    Ok(BlockPartition::merge(parts)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCheck {
    pub id: String,
    pub claimed: Option<usize>,
    /// Least valid threshold, if the point is covered by cofinitely many blocks.
    pub minimal: Option<usize>,
    /// A block at or above the claimed threshold whose members miss the point.
    pub failure: Option<usize>,
}

impl PointCheck {
    pub fn passes(&self) -> bool {
        self.claimed.is_some() && self.failure.is_none() && self.minimal.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub exact: bool,
    /// Blocks inspected when the partition has no periodic certificate.
    pub horizon: Option<usize>,
    pub points: Vec<PointCheck>,
}

impl ThresholdReport {
    pub fn passes(&self) -> bool {
        self.points.iter().all(PointCheck::passes)
    }
}

/// Re-checks the partition and every claimed threshold. Exact for certified
/// partitions; otherwise blocks below `horizon` are inspected.
pub fn verify_witness(c: &EpCover, w: &GroupabilityWitness, horizon: usize) -> Result<ThresholdReport, CoverError> {
    if let Some(missing) = w.partition.domain().complement().min() {
        return Err(PartitionError::NotAPartition(format!("cover index {missing} is in no block")).into());
    }
    w.partition.validate(horizon)?;
    let mut points = Vec::with_capacity(c.space.len());
    let mut exact = true;
    let mut seen_horizon = None;
    for (i, id) in c.space.ids.iter().enumerate() {
        let profile = w.partition.meet_profile(&c.indices_containing(i), horizon)?;
        exact &= profile.exact;
        seen_horizon = seen_horizon.or(profile.horizon());
        let claimed = w.thresholds.get(id).copied();
        let failure = profile.first_miss_from(claimed.unwrap_or(0));
        points.push(PointCheck { id: id.clone(), claimed, minimal: profile.threshold(), failure });
    }
    Ok(ThresholdReport { exact, horizon: seen_horizon, points })
}

/// Extends the partition so that block `n` also takes the `n`-th leftover
/// index. Thresholds are unchanged.
pub fn absorb_leftovers(w: &GroupabilityWitness, leftover: &EpSet) -> Result<GroupabilityWitness, CoverError> {
    Ok(GroupabilityWitness { partition: w.partition.absorb(leftover)?, thresholds: w.thresholds.clone() })
}

/// `Ũ = { U ∪ D : U ∈ 𝒰 }` over the space enlarged by the fresh points `extra`.
pub fn extend_to_superspace<S: AsRef<str>>(c: &EpCover, extra: &[S]) -> Result<EpCover, CoverError> {
    let mut ids = c.space.ids.clone();
    ids.extend(extra.iter().map(|s| s.as_ref().to_string()));
    let space = PointSpace::new(ids)?;
    let added = PointSet::full(space.len()).difference(c.space.full());
    let widen = |t: &PointSet| t.union(added);
    EpCover::new(space, c.prefix.iter().map(widen).collect(), c.cycle.iter().map(widen).collect())
}

/// A total map between point spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    from: PointSpace,
    to: PointSpace,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new<S: AsRef<str>>(from: PointSpace, to: PointSpace, pairs: &[(S, S)]) -> Result<Self, CoverError> {
        let mut image = vec![None; from.len()];
        for (x, y) in pairs {
            image[from.index_of(x.as_ref())?] = Some(to.index_of(y.as_ref())?);
        }
        let missing: Vec<String> =
            image.iter().zip(&from.ids).filter(|(v, _)| v.is_none()).map(|(_, id)| id.clone()).collect();
        if !missing.is_empty() {
            return Err(CoverError::NotTotal(missing));
        }
        Ok(Self { image: image.into_iter().map(|v| v.expect("checked")).collect(), from, to })
    }

    pub fn from_space(&self) -> &PointSpace {
        &self.from
    }

    pub fn to_space(&self) -> &PointSpace {
        &self.to
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        PointSet::from_indices((0..self.image.len()).filter(|&x| set.contains(self.image[x])))
    }

    fn require_onto(&self) -> Result<(), CoverError> {
        let hit = PointSet::from_indices(self.image.iter().copied());
        let missed = self.to.full().difference(hit);
        if missed.is_empty() {
            Ok(())
        } else {
            Err(CoverError::NotSurjective(self.to.names(missed).iter().map(|s| s.to_string()).collect()))
        }
    }
}

/// `𝒱 = { f⁻¹[U] : U ∈ 𝒰 }`, member by member.
pub fn pullback_cover(f: &PointMap, c: &EpCover) -> Result<EpCover, CoverError> {
    f.require_onto()?;
    if f.to != c.space {
        return Err(CoverError::Internal("map target differs from the cover's space".into()));
    }
    let pull = |t: &PointSet| f.preimage(*t);
    EpCover::new(f.from.clone(), c.prefix.iter().map(pull).collect(), c.cycle.iter().map(pull).collect())
}

/// Transports a witness for the pulled-back cover to the original cover:
/// same index partition, and each `y` takes the largest threshold among
/// its preimages.
pub fn push_witness_forward(f: &PointMap, w: &GroupabilityWitness) -> Result<GroupabilityWitness, CoverError> {
    f.require_onto()?;
    let mut thresholds: BTreeMap<String, usize> = BTreeMap::new();
    for (x, &y) in f.image.iter().enumerate() {
        let t = *w.thresholds.get(&f.from.ids[x]).ok_or_else(|| CoverError::UnknownPoint(f.from.ids[x].clone()))?;
        let slot = thresholds.entry(f.to.ids[y].clone()).or_insert(0);
        *slot = (*slot).max(t);
    }
    Ok(GroupabilityWitness { partition: w.partition.clone(), thresholds })
}
