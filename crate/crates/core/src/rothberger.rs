//! The cover `O_n = { a : n ∈ a }` of a finite family of infinite sets, and
//! the route from a groupability witness to a slalom and a dominating bound.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::covers::{group_cover, verify_witness, CoverError, EpCover, Grouping, GroupabilityWitness, PointSet, PointSpace};
use crate::partition::{BlockPartition, PartitionError};
use crate::sequences::{increasing_enum, range_encode, DominanceVerdict, EpSeq, EpSet, SeqError};
use crate::slalom::{bound_from_slalom, bound_verdict, goes_through, slalom_from_partition, Bound, Slalom, SlalomError, ThroughVerdict};

/// Largest cover period [`build_rothberger_cover`] will materialize.
pub const MAX_COVER_PERIOD: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RothbergerError {
    #[error("cover period (lcm of member periods) exceeds {MAX_COVER_PERIOD}")]
    PeriodTooLarge,
    #[error("family must have at least one member")]
    EmptyFamily,
    #[error("{labels} labels for {members} members")]
    LabelCount { labels: usize, members: usize },
    #[error("member {0:?} is finite")]
    FiniteMember(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Slalom(#[from] SlalomError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A finite labelled family of infinite subsets of ℕ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunFamily {
    space: PointSpace,
    members: Vec<EpSet>,
}

impl FunFamily {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, members: Vec<EpSet>) -> Result<Self, RothbergerError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(RothbergerError::EmptyFamily);
        }
        if labels.len() != members.len() {
            return Err(RothbergerError::LabelCount { labels: labels.len(), members: members.len() });
        }
        if let Some(i) = members.iter().position(|m| !m.is_infinite()) {
            return Err(RothbergerError::FiniteMember(labels[i].clone()));
        }
        let space = PointSpace::with_realization(labels, members.clone())?;
        Ok(Self { space, members })
    }

    /// Members given as ranges of strictly increasing sequences.
    pub fn from_sequences<S: Into<String>>(labels: impl IntoIterator<Item = S>, seqs: &[EpSeq]) -> Result<Self, RothbergerError> {
        let members = seqs.iter().map(range_encode).collect::<Result<Vec<_>, _>>()?;
        Self::new(labels, members)
    }

    pub fn labels(&self) -> &[String] {
        self.space.ids()
    }

    pub fn members(&self) -> &[EpSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    /// `(label, increasing enumeration)` for every member.
    pub fn enumerations(&self) -> Result<Vec<(String, EpSeq)>, RothbergerError> {
        self.labels()
            .iter()
            .zip(&self.members)
            .map(|(l, m)| Ok((l.clone(), increasing_enum(m)?)))
            .collect()
    }
}

/// The cover whose `n`-th member holds exactly the members containing `n`.
///
/// Its period is the lcm of the member periods, which is refused above
/// [`MAX_COVER_PERIOD`].
pub fn build_rothberger_cover(y: &FunFamily) -> Result<EpCover, RothbergerError> {
    let k = y.members.iter().map(EpSet::preperiod).max().unwrap_or(0);
    let mut p = 1usize;
    for m in &y.members {
        p = p.lcm(&m.period());
        if p > MAX_COVER_PERIOD {
            return Err(RothbergerError::PeriodTooLarge);
        }
    }
    let trace = |n: usize| PointSet::from_indices((0..y.members.len()).filter(|&i| y.members[i].contains(n)));
    Ok(EpCover::new(y.space.clone(), (0..k).map(trace).collect(), (k..k + p).map(trace).collect())
        .expect("nonempty cycle over the family's own labels"))
}

/// A partition of ℕ with, per member, the block index from which every
/// block meets the member.
#[derive(Debug, Clone)]
pub struct MemberPartition {
    pub partition: BlockPartition,
    pub thresholds: BTreeMap<String, usize>,
}

/// Reads the witness blocks as sets of naturals: index `m` of the cover is
/// the natural `m`, so block `n` meets a member iff one of its indices is in
/// the member.
pub fn witness_to_partition(y: &FunFamily, w: &GroupabilityWitness, horizon: usize) -> Result<MemberPartition, RothbergerError> {
    let cover = build_rothberger_cover(y)?;
    let report = verify_witness(&cover, w, horizon).map_err(|e| RothbergerError::InvalidWitness(e.to_string()))?;
    if let Some(bad) = report.points.iter().find(|p| !p.passes()) {
        let detail = match (bad.claimed, bad.failure) {
            (None, _) => "no threshold given".to_string(),
            (Some(t), Some(n)) => format!("threshold {t} but block {n} misses it"),
            (Some(t), None) => format!("threshold {t} cannot be confirmed"),
        };
        return Err(RothbergerError::InvalidWitness(format!("member {}: {detail}", bad.id)));
    }
    let thresholds = report.points.iter().map(|p| (p.id.clone(), p.minimal.expect("passing point"))).collect();
    Ok(MemberPartition { partition: w.partition.clone(), thresholds })
}

#[derive(Debug, Clone)]
pub struct SlalomCheck {
    pub slalom: Slalom,
    pub verdicts: Vec<(String, ThroughVerdict)>,
}

impl SlalomCheck {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.holds)
    }
}

/// Greedy slalom of `p` and, per member, whether its enumeration goes through.
pub fn partition_to_slalom_check(y: &FunFamily, p: &BlockPartition, horizon: usize) -> Result<SlalomCheck, RothbergerError> {
    let slalom = slalom_from_partition(p, horizon)?;
    let verdicts = y
        .enumerations()?
        .into_iter()
        .map(|(label, f)| Ok((label, goes_through(&f, &slalom)?)))
        .collect::<Result<Vec<_>, RothbergerError>>()?;
    Ok(SlalomCheck { slalom, verdicts })
}

/// Every intermediate object of the pipeline, with all verdicts.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub cover: EpCover,
    pub grouping: Grouping,
    pub partition: MemberPartition,
    pub slalom: Slalom,
    pub bound: Bound,
    pub through: Vec<(String, ThroughVerdict)>,
    pub dominance: Vec<(String, DominanceVerdict)>,
}

impl PipelineReport {
    pub fn succeeded(&self) -> bool {
        self.through.iter().all(|(_, v)| v.holds) && self.dominance.iter().all(|(_, v)| v.holds)
    }
}

/// cover → grouping → partition → slalom → bound, checking every member
/// against the slalom and the bound.
pub fn b_pipeline(y: &FunFamily, horizon: usize) -> Result<PipelineReport, RothbergerError> {
    let cover = build_rothberger_cover(y)?;
    let grouping = group_cover(&cover)?;
    let partition = witness_to_partition(y, &grouping.witness, horizon)?;
    let check = partition_to_slalom_check(y, &partition.partition, horizon)?;
    let bound = bound_from_slalom(&check.slalom);
    let dominance = y
        .enumerations()?
        .into_iter()
        .map(|(label, f)| Ok((label, bound_verdict(&f, &bound)?)))
        .collect::<Result<Vec<_>, RothbergerError>>()?;
    Ok(PipelineReport { cover, grouping, partition, slalom: check.slalom, bound, through: check.verdicts, dominance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Nat;

    fn evens_odds() -> FunFamily {
        FunFamily::new(["e", "o"], vec![EpSet::residue_class(2, 0), EpSet::residue_class(2, 1)]).unwrap()
    }

    fn boundary(s: &Slalom, count: usize) -> Vec<Nat> {
        (0..count).map(|n| s.boundary_at(n).unwrap()).collect()
    }

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| Nat::from(x)).collect()
    }

    #[test]
    fn family_validation() {
        assert_eq!(FunFamily::new(Vec::<String>::new(), vec![]), Err(RothbergerError::EmptyFamily));
        assert_eq!(FunFamily::new(["a"], vec![EpSet::finite([1])]), Err(RothbergerError::FiniteMember("a".into())));
        assert!(matches!(
            FunFamily::new(["a", "a"], vec![EpSet::all(), EpSet::all()]),
            Err(RothbergerError::Cover(CoverError::DuplicatePoint(_)))
        ));
        let y = FunFamily::from_sequences(["d"], &[EpSeq::linear(2, 0)]).unwrap();
        assert_eq!(y.members()[0], EpSet::residue_class(2, 0));
    }

    #[test]
    fn cover_examples() {
        let c = build_rothberger_cover(&evens_odds()).unwrap();
        assert!(c.prefix().is_empty());
        assert_eq!(c.cycle(), &[PointSet::singleton(0), PointSet::singleton(1)]);

        let c = build_rothberger_cover(&FunFamily::new(["n"], vec![EpSet::all()]).unwrap()).unwrap();
        assert_eq!(c.cycle(), &[PointSet::singleton(0)]);

        let c = build_rothberger_cover(&FunFamily::new(["e"], vec![EpSet::residue_class(2, 0)]).unwrap()).unwrap();
        assert_eq!(c.cycle(), &[PointSet::singleton(0), PointSet::empty()]);
    }

    #[test]
    fn witness_to_partition_examples() {
        let y = evens_odds();
        let g = group_cover(&build_rothberger_cover(&y).unwrap()).unwrap();
        let mp = witness_to_partition(&y, &g.witness, 0).unwrap();
        let blocks: Vec<Vec<usize>> = (0..3).map(|n| mp.partition.block(n).unwrap()).collect();
        assert_eq!(blocks, vec![vec![0], vec![1, 2], vec![3, 4]]);
        assert_eq!(mp.thresholds["e"], 0);
        assert_eq!(mp.thresholds["o"], 1);

        let n = FunFamily::new(["n"], vec![EpSet::all()]).unwrap();
        let singletons = GroupabilityWitness {
            partition: BlockPartition::enumerate(&EpSet::all()).unwrap(),
            thresholds: BTreeMap::from([("n".to_string(), 0)]),
        };
        assert_eq!(witness_to_partition(&n, &singletons, 0).unwrap().thresholds["n"], 0);

        let mut corrupted = g.witness.clone();
        corrupted.thresholds.insert("o".into(), 0);
        assert!(matches!(witness_to_partition(&y, &corrupted, 0), Err(RothbergerError::InvalidWitness(_))));
        let holed = GroupabilityWitness { partition: g.witness.partition.remove_block(2).unwrap(), ..g.witness };
        assert!(matches!(witness_to_partition(&y, &holed, 0), Err(RothbergerError::InvalidWitness(_))));
    }

    #[test]
    fn slalom_check_examples() {
        let y = evens_odds();
        let g = group_cover(&build_rothberger_cover(&y).unwrap()).unwrap();
        let mp = witness_to_partition(&y, &g.witness, 0).unwrap();
        assert!(partition_to_slalom_check(&y, &mp.partition, 0).unwrap().all_hold());

        let n = FunFamily::new(["n"], vec![EpSet::all()]).unwrap();
        let check = partition_to_slalom_check(&n, &BlockPartition::enumerate(&EpSet::all()).unwrap(), 0).unwrap();
        assert_eq!(boundary(&check.slalom, 5), nats(&[0, 1, 2, 3, 4]));
        assert!(check.all_hold());

        let e = FunFamily::new(["e"], vec![EpSet::residue_class(2, 0)]).unwrap();
        let pairs = BlockPartition::translated(&[vec![0, 1]], 2).unwrap();
        let check = partition_to_slalom_check(&e, &pairs, 0).unwrap();
        assert_eq!(boundary(&check.slalom, 5), nats(&[0, 2, 4, 6, 8]));
        assert_eq!((check.verdicts[0].1.holds, check.verdicts[0].1.threshold), (true, 0));
    }

    #[test]
    fn pipeline_examples() {
        let r = b_pipeline(&evens_odds(), 0).unwrap();
        assert!(r.succeeded());

        let r = b_pipeline(&FunFamily::new(["n"], vec![EpSet::all()]).unwrap(), 0).unwrap();
        assert!(r.succeeded());
        assert_eq!(boundary(&r.slalom, 5), nats(&[0, 1, 2, 3, 4]));
        let bound: Vec<Nat> = (0..5).map(|n| r.bound.at(n).unwrap()).collect();
        assert_eq!(bound, nats(&[0, 2, 4, 6, 8]));
    }

    #[test]
    fn pipeline_on_sparse_members() {
        let y = FunFamily::from_sequences(
            ["a", "b", "c"],
            &[EpSeq::linear(7, 3), EpSeq::linear(5, 0), EpSeq::from_u64(&[1, 2, 40], crate::sequences::TailKind::Increments, &[3, 9]).unwrap()],
        )
        .unwrap();
        let r = b_pipeline(&y, 0).unwrap();
        assert!(r.succeeded());
        assert!(is_all_large(&r.cover));
    }

    #[test]
    fn oversized_periods_are_refused() {
        let primes = [37u64, 41, 43];
        let seqs: Vec<EpSeq> = primes.iter().map(|&q| EpSeq::linear(q, 0)).collect();
        let y = FunFamily::from_sequences(["a", "b", "c"], &seqs).unwrap();
        assert_eq!(build_rothberger_cover(&y).unwrap_err(), RothbergerError::PeriodTooLarge);
    }

    fn is_all_large(c: &EpCover) -> bool {
        crate::covers::is_large(c).large
    }
}
