//! Seeded random instances.
//!
//! All generators draw from a ChaCha8 stream, so a seed reproduces the same
//! instances on every platform. Sizes stay within prefixes of at most 6
//! entries, cycles of at most 4 entries and raw values of at most 50.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::covers::{EpCover, PointMap, PointSet, PointSpace};
use crate::partition::BlockPartition;
use crate::rothberger::FunFamily;
use crate::sequences::{le_star, range_encode, EpSeq, EpSet, Nat, TailKind};
use crate::slalom::Slalom;

pub const MAX_PREFIX: usize = 6;
pub const MAX_CYCLE: usize = 4;
pub const MAX_VALUE: u64 = 50;

/// Deterministic instance source.
#[derive(Debug, Clone)]
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn prefix_len(&mut self) -> usize {
        self.rng.gen_range(0..=MAX_PREFIX)
    }

    fn cycle_len(&mut self) -> usize {
        self.rng.gen_range(1..=MAX_CYCLE)
    }

    fn values(&mut self, len: usize, lo: u64) -> Vec<u64> {
        (0..len).map(|_| self.rng.gen_range(lo..=MAX_VALUE)).collect()
    }

    /// Any eventually periodic sequence, normalized.
    pub fn epseq(&mut self) -> EpSeq {
        let (k, p) = (self.prefix_len(), self.cycle_len());
        let tail = if self.rng.gen_bool(0.5) { TailKind::Values } else { TailKind::Increments };
        let prefix = self.values(k, 0);
        let cycle = self.values(p, 0);
        EpSeq::from_u64(&prefix, tail, &cycle).expect("nonempty cycle").normalize()
    }

    /// A strictly increasing sequence: positive steps, an increments tail.
    pub fn increasing_epseq(&mut self) -> EpSeq {
        let (k, p) = (self.prefix_len(), self.cycle_len());
        let mut v = self.rng.gen_range(0..=MAX_VALUE);
        let mut prefix = Vec::with_capacity(k);
        for i in 0..k {
            if i > 0 {
                v += self.rng.gen_range(1..=MAX_VALUE);
            }
            prefix.push(v);
        }
        let cycle = self.values(p, 1);
        EpSeq::from_u64(&prefix, TailKind::Increments, &cycle).expect("nonempty cycle").normalize()
    }

    /// Strictly increasing `f, g` with `f ≤* g`.
    pub fn dominated_pair(&mut self) -> (EpSeq, EpSeq) {
        let f = self.increasing_epseq();
        let g = self.increasing_epseq();
        if le_star(&f, &g).holds && self.rng.gen_bool(0.5) {
            return (f, g);
        }
        let sum = f.add(&g).expect("sum of increments tails");
        (f, sum)
    }

    /// Any eventually periodic subset of ℕ.
    pub fn epset(&mut self) -> EpSet {
        let (k, p) = (self.prefix_len(), self.cycle_len());
        let prefix = (0..k).map(|_| self.rng.gen_bool(0.5)).collect();
        let cycle = (0..p).map(|_| self.rng.gen_bool(0.5)).collect();
        EpSet::new(prefix, cycle).expect("nonempty cycle")
    }

    /// An infinite eventually periodic subset of ℕ.
    pub fn infinite_epset(&mut self) -> EpSet {
        let (k, p) = (self.prefix_len(), self.cycle_len());
        let prefix = (0..k).map(|_| self.rng.gen_bool(0.5)).collect();
        let mut cycle: Vec<bool> = (0..p).map(|_| self.rng.gen_bool(0.5)).collect();
        let i = self.rng.gen_range(0..p);
        cycle[i] = true;
        EpSet::new(prefix, cycle).expect("nonempty cycle")
    }

    /// Slalom with a periodic boundary.
    pub fn slalom(&mut self) -> Slalom {
        Slalom::new(self.increasing_epseq()).expect("increasing boundary")
    }

    fn space(&mut self, prefix: &str, size: usize) -> PointSpace {
        PointSpace::new((0..size).map(|i| format!("{prefix}{i}"))).expect("small distinct ids")
    }

    fn traces(&mut self, points: usize, len: usize) -> Vec<PointSet> {
        (0..len).map(|_| PointSet::from_indices((0..points).filter(|_| self.rng.gen_bool(0.5)))).collect()
    }

    /// Any cover over `1..=max_points` points.
    pub fn cover(&mut self, max_points: usize) -> EpCover {
        let size = self.rng.gen_range(1..=max_points);
        let (k, p) = (self.prefix_len(), self.cycle_len());
        self.cover_shaped(size, k, p, false)
    }

    /// A large cover over `1..=max_points` points with cycle at most `max_cycle`.
    pub fn large_cover(&mut self, max_points: usize, max_cycle: usize) -> EpCover {
        let size = self.rng.gen_range(1..=max_points);
        let k = self.prefix_len();
        let p = self.rng.gen_range(1..=max_cycle.clamp(1, MAX_CYCLE));
        self.cover_shaped(size, k, p, true)
    }

    fn cover_shaped(&mut self, size: usize, k: usize, p: usize, large: bool) -> EpCover {
        let space = self.space("x", size);
        let prefix = self.traces(size, k);
        let mut cycle = self.traces(size, p);
        if large {
            for x in 0..size {
                let i = self.rng.gen_range(0..p);
                cycle[i] = cycle[i].union(PointSet::singleton(x));
            }
        }
        EpCover::new(space, prefix, cycle).expect("traces within the space")
    }

    /// A family of `1..=max_members` infinite eventually periodic sets.
    pub fn family(&mut self, max_members: usize) -> FunFamily {
        let n = self.rng.gen_range(1..=max_members);
        let members: Vec<EpSet> = (0..n).map(|_| self.infinite_epset()).collect();
        FunFamily::new((0..n).map(|i| format!("y{i}")), members).expect("infinite members")
    }

    /// A certified partition of ℕ into finite nonempty blocks, of one of
    /// three shapes: translated, diagonal over residue classes, or merged
    /// enumerations of residue classes.
    pub fn partition(&mut self) -> BlockPartition {
        match self.rng.gen_range(0..3) {
            0 => {
                let (base, shift) = self.translated_base();
                BlockPartition::translated(&base, shift).expect("base blocks partition 0..shift")
            }
            shape => {
                let m = self.rng.gen_range(1..=MAX_CYCLE);
                let classes: Vec<EpSet> = (0..m).map(|r| EpSet::residue_class(m, r)).collect();
                if shape == 1 {
                    BlockPartition::diagonal(&classes).expect("infinite classes")
                } else {
                    let parts: Vec<BlockPartition> =
                        classes.iter().map(|c| BlockPartition::enumerate(c).expect("infinite class")).collect();
                    BlockPartition::merge(&parts).expect("disjoint classes")
                }
            }
        }
    }

    /// Nonempty base blocks partitioning `0..shift`, for
    /// [`BlockPartition::translated`].
    pub fn translated_base(&mut self) -> (Vec<Vec<usize>>, usize) {
        let shift = self.rng.gen_range(1..=MAX_PREFIX);
        let count = self.rng.gen_range(1..=shift);
        let mut owner: Vec<usize> = (0..shift).map(|i| if i < count { i } else { self.rng.gen_range(0..count) }).collect();
        owner.shuffle(&mut self.rng);
        let base = (0..count).map(|b| (0..shift).filter(|&e| owner[e] == b).collect()).collect();
        (base, shift)
    }

    /// A surjection from a space of `1..=max_from` points onto a space of
    /// at most as many points.
    pub fn point_map(&mut self, max_from: usize) -> PointMap {
        let a = self.rng.gen_range(1..=max_from);
        let b = self.rng.gen_range(1..=a);
        let from = self.space("a", a);
        let to = self.space("b", b);
        let mut image: Vec<usize> = (0..a).map(|i| if i < b { i } else { self.rng.gen_range(0..b) }).collect();
        image.shuffle(&mut self.rng);
        let pairs: Vec<(String, String)> =
            image.iter().enumerate().map(|(x, &y)| (from.ids()[x].clone(), to.ids()[y].clone())).collect();
        PointMap::new(from, to, &pairs).expect("total map")
    }

    /// A large cover over the target space of `f`.
    pub fn large_cover_over(&mut self, space: &PointSpace) -> EpCover {
        let size = space.len();
        let (k, p) = (self.prefix_len(), self.cycle_len());
        let generated = self.cover_shaped(size, k, p, true);
        EpCover::new(space.clone(), generated.prefix().to_vec(), generated.cycle().to_vec()).expect("same size")
    }

    /// Fresh point ids not in `space`.
    pub fn fresh_points(&mut self, space: &PointSpace, max: usize) -> Vec<String> {
        let n = self.rng.gen_range(0..=max);
        (0..).map(|i| format!("z{i}")).filter(|id| space.index_of(id).is_err()).take(n).collect()
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.gen_range(0..bound)
    }

    pub fn nat(&mut self) -> Nat {
        Nat::from(self.rng.gen_range(0..=MAX_VALUE))
    }
}

/// Range of a random strictly increasing sequence.
pub fn random_range(gen: &mut Generator) -> EpSet {
    range_encode(&gen.increasing_epseq()).expect("increasing")
}
