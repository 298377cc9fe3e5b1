//! Fixed inputs shared by the benchmarks, drawn from recorded seeds so runs
//! are comparable.

use groupable_core::{EpCover, EpSeq, FunFamily, Generator, Slalom};

/// Seed every fixture is drawn from.
pub const SEED: u64 = 0x5eed;

/// `count` arbitrary sequence pairs.
pub fn seq_pairs(count: usize) -> Vec<(EpSeq, EpSeq)> {
    let mut gen = Generator::new(SEED);
    (0..count).map(|_| (gen.epseq(), gen.epseq())).collect()
}

/// `count` increasing sequences, each with a periodic slalom.
pub fn through_pairs(count: usize) -> Vec<(EpSeq, Slalom)> {
    let mut gen = Generator::new(SEED);
    (0..count).map(|_| (gen.increasing_epseq(), gen.slalom())).collect()
}

/// `count` large covers over at most `points` points.
pub fn large_covers(count: usize, points: usize) -> Vec<EpCover> {
    let mut gen = Generator::new(SEED);
    (0..count).map(|_| gen.large_cover(points, 4)).collect()
}

/// `count` families of at most `members` members.
pub fn families(count: usize, members: usize) -> Vec<FunFamily> {
    let mut gen = Generator::new(SEED);
    (0..count).map(|_| gen.family(members)).collect()
}
