//! Exact algorithms for eventually periodic sequences, sets and countable
//! covers of finite point spaces.
//!
//! * [`sequences`]: eventually periodic sequences and subsets of ℕ, exact
//!   eventual dominance, and the encodings between bounded sequences,
//!   strictly increasing sequences and infinite sets.
//! * [`slalom`]: interval systems, with conversions between bounds, slaloms
//!   and partitions into finite blocks, and the exact "goes through" test.
//! * [`partition`]: partitions of subsets of ℕ into finite blocks, described
//!   by periodic strands so that block meetings are decided exactly.
//! * [`covers`]: largeness, the grouping engine, witness checks and the
//!   transport of witnesses along extensions and surjections.
//! * [`rothberger`]: the cover of a finite family by the sets
//!   `{ a : n ∈ a }`, and the route from its grouping to a slalom and a
//!   dominating bound.
//! * [`oracle`]: horizon-truncated brute-force checks for cross-validation.
//! * [`generate`]: seeded random instances.
//!
//! ```
//! use groupable_core::{le_star, EpSeq};
//!
//! let f = EpSeq::linear(1, 5); // n + 5
//! let g = EpSeq::linear(2, 0); // 2n
//! let v = le_star(&f, &g);
//! assert!(v.holds);
//! assert_eq!(v.threshold, 5u32.into());
//! ```

pub mod covers;
pub mod generate;
pub mod oracle;
pub mod partition;
pub mod rothberger;
pub mod sequences;
pub mod slalom;

pub use covers::{
    absorb_leftovers, equiv_classes, extend_to_superspace, group_cover, is_large, merge_partitions, onestep,
    pullback_cover, push_witness_forward, verify_witness, CoverError, EpCover, EquivClass, GroupabilityWitness, Grouping,
    LargenessReport, OneStep, PointMap, PointSet, PointSpace, RefinementTrace, ThresholdReport,
};
pub use generate::Generator;
pub use oracle::{FinSeq, HorizonStatus, HorizonVerdict, OracleError};
pub use partition::{BlockPartition, MeetProfile, PartitionError, Strand};
pub use sequences::{
    diag_to_increasing, increasing_enum, le_star, range_encode, undiag, DominanceVerdict, EpSeq, EpSet, Nat,
    SeqError, TailKind,
};
pub use rothberger::{
    b_pipeline, build_rothberger_cover, partition_to_slalom_check, witness_to_partition, FunFamily, MemberPartition,
    PipelineReport, RothbergerError, SlalomCheck,
};
pub use slalom::{
    bound_from_slalom, bound_verdict, goes_through, partition_from_slalom, slalom_from_bound, slalom_from_partition,
    Bound, Slalom, SlalomError, ThroughVerdict,
};

