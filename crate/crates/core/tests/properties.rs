use std::collections::BTreeMap;

use groupable_core::oracle::{
    self, check_through_h, check_witness_h, cross_check_large, cross_check_le_star, cross_check_through, exhaustive_groupability,
    greedy_slalom_h, materialize, ExhaustiveOutcome, GreedySlalom, DEFAULT_SEARCH_BUDGET,
};
use groupable_core::{
    b_pipeline, bound_from_slalom, bound_verdict, build_rothberger_cover, diag_to_increasing, extend_to_superspace,
    goes_through, group_cover, increasing_enum, le_star, onestep, partition_from_slalom, pullback_cover,
    push_witness_forward, range_encode, slalom_from_bound, slalom_from_partition, undiag, verify_witness,
    witness_to_partition, BlockPartition, EpSeq, EpSet, FinSeq, Generator, Nat, SeqError, Slalom, TailKind,
};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn small(n: &Nat) -> usize {
    usize::try_from(n).expect("small value")
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn diag_round_trip(seed: u64) {
        let f = Generator::new(seed).epseq();
        match diag_to_increasing(&f) {
            Ok(g) => {
                prop_assert_eq!(f.tail(), TailKind::Values);
                prop_assert!(g.is_strictly_increasing());
                prop_assert_eq!(undiag(&g).unwrap(), f.normalize());
                prop_assert_eq!(diag_to_increasing(&undiag(&g).unwrap()).unwrap(), g);
            }
            Err(e) => {
                prop_assert_eq!(e, SeqError::Unbounded);
                prop_assert_eq!(f.tail(), TailKind::Increments);
            }
        }
    }

    #[test]
    fn range_enum_round_trips(seed: u64) {
        let mut gen = Generator::new(seed);
        let a = gen.infinite_epset();
        prop_assert_eq!(range_encode(&increasing_enum(&a).unwrap()).unwrap(), a);
        let g = gen.increasing_epseq();
        prop_assert_eq!(increasing_enum(&range_encode(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn le_star_matches_oracle(seed: u64) {
        let mut gen = Generator::new(seed);
        let (f, g) = (gen.epseq(), gen.epseq());
        let check = cross_check_le_star(&f, &g, 0);
        prop_assert!(check.agree, "{} vs {}: {}", f, g, check);
        let v = le_star(&f, &g);
        if v.holds && v.threshold > Nat::from(0u32) {
            let t = small(&v.threshold);
            prop_assert!(f.at(t - 1) > g.at(t - 1));
        }
    }

    #[test]
    fn diag_keeps_dominance_up_to_one(seed: u64) {
        // Dominance of bounded sequences survives the diagonal map once the
        // larger side gains one per step; the constant offset from the
        // prefixes can otherwise persist forever.
        let mut gen = Generator::new(seed);
        let f1 = gen.epseq();
        let f2 = gen.epseq();
        prop_assume!(f1.tail() == TailKind::Values && f2.tail() == TailKind::Values);
        let upper = if le_star(&f1, &f2).holds { f2 } else { f1.add(&f2).unwrap() };
        let d1 = diag_to_increasing(&f1).unwrap();
        let d2 = diag_to_increasing(&upper.add(&EpSeq::constant(1)).unwrap()).unwrap();
        prop_assert!(le_star(&d1, &d2).holds);
    }

    #[test]
    fn bound_to_slalom_chain(seed: u64) {
        let (f, g) = Generator::new(seed).dominated_pair();
        let s = slalom_from_bound(&g).unwrap();
        let v = goes_through(&f, &s).unwrap();
        prop_assert!(v.holds);
        let check = cross_check_through(&f, &s, 0).unwrap();
        prop_assert!(check.agree, "{}", check);
    }

    #[test]
    fn slalom_to_bound_chain(seed: u64) {
        let mut gen = Generator::new(seed);
        let s = gen.slalom();
        let candidate = gen.increasing_epseq();
        let f = if goes_through(&candidate, &s).unwrap().holds { candidate } else { s.periodic_boundary().unwrap().clone() };
        prop_assert!(goes_through(&f, &s).unwrap().holds);
        let bound = bound_from_slalom(&s);
        prop_assert!(bound_verdict(&f, &bound).unwrap().holds);
        prop_assert!(le_star(&f, bound.periodic().unwrap()).holds);
    }

    #[test]
    fn slalom_to_partition_chain(seed: u64) {
        let mut gen = Generator::new(seed);
        let s = gen.slalom();
        let f = s.periodic_boundary().unwrap().clone();
        let p = partition_from_slalom(&s);
        let target = range_encode(&f).unwrap();
        let t = p.meet_profile(&target, 2_000).unwrap().threshold();
        prop_assert!(t.is_some());
        let t = t.unwrap();
        for (n, block) in p.blocks_within(2_000).unwrap().iter().enumerate().skip(t) {
            prop_assert!(block.iter().any(|&i| target.contains(i)), "block {} misses", n);
        }
    }

    #[test]
    fn partition_to_slalom_chain(seed: u64) {
        let mut gen = Generator::new(seed);
        let p = gen.partition();
        let s = slalom_from_partition(&p, 0).unwrap();
        let mut n = 0;
        while s.boundary_at(n + 1).unwrap() <= Nat::from(2_000u32) {
            let (lo, hi) = s.interval(n).unwrap();
            let m = s.covering_block(n).unwrap().unwrap();
            let block = p.block(m).unwrap();
            prop_assert!(!block.is_empty());
            prop_assert!(block.iter().all(|&e| Nat::from(e) >= lo && Nat::from(e) < hi));
            n += 1;
        }
        let f = gen.increasing_epseq();
        if p.meet_profile(&range_encode(&f).unwrap(), 0).unwrap().threshold().is_some() {
            prop_assert!(goes_through(&f, &s).unwrap().holds);
        }
    }

    #[test]
    fn goes_through_matches_oracle(seed: u64) {
        let mut gen = Generator::new(seed);
        let s = gen.slalom();
        let f = gen.increasing_epseq();
        let check = cross_check_through(&f, &s, 0).unwrap();
        prop_assert!(check.agree, "{}", check);
    }

    #[test]
    fn is_large_matches_oracle(seed: u64) {
        let c = Generator::new(seed).cover(5);
        prop_assert!(cross_check_large(&c).agree);
    }

    #[test]
    fn grouping_engine(seed: u64) {
        let c = Generator::new(seed).large_cover(5, 4);
        let g = group_cover(&c).unwrap();
        let steps = &g.trace.steps;
        prop_assert!(steps.len() <= c.space().len() + 2);
        for w in steps.windows(2) {
            prop_assert!(w[1].b.is_subset(&w[0].b) && w[1].b != w[0].b);
            prop_assert!(w[1].x.is_subset(w[0].x));
        }
        for w in steps.windows(3) {
            prop_assert!(w[1].x != w[0].x || w[2].x != w[1].x);
        }
        let report = verify_witness(&c, &g.witness, 0).unwrap();
        prop_assert!(report.exact && report.passes());
        let n = 256;
        let blocks = g.witness.partition.blocks_within(n).unwrap();
        let check = check_witness_h(&materialize(&c, n), c.space().ids(), &blocks, Some(&g.witness.thresholds));
        prop_assert!(check.verdict.holds() && check.bad_index.is_none());
    }

    #[test]
    fn onestep_leaves_nothing_uncovered(seed: u64) {
        // Over a finite space every point of a large cover lies in an
        // infinite trace class, so nothing is left for the residual indices.
        let mut gen = Generator::new(seed);
        let c = gen.large_cover(5, 4);
        let sub = groupable_core::PointSet::from_indices((0..c.space().len()).filter(|_| gen.below(2) == 0));
        let s = onestep(&c, sub, &EpSet::all()).unwrap();
        prop_assert!(sub.is_subset(s.v));
        prop_assert!(s.residual.is_disjoint(&s.a));
        prop_assert!(!s.residual.is_infinite());
        prop_assert!(sub.is_empty() || !s.a.is_empty());
    }

    #[test]
    fn merge_transports_thresholds(seed: u64) {
        let mut gen = Generator::new(seed);
        let c = gen.large_cover(4, 4);
        let m = 1 + gen.below(4) as usize;
        let parts: Vec<BlockPartition> = (0..m)
            .map(|r| {
                let class = EpSet::residue_class(m, r);
                if gen.below(2) == 0 {
                    BlockPartition::enumerate(&class).unwrap()
                } else {
                    let halves = [class.intersection(&EpSet::residue_class(2 * m, r)), class.intersection(&EpSet::residue_class(2 * m, r + m))];
                    BlockPartition::diagonal(&halves).unwrap()
                }
            })
            .collect();
        let merged = groupable_core::merge_partitions(&parts).unwrap();
        merged.validate_exact().unwrap();
        prop_assert_eq!(merged.domain(), &EpSet::all());
        for x in 0..c.space().len() {
            let target = c.indices_containing(x);
            let merged_t = merged.meet_profile(&target, 0).unwrap().threshold();
            for (i, part) in parts.iter().enumerate() {
                if let Some(t) = part.meet_profile(&target.intersection(part.domain()), 0).unwrap().threshold() {
                    prop_assert!(merged_t.is_some_and(|h| h <= i.max(t)));
                }
            }
        }
    }

    #[test]
    fn extension_transport(seed: u64) {
        let mut gen = Generator::new(seed);
        let c = gen.large_cover(4, 4);
        let extra = gen.fresh_points(c.space(), 3);
        let wide = extend_to_superspace(&c, &extra).unwrap();
        let g = group_cover(&wide).unwrap();
        let restricted = g.witness.restrict(c.space().ids());
        let report = verify_witness(&c, &restricted, 0).unwrap();
        prop_assert!(report.passes());
        for p in &report.points {
            prop_assert_eq!(p.claimed, Some(g.witness.thresholds[&p.id]));
        }
    }

    #[test]
    fn pullback_transport(seed: u64) {
        let mut gen = Generator::new(seed);
        let f = gen.point_map(5);
        let c = gen.large_cover_over(f.to_space());
        let pulled = pullback_cover(&f, &c).unwrap();
        prop_assert!(groupable_core::is_large(&pulled).large);
        let g = group_cover(&pulled).unwrap();
        let pushed = push_witness_forward(&f, &g.witness).unwrap();
        prop_assert!(verify_witness(&c, &pushed, 0).unwrap().passes());
    }

    #[test]
    fn greedy_oracle_slalom_is_gone_through(seed: u64) {
        let family = Generator::new(seed).family(6);
        let ys: Vec<FinSeq> = family.enumerations().unwrap().iter().map(|(_, f)| FinSeq::of(f, 300)).collect();
        let GreedySlalom::Boundaries(g) = greedy_slalom_h(&ys, &Nat::from(0u32)).unwrap() else {
            return Err(TestCaseError::fail("no boundary"));
        };
        for y in &ys {
            let v = check_through_h(y, &g).unwrap();
            prop_assert!(v.holds() && v.threshold == 0);
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn tiny_covers_agree_with_exhaustive_search(seed: u64) {
        let c = Generator::new(seed).large_cover(3, 3);
        let g = group_cover(&c).unwrap();
        let blocks = g.witness.partition.blocks_within(48).unwrap();
        let check = check_witness_h(&materialize(&c, 48), c.space().ids(), &blocks, Some(&g.witness.thresholds));
        prop_assert!(check.verdict.holds());
        let n = (c.preperiod() + 2 * c.period()).clamp(8, 12);
        let out = exhaustive_groupability(&materialize(&c, n), c.space().full(), n, DEFAULT_SEARCH_BUDGET).unwrap();
        let found = matches!(out, ExhaustiveOutcome::Witness { .. });
        prop_assert!(found);
    }

    #[test]
    fn rothberger_pipeline(seed: u64) {
        let y = Generator::new(seed).family(10);
        let cover = build_rothberger_cover(&y).unwrap();
        prop_assert!(groupable_core::is_large(&cover).large);
        let report = b_pipeline(&y, 0).unwrap();
        prop_assert!(report.succeeded());

        let mp = witness_to_partition(&y, &report.grouping.witness, 0).unwrap();
        let blocks = mp.partition.blocks_within(500).unwrap();
        for (label, member) in y.labels().iter().zip(y.members()) {
            let t = mp.thresholds[label];
            let misses: Vec<usize> = (0..blocks.len()).filter(|&n| !blocks[n].iter().any(|&i| member.contains(i))).collect();
            prop_assert!(misses.len() <= t && misses.iter().all(|&n| n < t));
        }

        let ys: Vec<FinSeq> = y.enumerations().unwrap().iter().map(|(_, f)| FinSeq::of(f, 200)).collect();
        let GreedySlalom::Boundaries(direct) = greedy_slalom_h(&ys, &Nat::from(0u32)).unwrap() else {
            return Err(TestCaseError::fail("no boundary"));
        };
        let top = ys.iter().map(|f| f.values().last().unwrap().clone()).min().unwrap() + 1u32;
        let routed = FinSeq::increasing(report.slalom.boundary_up_to(&top).unwrap()).unwrap();
        for (f, (label, v)) in ys.iter().zip(&report.through) {
            prop_assert!(check_through_h(f, &direct).unwrap().holds());
            let routed_check = check_through_h(f, &routed).unwrap();
            prop_assert!(routed_check.holds() && routed_check.threshold <= v.threshold, "{}", label);
        }
    }
}

#[test]
fn witness_thresholds_are_exact_minima() {
    let mut gen = Generator::new(99);
    for _ in 0..50 {
        let c = gen.large_cover(4, 4);
        let g = group_cover(&c).unwrap();
        let report = verify_witness(&c, &g.witness, 0).unwrap();
        let minima: BTreeMap<String, usize> = report.points.iter().map(|p| (p.id.clone(), p.minimal.unwrap())).collect();
        assert_eq!(minima, g.witness.thresholds);
        assert!(oracle::agreement_horizon(0, 1) > 0);
    }
}

#[test]
fn iterated_boundary_values() {
    let s = slalom_from_bound(&EpSeq::linear(3, 1)).unwrap();
    let direct = Slalom::new(EpSeq::linear(1, 0)).unwrap();
    assert_eq!(s.boundary_at(0).unwrap(), Nat::from(1u32));
    assert_eq!(s.boundary_at(1).unwrap(), Nat::from(5u32));
    assert_eq!(direct.boundary_at(7).unwrap(), Nat::from(7u32));
}
