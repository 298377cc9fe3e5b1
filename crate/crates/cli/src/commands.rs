//! Subcommand bodies. Each returns a [`Report`]; input problems are errors.

use std::path::Path;

use anyhow::{bail, Context, Result};
use groupable_core::oracle::{
    check_through_h, check_witness_h, cross_check_large, cross_check_le_star, cross_check_through, exhaustive_groupability,
    greedy_slalom_h, materialize, ExhaustiveOutcome, GreedySlalom, DEFAULT_SEARCH_BUDGET,
};
use groupable_core::{
    b_pipeline, bound_from_slalom, diag_to_increasing, goes_through, group_cover, increasing_enum, is_large,
    le_star, partition_from_slalom, range_encode, slalom_from_bound, slalom_from_partition, undiag, verify_witness, Bound,
    EpCover, FinSeq, Generator, Nat, PointSet, PointSpace, Slalom,
};

use crate::syntax::{self, Def, Definition, Instance, Render};
use crate::witness_text;
use crate::{CheckKind, ConvertKind, Emit, GenKind, OracleCheck};

/// Text for stdout and whether every mathematical check passed.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub text: String,
    pub ok: bool,
}

impl Report {
    fn new() -> Self {
        Self { text: String::new(), ok: true }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn fail(&mut self) {
        self.ok = false;
    }
}

pub fn load(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    syntax::parse(&text).with_context(|| format!("{}", path.display()))
}

fn join(values: &[Nat]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn set_text(space: &PointSpace, set: PointSet) -> String {
    format!("{{{}}}", space.names(set).join(" "))
}

fn block_lines(r: &mut Report, blocks: &[Vec<usize>]) {
    for (n, b) in blocks.iter().enumerate() {
        let items: Vec<String> = b.iter().map(ToString::to_string).collect();
        r.line(format!("block {n} : {}", items.join(" ")));
    }
}

fn def_line(name: String, def: Def) -> String {
    Render(&Definition { name, line: 0, def }).to_string()
}

fn boundary_line(r: &mut Report, s: &Slalom, horizon: usize) -> Result<()> {
    let values = s.boundary_up_to(&Nat::from(horizon))?;
    r.line(format!("boundary up to {horizon}: {}", join(&values)));
    Ok(())
}

fn bound_lines(r: &mut Report, name: &str, bound: &Bound, horizon: usize) -> Result<()> {
    match bound.periodic() {
        Some(h) => r.line(def_line(format!("bound-{name}"), Def::Seq(h.clone()))),
        None => r.line(format!("bound up to {horizon}: {}", join(&bound.values_up_to(&Nat::from(horizon))?))),
    }
    Ok(())
}

fn arity(args: &[String], names: &[&str], what: &str) -> Result<()> {
    if args.len() != names.len() {
        bail!("{what} takes {} argument(s): {}", names.len(), names.join(" "));
    }
    Ok(())
}

pub fn convert(inst: &Instance, kind: ConvertKind, name: &str, horizon: usize) -> Result<Report> {
    let mut r = Report::new();
    match kind {
        ConvertKind::Diag => {
            let f = diag_to_increasing(inst.seq(name)?).with_context(|| format!("diag of {name}"))?;
            r.line(def_line(format!("diag-{name}"), Def::Seq(f)));
        }
        ConvertKind::Undiag => {
            let f = undiag(inst.seq(name)?).with_context(|| format!("undiag of {name}"))?;
            r.line(def_line(format!("undiag-{name}"), Def::Seq(f)));
        }
        ConvertKind::Range => {
            let a = range_encode(inst.seq(name)?).with_context(|| format!("range of {name}"))?;
            r.line(def_line(format!("range-{name}"), Def::Set(a)));
        }
        ConvertKind::Enum => {
            let f = increasing_enum(inst.set(name)?).with_context(|| format!("enumeration of {name}"))?;
            r.line(def_line(format!("enum-{name}"), Def::Seq(f)));
        }
        ConvertKind::BoundToSlalom => {
            let s = slalom_from_bound(inst.seq(name)?).with_context(|| format!("slalom from {name}"))?;
            boundary_line(&mut r, &s, horizon)?;
        }
        ConvertKind::SlalomToBound => {
            let s = Slalom::new(inst.seq(name)?.clone()).with_context(|| format!("slalom with boundary {name}"))?;
            bound_lines(&mut r, name, &bound_from_slalom(&s), horizon)?;
        }
        ConvertKind::SlalomToPartition => {
            let s = Slalom::new(inst.seq(name)?.clone()).with_context(|| format!("slalom with boundary {name}"))?;
            block_lines(&mut r, &partition_from_slalom(&s).blocks_within(horizon)?);
        }
        ConvertKind::PartitionToSlalom => {
            let s = slalom_from_partition(&inst.partition(name)?, horizon).with_context(|| format!("slalom from {name}"))?;
            boundary_line(&mut r, &s, horizon)?;
        }
    }
    Ok(r)
}

pub fn check(inst: &Instance, kind: CheckKind, args: &[String]) -> Result<Report> {
    let mut r = Report::new();
    match kind {
        CheckKind::LeStar => {
            arity(args, &["F", "G"], "check le-star")?;
            let v = le_star(inst.seq(&args[0])?, inst.seq(&args[1])?);
            if v.holds {
                r.line(format!("le-star {} {}: holds, threshold {}", args[0], args[1], v.threshold));
            } else {
                r.line(format!("le-star {} {}: fails; {}", args[0], args[1], v.witness_note));
                r.fail();
            }
        }
        CheckKind::Through => {
            arity(args, &["F", "G"], "check through")?;
            let s = Slalom::new(inst.seq(&args[1])?.clone()).with_context(|| format!("slalom with boundary {}", args[1]))?;
            let v = goes_through(inst.seq(&args[0])?, &s).with_context(|| format!("{} through {}", args[0], args[1]))?;
            if v.holds {
                r.line(format!("through {} {}: holds, threshold {}", args[0], args[1], v.threshold));
            } else {
                r.line(format!("through {} {}: fails; {}", args[0], args[1], v.miss_note));
                r.fail();
            }
        }
        CheckKind::Large => {
            arity(args, &["U"], "check large")?;
            let report = is_large(inst.cover(&args[0])?);
            r.line(format!("large {}: {}", args[0], if report.large { "holds" } else { "fails" }));
            for p in &report.points {
                match p.multiplicity {
                    _ if p.large => r.line(format!("  {} infinitely many members", p.id)),
                    Some(m) => r.line(format!("  {} finite multiplicity {m}", p.id)),
                    None => r.line(format!("  {} finite multiplicity", p.id)),
                }
            }
            if !report.large {
                r.fail();
            }
        }
    }
    Ok(r)
}

pub fn group(inst: &Instance, name: &str, horizon: usize) -> Result<Report> {
    let c = inst.cover(name)?;
    let mut r = Report::new();
    let report = is_large(c);
    if !report.large {
        r.line(format!("group {name}: not large; finite multiplicity: {}", report.finite_multiplicity_points().join(" ")));
        r.fail();
        return Ok(r);
    }
    let g = group_cover(c).with_context(|| format!("grouping {name}"))?;
    r.line(format!("# group {name}: {} steps", g.trace.step_count()));
    for (i, s) in g.trace.steps.iter().enumerate() {
        r.line(format!(
            "# step {i}: points {}, classes {}, indices in infinite classes {}, covered {}",
            set_text(c.space(), s.x),
            s.class_count,
            s.a,
            set_text(c.space(), s.v)
        ));
    }
    r.text.push_str(&witness_text::render(&g.witness, horizon)?);
    Ok(r)
}

pub fn verify(inst: &Instance, name: &str, witness: &Path) -> Result<Report> {
    let c = inst.cover(name)?;
    let text = std::fs::read_to_string(witness).with_context(|| format!("cannot read {}", witness.display()))?;
    let w = witness_text::parse(&text).with_context(|| format!("{}", witness.display()))?;
    let result = witness_text::check(c, &w);
    let mut r = Report::new();
    r.line(format!("verify {name}: {} over indices 0..{}", result.check.verdict, result.indices));
    for p in &result.check.points {
        let claimed = w.thresholds.get(&p.id).map_or("none".to_string(), ToString::to_string);
        let failure = p.failure.map(|b| format!(", block {b} misses it")).unwrap_or_default();
        r.line(format!("  {} claimed {claimed}, minimal {}{failure}", p.id, p.minimal));
    }
    if let Some(i) = result.check.bad_index {
        r.line(format!("index {i} is listed twice"));
    }
    for i in &result.gaps {
        r.line(format!("gap: index {i} is in no block"));
    }
    for id in &result.missing {
        r.line(format!("missing threshold: {id}"));
    }
    for id in &result.unknown {
        r.line(format!("unknown point: {id}"));
    }
    let pass = result.passes();
    r.line(format!("result: {}", if pass { "pass" } else { "fail" }));
    if !pass {
        r.fail();
    }
    Ok(r)
}

pub fn pipeline(inst: &Instance, family: Option<&str>, emit: Emit, horizon: usize) -> Result<Report> {
    let y = inst.family(family)?;
    let report = b_pipeline(&y, horizon).context("pipeline")?;
    let mut r = Report::new();
    let all = emit == Emit::All;
    if all {
        r.line(format!("pipeline over {} members: {}", y.len(), y.labels().join(" ")));
        r.line(def_line("O".into(), Def::Cover(report.cover.clone())));
        r.line(format!("grouping: {} steps", report.grouping.trace.step_count()));
    }
    if all || emit == Emit::Witness {
        if all {
            r.line("witness:");
        }
        r.text.push_str(&witness_text::render(&report.grouping.witness, horizon)?);
    }
    if all || emit == Emit::Partition {
        r.line("partition:");
        block_lines(&mut r, &report.partition.partition.blocks_within(horizon)?);
        r.line("member thresholds:");
        for (label, t) in &report.partition.thresholds {
            r.line(format!("  {label} {t}"));
        }
    }
    if all || emit == Emit::Slalom {
        r.line("slalom:");
        boundary_line(&mut r, &report.slalom, horizon)?;
        for (label, v) in &report.through {
            let verdict = if v.holds { format!("holds, threshold {}", v.threshold) } else { format!("fails; {}", v.miss_note) };
            r.line(format!("  {label} goes through: {verdict}"));
        }
    }
    if all || emit == Emit::Bound {
        r.line("bound:");
        bound_lines(&mut r, "pipeline", &report.bound, horizon)?;
        for (label, v) in &report.dominance {
            let verdict = if v.holds { format!("holds, threshold {}", v.threshold) } else { format!("fails; {}", v.witness_note) };
            r.line(format!("  {label} le-star bound: {verdict}"));
        }
    }
    let ok = report.succeeded();
    if all || !ok {
        r.line(format!("result: {}", if ok { "success" } else { "failure" }));
    }
    if !ok {
        r.fail();
    }
    Ok(r)
}

/// Tallies one oracle check; keeps the first disagreement for the report.
struct Tally {
    name: &'static str,
    count: usize,
    disagreements: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, count: 0, disagreements: 0, first: None }
    }

    fn record(&mut self, i: usize, outcome: Result<(), String>) {
        self.count += 1;
        if let Err(detail) = outcome {
            self.disagreements += 1;
            self.first.get_or_insert(format!("instance {i}: {detail}"));
        }
    }

    fn report(&self, r: &mut Report) {
        r.line(format!("{}: {} instances, {} disagreements", self.name, self.count, self.disagreements));
        if let Some(first) = &self.first {
            r.line(format!("  first: {first}"));
            r.fail();
        }
    }
}

fn agree(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

pub fn oracle(which: OracleCheck, seed: u64, count: usize, horizon: usize) -> Result<Report> {
    let mut r = Report::new();
    r.line(format!("oracle seed {seed}, count {count}, horizon {horizon}"));
    let checks: Vec<OracleCheck> = match which {
        OracleCheck::All => vec![
            OracleCheck::LeStar,
            OracleCheck::Through,
            OracleCheck::Large,
            OracleCheck::Witness,
            OracleCheck::Greedy,
            OracleCheck::Exhaustive,
        ],
        one => vec![one],
    };
    for check in checks {
        let mut gen = Generator::new(seed);
        let tally = match check {
            OracleCheck::LeStar => {
                let mut t = Tally::new("le-star");
                for i in 0..count {
                    let (f, g) = (gen.epseq(), gen.epseq());
                    let c = cross_check_le_star(&f, &g, horizon);
                    t.record(i, agree(c.agree, || format!("{f} vs {g}: {c}")));
                }
                t
            }
            OracleCheck::Through => {
                let mut t = Tally::new("through");
                for i in 0..count {
                    let (s, f) = (gen.slalom(), gen.increasing_epseq());
                    let outcome = match cross_check_through(&f, &s, horizon) {
                        Ok(c) => agree(c.agree, || format!("{f}: {c}")),
                        Err(e) => Err(format!("{f}: {e}")),
                    };
                    t.record(i, outcome);
                }
                t
            }
            OracleCheck::Large => {
                let mut t = Tally::new("large");
                for i in 0..count {
                    let c = gen.cover(5);
                    let x = cross_check_large(&c);
                    t.record(i, agree(x.agree, || format!("cover {c}: {x}")));
                }
                t
            }
            OracleCheck::Witness => {
                let mut t = Tally::new("witness");
                for i in 0..count {
                    let c = gen.large_cover(5, 4);
                    t.record(i, witness_instance(&c, horizon));
                }
                t
            }
            OracleCheck::Greedy => {
                let mut t = Tally::new("greedy");
                for i in 0..count {
                    let y = gen.family(10);
                    t.record(i, greedy_instance(&y, horizon));
                }
                t
            }
            OracleCheck::Exhaustive => {
                let mut t = Tally::new("exhaustive");
                for i in 0..count {
                    let c = gen.large_cover(3, 3);
                    t.record(i, exhaustive_instance(&c));
                }
                t
            }
            OracleCheck::All => unreachable!("expanded above"),
        };
        tally.report(&mut r);
    }
    Ok(r)
}

/// `group_cover` witness re-checked over its blocks up to `horizon`.
pub fn witness_instance(c: &EpCover, horizon: usize) -> Result<(), String> {
    let g = group_cover(c).map_err(|e| format!("cover {c}: {e}"))?;
    let exact = verify_witness(c, &g.witness, 0).map_err(|e| e.to_string())?;
    if !exact.passes() {
        return Err(format!("cover {c}: exact verification fails"));
    }
    let blocks = g.witness.partition.blocks_within(horizon).map_err(|e| e.to_string())?;
    let n = blocks.iter().flatten().max().map_or(0, |m| m + 1);
    let check = check_witness_h(&materialize(c, n), c.space().ids(), &blocks, Some(&g.witness.thresholds));
    let minimal_match = check.points.iter().all(|p| p.minimal <= g.witness.thresholds[&p.id]);
    agree(check.verdict.holds() && check.bad_index.is_none() && minimal_match, || format!("cover {c}: {}", check.verdict))
}

/// Pipeline verdicts against the greedy horizon slalom of the family.
pub fn greedy_instance(y: &groupable_core::FunFamily, horizon: usize) -> Result<(), String> {
    let labels = y.labels().join(" ");
    let report = b_pipeline(y, horizon).map_err(|e| format!("family {labels}: {e}"))?;
    if !report.succeeded() {
        return Err(format!("family {labels}: pipeline fails"));
    }
    let ys: Vec<FinSeq> = y.enumerations().map_err(|e| e.to_string())?.iter().map(|(_, f)| FinSeq::of(f, horizon)).collect();
    let GreedySlalom::Boundaries(direct) = greedy_slalom_h(&ys, &Nat::from(0u32)).map_err(|e| e.to_string())? else {
        return Err(format!("family {labels}: greedy search is unsatisfiable at the horizon"));
    };
    let top = ys.iter().map(|f| f.values().last().expect("positive horizon").clone()).min().expect("nonempty family") + 1u32;
    let routed = FinSeq::increasing(report.slalom.boundary_up_to(&top).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    for ((label, f), (_, exact)) in y.labels().iter().zip(&ys).zip(&report.through) {
        let direct_check = check_through_h(f, &direct).map_err(|e| e.to_string())?;
        let routed_check = check_through_h(f, &routed).map_err(|e| e.to_string())?;
        if !direct_check.holds() {
            return Err(format!("member {label}: greedy slalom {direct_check}"));
        }
        if !routed_check.holds() || routed_check.threshold > exact.threshold {
            return Err(format!("member {label}: pipeline slalom {routed_check}, exact threshold {}", exact.threshold));
        }
    }
    Ok(())
}

/// Exhaustive search on a tiny cover, alongside `group_cover`.
pub fn exhaustive_instance(c: &EpCover) -> Result<(), String> {
    let g = group_cover(c).map_err(|e| format!("cover {c}: {e}"))?;
    if !verify_witness(c, &g.witness, 0).map_err(|e| e.to_string())?.passes() {
        return Err(format!("cover {c}: group_cover witness fails"));
    }
    let n = (c.preperiod() + 2 * c.period()).clamp(8, 12);
    match exhaustive_groupability(&materialize(c, n), c.space().full(), n, DEFAULT_SEARCH_BUDGET) {
        Ok(ExhaustiveOutcome::Witness { .. }) => Ok(()),
        Ok(ExhaustiveOutcome::UnsatAtHorizon) => Err(format!("cover {c}: no witness over {n} indices")),
        Err(e) => Err(format!("cover {c}: {e}")),
    }
}

pub fn generate(kind: GenKind, seed: u64, count: usize, points: usize, members: usize) -> Result<Report> {
    if !(1..=groupable_core::covers::MAX_POINTS).contains(&points) {
        bail!("--points must be between 1 and {}", groupable_core::covers::MAX_POINTS);
    }
    if members == 0 {
        bail!("--members must be positive");
    }
    let mut gen = Generator::new(seed);
    let mut r = Report::new();
    r.line(format!("# gen {} seed {seed}", kind.name()));
    for i in 0..count {
        match kind {
            GenKind::Epseq => r.line(def_line(format!("f{i}"), Def::Seq(gen.epseq()))),
            GenKind::Increasing => r.line(def_line(format!("f{i}"), Def::Seq(gen.increasing_epseq()))),
            GenKind::Epset => r.line(def_line(format!("e{i}"), Def::Set(gen.epset()))),
            GenKind::Cover => r.line(def_line(format!("U{i}"), Def::Cover(gen.large_cover(points, 4)))),
            GenKind::Family => {
                let y = gen.family(members);
                let names: Vec<String> = (0..y.len()).map(|j| format!("y{i}_{j}")).collect();
                for (name, m) in names.iter().zip(y.members()) {
                    r.line(def_line(name.clone(), Def::Set(m.clone())));
                }
                r.line(def_line(format!("Y{i}"), Def::Family(names)));
            }
            GenKind::Partition => {
                let (base, shift) = gen.translated_base();
                r.line(def_line(format!("P{i}"), Def::Partition { base, shift }));
            }
        }
    }
    Ok(r)
}
