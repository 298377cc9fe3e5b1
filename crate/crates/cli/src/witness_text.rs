//! Text form of a groupability witness.
//!
//! ```text
//! indices 5
//! block 0 : 0
//! block 1 : 1 2
//! thresholds:
//!   x 0
//!   y 1
//! ```
//!
//! Blocks are listed in order from 0. A witness file carries finitely many
//! blocks, so checks against it are horizon checks. The optional `indices N`
//! line claims that the listed blocks hold every cover index below `N`;
//! without it the claim is every index up to the largest one listed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use groupable_core::oracle::{check_witness_h, materialize, WitnessCheck};
use groupable_core::{EpCover, GroupabilityWitness, PartitionError};

use crate::syntax::ParseError;

/// A witness as read from text: finitely many blocks and the thresholds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextWitness {
    /// Claimed gap-free range of cover indices.
    pub indices: Option<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub thresholds: BTreeMap<String, usize>,
}

/// Renders the blocks of `w` up to the first one reaching `horizon`, with
/// the range of indices they hold without gaps. Blocks of merged partitions
/// can hold small indices late, so that range may stop short of `horizon`.
pub fn render(w: &GroupabilityWitness, horizon: usize) -> Result<String, PartitionError> {
    let blocks = w.partition.blocks_within(horizon)?;
    let mut listed = vec![false; horizon];
    for &i in blocks.iter().flatten() {
        listed[i] = true;
    }
    let indices = listed.iter().position(|l| !l).unwrap_or(horizon);
    Ok(render_text(&TextWitness { indices: Some(indices), blocks, thresholds: w.thresholds.clone() }))
}

pub fn render_text(w: &TextWitness) -> String {
    let mut out = String::new();
    if let Some(n) = w.indices {
        writeln!(out, "indices {n}").expect("string write");
    }
    for (n, block) in w.blocks.iter().enumerate() {
        let items: Vec<String> = block.iter().map(ToString::to_string).collect();
        writeln!(out, "block {n} : {}", items.join(" ")).expect("string write");
    }
    out.push_str("thresholds:\n");
    for (id, t) in &w.thresholds {
        writeln!(out, "  {id} {t}").expect("string write");
    }
    out
}

pub fn parse(text: &str) -> Result<TextWitness, ParseError> {
    let mut indices = None;
    let mut blocks = Vec::new();
    let mut thresholds = BTreeMap::new();
    let mut in_thresholds = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or_default();
        let words: Vec<(usize, &str)> = words(content);
        let syntax = |k: usize, expected: &str| ParseError::Syntax {
            line,
            column: words.get(k).map_or(content.chars().count() + 1, |w| w.0),
            expected: expected.to_string(),
        };
        let number = |k: usize| -> Result<usize, ParseError> {
            words.get(k).and_then(|w| w.1.parse().ok()).ok_or_else(|| syntax(k, "number"))
        };
        match words.first().map(|w| w.1) {
            None => {}
            Some("thresholds:") if !in_thresholds => {
                if words.len() > 1 {
                    return Err(syntax(1, "end of line"));
                }
                in_thresholds = true;
            }
            Some("indices") if indices.is_none() && blocks.is_empty() && !in_thresholds => {
                indices = Some(number(1)?);
                if words.len() > 2 {
                    return Err(syntax(2, "end of line"));
                }
            }
            Some("block") if !in_thresholds => {
                let n = number(1)?;
                if n != blocks.len() {
                    return Err(ParseError::Invalid { line, message: format!("expected block {}, found block {n}", blocks.len()) });
                }
                if words.get(2).map(|w| w.1) != Some(":") {
                    return Err(syntax(2, "`:`"));
                }
                let block = (3..words.len()).map(number).collect::<Result<Vec<_>, _>>()?;
                blocks.push(block);
            }
            Some(id) if in_thresholds => {
                if words.len() > 2 {
                    return Err(syntax(2, "end of line"));
                }
                let t = number(1)?;
                if thresholds.insert(id.to_string(), t).is_some() {
                    return Err(ParseError::Duplicate { line, name: id.to_string() });
                }
            }
            Some(_) => return Err(syntax(0, if in_thresholds { "point id" } else { "`block` or `thresholds:`" })),
        }
    }
    if !in_thresholds {
        return Err(ParseError::Syntax { line: text.lines().count() + 1, column: 1, expected: "`thresholds:`".into() });
    }
    Ok(TextWitness { indices, blocks, thresholds })
}

fn words(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (i, ch)) in s.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((c, b))) => {
                out.push((c, &s[b..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, b)) = start {
        out.push((c, &s[b..]));
    }
    out
}

/// Outcome of checking a text witness against a cover.
#[derive(Debug, Clone)]
pub struct TextCheck {
    /// Cover indices materialized for the check: every index up to the
    /// largest one listed.
    pub indices: usize,
    /// Indices in the claimed gap-free range listed in no block.
    pub gaps: Vec<usize>,
    /// Point ids with no threshold, and threshold ids not in the cover.
    pub missing: Vec<String>,
    pub unknown: Vec<String>,
    pub check: WitnessCheck,
}

impl TextCheck {
    pub fn passes(&self) -> bool {
        self.gaps.is_empty() && self.missing.is_empty() && self.unknown.is_empty() && self.check.verdict.holds()
    }
}

pub fn check(c: &EpCover, w: &TextWitness) -> TextCheck {
    let indices = w.blocks.iter().flatten().max().map_or(0, |m| m + 1);
    let claimed = w.indices.unwrap_or(indices);
    let mut listed = vec![false; indices.max(claimed)];
    for &i in w.blocks.iter().flatten() {
        listed[i] = true;
    }
    let gaps = (0..claimed).filter(|&i| !listed[i]).collect();
    let ids = c.space().ids();
    let missing = ids.iter().filter(|id| !w.thresholds.contains_key(*id)).cloned().collect();
    let unknown = w.thresholds.keys().filter(|k| !ids.contains(k)).cloned().collect();
    let check = check_witness_h(&materialize(c, indices), ids, &w.blocks, Some(&w.thresholds));
    TextCheck { indices, gaps, missing, unknown, check }
}

#[cfg(test)]
mod tests {
    use super::*;
    use groupable_core::{group_cover, PointSpace};

    fn cover() -> EpCover {
        EpCover::from_ids(PointSpace::new(["x", "y"]).unwrap(), &[], &[&["x"], &["x", "y"]]).unwrap()
    }

    #[test]
    fn round_trip_and_check() {
        let g = group_cover(&cover()).unwrap();
        let text = render(&g.witness, 12).unwrap();
        assert!(text.starts_with("indices 11\nblock 0 : 0\n"));
        let w = parse(&text).unwrap();
        assert_eq!(render_text(&w), text);
        assert!(check(&cover(), &w).passes());
    }

    #[test]
    fn defects_are_reported() {
        let w = parse("block 0 : 0\nblock 1 : 3 2\nthresholds:\n  x 0\n").unwrap();
        let r = check(&cover(), &w);
        assert_eq!(r.gaps, vec![1]);
        assert_eq!(r.missing, vec!["y".to_string()]);
        assert!(!r.passes());

        let w = parse("block 0 : 0 1\nblock 1 : 2\nthresholds:\n  x 0\n  y 1\n").unwrap();
        let r = check(&cover(), &w);
        assert!(!r.check.verdict.holds());
        assert_eq!(r.check.points[1].failure, Some(1));
    }

    #[test]
    fn claimed_range_bounds_gap_detection() {
        let w = parse("indices 2\nblock 0 : 0 1\nblock 1 : 4\nthresholds:\n  x 0\n  y 0\n").unwrap();
        assert!(check(&cover(), &w).gaps.is_empty());
        let w = parse("indices 4\nblock 0 : 0 1\nblock 1 : 4\nthresholds:\n  x 0\n  y 0\n").unwrap();
        assert_eq!(check(&cover(), &w).gaps, vec![2, 3]);
    }

    #[test]
    fn malformed_text() {
        assert!(matches!(parse("block 1 : 0\nthresholds:\n"), Err(ParseError::Invalid { line: 1, .. })));
        assert!(matches!(parse("block 0 0\nthresholds:\n"), Err(ParseError::Syntax { line: 1, column: 9, .. })));
        assert!(matches!(parse("block 0 : 0\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(parse("thresholds:\n  x\n"), Err(ParseError::Syntax { line: 2, column: 4, .. })));
        assert!(matches!(parse("block 0 : 0\nindices 3\nthresholds:\n"), Err(ParseError::Syntax { line: 2, column: 1, .. })));
    }
}
