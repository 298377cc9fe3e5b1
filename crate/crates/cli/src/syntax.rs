//! The line-oriented instance language.
//!
//! ```text
//! # comment
//! epseq f = prefix 1 2 ; inc-cycle 3
//! epseq g = prefix 0 ; val-cycle 4 5
//! epset e = prefix ; cycle 1 0
//! cover U over {x y} = prefix {x y} ; cycle {x} {y}
//! family Y = e
//! partition P = translate 2 : {0 1}
//! check le-star f g
//! ```
//!
//! Tokens are separated by whitespace. A point set is written `{a b}`, with
//! the braces attached to the first and last id (`{}` for the empty set).
//! At most one line may be a directive: a subcommand and its arguments,
//! executed by `groupable run`.

use std::fmt;

use groupable_core::{BlockPartition, EpCover, EpSeq, EpSet, FunFamily, Nat, PointSet, PointSpace, TailKind};
use thiserror::Error;

/// Subcommands accepted on a directive line.
pub const DIRECTIVES: &[&str] = &["convert", "check", "group", "verify", "pipeline", "oracle", "gen"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("{}unknown name {name:?}", at(*.line))]
    UnknownName { line: Option<usize>, name: String },
    #[error("line {line}: {name:?} is already defined")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{name:?} is {found}, expected {expected}")]
    WrongKind { name: String, found: &'static str, expected: &'static str },
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// A named object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Def {
    Seq(EpSeq),
    Set(EpSet),
    Cover(EpCover),
    /// Names of previously defined sets.
    Family(Vec<String>),
    /// Blocks `base[i] + k·shift`, numbered `i + k·base.len()`.
    Partition { base: Vec<Vec<usize>>, shift: usize },
}

impl Def {
    pub fn kind(&self) -> &'static str {
        match self {
            Def::Seq(_) => "an epseq",
            Def::Set(_) => "an epset",
            Def::Cover(_) => "a cover",
            Def::Family(_) => "a family",
            Def::Partition { .. } => "a partition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub line: usize,
    pub def: Def,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub line: usize,
    pub tokens: Vec<String>,
}

/// A parsed instance file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub defs: Vec<Definition>,
    pub directive: Option<Directive>,
}

impl Instance {
    pub fn get(&self, name: &str) -> Result<&Def, ParseError> {
        self.defs
            .iter()
            .find(|d| d.name == name)
            .map(|d| &d.def)
            .ok_or_else(|| ParseError::UnknownName { line: None, name: name.to_string() })
    }

    pub fn seq(&self, name: &str) -> Result<&EpSeq, ParseError> {
        match self.get(name)? {
            Def::Seq(s) => Ok(s),
            other => Err(wrong(name, other, "an epseq")),
        }
    }

    pub fn set(&self, name: &str) -> Result<&EpSet, ParseError> {
        match self.get(name)? {
            Def::Set(s) => Ok(s),
            other => Err(wrong(name, other, "an epset")),
        }
    }

    pub fn cover(&self, name: &str) -> Result<&EpCover, ParseError> {
        match self.get(name)? {
            Def::Cover(c) => Ok(c),
            other => Err(wrong(name, other, "a cover")),
        }
    }

    pub fn partition(&self, name: &str) -> Result<BlockPartition, ParseError> {
        match self.get(name)? {
            Def::Partition { base, shift } => Ok(BlockPartition::translated(base, *shift).expect("checked when parsed")),
            other => Err(wrong(name, other, "a partition")),
        }
    }

    /// The named family, or — without a name — the single family of the
    /// file, or else every epset of the file in order.
    pub fn family(&self, name: Option<&str>) -> Result<FunFamily, FamilyError> {
        let labels: Vec<String> = match name {
            Some(n) => match self.get(n)? {
                Def::Family(labels) => labels.clone(),
                other => return Err(wrong(n, other, "a family").into()),
            },
            None => {
                let families: Vec<&Vec<String>> = self
                    .defs
                    .iter()
                    .filter_map(|d| match &d.def {
                        Def::Family(l) => Some(l),
                        _ => None,
                    })
                    .collect();
                match families.as_slice() {
                    [one] => (*one).clone(),
                    _ => self.defs.iter().filter(|d| matches!(d.def, Def::Set(_))).map(|d| d.name.clone()).collect(),
                }
            }
        };
        let members = labels.iter().map(|l| self.set(l).cloned()).collect::<Result<Vec<_>, _>>()?;
        Ok(FunFamily::new(labels, members)?)
    }
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Family(#[from] groupable_core::RothbergerError),
}

fn wrong(name: &str, found: &Def, expected: &'static str) -> ParseError {
    ParseError::WrongKind { name: name.to_string(), found: found.kind(), expected }
}

struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((c, s))) => {
                out.push(Token { column: c, text: &line[s..i] });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, s)) = start {
        out.push(Token { column: c, text: &line[s..] });
    }
    if let Some(i) = out.iter().position(|t| t.text.starts_with('#')) {
        out.truncate(i);
    }
    out
}

struct Cursor<'a> {
    line: usize,
    end_column: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, expected: impl Into<String>) -> ParseError {
        let column = self.tokens.get(self.pos).map_or(self.end_column, |t| t.column);
        ParseError::Syntax { line: self.line, column, expected: expected.into() }
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text)
    }

    fn next(&mut self, expected: &str) -> Result<&'a str, ParseError> {
        let t = self.peek().ok_or_else(|| self.error(expected))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.peek() == Some(word) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("`{word}`")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if is_name(t) => {
                self.pos += 1;
                Ok(t.to_string())
            }
            _ => Err(self.error("name")),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            Err(self.error("end of line"))
        } else {
            Ok(())
        }
    }

    /// Numbers up to (not including) `stop` or the end of the line.
    fn numbers(&mut self, stop: Option<&str>) -> Result<Vec<Nat>, ParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if Some(t) == stop {
                break;
            }
            if !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(self.error(match stop {
                    Some(s) => format!("number or `{s}`"),
                    None => "number".to_string(),
                }));
            }
            out.push(t.parse().expect("decimal digits"));
            self.pos += 1;
        }
        Ok(out)
    }

    fn bits(&mut self, stop: Option<&str>) -> Result<Vec<bool>, ParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if Some(t) == stop {
                break;
            }
            match t {
                "0" => out.push(false),
                "1" => out.push(true),
                _ => {
                    return Err(self.error(match stop {
                        Some(s) => format!("`0`, `1` or `{s}`"),
                        None => "`0` or `1`".to_string(),
                    }))
                }
            }
            self.pos += 1;
        }
        Ok(out)
    }

    /// `{a b c}` as a list of raw items.
    fn braced(&mut self) -> Result<Vec<&'a str>, ParseError> {
        let first = self.peek().ok_or_else(|| self.error("`{`"))?;
        let Some(mut piece) = first.strip_prefix('{') else {
            return Err(self.error("`{`"));
        };
        let mut items = Vec::new();
        loop {
            let (item, closed) = match piece.strip_suffix('}') {
                Some(inner) => (inner, true),
                None => (piece, false),
            };
            if !item.is_empty() {
                if !is_item(item) {
                    return Err(self.error("id or `}`"));
                }
                items.push(item);
            }
            self.pos += 1;
            if closed {
                return Ok(items);
            }
            piece = self.peek().ok_or_else(|| self.error("`}`"))?;
        }
    }

    fn sets_until(&mut self, stop: Option<&str>) -> Result<Vec<Vec<&'a str>>, ParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if Some(t) == stop {
                break;
            }
            out.push(self.braced()?);
        }
        Ok(out)
    }
}

fn is_name(t: &str) -> bool {
    let mut chars = t.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn is_item(t: &str) -> bool {
    t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// Parses an instance file.
pub fn parse(text: &str) -> Result<Instance, ParseError> {
    let mut inst = Instance::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor { line, end_column: raw.chars().count() + 1, tokens, pos: 0 };
        let head = cur.next("definition")?;
        if DIRECTIVES.contains(&head) {
            if inst.directive.is_some() {
                return Err(ParseError::Invalid { line, message: "only one directive line is allowed".into() });
            }
            let tokens = cur.tokens.iter().map(|t| t.text.to_string()).collect();
            inst.directive = Some(Directive { line, tokens });
            continue;
        }
        let name = cur.name()?;
        if inst.defs.iter().any(|d| d.name == name) {
            return Err(ParseError::Duplicate { line, name });
        }
        let def = match head {
            "epseq" => parse_epseq(&mut cur)?,
            "epset" => parse_epset(&mut cur)?,
            "cover" => parse_cover(&mut cur)?,
            "family" => parse_family(&mut cur, &inst)?,
            "partition" => parse_partition(&mut cur)?,
            _ => {
                cur.pos = 0;
                return Err(cur.error("`epseq`, `epset`, `cover`, `family`, `partition` or a directive"));
            }
        };
        cur.end()?;
        inst.defs.push(Definition { name, line, def });
    }
    Ok(inst)
}

fn parse_epseq(cur: &mut Cursor<'_>) -> Result<Def, ParseError> {
    cur.keyword("=")?;
    cur.keyword("prefix")?;
    let prefix = cur.numbers(Some(";"))?;
    cur.keyword(";")?;
    let tail = match cur.peek() {
        Some("inc-cycle") => TailKind::Increments,
        Some("val-cycle") => TailKind::Values,
        _ => return Err(cur.error("`inc-cycle` or `val-cycle`")),
    };
    cur.pos += 1;
    let cycle = cur.numbers(None)?;
    if cycle.is_empty() {
        return Err(cur.error("number"));
    }
    Ok(Def::Seq(EpSeq::new(prefix, tail, cycle).expect("nonempty cycle")))
}

fn parse_epset(cur: &mut Cursor<'_>) -> Result<Def, ParseError> {
    cur.keyword("=")?;
    cur.keyword("prefix")?;
    let prefix = cur.bits(Some(";"))?;
    cur.keyword(";")?;
    cur.keyword("cycle")?;
    let cycle = cur.bits(None)?;
    if cycle.is_empty() {
        return Err(cur.error("`0` or `1`"));
    }
    Ok(Def::Set(EpSet::new(prefix, cycle).expect("nonempty cycle")))
}

fn parse_cover(cur: &mut Cursor<'_>) -> Result<Def, ParseError> {
    let line = cur.line;
    cur.keyword("over")?;
    let ids = cur.braced()?;
    let space = PointSpace::new(ids.iter().copied()).map_err(|e| ParseError::Invalid { line, message: e.to_string() })?;
    cur.keyword("=")?;
    cur.keyword("prefix")?;
    let prefix = cur.sets_until(Some(";"))?;
    cur.keyword(";")?;
    cur.keyword("cycle")?;
    let cycle = cur.sets_until(None)?;
    if cycle.is_empty() {
        return Err(cur.error("`{`"));
    }
    let resolve = |sets: Vec<Vec<&str>>| -> Result<Vec<PointSet>, ParseError> {
        sets.iter()
            .map(|s| {
                let unknown = s.iter().find(|id| space.index_of(id).is_err());
                match unknown {
                    Some(id) => Err(ParseError::UnknownName { line: Some(line), name: id.to_string() }),
                    None => Ok(space.set_of(s).expect("ids checked")),
                }
            })
            .collect()
    };
    let (prefix, cycle) = (resolve(prefix)?, resolve(cycle)?);
    Ok(Def::Cover(EpCover::new(space, prefix, cycle).expect("traces within the space")))
}

fn parse_family(cur: &mut Cursor<'_>, inst: &Instance) -> Result<Def, ParseError> {
    cur.keyword("=")?;
    let mut names = Vec::new();
    while cur.peek().is_some() {
        let name = cur.name()?;
        match inst.get(&name) {
            Ok(Def::Set(_)) => names.push(name),
            Ok(other) => return Err(ParseError::Invalid { line: cur.line, message: wrong(&name, other, "an epset").to_string() }),
            Err(_) => return Err(ParseError::UnknownName { line: Some(cur.line), name }),
        }
    }
    if names.is_empty() {
        return Err(cur.error("name"));
    }
    Ok(Def::Family(names))
}

fn parse_partition(cur: &mut Cursor<'_>) -> Result<Def, ParseError> {
    cur.keyword("=")?;
    cur.keyword("translate")?;
    let shift_col = cur.pos;
    let shift = cur.numbers(Some(":"))?;
    let [shift] = shift.as_slice() else {
        cur.pos = shift_col;
        return Err(cur.error("one number"));
    };
    cur.keyword(":")?;
    let sets = cur.sets_until(None)?;
    let line = cur.line;
    let invalid = |message: String| ParseError::Invalid { line, message };
    let shift: usize = shift.try_into().map_err(|_| invalid("shift is too large".into()))?;
    let mut base = Vec::with_capacity(sets.len());
    let mut seen = vec![false; shift];
    for set in sets {
        let mut block = Vec::with_capacity(set.len());
        for item in set {
            let e: usize = item.parse().map_err(|_| invalid(format!("{item:?} is not an index")))?;
            if e >= shift || std::mem::replace(&mut seen[e], true) {
                return Err(invalid(format!("base blocks must partition 0..{shift}; {e} is out of range or repeated")));
            }
            block.push(e);
        }
        block.sort_unstable();
        base.push(block);
    }
    if shift == 0 || seen.iter().any(|s| !s) || base.iter().any(Vec::is_empty) {
        return Err(invalid(format!("base blocks must be nonempty and partition 0..{shift}")));
    }
    Ok(Def::Partition { base, shift })
}

/// Canonical one-line form of a definition.
pub struct Render<'a>(pub &'a Definition);

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Definition { name, def, .. } = self.0;
        match def {
            Def::Seq(s) => write!(f, "epseq {name} = {s}"),
            Def::Set(s) => write!(f, "epset {name} = {s}"),
            Def::Cover(c) => write!(f, "cover {name} {c}"),
            Def::Family(names) => write!(f, "family {name} = {}", names.join(" ")),
            Def::Partition { base, shift } => {
                write!(f, "partition {name} = translate {shift} :")?;
                for b in base {
                    let items: Vec<String> = b.iter().map(ToString::to_string).collect();
                    write!(f, " {{{}}}", items.join(" "))?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical text of a whole instance.
pub fn render(inst: &Instance) -> String {
    let mut out = String::new();
    for d in &inst.defs {
        out.push_str(&Render(d).to_string());
        out.push('\n');
    }
    if let Some(dir) = &inst.directive {
        out.push_str(&dir.tokens.join(" "));
        out.push('\n');
    }
    out
}
