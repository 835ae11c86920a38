//! Text format for ultragraph specifications.
//!
//! ```text
//! # comment
//! vertices: nat
//! edge e1: 0 -> cofinite{0}
//! edge e2: 3 -> periodic(N=4, p=3, r={0,2}, extra={1})
//! ring: Q x F5
//! ```
//!
//! The header comes first. Edge order is the enumeration order. Semantic
//! problems such as empty ranges are left to [`Ultragraph::validate`].

use std::fmt::Write as _;

use crate::classifier::{FieldDescriptor, RingDescriptor};
use crate::error::SyntaxError;
use crate::setalg::{Universe, UpSet};
use crate::ultragraph::{Edge, Ultragraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub graph: Ultragraph,
    pub ring: RingDescriptor,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skip spaces and tabs, not newlines.
    fn blanks(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some('\n') => "end of line".to_string(),
            Some(_) => {
                let tok: String = self
                    .rest()
                    .chars()
                    .take_while(|c| !c.is_whitespace())
                    .take(16)
                    .collect();
                format!("`{tok}`")
            }
        };
        SyntaxError {
            line: self.line,
            column: self.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.blanks();
        if self.rest().starts_with(token) {
            for _ in token.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> PResult<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{token}`")]))
        }
    }

    /// A keyword must not run into further identifier characters.
    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.blanks();
        let rest = self.rest();
        if rest.starts_with(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            for _ in kw.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> PResult<u64> {
        self.blanks();
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return Err(self.error(&["number"]));
        }
        let value = digits.parse::<u64>().map_err(|_| self.error(&["number below 2^64"]))?;
        for _ in 0..digits.len() {
            self.bump();
        }
        Ok(value)
    }

    fn ident(&mut self) -> PResult<String> {
        self.blanks();
        let id: String = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        if id.is_empty() || id.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.error(&["identifier"]));
        }
        for _ in 0..id.len() {
            self.bump();
        }
        Ok(id)
    }

    /// End of a logical line: optional comment, then newline or end of input.
    fn end_of_line(&mut self) -> PResult<()> {
        self.blanks();
        if self.peek() == Some('#') {
            while !matches!(self.peek(), None | Some('\n')) {
                self.bump();
            }
        }
        match self.peek() {
            None => Ok(()),
            Some('\n') => {
                self.bump();
                Ok(())
            }
            Some(_) => Err(self.error(&["end of line"])),
        }
    }

    fn at_blank_line(&mut self) -> bool {
        self.blanks();
        matches!(self.peek(), None | Some('\n' | '#'))
    }

    fn number_list(&mut self) -> PResult<Vec<u64>> {
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat("}") {
                return Ok(out);
            }
            if !self.eat(",") {
                return Err(self.error(&["`,`", "`}`"]));
            }
        }
    }

    fn upset(&mut self) -> PResult<UpSet> {
        self.blanks();
        if self.peek() == Some('{') {
            return Ok(UpSet::finite(self.number_list()?));
        }
        if self.eat_keyword("cofinite") {
            return Ok(UpSet::cofinite(self.number_list()?));
        }
        if self.eat_keyword("all") {
            return Ok(UpSet::all());
        }
        if self.eat_keyword("empty") {
            return Ok(UpSet::empty());
        }
        if self.eat_keyword("periodic") {
            self.expect("(")?;
            self.expect("N")?;
            self.expect("=")?;
            let threshold = self.number()?;
            self.expect(",")?;
            self.expect("p")?;
            self.expect("=")?;
            let (line, column) = (self.line, self.col);
            let period = self.number()?;
            self.expect(",")?;
            self.expect("r")?;
            self.expect("=")?;
            let residues = self.number_list()?;
            let extra = if self.eat(",") {
                self.expect("extra")?;
                self.expect("=")?;
                self.number_list()?
            } else {
                Vec::new()
            };
            self.expect(")")?;
            return UpSet::periodic(threshold, period, residues.iter().copied(), extra).map_err(|_| SyntaxError {
                line,
                column,
                expected: vec![format!(
                    "period ≥ 1 with residues below it, got p={period} r={residues:?}"
                )],
                found: "invalid periodic literal".into(),
            });
        }
        Err(self.error(&["`{`", "`cofinite`", "`periodic`", "`all`", "`empty`"]))
    }

    fn field(&mut self) -> PResult<FieldDescriptor> {
        if self.eat_keyword("Q") {
            return Ok(FieldDescriptor::Rationals);
        }
        self.blanks();
        let (line, column) = (self.line, self.col);
        if self.rest().starts_with('F') {
            self.bump();
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let p = self.number()?;
                return FieldDescriptor::prime_field(p).map_err(|_| SyntaxError {
                    line,
                    column,
                    expected: vec!["prime field F<p>".into()],
                    found: format!("`F{p}` (not prime)"),
                });
            }
        }
        Err(SyntaxError {
            line,
            column,
            expected: vec!["`Q`".into(), "`F<prime>`".into()],
            found: self.error(&[]).found,
        })
    }
}

/// Parse a set literal such as `periodic(N=4, p=3, r={0,2}, extra={1})`.
pub fn parse_upset(text: &str) -> Result<UpSet, SyntaxError> {
    let mut c = Cursor::new(text);
    let set = c.upset()?;
    c.blanks();
    if c.peek().is_some() {
        return Err(c.error(&["end of input"]));
    }
    Ok(set)
}

pub fn parse(text: &str) -> Result<Spec, SyntaxError> {
    let mut c = Cursor::new(text);
    while c.peek().is_some() && c.at_blank_line() {
        c.end_of_line()?;
    }
    if !c.eat_keyword("vertices") {
        return Err(c.error(&["`vertices`"]));
    }
    c.expect(":")?;
    let universe = if c.eat_keyword("nat") {
        Universe::CountablyInfinite
    } else if c.eat_keyword("finite") {
        c.expect("(")?;
        let m = c.number()?;
        c.expect(")")?;
        Universe::Finite(m)
    } else {
        return Err(c.error(&["`nat`", "`finite`"]));
    };
    c.end_of_line()?;

    let mut edges = Vec::new();
    let mut ring = None;
    while c.peek().is_some() {
        if c.at_blank_line() {
            c.end_of_line()?;
            continue;
        }
        if c.eat_keyword("edge") {
            let id = c.ident()?;
            c.expect(":")?;
            let source = c.number()?;
            c.expect("->")?;
            let range = c.upset()?;
            edges.push(Edge::new(id, source, range));
        } else if ring.is_none() && c.eat_keyword("ring") {
            c.expect(":")?;
            let mut factors = vec![c.field()?];
            while c.eat_keyword("x") {
                factors.push(c.field()?);
            }
            ring = Some(RingDescriptor::new(factors).expect("at least one factor"));
        } else if ring.is_none() {
            return Err(c.error(&["`edge`", "`ring`", "`#`"]));
        } else {
            return Err(c.error(&["`edge`", "`#`"]));
        }
        c.end_of_line()?;
    }
    Ok(Spec {
        graph: Ultragraph::new(universe, edges),
        ring: ring.unwrap_or_default(),
    })
}

pub fn render(spec: &Spec) -> String {
    let mut out = String::new();
    writeln!(out, "vertices: {}", spec.graph.universe).unwrap();
    for e in &spec.graph.edges {
        writeln!(out, "edge {}: {} -> {}", e.id, e.source, e.range).unwrap();
    }
    writeln!(out, "ring: {}", spec.ring).unwrap();
    out
}
