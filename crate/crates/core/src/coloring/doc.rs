//! Text documents for colorings.
//!
//! ```text
//! # comments and blank lines are ignored
//! [coloring]
//! kind = dfa            # builtin | table | dfa | product
//! q = 2
//! alphabet = 0 1        # required for table and dfa
//!
//! [dfa]
//! states = 2
//! start = 0
//! 0, 1 -> 1             # state, letter -> state
//! 1 -> 2                # state -> color
//! ```
//!
//! A `[builtin]` body has `name = ...` and `params = ...`; a `[table]` body
//! has `horizon`, `default` and rows `word -> color` (`ε` for the empty word);
//! a product lists `[component]` ... `[end-component]` blocks, each holding a
//! complete nested document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{builtin, dfa_coloring, ColoringOracle, ColoringSource, DfaSpec, PrefixTable};
use crate::word::{parse_symbols, render_symbols, Alphabet, Letter, X};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

struct Line<'a> {
    no: usize,
    indent: usize,
    text: &'a str,
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(doc: &'a str) -> Self {
        let mut lines = Vec::new();
        let mut last_line = 0;
        for (i, raw) in doc.lines().enumerate() {
            last_line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let text = body.trim();
            if !text.is_empty() {
                let indent = body.len() - body.trim_start().len();
                lines.push(Line { no: i + 1, indent, text });
            }
        }
        Cursor { lines, pos: 0, last_line }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn eof_error(&self, message: &str) -> ParseError {
        ParseError { line: self.last_line + 1, col: 1, message: message.into() }
    }
}

fn err(line: &Line<'_>, offset: usize, message: impl Into<String>) -> ParseError {
    ParseError { line: line.no, col: line.indent + offset + 1, message: message.into() }
}

fn section_name<'a>(line: &Line<'a>) -> Option<&'a str> {
    line.text.strip_prefix('[').and_then(|t| t.strip_suffix(']')).map(str::trim)
}

/// Reads `key = value` lines up to the next section header.
fn read_fields<'a>(c: &mut Cursor<'a>, allowed: &[&str]) -> Result<BTreeMap<&'a str, (usize, usize, &'a str)>, ParseError> {
    let mut out = BTreeMap::new();
    while let Some(line) = c.peek() {
        if section_name(line).is_some() || !line.text.contains('=') {
            break;
        }
        let line = c.next().unwrap();
        let (k, v) = line.text.split_once('=').unwrap();
        let key = k.trim();
        if !allowed.contains(&key) {
            return Err(err(line, 0, format!("unknown key {key:?}")));
        }
        let voff = k.len() + 1 + (v.len() - v.trim_start().len());
        if out.insert(key, (line.no, line.indent + voff + 1, v.trim())).is_some() {
            return Err(err(line, 0, format!("duplicate key {key:?}")));
        }
    }
    Ok(out)
}

fn field_num<T: std::str::FromStr>(
    fields: &BTreeMap<&str, (usize, usize, &str)>,
    key: &str,
    section: &str,
    header_line: usize,
) -> Result<T, ParseError> {
    let (line, col, v) = fields.get(key).copied().ok_or(ParseError {
        line: header_line,
        col: 1,
        message: format!("[{section}] needs {key}"),
    })?;
    v.parse().map_err(|_| ParseError { line, col, message: format!("bad value for {key}: {v:?}") })
}

fn parse_letters(v: &str, line: usize, col: usize) -> Result<Vec<Letter>, ParseError> {
    v.split_whitespace()
        .map(|t| t.parse::<Letter>().ok().filter(|&l| l != X))
        .collect::<Option<Vec<_>>>()
        .ok_or(ParseError { line, col, message: format!("bad letter list {v:?}") })
}

fn expect_section(c: &mut Cursor<'_>, name: &str) -> Result<usize, ParseError> {
    match c.next() {
        Some(line) if section_name(line) == Some(name) => Ok(line.no),
        Some(line) => Err(err(line, 0, format!("expected [{name}]"))),
        None => Err(c.eof_error(&format!("expected [{name}]"))),
    }
}

fn parse_one(c: &mut Cursor<'_>) -> Result<ColoringOracle, ParseError> {
    let header = expect_section(c, "coloring")?;
    let fields = read_fields(c, &["kind", "q", "alphabet"])?;
    let kind = fields
        .get("kind")
        .map(|f| f.2)
        .ok_or(ParseError { line: header, col: 1, message: "[coloring] needs kind".into() })?;
    let q: u32 = field_num(&fields, "q", "coloring", header)?;
    let alphabet = match fields.get("alphabet") {
        Some(&(line, col, v)) => Some(
            Alphabet::new(parse_letters(v, line, col)?)
                .ok_or(ParseError { line, col, message: "alphabet is empty".into() })?,
        ),
        None => None,
    };
    let semantic = |line: usize, e: super::ColoringError| ParseError { line, col: 1, message: e.to_string() };
    match kind {
        "builtin" => {
            let at = expect_section(c, "builtin")?;
            let f = read_fields(c, &["name", "params"])?;
            let name = f.get("name").map(|x| x.2).ok_or(ParseError {
                line: at,
                col: 1,
                message: "[builtin] needs name".into(),
            })?;
            let params = match f.get("params") {
                Some(&(line, col, v)) => v
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| ParseError { line, col, message: format!("bad params {v:?}") }))
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![],
            };
            let o = builtin(name, &params).map_err(|e| semantic(at, e))?;
            if o.q() != q {
                return Err(ParseError { line: header, col: 1, message: format!("q = {q} but {name} has {} colors", o.q()) });
            }
            Ok(match alphabet {
                Some(a) => ColoringOracle { alphabet: Some(a), ..o },
                None => o,
            })
        }
        "table" => {
            let at = expect_section(c, "table")?;
            let f = read_fields(c, &["horizon", "default"])?;
            let horizon: usize = field_num(&f, "horizon", "table", at)?;
            let default: u32 = field_num(&f, "default", "table", at)?;
            let mut entries = BTreeMap::new();
            while let Some(line) = c.peek() {
                if section_name(line).is_some() {
                    break;
                }
                let line = c.next().unwrap();
                let (w, col) = split_arrow(line)?;
                let syms = parse_symbols(w).map_err(|e| err(line, 0, e.to_string()))?;
                if syms.contains(&X) {
                    return Err(err(line, 0, "table words must be constant"));
                }
                let color: u32 = col.parse().map_err(|_| err(line, line.text.len() - col.len(), "bad color"))?;
                if entries.insert(syms, color).is_some() {
                    return Err(err(line, 0, "duplicate table row"));
                }
            }
            let alphabet = alphabet.ok_or(ParseError { line: header, col: 1, message: "table needs alphabet".into() })?;
            ColoringOracle::prefix_table(q, alphabet, PrefixTable { horizon, default, entries }).map_err(|e| semantic(at, e))
        }
        "dfa" => {
            let at = expect_section(c, "dfa")?;
            let f = read_fields(c, &["states", "start"])?;
            let states: usize = field_num(&f, "states", "dfa", at)?;
            let start: usize = field_num(&f, "start", "dfa", at)?;
            let mut transitions = Vec::new();
            let mut colors = vec![None; states];
            while let Some(line) = c.peek() {
                if section_name(line).is_some() {
                    break;
                }
                let line = c.next().unwrap();
                let (lhs, rhs) = split_arrow(line)?;
                let rhs_col = line.text.len() - rhs.len();
                let target: usize = rhs.parse().map_err(|_| err(line, rhs_col, "expected a number"))?;
                match lhs.split_once(',') {
                    Some((s, l)) => {
                        let s: usize = s.trim().parse().map_err(|_| err(line, 0, "bad state"))?;
                        let l: Letter = l.trim().parse().map_err(|_| err(line, s.to_string().len() + 1, "bad letter"))?;
                        transitions.push((s, l, target));
                    }
                    None => {
                        let s: usize = lhs.trim().parse().map_err(|_| err(line, 0, "bad state"))?;
                        let slot = colors.get_mut(s).ok_or_else(|| err(line, 0, "state out of range"))?;
                        if slot.replace(target as u32).is_some() {
                            return Err(err(line, 0, "state colored twice"));
                        }
                    }
                }
            }
            let letters = alphabet.ok_or(ParseError { line: header, col: 1, message: "dfa needs alphabet".into() })?;
            dfa_coloring(DfaSpec { q, states, start, letters, transitions, colors }).map_err(|e| semantic(at, e))
        }
        "product" => {
            let mut parts = Vec::new();
            while let Some(line) = c.peek() {
                if section_name(line) != Some("component") {
                    break;
                }
                c.next();
                parts.push(parse_one(c)?);
                expect_section(c, "end-component")?;
            }
            let o = ColoringOracle::product(parts).map_err(|e| semantic(header, e))?;
            if o.q() != q {
                return Err(ParseError { line: header, col: 1, message: format!("q = {q} but components give {}", o.q()) });
            }
            Ok(ColoringOracle { alphabet, ..o })
        }
        other => {
            let (line, col, _) = fields["kind"];
            Err(ParseError { line, col, message: format!("unknown kind {other:?}") })
        }
    }
}

fn split_arrow<'a>(line: &Line<'a>) -> Result<(&'a str, &'a str), ParseError> {
    let (l, r) = line
        .text
        .split_once("->")
        .or_else(|| line.text.split_once('→'))
        .ok_or_else(|| err(line, 0, "expected '->'"))?;
    Ok((l.trim(), r.trim()))
}

pub fn load_coloring(doc: &str) -> Result<ColoringOracle, ParseError> {
    let mut c = Cursor::new(doc);
    let o = parse_one(&mut c)?;
    if let Some(line) = c.peek() {
        let msg = match section_name(line) {
            Some(name) => format!("unexpected section [{name}]"),
            None => "unexpected content".to_string(),
        };
        return Err(err(line, 0, msg));
    }
    Ok(o)
}

pub fn save_coloring(o: &ColoringOracle) -> String {
    let mut out = String::new();
    write_one(o, &mut out, 0);
    out
}

fn write_one(o: &ColoringOracle, out: &mut String, depth: usize) {
    let pad = "  ".repeat(depth);
    let kind = match o.source() {
        ColoringSource::Builtin(_) => "builtin",
        ColoringSource::Table(_) => "table",
        ColoringSource::Dfa(_) => "dfa",
        ColoringSource::Product(_) => "product",
    };
    let _ = writeln!(out, "{pad}[coloring]\n{pad}kind = {kind}\n{pad}q = {}", o.q());
    if let Some(a) = o.alphabet() {
        let ls: Vec<String> = a.letters().iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "{pad}alphabet = {}", ls.join(" "));
    }
    match o.source() {
        ColoringSource::Builtin(b) => {
            let ps: Vec<String> = b.params().iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "{pad}[builtin]\n{pad}name = {}", b.name());
            if !ps.is_empty() {
                let _ = writeln!(out, "{pad}params = {}", ps.join(" "));
            }
        }
        ColoringSource::Table(t) => {
            let _ = writeln!(out, "{pad}[table]\n{pad}horizon = {}\n{pad}default = {}", t.horizon, t.default);
            for (w, c) in &t.entries {
                let _ = writeln!(out, "{pad}{} -> {c}", render_symbols(w));
            }
        }
        ColoringSource::Dfa(d) => {
            let _ = writeln!(out, "{pad}[dfa]\n{pad}states = {}\n{pad}start = {}", d.states(), d.start);
            for (s, row) in d.delta.iter().enumerate() {
                for (i, t) in row.iter().enumerate() {
                    let _ = writeln!(out, "{pad}{s}, {} -> {t}", d.letters.letters()[i]);
                }
            }
            for (s, c) in d.colors.iter().enumerate() {
                let _ = writeln!(out, "{pad}{s} -> {c}");
            }
        }
        ColoringSource::Product(parts) => {
            for p in parts {
                let _ = writeln!(out, "{pad}[component]");
                write_one(p, out, depth + 1);
                let _ = writeln!(out, "{pad}[end-component]");
            }
        }
    }
}
