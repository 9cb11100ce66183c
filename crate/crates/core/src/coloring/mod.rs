//! Finite colorings of `W(A)`: builtins, prefix tables, DFAs and products.
//!
//! Colors are `1..=q`. Every oracle is an immutable value, so evaluation is
//! pure and may happen from any number of threads at once.

mod doc;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::word::{Alphabet, Letter};

pub use doc::{load_coloring, save_coloring, ParseError};

pub type Color = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("unknown builtin coloring {0:?}")]
    UnknownName(String),
    #[error("bad parameters for {name}: {message}")]
    BadParams { name: String, message: String },
    #[error("transition table incomplete: state {state} has no move on letter {letter}")]
    IncompleteTable { state: usize, letter: Letter },
    #[error("invalid coloring: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Constant,
    /// `1 + |w| mod q`.
    LengthMod { q: u32 },
    /// `1 + (last letter mod q)`; the empty word gets `empty`.
    LastLetter { q: u32, empty: Color },
    /// `1 + (occurrences of letter) mod q`.
    LetterCountMod { letter: Letter, q: u32 },
}

impl Builtin {
    pub fn q(&self) -> u32 {
        match *self {
            Builtin::Constant => 1,
            Builtin::LengthMod { q } | Builtin::LastLetter { q, .. } | Builtin::LetterCountMod { q, .. } => q,
        }
    }

    fn evaluate(&self, w: &[Letter]) -> Color {
        match *self {
            Builtin::Constant => 1,
            Builtin::LengthMod { q } => 1 + (w.len() % q as usize) as Color,
            Builtin::LastLetter { q, empty } => match w.last() {
                Some(&l) => 1 + l as Color % q,
                None => empty,
            },
            Builtin::LetterCountMod { letter, q } => {
                1 + (w.iter().filter(|&&l| l == letter).count() % q as usize) as Color
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Constant => "constant",
            Builtin::LengthMod { .. } => "length-mod",
            Builtin::LastLetter { .. } => "last-letter",
            Builtin::LetterCountMod { .. } => "letter-count-mod",
        }
    }

    pub fn params(&self) -> Vec<u32> {
        match *self {
            Builtin::Constant => vec![],
            Builtin::LengthMod { q } => vec![q],
            Builtin::LastLetter { q, empty } => vec![q, empty],
            Builtin::LetterCountMod { letter, q } => vec![letter as u32, q],
        }
    }
}

/// The `builtin:name:params...` reference form.
impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "builtin:{}", self.name())?;
        for p in self.params() {
            write!(f, ":{p}")?;
        }
        Ok(())
    }
}

/// Longest-prefix lookup with a default; words longer than `horizon` always
/// get the default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTable {
    pub horizon: usize,
    pub default: Color,
    pub entries: BTreeMap<Vec<Letter>, Color>,
}

impl PrefixTable {
    fn evaluate(&self, w: &[Letter]) -> Color {
        if w.len() > self.horizon {
            return self.default;
        }
        (0..=w.len()).rev().find_map(|i| self.entries.get(&w[..i]).copied()).unwrap_or(self.default)
    }
}

/// A complete DFA over `letters`. Letters outside `letters` leave the state
/// unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub start: usize,
    pub letters: Alphabet,
    /// `delta[state][i]` is the move on `letters[i]`.
    pub delta: Vec<Vec<usize>>,
    pub colors: Vec<Color>,
}

impl Dfa {
    pub fn states(&self) -> usize {
        self.colors.len()
    }

    pub fn run(&self, w: &[Letter]) -> usize {
        let mut s = self.start;
        for &l in w {
            if let Ok(i) = self.letters.letters().binary_search(&l) {
                s = self.delta[s][i];
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringSource {
    Builtin(Builtin),
    Table(PrefixTable),
    Dfa(Dfa),
    Product(Vec<ColoringOracle>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringOracle {
    q: u32,
    alphabet: Option<Alphabet>,
    source: ColoringSource,
}

impl ColoringOracle {
    fn checked(q: u32, alphabet: Option<Alphabet>, source: ColoringSource) -> Result<Self, ColoringError> {
        if q == 0 {
            return Err(ColoringError::Invalid("color count must be positive".into()));
        }
        let in_range = |c: Color| (1..=q).contains(&c);
        match &source {
            ColoringSource::Builtin(b) => {
                if b.q() != q {
                    return Err(ColoringError::Invalid(format!("{b} has {} colors, header says {q}", b.q())));
                }
            }
            ColoringSource::Table(t) => {
                if !in_range(t.default) || t.entries.values().any(|&c| !in_range(c)) {
                    return Err(ColoringError::Invalid("table color out of range".into()));
                }
                if t.entries.keys().any(|k| k.len() > t.horizon) {
                    return Err(ColoringError::Invalid("table entry longer than horizon".into()));
                }
            }
            ColoringSource::Dfa(d) => {
                if d.colors.iter().any(|&c| !in_range(c)) {
                    return Err(ColoringError::Invalid("state color out of range".into()));
                }
            }
            ColoringSource::Product(parts) => {
                let prod = parts.iter().try_fold(1u32, |acc, p| acc.checked_mul(p.q));
                if parts.is_empty() || prod != Some(q) {
                    return Err(ColoringError::Invalid("product color count mismatch".into()));
                }
            }
        }
        Ok(ColoringOracle { q, alphabet, source })
    }

    pub fn builtin(b: Builtin) -> Result<Self, ColoringError> {
        let bad = |m: &str| ColoringError::BadParams { name: b.name().into(), message: m.into() };
        match b {
            Builtin::LengthMod { q } | Builtin::LetterCountMod { q, .. } if q == 0 => return Err(bad("q must be positive")),
            Builtin::LastLetter { q, empty } if q == 0 || empty == 0 || empty > q => {
                return Err(bad("need q >= 1 and 1 <= empty <= q"))
            }
            _ => {}
        }
        Self::checked(b.q(), None, ColoringSource::Builtin(b))
    }

    pub fn constant() -> Self {
        Self::builtin(Builtin::Constant).unwrap()
    }

    pub fn length_mod(q: u32) -> Self {
        Self::builtin(Builtin::LengthMod { q }).unwrap()
    }

    pub fn last_letter(q: u32, empty: Color) -> Self {
        Self::builtin(Builtin::LastLetter { q, empty }).unwrap()
    }

    pub fn letter_count_mod(letter: Letter, q: u32) -> Self {
        Self::builtin(Builtin::LetterCountMod { letter, q }).unwrap()
    }

    pub fn prefix_table(q: u32, alphabet: Alphabet, table: PrefixTable) -> Result<Self, ColoringError> {
        Self::checked(q, Some(alphabet), ColoringSource::Table(table))
    }

    pub fn product(parts: Vec<ColoringOracle>) -> Result<Self, ColoringError> {
        let q = parts.iter().try_fold(1u32, |acc, p| acc.checked_mul(p.q));
        let q = q.ok_or_else(|| ColoringError::Invalid("product has too many colors".into()))?;
        Self::checked(q, None, ColoringSource::Product(parts))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        self.alphabet.as_ref()
    }

    pub fn source(&self) -> &ColoringSource {
        &self.source
    }

    pub fn evaluate(&self, w: &[Letter]) -> Color {
        match &self.source {
            ColoringSource::Builtin(b) => b.evaluate(w),
            ColoringSource::Table(t) => t.evaluate(w),
            ColoringSource::Dfa(d) => d.colors[d.run(w)],
            ColoringSource::Product(parts) => {
                // mixed radix, first component most significant
                parts.iter().fold(0, |acc, p| acc * p.q + (p.evaluate(w) - 1)) + 1
            }
        }
    }

    /// Component colors of a product color; a one-element list otherwise.
    pub fn decode(&self, c: Color) -> Vec<Color> {
        match &self.source {
            ColoringSource::Product(parts) => {
                let mut r = c - 1;
                let mut out = vec![0; parts.len()];
                for (slot, p) in out.iter_mut().zip(parts).rev() {
                    *slot = r % p.q + 1;
                    r /= p.q;
                }
                out
            }
            _ => vec![c],
        }
    }

    /// Whether the oracle was built with full knowledge of every letter in
    /// `alphabet`. Builtins cover everything; a DFA covers its declared letters.
    pub fn covers(&self, alphabet: &Alphabet) -> bool {
        match &self.source {
            ColoringSource::Builtin(_) => true,
            ColoringSource::Table(_) => self.alphabet.as_ref().is_some_and(|a| alphabet.is_subset(a)),
            ColoringSource::Dfa(d) => alphabet.is_subset(&d.letters),
            ColoringSource::Product(parts) => parts.iter().all(|p| p.covers(alphabet)),
        }
    }

    /// Short human label: the builtin reference or the source kind.
    pub fn describe(&self) -> String {
        match &self.source {
            ColoringSource::Builtin(b) => b.to_string(),
            ColoringSource::Table(t) => format!("table(q={}, horizon={}, {} entries)", self.q, t.horizon, t.entries.len()),
            ColoringSource::Dfa(d) => format!("dfa(q={}, {} states)", self.q, d.states()),
            ColoringSource::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("product({})", inner.join(", "))
            }
        }
    }
}

/// Specification of a DFA coloring before completeness checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaSpec {
    pub q: u32,
    pub states: usize,
    pub start: usize,
    pub letters: Alphabet,
    pub transitions: Vec<(usize, Letter, usize)>,
    pub colors: Vec<Option<Color>>,
}

pub fn dfa_coloring(spec: DfaSpec) -> Result<ColoringOracle, ColoringError> {
    let invalid = |m: String| ColoringError::Invalid(m);
    if spec.states == 0 || spec.start >= spec.states {
        return Err(invalid("start state out of range".into()));
    }
    if spec.colors.len() != spec.states {
        return Err(invalid(format!("{} state colors for {} states", spec.colors.len(), spec.states)));
    }
    let p = spec.letters.len();
    let mut delta = vec![vec![None; p]; spec.states];
    for &(from, letter, to) in &spec.transitions {
        if from >= spec.states || to >= spec.states {
            return Err(invalid(format!("transition {from} -> {to} names an unknown state")));
        }
        let i = spec
            .letters
            .letters()
            .binary_search(&letter)
            .map_err(|_| invalid(format!("letter {letter} is not declared")))?;
        if delta[from][i].replace(to).is_some_and(|old| old != to) {
            return Err(invalid(format!("conflicting moves from state {from} on {letter}")));
        }
    }
    let mut full = Vec::with_capacity(spec.states);
    for (state, row) in delta.into_iter().enumerate() {
        let mut out = Vec::with_capacity(p);
        for (i, t) in row.into_iter().enumerate() {
            out.push(t.ok_or(ColoringError::IncompleteTable { state, letter: spec.letters.letters()[i] })?);
        }
        full.push(out);
    }
    let colors = spec
        .colors
        .iter()
        .enumerate()
        .map(|(s, c)| c.ok_or_else(|| invalid(format!("state {s} has no color"))))
        .collect::<Result<Vec<_>, _>>()?;
    let letters = spec.letters.clone();
    ColoringOracle::checked(
        spec.q,
        Some(spec.letters),
        ColoringSource::Dfa(Dfa { start: spec.start, letters, delta: full, colors }),
    )
}

/// `builtin(name, params)` by name.
pub fn builtin(name: &str, params: &[u32]) -> Result<ColoringOracle, ColoringError> {
    let bad = |m: &str| ColoringError::BadParams { name: name.into(), message: m.into() };
    let b = match (name, params) {
        ("constant", []) => Builtin::Constant,
        ("length-mod", [q]) => Builtin::LengthMod { q: *q },
        ("last-letter", [q]) => Builtin::LastLetter { q: *q, empty: 1 },
        ("last-letter", [q, e]) => Builtin::LastLetter { q: *q, empty: *e },
        ("letter-count-mod", [l, q]) => {
            let letter = Letter::try_from(*l).map_err(|_| bad("letter id out of range"))?;
            Builtin::LetterCountMod { letter, q: *q }
        }
        ("constant" | "length-mod" | "last-letter" | "letter-count-mod", _) => {
            return Err(bad(&format!("wrong number of parameters ({})", params.len())))
        }
        _ => return Err(ColoringError::UnknownName(name.into())),
    };
    ColoringOracle::builtin(b)
}

/// Parses `builtin:name[:param...]`.
pub fn parse_builtin_ref(s: &str) -> Result<ColoringOracle, ColoringError> {
    let rest = s.strip_prefix("builtin:").ok_or_else(|| ColoringError::UnknownName(s.into()))?;
    let mut parts = rest.split(':');
    let name = parts.next().unwrap_or_default();
    let params = parts
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| ColoringError::BadParams { name: name.into(), message: format!("bad parameter {p:?}") })
        })
        .collect::<Result<Vec<_>, _>>()?;
    builtin(name, &params)
}
