//! Letters, constant words, variable words and their algebra.
//!
//! Letters are small integer ids. The variable `x` is the reserved symbol
//! [`X`], which lies outside the letter-id space, so a symbol sequence can hold
//! both letters and the variable without an enum tag.

mod ladder;
mod seq;
mod text;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use ladder::{Alphabet, AlphabetLadder, LadderError, TailRule};
pub use seq::{SeqError, VarSeq};
pub use text::{parse_symbols, render_symbols, ParseWordError};

/// A letter id.
pub type Letter = u16;

/// A symbol: a letter id or the variable [`X`].
pub type Sym = u16;

/// The variable symbol `x`.
pub const X: Sym = u16::MAX;

/// Largest usable letter id.
pub const MAX_LETTER: Letter = X - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("constant word contains the variable x at position {0}")]
    ContainsVariable(usize),
    #[error("variable word contains no occurrence of x")]
    NoVariable,
}

/// A constant word over the letter ids. The empty word is valid.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        match letters.iter().position(|&l| l == X) {
            Some(i) => Err(WordError::ContainsVariable(i)),
            None => Ok(Word(letters)),
        }
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

/// A word over letters and `x` with at least one occurrence of `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableWord(Vec<Sym>);

impl VariableWord {
    pub fn new(symbols: Vec<Sym>) -> Result<Self, WordError> {
        if symbols.contains(&X) {
            Ok(VariableWord(symbols))
        } else {
            Err(WordError::NoVariable)
        }
    }

    /// The one-symbol word `x`.
    pub fn var() -> Self {
        VariableWord(vec![X])
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with [`Word`].
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_left_variable(&self) -> bool {
        self.0[0] == X
    }

    pub fn var_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == X).count()
    }

    /// Replaces every `x` by `a`.
    pub fn substitute(&self, a: Letter) -> Word {
        debug_assert!(a != X);
        Word(self.0.iter().map(|&s| if s == X { a } else { s }).collect())
    }

    /// Appends `self(a)` to `out`.
    pub fn substitute_into(&self, a: Letter, out: &mut Vec<Letter>) {
        out.extend(self.0.iter().map(|&s| if s == X { a } else { s }));
    }

    /// Appends `self(b)` where `b` may itself be [`X`].
    pub fn substitute_sym_into(&self, b: Sym, out: &mut Vec<Sym>) {
        out.extend(self.0.iter().map(|&s| if s == X { b } else { s }));
    }

    fn first_var(&self) -> usize {
        self.0.iter().position(|&s| s == X).expect("variable word holds x")
    }

    /// The maximal constant prefix `s*`.
    pub fn star(&self) -> &[Letter] {
        &self.0[..self.first_var()]
    }

    /// The maximal left-variable suffix `s**`.
    pub fn double_star(&self) -> VariableWord {
        VariableWord(self.0[self.first_var()..].to_vec())
    }

    /// Splits into `(s*, s**)`; their concatenation is `self`.
    pub fn split_star(&self) -> (Word, VariableWord) {
        let i = self.first_var();
        (Word(self.0[..i].to_vec()), VariableWord(self.0[i..].to_vec()))
    }

    pub fn concat(&self, other: &VariableWord) -> VariableWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        VariableWord(v)
    }

    pub fn prepend_word(&self, prefix: &Word) -> VariableWord {
        let mut v = prefix.0.clone();
        v.extend_from_slice(&self.0);
        VariableWord(v)
    }

    pub fn append_word(&self, suffix: &[Letter]) -> VariableWord {
        let mut v = self.0.clone();
        v.extend_from_slice(suffix);
        VariableWord(v)
    }
}

/// Either a constant word or a variable word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnyWord {
    Const(Word),
    Var(VariableWord),
}

impl AnyWord {
    /// Classifies a raw symbol sequence.
    pub fn from_symbols(symbols: Vec<Sym>) -> AnyWord {
        if symbols.contains(&X) {
            AnyWord::Var(VariableWord(symbols))
        } else {
            AnyWord::Const(Word(symbols))
        }
    }

    pub fn symbols(&self) -> &[Sym] {
        match self {
            AnyWord::Const(w) => &w.0,
            AnyWord::Var(v) => &v.0,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols().len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols().is_empty()
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, AnyWord::Var(_))
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            AnyWord::Const(w) => Some(w),
            AnyWord::Var(_) => None,
        }
    }

    pub fn as_variable(&self) -> Option<&VariableWord> {
        match self {
            AnyWord::Var(v) => Some(v),
            AnyWord::Const(_) => None,
        }
    }

    /// Sequence concatenation; the result is variable iff either side is.
    pub fn concat(&self, other: &AnyWord) -> AnyWord {
        let mut v = self.symbols().to_vec();
        v.extend_from_slice(other.symbols());
        AnyWord::from_symbols(v)
    }
}

impl From<Word> for AnyWord {
    fn from(w: Word) -> Self {
        AnyWord::Const(w)
    }
}

impl From<VariableWord> for AnyWord {
    fn from(v: VariableWord) -> Self {
        AnyWord::Var(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_symbols(&self.0))
    }
}

impl fmt::Display for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_symbols(&self.0))
    }
}

impl fmt::Display for AnyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_symbols(self.symbols()))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl fmt::Debug for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableWord({self})")
    }
}

impl fmt::Debug for AnyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error(transparent)]
    Syntax(#[from] ParseWordError),
    #[error(transparent)]
    Shape(#[from] WordError),
}

impl FromStr for Word {
    type Err = WordParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Word::new(parse_symbols(s)?)?)
    }
}

impl FromStr for VariableWord {
    type Err = WordParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(VariableWord::new(parse_symbols(s)?)?)
    }
}

impl FromStr for AnyWord {
    type Err = WordParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(AnyWord::from_symbols(parse_symbols(s)?))
    }
}

/// Builds the constant word `w_0(a_0) w_1(a_1) ... w_n(a_n)`.
pub fn product(words: &[VariableWord], letters: &[Letter]) -> Word {
    debug_assert_eq!(words.len(), letters.len());
    let mut out = Vec::new();
    for (w, &a) in words.iter().zip(letters) {
        w.substitute_into(a, &mut out);
    }
    Word(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vw(s: &str) -> VariableWord {
        s.parse().unwrap()
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(vw("x").substitute(0).to_string(), "0");
        assert_eq!(vw("0x1x").substitute(2).to_string(), "0212");
    }

    #[test]
    fn substitution_is_injective_on_short_words() {
        // every variable word of length <= 4 over {0,1}
        for len in 1..=4u32 {
            for code in 0..3u32.pow(len) {
                let mut c = code;
                let syms: Vec<Sym> = (0..len)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        if d == 2 {
                            X
                        } else {
                            d as Sym
                        }
                    })
                    .collect();
                let Ok(v) = VariableWord::new(syms) else { continue };
                assert_ne!(v.substitute(0), v.substitute(1), "{v}");
            }
        }
    }

    #[test]
    fn concat_examples() {
        let e = AnyWord::Const(Word::empty());
        let w: AnyWord = "01".parse().unwrap();
        assert_eq!(e.concat(&w), w);
        let z: AnyWord = "0".parse().unwrap();
        let v: AnyWord = "x1".parse().unwrap();
        let c = z.concat(&v);
        assert!(c.is_variable());
        assert_eq!(c.to_string(), "0x1");
    }

    #[test]
    fn split_star_examples() {
        let (a, b) = vw("x01").split_star();
        assert!(a.is_empty());
        assert_eq!(b.to_string(), "x01");
        let (a, b) = vw("0x1x").split_star();
        assert_eq!(a.to_string(), "0");
        assert_eq!(b.to_string(), "x1x");
        assert!(b.is_left_variable());
    }

    #[test]
    fn split_star_round_trip_exhaustive() {
        for len in 1..=5u32 {
            for code in 0..3u32.pow(len) {
                let mut c = code;
                let syms: Vec<Sym> = (0..len)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        if d == 2 {
                            X
                        } else {
                            d as Sym
                        }
                    })
                    .collect();
                let Ok(v) = VariableWord::new(syms) else { continue };
                let (a, b) = v.split_star();
                assert_eq!(b.prepend_word(&a), v);
                assert!(b.is_left_variable());
                assert!(!a.letters().contains(&X));
            }
        }
    }

    #[test]
    fn constructors_reject_bad_shapes() {
        assert_eq!(VariableWord::new(vec![0, 1]), Err(WordError::NoVariable));
        assert_eq!(Word::new(vec![0, X]), Err(WordError::ContainsVariable(1)));
        assert!("01".parse::<VariableWord>().is_err());
    }
}
