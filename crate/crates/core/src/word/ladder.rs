//! Increasing alphabet ladders `A_0 ⊆ A_1 ⊆ ...`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Letter, MAX_LETTER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LadderError {
    #[error("ladder has no levels")]
    NoLevels,
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("level {0} is not contained in level {1}")]
    NotIncreasing(usize, usize),
    #[error("letter id {0} out of range")]
    LetterOutOfRange(u32),
    #[error("arithmetic tail step must be positive")]
    ZeroStep,
    #[error("bad ladder syntax {0:?}: {1}")]
    Syntax(String, String),
}

/// A finite non-empty set of letters, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(Vec<Letter>);

impl Alphabet {
    pub fn new(mut letters: Vec<Letter>) -> Option<Self> {
        letters.sort_unstable();
        letters.dedup();
        if letters.is_empty() || letters.iter().any(|&l| l > MAX_LETTER) {
            None
        } else {
            Some(Alphabet(letters))
        }
    }

    /// `{0, 1, ..., p-1}`.
    pub fn range(p: usize) -> Self {
        assert!(p >= 1 && p <= MAX_LETTER as usize + 1, "alphabet size out of range");
        Alphabet((0..p as Letter).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, a: Letter) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn is_subset(&self, other: &Alphabet) -> bool {
        self.0.iter().all(|&a| other.contains(a))
    }

    pub fn max_letter(&self) -> Letter {
        *self.0.last().expect("non-empty")
    }

    fn is_prefix_range(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &l)| l as usize == i)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// How `A_n` is defined beyond the explicit levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailRule {
    /// `A_n` equals the last explicit level.
    Constant,
    /// Each further level adds `step` fresh letters above the current maximum.
    Arithmetic { step: u16 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlphabetLadder {
    levels: Vec<Alphabet>,
    tail: TailRule,
}

impl AlphabetLadder {
    pub fn new(levels: Vec<Alphabet>, tail: TailRule) -> Result<Self, LadderError> {
        if levels.is_empty() {
            return Err(LadderError::NoLevels);
        }
        for i in 1..levels.len() {
            if !levels[i - 1].is_subset(&levels[i]) {
                return Err(LadderError::NotIncreasing(i - 1, i));
            }
        }
        if let TailRule::Arithmetic { step: 0 } = tail {
            return Err(LadderError::ZeroStep);
        }
        Ok(AlphabetLadder { levels, tail })
    }

    /// `A_n = {0, ..., p-1}` for every `n`.
    pub fn constant(p: usize) -> Self {
        AlphabetLadder { levels: vec![Alphabet::range(p)], tail: TailRule::Constant }
    }

    /// Explicit levels `{0..p_i-1}` followed by the given tail rule.
    pub fn from_sizes(sizes: &[usize], tail: TailRule) -> Result<Self, LadderError> {
        let mut levels = Vec::with_capacity(sizes.len());
        for (i, &p) in sizes.iter().enumerate() {
            if p == 0 {
                return Err(LadderError::EmptyLevel(i));
            }
            if p > MAX_LETTER as usize + 1 {
                return Err(LadderError::LetterOutOfRange(p as u32));
            }
            levels.push(Alphabet::range(p));
        }
        Self::new(levels, tail)
    }

    pub fn explicit_levels(&self) -> &[Alphabet] {
        &self.levels
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// `A_n`.
    pub fn level(&self, n: usize) -> Alphabet {
        let last = self.levels.len() - 1;
        if n <= last {
            return self.levels[n].clone();
        }
        match self.tail {
            TailRule::Constant => self.levels[last].clone(),
            TailRule::Arithmetic { step } => {
                let base = &self.levels[last];
                let extra = (n - last).saturating_mul(step as usize);
                let top = base.max_letter() as usize;
                let hi = (top + extra).min(MAX_LETTER as usize);
                let mut letters = base.0.clone();
                letters.extend((top + 1..=hi).map(|l| l as Letter));
                Alphabet(letters)
            }
        }
    }

    /// `A_{from}, A_{from+1}, ..., A_{from+count-1}`.
    pub fn levels_from(&self, from: usize, count: usize) -> Vec<Alphabet> {
        (from..from + count).map(|n| self.level(n)).collect()
    }
}

impl fmt::Debug for AlphabetLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlphabetLadder({self})")
    }
}

/// Shorthand: comma-separated levels, each a size `p` (meaning `{0..p-1}`)
/// or an explicit set `{0 1 5}`; an optional trailing `+` marks a constant
/// tail and `+k` an arithmetic tail adding `k` letters per level.
impl fmt::Display for AlphabetLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if level.is_prefix_range() {
                write!(f, "{}", level.len())?;
            } else {
                write!(f, "{level:?}")?;
            }
        }
        if let TailRule::Arithmetic { step } = self.tail {
            write!(f, "+{step}")?;
        }
        Ok(())
    }
}

impl FromStr for AlphabetLadder {
    type Err = LadderError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let syntax = |msg: &str| LadderError::Syntax(input.to_string(), msg.to_string());
        let s = input.trim();
        let (body, tail) = match s.rfind('+') {
            Some(i) => {
                let suffix = &s[i + 1..];
                let tail = if suffix.is_empty() {
                    TailRule::Constant
                } else {
                    let step: u16 = suffix.parse().map_err(|_| syntax("bad tail step"))?;
                    TailRule::Arithmetic { step }
                };
                (&s[..i], tail)
            }
            None => (s, TailRule::Constant),
        };
        if body.is_empty() {
            return Err(LadderError::NoLevels);
        }
        let mut levels = Vec::new();
        for (i, tok) in body.split(',').enumerate() {
            let tok = tok.trim();
            if let Some(inner) = tok.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
                let mut letters = Vec::new();
                for l in inner.split_whitespace() {
                    let v: u32 = l.parse().map_err(|_| syntax("bad letter id"))?;
                    if v > MAX_LETTER as u32 {
                        return Err(LadderError::LetterOutOfRange(v));
                    }
                    letters.push(v as Letter);
                }
                levels.push(Alphabet::new(letters).ok_or(LadderError::EmptyLevel(i))?);
            } else {
                let p: usize = tok.parse().map_err(|_| syntax("bad level size"))?;
                if p == 0 {
                    return Err(LadderError::EmptyLevel(i));
                }
                if p > MAX_LETTER as usize + 1 {
                    return Err(LadderError::LetterOutOfRange(p as u32));
                }
                levels.push(Alphabet::range(p));
            }
        }
        AlphabetLadder::new(levels, tail)
    }
}
