//! Word-set oracles, their quotients, and evaluation metering.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::coloring::{Color, ColoringOracle};
use crate::word::{Letter, Word};

use super::LargenessError;

type Member = dyn Fn(&[Letter]) -> bool + Send + Sync;

/// A set `E` of constant words given by a pure membership predicate.
///
/// `cost` is the number of base evaluations one membership test performs;
/// the meter charges it on every metered call.
#[derive(Clone)]
pub struct SetOracle {
    member: Arc<Member>,
    cost: u64,
    description: String,
}

impl SetOracle {
    pub fn new(description: impl Into<String>, cost: u64, f: impl Fn(&[Letter]) -> bool + Send + Sync + 'static) -> Self {
        SetOracle { member: Arc::new(f), cost: cost.max(1), description: description.into() }
    }

    pub fn all() -> Self {
        Self::new("all", 1, |_| true)
    }

    pub fn empty() -> Self {
        Self::new("empty", 1, |_| false)
    }

    /// The color class `{w : c(w) = color}`.
    pub fn color_class(c: &ColoringOracle, color: Color) -> Self {
        let c = c.clone();
        Self::new(format!("class {color} of {}", c.describe()), 1, move |w| c.evaluate(w) == color)
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        (self.member)(w)
    }

    /// Membership charged against `meter`.
    pub fn check(&self, w: &[Letter], meter: &Meter) -> Result<bool, LargenessError> {
        meter.charge(self.cost)?;
        Ok(self.contains(w))
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn intersect(&self, other: &SetOracle) -> SetOracle {
        let (a, b) = (self.member.clone(), other.member.clone());
        SetOracle {
            member: Arc::new(move |w| a(w) && b(w)),
            cost: self.cost.saturating_add(other.cost),
            description: format!("({}) & ({})", self.description, other.description),
        }
    }
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetOracle({})", self.description)
    }
}

/// `E_F = {z : wz in E for every w in F}`. Duplicates in `F` are dropped.
/// An empty `F` gives every word.
pub fn ef_quotient(e: &SetOracle, f: &[Word]) -> SetOracle {
    let mut seen = HashSet::new();
    let words: Vec<Vec<Letter>> =
        f.iter().filter(|w| seen.insert(w.letters().to_vec())).map(|w| w.letters().to_vec()).collect();
    let inner = e.member.clone();
    let cost = e.cost.saturating_mul(words.len().max(1) as u64);
    let description = format!("({})_F[{}]", e.description, words.len());
    let member = move |z: &[Letter]| {
        let mut buf = Vec::new();
        words.iter().all(|w| {
            buf.clear();
            buf.extend_from_slice(w);
            buf.extend_from_slice(z);
            inner(&buf)
        })
    };
    SetOracle { member: Arc::new(member), cost, description }
}

/// Counts base evaluations against a hard limit. Shared by reference across
/// worker threads.
#[derive(Debug)]
pub struct Meter {
    used: AtomicU64,
    limit: u64,
}

impl Meter {
    pub fn new(limit: u64) -> Self {
        Meter { used: AtomicU64::new(0), limit }
    }

    pub fn charge(&self, n: u64) -> Result<(), LargenessError> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.limit {
            self.used.store(self.limit, Ordering::Relaxed);
            return Err(LargenessError::BudgetExhausted { used: self.limit, limit: self.limit });
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed).min(self.limit)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn exhausted(&self) -> bool {
        self.used.load(Ordering::Relaxed) >= self.limit
    }
}
