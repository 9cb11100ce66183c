//! Budget-bounded sequences of variable words and the shift map.

use std::fmt;

use thiserror::Error;

use super::VariableWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("sequence prefix too short: need {needed} items, have {available}")]
    InsufficientPrefix { needed: usize, available: usize },
}

/// A sequence `s_0, s_1, ...` of variable words: an explicit prefix followed
/// by an optional periodic tail, truncated at a hard length budget.
#[derive(Clone, PartialEq, Eq)]
pub struct VarSeq {
    prefix: Vec<VariableWord>,
    cycle: Vec<VariableWord>,
    phase: usize,
    len: usize,
}

impl VarSeq {
    pub fn finite(items: Vec<VariableWord>) -> Self {
        let len = items.len();
        VarSeq { prefix: items, cycle: Vec::new(), phase: 0, len }
    }

    /// `(w, w, w, ...)` truncated at `budget` items.
    pub fn repeating(word: VariableWord, budget: usize) -> Self {
        VarSeq { prefix: Vec::new(), cycle: vec![word], phase: 0, len: budget }
    }

    /// `prefix` followed by `cycle` repeated, truncated at `budget` items.
    pub fn periodic(prefix: Vec<VariableWord>, cycle: Vec<VariableWord>, budget: usize) -> Self {
        if cycle.is_empty() {
            let mut items = prefix;
            items.truncate(budget);
            return Self::finite(items);
        }
        VarSeq { prefix, cycle, phase: 0, len: budget }
    }

    /// `head` followed by `rest`.
    pub fn with_head(head: Vec<VariableWord>, rest: &VarSeq) -> Self {
        let len = head.len() + rest.len;
        let mut prefix = head;
        prefix.extend_from_slice(&rest.prefix[..rest.prefix.len().min(rest.len)]);
        VarSeq { prefix, cycle: rest.cycle.clone(), phase: rest.phase, len }
    }

    /// Number of available items (the budget).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<&VariableWord> {
        if i >= self.len {
            return None;
        }
        if i < self.prefix.len() {
            return Some(&self.prefix[i]);
        }
        let j = i - self.prefix.len();
        Some(&self.cycle[(self.phase + j) % self.cycle.len()])
    }

    pub fn item(&self, i: usize) -> Result<&VariableWord, SeqError> {
        self.get(i).ok_or(SeqError::InsufficientPrefix { needed: i + 1, available: self.len })
    }

    pub fn require(&self, needed: usize) -> Result<(), SeqError> {
        if needed <= self.len {
            Ok(())
        } else {
            Err(SeqError::InsufficientPrefix { needed, available: self.len })
        }
    }

    /// The first `n` items.
    pub fn take(&self, n: usize) -> Result<Vec<VariableWord>, SeqError> {
        self.require(n)?;
        Ok((0..n).map(|i| self.get(i).unwrap().clone()).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &VariableWord> + '_ {
        (0..self.len).map(move |i| self.get(i).unwrap())
    }

    /// `(s_n)_{n >= m}`.
    pub fn skip(&self, m: usize) -> VarSeq {
        if m >= self.len {
            return VarSeq::finite(Vec::new());
        }
        if m <= self.prefix.len() {
            VarSeq {
                prefix: self.prefix[m..].to_vec(),
                cycle: self.cycle.clone(),
                phase: self.phase,
                len: self.len - m,
            }
        } else {
            let j = m - self.prefix.len();
            VarSeq {
                prefix: Vec::new(),
                cycle: self.cycle.clone(),
                phase: (self.phase + j) % self.cycle.len(),
                len: self.len - m,
            }
        }
    }

    /// `true` when every item from index 1 on is left variable.
    pub fn is_left_variable_from_one(&self) -> bool {
        self.iter().skip(1).all(VariableWord::is_left_variable)
    }

    /// The shift map: `w_0 = s_0 s_1*` and `w_n = s_n** s_{n+1}*` for `n >= 1`.
    ///
    /// Each output item needs one item of lookahead, so the result has one
    /// item fewer than `self`.
    pub fn shift(&self) -> Result<VarSeq, SeqError> {
        self.require(2)?;
        let out_len = self.len - 1;
        let p = self.prefix.len();
        let c = self.cycle.len();
        let item = |n: usize| -> VariableWord {
            let next = self.get(n + 1).unwrap();
            if n == 0 {
                self.get(0).unwrap().append_word(next.star())
            } else {
                self.get(n).unwrap().double_star().append_word(next.star())
            }
        };
        // Past index p + 1 the output is periodic with the input's period.
        if c == 0 || out_len <= p + 1 + c {
            return Ok(VarSeq::finite((0..out_len).map(item).collect()));
        }
        let prefix = (0..=p).map(item).collect();
        let cycle = (p + 1..p + 1 + c).map(item).collect();
        Ok(VarSeq { prefix, cycle, phase: 0, len: out_len })
    }
}

impl fmt::Debug for VarSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarSeq[")?;
        for (i, w) in self.iter().take(8).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        if self.len > 8 {
            write!(f, ", ... ({} items)", self.len)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(items: &[&str]) -> VarSeq {
        VarSeq::finite(items.iter().map(|s| s.parse().unwrap()).collect())
    }

    fn strs(s: &VarSeq) -> Vec<String> {
        s.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn shift_fixes_left_variable_tails() {
        let s = seq(&["x0", "x1", "x"]);
        assert_eq!(strs(&s.shift().unwrap()), ["x0", "x1"]);
    }

    #[test]
    fn shift_recuts_blocks() {
        let s = seq(&["0x", "1x0", "x"]);
        assert_eq!(strs(&s.shift().unwrap()), ["0x1", "x0"]);
    }

    #[test]
    fn shift_needs_lookahead() {
        assert!(matches!(seq(&["x"]).shift(), Err(SeqError::InsufficientPrefix { .. })));
    }

    #[test]
    fn periodic_shift_matches_materialized() {
        let cyc: Vec<VariableWord> = ["0x1", "1x", "x0"].iter().map(|s| s.parse().unwrap()).collect();
        let pre: Vec<VariableWord> = ["x", "00x"].iter().map(|s| s.parse().unwrap()).collect();
        let s = VarSeq::periodic(pre, cyc, 30);
        let flat = VarSeq::finite(s.iter().cloned().collect());
        assert_eq!(strs(&s.shift().unwrap()), strs(&flat.shift().unwrap()));
        let sk = s.skip(7);
        assert_eq!(strs(&sk), strs(&flat.skip(7)));
        assert_eq!(strs(&sk.shift().unwrap()), strs(&flat.skip(7).shift().unwrap()));
    }

    #[test]
    fn with_head_replaces_prefix() {
        let base = VarSeq::repeating(VariableWord::var(), 10);
        let s = VarSeq::with_head(vec!["0x".parse().unwrap()], &base.skip(2));
        assert_eq!(s.len(), 9);
        assert_eq!(s.get(0).unwrap().to_string(), "0x");
        assert_eq!(s.get(8).unwrap().to_string(), "x");
        assert!(s.get(9).is_none());
    }
}
