//! Reduced and extracted spans of finite sequences of variable words.
//!
//! For `s_0 .. s_m` and per-position alphabets `B_0 .. B_m`:
//!
//! * the reduced constant span is `{ s_0(a_0) ... s_m(a_m) : a_i in B_i }`;
//! * the reduced variable span allows `a_i = x` and keeps the products that
//!   still contain `x`;
//! * the extracted spans do the same over every non-empty increasing subset
//!   `l_0 < ... < l_n` of positions, with `a_i` drawn from `B_{l_i}`.
//!
//! Enumeration order: symbol tuples lexicographically (the variable sorts
//! after every letter), index subsets colexicographically (by bitmask value).
//! Extracted enumerations are deduplicated and keep the first occurrence.

use std::collections::HashSet;

use thiserror::Error;

use crate::word::{Alphabet, AlphabetLadder, AnyWord, SeqError, Sym, VarSeq, VariableWord, X};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("span would produce {count} items, cap is {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("{seq} sequence items but {alphabets} alphabets")]
    LengthMismatch { seq: usize, alphabets: usize },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    ReducedConstant,
    ReducedVariable,
    ExtractedConstant,
    ExtractedVariable,
}

impl SpanKind {
    pub fn is_variable(self) -> bool {
        matches!(self, SpanKind::ReducedVariable | SpanKind::ExtractedVariable)
    }

    pub fn is_extracted(self) -> bool {
        matches!(self, SpanKind::ExtractedConstant | SpanKind::ExtractedVariable)
    }
}

impl std::str::FromStr for SpanKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reduced-constant" => Ok(SpanKind::ReducedConstant),
            "reduced-variable" => Ok(SpanKind::ReducedVariable),
            "extracted-constant" => Ok(SpanKind::ExtractedConstant),
            "extracted-variable" => Ok(SpanKind::ExtractedVariable),
            _ => Err(format!("unknown span kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanQuery {
    seq: Vec<VariableWord>,
    alphabets: Vec<Alphabet>,
    kind: SpanKind,
}

impl SpanQuery {
    pub fn new(seq: Vec<VariableWord>, alphabets: Vec<Alphabet>, kind: SpanKind) -> Result<Self, SpanError> {
        if seq.len() != alphabets.len() {
            return Err(SpanError::LengthMismatch { seq: seq.len(), alphabets: alphabets.len() });
        }
        Ok(SpanQuery { seq, alphabets, kind })
    }

    /// Uses `A_{k+n}` for position `n`.
    pub fn over_ladder(seq: Vec<VariableWord>, ladder: &AlphabetLadder, k: usize, kind: SpanKind) -> Self {
        let alphabets = ladder.levels_from(k, seq.len());
        SpanQuery { seq, alphabets, kind }
    }

    /// The same alphabet at every position.
    pub fn uniform(seq: Vec<VariableWord>, alphabet: &Alphabet, kind: SpanKind) -> Self {
        let alphabets = vec![alphabet.clone(); seq.len()];
        SpanQuery { seq, alphabets, kind }
    }

    pub fn seq(&self) -> &[VariableWord] {
        &self.seq
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn kind(&self) -> SpanKind {
        self.kind
    }
}

/// Which positions were used and which symbol was substituted at each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanMatch {
    pub indices: Vec<usize>,
    pub symbols: Vec<Sym>,
}

/// Number of selections the enumeration walks: exact for reduced kinds, an
/// upper bound (before deduplication) for extracted kinds.
pub fn selection_count(q: &SpanQuery) -> u128 {
    let sizes = q.alphabets.iter().map(|b| b.len() as u128);
    let prod = |f: &dyn Fn(u128) -> u128| sizes.clone().fold(1u128, |acc, b| acc.saturating_mul(f(b)));
    match q.kind {
        SpanKind::ReducedConstant => prod(&|b| b),
        SpanKind::ReducedVariable => prod(&|b| b + 1) - prod(&|b| b),
        SpanKind::ExtractedConstant => prod(&|b| b + 1) - 1,
        SpanKind::ExtractedVariable => prod(&|b| b + 2) - prod(&|b| b + 1),
    }
}

/// Lists the span in enumeration order. Refuses before doing any work when
/// the selection count exceeds `cap`.
pub fn enumerate_span(q: &SpanQuery, cap: u64) -> Result<Vec<AnyWord>, SpanError> {
    Ok(enumerate_span_witnessed(q, cap)?.into_iter().map(|(w, _)| w).collect())
}

/// As [`enumerate_span`], paired with the selection that first produced each word.
pub fn enumerate_span_witnessed(q: &SpanQuery, cap: u64) -> Result<Vec<(AnyWord, SpanMatch)>, SpanError> {
    let count = selection_count(q);
    if count > cap as u128 {
        return Err(SpanError::CapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let seq: Vec<&VariableWord> = q.seq.iter().collect();
    let al: Vec<&Alphabet> = q.alphabets.iter().collect();
    for_each_selection(&seq, &al, q.kind, |syms, sel| {
        out.push((AnyWord::from_symbols(syms.to_vec()), sel.clone()));
    });
    Ok(out)
}

/// Visits every distinct span word once, in enumeration order, with its
/// first selection. No cap: callers bound the window themselves.
pub fn for_each_selection(
    seq: &[&VariableWord],
    alphabets: &[&Alphabet],
    kind: SpanKind,
    mut f: impl FnMut(&[Sym], &SpanMatch),
) {
    let variable = kind.is_variable();
    if kind.is_extracted() {
        let m = seq.len();
        let mut seen = HashSet::new();
        for mask in 1u64..(1u64 << m) {
            let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<&VariableWord> = idx.iter().map(|&i| seq[i]).collect();
            let al: Vec<&Alphabet> = idx.iter().map(|&i| alphabets[i]).collect();
            for_each_tuple(&sub, &al, variable, |syms, choice| {
                if seen.insert(syms.to_vec()) {
                    f(syms, &SpanMatch { indices: idx.clone(), symbols: choice.to_vec() });
                }
            });
        }
    } else {
        let idx: Vec<usize> = (0..seq.len()).collect();
        for_each_tuple(seq, alphabets, variable, |syms, choice| {
            f(syms, &SpanMatch { indices: idx.clone(), symbols: choice.to_vec() })
        });
    }
}

/// Calls `f` with `s_0(b_0)...s_m(b_m)` and `(b_0..b_m)` for every tuple in
/// lexicographic order. With `variable`, `x` is allowed at each position and
/// only tuples using it at least once are reported.
fn for_each_tuple(seq: &[&VariableWord], alphabets: &[&Alphabet], variable: bool, mut f: impl FnMut(&[Sym], &[Sym])) {
    let m = seq.len();
    if m == 0 {
        return;
    }
    let choices: Vec<Vec<Sym>> = alphabets
        .iter()
        .map(|b| {
            let mut c = b.letters().to_vec();
            if variable {
                c.push(X);
            }
            c
        })
        .collect();
    let mut digits = vec![0usize; m];
    let mut buf = Vec::new();
    let mut picked = Vec::with_capacity(m);
    loop {
        let has_x = variable && digits.iter().zip(&choices).any(|(&d, c)| c[d] == X);
        if !variable || has_x {
            buf.clear();
            picked.clear();
            for i in 0..m {
                let b = choices[i][digits[i]];
                picked.push(b);
                seq[i].substitute_sym_into(b, &mut buf);
            }
            f(&buf, &picked);
        }
        // odometer, last position fastest
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Matches `segment` against the pattern `s(b)`; returns `b` when the match
/// succeeds and `b` is allowed.
fn match_item(s: &VariableWord, segment: &[Sym], alphabet: &Alphabet, variable: bool) -> Option<Sym> {
    if s.len() != segment.len() {
        return None;
    }
    let mut b = None;
    for (&p, &c) in s.symbols().iter().zip(segment) {
        if p == X {
            match b {
                None => b = Some(c),
                Some(prev) if prev != c => return None,
                _ => {}
            }
        } else if p != c {
            return None;
        }
    }
    let b = b.expect("variable word holds x");
    let ok = if b == X { variable } else { alphabet.contains(b) };
    ok.then_some(b)
}

/// Membership with a witness. Reduced kinds align by length; extracted kinds
/// return the colexicographically least index subset.
pub fn span_contains(q: &SpanQuery, w: &[Sym]) -> Option<SpanMatch> {
    let variable = q.kind.is_variable();
    if w.contains(&X) != variable {
        return None;
    }
    if q.kind.is_extracted() {
        let mut m = ExtractedMatcher::new(w);
        for (s, b) in q.seq.iter().zip(&q.alphabets) {
            m.push(s, b, variable);
        }
        m.witness(q.seq.len())
    } else {
        let total: usize = q.seq.iter().map(|s| s.len()).sum();
        if total != w.len() {
            return None;
        }
        let mut pos = 0;
        let mut symbols = Vec::with_capacity(q.seq.len());
        for (s, b) in q.seq.iter().zip(&q.alphabets) {
            symbols.push(match_item(s, &w[pos..pos + s.len()], b, variable)?);
            pos += s.len();
        }
        Some(SpanMatch { indices: (0..q.seq.len()).collect(), symbols })
    }
}

/// Incremental dynamic match of a fixed target against the extracted span of
/// a growing window. Column `j` records, for every prefix length of the
/// target, whether that prefix is a product over a subset of the first `j`
/// window items.
struct ExtractedMatcher<'a> {
    target: &'a [Sym],
    columns: Vec<Vec<bool>>,
    // per pushed item: its length and, per end position, the matched symbol
    items: Vec<(usize, Vec<Option<Sym>>)>,
}

impl<'a> ExtractedMatcher<'a> {
    fn new(target: &'a [Sym]) -> Self {
        let mut col = vec![false; target.len() + 1];
        col[0] = true;
        ExtractedMatcher { target, columns: vec![col], items: Vec::new() }
    }

    fn push(&mut self, s: &VariableWord, alphabet: &Alphabet, variable: bool) {
        let n = self.target.len();
        let prev = self.columns.last().unwrap();
        let len = s.len();
        let mut ends = vec![None; n + 1];
        let mut col = prev.clone();
        for end in len..=n {
            if !prev[end - len] {
                continue;
            }
            if let Some(b) = match_item(s, &self.target[end - len..end], alphabet, variable) {
                ends[end] = Some(b);
                col[end] = true;
            }
        }
        self.items.push((len, ends));
        self.columns.push(col);
    }

    fn complete(&self) -> bool {
        !self.target.is_empty() && self.columns.last().unwrap()[self.target.len()]
    }

    /// Least witness over the first `upto` items (indices relative to the window).
    fn witness(&self, upto: usize) -> Option<SpanMatch> {
        let n = self.target.len();
        if n == 0 || !self.columns[upto][n] {
            return None;
        }
        let mut pos = n;
        let mut bound = upto;
        let mut indices = Vec::new();
        let mut symbols = Vec::new();
        while pos > 0 {
            let l = (0..bound).find(|&l| {
                let (len, ends) = &self.items[l];
                ends[pos].is_some() && self.columns[l][pos - len]
            })?;
            let (len, ends) = &self.items[l];
            indices.push(l);
            symbols.push(ends[pos].unwrap());
            pos -= len;
            bound = l;
        }
        indices.reverse();
        symbols.reverse();
        Some(SpanMatch { indices, symbols })
    }
}

/// Evidence that `t` is a block subsequence of `s`: `t_i` lives in the span of
/// `s[cuts[i] .. cuts[i+1])`; `selections[i]` holds absolute indices into `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockWitness {
    pub cuts: Vec<usize>,
    pub selections: Vec<SpanMatch>,
}

/// Reduced `k`-block subsequence recognition. Cuts are forced by cumulative
/// lengths, so the witness is unique when it exists.
pub fn is_reduced_block_subseq(
    t: &[VariableWord],
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
) -> Result<Option<BlockWitness>, SeqError> {
    let mut cuts = vec![0usize];
    let mut selections = Vec::with_capacity(t.len());
    let mut pos = 0usize;
    for ti in t {
        let start = pos;
        let mut covered = 0usize;
        while covered < ti.len() {
            covered += s.item(pos)?.len();
            pos += 1;
        }
        if covered != ti.len() {
            return Ok(None);
        }
        let mut off = 0;
        let mut symbols = Vec::with_capacity(pos - start);
        for n in start..pos {
            let item = s.item(n)?;
            let level = ladder.level(k + n);
            match match_item(item, &ti.symbols()[off..off + item.len()], &level, true) {
                Some(b) => symbols.push(b),
                None => return Ok(None),
            }
            off += item.len();
        }
        if !symbols.contains(&X) {
            return Ok(None);
        }
        selections.push(SpanMatch { indices: (start..pos).collect(), symbols });
        cuts.push(pos);
    }
    Ok(Some(BlockWitness { cuts, selections }))
}

/// Extracted `k`-block subsequence recognition. Returns the lexicographically
/// least witness: each cut is as small as possible (which never hurts the
/// remaining blocks), and within a window the colexicographically least
/// index subset is chosen.
pub fn is_extracted_block_subseq(
    t: &[VariableWord],
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
) -> Result<Option<BlockWitness>, SeqError> {
    let mut cuts = vec![0usize];
    let mut selections = Vec::with_capacity(t.len());
    let mut start = 0usize;
    for ti in t {
        let mut m = ExtractedMatcher::new(ti.symbols());
        let mut end = start;
        while !m.complete() {
            let item = s.item(end)?;
            m.push(item, &ladder.level(k + end), true);
            end += 1;
        }
        let mut sel = m.witness(end - start).expect("complete matcher has a witness");
        for i in &mut sel.indices {
            *i += start;
        }
        selections.push(sel);
        cuts.push(end);
        start = end;
    }
    Ok(Some(BlockWitness { cuts, selections }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vws(items: &[&str]) -> Vec<VariableWord> {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn q(kind: SpanKind) -> SpanQuery {
        SpanQuery::uniform(vws(&["x", "0x"]), &Alphabet::range(2), kind)
    }

    fn strs(ws: &[AnyWord]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    fn syms(s: &str) -> Vec<Sym> {
        crate::word::parse_symbols(s).unwrap()
    }

    #[test]
    fn reduced_constant_example() {
        let out = enumerate_span(&q(SpanKind::ReducedConstant), 100).unwrap();
        assert_eq!(strs(&out), ["000", "001", "100", "101"]);
    }

    #[test]
    fn reduced_variable_example() {
        let out = enumerate_span(&q(SpanKind::ReducedVariable), 100).unwrap();
        let mut got = strs(&out);
        got.sort();
        let mut want = vec!["x00", "x01", "00x", "10x", "x0x"];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(selection_count(&q(SpanKind::ReducedVariable)), 5);
    }

    #[test]
    fn extracted_constant_example() {
        let out = enumerate_span(&q(SpanKind::ExtractedConstant), 100).unwrap();
        assert_eq!(strs(&out), ["0", "1", "00", "01", "000", "001", "100", "101"]);
    }

    #[test]
    fn cap_is_enforced_with_exact_count() {
        let err = enumerate_span(&q(SpanKind::ReducedConstant), 3).unwrap_err();
        assert_eq!(err, SpanError::CapExceeded { count: 4, cap: 3 });
    }

    #[test]
    fn contains_examples() {
        let m = span_contains(&q(SpanKind::ReducedConstant), &syms("101")).unwrap();
        assert_eq!(m.symbols, vec![1, 1]);
        assert!(span_contains(&q(SpanKind::ReducedConstant), &syms("11")).is_none());
        let m = span_contains(&q(SpanKind::ExtractedConstant), &syms("01")).unwrap();
        assert_eq!(m, SpanMatch { indices: vec![1], symbols: vec![1] });
    }

    #[test]
    fn reduced_block_identity_and_windows() {
        let ladder = AlphabetLadder::constant(2);
        let s = VarSeq::repeating(VariableWord::var(), 20);
        let w = is_reduced_block_subseq(&vws(&["x"]), &s, 0, &ladder).unwrap().unwrap();
        assert_eq!(w.cuts, vec![0, 1]);
        let w = is_reduced_block_subseq(&vws(&["0x", "x1x"]), &s, 0, &ladder).unwrap().unwrap();
        assert_eq!(w.cuts, vec![0, 2, 5]);
    }

    #[test]
    fn reduced_block_rejects_misaligned() {
        let ladder = AlphabetLadder::constant(2);
        let s = VarSeq::finite(vws(&["x0", "x", "x"]));
        assert!(is_reduced_block_subseq(&vws(&["x"]), &s, 0, &ladder).unwrap().is_none());
        assert!(is_reduced_block_subseq(&vws(&["0x0"]), &s, 0, &ladder).unwrap().is_none());
        assert!(matches!(
            is_reduced_block_subseq(&vws(&["x0xxx"]), &s, 0, &ladder),
            Err(SeqError::InsufficientPrefix { .. })
        ));
    }

    #[test]
    fn extracted_block_prefers_least_cuts() {
        let ladder = AlphabetLadder::constant(2);
        let s = VarSeq::repeating(VariableWord::var(), 20);
        let w = is_extracted_block_subseq(&vws(&["x", "x"]), &s, 0, &ladder).unwrap().unwrap();
        assert_eq!(w.cuts, vec![0, 1, 2]);
    }

    #[test]
    fn extracted_block_insufficient_prefix() {
        let ladder = AlphabetLadder::constant(2);
        let s = VarSeq::repeating(VariableWord::var(), 3);
        assert!(matches!(
            is_extracted_block_subseq(&vws(&["xx", "xx"]), &s, 0, &ladder),
            Err(SeqError::InsufficientPrefix { .. })
        ));
    }

    #[test]
    fn extracted_block_respects_levels() {
        // letter 2 only appears from level 2 on, so it needs a window reaching index 2
        let ladder: AlphabetLadder = "2,2,3".parse().unwrap();
        let s = VarSeq::repeating(VariableWord::var(), 10);
        let w = is_extracted_block_subseq(&vws(&["2x"]), &s, 0, &ladder).unwrap().unwrap();
        assert_eq!(w.cuts, vec![0, 4]);
        assert_eq!(w.selections[0].indices, vec![2, 3]);
        let w = is_reduced_block_subseq(&vws(&["2x"]), &s, 0, &ladder).unwrap();
        assert!(w.is_none());
    }
}
