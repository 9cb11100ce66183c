//! The bounded largeness probe.
//!
//! Reduced-shifted mode looks for `w_0..w_r` (a reduced block prefix of `s`)
//! such that every extension block `w` over the windows after the cover has a
//! tuple with `w_0(a_0)...w_r(a_r) w(x)* ∈ E`. Only the star of the extension
//! matters, so the probe walks extension stars `s_n0(b)...s_{j-1}(b) s_j*`.
//!
//! Extracted mode looks for `w_0..w_r` such that every `w` in the extracted
//! variable span of the following windows has `v w(a) ∈ E` for some
//! `v ∈ ⟨w_0..w_r⟩_c` and `a ∈ A_{k+r+1}`.
//!
//! When an extension has no good substitution it becomes the next block and
//! the probe starts over. After `probe_rounds` such failures the blocks built
//! so far are reported as a counterexample prefix.

use std::collections::HashSet;
use std::fmt;

use crate::span::{for_each_selection, SpanKind};
use crate::word::{render_symbols, Alphabet, AlphabetLadder, Letter, VarSeq, VariableWord};

use super::{letter_tuples, LargenessError, Limits, Meter, SetOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeMode {
    ReducedShifted,
    Extracted,
}

impl ProbeMode {
    pub fn name(self) -> &'static str {
        match self {
            ProbeMode::ReducedShifted => "reduced-shifted",
            ProbeMode::Extracted => "extracted",
        }
    }
}

impl fmt::Display for ProbeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProbeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reduced-shifted" | "reduced" => Ok(ProbeMode::ReducedShifted),
            "extracted" => Ok(ProbeMode::Extracted),
            _ => Err(format!("unknown probe mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    FoundPrefix,
    CounterexamplePrefix,
    BudgetExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FoundPrefix => "found-prefix",
            Verdict::CounterexamplePrefix => "counterexample-prefix",
            Verdict::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LargenessEvidence {
    pub verdict: Verdict,
    pub mode: ProbeMode,
    pub level: usize,
    /// `(w_i)_{i<=r}` on success, the failure-built blocks otherwise.
    pub prefix: Vec<VariableWord>,
    /// `prefix[i]` lives in windows `cuts[i]..cuts[i+1]` of the probed sequence.
    pub cuts: Vec<usize>,
    pub transcript: Vec<String>,
    pub extensions_checked: u64,
    pub budget_used: u64,
}

impl LargenessEvidence {
    /// Windows of the probed sequence covered by `prefix`.
    pub fn cover(&self) -> usize {
        *self.cuts.last().unwrap_or(&0)
    }

    pub fn r(&self) -> usize {
        self.prefix.len().saturating_sub(1)
    }

    /// The blocks of a counterexample as a block subsequence, with cuts into
    /// the probed sequence. Extracted mode pairs consecutive blocks and drops
    /// an odd leftover.
    pub fn counter_blocks(&self) -> Option<(Vec<VariableWord>, Vec<usize>)> {
        if self.verdict != Verdict::CounterexamplePrefix {
            return None;
        }
        match self.mode {
            ProbeMode::ReducedShifted => Some((self.prefix.clone(), self.cuts.clone())),
            ProbeMode::Extracted => {
                let pairs = self.prefix.len() / 2;
                let items = (0..pairs).map(|n| self.prefix[2 * n].concat(&self.prefix[2 * n + 1])).collect();
                let cuts = (0..=pairs).map(|n| self.cuts[2 * n]).collect();
                Some((items, cuts))
            }
        }
    }
}

/// Probes whether `e` is large in `s` at level `k`. Never fails: running out
/// of budget or of sequence is reported as [`Verdict::BudgetExhausted`].
pub fn largeness_probe(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    mode: ProbeMode,
    limits: &Limits,
    meter: &Meter,
) -> LargenessEvidence {
    let start = meter.used();
    let mut ev = LargenessEvidence {
        verdict: Verdict::BudgetExhausted,
        mode,
        level: k,
        prefix: Vec::new(),
        cuts: vec![0],
        transcript: Vec::new(),
        extensions_checked: 0,
        budget_used: 0,
    };
    let outcome = match mode {
        ProbeMode::ReducedShifted => probe_reduced(e, s, k, ladder, limits, meter, &mut ev),
        ProbeMode::Extracted => probe_extracted(e, s, k, ladder, limits, meter, &mut ev),
    };
    ev.verdict = match outcome {
        Ok(v) => v,
        Err(err) => {
            ev.transcript.push(format!("stopped: {err}"));
            Verdict::BudgetExhausted
        }
    };
    ev.budget_used = meter.used() - start;
    ev.transcript.push(format!("verdict {} with {} blocks", ev.verdict, ev.prefix.len()));
    ev
}

fn level_run(ladder: &AlphabetLadder, k: usize, from: usize, to: usize) -> Vec<Alphabet> {
    (from..to).map(|n| ladder.level(k + n)).collect()
}

fn need(s: &VarSeq, n: usize, ev: &mut LargenessEvidence) -> Result<(), LargenessError> {
    if s.len() < n {
        ev.transcript.push(format!("sequence has {} items, lookahead needs {n}", s.len()));
        return Err(LargenessError::Inconclusive("sequence too short for lookahead".into()));
    }
    Ok(())
}

fn probe_reduced(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
    ev: &mut LargenessEvidence,
) -> Result<Verdict, LargenessError> {
    need(s, 1, ev)?;
    let s0 = s.item(0)?.clone();
    let mut products: Vec<Vec<Letter>> = ladder.level(k).letters().iter().map(|&a| s0.substitute(a).into_letters()).collect();
    ev.prefix.push(s0);
    ev.cuts.push(1);
    let mut buf = Vec::new();
    for round in 0.. {
        let n0 = ev.cover();
        need(s, n0 + limits.lookahead, ev)?;
        let mut bad = None;
        'ext: for j in n0..n0 + limits.lookahead {
            for b in letter_tuples(&level_run(ladder, k, n0, j)) {
                let mut star = Vec::new();
                for (i, &a) in b.iter().enumerate() {
                    s.item(n0 + i)?.substitute_into(a, &mut star);
                }
                star.extend_from_slice(s.item(j)?.star());
                ev.extensions_checked += 1;
                let mut good = false;
                for u in &products {
                    buf.clear();
                    buf.extend_from_slice(u);
                    buf.extend_from_slice(&star);
                    if e.check(&buf, meter)? {
                        good = true;
                        break;
                    }
                }
                if !good {
                    bad = Some((j, b));
                    break 'ext;
                }
            }
        }
        let Some((j, b)) = bad else {
            ev.transcript.push(format!("round {round}: all extensions good over windows {n0}..{}", n0 + limits.lookahead));
            return Ok(Verdict::FoundPrefix);
        };
        let mut block = Vec::new();
        for (i, &a) in b.iter().enumerate() {
            s.item(n0 + i)?.substitute_into(a, &mut block);
        }
        let w = s.item(j)?.prepend_word(&crate::word::Word::new(block).expect("letters only"));
        ev.transcript.push(format!("round {round}: extension {} over windows {n0}..={j} has no good tuple", w));
        if round >= limits.probe_rounds {
            return Ok(Verdict::CounterexamplePrefix);
        }
        let alphabet = ladder.level(k + ev.prefix.len());
        products = products
            .iter()
            .flat_map(|u| {
                alphabet.letters().iter().map(|&a| {
                    let mut p = u.clone();
                    w.substitute_into(a, &mut p);
                    p
                })
            })
            .collect();
        ev.prefix.push(w);
        ev.cuts.push(j + 1);
    }
    unreachable!()
}

/// `⟨w_0..w_r⟩_c` grown by one block, kept in enumeration order.
pub(crate) fn grow_constant_span(v: &mut Vec<Vec<Letter>>, seen: &mut HashSet<Vec<Letter>>, w: &VariableWord, alphabet: &Alphabet) {
    let old = v.clone();
    for &a in alphabet.letters() {
        let word = w.substitute(a).into_letters();
        if seen.insert(word.clone()) {
            v.push(word);
        }
    }
    for u in &old {
        for &a in alphabet.letters() {
            let mut word = u.clone();
            w.substitute_into(a, &mut word);
            if seen.insert(word.clone()) {
                v.push(word);
            }
        }
    }
}

fn probe_extracted(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
    ev: &mut LargenessEvidence,
) -> Result<Verdict, LargenessError> {
    need(s, 1, ev)?;
    let s0 = s.item(0)?.clone();
    let mut span = Vec::new();
    let mut seen = HashSet::new();
    grow_constant_span(&mut span, &mut seen, &s0, &ladder.level(k));
    ev.prefix.push(s0);
    ev.cuts.push(1);
    let mut buf = Vec::new();
    for round in 0.. {
        let n0 = ev.cover();
        need(s, n0 + limits.lookahead, ev)?;
        let letters = ladder.level(k + ev.prefix.len());
        let windows: Vec<&VariableWord> = (n0..n0 + limits.lookahead).map(|n| s.get(n).unwrap()).collect();
        let alphabets = level_run(ladder, k, n0, n0 + limits.lookahead);
        let al: Vec<&Alphabet> = alphabets.iter().collect();
        let mut bad = None;
        let mut failure = None;
        for_each_selection(&windows, &al, SpanKind::ExtractedVariable, |syms, sel| {
            if bad.is_some() || failure.is_some() {
                return;
            }
            ev.extensions_checked += 1;
            let w = VariableWord::new(syms.to_vec()).expect("variable span word");
            let mut good = false;
            'search: for v in &span {
                for &a in letters.letters() {
                    buf.clear();
                    buf.extend_from_slice(v);
                    w.substitute_into(a, &mut buf);
                    match e.check(&buf, meter) {
                        Ok(true) => {
                            good = true;
                            break 'search;
                        }
                        Ok(false) => {}
                        Err(err) => {
                            failure = Some(err);
                            return;
                        }
                    }
                }
            }
            if !good {
                bad = Some((w, n0 + sel.indices.last().unwrap() + 1));
            }
        });
        if let Some(err) = failure {
            return Err(err);
        }
        let Some((w, end)) = bad else {
            ev.transcript.push(format!("round {round}: all extensions good over windows {n0}..{}", n0 + limits.lookahead));
            return Ok(Verdict::FoundPrefix);
        };
        ev.transcript.push(format!("round {round}: extension {} over windows {n0}..{end} has no good pair", w));
        if round >= limits.probe_rounds {
            return Ok(Verdict::CounterexamplePrefix);
        }
        let alphabet = ladder.level(k + ev.prefix.len());
        grow_constant_span(&mut span, &mut seen, &w, &alphabet);
        ev.prefix.push(w);
        ev.cuts.push(end);
    }
    unreachable!()
}

/// Renders blocks as `(w0, w1, ...)`.
pub(crate) fn render_blocks(items: &[VariableWord]) -> String {
    let inner: Vec<String> = items.iter().map(|w| render_symbols(w.symbols())).collect();
    format!("({})", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xs(n: usize) -> VarSeq {
        VarSeq::repeating(VariableWord::var(), n)
    }

    fn run(e: &SetOracle, s: &VarSeq, mode: ProbeMode) -> LargenessEvidence {
        let limits = Limits { probe_rounds: 3, ..Limits::default() };
        largeness_probe(e, s, 0, &AlphabetLadder::constant(2), mode, &limits, &Meter::new(1_000_000))
    }

    fn parity(odd: bool) -> SetOracle {
        SetOracle::new("parity", 1, move |w| (w.len() % 2 == 1) == odd)
    }

    fn strs(v: &[VariableWord]) -> Vec<String> {
        v.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn everything_is_found_at_once() {
        for mode in [ProbeMode::ReducedShifted, ProbeMode::Extracted] {
            let ev = run(&SetOracle::all(), &xs(50), mode);
            assert_eq!(ev.verdict, Verdict::FoundPrefix);
            assert_eq!(strs(&ev.prefix), ["x"]);
            assert_eq!(ev.r(), 0);
        }
    }

    #[test]
    fn nothing_is_a_counterexample() {
        for mode in [ProbeMode::ReducedShifted, ProbeMode::Extracted] {
            let ev = run(&SetOracle::empty(), &xs(50), mode);
            assert_eq!(ev.verdict, Verdict::CounterexamplePrefix);
        }
    }

    // Hand-built search tree for odd lengths over (x, x, ...): the products of
    // r+1 single-letter blocks have length r+1, extension stars have length
    // j-n0. With w_0 = x the empty star is fine but a one-letter star gives an
    // even total, so the probe appends 0x. Lengths then stay even on the
    // empty star and the failure repeats forever.
    #[test]
    fn odd_lengths_fail_on_plain_variables() {
        let ev = run(&parity(true), &xs(50), ProbeMode::ReducedShifted);
        assert_eq!(ev.verdict, Verdict::CounterexamplePrefix);
        assert_eq!(strs(&ev.prefix), ["x", "0x", "0x", "0x"]);
        assert_eq!(ev.cuts, [0, 1, 3, 5, 7]);
    }

    // Even lengths: w_0 = x gives length 1, so the empty star already fails
    // and the next block is the bare window x. From then on products have
    // even length and one-letter stars fail.
    #[test]
    fn even_lengths_fail_then_odd_succeeds_inside() {
        let ev = run(&parity(false), &xs(50), ProbeMode::ReducedShifted);
        assert_eq!(ev.verdict, Verdict::CounterexamplePrefix);
        assert_eq!(strs(&ev.prefix), ["x", "x", "0x", "0x"]);
        let (items, cuts) = ev.counter_blocks().unwrap();
        let t = VarSeq::with_head(items, &xs(50).skip(*cuts.last().unwrap()));
        let odd = run(&parity(true), &t, ProbeMode::ReducedShifted);
        assert_eq!(odd.verdict, Verdict::FoundPrefix);
        assert_eq!(odd.r(), 0);
    }

    #[test]
    fn odd_lengths_hold_with_even_blocks() {
        let x0: VariableWord = "x0".parse().unwrap();
        let s = VarSeq::with_head(vec![VariableWord::var()], &VarSeq::repeating(x0, 50));
        let ev = run(&parity(true), &s, ProbeMode::ReducedShifted);
        assert_eq!(ev.verdict, Verdict::FoundPrefix);
        assert_eq!(ev.r(), 0);
    }

    #[test]
    fn short_sequences_are_inconclusive() {
        let ev = run(&SetOracle::all(), &xs(2), ProbeMode::ReducedShifted);
        assert_eq!(ev.verdict, Verdict::BudgetExhausted);
    }

    #[test]
    fn budget_exhaustion_is_a_verdict() {
        let limits = Limits::default();
        let ev = largeness_probe(
            &parity(true),
            &xs(50),
            0,
            &AlphabetLadder::constant(2),
            ProbeMode::ReducedShifted,
            &limits,
            &Meter::new(3),
        );
        assert_eq!(ev.verdict, Verdict::BudgetExhausted);
        assert_eq!(ev.budget_used, 3);
    }

    // Over (x, x, ...) the extension x1 defeats "ends in 0" at every round.
    // Odd length fails once (v x(a) has length 2), but after the second
    // block the span holds words of lengths 1 and 2, so either parity of
    // extension can be fixed. Over blocks ending in 0 "ends in 0" holds at once.
    #[test]
    fn extracted_needs_the_right_blocks() {
        let ends0 = SetOracle::new("ends0", 1, |w| w.last() == Some(&0));
        assert_eq!(run(&ends0, &xs(50), ProbeMode::Extracted).verdict, Verdict::CounterexamplePrefix);
        let odd = run(&parity(true), &xs(50), ProbeMode::Extracted);
        assert_eq!((odd.verdict, odd.r()), (Verdict::FoundPrefix, 1));
        let x0s = VarSeq::repeating("x0".parse().unwrap(), 50);
        let ev = run(&ends0, &x0s, ProbeMode::Extracted);
        assert_eq!(ev.verdict, Verdict::FoundPrefix);
        assert_eq!(ev.r(), 0);
        let s = VarSeq::with_head(vec![VariableWord::var()], &x0s);
        assert_eq!(run(&parity(true), &s, ProbeMode::Extracted).verdict, Verdict::FoundPrefix);
    }

    #[test]
    fn extracted_counterexample_pairs_blocks() {
        let e = SetOracle::new("short", 1, |w| w.len() < 2);
        let ev = run(&e, &xs(50), ProbeMode::Extracted);
        assert_eq!(ev.verdict, Verdict::CounterexamplePrefix);
        let (items, cuts) = ev.counter_blocks().unwrap();
        assert_eq!(items.len(), ev.prefix.len() / 2);
        assert_eq!(cuts.len(), items.len() + 1);
        assert_eq!(items[0], ev.prefix[0].concat(&ev.prefix[1]));
    }
}
