//! One step of each pipeline: a block `w` on the first `m` windows and a
//! subsequence `t` of the rest in which the quotient by `w` stays large.
//!
//! The probe supplies `w_0..w_r` and its cover `n0`. Each candidate
//! continuation `v` past window `m = n0 + N` induces a coloring of `A_k^N`:
//! a word `z` gets the index of the first head `h` with `h z' v ∈ E`, where
//! `z'` places `z` on windows `n0..m`. A monochromatic line `y` with a real
//! index gives the pair `(h, y)`. The worst-case `N` is a Hales–Jewett
//! number; instead `N` grows from 1 until every continuation has a line.
//! Refinement over the quotients by all collected pairs picks one.

use std::collections::HashSet;

use crate::hj::{find_line_in_table, unrank};
use crate::span::{for_each_selection, SpanKind};
use crate::word::{Alphabet, AlphabetLadder, Letter, Sym, VarSeq, VariableWord, Word, X};

use super::probe::{grow_constant_span, render_blocks};
use super::{
    color_refine, ef_quotient, largeness_probe, letter_tuples, BlockMap, LargenessError, LargenessEvidence, Limits,
    Meter, ProbeMode, SetOracle, Verdict,
};

#[derive(Debug, Clone)]
pub struct StepResult {
    pub m: usize,
    pub w: VariableWord,
    /// A block subsequence of `s` past window `m`, at level `k + m`.
    pub t: VarSeq,
    /// Position of `t` inside `s.skip(m)`.
    pub t_map: BlockMap,
    pub f: Vec<Word>,
    /// `E_F` for the reduced step, `E ∩ E_F` for the extracted one.
    pub quotient: SetOracle,
    pub evidence: LargenessEvidence,
    pub r: usize,
    pub n0: usize,
    /// Number of heads, the color count of the induced colorings.
    pub q: usize,
    pub dim: usize,
    pub transcript: Vec<String>,
}

/// The reduced step.
pub fn cs_step(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
) -> Result<StepResult, LargenessError> {
    step(e, s, k, ladder, ProbeMode::ReducedShifted, limits, meter)
}

/// The extracted step.
pub fn carlson_step(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
) -> Result<StepResult, LargenessError> {
    step(e, s, k, ladder, ProbeMode::Extracted, limits, meter)
}

enum Continuation {
    /// The star of a continuation block.
    Fixed(Vec<Letter>),
    /// A whole continuation block, substituted with the head's letter.
    Block(VariableWord),
}

fn require_found(ev: &LargenessEvidence, meter: &Meter) -> Result<(), LargenessError> {
    match ev.verdict {
        Verdict::FoundPrefix => Ok(()),
        Verdict::CounterexamplePrefix => Err(LargenessError::Counterexample { len: ev.prefix.len() }),
        Verdict::BudgetExhausted if meter.exhausted() => {
            Err(LargenessError::BudgetExhausted { used: meter.used(), limit: meter.limit() })
        }
        Verdict::BudgetExhausted => Err(LargenessError::Inconclusive("probe ran out of sequence".into())),
    }
}

/// A prefix word by index, with the letter fed to the continuation block
/// in the extracted mode.
type Head = (usize, Option<Letter>);

fn step(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    mode: ProbeMode,
    limits: &Limits,
    meter: &Meter,
) -> Result<StepResult, LargenessError> {
    let ev = largeness_probe(e, s, k, ladder, mode, limits, meter);
    require_found(&ev, meter)?;
    let n0 = ev.cover();
    let r = ev.r();
    let mut transcript = vec![format!("{mode} step at level {k}: prefix {} covers {n0} windows", render_blocks(&ev.prefix))];

    let (prefixes, heads): (Vec<Vec<Letter>>, Vec<Head>) = match mode {
        ProbeMode::ReducedShifted => {
            let levels: Vec<Alphabet> = (0..=r).map(|i| ladder.level(k + i)).collect();
            let words: Vec<Vec<Letter>> = letter_tuples(&levels)
                .iter()
                .map(|a| crate::word::product(&ev.prefix, a).into_letters())
                .collect();
            let heads = (0..words.len()).map(|i| (i, None)).collect();
            (words, heads)
        }
        ProbeMode::Extracted => {
            let mut span = Vec::new();
            let mut seen = HashSet::new();
            for (i, w) in ev.prefix.iter().enumerate() {
                grow_constant_span(&mut span, &mut seen, w, &ladder.level(k + i));
            }
            let letters = ladder.level(k + r + 1);
            let heads = (0..span.len()).flat_map(|i| letters.letters().iter().map(move |&a| (i, Some(a)))).collect();
            (span, heads)
        }
    };
    let q = heads.len();
    let b = ladder.level(k);
    let p = b.len();
    transcript.push(format!("r = {r}, n0 = {n0}, q = {q}"));

    let mut chosen = None;
    for dim in 1..=limits.max_dim {
        let m = n0 + dim;
        if s.len() < m + limits.lookahead {
            transcript.push(format!("N = {dim}: sequence too short"));
            break;
        }
        let size = p.checked_pow(dim as u32).filter(|&n| n <= 1 << 20);
        let Some(size) = size else {
            transcript.push(format!("N = {dim}: table of {p}^{dim} points too large"));
            break;
        };
        let conts = continuations(e, s, k, m, ladder, mode, limits, meter, &mut transcript)?;
        let mut pairs: Vec<(usize, Vec<Sym>)> = Vec::new();
        let mut all = true;
        for cont in &conts {
            let mut table = Vec::with_capacity(size);
            let mut buf = Vec::new();
            for rank in 0..size {
                let z = unrank(rank, dim, &b);
                let mut mid = Vec::new();
                for (i, &a) in z.iter().enumerate() {
                    s.item(n0 + i)?.substitute_into(a, &mut mid);
                }
                let mut color = q as u32;
                for (hi, &(pi, a)) in heads.iter().enumerate() {
                    buf.clear();
                    buf.extend_from_slice(&prefixes[pi]);
                    buf.extend_from_slice(&mid);
                    match (cont, a) {
                        (Continuation::Fixed(star), _) => buf.extend_from_slice(star),
                        (Continuation::Block(v), Some(a)) => v.substitute_into(a, &mut buf),
                        (Continuation::Block(_), None) => unreachable!("extracted heads carry a letter"),
                    }
                    if e.check(&buf, meter)? {
                        color = hi as u32;
                        break;
                    }
                }
                table.push(color);
            }
            match find_line_in_table(dim, p, &table, &|c| c != q as u32, limits.workers) {
                Some((line, c)) => {
                    let pair = (heads[c as usize].0, line);
                    if !pairs.contains(&pair) {
                        pairs.push(pair);
                    }
                }
                None => {
                    all = false;
                    break;
                }
            }
        }
        if all && !pairs.is_empty() {
            transcript.push(format!("N = {dim}: {} continuations, {} distinct pairs", conts.len(), pairs.len()));
            chosen = Some((dim, m, pairs));
            break;
        }
        transcript.push(format!("N = {dim}: some continuation has no line"));
    }
    let Some((dim, m, pairs)) = chosen else {
        if meter.exhausted() {
            return Err(LargenessError::BudgetExhausted { used: meter.used(), limit: meter.limit() });
        }
        return Err(LargenessError::Inconclusive(format!("no dimension up to {} works", limits.max_dim)));
    };

    let candidates: Vec<(VariableWord, Vec<Word>)> = pairs
        .iter()
        .map(|(pi, line)| {
            let mut y = Vec::new();
            for (i, &l) in line.iter().enumerate() {
                let sym = if l == X { X } else { b.letters()[l as usize] };
                s.get(n0 + i).unwrap().substitute_sym_into(sym, &mut y);
            }
            let head = Word::new(prefixes[*pi].clone()).expect("letters");
            let w = VariableWord::new(y).expect("line holds x").prepend_word(&head);
            let f = b.letters().iter().map(|&a| w.substitute(a)).collect();
            (w, f)
        })
        .collect();
    let parts: Vec<SetOracle> = candidates
        .iter()
        .map(|(_, f)| match mode {
            ProbeMode::ReducedShifted => ef_quotient(e, f),
            ProbeMode::Extracted => e.intersect(&ef_quotient(e, f)),
        })
        .collect();
    let rest = s.skip(m);
    let refined = color_refine(&parts, &rest, k + m, ladder, mode, limits, meter)?;
    let (w, f) = candidates[refined.index].clone();
    transcript.extend(refined.transcript.iter().cloned());
    transcript.push(format!("chose w = {w} with m = {m}"));
    Ok(StepResult {
        m,
        w,
        t: refined.seq,
        t_map: refined.map,
        f,
        quotient: parts[refined.index].clone(),
        evidence: refined.evidence,
        r,
        n0,
        q,
        dim,
        transcript,
    })
}

/// Continuations past window `m`, distinct and in enumeration order. For the
/// extracted step they are filtered to blocks with `v(a) ∈ E` for every
/// `a ∈ A_{k+m}` when any exist.
#[allow(clippy::too_many_arguments)]
fn continuations(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    m: usize,
    ladder: &AlphabetLadder,
    mode: ProbeMode,
    limits: &Limits,
    meter: &Meter,
    transcript: &mut Vec<String>,
) -> Result<Vec<Continuation>, LargenessError> {
    let alphabets: Vec<Alphabet> = (m..m + limits.lookahead).map(|n| ladder.level(k + n)).collect();
    match mode {
        ProbeMode::ReducedShifted => {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for j in m..m + limits.lookahead {
                for b in letter_tuples(&alphabets[..j - m]) {
                    let mut star = Vec::new();
                    for (i, &a) in b.iter().enumerate() {
                        s.item(m + i)?.substitute_into(a, &mut star);
                    }
                    star.extend_from_slice(s.item(j)?.star());
                    if seen.insert(star.clone()) {
                        out.push(Continuation::Fixed(star));
                    }
                }
            }
            Ok(out)
        }
        ProbeMode::Extracted => {
            let windows: Vec<&VariableWord> = (m..m + limits.lookahead).map(|n| s.get(n).unwrap()).collect();
            let al: Vec<&Alphabet> = alphabets.iter().collect();
            let mut all = Vec::new();
            for_each_selection(&windows, &al, SpanKind::ExtractedVariable, |syms, _| {
                all.push(VariableWord::new(syms.to_vec()).expect("variable span word"));
            });
            let target = ladder.level(k + m);
            let mut kept = Vec::new();
            for v in &all {
                let mut ok = true;
                for &a in target.letters() {
                    if !e.check(v.substitute(a).letters(), meter)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    kept.push(v.clone());
                }
            }
            if kept.is_empty() {
                transcript.push("no continuation is monochromatic in E; using all".into());
                kept = all;
            }
            Ok(kept.into_iter().map(Continuation::Block).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{is_extracted_block_subseq, is_reduced_block_subseq, span_contains, SpanQuery};

    fn parity(odd: bool) -> SetOracle {
        SetOracle::new("parity", 1, move |w| (w.len() % 2 == 1) == odd)
    }

    fn seq(head: &[&str], cycle: &str, n: usize) -> VarSeq {
        VarSeq::periodic(head.iter().map(|s| s.parse().unwrap()).collect(), vec![cycle.parse().unwrap()], n)
    }

    fn limits() -> Limits {
        Limits { probe_rounds: 3, ..Limits::default() }
    }

    fn check_placement(r: &StepResult, s: &VarSeq, k: usize, kind: SpanKind) {
        let ladder = AlphabetLadder::constant(2);
        let q = SpanQuery::over_ladder(s.take(r.m).unwrap(), &ladder, k, kind);
        assert!(span_contains(&q, r.w.symbols()).is_some(), "{} not in the first {} windows", r.w, r.m);
        let items = r.t.take(8).unwrap();
        let rest = s.skip(r.m);
        let wit = if kind.is_extracted() {
            is_extracted_block_subseq(&items, &rest, k + r.m, &ladder).unwrap()
        } else {
            is_reduced_block_subseq(&items, &rest, k + r.m, &ladder).unwrap()
        };
        assert!(wit.is_some());
    }

    #[test]
    fn everything_keeps_everything() {
        let s = VarSeq::repeating(VariableWord::var(), 60);
        let r = cs_step(&SetOracle::all(), &s, 0, &AlphabetLadder::constant(2), &limits(), &Meter::new(1 << 30)).unwrap();
        assert_eq!(r.w.to_string(), "0x");
        assert_eq!(r.m, 2);
        assert_eq!(r.f.len(), 2);
        check_placement(&r, &s, 0, SpanKind::ReducedVariable);
        let r = carlson_step(&SetOracle::all(), &s, 0, &AlphabetLadder::constant(2), &limits(), &Meter::new(1 << 30)).unwrap();
        assert!(r.quotient.contains(&[1, 0, 1]));
    }

    // Odd lengths over (x, x0, x0, ...): w_0 = x with r = 0, the line picks one
    // more block and the quotient by F = {w(0), w(1)} keeps lengths even.
    #[test]
    fn odd_lengths_step() {
        let s = seq(&["x"], "x0", 60);
        let ladder = AlphabetLadder::constant(2);
        let r = cs_step(&parity(true), &s, 0, &ladder, &limits(), &Meter::new(1 << 30)).unwrap();
        assert_eq!((r.r, r.n0, r.q, r.dim, r.m), (0, 1, 2, 1, 2));
        assert_eq!(r.w.to_string(), "0x0");
        assert_eq!(r.f.iter().map(|w| w.len()).collect::<Vec<_>>(), [3, 3]);
        for len in 0..6 {
            assert_eq!(r.quotient.contains(&vec![1; len]), len % 2 == 0);
        }
        check_placement(&r, &s, 0, SpanKind::ReducedVariable);
        let again = largeness_probe(&r.quotient, &r.t, r.m, &ladder, ProbeMode::ReducedShifted, &limits(), &Meter::new(1 << 30));
        assert_eq!(again.verdict, Verdict::FoundPrefix);
    }

    #[test]
    fn ends_in_zero_reproduces() {
        let s = VarSeq::repeating("x0".parse().unwrap(), 60);
        let e = SetOracle::new("ends0", 1, |w| w.last() == Some(&0));
        let r = carlson_step(&e, &s, 0, &AlphabetLadder::constant(2), &limits(), &Meter::new(1 << 30)).unwrap();
        check_placement(&r, &s, 0, SpanKind::ExtractedVariable);
        assert!(r.f.iter().all(|w| w.letters().last() == Some(&0)));
        let words: Vec<Vec<Letter>> = (0..5usize)
            .flat_map(|n| (0..1usize << n).map(move |bits| (0..n).map(|i| (bits >> i & 1) as Letter).collect()))
            .collect();
        for z in words {
            assert_eq!(r.quotient.contains(&z), e.contains(&z), "{z:?}");
        }
    }

    #[test]
    fn empty_set_propagates_the_counterexample() {
        let s = VarSeq::repeating(VariableWord::var(), 60);
        let ladder = AlphabetLadder::constant(2);
        for f in [cs_step, carlson_step] {
            let r = f(&SetOracle::empty(), &s, 0, &ladder, &limits(), &Meter::new(1 << 30));
            assert!(matches!(r, Err(LargenessError::Counterexample { .. })));
        }
    }
}
