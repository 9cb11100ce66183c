//! The two extraction pipelines.
//!
//! Proof-guided mode seeds `(x, x, ...)`, refines the color classes until
//! one class `E` is found large, runs the step lemma repeatedly to get blocks
//! `w_0, w_1, ...` with quotients that stay large, and assembles the final
//! blocks from them. Direct mode is a plain backtracking search. Either way
//! the result is handed to the verifier before it is returned.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::coloring::{Color, ColoringOracle};
use crate::word::{product, Alphabet, AlphabetLadder, Letter, Sym, VarSeq, VariableWord, Word, X};

use super::mono::scan;
use super::probe::grow_constant_span;
use super::{
    carlson_step, color_refine, cs_step, ef_quotient, fusion_reindex, letter_tuples, verify_carlson_certificate,
    verify_cs_certificate, CertKind, Certificate, ColoringRef, FusionStep, LargenessError, Limits, Meter, ProbeMode,
    SetOracle, VerifyReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtractMode {
    ProofGuided,
    Direct,
}

impl fmt::Display for ExtractMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtractMode::ProofGuided => "proof-guided",
            ExtractMode::Direct => "direct",
        })
    }
}

impl FromStr for ExtractMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "proof-guided" => Ok(ExtractMode::ProofGuided),
            "direct" => Ok(ExtractMode::Direct),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub certificate: Certificate,
    pub report: VerifyReport,
    pub budget_used: u64,
}

/// Cuts recorded per step for reindexing.
const FUSION_CUTS: usize = 256;

pub fn cs_extract(
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    mode: ExtractMode,
    limits: &Limits,
) -> Result<Extraction, LargenessError> {
    extract(CertKind::Cs, c, ladder, d, mode, limits)
}

pub fn carlson_extract(
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    mode: ExtractMode,
    limits: &Limits,
) -> Result<Extraction, LargenessError> {
    extract(CertKind::Carlson, c, ladder, d, mode, limits)
}

fn extract(
    kind: CertKind,
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    mode: ExtractMode,
    limits: &Limits,
) -> Result<Extraction, LargenessError> {
    let meter = Meter::new(limits.budget);
    let mut transcript = vec![format!("{kind} extraction, {mode}, depth {d}, {} colors", c.q())];
    let (words, color) = if c.q() == 1 {
        transcript.push("one color: every block is x".into());
        (vec![VariableWord::var(); d + 1], 1)
    } else {
        match (kind, mode) {
            (CertKind::Cs, ExtractMode::ProofGuided) => cs_guided(c, ladder, d, limits, &meter, &mut transcript)?,
            (CertKind::Carlson, ExtractMode::ProofGuided) => carlson_guided(c, ladder, d, limits, &meter, &mut transcript)?,
            (_, ExtractMode::Direct) => direct(kind, c, ladder, d, limits, &meter, &mut transcript)?,
            (CertKind::Hj, _) => unreachable!("hj certificates come from the line search"),
        }
    };
    let budget_used = meter.used();
    transcript.push(format!("budget used {budget_used} of {}", limits.budget));
    let certificate = Certificate {
        kind,
        ladder: ladder.clone(),
        depth: d,
        words,
        color,
        coloring: ColoringRef::from_oracle(c),
        budget: limits.budget,
        mode: mode.to_string(),
        transcript,
    };
    let report = match kind {
        CertKind::Cs => verify_cs_certificate(&certificate, c, limits.budget),
        _ => verify_carlson_certificate(&certificate, c, limits.budget),
    }
    .map_err(|e| LargenessError::Unverified(e.to_string()))?;
    if !report.ok {
        return Err(LargenessError::Unverified(report.failure.unwrap_or_default()));
    }
    let mut certificate = certificate;
    certificate.transcript.push(format!("verified {} products", report.products_checked));
    Ok(Extraction { certificate, report, budget_used })
}

fn classes(c: &ColoringOracle) -> Vec<SetOracle> {
    (1..=c.q()).map(|i| SetOracle::color_class(c, i)).collect()
}

/// Lazily extended output of the repeated step lemma.
struct Chain<'a> {
    mode: ProbeMode,
    ladder: &'a AlphabetLadder,
    limits: &'a Limits,
    base: SetOracle,
    current: SetOracle,
    seq: VarSeq,
    ws: Vec<VariableWord>,
    /// `ks[i]` is the level of `w_i`; one entry ahead of `ws`.
    ks: Vec<usize>,
    steps: Vec<FusionStep>,
    span: Vec<Vec<Letter>>,
    seen: HashSet<Vec<Letter>>,
    failed: Option<LargenessError>,
}

impl<'a> Chain<'a> {
    fn new(mode: ProbeMode, e: SetOracle, seq: VarSeq, ladder: &'a AlphabetLadder, limits: &'a Limits) -> Self {
        Chain {
            mode,
            ladder,
            limits,
            base: e.clone(),
            current: e,
            seq,
            ws: Vec::new(),
            ks: vec![0],
            steps: Vec::new(),
            span: Vec::new(),
            seen: HashSet::new(),
            failed: None,
        }
    }

    /// Makes `w_0..=w_n` available. A failed step is remembered and
    /// reported again on every later request.
    fn ensure(&mut self, n: usize, meter: &Meter, transcript: &mut Vec<String>) -> Result<(), LargenessError> {
        while self.ws.len() <= n {
            if let Some(err) = &self.failed {
                return Err(err.clone());
            }
            let k = *self.ks.last().unwrap();
            let step = match self.mode {
                ProbeMode::ReducedShifted => cs_step(&self.current, &self.seq, k, self.ladder, self.limits, meter),
                ProbeMode::Extracted => carlson_step(&self.current, &self.seq, k, self.ladder, self.limits, meter),
            };
            let step = match step {
                Ok(s) => s,
                Err(err) => {
                    transcript.push(format!("step {} failed: {err}", self.ws.len()));
                    self.failed = Some(err.clone());
                    return Err(err);
                }
            };
            transcript.push(format!(
                "step {}: w = {}, m = {}, r = {}, n0 = {}, q = {}, N = {}, level {}",
                self.ws.len(),
                step.w,
                step.m,
                step.r,
                step.n0,
                step.q,
                step.dim,
                k
            ));
            let k_next = k + step.m;
            self.steps.push(FusionStep { m: step.m, k: k_next, cuts: step.t_map.cuts(FUSION_CUTS) });
            self.current = match self.mode {
                ProbeMode::ReducedShifted => step.quotient,
                ProbeMode::Extracted => {
                    // rebuild E ∩ E_{F_n} from the deduplicated span
                    grow_constant_span(&mut self.span, &mut self.seen, &step.w, &self.ladder.level(k));
                    let f: Vec<Word> = self.span.iter().map(|w| Word::new(w.clone()).expect("letters")).collect();
                    self.base.intersect(&ef_quotient(&self.base, &f))
                }
            };
            self.ws.push(step.w);
            self.ks.push(k_next);
            self.seq = step.t;
        }
        Ok(())
    }

    fn fusion_note(&self, transcript: &mut Vec<String>) -> Result<(), LargenessError> {
        let p = fusion_reindex(0, &self.steps)?;
        transcript.push(format!("fusion cuts {p:?}, levels {:?}", self.ks));
        Ok(())
    }
}

fn budget_error(err: &LargenessError) -> bool {
    matches!(err, LargenessError::BudgetExhausted { .. })
}

fn refine_classes(
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    mode: ProbeMode,
    limits: &Limits,
    meter: &Meter,
    transcript: &mut Vec<String>,
) -> Result<(SetOracle, Color, VarSeq), LargenessError> {
    let parts = classes(c);
    let seed = VarSeq::repeating(VariableWord::var(), limits.seq_len);
    let refined = color_refine(&parts, &seed, 0, ladder, mode, limits, meter)?;
    transcript.extend(refined.transcript.iter().cloned());
    let color = refined.index as Color + 1;
    transcript.push(format!("color {color} is large, prefix r = {}", refined.evidence.r()));
    Ok((parts[refined.index].clone(), color, refined.seq))
}

fn cs_guided(
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    limits: &Limits,
    meter: &Meter,
    transcript: &mut Vec<String>,
) -> Result<(Vec<VariableWord>, Color), LargenessError> {
    let (e, color, seq) = refine_classes(c, ladder, ProbeMode::ReducedShifted, limits, meter, transcript)?;
    let mut chain = Chain::new(ProbeMode::ReducedShifted, e.clone(), seq, ladder, limits);
    chain.ensure(0, meter, transcript)?;
    let mut ts = vec![chain.ws[0].clone()];
    let mut rs = vec![0usize, 1];
    let mut buf = Vec::new();
    while ts.len() < d + 2 {
        let n = ts.len() - 1;
        let big = rs[n + 1];
        let levels: Vec<Alphabet> = (0..=n).map(|i| ladder.level(chain.ks[rs[i + 1] - 1])).collect();
        let g: Vec<Vec<Letter>> = letter_tuples(&levels).iter().map(|a| product(&ts, a).into_letters()).collect();
        let mut found = None;
        'search: for extra in 0..=limits.assembly_r {
            if let Err(err) = chain.ensure(big + extra + 1, meter, transcript) {
                if budget_error(&err) {
                    return Err(err);
                }
                break;
            }
            let block = &chain.ws[big..=big + extra];
            let levels: Vec<Alphabet> = (0..=extra).map(|i| ladder.level(chain.ks[big + i])).collect();
            let star = chain.ws[big + extra + 1].star();
            for a in letter_tuples(&levels) {
                let mut mid = product(block, &a).into_letters();
                mid.extend_from_slice(star);
                let mut all = true;
                for u in &g {
                    buf.clear();
                    buf.extend_from_slice(u);
                    buf.extend_from_slice(&mid);
                    if !e.check(&buf, meter)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    found = Some((extra, a));
                    break 'search;
                }
            }
        }
        let Some((extra, a)) = found else {
            return Err(LargenessError::Inconclusive(format!("assembly of t_{} found no block", n + 1)));
        };
        let head = product(&chain.ws[big..=big + extra], &a);
        let t = chain.ws[big + extra + 1].prepend_word(&head);
        transcript.push(format!("t_{} = {t} from w_{big}..=w_{}", n + 1, big + extra + 1));
        ts.push(t);
        rs.push(big + extra + 2);
    }
    chain.fusion_note(transcript)?;
    let shifted = VarSeq::finite(ts).shift()?;
    Ok((shifted.take(d + 1)?, color))
}

fn carlson_guided(
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    limits: &Limits,
    meter: &Meter,
    transcript: &mut Vec<String>,
) -> Result<(Vec<VariableWord>, Color), LargenessError> {
    let (e, color, seq) = refine_classes(c, ladder, ProbeMode::Extracted, limits, meter, transcript)?;
    let mut chain = Chain::new(ProbeMode::Extracted, e.clone(), seq, ladder, limits);
    chain.ensure(0, meter, transcript)?;
    let mut ts = vec![chain.ws[0].clone()];
    let mut rs = vec![0usize, 1];
    while ts.len() < 2 * d + 2 {
        let n = ts.len() - 1;
        let big = rs[n + 1];
        let mut g = Vec::new();
        let mut seen = HashSet::new();
        for (i, t) in ts.iter().enumerate() {
            grow_constant_span(&mut g, &mut seen, t, &ladder.level(chain.ks[rs[i]]));
        }
        let g: Vec<Word> = g.into_iter().map(|w| Word::new(w).expect("letters")).collect();
        let set = e.intersect(&ef_quotient(&e, &g));
        let target = ladder.level(chain.ks[big]);
        let mono = scan(&set, &target, limits.mono_windows, meter, &mut |j| match chain.ensure(big + j, meter, transcript) {
            Ok(()) => Ok(Some((chain.ws[big + j].clone(), ladder.level(chain.ks[big + j])))),
            Err(err) if budget_error(&err) => Err(err),
            Err(_) => Ok(None),
        })?;
        transcript.push(format!("t_{} = {} from w_{big}..=w_{}", n + 1, mono.word, big + mono.m));
        ts.push(mono.word);
        rs.push(big + mono.m + 1);
    }
    chain.fusion_note(transcript)?;
    let words = (0..=d).map(|i| ts[2 * i].concat(&ts[2 * i + 1])).collect();
    Ok((words, color))
}

/// Backtracking over block tuples with iterative deepening on the longest
/// block. The letter at position `j` of the concatenation comes from `A_j`,
/// so every result is a block subsequence of `(x, x, ...)`.
fn direct(
    kind: CertKind,
    c: &ColoringOracle,
    ladder: &AlphabetLadder,
    d: usize,
    limits: &Limits,
    meter: &Meter,
    transcript: &mut Vec<String>,
) -> Result<(Vec<VariableWord>, Color), LargenessError> {
    for max_len in 1..=limits.direct_max_len {
        let mut search = Direct { kind, c, ladder, d, max_len, meter, words: Vec::new(), nodes: 0 };
        let found = search.dfs(0, &[Vec::new()], None)?;
        transcript.push(format!("max block length {max_len}: {} nodes", search.nodes));
        if let Some(color) = found {
            return Ok((search.words, color));
        }
    }
    Err(LargenessError::Inconclusive(format!("no certificate with blocks up to length {}", limits.direct_max_len)))
}

struct Direct<'a> {
    kind: CertKind,
    c: &'a ColoringOracle,
    ladder: &'a AlphabetLadder,
    d: usize,
    max_len: usize,
    meter: &'a Meter,
    words: Vec<VariableWord>,
    nodes: u64,
}

impl Direct<'_> {
    fn candidates(&self, n: usize, offset: usize) -> Vec<VariableWord> {
        let mut out = Vec::new();
        for len in 1..=self.max_len {
            let choices: Vec<Vec<Sym>> = (0..len)
                .map(|j| {
                    let mut v: Vec<Sym> = self.ladder.level(offset + j).letters().to_vec();
                    v.push(X);
                    v
                })
                .collect();
            let mut digits = vec![0usize; len];
            loop {
                let syms: Vec<Sym> = digits.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                let left = syms[0] == X;
                if syms.contains(&X) && (self.kind != CertKind::Cs || n == 0 || left) {
                    out.push(VariableWord::new(syms).expect("has x"));
                }
                let mut done = true;
                for i in (0..len).rev() {
                    digits[i] += 1;
                    if digits[i] < choices[i].len() {
                        done = false;
                        break;
                    }
                    digits[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
        out
    }

    /// `products` holds what the next block extends: the previous layer for
    /// the reduced kind, every subset product (with the empty word) for the
    /// extracted one.
    fn dfs(&mut self, n: usize, products: &[Vec<Letter>], color: Option<Color>) -> Result<Option<Color>, LargenessError> {
        let offset: usize = self.words.iter().map(|w| w.len()).sum();
        let alphabet = self.ladder.level(n);
        for w in self.candidates(n, offset) {
            if n == self.d && w.len() != self.max_len && self.words.iter().all(|u| u.len() != self.max_len) {
                continue;
            }
            self.nodes += 1;
            self.meter.charge(1)?;
            let mut color = color;
            let mut fresh = Vec::with_capacity(products.len() * alphabet.len());
            let mut ok = true;
            'check: for u in products {
                for &a in alphabet.letters() {
                    let mut p = u.clone();
                    w.substitute_into(a, &mut p);
                    self.meter.charge(1)?;
                    let got = self.c.evaluate(&p);
                    if *color.get_or_insert(got) != got {
                        ok = false;
                        break 'check;
                    }
                    fresh.push(p);
                }
            }
            if !ok {
                continue;
            }
            self.words.push(w);
            if n == self.d {
                return Ok(color);
            }
            let next = match self.kind {
                CertKind::Cs => fresh,
                _ => {
                    let mut all = products.to_vec();
                    all.extend(fresh);
                    all
                }
            };
            if let Some(c) = self.dfs(n + 1, &next, color)? {
                return Ok(Some(c));
            }
            self.words.pop();
        }
        Ok(None)
    }
}
