//! A single variable word all of whose substitutions land in `E`.

use std::collections::{HashMap, HashSet};

use crate::hj::{find_line_in_table, unrank};
use crate::span::{for_each_selection, SpanKind, SpanMatch};
use crate::word::{Alphabet, AlphabetLadder, Letter, Sym, VarSeq, VariableWord, X};

use super::{LargenessError, Limits, Meter, SetOracle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoWord {
    /// Last window used.
    pub m: usize,
    pub word: VariableWord,
    /// Windows and symbols selected from the input sequence.
    pub selection: SpanMatch,
}

/// Scans the extracted variable span of `s_0..s_m` for `m = 0, 1, ...` in
/// enumeration order and returns the first `w` with `w(a) ∈ E` for every
/// `a ∈ A_k`.
pub fn one_mono_word(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
) -> Result<MonoWord, LargenessError> {
    let target = ladder.level(k);
    scan(e, &target, limits.mono_windows, meter, &mut |n| Ok(s.get(n).map(|w| (w.clone(), ladder.level(k + n)))))
}

/// The scan behind [`one_mono_word`]. `window(n)` yields the `n`-th window
/// with its alphabet, or `None` past the end.
pub(crate) fn scan(
    e: &SetOracle,
    target: &Alphabet,
    max_windows: usize,
    meter: &Meter,
    window: &mut dyn FnMut(usize) -> Result<Option<(VariableWord, Alphabet)>, LargenessError>,
) -> Result<MonoWord, LargenessError> {
    let mut windows: Vec<(VariableWord, Alphabet)> = Vec::new();
    let mut seen: HashSet<Vec<Sym>> = HashSet::new();
    let mut buf = Vec::new();
    for m in 0..max_windows {
        match window(m)? {
            Some(w) => windows.push(w),
            None => break,
        }
        for lower in 0u64..(1u64 << m) {
            let idx: Vec<usize> = (0..m).filter(|i| lower >> i & 1 == 1).chain([m]).collect();
            let seq: Vec<&VariableWord> = idx.iter().map(|&i| &windows[i].0).collect();
            let al: Vec<&Alphabet> = idx.iter().map(|&i| &windows[i].1).collect();
            let mut hit = None;
            let mut failure = None;
            for_each_selection(&seq, &al, SpanKind::ReducedVariable, |syms, sel| {
                if hit.is_some() || failure.is_some() || !seen.insert(syms.to_vec()) {
                    return;
                }
                let w = VariableWord::new(syms.to_vec()).expect("variable span word");
                let mut all = true;
                for &a in target.letters() {
                    buf.clear();
                    w.substitute_into(a, &mut buf);
                    match e.check(&buf, meter) {
                        Ok(true) => {}
                        Ok(false) => {
                            all = false;
                            break;
                        }
                        Err(err) => {
                            failure = Some(err);
                            return;
                        }
                    }
                }
                if all {
                    hit = Some((w, SpanMatch { indices: idx.clone(), symbols: sel.symbols.clone() }));
                }
            });
            if let Some(err) = failure {
                return Err(err);
            }
            if let Some((word, selection)) = hit {
                return Ok(MonoWord { m, word, selection });
            }
        }
    }
    Err(LargenessError::Inconclusive(format!("no monochromatic word within {} windows", windows.len())))
}

/// The subset-coloring construction, for tiny instances.
///
/// Stage `N` holds blocks `w_0..w_{N-1}` built from the first windows of
/// `s`. A word `z` over `A_{k+N}` placed on the next `H` windows is colored by
/// the set of optional-letter tuples `(a_i) ∈ ∏ (A_{k+i} ∪ {∅})` with
/// `w_0(a_0)...w_{N-1}(a_{N-1}) z ∈ E`, where `w_i(∅)` is the empty word. A
/// monochromatic line `y` whose color set is nonempty gives the answer;
/// otherwise `y` becomes block `w_N`.
pub fn one_mono_word_literal(
    e: &SetOracle,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    limits: &Limits,
    meter: &Meter,
) -> Result<MonoWord, LargenessError> {
    let mut blocks: Vec<(VariableWord, Vec<usize>, Vec<Sym>)> = Vec::new();
    let mut cover = 0usize;
    let table_cap = 1usize << 16;
    for stage in 0..limits.mono_windows {
        let letters = ladder.level(k + stage);
        let p = letters.len();
        // optional-letter products, in tuple order; index 0 is all-empty
        let mut products: Vec<(Vec<Letter>, Vec<usize>, Vec<Sym>)> = vec![(Vec::new(), Vec::new(), Vec::new())];
        for (i, (w, idx, syms)) in blocks.iter().enumerate() {
            let alpha = ladder.level(k + i);
            let mut next = Vec::new();
            for (u, ui, us) in &products {
                next.push((u.clone(), ui.clone(), us.clone()));
                for &a in alpha.letters() {
                    let mut word = u.clone();
                    w.substitute_into(a, &mut word);
                    let mut wi = ui.clone();
                    let mut ws = us.clone();
                    for (&j, &sym) in idx.iter().zip(syms) {
                        wi.push(j);
                        ws.push(if sym == X { a } else { sym });
                    }
                    next.push((word, wi, ws));
                }
            }
            products = next;
        }
        let mut found = None;
        for h in 1..=limits.max_dim {
            if s.len() < cover + h || p.checked_pow(h as u32).is_none_or(|n| n > table_cap) {
                break;
            }
            let windows: Vec<&VariableWord> = (cover..cover + h).map(|n| s.get(n).unwrap()).collect();
            let mut ids: HashMap<Vec<bool>, u32> = HashMap::new();
            let mut sets: Vec<Vec<bool>> = Vec::new();
            let mut table = Vec::with_capacity(p.pow(h as u32));
            for r in 0..p.pow(h as u32) {
                let z = unrank(r, h, &letters);
                let mut tail = Vec::new();
                for (w, &a) in windows.iter().zip(&z) {
                    w.substitute_into(a, &mut tail);
                }
                let mut set = Vec::with_capacity(products.len());
                for (u, _, _) in &products {
                    let mut word = u.clone();
                    word.extend_from_slice(&tail);
                    set.push(e.check(&word, meter)?);
                }
                let next_id = ids.len() as u32;
                let id = *ids.entry(set.clone()).or_insert_with(|| {
                    sets.push(set);
                    next_id
                });
                table.push(id);
            }
            if let Some((line, color)) = find_line_in_table(h, p, &table, &|_| true, limits.workers) {
                found = Some((h, line, sets[color as usize].clone()));
                break;
            }
        }
        let Some((h, line, set)) = found else {
            return Err(LargenessError::Inconclusive(format!("no monochromatic line at stage {stage}")));
        };
        let idx: Vec<usize> = (cover..cover + h).collect();
        let mut word = Vec::new();
        let mut syms = Vec::new();
        for (i, &l) in line.iter().enumerate() {
            let sym = if l == X { X } else { letters.letters()[l as usize] };
            syms.push(sym);
            s.get(cover + i).unwrap().substitute_sym_into(sym, &mut word);
        }
        let y = VariableWord::new(word).expect("line holds x");
        if let Some(pick) = set.iter().position(|&b| b) {
            let (u, ui, us) = &products[pick];
            let word = y.prepend_word(&crate::word::Word::new(u.clone()).expect("letters"));
            let mut indices = ui.clone();
            indices.extend(&idx);
            let mut symbols = us.clone();
            symbols.extend(&syms);
            return Ok(MonoWord { m: cover + h - 1, word, selection: SpanMatch { indices, symbols } });
        }
        blocks.push((y, idx, syms));
        cover += h;
    }
    Err(LargenessError::Inconclusive(format!("no monochromatic word after {} stages", limits.mono_windows)))
}
