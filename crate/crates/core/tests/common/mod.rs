//! Seeded corpus and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varwords::coloring::{builtin, dfa_coloring, ColoringOracle, DfaSpec, PrefixTable};
use varwords::word::{Alphabet, AlphabetLadder, Letter, Sym, TailRule, VarSeq, VariableWord, X};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub name: String,
    pub coloring: ColoringOracle,
    pub ladder: AlphabetLadder,
}

pub fn ladders() -> Vec<AlphabetLadder> {
    ["2", "3", "2,3+"].iter().map(|s| s.parse().unwrap()).collect()
}

/// Letters any level of the ladder can use, up to level `depth`.
pub fn union_letters(ladder: &AlphabetLadder, depth: usize) -> Alphabet {
    ladder.level(depth)
}

fn random_dfa(r: &mut ChaCha8Rng, letters: &Alphabet) -> ColoringOracle {
    let states = r.gen_range(2..=4);
    let q = r.gen_range(2..=3);
    let mut transitions = Vec::new();
    for s in 0..states {
        for &l in letters.letters() {
            transitions.push((s, l, r.gen_range(0..states)));
        }
    }
    let colors = (0..states).map(|_| Some(r.gen_range(1..=q))).collect();
    dfa_coloring(DfaSpec { q, states, start: 0, letters: letters.clone(), transitions, colors }).unwrap()
}

fn random_table(r: &mut ChaCha8Rng, letters: &Alphabet) -> ColoringOracle {
    let q = r.gen_range(2..=3);
    let mut entries = BTreeMap::new();
    for _ in 0..r.gen_range(4..=12) {
        let len = r.gen_range(0..=6);
        let w: Vec<Letter> = (0..len).map(|_| *letters.letters().choose(r).unwrap()).collect();
        entries.insert(w, r.gen_range(1..=q));
    }
    let table = PrefixTable { horizon: 6, default: r.gen_range(1..=q), entries };
    ColoringOracle::prefix_table(q, letters.clone(), table).unwrap()
}

/// Builtins over each ladder, then seeded random DFA and prefix-table colorings.
pub fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    let builtins: Vec<(&str, Vec<u32>)> = vec![
        ("length-mod", vec![2]),
        ("length-mod", vec![3]),
        ("last-letter", vec![2]),
        ("last-letter", vec![3]),
        ("letter-count-mod", vec![0, 2]),
        ("letter-count-mod", vec![1, 2]),
        ("letter-count-mod", vec![0, 3]),
        ("letter-count-mod", vec![1, 3]),
    ];
    for ladder in ladders() {
        for (name, params) in &builtins {
            out.push(Instance {
                name: format!("{name}{params:?} on {ladder}"),
                coloring: builtin(name, params).unwrap(),
                ladder: ladder.clone(),
            });
        }
    }
    let mut r = rng(0x5eed);
    for i in 0..20 {
        let ladder = ladders()[i % 3].clone();
        let letters = union_letters(&ladder, 1);
        out.push(Instance { name: format!("dfa #{i} on {ladder}"), coloring: random_dfa(&mut r, &letters), ladder });
    }
    for i in 0..14 {
        let ladder = ladders()[i % 3].clone();
        let letters = union_letters(&ladder, 1);
        out.push(Instance { name: format!("table #{i} on {ladder}"), coloring: random_table(&mut r, &letters), ladder });
    }
    out
}

/// Ladder with level sizes in `1..=3`, nondecreasing, constant tail.
pub fn random_ladder(r: &mut ChaCha8Rng) -> AlphabetLadder {
    let mut sizes = Vec::new();
    let mut p = r.gen_range(1..=3);
    for _ in 0..r.gen_range(1..=3) {
        sizes.push(p);
        p = r.gen_range(p..=3);
    }
    AlphabetLadder::from_sizes(&sizes, TailRule::Constant).unwrap()
}

pub fn random_var_word(r: &mut ChaCha8Rng, alphabet: &Alphabet, max_len: usize) -> VariableWord {
    let len = r.gen_range(1..=max_len);
    let mut syms: Vec<Sym> = (0..len)
        .map(|_| if r.gen_bool(0.35) { X } else { *alphabet.letters().choose(r).unwrap() })
        .collect();
    if !syms.contains(&X) {
        let i = r.gen_range(0..len);
        syms[i] = X;
    }
    VariableWord::new(syms).unwrap()
}

/// All words over `letters` of length at most `max_len`, shortest first.
pub fn all_words(letters: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Substitutes `b` (a letter or `X`) into `w`.
pub fn subst(w: &VariableWord, b: Sym) -> Vec<Sym> {
    w.symbols().iter().map(|&s| if s == X { b } else { s }).collect()
}

/// Every symbol tuple over the given choice lists, lexicographic.
pub fn tuples(choices: &[Vec<Sym>]) -> Vec<Vec<Sym>> {
    let mut out = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|t| {
                c.iter().map(move |&s| {
                    let mut t = t.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
    }
    out
}

/// Span by definition: products over every index subset (reduced: only the
/// full one), letters from the window alphabets, plus `x` for variable kinds.
pub fn brute_span(seq: &[VariableWord], alphabets: &[Alphabet], extracted: bool, variable: bool) -> Vec<Vec<Sym>> {
    let n = seq.len();
    let subsets: Vec<Vec<usize>> = if extracted {
        (1u32..1 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
    } else {
        vec![(0..n).collect()]
    };
    let mut out = std::collections::BTreeSet::new();
    for sub in subsets {
        let choices: Vec<Vec<Sym>> = sub
            .iter()
            .map(|&i| {
                let mut c: Vec<Sym> = alphabets[i].letters().to_vec();
                if variable {
                    c.push(X);
                }
                c
            })
            .collect();
        for t in tuples(&choices) {
            if variable && !t.contains(&X) {
                continue;
            }
            let w: Vec<Sym> = sub.iter().zip(&t).flat_map(|(&i, &b)| subst(&seq[i], b)).collect();
            out.insert(w);
        }
    }
    out.into_iter().collect()
}

/// A random block subsequence of `s` at level `k`: items of widths `1..=3`
/// from consecutive windows, with at least one `x` per item. Extracted items
/// may leave windows out. Returns the items and their window starts.
pub fn random_blocks(
    r: &mut ChaCha8Rng,
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    extracted: bool,
    count: usize,
) -> (Vec<VariableWord>, Vec<usize>) {
    let mut items = Vec::new();
    let mut cuts = vec![0usize];
    let mut pos = 0usize;
    while items.len() < count {
        let width = r.gen_range(1..=3);
        if pos + width > s.len() {
            break;
        }
        let mut used: Vec<usize> = (pos..pos + width).collect();
        if extracted {
            used.retain(|_| r.gen_bool(0.7));
            if used.is_empty() {
                used.push(pos + r.gen_range(0..width));
            }
        }
        let var_at = used[r.gen_range(0..used.len())];
        let mut syms = Vec::new();
        for &j in &used {
            let level = ladder.level(k + j);
            let b = if j == var_at || r.gen_bool(0.3) { X } else { *level.letters().choose(r).unwrap() };
            syms.extend(subst(s.get(j).unwrap(), b));
        }
        items.push(VariableWord::new(syms).unwrap());
        pos += width;
        cuts.push(pos);
    }
    (items, cuts)
}
