//! Finite Hales–Jewett: monochromatic combinatorial lines in `A^n`.
//!
//! Words of `A^n` are addressed by mixed-radix rank (first letter most
//! significant, letters by position in the sorted alphabet), so a coloring is
//! a dense table. Lines are enumerated lexicographically over `A ∪ {x}` with
//! `x` after every letter; the first monochromatic line wins.

use std::thread;

use thiserror::Error;

use crate::word::{Alphabet, Letter, Sym, VariableWord, X};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HjError {
    #[error("needs {count} evaluations, cap is {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HjLimits {
    /// Upper bound on candidate evaluations (lines, or colorings for
    /// [`hj_number`]).
    pub cap: u64,
    pub workers: usize,
    /// Only visit colorings whose colors first appear in increasing order.
    /// Sound because the line property ignores color names.
    pub prune_color_symmetry: bool,
}

impl Default for HjLimits {
    fn default() -> Self {
        HjLimits { cap: 10_000_000, workers: 1, prune_color_symmetry: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HjWitness {
    pub n: usize,
    pub alphabet: Alphabet,
    pub line: VariableWord,
    pub color: u32,
}

pub fn line_count(p: usize, n: usize) -> u128 {
    let pow = |b: u128| (0..n).fold(1u128, |acc, _| acc.saturating_mul(b));
    pow(p as u128 + 1) - pow(p as u128)
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Rank of `word` in `alphabet^n`; `None` if a letter is outside the alphabet.
pub fn rank(word: &[Letter], alphabet: &Alphabet) -> Option<usize> {
    let p = alphabet.len();
    word.iter().try_fold(0usize, |acc, &l| {
        let i = alphabet.letters().binary_search(&l).ok()?;
        Some(acc * p + i)
    })
}

pub fn unrank(mut r: usize, n: usize, alphabet: &Alphabet) -> Vec<Letter> {
    let p = alphabet.len();
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = alphabet.letters()[r % p];
        r /= p;
    }
    out
}

/// Colors of every word of `alphabet^n` in rank order.
pub fn color_table(
    n: usize,
    alphabet: &Alphabet,
    coloring: &(dyn Fn(&[Letter]) -> u32 + Sync),
    cap: u64,
) -> Result<Vec<u32>, HjError> {
    let size = checked_pow(alphabet.len(), n)
        .filter(|&s| s as u64 <= cap)
        .ok_or(HjError::CapExceeded { count: (alphabet.len() as u128).saturating_pow(n as u32), cap })?;
    Ok((0..size).map(|r| coloring(&unrank(r, n, alphabet))).collect())
}

/// A line in index space: symbols are positions in the alphabet or `X`.
/// Returns the first line (lexicographic, `x` last) all of whose points carry
/// the same color `c` with `accept(c)`.
pub(crate) fn find_line_in_table(
    n: usize,
    p: usize,
    table: &[u32],
    accept: &(dyn Fn(u32) -> bool + Sync),
    workers: usize,
) -> Option<(Vec<Sym>, u32)> {
    let total = checked_pow(p + 1, n).expect("table size already bounded");
    let workers = workers.max(1).min(total.max(1));
    if workers == 1 {
        return scan_lines(n, p, table, accept, 0, total).map(|(_, l, c)| (l, c));
    }
    let chunk = total.div_ceil(workers);
    let found: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                scope.spawn(move || scan_lines(n, p, table, accept, lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("line worker panicked")).collect()
    });
    found.into_iter().flatten().min_by_key(|(i, _, _)| *i).map(|(_, l, c)| (l, c))
}

/// Scans lines with base-(p+1) index in `[lo, hi)`; digit `p` is `x`.
fn scan_lines(
    n: usize,
    p: usize,
    table: &[u32],
    accept: &(dyn Fn(u32) -> bool + Sync),
    lo: usize,
    hi: usize,
) -> Option<(usize, Vec<Sym>, u32)> {
    if lo >= hi {
        return None;
    }
    let mut digits = vec![0usize; n];
    let mut r = lo;
    for d in digits.iter_mut().rev() {
        *d = r % (p + 1);
        r /= p + 1;
    }
    let mut weights = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        weights[i] = weights[i + 1] * p;
    }
    for idx in lo..hi {
        let mut base = 0usize;
        let mut step = 0usize;
        for i in 0..n {
            if digits[i] == p {
                step += weights[i];
            } else {
                base += digits[i] * weights[i];
            }
        }
        if step > 0 {
            let c = table[base];
            if accept(c) && (1..p).all(|a| table[base + a * step] == c) {
                let line = digits.iter().map(|&d| if d == p { X } else { d as Sym }).collect();
                return Some((idx, line, c));
            }
        }
        for i in (0..n).rev() {
            digits[i] += 1;
            if digits[i] <= p {
                break;
            }
            digits[i] = 0;
        }
    }
    None
}

/// Maps an index-space line back to letters of `alphabet`.
pub(crate) fn line_to_word(line: &[Sym], alphabet: &Alphabet) -> VariableWord {
    let syms = line.iter().map(|&s| if s == X { X } else { alphabet.letters()[s as usize] }).collect();
    VariableWord::new(syms).expect("line holds x")
}

/// Exhaustive search for a monochromatic line in `alphabet^n`.
pub fn find_monochromatic_line(
    n: usize,
    alphabet: &Alphabet,
    coloring: &(dyn Fn(&[Letter]) -> u32 + Sync),
    limits: &HjLimits,
) -> Result<Option<HjWitness>, HjError> {
    if n == 0 {
        return Err(HjError::Invalid("dimension must be at least 1".into()));
    }
    let count = line_count(alphabet.len(), n);
    if count > limits.cap as u128 {
        return Err(HjError::CapExceeded { count, cap: limits.cap });
    }
    let table = color_table(n, alphabet, coloring, limits.cap)?;
    let hit = find_line_in_table(n, alphabet.len(), &table, &|_| true, limits.workers);
    Ok(hit.map(|(line, color)| HjWitness { n, alphabet: alphabet.clone(), line: line_to_word(&line, alphabet), color }))
}

pub fn verify_hj_witness(w: &HjWitness, coloring: &dyn Fn(&[Letter]) -> u32) -> bool {
    w.line.len() == w.n
        && w.line.symbols().iter().all(|&s| s == X || w.alphabet.contains(s))
        && w.alphabet.letters().iter().all(|&a| coloring(w.line.substitute(a).letters()) == w.color)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HjNumber {
    /// Least `N <= n_max` at which every coloring has a monochromatic line.
    pub least: Option<usize>,
    /// Every checked `N` at which the universal property holds.
    pub holds_at: Vec<usize>,
    /// For each checked `N` where it fails, the first line-free coloring (colors 1-based, rank order).
    pub line_free: Vec<(usize, Vec<u32>)>,
    /// Colorings examined; the scan of a dimension stops at its first line-free coloring.
    pub colorings_checked: u128,
}

/// Number of colorings `hj_number` visits for one dimension (before pruning).
pub fn coloring_count(p: usize, q: usize, n: usize) -> u128 {
    match checked_pow(p, n) {
        Some(size) if size < 128 => (q as u128).checked_pow(size as u32).unwrap_or(u128::MAX),
        _ => u128::MAX,
    }
}

/// Exhausts all `q`-colorings of `{0..p-1}^N` for `N = 1..=n_max`.
pub fn hj_number(p: usize, q: usize, n_max: usize, limits: &HjLimits) -> Result<HjNumber, HjError> {
    if p == 0 || q == 0 || n_max == 0 {
        return Err(HjError::Invalid("p, q and n_max must be positive".into()));
    }
    let total = (1..=n_max).fold(0u128, |acc, n| acc.saturating_add(coloring_count(p, q, n)));
    if total > limits.cap as u128 {
        return Err(HjError::CapExceeded { count: total, cap: limits.cap });
    }
    let mut out = HjNumber { least: None, holds_at: Vec::new(), line_free: Vec::new(), colorings_checked: 0 };
    for n in 1..=n_max {
        let lines = line_points(p, n);
        let size = checked_pow(p, n).unwrap();
        let colorings = coloring_count(p, q, n) as u64;
        let (checked, bad) = search_colorings(size, q, colorings, &lines, limits);
        out.colorings_checked += checked as u128;
        match bad {
            None => {
                out.holds_at.push(n);
                out.least.get_or_insert(n);
            }
            Some(table) => out.line_free.push((n, table.into_iter().map(|c| c + 1).collect())),
        }
    }
    Ok(out)
}

/// Points of every line of `{0..p-1}^n`, as ranks.
fn line_points(p: usize, n: usize) -> Vec<Vec<usize>> {
    let total = checked_pow(p + 1, n).unwrap();
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        if digits.contains(&p) {
            let pts = (0..p)
                .map(|a| digits.iter().fold(0, |acc, &d| acc * p + if d == p { a } else { d }))
                .collect();
            out.push(pts);
        }
        for i in (0..n).rev() {
            digits[i] += 1;
            if digits[i] <= p {
                break;
            }
            digits[i] = 0;
        }
    }
    out
}

fn has_mono_line(table: &[u32], lines: &[Vec<usize>]) -> bool {
    lines.iter().any(|pts| pts.iter().all(|&i| table[i] == table[pts[0]]))
}

/// Returns (colorings visited, first line-free coloring by counter index).
fn search_colorings(
    size: usize,
    q: usize,
    colorings: u64,
    lines: &[Vec<usize>],
    limits: &HjLimits,
) -> (u64, Option<Vec<u32>>) {
    let workers = (limits.workers.max(1) as u64).min(colorings.max(1));
    let chunk = colorings.div_ceil(workers);
    let run = |lo: u64, hi: u64| -> (u64, Option<(u64, Vec<u32>)>) {
        let mut table = vec![0u32; size];
        let mut r = lo;
        for slot in table.iter_mut().rev() {
            *slot = (r % q as u64) as u32;
            r /= q as u64;
        }
        let mut visited = 0;
        for idx in lo..hi {
            let canonical = !limits.prune_color_symmetry || is_restricted_growth(&table);
            if canonical {
                visited += 1;
                if !has_mono_line(&table, lines) {
                    return (visited, Some((idx, table)));
                }
            }
            for slot in table.iter_mut().rev() {
                *slot += 1;
                if (*slot as usize) < q {
                    break;
                }
                *slot = 0;
            }
        }
        (visited, None)
    };
    let results: Vec<_> = if workers == 1 {
        vec![run(0, colorings)]
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(colorings);
                    scope.spawn(move || run(lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("coloring worker panicked")).collect()
        })
    };
    // chunks are in index order; count up to the chunk holding the first hit
    let mut visited = 0;
    for (v, bad) in results {
        visited += v;
        if let Some((_, table)) = bad {
            return (visited, Some(table));
        }
    }
    (visited, None)
}

fn is_restricted_growth(table: &[u32]) -> bool {
    let mut next = 0u32;
    for &c in table {
        if c > next {
            return false;
        }
        if c == next {
            next += 1;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_of_ones(w: &[Letter]) -> u32 {
        1 + w.iter().filter(|&&l| l == 1).count() as u32 % 2
    }

    /// Reference: all lines by brute force, no tables.
    fn brute_lines(n: usize, a: &Alphabet, c: &dyn Fn(&[Letter]) -> u32) -> Vec<String> {
        let mut syms: Vec<Sym> = a.letters().to_vec();
        syms.push(X);
        let mut out = Vec::new();
        let mut stack = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == n {
                if let Ok(v) = VariableWord::new(w) {
                    let cols: Vec<u32> = a.letters().iter().map(|&l| c(v.substitute(l).letters())).collect();
                    if cols.iter().all(|&x| x == cols[0]) {
                        out.push(v.to_string());
                    }
                }
                continue;
            }
            for &s in syms.iter().rev() {
                let mut next = w.clone();
                next.push(s);
                stack.push(next);
            }
        }
        out
    }

    #[test]
    fn parity_example_finds_xx() {
        let a = Alphabet::range(2);
        let w = find_monochromatic_line(2, &a, &parity_of_ones, &HjLimits::default()).unwrap().unwrap();
        assert_eq!(w.line.to_string(), "xx");
        assert_eq!(w.color, 1);
        assert!(verify_hj_witness(&w, &parity_of_ones));
        let mut bad = w.clone();
        bad.color = 2;
        assert!(!verify_hj_witness(&bad, &parity_of_ones));
        assert_eq!(brute_lines(2, &a, &parity_of_ones), ["xx"]);
    }

    #[test]
    fn dimension_one() {
        let a = Alphabet::range(2);
        let split = |w: &[Letter]| 1 + w[0] as u32;
        assert!(find_monochromatic_line(1, &a, &split, &HjLimits::default()).unwrap().is_none());
        let one = Alphabet::range(1);
        assert!(find_monochromatic_line(1, &one, &split, &HjLimits::default()).unwrap().is_some());
    }

    #[test]
    fn solver_matches_brute_force_first_line() {
        // a few deterministic pseudo-random colorings of {0,1,2}^3
        for seed in 0..40u32 {
            let a = Alphabet::range(3);
            let c = move |w: &[Letter]| {
                let h = w.iter().fold(seed.wrapping_mul(2654435761), |h, &l| h.rotate_left(5) ^ (l as u32 + 1).wrapping_mul(40503));
                1 + h % 3
            };
            let got = find_monochromatic_line(3, &a, &c, &HjLimits::default()).unwrap();
            let all = brute_lines(3, &a, &c);
            assert_eq!(got.map(|w| w.line.to_string()), all.first().cloned(), "seed {seed}");
            let par = find_monochromatic_line(3, &a, &c, &HjLimits { workers: 4, ..HjLimits::default() }).unwrap();
            assert_eq!(par.map(|w| w.line.to_string()), all.first().cloned());
        }
    }

    #[test]
    fn line_cap_reports_exact_count() {
        let a = Alphabet::range(2);
        let lim = HjLimits { cap: 10, ..HjLimits::default() };
        let err = find_monochromatic_line(3, &a, &parity_of_ones, &lim).unwrap_err();
        assert_eq!(err, HjError::CapExceeded { count: 19, cap: 10 });
    }

    #[test]
    fn hj_two_two() {
        let r = hj_number(2, 2, 3, &HjLimits::default()).unwrap();
        assert_eq!(r.least, Some(2));
        assert_eq!(r.holds_at, vec![2, 3]);
        assert_eq!(r.line_free, vec![(1, vec![1, 2])]);
        assert_eq!(r.colorings_checked, 2 + 16 + 256);
    }

    #[test]
    fn hj_trivial_alphabet() {
        for q in 1..=5 {
            assert_eq!(hj_number(1, q, 1, &HjLimits::default()).unwrap().least, Some(1));
        }
    }

    #[test]
    fn pruning_and_workers_do_not_change_answers() {
        for (p, q, n) in [(2, 2, 3), (2, 3, 2), (3, 2, 2)] {
            let plain = hj_number(p, q, n, &HjLimits::default()).unwrap();
            let pruned =
                hj_number(p, q, n, &HjLimits { prune_color_symmetry: true, workers: 3, ..HjLimits::default() }).unwrap();
            assert_eq!(plain.least, pruned.least);
            assert_eq!(plain.holds_at, pruned.holds_at);
            assert_eq!(plain.line_free, pruned.line_free);
            assert!(pruned.colorings_checked <= plain.colorings_checked);
        }
    }

    #[test]
    fn hj_two_three_at_two_by_oracle() {
        // independent exhaustive check over all 81 tables of {0,1}^2
        let a = Alphabet::range(2);
        let mut every_has_line = true;
        for code in 0..81u32 {
            let c = move |w: &[Letter]| {
                let r = (w[0] * 2 + w[1]) as u32;
                1 + code / 3u32.pow(3 - r) % 3
            };
            if brute_lines(2, &a, &c).is_empty() {
                every_has_line = false;
            }
        }
        let r = hj_number(2, 3, 2, &HjLimits::default()).unwrap();
        assert_eq!(r.holds_at.contains(&2), every_has_line);
        assert!(!every_has_line);
        assert_eq!(r.least, None);
    }

    #[test]
    fn hj_number_cap() {
        let lim = HjLimits { cap: 100, ..HjLimits::default() };
        assert!(matches!(hj_number(2, 2, 3, &lim), Err(HjError::CapExceeded { count: 276, cap: 100 })));
    }
}
