//! Color refinement: pass to subsequences until one part is found large.

use crate::word::{AlphabetLadder, VarSeq, VariableWord};

use super::{largeness_probe, LargenessError, LargenessEvidence, Limits, Meter, ProbeMode, SetOracle, Verdict};

/// Where the items of a refined sequence sit in the sequence it came from.
/// Item `i < h` spans windows `head[i]..head[i+1]`, where `h = head.len() - 1`;
/// later items each take `stride` windows continuing from `head[h]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMap {
    head: Vec<usize>,
    stride: usize,
}

impl BlockMap {
    pub fn identity() -> Self {
        BlockMap { head: vec![0], stride: 1 }
    }

    pub fn start(&self, i: usize) -> usize {
        let h = self.head.len() - 1;
        if i <= h {
            self.head[i]
        } else {
            self.head[h] + (i - h) * self.stride
        }
    }

    /// Start windows of items `0..=n`.
    pub fn cuts(&self, n: usize) -> Vec<usize> {
        (0..=n).map(|i| self.start(i)).collect()
    }

    /// The map after replacing the current items by blocks: the first ones
    /// delimited by `cuts`, the rest taking `stride` current items each.
    pub fn compose(&self, cuts: &[usize], stride: usize) -> BlockMap {
        let h = self.head.len() - 1;
        let mut head: Vec<usize> = cuts.iter().map(|&c| self.start(c)).collect();
        let mut pos = *cuts.last().unwrap();
        while pos < h {
            pos += stride;
            head.push(self.start(pos));
        }
        BlockMap { head, stride: stride * self.stride }
    }

    /// The map after dropping the first `m` items.
    pub fn skip(&self, m: usize) -> BlockMap {
        let h = self.head.len() - 1;
        let base = self.start(m);
        let head = if m >= h { vec![0] } else { self.head[m..].iter().map(|c| c - base).collect() };
        BlockMap { head, stride: self.stride }
    }
}

/// A counterexample head continued through the rest of `s`. The last block
/// is repeated while the windows under it repeat; otherwise the rest of `s`
/// follows unchanged. Returns the sequence and the stride of its tail.
fn continue_blocks(s: &VarSeq, items: Vec<VariableWord>, cuts: &[usize]) -> (VarSeq, usize) {
    let cover = *cuts.last().unwrap();
    if items.is_empty() {
        return (s.skip(cover), 1);
    }
    let from = cuts[cuts.len() - 2];
    let width = cover - from;
    let repeats = (s.len() - cover) / width;
    let same = (0..repeats * width).all(|i| s.get(cover + i) == s.get(from + i % width));
    if repeats == 0 || !same {
        return (VarSeq::with_head(items, &s.skip(cover)), 1);
    }
    let last = items.last().unwrap().clone();
    let len = items.len() + repeats;
    (VarSeq::periodic(items, vec![last], len), width)
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub index: usize,
    pub seq: VarSeq,
    /// Position of `seq` inside the input sequence.
    pub map: BlockMap,
    pub evidence: LargenessEvidence,
    pub transcript: Vec<String>,
}

/// Probes the parts in order, replacing the sequence by each rejected
/// part's counterexample blocks, until some part is found large.
pub fn color_refine(
    parts: &[SetOracle],
    s: &VarSeq,
    k: usize,
    ladder: &AlphabetLadder,
    mode: ProbeMode,
    limits: &Limits,
    meter: &Meter,
) -> Result<Refinement, LargenessError> {
    let mut t = s.clone();
    let mut map = BlockMap::identity();
    let mut transcript = Vec::new();
    for pass in 0..limits.refine_passes.max(1) {
        for (i, part) in parts.iter().enumerate() {
            let ev = largeness_probe(part, &t, k, ladder, mode, limits, meter);
            transcript.push(format!("pass {pass} part {i}: {} after {} evaluations", ev.verdict, ev.budget_used));
            match ev.verdict {
                Verdict::FoundPrefix => {
                    return Ok(Refinement { index: i, seq: t, map, evidence: ev, transcript });
                }
                Verdict::CounterexamplePrefix => {
                    let (items, cuts) = ev.counter_blocks().expect("counterexample carries blocks");
                    let cover = *cuts.last().unwrap();
                    transcript.push(format!(
                        "pass {pass} part {i}: rejected, blocks {} over {cover} windows",
                        super::probe::render_blocks(&items)
                    ));
                    let (next, stride) = continue_blocks(&t, items, &cuts);
                    t = next;
                    map = map.compose(&cuts, stride);
                }
                Verdict::BudgetExhausted => {
                    if meter.exhausted() {
                        return Err(LargenessError::BudgetExhausted { used: meter.used(), limit: meter.limit() });
                    }
                }
            }
        }
    }
    Err(LargenessError::Inconclusive(format!("no part certified after {} passes", limits.refine_passes.max(1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::is_reduced_block_subseq;

    fn xs(n: usize) -> VarSeq {
        VarSeq::repeating(VariableWord::var(), n)
    }

    fn parity(odd: bool) -> SetOracle {
        SetOracle::new(if odd { "odd" } else { "even" }, 1, move |w| (w.len() % 2 == 1) == odd)
    }

    fn refine(parts: &[SetOracle], s: &VarSeq, mode: ProbeMode) -> Result<Refinement, LargenessError> {
        let limits = Limits { probe_rounds: 3, ..Limits::default() };
        color_refine(parts, s, 0, &AlphabetLadder::constant(2), mode, &limits, &Meter::new(1_000_000))
    }

    #[test]
    fn first_part_everything() {
        let r = refine(&[SetOracle::all(), SetOracle::empty()], &xs(40), ProbeMode::ReducedShifted).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.seq, xs(40));
        assert_eq!(r.map.cuts(3), [0, 1, 2, 3]);
        assert_eq!(r.map, BlockMap::identity());
    }

    #[test]
    fn parity_classes_pick_one_with_a_recorded_rejection() {
        let s = xs(60);
        let r = refine(&[parity(false), parity(true)], &s, ProbeMode::ReducedShifted).unwrap();
        assert_eq!(r.index, 1);
        assert!(r.transcript.iter().any(|l| l.contains("part 0: rejected")));
        let n = 12;
        let items = r.seq.take(n).unwrap();
        let ladder = AlphabetLadder::constant(2);
        let witness = is_reduced_block_subseq(&items, &s, 0, &ladder).unwrap().expect("block subsequence");
        assert_eq!(witness.cuts, r.map.cuts(n));
        // the evidence replays
        let ev = largeness_probe(&parity(true), &r.seq, 0, &ladder, ProbeMode::ReducedShifted, &Limits { probe_rounds: 3, ..Limits::default() }, &Meter::new(1_000_000));
        assert_eq!(ev.verdict, Verdict::FoundPrefix);
        assert_eq!(ev.prefix, r.evidence.prefix);
    }

    #[test]
    fn single_part_only_when_certified() {
        assert_eq!(refine(&[SetOracle::all()], &xs(40), ProbeMode::Extracted).unwrap().index, 0);
        assert!(matches!(
            refine(&[SetOracle::empty()], &xs(40), ProbeMode::Extracted),
            Err(LargenessError::Inconclusive(_))
        ));
    }

    #[test]
    fn extracted_refinement_of_last_letter() {
        let ends = |l: u16| SetOracle::new("ends", 1, move |w| w.last() == Some(&l));
        let r = refine(&[ends(0), ends(1)], &xs(80), ProbeMode::Extracted).unwrap();
        let items = r.seq.take(6).unwrap();
        let ladder = AlphabetLadder::constant(2);
        let wit = crate::span::is_extracted_block_subseq(&items, &xs(80), 0, &ladder).unwrap().expect("extracted");
        assert!(wit.cuts.iter().zip(r.map.cuts(6)).all(|(a, b)| *a <= b));
    }

    #[test]
    fn map_composition_and_skip() {
        let m = BlockMap::identity().compose(&[0, 2, 5], 1);
        assert_eq!(m.cuts(4), [0, 2, 5, 6, 7]);
        let m2 = m.compose(&[0, 3], 1);
        assert_eq!(m2.cuts(2), [0, 6, 7]);
        assert_eq!(m.skip(1).cuts(3), [0, 3, 4, 5]);
        assert_eq!(m.skip(3).cuts(1), [0, 1]);
        // inner items inside the old head are listed, then the strides multiply
        let m3 = m.compose(&[0, 1], 2);
        assert_eq!(m3.cuts(4), [0, 2, 6, 8, 10]);
        let m4 = BlockMap::identity().compose(&[0, 3], 3).compose(&[0, 1], 2);
        assert_eq!(m4.cuts(3), [0, 3, 9, 15]);
        assert_eq!(m4.skip(2).cuts(2), [0, 6, 12]);
    }
}
