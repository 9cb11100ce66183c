//! Reindexing a chain of nested block subsequences back to the first one.
//!
//! Step `n` records `m_n`, `k_n` and the start windows of the items of `t_n`
//! inside `t_{n-1}` past its first `m_n` items. Item `i` of `t_n` then begins
//! at item `m_n + cuts_n[i]` of `t_{n-1}`. Starting from item 0 of `t_n` and
//! lifting one level at a time gives `p_n`, the window of `t_0` where `t_n`
//! begins. The block `w_{n-1}` sits on items `0..m_n` of `t_{n-1}`, which
//! lift to windows `p_{n-1}..p_n` of `t_0`.

use super::LargenessError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionStep {
    pub m: usize,
    pub k: usize,
    /// `cuts[i]` is the first item of `t_{n-1}.skip(m)` used by item `i` of `t_n`.
    pub cuts: Vec<usize>,
}

/// Returns `p_0 = 0, p_1, ..., p_N` for `N = steps.len()`.
pub fn fusion_reindex(k0: usize, steps: &[FusionStep]) -> Result<Vec<usize>, LargenessError> {
    let mut k = k0;
    for (n, st) in steps.iter().enumerate() {
        let n = n + 1;
        if st.m == 0 {
            return Err(LargenessError::WitnessInconsistent(format!("step {n}: m must be at least 1")));
        }
        if st.k != k + st.m {
            return Err(LargenessError::WitnessInconsistent(format!(
                "step {n}: k = {} but the previous level plus m is {}",
                st.k,
                k + st.m
            )));
        }
        if st.cuts.first() != Some(&0) || st.cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LargenessError::WitnessInconsistent(format!(
                "step {n}: cuts must start at 0 and strictly increase"
            )));
        }
        k = st.k;
    }
    let mut p = vec![0usize];
    for n in 1..=steps.len() {
        let mut idx = 0usize;
        for l in (0..n).rev() {
            let st = &steps[l];
            let c = st.cuts.get(idx).ok_or_else(|| {
                LargenessError::InsufficientWitness(format!("step {} needs cut {idx}, has {}", l + 1, st.cuts.len()))
            })?;
            idx = st.m + c;
        }
        if k0 + idx < steps[n - 1].k {
            return Err(LargenessError::WitnessInconsistent(format!("p_{n} = {idx} violates k_0 + p_n >= k_n")));
        }
        p.push(idx);
    }
    Ok(p)
}
