//! Bounded largeness probing and the two extraction pipelines.
//!
//! Largeness quantifies over every infinite block subsequence and cannot be
//! decided. Everything here works on budgeted prefixes: a probe either finds
//! the finite prefix the step lemmas need, builds a failure-driven
//! counterexample, or gives up. No routine claims unconditional largeness.

mod cert;
mod extract;
mod fusion;
mod mono;
mod probe;
mod refine;
mod set;
mod step;

use thiserror::Error;

use crate::hj::HjError;
use crate::span::SpanError;
use crate::word::{Alphabet, Letter, SeqError};

pub use cert::{
    load_certificate, save_certificate, verify_carlson_certificate, verify_certificate, verify_cs_certificate,
    CertError, CertKind, Certificate, ColoringRef, VerifyReport,
};
pub use extract::{carlson_extract, cs_extract, ExtractMode, Extraction};
pub use fusion::{fusion_reindex, FusionStep};
pub use mono::{one_mono_word, one_mono_word_literal, MonoWord};
pub use probe::{largeness_probe, LargenessEvidence, ProbeMode, Verdict};
pub use refine::{color_refine, BlockMap, Refinement};
pub use set::{ef_quotient, Meter, SetOracle};
pub use step::{carlson_step, cs_step, StepResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LargenessError {
    #[error("budget exhausted after {used} of {limit} evaluations")]
    BudgetExhausted { used: u64, limit: u64 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("probe built a counterexample prefix of {len} blocks; the set is not large here")]
    Counterexample { len: usize },
    #[error("step witness inconsistent: {0}")]
    WitnessInconsistent(String),
    #[error("step witness too short: {0}")]
    InsufficientWitness(String),
    #[error("result failed verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Hj(#[from] HjError),
}

/// Search bounds shared by every routine in this module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Base coloring evaluations allowed in total.
    pub budget: u64,
    /// Failure-driven rounds a probe runs before reporting a counterexample.
    pub probe_rounds: usize,
    /// Windows past the current cover examined for extensions.
    pub lookahead: usize,
    /// Largest trial dimension in the step lemmas.
    pub max_dim: usize,
    /// Windows scanned when looking for a single monochromatic word.
    pub mono_windows: usize,
    /// Largest block count tried during assembly.
    pub assembly_r: usize,
    /// Items of the seed sequence `(x, x, ...)`.
    pub seq_len: usize,
    /// Passes over the parts in color refinement.
    pub refine_passes: usize,
    /// Longest word considered by the direct search.
    pub direct_max_len: usize,
    pub workers: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            budget: 50_000_000,
            probe_rounds: 6,
            lookahead: 3,
            max_dim: 3,
            mono_windows: 5,
            assembly_r: 3,
            seq_len: 4096,
            refine_passes: 2,
            direct_max_len: 6,
            workers: 1,
        }
    }
}

/// Every tuple of `∏ alphabets` in lexicographic order. The empty product
/// has one (empty) tuple.
pub(crate) fn letter_tuples(alphabets: &[Alphabet]) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for a in alphabets {
        out = out
            .into_iter()
            .flat_map(|t| {
                a.letters().iter().map(move |&l| {
                    let mut t = t.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    out
}
