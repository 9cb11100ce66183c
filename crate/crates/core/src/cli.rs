//! Command-line driver.
//!
//! Exit codes: 0 success, 2 verified false or nothing found, 3 budget
//! exhausted, 4 usage or parse error. Transcript lines go to the output
//! stream, each starting with a fixed tag (`run:`, `step:`, `result:`, ...).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::coloring::{load_coloring, parse_builtin_ref, ColoringOracle};
use crate::hj::{find_monochromatic_line, hj_number, HjError, HjLimits};
use crate::largeness::{
    carlson_extract, cs_extract, largeness_probe, load_certificate, save_certificate,
    verify_certificate, CertError, CertKind, Certificate, ColoringRef, ExtractMode, LargenessError, Limits, Meter,
    ProbeMode, SetOracle, Verdict,
};
use crate::span::{enumerate_span, selection_count, SpanError, SpanKind, SpanQuery};
use crate::word::{Alphabet, AlphabetLadder, TailRule, VarSeq, VariableWord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "varwords", version, about = "Variable-word search, extraction and verification")]
pub struct RunConfig {
    /// Worker threads for inner searches.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search {0..p-1}^n for a monochromatic line.
    HjSearch {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coloring: String,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least N at which every q-coloring of {0..p-1}^N has a monochromatic line.
    HjNumber {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
        /// Skip colorings that only rename colors.
        #[arg(long)]
        prune: bool,
    },
    /// Extract a monochromatic reduced-span certificate.
    CsExtract(ExtractArgs),
    /// Extract a monochromatic extracted-span certificate.
    CarlsonExtract(ExtractArgs),
    /// Re-verify a certificate file.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
    },
    /// List a span of a finite sequence of variable words.
    EnumerateSpan {
        /// Space-separated variable words.
        #[arg(long)]
        words: String,
        #[arg(long, default_value = "2")]
        ladder: String,
        /// Level offset of the first word.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value = "reduced-constant")]
        kind: String,
        /// Largest span size printed.
        #[arg(long, default_value_t = 100_000)]
        cap: u64,
    },
    /// Probe whether a color class looks large along a periodic sequence.
    ProbeLargeness {
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        color: u32,
        #[arg(long, default_value = "2")]
        ladder: String,
        #[arg(long, default_value = "reduced-shifted")]
        mode: String,
        /// Words repeated to form the probed sequence.
        #[arg(long, default_value = "x")]
        words: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 6)]
        rounds: usize,
        #[arg(long, default_value_t = 1024)]
        seq_len: usize,
    },
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// `builtin:name[:param...]` or a coloring document path.
    #[arg(long)]
    coloring: String,
    #[arg(long, default_value = "2")]
    ladder: String,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value = "direct")]
    mode: String,
    /// Base coloring evaluations allowed.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Longest block tried by the direct search.
    #[arg(long, default_value_t = 6)]
    max_word_len: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<LargenessError> for Failure {
    fn from(e: LargenessError) -> Self {
        let code = match e {
            LargenessError::BudgetExhausted { .. } => EXIT_BUDGET,
            LargenessError::Hj(HjError::CapExceeded { .. }) => EXIT_BUDGET,
            LargenessError::Span(SpanError::CapExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_FALSE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<HjError> for Failure {
    fn from(e: HjError) -> Self {
        let code = if matches!(e, HjError::CapExceeded { .. }) { EXIT_BUDGET } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        let code = if matches!(e, CertError::CapExceeded { .. }) { EXIT_BUDGET } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<SpanError> for Failure {
    fn from(e: SpanError) -> Self {
        let code = if matches!(e, SpanError::CapExceeded { .. }) { EXIT_BUDGET } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

/// Runs with the process's standard output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_with(args, &mut stdout.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(&cfg, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(out, "error: {}", f.message);
            f.code
        }
    }
}

fn coloring_arg(s: &str) -> Result<ColoringOracle, Failure> {
    if s.starts_with("builtin:") {
        return parse_builtin_ref(s).map_err(|e| Failure::usage(e.to_string()));
    }
    let doc = fs::read_to_string(s).map_err(|e| Failure::usage(format!("{s}: {e}")))?;
    load_coloring(&doc).map_err(|e| Failure::usage(format!("{s}: {e}")))
}

fn ladder_arg(s: &str) -> Result<AlphabetLadder, Failure> {
    s.parse().map_err(|e| Failure::usage(format!("ladder {s:?}: {e}")))
}

fn words_arg(s: &str) -> Result<Vec<VariableWord>, Failure> {
    let words: Vec<VariableWord> = s
        .split_whitespace()
        .map(|w| w.parse().map_err(|e| Failure::usage(format!("word {w:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    if words.is_empty() {
        return Err(Failure::usage("no words given"));
    }
    Ok(words)
}

fn write_cert(cert: &Certificate, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = save_certificate(cert);
    match path {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let _ = writeln!(out, "output: certificate written to {}", p.display());
        }
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(())
}

fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    if cfg.workers == 0 {
        return Err(Failure::usage("--workers must be positive"));
    }
    match &cfg.command {
        Command::HjSearch { p, n, coloring, cap, out: path } => {
            let c = coloring_arg(coloring)?;
            if *p == 0 {
                return Err(Failure::usage("--p must be positive"));
            }
            let alphabet = Alphabet::range(*p);
            let limits = HjLimits { cap: *cap, workers: cfg.workers, ..HjLimits::default() };
            let _ = writeln!(out, "run: hj-search p = {p}, n = {n}, coloring {}", c.describe());
            match find_monochromatic_line(*n, &alphabet, &|w| c.evaluate(w), &limits)? {
                Some(w) => {
                    let _ = writeln!(out, "result: line {} in color {}", w.line, w.color);
                    let cert = Certificate {
                        kind: CertKind::Hj,
                        ladder: AlphabetLadder::new(vec![alphabet], TailRule::Constant).expect("one level"),
                        depth: *n,
                        words: vec![w.line],
                        color: w.color,
                        coloring: ColoringRef::from_oracle(&c),
                        budget: *cap,
                        mode: "exhaustive".into(),
                        transcript: Vec::new(),
                    };
                    write_cert(&cert, path.as_ref(), out)?;
                    Ok(EXIT_OK)
                }
                None => {
                    let _ = writeln!(out, "result: no monochromatic line");
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::HjNumber { p, q, nmax, cap, prune } => {
            let limits = HjLimits { cap: *cap, workers: cfg.workers, prune_color_symmetry: *prune };
            let r = hj_number(*p, *q, *nmax, &limits)?;
            for (n, table) in &r.line_free {
                let _ = writeln!(out, "line-free: N = {n}, coloring {table:?}");
            }
            for n in &r.holds_at {
                let _ = writeln!(out, "holds: N = {n}");
            }
            let _ = writeln!(out, "checked: {} colorings", r.colorings_checked);
            match r.least {
                Some(n) => {
                    let _ = writeln!(out, "{n}");
                    Ok(EXIT_OK)
                }
                None => {
                    let _ = writeln!(out, "result: none up to {nmax}");
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::CsExtract(a) => extract_cmd(CertKind::Cs, a, cfg.workers, out),
        Command::CarlsonExtract(a) => extract_cmd(CertKind::Carlson, a, cfg.workers, out),
        Command::Verify { cert, cap } => {
            let text = fs::read_to_string(cert).map_err(|e| Failure::usage(format!("{}: {e}", cert.display())))?;
            let c = load_certificate(&text)?;
            let report = verify_certificate(&c, *cap)?;
            let _ = writeln!(out, "checked: {} products", report.products_checked);
            let _ = writeln!(out, "structure: {}", if report.structure { "ok" } else { "not checked or failed" });
            if report.ok {
                let _ = writeln!(out, "result: verified");
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(out, "result: failed: {}", report.failure.unwrap_or_default());
                Ok(EXIT_FALSE)
            }
        }
        Command::EnumerateSpan { words, ladder, k, kind, cap } => {
            let words = words_arg(words)?;
            let ladder = ladder_arg(ladder)?;
            let kind: SpanKind = kind.parse().map_err(Failure::usage)?;
            let q = SpanQuery::over_ladder(words, &ladder, *k, kind);
            let _ = writeln!(out, "selections: {}", selection_count(&q));
            let span = enumerate_span(&q, *cap)?;
            for w in &span {
                let _ = writeln!(out, "{w}");
            }
            let _ = writeln!(out, "count: {}", span.len());
            Ok(EXIT_OK)
        }
        Command::ProbeLargeness { coloring, color, ladder, mode, words, k, budget, rounds, seq_len } => {
            let c = coloring_arg(coloring)?;
            if *color == 0 || *color > c.q() {
                return Err(Failure::usage(format!("color must lie in 1..={}", c.q())));
            }
            let ladder = ladder_arg(ladder)?;
            let mode: ProbeMode = mode.parse().map_err(Failure::usage)?;
            let words = words_arg(words)?;
            let seq = VarSeq::periodic(Vec::new(), words, *seq_len);
            let e = SetOracle::color_class(&c, *color);
            let limits = Limits { budget: *budget, probe_rounds: *rounds, workers: cfg.workers, ..Limits::default() };
            let meter = Meter::new(*budget);
            let ev = largeness_probe(&e, &seq, *k, &ladder, mode, &limits, &meter);
            for line in &ev.transcript {
                let _ = writeln!(out, "probe: {line}");
            }
            let _ = writeln!(out, "checked: {} extensions, {} evaluations", ev.extensions_checked, ev.budget_used);
            let _ = writeln!(out, "result: {}", ev.verdict);
            Ok(match ev.verdict {
                Verdict::FoundPrefix => EXIT_OK,
                Verdict::CounterexamplePrefix => EXIT_FALSE,
                Verdict::BudgetExhausted => EXIT_BUDGET,
            })
        }
    }
}

fn extract_cmd(kind: CertKind, a: &ExtractArgs, workers: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let c = coloring_arg(&a.coloring)?;
    let ladder = ladder_arg(&a.ladder)?;
    let mode: ExtractMode = a.mode.parse().map_err(Failure::usage)?;
    if a.budget == 0 {
        return Err(Failure::usage("--budget must be positive"));
    }
    let limits = Limits { budget: a.budget, direct_max_len: a.max_word_len, workers, ..Limits::default() };
    let x = match kind {
        CertKind::Cs => cs_extract(&c, &ladder, a.depth, mode, &limits),
        _ => carlson_extract(&c, &ladder, a.depth, mode, &limits),
    }?;
    for line in &x.certificate.transcript {
        let _ = writeln!(out, "step: {line}");
    }
    let words: Vec<String> = x.certificate.words.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "result: {} in color {}", words.join(" "), x.certificate.color);
    write_cert(&x.certificate, a.out.as_ref(), out)?;
    Ok(EXIT_OK)
}
