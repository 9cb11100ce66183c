//! Certificates and their independent verifiers.
//!
//! ```text
//! [certificate]
//! kind = cs                 # cs | carlson | hj
//! ladder = 2+
//! depth = 2
//! words = x x0 x0
//! color = 2
//! budget = 50000000
//! mode = direct
//! coloring = builtin:length-mod:2
//! [transcript]
//! - free text, one line per entry
//! ```
//!
//! With `coloring = inline` the document ends with an `[inline-coloring]`
//! line and everything after it is a coloring document. An `hj` certificate
//! has `n` instead of `depth` and a one-level ladder holding its alphabet.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::coloring::{load_coloring, parse_builtin_ref, save_coloring, Builtin, Color, ColoringOracle, ColoringSource};
use crate::hj::{verify_hj_witness, HjWitness};
use crate::span::{is_extracted_block_subseq, is_reduced_block_subseq};
use crate::word::{AlphabetLadder, Letter, VarSeq, VariableWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("certificate line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("verification needs {count} products, cap is {cap}")]
    CapExceeded { count: u128, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertKind {
    Cs,
    Carlson,
    Hj,
}

impl fmt::Display for CertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertKind::Cs => "cs",
            CertKind::Carlson => "carlson",
            CertKind::Hj => "hj",
        })
    }
}

impl FromStr for CertKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cs" => Ok(CertKind::Cs),
            "carlson" => Ok(CertKind::Carlson),
            "hj" => Ok(CertKind::Hj),
            _ => Err(format!("unknown certificate kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringRef {
    Builtin(Builtin),
    Inline(ColoringOracle),
}

impl ColoringRef {
    pub fn from_oracle(c: &ColoringOracle) -> Self {
        match c.source() {
            ColoringSource::Builtin(b) => ColoringRef::Builtin(*b),
            _ => ColoringRef::Inline(c.clone()),
        }
    }

    pub fn oracle(&self) -> ColoringOracle {
        match self {
            ColoringRef::Builtin(b) => ColoringOracle::builtin(*b).expect("validated builtin"),
            ColoringRef::Inline(c) => c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertKind,
    pub ladder: AlphabetLadder,
    /// `d` for the extraction kinds, `n` (the line length) for `hj`.
    pub depth: usize,
    pub words: Vec<VariableWord>,
    pub color: Color,
    pub coloring: ColoringRef,
    pub budget: u64,
    pub mode: String,
    pub transcript: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub products_checked: u128,
    /// Whether the words form a block subsequence of `(x, x, ...)` of the
    /// kind's flavor. Informational; `ok` does not depend on it.
    pub structure: bool,
    pub failure: Option<String>,
}

impl VerifyReport {
    fn fail(checked: u128, structure: bool, msg: String) -> Self {
        VerifyReport { ok: false, products_checked: checked, structure, failure: Some(msg) }
    }
}

fn render_words(words: &[VariableWord]) -> String {
    words.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}

fn total_len(words: &[VariableWord]) -> usize {
    words.iter().map(|w| w.len()).sum()
}

/// Writes the text form. Output is a pure function of the certificate.
pub fn save_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    out.push_str("[certificate]\n");
    let _ = writeln!(out, "kind = {}", cert.kind);
    let _ = writeln!(out, "ladder = {}", cert.ladder);
    match cert.kind {
        CertKind::Hj => {
            let _ = writeln!(out, "n = {}", cert.depth);
        }
        _ => {
            let _ = writeln!(out, "depth = {}", cert.depth);
        }
    }
    let _ = writeln!(out, "words = {}", render_words(&cert.words));
    let _ = writeln!(out, "color = {}", cert.color);
    let _ = writeln!(out, "budget = {}", cert.budget);
    let _ = writeln!(out, "mode = {}", cert.mode);
    match &cert.coloring {
        ColoringRef::Builtin(b) => {
            let _ = writeln!(out, "coloring = {b}");
        }
        ColoringRef::Inline(_) => out.push_str("coloring = inline\n"),
    }
    if !cert.transcript.is_empty() {
        out.push_str("[transcript]\n");
        for line in &cert.transcript {
            let _ = writeln!(out, "- {}", line.replace('\n', " "));
        }
    }
    if let ColoringRef::Inline(c) = &cert.coloring {
        out.push_str("[inline-coloring]\n");
        out.push_str(&save_coloring(c));
    }
    out
}

pub fn load_certificate(doc: &str) -> Result<Certificate, CertError> {
    let perr = |line: usize, message: String| CertError::Parse { line, message };
    let mut lines = doc.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut fields: Vec<(usize, String, String)> = Vec::new();
    let mut transcript = Vec::new();
    let mut inline = None;
    let mut section = None::<&str>;
    while let Some((no, raw)) = lines.next() {
        let text = raw.trim();
        if text.is_empty() || (text.starts_with('#') && section != Some("transcript")) {
            continue;
        }
        match text {
            "[certificate]" if section.is_none() => section = Some("certificate"),
            "[transcript]" if section == Some("certificate") => section = Some("transcript"),
            "[inline-coloring]" if section.is_some() => {
                let rest: Vec<&str> = lines.by_ref().map(|(_, l)| l).collect();
                inline = Some((no, rest.join("\n")));
                break;
            }
            _ => match section {
                None => return Err(perr(no, "expected [certificate]".into())),
                Some("certificate") => {
                    let body = text.split('#').next().unwrap().trim();
                    let (k, v) = body.split_once('=').ok_or_else(|| perr(no, format!("expected key = value, got {text:?}")))?;
                    let key = k.trim().to_string();
                    if fields.iter().any(|(_, f, _)| *f == key) {
                        return Err(perr(no, format!("duplicate field {key}")));
                    }
                    fields.push((no, key, v.trim().to_string()));
                }
                Some(_) => {
                    let entry = text.strip_prefix("- ").or_else(|| text.strip_prefix('-'));
                    transcript.push(entry.ok_or_else(|| perr(no, "transcript entries start with '-'".into()))?.to_string());
                }
            },
        }
    }
    if section.is_none() {
        return Err(perr(1, "missing [certificate] section".into()));
    }
    let known = ["kind", "ladder", "depth", "n", "words", "color", "budget", "mode", "coloring"];
    if let Some((no, k, _)) = fields.iter().find(|(_, k, _)| !known.contains(&k.as_str())) {
        return Err(perr(*no, format!("unknown field {k}")));
    }
    let get = |key: &str| -> Result<(usize, &str), CertError> {
        fields
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(no, _, v)| (*no, v.as_str()))
            .ok_or_else(|| perr(0, format!("missing field {key}")))
    };
    let num = |key: &str| -> Result<u64, CertError> {
        let (no, v) = get(key)?;
        v.parse().map_err(|_| perr(no, format!("{key} must be a number, got {v:?}")))
    };
    let (no, kind) = get("kind")?;
    let kind: CertKind = kind.parse().map_err(|m| perr(no, m))?;
    let (no, ladder) = get("ladder")?;
    let ladder: AlphabetLadder = ladder.parse().map_err(|e| perr(no, format!("{e}")))?;
    let depth = match kind {
        CertKind::Hj => num("n")?,
        _ => num("depth")?,
    } as usize;
    let (no, words) = get("words")?;
    let words = words
        .split_whitespace()
        .map(|w| w.parse::<VariableWord>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| perr(no, format!("{e}")))?;
    let color = num("color")? as Color;
    let budget = num("budget")?;
    let mode = get("mode")?.1.to_string();
    let (no, cref) = get("coloring")?;
    let coloring = if cref == "inline" {
        let (ino, body) = inline.ok_or_else(|| perr(no, "coloring = inline needs an [inline-coloring] section".into()))?;
        let c = load_coloring(&body).map_err(|e| perr(ino + e.line, e.message))?;
        ColoringRef::Inline(c)
    } else {
        if inline.is_some() {
            return Err(perr(no, "inline coloring present but coloring is not inline".into()));
        }
        let c = parse_builtin_ref(cref).map_err(|e| perr(no, format!("{e}")))?;
        ColoringRef::from_oracle(&c)
    };
    Ok(Certificate { kind, ladder, depth, words, color, coloring, budget, mode, transcript })
}

/// Every `w_0(a_0)...w_n(a_n)` with `a_i ∈ A_i`, `n <= d`, must carry the
/// certificate color, and `w_n` must be left variable for `n >= 1`.
pub fn verify_cs_certificate(cert: &Certificate, c: &ColoringOracle, cap: u64) -> Result<VerifyReport, CertError> {
    let words = &cert.words;
    let mut count: u128 = 0;
    let mut layer: u128 = 1;
    for i in 0..words.len() {
        layer = layer.saturating_mul(cert.ladder.level(i).len() as u128);
        count = count.saturating_add(layer);
    }
    if count > cap as u128 {
        return Err(CertError::CapExceeded { count, cap });
    }
    let structure = is_reduced_block_subseq(words, &VarSeq::repeating(VariableWord::var(), total_len(words)), 0, &cert.ladder)
        .map(|w| w.is_some())
        .unwrap_or(false);
    if words.len() != cert.depth + 1 {
        return Ok(VerifyReport::fail(0, structure, format!("{} words for depth {}", words.len(), cert.depth)));
    }
    if let Some(n) = (1..words.len()).find(|&n| !words[n].is_left_variable()) {
        return Ok(VerifyReport::fail(0, structure, format!("w_{n} = {} is not left variable", words[n])));
    }
    let mut checked = 0u128;
    let mut products: Vec<Vec<Letter>> = vec![Vec::new()];
    for (n, w) in words.iter().enumerate() {
        let alphabet = cert.ladder.level(n);
        let mut next = Vec::with_capacity(products.len() * alphabet.len());
        for u in &products {
            for &a in alphabet.letters() {
                let mut p = u.clone();
                w.substitute_into(a, &mut p);
                checked += 1;
                let got = c.evaluate(&p);
                if got != cert.color {
                    return Ok(VerifyReport::fail(
                        checked,
                        structure,
                        format!("product {} at depth {n} has color {got}", crate::word::render_symbols(&p)),
                    ));
                }
                next.push(p);
            }
        }
        products = next;
    }
    Ok(VerifyReport { ok: true, products_checked: checked, structure, failure: None })
}

/// Every `w_{m_0}(a_0)...w_{m_n}(a_n)` with `m_0 < ... < m_n <= d` and
/// `a_i ∈ A_{m_i}` must carry the certificate color.
pub fn verify_carlson_certificate(cert: &Certificate, c: &ColoringOracle, cap: u64) -> Result<VerifyReport, CertError> {
    let words = &cert.words;
    let mut all: u128 = 1;
    for i in 0..words.len() {
        all = all.saturating_mul(cert.ladder.level(i).len() as u128 + 1);
    }
    let count = all - 1;
    if count > cap as u128 {
        return Err(CertError::CapExceeded { count, cap });
    }
    let structure = is_extracted_block_subseq(words, &VarSeq::repeating(VariableWord::var(), total_len(words)), 0, &cert.ladder)
        .map(|w| w.is_some())
        .unwrap_or(false);
    if words.len() != cert.depth + 1 {
        return Ok(VerifyReport::fail(0, structure, format!("{} words for depth {}", words.len(), cert.depth)));
    }
    let mut checked = 0u128;
    let mut products: Vec<Vec<Letter>> = vec![Vec::new()];
    for (n, w) in words.iter().enumerate() {
        let alphabet = cert.ladder.level(n);
        let mut fresh = Vec::with_capacity(products.len() * alphabet.len());
        for u in &products {
            for &a in alphabet.letters() {
                let mut p = u.clone();
                w.substitute_into(a, &mut p);
                checked += 1;
                let got = c.evaluate(&p);
                if got != cert.color {
                    return Ok(VerifyReport::fail(
                        checked,
                        structure,
                        format!("product {} ending at w_{n} has color {got}", crate::word::render_symbols(&p)),
                    ));
                }
                fresh.push(p);
            }
        }
        products.extend(fresh);
    }
    Ok(VerifyReport { ok: true, products_checked: checked, structure, failure: None })
}

/// Dispatches on the kind, using the coloring the certificate references.
pub fn verify_certificate(cert: &Certificate, cap: u64) -> Result<VerifyReport, CertError> {
    let c = cert.coloring.oracle();
    match cert.kind {
        CertKind::Cs => verify_cs_certificate(cert, &c, cap),
        CertKind::Carlson => verify_carlson_certificate(cert, &c, cap),
        CertKind::Hj => {
            let alphabet = cert.ladder.level(0);
            let Some(line) = cert.words.first().filter(|_| cert.words.len() == 1) else {
                return Ok(VerifyReport::fail(0, false, "an hj certificate holds exactly one line".into()));
            };
            let count = alphabet.len() as u128;
            if count > cap as u128 {
                return Err(CertError::CapExceeded { count, cap });
            }
            let w = HjWitness { n: cert.depth, alphabet, line: line.clone(), color: cert.color };
            let ok = verify_hj_witness(&w, &|x| c.evaluate(x));
            let failure = (!ok).then(|| format!("line {line} is not monochromatic in color {}", cert.color));
            Ok(VerifyReport { ok, products_checked: count, structure: ok, failure })
        }
    }
}
