//! Text form of words.
//!
//! Letters are written as decimal ids with no separator when every id is
//! below 10, and dot-separated otherwise (`3.12.x`). A one-symbol dotted word
//! carries a trailing dot (`12.`) so it cannot be read back as `1`,`2`. The
//! variable is `x` and the empty word is `ε`.

use thiserror::Error;

use super::{Sym, MAX_LETTER, X};

pub const EMPTY_TOKEN: &str = "ε";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad word {input:?} at byte {position}: {message}")]
pub struct ParseWordError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

pub fn render_symbols(symbols: &[Sym]) -> String {
    if symbols.is_empty() {
        return EMPTY_TOKEN.to_string();
    }
    let compact = symbols.iter().all(|&s| s == X || s < 10);
    let token = |s: Sym| {
        if s == X {
            "x".to_string()
        } else {
            s.to_string()
        }
    };
    if compact {
        symbols.iter().map(|&s| token(s)).collect()
    } else {
        let mut out = symbols.iter().map(|&s| token(s)).collect::<Vec<_>>().join(".");
        if symbols.len() == 1 {
            out.push('.');
        }
        out
    }
}

pub fn parse_symbols(input: &str) -> Result<Vec<Sym>, ParseWordError> {
    let s = input.trim();
    let err = |position: usize, message: &str| ParseWordError {
        input: input.to_string(),
        position,
        message: message.to_string(),
    };
    if s.is_empty() || s == EMPTY_TOKEN {
        return Ok(Vec::new());
    }
    if s.contains('.') {
        let mut parts: Vec<&str> = s.split('.').collect();
        if parts.last() == Some(&"") {
            parts.pop();
        }
        let mut out = Vec::with_capacity(parts.len());
        let mut offset = 0;
        for part in parts {
            if part == "x" {
                out.push(X);
            } else if part.is_empty() {
                return Err(err(offset, "empty segment"));
            } else {
                let v: u32 = part.parse().map_err(|_| err(offset, "expected letter id or x"))?;
                if v > MAX_LETTER as u32 {
                    return Err(err(offset, "letter id out of range"));
                }
                out.push(v as Sym);
            }
            offset += part.len() + 1;
        }
        Ok(out)
    } else {
        s.char_indices()
            .map(|(i, c)| match c {
                'x' => Ok(X),
                '0'..='9' => Ok(c as Sym - '0' as Sym),
                _ => Err(err(i, "expected digit or x")),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn render_forms() {
        assert_eq!(render_symbols(&[]), "ε");
        assert_eq!(render_symbols(&[0, X, 1]), "0x1");
        assert_eq!(render_symbols(&[3, 12, X]), "3.12.x");
        assert_eq!(render_symbols(&[12]), "12.");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_symbols("0a1").is_err());
        assert!(parse_symbols("1..2").is_err());
        assert!(parse_symbols("70000.1").is_err());
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(
            syms in prop::collection::vec(prop_oneof![Just(X), 0u16..40], 0..10)
        ) {
            let text = render_symbols(&syms);
            prop_assert_eq!(parse_symbols(&text).unwrap(), syms);
        }
    }
}
