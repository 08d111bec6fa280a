//! Text formats for codes.
//!
//! ```text
//! BSF <m> <n>
//! <2n bits: X block then Z block>   (m lines)
//!
//! CSS <mx> <mz> <n>
//! <n bits>   (mx lines of Hx, then mz lines of Hz)
//! ```
//!
//! Single spaces between bits are allowed and `#` starts a comment.

use super::{CssCode, StabilizerCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate() }
    }

    /// Next non-blank line with comments stripped, with its 1-based line number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_bits(line: usize, text: &str, expected: usize) -> Result<BitVector> {
    let mut bits = Vec::with_capacity(expected);
    let mut prev_space = false;
    for c in text.chars() {
        match c {
            '0' | '1' => {
                bits.push(c == '1');
                prev_space = false;
            }
            ' ' if !prev_space && !bits.is_empty() => prev_space = true,
            other => return Err(parse_err(line, format!("unexpected character {other:?} in bit row"))),
        }
    }
    if bits.len() != expected {
        return Err(parse_err(line, format!("expected {expected} bits, found {}", bits.len())));
    }
    Ok(BitVector::from_bools(&bits))
}

fn header<'a>(lines: &mut Lines<'a>, tag: &str, fields: usize) -> Result<Vec<usize>> {
    let (ln, line) = lines.next_content().ok_or(Error::NoChecks)?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(parse_err(ln, format!("expected header starting with {tag}")));
    }
    let nums: Vec<usize> = parts
        .map(|p| p.parse::<usize>().map_err(|_| parse_err(ln, format!("bad header field {p:?}"))))
        .collect::<Result<_>>()?;
    if nums.len() != fields {
        return Err(parse_err(ln, format!("{tag} header needs {fields} numbers")));
    }
    Ok(nums)
}

fn rows(lines: &mut Lines<'_>, count: usize, width: usize) -> Result<Vec<BitVector>> {
    (0..count)
        .map(|r| {
            let (ln, line) = lines
                .next_content()
                .ok_or_else(|| parse_err(0, format!("missing row {r} of {count}")))?;
            parse_bits(ln, line, width)
        })
        .collect()
}

fn trailing(lines: &mut Lines<'_>) -> Result<()> {
    match lines.next_content() {
        Some((ln, _)) => Err(parse_err(ln, "unexpected extra row")),
        None => Ok(()),
    }
}

pub fn parse_bsf(text: &str) -> Result<StabilizerCode> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "BSF", 2)?;
    let (m, n) = (h[0], h[1]);
    if m == 0 {
        return Err(Error::NoChecks);
    }
    let rs = rows(&mut lines, m, 2 * n)?;
    trailing(&mut lines)?;
    StabilizerCode::new("bsf", BitMatrix::from_rows(2 * n, &rs))
}

pub fn parse_css(text: &str) -> Result<CssCode> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "CSS", 3)?;
    let (mx, mz, n) = (h[0], h[1], h[2]);
    if mx + mz == 0 {
        return Err(Error::NoChecks);
    }
    let xs = rows(&mut lines, mx, n)?;
    let zs = rows(&mut lines, mz, n)?;
    trailing(&mut lines)?;
    CssCode::new("css", BitMatrix::from_rows(n, &xs), BitMatrix::from_rows(n, &zs))
}

/// Parses either format, dispatching on the header keyword.
pub fn parse_code_text(text: &str) -> Result<StabilizerCode> {
    let first = Lines::new(text).next_content().map(|(_, l)| l).ok_or(Error::NoChecks)?;
    if first.starts_with("CSS") {
        Ok(parse_css(text)?.to_bsf())
    } else {
        parse_bsf(text)
    }
}

fn bits_line(v: impl Iterator<Item = bool>) -> String {
    v.map(|b| if b { '1' } else { '0' }).collect()
}

pub fn emit_bsf(code: &StabilizerCode) -> String {
    let mut out = format!("BSF {} {}\n", code.m(), code.n());
    for r in 0..code.m() {
        out.push_str(&bits_line(code.matrix().row(r).iter()));
        out.push('\n');
    }
    out
}

pub fn emit_css(code: &CssCode) -> String {
    let mut out = format!("CSS {} {} {}\n", code.mx(), code.mz(), code.n());
    for m in [code.hx(), code.hz()] {
        for r in 0..m.rows() {
            out.push_str(&bits_line(m.row(r).iter()));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::steane_css;

    const STEANE_BSF: &str = "\
# Steane code, X block then Z block
BSF 6 7
1111000 0000000
1100110 0000000
1010101 0000000
0000000 1111000
0000000 1100110
0000000 1010101
";

    #[test]
    fn parses_steane_bsf() {
        let code = parse_bsf(STEANE_BSF).unwrap();
        assert_eq!(code.n(), 7);
        assert_eq!(code.m(), 6);
        assert_eq!(code.matrix(), steane_css().to_bsf().matrix());
    }

    #[test]
    fn non_commuting_rows_named() {
        let text = "BSF 2 4\n1111 0000\n0001 1110\n";
        assert!(matches!(parse_bsf(text), Err(Error::NonCommuting(0, 1))));
    }

    #[test]
    fn empty_body_is_no_checks() {
        let err = parse_bsf("BSF 0 7\n").unwrap_err();
        assert!(matches!(err, Error::NoChecks));
        assert_eq!(err.to_string(), "no checks");
    }

    #[test]
    fn wrong_row_length() {
        let err = parse_bsf("BSF 1 2\n101\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(parse_bsf("CSS 1 1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_bsf("BSF x 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn double_space_rejected() {
        assert!(parse_bsf("BSF 1 1\n1  1\n").is_err());
    }

    #[test]
    fn zero_row_rejected() {
        assert!(matches!(parse_bsf("BSF 2 2\n1100\n0000\n"), Err(Error::ZeroRow(1))));
    }

    #[test]
    fn css_examples() {
        let text = emit_css(&steane_css());
        let c = parse_css(&text).unwrap();
        assert_eq!(c.hx(), steane_css().hx());
        assert!(matches!(parse_css("CSS 1 1 3\n110\n100\n"), Err(Error::NotOrthogonal(0, 0))));
        let pure_x = parse_css("CSS 2 0 3\n110\n011\n").unwrap();
        assert_eq!(pure_x.mz(), 0);
    }

    #[test]
    fn bsf_emit_roundtrip() {
        let code = steane_css().to_bsf();
        let back = parse_bsf(&emit_bsf(&code)).unwrap();
        assert_eq!(back.matrix(), code.matrix());
        assert_eq!(parse_code_text(&emit_css(&steane_css())).unwrap().matrix(), code.matrix());
    }
}
