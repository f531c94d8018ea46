//! Reader for generators written out as text.
//!
//! A block is a header `n = 7, d = 1/(2√2)` followed by comma-separated
//! entries, optionally wrapped in parentheses and spread over several
//! lines. Entries are complex literals such as `0.83 - 0.55 i`, or real
//! surd expressions like the header's `d`. Common LaTeX wrapping
//! (`$…$`, `\item`, `\biggl(`, `&`, `\\`, environment lines) is ignored,
//! so typeset listings can be pasted in unchanged.

use num_complex::Complex;

use crate::error::{CircError, Result};
use crate::generator::CirculantGenerator;
use crate::rational::DiagonalValue;

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixBlock {
    pub n: usize,
    pub d: DiagonalValue,
    pub generator: CirculantGenerator<f64>,
    /// 1-based line of the header.
    pub line: usize,
}

fn clean(line: &str) -> String {
    let trimmed = line.trim_start();
    if ["\\begin", "\\end", "\\vspace", "\\appendix", "%"]
        .iter()
        .any(|p| trimmed.starts_with(p))
    {
        return String::new();
    }
    let mut s = line.to_string();
    for noise in [
        "\\item",
        "\\biggl",
        "\\biggr",
        "\\bigl",
        "\\bigr",
        "\\left",
        "\\right",
        "\\nonumber",
        "\\\\",
        "$",
        "&",
    ] {
        s = s.replace(noise, " ");
    }
    s.trim().to_string()
}

/// `Some((n, d))` for a header line.
fn header(line: &str, line_no: usize) -> Result<Option<(usize, DiagonalValue)>> {
    let Some(rest) = line.strip_prefix('n') else {
        return Ok(None);
    };
    let Some(rest) = rest.trim_start().strip_prefix('=') else {
        return Ok(None);
    };
    let (n_text, d_part) = rest
        .split_once(',')
        .ok_or_else(|| CircError::parse(line_no, "header needs `n = …, d = …`"))?;
    let n: usize = n_text
        .trim()
        .parse()
        .map_err(|_| CircError::parse(line_no, format!("bad order `{}`", n_text.trim())))?;
    let d_text = d_part
        .trim()
        .strip_prefix('d')
        .and_then(|r| r.trim_start().strip_prefix('='))
        .ok_or_else(|| CircError::parse(line_no, "header needs `d = …` after the order"))?;
    let d = DiagonalValue::parse_expr(d_text.trim())
        .map_err(|e| CircError::parse(line_no, e.to_string()))?;
    Ok(Some((n, d)))
}

/// Parses `a ± b i`, `b i`, `a`, `± i` and real surd expressions.
pub fn parse_entry(token: &str) -> std::result::Result<Complex<f64>, String> {
    let compact: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.replace('−', "-");
    if let Some(body) = compact.strip_suffix('i') {
        // Split at the last sign that is not a leading sign or an exponent sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re_text, im_text) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_text.is_empty() {
            0.0
        } else {
            parse_real(re_text)?
        };
        let im = match im_text {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t
                .parse::<f64>()
                .map_err(|_| format!("bad imaginary part `{t}`"))?,
        };
        Ok(Complex::new(re, im))
    } else {
        Ok(Complex::new(parse_real(&compact)?, 0.0))
    }
}

fn parse_real(text: &str) -> std::result::Result<f64, String> {
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match text.strip_prefix('-') {
        Some(b) => (-1.0, b),
        None => (1.0, text.strip_prefix('+').unwrap_or(text)),
    };
    DiagonalValue::parse_expr(body)
        .map(|d| sign * d.approx())
        .map_err(|e| format!("bad real `{text}`: {e}"))
}

pub fn parse_appendix(text: &str) -> Result<Vec<AppendixBlock>> {
    struct Open {
        n: usize,
        d: DiagonalValue,
        line: usize,
        entries: Vec<Complex<f64>>,
    }
    fn close(open: Open) -> Result<AppendixBlock> {
        if open.entries.len() != open.n {
            return Err(CircError::parse(
                open.line,
                format!("order {} but {} entries", open.n, open.entries.len()),
            ));
        }
        let generator = CirculantGenerator::with_order(open.n, open.entries)
            .map_err(|e| CircError::parse(open.line, e.to_string()))?;
        Ok(AppendixBlock {
            n: open.n,
            d: open.d,
            generator,
            line: open.line,
        })
    }

    let mut blocks = Vec::new();
    let mut current: Option<Open> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = clean(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((n, d)) = header(&line, line_no)? {
            if let Some(done) = current.take() {
                blocks.push(close(done)?);
            }
            current = Some(Open {
                n,
                d,
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let open = current
            .as_mut()
            .ok_or_else(|| CircError::parse(line_no, "entries before any `n = …, d = …` header"))?;
        let body = line.trim_start_matches('(').trim_end_matches(')');
        for token in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let z = parse_entry(token).map_err(|m| CircError::parse(line_no, m))?;
            open.entries.push(z);
        }
    }
    if let Some(done) = current {
        blocks.push(close(done)?);
    }
    Ok(blocks)
}
