//! Line-based triangulation dumps.
//!
//! A record is a header line `N K` followed by `N` strip lines
//! `n n' word mark`, where `word` is a string over `{U, D}`. Records are
//! separated by blank lines. `K` is the width bound the record was produced
//! under; it is informational and must be at least the largest width.

use std::fmt::Write as _;

use super::complex::CausalTriangulation;
use super::strip::Strip;
use crate::error::{Error, Result};

pub fn write_record(out: &mut String, t: &CausalTriangulation, max_width: usize) {
    writeln!(out, "{} {}", t.num_strips(), max_width).unwrap();
    for s in t.strips() {
        writeln!(out, "{s}").unwrap();
    }
}

pub fn to_text<'a>(
    triangulations: impl IntoIterator<Item = &'a CausalTriangulation>,
    max_width: usize,
) -> String {
    let mut out = String::new();
    for (i, t) in triangulations.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_record(&mut out, t, max_width);
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses every record of a dump.
pub fn parse_text(text: &str) -> Result<Vec<(CausalTriangulation, usize)>> {
    let mut out = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    while let Some((ln, header)) = lines.next() {
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, k] = fields[..] else {
            return Err(parse_err(ln, "header must be `N K`"));
        };
        let n: usize = n.parse().map_err(|_| parse_err(ln, "N is not an integer"))?;
        let k: usize = k.parse().map_err(|_| parse_err(ln, "K is not an integer"))?;
        if n == 0 {
            return Err(parse_err(ln, "N must be positive"));
        }
        let mut strips = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| parse_err(ln, format!("expected {n} strip lines")))?;
            strips.push(parse_strip(ln, line)?);
        }
        if let Some(w) = strips.iter().map(Strip::lower_width).max().filter(|&w| w > k) {
            return Err(parse_err(ln, format!("width {w} exceeds K = {k}")));
        }
        let t = CausalTriangulation::build(strips).map_err(|e| parse_err(ln, e.to_string()))?;
        out.push((t, k));
    }
    Ok(out)
}

fn parse_strip(ln: usize, line: &str) -> Result<Strip> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [n, n_up, word, mark] = fields[..] else {
        return Err(parse_err(ln, "strip line must be `n n' word mark`"));
    };
    let int = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(ln, format!("{what} is not an integer")))
    };
    let (n, n_up, mark) = (int(n, "n")?, int(n_up, "n'")?, int(mark, "mark")?);
    let strip = Strip::parse(word, mark).map_err(|e| parse_err(ln, e.to_string()))?;
    if strip.lower_width() != n || strip.upper_width() != n_up {
        return Err(parse_err(
            ln,
            format!(
                "word {word} has widths ({}, {}) but the line declares ({n}, {n_up})",
                strip.lower_width(),
                strip.upper_width()
            ),
        ));
    }
    Ok(strip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::enumerate_triangulations;

    #[test]
    fn single_record_format() {
        let t = enumerate_triangulations(1, 1).unwrap().next().unwrap();
        assert_eq!(to_text([&t], 1), "1 1\n1 1 UD 0\n");
    }

    #[test]
    fn round_trip_all_small() {
        let all: Vec<_> = enumerate_triangulations(2, 2).unwrap().collect();
        let text = to_text(&all, 2);
        let parsed = parse_text(&text).unwrap();
        assert_eq!(parsed.len(), all.len());
        for ((p, k), t) in parsed.iter().zip(&all) {
            assert_eq!(*k, 2);
            assert_eq!(p.strips(), t.strips());
        }
        let again: Vec<_> = parsed.iter().map(|(t, _)| t).collect();
        assert_eq!(to_text(again, 2), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_text("1 1\n1 1 UX 0\n").is_err());
        assert!(parse_text("1 1\n2 1 UD 0\n").is_err());
        assert!(parse_text("2 2\n1 2 UDD 0\n1 1 UD 0\n").is_err());
        assert!(parse_text("1 1\n").is_err());
        let err = parse_text("1 1\n2 2 UUDD 0\n").unwrap_err();
        assert!(err.to_string().contains("exceeds"));
    }

    #[test]
    fn non_canonical_mark_is_accepted() {
        let parsed = parse_text("1 2\n2 2 DUDU 1\n").unwrap();
        assert_eq!(parsed[0].0.strips()[0].word_string(), "UDUD");
    }
}
