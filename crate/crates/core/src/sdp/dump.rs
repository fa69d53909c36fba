//! Plain-text dump of an [`SdpProblem`] for cross-checking in other tools.
//!
//! ```text
//! sdp-dump 1
//! sense min
//! blocks 2 4 1
//! objective 3
//! 0 1 0 0.5
//! ...
//! constraint 1 2
//! 1 0 0 1
//! ...
//! ```
//!
//! `blocks` lists the count then the sizes. Each `objective` / `constraint`
//! header gives the number of entry lines that follow (and, for constraints,
//! the right-hand side first). Entry lines are `block row col value`, lower
//! triangle, zero-based; off-diagonal entries stand for both mirror positions.
//! Values use the shortest decimal form that parses back to the same `f64`.

use std::fmt::Write as _;

use super::problem::{Constraint, SdpProblem, Sense, SparseSymMatrix};
use crate::error::{Error, Result};

fn write_entries(out: &mut String, m: &SparseSymMatrix) {
    for e in m.entries() {
        let _ = writeln!(out, "{} {} {} {:?}", e.block, e.row, e.col, e.value);
    }
}

pub fn write_dump(p: &SdpProblem) -> String {
    let mut out = String::from("sdp-dump 1\n");
    let sense = match p.sense {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let _ = writeln!(out, "sense {sense}");
    let sizes: Vec<String> = p.blocks.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(out, "blocks {} {}", p.blocks.len(), sizes.join(" "));
    let _ = writeln!(out, "objective {}", p.objective.entries().len());
    write_entries(&mut out, &p.objective);
    for c in &p.constraints {
        let _ = writeln!(out, "constraint {:?} {}", c.b, c.a.entries().len());
        write_entries(&mut out, &c.a);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let f: Vec<&str> = line.split_whitespace().collect();
            if !f.is_empty() {
                return Some((i + 1, f));
            }
        }
        None
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("sdp dump line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(line, format!("cannot parse '{s}'")))
}

fn read_entries(lines: &mut Lines, count: usize) -> Result<SparseSymMatrix> {
    let mut m = SparseSymMatrix::new();
    for _ in 0..count {
        let (ln, f) = lines.next_fields().ok_or_else(|| bad(0, "unexpected end of input"))?;
        if f.len() != 4 {
            return Err(bad(ln, "expected 'block row col value'"));
        }
        m.push(num(ln, f[0])?, num(ln, f[1])?, num(ln, f[2])?, num(ln, f[3])?);
    }
    Ok(m)
}

pub fn read_dump(text: &str) -> Result<SdpProblem> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let mut expect = |key: &str| -> Result<(usize, Vec<String>)> {
        let (ln, f) = lines.next_fields().ok_or_else(|| bad(0, format!("missing '{key}'")))?;
        if f[0] != key {
            return Err(bad(ln, format!("expected '{key}', found '{}'", f[0])));
        }
        Ok((ln, f[1..].iter().map(|s| s.to_string()).collect()))
    };
    let (ln, v) = expect("sdp-dump")?;
    if v.first().map(String::as_str) != Some("1") {
        return Err(bad(ln, "unsupported dump version"));
    }
    let (ln, v) = expect("sense")?;
    let sense = match v.first().map(String::as_str) {
        Some("min") => Sense::Minimize,
        Some("max") => Sense::Maximize,
        _ => return Err(bad(ln, "sense must be 'min' or 'max'")),
    };
    let (ln, v) = expect("blocks")?;
    let count: usize = num(ln, v.first().ok_or_else(|| bad(ln, "missing block count"))?)?;
    if v.len() != count + 1 {
        return Err(bad(ln, "block count does not match the sizes given"));
    }
    let blocks = v[1..].iter().map(|s| num(ln, s)).collect::<Result<Vec<usize>>>()?;
    let (ln, v) = expect("objective")?;
    let n_obj: usize = num(ln, v.first().ok_or_else(|| bad(ln, "missing entry count"))?)?;
    let objective = read_entries(&mut lines, n_obj)?;
    let mut constraints = Vec::new();
    while let Some((ln, f)) = lines.next_fields() {
        if f[0] != "constraint" || f.len() != 3 {
            return Err(bad(ln, "expected 'constraint rhs count'"));
        }
        let b: f64 = num(ln, f[1])?;
        let count: usize = num(ln, f[2])?;
        constraints.push(Constraint { a: read_entries(&mut lines, count)?, b });
    }
    SdpProblem::new(blocks, objective, constraints, sense)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut obj = SparseSymMatrix::new();
        obj.push(0, 1, 0, 0.1 + 0.2);
        obj.push(1, 0, 0, -1e-300);
        let mut a = SparseSymMatrix::new();
        a.push(0, 0, 0, 1.0);
        a.push(0, 1, 1, 1.0);
        let p = SdpProblem::new(vec![2, 1], obj, vec![Constraint { a, b: 1.0 / 3.0 }], Sense::Maximize).unwrap();
        let text = write_dump(&p);
        let q = read_dump(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(write_dump(&q), text);
    }

    #[test]
    fn reports_line_of_error() {
        let text = "sdp-dump 1\nsense min\nblocks 1 2\nobjective 1\n0 0 zero 1\n";
        let err = read_dump(text).unwrap_err().to_string();
        assert!(err.contains("line 5"), "{err}");
        assert!(read_dump("sdp-dump 2\n").is_err());
    }
}
