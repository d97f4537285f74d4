//! Plain-text region blocks.
//!
//! ```text
//! polytope n=<dim> rows=<m>      m lines of n+1 numbers: a row of A, then b
//! box                            lower-bound line, upper-bound line
//! union k=<count>                followed by <count> polytope blocks
//! ellipsoid                      center line, n shape lines, level line
//! empty n=<dim>
//! full n=<dim>
//! ```
//!
//! Numbers use `.` as the decimal separator; exponents and `inf`/`-inf` are
//! accepted. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{AxisBox, Body, Ellipsoid, HPolytope, Region};
use crate::error::{Error, Result};

/// Line cursor over a text document that skips blanks and comments and keeps
/// 1-based line numbers for diagnostics.
pub struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        self.inner.peek().map(|(i, l)| (i + 1, l.trim()))
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        let (i, l) = self.inner.next()?;
        self.last = i + 1;
        Some((i + 1, l.trim()))
    }

    pub fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next_line()
            .ok_or_else(|| Error::parse(last + 1, format!("unexpected end of input, expected {what}")))
    }

    pub fn last_line(&self) -> usize {
        self.last
    }
}

pub fn parse_numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("invalid number `{tok}`")))
                .and_then(|v| {
                    if v.is_nan() {
                        Err(Error::parse(line, "NaN is not allowed"))
                    } else {
                        Ok(v)
                    }
                })
        })
        .collect()
}

fn header_value(line: usize, header: &str, key: &str) -> Result<usize> {
    let prefix = format!("{key}=");
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(&prefix))
        .ok_or_else(|| Error::parse(line, format!("missing `{key}=` in `{header}`")))?
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid `{key}=` value in `{header}`")))
}

fn numbers_of_len(lines: &mut Lines<'_>, n: usize, what: &str) -> Result<Vec<f64>> {
    let (ln, text) = lines.expect_line(what)?;
    let v = parse_numbers(ln, text)?;
    if v.len() != n {
        return Err(Error::parse(
            ln,
            format!("expected {n} numbers for {what}, found {}", v.len()),
        ));
    }
    Ok(v)
}

fn parse_polytope(lines: &mut Lines<'_>, ln: usize, header: &str) -> Result<HPolytope> {
    let n = header_value(ln, header, "n")?;
    let m = header_value(ln, header, "rows")?;
    if n == 0 {
        return Err(Error::parse(ln, "dimension must be at least 1"));
    }
    let mut p = HPolytope::unconstrained(n);
    for _ in 0..m {
        let mut v = numbers_of_len(lines, n + 1, "a polytope row")?;
        let b = v.pop().unwrap();
        p.push_row(v, b);
    }
    Ok(p)
}

/// Reads one region block from the cursor.
pub fn read_region(lines: &mut Lines<'_>) -> Result<Region> {
    let (ln, header) = lines.expect_line("a region header")?;
    let kind = header.split_whitespace().next().unwrap_or("");
    match kind {
        "polytope" => Ok(Region::from_polytope(parse_polytope(lines, ln, header)?)),
        "box" => {
            let (l1, t1) = lines.expect_line("box lower bounds")?;
            let lower = parse_numbers(l1, t1)?;
            let upper = numbers_of_len(lines, lower.len(), "box upper bounds")?;
            AxisBox::new(lower, upper)
                .map(Region::from_box)
                .map_err(|e| Error::parse(l1, e.to_string()))
        }
        "union" => {
            let k = header_value(ln, header, "k")?;
            let mut pieces = Vec::with_capacity(k);
            for _ in 0..k {
                let (pl, ph) = lines.expect_line("a polytope block")?;
                if !ph.starts_with("polytope") {
                    return Err(Error::parse(pl, "union pieces must be polytope blocks"));
                }
                pieces.push(parse_polytope(lines, pl, ph)?);
            }
            if pieces.is_empty() {
                return Err(Error::parse(ln, "union needs at least one piece"));
            }
            Region::union(pieces).map_err(|e| Error::parse(ln, e.to_string()))
        }
        "ellipsoid" => {
            let (cl, ct) = lines.expect_line("ellipsoid center")?;
            let center = parse_numbers(cl, ct)?;
            let n = center.len();
            let mut data = Vec::with_capacity(n * n);
            for _ in 0..n {
                data.extend(numbers_of_len(lines, n, "an ellipsoid shape row")?);
            }
            let level = numbers_of_len(lines, 1, "the ellipsoid level")?[0];
            Ellipsoid::new(center, DMatrix::from_row_slice(n, n, &data), level)
                .map(Region::from_ellipsoid)
                .map_err(|e| Error::parse(cl, e.to_string()))
        }
        "empty" | "full" => {
            let n = header_value(ln, header, "n")?;
            if n == 0 {
                return Err(Error::parse(ln, "dimension must be at least 1"));
            }
            Ok(if kind == "empty" {
                Region::empty(n)
            } else {
                Region::full(n)
            })
        }
        other => Err(Error::parse(ln, format!("unknown region kind `{other}`"))),
    }
}

/// Parses a document holding exactly one region block.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut lines = Lines::new(text);
    let r = read_region(&mut lines)?;
    if let Some((ln, _)) = lines.next_line() {
        return Err(Error::parse(ln, "trailing content after region block"));
    }
    Ok(r)
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{}", if v == 0.0 { 0.0 } else { v }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_polytope(out: &mut String, p: &HPolytope) {
    let _ = writeln!(out, "polytope n={} rows={}", p.dim(), p.len());
    for (row, b) in p.rows().iter().zip(p.rhs()) {
        let _ = writeln!(out, "{}", join(row.iter().copied().chain([*b])));
    }
}

/// Serializes a region; membership-oracle regions have no text form.
pub fn write_region(r: &Region) -> Result<String> {
    let mut out = String::new();
    match r.body() {
        Body::Empty => {
            let _ = writeln!(out, "empty n={}", r.dim());
        }
        Body::Full => {
            let _ = writeln!(out, "full n={}", r.dim());
        }
        Body::Box(b) => {
            let _ = writeln!(out, "box");
            let _ = writeln!(out, "{}", join(b.lower().iter().copied()));
            let _ = writeln!(out, "{}", join(b.upper().iter().copied()));
        }
        Body::Polytope(p) => write_polytope(&mut out, p),
        Body::Union(ps) => {
            let _ = writeln!(out, "union k={}", ps.len());
            for p in ps {
                write_polytope(&mut out, p);
            }
        }
        Body::Ellipsoid(e) => {
            let n = e.dim();
            let _ = writeln!(out, "ellipsoid");
            let _ = writeln!(out, "{}", join(e.center().iter().copied()));
            for i in 0..n {
                let _ = writeln!(out, "{}", join((0..n).map(|j| e.shape()[(i, j)])));
            }
            let _ = writeln!(out, "{}", e.level());
        }
        Body::Oracle(_) => return Err(Error::Unsupported("serialization of a membership-oracle region".into())),
    }
    Ok(out)
}
