//! The G-set text format: a header `N M` followed by `M` lines `i j w` with
//! 1-based vertex indices.

use std::fmt::Write as _;

use super::GraphAdjacency;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_gset(text: &str) -> Result<GraphAdjacency> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_no, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(header_no, "header must be `N M`"));
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err(header_no, "bad vertex count"))?;
    let m: usize = fields[1].parse().map_err(|_| parse_err(header_no, "bad edge count"))?;
    if n == 0 {
        return Err(parse_err(header_no, "vertex count must be positive"));
    }

    let mut g = GraphAdjacency::empty(n);
    let mut seen = 0usize;
    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(line_no, "edge line must be `i j w`"));
        }
        let index = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| parse_err(line_no, format!("bad vertex `{s}`")))?;
            if v == 0 || v > n {
                return Err(parse_err(line_no, format!("vertex {v} out of range 1..={n}")));
            }
            Ok(v - 1)
        };
        let i = index(parts[0])?;
        let j = index(parts[1])?;
        let w: f64 = parts[2].parse().map_err(|_| parse_err(line_no, "bad weight"))?;
        if !w.is_finite() {
            return Err(parse_err(line_no, "non-finite weight"));
        }
        if i == j {
            return Err(parse_err(line_no, "self-loop"));
        }
        if g.weight(i, j) != 0.0 {
            return Err(parse_err(line_no, format!("duplicate edge {} {}", i + 1, j + 1)));
        }
        if w == 0.0 {
            return Err(parse_err(line_no, "zero-weight edge"));
        }
        g.set(i, j, w);
        seen += 1;
        if seen > m {
            return Err(parse_err(line_no, format!("more than the {m} declared edges")));
        }
    }
    if seen != m {
        return Err(parse_err(header_no, format!("header declares {m} edges, found {seen}")));
    }
    Ok(g)
}

pub fn write_gset(g: &GraphAdjacency) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}
