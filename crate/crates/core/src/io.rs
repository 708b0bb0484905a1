//! Text format: first line `n m`, then m lines `u v c` (1-based nodes, c ∈ {0,1}).
//! `#` starts a comment; edge ids follow line order. Solutions are one 1-based
//! edge id per line.

use crate::graph::{Edge, EdgeId, MapInstance};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| err(line, format!("bad {what} `{s}`")))
}

pub fn parse_instance(text: &str) -> Result<MapInstance, ParseError> {
    let mut lines = content_lines(text);
    let (l0, header) = lines.next().ok_or_else(|| err(1, "missing `n m` header"))?;
    if header.len() != 2 {
        return Err(err(l0, "header must be `n m`"));
    }
    let n: usize = num(l0, header[0], "node count")?;
    let m: usize = num(l0, header[1], "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (l, f) in lines {
        if f.len() != 3 {
            return Err(err(l, "edge line must be `u v c`"));
        }
        let u: usize = num(l, f[0], "node")?;
        let v: usize = num(l, f[1], "node")?;
        let c: u8 = num(l, f[2], "cost")?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(err(l, format!("node ids must lie in 1..={n}")));
        }
        if c > 1 {
            return Err(err(l, format!("cost {c} is not 0 or 1")));
        }
        if u == v {
            return Err(err(l, "self-loop"));
        }
        edges.push(Edge::new(u - 1, v - 1, c));
    }
    if edges.len() != m {
        return Err(err(l0, format!("header announces {m} edges, found {}", edges.len())));
    }
    MapInstance::new(n, edges).map_err(|e| err(l0, e.to_string()))
}

pub fn format_instance(inst: &MapInstance) -> String {
    let mut out = format!("{} {}\n", inst.node_count(), inst.edge_count());
    for e in inst.edges() {
        let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.cost);
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Vec<EdgeId>, ParseError> {
    let mut ids = Vec::new();
    for (l, f) in content_lines(text) {
        for s in f {
            let id: usize = num(l, s, "edge id")?;
            if id == 0 {
                return Err(err(l, "edge ids are 1-based"));
            }
            ids.push(id - 1);
        }
    }
    Ok(ids)
}

pub fn format_solution(ids: &[EdgeId], cost: u64) -> String {
    let mut out = format!("# cost {cost}\n");
    for id in ids {
        let _ = writeln!(out, "{}", id + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# square\n4 4\n1 2 0\n2 3 1 # unit\n3 4 0\n4 1 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.edge_count(), 4);
        assert_eq!(inst.edge(1), Edge::new(1, 2, 1));
        assert_eq!(parse_instance(&format_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(parse_instance("2 1\n1 3 0\n").unwrap_err().line, 2);
        assert!(parse_instance("2 2\n1 2 0\n").is_err());
        assert!(parse_instance("2 1\n1 2 2\n").is_err());
        assert!(parse_solution("0\n").is_err());
        assert_eq!(parse_solution("# c\n3\n1 2\n").unwrap(), vec![2, 0, 1]);
    }
}
