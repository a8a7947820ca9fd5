//! On-disk graph text format.
//!
//! First line `n m`, then exactly m lines `u v` with 0 <= u < v < n. ASCII
//! decimal without leading zeros, exactly one space per line, LF terminated
//! (every line, including the last). Duplicate edges are an error. `render`
//! and `parse` are exact inverses on valid input, byte for byte.

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: expected `{expected}`")]
    Malformed { line: usize, expected: &'static str },
    #[error("line {line}: bad number `{token}`")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: missing trailing newline")]
    MissingNewline { line: usize },
    #[error("line {line}: carriage return not allowed")]
    CarriageReturn { line: usize },
    #[error("header declares {declared} edges but {found} edge lines follow")]
    EdgeCount { declared: usize, found: usize },
    #[error("line {line}: endpoints must satisfy u < v")]
    EndpointOrder { line: usize },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        source: GraphError,
    },
}

fn parse_number(token: &str, line: usize) -> Result<usize, FormatError> {
    let bad = || FormatError::BadNumber {
        line,
        token: token.to_string(),
    };
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if token.len() > 1 && token.starts_with('0') {
        return Err(bad());
    }
    token.parse::<usize>().map_err(|_| bad())
}

fn parse_pair(line_text: &str, line: usize) -> Result<(usize, usize), FormatError> {
    if line_text.contains('\r') {
        return Err(FormatError::CarriageReturn { line });
    }
    let (a, b) = line_text
        .split_once(' ')
        .ok_or(FormatError::Malformed {
            line,
            expected: "two numbers separated by one space",
        })?;
    Ok((parse_number(a, line)?, parse_number(b, line)?))
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    if text.is_empty() {
        return Err(FormatError::Empty);
    }
    let mut lines: Vec<&str> = text.split('\n').collect();
    // A well-formed file ends with LF, so the final split piece is empty.
    match lines.pop() {
        Some("") => {}
        _ => {
            return Err(FormatError::MissingNewline { line: lines.len() });
        }
    }
    if lines.is_empty() {
        return Err(FormatError::Empty);
    }
    let (n, m) = parse_pair(lines[0], 1)?;
    let declared = m;
    let found = lines.len() - 1;
    if declared != found {
        return Err(FormatError::EdgeCount { declared, found });
    }
    let mut g = Graph::new(n).map_err(|source| FormatError::Graph { line: 1, source })?;
    for (idx, line_text) in lines.iter().enumerate().skip(1) {
        let line = idx + 1;
        let (u, v) = parse_pair(line_text, line)?;
        if u >= v {
            return Err(FormatError::EndpointOrder { line });
        }
        g.add_edge(u, v)
            .map_err(|source| FormatError::Graph { line, source })?;
    }
    Ok(g)
}

pub fn render_graph(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", g.n(), edges.len()));
    for e in edges {
        out.push_str(&format!("{} {}\n", e.u(), e.v()));
    }
    out
}
