//! Plain-text hypergraph files.
//!
//! ```text
//! # seed=7
//! 3 4 1
//! 0 1 2
//! ```
//!
//! Lines starting with `#` are comments; a comment of the form `# key=value`
//! is kept as metadata. The first data line is `r n e`, followed by exactly
//! `e` edge lines of `r` strictly increasing vertex indices separated by
//! single spaces.

use std::fmt::Write as _;

use thiserror::Error;

use crate::hypercore::{Hypergraph, HypergraphError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// A hypergraph together with the `key=value` comments of its file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub hypergraph: Hypergraph,
    pub metadata: Vec<(String, String)>,
}

impl Document {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn parse_int(tok: &str, line: usize) -> Result<u64, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(line, format!("expected a non-negative integer, found {tok:?}")));
    }
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("integer {tok:?} is too large")))
}

fn fields(body: &str, line: usize) -> Result<Vec<u64>, ParseError> {
    body.split(' ').map(|t| parse_int(t, line)).collect()
}

pub fn read_document(text: &str) -> Result<Document, ParseError> {
    let mut metadata = Vec::new();
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows: Vec<Vec<Vertex>> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let body = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(comment) = body.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if body.trim().is_empty() {
            continue;
        }
        let nums = fields(body, line)?;
        match header {
            None => {
                let [r, n, e] = nums[..] else {
                    return Err(ParseError::new(line, format!("header needs 3 integers `r n e`, found {}", nums.len())));
                };
                if r < 2 {
                    return Err(ParseError::new(line, format!("uniformity must be at least 2, got {r}")));
                }
                if n > u64::from(Vertex::MAX) {
                    return Err(ParseError::new(line, format!("vertex count {n} is too large")));
                }
                header = Some((r as usize, n as usize, e as usize));
            }
            Some((r, n, e)) => {
                if rows.len() == e {
                    return Err(ParseError::new(line, format!("more than the declared {e} edges")));
                }
                if nums.len() != r {
                    return Err(ParseError::new(line, format!("edge has {} vertices, expected {r}", nums.len())));
                }
                if let Some(&v) = nums.iter().find(|&&v| v >= n as u64) {
                    return Err(ParseError::new(line, format!("vertex {v} out of range for {n} vertices")));
                }
                if nums.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ParseError::new(line, "edge vertices must be strictly increasing"));
                }
                rows.push(nums.into_iter().map(|v| v as Vertex).collect());
            }
        }
    }

    let Some((r, n, e)) = header else {
        return Err(ParseError::new(last_line.max(1), "missing header line `r n e`"));
    };
    if rows.len() != e {
        return Err(ParseError::new(
            last_line.max(1),
            format!("declared {e} edges but found {}", rows.len()),
        ));
    }
    let hypergraph = Hypergraph::new(r, n, &rows).map_err(|err| {
        let line = match &err {
            HypergraphError::DuplicateEdge(dup) => {
                // report the second occurrence
                edge_line(text, dup, 2).unwrap_or(last_line)
            }
            _ => last_line,
        };
        ParseError::new(line, err.to_string())
    })?;
    Ok(Document {
        hypergraph,
        metadata,
    })
}

fn edge_line(text: &str, edge: &[Vertex], occurrence: usize) -> Option<usize> {
    let wanted = edge
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_end_matches('\r') == wanted)
        .nth(occurrence - 1)
        .map(|(i, _)| i + 1)
}

pub fn read_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    read_document(text).map(|d| d.hypergraph)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    write_with_metadata(h, &[])
}

pub fn write_with_metadata(h: &Hypergraph, metadata: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "{} {} {}", h.uniformity(), h.order(), h.edge_count());
    for e in h.edges() {
        for (i, v) in e.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_document(doc: &Document) -> String {
    write_with_metadata(&doc.hypergraph, &doc.metadata)
}
