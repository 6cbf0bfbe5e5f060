//! graph6 text encoding (one graph per line, printable ASCII).
//!
//! The bit order of graph6 is the upper triangle column by column, which is
//! exactly [`UpperTriangleCode`](crate::graph::UpperTriangleCode) order.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

const HEADER: &str = ">>graph6<<";

pub fn encode(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::with_capacity(4 + (n * (n - 1) / 2).div_ceil(6));
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else {
        out.push(126 as char);
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 0x3f) as u8 + 63) as char);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(((acc << (6 - filled)) + 63) as char);
    }
    out
}

/// Decodes one graph6 line. A trailing newline and the optional
/// `>>graph6<<` header are accepted.
pub fn decode(line: &str) -> Result<Graph> {
    let mut start = 0;
    let mut text = line.trim_end_matches(['\n', '\r']);
    if let Some(rest) = text.strip_prefix(HEADER) {
        start = HEADER.len();
        text = rest;
    }
    let bytes = text.as_bytes();
    let parse_err = |offset: usize, message: String| Error::Parse { offset: start + offset, message };
    for (i, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(parse_err(i, format!("byte {b:#04x} outside graph6 range 63..=126")));
        }
    }
    let (n, body_start) = match bytes.first() {
        None => return Err(parse_err(0, "empty graph6 line".into())),
        Some(&126) => {
            if bytes.len() < 4 {
                return Err(parse_err(bytes.len(), "truncated vertex count".into()));
            }
            if bytes[1] == 126 {
                return Err(parse_err(1, "vertex counts above 258047 are not supported".into()));
            }
            let n = bytes[1..4].iter().fold(0usize, |acc, &b| acc << 6 | (b - 63) as usize);
            (n, 4)
        }
        Some(&b) => ((b - 63) as usize, 1),
    };
    if n == 0 || n > MAX_VERTICES {
        return Err(parse_err(0, format!("vertex count {n} outside 1..={MAX_VERTICES}")));
    }
    let nbits = n * (n - 1) / 2;
    let expected = body_start + nbits.div_ceil(6);
    if bytes.len() != expected {
        let offset = bytes.len().min(expected);
        return Err(parse_err(offset, format!("expected {expected} bytes for n = {n}, found {}", bytes.len())));
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = bytes[body_start + k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    if nbits % 6 != 0 {
        let last = bytes[expected - 1] - 63;
        if last & ((1 << (6 - nbits % 6)) - 1) != 0 {
            return Err(parse_err(expected - 1, "nonzero padding bits".into()));
        }
    }
    Ok(g)
}

/// Reads every non-empty line of `reader` as graph6. Errors carry the line
/// number in the message and the byte offset within that line.
pub fn read_all<R: BufRead>(reader: R) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match decode(line.trim()) {
            Ok(g) => out.push(g),
            Err(Error::Parse { offset, message }) => {
                return Err(Error::Parse { offset, message: format!("line {}: {message}", lineno + 1) })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
