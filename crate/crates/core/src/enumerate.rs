//! Orderly (Colbourn-Read) enumeration of canonical adjacency matrices.
//!
//! The search starts at the 1x1 matrix and appends one row and column at a
//! time, discarding every non-canonical matrix immediately. Deleting the last
//! vertex of a canonical matrix gives a canonical matrix, so each isomorphism
//! class is reached exactly once. Square-freeness is hereditary and is
//! pruned on the fly; in connected mode disconnected prefixes are dropped,
//! which loses nothing because every prefix of a connected canonical matrix
//! is itself connected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canon::is_canonical;
use crate::error::{Error, Result};
use crate::graph::{Graph, UpperTriangleCode, MAX_VERTICES};

/// Default split depth for subtree tickets.
pub const DEFAULT_SPLIT_DEPTH: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filters {
    pub square_free: bool,
    pub connected: bool,
}

impl Filters {
    pub const NONE: Filters = Filters { square_free: false, connected: false };
    pub const CONNECTED_SQUARE_FREE: Filters = Filters { square_free: true, connected: true };

    pub fn accepts(&self, g: &Graph) -> bool {
        (!self.square_free || g.is_square_free()) && (!self.connected || g.is_connected())
    }
}

impl Default for Filters {
    fn default() -> Self {
        Self::CONNECTED_SQUARE_FREE
    }
}

impl fmt::Display for Filters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.square_free {
            parts.push("square-free");
        }
        if self.connected {
            parts.push("connected");
        }
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Filters {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Filters::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "square-free" | "squarefree" => out.square_free = true,
                "connected" => out.connected = true,
                "none" => {}
                other => return Err(Error::InvalidSpec(format!("unknown filter {other:?}"))),
            }
        }
        Ok(out)
    }
}

/// A canonical matrix on `k` vertices that satisfies the filters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixState {
    graph: Graph,
}

impl PrefixState {
    /// The 1x1 matrix.
    pub fn root() -> Self {
        PrefixState { graph: Graph::empty(1).expect("n = 1 is valid") }
    }

    /// Validates `graph` as a prefix: canonical, and satisfying `filters`.
    pub fn new(graph: Graph, filters: Filters) -> Result<Self> {
        if !is_canonical(&graph) {
            return Err(Error::Precondition("prefix matrix is not canonical".into()));
        }
        if !filters.accepts(&graph) {
            return Err(Error::Precondition(format!("prefix does not satisfy filters {filters}")));
        }
        Ok(PrefixState { graph })
    }

    pub fn k(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

/// Neighbour masks for a new vertex, in descending order of their column
/// value (row 0 is the most significant bit). With `square_free` set, masks
/// whose addition would close a 4-cycle are never produced: the new vertex
/// closes a square exactly when two of its neighbours already share one.
fn candidate_columns(g: &Graph, square_free: bool, out: &mut Vec<u64>) {
    fn go(g: &Graph, square_free: bool, i: usize, mask: u64, covered: u64, out: &mut Vec<u64>) {
        if i == g.n() {
            out.push(mask);
            return;
        }
        let row = g.row(i);
        if !square_free || row & covered == 0 {
            go(g, square_free, i + 1, mask | 1 << i, covered | row, out);
        }
        go(g, square_free, i + 1, mask, covered, out);
    }
    out.clear();
    go(g, square_free, 0, 0, 0, out);
}

/// All canonical one-vertex extensions of `p` that satisfy `filters`, in
/// descending order of the new column.
pub fn extend(p: &PrefixState, filters: Filters) -> Vec<PrefixState> {
    let mut cols = Vec::new();
    let mut out = Vec::new();
    extend_into(&p.graph, filters, &mut cols, |g| out.push(PrefixState { graph: g }));
    out
}

fn extend_into(g: &Graph, filters: Filters, scratch: &mut Vec<u64>, mut emit: impl FnMut(Graph)) {
    if g.n() == MAX_VERTICES {
        return;
    }
    candidate_columns(g, filters.square_free, scratch);
    for &col in scratch.iter() {
        if filters.connected && col == 0 {
            continue;
        }
        let child = g.with_vertex(col).expect("below vertex limit");
        if is_canonical(&child) {
            emit(child);
        }
    }
}

/// One independent DFS subtree: every output graph whose first `k` vertices
/// form `prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeTicket {
    pub prefix: PrefixState,
}

impl SubtreeTicket {
    /// `k:hex` where `hex` is the prefix's upper-triangle code.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SubtreeTicket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix.k(), self.prefix.graph.upper_triangle().to_hex())
    }
}

impl SubtreeTicket {
    pub fn parse(s: &str, filters: Filters) -> Result<Self> {
        let (k, hex) =
            s.split_once(':').ok_or_else(|| Error::Parse { offset: 0, message: format!("ticket {s:?} lacks ':'") })?;
        let k: usize = k.parse().map_err(|_| Error::Parse { offset: 0, message: format!("bad ticket size {k:?}") })?;
        let code = UpperTriangleCode::from_hex(k, hex)?;
        Ok(SubtreeTicket { prefix: PrefixState::new(code.to_graph(), filters)? })
    }
}

/// Tickets at depth `min(split_depth, n_target)`, in DFS order. Together
/// they partition the enumeration at `n_target`.
pub fn tickets(n_target: usize, split_depth: usize, filters: Filters) -> Vec<SubtreeTicket> {
    let depth = split_depth.clamp(1, n_target.max(1));
    let mut out = Vec::new();
    walk(&PrefixState::root().graph, depth, filters, &mut Vec::new(), &mut |g| {
        out.push(SubtreeTicket { prefix: PrefixState { graph: g.clone() } })
    });
    out
}

fn walk(g: &Graph, target: usize, filters: Filters, scratch: &mut Vec<u64>, emit: &mut dyn FnMut(&Graph)) {
    if g.n() == target {
        emit(g);
        return;
    }
    let mut children = Vec::new();
    extend_into(g, filters, scratch, |c| children.push(c));
    for c in &children {
        walk(c, target, filters, scratch, emit);
    }
}

/// Streams one canonical representative per isomorphism class on
/// `n_target` vertices satisfying `filters`, restricted to `ticket`'s subtree
/// when given. Order is DFS with descending candidate columns.
pub fn enumerate_with(
    n_target: usize,
    filters: Filters,
    ticket: Option<&SubtreeTicket>,
    mut emit: impl FnMut(&Graph),
) -> Result<()> {
    if n_target == 0 || n_target > MAX_VERTICES {
        return Err(Error::VertexCount(n_target));
    }
    let start = match ticket {
        Some(t) => {
            if t.prefix.k() > n_target {
                return Err(Error::Precondition(format!("ticket depth {} exceeds target {n_target}", t.prefix.k())));
            }
            t.prefix.graph.clone()
        }
        None => PrefixState::root().graph,
    };
    walk(&start, n_target, filters, &mut Vec::new(), &mut emit);
    Ok(())
}

pub fn enumerate(n_target: usize, filters: Filters, ticket: Option<&SubtreeTicket>) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    enumerate_with(n_target, filters, ticket, |g| out.push(g.clone()))?;
    Ok(out)
}

/// Number of graphs `enumerate` would produce, without collecting them.
pub fn count(n_target: usize, filters: Filters, ticket: Option<&SubtreeTicket>) -> Result<u64> {
    let mut c = 0u64;
    enumerate_with(n_target, filters, ticket, |_| c += 1)?;
    Ok(c)
}

/// Visits canonical filtered graphs of every size `1..=n_max` in one DFS.
pub fn enumerate_up_to(n_max: usize, filters: Filters, mut emit: impl FnMut(&Graph)) -> Result<()> {
    if n_max == 0 || n_max > MAX_VERTICES {
        return Err(Error::VertexCount(n_max));
    }
    fn go(g: &Graph, n_max: usize, filters: Filters, scratch: &mut Vec<u64>, emit: &mut dyn FnMut(&Graph)) {
        emit(g);
        if g.n() == n_max {
            return;
        }
        let mut children = Vec::new();
        extend_into(g, filters, scratch, |c| children.push(c));
        for c in &children {
            go(c, n_max, filters, scratch, emit);
        }
    }
    go(&PrefixState::root().graph, n_max, filters, &mut Vec::new(), &mut emit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(gs: &[PrefixState]) -> Vec<String> {
        gs.iter().map(|p| p.graph().upper_triangle().to_string()).collect()
    }

    #[test]
    fn extend_from_k1() {
        let root = PrefixState::root();
        assert_eq!(codes(&extend(&root, Filters::NONE)), vec!["1", "0"]);
        assert_eq!(codes(&extend(&root, Filters::CONNECTED_SQUARE_FREE)), vec!["1"]);
    }

    #[test]
    fn extend_from_k2() {
        let k2 = PrefixState::new(Graph::complete(2).unwrap(), Filters::CONNECTED_SQUARE_FREE).unwrap();
        // columns 11 (K3) and 10 (P3 centre first); 01 is non-canonical, 00 disconnected
        assert_eq!(codes(&extend(&k2, Filters::CONNECTED_SQUARE_FREE)), vec!["111", "110"]);
    }

    #[test]
    fn extensions_never_close_squares() {
        let p4 = enumerate(4, Filters::CONNECTED_SQUARE_FREE, None).unwrap();
        for g in &p4 {
            let p = PrefixState::new(g.clone(), Filters::CONNECTED_SQUARE_FREE).unwrap();
            for c in extend(&p, Filters::CONNECTED_SQUARE_FREE) {
                assert!(c.graph().is_square_free());
            }
        }
    }

    #[test]
    fn small_counts() {
        let f = Filters::CONNECTED_SQUARE_FREE;
        assert_eq!(count(1, f, None).unwrap(), 1);
        assert_eq!(count(2, f, None).unwrap(), 1);
        assert_eq!(count(3, f, None).unwrap(), 2);
        assert_eq!(count(4, f, None).unwrap(), 3);
        // all graphs on 4 vertices: 11 classes
        assert_eq!(count(4, Filters::NONE, None).unwrap(), 11);
    }

    #[test]
    fn descending_code_order() {
        let gs = enumerate(6, Filters::CONNECTED_SQUARE_FREE, None).unwrap();
        let cs: Vec<_> = gs.iter().map(|g| g.upper_triangle()).collect();
        for w in cs.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn ticket_round_trip() {
        let f = Filters::CONNECTED_SQUARE_FREE;
        for t in tickets(8, 5, f) {
            let back = SubtreeTicket::parse(&t.id(), f).unwrap();
            assert_eq!(back, t);
        }
        assert!(SubtreeTicket::parse("3:4", f).is_err());
        assert!(SubtreeTicket::parse("nonsense", f).is_err());
    }

    #[test]
    fn filters_parse() {
        assert_eq!("square-free,connected".parse::<Filters>().unwrap(), Filters::CONNECTED_SQUARE_FREE);
        assert_eq!("none".parse::<Filters>().unwrap(), Filters::NONE);
        assert!("planar".parse::<Filters>().is_err());
        assert_eq!(Filters::CONNECTED_SQUARE_FREE.to_string(), "square-free,connected");
    }
}
