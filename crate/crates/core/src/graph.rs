//! Simple undirected graphs on at most 64 vertices.
//!
//! Each adjacency row is one `u64`, so neighbourhood intersections, degree
//! counts and square detection are a handful of word operations. All other
//! modules build on [`Graph`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 64;

/// Simple undirected graph stored as symmetric bit rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: [u64; MAX_VERTICES],
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::VertexCount(n));
        }
        Ok(Graph { n, rows: [0; MAX_VERTICES] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        if n >= 3 {
            for i in 0..n {
                g.add_edge(i, (i + 1) % n);
            }
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        Ok(g)
    }

    /// Builds a graph from an edge list. Self-loops and out-of-range
    /// endpoints are rejected; duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from raw rows; the rows must already be symmetric and
    /// loop-free.
    pub fn from_rows(rows: &[u64]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(n)?;
        let mask = g.vertex_mask();
        for (i, &row) in rows.iter().enumerate() {
            if row & !mask != 0 {
                return Err(Error::VertexOutOfRange { vertex: 63 - row.leading_zeros() as usize, n });
            }
            if row >> i & 1 == 1 {
                return Err(Error::SelfLoop(i));
            }
            g.rows[i] = row;
        }
        for i in 0..n {
            for j in 0..n {
                if g.has_edge(i, j) != g.has_edge(j, i) {
                    return Err(Error::Asymmetric(i, j));
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Bit mask with one bit per vertex.
    #[inline]
    pub fn vertex_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    #[inline]
    pub fn row(&self, v: usize) -> u64 {
        self.rows[v]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows[..self.n]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Panics on self-loops or out-of-range vertices.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v, "invalid edge {u}-{v}");
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "invalid edge {u}-{v}");
        self.rows[u] &= !(1 << v);
        self.rows[v] &= !(1 << u);
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.rows().iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            let mut higher = self.rows[u] & higher_than(u);
            while higher != 0 {
                let v = higher.trailing_zeros() as usize;
                out.push((u, v));
                higher &= higher - 1;
            }
        }
        out
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> {
        BitIter(self.rows[v])
    }

    /// Graph with one vertex appended whose neighbourhood is `column`
    /// (bit `i` set means adjacent to vertex `i`).
    pub fn with_vertex(&self, column: u64) -> Result<Self> {
        if self.n == MAX_VERTICES {
            return Err(Error::VertexCount(self.n + 1));
        }
        let mut g = self.clone();
        let v = self.n;
        g.n += 1;
        let column = column & self.vertex_mask();
        g.rows[v] = column;
        for u in BitIter(column) {
            g.rows[u] |= 1 << v;
        }
        Ok(g)
    }

    /// Graph with the last vertex removed.
    pub fn without_last(&self) -> Result<Self> {
        if self.n <= 1 {
            return Err(Error::VertexCount(0));
        }
        let mut g = self.clone();
        g.n -= 1;
        let keep = g.vertex_mask();
        g.rows[self.n - 1] = 0;
        for r in g.rows[..g.n].iter_mut() {
            *r &= keep;
        }
        Ok(g)
    }

    /// `perm[new] = old`: vertex `new` of the result is vertex `perm[new]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut inv = [0usize; MAX_VERTICES];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut g = Graph { n: self.n, rows: [0; MAX_VERTICES] };
        for (new, &old) in perm.iter().enumerate() {
            let mut r = 0u64;
            for w in BitIter(self.rows[old]) {
                r |= 1 << inv[w];
            }
            g.rows[new] = r;
        }
        g
    }

    /// Subgraph induced on `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> Result<Self> {
        let mut g = Self::empty(keep.len())?;
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        Ok(g)
    }

    /// Upper-triangle code: entries above the diagonal, column by column.
    pub fn upper_triangle(&self) -> UpperTriangleCode {
        UpperTriangleCode::from_graph(self)
    }

    /// Column `j` of the upper triangle as a `j`-bit number whose most
    /// significant bit is row 0.
    #[inline]
    pub fn column_value(&self, j: usize) -> u64 {
        if j == 0 {
            return 0;
        }
        (self.rows[j] & ((1u64 << j) - 1)).reverse_bits() >> (64 - j)
    }

    /// True iff there is no 4-cycle (as a subgraph). Two vertices sharing two
    /// common neighbours close a square.
    pub fn is_square_free(&self) -> bool {
        for u in 0..self.n {
            for v in u + 1..self.n {
                if (self.rows[u] & self.rows[v]).count_ones() >= 2 {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_connected(&self) -> bool {
        let all = self.vertex_mask();
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            for v in BitIter(frontier) {
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen & all == all
    }

    /// All 3-cliques `(a, b, c)` with `a < b < c`, in lexicographic order.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in BitIter(self.rows[a] & higher_than(a)) {
                for c in BitIter(self.rows[a] & self.rows[b] & higher_than(b)) {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn every_vertex_in_triangle(&self) -> bool {
        (0..self.n).all(|v| BitIter(self.rows[v]).any(|w| self.rows[v] & self.rows[w] != 0))
    }

    /// Adjacency list form for JSON output.
    pub fn to_adjacency(&self) -> AdjacencyList {
        AdjacencyList { n: self.n, adj: (0..self.n).map(|v| self.neighbours(v).collect()).collect() }
    }

    pub fn from_adjacency(list: &AdjacencyList) -> Result<Self> {
        if list.adj.len() != list.n {
            return Err(Error::Parse {
                offset: 0,
                message: format!("adjacency list has {} rows for n = {}", list.adj.len(), list.n),
            });
        }
        let mut rows = vec![0u64; list.n];
        for (v, ns) in list.adj.iter().enumerate() {
            for &w in ns {
                if w >= list.n {
                    return Err(Error::VertexOutOfRange { vertex: w, n: list.n });
                }
                rows[v] |= 1 << w;
            }
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

#[inline]
fn higher_than(v: usize) -> u64 {
    if v >= 63 {
        0
    } else {
        !((2u64 << v) - 1)
    }
}

/// Iterates the set bits of a word, lowest first.
#[derive(Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Human-readable adjacency list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyList {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

/// Entries strictly above the diagonal, concatenated column by column (top to
/// bottom), columns left to right. Ordering is lexicographic on the bit
/// string, which for equal `n` is the ordering used for canonicity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpperTriangleCode {
    n: usize,
    bits: Vec<bool>,
}

impl UpperTriangleCode {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut bits = Vec::with_capacity(n * (n - 1) / 2);
        for j in 1..n {
            for i in 0..j {
                bits.push(g.has_edge(i, j));
            }
        }
        UpperTriangleCode { n, bits }
    }

    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::VertexCount(n));
        }
        if bits.len() != n * (n - 1) / 2 {
            return Err(Error::Parse {
                offset: bits.len().min(n * (n - 1) / 2),
                message: format!("expected {} bits for n = {n}, got {}", n * (n - 1) / 2, bits.len()),
            });
        }
        Ok(UpperTriangleCode { n, bits })
    }

    /// Parses a string of `0`/`1` characters for a graph on `n` vertices.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let bits = s
            .bytes()
            .enumerate()
            .map(|(i, b)| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                _ => Err(Error::Parse { offset: i, message: format!("unexpected byte {b:#04x} in bit string") }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n).expect("validated vertex count");
        let mut k = 0;
        for j in 1..self.n {
            for i in 0..j {
                if self.bits[k] {
                    g.add_edge(i, j);
                }
                k += 1;
            }
        }
        g
    }

    /// Hex form: bits packed MSB-first into bytes, zero-padded at the end.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.bits.len() / 4 + 2);
        for chunk in self.bits.chunks(4) {
            let mut nib = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    nib |= 8 >> i;
                }
            }
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let len = n * (n - 1) / 2;
        let mut bits = Vec::with_capacity(len);
        for (i, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse { offset: i, message: format!("invalid hex digit {c:?}") })?;
            for k in 0..4 {
                bits.push(nib & (8 >> k) != 0);
            }
        }
        if bits.len() < len || bits.len() >= len + 4 || bits[len..].iter().any(|&b| b) {
            return Err(Error::Parse { offset: hex.len(), message: format!("hex code length does not match n = {n}") });
        }
        bits.truncate(len);
        Self::from_bits(n, bits)
    }
}

impl fmt::Display for UpperTriangleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for UpperTriangleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UpperTriangleCode({}, \"{}\")", self.n, self)
    }
}
