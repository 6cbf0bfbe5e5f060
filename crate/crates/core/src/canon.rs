//! Canonical adjacency matrices under the upper-triangle ordering.
//!
//! A labelling is canonical when no relabelling yields a strictly greater
//! [`UpperTriangleCode`](crate::graph::UpperTriangleCode). Both searches
//! below build a relabelling one position at a time. Column `j` of the
//! relabelled code only depends on the first `j + 1` positions, so a partial
//! relabelling can be compared column by column against the target and cut
//! off as soon as it falls behind.
//!
//! Two unplaced twin vertices (equal neighbourhoods apart from each other)
//! are interchangeable by an automorphism that fixes everything already
//! placed, so only one of them is ever branched on.

use crate::error::{Error, Result};
use crate::graph::{BitIter, Graph, MAX_VERTICES};

/// Default node limit for [`canonical_label`].
pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

/// Twin class id per vertex: equal ids mean interchangeable.
fn twin_classes(g: &Graph) -> [u8; MAX_VERTICES] {
    let n = g.n();
    let mut class = [0u8; MAX_VERTICES];
    for v in 0..n {
        class[v] = v as u8;
        let open = g.row(v);
        let closed = open | 1 << v;
        for u in 0..v {
            let (ou, cu) = (g.row(u), g.row(u) | 1 << u);
            let false_twin = ou == open;
            let true_twin = cu == closed;
            if false_twin || true_twin {
                class[v] = class[u];
                break;
            }
        }
    }
    class
}

struct Search<'a> {
    g: &'a Graph,
    n: usize,
    twins: [u8; MAX_VERTICES],
    perm: [usize; MAX_VERTICES],
    nodes: u64,
}

impl Search<'_> {
    fn new(g: &Graph) -> Search<'_> {
        Search { g, n: g.n(), twins: twin_classes(g), perm: [0; MAX_VERTICES], nodes: 0 }
    }

    /// Appends `w` at position `depth`: shifts every unplaced vertex's
    /// running column value left and records its adjacency to `w`.
    #[inline]
    fn advance(&self, cols: &[u64; MAX_VERTICES], unused: u64, w: usize) -> [u64; MAX_VERTICES] {
        let mut next = *cols;
        let row = self.g.row(w);
        for v in BitIter(unused) {
            next[v] = cols[v] << 1 | (row >> v & 1);
        }
        next
    }

    /// Candidates with column value `value`, one per twin class.
    #[inline]
    fn branch_set(&self, cols: &[u64; MAX_VERTICES], unused: u64, value: u64) -> u64 {
        let mut seen_classes = 0u64;
        let mut out = 0u64;
        for v in BitIter(unused) {
            if cols[v] == value {
                let c = self.twins[v];
                if seen_classes >> c & 1 == 0 {
                    seen_classes |= 1 << c;
                    out |= 1 << v;
                }
            }
        }
        out
    }

    /// False iff some completion of the current prefix beats `target`.
    fn no_greater(&mut self, depth: usize, unused: u64, cols: &[u64; MAX_VERTICES], target: &[u64]) -> bool {
        if depth == self.n {
            return true;
        }
        let want = target[depth];
        for v in BitIter(unused) {
            if cols[v] > want {
                return false;
            }
        }
        let branch = self.branch_set(cols, unused, want);
        for v in BitIter(branch) {
            self.perm[depth] = v;
            let rest = unused & !(1 << v);
            let next = self.advance(cols, rest, v);
            if !self.no_greater(depth + 1, rest, &next, target) {
                return false;
            }
        }
        true
    }

    fn maximise(
        &mut self,
        depth: usize,
        unused: u64,
        cols: &[u64; MAX_VERTICES],
        cur: &mut [u64; MAX_VERTICES],
        best: &mut Option<([u64; MAX_VERTICES], [usize; MAX_VERTICES])>,
        limit: u64,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > limit {
            return Err(Error::BudgetExceeded { limit });
        }
        if depth == self.n {
            let better = match best {
                None => true,
                Some((b, _)) => cur[..self.n] > b[..self.n],
            };
            if better {
                *best = Some((*cur, self.perm));
            }
            return Ok(());
        }
        let top = BitIter(unused).map(|v| cols[v]).max().unwrap_or(0);
        cur[depth] = top;
        if let Some((b, _)) = best {
            if cur[..=depth] < b[..=depth] {
                return Ok(());
            }
        }
        let branch = self.branch_set(cols, unused, top);
        for v in BitIter(branch) {
            self.perm[depth] = v;
            let rest = unused & !(1 << v);
            let next = self.advance(cols, rest, v);
            self.maximise(depth + 1, rest, &next, cur, best, limit)?;
            cur[depth] = top;
        }
        Ok(())
    }
}

/// True iff no relabelling of `g` has a strictly greater upper-triangle code.
pub fn is_canonical(g: &Graph) -> bool {
    let n = g.n();
    if n <= 2 {
        return true;
    }
    let target: Vec<u64> = (0..n).map(|j| g.column_value(j)).collect();
    // swapping the last two vertices leaves every column but the last two
    // unchanged, so the last column's top bits are bounded by the one before
    if target[n - 1] >> 1 > target[n - 2] {
        return false;
    }
    let mut search = Search::new(g);
    let cols = [0u64; MAX_VERTICES];
    search.no_greater(0, g.vertex_mask(), &cols, &target)
}

/// Canonical relabelling and the permutation producing it
/// (`perm[new] = old`).
pub fn canonical_label_with_perm(g: &Graph, node_limit: u64) -> Result<(Graph, Vec<usize>)> {
    let n = g.n();
    let mut search = Search::new(g);
    let cols = [0u64; MAX_VERTICES];
    let mut cur = [0u64; MAX_VERTICES];
    let mut best = None;
    search.maximise(0, g.vertex_mask(), &cols, &mut cur, &mut best, node_limit)?;
    let (_, perm) = best.expect("search visits at least one leaf");
    let perm = perm[..n].to_vec();
    Ok((g.permuted(&perm), perm))
}

/// Relabelled copy of `g` with the greatest upper-triangle code. Two graphs
/// are isomorphic iff their canonical labels are equal.
pub fn canonical_label(g: &Graph, node_limit: u64) -> Result<Graph> {
    canonical_label_with_perm(g, node_limit).map(|(c, _)| c)
}
