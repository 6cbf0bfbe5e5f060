//! Brute-force reference implementations used to cross-check the fast paths.
//!
//! Nothing here shares code with the orderly enumerator or the bit-parallel
//! predicates: graphs are plain boolean matrices, square detection scans
//! 4-subsets, and isomorphism is decided by trying permutations.

use std::collections::HashMap;

use crate::enumerate::Filters;
use crate::graph::Graph;

/// Plain boolean adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Matrix {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let adj = (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j)).collect()).collect();
        Matrix { n, adj }
    }

    /// Labelled graph number `index`: bit `k` of `index` is the `k`-th
    /// entry of the upper triangle in column-major order.
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut adj = vec![vec![false; n]; n];
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                if index >> k & 1 == 1 {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
                k += 1;
            }
        }
        Matrix { n, adj }
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n).expect("oracle sizes are small");
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.adj[i][j] {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn has_square(&self) -> bool {
        let n = self.n;
        let a = &self.adj;
        for w in 0..n {
            for x in w + 1..n {
                for y in x + 1..n {
                    for z in y + 1..n {
                        // the three distinct 4-cycles on {w, x, y, z}
                        if (a[w][x] && a[x][y] && a[y][z] && a[z][w])
                            || (a[w][x] && a[x][z] && a[z][y] && a[y][w])
                            || (a[w][y] && a[y][x] && a[x][z] && a[z][w])
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if self.adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn triangle_count(&self) -> usize {
        let mut c = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                for d in b + 1..self.n {
                    if self.adj[a][b] && self.adj[b][d] && self.adj[a][d] {
                        c += 1;
                    }
                }
            }
        }
        c
    }

    /// Upper-triangle bit string after relabelling (`perm[new] = old`).
    pub fn code_under(&self, perm: &[usize]) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for j in 1..self.n {
            for i in 0..j {
                out.push(self.adj[perm[i]][perm[j]]);
            }
        }
        out
    }

    fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect()
    }
}

/// Every permutation of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    out.push(p.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Greatest upper-triangle code over all `n!` relabellings.
pub fn brute_force_canonical_code(m: &Matrix) -> Vec<bool> {
    permutations(m.n).iter().map(|p| m.code_under(p)).max().unwrap_or_default()
}

/// Exhaustive isomorphism test by backtracking over degree-respecting
/// bijections.
pub fn isomorphic(a: &Matrix, b: &Matrix) -> bool {
    if a.n != b.n {
        return false;
    }
    let (da, db) = (a.degrees(), b.degrees());
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    fn go(a: &Matrix, b: &Matrix, da: &[usize], db: &[usize], map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let v = map.len();
        if v == a.n {
            return true;
        }
        for w in 0..b.n {
            if used[w] || da[v] != db[w] {
                continue;
            }
            if (0..v).all(|u| a.adj[u][v] == b.adj[map[u]][w]) {
                map.push(w);
                used[w] = true;
                if go(a, b, da, db, map, used) {
                    return true;
                }
                used[w] = false;
                map.pop();
            }
        }
        false
    }
    go(a, b, &da, &db, &mut Vec::new(), &mut vec![false; a.n])
}

/// One representative per isomorphism class of graphs on `n` vertices that
/// satisfy `filters`, found by enumerating all `2^(n(n-1)/2)` labelled
/// graphs. Intended for `n <= 7`.
pub fn brute_force_classes(n: usize, filters: Filters) -> Vec<Matrix> {
    assert!((1..=7).contains(&n), "brute force oracle is limited to n <= 7");
    let bits = n * (n - 1) / 2;
    let mut buckets: HashMap<(Vec<usize>, usize), Vec<Matrix>> = HashMap::new();
    let mut order = Vec::new();
    for index in 0..(1u64 << bits) {
        let m = Matrix::from_index(n, index);
        if filters.square_free && m.has_square() {
            continue;
        }
        if filters.connected && !m.is_connected() {
            continue;
        }
        let mut deg = m.degrees();
        deg.sort_unstable();
        let key = (deg, m.triangle_count());
        let bucket = buckets.entry(key.clone()).or_default();
        if bucket.iter().any(|r| isomorphic(r, &m)) {
            continue;
        }
        bucket.push(m.clone());
        order.push(m);
    }
    order
}

/// First 101-colouring in assignment-index order over all `2^n`
/// assignments, or `None` when the graph is uncolourable.
pub fn brute_force_101(m: &Matrix) -> Option<Vec<u8>> {
    let n = m.n;
    let mut triangles = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if m.adj[a][b] && m.adj[b][c] && m.adj[a][c] {
                    triangles.push((a, b, c));
                }
            }
        }
    }
    'outer: for assign in 0..(1u64 << n) {
        let val = |v: usize| (assign >> v & 1) as u8;
        for u in 0..n {
            for v in u + 1..n {
                if m.adj[u][v] && val(u) == 0 && val(v) == 0 {
                    continue 'outer;
                }
            }
        }
        for &(a, b, c) in &triangles {
            if val(a) == 1 && val(b) == 1 && val(c) == 1 {
                continue 'outer;
            }
        }
        return Some((0..n).map(val).collect());
    }
    None
}

/// Exhaustive proper `k`-colouring search over all `k^n` assignments.
pub fn brute_force_k_colourable(m: &Matrix, k: usize) -> bool {
    let n = m.n;
    let total = (k as u64).pow(n as u32);
    'outer: for idx in 0..total {
        let mut colours = Vec::with_capacity(n);
        let mut x = idx;
        for _ in 0..n {
            colours.push(x % k as u64);
            x /= k as u64;
        }
        for u in 0..n {
            for v in u + 1..n {
                if m.adj[u][v] && colours[u] == colours[v] {
                    continue 'outer;
                }
            }
        }
        return true;
    }
    false
}
