//! 101-colourability, proper k-colourability and the cheap necessary
//! conditions a minimal Kochen-Specker candidate graph must meet.
//!
//! A 101-colouring assigns 0 or 1 to every vertex so that (i) no edge has
//! both ends 0 and (ii) no triangle is all 1.

mod sat;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{BitIter, Graph};
pub use sat::SolveStats;
use sat::{lit, Solver};

/// Clause structure of a 101-colouring instance on any number of vertices.
/// [`Graph`] is limited to 64 vertices; grid systems are much larger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouringProblem {
    n: usize,
    edges: Vec<(u32, u32)>,
    triangles: Vec<[u32; 3]>,
}

impl ColouringProblem {
    /// `edges` and `triangles` must be consistent (every triangle's three
    /// sides are edges); this is checked in debug builds.
    pub fn new(n: usize, edges: Vec<(u32, u32)>, triangles: Vec<[u32; 3]>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u != v && (u as usize) < n && (v as usize) < n));
        ColouringProblem { n, edges, triangles }
    }

    pub fn from_graph(g: &Graph) -> Self {
        let edges = g.edges().into_iter().map(|(u, v)| (u as u32, v as u32)).collect();
        let triangles = g.triangles().into_iter().map(|(a, b, c)| [a as u32, b as u32, c as u32]).collect();
        ColouringProblem { n: g.n(), edges, triangles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Sub-instance induced on the vertices with `keep[v]` set, renumbered
    /// in increasing order. Returns the instance and the new-to-old map.
    pub fn induced(&self, keep: &[bool]) -> (ColouringProblem, Vec<usize>) {
        let mut map = vec![u32::MAX; self.n];
        let mut back = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                map[v] = back.len() as u32;
                back.push(v);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u as usize] && keep[v as usize])
            .map(|&(u, v)| (map[u as usize], map[v as usize]))
            .collect();
        let triangles = self
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&x| keep[x as usize]))
            .map(|t| [map[t[0] as usize], map[t[1] as usize], map[t[2] as usize]])
            .collect();
        (ColouringProblem { n: back.len(), edges, triangles }, back)
    }

    fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1.0;
            d[v as usize] += 1.0;
        }
        d
    }
}

/// Per-vertex values in {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring101 {
    pub assignment: Vec<u8>,
}

impl Colouring101 {
    /// Checks rules (i) and (ii) by direct scan.
    pub fn validate(&self, p: &ColouringProblem) -> bool {
        let a = &self.assignment;
        a.len() == p.n
            && a.iter().all(|&x| x <= 1)
            && p.edges.iter().all(|&(u, v)| a[u as usize] == 1 || a[v as usize] == 1)
            && p.triangles.iter().all(|t| t.iter().any(|&x| a[x as usize] == 0))
    }

    /// Checks the colouring against a graph, recomputing its triangles.
    pub fn validate_graph(&self, g: &Graph) -> bool {
        let a = &self.assignment;
        if a.len() != g.n() || a.iter().any(|&x| x > 1) {
            return false;
        }
        for (u, v) in g.edges() {
            if a[u] == 0 && a[v] == 0 {
                return false;
            }
            for w in BitIter(g.row(u) & g.row(v)) {
                if a[u] == 1 && a[v] == 1 && a[w] == 1 {
                    return false;
                }
            }
        }
        true
    }

    /// JSON object mapping vertex index to value.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.assignment.iter().enumerate().map(|(v, &x)| (v.to_string(), serde_json::Value::from(x))).collect();
        serde_json::Value::Object(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome101 {
    Colourable(Colouring101),
    Uncolourable,
}

impl Outcome101 {
    pub fn is_colourable(&self) -> bool {
        matches!(self, Outcome101::Colourable(_))
    }

    pub fn witness(&self) -> Option<&Colouring101> {
        match self {
            Outcome101::Colourable(c) => Some(c),
            Outcome101::Uncolourable => None,
        }
    }
}

pub fn solve_101_problem(p: &ColouringProblem) -> (Outcome101, SolveStats) {
    let mut solver = Solver::new(p.n, &p.degrees());
    for &(u, v) in &p.edges {
        solver.add_clause(&[lit(u as usize, true), lit(v as usize, true)]);
    }
    for t in &p.triangles {
        solver.add_clause(&[lit(t[0] as usize, false), lit(t[1] as usize, false), lit(t[2] as usize, false)]);
    }
    let outcome = match solver.solve() {
        Some(assignment) => {
            let c = Colouring101 { assignment };
            debug_assert!(c.validate(p));
            Outcome101::Colourable(c)
        }
        None => Outcome101::Uncolourable,
    };
    (outcome, solver.stats)
}

/// Decides 101-colourability of `g`, with a witness when colourable.
pub fn solve_101(g: &Graph) -> Outcome101 {
    solve_101_problem(&ColouringProblem::from_graph(g)).0
}

pub fn is_101_colourable(g: &Graph) -> bool {
    solve_101(g).is_colourable()
}

/// Proper colouring with values `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KColouring {
    pub k: usize,
    pub assignment: Vec<u8>,
}

impl KColouring {
    pub fn validate(&self, g: &Graph) -> bool {
        self.assignment.len() == g.n()
            && self.assignment.iter().all(|&c| (c as usize) < self.k)
            && g.edges().iter().all(|&(u, v)| self.assignment[u] != self.assignment[v])
    }
}

/// Exact k-colourability for `k` in 1..=4 (any `k` works, but only these
/// are needed). `k = 2` is a bipartiteness check; larger `k` use DSATUR-order
/// backtracking.
pub fn k_colouring(g: &Graph, k: usize) -> Option<KColouring> {
    assert!(k >= 1, "k must be positive");
    let n = g.n();
    if k == 1 {
        return (g.edge_count() == 0).then(|| KColouring { k, assignment: vec![0; n] });
    }
    if k == 2 {
        return bipartition(g).map(|assignment| KColouring { k, assignment });
    }
    let mut colour = vec![u8::MAX; n];
    let mut classes = vec![0u64; k];
    if backtrack_colour(g, k, &mut colour, &mut classes, 0) {
        Some(KColouring { k, assignment: colour })
    } else {
        None
    }
}

pub fn is_k_colourable(g: &Graph, k: usize) -> bool {
    k_colouring(g, k).is_some()
}

fn bipartition(g: &Graph) -> Option<Vec<u8>> {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for w in g.neighbours(v) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    stack.push(w);
                } else if side[w] == side[v] {
                    return None;
                }
            }
        }
    }
    Some(side)
}

fn backtrack_colour(g: &Graph, k: usize, colour: &mut [u8], classes: &mut [u64], used: usize) -> bool {
    let n = g.n();
    // most saturated uncoloured vertex, ties by degree then index
    let mut best: Option<(usize, usize, usize)> = None;
    for v in 0..n {
        if colour[v] != u8::MAX {
            continue;
        }
        let sat = classes.iter().filter(|&&c| c & g.row(v) != 0).count();
        let key = (sat, g.degree(v));
        if best.is_none_or(|(_, s, d)| key > (s, d)) {
            best = Some((v, key.0, key.1));
        }
    }
    let Some((v, sat, _)) = best else {
        return true;
    };
    if sat == k {
        return false;
    }
    // colours beyond the first unused one are symmetric
    let limit = (used + 1).min(k);
    for c in 0..limit {
        if classes[c] & g.row(v) != 0 {
            continue;
        }
        colour[v] = c as u8;
        classes[c] |= 1 << v;
        if backtrack_colour(g, k, colour, classes, used.max(c + 1)) {
            return true;
        }
        classes[c] &= !(1 << v);
        colour[v] = u8::MAX;
    }
    false
}

/// First necessary condition a graph fails, in the order they are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    Square,
    MinDegree,
    VertexNotInTriangle,
    ThreeColourable,
    NotFourColourable,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Square => "square",
            RejectReason::MinDegree => "min-degree",
            RejectReason::VertexNotInTriangle => "vertex-not-in-triangle",
            RejectReason::ThreeColourable => "3-colourable",
            RejectReason::NotFourColourable => "not-4-colourable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterResult {
    Pass,
    Reject(RejectReason),
}

/// Conjunction of necessary conditions for the graph of a minimal KS
/// system, cheapest first: square-free, minimum degree 3, every vertex on a
/// triangle, not 3-colourable, 4-colourable.
pub fn candidate_filter(g: &Graph) -> FilterResult {
    use FilterResult::*;
    if !g.is_square_free() {
        return Reject(RejectReason::Square);
    }
    if g.min_degree() < 3 {
        return Reject(RejectReason::MinDegree);
    }
    if !g.every_vertex_in_triangle() {
        return Reject(RejectReason::VertexNotInTriangle);
    }
    if is_k_colourable(g, 3) {
        return Reject(RejectReason::ThreeColourable);
    }
    if !is_k_colourable(g, 4) {
        return Reject(RejectReason::NotFourColourable);
    }
    Pass
}

/// DIMACS CNF for 101-colourability: variable `v + 1` true means vertex `v`
/// has value 1; one clause per edge, one per triangle.
pub fn export_dimacs_101(g: &Graph) -> String {
    export_dimacs_problem(&ColouringProblem::from_graph(g))
}

pub fn export_dimacs_problem(p: &ColouringProblem) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "c 101-colouring: edge clauses then triangle clauses").unwrap();
    writeln!(out, "p cnf {} {}", p.n, p.edges.len() + p.triangles.len()).unwrap();
    for &(u, v) in &p.edges {
        writeln!(out, "{} {} 0", u + 1, v + 1).unwrap();
    }
    for t in &p.triangles {
        writeln!(out, "-{} -{} -{} 0", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_gets_one_zero_two_ones() {
        let g = Graph::complete(3).unwrap();
        let c = solve_101(&g);
        let w = c.witness().unwrap();
        assert!(w.validate_graph(&g));
        let mut vals = w.assignment.clone();
        vals.sort();
        assert_eq!(vals, vec![0, 1, 1]);
    }

    #[test]
    fn single_edge() {
        let g = Graph::complete(2).unwrap();
        let w = solve_101(&g);
        let a = &w.witness().unwrap().assignment;
        assert!(a[0] == 1 || a[1] == 1);
    }

    #[test]
    fn edgeless_graph() {
        let g = Graph::empty(5).unwrap();
        assert!(solve_101(&g).witness().unwrap().validate_graph(&g));
    }

    #[test]
    fn k4_and_c5() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(!is_k_colourable(&c5, 2));
        assert!(is_k_colourable(&c5, 3));
        let k4 = Graph::complete(4).unwrap();
        assert!(!is_k_colourable(&k4, 3));
        let w = k_colouring(&k4, 4).unwrap();
        assert!(w.validate(&k4));
    }

    #[test]
    fn k4_is_not_101_colourable() {
        // any 0 forces its three neighbours to 1, which form a triangle
        assert!(!is_101_colourable(&Graph::complete(4).unwrap()));
    }

    #[test]
    fn filter_examples() {
        assert_eq!(candidate_filter(&Graph::cycle(4).unwrap()), FilterResult::Reject(RejectReason::Square));
        assert_eq!(candidate_filter(&Graph::path(3).unwrap()), FilterResult::Reject(RejectReason::MinDegree));
        assert_eq!(candidate_filter(&Graph::complete(3).unwrap()), FilterResult::Reject(RejectReason::MinDegree));
    }

    #[test]
    fn dimacs_counts() {
        let text = export_dimacs_101(&Graph::complete(2).unwrap());
        assert!(text.contains("p cnf 2 1\n"));
        let text = export_dimacs_101(&Graph::complete(3).unwrap());
        assert!(text.contains("p cnf 3 4\n"));
        assert!(text.contains("-1 -2 -3 0\n"));
    }

    #[test]
    fn induced_problem_renumbers() {
        let p = ColouringProblem::from_graph(&Graph::complete(4).unwrap());
        let (q, back) = p.induced(&[true, false, true, true]);
        assert_eq!(q.n(), 3);
        assert_eq!(back, vec![0, 2, 3]);
        assert_eq!(q.edges().len(), 3);
        assert_eq!(q.triangles(), &[[0, 1, 2]]);
    }
}
