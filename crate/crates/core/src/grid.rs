//! Cubic integer grids and exact embedding of graphs onto them.
//!
//! The grid with parameter `N` consists of the integer points on the surface
//! of the cube `[-N, N]^3`, with `d` and `-d` identified. Every direction is
//! stored with its first nonzero coordinate in `(z, y, x)` order positive.
//! Orthogonality is an exact integer dot product.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_label, DEFAULT_NODE_LIMIT};
use crate::colouring::{solve_101_problem, ColouringProblem};
use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

pub const MAX_GRID_N: u32 = 32;

/// Default node limit for [`grid_embed`].
pub const DEFAULT_EMBED_NODE_LIMIT: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridDirection {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl GridDirection {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        GridDirection { x, y, z }
    }

    /// Representative of `{d, -d}`.
    pub fn normalised(self) -> Self {
        let flip = if self.z != 0 {
            self.z < 0
        } else if self.y != 0 {
            self.y < 0
        } else {
            self.x < 0
        };
        if flip {
            GridDirection::new(-self.x, -self.y, -self.z)
        } else {
            self
        }
    }

    pub fn is_normalised(self) -> bool {
        self.normalised() == self
    }

    pub fn chebyshev(self) -> i32 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn dot(self, o: GridDirection) -> i64 {
        self.x as i64 * o.x as i64 + self.y as i64 * o.y as i64 + self.z as i64 * o.z as i64
    }

    pub fn cross(self, o: GridDirection) -> [i64; 3] {
        let (a, b) = (self.to_i64(), o.to_i64());
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }

    pub fn to_array(self) -> [i32; 3] {
        [self.x, self.y, self.z]
    }

    fn to_i64(self) -> [i64; 3] {
        [self.x as i64, self.y as i64, self.z as i64]
    }

    /// The direction scaled to Euclidean length 1.
    pub fn unit(self) -> [f64; 3] {
        let [x, y, z] = self.to_array().map(f64::from);
        let r = (x * x + y * y + z * z).sqrt();
        [x / r, y / r, z / r]
    }

    fn transform(self, s: &Symmetry) -> Self {
        let c = self.to_array();
        GridDirection::new(s.sign[0] * c[s.perm[0]], s.sign[1] * c[s.perm[1]], s.sign[2] * c[s.perm[2]]).normalised()
    }
}

/// Signed coordinate permutation; the 48 of them preserve every grid.
#[derive(Debug, Clone, Copy)]
struct Symmetry {
    perm: [usize; 3],
    sign: [i32; 3],
}

fn cube_symmetries() -> Vec<Symmetry> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for s in 0..8 {
            let sign = [0, 1, 2].map(|i| if s >> i & 1 == 1 { -1 } else { 1 });
            out.push(Symmetry { perm, sign });
        }
    }
    out
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Number of directions on the grid with parameter `n`.
pub fn direction_count(n: u32) -> usize {
    let (a, b) = (2 * n as usize + 1, 2 * n as usize - 1);
    (a.pow(3) - b.pow(3)) / 2
}

/// All directions of Chebyshev norm `N` and their orthogonality relation.
#[derive(Debug)]
pub struct GridSystem {
    n: u32,
    directions: Vec<GridDirection>,
    orth: Vec<Vec<u32>>,
    lookup: Vec<u32>,
    triangle_pins: OnceLock<Vec<[u32; 3]>>,
    edge_pins: OnceLock<Vec<[u32; 2]>>,
}

/// Builds the grid with parameter `n`; directions are sorted
/// lexicographically by `(x, y, z)`.
pub fn generate_grid(n: u32) -> Result<GridSystem> {
    if !(1..=MAX_GRID_N).contains(&n) {
        return Err(Error::Precondition(format!("grid parameter {n} outside 1..={MAX_GRID_N}")));
    }
    let m = n as i32;
    let side = (2 * m + 1) as usize;
    let mut directions = Vec::with_capacity(direction_count(n));
    let mut lookup = vec![u32::MAX; side * side * side];
    for x in -m..=m {
        for y in -m..=m {
            for z in -m..=m {
                let d = GridDirection::new(x, y, z);
                if d.chebyshev() == m && d.is_normalised() {
                    lookup[cell(m, d)] = directions.len() as u32;
                    directions.push(d);
                }
            }
        }
    }
    let mut orth = vec![Vec::new(); directions.len()];
    for i in 0..directions.len() {
        for j in i + 1..directions.len() {
            if directions[i].dot(directions[j]) == 0 {
                orth[i].push(j as u32);
                orth[j].push(i as u32);
            }
        }
    }
    Ok(GridSystem { n, directions, orth, lookup, triangle_pins: OnceLock::new(), edge_pins: OnceLock::new() })
}

fn cell(m: i32, d: GridDirection) -> usize {
    let side = (2 * m + 1) as usize;
    ((d.x + m) as usize * side + (d.y + m) as usize) * side + (d.z + m) as usize
}

impl GridSystem {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[GridDirection] {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> GridDirection {
        self.directions[i]
    }

    /// Indices orthogonal to direction `i`, ascending.
    pub fn orthogonal(&self, i: usize) -> &[u32] {
        &self.orth[i]
    }

    /// Index of the grid direction parallel to `d`, if any.
    pub fn index_of(&self, d: GridDirection) -> Option<usize> {
        let m = self.n as i32;
        if d.chebyshev() != m {
            return None;
        }
        match self.lookup[cell(m, d.normalised())] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// The grid direction orthogonal to both `a` and `b`, if it exists.
    pub fn complement(&self, a: usize, b: usize) -> Option<usize> {
        let c = self.directions[a].cross(self.directions[b]);
        let g = gcd(gcd(c[0], c[1]), c[2]);
        if g == 0 {
            return None;
        }
        let c = c.map(|v| v / g);
        let cheb = c.iter().map(|v| v.abs()).max().unwrap_or(0);
        if self.n as i64 % cheb != 0 {
            return None;
        }
        let k = self.n as i64 / cheb;
        self.index_of(GridDirection::new((c[0] * k) as i32, (c[1] * k) as i32, (c[2] * k) as i32))
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, list) in self.orth.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j as usize > i).map(|&j| (i as u32, j)));
        }
        out
    }

    /// Mutually orthogonal triples `i < j < k`.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for &j in self.orth[i].iter().filter(|&&j| j as usize > i) {
                if let Some(k) = self.complement(i, j as usize) {
                    if k > j as usize {
                        out.push([i as u32, j, k as u32]);
                    }
                }
            }
        }
        out
    }

    /// The 101-colouring instance of the whole orthogonality graph.
    pub fn problem(&self) -> ColouringProblem {
        ColouringProblem::new(self.len(), self.edges(), self.triangles())
    }

    /// Orthogonality graph on the directions `vertices` (in that order).
    pub fn subgraph(&self, vertices: &[u32]) -> Result<Graph> {
        let mut g = Graph::empty(vertices.len())?;
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.directions[u as usize].dot(self.directions[v as usize]) == 0 {
                    g.add_edge(a, b);
                }
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.directions.iter().map(|d| serde_json::json!(d.to_array())).collect())
    }

    fn orbit_representatives<const K: usize>(&self, axes: [usize; K], tuples: Vec<[u32; K]>) -> Vec<[u32; K]> {
        let syms = cube_symmetries();
        let mut seen: HashSet<[u32; K]> = HashSet::new();
        let mut reps = Vec::new();
        for t in std::iter::once(axes.map(|i| i as u32)).chain(tuples) {
            if seen.contains(&t) {
                continue;
            }
            reps.push(t);
            for s in &syms {
                let img = t.map(|i| {
                    let d = self.directions[i as usize].transform(s);
                    self.index_of(d).expect("symmetries preserve the grid") as u32
                });
                seen.insert(img);
            }
        }
        reps
    }

    fn axis(&self, k: usize) -> usize {
        let m = self.n as i32;
        let d = match k {
            0 => GridDirection::new(m, 0, 0),
            1 => GridDirection::new(0, m, 0),
            _ => GridDirection::new(0, 0, m),
        };
        self.index_of(d).expect("axes lie on every grid")
    }

    /// One ordered orthogonal triple per symmetry class, the axis triple first.
    fn triangle_pins(&self) -> &[[u32; 3]] {
        self.triangle_pins.get_or_init(|| {
            let mut all = Vec::new();
            for i in 0..self.len() {
                for &j in &self.orth[i] {
                    if let Some(k) = self.complement(i, j as usize) {
                        all.push([i as u32, j, k as u32]);
                    }
                }
            }
            self.orbit_representatives([self.axis(0), self.axis(1), self.axis(2)], all)
        })
    }

    /// One ordered orthogonal pair per symmetry class, the axis pair first.
    fn edge_pins(&self) -> &[[u32; 2]] {
        self.edge_pins.get_or_init(|| {
            let mut all = Vec::new();
            for i in 0..self.len() {
                all.extend(self.orth[i].iter().map(|&j| [i as u32, j]));
            }
            self.orbit_representatives([self.axis(0), self.axis(1)], all)
        })
    }
}

/// The orthogonality graph of a grid; only grids with at most 64
/// directions (`N <= 2`) fit in a [`Graph`].
pub fn grid_graph(sys: &GridSystem) -> Result<Graph> {
    if sys.len() > MAX_VERTICES {
        return Err(Error::VertexCount(sys.len()));
    }
    let all: Vec<u32> = (0..sys.len() as u32).collect();
    sys.subgraph(&all)
}

/// Vertex `v` is sent to `map[v]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEmbedding {
    pub grid_n: u32,
    pub map: Vec<GridDirection>,
}

impl GridEmbedding {
    /// Exact re-check: adjacent vertices orthogonal, images pairwise
    /// non-parallel and on the grid.
    pub fn validate(&self, g: &Graph) -> bool {
        if self.map.len() != g.n() {
            return false;
        }
        let m = self.grid_n as i32;
        if self.map.iter().any(|d| d.chebyshev() != m || !d.is_normalised()) {
            return false;
        }
        for (u, v) in g.edges() {
            if self.map[u].dot(self.map[v]) != 0 {
                return false;
            }
        }
        let distinct: HashSet<_> = self.map.iter().collect();
        distinct.len() == self.map.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.map.iter().enumerate().map(|(v, d)| (v.to_string(), serde_json::json!(d.to_array()))).collect();
        serde_json::json!({ "grid_n": self.grid_n, "map": map })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridEmbedOutcome {
    Embedded(GridEmbedding),
    /// The search was exhausted. Says nothing about embeddability over the
    /// reals.
    NotFoundOnThisGrid,
}

impl GridEmbedOutcome {
    pub fn embedding(&self) -> Option<&GridEmbedding> {
        match self {
            GridEmbedOutcome::Embedded(e) => Some(e),
            GridEmbedOutcome::NotFoundOnThisGrid => None,
        }
    }
}

struct EmbedSearch<'a> {
    sys: &'a GridSystem,
    order: Vec<usize>,
    earlier: Vec<Vec<usize>>,
    map: Vec<u32>,
    used: Vec<bool>,
    nodes: u64,
    limit: u64,
}

impl EmbedSearch<'_> {
    fn place(&mut self, v: usize, d: u32, pos: usize) -> Result<bool> {
        self.map[v] = d;
        self.used[d as usize] = true;
        let ok = self.go(pos + 1)?;
        if !ok {
            self.used[d as usize] = false;
        }
        Ok(ok)
    }

    fn fits(&self, pos: usize, d: usize, skip: usize) -> bool {
        if self.used[d] {
            return false;
        }
        let dir = self.sys.directions[d];
        self.earlier[pos][skip..].iter().all(|&u| dir.dot(self.sys.directions[self.map[u] as usize]) == 0)
    }

    fn go(&mut self, pos: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        if pos == self.order.len() {
            return Ok(true);
        }
        let v = self.order[pos];
        let sys = self.sys;
        match self.earlier[pos].len() {
            0 => {
                for d in 0..sys.len() {
                    if !self.used[d] && self.place(v, d as u32, pos)? {
                        return Ok(true);
                    }
                }
            }
            1 => {
                let a = self.map[self.earlier[pos][0]] as usize;
                for &d in &sys.orth[a] {
                    if !self.used[d as usize] && self.place(v, d, pos)? {
                        return Ok(true);
                    }
                }
            }
            _ => {
                let a = self.map[self.earlier[pos][0]] as usize;
                let b = self.map[self.earlier[pos][1]] as usize;
                if let Some(d) = sys.complement(a, b) {
                    if self.fits(pos, d, 2) && self.place(v, d as u32, pos)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

/// Placement order: `pinned` first, then repeatedly the vertex with the most
/// already-placed neighbours, ties by degree then index.
fn placement_order(g: &Graph, pinned: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut order = pinned.to_vec();
    let mut placed = vec![false; n];
    for &v in pinned {
        placed[v] = true;
    }
    let mut score = vec![0usize; n];
    for &v in pinned {
        for w in g.neighbours(v) {
            score[w] += 1;
        }
    }
    while order.len() < n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (score[v], g.degree(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex remains");
        placed[v] = true;
        order.push(v);
        for w in g.neighbours(v) {
            score[w] += 1;
        }
    }
    order
}

/// Searches for an injective map of `g` into the grid sending edges to
/// orthogonal pairs.
///
/// The first triangle (or, failing that, the first edge) is pinned to one
/// representative per symmetry class of ordered orthogonal triples (pairs),
/// starting with the coordinate axes. A `NotFoundOnThisGrid` result is
/// therefore exhaustive. `node_limit` bounds the total number of search
/// nodes over all pins.
pub fn grid_embed(g: &Graph, sys: &GridSystem, node_limit: u64) -> Result<GridEmbedOutcome> {
    if !g.is_square_free() || g.n() > sys.len() {
        return Ok(GridEmbedOutcome::NotFoundOnThisGrid);
    }
    let pins: Vec<(Vec<usize>, Vec<u32>)> = if let Some(&(a, b, c)) = g.triangles().first() {
        sys.triangle_pins().iter().map(|t| (vec![a, b, c], t.to_vec())).collect()
    } else if let Some(&(a, b)) = g.edges().first() {
        sys.edge_pins().iter().map(|t| (vec![a, b], t.to_vec())).collect()
    } else {
        vec![(Vec::new(), Vec::new())]
    };
    let pinned_vertices = pins[0].0.clone();
    let order = placement_order(g, &pinned_vertices);
    let mut position = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let earlier = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut e: Vec<usize> = g.neighbours(v).filter(|&w| position[w] < i).collect();
            e.sort_by_key(|&w| position[w]);
            e
        })
        .collect();
    let mut search = EmbedSearch {
        sys,
        order,
        earlier,
        map: vec![0; g.n()],
        used: vec![false; sys.len()],
        nodes: 0,
        limit: node_limit,
    };
    let k = pinned_vertices.len();
    for (_, images) in &pins {
        for (&v, &d) in pinned_vertices.iter().zip(images) {
            search.map[v] = d;
            search.used[d as usize] = true;
        }
        let found = search.go(k)?;
        if found {
            let map = search.map.iter().map(|&d| sys.directions[d as usize]).collect();
            return Ok(GridEmbedOutcome::Embedded(GridEmbedding { grid_n: sys.n, map }));
        }
        for &d in images {
            search.used[d as usize] = false;
        }
    }
    Ok(GridEmbedOutcome::NotFoundOnThisGrid)
}

/// Greedy reduction of an uncolourable instance to a critical one: vertices
/// are visited once in `order` and dropped whenever the rest stays
/// uncolourable. One pass suffices because colourability is inherited by
/// induced subgraphs, so a vertex needed once stays needed. Returns the kept
/// vertices in increasing order.
pub fn minimize_problem(p: &ColouringProblem, order: &[usize]) -> Result<Vec<usize>> {
    if solve_101_problem(p).0.is_colourable() {
        return Err(Error::Precondition("instance is 101-colourable".into()));
    }
    let mut keep = vec![true; p.n()];
    for &v in order {
        keep[v] = false;
        let (sub, _) = p.induced(&keep);
        if solve_101_problem(&sub).0.is_colourable() {
            keep[v] = true;
        }
    }
    Ok((0..p.n()).filter(|&v| keep[v]).collect())
}

/// Critical subsystem of the whole grid, scanning directions in index order.
pub fn minimize_uncolourable(sys: &GridSystem) -> Result<Vec<u32>> {
    let order: Vec<u32> = (0..sys.len() as u32).collect();
    minimize_uncolourable_with_order(sys, &order)
}

pub fn minimize_uncolourable_with_order(sys: &GridSystem, order: &[u32]) -> Result<Vec<u32>> {
    let order: Vec<usize> = order.iter().map(|&v| v as usize).collect();
    Ok(minimize_problem(&sys.problem(), &order)?.into_iter().map(|v| v as u32).collect())
}

/// True iff the directions form a non-101-colourable system whose every
/// one-vertex deletion is colourable.
pub fn is_critical(p: &ColouringProblem, vertices: &[usize]) -> bool {
    let mut keep = vec![false; p.n()];
    for &v in vertices {
        keep[v] = true;
    }
    if solve_101_problem(&p.induced(&keep).0).0.is_colourable() {
        return false;
    }
    vertices.iter().all(|&v| {
        keep[v] = false;
        let ok = solve_101_problem(&p.induced(&keep).0).0.is_colourable();
        keep[v] = true;
        ok
    })
}

/// A critical non-101-colourable set of grid directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub vertices: Vec<u32>,
    pub graph: Graph,
    pub canonical: Graph,
}

impl Subsystem {
    fn new(sys: &GridSystem, vertices: Vec<u32>) -> Result<Self> {
        let graph = sys.subgraph(&vertices)?;
        let canonical = canonical_label(&graph, DEFAULT_NODE_LIMIT)?;
        Ok(Subsystem { vertices, graph, canonical })
    }

    pub fn directions<'a>(&'a self, sys: &'a GridSystem) -> impl Iterator<Item = GridDirection> + 'a {
        self.vertices.iter().map(|&v| sys.direction(v as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsystemSearchMode {
    /// Every vertex subset of size at most the bound, in increasing index
    /// order. Only feasible for tiny grids.
    Exhaustive,
    /// Greedy minimisation from `samples` random scan orders.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Default)]
pub struct SubsystemSearch {
    /// Distinct critical subsystems, one per isomorphism class, in discovery
    /// order.
    pub found: Vec<Subsystem>,
    /// The budget ran out before the search finished.
    pub truncated: bool,
    /// Solver calls made.
    pub steps: u64,
}

/// Searches for critical non-101-colourable subsystems with at most
/// `size_bound` directions. `budget` caps the number of solver calls.
pub fn enumerate_grid_subsystems(
    sys: &GridSystem,
    size_bound: usize,
    budget: u64,
    mode: SubsystemSearchMode,
) -> Result<SubsystemSearch> {
    if size_bound > MAX_VERTICES {
        return Err(Error::Precondition(format!("size bound {size_bound} exceeds {MAX_VERTICES}")));
    }
    let p = sys.problem();
    let mut out = SubsystemSearch { steps: 1, ..Default::default() };
    if solve_101_problem(&p).0.is_colourable() {
        return Ok(out);
    }
    let mut seen = HashSet::new();
    let mut record = |out: &mut SubsystemSearch, vertices: Vec<u32>| -> Result<()> {
        let s = Subsystem::new(sys, vertices)?;
        if seen.insert(s.canonical.upper_triangle()) {
            out.found.push(s);
        }
        Ok(())
    };
    match mode {
        SubsystemSearchMode::Exhaustive => {
            let mut chosen = Vec::new();
            let mut found = Vec::new();
            let complete = exhaustive(&p, size_bound, 0, &mut chosen, &mut out.steps, budget, &mut found);
            out.truncated = !complete;
            for v in found {
                record(&mut out, v)?;
            }
        }
        SubsystemSearchMode::Sampled { samples, seed } => {
            let chunk = rayon::current_num_threads().max(1);
            let mut next = 0;
            while next < samples {
                let cost = (chunk.min(samples - next) * (p.n() + 1)) as u64;
                if out.steps + cost > budget {
                    out.truncated = true;
                    break;
                }
                let batch: Vec<Result<Vec<usize>>> = (next..(next + chunk).min(samples))
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(i as u64);
                        let mut order: Vec<usize> = (0..p.n()).collect();
                        order.shuffle(&mut rng);
                        minimize_problem(&p, &order)
                    })
                    .collect();
                out.steps += cost;
                for kept in batch {
                    let kept = kept?;
                    if kept.len() <= size_bound {
                        record(&mut out, kept.into_iter().map(|v| v as u32).collect())?;
                    }
                }
                next += chunk;
            }
        }
    }
    Ok(out)
}

/// Depth-first over increasing index subsets; an uncolourable subset is
/// reported if critical and never extended. Returns false on budget
/// exhaustion.
fn exhaustive(
    p: &ColouringProblem,
    bound: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    steps: &mut u64,
    budget: u64,
    found: &mut Vec<Vec<u32>>,
) -> bool {
    for v in start..p.n() {
        *steps += 1;
        if *steps > budget {
            return false;
        }
        chosen.push(v);
        let mut keep = vec![false; p.n()];
        for &c in chosen.iter() {
            keep[c] = true;
        }
        if !solve_101_problem(&p.induced(&keep).0).0.is_colourable() {
            if is_critical(p, chosen) {
                found.push(chosen.iter().map(|&c| c as u32).collect());
            }
        } else if chosen.len() < bound && !exhaustive(p, bound, v + 1, chosen, steps, budget, found) {
            return false;
        }
        chosen.pop();
    }
    true
}
