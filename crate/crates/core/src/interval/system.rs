//! Real constraint systems for embedding a graph as unit vectors.

use serde::{Deserialize, Serialize};

use super::arith::{add_down, add_up, Interval};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default separation between distinct vertices, in chord units.
pub const DEFAULT_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Term {
    Linear { var: usize, coef: f64 },
    Square { var: usize, coef: f64 },
    Product { a: usize, b: usize, coef: f64 },
}

impl Term {
    pub fn eval(&self, b: &IntervalBox) -> Interval {
        match *self {
            Term::Linear { var, coef } => b[var].scale(coef),
            Term::Square { var, coef } => b[var].sqr().scale(coef),
            Term::Product { a, b: v, coef } => b[a].mul(b[v]).scale(coef),
        }
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        match *self {
            Term::Linear { var, coef } => coef * x[var],
            Term::Square { var, coef } => coef * x[var] * x[var],
            Term::Product { a, b, coef } => coef * x[a] * x[b],
        }
    }

    /// Adds `d(term)/d(var)` over `b` into `out[var]`.
    pub fn gradient(&self, b: &IntervalBox, out: &mut [Interval]) {
        match *self {
            Term::Linear { var, coef } => out[var] = out[var].add(Interval::point(coef)),
            Term::Square { var, coef } => out[var] = out[var].add(b[var].scale(2.0 * coef)),
            Term::Product { a, b: v, coef } => {
                out[a] = out[a].add(b[v].scale(coef));
                out[v] = out[v].add(b[a].scale(coef));
            }
        }
    }

    pub fn gradient_point(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            Term::Linear { var, coef } => out[var] += coef,
            Term::Square { var, coef } => out[var] += 2.0 * coef * x[var],
            Term::Product { a, b, coef } => {
                out[a] += coef * x[b];
                out[b] += coef * x[a];
            }
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Term::Linear { var, .. } | Term::Square { var, .. } => (var, None),
            Term::Product { a, b, .. } => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    UnitNorm { vertex: usize },
    Orthogonal { u: usize, v: usize },
    Distinct { u: usize, v: usize },
    Other,
}

/// `lo <= constant + sum(terms) <= hi`; an equation when `lo == hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub constant: f64,
    pub lo: f64,
    pub hi: f64,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn is_equation(&self) -> bool {
        self.lo == self.hi
    }

    pub fn eval(&self, b: &IntervalBox) -> Interval {
        self.terms.iter().fold(Interval::point(self.constant), |acc, t| acc.add(t.eval(b)))
    }

    /// Residual of an equation at a point, in plain floating point.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|t| t.eval_point(x)).sum::<f64>() - self.lo
    }

    /// The allowed range of `sum(terms)`, rounded outward.
    pub fn target(&self) -> Interval {
        Interval::new(add_down(self.lo, -self.constant), add_up(self.hi, -self.constant))
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|t| t.vars())
    }
}

/// One closed interval per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox(pub Vec<Interval>);

impl IntervalBox {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(|i| i.mid()).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.0.iter().map(|i| i.width()).fold(0.0, f64::max)
    }

    /// Sum of log widths, with zero widths counted as `1e-300`.
    pub fn log_volume(&self) -> f64 {
        self.0.iter().map(|i| i.width().max(1e-300).ln()).sum()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.0.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    pub fn subset_of(&self, o: &IntervalBox) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a.subset_of(*b))
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for IntervalBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

/// Where a coordinate of a vertex lives: a search variable or a constant of
/// the pinning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coord {
    Var(usize),
    Const(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pinning {
    Triangle([usize; 3]),
    Edge([usize; 2]),
    None,
}

/// Unit-vector embedding constraints for one graph.
///
/// Variables `3i, 3i+1, 3i+2` are the coordinates of the `i`-th free vertex.
/// Pinned vertices sit on coordinate axes. Non-adjacent vertices must
/// satisfy `|u . v| <= 1 - delta^2 / 2`, which says that neither `u - v` nor
/// `u + v` is shorter than `delta`: directions are compared up to sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub n: usize,
    pub delta: f64,
    pub pinning: Pinning,
    pub free: Vec<usize>,
    pub coords: Vec<[Coord; 3]>,
    pub constraints: Vec<Constraint>,
    pub domain: IntervalBox,
    /// Constraints between two pinned vertices that fail outright.
    pub pinned_violations: Vec<ConstraintKind>,
    pub occurrences: Vec<Vec<usize>>,
}

fn axis(k: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[k] = 1.0;
    e
}

impl ConstraintSystem {
    /// System with raw constraints over `domain`; used for small hand-built
    /// instances.
    pub fn from_constraints(domain: IntervalBox, constraints: Vec<Constraint>) -> Self {
        let mut cs = ConstraintSystem {
            n: 0,
            delta: 0.0,
            pinning: Pinning::None,
            free: Vec::new(),
            coords: Vec::new(),
            constraints,
            domain,
            pinned_violations: Vec::new(),
            occurrences: Vec::new(),
        };
        cs.index();
        cs
    }

    fn index(&mut self) {
        let mut occ = vec![Vec::new(); self.domain.dim()];
        for (c, con) in self.constraints.iter().enumerate() {
            for v in con.vars() {
                if occ[v].last() != Some(&c) {
                    occ[v].push(c);
                }
            }
        }
        self.occurrences = occ;
    }

    pub fn num_vars(&self) -> usize {
        self.domain.dim()
    }

    pub fn equations(&self) -> impl Iterator<Item = (usize, &Constraint)> {
        self.constraints.iter().enumerate().filter(|(_, c)| c.is_equation())
    }

    /// The separation bound `1 - delta^2 / 2`, rounded down.
    pub fn distinct_bound(&self) -> f64 {
        add_down(1.0, -(self.delta * self.delta / 2.0))
    }

    /// Interval of `u . v` over `b`.
    pub fn dot(&self, b: &IntervalBox, u: usize, v: usize) -> Interval {
        let mut acc = Interval::ZERO;
        for k in 0..3 {
            let x = self.coord_interval(b, u, k);
            let y = self.coord_interval(b, v, k);
            acc = acc.add(x.mul(y));
        }
        acc
    }

    pub fn coord_interval(&self, b: &IntervalBox, v: usize, k: usize) -> Interval {
        match self.coords[v][k] {
            Coord::Var(i) => b[i],
            Coord::Const(c) => Interval::point(c),
        }
    }

    /// Coordinates of every vertex at a point of the search space.
    pub fn vectors(&self, x: &[f64]) -> Vec<[f64; 3]> {
        self.coords
            .iter()
            .map(|c| {
                c.map(|k| match k {
                    Coord::Var(i) => x[i],
                    Coord::Const(v) => v,
                })
            })
            .collect()
    }

    /// True iff every pair of non-adjacent vertices is provably non-parallel
    /// over `b` (`|u . v| < 1` strictly); adjacent pairs are orthogonal.
    pub fn distinct_over(&self, g: &Graph, b: &IntervalBox) -> bool {
        for u in 0..self.n {
            for v in u + 1..self.n {
                if g.has_edge(u, v) {
                    continue;
                }
                let d = self.dot(b, u, v);
                if !(d.lo > -1.0 && d.hi < 1.0) {
                    return false;
                }
            }
        }
        true
    }
}

/// Terms of `u . v` plus its constant part.
fn dot_terms(coords: &[[Coord; 3]], u: usize, v: usize) -> (Vec<Term>, f64) {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    for k in 0..3 {
        match (coords[u][k], coords[v][k]) {
            (Coord::Var(a), Coord::Var(b)) => terms.push(Term::Product { a, b, coef: 1.0 }),
            (Coord::Var(a), Coord::Const(c)) | (Coord::Const(c), Coord::Var(a)) => {
                if c != 0.0 {
                    terms.push(Term::Linear { var: a, coef: c });
                }
            }
            (Coord::Const(c), Coord::Const(d)) => constant += c * d,
        }
    }
    (terms, constant)
}

/// Builds the system for `g`: the first triangle is pinned to the
/// coordinate axes (or the first edge to the x and y axes), every other
/// vertex gets three variables in `[-1, 1]^2 x [0, 1]`.
pub fn build_constraint_system(g: &Graph, delta: f64) -> Result<ConstraintSystem> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("separation {delta} outside (0, 1)")));
    }
    let n = g.n();
    let pinning = match (g.triangles().first(), g.edges().first()) {
        (Some(&(a, b, c)), _) => Pinning::Triangle([a, b, c]),
        (None, Some(&(a, b))) => Pinning::Edge([a, b]),
        _ => unreachable!("graph has an edge"),
    };
    let pinned: Vec<usize> = match pinning {
        Pinning::Triangle(t) => t.to_vec(),
        Pinning::Edge(e) => e.to_vec(),
        Pinning::None => Vec::new(),
    };
    let mut coords = vec![[Coord::Const(0.0); 3]; n];
    for (k, &v) in pinned.iter().enumerate() {
        coords[v] = axis(k).map(Coord::Const);
    }
    let free: Vec<usize> = (0..n).filter(|v| !pinned.contains(v)).collect();
    let mut domain = Vec::with_capacity(3 * free.len());
    for (i, &v) in free.iter().enumerate() {
        coords[v] = [Coord::Var(3 * i), Coord::Var(3 * i + 1), Coord::Var(3 * i + 2)];
        domain.extend([Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0), Interval::new(0.0, 1.0)]);
    }
    let mut cs = ConstraintSystem {
        n,
        delta,
        pinning,
        free: free.clone(),
        coords,
        constraints: Vec::new(),
        domain: IntervalBox(domain),
        pinned_violations: Vec::new(),
        occurrences: Vec::new(),
    };
    for &v in &free {
        let terms = (0..3)
            .map(|k| match cs.coords[v][k] {
                Coord::Var(var) => Term::Square { var, coef: 1.0 },
                Coord::Const(_) => unreachable!(),
            })
            .collect();
        cs.constraints.push(Constraint {
            terms,
            constant: -1.0,
            lo: 0.0,
            hi: 0.0,
            kind: ConstraintKind::UnitNorm { vertex: v },
        });
    }
    let bound = cs.distinct_bound();
    for u in 0..n {
        for v in u + 1..n {
            let adjacent = g.has_edge(u, v);
            let (terms, constant) = dot_terms(&cs.coords, u, v);
            let (lo, hi, kind) = if adjacent {
                (0.0, 0.0, ConstraintKind::Orthogonal { u, v })
            } else {
                (-bound, bound, ConstraintKind::Distinct { u, v })
            };
            if terms.is_empty() {
                if !(lo <= constant && constant <= hi) {
                    cs.pinned_violations.push(kind);
                }
                continue;
            }
            cs.constraints.push(Constraint { terms, constant, lo, hi, kind });
        }
    }
    cs.index();
    Ok(cs)
}
