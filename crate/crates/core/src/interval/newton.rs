//! Existence proofs with the Krawczyk operator.
//!
//! For a square system `F(y) = 0` on a box `X` with centre `y`, a point
//! matrix `C` close to `F'(y)^-1` and the interval Jacobian `F'(X)`,
//!
//! ```text
//! K(X) = y - C F(y) + (I - C F'(X)) (X - y)
//! ```
//!
//! `K(X)` inside the interior of `X` proves that `X` holds exactly one root.
//! Embedding systems usually have fewer equations than unknowns; the extra
//! unknowns are frozen at the values of an approximate root, picked by full
//! pivoting on the point Jacobian so the remaining square block is well
//! conditioned.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::arith::Interval;
use super::system::{ConstraintKind, ConstraintSystem, IntervalBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// The box `X` with `K(X)` in its interior; frozen variables are points.
    pub enclosure: IntervalBox,
    /// `K(X)` intersected with `X`: the root lies here.
    pub root_box: IntervalBox,
    /// Variables solved for by the square subsystem.
    pub pivots: Vec<usize>,
    /// Constraint indices of the equations.
    pub equations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Existence {
    Certified(Certificate),
    Unknown(String),
}

impl Existence {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Existence::Certified(c) => Some(c),
            Existence::Unknown(_) => None,
        }
    }
}

fn equation_indices(cs: &ConstraintSystem) -> Vec<usize> {
    cs.equations().map(|(i, _)| i).collect()
}

fn residuals(cs: &ConstraintSystem, eqs: &[usize], x: &[f64]) -> Vec<f64> {
    eqs.iter().map(|&i| cs.constraints[i].residual(x)).collect()
}

fn point_jacobian(cs: &ConstraintSystem, eqs: &[usize], x: &[f64]) -> DMatrix<f64> {
    let p = cs.num_vars();
    let mut j = DMatrix::zeros(eqs.len(), p);
    let mut row = vec![0.0; p];
    for (r, &i) in eqs.iter().enumerate() {
        row.iter_mut().for_each(|v| *v = 0.0);
        for t in &cs.constraints[i].terms {
            t.gradient_point(x, &mut row);
        }
        for (c, &v) in row.iter().enumerate() {
            j[(r, c)] = v;
        }
    }
    j
}

/// Gauss-Newton with minimum-norm steps from `start`.
fn approximate_root(cs: &ConstraintSystem, eqs: &[usize], start: &[f64]) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    for _ in 0..60 {
        let f = residuals(cs, eqs, &x);
        let norm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !norm.is_finite() {
            return None;
        }
        if norm < 1e-15 {
            return Some(x);
        }
        let j = point_jacobian(cs, eqs, &x);
        let pinv = j.pseudo_inverse(1e-12).ok()?;
        let step = pinv * DMatrix::from_column_slice(f.len(), 1, &f);
        let mut moved = 0.0f64;
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi -= s;
            moved = moved.max(s.abs());
        }
        if moved < 1e-17 {
            break;
        }
    }
    let f = residuals(cs, eqs, &x);
    (f.iter().fold(0.0f64, |a, v| a.max(v.abs())) < 1e-12).then_some(x)
}

/// Columns of a full-row-rank `m x p` matrix forming a nonsingular block,
/// by Gaussian elimination with full pivoting.
fn pivot_columns(j: &DMatrix<f64>) -> Option<Vec<usize>> {
    let (m, p) = j.shape();
    let mut a = j.clone();
    let mut rows: Vec<usize> = (0..m).collect();
    let mut cols: Vec<usize> = (0..p).collect();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for k in 0..m {
        let (mut br, mut bc, mut best) = (k, k, 0.0);
        for r in k..m {
            for c in k..p {
                let v = a[(rows[r], cols[c])].abs();
                if v > best {
                    (br, bc, best) = (r, c, v);
                }
            }
        }
        if best < 1e-9 * scale {
            return None;
        }
        rows.swap(k, br);
        cols.swap(k, bc);
        let pr = rows[k];
        let pc = cols[k];
        for r in k + 1..m {
            let rr = rows[r];
            let f = a[(rr, pc)] / a[(pr, pc)];
            if f != 0.0 {
                for c in k..p {
                    let cc = cols[c];
                    let v = a[(pr, cc)];
                    a[(rr, cc)] -= f * v;
                }
            }
        }
    }
    let mut piv = cols[..m].to_vec();
    piv.sort_unstable();
    Some(piv)
}

/// `K(X)` for the pivot variables of `z`, where non-pivot variables of `z`
/// are points. `None` if the midpoint Jacobian block is singular.
fn krawczyk(cs: &ConstraintSystem, eqs: &[usize], pivots: &[usize], z: &IntervalBox) -> Option<Vec<Interval>> {
    let m = pivots.len();
    let centre: Vec<f64> = z.mid();
    let point = IntervalBox(centre.iter().map(|&v| Interval::point(v)).collect());
    let fy: Vec<Interval> = eqs
        .iter()
        .map(|&i| {
            let c = &cs.constraints[i];
            c.eval(&point).sub(Interval::point(c.lo))
        })
        .collect();
    let jp = point_jacobian(cs, eqs, &centre);
    let block = DMatrix::from_fn(m, m, |r, c| jp[(r, pivots[c])]);
    let inv = block.try_inverse()?;
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let p = cs.num_vars();
    let mut jx = vec![vec![Interval::ZERO; m]; m];
    let mut grad = vec![Interval::ZERO; p];
    for (r, &i) in eqs.iter().enumerate() {
        grad.iter_mut().for_each(|g| *g = Interval::ZERO);
        for t in &cs.constraints[i].terms {
            t.gradient(z, &mut grad);
        }
        for (c, &v) in pivots.iter().enumerate() {
            jx[r][c] = grad[v];
        }
    }
    let dx: Vec<Interval> = pivots.iter().map(|&v| z[v].sub(Interval::point(centre[v]))).collect();
    let mut out = Vec::with_capacity(m);
    for r in 0..m {
        let mut acc = Interval::point(centre[pivots[r]]);
        for k in 0..m {
            acc = acc.sub(fy[k].scale(inv[(r, k)]));
        }
        for c in 0..m {
            // (I - C J(X))[r][c]
            let mut e = Interval::point(if r == c { 1.0 } else { 0.0 });
            for k in 0..m {
                e = e.sub(jx[k][c].scale(inv[(r, k)]));
            }
            acc = acc.add(e.mul(dx[c]));
        }
        out.push(acc);
    }
    Some(out)
}

/// Checks every inequality over `b`: non-adjacent pairs must be strictly
/// non-parallel, other inequalities must hold throughout.
fn inequalities_hold(cs: &ConstraintSystem, b: &IntervalBox) -> bool {
    cs.constraints.iter().filter(|c| !c.is_equation()).all(|c| {
        let v = c.eval(b);
        match c.kind {
            ConstraintKind::Distinct { .. } => v.lo > -1.0 && v.hi < 1.0,
            _ => c.lo <= v.lo && v.hi <= c.hi,
        }
    })
}

const RADII: [f64; 5] = [1e-12, 1e-10, 1e-8, 1e-6, 1e-4];

fn certify_near(cs: &ConstraintSystem, eqs: &[usize], x: &[f64], b: &IntervalBox) -> Result<Certificate, String> {
    let j = point_jacobian(cs, eqs, x);
    let pivots = pivot_columns(&j).ok_or("singular Jacobian at approximate root")?;
    let mut last = String::from("no radius worked");
    for r in RADII {
        let mut z = IntervalBox(x.iter().map(|&v| Interval::point(v)).collect());
        for &v in &pivots {
            let rad = r * x[v].abs().max(1.0);
            z[v] = Interval::point(x[v]).add(Interval::new(-rad, rad));
        }
        let Some(k) = krawczyk(cs, eqs, &pivots, &z) else {
            last = "singular interval Jacobian block".into();
            continue;
        };
        if !pivots.iter().zip(&k).all(|(&v, kv)| kv.interior_of(z[v])) {
            last = format!("K(X) not interior at radius {r:e}");
            continue;
        }
        let mut root = z.clone();
        for (&v, kv) in pivots.iter().zip(&k) {
            root[v] = kv.intersect(z[v]).expect("interior");
        }
        if !root.subset_of(b) {
            return Err("root enclosure leaves the box".into());
        }
        if !inequalities_hold(cs, &root) {
            return Err("root enclosure does not separate all vertices".into());
        }
        return Ok(Certificate { enclosure: z, root_box: root, pivots, equations: eqs.to_vec() });
    }
    Err(last)
}

/// Tries to prove that `b` contains a solution of `cs`. Starts Newton from
/// the midpoint of `b` and from `extra_starts` pseudo-random points of `b`.
pub fn prove_root_in_box_with(b: &IntervalBox, cs: &ConstraintSystem, extra_starts: usize) -> Existence {
    prove_root_near(b, b, cs, extra_starts)
}

/// Like [`prove_root_in_box_with`], but starts from points of `b` and only
/// requires the certified root to lie in `within`. Contracted boxes can be
/// far thinner than the Newton error in some coordinate, so the search
/// certifies against the whole space.
pub fn prove_root_near(b: &IntervalBox, within: &IntervalBox, cs: &ConstraintSystem, extra_starts: usize) -> Existence {
    if !cs.pinned_violations.is_empty() {
        return Existence::Unknown("pinned vertices violate a constraint".into());
    }
    let eqs = equation_indices(cs);
    let p = cs.num_vars();
    if eqs.len() > p {
        return Existence::Unknown(format!("overdetermined: {} equations in {p} unknowns", eqs.len()));
    }
    if eqs.is_empty() {
        let mid = IntervalBox(b.mid().into_iter().map(Interval::point).collect());
        return if inequalities_hold(cs, &mid) {
            Existence::Certified(Certificate {
                enclosure: mid.clone(),
                root_box: mid,
                pivots: vec![],
                equations: vec![],
            })
        } else {
            Existence::Unknown("midpoint violates an inequality".into())
        };
    }
    let mut seed = 0xC0FFEEu64;
    for iv in &b.0 {
        seed = seed.rotate_left(7) ^ iv.lo.to_bits() ^ iv.hi.to_bits().rotate_left(32);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("Newton did not converge");
    for attempt in 0..=extra_starts {
        let start: Vec<f64> = if attempt == 0 {
            b.mid()
        } else {
            b.0.iter().map(|iv| if iv.is_point() { iv.lo } else { rng.gen_range(iv.lo..=iv.hi) }).collect()
        };
        let Some(x) = approximate_root(cs, &eqs, &start) else { continue };
        if !within.contains_point(&x) {
            last = "Newton left the box".into();
            continue;
        }
        match certify_near(cs, &eqs, &x, within) {
            Ok(c) => return Existence::Certified(c),
            Err(e) => last = e,
        }
    }
    Existence::Unknown(last)
}

pub fn prove_root_in_box(b: &IntervalBox, cs: &ConstraintSystem) -> Existence {
    prove_root_in_box_with(b, cs, 8)
}

impl Certificate {
    /// Re-runs the Krawczyk test on the stored enclosure.
    pub fn verify(&self, cs: &ConstraintSystem) -> bool {
        if self.pivots.is_empty() {
            return inequalities_hold(cs, &self.root_box);
        }
        match krawczyk(cs, &self.equations, &self.pivots, &self.enclosure) {
            Some(k) => self.pivots.iter().zip(&k).all(|(&v, kv)| kv.interior_of(self.enclosure[v])),
            None => false,
        }
    }

    /// Applies `steps` further iterations `X <- K(X) & X`; returns the final
    /// box if every iterate stays inside the interior of the enclosure.
    pub fn refine(&self, cs: &ConstraintSystem, steps: usize) -> Option<IntervalBox> {
        let mut x = self.root_box.clone();
        for _ in 0..steps {
            if self.pivots.is_empty() {
                break;
            }
            let k = krawczyk(cs, &self.equations, &self.pivots, &x)?;
            for (&v, kv) in self.pivots.iter().zip(&k) {
                x[v] = kv.intersect(x[v])?;
                if !x[v].interior_of(self.enclosure[v]) {
                    return None;
                }
            }
        }
        Some(x)
    }
}
