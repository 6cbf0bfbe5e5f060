//! Hull-consistency narrowing and bisection.

use std::collections::VecDeque;

use super::arith::Interval;
use super::system::{Constraint, ConstraintSystem, IntervalBox, Term};
use crate::error::{Error, Result};

/// A constraint that provably has no solution in `before`.
#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    pub constraint: usize,
    pub before: IntervalBox,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Contraction {
    Narrowed(IntervalBox),
    Empty(Refutation),
}

/// Narrowing below this fraction of the old width requeues dependents.
const REQUEUE_RATIO: f64 = 0.9;
const MAX_REVISES_PER_CONSTRAINT: usize = 30;

/// Shrinks `x` to the part that can satisfy `term in need`, or `None`.
fn project(term: &Term, need: Interval, b: &mut IntervalBox, changed: &mut Vec<usize>) -> Option<()> {
    let mut set = |b: &mut IntervalBox, var: usize, new: Interval| {
        let old = b[var];
        if new != old {
            if new.width() < REQUEUE_RATIO * old.width() {
                changed.push(var);
            }
            b[var] = new;
        }
    };
    match *term {
        Term::Linear { coef, .. } | Term::Square { coef, .. } | Term::Product { coef, .. } if coef == 0.0 => {}
        Term::Linear { var, coef } => {
            let x = need.div(Interval::point(coef))?;
            let new = x.intersect(b[var])?;
            set(b, var, new);
        }
        Term::Square { var, coef } => {
            let sq = need.div(Interval::point(coef))?.intersect(Interval::new(0.0, f64::INFINITY))?;
            let r = sq.sqrt()?;
            let x = b[var];
            let pos = r.intersect(x);
            let neg = r.neg().intersect(x);
            let new = match (pos, neg) {
                (Some(p), Some(q)) => p.hull(q),
                (Some(p), None) => p,
                (None, Some(q)) => q,
                (None, None) => return None,
            };
            set(b, var, new);
        }
        Term::Product { a, b: v, coef } => {
            let p = need.div(Interval::point(coef))?;
            if !b[v].contains_zero() {
                let new = p.div(b[v]).expect("divisor excludes zero").intersect(b[a])?;
                set(b, a, new);
            } else if b[v].is_point() && !p.contains_zero() {
                return None;
            }
            if !b[a].contains_zero() {
                let new = p.div(b[a]).expect("divisor excludes zero").intersect(b[v])?;
                set(b, v, new);
            } else if b[a].is_point() && !p.contains_zero() {
                return None;
            }
        }
    }
    Some(())
}

/// One pass of hull consistency over a single constraint. Returns `false`
/// if the constraint cannot be met in `b`.
pub fn revise(c: &Constraint, b: &mut IntervalBox, changed: &mut Vec<usize>) -> bool {
    let target = c.target();
    let vals: Vec<Interval> = c.terms.iter().map(|t| t.eval(b)).collect();
    let total = vals.iter().fold(Interval::ZERO, |acc, &v| acc.add(v));
    if total.intersect(target).is_none() {
        return false;
    }
    for (k, term) in c.terms.iter().enumerate() {
        let others = vals.iter().enumerate().filter(|&(j, _)| j != k).fold(Interval::ZERO, |acc, (_, &v)| acc.add(v));
        let Some(need) = target.sub(others).intersect(vals[k]) else {
            return false;
        };
        if project(term, need, b, changed).is_none() {
            return false;
        }
    }
    true
}

/// Narrows `b` to a sub-box containing every solution of `cs` in `b`, or
/// proves that there is none.
pub fn contract(b: &IntervalBox, cs: &ConstraintSystem) -> Contraction {
    let mut cur = b.clone();
    let m = cs.constraints.len();
    let mut queue: VecDeque<usize> = (0..m).collect();
    let mut queued = vec![true; m];
    let mut revises = 0;
    let limit = MAX_REVISES_PER_CONSTRAINT * m.max(1);
    let mut changed = Vec::new();
    while let Some(c) = queue.pop_front() {
        queued[c] = false;
        revises += 1;
        let before = cur.clone();
        changed.clear();
        if !revise(&cs.constraints[c], &mut cur, &mut changed) {
            return Contraction::Empty(Refutation { constraint: c, before });
        }
        if revises >= limit {
            continue;
        }
        for &v in &changed {
            for &d in &cs.occurrences[v] {
                if !queued[d] {
                    queued[d] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    Contraction::Narrowed(cur)
}

/// Splits the widest dimension (lowest index on ties) at its midpoint.
pub fn bisect(b: &IntervalBox) -> Result<(IntervalBox, IntervalBox)> {
    let mut dim = 0;
    let mut widest = -1.0;
    for (i, iv) in b.0.iter().enumerate() {
        let w = iv.width();
        if w > widest {
            widest = w;
            dim = i;
        }
    }
    let Interval { lo, hi } = *b.0.get(dim).ok_or(Error::WidthUnderflow { dim: 0, lo: 0.0, hi: 0.0 })?;
    let mid = lo + (hi - lo) / 2.0;
    if !(lo < mid && mid < hi) {
        return Err(Error::WidthUnderflow { dim, lo, hi });
    }
    let mut left = b.clone();
    let mut right = b.clone();
    left[dim] = Interval::new(lo, mid);
    right[dim] = Interval::new(mid, hi);
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::system::ConstraintKind;

    fn equation(terms: Vec<Term>, constant: f64) -> Constraint {
        Constraint { terms, constant, lo: 0.0, hi: 0.0, kind: ConstraintKind::Other }
    }

    #[test]
    fn bisect_unit_interval() {
        let b = IntervalBox(vec![Interval::new(0.0, 1.0)]);
        let (l, r) = bisect(&b).unwrap();
        assert_eq!(l.0, vec![Interval::new(0.0, 0.5)]);
        assert_eq!(r.0, vec![Interval::new(0.5, 1.0)]);
    }

    #[test]
    fn bisect_tie_takes_lowest_index() {
        let mut v = vec![Interval::new(0.0, 0.5); 6];
        v[2] = Interval::new(0.0, 1.0);
        v[5] = Interval::new(3.0, 4.0);
        let (l, _) = bisect(&IntervalBox(v)).unwrap();
        assert_eq!(l[2], Interval::new(0.0, 0.5));
        assert_eq!(l[5], Interval::new(3.0, 4.0));
    }

    #[test]
    fn bisect_underflow() {
        let x = 1.0f64;
        let b = IntervalBox(vec![Interval::new(x, x.next_up())]);
        assert!(matches!(bisect(&b), Err(Error::WidthUnderflow { dim: 0, .. })));
        assert!(bisect(&IntervalBox(vec![Interval::point(1.0)])).is_err());
    }

    #[test]
    fn orthogonality_refuted() {
        // u = (1, 0, 0) fixed, v = (vx, vy, vz); u . v = vx = 0 impossible
        let domain = IntervalBox(vec![Interval::new(0.9, 1.0), Interval::new(-1.0, 1.0), Interval::new(0.0, 1.0)]);
        let c = equation(
            vec![
                Term::Linear { var: 0, coef: 1.0 },
                Term::Linear { var: 1, coef: 0.0 },
                Term::Linear { var: 2, coef: 0.0 },
            ],
            0.0,
        );
        let cs = ConstraintSystem::from_constraints(domain.clone(), vec![c]);
        assert!(matches!(contract(&domain, &cs), Contraction::Empty(Refutation { constraint: 0, .. })));
    }

    #[test]
    fn unit_norm_narrows_z() {
        let domain = IntervalBox(vec![Interval::new(0.8, 0.9), Interval::point(0.0), Interval::new(0.0, 1.0)]);
        let c = equation((0..3).map(|var| Term::Square { var, coef: 1.0 }).collect(), -1.0);
        let cs = ConstraintSystem::from_constraints(domain.clone(), vec![c]);
        let Contraction::Narrowed(b) = contract(&domain, &cs) else { panic!("refuted") };
        assert!(b[2].subset_of(Interval::new(0.43, 0.61)));
        assert!(b[2].contains((1.0f64 - 0.81).sqrt()) && b[2].contains((1.0f64 - 0.64).sqrt()));
    }
}
