//! Exact rational re-check of interval refutations.
//!
//! Every `f64` endpoint is a dyadic rational, so the refuted constraint can
//! be evaluated over the refuted box with exact rational interval
//! arithmetic. When that alone does not exclude the allowed range (the
//! floating-point contractor may have used projections the plain range
//! evaluation does not see), the constraint is evaluated exactly at the box
//! corners and at random points; any sample meeting the constraint would
//! contradict the refutation.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::contract::Refutation;
use super::system::{ConstraintSystem, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowResult {
    /// Exact range evaluation excludes the allowed range.
    Proved,
    /// Every exact sample violates the constraint.
    Sampled,
    /// An exact sample satisfies the constraint: the refutation is wrong.
    Contradicted,
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite endpoint")
}

#[derive(Clone)]
struct QInterval {
    lo: BigRational,
    hi: BigRational,
}

impl QInterval {
    fn new(lo: f64, hi: f64) -> Self {
        QInterval { lo: q(lo), hi: q(hi) }
    }

    fn scale(&self, k: &BigRational) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            QInterval { lo: b, hi: a }
        } else {
            QInterval { lo: a, hi: b }
        }
    }

    fn mul(&self, o: &QInterval) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        QInterval { lo, hi }
    }

    fn sqr(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -&self.lo > self.hi { -&self.lo } else { self.hi.clone() };
            QInterval { lo: BigRational::zero(), hi: &m * &m }
        } else {
            self.mul(self)
        }
    }

    fn add(&self, o: &QInterval) -> Self {
        QInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

fn exact_value(terms: &[Term], constant: &BigRational, x: &[BigRational]) -> BigRational {
    let mut acc = constant.clone();
    for t in terms {
        acc += match *t {
            Term::Linear { var, coef } => q(coef) * &x[var],
            Term::Square { var, coef } => q(coef) * &x[var] * &x[var],
            Term::Product { a, b, coef } => q(coef) * &x[a] * &x[b],
        };
    }
    acc
}

/// Re-checks `r` exactly; `samples` random points are used when the range
/// evaluation is not conclusive.
pub fn shadow_check(cs: &ConstraintSystem, r: &Refutation, samples: usize, seed: u64) -> ShadowResult {
    let c = &cs.constraints[r.constraint];
    let b = &r.before;
    let (lo, hi) = (q(c.lo), q(c.hi));
    let constant = q(c.constant);
    let mut range = QInterval { lo: constant.clone(), hi: constant.clone() };
    for t in &c.terms {
        let v = match *t {
            Term::Linear { var, coef } => QInterval::new(b[var].lo, b[var].hi).scale(&q(coef)),
            Term::Square { var, coef } => QInterval::new(b[var].lo, b[var].hi).sqr().scale(&q(coef)),
            Term::Product { a, b: v, coef } => {
                QInterval::new(b[a].lo, b[a].hi).mul(&QInterval::new(b[v].lo, b[v].hi)).scale(&q(coef))
            }
        };
        range = range.add(&v);
    }
    if range.hi < lo || range.lo > hi {
        return ShadowResult::Proved;
    }
    let mut vars: Vec<usize> = c.vars().collect();
    vars.sort_unstable();
    vars.dedup();
    let mut x: Vec<BigRational> = b.0.iter().map(|i| q(i.mid())).collect();
    let inside = |x: &[BigRational]| {
        let v = exact_value(&c.terms, &constant, x);
        lo <= v && v <= hi
    };
    let corners = 1usize << vars.len().min(10);
    for mask in 0..corners {
        for (k, &v) in vars.iter().enumerate() {
            x[v] = q(if mask >> k & 1 == 1 { b[v].hi } else { b[v].lo });
        }
        if inside(&x) {
            return ShadowResult::Contradicted;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        for &v in &vars {
            let iv = b[v];
            let t: f64 = rng.gen();
            x[v] = q(iv.lo) + (q(iv.hi) - q(iv.lo)) * q(t);
        }
        if inside(&x) {
            return ShadowResult::Contradicted;
        }
    }
    ShadowResult::Sampled
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::arith::Interval;
    use crate::interval::contract::{contract, Contraction};
    use crate::interval::system::{Constraint, ConstraintKind, IntervalBox};

    #[test]
    fn confirms_simple_refutation() {
        let domain = IntervalBox(vec![Interval::new(0.9, 1.0)]);
        let c = Constraint {
            terms: vec![Term::Linear { var: 0, coef: 1.0 }],
            constant: 0.0,
            lo: 0.0,
            hi: 0.0,
            kind: ConstraintKind::Other,
        };
        let cs = ConstraintSystem::from_constraints(domain.clone(), vec![c]);
        let Contraction::Empty(r) = contract(&domain, &cs) else { panic!("not refuted") };
        assert_eq!(shadow_check(&cs, &r, 16, 1), ShadowResult::Proved);
    }

    #[test]
    fn detects_bogus_refutation() {
        let domain = IntervalBox(vec![Interval::new(-1.0, 1.0)]);
        let c = Constraint {
            terms: vec![Term::Linear { var: 0, coef: 1.0 }],
            constant: 0.0,
            lo: 0.0,
            hi: 0.0,
            kind: ConstraintKind::Other,
        };
        let cs = ConstraintSystem::from_constraints(domain.clone(), vec![c]);
        let fake = Refutation { constraint: 0, before: IntervalBox(vec![Interval::new(0.0, 1.0)]) };
        assert_eq!(shadow_check(&cs, &fake, 16, 1), ShadowResult::Contradicted);
    }
}
