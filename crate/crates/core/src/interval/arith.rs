//! Closed intervals of `f64` with outward rounding.
//!
//! Each endpoint is first computed with round-to-nearest; the exact error of
//! that operation (TwoSum for addition, a fused multiply-add residual for
//! multiplication, division and square root) tells which side of the true
//! value the rounded result fell on, and the endpoint is moved one ulp
//! outward only when needed. Results near the underflow range, where the
//! residuals stop being exact, are widened unconditionally.

use std::fmt;

use serde::{Deserialize, Serialize};

const TINY: f64 = 1e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

/// Moves `x` one ulp down unless the exact value is known to be `>= x`.
#[inline]
fn down(x: f64, err: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else if !x.is_finite() {
        x
    } else if x.abs() < TINY || err < 0.0 {
        x.next_down()
    } else {
        x
    }
}

#[inline]
fn up(x: f64, err: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        f64::MIN
    } else if !x.is_finite() {
        x
    } else if x.abs() < TINY || err > 0.0 {
        x.next_up()
    } else {
        x
    }
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_finite() {
        down(s, two_sum_err(a, b, s))
    } else {
        down(s, 0.0)
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_finite() {
        up(s, two_sum_err(a, b, s))
    } else {
        up(s, 0.0)
    }
}

#[inline]
fn mul_err(a: f64, b: f64, p: f64) -> f64 {
    if p.is_finite() {
        a.mul_add(b, -p)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    down(p, mul_err(a, b, p))
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    up(p, mul_err(a, b, p))
}

/// Sign of `a / b - q`, from the exact remainder `a - q b`.
#[inline]
fn div_err(a: f64, b: f64, q: f64) -> f64 {
    if q.is_finite() {
        (-q).mul_add(b, a) * b.signum()
    } else {
        0.0
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    down(q, div_err(a, b, q))
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    up(q, div_err(a, b, q))
}

#[inline]
fn sqrt_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    let err = -s.mul_add(s, -x);
    down(s, err).max(0.0)
}

#[inline]
fn sqrt_up(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    let err = -s.mul_add(s, -x);
    up(s, err)
}

/// `[lo, hi]` with `lo <= hi`. Empty intervals are represented by `None`
/// where they can occur.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    pub fn mid(self) -> f64 {
        let m = self.lo + (self.hi - self.lo) / 2.0;
        m.clamp(self.lo, self.hi)
    }

    pub fn radius(self) -> f64 {
        let m = self.mid();
        add_up(self.hi, -m).max(add_up(m, -self.lo))
    }

    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn subset_of(self, o: Interval) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    /// Contained in the interior of `o`.
    pub fn interior_of(self, o: Interval) -> bool {
        o.lo < self.lo && self.hi < o.hi
    }

    pub fn intersect(self, o: Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(self, o: Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval { lo: add_down(self.lo, o.lo), hi: add_up(self.hi, o.hi) }
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval { lo: add_down(self.lo, -o.hi), hi: add_up(self.hi, -o.lo) }
    }

    pub fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, o.lo, o.hi);
        let lo = mul_down(a, c).min(mul_down(a, d)).min(mul_down(b, c)).min(mul_down(b, d));
        let hi = mul_up(a, c).max(mul_up(a, d)).max(mul_up(b, c)).max(mul_up(b, d));
        Interval { lo, hi }
    }

    pub fn scale(self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval { lo: mul_down(self.lo, k), hi: mul_up(self.hi, k) }
        } else {
            Interval { lo: mul_down(self.hi, k), hi: mul_up(self.lo, k) }
        }
    }

    pub fn sqr(self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: mul_down(self.lo, self.lo), hi: mul_up(self.hi, self.hi) }
        } else if self.hi <= 0.0 {
            Interval { lo: mul_down(self.hi, self.hi), hi: mul_up(self.lo, self.lo) }
        } else {
            let m = self.mag();
            Interval { lo: 0.0, hi: mul_up(m, m) }
        }
    }

    /// `self / o`, or `None` when `o` contains zero.
    pub fn div(self, o: Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let (a, b, c, d) = (self.lo, self.hi, o.lo, o.hi);
        let lo = div_down(a, c).min(div_down(a, d)).min(div_down(b, c)).min(div_down(b, d));
        let hi = div_up(a, c).max(div_up(a, d)).max(div_up(b, c)).max(div_up(b, d));
        Some(Interval { lo, hi })
    }

    /// Enclosure of `sqrt` over the nonnegative part; `None` if `hi < 0`.
    pub fn sqrt(self) -> Option<Interval> {
        if self.hi < 0.0 {
            return None;
        }
        Some(Interval { lo: sqrt_down(self.lo.max(0.0)), hi: sqrt_up(self.hi) })
    }
}
