//! Closed intervals of `f64` with outward rounding.
//!
//! Every arithmetic result is widened by one ulp on each side, so the true
//! real-number result of the operation on any points of the operands lies in
//! the returned interval.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Panics if `lo > hi` or either end is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest interval containing both endpoints, in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    /// Widens a point value that is itself only known up to rounding.
    pub fn around(x: f64) -> Self {
        Interval {
            lo: down(x),
            hi: up(x),
        }
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value over the interval.
    pub fn mig(&self) -> f64 {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Distance between two intervals, zero when they meet. Rounded down.
    pub fn distance_lower(&self, other: &Interval) -> f64 {
        if self.intersects(other) {
            0.0
        } else if self.hi < other.lo {
            down(other.lo - self.hi).max(0.0)
        } else {
            down(self.lo - other.hi).max(0.0)
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval {
            lo: down(a.lo * a.lo).max(0.0),
            hi: up(a.hi * a.hi),
        }
    }

    /// Square root; the interval must be non-negative.
    pub fn sqrt(&self) -> Interval {
        assert!(self.lo >= 0.0, "sqrt of interval with negative part");
        Interval {
            lo: down(self.lo.sqrt()).max(0.0),
            hi: up(self.hi.sqrt()),
        }
    }

    /// `self^p` for a non-negative base and real exponent.
    ///
    /// `powf` is not correctly rounded, so the result is widened by a few ulps.
    pub fn powf(&self, p: f64) -> Interval {
        assert!(self.lo >= 0.0, "powf of interval with negative part");
        let a = self.lo.powf(p);
        let b = self.hi.powf(p);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval {
            lo: down(down(down(lo))).max(0.0),
            hi: up(up(up(hi))),
        }
    }

    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0.0, "ln of non-positive interval");
        Interval {
            lo: down(down(self.lo.ln())),
            hi: up(up(self.hi.ln())),
        }
    }

    pub fn exp(&self) -> Interval {
        Interval {
            lo: down(down(self.lo.exp())).max(0.0),
            hi: up(up(self.hi.exp())),
        }
    }

    pub fn recip(&self) -> Interval {
        assert!(
            !self.contains_zero(),
            "reciprocal of interval containing zero"
        );
        Interval {
            lo: down(1.0 / self.hi),
            hi: up(1.0 / self.lo),
        }
    }

    pub fn scale(&self, k: f64) -> Interval {
        *self * Interval::point(k)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        self * rhs.recip()
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}
