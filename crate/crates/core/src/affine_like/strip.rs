use serde::Serialize;

use crate::interval::Interval;

/// `c0 + c1·(s − center) + c2·(s − center)²` with interval coefficients.
///
/// The coefficients enclose the boundary curve for every parameter value in
/// the element's parameter interval; `c2` may also absorb a Taylor remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Poly2 {
    pub center: f64,
    pub c: [Interval; 3],
}

impl Poly2 {
    pub fn linear(c0: Interval, c1: Interval) -> Self {
        Poly2 {
            center: 0.0,
            c: [c0, c1, Interval::ZERO],
        }
    }

    pub fn eval(&self, s: Interval) -> Interval {
        let d = s - self.center;
        self.c[0] + self.c[1] * d + self.c[2] * d.sqr()
    }

    pub fn eval_at(&self, s: f64) -> Interval {
        self.eval(Interval::point(s))
    }

    pub fn range(&self) -> Interval {
        self.eval(Interval::new(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StripKind {
    /// `φ⁻(y) ≤ x ≤ φ⁺(y)`.
    Vertical,
    /// `ψ⁻(x) ≤ y ≤ ψ⁺(x)`.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strip {
    pub kind: StripKind,
    pub rect: usize,
    pub minus: Poly2,
    pub plus: Poly2,
}

impl Strip {
    /// Transverse extent at the given position along the strip.
    pub fn extent_at(&self, s: f64) -> (Interval, Interval) {
        (self.minus.eval_at(s), self.plus.eval_at(s))
    }

    /// Hull of all transverse coordinates of the strip.
    pub fn hull(&self) -> Interval {
        self.minus.range().hull(&self.plus.range())
    }

    /// Lower bound on the transverse distance from `point` to the strip, at
    /// position `s` along it.
    pub fn distance_lower(&self, s: f64, point: Interval) -> f64 {
        let (lo, hi) = self.extent_at(s);
        if point.hi < lo.lo {
            (Interval::point(lo.lo) - Interval::point(point.hi))
                .lo
                .max(0.0)
        } else if point.lo > hi.hi {
            (Interval::point(point.lo) - Interval::point(hi.hi))
                .lo
                .max(0.0)
        } else {
            0.0
        }
    }

    /// Certainly non-empty: `minus < plus` on the whole strip.
    pub fn is_nonempty(&self) -> bool {
        let gap =
            self.plus.eval(Interval::new(0.0, 1.0)) - self.minus.eval(Interval::new(0.0, 1.0));
        gap.lo > 0.0 || {
            // Interval evaluation over the whole range is loose; check pointwise.
            (0..=16).all(|i| {
                let s = i as f64 / 16.0;
                (self.plus.eval_at(s) - self.minus.eval_at(s)).lo > 0.0
            })
        }
    }

    pub fn transpose(&self) -> Strip {
        Strip {
            kind: match self.kind {
                StripKind::Vertical => StripKind::Horizontal,
                StripKind::Horizontal => StripKind::Vertical,
            },
            ..*self
        }
    }
}
