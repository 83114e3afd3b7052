use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// `x ↦ (a·x + b) / (c·x + d)` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Mobius {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius {
            a: Rational::one(),
            b: Rational::zero(),
            c: Rational::zero(),
            d: Rational::one(),
        }
    }

    pub fn affine(slope: Rational, offset: Rational) -> Self {
        Mobius {
            a: slope,
            b: offset,
            c: Rational::zero(),
            d: Rational::one(),
        }
    }

    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        let num = &self.a * x + &self.b;
        if self.c.is_zero() {
            return num / &self.d;
        }
        num / (&self.c * x + &self.d)
    }

    /// Derivative `det / (c·x + d)²`.
    pub fn deriv(&self, x: &Rational) -> Rational {
        let den = &self.c * x + &self.d;
        self.det() / (&den * &den)
    }

    /// `d/dx log|f'| = −2c / (c·x + d)`.
    pub fn log_deriv_slope(&self, x: &Rational) -> Rational {
        let two = Rational::from_integer(2.into());
        -(two * &self.c) / (&self.c * x + &self.d)
    }

    /// True when the denominator does not vanish on `[lo, hi]`.
    pub fn regular_on(&self, lo: &Rational, hi: &Rational) -> bool {
        let at_lo = &self.c * lo + &self.d;
        let at_hi = &self.c * hi + &self.d;
        !at_lo.is_zero() && !at_hi.is_zero() && at_lo.is_positive() == at_hi.is_positive()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
        .normalized()
    }

    /// Image of `[lo, hi]`, which must avoid the pole.
    pub fn image(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let p = self.apply(lo);
        let q = self.apply(hi);
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    fn normalized(self) -> Mobius {
        if self.d.is_zero() || self.d.is_one() {
            return self;
        }
        let d = self.d.clone();
        Mobius {
            a: self.a / &d,
            b: self.b / &d,
            c: self.c / &d,
            d: Rational::one(),
        }
    }
}
