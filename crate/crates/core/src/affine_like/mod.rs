//! Affine-like maps between strips of a Markov family of rectangles, their
//! cone and distortion conditions, and simple and parabolic compositions.

mod element;
mod fold;
mod rep;
mod strip;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub(crate) use element::{lower_f64, p_crosses, q_crosses};
pub use element::{
    parabolic_compose, simple_compose, transversality_ok, AffineLikeElement, Flags, Parabolic,
    Symbol, Word,
};
pub use fold::{FoldingModel, TongueBox};
pub use rep::{
    parabolic_width_constant, AffineRep, CompositeRep, DerivRanges, ImplicitRep, Quad, QuadRep,
};
pub use strip::{Poly2, Strip, StripKind};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeParams {
    pub lambda: f64,
    pub u: f64,
    pub v: f64,
    /// Distortion bound.
    pub c: f64,
}

impl ConeParams {
    pub fn new(lambda: f64, u: f64, v: f64, c: f64) -> Result<Self> {
        let p = ConeParams { lambda, u, v, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let uv = self.u * self.v;
        if !(uv > 1.0 && uv < self.lambda * self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "cone parameters need 1 < u*v < lambda^2 (u*v = {uv}, lambda = {})",
                self.lambda
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument(
                "distortion bound must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Bracket `[κ₁, κ₂]` with `κ₁|P||P′| ≤ |P″| ≤ κ₂|P||P′|` for simple
    /// compositions of elements satisfying these cone and distortion bounds.
    pub fn kappa_simple(&self) -> (f64, f64) {
        let w = 1.0 / (self.u * self.v);
        let lo = (-4.0 * self.c).exp() / (1.0 + w);
        let hi = 1.0 / (1.0 - w);
        (lo.next_down(), hi.next_up())
    }

    /// Bracket for `|P±|·δ^{1/2} / (|P₀||P₁|)` in parabolic compositions.
    pub fn kappa_parabolic(&self) -> (f64, f64) {
        let (lo, hi) = self.kappa_simple();
        (0.5 * lo, 0.5 * hi)
    }
}

/// `λ|A_x| + u|A_y| ≤ 1` and `λ|B_y| + v|B_x| ≤ 1` over the whole domain.
pub fn cone_holds(r: &DerivRanges, p: &ConeParams) -> bool {
    let side = |k: f64, main: Interval, m: f64, cross: Interval| {
        (Interval::point(k) * Interval::point(main.mag())
            + Interval::point(m) * Interval::point(cross.mag()))
        .hi <= 1.0
    };
    side(p.lambda, r.a_x, p.u, r.a_y) && side(p.lambda, r.b_y, p.v, r.b_x)
}

/// All six distortion quantities inside `[−C, C]`.
pub fn distortion_holds(r: &DerivRanges, c: f64) -> bool {
    r.distortion().iter().all(|i| i.lo >= -c && i.hi <= c)
}

pub fn verify_cone(rep: &ImplicitRep, params: &ConeParams) -> Result<bool> {
    Ok(cone_holds(&rep.ranges()?, params))
}

pub fn verify_distortion(rep: &ImplicitRep, c: f64) -> Result<bool> {
    Ok(distortion_holds(&rep.ranges()?, c))
}

/// `(d_s + d_u)² + m² < (d_s + d_u) + m` with `m = max(d_s, d_u)`, exactly.
pub fn py_condition(d_s: &Rational, d_u: &Rational) -> Result<bool> {
    let unit = |d: &Rational| !d.is_negative() && *d <= Rational::one();
    if !unit(d_s) || !unit(d_u) {
        return Err(Error::InvalidArgument(format!(
            "dimensions must lie in [0, 1], got ({d_s}, {d_u})"
        )));
    }
    let s = d_s + d_u;
    let m = d_s.max(d_u).clone();
    Ok(&s * &s + &m * &m < s + m)
}

/// Value of `(s + m) − (s² + m²)`; positive exactly when the condition holds.
pub fn py_margin(d_s: &Rational, d_u: &Rational) -> Rational {
    let s = d_s + d_u;
    let m = d_s.max(d_u).clone();
    let out = &s + &m - (&s * &s + &m * &m);
    if out.is_zero() {
        Rational::zero()
    } else {
        out
    }
}
