use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{enclose, serde_rational, to_f64, Rational};

/// Quadratic folding map between two rectangles.
///
/// In local coordinates `ξ = x − x_c`, `η = y − y_pu` on the source rectangle
/// the map is `(ξ, η) ↦ (x_ps + ξ² − t + b·η, y_c + ξ)`, i.e. `G(x, y) =
/// (y, y² − t + b·x)` conjugated by the coordinate exchange. `W^u(p_u)` is the
/// line `y = y_pu` of the source and `W^s(p_s)` the line `x = x_ps` of the
/// target; at `t = 0` their images are tangent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldingModel {
    pub source: usize,
    pub target: usize,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub x_c: Rational,
    #[serde(with = "serde_rational")]
    pub y_pu: Rational,
    #[serde(with = "serde_rational")]
    pub x_ps: Rational,
    #[serde(with = "serde_rational")]
    pub y_c: Rational,
    /// Iterates of the original map spent inside the fold.
    pub n0: usize,
}

/// Axis-aligned box `[x.lo, x.hi] × [y.lo, y.hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TongueBox {
    pub x: Interval,
    pub y: Interval,
}

impl FoldingModel {
    pub fn validate(&self) -> Result<()> {
        if self.b <= Rational::from_integer(0.into()) {
            return Err(Error::InvalidModel(
                "fold coupling b must be positive".into(),
            ));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidModel(
                "fold iterate count N0 must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let xi = x - to_f64(&self.x_c);
        let eta = y - to_f64(&self.y_pu);
        (
            to_f64(&self.x_ps) + xi * xi - t + to_f64(&self.b) * eta,
            to_f64(&self.y_c) + xi,
        )
    }

    /// `[[∂x₂/∂x, ∂x₂/∂y], [∂y₂/∂x, ∂y₂/∂y]]`.
    pub fn jacobian(&self, x: f64) -> [[f64; 2]; 2] {
        [[2.0 * (x - to_f64(&self.x_c)), to_f64(&self.b)], [1.0, 0.0]]
    }

    /// Tip of the tongue `L_u`: the top of `{ξ² − t + b·η ≤ 0, η ≥ 0}`.
    pub fn tip_u(&self, t: Interval) -> (Interval, Interval) {
        let y = enclose(&self.y_pu) + t / enclose(&self.b);
        (enclose(&self.x_c), y)
    }

    /// Tip of the tongue `L_s`: the vertex of the image of `W^u(p_u)`.
    pub fn tip_s(&self, t: Interval) -> (Interval, Interval) {
        (enclose(&self.x_ps) - t, enclose(&self.y_c))
    }

    /// Box containing `L_u` for every parameter in `t` (requires `t > 0`).
    pub fn tongue_u(&self, t: Interval) -> TongueBox {
        let half = Interval::point(t.hi).sqrt().hi;
        let x = enclose(&self.x_c);
        TongueBox {
            x: Interval::new((x - half).lo, (x + half).hi),
            y: Interval::new(enclose(&self.y_pu).lo, self.tip_u(t).1.hi),
        }
    }

    pub fn tongue_s(&self, t: Interval) -> TongueBox {
        let half = Interval::point(t.hi).sqrt().hi;
        let y = enclose(&self.y_c);
        TongueBox {
            x: Interval::new(self.tip_s(t).0.lo, enclose(&self.x_ps).hi),
            y: Interval::new((y - half).lo, (y + half).hi),
        }
    }

    /// The fold in the normalized coordinates of the limit endomorphism:
    /// `(u, v) ↦ (v, v² − t + b·u)`.
    pub fn normalized(&self, u: f64, v: f64, t: f64) -> (f64, f64) {
        (v, v * v - t + to_f64(&self.b) * u)
    }
}
