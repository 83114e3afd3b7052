//! Implicit representations `x₀ = A(x₁, y₀)`, `y₁ = B(x₁, y₀)` and their
//! certified derivative ranges over the unit square.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::fold::FoldingModel;
use super::strip::{Poly2, Strip, StripKind};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{enclose, int, ratio, serde_rational, to_f64, Rational};

/// Certified ranges over `(x₁, y₀) ∈ [0,1]²` and the parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivRanges {
    pub a_x: Interval,
    pub a_y: Interval,
    pub b_x: Interval,
    pub b_y: Interval,
    pub dx_log_ax: Interval,
    pub dy_log_ax: Interval,
    pub a_yy: Interval,
    pub dy_log_by: Interval,
    pub dx_log_by: Interval,
    pub b_xx: Interval,
}

impl DerivRanges {
    /// The six distortion quantities.
    pub fn distortion(&self) -> [Interval; 6] {
        [
            self.dx_log_ax,
            self.dy_log_ax,
            self.a_yy,
            self.dy_log_by,
            self.dx_log_by,
            self.b_xx,
        ]
    }

    pub fn transpose(&self) -> DerivRanges {
        DerivRanges {
            a_x: self.b_y,
            a_y: self.b_x,
            b_x: self.a_y,
            b_y: self.a_x,
            dx_log_ax: self.dy_log_by,
            dy_log_ax: self.dx_log_by,
            a_yy: self.b_xx,
            dy_log_by: self.dx_log_ax,
            dx_log_by: self.dy_log_ax,
            b_xx: self.a_yy,
        }
    }

    fn is_finite(&self) -> bool {
        [self.a_x, self.a_y, self.b_x, self.b_y]
            .iter()
            .chain(self.distortion().iter())
            .all(|i| i.lo.is_finite() && i.hi.is_finite())
    }
}

/// `A = a1·x + a2·y + a0`, `B = b1·x + b2·y + b0` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AffineRep {
    #[serde(with = "serde_rational")]
    pub a1: Rational,
    #[serde(with = "serde_rational")]
    pub a2: Rational,
    #[serde(with = "serde_rational")]
    pub a0: Rational,
    #[serde(with = "serde_rational")]
    pub b1: Rational,
    #[serde(with = "serde_rational")]
    pub b2: Rational,
    #[serde(with = "serde_rational")]
    pub b0: Rational,
}

impl AffineRep {
    pub fn diagonal(a1: Rational, a0: Rational, b2: Rational, b0: Rational) -> Self {
        AffineRep {
            a1,
            a2: Rational::zero(),
            a0,
            b1: Rational::zero(),
            b2,
            b0,
        }
    }

    /// `self` followed by `next`, solved for the new implicit pair.
    pub fn then(&self, next: &AffineRep) -> Result<AffineRep> {
        let den = int(1) - &next.a2 * &self.b1;
        if den.is_zero() {
            return Err(Error::ConeViolation("degenerate affine composition".into()));
        }
        // x₁ = cx·x₂ + cy·y₀ + c0
        let cx = &next.a1 / &den;
        let cy = &next.a2 * &self.b2 / &den;
        let c0 = (&next.a2 * &self.b0 + &next.a0) / &den;
        // y₁ = B(x₁, y₀)
        let yx = &self.b1 * &cx;
        let yy = &self.b1 * &cy + &self.b2;
        let y0 = &self.b1 * &c0 + &self.b0;
        Ok(AffineRep {
            a1: &self.a1 * &cx,
            a2: &self.a1 * &cy + &self.a2,
            a0: &self.a1 * &c0 + &self.a0,
            b1: &next.b1 + &next.b2 * &yx,
            b2: &next.b2 * &yy,
            b0: &next.b2 * &y0 + &next.b0,
        })
    }

    pub fn transpose(&self) -> AffineRep {
        AffineRep {
            a1: self.b2.clone(),
            a2: self.b1.clone(),
            a0: self.b0.clone(),
            b1: self.a2.clone(),
            b2: self.a1.clone(),
            b0: self.a0.clone(),
        }
    }

    /// Exact `(|P|, |Q|)`.
    pub fn widths(&self) -> (Rational, Rational) {
        (self.a1.abs(), self.b2.abs())
    }

    fn ranges(&self) -> DerivRanges {
        let z = Interval::ZERO;
        DerivRanges {
            a_x: enclose(&self.a1),
            a_y: enclose(&self.a2),
            b_x: enclose(&self.b1),
            b_y: enclose(&self.b2),
            dx_log_ax: z,
            dy_log_ax: z,
            a_yy: z,
            dy_log_by: z,
            dx_log_by: z,
            b_xx: z,
        }
    }

    fn strips(&self, rect_in: usize, rect_out: usize) -> (Strip, Strip) {
        let (a1, a2, a0) = (enclose(&self.a1), enclose(&self.a2), enclose(&self.a0));
        let (b1, b2, b0) = (enclose(&self.b1), enclose(&self.b2), enclose(&self.b0));
        let edge_p = |x: Interval| Poly2::linear(a1 * x + a0, a2);
        let edge_q = |y: Interval| Poly2::linear(b2 * y + b0, b1);
        let (p_lo, p_hi) = if self.a1.is_negative() {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let (q_lo, q_hi) = if self.b2.is_negative() {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        (
            Strip {
                kind: StripKind::Vertical,
                rect: rect_in,
                minus: edge_p(Interval::point(p_lo)),
                plus: edge_p(Interval::point(p_hi)),
            },
            Strip {
                kind: StripKind::Horizontal,
                rect: rect_out,
                minus: edge_q(Interval::point(q_lo)),
                plus: edge_q(Interval::point(q_hi)),
            },
        )
    }

    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (
            to_f64(&self.a1) * x + to_f64(&self.a2) * y + to_f64(&self.a0),
            to_f64(&self.b1) * x + to_f64(&self.b2) * y + to_f64(&self.b0),
        )
    }
}

/// Quadratic polynomial `c0 + cx·x + cy·y + cxx·x² + cxy·x·y + cyy·y²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quad {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cxx: f64,
    pub cxy: f64,
    pub cyy: f64,
}

impl Quad {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.c0 + self.cx * x + self.cy * y + self.cxx * x * x + self.cxy * x * y + self.cyy * y * y
    }

    fn d_x(&self, x: Interval, y: Interval) -> Interval {
        Interval::point(self.cx) + x * (2.0 * self.cxx) + y * self.cxy
    }

    fn d_y(&self, x: Interval, y: Interval) -> Interval {
        Interval::point(self.cy) + x * self.cxy + y * (2.0 * self.cyy)
    }

    /// Restriction to `x = x0` as a polynomial in `y`, or to `y = y0` in `x`.
    fn slice(&self, fixed: f64, fix_x: bool) -> Poly2 {
        let p = |v: f64| Interval::around(v);
        if fix_x {
            Poly2 {
                center: 0.0,
                c: [
                    p(self.c0 + self.cx * fixed + self.cxx * fixed * fixed),
                    p(self.cy + self.cxy * fixed),
                    p(self.cyy),
                ],
            }
        } else {
            Poly2 {
                center: 0.0,
                c: [
                    p(self.c0 + self.cy * fixed + self.cyy * fixed * fixed),
                    p(self.cx + self.cxy * fixed),
                    p(self.cxx),
                ],
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadRep {
    pub a: Quad,
    pub b: Quad,
}

impl QuadRep {
    fn ranges(&self) -> Result<DerivRanges> {
        let u = Interval::new(0.0, 1.0);
        let a_x = self.a.d_x(u, u);
        let b_y = self.b.d_y(u, u);
        if a_x.contains_zero() || b_y.contains_zero() {
            return Err(Error::MissingRanges);
        }
        Ok(DerivRanges {
            a_x,
            a_y: self.a.d_y(u, u),
            b_x: self.b.d_x(u, u),
            b_y,
            dx_log_ax: Interval::point(2.0 * self.a.cxx) / a_x,
            dy_log_ax: Interval::point(self.a.cxy) / a_x,
            a_yy: Interval::point(2.0 * self.a.cyy),
            dy_log_by: Interval::point(2.0 * self.b.cyy) / b_y,
            dx_log_by: Interval::point(self.b.cxy) / b_y,
            b_xx: Interval::point(2.0 * self.b.cxx),
        })
    }
}

/// `post ∘ fold ∘ pre` on one of the two branches of the fold.
///
/// Solving the chain for `x₁` gives `ξ = −k/2 + σ·√S` with
/// `S = s0 + sx·x₃ + sy·y₀ + t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeRep {
    pub pre: AffineRep,
    pub post: AffineRep,
    pub fold: FoldingModel,
    pub sign: i8,
    #[serde(with = "serde_rational")]
    pub t_lo: Rational,
    #[serde(with = "serde_rational")]
    pub t_hi: Rational,
    #[serde(skip)]
    k: Rational,
    #[serde(skip)]
    s0: Rational,
    #[serde(skip)]
    sx: Rational,
    #[serde(skip)]
    sy: Rational,
}

impl CompositeRep {
    pub fn new(
        pre: AffineRep,
        post: AffineRep,
        fold: FoldingModel,
        sign: i8,
        t: (Rational, Rational),
    ) -> Self {
        let b = &fold.b;
        let k = b * &pre.b1 - &post.a2;
        let s0 = &k * &k / int(4) + &post.a2 * &fold.y_c + &post.a0
            - &fold.x_ps
            - b * (&pre.b1 * &fold.x_c + &pre.b0 - &fold.y_pu);
        let sx = post.a1.clone();
        let sy = -(b * &pre.b2);
        CompositeRep {
            pre,
            post,
            fold,
            sign,
            t_lo: t.0,
            t_hi: t.1,
            k,
            s0,
            sx,
            sy,
        }
    }

    /// Exact minimum of `S` over the unit square and the parameter interval.
    pub fn delta(&self) -> Rational {
        let z = Rational::zero();
        &self.s0 + (&self.sx).min(&z) + (&self.sy).min(&z) + &self.t_lo
    }

    /// Both strips have interior for every parameter in the interval: `S > 0`
    /// throughout and each edge pair is separated by a nonzero slope.
    pub fn nonempty(&self) -> bool {
        self.delta().is_positive()
            && !self.pre.a1.is_zero()
            && !self.post.b2.is_zero()
            && !self.sx.is_zero()
            && !self.sy.is_zero()
    }

    fn s_at(&self, x: Interval, y: Interval, t: Interval) -> Interval {
        enclose(&self.s0) + enclose(&self.sx) * x + enclose(&self.sy) * y + t
    }

    fn t_interval(&self) -> Interval {
        Interval::new(enclose(&self.t_lo).lo, enclose(&self.t_hi).hi)
    }

    fn sigma(&self) -> f64 {
        f64::from(self.sign)
    }

    fn ranges(&self) -> Result<DerivRanges> {
        let u = Interval::new(0.0, 1.0);
        let s = self.s_at(u, u, self.t_interval());
        if s.lo <= 0.0 {
            return Err(Error::MissingRanges);
        }
        let root = s.sqrt();
        let s32 = s * root;
        let (sx, sy) = (enclose(&self.sx), enclose(&self.sy));
        let sg = Interval::point(self.sigma());
        let two_root = root * 2.0;
        let xi_x = sg * sx / two_root;
        let xi_y = sg * sy / two_root;
        let xi_xx = -(sg * sx.sqr() / (s32 * 4.0));
        let xi_yy = -(sg * sy.sqr() / (s32 * 4.0));
        let (p1, p2) = (enclose(&self.pre.a1), enclose(&self.pre.a2));
        let (r1, r2) = (enclose(&self.post.b1), enclose(&self.post.b2));
        let two_s = s * 2.0;
        Ok(DerivRanges {
            a_x: p1 * xi_x,
            a_y: p1 * xi_y + p2,
            b_x: r1 + r2 * xi_x,
            b_y: r2 * xi_y,
            dx_log_ax: -(sx / two_s),
            dy_log_ax: -(sy / two_s),
            a_yy: p1 * xi_yy,
            dy_log_by: -(sy / two_s),
            dx_log_by: -(sx / two_s),
            b_xx: r2 * xi_xx,
        })
    }

    fn xi(&self, x: f64, y: f64, t: f64) -> f64 {
        let s = to_f64(&self.s0) + to_f64(&self.sx) * x + to_f64(&self.sy) * y + t;
        -0.5 * to_f64(&self.k) + self.sigma() * s.sqrt()
    }

    fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let xi = self.xi(x, y, t);
        let x1 = to_f64(&self.fold.x_c) + xi;
        let y2 = to_f64(&self.fold.y_c) + xi;
        let (a, _) = self.pre.eval(x1, y);
        let (_, b) = self.post.eval(x, y2);
        (a, b)
    }

    /// Boundary curve `s ↦ lin0 + lin1·s + scale·√(α + β·s)` as a certified
    /// second-order Taylor polynomial about `s = 1/2`.
    fn sqrt_edge(
        lin0: Interval,
        lin1: Interval,
        scale: Interval,
        alpha: Interval,
        beta: Interval,
    ) -> Result<Poly2> {
        let c = Interval::point(0.5);
        let at_c = alpha + beta * c;
        let over = alpha + beta * Interval::new(0.0, 1.0);
        if at_c.lo <= 0.0 || over.lo <= 0.0 {
            return Err(Error::MissingRanges);
        }
        let rc = at_c.sqrt();
        let f0 = lin0 + lin1 * c + scale * rc;
        let f1 = lin1 + scale * beta / (rc * 2.0);
        let f2 = -(scale * beta.sqr() / (over * over.sqrt() * 8.0));
        Ok(Poly2 {
            center: 0.5,
            c: [f0, f1, f2],
        })
    }

    fn strips(&self, rect_in: usize, rect_out: usize) -> Result<(Strip, Strip)> {
        let t = self.t_interval();
        let sg = Interval::point(self.sigma());
        let half_k = enclose(&self.k) * 0.5;
        let (s0, sx, sy) = (enclose(&self.s0), enclose(&self.sx), enclose(&self.sy));
        // φ(y₀) = p1·(x_c − k/2 + σ√S(x₃, y₀)) + p2·y₀ + p0 at x₃ ∈ {0, 1}.
        let (p1, p2, p0) = (
            enclose(&self.pre.a1),
            enclose(&self.pre.a2),
            enclose(&self.pre.a0),
        );
        let base_p = p1 * (enclose(&self.fold.x_c) - half_k) + p0;
        let mut p_edges =
            [0.0, 1.0].map(|x3| Self::sqrt_edge(base_p, p2, p1 * sg, s0 + sx * x3 + t, sy));
        // ψ(x₃) = r1·x₃ + r2·(y_c − k/2 + σ√S(x₃, y₀)) + r0 at y₀ ∈ {0, 1}.
        let (r1, r2, r0) = (
            enclose(&self.post.b1),
            enclose(&self.post.b2),
            enclose(&self.post.b0),
        );
        let base_q = r2 * (enclose(&self.fold.y_c) - half_k) + r0;
        let mut q_edges =
            [0.0, 1.0].map(|y0| Self::sqrt_edge(base_q, r1, r2 * sg, s0 + sy * y0 + t, sx));
        let order = |edges: &mut [Result<Poly2>; 2]| -> Result<(Poly2, Poly2)> {
            let a = std::mem::replace(&mut edges[0], Err(Error::MissingRanges))?;
            let b = std::mem::replace(&mut edges[1], Err(Error::MissingRanges))?;
            Ok(if a.eval_at(0.5).mid() <= b.eval_at(0.5).mid() {
                (a, b)
            } else {
                (b, a)
            })
        };
        let (pm, pp) = order(&mut p_edges)?;
        let (qm, qp) = order(&mut q_edges)?;
        Ok((
            Strip {
                kind: StripKind::Vertical,
                rect: rect_in,
                minus: pm,
                plus: pp,
            },
            Strip {
                kind: StripKind::Horizontal,
                rect: rect_out,
                minus: qm,
                plus: qp,
            },
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ImplicitRep {
    Affine(AffineRep),
    Quadratic(QuadRep),
    Composite(Box<CompositeRep>),
    /// The inverse map with `x` and `y` exchanged: `A′(u, v) = B(v, u)`,
    /// `B′(u, v) = A(v, u)`.
    Transposed {
        inner: Box<ImplicitRep>,
    },
}

impl ImplicitRep {
    pub fn ranges(&self) -> Result<DerivRanges> {
        let r = match self {
            ImplicitRep::Affine(a) => a.ranges(),
            ImplicitRep::Quadratic(q) => q.ranges()?,
            ImplicitRep::Composite(c) => c.ranges()?,
            ImplicitRep::Transposed { inner } => inner.ranges()?.transpose(),
        };
        if !r.is_finite() {
            return Err(Error::MissingRanges);
        }
        Ok(r)
    }

    /// `(A, B)` at one point and parameter value.
    pub fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        match self {
            ImplicitRep::Affine(a) => a.eval(x, y),
            ImplicitRep::Quadratic(q) => (q.a.eval(x, y), q.b.eval(x, y)),
            ImplicitRep::Composite(c) => c.eval(x, y, t),
            ImplicitRep::Transposed { inner } => {
                let (a, b) = inner.eval(y, x, t);
                (b, a)
            }
        }
    }

    /// Domain strip `P` in `rect_in` and image strip `Q` in `rect_out`.
    pub fn strips(&self, rect_in: usize, rect_out: usize) -> Result<(Strip, Strip)> {
        match self {
            ImplicitRep::Affine(a) => Ok(a.strips(rect_in, rect_out)),
            ImplicitRep::Quadratic(q) => {
                let order = |e0: Poly2, e1: Poly2| {
                    if e0.eval_at(0.5).mid() <= e1.eval_at(0.5).mid() {
                        (e0, e1)
                    } else {
                        (e1, e0)
                    }
                };
                let (pm, pp) = order(q.a.slice(0.0, true), q.a.slice(1.0, true));
                let (qm, qp) = order(q.b.slice(0.0, false), q.b.slice(1.0, false));
                Ok((
                    Strip {
                        kind: StripKind::Vertical,
                        rect: rect_in,
                        minus: pm,
                        plus: pp,
                    },
                    Strip {
                        kind: StripKind::Horizontal,
                        rect: rect_out,
                        minus: qm,
                        plus: qp,
                    },
                ))
            }
            ImplicitRep::Composite(c) => c.strips(rect_in, rect_out),
            ImplicitRep::Transposed { inner } => {
                let (p, q) = inner.strips(rect_out, rect_in)?;
                Ok((q.transpose(), p.transpose()))
            }
        }
    }

    /// Exact non-emptiness of both strips, when it can be decided symbolically.
    pub fn nonempty_exact(&self) -> Option<bool> {
        match self {
            ImplicitRep::Affine(a) => Some(!a.a1.is_zero() && !a.b2.is_zero()),
            ImplicitRep::Quadratic(_) => None,
            ImplicitRep::Composite(c) => Some(c.nonempty()),
            ImplicitRep::Transposed { inner } => inner.nonempty_exact(),
        }
    }

    pub fn as_affine(&self) -> Option<&AffineRep> {
        match self {
            ImplicitRep::Affine(a) => Some(a),
            _ => None,
        }
    }

    pub fn transpose(&self) -> ImplicitRep {
        match self {
            ImplicitRep::Affine(a) => ImplicitRep::Affine(a.transpose()),
            ImplicitRep::Transposed { inner } => (**inner).clone(),
            other => ImplicitRep::Transposed {
                inner: Box::new(other.clone()),
            },
        }
    }

    /// Number of fold passages in the representation.
    pub fn folds(&self) -> usize {
        match self {
            ImplicitRep::Affine(_) | ImplicitRep::Quadratic(_) => 0,
            ImplicitRep::Composite(_) => 1,
            ImplicitRep::Transposed { inner } => inner.folds(),
        }
    }
}

/// The constant `1/2` in the parabolic width law, which holds exactly for
/// affine pieces: `|P±| = |P₀|·|P₁| / (2·δ^{1/2})`.
pub fn parabolic_width_constant() -> Rational {
    ratio(1, 2)
}
