//! Two-rectangle horseshoe with a quadratic heteroclinic fold.
//!
//! `R0` carries the saddle `p_u = (0, 1/(ρ_s+1))` of the transition `0 → 0`
//! and the tongue `L_u` above `W^u(p_u)`. `R1` carries the saddle
//! `p_s = (ρ_u/(1+ρ_u), 1)` of `1 → 1` and the tongue `L_s` to the left of
//! `W^s(p_s)`. Every transition `a → a′` maps a vertical strip of width
//! `1/ρ_u` in `R_a` onto a horizontal strip of height `1/ρ_s` in `R_a′`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::affine_like::{
    AffineLikeElement, AffineRep, ConeParams, FoldingModel, ImplicitRep, Word,
};
use crate::cantor::CantorSystem;
use crate::error::{Error, Result};
use crate::rational::{int, ratio, serde_rational, Rational};

pub const RECT_U: usize = 0;
pub const RECT_S: usize = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ToyFamily {
    pub name: String,
    #[serde(with = "serde_rational")]
    pub rho_u: Rational,
    #[serde(with = "serde_rational")]
    pub rho_s: Rational,
    pub fold: Option<FoldingModel>,
    pub cone: ConeParams,
    /// Time-reversed model: inverse maps with `x` and `y` exchanged.
    pub transposed: bool,
}

impl ToyFamily {
    pub fn new(rho_u: Rational, rho_s: Rational, b: Option<Rational>) -> Result<Self> {
        if rho_u <= int(2) || rho_s <= int(2) {
            return Err(Error::InvalidModel(
                "toy family needs rho > 2 in both directions".into(),
            ));
        }
        let fold = match b {
            Some(b) => {
                let g = FoldingModel {
                    source: RECT_U,
                    target: RECT_S,
                    b,
                    x_c: ratio(1, 2),
                    y_pu: int(1) / (&rho_s + int(1)),
                    x_ps: &rho_u / (&rho_u + int(1)),
                    y_c: ratio(1, 2),
                    n0: 1,
                };
                g.validate()?;
                Some(g)
            }
            None => None,
        };
        let lambda = crate::rational::to_f64(&rho_u.clone().min(rho_s.clone())).min(2.0);
        Ok(ToyFamily {
            name: "toy_het".into(),
            rho_u,
            rho_s,
            fold,
            cone: ConeParams::new(lambda, 1.5, 1.5, 1.0)?,
            transposed: false,
        })
    }

    /// Pure horseshoe with the same rectangles and transitions.
    pub fn fold_free(&self) -> ToyFamily {
        ToyFamily {
            name: format!("{}_fold_free", self.name),
            fold: None,
            ..self.clone()
        }
    }

    /// The time-reversed family. Only the horseshoe part is transposed.
    pub fn transpose(&self) -> ToyFamily {
        ToyFamily {
            name: format!("{}_transposed", self.name),
            fold: None,
            transposed: !self.transposed,
            ..self.clone()
        }
    }

    pub fn has_fold(&self) -> bool {
        self.fold.is_some()
    }

    pub fn rects(&self) -> usize {
        2
    }

    fn forward_rep(&self, a: usize, b: usize) -> AffineRep {
        let pu = int(1) / &self.rho_u;
        let ps = int(1) / &self.rho_s;
        // x₀ as a function of x₁: the strip sits left for target 0, right for
        // target 1; `1 → 1` reverses orientation.
        let (a1, a0) = match (a, b) {
            (1, 1) => (-pu.clone(), int(1)),
            (_, 0) => (pu.clone(), Rational::zero()),
            _ => (pu.clone(), int(1) - &pu),
        };
        // y₁ as a function of y₀: bottom for source 0, top for source 1;
        // `0 → 0` reverses orientation.
        let (b2, b0) = match (a, b) {
            (0, 0) => (-ps.clone(), ps.clone()),
            (0, _) => (ps.clone(), Rational::zero()),
            _ => (ps.clone(), int(1) - &ps),
        };
        AffineRep::diagonal(a1, a0, b2, b0)
    }

    /// The four base transitions, ordered by word.
    pub fn base_transitions(&self) -> Result<Vec<AffineLikeElement>> {
        let mut out = Vec::with_capacity(4);
        for a in 0..2 {
            for b in 0..2 {
                let (word, rep) = if self.transposed {
                    (Word::transition(a, b), self.forward_rep(b, a).transpose())
                } else {
                    (Word::transition(a, b), self.forward_rep(a, b))
                };
                out.push(AffineLikeElement::new(
                    word,
                    1,
                    ImplicitRep::Affine(rep),
                    &self.cone,
                )?);
            }
        }
        Ok(out)
    }

    /// Fixed saddles `(p_u, p_s)` of the original orientation.
    pub fn saddles(&self) -> ((Rational, Rational), (Rational, Rational)) {
        (
            (Rational::zero(), int(1) / (&self.rho_s + int(1))),
            (&self.rho_u / (&self.rho_u + int(1)), Rational::one()),
        )
    }

    /// Largest `t` for which `L_s` stays inside `R1`. The tip of `L_u` sits at
    /// height `y_pu + t/b` and leaves `R0` once `t > b·(1 − y_pu)`; beyond that
    /// `L_u ∩ R0` is a truncated tongue.
    pub fn t_max(&self) -> Rational {
        ratio(1, 5)
    }

    pub fn check_parameter_interval(&self, t_lo: &Rational, t_hi: &Rational) -> Result<()> {
        if !t_lo.is_positive() || t_lo > t_hi {
            return Err(Error::InvalidArgument(format!(
                "parameter interval [{t_lo}, {t_hi}] must be positive"
            )));
        }
        if self.fold.is_some() && *t_hi > self.t_max() {
            return Err(Error::InvalidArgument(format!(
                "parameter {t_hi} too large: the tongue L_s leaves its rectangle"
            )));
        }
        Ok(())
    }

    /// One-dimensional factor systems `(unstable, stable)`.
    pub fn factor_systems(&self) -> Result<(CantorSystem, CantorSystem)> {
        let factor = |rho: &Rational, name: &str| {
            let w = int(1) / rho;
            CantorSystem::affine_full_shift(
                name,
                &[(Rational::zero(), w.clone()), (int(1) - w, int(1))],
            )
        };
        let (xu, xs) = (
            factor(&self.rho_u, "unstable")?,
            factor(&self.rho_s, "stable")?,
        );
        Ok(if self.transposed { (xs, xu) } else { (xu, xs) })
    }
}
