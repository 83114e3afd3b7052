use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::fold::FoldingModel;
use super::rep::{AffineRep, CompositeRep, DerivRanges, ImplicitRep};
use super::strip::Strip;
use super::{cone_holds, distortion_holds, ConeParams};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Rect(usize),
    /// Passage through the fold on the `−` or `+` branch.
    Fold(i8),
}

/// Composition history: rectangle labels visited, with fold markers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn transition(a: usize, b: usize) -> Self {
        Word(vec![Symbol::Rect(a), Symbol::Rect(b)])
    }

    pub fn first_rect(&self) -> usize {
        match self.0.first() {
            Some(Symbol::Rect(a)) => *a,
            _ => panic!("word must start with a rectangle"),
        }
    }

    pub fn last_rect(&self) -> usize {
        match self.0.last() {
            Some(Symbol::Rect(a)) => *a,
            _ => panic!("word must end with a rectangle"),
        }
    }

    pub fn folds(&self) -> usize {
        self.0
            .iter()
            .filter(|s| matches!(s, Symbol::Fold(_)))
            .count()
    }

    /// Concatenation sharing the junction rectangle.
    pub fn join(&self, next: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&next.0[1..]);
        Word(v)
    }

    pub fn with_fold(&self, sign: i8, next: &Word) -> Word {
        let mut v = self.0.clone();
        v.push(Symbol::Fold(sign));
        v.extend_from_slice(&next.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match s {
                Symbol::Rect(a) => write!(f, "{a}")?,
                Symbol::Fold(s) => f.write_str(if *s < 0 { "F-" } else { "F+" })?,
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub cone: bool,
    pub distortion: bool,
}

/// An affine-like iterate `gⁿ: P → Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLikeElement {
    pub word: Word,
    pub n: usize,
    pub rep: ImplicitRep,
    pub p: Strip,
    pub q: Strip,
    pub ranges: DerivRanges,
    pub flags: Flags,
}

impl AffineLikeElement {
    pub fn new(word: Word, n: usize, rep: ImplicitRep, params: &ConeParams) -> Result<Self> {
        let ranges = rep.ranges()?;
        let (p, q) = rep.strips(word.first_rect(), word.last_rect())?;
        let nonempty = rep
            .nonempty_exact()
            .unwrap_or_else(|| p.is_nonempty() && q.is_nonempty());
        if !nonempty {
            return Err(Error::EmptyOverlap);
        }
        for s in [&p, &q] {
            let h = s.hull();
            if h.lo < -1e-9 || h.hi > 1.0 + 1e-9 {
                return Err(Error::InvalidModel(format!(
                    "strip {h} leaves its rectangle"
                )));
            }
        }
        let flags = Flags {
            cone: cone_holds(&ranges, params),
            distortion: distortion_holds(&ranges, params.c),
        };
        Ok(AffineLikeElement {
            word,
            n,
            rep,
            p,
            q,
            ranges,
            flags,
        })
    }

    /// Upper ends of the certified `max|A_x|` and `max|B_y|`.
    pub fn widths(&self) -> (f64, f64) {
        (self.ranges.a_x.mag(), self.ranges.b_y.mag())
    }

    /// Exact widths for affine representations.
    pub fn exact_widths(&self) -> Option<(Rational, Rational)> {
        self.rep.as_affine().map(AffineRep::widths)
    }

    pub fn folds(&self) -> usize {
        self.rep.folds()
    }

    pub fn transpose(&self) -> AffineLikeElement {
        AffineLikeElement {
            word: self.word.reversed(),
            n: self.n,
            rep: self.rep.transpose(),
            p: self.q.transpose(),
            q: self.p.transpose(),
            ranges: self.ranges.transpose(),
            flags: self.flags,
        }
    }
}

#[derive(Serialize)]
struct WidthsView {
    p: f64,
    q: f64,
}

impl Serialize for AffineLikeElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let (wp, wq) = self.widths();
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("word", &self.word)?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry(
            "P",
            &serde_json::json!({
                "rect": self.p.rect,
                "phi_minus": self.p.minus,
                "phi_plus": self.p.plus,
            }),
        )?;
        m.serialize_entry(
            "Q",
            &serde_json::json!({
                "rect": self.q.rect,
                "psi_minus": self.q.minus,
                "psi_plus": self.q.plus,
            }),
        )?;
        m.serialize_entry("widths", &WidthsView { p: wp, q: wq })?;
        m.serialize_entry("flags", &self.flags)?;
        m.end()
    }
}

/// `F′ ∘ F` on `P″ = P ∩ F⁻¹(P′)`.
pub fn simple_compose(
    f: &AffineLikeElement,
    g: &AffineLikeElement,
    params: &ConeParams,
) -> Result<AffineLikeElement> {
    if f.q.rect != g.p.rect {
        return Err(Error::RectangleMismatch {
            image: f.q.rect,
            domain: g.p.rect,
        });
    }
    let rep = match (&f.rep, &g.rep) {
        (ImplicitRep::Affine(a), ImplicitRep::Affine(b)) => ImplicitRep::Affine(a.then(b)?),
        (ImplicitRep::Composite(c), ImplicitRep::Affine(b)) => {
            ImplicitRep::Composite(Box::new(CompositeRep::new(
                c.pre.clone(),
                c.post.then(b)?,
                c.fold.clone(),
                c.sign,
                (c.t_lo.clone(), c.t_hi.clone()),
            )))
        }
        (ImplicitRep::Affine(a), ImplicitRep::Composite(c)) => {
            ImplicitRep::Composite(Box::new(CompositeRep::new(
                a.then(&c.pre)?,
                c.post.clone(),
                c.fold.clone(),
                c.sign,
                (c.t_lo.clone(), c.t_hi.clone()),
            )))
        }
        (ImplicitRep::Composite(_), ImplicitRep::Composite(_)) => return Err(Error::MultipleFolds),
        _ => {
            return Err(Error::InvalidArgument(
                "simple composition needs affine or single-fold representations".into(),
            ))
        }
    };
    let e = AffineLikeElement::new(f.word.join(&g.word), f.n + g.n, rep, params)?;
    if !e.flags.cone {
        return Err(Error::ConeViolation(format!(
            "composition {} leaves the cone",
            e.word
        )));
    }
    if !e.flags.distortion {
        return Err(Error::ConeViolation(format!(
            "composition {} exceeds the distortion bound",
            e.word
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone)]
pub enum Parabolic {
    NotPossible {
        delta: Rational,
    },
    Pair {
        delta: Rational,
        minus: Box<AffineLikeElement>,
        plus: Box<AffineLikeElement>,
    },
}

/// Exact range of `a1·x + a2·y + a0` over the unit square.
fn affine_range(a1: &Rational, a2: &Rational, a0: &Rational) -> (Rational, Rational) {
    let z = Rational::zero();
    (a0 + a1.min(&z) + a2.min(&z), a0 + a1.max(&z) + a2.max(&z))
}

/// Whether the image strip of `f` crosses `L_u` for every parameter in `t`.
pub(crate) fn q_crosses(f: &AffineRep, g: &FoldingModel, t_lo: &Rational) -> bool {
    let (lo, hi) = affine_range(&f.b1, &f.b2, &f.b0);
    lo >= g.y_pu && hi <= &g.y_pu + t_lo / &g.b
}

/// Whether the domain strip of `f` crosses `L_s` for every parameter in `t`.
pub(crate) fn p_crosses(f: &AffineRep, g: &FoldingModel, t_lo: &Rational) -> bool {
    let (lo, hi) = affine_range(&f.a1, &f.a2, &f.a0);
    lo >= &g.x_ps - t_lo && hi <= g.x_ps
}

/// The two branches of `F₁ ∘ G ∘ F₀`, defined uniformly for `t ∈ [t.0, t.1]`.
pub fn parabolic_compose(
    f0: &AffineLikeElement,
    g: &FoldingModel,
    f1: &AffineLikeElement,
    params: &ConeParams,
    t: (&Rational, &Rational),
) -> Result<Parabolic> {
    if f0.folds() + f1.folds() > 0 {
        return Err(Error::MultipleFolds);
    }
    let (Some(pre), Some(post)) = (f0.rep.as_affine(), f1.rep.as_affine()) else {
        return Err(Error::InvalidArgument(
            "parabolic composition needs affine pieces".into(),
        ));
    };
    if f0.q.rect != g.source || !q_crosses(pre, g, t.0) {
        return Err(Error::CrossingViolation(format!(
            "Q of {} does not cross L_u",
            f0.word
        )));
    }
    if f1.p.rect != g.target || !p_crosses(post, g, t.0) {
        return Err(Error::CrossingViolation(format!(
            "P of {} does not cross L_s",
            f1.word
        )));
    }
    let probe = CompositeRep::new(
        pre.clone(),
        post.clone(),
        g.clone(),
        1,
        (t.0.clone(), t.1.clone()),
    );
    let delta = probe.delta();
    if !delta.is_positive() {
        return Ok(Parabolic::NotPossible { delta });
    }
    let build = |sign: i8| -> Result<Box<AffineLikeElement>> {
        let rep = CompositeRep::new(
            pre.clone(),
            post.clone(),
            g.clone(),
            sign,
            (t.0.clone(), t.1.clone()),
        );
        Ok(Box::new(AffineLikeElement::new(
            f0.word.with_fold(sign, &f1.word),
            f0.n + g.n0 + f1.n,
            ImplicitRep::Composite(Box::new(rep)),
            params,
        )?))
    };
    Ok(Parabolic::Pair {
        minus: build(-1)?,
        plus: build(1)?,
        delta,
    })
}

/// `δ ≥ max{|Q₀|^{1−η}, |P₁|^{1−η}, |I|}` with `δ` a certified lower bound.
pub fn transversality_ok(delta: f64, q0: f64, p1: f64, i_len: f64, eta: f64) -> bool {
    let pw = |w: f64| Interval::point(w).powf(1.0 - eta).hi;
    delta >= pw(q0) && delta >= pw(p1) && delta >= i_len
}

/// Certified lower bound of an exact positive rational.
pub(crate) fn lower_f64(r: &Rational) -> f64 {
    crate::rational::enclose(r).lo
}
