use serde::Serialize;

use super::Catalog;
use crate::affine_like::{AffineLikeElement, Strip, StripKind, Symbol, Word};
use crate::interval::Interval;
use crate::models::ToyFamily;
use crate::rational::{enclose, to_f64, Rational};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status")]
pub enum Regularity {
    Good,
    Bad { witness: Box<AffineLikeElement> },
}

impl Regularity {
    pub fn is_good(&self) -> bool {
        matches!(self, Regularity::Good)
    }
}

/// Whether the strip comes closer than `width^{1−η}` to the tip of the
/// tongue living in its rectangle, for some `t ∈ I`.
///
/// Vertical strips are tested against `L_s` in the fold's target rectangle,
/// horizontal strips against `L_u` in its source. The distance is a certified
/// lower bound over the whole parameter interval, so the test may report
/// criticality for a strip that is only nearly critical, never the reverse.
pub fn is_critical(
    strip: &Strip,
    width: f64,
    t: (&Rational, &Rational),
    family: &ToyFamily,
    eta: f64,
) -> bool {
    let Some(g) = &family.fold else {
        return false;
    };
    let tt = Interval::new(enclose(t.0).lo, enclose(t.1).hi);
    let (s, point) = match strip.kind {
        StripKind::Vertical if strip.rect == g.target => {
            let (x, y) = g.tip_s(tt);
            (y.mid(), x)
        }
        StripKind::Horizontal if strip.rect == g.source => {
            let (x, y) = g.tip_u(tt);
            (x.mid(), y)
        }
        _ => return false,
    };
    let threshold = Interval::point(width).powf(1.0 - eta).hi;
    strip.distance_lower(s, point) < threshold
}

/// Both `P` (against `L_s`) and `Q` (against `L_u`) are critical.
pub fn is_bicritical(
    e: &AffineLikeElement,
    t: (&Rational, &Rational),
    family: &ToyFamily,
    eta: f64,
) -> bool {
    let (p, q) = e.widths();
    is_critical(&e.p, p, t, family, eta) && is_critical(&e.q, q, t, family, eta)
}

/// No split of the word at an interior rectangle yields two catalog members.
pub fn is_prime(e: &AffineLikeElement, catalog: &Catalog) -> bool {
    let v = &e.word.0;
    (1..v.len().saturating_sub(1)).all(|i| {
        if !matches!(v[i], Symbol::Rect(_)) {
            return true;
        }
        let head = Word(v[..=i].to_vec());
        let tail = Word(v[i..].to_vec());
        !(catalog.contains(&head) && catalog.contains(&tail))
    })
}

/// β-regularity of the catalog's interval: every bicritical element has both
/// widths strictly below `|I|^β`.
pub fn strong_regularity_test(
    catalog: &Catalog,
    family: &ToyFamily,
    eta: f64,
    beta: f64,
) -> Regularity {
    let threshold = to_f64(&catalog.interval_length()).powf(beta);
    let t = (&catalog.t_lo, &catalog.t_hi);
    let mut worst: Option<(&AffineLikeElement, f64)> = None;
    for e in &catalog.elements {
        let (p, q) = e.widths();
        let w = p.max(q);
        if w < threshold || !is_bicritical(e, t, family, eta) {
            continue;
        }
        if worst.is_none_or(|(_, best)| w > best) {
            worst = Some((e, w));
        }
    }
    match worst {
        None => Regularity::Good,
        Some((e, _)) => Regularity::Bad {
            witness: Box::new(e.clone()),
        },
    }
}
