use serde::Serialize;

use super::thickness::lower_enclosure;
use crate::cantor::{refine, CantorSystem, Cylinder};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapLemmaOutcome {
    KPrimeInGapOfK,
    KInGapOfKPrime,
    Intersect,
    InconclusiveThin,
}

/// Hulls intersect and neither contains the other.
pub fn linked(k: &CantorSystem, kp: &CantorSystem) -> bool {
    let (a0, a1) = k.hull();
    let (b0, b1) = kp.hull();
    let meet = a0 <= b1 && b0 <= a1;
    let k_in_kp = b0 <= a0 && a1 <= b1;
    let kp_in_k = a0 <= b0 && b1 <= a1;
    meet && !k_in_kp && !kp_in_k
}

enum Placement {
    InGap,
    NotInGap,
    Unknown,
}

/// Where the hull `[lo, hi]` of one set sits relative to the cylinders of the other.
fn placement(cyl: &[Cylinder], lo: &Rational, hi: &Rational) -> Placement {
    // First cylinder whose right end reaches lo.
    let start = cyl.partition_point(|c| &c.hi < lo);
    let mut touched = false;
    for c in &cyl[start..] {
        if &c.lo > hi {
            break;
        }
        touched = true;
        // Cylinder endpoints are points of the set.
        if (lo <= &c.lo && &c.lo <= hi) || (lo <= &c.hi && &c.hi <= hi) {
            return Placement::NotInGap;
        }
    }
    if touched {
        Placement::Unknown
    } else {
        Placement::InGap
    }
}

pub fn gap_lemma_classify(
    k: &CantorSystem,
    kp: &CantorSystem,
    depth: usize,
) -> Result<GapLemmaOutcome> {
    let product = lower_enclosure(k, depth)? * lower_enclosure(kp, depth)?;
    if !(product.lo > 1.0) {
        return Ok(GapLemmaOutcome::InconclusiveThin);
    }
    let ck = refine(k, depth)?;
    let ckp = refine(kp, depth)?;
    let (k0, k1) = k.hull();
    let (p0, p1) = kp.hull();
    let kp_vs_k = placement(&ck, p0, p1);
    if matches!(kp_vs_k, Placement::InGap) {
        return Ok(GapLemmaOutcome::KPrimeInGapOfK);
    }
    let k_vs_kp = placement(&ckp, k0, k1);
    match (kp_vs_k, k_vs_kp) {
        (_, Placement::InGap) => Ok(GapLemmaOutcome::KInGapOfKPrime),
        (Placement::NotInGap, Placement::NotInGap) => Ok(GapLemmaOutcome::Intersect),
        _ => Err(Error::Resolution(format!(
            "depth {depth} cannot separate the gap-lemma cases; one hull lies inside a single cylinder"
        ))),
    }
}
