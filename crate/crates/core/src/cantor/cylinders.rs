use rayon::prelude::*;
use serde::Serialize;

use super::{CantorSystem, Mobius};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

/// Deepest refinement accepted.
pub const MAX_DEPTH: usize = 256;
/// Largest number of cylinders materialized by one call.
pub const MAX_CYLINDERS: u128 = 1 << 21;

#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    /// Branch indices, outermost first.
    pub word: Vec<usize>,
    pub lo: Rational,
    pub hi: Rational,
}

impl Cylinder {
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn interval(&self) -> Interval {
        rational::enclose(&self.lo).hull(&rational::enclose(&self.hi))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gap {
    #[serde(with = "crate::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub hi: Rational,
    /// Depth at which the gap first separates cylinders.
    pub generation: usize,
}

impl Gap {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Gaps present at a given depth. The two unbounded gaps are
/// `(-∞, left)` and `(right, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gaps {
    pub depth: usize,
    pub bounded: Vec<Gap>,
    #[serde(with = "crate::rational::serde_rational")]
    pub left: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub right: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    InsideAtDepth,
    Outside,
}

/// Number of admissible words of length `depth`, saturating.
pub(crate) fn word_count(sys: &CantorSystem, depth: usize) -> u128 {
    if depth == 0 {
        return 1;
    }
    let mut ends = vec![1u128; sys.len()];
    for _ in 1..depth {
        let mut next = vec![0u128; sys.len()];
        for (i, &c) in ends.iter().enumerate() {
            for &j in sys.successors(i) {
                next[j] = next[j].saturating_add(c);
            }
        }
        ends = next;
    }
    ends.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

pub(crate) fn check_budget(sys: &CantorSystem, depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::Resolution(format!(
            "depth {depth} exceeds the maximum {MAX_DEPTH}"
        )));
    }
    let count = word_count(sys, depth);
    if count > MAX_CYLINDERS {
        return Err(Error::Resolution(format!(
            "depth {depth} needs {count} cylinders (limit {MAX_CYLINDERS})"
        )));
    }
    Ok(())
}

struct Node {
    word: Vec<usize>,
    /// Composition of the inverse branches of all but the last symbol.
    prefix: Mobius,
}

fn expand(sys: &CantorSystem, depth: usize) -> Vec<Node> {
    let mut level: Vec<Node> = (0..sys.len())
        .map(|i| Node {
            word: vec![i],
            prefix: Mobius::identity(),
        })
        .collect();
    for _ in 1..depth {
        level = level
            .par_iter()
            .flat_map_iter(|node| {
                let last = *node.word.last().unwrap();
                let prefix = node.prefix.compose(sys.inverse(last));
                sys.successors(last).iter().map(move |&k| {
                    let mut word = node.word.clone();
                    word.push(k);
                    Node {
                        word,
                        prefix: prefix.clone(),
                    }
                })
            })
            .collect();
    }
    level
}

/// All depth-`depth` cylinders in increasing order.
pub fn refine(sys: &CantorSystem, depth: usize) -> Result<Vec<Cylinder>> {
    check_budget(sys, depth)?;
    if depth == 0 {
        let (lo, hi) = sys.hull();
        return Ok(vec![Cylinder {
            word: Vec::new(),
            lo: lo.clone(),
            hi: hi.clone(),
        }]);
    }
    let mut cylinders: Vec<Cylinder> = expand(sys, depth)
        .into_par_iter()
        .map(|node| {
            let b = sys.branch(*node.word.last().unwrap());
            let (lo, hi) = node.prefix.image(&b.lo, &b.hi);
            Cylinder {
                word: node.word,
                lo,
                hi,
            }
        })
        .collect();
    cylinders.par_sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
    for pair in cylinders.windows(2) {
        if pair[0].interval().hi >= pair[1].interval().lo {
            return Err(Error::Resolution(format!(
                "cylinders at depth {depth} are closer than floating-point resolution"
            )));
        }
    }
    Ok(cylinders)
}

/// Endpoints of the depth-`depth` cylinders, in increasing order.
pub fn refine_endpoints(sys: &CantorSystem, depth: usize) -> Result<Vec<(Rational, Rational)>> {
    Ok(refine(sys, depth)?
        .into_iter()
        .map(|c| (c.lo, c.hi))
        .collect())
}

pub fn gaps(sys: &CantorSystem, depth: usize) -> Result<Gaps> {
    if depth == 0 {
        return Err(Error::InvalidArgument("gaps need depth >= 1".into()));
    }
    let cyl = refine(sys, depth)?;
    let bounded = cyl
        .windows(2)
        .map(|p| {
            let common = p[0]
                .word
                .iter()
                .zip(&p[1].word)
                .take_while(|(a, b)| a == b)
                .count();
            Gap {
                lo: p[0].hi.clone(),
                hi: p[1].lo.clone(),
                generation: common + 1,
            }
        })
        .collect();
    Ok(Gaps {
        depth,
        bounded,
        left: cyl[0].lo.clone(),
        right: cyl.last().unwrap().hi.clone(),
    })
}

/// Closed-cylinder membership test: endpoints count as inside.
pub fn membership(sys: &CantorSystem, x: &Rational, depth: usize) -> Membership {
    let (lo, hi) = sys.hull();
    if x < lo || x > hi {
        return Membership::Outside;
    }
    if depth == 0 {
        return Membership::InsideAtDepth;
    }
    // Descend through the unique cylinder containing x at each depth.
    let mut prefix = Mobius::identity();
    let mut candidates: Vec<usize> = (0..sys.len()).collect();
    for level in 0..depth {
        let hit = candidates.iter().copied().find(|&k| {
            let b = sys.branch(k);
            let (a, c) = prefix.image(&b.lo, &b.hi);
            &a <= x && x <= &c
        });
        match hit {
            None => return Membership::Outside,
            Some(k) => {
                if level + 1 < depth {
                    prefix = prefix.compose(sys.inverse(k));
                    candidates = sys.successors(k).to_vec();
                }
            }
        }
    }
    Membership::InsideAtDepth
}
