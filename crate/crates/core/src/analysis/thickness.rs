//! Newhouse thickness brackets.
//!
//! Every bounded gap of `K` is the image under an inverse branch composition
//! of a first-level gap of either `K` or one of the configurations
//! `K_j = K ∩ ψ(I_j)`. The lower bound therefore only needs the first-level
//! gaps of those sets, with bridges measured on depth-n cylinders and cut
//! short wherever a not-yet-revealed gap could be as long as the one at hand.

use serde::Serialize;

use super::dimension::distortion_theta;
use crate::cantor::{refine, CantorSystem, Cylinder};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{enclose, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThicknessBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth_used: usize,
}

/// Largest possible ratio of a gap inside a cylinder to the cylinder.
fn max_relative_gap(sys: &CantorSystem) -> Rational {
    let mut best = Rational::from_integer(0.into());
    for j in 0..sys.len() {
        let succ = sys.successors(j);
        let b = sys.branch(j);
        let (lo, hi) = sys.forward(j).image(&b.lo, &b.hi);
        let img = hi - lo;
        for w in succ.windows(2) {
            let gap = &sys.branch(w[1]).lo - &sys.branch(w[0]).hi;
            best = best.max(gap / &img);
        }
    }
    best
}

/// Exact lower bound of `|C|/|U|` for a first-level gap `U = (a, b)` of the
/// configuration whose depth-n cylinders are `cyl`.
fn first_level_ratio(cyl: &[Cylinder], a: &Rational, b: &Rational, gamma: &Rational) -> Rational {
    let u = b - a;
    let right_start = cyl
        .iter()
        .position(|c| &c.lo == b)
        .expect("gap endpoint is a cylinder end");
    let left_end = right_start - 1;

    let mut right = None;
    for i in right_start..cyl.len() {
        let d = &cyl[i];
        if gamma * d.length() >= u {
            right = Some(&d.lo - b);
            break;
        }
        if i + 1 == cyl.len() || &cyl[i + 1].lo - &d.hi >= u {
            right = Some(&d.hi - b);
            break;
        }
    }
    let mut left = None;
    for i in (0..=left_end).rev() {
        let d = &cyl[i];
        if gamma * d.length() >= u {
            left = Some(a - &d.hi);
            break;
        }
        if i == 0 || &d.lo - &cyl[i - 1].hi >= u {
            left = Some(a - &d.lo);
            break;
        }
    }
    let right = right.unwrap() / &u;
    let left = left.unwrap() / &u;
    right.min(left)
}

/// Exact lower bound on the thickness of an affine system, or the
/// pre-distortion bound for a nonlinear one.
fn lower_bound_rational(sys: &CantorSystem, all: &[Cylinder]) -> Rational {
    let gamma = max_relative_gap(sys);
    let mut configs: Vec<Vec<usize>> = vec![(0..sys.len()).collect()];
    for j in 0..sys.len() {
        let s = sys.successors(j).to_vec();
        if !configs.contains(&s) {
            configs.push(s);
        }
    }
    let mut best: Option<Rational> = None;
    for config in configs {
        let mut first: Vec<usize> = config.clone();
        first.sort_by(|&x, &y| sys.branch(x).lo.cmp(&sys.branch(y).lo));
        let cyl: Vec<Cylinder> = all
            .iter()
            .filter(|c| config.contains(&c.word[0]))
            .cloned()
            .collect();
        for w in first.windows(2) {
            let a = &sys.branch(w[0]).hi;
            let b = &sys.branch(w[1]).lo;
            let r = first_level_ratio(&cyl, a, b, &gamma);
            best = Some(match best {
                Some(x) => x.min(r),
                None => r,
            });
        }
    }
    best.expect("a mixing system with two or more branches has a gap")
}

/// Smallest optimistic bridge ratio over all gaps revealed at this depth.
fn upper_bound_rational(all: &[Cylinder]) -> Rational {
    let n = all.len();
    let gaps: Vec<Rational> = all.windows(2).map(|p| &p[1].lo - &p[0].hi).collect();
    // For each gap, index of the next gap to the right / left that is at
    // least as long, found with monotone stacks.
    let mut next_right = vec![None; gaps.len()];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..gaps.len() {
        while let Some(&top) = stack.last() {
            if gaps[i] >= gaps[top] {
                next_right[top] = Some(i);
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    let mut next_left = vec![None; gaps.len()];
    stack.clear();
    for i in (0..gaps.len()).rev() {
        while let Some(&top) = stack.last() {
            if gaps[i] >= gaps[top] {
                next_left[top] = Some(i);
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    let mut best: Option<Rational> = None;
    for (i, g) in gaps.iter().enumerate() {
        // Gap i sits between cylinders i and i+1.
        let right_end = match next_right[i] {
            Some(k) => &all[k].hi,
            None => &all[n - 1].hi,
        };
        let left_start = match next_left[i] {
            Some(k) => &all[k + 1].lo,
            None => &all[0].lo,
        };
        let right = (right_end - &all[i + 1].lo) / g;
        let left = (&all[i].hi - left_start) / g;
        let r = right.min(left);
        best = Some(match best {
            Some(x) => x.min(r),
            None => r,
        });
    }
    best.expect("at least one gap")
}

/// Certified enclosure for the lower end of the thickness bracket.
pub(crate) fn lower_enclosure(sys: &CantorSystem, depth: usize) -> Result<Interval> {
    Ok(bracket_parts(sys, depth)?.0)
}

fn bracket_parts(sys: &CantorSystem, depth: usize) -> Result<(Interval, Interval)> {
    if depth < 1 {
        return Err(Error::InvalidArgument("thickness needs depth >= 1".into()));
    }
    let all = refine(sys, depth)?;
    let mut lower = enclose(&lower_bound_rational(sys, &all));
    let upper = enclose(&upper_bound_rational(&all));
    let theta = distortion_theta(sys);
    if theta > 0.0 {
        lower = lower * Interval::point(-theta).exp();
    }
    Ok((lower, upper))
}

pub fn thickness(sys: &CantorSystem, depth: usize) -> Result<ThicknessBracket> {
    let (lower, upper) = bracket_parts(sys, depth)?;
    // Exact bounds convert to points; otherwise round outward.
    let lo = lower.lo.max(0.0);
    let hi = upper.hi.max(lo);
    Ok(ThicknessBracket {
        lower: lo,
        upper: hi,
        depth_used: depth,
    })
}
