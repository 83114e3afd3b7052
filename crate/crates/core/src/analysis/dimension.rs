//! Hausdorff dimension brackets.
//!
//! Affine systems solve `ρ(M(s)) = 1` for the transfer matrix
//! `M(s)_{ab} = allowed(a→b)·r_b^s`. Nonlinear systems use the depth-n block
//! matrix whose entries are `(e^{±θ}|I_v| / |ψ(I_a)|)^s`, summed over words `v`
//! that can follow `a`, where `θ` bounds the distortion of every inverse branch.
//! The spectral radius is certified with Collatz–Wielandt bounds.

use serde::Serialize;

use crate::cantor::{refine, CantorSystem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{enclose, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth_used: usize,
    pub tolerance: f64,
}

impl DimensionBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Nonlinear systems stop refining beyond this many words per block.
const MAX_BLOCK_WORDS: usize = 1 << 16;

/// Square matrix whose entries are sums of `w^s` over certified log-weights.
#[derive(Debug, Clone)]
pub struct LogWeightMatrix {
    n: usize,
    entries: Vec<Vec<Vec<Interval>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    Below,
    Unknown,
}

impl LogWeightMatrix {
    pub fn new(n: usize) -> Self {
        LogWeightMatrix {
            n,
            entries: vec![vec![Vec::new(); n]; n],
        }
    }

    pub fn push(&mut self, a: usize, b: usize, ln_weight: Interval) {
        self.entries[a][b].push(ln_weight);
    }

    fn at(&self, s: f64) -> Vec<Vec<Interval>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ws| {
                        ws.iter()
                            .fold(Interval::ZERO, |acc, lw| acc + (*lw * s).exp())
                    })
                    .collect()
            })
            .collect()
    }

    /// Certified enclosure of the spectral radius of the matrix at `s`.
    pub fn spectral_radius(&self, s: f64) -> Interval {
        let m = self.at(s);
        let mid: Vec<Vec<f64>> = m
            .iter()
            .map(|r| r.iter().map(|x| x.mid()).collect())
            .collect();
        let mut v = vec![1.0; self.n];
        let mut best = Interval::new(0.0, f64::INFINITY);
        for iter in 0..2000 {
            let mut next = vec![0.0; self.n];
            for (i, row) in mid.iter().enumerate() {
                next[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            }
            let norm = next.iter().cloned().fold(0.0, f64::max);
            if norm <= 0.0 || !norm.is_finite() {
                break;
            }
            for x in next.iter_mut() {
                *x /= norm;
            }
            v = next;
            if iter % 8 == 7 {
                if let Some(b) = collatz_wielandt(&m, &v) {
                    let lo = best.lo.max(b.lo);
                    best = Interval::new(lo, best.hi.min(b.hi).max(lo));
                    if best.width() <= 1e-14 * best.hi.max(1.0) {
                        break;
                    }
                }
            }
        }
        best
    }

    fn side(&self, s: f64) -> Side {
        let r = self.spectral_radius(s);
        if r.lo > 1.0 {
            Side::Above
        } else if r.hi < 1.0 {
            Side::Below
        } else {
            Side::Unknown
        }
    }

    /// Bracket `[lo, hi] ⊂ [0, 1]` for the root of `ρ(M(s)) = 1`, assuming
    /// `ρ` is decreasing in `s`. Returns the narrowest certified bracket
    /// reachable, which may be wider than `tol`.
    pub fn root(&self, tol: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if self.side(hi) == Side::Above {
            return (1.0, 1.0);
        }
        let target = tol / 4.0;
        while hi - lo > target {
            let m = 0.5 * (lo + hi);
            match self.side(m) {
                Side::Above => lo = m,
                Side::Below => hi = m,
                Side::Unknown => return refine_inside(self, lo, hi, target),
            }
        }
        (lo, hi)
    }
}

/// Continues bisection inside a bracket whose midpoint was undecidable.
fn refine_inside(m: &LogWeightMatrix, mut lo: f64, mut hi: f64, target: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= target {
            break;
        }
        let q1 = lo + 0.25 * (hi - lo);
        let q3 = lo + 0.75 * (hi - lo);
        let mut moved = false;
        if m.side(q1) == Side::Above {
            lo = q1;
            moved = true;
        }
        if m.side(q3) == Side::Below {
            hi = q3;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    (lo, hi)
}

/// `[min_i (Mv)_i/v_i, max_i (Mv)_i/v_i]`, which contains `ρ(M)` for `v > 0`.
fn collatz_wielandt(m: &[Vec<Interval>], v: &[f64]) -> Option<Interval> {
    if v.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (i, row) in m.iter().enumerate() {
        let mv = row
            .iter()
            .zip(v)
            .fold(Interval::ZERO, |acc, (a, &b)| acc + *a * Interval::point(b));
        let ratio = mv / Interval::point(v[i]);
        lo = lo.min(ratio.lo);
        hi = hi.max(ratio.hi);
    }
    Some(Interval::new(lo.max(0.0), hi))
}

fn ln_rational(r: &Rational) -> Interval {
    enclose(r).ln()
}

/// Transfer matrix `allowed(a→b)·r_b^s` of an affine system.
pub fn affine_transfer_matrix(sys: &CantorSystem) -> Option<LogWeightMatrix> {
    let ratios = sys.ratios()?;
    let mut m = LogWeightMatrix::new(sys.len());
    for a in 0..sys.len() {
        for &b in sys.successors(a) {
            m.push(a, b, ln_rational(&ratios[b]));
        }
    }
    Some(m)
}

/// Upper bound `θ` for `log` of the distortion of any composition of inverse branches.
pub fn distortion_theta(sys: &CantorSystem) -> f64 {
    let d = to_f64(sys.distortion_bound());
    if d == 0.0 {
        return 0.0;
    }
    let lam = enclose(sys.expansion_min());
    let hull = enclose(&sys.hull_len());
    let t = Interval::point(d) * hull * lam / (lam - 1.0);
    t.hi
}

fn block_matrices(sys: &CantorSystem, depth: usize) -> Result<(LogWeightMatrix, LogWeightMatrix)> {
    let theta = Interval::point(distortion_theta(sys));
    let cyl = refine(sys, depth)?;
    let mut upper = LogWeightMatrix::new(sys.len());
    let mut lower = LogWeightMatrix::new(sys.len());
    for a in 0..sys.len() {
        let (ilo, ihi) = sys_image(sys, a);
        let ln_img = ln_rational(&(ihi - ilo));
        for c in &cyl {
            let first = c.word[0];
            if !sys.allowed(a, first) {
                continue;
            }
            let b = *c.word.last().unwrap();
            let base = ln_rational(&c.length()) - ln_img;
            upper.push(a, b, base + theta);
            lower.push(a, b, base - theta);
        }
    }
    Ok((upper, lower))
}

fn sys_image(sys: &CantorSystem, a: usize) -> (Rational, Rational) {
    let b = sys.branch(a);
    sys.forward(a).image(&b.lo, &b.hi)
}

pub fn hausdorff_dimension(sys: &CantorSystem, tol: f64) -> Result<DimensionBracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if let Some(m) = affine_transfer_matrix(sys) {
        let (lower, upper) = m.root(tol);
        if upper - lower > tol {
            return Err(Error::ToleranceUnreachable {
                tol,
                achieved: upper - lower,
                depth: 1,
            });
        }
        return Ok(DimensionBracket {
            lower,
            upper,
            depth_used: 1,
            tolerance: tol,
        });
    }
    let mut best = (0.0, 1.0, 0usize);
    let mut depth = 1;
    loop {
        if crate::cantor::word_count(sys, depth) > MAX_BLOCK_WORDS as u128 {
            break;
        }
        let (up, low) = block_matrices(sys, depth)?;
        let upper = up.root(tol).1;
        let lower = low.root(tol).0;
        if upper - lower < best.1 - best.0 {
            best = (lower, upper, depth);
        }
        if upper - lower <= tol {
            return Ok(DimensionBracket {
                lower,
                upper,
                depth_used: depth,
                tolerance: tol,
            });
        }
        depth += 1;
    }
    Err(Error::ToleranceUnreachable {
        tol,
        achieved: best.1 - best.0,
        depth: best.2,
    })
}

/// Depth-`depth` cylinder cover sum `Σ |I_w|^α`.
pub fn hausdorff_measure_estimate(sys: &CantorSystem, alpha: f64, depth: usize) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    let cyl = refine(sys, depth)?;
    let mut lens: Vec<f64> = cyl.iter().map(|c| to_f64(&c.length())).collect();
    lens.sort_by(f64::total_cmp);
    Ok(lens.iter().map(|l| l.powf(alpha)).sum())
}

/// Root in `[0, 1]` of `Σ l_i^s = 1` for lengths in `(0, 1)`.
pub fn cover_sum_root(lengths: &[f64]) -> f64 {
    let f = |s: f64| lengths.iter().map(|l| l.powf(s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if f(hi) >= 0.0 {
        return 1.0;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if f(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}
