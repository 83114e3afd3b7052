//! Affine Smale horseshoes and their stable and unstable dimensions.

use serde::Serialize;

use super::toy::ToyFamily;
use crate::affine_like::ConeParams;
use crate::analysis::{hausdorff_dimension, DimensionBracket};
use crate::cantor::{refine, CantorSystem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{int, serde_rational, to_f64, Rational};

/// `N` vertical strips of width `r` in the unit square, each mapped affinely
/// onto the horizontal strip at the same position.
#[derive(Debug, Clone, Serialize)]
pub struct SmaleAffine {
    pub branches: usize,
    #[serde(with = "serde_rational")]
    pub r: Rational,
}

impl SmaleAffine {
    pub fn new(branches: usize, r: Rational) -> Result<Self> {
        if branches < 2 {
            return Err(Error::InvalidModel(
                "a horseshoe needs at least two branches".into(),
            ));
        }
        if r <= int(0) || r.clone() * int(branches as i64) >= int(1) {
            return Err(Error::InvalidModel(format!(
                "strip width {r} must lie in (0, 1/{branches})"
            )));
        }
        Ok(SmaleAffine { branches, r })
    }

    /// Strip `i` occupies `[i·(1−r)/(N−1), i·(1−r)/(N−1) + r]` in both axes.
    pub fn strips(&self) -> Vec<(Rational, Rational)> {
        let step = (int(1) - &self.r) / int(self.branches as i64 - 1);
        (0..self.branches)
            .map(|i| {
                let lo = &step * int(i as i64);
                let hi = &lo + &self.r;
                (lo, hi)
            })
            .collect()
    }

    pub fn factor(&self) -> Result<CantorSystem> {
        CantorSystem::affine_full_shift("smale_factor", &self.strips())
    }

    /// `Df = diag(1/r, r)` on every strip.
    pub fn jacobian(&self) -> [[Interval; 2]; 2] {
        let inv = crate::rational::enclose(&(int(1) / &self.r));
        let r = crate::rational::enclose(&self.r);
        [[inv, Interval::ZERO], [Interval::ZERO, r]]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StableUnstable {
    pub d_s: DimensionBracket,
    pub d_u: DimensionBracket,
    /// Least-squares box-counting slope of the two-dimensional set.
    pub box_dimension: f64,
}

/// Horseshoes whose dimensions split into one-dimensional factors.
pub enum ProductModel<'a> {
    Smale(&'a SmaleAffine),
    Toy(&'a ToyFamily),
}

pub fn stable_unstable_dimensions(
    model: ProductModel<'_>,
    tol: f64,
    box_depth: usize,
) -> Result<StableUnstable> {
    let (unstable, stable) = match model {
        ProductModel::Smale(s) => (s.factor()?, s.factor()?),
        ProductModel::Toy(t) => t.factor_systems()?,
    };
    let d_u = hausdorff_dimension(&unstable, tol)?;
    let d_s = hausdorff_dimension(&stable, tol)?;
    let box_dimension = product_box_dimension(&unstable, &stable, box_depth)?;
    Ok(StableUnstable {
        d_s,
        d_u,
        box_dimension,
    })
}

/// Minimal number of intervals of length `eps` covering the cylinders; the
/// left-to-right greedy cover is optimal on the line.
fn covering_number(cyl: &[(f64, f64)], eps: f64) -> u64 {
    let mut count = 0u64;
    let mut reach = f64::NEG_INFINITY;
    for &(lo, hi) in cyl {
        if hi <= reach {
            continue;
        }
        let start = lo.max(reach);
        let k = (((hi - start) / eps).ceil() as u64).max(1);
        count += k;
        reach = start + k as f64 * eps;
    }
    count
}

fn depth_cylinders(sys: &CantorSystem, depth: usize) -> Result<Vec<(f64, f64)>> {
    Ok(refine(sys, depth)?
        .iter()
        .map(|c| (to_f64(&c.lo), to_f64(&c.hi)))
        .collect())
}

/// Box-counting slope of `K_u × K_s` from covers by squares of side `ε`:
/// the square count is the product of the optimal one-dimensional counts.
/// Scales run geometrically with the largest first-level contraction, from
/// half the smallest first-level gap down to the depth-`depth` cylinder size.
pub fn product_box_dimension(
    unstable: &CantorSystem,
    stable: &CantorSystem,
    depth: usize,
) -> Result<f64> {
    let cu = depth_cylinders(unstable, depth)?;
    let cs = depth_cylinders(stable, depth)?;
    let first = |sys: &CantorSystem| -> Result<(f64, f64)> {
        let c = depth_cylinders(sys, 1)?;
        let hull = c.last().map_or(1.0, |l| l.1) - c.first().map_or(0.0, |f| f.0);
        let q = c.iter().map(|x| x.1 - x.0).fold(0.0, f64::max) / hull;
        let gap = c
            .windows(2)
            .map(|w| w[1].0 - w[0].1)
            .fold(f64::INFINITY, f64::min);
        Ok((q, gap / 2.0))
    };
    let (qu, gu) = first(unstable)?;
    let (qs, gs) = first(stable)?;
    let q = qu.max(qs);
    let finest = cu.iter().chain(&cs).map(|c| c.1 - c.0).fold(0.0, f64::max);
    let mut eps = gu.min(gs);
    let mut pts = Vec::new();
    while eps >= finest && pts.len() < 64 {
        let n = covering_number(&cu, eps) as f64 * covering_number(&cs, eps) as f64;
        pts.push(((1.0 / eps).ln(), n.ln()));
        eps *= q;
    }
    if pts.len() < 2 {
        return Err(Error::Resolution(format!(
            "depth {depth} resolves fewer than two scales"
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Forward invariance of the cone `|dy| ≤ |dx|` with expansion `λ`, and the
/// same for `|dx| ≤ |dy|` under the inverse.
pub fn cone_preserved(j: &[[Interval; 2]; 2], lambda: f64) -> bool {
    let s = Interval::new(-1.0, 1.0);
    let (a, b, c, d) = (j[0][0], j[0][1], j[1][0], j[1][1]);
    let fx = a + b * s;
    let fy = c + d * s;
    let forward = fx.mig() >= lambda && fy.mag() <= fx.mig();
    let det = a * d - b * c;
    if det.contains_zero() {
        return false;
    }
    let bx = (d * s - b) / det;
    let by = (a - c * s) / det;
    forward && by.mig() >= lambda && bx.mag() <= by.mig()
}

pub enum ConefieldModel<'a> {
    Smale(&'a SmaleAffine),
    /// The toy family, including the fold region when `with_fold` is set.
    Toy {
        family: &'a ToyFamily,
        with_fold: bool,
        t: f64,
    },
}

/// Checks the cone conditions at the `grid_n²` sample points of the unit
/// square that lie in the domain of the map.
pub fn verify_hyperbolic_conefield(
    model: ConefieldModel<'_>,
    grid_n: usize,
    params: &ConeParams,
) -> Result<bool> {
    if grid_n == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let pts = (0..grid_n).map(|i| (i as f64 + 0.5) / grid_n as f64);
    match model {
        ConefieldModel::Smale(s) => {
            let strips: Vec<(f64, f64)> = s
                .strips()
                .iter()
                .map(|(a, b)| (to_f64(a), to_f64(b)))
                .collect();
            let hit = pts
                .clone()
                .any(|x| strips.iter().any(|&(a, b)| a <= x && x <= b));
            Ok(!hit || cone_preserved(&s.jacobian(), params.lambda))
        }
        ConefieldModel::Toy {
            family,
            with_fold,
            t,
        } => {
            let mut ok = true;
            for e in family.base_transitions()? {
                // Forward derivative of x₁ = A⁻¹(x₀), y₁ = B(y₀).
                let r = e.ranges;
                let j = [[r.a_x.recip(), Interval::ZERO], [Interval::ZERO, r.b_y]];
                ok &= cone_preserved(&j, params.lambda);
            }
            if with_fold {
                if let Some(g) = &family.fold {
                    let tongue = g.tongue_u(Interval::point(t));
                    for x in pts.clone() {
                        for y in pts.clone() {
                            if tongue.x.contains(x) && tongue.y.contains(y) {
                                let jf = g.jacobian(x);
                                let j = [
                                    [Interval::around(jf[0][0]), Interval::around(jf[0][1])],
                                    [Interval::point(jf[1][0]), Interval::point(jf[1][1])],
                                ];
                                ok &= cone_preserved(&j, params.lambda);
                            }
                        }
                    }
                }
            }
            Ok(ok)
        }
    }
}
