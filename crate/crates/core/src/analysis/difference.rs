//! Arithmetic differences `K ⊖ λK'`, Marstrand projection scans and
//! near-tangency parameter densities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::dimension::hausdorff_dimension;
use crate::cantor::{refine, CantorSystem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{enclose, Rational};

/// Merged outer cover of `K ⊖ λK'` at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceCover {
    pub depth: usize,
    pub intervals: Vec<Interval>,
    /// Total length of the merged cover, rounded up.
    pub measure: f64,
    /// Connected at this depth and the next.
    pub contains_interval: bool,
}

/// Cylinder endpoints of `K` and of `λK'`, either on a common integer grid
/// or as float enclosures.
enum Endpoints {
    Exact {
        k: Vec<(i128, i128)>,
        kp: Vec<(i128, i128)>,
        scale: i128,
    },
    Float {
        k: Vec<Interval>,
        kp: Vec<Interval>,
    },
}

/// Largest magnitude allowed on the integer grid; sums of a few such values stay in `i128`.
const GRID_LIMIT: i128 = 1 << 120;

fn to_grid(values: &[&Rational], scale: &BigInt) -> Option<Vec<i128>> {
    values
        .iter()
        .map(|v| {
            let n = v.numer() * (scale / v.denom());
            let x = n.to_i128()?;
            (x.abs() < GRID_LIMIT).then_some(x)
        })
        .collect()
}

fn endpoints(
    k: &CantorSystem,
    kp: &CantorSystem,
    lambda: &Rational,
    depth: usize,
) -> Result<Endpoints> {
    let ck = refine(k, depth)?;
    let ckp = refine(kp, depth)?;
    let a: Vec<(Rational, Rational)> = ck.into_iter().map(|c| (c.lo, c.hi)).collect();
    let b: Vec<(Rational, Rational)> = ckp
        .into_iter()
        .map(|c| {
            let (x, y) = (lambda * &c.lo, lambda * &c.hi);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    let mut scale = BigInt::one();
    for (x, y) in a.iter().chain(&b) {
        scale = scale.lcm(x.denom()).lcm(y.denom());
        if scale.bits() > 110 {
            break;
        }
    }
    if scale.bits() <= 110 {
        let flat_a: Vec<&Rational> = a.iter().flat_map(|(x, y)| [x, y]).collect();
        let flat_b: Vec<&Rational> = b.iter().flat_map(|(x, y)| [x, y]).collect();
        if let (Some(ga), Some(gb)) = (to_grid(&flat_a, &scale), to_grid(&flat_b, &scale)) {
            return Ok(Endpoints::Exact {
                k: ga.chunks(2).map(|p| (p[0], p[1])).collect(),
                kp: gb.chunks(2).map(|p| (p[0], p[1])).collect(),
                scale: scale.to_i128().expect("scale fits"),
            });
        }
    }
    let fa = a
        .iter()
        .map(|(x, y)| enclose(x).hull(&enclose(y)))
        .collect();
    let fb = b
        .iter()
        .map(|(x, y)| enclose(x).hull(&enclose(y)))
        .collect();
    Ok(Endpoints::Float { k: fa, kp: fb })
}

fn merge_exact(mut ivs: Vec<(i128, i128)>) -> Vec<(i128, i128)> {
    ivs.par_sort_unstable();
    let mut out: Vec<(i128, i128)> = Vec::new();
    for (lo, hi) in ivs {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn merge_float(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.par_sort_unstable_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<Interval> = Vec::new();
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Enclosure of `v / scale`.
fn grid_value(v: i128, scale: i128) -> Interval {
    const EXACT: i128 = 1 << 53;
    if v % scale == 0 && (v / scale).abs() < EXACT {
        return Interval::point((v / scale) as f64);
    }
    let q = v as f64 / scale as f64;
    if v.abs() < EXACT && scale < EXACT {
        // Both operands exact, so the quotient is correctly rounded.
        return Interval::around(q);
    }
    let mut iv = Interval::around(q);
    for _ in 0..3 {
        iv = Interval::around(iv.lo).hull(&Interval::around(iv.hi));
    }
    iv
}

fn grid_to_interval(lo: i128, hi: i128, scale: i128) -> Interval {
    grid_value(lo, scale).hull(&grid_value(hi, scale))
}

/// Merged cover and its length.
struct MergedCover {
    intervals: Vec<Interval>,
    measure: f64,
}

fn merged_cover(ep: &Endpoints) -> MergedCover {
    merged_cover_with(ep, true)
}

fn merged_cover_with(ep: &Endpoints, keep_intervals: bool) -> MergedCover {
    match ep {
        Endpoints::Exact { k, kp, scale } => {
            let ivs: Vec<(i128, i128)> = k
                .par_iter()
                .flat_map_iter(|&(a0, a1)| kp.iter().map(move |&(b0, b1)| (a0 - b1, a1 - b0)))
                .collect();
            let merged = merge_exact(ivs);
            let total: i128 = merged.iter().map(|(a, b)| b - a).sum();
            let measure = grid_value(total, *scale).hi;
            let intervals = if keep_intervals {
                merged
                    .iter()
                    .map(|&(a, b)| grid_to_interval(a, b, *scale))
                    .collect()
            } else {
                Vec::new()
            };
            MergedCover { intervals, measure }
        }
        Endpoints::Float { k, kp } => {
            let ivs: Vec<Interval> = k
                .par_iter()
                .flat_map_iter(|a| kp.iter().map(move |b| *a - *b))
                .collect();
            let merged = merge_float(ivs);
            let measure = merged
                .iter()
                .fold(Interval::ZERO, |acc, iv| acc + Interval::point(iv.width()))
                .hi;
            MergedCover {
                intervals: merged,
                measure,
            }
        }
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth < 1 {
        return Err(Error::InvalidArgument(
            "arithmetic difference needs depth >= 1".into(),
        ));
    }
    Ok(())
}

pub fn arithmetic_difference(
    k: &CantorSystem,
    kp: &CantorSystem,
    lambda: &Rational,
    depth: usize,
) -> Result<DifferenceCover> {
    check_depth(depth)?;
    let here = merged_cover(&endpoints(k, kp, lambda, depth)?);
    let connected = here.intervals.len() == 1 && {
        let next = merged_cover(&endpoints(k, kp, lambda, depth + 1)?);
        next.intervals.len() == 1
    };
    Ok(DifferenceCover {
        depth,
        intervals: here.intervals,
        measure: here.measure,
        contains_interval: connected,
    })
}

/// Length of the merged depth-`depth` cover only.
pub fn difference_measure_upper(
    k: &CantorSystem,
    kp: &CantorSystem,
    lambda: &Rational,
    depth: usize,
) -> Result<f64> {
    check_depth(depth)?;
    Ok(merged_cover_with(&endpoints(k, kp, lambda, depth)?, false).measure)
}

/// `ε · #{ε-cells containing a point x − λy}` with `x`, `y` cylinder
/// endpoints (points of the sets) and `ε` the shortest cylinder of `K` or `λK'`.
fn measure_lower(ep: &Endpoints) -> f64 {
    match ep {
        Endpoints::Exact { k, kp, scale } => {
            let eps = k.iter().chain(kp.iter()).map(|(a, b)| b - a).min().unwrap();
            let xs: Vec<i128> = k.iter().flat_map(|&(a, b)| [a, b]).collect();
            let ys: Vec<i128> = kp.iter().flat_map(|&(a, b)| [a, b]).collect();
            let base = xs[0] - ys[ys.len() - 1];
            let top = xs[xs.len() - 1] - ys[0];
            let cells = ((top - base) / eps + 1) as u128;
            let count = count_cells(cells, xs.len() * ys.len(), |emit| {
                for &x in &xs {
                    for &y in &ys {
                        emit(((x - y - base) / eps) as u64);
                    }
                }
            });
            let m = Rational::new(
                BigInt::from(eps) * BigInt::from(count),
                BigInt::from(*scale),
            );
            enclose(&m).lo
        }
        Endpoints::Float { k, kp } => {
            let eps = k
                .iter()
                .chain(kp.iter())
                .map(|iv| iv.hi - iv.lo)
                .fold(f64::INFINITY, f64::min);
            let xs: Vec<Interval> = k
                .iter()
                .flat_map(|iv| [Interval::point(iv.lo), Interval::point(iv.hi)])
                .collect();
            let ys: Vec<Interval> = kp
                .iter()
                .flat_map(|iv| [Interval::point(iv.lo), Interval::point(iv.hi)])
                .collect();
            let base = xs[0].lo - ys[ys.len() - 1].hi - eps;
            let top = xs[xs.len() - 1].hi - ys[0].lo;
            let cells = ((top - base) / eps).ceil() as u128 + 1;
            let count = count_cells(cells, xs.len() * ys.len(), |emit| {
                for x in &xs {
                    for y in &ys {
                        let q = (*x - *y - base) * (1.0 / eps);
                        let (a, b) = (q.lo.floor(), q.hi.floor());
                        if a == b && a >= 0.0 {
                            emit(a as u64);
                        }
                    }
                }
            });
            Interval::point(eps).scale(count as f64).lo
        }
    }
}

/// Counts distinct cell indices with a bitset when the index range is small.
fn count_cells(range: u128, points: usize, fill: impl FnOnce(&mut dyn FnMut(u64))) -> u64 {
    if range <= 1 << 30 {
        let mut bits = vec![0u64; (range as usize).div_ceil(64)];
        fill(&mut |c| {
            if let Some(w) = bits.get_mut((c / 64) as usize) {
                *w |= 1 << (c % 64);
            }
        });
        bits.iter().map(|w| w.count_ones() as u64).sum()
    } else {
        let mut all = Vec::with_capacity(points);
        fill(&mut |c| all.push(c));
        all.sort_unstable();
        all.dedup();
        all.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarstrandRow {
    pub lambda: f64,
    pub depth: usize,
    pub measure_lower: f64,
    pub measure_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarstrandScan {
    pub rows: Vec<MarstrandRow>,
    /// Dimension sum lower bound when both brackets were available.
    pub dim_sum_lower: Option<f64>,
    /// Fraction of grid values whose `measure_lower` exceeds `floor` at the
    /// last two depths; present only when the dimension sum is certified > 1.
    pub fraction_above_floor: Option<f64>,
    pub floor: f64,
}

fn marstrand_row(
    k: &CantorSystem,
    kp: &CantorSystem,
    lambda: &Rational,
    depth: usize,
) -> Result<MarstrandRow> {
    let ep = endpoints(k, kp, lambda, depth)?;
    let upper = merged_cover_with(&ep, false).measure;
    // Hit cells may stick out of the cover, so cap at its length.
    Ok(MarstrandRow {
        lambda: crate::rational::to_f64(lambda),
        depth,
        measure_lower: measure_lower(&ep).min(upper),
        measure_upper: upper,
    })
}

pub fn marstrand_scan(
    k: &CantorSystem,
    kp: &CantorSystem,
    grid: &[Rational],
    depth: usize,
    floor: f64,
) -> Result<MarstrandScan> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    check_depth(depth)?;
    let rows: Vec<MarstrandRow> = grid
        .par_iter()
        .map(|l| marstrand_row(k, kp, l, depth))
        .collect::<Result<_>>()?;
    let dims = hausdorff_dimension(k, 1e-6).and_then(|a| Ok((a, hausdorff_dimension(kp, 1e-6)?)));
    let dim_sum_lower = dims
        .as_ref()
        .ok()
        .map(|(a, b)| (Interval::point(a.lower) + Interval::point(b.lower)).lo);
    let fraction_above_floor = match dim_sum_lower {
        Some(s) if s > 1.0 && depth >= 2 => {
            let previous: Vec<MarstrandRow> = grid
                .par_iter()
                .map(|l| marstrand_row(k, kp, l, depth - 1))
                .collect::<Result<_>>()?;
            let kept = rows
                .iter()
                .zip(&previous)
                .filter(|(a, b)| a.measure_lower > floor && b.measure_lower > floor)
                .count();
            Some(kept as f64 / rows.len() as f64)
        }
        _ => None,
    };
    Ok(MarstrandScan {
        rows,
        dim_sum_lower,
        fraction_above_floor,
        floor,
    })
}

/// Float cylinder tree: level `n` holds the sorted depth-`n` cylinders and,
/// for each, the index range of its children on level `n + 1`.
struct CylinderTree {
    levels: Vec<Vec<Interval>>,
    children: Vec<Vec<(usize, usize)>>,
}

impl CylinderTree {
    fn build(sys: &CantorSystem, depth: usize, shift: &Rational) -> Result<Self> {
        let mut levels = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let cyl = refine(sys, n)?;
            levels.push(
                cyl.iter()
                    .map(|c| enclose(&(&c.lo + shift)).hull(&enclose(&(&c.hi + shift))))
                    .collect::<Vec<_>>(),
            );
        }
        let mut children = Vec::with_capacity(depth);
        for n in 0..depth {
            let next = &levels[n + 1];
            children.push(
                levels[n]
                    .iter()
                    .map(|p| {
                        let a = next.partition_point(|c| c.hi < p.lo);
                        let b = next.partition_point(|c| c.lo <= p.hi);
                        (a, b)
                    })
                    .collect(),
            );
        }
        Ok(CylinderTree { levels, children })
    }

    fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

enum Near {
    Yes,
    No,
    Unresolved,
}

/// Whether some `x − y` (`x ∈ K`, `y ∈ K'`) lies within distance `< r` of `s`.
fn near_difference(a: &CylinderTree, b: &CylinderTree, s: f64, r: f64) -> Near {
    let mut stack: Vec<(usize, usize, usize, usize)> = vec![(0, 0, 0, 0)];
    let target = Interval::point(s);
    let mut unresolved = false;
    while let Some((na, ia, nb, ib)) = stack.pop() {
        let ca = a.levels[na][ia];
        let cb = b.levels[nb][ib];
        let cover = ca - cb;
        if cover.distance_lower(&target) >= r {
            continue;
        }
        for x in [ca.lo, ca.hi] {
            for y in [cb.lo, cb.hi] {
                // Cylinder endpoints are points of the sets.
                if (Interval::point(x) - Interval::point(y) - target).abs().hi < r {
                    return Near::Yes;
                }
            }
        }
        let split_a = na < a.depth() && (nb == b.depth() || ca.width() >= cb.width());
        if split_a {
            let (lo, hi) = a.children[na][ia];
            for j in lo..hi {
                stack.push((na + 1, j, nb, ib));
            }
        } else if nb < b.depth() {
            let (lo, hi) = b.children[nb][ib];
            for j in lo..hi {
                stack.push((na, ia, nb + 1, j));
            }
        } else {
            unresolved = true;
        }
    }
    if unresolved {
        Near::Unresolved
    } else {
        Near::No
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityResult {
    pub t: f64,
    pub c: f64,
    pub samples: usize,
    pub density: f64,
    pub depth_used: usize,
}

/// Deepest cylinder tree built for a density query.
const MAX_TREE_DEPTH: usize = 18;

/// Fraction of `s_i = i·t/m` (`i = 1..m`) for which the `cs`-neighbourhoods
/// of `K` and `K' + s` are closer than `2cs`, i.e. `dist(s, K ⊖ K') < 4cs`.
pub fn tangency_parameter_density(
    k: &CantorSystem,
    kp: &CantorSystem,
    c: f64,
    t: f64,
    samples: usize,
) -> Result<DensityResult> {
    if !(c > 0.0 && t > 0.0 && samples >= 1) {
        return Err(Error::InvalidArgument(
            "need c > 0, t > 0 and at least one sample".into(),
        ));
    }
    // Resolve lengths well below the smallest radius 4c·t/m.
    let r_min = 4.0 * c * t / samples as f64;
    let mut depth = 0;
    let max_len = |sys: &CantorSystem, n: usize| -> Result<f64> {
        let cyl = refine(sys, n)?;
        Ok(cyl.iter().map(|c| c.interval().width()).fold(0.0, f64::max))
    };
    while depth < MAX_TREE_DEPTH
        && (max_len(k, depth)? > r_min / 8.0 || max_len(kp, depth)? > r_min / 8.0)
    {
        depth += 1;
    }
    let zero = Rational::zero();
    let radius = |i: usize| {
        let s = t * i as f64 / samples as f64;
        (s, 4.0 * c * s)
    };
    let mut pending: Vec<usize> = (1..=samples).collect();
    let mut count = 0usize;
    loop {
        let ta = CylinderTree::build(k, depth, &zero)?;
        let tb = CylinderTree::build(kp, depth, &zero)?;
        let results: Vec<Near> = pending
            .par_iter()
            .map(|&i| {
                let (s, r) = radius(i);
                near_difference(&ta, &tb, s, r)
            })
            .collect();
        let mut still = Vec::new();
        for (&i, h) in pending.iter().zip(&results) {
            match h {
                Near::Yes => count += 1,
                Near::No => {}
                Near::Unresolved => still.push(i),
            }
        }
        if still.is_empty() {
            break;
        }
        if depth >= MAX_TREE_DEPTH {
            let (s, _) = radius(still[0]);
            return Err(Error::Resolution(format!(
                "depth {depth} cylinders cannot decide the sample s = {s:e} ({} undecided)",
                still.len()
            )));
        }
        depth = (depth + 2).min(MAX_TREE_DEPTH);
        pending = still;
    }
    Ok(DensityResult {
        t,
        c,
        samples,
        density: count as f64 / samples as f64,
        depth_used: depth,
    })
}

/// Convenience: `λ` values from decimal floats.
pub fn lambda_grid(values: &[f64]) -> Result<Vec<Rational>> {
    values
        .iter()
        .map(|&v| crate::rational::from_decimal_f64(v))
        .collect()
}
