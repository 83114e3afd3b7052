//! Sink detection for quadratic maps of the plane.

use rayon::prelude::*;
use serde::Serialize;

use crate::interval::Interval;

/// Parameterized maps of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum PlaneMap {
    /// `(x, y) ↦ (y, y² + μ)`; at `μ = 0` the renormalization limit.
    Limit,
    /// `(x, y) ↦ (y, y² + μ + b·x)`, the fold of the toy family with `μ = −t`.
    Fold { b: f64 },
}

impl PlaneMap {
    pub fn apply(&self, mu: f64, (x, y): (f64, f64)) -> (f64, f64) {
        match *self {
            PlaneMap::Limit => (y, y * y + mu),
            PlaneMap::Fold { b } => (y, y * y + mu + b * x),
        }
    }

    fn coupling(&self) -> f64 {
        match *self {
            PlaneMap::Limit => 0.0,
            PlaneMap::Fold { b } => b,
        }
    }

    /// Interval Jacobian `[[0, 1], [b, 2y]]` over a box.
    pub fn jacobian(&self, y: Interval) -> [[Interval; 2]; 2] {
        [
            [Interval::ZERO, Interval::ONE],
            [Interval::point(self.coupling()), y * 2.0],
        ]
    }

    fn jacobian_f64(&self, y: f64) -> [[f64; 2]; 2] {
        [[0.0, 1.0], [self.coupling(), 2.0 * y]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sink {
    pub period: usize,
    pub orbit: Vec<(f64, f64)>,
    /// Bound on the spectral radius of the cycle's Jacobian product.
    pub multiplier_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl SearchBox {
    pub fn around(cx: f64, cy: f64, r: f64) -> Self {
        SearchBox {
            x: (cx - r, cx + r),
            y: (cy - r, cy + r),
        }
    }

    fn contains(&self, (x, y): (f64, f64)) -> bool {
        self.x.0 <= x && x <= self.x.1 && self.y.0 <= y && y <= self.y.1
    }
}

type M2 = [[Interval; 2]; 2];

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Interval::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Both eigenvalues of `m` certainly inside the unit disk (Jury test on
/// `λ² − tr·λ + det`). Returns a bound on the spectral radius when so.
fn certified_contracting(m: &M2) -> Option<f64> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let jury = det.mag() < 1.0 && tr.mag() < (Interval::ONE + det).lo;
    if !jury {
        return None;
    }
    // |λ| ≤ (|tr| + √(tr² + 4|det|)) / 2 bounds both roots.
    let disc = tr.sqr() + Interval::point(det.mag()) * 4.0;
    let bound = (Interval::point(tr.mag()) + disc.sqrt()) * 0.5;
    Some(bound.hi.min(1.0))
}

fn newton_cycle(map: &PlaneMap, mu: f64, start: (f64, f64), p: usize) -> (f64, f64) {
    let mut z = start;
    for _ in 0..20 {
        let mut w = z;
        let mut j = [[1.0, 0.0], [0.0, 1.0]];
        for _ in 0..p {
            let jf = map.jacobian_f64(w.1);
            j = [
                [
                    jf[0][0] * j[0][0] + jf[0][1] * j[1][0],
                    jf[0][0] * j[0][1] + jf[0][1] * j[1][1],
                ],
                [
                    jf[1][0] * j[0][0] + jf[1][1] * j[1][0],
                    jf[1][0] * j[0][1] + jf[1][1] * j[1][1],
                ],
            ];
            w = map.apply(mu, w);
        }
        let (fx, fy) = (w.0 - z.0, w.1 - z.1);
        let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (a[1][1] * fx - a[0][1] * fy) / det;
        let dy = (-a[1][0] * fx + a[0][0] * fy) / det;
        z = (z.0 - dx, z.1 - dy);
        if dx.abs() + dy.abs() < 1e-15 {
            break;
        }
    }
    z
}

fn sink_from_seed(
    map: &PlaneMap,
    mu: f64,
    seed: (f64, f64),
    search: &SearchBox,
    max_period: usize,
    iters: usize,
) -> Option<Sink> {
    let mut z = seed;
    for _ in 0..iters {
        z = map.apply(mu, z);
        if !(z.0.is_finite() && z.1.is_finite()) || z.0.abs() > 1e6 || z.1.abs() > 1e6 {
            return None;
        }
    }
    let mut w = z;
    let period = (1..=max_period).find(|_| {
        w = map.apply(mu, w);
        (w.0 - z.0).abs() + (w.1 - z.1).abs() < 1e-8
    })?;
    let z = newton_cycle(map, mu, z, period);
    let mut orbit = Vec::with_capacity(period);
    let mut w = z;
    for _ in 0..period {
        orbit.push(w);
        w = map.apply(mu, w);
    }
    if !orbit.iter().any(|&q| search.contains(q)) {
        return None;
    }
    let radius = 1e-6;
    let mut m: M2 = [
        [Interval::ONE, Interval::ZERO],
        [Interval::ZERO, Interval::ONE],
    ];
    for &(_, y) in &orbit {
        let j = map.jacobian(Interval::new(y - radius, y + radius));
        m = mat_mul(&j, &m);
    }
    let bound = certified_contracting(&m)?;
    // Start the reported orbit at its smallest point for a canonical form.
    let k = (0..period)
        .min_by(|&a, &b| orbit[a].partial_cmp(&orbit[b]).expect("finite orbit"))
        .unwrap_or(0);
    orbit.rotate_left(k);
    Some(Sink {
        period,
        orbit,
        multiplier_bound: bound,
    })
}

/// Iterates a `seeds × seeds` grid of starting points in `search` and
/// returns the first certified attracting cycle, in seed order, that meets
/// the box.
pub fn detect_sink(
    map: &PlaneMap,
    mu: f64,
    search: &SearchBox,
    max_period: usize,
    iters: usize,
    seeds: usize,
) -> Option<Sink> {
    let n = seeds.max(1);
    let grid: Vec<(f64, f64)> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let fx = if n == 1 {
                0.5
            } else {
                i as f64 / (n - 1) as f64
            };
            let fy = if n == 1 {
                0.5
            } else {
                j as f64 / (n - 1) as f64
            };
            (
                search.x.0 + fx * (search.x.1 - search.x.0),
                search.y.0 + fy * (search.y.1 - search.y.0),
            )
        })
        .collect();
    grid.par_iter()
        .map(|&s| sink_from_seed(map, mu, s, search, max_period.max(1), iters))
        .find_first(Option::is_some)
        .flatten()
}

/// Parameters in `mus` at which a sink is detected, in input order.
pub fn sink_scan(
    map: &PlaneMap,
    mus: &[f64],
    search: &SearchBox,
    max_period: usize,
    iters: usize,
    seeds: usize,
) -> Vec<(f64, Option<Sink>)> {
    mus.par_iter()
        .map(|&mu| (mu, detect_sink(map, mu, search, max_period, iters, seeds)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_map_has_sink_at_origin_only() {
        let s = detect_sink(
            &PlaneMap::Limit,
            0.0,
            &SearchBox::around(0.0, 0.0, 0.3),
            4,
            200,
            8,
        )
        .unwrap();
        assert_eq!(s.period, 1);
        assert!(s.orbit[0].0.abs() < 1e-12 && s.orbit[0].1.abs() < 1e-12);
        assert!(detect_sink(
            &PlaneMap::Limit,
            0.0,
            &SearchBox::around(1.0, 1.0, 0.1),
            4,
            200,
            8
        )
        .is_none());
    }

    #[test]
    fn fold_has_sink_at_analytic_fixed_point() {
        // x² − 0.9x + 0.2 = 0 has the attracting root 0.4 for b = 0.1.
        let s = detect_sink(
            &PlaneMap::Fold { b: 0.1 },
            0.2,
            &SearchBox::around(0.0, 0.0, 1.0),
            8,
            2000,
            8,
        )
        .unwrap();
        assert_eq!(s.period, 1);
        assert!((s.orbit[0].0 - 0.4).abs() < 1e-9);
    }

    #[test]
    fn jury_test_rejects_expanding_cycles() {
        let m = [
            [Interval::ZERO, Interval::ONE],
            [Interval::ZERO, Interval::point(2.0)],
        ];
        assert!(certified_contracting(&m).is_none());
        let m = [
            [Interval::ZERO, Interval::ONE],
            [Interval::ZERO, Interval::ZERO],
        ];
        assert!(certified_contracting(&m).is_some());
    }
}
