use serde::Serialize;

use super::{is_critical, Catalog, PYParams};
use crate::error::{Error, Result};
use crate::models::ToyFamily;

/// Widths `|P₀..P_k|`, `|Q₀..Q_k|` along a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainWidths {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ChainWidths {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() || p.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain needs matching width sequences of length >= 2 (got {} and {})",
                p.len(),
                q.len()
            )));
        }
        if let Some(w) = p.iter().chain(&q).find(|w| !(**w > 0.0 && **w <= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "chain width {w} outside (0, 1]"
            )));
        }
        Ok(ChainWidths { p, q })
    }

    /// Index of the last link.
    pub fn k(&self) -> usize {
        self.p.len() - 1
    }
}

/// `max(|P_{j+1}|, |Q_{j+1}|) ≤ C·|Q_j|^{β̃}` for `j = 1..k−1`.
pub fn lemma24_check(w: &ChainWidths, params: &PYParams, c: f64) -> bool {
    let bt = params.beta_tilde();
    (1..w.k()).all(|j| w.p[j + 1].max(w.q[j + 1]) <= c * w.q[j].powf(bt))
}

/// Smallest `C` for which [`lemma24_check`] holds on every chain given.
pub fn fitted_lemma24_constant(chains: &[ChainWidths], params: &PYParams) -> f64 {
    let bt = params.beta_tilde();
    chains
        .iter()
        .flat_map(|w| (1..w.k()).map(move |j| w.p[j + 1].max(w.q[j + 1]) / w.q[j].powf(bt)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringBound {
    /// `N_k·ε_k^d·∏|P_i|^{d−1}/|Q_i|`.
    pub bound: f64,
    /// `ε₀ = ε_k·∏|P_i|`.
    pub eps0_scale: f64,
    /// Square sides `ε_0..ε_k`.
    pub eps: Vec<f64>,
    /// `N_k = |Q_{k−1}|^{1/2}/ε_k`.
    pub n_k: f64,
}

/// Contribution of one chain to the `d`-dimensional covering sum.
///
/// Products are accumulated in log space so long chains do not underflow.
pub fn covering_bound(w: &ChainWidths, d: f64, eta: f64) -> Result<CoveringBound> {
    let k = w.k();
    let mut ln_eps = vec![0.0; k + 1];
    ln_eps[k] = 0.5 * (1.0 - eta) * w.q[k].ln() + w.p[k].ln();
    for i in (0..k).rev() {
        ln_eps[i] = ln_eps[i + 1] + w.p[i].ln();
    }
    for i in 0..k {
        if ln_eps[i + 1] >= w.q[i].ln() {
            return Err(Error::CompatibilityViolation {
                index: i,
                eps: ln_eps[i + 1].exp(),
                q: w.q[i],
            });
        }
    }
    let ln_nk = 0.5 * w.q[k - 1].ln() - ln_eps[k];
    let ln_prod: f64 = (0..k).map(|i| (d - 1.0) * w.p[i].ln() - w.q[i].ln()).sum();
    Ok(CoveringBound {
        bound: (ln_nk + d * ln_eps[k] + ln_prod).exp(),
        eps0_scale: ln_eps[0].exp(),
        eps: ln_eps.iter().map(|l| l.exp()).collect(),
        n_k: ln_nk.exp(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum DimensionBound {
    Feasible {
        d: f64,
        d_minus: f64,
        /// `22/15`, `1 + (2d⁻ + 1)/3`, `1 + 1/(β̃(1−η))`.
        candidates: [f64; 3],
    },
    Infeasible {
        d_minus: f64,
        reason: String,
    },
}

impl DimensionBound {
    pub fn d(&self) -> Option<f64> {
        match self {
            DimensionBound::Feasible { d, .. } => Some(*d),
            DimensionBound::Infeasible { .. } => None,
        }
    }
}

const MARGIN: f64 = 1e-6;

/// Smallest admissible `d < 2` for the exceptional set, or the constraint
/// that rules every such `d` out.
pub fn exceptional_dimension_bound(d_s: f64, d_u: f64, params: &PYParams) -> DimensionBound {
    let eta = params.eta;
    let d_minus = (d_s + d_u - 1.0 + 2.0 * eta).max(0.0);
    if d_minus >= 0.2 {
        return DimensionBound::Infeasible {
            d_minus,
            reason: format!("d_minus = {d_minus:.6} is not below 1/5"),
        };
    }
    let bt = params.beta_tilde() * (1.0 - eta);
    if bt <= 1.0 {
        return DimensionBound::Infeasible {
            d_minus,
            reason: format!("beta_tilde*(1-eta) = {bt:.6} is not above 1"),
        };
    }
    let candidates = [
        22.0 / 15.0,
        1.0 + (2.0 * d_minus + 1.0) / 3.0,
        1.0 + 1.0 / bt,
    ];
    let d = candidates.iter().copied().fold(f64::MIN, f64::max) + MARGIN;
    if d >= 2.0 {
        return DimensionBound::Infeasible {
            d_minus,
            reason: format!("smallest admissible d = {d:.6} is not below 2"),
        };
    }
    DimensionBound::Feasible {
        d,
        d_minus,
        candidates,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSum {
    pub exponent: f64,
    /// Depth `n`, number of critical `Q` at that depth, and the partial sum
    /// over depths `≤ n`.
    pub by_depth: Vec<(usize, usize, f64)>,
    pub last_increment: f64,
    pub total: f64,
}

impl CriticalSum {
    /// `last_increment / total`, zero for an empty sum.
    pub fn tail_ratio(&self) -> f64 {
        if self.total > 0.0 {
            self.last_increment / self.total
        } else {
            0.0
        }
    }
}

/// Partial sums of `|Q|^e` over critical `Q` in the catalog, by depth.
pub fn critical_sum(catalog: &Catalog, family: &ToyFamily, eta: f64, e: f64) -> CriticalSum {
    let t = (&catalog.t_lo, &catalog.t_hi);
    let mut count = vec![0usize; catalog.n_max + 1];
    let mut inc = vec![0.0f64; catalog.n_max + 1];
    for el in &catalog.elements {
        let q = el.widths().1;
        if el.n <= catalog.n_max && is_critical(&el.q, q, t, family, eta) {
            count[el.n] += 1;
            inc[el.n] += q.powf(e);
        }
    }
    let mut total = 0.0;
    let by_depth = (1..=catalog.n_max)
        .map(|n| {
            total += inc[n];
            (n, count[n], total)
        })
        .collect();
    CriticalSum {
        exponent: e,
        by_depth,
        last_increment: inc[catalog.n_max],
        total,
    }
}
