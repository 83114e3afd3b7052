use std::collections::BTreeMap;

use serde::Serialize;

use super::{covering_bound, fitted_lemma24_constant, Catalog, ChainWidths, PYParams};
use crate::affine_like::{AffineLikeElement, FoldingModel, Symbol, Word};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::models::ToyFamily;
use crate::rational::{enclose, to_f64};

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleChain {
    pub words: Vec<Word>,
    pub widths: ChainWidths,
}

/// Number of chains found for one `(P₀, P_k)` pair, next to `|Q_k|^{−η}`.
#[derive(Debug, Clone, Serialize)]
pub struct EndpointCount {
    pub first: Word,
    pub last: Word,
    pub count: usize,
    pub reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub k: usize,
    pub chains: Vec<AdmissibleChain>,
    pub fitted_c: f64,
    pub endpoints: Vec<EndpointCount>,
}

/// Gaps of the strip `P` at height `y_c` left by its catalog children,
/// as certified `(left, right)` pairs with `left < right`.
fn core_gaps(e: &AffineLikeElement, children: &[&AffineLikeElement], y_c: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = e.p.extent_at(y_c);
    let mut covered: Vec<(f64, f64)> = children
        .iter()
        .map(|c| {
            let (a, b) = c.p.extent_at(y_c);
            (a.lo, b.hi)
        })
        .collect();
    covered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut left = lo.hi;
    for (a, b) in covered {
        if a > left {
            gaps.push((left, a.min(hi.lo)));
        }
        left = left.max(b);
    }
    if hi.lo > left {
        gaps.push((left, hi.lo));
    }
    gaps.retain(|(a, b)| a < b);
    gaps
}

/// Range over `t ∈ I` of the vertex abscissa of `G(Q)`, or `None` when `Q`
/// does not lie inside the tongue `L_u` for every `t ∈ I`.
pub(crate) fn fold_image_vertex(
    q: &AffineLikeElement,
    g: &FoldingModel,
    t: Interval,
) -> Option<Interval> {
    if q.q.rect != g.source {
        return None;
    }
    let hull = q.q.hull();
    let y_pu = enclose(&g.y_pu);
    let top = y_pu + Interval::point(t.lo) / enclose(&g.b);
    if hull.lo < y_pu.hi || hull.hi > top.lo {
        return None;
    }
    let eta = hull - y_pu;
    Some(enclose(&g.x_ps) - t + enclose(&g.b) * eta)
}

/// `G(Q)` meets a core gap of the next strip between its vertex and `W^s(p_s)`.
pub(crate) fn links(vertex: Interval, x_ps: f64, gaps: &[(f64, f64)]) -> bool {
    gaps.iter().any(|&(a, b)| a.max(vertex.hi) < b.min(x_ps))
}

/// Chains `(P₀, …, P_k)` of catalog elements in which the fold image of each
/// `Q_j` crosses the parabolic core of `P_{j+1}`.
///
/// A link needs `Q_j` inside the tongue `L_u` for every `t ∈ I`. The core of
/// `P` is approximated by the part of `P` not covered by the `P`
/// strips of its catalog children, so strips without children in the catalog
/// never continue a chain. Chains failing the covering compatibility
/// condition are dropped.
pub fn enumerate_admissible_chains(
    catalog: &Catalog,
    family: &ToyFamily,
    params: &PYParams,
    k: usize,
    budget: usize,
) -> Result<ChainReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("chains need k >= 1".into()));
    }
    let empty = ChainReport {
        k,
        chains: Vec::new(),
        fitted_c: 0.0,
        endpoints: Vec::new(),
    };
    let Some(g) = &family.fold else {
        return Ok(empty);
    };
    let t = Interval::new(enclose(&catalog.t_lo).lo, enclose(&catalog.t_hi).hi);
    let y_c = to_f64(&g.y_c);
    let els = &catalog.elements;

    let mut children: Vec<Vec<&AffineLikeElement>> = vec![Vec::new(); els.len()];
    for c in els {
        let v = &c.word.0;
        for i in 1..v.len() - 1 {
            if matches!(v[i], Symbol::Rect(_)) {
                if let Some(parent) = catalog.position(&Word(v[..=i].to_vec())) {
                    children[parent].push(c);
                }
            }
        }
    }
    let gaps: Vec<Vec<(f64, f64)>> = els
        .iter()
        .zip(&children)
        .map(|(e, ch)| {
            if e.p.rect == g.target && !ch.is_empty() {
                core_gaps(e, ch, y_c)
            } else {
                Vec::new()
            }
        })
        .collect();
    let x_ps = enclose(&g.x_ps).lo;
    let reach: Vec<Option<Interval>> = els.iter().map(|e| fold_image_vertex(e, g, t)).collect();
    let next: Vec<Vec<usize>> = reach
        .iter()
        .map(|r| match r {
            Some(v) => (0..els.len())
                .filter(|&j| links(*v, x_ps, &gaps[j]))
                .collect(),
            None => Vec::new(),
        })
        .collect();

    let mut chains = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..els.len())
        .rev()
        .filter(|&i| reach[i].is_some())
        .map(|i| vec![i])
        .collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("non-empty path");
        if path.len() == k + 1 {
            let widths = ChainWidths::new(
                path.iter().map(|&i| els[i].widths().0).collect(),
                path.iter().map(|&i| els[i].widths().1).collect(),
            )?;
            if covering_bound(&widths, 2.0, params.eta).is_ok() {
                if chains.len() >= budget {
                    return Err(Error::BudgetExceeded {
                        cap: budget,
                        what: format!("admissible chains of length {k}"),
                    });
                }
                chains.push(AdmissibleChain {
                    words: path.iter().map(|&i| els[i].word.clone()).collect(),
                    widths,
                });
            }
            continue;
        }
        for &j in next[last].iter().rev() {
            if path.len() < k && reach[j].is_none() {
                continue;
            }
            let mut p = path.clone();
            p.push(j);
            stack.push(p);
        }
    }

    let widths: Vec<ChainWidths> = chains.iter().map(|c| c.widths.clone()).collect();
    let mut counts: BTreeMap<(Word, Word), (usize, f64)> = BTreeMap::new();
    for c in &chains {
        let key = (c.words[0].clone(), c.words[k].clone());
        let reference = c.widths.q[k].powf(-params.eta);
        counts.entry(key).or_insert((0, reference)).0 += 1;
    }
    Ok(ChainReport {
        k,
        fitted_c: fitted_lemma24_constant(&widths, params),
        endpoints: counts
            .into_iter()
            .map(|((first, last), (count, reference))| EndpointCount {
                first,
                last,
                count,
                reference,
            })
            .collect(),
        chains,
    })
}
