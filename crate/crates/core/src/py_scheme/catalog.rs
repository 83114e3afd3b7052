use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::PYParams;
use crate::affine_like::{
    lower_f64, p_crosses, parabolic_compose, q_crosses, simple_compose, transversality_ok,
    AffineLikeElement, CompositeRep, FoldingModel, Parabolic, Word,
};
use crate::error::{Error, Result};
use crate::models::ToyFamily;
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CatalogStats {
    pub elements: usize,
    pub fold_free: usize,
    pub parabolic: usize,
    pub pairs_tried: usize,
    pub not_possible: usize,
    pub not_transversal: usize,
    pub rejected_flags: usize,
    /// Compositions whose strips could not be certified non-empty.
    pub uncertified: usize,
    pub closure_added: usize,
}

/// A finite truncation of `R(I)`: elements with `n ≤ n_max` and
/// `max(|P|, |Q|) ≥ w_min`, at most one fold, ordered by word.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub t_lo: Rational,
    pub t_hi: Rational,
    pub n_max: usize,
    pub w_min: f64,
    pub elements: Vec<AffineLikeElement>,
    pub stats: CatalogStats,
    index: HashMap<Word, usize>,
}

impl Catalog {
    fn from_map(
        t: (&Rational, &Rational),
        n_max: usize,
        w_min: f64,
        map: BTreeMap<Word, AffineLikeElement>,
        mut stats: CatalogStats,
    ) -> Self {
        let elements: Vec<AffineLikeElement> = map.into_values().collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.word.clone(), i))
            .collect();
        stats.elements = elements.len();
        stats.fold_free = elements.iter().filter(|e| e.folds() == 0).count();
        stats.parabolic = stats.elements - stats.fold_free;
        Catalog {
            t_lo: t.0.clone(),
            t_hi: t.1.clone(),
            n_max,
            w_min,
            elements,
            stats,
            index,
        }
    }

    /// Catalog over `t` holding exactly the given elements; duplicates by word
    /// keep the first.
    pub fn from_elements(
        t: (&Rational, &Rational),
        n_max: usize,
        w_min: f64,
        elements: Vec<AffineLikeElement>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for e in elements {
            map.entry(e.word.clone()).or_insert(e);
        }
        Catalog::from_map(t, n_max, w_min, map, CatalogStats::default())
    }

    pub fn get(&self, word: &Word) -> Option<&AffineLikeElement> {
        self.index.get(word).map(|&i| &self.elements[i])
    }

    pub(crate) fn position(&self, word: &Word) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.index.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn interval_length(&self) -> Rational {
        &self.t_hi - &self.t_lo
    }
}

fn max_width(e: &AffineLikeElement) -> f64 {
    let (p, q) = e.widths();
    p.max(q)
}

/// Every fold-free word with `1 ≤ n ≤ n_max`, ordered by length then word.
pub fn fold_free_words(
    family: &ToyFamily,
    n_max: usize,
    cap: usize,
) -> Result<Vec<AffineLikeElement>> {
    let base = family.base_transitions()?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let mut all = base.clone();
    let mut frontier = base.clone();
    for _ in 2..=n_max {
        if all.len() + frontier.len() * base.len() > cap {
            return Err(Error::BudgetExceeded {
                cap,
                what: format!("fold-free words up to length {n_max}"),
            });
        }
        frontier = frontier
            .par_iter()
            .flat_map_iter(|e| {
                base.iter()
                    .filter(move |b| b.p.rect == e.q.rect)
                    .map(move |b| simple_compose(e, b, &family.cone))
            })
            .collect::<Result<Vec<_>>>()?;
        all.extend(frontier.iter().cloned());
    }
    Ok(all)
}

/// Builds the catalog, or returns the partial catalog and `false` when the
/// element cap is hit.
pub fn build_catalog_capped(
    family: &ToyFamily,
    t: (&Rational, &Rational),
    params: &PYParams,
    n_max: usize,
    w_min: f64,
    cap: usize,
    fold_free: Option<&[AffineLikeElement]>,
) -> Result<(Catalog, bool)> {
    family.check_parameter_interval(t.0, t.1)?;
    let owned;
    let words: &[AffineLikeElement] = match fold_free {
        Some(w) => w,
        None => {
            owned = fold_free_words(family, n_max, cap)?;
            &owned
        }
    };
    let mut stats = CatalogStats::default();
    let mut map: BTreeMap<Word, AffineLikeElement> = BTreeMap::new();
    for e in words
        .iter()
        .filter(|e| e.n <= n_max && max_width(e) >= w_min)
    {
        map.insert(e.word.clone(), e.clone());
    }
    let full = |map: &BTreeMap<Word, AffineLikeElement>| map.len() >= cap;
    if full(&map) {
        return Ok((Catalog::from_map(t, n_max, w_min, map, stats), false));
    }
    if let Some(g) = &family.fold {
        let added = parabolic_members(family, g, t, params, n_max, w_min, words, &mut stats)?;
        for e in added {
            map.entry(e.word.clone()).or_insert(e);
        }
        if full(&map) {
            return Ok((Catalog::from_map(t, n_max, w_min, map, stats), false));
        }
        let complete = close_under_simple(family, n_max, w_min, cap, &mut map, &mut stats)?;
        return Ok((Catalog::from_map(t, n_max, w_min, map, stats), complete));
    }
    Ok((Catalog::from_map(t, n_max, w_min, map, stats), true))
}

pub fn build_catalog(
    family: &ToyFamily,
    t: (&Rational, &Rational),
    params: &PYParams,
    n_max: usize,
    w_min: f64,
    cap: usize,
) -> Result<Catalog> {
    let (c, complete) = build_catalog_capped(family, t, params, n_max, w_min, cap, None)?;
    if !complete {
        return Err(Error::BudgetExceeded {
            cap,
            what: format!("catalog elements (partial catalog holds {})", c.len()),
        });
    }
    Ok(c)
}

#[allow(clippy::too_many_arguments)]
fn parabolic_members(
    family: &ToyFamily,
    g: &FoldingModel,
    t: (&Rational, &Rational),
    params: &PYParams,
    n_max: usize,
    w_min: f64,
    words: &[AffineLikeElement],
    stats: &mut CatalogStats,
) -> Result<Vec<AffineLikeElement>> {
    let i_len = to_f64(&(t.1 - t.0));
    let affine = |e: &AffineLikeElement| e.rep.as_affine().cloned();
    let f0s: Vec<&AffineLikeElement> = words
        .iter()
        .filter(|e| e.q.rect == g.source && e.n + g.n0 < n_max)
        .filter(|e| affine(e).is_some_and(|a| q_crosses(&a, g, t.0)))
        .collect();
    let f1s: Vec<&AffineLikeElement> = words
        .iter()
        .filter(|e| e.p.rect == g.target && e.n + g.n0 < n_max)
        .filter(|e| affine(e).is_some_and(|a| p_crosses(&a, g, t.0)))
        .collect();
    type Tally = (usize, usize, usize, usize, usize, Vec<AffineLikeElement>);
    let results: Vec<Result<Tally>> = f0s
        .par_iter()
        .map(|f0| {
            let mut tally: Tally = (0, 0, 0, 0, 0, Vec::new());
            let pre = affine(f0).expect("fold-free");
            for f1 in f1s.iter().filter(|f1| f0.n + g.n0 + f1.n <= n_max) {
                tally.0 += 1;
                let post = affine(f1).expect("fold-free");
                let delta =
                    CompositeRep::new(pre.clone(), post, g.clone(), 1, (t.0.clone(), t.1.clone()))
                        .delta();
                if delta <= Rational::from_integer(0.into()) {
                    tally.1 += 1;
                    continue;
                }
                if !transversality_ok(
                    lower_f64(&delta),
                    f0.widths().1,
                    f1.widths().0,
                    i_len,
                    params.eta,
                ) {
                    tally.2 += 1;
                    continue;
                }
                match parabolic_compose(f0, g, f1, &family.cone, t) {
                    Ok(Parabolic::Pair { minus, plus, .. }) => {
                        for e in [*minus, *plus] {
                            if !(e.flags.cone && e.flags.distortion) {
                                tally.3 += 1;
                            } else if max_width(&e) >= w_min {
                                tally.5.push(e);
                            }
                        }
                    }
                    Ok(Parabolic::NotPossible { .. }) => tally.1 += 1,
                    Err(Error::EmptyOverlap) => tally.4 += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(tally)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        let (tried, np, nt, rej, unc, v) = r?;
        stats.pairs_tried += tried;
        stats.not_possible += np;
        stats.not_transversal += nt;
        stats.rejected_flags += rej;
        stats.uncertified += unc;
        out.extend(v);
    }
    Ok(out)
}

/// Adds simple compositions of single-fold members with base transitions on
/// either side until nothing new fits the caps. Returns `false` on overflow.
fn close_under_simple(
    family: &ToyFamily,
    n_max: usize,
    w_min: f64,
    cap: usize,
    map: &mut BTreeMap<Word, AffineLikeElement>,
    stats: &mut CatalogStats,
) -> Result<bool> {
    let base = family.base_transitions()?;
    let mut work: Vec<AffineLikeElement> =
        map.values().filter(|e| e.folds() == 1).cloned().collect();
    while !work.is_empty() {
        let found: Vec<Result<AffineLikeElement>> = work
            .par_iter()
            .filter(|c| c.n < n_max)
            .flat_map_iter(|c| {
                base.iter().flat_map(move |b| {
                    let after = (b.p.rect == c.q.rect).then(|| simple_compose(c, b, &family.cone));
                    let before = (b.q.rect == c.p.rect).then(|| simple_compose(b, c, &family.cone));
                    after.into_iter().chain(before)
                })
            })
            .collect();
        work.clear();
        for r in found {
            let e = match r {
                Ok(e) => e,
                Err(Error::EmptyOverlap) => {
                    stats.uncertified += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if e.n <= n_max && max_width(&e) >= w_min && !map.contains_key(&e.word) {
                stats.closure_added += 1;
                map.insert(e.word.clone(), e.clone());
                work.push(e);
                if map.len() >= cap {
                    return Ok(false);
                }
            }
        }
        work.sort_by(|a, b| a.word.cmp(&b.word));
    }
    Ok(true)
}
