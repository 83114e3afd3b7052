use rayon::prelude::*;
use serde::Serialize;

use super::{
    build_catalog_capped, fold_free_words, strong_regularity_test, CatalogStats, PYParams,
    Regularity,
};
use crate::affine_like::AffineLikeElement;
use crate::error::{Error, Result};
use crate::models::ToyFamily;
use crate::rational::{int, serde_rational, to_f64, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct ExclusionConfig {
    pub generations: u32,
    /// Catalog depth bound.
    pub n_max: usize,
    /// Element cap per catalog.
    pub cap: usize,
}

impl Default for ExclusionConfig {
    fn default() -> Self {
        ExclusionConfig {
            generations: 2,
            n_max: 8,
            cap: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Good,
    Excluded,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalNode {
    pub generation: u32,
    pub parent: Option<usize>,
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<AffineLikeElement>,
    pub catalog_stats: CatalogStats,
}

impl IntervalNode {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationSummary {
    pub generation: u32,
    pub tested: usize,
    pub good: usize,
    pub excluded: usize,
    /// Nominal length `ε_k`.
    pub nominal_length: f64,
    #[serde(with = "serde_rational")]
    pub surviving: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExclusionResult {
    pub params: PYParams,
    pub config: ExclusionConfig,
    pub nodes: Vec<IntervalNode>,
    pub generations: Vec<GenerationSummary>,
    #[serde(with = "serde_rational")]
    pub surviving_measure: Rational,
    #[serde(with = "serde_rational")]
    pub excluded_measure: Rational,
}

impl ExclusionResult {
    pub fn surviving_fraction(&self) -> f64 {
        to_f64(&(&self.surviving_measure / &self.params.eps0))
    }
}

/// Width floor `|I|^β / 2` for the catalog of `I`.
fn width_floor(len: &Rational, beta: f64) -> f64 {
    0.5 * to_f64(len).powf(beta)
}

fn test_interval(
    family: &ToyFamily,
    params: &PYParams,
    config: &ExclusionConfig,
    words: &[AffineLikeElement],
    lo: &Rational,
    hi: &Rational,
) -> Result<(Status, Option<AffineLikeElement>, CatalogStats)> {
    let w_min = width_floor(&(hi - lo), params.beta);
    let (catalog, complete) = build_catalog_capped(
        family,
        (lo, hi),
        params,
        config.n_max,
        w_min,
        config.cap,
        Some(words),
    )?;
    if !complete {
        return Err(Error::BudgetExceeded {
            cap: config.cap,
            what: format!("catalog elements on [{lo}, {hi}]"),
        });
    }
    Ok(
        match strong_regularity_test(&catalog, family, params.eta, params.beta) {
            Regularity::Good => (Status::Good, None, catalog.stats),
            Regularity::Bad { witness } => (Status::Excluded, Some(*witness), catalog.stats),
        },
    )
}

/// Breadth-first exclusion over `I₀ = [ε₀, 2ε₀]`.
///
/// Each good interval of generation `k` is cut into `⌊ε_k^{−τ}⌋` equal
/// children, so children partition their parent exactly. Intervals of one
/// generation are tested in parallel and merged in interval order.
pub fn run_exclusion(
    family: &ToyFamily,
    params: &PYParams,
    config: &ExclusionConfig,
) -> Result<ExclusionResult> {
    params.validate()?;
    let words = fold_free_words(family, config.n_max, config.cap)?;
    let eps0 = params.eps0.clone();
    let root_hi = &eps0 * int(2);
    let (status, witness, stats) = test_interval(family, params, config, &words, &eps0, &root_hi)?;
    let mut nodes = vec![IntervalNode {
        generation: 0,
        parent: None,
        lo: eps0.clone(),
        hi: root_hi,
        status,
        witness,
        catalog_stats: stats,
    }];
    let summarize = |nodes: &[IntervalNode], g: u32| {
        let level: Vec<&IntervalNode> = nodes.iter().filter(|n| n.generation == g).collect();
        let good = level.iter().filter(|n| n.status == Status::Good).count();
        GenerationSummary {
            generation: g,
            tested: level.len(),
            good,
            excluded: level.len() - good,
            nominal_length: params.eps_k(g),
            surviving: level
                .iter()
                .filter(|n| n.status == Status::Good)
                .fold(Rational::from_integer(0.into()), |acc, n| acc + n.length()),
        }
    };
    let mut generations = vec![summarize(&nodes, 0)];
    let mut frontier: Vec<usize> = if status == Status::Good {
        vec![0]
    } else {
        Vec::new()
    };

    for g in 1..=config.generations {
        let m = params.children(g - 1);
        let jobs: Vec<(usize, Rational, Rational)> = frontier
            .iter()
            .flat_map(|&parent| {
                let (lo, hi) = (&nodes[parent].lo, &nodes[parent].hi);
                let step = (hi - lo) / int(m as i64);
                (0..m).map(move |i| {
                    let a = lo + &step * int(i as i64);
                    let b = if i + 1 == m { hi.clone() } else { &a + &step };
                    (parent, a, b)
                })
            })
            .collect();
        let tested: Vec<Result<IntervalNode>> = jobs
            .into_par_iter()
            .map(|(parent, lo, hi)| {
                let (status, witness, catalog_stats) =
                    test_interval(family, params, config, &words, &lo, &hi)?;
                Ok(IntervalNode {
                    generation: g,
                    parent: Some(parent),
                    lo,
                    hi,
                    status,
                    witness,
                    catalog_stats,
                })
            })
            .collect();
        let start = nodes.len();
        for n in tested {
            nodes.push(n?);
        }
        frontier = (start..nodes.len())
            .filter(|&i| nodes[i].status == Status::Good)
            .collect();
        generations.push(summarize(&nodes, g));
    }

    let excluded_measure = nodes
        .iter()
        .filter(|n| n.status == Status::Excluded)
        .fold(Rational::from_integer(0.into()), |acc, n| acc + n.length());
    let surviving_measure = &eps0 - &excluded_measure;
    Ok(ExclusionResult {
        params: params.clone(),
        config: config.clone(),
        nodes,
        generations,
        surviving_measure,
        excluded_measure,
    })
}
