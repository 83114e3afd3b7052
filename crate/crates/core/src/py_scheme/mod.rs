//! Desk-scale parameter exclusion for the toy heteroclinic family and the
//! covering estimate for the exceptional set.

mod catalog;
mod chains;
mod covering;
mod exclusion;
mod regularity;

pub use catalog::{build_catalog, build_catalog_capped, fold_free_words, Catalog, CatalogStats};
pub use chains::{enumerate_admissible_chains, AdmissibleChain, ChainReport, EndpointCount};
pub use covering::{
    covering_bound, critical_sum, exceptional_dimension_bound, fitted_lemma24_constant,
    lemma24_check, ChainWidths, CoveringBound, CriticalSum, DimensionBound,
};
pub use exclusion::{
    run_exclusion, ExclusionConfig, ExclusionResult, GenerationSummary, IntervalNode, Status,
};
pub use regularity::{is_bicritical, is_critical, is_prime, strong_regularity_test, Regularity};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{serde_rational, to_f64, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct PYParams {
    #[serde(with = "serde_rational")]
    pub eps0: Rational,
    pub eta: f64,
    pub tau: f64,
    pub beta: f64,
}

impl PYParams {
    /// Validated parameters; `beta` defaults to [`PYParams::default_beta`].
    pub fn new(eps0: Rational, eta: f64, tau: f64, beta: Option<f64>) -> Result<Self> {
        let p = PYParams {
            beta: beta.unwrap_or_else(|| Self::default_beta(eta, tau)),
            eps0,
            eta,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let e = to_f64(&self.eps0);
        if !(0.0 < e && e < self.eta && self.eta <= self.tau && self.tau < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < eps0 < eta <= tau < 1 (eps0 = {e}, eta = {}, tau = {})",
                self.eta, self.tau
            )));
        }
        if self.beta_tilde() <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "beta = {} gives beta_tilde = {} <= 1",
                self.beta,
                self.beta_tilde()
            )));
        }
        Ok(())
    }

    /// `β(1−η)/(1+τ)`.
    pub fn beta_tilde(&self) -> f64 {
        self.beta * (1.0 - self.eta) / (1.0 + self.tau)
    }

    /// Smallest multiple of `0.05` with `β̃ ≥ 1.05`.
    pub fn default_beta(eta: f64, tau: f64) -> f64 {
        (1.05 * (1.0 + tau) / (1.0 - eta) / 0.05).ceil() * 0.05
    }

    /// Nominal generation-`k` length `ε₀^{(1+τ)^k}`.
    pub fn eps_k(&self, k: u32) -> f64 {
        to_f64(&self.eps0).powf((1.0 + self.tau).powi(k as i32))
    }

    /// Number of children of a generation-`k` interval, `⌊ε_k^{−τ}⌋`.
    pub fn children(&self, k: u32) -> usize {
        (self.eps_k(k).powf(-self.tau).floor() as usize).max(1)
    }
}
