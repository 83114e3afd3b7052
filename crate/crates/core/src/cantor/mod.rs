//! Regular Cantor sets generated by expanding Markov maps on the line.
//!
//! Every branch map is a Möbius transformation with rational coefficients
//! (affine maps are the case `c = 0`), so cylinders are computed exactly.

mod cylinders;
mod mobius;
mod model_file;

use num_traits::{One, Signed, Zero};

pub(crate) use cylinders::word_count;
pub use cylinders::{
    gaps, membership, refine, refine_endpoints, Cylinder, Gap, Gaps, Membership, MAX_CYLINDERS,
    MAX_DEPTH,
};
pub use mobius::Mobius;
pub use model_file::{BranchFile, MapFile, ModelFile};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// How a branch map was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchMap {
    Affine {
        slope: Rational,
        offset: Rational,
    },
    /// Möbius map with a user-certified range for `|ψ'|` on the domain.
    Mobius {
        map: Mobius,
        deriv_range: (f64, f64),
    },
}

impl BranchMap {
    pub fn mobius(&self) -> Mobius {
        match self {
            BranchMap::Affine { slope, offset } => Mobius::affine(slope.clone(), offset.clone()),
            BranchMap::Mobius { map, .. } => map.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpec {
    pub label: String,
    pub lo: Rational,
    pub hi: Rational,
    pub map: BranchMap,
}

#[derive(Debug, Clone)]
pub(crate) struct Branch {
    pub spec: BranchSpec,
    pub forward: Mobius,
    /// Inverse branch `h_j = ψ_j^{-1}` on the image.
    pub inverse: Mobius,
}

#[derive(Debug, Clone)]
pub struct CantorSystem {
    name: String,
    branches: Vec<Branch>,
    hull: (Rational, Rational),
    succ: Vec<Vec<usize>>,
    expansion_min: Rational,
    distortion_bound: Rational,
}

impl CantorSystem {
    /// Validates and builds a system. `markov = None` allows every transition.
    pub fn new(
        name: impl Into<String>,
        specs: Vec<BranchSpec>,
        markov: Option<Vec<(String, String)>>,
    ) -> Result<Self> {
        let name = name.into();
        if specs.is_empty() {
            return Err(Error::InvalidModel("no branches".into()));
        }
        for s in &specs {
            if s.lo >= s.hi {
                return Err(Error::InvalidModel(format!(
                    "branch '{}' has empty domain [{}, {}]",
                    s.label,
                    rational::fmt(&s.lo),
                    rational::fmt(&s.hi)
                )));
            }
        }
        let mut order: Vec<usize> = (0..specs.len()).collect();
        order.sort_by(|&i, &j| specs[i].lo.cmp(&specs[j].lo));
        for w in order.windows(2) {
            let (a, b) = (&specs[w[0]], &specs[w[1]]);
            if a.hi >= b.lo {
                return Err(Error::InvalidModel(format!(
                    "branch domains of '{}' [{}, {}] and '{}' [{}, {}] overlap",
                    a.label,
                    rational::fmt(&a.lo),
                    rational::fmt(&a.hi),
                    b.label,
                    rational::fmt(&b.lo),
                    rational::fmt(&b.hi)
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &specs {
            if !seen.insert(s.label.clone()) {
                return Err(Error::InvalidModel(format!(
                    "duplicate branch label '{}'",
                    s.label
                )));
            }
        }

        let index = |label: &str| -> Result<usize> {
            specs.iter().position(|s| s.label == label).ok_or_else(|| {
                Error::InvalidModel(format!("unknown branch label '{label}' in markov relation"))
            })
        };
        let n = specs.len();
        let mut succ = vec![Vec::new(); n];
        match markov {
            None => {
                for s in succ.iter_mut() {
                    *s = (0..n).collect();
                }
            }
            Some(pairs) => {
                for (from, to) in pairs {
                    let (i, j) = (index(&from)?, index(&to)?);
                    if !succ[i].contains(&j) {
                        succ[i].push(j);
                    }
                }
            }
        }
        for (i, s) in succ.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "branch '{}' has no successor",
                    specs[i].label
                )));
            }
            s.sort_by(|&a, &b| specs[a].lo.cmp(&specs[b].lo));
        }

        let hull = (
            specs.iter().map(|s| s.lo.clone()).min().unwrap(),
            specs.iter().map(|s| s.hi.clone()).max().unwrap(),
        );

        let mut branches = Vec::with_capacity(n);
        let mut expansion_min: Option<Rational> = None;
        let mut distortion_bound = Rational::zero();
        for (i, spec) in specs.iter().enumerate() {
            let forward = spec.map.mobius();
            if !forward.regular_on(&spec.lo, &spec.hi) {
                return Err(Error::InvalidModel(format!(
                    "map of branch '{}' has a pole on its domain",
                    spec.label
                )));
            }
            if forward.det().is_zero() {
                return Err(Error::InvalidModel(format!(
                    "map of branch '{}' is constant",
                    spec.label
                )));
            }
            let image = forward.image(&spec.lo, &spec.hi);
            let want = (
                specs[succ[i][0]].lo.clone(),
                succ[i].iter().map(|&j| specs[j].hi.clone()).max().unwrap(),
            );
            if image != want {
                return Err(Error::InvalidModel(format!(
                    "branch '{}' maps onto [{}, {}] but its successors span [{}, {}]",
                    spec.label,
                    rational::fmt(&image.0),
                    rational::fmt(&image.1),
                    rational::fmt(&want.0),
                    rational::fmt(&want.1)
                )));
            }
            let d_lo = forward.deriv(&spec.lo).abs();
            let d_hi = forward.deriv(&spec.hi).abs();
            let (dmin, dmax) = if d_lo <= d_hi {
                (d_lo, d_hi)
            } else {
                (d_hi, d_lo)
            };
            if dmin <= Rational::one() {
                return Err(Error::InvalidModel(format!(
                    "branch '{}' is not expanding: min |ψ'| = {}",
                    spec.label,
                    rational::fmt(&dmin)
                )));
            }
            if let BranchMap::Mobius { deriv_range, .. } = &spec.map {
                let (lo, hi) = *deriv_range;
                if !(rational::from_f64_exact(lo) <= dmin && dmax <= rational::from_f64_exact(hi)) {
                    return Err(Error::InvalidModel(format!(
                        "deriv_range [{lo}, {hi}] of branch '{}' does not enclose |ψ'| range [{}, {}]",
                        spec.label,
                        rational::to_f64(&dmin),
                        rational::to_f64(&dmax)
                    )));
                }
            }
            let dist = forward
                .log_deriv_slope(&spec.lo)
                .abs()
                .max(forward.log_deriv_slope(&spec.hi).abs());
            distortion_bound = distortion_bound.max(dist);
            expansion_min = Some(match expansion_min {
                Some(m) => m.min(dmin),
                None => dmin,
            });
            branches.push(Branch {
                spec: spec.clone(),
                inverse: forward.inverse(),
                forward,
            });
        }

        let sys = CantorSystem {
            name,
            branches,
            hull,
            succ,
            expansion_min: expansion_min.unwrap(),
            distortion_bound,
        };
        if !sys.is_mixing() {
            return Err(Error::NonMixing(format!("system '{}'", sys.name)));
        }
        Ok(sys)
    }

    /// Full-shift system where each branch maps its domain increasingly and
    /// affinely onto the hull of all domains.
    pub fn affine_full_shift(
        name: impl Into<String>,
        domains: &[(Rational, Rational)],
    ) -> Result<Self> {
        Self::affine_with_markov(name, domains, None)
    }

    pub fn affine_with_markov(
        name: impl Into<String>,
        domains: &[(Rational, Rational)],
        markov: Option<Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let label = |i: usize| format!("b{i}");
        let succ: Vec<Vec<usize>> = match &markov {
            None => vec![(0..domains.len()).collect(); domains.len()],
            Some(pairs) => {
                let mut s = vec![Vec::new(); domains.len()];
                for &(a, b) in pairs {
                    s[a].push(b);
                }
                s
            }
        };
        let mut specs = Vec::new();
        for (i, (lo, hi)) in domains.iter().enumerate() {
            if succ[i].is_empty() {
                return Err(Error::InvalidModel(format!("branch b{i} has no successor")));
            }
            let tlo = succ[i].iter().map(|&j| domains[j].0.clone()).min().unwrap();
            let thi = succ[i].iter().map(|&j| domains[j].1.clone()).max().unwrap();
            if lo >= hi {
                return Err(Error::InvalidModel(format!("branch b{i} has empty domain")));
            }
            let slope = (&thi - &tlo) / (hi - lo);
            let offset = &tlo - &slope * lo;
            specs.push(BranchSpec {
                label: label(i),
                lo: lo.clone(),
                hi: hi.clone(),
                map: BranchMap::Affine { slope, offset },
            });
        }
        let pairs = markov.map(|p| p.into_iter().map(|(a, b)| (label(a), label(b))).collect());
        Self::new(name, specs, pairs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn hull(&self) -> (&Rational, &Rational) {
        (&self.hull.0, &self.hull.1)
    }

    pub fn hull_len(&self) -> Rational {
        &self.hull.1 - &self.hull.0
    }

    pub fn branch(&self, i: usize) -> &BranchSpec {
        &self.branches[i].spec
    }

    pub fn branches(&self) -> impl Iterator<Item = &BranchSpec> {
        self.branches.iter().map(|b| &b.spec)
    }

    pub(crate) fn inverse(&self, i: usize) -> &Mobius {
        &self.branches[i].inverse
    }

    pub fn forward(&self, i: usize) -> &Mobius {
        &self.branches[i].forward
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.succ[i].contains(&j)
    }

    pub fn expansion_min(&self) -> &Rational {
        &self.expansion_min
    }

    pub fn distortion_bound(&self) -> &Rational {
        &self.distortion_bound
    }

    pub fn is_affine(&self) -> bool {
        self.branches.iter().all(|b| b.forward.is_affine())
    }

    /// Contraction ratio `1/|ψ_j'|` of each branch of an affine system.
    pub fn ratios(&self) -> Option<Vec<Rational>> {
        if !self.is_affine() {
            return None;
        }
        Some(
            self.branches
                .iter()
                .map(|b| (&b.forward.d / &b.forward.a).abs())
                .collect(),
        )
    }

    pub fn markov_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, s) in self.succ.iter().enumerate() {
            for &j in s {
                out.push((
                    self.branches[i].spec.label.clone(),
                    self.branches[j].spec.label.clone(),
                ));
            }
        }
        out
    }

    fn is_mixing(&self) -> bool {
        let n = self.len();
        let mut adj = vec![vec![false; n]; n];
        for (i, s) in self.succ.iter().enumerate() {
            for &j in s {
                adj[i][j] = true;
            }
        }
        // A non-negative matrix is primitive iff its ((n-1)^2 + 1)-th power is positive.
        let exponent = (n - 1) * (n - 1) + 1;
        let mut pow = adj.clone();
        for _ in 1..exponent {
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if pow[i][k] {
                        for j in 0..n {
                            next[i][j] |= adj[k][j];
                        }
                    }
                }
            }
            pow = next;
        }
        pow.iter().all(|row| row.iter().all(|&x| x))
    }

    /// Image of the system under `x ↦ p·x + q` (`p ≠ 0`), with conjugated maps.
    pub fn affine_image(
        &self,
        p: &Rational,
        q: &Rational,
        name: impl Into<String>,
    ) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidArgument(
                "scale factor must be nonzero".into(),
            ));
        }
        let phi = Mobius::affine(p.clone(), q.clone());
        let phi_inv = phi.inverse();
        let specs = self
            .branches
            .iter()
            .map(|b| {
                let (lo, hi) = phi.image(&b.spec.lo, &b.spec.hi);
                let conj = phi.compose(&b.forward).compose(&phi_inv);
                let map = match &b.spec.map {
                    BranchMap::Affine { .. } => BranchMap::Affine {
                        slope: &conj.a / &conj.d,
                        offset: &conj.b / &conj.d,
                    },
                    BranchMap::Mobius { deriv_range, .. } => BranchMap::Mobius {
                        map: conj,
                        deriv_range: *deriv_range,
                    },
                };
                BranchSpec {
                    label: b.spec.label.clone(),
                    lo,
                    hi,
                    map,
                }
            })
            .collect();
        Self::new(name, specs, Some(self.markov_pairs()))
    }

    pub fn translate(&self, q: &Rational) -> Result<Self> {
        self.affine_image(
            &Rational::one(),
            q,
            format!("{}+{}", self.name, rational::fmt(q)),
        )
    }

    /// Same branches with a smaller transition relation.
    pub fn restrict(&self, markov: Vec<(String, String)>, name: impl Into<String>) -> Result<Self> {
        for (a, b) in &markov {
            let i = self.branches.iter().position(|x| &x.spec.label == a);
            let j = self.branches.iter().position(|x| &x.spec.label == b);
            match (i, j) {
                (Some(i), Some(j)) if self.allowed(i, j) => {}
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "transition {a}->{b} is not in the parent relation"
                    )))
                }
            }
        }
        let specs: Vec<BranchSpec> = self.branches.iter().map(|b| b.spec.clone()).collect();
        // Images must still match, so only removals that keep the image hull are accepted.
        Self::new(name, specs, Some(markov))
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile::from_system(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ModelFile::parse(text)?.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_model_file()).expect("model serializes")
    }
}
