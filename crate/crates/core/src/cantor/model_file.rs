use serde::{Deserialize, Serialize};

use super::{BranchMap, BranchSpec, CantorSystem, Mobius};
use crate::error::{Error, Result};
use crate::rational::{self, serde_rational, serde_rational_vec, Rational};

/// On-disk JSON form of a [`CantorSystem`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(with = "serde_rational_vec")]
    pub hull: Vec<Rational>,
    pub branches: Vec<BranchFile>,
    #[serde(default)]
    pub markov: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchFile {
    pub label: String,
    #[serde(with = "serde_rational_vec")]
    pub domain: Vec<Rational>,
    pub map: MapFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapFile {
    Affine {
        #[serde(with = "serde_rational")]
        slope: Rational,
        #[serde(with = "serde_rational")]
        offset: Rational,
    },
    Analytic {
        name: String,
        #[serde(with = "serde_rational_vec")]
        params: Vec<Rational>,
        deriv_range: (f64, f64),
    },
}

impl ModelFile {
    /// Parses JSON; syntax errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidModel(format!(
                "{} at line {} column {}",
                strip_position(&e),
                e.line(),
                e.column()
            ))
        })
    }

    pub fn build(&self) -> Result<CantorSystem> {
        let mut specs = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            if b.domain.len() != 2 {
                return Err(Error::InvalidModel(format!(
                    "domain of '{}' must have two endpoints",
                    b.label
                )));
            }
            let map = match &b.map {
                MapFile::Affine { slope, offset } => BranchMap::Affine {
                    slope: slope.clone(),
                    offset: offset.clone(),
                },
                MapFile::Analytic {
                    name,
                    params,
                    deriv_range,
                } => {
                    if name != "mobius" {
                        return Err(Error::InvalidModel(format!(
                            "unsupported analytic map '{name}' (only \"mobius\" is accepted)"
                        )));
                    }
                    if params.len() != 4 {
                        return Err(Error::InvalidModel(
                            "mobius map needs params [a, b, c, d]".into(),
                        ));
                    }
                    BranchMap::Mobius {
                        map: Mobius {
                            a: params[0].clone(),
                            b: params[1].clone(),
                            c: params[2].clone(),
                            d: params[3].clone(),
                        },
                        deriv_range: *deriv_range,
                    }
                }
            };
            specs.push(BranchSpec {
                label: b.label.clone(),
                lo: b.domain[0].clone(),
                hi: b.domain[1].clone(),
                map,
            });
        }
        let name = self.name.clone().unwrap_or_else(|| "model".into());
        let sys = CantorSystem::new(name, specs, self.markov.clone())?;
        if self.hull.len() != 2 || (&self.hull[0], &self.hull[1]) != sys.hull() {
            let (lo, hi) = sys.hull();
            return Err(Error::InvalidModel(format!(
                "declared hull does not match the convex hull [{}, {}] of the branch domains",
                rational::fmt(lo),
                rational::fmt(hi)
            )));
        }
        Ok(sys)
    }

    pub fn from_system(sys: &CantorSystem) -> Self {
        let (lo, hi) = sys.hull();
        ModelFile {
            name: Some(sys.name().to_string()),
            hull: vec![lo.clone(), hi.clone()],
            branches: sys
                .branches()
                .map(|b| BranchFile {
                    label: b.label.clone(),
                    domain: vec![b.lo.clone(), b.hi.clone()],
                    map: match &b.map {
                        BranchMap::Affine { slope, offset } => MapFile::Affine {
                            slope: slope.clone(),
                            offset: offset.clone(),
                        },
                        BranchMap::Mobius { map, deriv_range } => MapFile::Analytic {
                            name: "mobius".into(),
                            params: vec![
                                map.a.clone(),
                                map.b.clone(),
                                map.c.clone(),
                                map.d.clone(),
                            ],
                            deriv_range: *deriv_range,
                        },
                    },
                })
                .collect(),
            markov: Some(sys.markov_pairs()),
        }
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}
