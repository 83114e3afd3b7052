//! Concrete certified instances: classical Cantor sets, affine horseshoes,
//! the renormalization limit and the toy heteroclinic family.

mod horseshoe;
mod sink;
mod toy;

pub use horseshoe::{
    cone_preserved, product_box_dimension, stable_unstable_dimensions, verify_hyperbolic_conefield,
    ConefieldModel, ProductModel, SmaleAffine, StableUnstable,
};
pub use sink::{detect_sink, sink_scan, PlaneMap, SearchBox, Sink};
pub use toy::{ToyFamily, RECT_S, RECT_U};

pub use crate::affine_like::FoldingModel;

use crate::cantor::CantorSystem;
use crate::error::{Error, Result};
use crate::rational::{int, limit_denominator, parse, ratio, Rational};

pub enum StandardModel {
    Cantor(CantorSystem),
    Horseshoe(SmaleAffine),
    Toy(ToyFamily),
}

impl StandardModel {
    pub fn kind(&self) -> &'static str {
        match self {
            StandardModel::Cantor(_) => "cantor",
            StandardModel::Horseshoe(_) => "horseshoe",
            StandardModel::Toy(_) => "toy",
        }
    }
}

pub fn ternary() -> CantorSystem {
    CantorSystem::affine_full_shift("ternary", &[(int(0), ratio(1, 3)), (ratio(2, 3), int(1))])
        .expect("ternary set is valid")
}

/// Removes the open middle interval of relative length `alpha` from `[0, 1]`.
pub fn middle_alpha(alpha: &Rational) -> Result<CantorSystem> {
    if *alpha <= int(0) || *alpha >= int(1) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let side = (int(1) - alpha) / int(2);
    CantorSystem::affine_full_shift(
        format!("middle_{alpha}"),
        &[(int(0), side.clone()), (int(1) - side, int(1))],
    )
}

/// Ratios `1/2` and `1/4`; dimension `log₂` of the golden mean.
pub fn markov_golden() -> CantorSystem {
    CantorSystem::affine_full_shift(
        "markov_golden",
        &[(int(0), ratio(1, 2)), (ratio(3, 4), int(1))],
    )
    .expect("golden set is valid")
}

/// Strip width giving `d_s = d_u = d` for a two-branch horseshoe.
pub fn two_branch_ratio_for_dimension(d: f64) -> Rational {
    limit_denominator(2f64.powf(-1.0 / d), 1_000_000)
}

/// Default expansion of the toy family: `d_s = d_u ≈ 0.55`.
pub fn default_toy_rho() -> Rational {
    ratio(1763, 500)
}

pub fn toy_het(rho: &Rational, b: &Rational) -> Result<ToyFamily> {
    ToyFamily::new(rho.clone(), rho.clone(), Some(b.clone()))
}

/// The named catalog with default parameters.
pub fn standard_models() -> Vec<(String, StandardModel)> {
    vec![
        ("ternary".into(), StandardModel::Cantor(ternary())),
        (
            "middle_alpha".into(),
            StandardModel::Cantor(middle_alpha(&ratio(1, 5)).expect("valid alpha")),
        ),
        (
            "markov_golden".into(),
            StandardModel::Cantor(markov_golden()),
        ),
        (
            "smale_affine".into(),
            StandardModel::Horseshoe(
                SmaleAffine::new(2, two_branch_ratio_for_dimension(0.55)).expect("valid horseshoe"),
            ),
        ),
        (
            "toy_het".into(),
            StandardModel::Toy(
                toy_het(&default_toy_rho(), &ratio(1, 10)).expect("valid toy family"),
            ),
        ),
    ]
}

/// Resolves `name[:arg[:arg]]`, e.g. `middle_alpha:3/5`, `smale_affine:2:1/5`
/// or `toy_het:3.5:0.1`.
pub fn resolve(spec: &str) -> Result<StandardModel> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let arg = |i: usize| args.get(i).map(|s| parse(s)).transpose();
    let need = |max: usize| {
        if args.len() > max {
            Err(Error::InvalidArgument(format!(
                "too many arguments in model {spec:?}"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "ternary" => {
            need(0)?;
            Ok(StandardModel::Cantor(ternary()))
        }
        "middle_alpha" => {
            need(1)?;
            Ok(StandardModel::Cantor(middle_alpha(
                &arg(0)?.unwrap_or_else(|| ratio(1, 5)),
            )?))
        }
        "markov_golden" => {
            need(0)?;
            Ok(StandardModel::Cantor(markov_golden()))
        }
        "smale_affine" => {
            need(2)?;
            let n = match args.first() {
                Some(s) => s
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad branch count {s:?}")))?,
                None => 2,
            };
            let r = arg(1)?.unwrap_or_else(|| two_branch_ratio_for_dimension(0.55));
            Ok(StandardModel::Horseshoe(SmaleAffine::new(n, r)?))
        }
        "toy_het" => {
            need(2)?;
            let rho = arg(0)?.unwrap_or_else(default_toy_rho);
            let b = arg(1)?.unwrap_or_else(|| ratio(1, 10));
            Ok(StandardModel::Toy(toy_het(&rho, &b)?))
        }
        _ => Err(Error::InvalidArgument(format!("unknown model {name:?}"))),
    }
}
