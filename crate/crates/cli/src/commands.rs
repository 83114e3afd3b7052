use std::path::Path;

use cantorfold::affine_like::ConeParams;
use cantorfold::analysis::{
    arithmetic_difference, hausdorff_dimension, marstrand_scan, tangency_parameter_density,
    thickness,
};
use cantorfold::cantor::{gaps, CantorSystem};
use cantorfold::error::{Error, Result};
use cantorfold::models::{
    resolve, sink_scan, stable_unstable_dimensions, standard_models, verify_hyperbolic_conefield,
    ConefieldModel, PlaneMap, ProductModel, SearchBox, StandardModel, ToyFamily,
};
use cantorfold::py_scheme::{
    build_catalog, covering_bound, enumerate_admissible_chains, exceptional_dimension_bound,
    fitted_lemma24_constant, is_bicritical, is_critical, is_prime, lemma24_check, run_exclusion,
    ExclusionConfig, PYParams,
};
use cantorfold::rational::{fmt as rfmt, from_decimal_f64, int, parse, to_f64, Rational};
use serde_json::json;

use crate::report::{num, Output, Table};
use crate::{CantorCmd, Command, HorseshoeCmd, IntervalArgs, ModelCmd, PyCmd, ScanCmd, SchemeArgs};

fn load(spec: &str) -> Result<StandardModel> {
    let path = Path::new(spec);
    if path.is_file() || spec.ends_with(".json") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidModel(format!("cannot read {}: {e}", path.display())))?;
        return Ok(StandardModel::Cantor(CantorSystem::from_json(&text)?));
    }
    resolve(spec)
}

fn cantor(spec: &str) -> Result<CantorSystem> {
    match load(spec)? {
        StandardModel::Cantor(c) => Ok(c),
        other => Err(Error::InvalidArgument(format!(
            "model {spec:?} is a {}, expected a Cantor set",
            other.kind()
        ))),
    }
}

fn pair(models: &[String]) -> Result<(CantorSystem, CantorSystem)> {
    let k = cantor(&models[0])?;
    let kp = match models.get(1) {
        Some(m) => cantor(m)?,
        None => k.clone(),
    };
    Ok((k, kp))
}

fn toy(spec: &str) -> Result<ToyFamily> {
    match load(spec)? {
        StandardModel::Toy(t) => Ok(t),
        other => Err(Error::InvalidArgument(format!(
            "model {spec:?} is a {}, expected a toy fold family",
            other.kind()
        ))),
    }
}

fn scheme(s: &SchemeArgs) -> Result<PYParams> {
    PYParams::new(parse(&s.eps0)?, s.eta, s.tau, s.beta)
}

fn interval(i: &IntervalArgs) -> Result<(Rational, Rational)> {
    Ok((parse(&i.t_lo)?, parse(&i.t_hi)?))
}

/// `points` evenly spaced exact values from `lo` to `hi`.
fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<Rational>> {
    if points < 2 || lo >= hi {
        return Err(Error::InvalidArgument(
            "grid needs lo < hi and at least two points".into(),
        ));
    }
    let (a, b) = (from_decimal_f64(lo)?, from_decimal_f64(hi)?);
    let step = (&b - &a) / int(points as i64 - 1);
    Ok((0..points).map(|i| &a + &step * int(i as i64)).collect())
}

pub fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Cantor(c) => run_cantor(c),
        Command::Scan(c) => run_scan(c),
        Command::Horseshoe(c) => run_horseshoe(c),
        Command::Py(c) => run_py(c),
        Command::Model(c) => run_model(c),
    }
}

fn run_cantor(cmd: &CantorCmd) -> Result<Output> {
    match cmd {
        CantorCmd::Dim { model, tol } => {
            let sys = cantor(&model.model)?;
            let b = hausdorff_dimension(&sys, *tol)?;
            let mut t = Table::new(
                "cantor-dim.csv",
                &["model", "lower", "upper", "depth_used", "tolerance"],
            );
            t.push(vec![
                model.model.clone(),
                num(b.lower),
                num(b.upper),
                b.depth_used.to_string(),
                num(b.tolerance),
            ]);
            let summary = format!(
                "dimension of {} in [{}, {}]",
                model.model,
                num(b.lower),
                num(b.upper)
            );
            Ok(Output::new("cantor-dim", b, summary).with_table(t))
        }
        CantorCmd::Thickness { model, depth } => {
            let sys = cantor(&model.model)?;
            let b = thickness(&sys, *depth)?;
            let mut t = Table::new(
                "cantor-thickness.csv",
                &["model", "lower", "upper", "depth_used"],
            );
            t.push(vec![
                model.model.clone(),
                num(b.lower),
                num(b.upper),
                b.depth_used.to_string(),
            ]);
            let summary = format!(
                "thickness of {} in [{}, {}]",
                model.model,
                num(b.lower),
                num(b.upper)
            );
            Ok(Output::new("cantor-thickness", b, summary).with_table(t))
        }
        CantorCmd::Gaps { model, depth } => {
            let sys = cantor(&model.model)?;
            let g = gaps(&sys, *depth)?;
            let mut t = Table::new("cantor-gaps.csv", &["lo", "hi", "generation", "length"]);
            for gap in &g.bounded {
                t.push(vec![
                    rfmt(&gap.lo),
                    rfmt(&gap.hi),
                    gap.generation.to_string(),
                    num(to_f64(&gap.length())),
                ]);
            }
            let summary = format!("{} bounded gaps at depth {depth}", g.bounded.len());
            Ok(Output::new("cantor-gaps", g, summary).with_table(t))
        }
        CantorCmd::Diff {
            models,
            lambda,
            depth,
        } => {
            let (k, kp) = pair(&models.model)?;
            let lam = parse(lambda)?;
            let cover = arithmetic_difference(&k, &kp, &lam, *depth)?;
            let mut t = Table::new("cantor-diff.csv", &["lo", "hi"]);
            for i in &cover.intervals {
                t.push(vec![num(i.lo), num(i.hi)]);
            }
            let summary = format!(
                "difference cover: {} intervals, measure {}, interval {}",
                cover.intervals.len(),
                num(cover.measure),
                cover.contains_interval
            );
            Ok(Output::new("cantor-diff", cover, summary).with_table(t))
        }
    }
}

fn run_scan(cmd: &ScanCmd) -> Result<Output> {
    match cmd {
        ScanCmd::Marstrand {
            models,
            depth,
            lambda_min,
            lambda_max,
            points,
            floor,
        } => {
            let (k, kp) = pair(&models.model)?;
            let lambdas = grid(*lambda_min, *lambda_max, *points)?;
            let scan = marstrand_scan(&k, &kp, &lambdas, *depth, *floor)?;
            let mut t = Table::new(
                "scan-marstrand.csv",
                &["lambda", "depth", "measure_lower", "measure_upper"],
            );
            for r in &scan.rows {
                t.push(vec![
                    num(r.lambda),
                    r.depth.to_string(),
                    num(r.measure_lower),
                    num(r.measure_upper),
                ]);
            }
            let summary = match scan.fraction_above_floor {
                Some(f) => format!(
                    "fraction of lambda with measure_lower > {}: {}",
                    num(*floor),
                    num(f)
                ),
                None => format!("{} lambda values scanned", scan.rows.len()),
            };
            Ok(Output::new("scan-marstrand", scan, summary).with_table(t))
        }
        ScanCmd::TangencyDensity {
            models,
            c,
            t,
            samples,
        } => {
            let (k, kp) = pair(&models.model)?;
            let rows = t
                .iter()
                .map(|&ti| tangency_parameter_density(&k, &kp, *c, ti, *samples))
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(
                "scan-tangency-density.csv",
                &["t", "c", "samples", "density", "depth_used"],
            );
            for r in &rows {
                table.push(vec![
                    num(r.t),
                    num(r.c),
                    r.samples.to_string(),
                    num(r.density),
                    r.depth_used.to_string(),
                ]);
            }
            let summary = rows
                .iter()
                .map(|r| format!("t={} density={}", num(r.t), num(r.density)))
                .collect::<Vec<_>>()
                .join("; ");
            Ok(Output::new("scan-tangency-density", rows, summary).with_table(table))
        }
    }
}

fn run_horseshoe(cmd: &HorseshoeCmd) -> Result<Output> {
    match cmd {
        HorseshoeCmd::Dims { model, tol, depth } => {
            let m = load(&model.model)?;
            let r = match &m {
                StandardModel::Horseshoe(s) => {
                    stable_unstable_dimensions(ProductModel::Smale(s), *tol, *depth)?
                }
                StandardModel::Toy(f) => {
                    stable_unstable_dimensions(ProductModel::Toy(f), *tol, *depth)?
                }
                StandardModel::Cantor(_) => {
                    return Err(Error::InvalidArgument(format!(
                        "model {:?} is not a horseshoe",
                        model.model
                    )))
                }
            };
            let mut t = Table::new(
                "horseshoe-dims.csv",
                &[
                    "model",
                    "d_s_lower",
                    "d_s_upper",
                    "d_u_lower",
                    "d_u_upper",
                    "box_dimension",
                ],
            );
            t.push(vec![
                model.model.clone(),
                num(r.d_s.lower),
                num(r.d_s.upper),
                num(r.d_u.lower),
                num(r.d_u.upper),
                num(r.box_dimension),
            ]);
            let summary = format!(
                "d_s in [{}, {}], d_u in [{}, {}], box dimension {}",
                num(r.d_s.lower),
                num(r.d_s.upper),
                num(r.d_u.lower),
                num(r.d_u.upper),
                num(r.box_dimension)
            );
            Ok(Output::new("horseshoe-dims", r, summary).with_table(t))
        }
        HorseshoeCmd::Conefield {
            model,
            grid,
            lambda,
            with_fold,
            t,
        } => {
            let m = load(&model.model)?;
            let params = ConeParams::new(*lambda, 1.5, 1.5, 1.0)?;
            let ok = match &m {
                StandardModel::Horseshoe(s) => {
                    verify_hyperbolic_conefield(ConefieldModel::Smale(s), *grid, &params)?
                }
                StandardModel::Toy(f) => verify_hyperbolic_conefield(
                    ConefieldModel::Toy {
                        family: f,
                        with_fold: *with_fold,
                        t: *t,
                    },
                    *grid,
                    &params,
                )?,
                StandardModel::Cantor(_) => {
                    return Err(Error::InvalidArgument(format!(
                        "model {:?} is not a horseshoe",
                        model.model
                    )))
                }
            };
            let mut table = Table::new(
                "horseshoe-conefield.csv",
                &["model", "grid", "lambda", "with_fold", "holds"],
            );
            table.push(vec![
                model.model.clone(),
                grid.to_string(),
                num(*lambda),
                with_fold.to_string(),
                ok.to_string(),
            ]);
            let summary = format!("cone field {}", if ok { "holds" } else { "fails" });
            Ok(Output::new(
                "horseshoe-conefield",
                json!({ "holds": ok, "cone": params }),
                summary,
            )
            .with_table(table))
        }
        HorseshoeCmd::SinkScan {
            model,
            mu_min,
            mu_max,
            points,
            max_period,
            iters,
            seeds,
            radius,
        } => {
            let map = if model == "limit" {
                PlaneMap::Limit
            } else {
                let f = toy(model)?;
                let b = f.fold.as_ref().ok_or_else(|| {
                    Error::InvalidArgument(format!("model {model:?} has no fold"))
                })?;
                PlaneMap::Fold { b: to_f64(&b.b) }
            };
            let mus: Vec<f64> = grid(*mu_min, *mu_max, *points)?
                .iter()
                .map(to_f64)
                .collect();
            let search = SearchBox::around(0.0, 0.0, *radius);
            let rows = sink_scan(&map, &mus, &search, *max_period, *iters, *seeds);
            let mut t = Table::new(
                "horseshoe-sink-scan.csv",
                &["mu", "period", "x", "y", "multiplier_bound"],
            );
            for (mu, s) in &rows {
                match s {
                    Some(s) => t.push(vec![
                        num(*mu),
                        s.period.to_string(),
                        num(s.orbit[0].0),
                        num(s.orbit[0].1),
                        num(s.multiplier_bound),
                    ]),
                    None => t.push(vec![
                        num(*mu),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]),
                }
            }
            let found = rows.iter().filter(|r| r.1.is_some()).count();
            let summary = format!("sinks at {found} of {} parameters", rows.len());
            let result = json!({
                "map": map,
                "search": search,
                "rows": rows.iter().map(|(mu, s)| json!({ "mu": mu, "sink": s })).collect::<Vec<_>>(),
            });
            Ok(Output::new("horseshoe-sink-scan", result, summary).with_table(t))
        }
    }
}

fn run_py(cmd: &PyCmd) -> Result<Output> {
    match cmd {
        PyCmd::Catalog {
            model,
            interval: iv,
            scheme: s,
            depth,
            w_min,
            cap,
        } => {
            let fam = toy(model)?;
            let params = scheme(s)?;
            let (lo, hi) = interval(iv)?;
            let cat = build_catalog(&fam, (&lo, &hi), &params, *depth, *w_min, *cap)?;
            let t = (&lo, &hi);
            let mut table = Table::new(
                "catalog.csv",
                &[
                    "word",
                    "n",
                    "folds",
                    "p_width",
                    "q_width",
                    "p_critical",
                    "q_critical",
                    "bicritical",
                    "prime",
                ],
            );
            for e in &cat.elements {
                let (p, q) = e.widths();
                let pc = is_critical(&e.p, p, t, &fam, params.eta);
                let qc = is_critical(&e.q, q, t, &fam, params.eta);
                table.push(vec![
                    e.word.to_string(),
                    e.n.to_string(),
                    e.folds().to_string(),
                    num(p),
                    num(q),
                    pc.to_string(),
                    qc.to_string(),
                    is_bicritical(e, t, &fam, params.eta).to_string(),
                    is_prime(e, &cat).to_string(),
                ]);
            }
            let summary = format!(
                "{} elements ({} parabolic) up to n = {depth}",
                cat.stats.elements, cat.stats.parabolic
            );
            let result = json!({
                "interval": [rfmt(&lo), rfmt(&hi)],
                "n_max": depth,
                "w_min": w_min,
                "stats": cat.stats,
                "elements": cat.elements,
            });
            Ok(Output::new("catalog", result, summary).with_table(table))
        }
        PyCmd::Exclude {
            model,
            scheme: s,
            generations,
            depth,
            cap,
        } => {
            let fam = toy(model)?;
            let params = scheme(s)?;
            let config = ExclusionConfig {
                generations: *generations,
                n_max: *depth,
                cap: *cap,
            };
            let r = run_exclusion(&fam, &params, &config)?;
            let mut table = Table::new(
                "exclusion.csv",
                &[
                    "node",
                    "generation",
                    "parent",
                    "lo",
                    "hi",
                    "status",
                    "witness",
                    "catalog_elements",
                ],
            );
            let mut tree = Vec::with_capacity(r.nodes.len());
            for (i, n) in r.nodes.iter().enumerate() {
                let status = format!("{:?}", n.status);
                table.push(vec![
                    i.to_string(),
                    n.generation.to_string(),
                    n.parent.map(|p| p.to_string()).unwrap_or_default(),
                    rfmt(&n.lo),
                    rfmt(&n.hi),
                    status.clone(),
                    n.witness
                        .as_ref()
                        .map(|w| w.word.to_string())
                        .unwrap_or_default(),
                    n.catalog_stats.elements.to_string(),
                ]);
                let mut node = json!({
                    "generation": n.generation,
                    "parent": n.parent,
                    "bounds": [rfmt(&n.lo), rfmt(&n.hi)],
                    "status": status,
                    "catalog_stats": n.catalog_stats,
                });
                if let Some(w) = &n.witness {
                    node["witness"] = serde_json::to_value(w).expect("witness serializes");
                }
                tree.push(node);
            }
            let summary = format!(
                "surviving fraction {} after {generations} generations",
                num(r.surviving_fraction())
            );
            let result = json!({
                "params": r.params,
                "config": r.config,
                "surviving_measure": rfmt(&r.surviving_measure),
                "excluded_measure": rfmt(&r.excluded_measure),
                "surviving_fraction": r.surviving_fraction(),
                "generations": r.generations,
                "nodes": tree,
            });
            Ok(Output::new("exclusion-report", result, summary).with_table(table))
        }
        PyCmd::Chains {
            model,
            interval: iv,
            scheme: s,
            depth,
            k,
            d,
            budget,
        } => {
            let fam = toy(model)?;
            let params = scheme(s)?;
            let (lo, hi) = interval(iv)?;
            let cat = build_catalog(&fam, (&lo, &hi), &params, *depth, 0.0, 1_000_000)?;
            let report = enumerate_admissible_chains(&cat, &fam, &params, *k, *budget)?;
            let mut table = Table::new(
                "chains.csv",
                &[
                    "chain",
                    "words",
                    "p_widths",
                    "q_widths",
                    "lemma24_c",
                    "lemma24_holds",
                    "covering_bound",
                    "eps0_scale",
                ],
            );
            let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";");
            for (i, c) in report.chains.iter().enumerate() {
                let own_c = fitted_lemma24_constant(std::slice::from_ref(&c.widths), &params);
                let cb = covering_bound(&c.widths, *d, params.eta)?;
                table.push(vec![
                    i.to_string(),
                    c.words
                        .iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>()
                        .join(" | "),
                    join(&c.widths.p),
                    join(&c.widths.q),
                    num(own_c),
                    lemma24_check(&c.widths, &params, report.fitted_c).to_string(),
                    num(cb.bound),
                    num(cb.eps0_scale),
                ]);
            }
            let summary = format!(
                "{} chains of length {k}, fitted link constant {}",
                report.chains.len(),
                num(report.fitted_c)
            );
            Ok(Output::new("chains", report, summary).with_table(table))
        }
        PyCmd::MpyBound { ds, du, scheme: s } => {
            let params = scheme(s)?;
            let b = exceptional_dimension_bound(*ds, *du, &params);
            let summary = match b.d() {
                Some(d) => format!("exceptional set dimension bound d = {}", num(d)),
                None => "infeasible".to_string(),
            };
            let result = json!({ "beta_tilde": params.beta_tilde(), "bound": b });
            Ok(Output::new("mpy-bound", result, summary))
        }
    }
}

fn describe(m: &StandardModel) -> String {
    match m {
        StandardModel::Cantor(c) => {
            let (lo, hi) = c.hull();
            format!("{} branches on [{}, {}]", c.len(), rfmt(lo), rfmt(hi))
        }
        StandardModel::Horseshoe(s) => format!("{} strips, ratio {}", s.branches, rfmt(&s.r)),
        StandardModel::Toy(f) => match &f.fold {
            Some(g) => format!(
                "rho_u {}, rho_s {}, b {}",
                rfmt(&f.rho_u),
                rfmt(&f.rho_s),
                rfmt(&g.b)
            ),
            None => format!(
                "rho_u {}, rho_s {}, no fold",
                rfmt(&f.rho_u),
                rfmt(&f.rho_s)
            ),
        },
    }
}

fn run_model(cmd: &ModelCmd) -> Result<Output> {
    match cmd {
        ModelCmd::List => {
            let models = standard_models();
            let mut t = Table::new("models.csv", &["name", "kind", "description"]);
            let mut list = Vec::new();
            for (name, m) in &models {
                t.push(vec![name.clone(), m.kind().to_string(), describe(m)]);
                list.push(json!({ "name": name, "kind": m.kind(), "description": describe(m) }));
            }
            let summary = format!("{} built-in models", models.len());
            Ok(Output::new("models", list, summary).with_table(t))
        }
        ModelCmd::Validate { model } => {
            let m = load(&model.model)?;
            let mut result = json!({ "model": model.model, "kind": m.kind(), "description": describe(&m), "valid": true });
            if let StandardModel::Cantor(c) = &m {
                result["system"] = serde_json::from_str(&c.to_json()).expect("model JSON parses");
            }
            let summary = format!("{}: valid {} ({})", model.model, m.kind(), describe(&m));
            Ok(Output::new("model-validate", result, summary))
        }
    }
}
