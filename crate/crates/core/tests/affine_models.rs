use cantorfold::affine_like::{
    parabolic_compose, py_condition, simple_compose, transversality_ok, verify_cone,
    verify_distortion, AffineLikeElement, AffineRep, ConeParams, FoldingModel, ImplicitRep,
    Parabolic, Word,
};
use cantorfold::models::{
    default_toy_rho, detect_sink, sink_scan, stable_unstable_dimensions, toy_het,
    two_branch_ratio_for_dimension, verify_hyperbolic_conefield, ConefieldModel, PlaneMap,
    ProductModel, SearchBox, SmaleAffine, ToyFamily,
};
use cantorfold::py_scheme::fold_free_words;
use cantorfold::rational::{from_f64_exact, ratio, to_f64};
use cantorfold::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> ConeParams {
    ConeParams::new(2.0, 1.5, 1.5, 1.0).unwrap()
}

fn diag(word: Word, a1: Rational, a0: Rational, b2: Rational, b0: Rational) -> AffineLikeElement {
    let rep = ImplicitRep::Affine(AffineRep::diagonal(a1, a0, b2, b0));
    AffineLikeElement::new(word, 1, rep, &params()).unwrap()
}

/// Random diagonal element `0 → 0` with widths at most 2/5 and strips inside the unit square.
fn random_element(rng: &mut ChaCha8Rng) -> (AffineLikeElement, Rational, Rational) {
    let den = 1000;
    let a1 = ratio(rng.gen_range(1..=400), den);
    let b2 = ratio(rng.gen_range(1..=400), den);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let a0 = ratio(rng.gen_range(0..=600), den);
    let b0 = ratio(rng.gen_range(0..=600), den);
    let (a1s, a0s) = if sign > 0 {
        (a1.clone(), a0)
    } else {
        (-a1.clone(), a0 + &a1)
    };
    (
        diag(Word::transition(0, 0), a1s, a0s, b2.clone(), b0),
        a1,
        b2,
    )
}

fn fold() -> FoldingModel {
    FoldingModel {
        source: 0,
        target: 1,
        b: ratio(1, 10),
        x_c: ratio(1, 2),
        y_pu: ratio(1, 5),
        x_ps: ratio(3, 4),
        y_c: ratio(1, 2),
        n0: 1,
    }
}

#[test]
fn random_affine_pairs_multiply_widths_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (f, pf, qf) = random_element(&mut rng);
        let (g, pg, qg) = random_element(&mut rng);
        let c = simple_compose(&f, &g, &params()).unwrap();
        let (p, q) = c.exact_widths().unwrap();
        assert_eq!(p, &pf * &pg);
        assert_eq!(q, &qf * &qg);
        assert_eq!(c.n, 2);
    }
}

#[test]
fn widths_of_fifth_maps() {
    let e = diag(
        Word::transition(0, 0),
        ratio(1, 5),
        ratio(0, 1),
        ratio(1, 5),
        ratio(0, 1),
    );
    assert!((e.widths().0 - 0.2).abs() < 1e-15 && (e.widths().1 - 0.2).abs() < 1e-15);
    let c = simple_compose(&e, &e, &params()).unwrap();
    assert_eq!(c.exact_widths().unwrap(), (ratio(1, 25), ratio(1, 25)));
    assert!((c.widths().0 - 0.04).abs() < 1e-15);
    assert!(verify_cone(&e.rep, &params()).unwrap());
    assert!(verify_distortion(&e.rep, 1e-9).unwrap());
    let id = ImplicitRep::Affine(AffineRep::diagonal(
        ratio(1, 1),
        ratio(0, 1),
        ratio(1, 5),
        ratio(0, 1),
    ));
    assert!(!verify_cone(&id, &params()).unwrap());
}

#[test]
fn random_parabolic_triples_follow_the_width_law() {
    let g = fold();
    let (t_lo, t_hi) = (ratio(1, 100), ratio(1, 100));
    let (k1, k2) = params().kappa_parabolic();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    let mut refused = 0;
    while pairs < 100 {
        // Transversal data: δ ≥ max(|Q0|, |P1|)^{0.9}, or a tip that reaches P1.
        let gap = ratio(rng.gen_range(-20..=30), 10_000) + ratio(1, 100_000);
        let cap = if gap > ratio(0, 1) {
            to_f64(&gap)
        } else {
            1e-3
        }
        .powf(1.0 / 0.9)
            * 0.999;
        let width = |rng: &mut ChaCha8Rng| {
            ratio(
                ((cap * 1e6 * rng.gen_range(0.05..1.0)) as i64).max(1),
                1_000_000,
            )
        };
        let q0 = width(&mut rng);
        let p1 = width(&mut rng);
        // Q0 = [y0, y0 + q0] inside L_u = [1/5, 3/10], placing the tip in [x_ps − 3/400, x_ps − 1/200].
        let y0 = ratio(9, 40) + ratio(rng.gen_range(0..=1000), 1000) * (ratio(1, 40) - &q0);
        let tip = &g.x_ps - &t_lo + &g.b * (&y0 + &q0 - &g.y_pu);
        let x1 = &tip + &gap;
        let p0 = ratio(rng.gen_range(1..=400), 1000);
        let f0 = diag(
            Word::transition(1, 0),
            p0.clone(),
            ratio(0, 1),
            q0.clone(),
            y0.clone(),
        );
        let q1 = ratio(rng.gen_range(1..=400), 1000);
        let f1 = diag(
            Word::transition(1, 0),
            p1.clone(),
            x1.clone(),
            q1.clone(),
            ratio(0, 1),
        );
        let res = parabolic_compose(&f0, &g, &f1, &params(), (&t_lo, &t_hi)).unwrap();
        let delta = gap;
        if delta > ratio(0, 1) {
            assert!(transversality_ok(
                to_f64(&delta),
                to_f64(&q0),
                to_f64(&p1),
                0.0,
                0.1
            ));
        }
        match res {
            Parabolic::NotPossible { delta: d } => {
                assert_eq!(d, delta);
                assert!(delta <= ratio(0, 1));
                refused += 1;
            }
            Parabolic::Pair {
                delta: d,
                minus,
                plus,
            } => {
                assert_eq!(d, delta);
                let sd = to_f64(&delta).sqrt();
                for e in [&minus, &plus] {
                    let r = e.widths().0 * sd / to_f64(&(&p0 * &p1));
                    assert!(k1 <= r && r <= k2, "{r}");
                    assert!((r - 0.5).abs() < 1e-6, "{r}");
                    let rq = e.widths().1 * sd / to_f64(&(&g.b * &q0 * &q1));
                    assert!((rq - 0.5).abs() < 1e-6, "{rq}");
                    assert_eq!(e.n, 3);
                }
                pairs += 1;
            }
        }
    }
    assert!(refused > 0);
}

fn toy() -> ToyFamily {
    toy_het(&default_toy_rho(), &ratio(1, 10)).unwrap()
}

#[test]
fn cone_closure_over_fold_free_words() {
    let fam = toy();
    let words = fold_free_words(&fam, 4, 10_000).unwrap();
    let (k1, k2) = fam.cone.kappa_simple();
    let short: Vec<_> = words.iter().filter(|e| e.n <= 2).collect();
    let mut composed = 0;
    for a in &short {
        assert!(a.flags.cone && a.flags.distortion);
        for b in &short {
            if a.q.rect != b.p.rect {
                continue;
            }
            let c = simple_compose(a, b, &fam.cone).unwrap();
            assert!(c.flags.cone);
            let r = c.widths().0 / (a.widths().0 * b.widths().0);
            assert!(k1 <= r && r <= k2);
            composed += 1;
        }
    }
    assert!(composed > 0);
    assert!(words.iter().all(|e| e.flags.cone));
}

#[test]
fn transposed_family_swaps_widths_and_dimensions() {
    let fam = ToyFamily::new(ratio(3, 1), ratio(5, 1), None).unwrap();
    let rev = fam.transpose();
    let fwd = fold_free_words(&fam, 3, 10_000).unwrap();
    let back = fold_free_words(&rev, 3, 10_000).unwrap();
    assert_eq!(fwd.len(), back.len());
    for e in &fwd {
        let w = e.word.reversed();
        let t = back.iter().find(|x| x.word == w).unwrap();
        assert_eq!(t.widths(), (e.widths().1, e.widths().0));
    }
    let d = stable_unstable_dimensions(ProductModel::Toy(&fam), 1e-9, 6).unwrap();
    let dr = stable_unstable_dimensions(ProductModel::Toy(&rev), 1e-9, 6).unwrap();
    assert_eq!(d.d_s, dr.d_u);
    assert_eq!(d.d_u, dr.d_s);
}

#[test]
fn horseshoe_dimensions_and_py_classification() {
    for (d, expect) in [(0.43, true), (0.55, true), (0.70, false)] {
        let s = SmaleAffine::new(2, two_branch_ratio_for_dimension(d)).unwrap();
        let dims = stable_unstable_dimensions(ProductModel::Smale(&s), 1e-9, 8).unwrap();
        assert!((dims.d_s.lower - d).abs() < 1e-4);
        assert!((dims.box_dimension - (dims.d_s.lower + dims.d_u.lower)).abs() <= 0.02);
        let ds = from_f64_exact(dims.d_s.lower);
        let du = from_f64_exact(dims.d_u.upper);
        assert_eq!(py_condition(&ds, &du).unwrap(), expect);
    }
    assert!(!py_condition(&ratio(3, 5), &ratio(3, 5)).unwrap());
    assert!(py_condition(&ratio(2, 5), &ratio(2, 5)).unwrap());
    assert!(py_condition(&ratio(11, 20), &ratio(11, 20)).unwrap());
    assert!(!py_condition(&ratio(7, 10), &ratio(7, 10)).unwrap());
    assert!(py_condition(&ratio(6, 5), &ratio(0, 1)).is_err());
}

#[test]
fn fold_region_breaks_the_conefield() {
    let fam = toy();
    let p = fam.cone;
    let plain = ConefieldModel::Toy {
        family: &fam,
        with_fold: false,
        t: 0.01,
    };
    assert!(verify_hyperbolic_conefield(plain, 12, &p).unwrap());
    let folded = ConefieldModel::Toy {
        family: &fam,
        with_fold: true,
        t: 0.01,
    };
    assert!(!verify_hyperbolic_conefield(folded, 12, &p).unwrap());
}

#[test]
fn fold_tends_to_the_limit_map() {
    // In the coordinates centred at the tangency, G(ξ, η) = (η', ξ² − t + bη) after the exchange.
    for b in [ratio(1, 10), ratio(1, 100), ratio(1, 1000)] {
        let mut g = fold();
        g.b = b.clone();
        let bf = to_f64(&b);
        let mut sup: f64 = 0.0;
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (0.4 + 0.01 * i as f64, 0.2 + 0.005 * j as f64);
                let (x2, y2) = g.apply(x, y, 0.0);
                let (xi, eta) = (x - 0.5, y - 0.2);
                // Limit after exchange: (ξ, η) ↦ (ξ², ξ) in the target frame.
                let dx = (x2 - 0.75) - xi * xi;
                let dy = (y2 - 0.5) - xi;
                sup = sup.max(dx.abs().max(dy.abs()));
                assert!(eta.abs() <= 0.1 + 1e-12);
            }
        }
        assert!(sup <= 2.0 * bf * 0.1 + 1e-12, "{sup}");
    }
}

#[test]
fn sinks_of_the_limit_and_the_fold() {
    let origin = detect_sink(
        &PlaneMap::Limit,
        0.0,
        &SearchBox::around(0.0, 0.0, 0.5),
        4,
        500,
        6,
    )
    .unwrap();
    assert_eq!(origin.period, 1);
    assert!(origin.orbit[0].0.abs() < 1e-9 && origin.orbit[0].1.abs() < 1e-9);
    assert!(origin.multiplier_bound < 1.0);
    assert!(detect_sink(
        &PlaneMap::Limit,
        0.0,
        &SearchBox::around(1.0, 1.0, 0.05),
        4,
        500,
        6
    )
    .is_none());
    let mus: Vec<f64> = (0..=12).map(|i| -0.3 + 0.05 * i as f64).collect();
    let scan = sink_scan(
        &PlaneMap::Fold { b: 0.1 },
        &mus,
        &SearchBox::around(0.0, 0.0, 1.0),
        6,
        2000,
        6,
    );
    let hits: Vec<f64> = scan
        .iter()
        .filter(|(_, s)| s.is_some())
        .map(|(m, _)| *m)
        .collect();
    assert!(!hits.is_empty());
    // Fixed points of y ↦ y² + μ + b·y are real only for μ ≤ (1 − b)²/4.
    assert!(hits.iter().all(|&m| m <= 0.2025 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_composition_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, _, _) = random_element(&mut rng);
        let (b, _, _) = random_element(&mut rng);
        let (c, _, _) = random_element(&mut rng);
        let p = params();
        let l = simple_compose(&simple_compose(&a, &b, &p).unwrap(), &c, &p).unwrap();
        let r = simple_compose(&a, &simple_compose(&b, &c, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(l.rep, r.rep);
        prop_assert_eq!(l.p, r.p);
        prop_assert_eq!(l.q, r.q);
    }
}
