use std::collections::BTreeSet;

use cantorfold::affine_like::{Symbol, Word};
use cantorfold::models::{default_toy_rho, toy_het, ToyFamily};
use cantorfold::py_scheme::{
    build_catalog, covering_bound, critical_sum, enumerate_admissible_chains,
    exceptional_dimension_bound, fitted_lemma24_constant, is_bicritical, lemma24_check,
    run_exclusion, Catalog, ChainWidths, ExclusionConfig, PYParams, Status,
};
use cantorfold::rational::{int, ratio, to_f64};
use cantorfold::Rational;
use proptest::prelude::*;

fn family() -> ToyFamily {
    toy_het(&default_toy_rho(), &ratio(1, 10)).unwrap()
}

fn params() -> PYParams {
    PYParams::new(ratio(1, 1000), 0.05, 0.2, None).unwrap()
}

fn rho() -> Rational {
    default_toy_rho()
}

type Span = (Rational, Rational);

fn digits(w: &Word) -> Vec<usize> {
    w.0.iter()
        .map(|s| match s {
            Symbol::Rect(a) => *a,
            Symbol::Fold(_) => panic!("fold-free words only"),
        })
        .collect()
}

fn apply(slope: &Rational, offset: &Rational, (lo, hi): &Span) -> Span {
    let a = slope * lo + offset;
    let b = slope * hi + offset;
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `(P, Q)` of a fold-free word: `P` pulled back through every transition
/// from the last, `Q` pushed forward from the first.
fn strips(d: &[usize]) -> (Span, Span) {
    let s = int(1) / rho();
    let x_map = |a: usize, b: usize| match (a, b) {
        (1, 1) => (-s.clone(), int(1)),
        (_, 0) => (s.clone(), int(0)),
        _ => (s.clone(), int(1) - &s),
    };
    let y_map = |a: usize, b: usize| match (a, b) {
        (0, 0) => (-s.clone(), s.clone()),
        (0, _) => (s.clone(), int(0)),
        _ => (s.clone(), int(1) - &s),
    };
    let mut p = (int(0), int(1));
    for i in (0..d.len() - 1).rev() {
        let (m, c) = x_map(d[i], d[i + 1]);
        p = apply(&m, &c, &p);
    }
    let mut q = (int(0), int(1));
    for i in 0..d.len() - 1 {
        let (m, c) = y_map(d[i], d[i + 1]);
        q = apply(&m, &c, &q);
    }
    (p, q)
}

fn all_words(n_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![0], vec![1]];
    for _ in 1..=n_max {
        layer = layer
            .iter()
            .flat_map(|w| (0..2).map(move |a| [w.clone(), vec![a]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn word_of(d: &[usize]) -> Word {
    Word(d.iter().map(|&a| Symbol::Rect(a)).collect())
}

fn width(n: usize) -> f64 {
    to_f64(&rho()).powi(-(n as i32))
}

/// Distance between two closed intervals, zero when they meet.
fn dist(a: &Span, b: &Span) -> f64 {
    if a.1 < b.0 {
        to_f64(&(&b.0 - &a.1))
    } else if b.1 < a.0 {
        to_f64(&(&a.0 - &b.1))
    } else {
        0.0
    }
}

struct Geometry {
    b: Rational,
    y_pu: Rational,
    x_ps: Rational,
}

fn geometry() -> Geometry {
    let r = rho();
    Geometry {
        b: ratio(1, 10),
        y_pu: int(1) / (&r + int(1)),
        x_ps: &r / (&r + int(1)),
    }
}

/// Both strips of a fold-free word lie within `w^{1−η}` of the tongue tips
/// for some `t` in `[lo, hi]`.
fn oracle_bicritical(d: &[usize], lo: &Rational, hi: &Rational, eta: f64) -> (bool, f64, f64) {
    let g = geometry();
    let (p, q) = strips(d);
    let thr = width(d.len() - 1).powf(1.0 - eta);
    let dp = if d[0] == 1 {
        dist(&p, &(&g.x_ps - hi, &g.x_ps - lo))
    } else {
        f64::INFINITY
    };
    let dq = if *d.last().unwrap() == 0 {
        dist(&q, &(&g.y_pu + lo / &g.b, &g.y_pu + hi / &g.b))
    } else {
        f64::INFINITY
    };
    (dp < thr && dq < thr, dp / thr, dq / thr)
}

fn catalog_at(lo: &Rational, hi: &Rational, n_max: usize) -> Catalog {
    build_catalog(&family(), (lo, hi), &params(), n_max, 0.0, 1_000_000).unwrap()
}

#[test]
fn fold_free_catalog_matches_brute_force() {
    let c = catalog_at(&ratio(1, 10), &ratio(1001, 10000), 6);
    let words = all_words(6);
    assert_eq!(
        words.len(),
        (1..=6).map(|n| 1usize << (n + 1)).sum::<usize>()
    );
    assert_eq!(c.len(), words.len());
    assert_eq!(c.stats.parabolic, 0);
    for d in &words {
        let e = c
            .get(&word_of(d))
            .unwrap_or_else(|| panic!("missing {d:?}"));
        let (p, q) = strips(d);
        let (ph, qh) = (e.p.hull(), e.q.hull());
        for (got, want) in [(ph.lo, &p.0), (ph.hi, &p.1), (qh.lo, &q.0), (qh.hi, &q.1)] {
            assert!((got - to_f64(want)).abs() < 1e-12, "{d:?}");
        }
        let (wp, wq) = e.exact_widths().unwrap();
        assert_eq!(wp, &p.1 - &p.0);
        assert_eq!(wq, &q.1 - &q.0);
        assert_eq!(e.p.rect, d[0]);
        assert_eq!(e.q.rect, *d.last().unwrap());
    }
}

#[test]
fn parabolic_members_match_independent_enumeration() {
    let (lo, hi) = (ratio(1, 10), ratio(1001, 10000));
    let p = params();
    let c = catalog_at(&lo, &hi, 8);
    let g = geometry();
    let i_len = to_f64(&(&hi - &lo));
    let words = all_words(6);
    let mut expected = BTreeSet::new();
    let mut checked = 0;
    for d0 in words.iter().filter(|d| *d.last().unwrap() == 0) {
        let (p0, q0) = strips(d0);
        if q0.0 < g.y_pu || q0.1 > &g.y_pu + &lo / &g.b {
            continue;
        }
        for d1 in words
            .iter()
            .filter(|d| d[0] == 1 && (d0.len() - 1) + 1 + (d.len() - 1) <= 8)
        {
            let (p1, _) = strips(d1);
            if p1.0 < &g.x_ps - &lo || p1.1 > g.x_ps {
                continue;
            }
            let delta = &p1.0 - (&g.x_ps - &lo + &g.b * (&q0.1 - &g.y_pu));
            let df = to_f64(&delta);
            let (n0, n1) = (d0.len() - 1, d1.len() - 1);
            let need = width(n0)
                .powf(1.0 - p.eta)
                .max(width(n1).powf(1.0 - p.eta))
                .max(i_len);
            if df <= 0.0 || df < need {
                continue;
            }
            for sign in [-1i8, 1] {
                let mut v = word_of(d0).0;
                v.push(Symbol::Fold(sign));
                v.extend(word_of(d1).0);
                let w = Word(v);
                let e = c.get(&w).unwrap_or_else(|| panic!("missing {w}"));
                assert_eq!(e.n, n0 + 1 + n1);
                let wp = to_f64(&(&p0.1 - &p0.0)) * width(n1) / (2.0 * df.sqrt());
                let wq = to_f64(&g.b) * width(n0) * width(n1) / (2.0 * df.sqrt());
                let (gp, gq) = e.widths();
                assert!(
                    (gp / wp - 1.0).abs() < 1e-6 && (gq / wq - 1.0).abs() < 1e-6,
                    "{w}"
                );
                expected.insert(w);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    assert_eq!(c.stats.parabolic, expected.len());
    assert_eq!(c.stats.uncertified, 0);
}

#[test]
fn bicritical_elements_agree_with_exact_distances() {
    let fam = family();
    let eta = params().eta;
    let mut hits = 0;
    for (lo, hi) in [
        (ratio(1, 1000), ratio(1001, 1_000_000)),
        (ratio(3, 70), ratio(2, 35)),
        (ratio(1, 25), ratio(41, 1000)),
    ] {
        let c = catalog_at(&lo, &hi, 6);
        for e in c.elements.iter().filter(|e| e.folds() == 0) {
            let d = digits(&e.word);
            let (exact, rp, rq) = oracle_bicritical(&d, &lo, &hi, eta);
            let lib = is_bicritical(e, (&lo, &hi), &fam, eta);
            if exact {
                assert!(lib, "{}", e.word);
                hits += 1;
            }
            if lib {
                // Outward rounding may only tip borderline strips.
                assert!(rp < 1.0 + 1e-9 && rq < 1.0 + 1e-9, "{} {rp} {rq}", e.word);
            }
        }
    }
    assert!(hits > 0);
}

fn recheck_exclusion(eps0: Rational, beta: Option<f64>, generations: u32) -> f64 {
    let p = PYParams::new(eps0, 0.05, 0.2, beta).unwrap();
    let r = run_exclusion(
        &family(),
        &p,
        &ExclusionConfig {
            generations,
            ..Default::default()
        },
    )
    .unwrap();
    let mut excluded = 0;
    for node in &r.nodes {
        match node.status {
            Status::Good => assert!(node.witness.is_none()),
            Status::Excluded => {
                excluded += 1;
                let w = node.witness.as_ref().unwrap();
                let d = digits(&w.word);
                let (bicritical, _, _) = oracle_bicritical(&d, &node.lo, &node.hi, p.eta);
                assert!(bicritical, "{}", w.word);
                let len = to_f64(&node.length());
                assert!(width(d.len() - 1) >= len.powf(p.beta), "{}", w.word);
                if let Some(parent) = node.parent {
                    assert_eq!(r.nodes[parent].status, Status::Good);
                }
            }
        }
    }
    assert!(excluded > 0);
    let total: Rational = r.surviving_measure.clone() + r.excluded_measure.clone();
    assert_eq!(total, r.nodes[0].length());
    r.surviving_fraction()
}

#[test]
fn exclusion_witnesses_survive_recomputation() {
    let frac = recheck_exclusion(ratio(1, 35), Some(2.0), 2);
    assert!((frac - 0.5).abs() < 1e-12, "{frac}");
    assert_eq!(recheck_exclusion(ratio(1, 25), None, 1), 0.0);
}

#[test]
fn fold_free_family_keeps_every_interval() {
    let fam = family().fold_free();
    let r = run_exclusion(
        &fam,
        &params(),
        &ExclusionConfig {
            generations: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(r.surviving_fraction(), 1.0);
    assert!(r.nodes.iter().all(|n| n.status == Status::Good));
    assert_eq!(r.generations.len(), 4);
    let last = r.generations.last().unwrap();
    assert!(last.tested > 1 && last.excluded == 0);
}

#[test]
fn chains_link_on_every_finer_subinterval() {
    let (lo, hi) = (ratio(1, 10), ratio(1001, 10000));
    let c = catalog_at(&lo, &hi, 6);
    let report = enumerate_admissible_chains(&c, &family(), &params(), 2, 100_000).unwrap();
    assert!(report.chains.len() >= 100);
    let g = geometry();
    let words: Vec<Vec<usize>> = c.elements.iter().map(|e| digits(&e.word)).collect();
    let core_gaps = |d: &[usize]| -> Vec<Span> {
        let (p, _) = strips(d);
        let mut kids: Vec<Span> = words
            .iter()
            .filter(|w| w.len() > d.len() && w[..d.len()] == *d)
            .map(|w| strips(w).0)
            .collect();
        kids.sort();
        let mut gaps = Vec::new();
        let mut left = p.0.clone();
        for (a, b) in kids {
            if a > left {
                gaps.push((left.clone(), a.clone()));
            }
            left = left.max(b);
        }
        if p.1 > left {
            gaps.push((left, p.1.clone()));
        }
        gaps
    };
    let steps = 10;
    for chain in report.chains.iter().take(100) {
        for j in 0..2 {
            let (_, q) = strips(&digits(&chain.words[j]));
            let gaps = core_gaps(&digits(&chain.words[j + 1]));
            for s in 0..steps {
                let t_a = &lo + (&hi - &lo) * ratio(s, steps);
                assert!(q.0 >= g.y_pu && q.1 <= &g.y_pu + &t_a / &g.b);
                let vertex = &g.x_ps - &t_a + &g.b * (&q.1 - &g.y_pu);
                let linked = gaps
                    .iter()
                    .any(|(a, b)| a.clone().max(vertex.clone()) < b.clone().min(g.x_ps.clone()));
                assert!(linked, "{} -> {}", chain.words[j], chain.words[j + 1]);
            }
        }
    }
    let widths: Vec<ChainWidths> = report
        .chains
        .iter()
        .take(100)
        .map(|c| c.widths.clone())
        .collect();
    let p = params();
    let c_fit = fitted_lemma24_constant(&widths, &p);
    assert!(widths.iter().all(|w| lemma24_check(w, &p, c_fit)));
    assert!(c_fit > 0.0 && !widths.iter().all(|w| lemma24_check(w, &p, 0.5 * c_fit)));
    for w in &widths {
        let b = covering_bound(w, 2.0, p.eta).unwrap();
        assert!(b.bound <= w.p[0], "{w:?}");
    }
}

#[test]
fn critical_sum_counts_and_empty_catalog() {
    let (lo, hi) = (ratio(1, 1000), ratio(1001, 1_000_000));
    let c = catalog_at(&lo, &hi, 6);
    let s = critical_sum(&c, &family(), params().eta, 0.0);
    let mut total = 0;
    for (n, count, partial) in &s.by_depth {
        let direct = c
            .elements
            .iter()
            .filter(|e| e.n == *n && e.folds() == 0)
            .filter(|e| {
                let d = digits(&e.word);
                let g = geometry();
                let q = strips(&d).1;
                let thr = width(*n).powf(1.0 - params().eta);
                *d.last().unwrap() == 0
                    && dist(&q, &(&g.y_pu + &lo / &g.b, &g.y_pu + &hi / &g.b)) < thr
            })
            .count();
        assert_eq!(*count, direct, "depth {n}");
        total += count;
        assert_eq!(*partial, total as f64);
    }
    assert_eq!(s.total, total as f64);
    let empty = Catalog::from_elements((&lo, &hi), 6, 0.0, Vec::new());
    let e = critical_sum(&empty, &family(), 0.05, 1.0);
    assert_eq!(e.total, 0.0);
    assert_eq!(e.tail_ratio(), 0.0);
}

#[test]
fn runs_are_deterministic() {
    let (lo, hi) = (ratio(1, 10), ratio(1001, 10000));
    let dump = |c: Catalog| serde_json::to_string(&(c.elements, c.stats)).unwrap();
    let a = dump(catalog_at(&lo, &hi, 8));
    let b = dump(catalog_at(&lo, &hi, 8));
    assert_eq!(a, b);
    let p = PYParams::new(ratio(1, 35), 0.05, 0.2, Some(2.0)).unwrap();
    let cfg = ExclusionConfig::default();
    let r1 = serde_json::to_string(&run_exclusion(&family(), &p, &cfg).unwrap()).unwrap();
    let r2 = serde_json::to_string(&run_exclusion(&family(), &p, &cfg).unwrap()).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn dimension_bound_examples() {
    let p = PYParams::new(ratio(1, 1000), 0.01, 0.01, Some(2.0)).unwrap();
    let d = exceptional_dimension_bound(0.52, 0.52, &p).d().unwrap();
    assert!((d - 1.5153).abs() < 1e-3 && d < 2.0);
    assert!(exceptional_dimension_bound(0.61, 0.61, &p).d().is_none());
}

fn chain_widths() -> impl Strategy<Value = ChainWidths> {
    (2usize..5)
        .prop_flat_map(|len| {
            (
                prop::collection::vec(1e-4f64..0.5, len),
                prop::collection::vec(1e-4f64..0.5, len),
            )
        })
        .prop_map(|(p, q)| ChainWidths::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn covering_matches_direct_products(w in chain_widths(), d in 1.0f64..2.0, eta in 0.0f64..0.2) {
        let k = w.k();
        let mut eps = vec![0.0; k + 1];
        eps[k] = w.q[k].powf(0.5 * (1.0 - eta)) * w.p[k];
        for i in (0..k).rev() {
            eps[i] = eps[i + 1] * w.p[i];
        }
        let margin = (0..k).map(|i| (eps[i + 1] / w.q[i] - 1.0).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 1e-9);
        let compatible = (0..k).all(|i| eps[i + 1] < w.q[i]);
        match covering_bound(&w, d, eta) {
            Ok(b) => {
                prop_assert!(compatible);
                let n_k = w.q[k - 1].sqrt() / eps[k];
                let prod: f64 = (0..k).map(|i| w.p[i].powf(d - 1.0) / w.q[i]).product();
                let direct = n_k * eps[k].powf(d) * prod;
                prop_assert!((b.bound / direct - 1.0).abs() < 1e-9);
                prop_assert!((b.eps0_scale / eps[0] - 1.0).abs() < 1e-9);
                // Non-increasing in d, by the factor ε₀ per unit.
                let up = covering_bound(&w, d + 0.5, eta).unwrap();
                prop_assert!(up.bound <= b.bound);
                prop_assert!((up.bound / b.bound / eps[0].sqrt() - 1.0).abs() < 1e-9);
            }
            Err(_) => prop_assert!(!compatible),
        }
    }

    #[test]
    fn dimension_bound_respects_every_constraint(ds in 0.0f64..1.0, du in 0.0f64..1.0, eta in 0.001f64..0.05, beta in 1.3f64..4.0) {
        let p = PYParams::new(ratio(1, 10_000), eta, 0.05, Some(beta)).unwrap();
        let d_minus = (ds + du - 1.0 + 2.0 * eta).max(0.0);
        let bt = p.beta_tilde() * (1.0 - eta);
        match exceptional_dimension_bound(ds, du, &p).d() {
            Some(d) => {
                prop_assert!(d_minus < 0.2 && bt > 1.0 && d < 2.0);
                prop_assert!(d > 22.0 / 15.0 && d > 1.0 + (2.0 * d_minus + 1.0) / 3.0 && d > 1.0 + 1.0 / bt);
                // A larger dimension sum never lowers the bound.
                if let Some(d2) = exceptional_dimension_bound(ds + 0.01, du, &p).d() {
                    prop_assert!(d2 >= d);
                }
            }
            None => {
                let best = (22.0f64 / 15.0).max(1.0 + (2.0 * d_minus + 1.0) / 3.0).max(1.0 + 1.0 / bt);
                prop_assert!(d_minus >= 0.2 || bt <= 1.0 || best + 1e-6 >= 2.0);
            }
        }
    }
}
