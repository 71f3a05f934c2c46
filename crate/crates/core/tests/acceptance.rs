use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use monogenic::fixtures::{axis_ln_norm, random_float_series, random_rational_clifford, random_rational_series};
use monogenic::fueter::FueterCache;
use monogenic::growth::{membership_limsup, order_from_coeffs, type_from_coeffs, type_from_kq, LnNorms, Window};
use monogenic::multiindex::{enumerate_up_to, ln_factorial};
use monogenic::operator::{continuity_tail, op_class_check, reconstruct_from_blackbox};
use monogenic::poly::fueter_poly;
use monogenic::proximate::{fit_subadditive, log_grid, radial_grid};
use monogenic::sampling::ball_points;
use monogenic::series::dirac_residual_fn;
use monogenic::verify::{self, VerifyConfig, CHECK_NAMES};
use monogenic::{
    CliffordNumber, HomTable, MonogenicSeries, MultiIndex, OperatorSymbol, Paravector, ProximateOrder, Rational,
    Scalar,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, u64, fn() -> Outcome);

fn families(rho: f64) -> Vec<ProximateOrder> {
    vec![
        ProximateOrder::constant(rho).unwrap(),
        ProximateOrder::log_shift(rho, 2f64.ln()).unwrap(),
        ProximateOrder::log_log(rho, 1.0).unwrap(),
    ]
}

fn algebra_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for n in [2, 3] {
        for _ in 0..1000 {
            let a = random_rational_clifford(n, &mut rng);
            let b = random_rational_clifford(n, &mut rng);
            let c = random_rational_clifford(n, &mut rng);
            let assoc = &(&a * &b) * &c == &a * &(&b * &c);
            let left = &a * &(&b + &c) == &(&a * &b) + &(&a * &c);
            let right = &(&a + &b) * &c == &(&a * &c) + &(&b * &c);
            bad += [assoc, left, right].iter().filter(|ok| !**ok).count();
        }
    }
    (bad == 0, format!("2000 triples in R_2 and R_3, {bad} failures"))
}

fn monogenicity() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let pts = ball_points(n, 1.0, 20, 7);
        for m in enumerate_up_to(n, 6) {
            let eval = |x: &Paravector<f64>| FueterCache::new(x.clone()).get(&m).unwrap();
            let scale = pts.iter().map(|x| eval(x).norm()).fold(1.0, f64::max);
            worst = worst.max(dirac_residual_fn(n, eval, &pts, h) / scale);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..50 {
        let n = 2 + i % 2;
        let pts = ball_points(n, 1.0, 20, 100 + i as u64);
        let f = random_float_series(n, 5, &mut rng);
        worst = worst.max(f.dirac_residual(&pts, h) / (1.0 + f.coefficient_bound(1.0)));
    }
    (worst <= 1e-6, format!("max relative residual {worst:.3e}"))
}

fn normalization() -> Outcome {
    let n = 2;
    let idx = enumerate_up_to(n, 6);
    let mut bad = 0;
    for m in &idx {
        let v = fueter_poly::<Rational>(m, Default::default());
        for p in &idx {
            let mut d = v.clone();
            for i in 1..=n {
                for _ in 0..p.get(i) {
                    d = d.partial(i);
                }
            }
            let expect = if p == m {
                CliffordNumber::scalar(n, Rational::from_biguint(&m.factorial()))
            } else {
                CliffordNumber::zero(n)
            };
            if d.at_origin() != expect {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("{} pairs (m, p), {bad} mismatches", idx.len() * idx.len()))
}

fn brute_product(f: &MonogenicSeries<Rational>, g: &MonogenicSeries<Rational>, q: usize) -> MonogenicSeries<Rational> {
    let mut out = MonogenicSeries::new(f.dim(), q);
    for (m, a) in f.coeffs() {
        for (k, b) in g.coeffs() {
            if m.degree() + k.degree() <= q {
                out.add_coeff(m.add(k), a * b).unwrap();
            }
        }
    }
    out
}

fn ck_product() -> Outcome {
    let (n, q) = (2, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let unit = MonogenicSeries::<Rational>::unit(n, q);
    let mut bad = 0;
    for _ in 0..20 {
        let f = random_rational_series(n, q, &mut rng);
        let g = random_rational_series(n, q, &mut rng);
        let h = random_rational_series(n, q, &mut rng);
        let fg = f.ck_mul(&g, q).unwrap();
        let checks = [
            fg == brute_product(&f, &g, q),
            fg.ck_mul(&h, q).unwrap() == f.ck_mul(&g.ck_mul(&h, q).unwrap(), q).unwrap(),
            unit.ck_mul(&f, q).unwrap() == f,
            f.ck_mul(&unit, q).unwrap() == f,
        ];
        bad += checks.iter().filter(|ok| !**ok).count();
    }
    (bad == 0, format!("20 random triples, n={n}, Q={q}, {bad} failures"))
}

fn cauchy() -> Outcome {
    let cfg = VerifyConfig {
        random_instances: 100,
        checks: vec!["cauchy".into()],
        ..VerifyConfig::default()
    };
    let r = verify::run_check("cauchy", &cfg, false);
    (r.worst_margin >= 0.0, format!("100 random rational series, worst margin {:.3e}", r.worst_margin))
}

fn supermultiplicativity() -> Outcome {
    let mut worst = f64::INFINITY;
    for rho in [0.5, 1.0, 2.0] {
        for po in families(rho) {
            let g: Vec<f64> = (0..=100).map(|q| po.ln_g(q)).collect();
            for p in 0..=50 {
                for q in 0..=50 {
                    worst = worst.min(g[p + q] + 1e-9 - g[p] - g[q]);
                }
            }
        }
    }
    (worst >= 0.0, format!("p, q <= 50, three families, rho in {{0.5, 1, 2}}, worst margin {worst:.3e}"))
}

fn phi_round_trip() -> Outcome {
    let mut worst: f64 = 0.0;
    for rho in [0.5, 1.0, 2.0] {
        for po in families(rho) {
            for r in log_grid(1e-3, 1e8, 200) {
                let back = po.phi(po.t(r)).unwrap();
                worst = worst.max((back - r).abs() / r);
            }
        }
    }
    (worst <= 1e-10, format!("200-point grid on [1e-3, 1e8], max relative error {worst:.3e}"))
}

fn estimators() -> Outcome {
    let mut worst_order: f64 = 0.0;
    let mut worst_type: f64 = 0.0;
    let order_window = Window::new(100, 200).unwrap();
    let type_window = Window::new(200, 500).unwrap();
    for (rho, sigma) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
        let with_c = LnNorms::axis_family(2, rho, sigma, 0..=500, true);
        let plain = LnNorms::axis_family(2, rho, sigma, 0..=500, false);
        let order = order_from_coeffs(&with_c, order_window).unwrap().rho;
        worst_order = worst_order.max((order - rho).abs() / rho);
        let t1 = type_from_coeffs(&plain, rho, type_window).unwrap();
        let kq: BTreeMap<usize, f64> = (1..=500).map(|q| (q, axis_ln_norm(rho, sigma, q))).collect();
        let po = ProximateOrder::constant(rho).unwrap();
        let t2 = type_from_kq(&kq, &po, type_window).unwrap();
        for t in [t1, t2] {
            worst_type = worst_type.max((t - sigma).abs() / sigma);
        }
    }
    (
        worst_order <= 0.02 && worst_type <= 0.10,
        format!("max order error {:.2}%, max type error {:.2}%", 100.0 * worst_order, 100.0 * worst_type),
    )
}

fn membership() -> Outcome {
    let po = ProximateOrder::constant(1.0).unwrap();
    let norms = LnNorms::axis_family(2, 1.0, 1.0, 0..=500, false);
    let kq: BTreeMap<usize, f64> = (1..=500).map(|q| (q, axis_ln_norm(1.0, 1.0, q))).collect();
    let m = membership_limsup(&kq, &norms, &po, Window::new(200, 500).unwrap());
    ((0.9..=1.1).contains(&m.kq_value), format!("limsup surrogate {:.4}", m.kq_value))
}

fn random_op(q: usize, rng: &mut ChaCha8Rng) -> OperatorSymbol<Rational> {
    let mut p = OperatorSymbol::new(2);
    for m in enumerate_up_to(2, q) {
        p.insert(m, random_rational_series(2, 2, rng)).unwrap();
    }
    p
}

fn random_table(q: usize, rng: &mut ChaCha8Rng) -> HomTable<Rational> {
    let mut h = HomTable::new(2, q);
    for p in enumerate_up_to(2, q) {
        h.insert(p, random_rational_series(2, 2, rng)).unwrap();
    }
    h
}

fn operator_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    for i in 0..50 {
        let q = 1 + i % 8;
        let p = random_op(q, &mut rng);
        if p.to_hom(q).to_op().unwrap() != p {
            bad += 1;
        }
        let h = random_table(q, &mut rng);
        if h.to_op().unwrap().to_hom(q) != h {
            bad += 1;
        }
    }
    let (q, d) = (6, 8);
    let g = random_rational_series(2, 2, &mut rng);
    let h = random_rational_series(2, 2, &mut rng);
    let e1 = MultiIndex::axis(2, 1, 1);
    let map = |v: &MonogenicSeries<Rational>| -> monogenic::Result<MonogenicSeries<Rational>> {
        g.ck_mul(&v.derivative(&e1), d)?.checked_add(&h.ck_mul(v, d)?)
    };
    let op = reconstruct_from_blackbox(2, q, d, map).unwrap();
    let mut disagree = 0;
    for s in enumerate_up_to(2, q) {
        let v = MonogenicSeries::fueter(&s, d);
        if op.apply(&v, d).unwrap() != map(&v).unwrap() {
            disagree += 1;
        }
    }
    (
        bad == 0 && disagree == 0,
        format!("50 instances, Q <= 8: {bad} round-trip failures; blackbox |s| <= {q}: {disagree} disagreements"),
    )
}

fn continuity() -> Outcome {
    let po = ProximateOrder::constant(1.0).unwrap();
    let n = 2;
    let mut p = OperatorSymbol::<f64>::new(n);
    for m in enumerate_up_to(n, 30) {
        let q = m.degree();
        let ln = po.ln_g(q) - m.ln_factorial() - ln_factorial(q);
        p.insert(m, MonogenicSeries::constant(CliffordNumber::scalar(n, ln.exp()), 0)).unwrap();
    }
    let cert = op_class_check(&p, &po, &po, &[0.5, 1.0, 2.0], &[0.05, 0.1, 0.5, 1.0, 2.0], None).unwrap();
    let k = fit_subadditive(|r| po.t(r), &radial_grid(100.0, 60)).k;
    let probe = continuity_tail(&p, &po, &po, 1.0, 1.0, k, 1.0, 10..=20, 400);
    let mut worst = f64::INFINITY;
    for frac in [0.25, 0.5] {
        let t = continuity_tail(&p, &po, &po, 1.0, 1.0, k, frac * probe.threshold, 10..=20, 400);
        worst = worst.min(t.min_log_decrease());
    }
    let factor = worst.exp();
    (
        cert.every_lambda && factor >= 2.0,
        format!(
            "every_lambda {}, threshold {:.4}, eps in {{1/4, 1/2}} x threshold, worst decrease factor {factor:.3} per step for M >= 10",
            cert.every_lambda, probe.threshold
        ),
    )
}

fn negative_controls() -> Outcome {
    let cfg = VerifyConfig {
        corrupt: vec!["all".into()],
        ..VerifyConfig::default()
    };
    let reports = verify::run_all(&cfg).unwrap();
    let survivors: Vec<&str> = reports.iter().filter(|r| r.pass).map(|r| r.name.as_str()).collect();
    (
        reports.len() == CHECK_NAMES.len() && survivors.is_empty(),
        format!("{} checks corrupted, passing anyway: {survivors:?}", reports.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("algebra exactness", 5, algebra_exactness),
        ("monogenicity", 30, monogenicity),
        ("normalization", 10, normalization),
        ("ck-product", 10, ck_product),
        ("cauchy inequality", 20, cauchy),
        ("supermultiplicativity", 5, supermultiplicativity),
        ("phi round trip", 5, phi_round_trip),
        ("growth estimators", 30, estimators),
        ("membership", 10, membership),
        ("operator round trips", 60, operator_round_trips),
        ("continuity tail", 30, continuity),
        ("negative controls", 120, negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{:>2} {:<22} {}  {:.2}s (limit {limit}s)  {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
