//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! tolerance and time budget. Runs without the libtest harness so the lines
//! are always shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num::{BigRational, One, Zero};
use polygossip::experiment::{
    fit_rate, fit_rate_of, mean_curve, preset, record_run, run_consensus_experiment,
    run_mse_experiment, ExperimentConfig, MethodSpec, Metric, RateKind, Signal,
};
use polygossip::gossip::{
    local_average_oracle, GossipIteration, JacobiGapIteration, MessagePassing,
    MessagePassingRegular, ParameterFree, PolynomialIteration,
};
use polygossip::graph::{eccentricity, largest_component};
use polygossip::orthopoly::quadrature::gauss_legendre;
use polygossip::orthopoly::{
    evaluate_recurrence, jacobi_gap_rate, kesten_mckay_density, kesten_mckay_support,
    oracle_from_measure, shift_register_omega, shift_register_poly, JacobiGapRecurrence,
    JacobiRecurrence, KestenMcKayRecurrence, Recurrence,
};
use polygossip::spectral::{
    eigendecompose, gaps, spectral_measure_of_signal, DiscreteMeasure, SpectralSummary,
    AGGREGATION_TOLERANCE,
};
use polygossip::stats::{consensus_error_sq, mean};
use polygossip::{build_gossip_matrix, GossipMatrix, Graph, GraphSpec, MatrixKind};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    Signal::Gaussian {
        mean: 0.0,
        variance: 1.0,
    }
    .sample(n, seed)
    .unwrap()
}

/// Connected random graph with the gossip matrix the criteria use for it.
fn small_instance(k: u64) -> (Graph, GossipMatrix) {
    let spec = match k % 5 {
        0 => GraphSpec::RandomGeometric {
            n: 25,
            dim: 2,
            radius: 0.35,
            seed: k,
        },
        1 => GraphSpec::PercolationBond {
            dims: vec![6, 5],
            p: 0.7,
            seed: k,
        },
        2 => GraphSpec::RandomRegular {
            n: 20,
            d: 3,
            seed: k,
        },
        3 => GraphSpec::RandomTree { n: 30, seed: k },
        _ => GraphSpec::RandomGeometric {
            n: 30,
            dim: 3,
            radius: 0.5,
            seed: k,
        },
    };
    let g = largest_component(&spec.generate().unwrap()).graph;
    let kind = if g.regular_degree().is_some() {
        MatrixKind::AdjacencyOverDegree
    } else {
        MatrixKind::UniformDegree { d_max: None }
    };
    let w = build_gossip_matrix(&g, kind).unwrap();
    (g, w)
}

type Poly = Box<dyn Fn(usize, f64) -> f64>;

/// Every polynomial method on `(g, w)`, with its polynomial `P_t(λ)`.
fn polynomial_methods<'a>(
    g: &'a Graph,
    w: &'a GossipMatrix,
    s: &SpectralSummary,
    xi: &[f64],
) -> Vec<(String, Box<dyn GossipIteration + 'a>, Poly)> {
    let gamma = s.gap();
    let omega = shift_register_omega(gamma).unwrap();
    let rec = |r: Box<dyn Recurrence>| -> Poly {
        Box::new(move |t, l| evaluate_recurrence(r.as_ref(), l, t))
    };
    let mut out: Vec<(String, Box<dyn GossipIteration + 'a>, Poly)> = vec![
        (
            "simple".into(),
            Box::new(PolynomialIteration::simple(w, xi).unwrap()),
            Box::new(|t, l: f64| l.powi(t as i32)),
        ),
        (
            "lazy-simple".into(),
            Box::new(PolynomialIteration::lazy_simple(w, xi).unwrap()),
            Box::new(|t, l: f64| ((1.0 + l) / 2.0).powi(t as i32)),
        ),
        (
            "shift-register".into(),
            Box::new(PolynomialIteration::shift_register(w, xi, omega).unwrap()),
            Box::new(move |t, l| shift_register_poly(omega, t, l)),
        ),
        (
            "jacobi-general:0.5:1.5".into(),
            Box::new(PolynomialIteration::jacobi_general(w, xi, 0.5, 1.5).unwrap()),
            rec(Box::new(JacobiRecurrence::new(0.5, 1.5).unwrap())),
        ),
        (
            "kesten-mckay:3".into(),
            Box::new(PolynomialIteration::kesten_mckay(w, xi, 3).unwrap()),
            rec(Box::new(KestenMcKayRecurrence::new(3).unwrap())),
        ),
    ];
    for d in [1.0, 2.0, 3.0] {
        out.push((
            format!("jacobi:{d}"),
            Box::new(PolynomialIteration::jacobi(w, xi, d).unwrap()),
            rec(Box::new(JacobiRecurrence::from_dimension(d).unwrap())),
        ));
    }
    let gap_rec = JacobiGapRecurrence::new(2.0, gamma).unwrap();
    out.push((
        "jacobi-gap:2".into(),
        Box::new(JacobiGapIteration::new(w, xi, 2.0, gamma).unwrap()),
        Box::new(move |t, l| gap_rec.normalized_value(l, t)),
    ));
    if let Some(d) = g.regular_degree() {
        // On a d-regular graph with W = A/d, message passing is the
        // Kesten–McKay polynomial iteration.
        let km = KestenMcKayRecurrence::new(d as u32).unwrap();
        out.push((
            "mp".into(),
            Box::new(MessagePassing::new(g, xi).unwrap()),
            rec(Box::new(km.clone())),
        ));
        out.push((
            "mp-regular".into(),
            Box::new(MessagePassingRegular::new(g, xi).unwrap()),
            rec(Box::new(km)),
        ));
    }
    out
}

fn predicted_error_sq(s: &SpectralSummary, coords: &[f64], p: impl Fn(f64) -> f64) -> f64 {
    s.eigenvalues()
        .iter()
        .zip(coords)
        .skip(1)
        .map(|(&l, c)| (c * p(l)).powi(2))
        .sum()
}

fn criterion_1() -> Outcome {
    let one = BigRational::one();
    let mut bad = Vec::new();
    for d in [1, 2, 3, 10] {
        let rec = JacobiRecurrence::rational(
            BigRational::new(d.into(), 2.into()),
            BigRational::zero(),
            format!("d={d}"),
        )
        .unwrap();
        for t in 0..=100 {
            let k = rec.coeffs_exact(t);
            if k.a + k.b - k.c != one {
                bad.push(format!("jacobi d={d} t={t}"));
            }
        }
    }
    for d in [3u32, 4, 5] {
        let rec = KestenMcKayRecurrence::new(d).unwrap();
        for t in 0..=100 {
            let k = rec.coeffs_exact(t);
            let ok = if t == 0 {
                k.a + k.b - k.c == one
            } else {
                k.b.is_zero() && k.a - k.c == one
            };
            if !ok {
                bad.push(format!("kesten-mckay d={d} t={t}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "all identities exact".into()
        } else {
            bad.join(", ")
        },
    )
}

fn criterion_2() -> Outcome {
    let mut worst_jacobi: f64 = 0.0;
    let (nodes, weights) = gauss_legendre(1200);
    for d in [2.0f64, 3.0] {
        // σ = (1-λ)^{d/2-1} dλ so that (1-λ)σ has the Jacobi weight (1-λ)^{d/2}.
        let sigma_w: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .map(|(l, w)| w * (1.0 - l).powf(d / 2.0 - 1.0))
            .collect();
        let sigma = DiscreteMeasure::new(nodes.clone(), sigma_w).unwrap();
        let oracle = oracle_from_measure(&sigma, 21).unwrap();
        let jac = JacobiRecurrence::new(d / 2.0, 0.0).unwrap();
        for t in 0..=20 {
            let (o, e) = (oracle.recurrence_coefficients()[t], jac.coeffs(t));
            worst_jacobi = worst_jacobi
                .max((o.a - e.a).abs())
                .max((o.b - e.b).abs())
                .max((o.c - e.c).abs());
        }
    }
    // λ = ρ cos θ with the midpoint rule in θ: spectrally accurate for the
    // square-root edges of the Kesten–McKay density.
    let rho = kesten_mckay_support(3);
    let m = 600;
    let (mut pts, mut wts) = (Vec::new(), Vec::new());
    for k in 0..m {
        let theta = (k as f64 + 0.5) * std::f64::consts::PI / m as f64;
        let l = rho * theta.cos();
        pts.push(l);
        wts.push(
            kesten_mckay_density(3, l).unwrap() * rho * theta.sin() * std::f64::consts::PI
                / m as f64,
        );
    }
    let oracle = oracle_from_measure(&DiscreteMeasure::new(pts, wts).unwrap(), 16).unwrap();
    let km = KestenMcKayRecurrence::new(3).unwrap();
    let mut worst_km: f64 = 0.0;
    for t in 0..=15 {
        let (o, e) = (oracle.recurrence_coefficients()[t], km.coeffs(t));
        worst_km = worst_km
            .max((o.a - e.a).abs())
            .max((o.b - e.b).abs())
            .max((o.c - e.c).abs());
    }
    outcome(
        worst_jacobi <= 1e-6 && worst_km <= 1e-5,
        format!("max jacobi deviation {worst_jacobi:.2e} (tol 1e-6), kesten-mckay {worst_km:.2e} (tol 1e-5)"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for k in 0..5 {
        let (g, w) = small_instance(k);
        let s = eigendecompose(&w).unwrap();
        let xi = gaussian(g.n(), 100 + k);
        let xbar = mean(&xi);
        let coords = s.coordinates(&xi).unwrap();
        let mut methods = polynomial_methods(&g, &w, &s, &xi);
        let sigma = spectral_measure_of_signal(&s, &xi)
            .unwrap()
            .aggregated(AGGREGATION_TOLERANCE);
        // t_max above the support size, so the degree is the support size.
        let oracle = oracle_from_measure(&sigma, g.n() + 1).unwrap();
        let deg = oracle.degree();
        methods.push((
            "parameter-free".into(),
            Box::new(ParameterFree::new(&w, &xi).unwrap()),
            Box::new(move |t, l| if t >= deg { 0.0 } else { oracle.evaluate(t, l) }),
        ));
        for (name, it, p) in methods.iter_mut() {
            for t in 0..=25 {
                if t > 0 {
                    it.step();
                }
                let got = consensus_error_sq(it.estimate(), xbar);
                let want = predicted_error_sq(&s, &coords, |l| p(t, l));
                let diff = (got - want).abs();
                if diff > worst {
                    worst = diff;
                    where_ = format!("{name} on graph {k} at t={t}");
                }
            }
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |error² - spectral sum| {worst:.2e} (tol 1e-8) at {where_}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_final: f64 = 0.0;
    let mut detail = String::new();
    for k in 0..10 {
        let (g, w) = small_instance(20 + k);
        let s = eigendecompose(&w).unwrap();
        let xi = gaussian(g.n(), 200 + k);
        let xbar = mean(&xi);
        let n = g.n() as f64;
        let horizon = s.distinct_nonunit_eigenvalues(1e-8);
        let t_max = horizon.max(25);
        let mut pf = ParameterFree::new(&w, &xi).unwrap();
        let pf_err: Vec<f64> = (0..=t_max)
            .map(|t| {
                if t > 0 {
                    pf.step();
                }
                consensus_error_sq(pf.estimate(), xbar).sqrt()
            })
            .collect();
        let fin = pf_err[horizon] / n.sqrt();
        worst_final = worst_final.max(fin);
        for (name, mut it, _) in polynomial_methods(&g, &w, &s, &xi) {
            for (t, &pe) in pf_err.iter().enumerate() {
                if t > 0 {
                    it.step();
                }
                let excess = pe - consensus_error_sq(it.estimate(), xbar).sqrt();
                if excess > worst_excess {
                    worst_excess = excess;
                    detail = format!("{name} on graph {k} at t={t}");
                }
            }
        }
    }
    let mut complete_worst: f64 = 0.0;
    for n in 2..=12 {
        let g = GraphSpec::Complete { n }.generate().unwrap();
        let w = build_gossip_matrix(&g, MatrixKind::UniformDegree { d_max: None }).unwrap();
        let xi = gaussian(n, 300 + n as u64);
        let mut pf = ParameterFree::new(&w, &xi).unwrap();
        pf.step();
        complete_worst =
            complete_worst.max((consensus_error_sq(pf.estimate(), mean(&xi)) / n as f64).sqrt());
    }
    outcome(
        worst_excess <= 1e-9 && worst_final <= 1e-8 && complete_worst <= 1e-8,
        format!(
            "max excess over other methods {worst_excess:.2e} (tol 1e-9, {detail}); error at T {worst_final:.2e}; K_n after one round {complete_worst:.2e} (tol 1e-8)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let n = 20 + 9 * k as usize;
        let g = GraphSpec::RandomTree { n, seed: k }.generate().unwrap();
        let xi = gaussian(n, 400 + k);
        let diameter = (0..n).map(|v| eccentricity(&g, v)).max().unwrap();
        let mut mp = MessagePassing::new(&g, &xi).unwrap();
        for t in 1..=diameter {
            mp.step();
            let exact = local_average_oracle(&g, &xi, t);
            for (a, b) in mp.estimate().iter().zip(&exact) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max deviation from ball averages {worst:.2e} (tol 1e-10)"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let g = GraphSpec::RandomRegular { n: 50, d: 3, seed }
            .generate()
            .unwrap();
        let w = build_gossip_matrix(&g, MatrixKind::AdjacencyOverDegree).unwrap();
        let xi = gaussian(50, 500 + seed);
        let mut its: Vec<Box<dyn GossipIteration>> = vec![
            Box::new(MessagePassing::new(&g, &xi).unwrap()),
            Box::new(MessagePassingRegular::new(&g, &xi).unwrap()),
            Box::new(PolynomialIteration::kesten_mckay(&w, &xi, 3).unwrap()),
        ];
        for _ in 0..30 {
            its.iter_mut().for_each(|it| it.step());
            for other in &its[1..] {
                for (a, b) in its[0].estimate().iter().zip(other.estimate()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("max pairwise deviation {worst:.2e} (tol 1e-9)"),
    )
}

fn criterion_7() -> Outcome {
    let records = run_consensus_experiment(&preset("grid2d", 42).unwrap()).unwrap();
    let curve = |m: &str| {
        mean_curve(&records, m, Metric::ConsensusError)
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
    };
    let (jac, simple, shift) = (curve("jacobi:2"), curve("simple"), curve("shift-register"));
    let slack = 1e-12;
    let a = (5..=50).all(|t| jac[t] <= simple[t] + slack);
    let b = (5..=30).all(|t| simple[t] <= shift[t] + slack);
    let c = shift[150] < jac[150];
    outcome(
        a && b && c,
        format!(
            "jacobi<=simple on [5,50]: {a}; simple<=shift-register on [5,30]: {b}; at t=150 shift-register {:.3e} < jacobi {:.3e}: {c}",
            shift[150], jac[150]
        ),
    )
}

fn criterion_8() -> Outcome {
    let cfg = ExperimentConfig {
        graph: GraphSpec::Torus {
            dims: vec![200, 200],
        },
        matrix: MatrixKind::UniformDegree { d_max: None },
        methods: vec![MethodSpec::Jacobi { d: 2.0 }, MethodSpec::Simple],
        t_max: 20,
        repetitions: 10,
        seed: 8,
        signal: Signal::Gaussian {
            mean: 0.0,
            variance: 1.0,
        },
    };
    let records = run_mse_experiment(&cfg).unwrap();
    let slope = |m: &str| {
        fit_rate_of(&records, m, (4, 20), RateKind::LogLog, Metric::Mse)
            .unwrap()
            .value
    };
    let (j, s) = (slope("jacobi:2"), slope("simple"));
    outcome(
        (j + 2.0).abs() <= 0.4 && (s + 1.0).abs() <= 0.3,
        format!("log-log MSE slope jacobi:2 {j:.3} (want -2 ± 0.4), simple {s:.3} (want -1 ± 0.3)"),
    )
}

fn criterion_9() -> Outcome {
    let n = 50;
    let g = GraphSpec::Cycle { n }.generate().unwrap();
    let w = build_gossip_matrix(&g, MatrixKind::UniformDegree { d_max: None }).unwrap();
    let gamma = gaps(&w).unwrap().0;
    // Antisymmetric under v -> v + n/2, so the average stays exactly zero and
    // the error is not floored by round-off in the average.
    let xi: Vec<f64> = (0..n).map(|v| if v < n / 2 { 1.0 } else { -1.0 }).collect();
    let mut it = JacobiGapIteration::new(&w, &xi, 1.0, gamma).unwrap();
    let records = record_run(&mut it, "jacobi-gap", 0, 500, 0.0, None);
    let rate = fit_rate(&records, "jacobi-gap", (200, 500), RateKind::Geometric)
        .unwrap()
        .value;
    let bound = jacobi_gap_rate(gamma);
    outcome(
        rate <= bound + 0.02,
        format!("gamma {gamma:.5}, fitted ratio {rate:.5} <= bound {bound:.5} + 0.02"),
    )
}

fn mp_rate_bound(d: f64, gamma_tilde: f64) -> f64 {
    let edge = 2.0 * (d - 1.0).sqrt() / d;
    let denom = 1.0 + (1.0 - edge * edge).sqrt();
    if gamma_tilde >= 1.0 - edge {
        edge / denom
    } else {
        let r = 1.0 - gamma_tilde;
        (r + (r * r - edge * edge).sqrt()) / denom
    }
}

fn criterion_10() -> Outcome {
    let threshold = 1.0 - 2.0 * 2f64.sqrt() / 3.0;
    let (g, gamma_tilde) = (0u64..)
        .map(|seed| {
            let g = GraphSpec::RandomRegular { n: 200, d: 3, seed }
                .generate()
                .unwrap();
            let gt = gaps(&build_gossip_matrix(&g, MatrixKind::AdjacencyOverDegree).unwrap())
                .unwrap()
                .1;
            (g, gt)
        })
        .find(|&(_, gt)| gt >= threshold)
        .unwrap();
    let xi = gaussian(200, 600);
    let mut mp = MessagePassing::new(&g, &xi).unwrap();
    let records = record_run(&mut mp, "mp", 0, 40, mean(&xi), None);
    let rate_random = fit_rate(&records, "mp", (10, 40), RateKind::Geometric)
        .unwrap()
        .value;
    let bound_random = mp_rate_bound(3.0, gamma_tilde);

    // Möbius ladder: cycle plus antipodal chords, 3-regular with a small
    // absolute gap.
    let n = 40;
    let edges = (0..n)
        .map(|i| (i, (i + 1) % n))
        .chain((0..n / 2).map(|i| (i, i + n / 2)));
    let ladder = Graph::from_edges(n, edges).unwrap();
    let gt_ladder = gaps(&build_gossip_matrix(&ladder, MatrixKind::AdjacencyOverDegree).unwrap())
        .unwrap()
        .1;
    // Antisymmetric under the half-turn, so the average is exactly zero.
    let xi: Vec<f64> = (0..n)
        .map(|i| {
            if i < n / 2 {
                (i as f64).sin() + 0.3
            } else {
                -((i - n / 2) as f64).sin() - 0.3
            }
        })
        .collect();
    let mut mp = MessagePassing::new(&ladder, &xi).unwrap();
    let records = record_run(&mut mp, "mp", 0, 600, 0.0, None);
    let rate_ladder = fit_rate(&records, "mp", (200, 600), RateKind::Geometric)
        .unwrap()
        .value;
    let bound_ladder = mp_rate_bound(3.0, gt_ladder);
    outcome(
        gamma_tilde < 1.0 && rate_random <= bound_random + 0.03 && gt_ladder < threshold && rate_ladder <= bound_ladder + 0.03,
        format!(
            "random 3-regular: gamma~ {gamma_tilde:.4}, ratio {rate_random:.4} <= {bound_random:.4} + 0.03; ladder: gamma~ {gt_ladder:.5}, ratio {rate_ladder:.5} <= {bound_ladder:.5} + 0.03"
        ),
    )
}

fn criterion_11() -> Outcome {
    let dir = std::env::temp_dir().join(format!("polygossip-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str| -> PathBuf {
        let path = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_polygossip"))
            .args(["reproduce", "--figure", "grid2d", "--seed", "42", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success(), "reproduce exited with {status}");
        path
    };
    let (a, b) = (
        std::fs::read(run("a.csv")).unwrap(),
        std::fs::read(run("b.csv")).unwrap(),
    );
    std::fs::remove_dir_all(&dir).ok();
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    outcome(
        a == b && lines > 1,
        format!("{} bytes, {lines} lines, identical: {}", a.len(), a == b),
    )
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        (1, "coefficient identities", 1, criterion_1),
        (2, "oracle consistency", 10, criterion_2),
        (3, "spectral identity", 10, criterion_3),
        (
            4,
            "parameter-free optimality and perfect gossip",
            10,
            criterion_4,
        ),
        (5, "tree exactness", 10, criterion_5),
        (6, "regular-graph equivalences", 5, criterion_6),
        (7, "grid method ordering", 60, criterion_7),
        (8, "MSE rates", 120, criterion_8),
        (9, "gap-variant rate", 10, criterion_9),
        (10, "message-passing rate", 20, criterion_10),
        (11, "reproducibility", 120, criterion_11),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(o) => (o.ok, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked: {}", msg.unwrap_or_default()))
            }
        };
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {detail} [{:.2}s, budget {budget}s{}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
