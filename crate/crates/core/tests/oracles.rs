//! Pair quantities and sampling checked against routes that share no code
//! with the implementation: composite Simpson sums, Monte Carlo and
//! Kolmogorov–Smirnov tests against the analytic CDFs.

use pushout_aoi_core::dist::{
    dm_e_s_given_x_gt_s, pair_quantities, pair_quantities_monte_carlo, DistributionSpec, Method,
    OracleConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn det(v: f64) -> DistributionSpec {
    DistributionSpec::deterministic(v).unwrap()
}
fn exp(r: f64) -> DistributionSpec {
    DistributionSpec::exponential(r).unwrap()
}
fn unif(a: f64, b: f64) -> DistributionSpec {
    DistributionSpec::uniform(a, b).unwrap()
}
fn gamma(k: f64, r: f64) -> DistributionSpec {
    DistributionSpec::gamma(k, r).unwrap()
}

fn quad_only() -> OracleConfig {
    OracleConfig { monte_carlo_fallback: false, ..OracleConfig::default() }
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn dm_conditional_service_matches_simpson() {
    for &(beta, delta) in &[(1.0, 1.0), (2.0, 1.0), (0.3, 2.5), (10.0, 0.7)] {
        let c = 1.0 / beta;
        let num = simpson(|s| s * delta * (-delta * s).exp(), 0.0, c, 20_000);
        let oracle = num / (1.0 - (-delta * c).exp());
        let got = dm_e_s_given_x_gt_s(beta, delta);
        assert!((got - oracle).abs() < 1e-12, "β={beta} δ={delta}: {got} vs {oracle}");
    }
    // Frozen from the oracle above (and an independent 30-digit quadrature).
    assert!((dm_e_s_given_x_gt_s(1.0, 1.0) - 0.418_023_293_130_673_6).abs() < 1e-12);
    assert!((dm_e_s_given_x_gt_s(2.0, 1.0) - 0.229_252_958_731_600_86).abs() < 1e-12);
    assert!((dm_e_s_given_x_gt_s(1e-4, 1.0) - 1.0).abs() < 1e-12);
}

#[test]
fn uniform_exponential_zeta() {
    // ζ = ∫₀² ½ (1 - e^{-x}) dx = ½ (1 + e^{-2})
    let want = 0.5 * (1.0 + (-2.0f64).exp());
    let pq = pair_quantities(&unif(0.0, 2.0), &exp(1.0), &quad_only()).unwrap();
    assert_eq!(pq.method, Method::Quadrature);
    assert!((pq.zeta - want).abs() < 1e-9);
    assert!((pq.zeta - 0.567_667_641_618_306_3).abs() < 1e-9);

    let mc = pair_quantities_monte_carlo(&unif(0.0, 2.0), &exp(1.0), 10_000_000, 11);
    let se = mc.std_errors.unwrap();
    assert!((mc.zeta - want).abs() < 3.0 * se.zeta, "{} vs {want} (se {})", mc.zeta, se.zeta);
}

#[test]
fn closed_forms_match_simpson_integrals() {
    // M/M with β = 0.7, δ = 1.9: integrate against the joint density.
    let (b, d) = (0.7f64, 1.9f64);
    let top = 60.0;
    let n = 200_000;
    let zeta = simpson(|x| b * (-b * x).exp() * (1.0 - (-d * x).exp()), 0.0, top, n);
    let mean_min = simpson(|t| (-(b + d) * t).exp(), 0.0, top, n);
    let s_gt = simpson(|s| s * d * (-d * s).exp() * (-b * s).exp(), 0.0, top, n);
    let x_gt = simpson(|x| x * b * (-b * x).exp() * (1.0 - (-d * x).exp()), 0.0, top, n);
    let pq = pair_quantities(&exp(b), &exp(d), &quad_only()).unwrap();
    assert_eq!(pq.method, Method::ClosedForm);
    assert!((pq.zeta - zeta).abs() < 1e-10);
    assert!((pq.mean_min - mean_min).abs() < 1e-10);
    assert!((pq.partial.s_when_x_gt_s - s_gt).abs() < 1e-10);
    assert!((pq.partial.x_when_x_gt_s - x_gt).abs() < 1e-10);

    // D/M with c = 1.3, δ = 0.8.
    let (c, d) = (1.3f64, 0.8f64);
    let pq = pair_quantities(&det(c), &exp(d), &quad_only()).unwrap();
    assert_eq!(pq.method, Method::ClosedForm);
    let zeta = simpson(|s| d * (-d * s).exp(), 0.0, c, 20_000);
    let s_gt = simpson(|s| s * d * (-d * s).exp(), 0.0, c, 20_000);
    let mean_min = simpson(|t| (-d * t).exp(), 0.0, c, 20_000);
    assert!((pq.zeta - zeta).abs() < 1e-12);
    assert!((pq.partial.s_when_x_gt_s - s_gt).abs() < 1e-12);
    assert!((pq.mean_min - mean_min).abs() < 1e-12);
}

fn supported_pairs() -> Vec<(DistributionSpec, DistributionSpec)> {
    let laws = [
        det(0.8),
        det(2.0),
        exp(1.0),
        exp(3.0),
        unif(0.0, 2.0),
        unif(0.1, 2.0),
        unif(0.5, 0.9),
        gamma(2.0, 2.0),
        gamma(0.5, 1.0),
        gamma(5.0, 3.0),
    ];
    let mut out = Vec::new();
    for x in laws {
        for s in laws {
            if x == s && x.is_deterministic() {
                continue;
            }
            out.push((x, s));
        }
    }
    out
}

#[test]
fn factorization_identities_hold_for_every_pair() {
    for (x, s) in supported_pairs() {
        let pq = pair_quantities(&x, &s, &quad_only()).unwrap();
        let tol = match pq.method {
            Method::ClosedForm => 1e-12,
            _ => 1e-9,
        };
        let p = &pq.partial;
        // E(X ∧ S) = E(S; X > S) + E(X; S > X)
        assert!(
            (p.s_when_x_gt_s + p.x_when_s_gt_x - pq.mean_min).abs() <= tol,
            "{x:?} {s:?}: {pq:?}"
        );
        // E X = E(X; X > S) + E(X; S > X)
        assert!((p.x_when_x_gt_s + p.x_when_s_gt_x - x.mean()).abs() <= tol, "{x:?} {s:?}");
        assert!((0.0..=1.0).contains(&pq.zeta));
        assert!(pq.mean_min <= x.mean().min(s.mean()) + tol);
    }
}

#[test]
fn deterministic_x_zeta_is_service_cdf() {
    for s in [exp(1.0), gamma(2.0, 2.0), gamma(0.5, 1.0), unif(0.1, 2.0), unif(0.0, 2.0)] {
        for c in [0.05, 0.3, 1.0, 1.7, 4.0] {
            let pq = pair_quantities(&det(c), &s, &quad_only()).unwrap();
            assert!((pq.zeta - s.cdf(c)).abs() < 1e-10, "{s:?} c={c}: {} vs {}", pq.zeta, s.cdf(c));
        }
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let pairs = [
        (unif(0.0, 2.0), gamma(2.0, 2.0)),
        (gamma(2.0, 1.0), unif(0.1, 2.0)),
        (exp(1.0), gamma(0.5, 1.0)),
        (det(1.0), gamma(2.0, 2.0)),
        (gamma(3.0, 2.0), det(1.0)),
    ];
    for (i, (x, s)) in pairs.into_iter().enumerate() {
        let q = pair_quantities(&x, &s, &quad_only()).unwrap();
        let mc = pair_quantities_monte_carlo(&x, &s, 1_000_000, 100 + i as u64);
        let se = mc.std_errors.unwrap();
        assert!((q.zeta - mc.zeta).abs() < 3.0 * se.zeta, "{x:?} {s:?} zeta");
        assert!((q.mean_min - mc.mean_min).abs() < 3.0 * se.mean_min, "{x:?} {s:?} mean_min");
    }
}

/// One-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    // Asymptotic critical value at α = 0.01.
    let critical = 1.628 / (n as f64).sqrt();
    for (i, spec) in [exp(1.0), exp(0.25), unif(0.0, 2.0), unif(0.1, 2.0), gamma(2.0, 2.0), gamma(0.5, 1.0)]
        .into_iter()
        .enumerate()
    {
        let mut rng = ChaCha8Rng::seed_from_u64(2024 + i as u64);
        let draws: Vec<f64> = (0..n).map(|_| spec.sample(&mut rng)).collect();
        assert!(draws.iter().all(|&v| v >= 0.0));
        let d = ks_statistic(draws, |x| spec.cdf(x));
        assert!(d < critical, "{spec:?}: D = {d} ≥ {critical}");
    }
}

#[test]
fn reversed_deterministic_pair_is_undefined_downstream() {
    let pq = pair_quantities(&det(1.0), &det(2.0), &quad_only()).unwrap();
    assert_eq!(pq.zeta, 0.0);
    assert!(pq.e_s_given_x_gt_s().is_none());
}
