use dmt_core::channel::{eigen_spectrum, AntennaConfig, CorrelationMatrix, EigenSpectrum};
use dmt_core::quadform::{
    branch_mixture, gamma_inc, gamma_pdf, mgf, mixture_cdf, mixture_pdf, partial_fraction_weights,
    GammaMixture, MgfSpec,
};
use dmt_core::Complex64;
use proptest::prelude::*;

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

fn ln_fact(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn spectrum_2x2(rho: f64) -> EigenSpectrum {
    eigen_spectrum(&CorrelationMatrix::single_coefficient(rho, 2).unwrap()).unwrap()
}

fn mixtures() -> Vec<(String, GammaMixture)> {
    let mut out = Vec::new();
    for (nt, nr) in [(2, 2), (3, 3), (4, 2), (2, 4)] {
        let cfg = AntennaConfig::new(nt, nr).unwrap();
        for rho in [0.5, 0.9] {
            let spec =
                eigen_spectrum(&CorrelationMatrix::single_coefficient(rho, nt).unwrap()).unwrap();
            for l in 1..=cfg.t() {
                out.push((format!("{nt}x{nr} rho={rho} l={l}"), branch_mixture(&spec, cfg, l).unwrap()));
            }
        }
    }
    out
}

#[test]
fn gamma_inc_matches_quadrature() {
    for a in 1..=8u32 {
        for &x in &[1e-3f64, 0.1, 0.7, 2.0, 5.5, 12.0, 30.0] {
            let density = |u: f64| ((a - 1) as f64 * u.ln() - u - ln_fact(a - 1)).exp();
            let reference = if a == 1 { 1.0 - (-x).exp() } else { simpson(density, 0.0, x, 20_000) };
            let got = gamma_inc(x, a).unwrap();
            let tol = 1e-10 * reference.max(1e-300) + 1e-14;
            assert!((got - reference).abs() <= tol.max(1e-12 * reference), "P({a},{x}): {got} vs {reference}");
        }
    }
}

#[test]
fn gamma_inc_small_argument_keeps_relative_accuracy() {
    // leading term x^a / a! dominates for tiny x
    for a in 1..=6u32 {
        let x: f64 = 1e-8;
        let lead = (a as f64 * x.ln() - ln_fact(a)).exp();
        let next = lead * a as f64 * x / (a as f64 + 1.0);
        let got = gamma_inc(x, a).unwrap();
        assert!(((got - (lead - next)) / lead).abs() < 1e-12, "a={a}");
    }
}

#[test]
fn weights_sum_to_one() {
    for (name, mix) in mixtures() {
        assert!((mix.weight_sum() - 1.0).abs() <= 1e-8, "{name}: {}", mix.weight_sum());
    }
}

#[test]
fn mgf_reconstruction_at_twenty_points() {
    let cfg = AntennaConfig::new(2, 2).unwrap();
    for rho in [0.5, 0.9] {
        let spectrum = spectrum_2x2(rho);
        for l in 1..=2 {
            let spec = MgfSpec::for_branch(&spectrum, cfg, l).unwrap();
            let mix = partial_fraction_weights(&spec).unwrap();
            let beta_max = spectrum.values()[0];
            for k in 0..20 {
                // points scattered in the half plane Re s < 1/beta_max, away from the poles
                let angle = k as f64 * 0.7;
                let radius = (0.1 + 0.2 * k as f64) / beta_max;
                let s = Complex64::new(
                    -radius * angle.cos().abs() + 0.4 / beta_max,
                    radius * angle.sin(),
                );
                let exact = mgf(&spec, s).unwrap();
                // independent evaluation of sum w (1 - s beta)^-k
                let one = Complex64::new(1.0, 0.0);
                let recon: Complex64 = mix
                    .terms()
                    .iter()
                    .map(|t| (one - s * t.scale).powi(-(t.shape as i32)) * t.weight)
                    .sum();
                let rel = (recon - exact).norm() / exact.norm();
                assert!(rel <= 1e-8, "rho={rho} l={l} s={s}: rel err {rel}");
            }
        }
    }
}

#[test]
fn pdf_integrates_to_one() {
    for (name, mix) in mixtures() {
        let top = 60.0 * mix.mean();
        let mass = simpson(|x| mixture_pdf(&mix, x).unwrap(), 0.0, top, 40_000);
        assert!((mass - 1.0).abs() <= 1e-6, "{name}: {mass}");
        // cdf agrees with the integrated density at an interior point
        let x = mix.mean();
        let partial = simpson(|u| mixture_pdf(&mix, u).unwrap(), 0.0, x, 20_000);
        assert!((partial - mixture_cdf(&mix, x).unwrap()).abs() <= 1e-8, "{name}");
    }
}

#[test]
fn cdf_matches_convolution_oracle() {
    // Delta_1 = d1 Gamma(2) + d2 Exp for 2x2: F(x) = int_0^x g(u) (1 - e^{-(x-u)/d2}) du
    let cfg = AntennaConfig::new(2, 2).unwrap();
    for rho in [0.5, 0.9] {
        let spectrum = spectrum_2x2(rho);
        let (d1, d2) = (spectrum.values()[0], spectrum.values()[1]);
        let mix = branch_mixture(&spectrum, cfg, 1).unwrap();
        for &x in &[0.05, 0.3, 1.0, 2.5, 6.0] {
            let oracle = simpson(
                |u| gamma_pdf(u, 2, d1) * (1.0 - (-(x - u) / d2).exp()),
                0.0,
                x,
                20_000,
            );
            let got = mixture_cdf(&mix, x).unwrap();
            assert!((got - oracle).abs() <= 1e-9 + 1e-7 * oracle, "rho={rho} x={x}: {got} vs {oracle}");
        }
    }
}

#[test]
fn cdf_is_monotone_and_bounded() {
    for (name, mix) in mixtures() {
        let mut prev = 0.0;
        for k in 0..=2000 {
            let x = k as f64 * 0.02;
            let f = mixture_cdf(&mix, x).unwrap();
            assert!((0.0..=1.0).contains(&f), "{name}");
            assert!(f >= prev - 1e-15, "{name} at {x}");
            prev = f;
        }
    }
}

#[test]
fn density_vanishes_to_the_right_order_at_zero() {
    // f(x) ~ c x^{A-1}: the first A-1 derivatives at 0 vanish, so f(h)/h^{A-2} -> 0
    for (name, mix) in mixtures() {
        let a = mix.total_shape() as i32;
        if a > 1 {
            assert_eq!(mixture_pdf(&mix, 0.0).unwrap(), 0.0, "{name}");
        }
        let ratio = |h: f64| mixture_pdf(&mix, h).unwrap() / h.powi(a - 1);
        // f(h)/h^{A-1} tends to a finite positive constant
        let (c1, c2) = (ratio(1e-5), ratio(1e-6));
        assert!(c1 > 0.0 && ((c1 - c2) / c2).abs() < 1e-2, "{name}: {c1} {c2}");
        // one-sided difference quotients f(h)/h^k of orders k < A-1 shrink with h
        for order in 1..(a - 1) {
            let q = |h: f64| mixture_pdf(&mix, h).unwrap() / h.powi(order);
            let (coarse, fine) = (q(1e-5), q(1e-6));
            assert!(fine < coarse / 5.0, "{name}: order {order}: {coarse} -> {fine}");
        }
    }
}

#[test]
fn near_repeated_eigenvalues_degrade_gracefully() {
    // rho -> 0 makes the two poles merge; either a clean error or a valid law
    let cfg = AntennaConfig::new(2, 2).unwrap();
    for rho in [1e-3, 1e-6, 1e-12] {
        let spectrum = spectrum_2x2(rho);
        match branch_mixture(&spectrum, cfg, 1) {
            Ok(mix) => {
                let f = mixture_cdf(&mix, 3.0).unwrap();
                let uncorr = gamma_inc(3.0, 3).unwrap();
                assert!((f - uncorr).abs() < 1e-2, "rho={rho}");
            }
            Err(e) => assert!(matches!(e, dmt_core::Error::DegenerateSpectrum(_)), "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_spectra_give_valid_mixtures(
        raw in prop::collection::vec(0.05f64..1.0, 3),
        nr in 3usize..5,
        l in 1usize..=3,
    ) {
        let total: f64 = raw.iter().sum();
        let values: Vec<f64> = raw.iter().map(|v| 3.0 * v / total).collect();
        let spectrum = EigenSpectrum::new(values).unwrap();
        let cfg = AntennaConfig::new(3, nr).unwrap();
        match branch_mixture(&spectrum, cfg, l) {
            Ok(mix) => {
                prop_assert!((mix.weight_sum() - 1.0).abs() < 1e-8);
                let spec = MgfSpec::for_branch(&spectrum, cfg, l).unwrap();
                prop_assert!((mix.mean() - spec.mean()).abs() < 1e-8 * spec.mean());
                let mut prev = 0.0;
                for k in 1..50 {
                    let f = mixture_cdf(&mix, k as f64 * 0.25).unwrap();
                    prop_assert!(f >= prev - 1e-12 && f <= 1.0);
                    prev = f;
                }
            }
            Err(e) => prop_assert!(matches!(e, dmt_core::Error::DegenerateSpectrum(_))),
        }
    }
}
