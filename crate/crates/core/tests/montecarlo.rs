use dmt_core::channel::{eigen_spectrum, AntennaConfig, CorrelationMatrix, EigenSpectrum};
use dmt_core::diversity::optimized_estimate;
use dmt_core::montecarlo::{diversity_fd, outage_mc, sample_delta, McConfig};
use dmt_core::outage::{OperatingPoint, OutageModel};
use dmt_core::quadform::{branch_mixture, gamma_inc};
use dmt_core::rng::stream_rng;

/// SISO outage `1 - exp(-((1 + eta)^r - 1)/eta)`.
fn siso_outage(r: f64, eta: f64) -> f64 {
    1.0 - (-((1.0 + eta).powf(r) - 1.0) / eta).exp()
}

/// `-eta d ln P / d eta` of the SISO closed form, differentiated by hand.
fn siso_diversity(r: f64, eta: f64) -> f64 {
    let u = ((1.0 + eta).powf(r) - 1.0) / eta;
    let du = (r * (1.0 + eta).powf(r - 1.0) * eta - ((1.0 + eta).powf(r) - 1.0)) / (eta * eta);
    let p = 1.0 - (-u).exp();
    -eta * (-u).exp() * du / p
}

fn ks_distance(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn siso() -> (AntennaConfig, CorrelationMatrix) {
    (AntennaConfig::new(1, 1).unwrap(), CorrelationMatrix::identity(1).unwrap())
}

#[test]
fn siso_outage_within_three_sigma() {
    let (cfg, r_t) = siso();
    let mc = McConfig::new(1_000_000, 42, 64).unwrap();
    let op = OperatingPoint::new(10.0, 0.5).unwrap();
    let res = outage_mc(&op, cfg, &r_t, &mc).unwrap();
    let exact = siso_outage(0.5, 10.0);
    assert!((res.p_out - exact).abs() <= 3.0 * res.stderr, "{} vs {exact}", res.p_out);
    let se = (res.p_out * (1.0 - res.p_out) / 1e6).sqrt();
    assert!((res.stderr - se).abs() < 1e-15);
}

#[test]
fn correlation_raises_outage() {
    let cfg = AntennaConfig::new(2, 2).unwrap();
    let mc = McConfig::new(1_000_000, 42, 64).unwrap();
    let op = OperatingPoint::from_db(10.0, 1.0).unwrap();
    let p0 = outage_mc(&op, cfg, &CorrelationMatrix::identity(2).unwrap(), &mc).unwrap();
    let p9 = outage_mc(&op, cfg, &CorrelationMatrix::single_coefficient(0.9, 2).unwrap(), &mc).unwrap();
    assert!(p9.p_out > p0.p_out + 3.0 * (p0.stderr + p9.stderr));
}

#[test]
fn closed_form_central_difference_converges_quadratically() {
    let (r, eta) = (0.5, 10.0);
    let exact = siso_diversity(r, eta);
    let fd = |step: f64| {
        let (lo, hi) = (eta * (1.0 - step), eta * (1.0 + step));
        -eta * (siso_outage(r, hi).ln() - siso_outage(r, lo).ln()) / (hi - lo)
    };
    assert!(((fd(1e-2) - exact) / exact).abs() < 1e-2);
    let (e1, e2) = ((fd(1e-2) - exact).abs(), (fd(5e-3) - exact).abs());
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}");
}

#[test]
fn siso_diversity_fd_matches_closed_form() {
    let (cfg, r_t) = siso();
    let mc = McConfig::new(1_000_000, 42, 64).unwrap();
    let op = OperatingPoint::new(10.0, 0.5).unwrap();
    let fd = diversity_fd(&op, cfg, &r_t, &mc, 1e-2).unwrap();
    let exact = siso_diversity(0.5, 10.0);
    assert!((fd.value - exact).abs() <= 3.0 * fd.stderr + 1e-2 * exact, "{} +- {} vs {exact}", fd.value, fd.stderr);
    assert!((fd.p_minus - siso_outage(0.5, 9.9)).abs() < 5e-3);
}

#[test]
fn diversity_fd_near_estimate_at_15_db() {
    // 2x2 uncorrelated, r = 1, 15 dB: the analytic estimate is within 25% of simulation
    let cfg = AntennaConfig::new(2, 2).unwrap();
    let mc = McConfig::new(10_000_000, 42, 64).unwrap();
    let op = OperatingPoint::from_db(15.0, 1.0).unwrap();
    let fd = diversity_fd(&op, cfg, &CorrelationMatrix::identity(2).unwrap(), &mc, 1e-2).unwrap();
    let est = optimized_estimate(&OutageModel::uncorrelated(cfg), &op).unwrap();
    let rel = (fd.value - est.value).abs() / fd.value;
    assert!(rel <= 0.25, "simulated {} +- {}, estimate {}", fd.value, fd.stderr, est.value);
}

#[test]
fn reproducible_and_partition_consistent() {
    let cfg = AntennaConfig::new(2, 2).unwrap();
    let r_t = CorrelationMatrix::single_coefficient(0.5, 2).unwrap();
    let op = OperatingPoint::from_db(5.0, 1.0).unwrap();
    let mc = McConfig::new(100_000, 9, 16).unwrap();
    let a = outage_mc(&op, cfg, &r_t, &mc).unwrap();
    assert_eq!(a, outage_mc(&op, cfg, &r_t, &mc).unwrap());
    let other = outage_mc(&op, cfg, &r_t, &McConfig::new(100_000, 9, 5).unwrap()).unwrap();
    assert!((a.p_out - other.p_out).abs() <= 4.0 * (a.stderr + other.stderr));
    let seed = outage_mc(&op, cfg, &r_t, &McConfig::new(100_000, 10, 16).unwrap()).unwrap();
    assert_ne!(a.p_out, seed.p_out);
}

#[test]
fn delta_sample_means() {
    let cfg = AntennaConfig::new(3, 3).unwrap();
    let spectrum =
        eigen_spectrum(&CorrelationMatrix::single_coefficient(0.7, 3).unwrap()).unwrap();
    let d = spectrum.values();
    for l in 1..=3 {
        let mut rng = stream_rng(21, l as u64);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_delta(&spectrum, l, cfg, &mut rng).unwrap()).sum::<f64>() / n as f64;
        let want = d[l - 1] * (3 - l + 1) as f64 + d[l..].iter().sum::<f64>();
        assert!(((mean - want) / want).abs() < 1e-2, "l={l}: {mean} vs {want}");
    }
}

#[test]
fn uncorrelated_delta_is_gamma_three() {
    let cfg = AntennaConfig::new(2, 2).unwrap();
    let spectrum = EigenSpectrum::uncorrelated(2);
    let mut rng = stream_rng(42, 0);
    let draws: Vec<f64> = (0..1_000_000).map(|_| sample_delta(&spectrum, 1, cfg, &mut rng).unwrap()).collect();
    let ks = ks_distance(draws, |x| gamma_inc(x, 3).unwrap());
    assert!(ks <= 0.002, "KS = {ks}");
}

#[test]
fn mixture_cdf_matches_delta_draws() {
    let cfg = AntennaConfig::new(2, 2).unwrap();
    for rho in [0.5, 0.9] {
        let spectrum =
            eigen_spectrum(&CorrelationMatrix::single_coefficient(rho, 2).unwrap()).unwrap();
        for l in 1..=2 {
            let mix = branch_mixture(&spectrum, cfg, l).unwrap();
            let mut rng = stream_rng(42, l as u64);
            let draws: Vec<f64> =
                (0..1_000_000).map(|_| sample_delta(&spectrum, l, cfg, &mut rng).unwrap()).collect();
            let ks = ks_distance(draws, |x| mix.cdf(x));
            assert!(ks <= 0.002, "rho={rho} l={l}: KS = {ks}");
        }
    }
}
