use dmt_core::channel::{
    eigen_spectrum, sample_channel, AntennaConfig, CorrelationMatrix, EigenSpectrum,
};
use dmt_core::rng::stream_rng;
use dmt_core::Complex64;
use proptest::prelude::*;

/// Determinant of a small complex matrix by Gaussian elimination with pivoting.
fn det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].norm().total_cmp(&a[j * n + c].norm())).unwrap();
        if a[p * n + c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            d = -d;
        }
        d *= a[c * n + c];
        for i in c + 1..n {
            let f = a[i * n + c] / a[c * n + c];
            for k in c..n {
                let v = a[c * n + k];
                a[i * n + k] -= f * v;
            }
        }
    }
    d
}

fn entries(m: &CorrelationMatrix) -> Vec<Complex64> {
    let n = m.dim();
    (0..n * n).map(|k| m.entry(k / n, k % n)).collect()
}

/// `det(R - lambda I)` relative to the scale of `R`.
fn char_residual(m: &CorrelationMatrix, lambda: f64) -> f64 {
    let n = m.dim();
    let mut a = entries(m);
    for i in 0..n {
        a[i * n + i] -= lambda;
    }
    det(a, n).norm()
}

#[test]
fn two_by_two_single_coefficient() {
    for rho in [0.0, 0.3, 0.5, 0.9, 0.999] {
        let s = eigen_spectrum(&CorrelationMatrix::single_coefficient(rho, 2).unwrap()).unwrap();
        assert!((s.values()[0] - (1.0 + rho)).abs() < 1e-12);
        assert!((s.values()[1] - (1.0 - rho)).abs() < 1e-12);
    }
}

#[test]
fn entries_follow_squared_distance() {
    let m = CorrelationMatrix::single_coefficient(0.7, 4).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let d = (i as i32 - j as i32).pow(2);
            assert!((m.entry(i, j).re - 0.7f64.powi(d)).abs() < 1e-15);
            assert_eq!(m.entry(i, j).im, 0.0);
        }
    }
}

#[test]
fn eigenvalues_are_roots_of_the_characteristic_polynomial() {
    for n in 3..=6 {
        for rho in [0.2, 0.5, 0.9] {
            let m = CorrelationMatrix::single_coefficient(rho, n).unwrap();
            let s = eigen_spectrum(&m).unwrap();
            assert!((s.values().iter().sum::<f64>() - n as f64).abs() < 1e-10);
            let prod: f64 = s.values().iter().product();
            assert!((prod - det(entries(&m), n).re).abs() < 1e-10);
            for &lambda in s.values() {
                assert!(char_residual(&m, lambda) < 1e-9, "n={n} rho={rho} lambda={lambda}");
            }
        }
    }
}

#[test]
fn complex_hermitian_spectrum() {
    let c = Complex64::new;
    let a = c(0.4, -0.3);
    let m = CorrelationMatrix::from_entries(2, vec![c(1.0, 0.0), a, a.conj(), c(1.0, 0.0)]).unwrap();
    let s = eigen_spectrum(&m).unwrap();
    assert!((s.values()[0] - 1.5).abs() < 1e-12);
    assert!((s.values()[1] - 0.5).abs() < 1e-12);
}

#[test]
fn invalid_correlations() {
    assert!(CorrelationMatrix::single_coefficient(1.0, 2).is_err());
    assert!(CorrelationMatrix::single_coefficient(-0.1, 2).is_err());
    let c = Complex64::new;
    // not Hermitian
    let m = CorrelationMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.5, 0.0), c(0.2, 0.0), c(1.0, 0.0)]);
    assert!(m.is_err() || eigen_spectrum(&m.unwrap()).is_err());
    assert!(EigenSpectrum::new(vec![1.5, 0.4]).is_err());
}

#[test]
fn kronecker_second_moments() {
    // E[h_ij conj(h_kl)] = R_r[i,k] R_t[l,j]
    let c = Complex64::new;
    let a = c(0.5, 0.3);
    let r_t = CorrelationMatrix::from_entries(2, vec![c(1.0, 0.0), a, a.conj(), c(1.0, 0.0)]).unwrap();
    let r_r = CorrelationMatrix::single_coefficient(0.6, 2).unwrap();
    let cfg = AntennaConfig::new(2, 2).unwrap();
    let n = 200_000;
    let mut rng = stream_rng(11, 0);
    let mut acc = vec![Complex64::new(0.0, 0.0); 16];
    for _ in 0..n {
        let h = sample_channel(cfg, &r_t, &r_r, &mut rng).unwrap();
        let e = h.entries();
        for p in 0..4 {
            for q in 0..4 {
                acc[p * 4 + q] += e[p] * e[q].conj();
            }
        }
    }
    for p in 0..4 {
        for q in 0..4 {
            let (i, j, k, l) = (p / 2, p % 2, q / 2, q % 2);
            let want = r_r.entry(i, k) * r_t.entry(l, j);
            let got = acc[p * 4 + q] / n as f64;
            assert!((got - want).norm() < 0.02, "({i}{j},{k}{l}): {got} vs {want}");
        }
    }
}

#[test]
fn uncorrelated_entries_have_unit_variance() {
    let cfg = AntennaConfig::new(3, 2).unwrap();
    let id_t = CorrelationMatrix::identity(3).unwrap();
    let id_r = CorrelationMatrix::identity(2).unwrap();
    let mut rng = stream_rng(3, 1);
    let n = 100_000;
    let mut power = [0.0; 6];
    let mut mean = [Complex64::new(0.0, 0.0); 6];
    for _ in 0..n {
        let h = sample_channel(cfg, &id_t, &id_r, &mut rng).unwrap();
        for (k, e) in h.entries().iter().enumerate() {
            power[k] += e.norm_sqr();
            mean[k] += e;
        }
    }
    for k in 0..6 {
        assert!((power[k] / n as f64 - 1.0).abs() < 0.02);
        assert!((mean[k] / n as f64).norm() < 0.02);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectra_are_valid(n in 2usize..7, rho in 0.0f64..0.99) {
        let m = CorrelationMatrix::single_coefficient(rho, n).unwrap();
        let s = eigen_spectrum(&m).unwrap();
        prop_assert_eq!(s.len(), n);
        prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.values().iter().all(|&v| v > 0.0));
        for &lambda in s.values() {
            prop_assert!(char_residual(&m, lambda) < 1e-8);
        }
    }
}
