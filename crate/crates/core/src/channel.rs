//! Antenna configurations, transmit/receive correlation, and Kronecker-model
//! channel sampling.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::linalg::{CMat, HermitianEigen};
use crate::rng::complex_gaussian;
use crate::{Error, Result};

/// Tolerance on entrywise Hermitian symmetry and on the unit diagonal.
const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues down to `-NEGATIVE_EIG_TOL * dim` are rounding noise and are clamped to 0.
const NEGATIVE_EIG_TOL: f64 = 1e-10;
/// Eigenvalues within this relative distance are treated as repeated.
pub const REPEATED_EIG_RTOL: f64 = 1e-9;
/// Tolerance for "this spectrum is the uncorrelated all-ones spectrum".
const UNCORRELATED_TOL: f64 = 1e-12;

/// Transmit and receive antenna counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    n_t: usize,
    n_r: usize,
}

impl AntennaConfig {
    pub fn new(n_t: usize, n_r: usize) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::invalid(format!(
                "antenna counts must be positive (n_t = {n_t}, n_r = {n_r})"
            )));
        }
        Ok(AntennaConfig { n_t, n_r })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Number of spatial branches, `min(n_t, n_r)`.
    pub fn t(&self) -> usize {
        self.n_t.min(self.n_r)
    }

    /// Array gain used to normalize the rate; equals `n_r`.
    pub fn array_gain(&self) -> f64 {
        self.n_r as f64
    }

    /// Total Gamma shape of branch `l` (1-based): `n_r + n_t - 2l + 1`.
    pub fn branch_shape(&self, l: usize) -> u32 {
        (self.n_r + self.n_t + 1 - 2 * l) as u32
    }
}

/// Hermitian correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub(crate) m: CMat,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("correlation matrix dimension must be positive"));
        }
        Ok(CorrelationMatrix { m: CMat::identity(dim) })
    }

    /// Single-coefficient model: entry `(i, j)` is `rho^((i - j)^2)`.
    ///
    /// `rho = 1` gives a rank-one matrix and is rejected.
    pub fn single_coefficient(rho: f64, dim: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::invalid(format!(
                "correlation coefficient must lie in [0, 1) so that the correlation matrix \
                 has full rank (got {rho})"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("correlation matrix dimension must be positive"));
        }
        let mut m = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let d = i.abs_diff(j) as i32;
                m[(i, j)] = Complex64::new(libm::pow(rho, f64::from(d * d)), 0.0);
            }
        }
        Ok(CorrelationMatrix { m })
    }

    /// Build from `dim * dim` row-major entries.
    ///
    /// Checks the shape, finiteness and unit diagonal; Hermitian symmetry and
    /// positive semi-definiteness are checked by [`eigen_spectrum`].
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {dim}x{dim} = {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("correlation matrix has non-finite entries"));
        }
        for i in 0..dim {
            let d = entries[i * dim + i];
            if (d.re - 1.0).abs() > HERMITIAN_TOL || d.im.abs() > HERMITIAN_TOL {
                return Err(Error::invalid(format!(
                    "correlation matrix must have unit diagonal (entry ({i},{i}) = {d})"
                )));
            }
        }
        Ok(CorrelationMatrix { m: CMat::from_vec(dim, dim, entries) })
    }

    pub fn dim(&self) -> usize {
        self.m.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = self.m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "correlation matrix is not Hermitian (max |A_ij - conj(A_ji)| = {defect:e})"
            )));
        }
        Ok(())
    }

    /// Eigen-decomposition with rounding-level negative eigenvalues clamped,
    /// rejecting anything more negative.
    fn eigen(&self) -> Result<HermitianEigen> {
        self.check_hermitian()?;
        let eig = HermitianEigen::new(&self.m);
        let tol = NEGATIVE_EIG_TOL * self.dim() as f64;
        if let Some(&min) = eig.eigenvalues().last() {
            if min < -tol {
                return Err(Error::NumericalFailure(format!(
                    "correlation matrix is not positive semi-definite (eigenvalue {min:e})"
                )));
            }
        }
        Ok(eig)
    }

    /// Principal square root `U diag(sqrt(lambda)) U^H`.
    pub(crate) fn sqrt(&self) -> Result<CMat> {
        Ok(self.eigen()?.apply(|w| libm::sqrt(w.max(0.0))))
    }
}

/// Eigenvalues of a transmit correlation matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    d_sq: Vec<f64>,
}

impl EigenSpectrum {
    /// Wrap explicit eigenvalues. They are sorted descending; they must be
    /// non-negative and sum to their count (unit-diagonal normalization).
    pub fn new(mut d_sq: Vec<f64>) -> Result<Self> {
        if d_sq.is_empty() {
            return Err(Error::invalid("eigen-spectrum must be non-empty"));
        }
        if d_sq.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::invalid("eigenvalues must be finite and non-negative"));
        }
        let n = d_sq.len() as f64;
        let sum: f64 = d_sq.iter().sum();
        if (sum - n).abs() > 1e-8 * n {
            return Err(Error::invalid(format!(
                "eigenvalues must sum to their count {n} (got {sum})"
            )));
        }
        d_sq.sort_by(|a, b| b.total_cmp(a));
        Ok(EigenSpectrum { d_sq })
    }

    /// The all-ones spectrum of an uncorrelated array.
    pub fn uncorrelated(n_t: usize) -> Self {
        EigenSpectrum { d_sq: alloc::vec![1.0; n_t] }
    }

    pub fn values(&self) -> &[f64] {
        &self.d_sq
    }

    pub fn len(&self) -> usize {
        self.d_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_sq.is_empty()
    }

    pub fn is_full_rank(&self) -> bool {
        self.d_sq.iter().all(|&d| d > 0.0)
    }

    /// All eigenvalues equal to one, i.e. no transmit correlation.
    pub fn is_uncorrelated(&self) -> bool {
        self.d_sq.iter().all(|&d| (d - 1.0).abs() <= UNCORRELATED_TOL)
    }
}

/// Descending eigenvalues of a correlation matrix.
pub fn eigen_spectrum(corr: &CorrelationMatrix) -> Result<EigenSpectrum> {
    let w = corr.eigen()?.eigenvalues();
    Ok(EigenSpectrum { d_sq: w.into_iter().map(|x| x.max(0.0)).collect() })
}

/// `n_r x n_t` channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub(crate) m: CMat,
}

impl ChannelMatrix {
    /// Build from `n_r * n_t` row-major entries.
    pub fn from_entries(n_r: usize, n_t: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n_r == 0 || n_t == 0 || entries.len() != n_r * n_t {
            return Err(Error::invalid("channel matrix shape does not match its entries"));
        }
        Ok(ChannelMatrix { m: CMat::from_vec(n_r, n_t, entries) })
    }

    pub fn n_r(&self) -> usize {
        self.m.rows
    }

    pub fn n_t(&self) -> usize {
        self.m.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.m.data
    }
}

/// Kronecker-model sampler `H = R_r^{1/2} H_w R_t^{1/2}` with the square
/// roots computed once.
#[derive(Debug, Clone)]
pub struct KroneckerChannel {
    cfg: AntennaConfig,
    // None when the factor is the identity
    rx_sqrt: Option<CMat>,
    tx_sqrt: Option<CMat>,
}

impl KroneckerChannel {
    pub fn new(
        cfg: AntennaConfig,
        r_t: &CorrelationMatrix,
        r_r: &CorrelationMatrix,
    ) -> Result<Self> {
        if r_t.dim() != cfg.n_t() || r_r.dim() != cfg.n_r() {
            return Err(Error::invalid(format!(
                "correlation dimensions ({}, {}) do not match n_t = {}, n_r = {}",
                r_t.dim(),
                r_r.dim(),
                cfg.n_t(),
                cfg.n_r()
            )));
        }
        let root = |c: &CorrelationMatrix| -> Result<Option<CMat>> {
            if c.m == CMat::identity(c.dim()) {
                Ok(None)
            } else {
                c.sqrt().map(Some)
            }
        };
        Ok(KroneckerChannel { cfg, rx_sqrt: root(r_r)?, tx_sqrt: root(r_t)? })
    }

    /// Transmit-side correlation only (receive side uncorrelated).
    pub fn transmit_only(cfg: AntennaConfig, r_t: &CorrelationMatrix) -> Result<Self> {
        Self::new(cfg, r_t, &CorrelationMatrix::identity(cfg.n_r())?)
    }

    pub fn config(&self) -> AntennaConfig {
        self.cfg
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> ChannelMatrix {
        let (n_r, n_t) = (self.cfg.n_r(), self.cfg.n_t());
        let mut h = CMat::zeros(n_r, n_t);
        for z in h.data.iter_mut() {
            *z = complex_gaussian(rng);
        }
        if let Some(rx) = &self.rx_sqrt {
            h = rx.mul(&h);
        }
        if let Some(tx) = &self.tx_sqrt {
            h = h.mul(tx);
        }
        ChannelMatrix { m: h }
    }
}

/// One draw of `R_r^{1/2} H_w R_t^{1/2}`.
pub fn sample_channel<R: RngCore + ?Sized>(
    cfg: AntennaConfig,
    r_t: &CorrelationMatrix,
    r_r: &CorrelationMatrix,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    Ok(KroneckerChannel::new(cfg, r_t, r_r)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use alloc::vec;

    #[test]
    fn antenna_config_derived_values() {
        let cfg = AntennaConfig::new(3, 2).unwrap();
        assert_eq!(cfg.t(), 2);
        assert_eq!(cfg.array_gain(), 2.0);
        assert_eq!(cfg.branch_shape(1), 4);
        assert_eq!(cfg.branch_shape(2), 2);
        assert!(AntennaConfig::new(0, 2).is_err());
        assert!(AntennaConfig::new(2, 0).is_err());
    }

    #[test]
    fn single_coefficient_entries() {
        let id = CorrelationMatrix::single_coefficient(0.0, 2).unwrap();
        assert_eq!(id, CorrelationMatrix::identity(2).unwrap());

        let half = CorrelationMatrix::single_coefficient(0.5, 2).unwrap();
        assert_eq!(half.entry(0, 1).re, 0.5);
        assert_eq!(half.entry(1, 0).re, 0.5);

        let c = CorrelationMatrix::single_coefficient(0.9, 3).unwrap();
        assert!((c.entry(0, 2).re - 0.6561).abs() < 1e-15);
        assert!((c.entry(0, 1).re - 0.9).abs() < 1e-15);
        for i in 0..3 {
            assert_eq!(c.entry(i, i).re, 1.0);
        }
    }

    #[test]
    fn single_coefficient_rejects_rank_deficient() {
        assert!(matches!(
            CorrelationMatrix::single_coefficient(1.0, 2),
            Err(Error::InvalidParameter(_))
        ));
        assert!(CorrelationMatrix::single_coefficient(-0.1, 2).is_err());
        assert!(CorrelationMatrix::single_coefficient(f64::NAN, 2).is_err());
    }

    #[test]
    fn spectra_of_two_by_two() {
        let id = eigen_spectrum(&CorrelationMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(id.values(), &[1.0, 1.0]);
        assert!(id.is_uncorrelated());

        for (rho, hi, lo) in [(0.9, 1.9, 0.1), (0.5, 1.5, 0.5)] {
            let s =
                eigen_spectrum(&CorrelationMatrix::single_coefficient(rho, 2).unwrap()).unwrap();
            assert!((s.values()[0] - hi).abs() < 1e-12, "{:?}", s);
            assert!((s.values()[1] - lo).abs() < 1e-12, "{:?}", s);
        }
    }

    #[test]
    fn spectrum_of_identity_is_all_ones() {
        for n in 1..=8 {
            let s = eigen_spectrum(&CorrelationMatrix::identity(n).unwrap()).unwrap();
            assert!(s.values().iter().all(|&d| d == 1.0));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let c = Complex64::new;
        let m = CorrelationMatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(0.5, 0.0), c(0.2, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(eigen_spectrum(&m), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rejects_indefinite() {
        // off-diagonal 1.5 gives eigenvalues 2.5 and -0.5
        let c = Complex64::new;
        let m = CorrelationMatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(1.5, 0.0), c(1.5, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(eigen_spectrum(&m), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn from_entries_checks_diagonal_and_shape() {
        let c = Complex64::new;
        assert!(CorrelationMatrix::from_entries(2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(CorrelationMatrix::from_entries(
            2,
            vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn spectrum_constructor_validation() {
        assert!(EigenSpectrum::new(vec![0.5, 1.5]).is_ok());
        assert_eq!(EigenSpectrum::new(vec![0.5, 1.5]).unwrap().values(), &[1.5, 0.5]);
        assert!(EigenSpectrum::new(vec![2.5, -0.5]).is_err());
        assert!(EigenSpectrum::new(vec![1.0, 2.0]).is_err());
        assert!(EigenSpectrum::new(vec![]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let cfg = AntennaConfig::new(2, 3).unwrap();
        let r2 = CorrelationMatrix::identity(2).unwrap();
        let mut rng = stream_rng(0, 0);
        assert!(sample_channel(cfg, &r2, &r2, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = AntennaConfig::new(2, 2).unwrap();
        let rt = CorrelationMatrix::single_coefficient(0.7, 2).unwrap();
        let rr = CorrelationMatrix::identity(2).unwrap();
        let a = sample_channel(cfg, &rt, &rr, &mut stream_rng(11, 3)).unwrap();
        let b = sample_channel(cfg, &rt, &rr, &mut stream_rng(11, 3)).unwrap();
        assert_eq!(a, b);
    }
}
