//! Lower bounds on the outage probability and the rate-split optimizer.
//!
//! Bounding the mutual information by a sum of per-branch terms gives
//!
//! ```text
//! P_out >= prod_{l=1}^{t} P(Delta_l < xi_l),   xi_l = (n_t/eta) ((1 + g eta)^{b_l} - 1)
//! ```
//!
//! for any split `b` of the multiplexing gain `r`. Uncorrelated branches use
//! `P(n_r + n_t - 2l + 1, xi_l)`; correlated branches use the Gamma mixture
//! from [`crate::quadform`].

use alloc::format;
use alloc::vec::Vec;

use crate::channel::{AntennaConfig, EigenSpectrum};
use crate::optim::{compositions, NelderMead};
use crate::quadform::{branch_mixture, gamma_inc_unchecked, gamma_pdf_over_cdf, GammaMixture};
use crate::{Error, Result};

/// Grid resolution of the optimizer's first pass: steps of `r / GRID_DIVISIONS`.
const GRID_DIVISIONS: usize = 20;
const ALLOCATION_TOL: f64 = 1e-10;

/// Linear mean SNR per receive antenna and multiplexing gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    eta: f64,
    r: f64,
}

impl OperatingPoint {
    pub fn new(eta: f64, r: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid(format!("SNR must be positive and finite (got {eta})")));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("multiplexing gain must be >= 0 (got {r})")));
        }
        Ok(OperatingPoint { eta, r })
    }

    pub fn from_db(eta_db: f64, r: f64) -> Result<Self> {
        Self::new(db_to_linear(eta_db), r)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(eta, self.r)
    }

    /// Target spectral efficiency `R = r log2(1 + g eta)` in bit/s/Hz.
    pub fn rate(&self, cfg: AntennaConfig) -> f64 {
        self.r * libm::log2(1.0 + cfg.array_gain() * self.eta)
    }

    pub(crate) fn check(&self, cfg: AntennaConfig) -> Result<()> {
        if self.r > cfg.t() as f64 + ALLOCATION_TOL {
            return Err(Error::invalid(format!(
                "multiplexing gain {} exceeds min(n_t, n_r) = {}",
                self.r,
                cfg.t()
            )));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(eta: f64) -> f64 {
    10.0 * libm::log10(eta)
}

/// Non-negative split `b_1..b_t` of the multiplexing gain.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    b: Vec<f64>,
}

impl Allocation {
    pub fn new(b: Vec<f64>, r: f64) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::invalid("allocation must have at least one branch"));
        }
        if b.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid("allocation entries must be finite and non-negative"));
        }
        let sum: f64 = b.iter().sum();
        if (sum - r).abs() > ALLOCATION_TOL * r.max(1.0) {
            return Err(Error::invalid(format!(
                "allocation sums to {sum}, expected multiplexing gain {r}"
            )));
        }
        Ok(Allocation { b })
    }

    pub fn uniform(r: f64, t: usize) -> Result<Self> {
        Self::new(alloc::vec![r / t as f64; t], r)
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.b.iter().sum()
    }

    fn check(&self, op: &OperatingPoint, cfg: AntennaConfig) -> Result<()> {
        if self.b.len() != cfg.t() {
            return Err(Error::invalid(format!(
                "allocation has {} entries, expected t = {}",
                self.b.len(),
                cfg.t()
            )));
        }
        if (self.sum() - op.r).abs() > ALLOCATION_TOL * op.r.max(1.0) {
            return Err(Error::invalid(format!(
                "allocation sums to {}, expected r = {}",
                self.sum(),
                op.r
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    LowerBound,
    MonteCarlo,
}

/// An outage value and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    /// Zero for analytic bounds.
    pub stderr: f64,
    /// Maximizing split, for bounds.
    pub allocation: Option<Allocation>,
}

/// Per-branch threshold `xi_l = (n_t/eta) ((1 + g eta)^{b_l} - 1)`.
pub fn xi(b_l: f64, op: &OperatingPoint, cfg: AntennaConfig) -> f64 {
    let g_eta = cfg.array_gain() * op.eta;
    cfg.n_t() as f64 / op.eta * libm::expm1(b_l * libm::log1p(g_eta))
}

/// Law of `Delta_l` for one branch.
#[derive(Debug, Clone)]
pub enum BranchLaw {
    /// Gamma(shape, 1), the uncorrelated case.
    Uncorrelated { shape: u32 },
    Correlated(GammaMixture),
}

impl BranchLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            BranchLaw::Uncorrelated { shape } => gamma_inc_unchecked(x, *shape),
            BranchLaw::Correlated(mix) => mix.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            BranchLaw::Uncorrelated { shape } => crate::quadform::gamma_pdf(x, *shape, 1.0),
            BranchLaw::Correlated(mix) => mix.pdf(x),
        }
    }

    /// `pdf / cdf`, stable near zero.
    pub fn pdf_over_cdf(&self, x: f64) -> f64 {
        match self {
            BranchLaw::Uncorrelated { shape } => gamma_pdf_over_cdf(x, *shape),
            BranchLaw::Correlated(mix) => mix.pdf_over_cdf(x),
        }
    }

    pub fn total_shape(&self) -> u32 {
        match self {
            BranchLaw::Uncorrelated { shape } => *shape,
            BranchLaw::Correlated(mix) => mix.total_shape(),
        }
    }
}

/// The branch laws of the bound for one antenna configuration and spectrum.
///
/// Building the mixtures is the expensive part, so sweeps build one model per
/// spectrum and evaluate it at many operating points.
#[derive(Debug, Clone)]
pub struct OutageModel {
    cfg: AntennaConfig,
    branches: Vec<BranchLaw>,
    correlated: bool,
}

impl OutageModel {
    pub fn uncorrelated(cfg: AntennaConfig) -> Self {
        let branches =
            (1..=cfg.t()).map(|l| BranchLaw::Uncorrelated { shape: cfg.branch_shape(l) }).collect();
        OutageModel { cfg, branches, correlated: false }
    }

    /// Correlated model; the all-ones spectrum routes to the uncorrelated laws.
    pub fn new(cfg: AntennaConfig, spectrum: Option<&EigenSpectrum>) -> Result<Self> {
        let spectrum = match spectrum {
            None => return Ok(Self::uncorrelated(cfg)),
            Some(s) => s,
        };
        if spectrum.len() != cfg.n_t() {
            return Err(Error::invalid(format!(
                "spectrum has {} eigenvalues but n_t = {}",
                spectrum.len(),
                cfg.n_t()
            )));
        }
        if !spectrum.is_full_rank() {
            return Err(Error::invalid(
                "transmit correlation must have full rank (all eigenvalues > 0)",
            ));
        }
        if spectrum.is_uncorrelated() {
            return Ok(Self::uncorrelated(cfg));
        }
        let branches = (1..=cfg.t())
            .map(|l| branch_mixture(spectrum, cfg, l).map(BranchLaw::Correlated))
            .collect::<Result<Vec<_>>>()?;
        Ok(OutageModel { cfg, branches, correlated: true })
    }

    pub fn config(&self) -> AntennaConfig {
        self.cfg
    }

    pub fn is_correlated(&self) -> bool {
        self.correlated
    }

    pub fn branches(&self) -> &[BranchLaw] {
        &self.branches
    }

    /// Bound value for a split; `b.len()` must equal `t`.
    pub fn bound_with(&self, op: &OperatingPoint, b: &[f64]) -> f64 {
        self.branches.iter().zip(b).map(|(law, &bl)| law.cdf(xi(bl, op, self.cfg))).product()
    }

    pub fn ln_bound_with(&self, op: &OperatingPoint, b: &[f64]) -> f64 {
        self.branches
            .iter()
            .zip(b)
            .map(|(law, &bl)| libm::log(law.cdf(xi(bl, op, self.cfg))))
            .sum()
    }

    pub fn bound(&self, op: &OperatingPoint, alloc: &Allocation) -> Result<f64> {
        op.check(self.cfg)?;
        alloc.check(op, self.cfg)?;
        Ok(self.bound_with(op, alloc.values()))
    }

    /// Maximize the bound over the simplex `{b >= 0, sum b = r}`.
    ///
    /// A lexicographic grid with step `r/20` picks the start (ties keep the
    /// lexicographically smallest split); Nelder-Mead then refines the first
    /// `t - 1` coordinates of `ln(bound)` with `b_t = r - sum`.
    pub fn optimize(&self, op: &OperatingPoint) -> Result<(Allocation, f64)> {
        op.check(self.cfg)?;
        let t = self.cfg.t();
        let r = op.r;
        if t == 1 || r == 0.0 {
            let mut b = alloc::vec![0.0; t];
            b[t - 1] = r;
            if t > 1 {
                // r == 0: every split is the zero split
                b[t - 1] = 0.0;
            }
            let value = self.bound_with(op, &b);
            return Ok((Allocation::new(b, r)?, value));
        }

        let step = r / GRID_DIVISIONS as f64;
        let mut best_b: Vec<f64> = Vec::new();
        let mut best_val = f64::NEG_INFINITY;
        for c in compositions(GRID_DIVISIONS, t) {
            let b: Vec<f64> = c.iter().map(|&k| k as f64 * step).collect();
            let v = self.ln_bound_with(op, &b);
            if best_b.is_empty() || v > best_val {
                best_val = v;
                best_b = b;
            }
        }

        let project = |z: &[f64]| -> Vec<f64> {
            let mut b: Vec<f64> = z.iter().map(|&x| x.max(0.0)).collect();
            let s: f64 = b.iter().sum();
            if s > r {
                b.iter_mut().for_each(|x| *x *= r / s);
            }
            let s: f64 = b.iter().sum();
            b.push((r - s).max(0.0));
            b
        };
        let objective = |z: &[f64]| -> f64 {
            let v = -self.ln_bound_with(op, &project(z));
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let nm = NelderMead { x_tol: 1e-10 * r.max(1.0), ..NelderMead::default() };
        let (z, fz) = nm.minimize(objective, &best_b[..t - 1], step * 0.5);
        if -fz > best_val {
            best_b = project(&z);
        }
        // restore the exact sum after clamping
        let head: f64 = best_b[..t - 1].iter().sum();
        best_b[t - 1] = (r - head).max(0.0);
        let value = self.bound_with(op, &best_b);
        Ok((Allocation::new(best_b, r)?, value))
    }
}

/// Bound for the uncorrelated channel: `prod_l P(n_r + n_t - 2l + 1, xi_l)`.
pub fn lower_bound_uncorr(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    alloc: &Allocation,
) -> Result<f64> {
    OutageModel::uncorrelated(cfg).bound(op, alloc)
}

/// Bound for transmit correlation with eigenvalues `spectrum`.
pub fn lower_bound_corr(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    spectrum: &EigenSpectrum,
    alloc: &Allocation,
) -> Result<f64> {
    OutageModel::new(cfg, Some(spectrum))?.bound(op, alloc)
}

/// Split maximizing the applicable bound, and the maximized value.
pub fn optimize_allocation(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    spectrum: Option<&EigenSpectrum>,
) -> Result<(Allocation, f64)> {
    OutageModel::new(cfg, spectrum)?.optimize(op)
}

/// Optimized bound packaged as an [`OutageEstimate`].
pub fn optimized_bound(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    spectrum: Option<&EigenSpectrum>,
) -> Result<OutageEstimate> {
    let (allocation, value) = optimize_allocation(op, cfg, spectrum)?;
    Ok(OutageEstimate {
        value,
        kind: EstimateKind::LowerBound,
        stderr: 0.0,
        allocation: Some(allocation),
    })
}
