//! Finite-SNR diversity estimates and their limits.
//!
//! Holding the split `b` fixed, the diversity `-eta d ln(bound)/d eta` of the
//! outage bound has the closed form
//!
//! ```text
//! d(r, eta) = (n_t/eta) sum_l K_l f_l(xi_l) / F_l(xi_l)
//! K_l       = (1 + g eta)^{b_l} - b_l g eta (1 + g eta)^{b_l - 1} - 1
//! ```
//!
//! where `f_l`/`F_l` are the density and CDF of `Delta_l`.

use alloc::format;
use alloc::vec::Vec;

use crate::channel::{AntennaConfig, EigenSpectrum};
use crate::outage::{xi, Allocation, BranchLaw, OperatingPoint, OutageModel};
use crate::quadform::gamma_pdf_over_cdf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Uncorrelated,
    Correlated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityEstimate {
    pub value: f64,
    pub r: f64,
    pub eta: f64,
    pub flavor: Flavor,
    pub allocation: Allocation,
}

/// `K_l = (1 + g eta)^{b} - b g eta (1 + g eta)^{b - 1} - 1`; exactly zero at `b = 1`.
pub fn k_factor(b_l: f64, op: &OperatingPoint, cfg: AntennaConfig) -> f64 {
    if b_l == 1.0 {
        return 0.0;
    }
    let x = cfg.array_gain() * op.eta();
    let ln1px = libm::log1p(x);
    libm::expm1(b_l * ln1px) - b_l * x * libm::exp((b_l - 1.0) * ln1px)
}

/// Contribution `(n_t/eta) K_l f_l/F_l` of one branch.
fn branch_diversity(law: &BranchLaw, b_l: f64, op: &OperatingPoint, cfg: AntennaConfig) -> f64 {
    let x = xi(b_l, op, cfg);
    if x == 0.0 {
        // b_l -> 0 limit: K ~ b (L - g eta/(1 + g eta)), xi ~ (n_t/eta) b L, f/F ~ A/xi
        let g_eta = cfg.array_gain() * op.eta();
        let l = libm::log1p(g_eta);
        return f64::from(law.total_shape()) * (1.0 - g_eta / ((1.0 + g_eta) * l));
    }
    cfg.n_t() as f64 / op.eta() * k_factor(b_l, op, cfg) * law.pdf_over_cdf(x)
}

/// Diversity estimate of a bound model at a fixed split.
pub fn estimate_with(
    model: &OutageModel,
    op: &OperatingPoint,
    alloc: &Allocation,
) -> Result<DiversityEstimate> {
    if op.r() == 0.0 {
        return Err(Error::Domain(
            "diversity estimates are undefined at r = 0; use d_max for the zero-rate limit".into(),
        ));
    }
    // validates the split against the model
    model.bound(op, alloc)?;
    let cfg = model.config();
    let value = model
        .branches()
        .iter()
        .zip(alloc.values())
        .map(|(law, &b)| branch_diversity(law, b, op, cfg))
        .sum();
    Ok(DiversityEstimate {
        value,
        r: op.r(),
        eta: op.eta(),
        flavor: if model.is_correlated() { Flavor::Correlated } else { Flavor::Uncorrelated },
        allocation: alloc.clone(),
    })
}

/// Estimate for the uncorrelated channel at a fixed split.
pub fn estimate_uncorr(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    alloc: &Allocation,
) -> Result<DiversityEstimate> {
    estimate_with(&OutageModel::uncorrelated(cfg), op, alloc)
}

/// Estimate for a correlated channel at a fixed split. An all-ones spectrum
/// gives the uncorrelated estimate.
pub fn estimate_corr(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    spectrum: &EigenSpectrum,
    alloc: &Allocation,
) -> Result<DiversityEstimate> {
    estimate_with(&OutageModel::new(cfg, Some(spectrum))?, op, alloc)
}

/// Estimate at the split that maximizes the bound.
pub fn optimized_estimate(model: &OutageModel, op: &OperatingPoint) -> Result<DiversityEstimate> {
    if op.r() == 0.0 {
        return Err(Error::Domain(
            "diversity estimates are undefined at r = 0; use d_max for the zero-rate limit".into(),
        ));
    }
    let (alloc, _) = model.optimize(op)?;
    estimate_with(model, op, &alloc)
}

/// Zero-rate diversity `n_t n_r [1 - g eta / ((1 + g eta) ln(1 + g eta))]`.
pub fn d_max(eta: f64, cfg: AntennaConfig) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("SNR must be positive (got {eta})")));
    }
    let x = cfg.array_gain() * eta;
    let full = (cfg.n_t() * cfg.n_r()) as f64;
    Ok(full * (1.0 - x / ((1.0 + x) * libm::log1p(x))))
}

/// High-SNR tradeoff: `min sum_l w_l alpha_l` over `alpha >= 0` with
/// `sum_l (1 - alpha_l)^+ <= r`, `w_l = n_r + n_t - 2l + 1`.
///
/// The weights decrease in `l`, so the budget goes to the first branches.
pub fn d_asym(r: f64, cfg: AntennaConfig) -> Result<f64> {
    let t = cfg.t() as f64;
    if !(r >= 0.0 && r <= t) {
        return Err(Error::invalid(format!("multiplexing gain {r} outside [0, {t}]")));
    }
    let mut budget = r;
    let mut value = 0.0;
    for l in 1..=cfg.t() {
        let spend = budget.min(1.0);
        budget -= spend;
        value += f64::from(cfg.branch_shape(l)) * (1.0 - spend);
    }
    Ok(value)
}

/// Per-branch quantities driving the high-SNR behaviour of the estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchAsymptotics {
    pub xi: f64,
    /// Uncorrelated hazard `x^{A-1} e^{-x}/(A-1)! / P(A, x)` at `xi`.
    pub j: f64,
    pub k: f64,
    /// Correlated hazard `f_l(xi)/F_l(xi)`, when a spectrum is given.
    pub q_over_p: Option<f64>,
    /// Small-`xi` approximation `A/xi` of both hazards.
    pub small_xi_approx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTerms {
    pub branches: Vec<BranchAsymptotics>,
}

pub fn asymptotic_terms(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    spectrum: Option<&EigenSpectrum>,
    alloc: &Allocation,
) -> Result<AsymptoticTerms> {
    let model = match spectrum {
        Some(s) => Some(OutageModel::new(cfg, Some(s))?),
        None => None,
    };
    OutageModel::uncorrelated(cfg).bound(op, alloc)?;
    let branches = alloc
        .values()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let shape = cfg.branch_shape(i + 1);
            let x = xi(b, op, cfg);
            BranchAsymptotics {
                xi: x,
                j: gamma_pdf_over_cdf(x, shape),
                k: k_factor(b, op, cfg),
                q_over_p: model.as_ref().map(|m| m.branches()[i].pdf_over_cdf(x)),
                small_xi_approx: f64::from(shape) / x,
            }
        })
        .collect();
    Ok(AsymptoticTerms { branches })
}

/// Ratio of the optimized correlated estimate to the optimized uncorrelated one.
pub fn relative_gain(r: f64, eta: f64, cfg: AntennaConfig, spectrum: &EigenSpectrum) -> Result<f64> {
    let op = OperatingPoint::new(eta, r)?;
    let corr = optimized_estimate(&OutageModel::new(cfg, Some(spectrum))?, &op)?;
    let uncorr = optimized_estimate(&OutageModel::uncorrelated(cfg), &op)?;
    Ok(corr.value / uncorr.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    EstimateUncorr,
    EstimateCorr,
    Asymptotic,
    MonteCarlo,
}

/// `(r, d)` points with strictly increasing `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DmtCurve {
    points: Vec<(f64, f64)>,
    kind: CurveKind,
}

impl DmtCurve {
    pub fn new(points: Vec<(f64, f64)>, kind: CurveKind) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid("curve multiplexing gains must be strictly increasing"));
        }
        Ok(DmtCurve { points, kind })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Asymptotic tradeoff sampled at `rs`.
    pub fn asymptotic(rs: &[f64], cfg: AntennaConfig) -> Result<Self> {
        let points = rs.iter().map(|&r| Ok((r, d_asym(r, cfg)?))).collect::<Result<Vec<_>>>()?;
        Self::new(points, CurveKind::Asymptotic)
    }

    /// Optimized estimates of `model` at SNR `eta` sampled at `rs`.
    pub fn estimate(rs: &[f64], eta: f64, model: &OutageModel) -> Result<Self> {
        let points = rs
            .iter()
            .map(|&r| Ok((r, optimized_estimate(model, &OperatingPoint::new(eta, r)?)?.value)))
            .collect::<Result<Vec<_>>>()?;
        let kind =
            if model.is_correlated() { CurveKind::EstimateCorr } else { CurveKind::EstimateUncorr };
        Self::new(points, kind)
    }
}
