//! Law of the per-branch quadratic forms.
//!
//! Branch `l` of the lower bound involves
//! `Delta_l = sum_{k >= l} D_k^2 |R_{l,k}|^2`, whose moment generating
//! function is
//!
//! ```text
//! Psi_l(s) = (1 - s D_l^2)^-(n_r - l + 1) * prod_{k > l} (1 - s D_k^2)^-1
//! ```
//!
//! A partial-fraction expansion of `Psi_l` turns the density into a signed
//! mixture of Gamma densities with integer shapes, so its CDF is a finite
//! weighted sum of regularized incomplete gamma functions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{AntennaConfig, EigenSpectrum, REPEATED_EIG_RTOL};
use crate::{Error, Result};

/// `gamma_inc` returns exactly 1 beyond this argument.
const GAMMA_INC_SATURATION: f64 = 700.0;
/// Partial-fraction weights above this magnitude are too ill-conditioned to use.
const MAX_WEIGHT: f64 = 1e8;
/// Distance from a pole at which the MGF refuses to evaluate.
const POLE_TOL: f64 = 1e-12;
/// Number of coefficients kept in the small-argument power series.
const SERIES_TERMS: usize = 40;

pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| libm::log(f64::from(k))).sum()
}

/// Regularized lower incomplete gamma function for integer shape,
/// `P(a, x) = 1/(a-1)! * int_0^x t^(a-1) e^-t dt`.
///
/// Uses the Poisson-sum identity `P(a, x) = e^-x sum_{j >= a} x^j / j!`:
/// the tail sum directly when `x < a + 1`, and its complement
/// `1 - e^-x sum_{j < a} x^j / j!` otherwise.
pub fn gamma_inc(x: f64, a: u32) -> Result<f64> {
    if a < 1 {
        return Err(Error::invalid(format!("gamma_inc shape must be >= 1 (got {a})")));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("gamma_inc argument must be >= 0 (got {x})")));
    }
    Ok(gamma_inc_unchecked(x, a))
}

pub(crate) fn gamma_inc_unchecked(x: f64, a: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x > GAMMA_INC_SATURATION || x == f64::INFINITY {
        return 1.0;
    }
    if a == 1 {
        return -libm::expm1(-x);
    }
    let af = f64::from(a);
    if x < af + 1.0 {
        lower_series_prefactor(x, a) * lower_series_sum(x, a)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..a {
            term *= x / f64::from(j);
            sum += term;
        }
        (1.0 - libm::exp(-x) * sum).clamp(0.0, 1.0)
    }
}

/// `e^-x x^a / a!`
fn lower_series_prefactor(x: f64, a: u32) -> f64 {
    libm::exp(f64::from(a) * libm::log(x) - x - ln_factorial(a))
}

/// `sum_{n >= 0} x^n a! / (a + n)!`, converging for all x, fast for x < a + 1.
fn lower_series_sum(x: f64, a: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1.0;
    while term > f64::EPSILON * sum * 0.1 {
        term *= x / (f64::from(a) + n);
        sum += term;
        n += 1.0;
    }
    sum
}

/// Gamma density with integer shape `k` and scale `beta`.
pub fn gamma_pdf(x: f64, shape: u32, scale: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if shape == 1 { 1.0 / scale } else { 0.0 };
    }
    let y = x / scale;
    libm::exp(f64::from(shape - 1) * libm::log(y) - y - ln_factorial(shape - 1)) / scale
}

/// Ratio of the Gamma(a, 1) density to its CDF, stable for small `x`.
pub fn gamma_pdf_over_cdf(x: f64, a: u32) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x < f64::from(a) + 1.0 {
        // pdf = e^-x x^(a-1)/(a-1)!, cdf = e^-x x^a/a! * S
        f64::from(a) / (x * lower_series_sum(x, a))
    } else {
        gamma_pdf(x, a, 1.0) / gamma_inc_unchecked(x, a)
    }
}

/// One signed component `weight * Gamma(shape, scale)` of a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTerm {
    pub weight: f64,
    pub shape: u32,
    pub scale: f64,
}

/// Parameters of `Psi_l`: one pole of order `multiple_pole_order` at scale
/// `multiple_pole_scale` and one simple pole per entry of `simple_pole_scales`.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfSpec {
    pub multiple_pole_scale: f64,
    pub multiple_pole_order: u32,
    pub simple_pole_scales: Vec<f64>,
}

impl MgfSpec {
    pub fn new(
        multiple_pole_scale: f64,
        multiple_pole_order: u32,
        simple_pole_scales: Vec<f64>,
    ) -> Result<Self> {
        if multiple_pole_order < 1 {
            return Err(Error::invalid("multiple pole order must be >= 1"));
        }
        let all_positive = core::iter::once(&multiple_pole_scale)
            .chain(simple_pole_scales.iter())
            .all(|&b| b > 0.0 && b.is_finite());
        if !all_positive {
            return Err(Error::invalid(
                "pole scales must be positive and finite (rank-deficient spectra are not supported)",
            ));
        }
        Ok(MgfSpec { multiple_pole_scale, multiple_pole_order, simple_pole_scales })
    }

    /// MGF of `Delta_l` for branch `l` (1-based) of a transmit spectrum.
    pub fn for_branch(spectrum: &EigenSpectrum, cfg: AntennaConfig, l: usize) -> Result<Self> {
        if spectrum.len() != cfg.n_t() {
            return Err(Error::invalid(format!(
                "spectrum has {} eigenvalues but n_t = {}",
                spectrum.len(),
                cfg.n_t()
            )));
        }
        if l < 1 || l > cfg.t() {
            return Err(Error::invalid(format!("branch index {l} outside 1..={}", cfg.t())));
        }
        let d = spectrum.values();
        Self::new(d[l - 1], (cfg.n_r() - l + 1) as u32, d[l..].to_vec())
    }

    /// Sum of all pole orders, i.e. the degree of the MGF denominator.
    pub fn total_order(&self) -> u32 {
        self.multiple_pole_order + self.simple_pole_scales.len() as u32
    }

    pub fn mean(&self) -> f64 {
        self.multiple_pole_scale * f64::from(self.multiple_pole_order)
            + self.simple_pole_scales.iter().sum::<f64>()
    }

    fn factors(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        core::iter::once((self.multiple_pole_scale, self.multiple_pole_order))
            .chain(self.simple_pole_scales.iter().map(|&b| (b, 1)))
    }
}

/// `Psi(s) = prod (1 - s beta)^-m` evaluated at complex `s`.
pub fn mgf(spec: &MgfSpec, s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    for (beta, order) in spec.factors() {
        if (s - Complex64::new(1.0 / beta, 0.0)).norm() <= POLE_TOL {
            return Err(Error::PoleEvaluation { s_re: s.re, s_im: s.im });
        }
        acc *= (one - s * beta).powi(-(order as i32));
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pole {
    scale: f64,
    order: u32,
}

/// Poles sorted by descending scale, with scales closer than the repeated
/// eigenvalue tolerance merged into one pole of summed order.
fn merged_poles(spec: &MgfSpec) -> Vec<Pole> {
    let mut raw: Vec<Pole> = spec.factors().map(|(scale, order)| Pole { scale, order }).collect();
    raw.sort_by(|a, b| b.scale.total_cmp(&a.scale));
    let mut out: Vec<Pole> = Vec::with_capacity(raw.len());
    for p in raw {
        match out.last_mut() {
            Some(last) if (last.scale - p.scale).abs() <= REPEATED_EIG_RTOL * last.scale => {
                let total = last.order + p.order;
                last.scale = (last.scale * f64::from(last.order) + p.scale * f64::from(p.order))
                    / f64::from(total);
                last.order = total;
            }
            _ => out.push(p),
        }
    }
    out
}

/// Truncated product of power series.
fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

/// Coefficients of `(1 + g u)^-m` up to `u^(len-1)`.
fn binomial_series(g: f64, m: u32, len: usize) -> Vec<f64> {
    let mut c = vec![0.0; len];
    if len == 0 {
        return c;
    }
    c[0] = 1.0;
    for n in 1..len {
        c[n] = c[n - 1] * (-g) * f64::from(m + n as u32 - 1) / n as f64;
    }
    c
}

/// Signed Gamma mixture representing the density of `Delta_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMixture {
    terms: Vec<GammaTerm>,
    source_index: usize,
    // small-argument expansion: density = prefactor * sum_j coeff[j] (x/beta_min)^j x^(A-1)/(A-1+j)!
    total_shape: u32,
    beta_min: f64,
    ln_prefactor: f64,
    series: Vec<f64>,
}

impl GammaMixture {
    pub fn terms(&self) -> &[GammaTerm] {
        &self.terms
    }

    /// Branch index `l` this mixture was built for (0 when built from a bare spec).
    pub fn source_index(&self) -> usize {
        self.source_index
    }

    pub fn with_source_index(mut self, l: usize) -> Self {
        self.source_index = l;
        self
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.weight.abs()))
    }

    /// Total Gamma shape, i.e. the order of the zero of the density at 0 plus one.
    pub fn total_shape(&self) -> u32 {
        self.total_shape
    }

    /// MGF of the mixture, `sum w (1 - s beta)^-k`.
    pub fn mgf(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        self.terms
            .iter()
            .map(|t| (one - s * t.scale).powi(-(t.shape as i32)) * t.weight)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * f64::from(t.shape) * t.scale).sum()
    }

    fn use_series(&self, x: f64) -> bool {
        self.terms.len() > 1 && x < self.beta_min
    }

    /// `(sum_j c_j y^j (A-1+o)!/(A-1+o+j)!)` for offset `o` (0: pdf, 1: cdf).
    fn series_sum(&self, x: f64, offset: u32) -> f64 {
        let y = x / self.beta_min;
        let base = f64::from(self.total_shape - 1 + offset);
        let mut ratio = 1.0;
        let mut yp = 1.0;
        let mut sum = 0.0;
        for (j, c) in self.series.iter().enumerate() {
            if j > 0 {
                ratio /= base + j as f64;
                yp *= y;
            }
            sum += c * yp * ratio;
        }
        sum
    }

    fn series_pdf(&self, x: f64) -> f64 {
        let a = self.total_shape;
        let lead = if a == 1 {
            0.0
        } else {
            f64::from(a - 1) * libm::log(x) - ln_factorial(a - 1)
        };
        libm::exp(self.ln_prefactor + lead) * self.series_sum(x, 0)
    }

    fn series_cdf(&self, x: f64) -> f64 {
        let a = self.total_shape;
        let lead = f64::from(a) * libm::log(x) - ln_factorial(a);
        libm::exp(self.ln_prefactor + lead) * self.series_sum(x, 1)
    }

    /// Signed sum of Gamma densities.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || (x == 0.0 && self.total_shape > 1) {
            return 0.0;
        }
        if x > 0.0 && self.use_series(x) {
            return self.series_pdf(x);
        }
        self.terms.iter().map(|t| t.weight * gamma_pdf(x, t.shape, t.scale)).sum()
    }

    /// `sum w_i P(shape_i, x / scale_i)`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let v = if self.use_series(x) {
            self.series_cdf(x)
        } else {
            self.terms
                .iter()
                .map(|t| t.weight * gamma_inc_unchecked(x / t.scale, t.shape))
                .sum()
        };
        v.clamp(0.0, 1.0)
    }

    /// `pdf(x) / cdf(x)`, computed without forming the two small values
    /// separately when `x` is near zero.
    pub fn pdf_over_cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::INFINITY;
        }
        if self.terms.len() == 1 {
            let t = self.terms[0];
            return gamma_pdf_over_cdf(x / t.scale, t.shape) / t.scale;
        }
        if self.use_series(x) {
            // pdf/cdf = A/x * S0/S1
            return f64::from(self.total_shape) / x * self.series_sum(x, 0)
                / self.series_sum(x, 1);
        }
        self.pdf(x).max(0.0) / self.cdf(x)
    }
}

/// Partial-fraction expansion of `Psi` into a signed Gamma mixture.
///
/// For a pole of scale `beta_j` and order `m_j`, write `u = 1 - s beta_j`;
/// the remaining factors become `c_i^-m_i (1 + g_i u)^-m_i` with
/// `c_i = 1 - beta_i/beta_j` and `g_i = beta_i / (beta_j - beta_i)`. The
/// coefficient of `(1 - s beta_j)^-(m_j - n)` is `prod c_i^-m_i` times the
/// `u^n` coefficient of the product of those binomial series (Leibniz rule).
pub fn partial_fraction_weights(spec: &MgfSpec) -> Result<GammaMixture> {
    let poles = merged_poles(spec);
    let mut terms = Vec::new();
    for (j, pj) in poles.iter().enumerate() {
        let len = pj.order as usize;
        let mut coeffs = vec![0.0; len];
        coeffs[0] = 1.0;
        let mut constant = 1.0;
        for (i, pi) in poles.iter().enumerate() {
            if i == j {
                continue;
            }
            let gap = pj.scale - pi.scale;
            let c = gap / pj.scale;
            constant *= libm::pow(c, -f64::from(pi.order));
            coeffs = series_mul(&coeffs, &binomial_series(pi.scale / gap, pi.order, len));
        }
        for shape in 1..=pj.order {
            let n = (pj.order - shape) as usize;
            let weight = constant * coeffs[n];
            // exact zeros only occur for an isolated pole, whose lower shapes vanish
            if weight != 0.0 {
                terms.push(GammaTerm { weight, shape, scale: pj.scale });
            }
        }
    }

    let max_w = terms.iter().fold(0.0f64, |m, t| m.max(t.weight.abs()));
    if !max_w.is_finite() || max_w > MAX_WEIGHT {
        return Err(Error::DegenerateSpectrum(format!(
            "partial-fraction weights reach {max_w:e}; eigenvalues are too close to separate \
             (relative gap above {REPEATED_EIG_RTOL:e} but too small to expand)"
        )));
    }

    // density near 0: prod beta^-m * sum_j c_j x^(A-1+j)/(A-1+j)!, with c_j the
    // coefficients of prod (1 + u/beta_i)^-m_i; stored scaled by beta_min^j
    let total_shape: u32 = poles.iter().map(|p| p.order).sum();
    let beta_min = poles.iter().map(|p| p.scale).fold(f64::INFINITY, f64::min);
    let ln_prefactor = -poles.iter().map(|p| f64::from(p.order) * libm::log(p.scale)).sum::<f64>();
    let mut series = vec![0.0; SERIES_TERMS];
    series[0] = 1.0;
    for p in &poles {
        series = series_mul(&series, &binomial_series(beta_min / p.scale, p.order, SERIES_TERMS));
    }

    Ok(GammaMixture { terms, source_index: 0, total_shape, beta_min, ln_prefactor, series })
}

/// Mixture for branch `l` (1-based) of a transmit spectrum.
pub fn branch_mixture(spectrum: &EigenSpectrum, cfg: AntennaConfig, l: usize) -> Result<GammaMixture> {
    let spec = MgfSpec::for_branch(spectrum, cfg, l)?;
    Ok(partial_fraction_weights(&spec)?.with_source_index(l))
}

pub fn mixture_pdf(mix: &GammaMixture, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("density argument must be >= 0 (got {x})")));
    }
    Ok(mix.pdf(x))
}

pub fn mixture_cdf(mix: &GammaMixture, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("distribution argument must be >= 0 (got {x})")));
    }
    Ok(mix.cdf(x))
}
