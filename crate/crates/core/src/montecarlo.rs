//! Monte Carlo ground truth.
//!
//! A run of `n_samples` draws is split into `stream_count` partitions; stream
//! `s` always uses the generator keyed by `(seed, s)` and always covers the
//! same sample indices, so outage counts are identical however the streams
//! are scheduled.

use alloc::format;

use rand_core::RngCore;

use crate::channel::{AntennaConfig, ChannelMatrix, CorrelationMatrix, EigenSpectrum, KroneckerChannel};
use crate::linalg::ln_det_hpd;
use crate::outage::OperatingPoint;
use crate::rng::{exponential, gamma_int, stream_rng};
use crate::{Error, Result};

pub const DEFAULT_STREAMS: u64 = 64;
/// Relative SNR step of the finite-difference diversity.
pub const DEFAULT_REL_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub stream_count: u64,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64, stream_count: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::invalid("Monte Carlo sample count must be positive"));
        }
        if stream_count == 0 {
            return Err(Error::invalid("stream count must be positive"));
        }
        Ok(McConfig { n_samples, seed, stream_count })
    }

    /// Number of samples drawn by stream `s`; the first `n mod streams`
    /// streams take one extra.
    pub fn stream_len(&self, s: u64) -> u64 {
        let base = self.n_samples / self.stream_count;
        base + u64::from(s < self.n_samples % self.stream_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub p_out: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub stderr: f64,
    pub n_samples: u64,
    pub outages: u64,
}

impl McResult {
    pub fn from_counts(outages: u64, n_samples: u64) -> Self {
        let n = n_samples as f64;
        let p = outages as f64 / n;
        McResult { p_out: p, stderr: libm::sqrt(p * (1.0 - p) / n), n_samples, outages }
    }
}

/// `log2 det(I + (eta/n_t) H H^H)` in bit/s/Hz.
pub fn mutual_information(h: &ChannelMatrix, eta: f64, n_t: usize) -> f64 {
    let scale = eta / n_t as f64;
    // det(I + A A^H) = det(I + A^H A): use the smaller Gram matrix
    let left = h.n_r() <= h.n_t();
    let mut g = h.m.gram(scale, left);
    for i in 0..g.rows {
        g[(i, i)].re += 1.0;
    }
    ln_det_hpd(&g).map_or(0.0, |v| v.max(0.0) / core::f64::consts::LN_2)
}

/// Outage counter for one operating point and transmit correlation.
#[derive(Debug, Clone)]
pub struct OutageSimulator {
    channel: KroneckerChannel,
    eta: f64,
    r: f64,
    rate: f64,
}

impl OutageSimulator {
    pub fn new(op: &OperatingPoint, cfg: AntennaConfig, r_t: &CorrelationMatrix) -> Result<Self> {
        Ok(OutageSimulator {
            channel: KroneckerChannel::transmit_only(cfg, r_t)?,
            eta: op.eta(),
            r: op.r(),
            rate: op.rate(cfg),
        })
    }

    /// Outages (`I < R`) among the draws of stream `s`.
    pub fn count_stream(&self, mc: &McConfig, s: u64) -> u64 {
        let mut rng = stream_rng(mc.seed, s);
        let n_t = self.channel.config().n_t();
        let mut count = 0;
        for _ in 0..mc.stream_len(s) {
            let h = self.channel.sample(&mut rng);
            if mutual_information(&h, self.eta, n_t) < self.rate {
                count += 1;
            }
        }
        count
    }

    /// Outage counts at `eta (1 -/+ step)` for the same draws. The rate
    /// follows the SNR, `R = r log2(1 + g eta)`, at each end.
    pub fn count_stream_pair(&self, mc: &McConfig, s: u64, rel_step: f64) -> PairCounts {
        let mut rng = stream_rng(mc.seed, s);
        let cfg = self.channel.config();
        let n_t = cfg.n_t();
        let end = |eta: f64| (eta, self.r * libm::log2(1.0 + cfg.array_gain() * eta));
        let lo = end(self.eta * (1.0 - rel_step));
        let hi = end(self.eta * (1.0 + rel_step));
        let mut counts = PairCounts::default();
        for _ in 0..mc.stream_len(s) {
            let h = self.channel.sample(&mut rng);
            let minus = mutual_information(&h, lo.0, n_t) < lo.1;
            let plus = mutual_information(&h, hi.0, n_t) < hi.1;
            counts.minus += u64::from(minus);
            counts.plus += u64::from(plus);
            counts.both += u64::from(minus && plus);
        }
        counts
    }
}

/// Outage counts at the two ends of a finite difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub minus: u64,
    pub plus: u64,
    /// Draws in outage at both ends.
    pub both: u64,
}

impl core::ops::Add for PairCounts {
    type Output = PairCounts;

    fn add(self, o: PairCounts) -> PairCounts {
        PairCounts { minus: self.minus + o.minus, plus: self.plus + o.plus, both: self.both + o.both }
    }
}

/// Empirical outage probability, streams evaluated in order.
pub fn outage_mc(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    r_t: &CorrelationMatrix,
    mc: &McConfig,
) -> Result<McResult> {
    let sim = OutageSimulator::new(op, cfg, r_t)?;
    let outages = (0..mc.stream_count).map(|s| sim.count_stream(mc, s)).sum();
    Ok(McResult::from_counts(outages, mc.n_samples))
}

/// Finite-difference diversity from simulated outage probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityFd {
    pub value: f64,
    pub stderr: f64,
    pub p_minus: f64,
    pub p_plus: f64,
}

impl DiversityFd {
    /// `-eta (ln p+ - ln p-) / (eta+ - eta-)` from paired outage counts.
    ///
    /// Both ends use the same draws, so the delta-method variance carries the
    /// joint count: `Var(ln p+ - ln p-) ~ (1/p+ + 1/p- - 2 p_both/(p+ p-))/n`.
    pub fn from_counts(counts: PairCounts, n_samples: u64, rel_step: f64) -> Result<Self> {
        if counts.minus == 0 || counts.plus == 0 {
            return Err(Error::InsufficientSamples { n_samples });
        }
        let n = n_samples as f64;
        let (pm, pp, pb) =
            (counts.minus as f64 / n, counts.plus as f64 / n, counts.both as f64 / n);
        // eta / (eta+ - eta-) = 1 / (2 step)
        let scale = 1.0 / (2.0 * rel_step);
        // equal counts give +0, not -0
        let value = scale * (libm::log(pm) - libm::log(pp));
        let var = ((1.0 / pp + 1.0 / pm - 2.0 * pb / (pp * pm)) / n).max(0.0);
        Ok(DiversityFd { value, stderr: scale * libm::sqrt(var), p_minus: pm, p_plus: pp })
    }
}

pub fn diversity_fd(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    r_t: &CorrelationMatrix,
    mc: &McConfig,
    rel_step: f64,
) -> Result<DiversityFd> {
    check_rel_step(rel_step)?;
    let sim = OutageSimulator::new(op, cfg, r_t)?;
    let counts = (0..mc.stream_count)
        .map(|s| sim.count_stream_pair(mc, s, rel_step))
        .fold(PairCounts::default(), |acc, c| acc + c);
    DiversityFd::from_counts(counts, mc.n_samples, rel_step)
}

pub fn check_rel_step(rel_step: f64) -> Result<()> {
    if !(rel_step > 0.0 && rel_step < 1.0) {
        return Err(Error::invalid(format!("relative SNR step must lie in (0, 1) (got {rel_step})")));
    }
    Ok(())
}

/// One draw of `Delta_l = D_l^2 Gamma(n_r - l + 1, 1) + sum_{k > l} D_k^2 Exp(1)`.
pub fn sample_delta<R: RngCore + ?Sized>(
    spectrum: &EigenSpectrum,
    l: usize,
    cfg: AntennaConfig,
    rng: &mut R,
) -> Result<f64> {
    if l < 1 || l > cfg.t() {
        return Err(Error::invalid(format!("branch index {l} outside 1..={}", cfg.t())));
    }
    if spectrum.len() != cfg.n_t() {
        return Err(Error::invalid("spectrum length does not match n_t"));
    }
    let d = spectrum.values();
    let diag = d[l - 1] * gamma_int(rng, (cfg.n_r() - l + 1) as u32);
    Ok(diag + d[l..].iter().map(|&dk| dk * exponential(rng)).sum::<f64>())
}
