//! Stream-parallel Monte Carlo.
//!
//! Each stream is an independent generator seeded from `(seed, stream)`, and
//! the per-stream outage counts are summed as integers, so the result is the
//! same for any thread count or scheduling order.

use dmt_core::channel::{AntennaConfig, CorrelationMatrix};
use dmt_core::montecarlo::{check_rel_step, DiversityFd, McConfig, McResult, OutageSimulator, PairCounts};
use dmt_core::outage::OperatingPoint;
use rayon::prelude::*;

use crate::CliError;

pub fn outage_mc_par(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    r_t: &CorrelationMatrix,
    mc: &McConfig,
) -> Result<McResult, CliError> {
    let sim = OutageSimulator::new(op, cfg, r_t)?;
    let outages: u64 = (0..mc.stream_count)
        .into_par_iter()
        .map(|s| sim.count_stream(mc, s))
        .sum();
    Ok(McResult::from_counts(outages, mc.n_samples))
}

pub fn diversity_fd_par(
    op: &OperatingPoint,
    cfg: AntennaConfig,
    r_t: &CorrelationMatrix,
    mc: &McConfig,
    rel_step: f64,
) -> Result<DiversityFd, CliError> {
    check_rel_step(rel_step)?;
    let sim = OutageSimulator::new(op, cfg, r_t)?;
    let counts = (0..mc.stream_count)
        .into_par_iter()
        .map(|s| sim.count_stream_pair(mc, s, rel_step))
        .reduce(PairCounts::default, |a, b| a + b);
    Ok(DiversityFd::from_counts(counts, mc.n_samples, rel_step)?)
}

/// Run `f` on a pool of `threads` workers (0 picks the rayon default).
pub fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dmt_core::montecarlo::{diversity_fd, outage_mc};

    #[test]
    fn matches_sequential() {
        let cfg = AntennaConfig::new(2, 2).unwrap();
        let r_t = CorrelationMatrix::single_coefficient(0.5, 2).unwrap();
        let op = OperatingPoint::from_db(10.0, 1.0).unwrap();
        let mc = McConfig::new(20_000, 7, 16).unwrap();
        let seq = outage_mc(&op, cfg, &r_t, &mc).unwrap();
        for threads in [1, 3] {
            let par = with_threads(threads, || outage_mc_par(&op, cfg, &r_t, &mc)).unwrap().unwrap();
            assert_eq!(seq, par);
        }
        let seq = diversity_fd(&op, cfg, &r_t, &mc, 0.05).unwrap();
        let par = with_threads(2, || diversity_fd_par(&op, cfg, &r_t, &mc, 0.05)).unwrap().unwrap();
        assert_eq!(seq, par);
    }
}
