//! Grid evaluation behind the three subcommands.
//!
//! A sweep is the product of correlation scenarios, multiplexing gains and
//! SNRs. Points are evaluated on the current rayon pool and the records
//! sorted afterwards, so output order never depends on scheduling.

use dmt_core::channel::{eigen_spectrum, AntennaConfig, CorrelationMatrix, EigenSpectrum};
use dmt_core::diversity::{d_asym, d_max, optimized_estimate, relative_gain, Flavor};
use dmt_core::montecarlo::{McConfig, DEFAULT_REL_STEP, DEFAULT_STREAMS};
use dmt_core::outage::{db_to_linear, OperatingPoint, OutageModel};
use rayon::prelude::*;

use crate::parallel::{diversity_fd_par, outage_mc_par};
use crate::record::{sort_records, CurveRecord, Quantity};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub enum CorrelationSource {
    /// One scenario per coefficient, each `rho^((i-j)^2)`.
    Rho(Vec<f64>),
    /// A single explicit transmit correlation matrix.
    Matrix(CorrelationMatrix),
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub cfg: AntennaConfig,
    pub correlation: CorrelationSource,
    pub r_values: Vec<f64>,
    pub eta_db_values: Vec<f64>,
    pub mc: McConfig,
    pub rel_step: f64,
}

impl SweepSpec {
    pub fn new(cfg: AntennaConfig, r_values: Vec<f64>, eta_db_values: Vec<f64>) -> Result<Self, CliError> {
        Ok(SweepSpec {
            cfg,
            correlation: CorrelationSource::Rho(vec![0.0]),
            r_values,
            eta_db_values,
            mc: McConfig::new(DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_STREAMS)?,
            rel_step: DEFAULT_REL_STEP,
        })
    }

    fn check_r(&self) -> Result<(), CliError> {
        if self.r_values.is_empty() {
            return Err(CliError::Input("no multiplexing gain given (use --r or --r-grid)".into()));
        }
        let t = self.cfg.t() as f64;
        match self.r_values.iter().find(|&&r| !(0.0..=t).contains(&r)) {
            Some(r) => Err(CliError::Input(format!(
                "multiplexing gain {r} outside [0, {t}] for {}x{}",
                self.cfg.n_t(),
                self.cfg.n_r()
            ))),
            None => Ok(()),
        }
    }

    fn check_eta(&self) -> Result<(), CliError> {
        if self.eta_db_values.is_empty() {
            return Err(CliError::Input("no SNR given (use --eta-db or --eta-grid-db)".into()));
        }
        match self.eta_db_values.iter().find(|x| !x.is_finite()) {
            Some(x) => Err(CliError::Input(format!("SNR {x} dB is not finite"))),
            None => Ok(()),
        }
    }

    fn scenarios(&self) -> Result<Vec<Scenario>, CliError> {
        let n_t = self.cfg.n_t();
        match &self.correlation {
            CorrelationSource::Rho(rhos) => rhos
                .iter()
                .map(|&rho| {
                    let corr = CorrelationMatrix::single_coefficient(rho, n_t)?;
                    Scenario::new(self.cfg, Some(rho), corr)
                })
                .collect(),
            CorrelationSource::Matrix(m) => {
                if m.dim() != n_t {
                    return Err(CliError::Input(format!(
                        "correlation matrix is {0}x{0} but there are {n_t} transmit antennas",
                        m.dim()
                    )));
                }
                Ok(vec![Scenario::new(self.cfg, None, m.clone())?])
            }
        }
    }

    /// Every (scenario, r, eta_db) triple.
    fn points<'a>(&self, scenarios: &'a [Scenario]) -> Vec<(&'a Scenario, f64, f64)> {
        let mut out = Vec::new();
        for sc in scenarios {
            for &r in &self.r_values {
                for &eta_db in &self.eta_db_values {
                    out.push((sc, r, eta_db));
                }
            }
        }
        out
    }
}

struct Scenario {
    rho: Option<f64>,
    corr: CorrelationMatrix,
    spectrum: EigenSpectrum,
    model: OutageModel,
}

impl Scenario {
    fn new(cfg: AntennaConfig, rho: Option<f64>, corr: CorrelationMatrix) -> Result<Self, CliError> {
        let spectrum = eigen_spectrum(&corr)?;
        let model = OutageModel::new(cfg, Some(&spectrum))?;
        Ok(Scenario { rho, corr, spectrum, model })
    }

    fn record(&self, quantity: Quantity, r: f64, eta_db: f64) -> CurveRecord {
        CurveRecord {
            quantity,
            r: Some(r),
            eta_db: Some(eta_db),
            rho: self.rho,
            value: 0.0,
            stderr: 0.0,
            b: Vec::new(),
        }
    }
}

fn collect(points: Vec<Result<Vec<CurveRecord>, CliError>>) -> Result<Vec<CurveRecord>, CliError> {
    let mut records = Vec::new();
    for p in points {
        records.extend(p?);
    }
    sort_records(&mut records);
    Ok(records)
}

fn point(eta_db: f64, r: f64) -> Result<OperatingPoint, CliError> {
    Ok(OperatingPoint::from_db(eta_db, r)?)
}

/// Optimized outage lower bound per point, optionally with simulated outage.
pub fn run_bound(spec: &SweepSpec, with_mc: bool) -> Result<Vec<CurveRecord>, CliError> {
    spec.check_r()?;
    spec.check_eta()?;
    let scenarios = spec.scenarios()?;
    let results = spec
        .points(&scenarios)
        .into_par_iter()
        .map(|(sc, r, eta_db)| {
            let op = point(eta_db, r)?;
            let (alloc, value) = sc.model.optimize(&op)?;
            let quantity =
                if sc.model.is_correlated() { Quantity::BoundCorr } else { Quantity::BoundUncorr };
            let mut out = vec![CurveRecord {
                value,
                b: alloc.values().to_vec(),
                ..sc.record(quantity, r, eta_db)
            }];
            if with_mc {
                out.push(mc_record(spec, sc, r, eta_db)?);
            }
            Ok(out)
        })
        .collect();
    collect(results)
}

fn mc_record(spec: &SweepSpec, sc: &Scenario, r: f64, eta_db: f64) -> Result<CurveRecord, CliError> {
    let op = point(eta_db, r)?;
    let res = outage_mc_par(&op, spec.cfg, &sc.corr, &spec.mc)?;
    Ok(CurveRecord {
        value: res.p_out,
        stderr: res.stderr,
        ..sc.record(Quantity::McOutage, r, eta_db)
    })
}

fn fd_record(spec: &SweepSpec, sc: &Scenario, r: f64, eta_db: f64) -> Result<CurveRecord, CliError> {
    let op = point(eta_db, r)?;
    let fd = diversity_fd_par(&op, spec.cfg, &sc.corr, &spec.mc, spec.rel_step).map_err(|e| match e {
        CliError::Numerical(msg) => CliError::Numerical(format!(
            "{msg} (r = {r}, eta = {eta_db} dB)"
        )),
        other => other,
    })?;
    Ok(CurveRecord { value: fd.value, stderr: fd.stderr, ..sc.record(Quantity::DivFd, r, eta_db) })
}

/// Which diversity quantities to produce.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiversitySelection {
    pub estimate: bool,
    pub dmax: bool,
    pub asymptote: bool,
    pub relative_gain: bool,
    pub exact: bool,
}

impl DiversitySelection {
    /// Without any explicit selector the estimates are produced.
    pub fn resolved(mut self) -> Self {
        if !(self.estimate || self.dmax || self.asymptote || self.relative_gain || self.exact) {
            self.estimate = true;
        }
        self
    }
}

pub fn run_diversity(spec: &SweepSpec, sel: DiversitySelection) -> Result<Vec<CurveRecord>, CliError> {
    let sel = sel.resolved();
    let per_point = sel.estimate || sel.relative_gain || sel.exact;
    let mut results = Vec::new();

    if sel.dmax {
        spec.check_eta()?;
        results.extend(spec.eta_db_values.iter().map(|&eta_db| {
            Ok(vec![CurveRecord {
                quantity: Quantity::DMax,
                r: None,
                eta_db: Some(eta_db),
                rho: None,
                value: d_max(db_to_linear(eta_db), spec.cfg)?,
                stderr: 0.0,
                b: Vec::new(),
            }])
        }));
    }
    if sel.asymptote {
        spec.check_r()?;
        results.extend(spec.r_values.iter().map(|&r| {
            Ok(vec![CurveRecord {
                quantity: Quantity::DAsym,
                r: Some(r),
                eta_db: None,
                rho: None,
                value: d_asym(r, spec.cfg)?,
                stderr: 0.0,
                b: Vec::new(),
            }])
        }));
    }
    if per_point {
        spec.check_r()?;
        spec.check_eta()?;
        let scenarios = spec.scenarios()?;
        let pointwise: Vec<_> = spec
            .points(&scenarios)
            .into_par_iter()
            .map(|(sc, r, eta_db)| {
                let mut out = Vec::new();
                if sel.estimate {
                    let est = optimized_estimate(&sc.model, &point(eta_db, r)?)?;
                    let quantity = match est.flavor {
                        Flavor::Uncorrelated => Quantity::DivEstUncorr,
                        Flavor::Correlated => Quantity::DivEstCorr,
                    };
                    out.push(CurveRecord {
                        value: est.value,
                        b: est.allocation.values().to_vec(),
                        ..sc.record(quantity, r, eta_db)
                    });
                }
                if sel.relative_gain {
                    let value = relative_gain(r, db_to_linear(eta_db), spec.cfg, &sc.spectrum)?;
                    out.push(CurveRecord { value, ..sc.record(Quantity::RelativeGain, r, eta_db) });
                }
                if sel.exact {
                    out.push(fd_record(spec, sc, r, eta_db)?);
                }
                Ok(out)
            })
            .collect();
        results.extend(pointwise);
    }
    collect(results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimQuantity {
    Outage,
    DiversityFd,
}

impl std::str::FromStr for SimQuantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "mc-outage" | "outage" => Ok(SimQuantity::Outage),
            "div-fd" => Ok(SimQuantity::DiversityFd),
            other => Err(CliError::Input(format!(
                "simulate computes mc-outage or div-fd, not {other:?}"
            ))),
        }
    }
}

pub fn run_simulate(spec: &SweepSpec, quantity: SimQuantity) -> Result<Vec<CurveRecord>, CliError> {
    spec.check_r()?;
    spec.check_eta()?;
    let scenarios = spec.scenarios()?;
    // each point already fans out over streams; points run in order so that
    // the first failing point is the one reported
    let results = spec
        .points(&scenarios)
        .into_iter()
        .map(|(sc, r, eta_db)| match quantity {
            SimQuantity::Outage => mc_record(spec, sc, r, eta_db).map(|rec| vec![rec]),
            SimQuantity::DiversityFd => fd_record(spec, sc, r, eta_db).map(|rec| vec![rec]),
        })
        .collect();
    collect(results)
}
