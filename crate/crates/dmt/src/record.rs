use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every quantity a sweep can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    BoundUncorr,
    BoundCorr,
    McOutage,
    DivEstUncorr,
    DivEstCorr,
    DivFd,
    DMax,
    DAsym,
    RelativeGain,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::BoundUncorr,
        Quantity::BoundCorr,
        Quantity::McOutage,
        Quantity::DivEstUncorr,
        Quantity::DivEstCorr,
        Quantity::DivFd,
        Quantity::DMax,
        Quantity::DAsym,
        Quantity::RelativeGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::BoundUncorr => "bound-uncorr",
            Quantity::BoundCorr => "bound-corr",
            Quantity::McOutage => "mc-outage",
            Quantity::DivEstUncorr => "div-est-uncorr",
            Quantity::DivEstCorr => "div-est-corr",
            Quantity::DivFd => "div-fd",
            Quantity::DMax => "d-max",
            Quantity::DAsym => "d-asym",
            Quantity::RelativeGain => "relative-gain",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown quantity {s:?}")))
    }
}

/// One output row. Coordinates that do not apply to a quantity are `None`
/// (e.g. `r` for `d-max`, `eta_db` for `d-asym`, `rho` for an explicit matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub quantity: Quantity,
    pub r: Option<f64>,
    pub eta_db: Option<f64>,
    pub rho: Option<f64>,
    pub value: f64,
    pub stderr: f64,
    pub b: Vec<f64>,
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

/// Deterministic output order: quantity, then rho, r, eta.
pub fn sort_records(records: &mut [CurveRecord]) {
    records.sort_by(|a, b| {
        a.quantity
            .cmp(&b.quantity)
            .then(cmp_opt(a.rho, b.rho))
            .then(cmp_opt(a.r, b.r))
            .then(cmp_opt(a.eta_db, b.eta_db))
    });
}
