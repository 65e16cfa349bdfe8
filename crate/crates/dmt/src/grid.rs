//! Parameter grids: `start:stop:step` ranges and comma-separated lists.

use crate::CliError;

/// Slack applied to the inclusive stop so that float drift never drops the
/// last point.
const STOP_SLACK: f64 = 1e-9;

/// `start + k step` for every `k` with `start + k step <= stop + 1e-9`.
pub fn inclusive_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Input(format!(
            "grid {start}:{stop}:{step} needs finite bounds and a positive step"
        )));
    }
    if stop < start - STOP_SLACK {
        return Err(CliError::Input(format!("grid stop {stop} is below its start {start}")));
    }
    let count = ((stop - start + STOP_SLACK) / step).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Parse `start:stop:step`.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("expected start:stop:step, got {text:?}")));
    }
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("bad number {s:?} in {text:?}")))
    };
    inclusive_range(num(parts[0])?, num(parts[1])?, num(parts[2])?)
}

/// Parse `a,b,c` (a single value is a one-element list).
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad number {s:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Input("empty list".into()));
    }
    Ok(values)
}
