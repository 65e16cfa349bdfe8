//! Plain-text correlation matrix files.
//!
//! ```text
//! 2
//! 1+0j 0.5-0.1j
//! 0.5+0.1j 1+0j
//! ```
//!
//! The first line is the dimension, followed by one line per row of
//! whitespace-separated `re+imj` values.

use std::path::Path;

use dmt_core::channel::CorrelationMatrix;
use dmt_core::Complex64;

use crate::CliError;

/// Parse one `re+imj` token; a bare real number is also accepted.
pub fn parse_complex(token: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Input(format!("bad complex value {token:?} (expected re+imj)"));
    let t = token.trim();
    let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "+" | "" => "1",
        "-" => "-1",
        other => other,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let im = im.trim_start_matches('+').parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn parse_matrix(text: &str) -> Result<CorrelationMatrix, CliError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let dim: usize = lines
        .next()
        .ok_or_else(|| CliError::Input("correlation file is empty".into()))?
        .parse()
        .map_err(|_| CliError::Input("first line of a correlation file must be the dimension".into()))?;
    let mut entries = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for line in lines {
        let row = line.split_whitespace().map(parse_complex).collect::<Result<Vec<_>, _>>()?;
        if row.len() != dim {
            return Err(CliError::Input(format!(
                "correlation file row {} has {} values, expected {dim}",
                rows + 1,
                row.len()
            )));
        }
        entries.extend(row);
        rows += 1;
    }
    if rows != dim {
        return Err(CliError::Input(format!("correlation file has {rows} rows, expected {dim}")));
    }
    Ok(CorrelationMatrix::from_entries(dim, entries)?)
}

pub fn read_matrix(path: &Path) -> Result<CorrelationMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn format_matrix(m: &CorrelationMatrix) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = m.entry(i, j);
                format!("{:e}{:+e}j", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("1+0j").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5-0.1j").unwrap(), Complex64::new(0.5, -0.1));
        assert_eq!(parse_complex("-0.5+2j").unwrap(), Complex64::new(-0.5, 2.0));
        assert_eq!(parse_complex("1e-3-2.5e-4j").unwrap(), Complex64::new(1e-3, -2.5e-4));
        assert_eq!(parse_complex("3j").unwrap(), Complex64::new(0.0, 3.0));
        assert_eq!(parse_complex("0.7").unwrap(), Complex64::new(0.7, 0.0));
        assert!(parse_complex("1+xj").is_err());
    }

    #[test]
    fn matrix_file() {
        let m = parse_matrix("2\n1+0j 0.5-0.1j\n0.5+0.1j 1+0j\n").unwrap();
        assert_eq!(m.entry(0, 1), Complex64::new(0.5, -0.1));
        let again = parse_matrix(&format_matrix(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn matrix_file_errors() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n1+0j 0+0j\n").is_err());
        assert!(parse_matrix("2\n1+0j\n0+0j 1+0j\n").is_err());
        assert!(parse_matrix("2\n2+0j 0+0j\n0+0j 1+0j\n").is_err());
    }
}
