//! Textual kernel specifications.
//!
//! ```text
//! constant:<p>
//! step:<matrix.csv>:<b0,b1,...,bk>     (or `uniform` for an equipartition)
//! cayley:cosine:<mean>,<amplitude>
//! cayley:band:<half-width>
//! scalefree:<exponent>
//! ```
//!
//! Numbers may be written as decimals or simple fractions (`1/3`).

use std::path::Path;

use crate::error::{Error, Result};
use crate::graphon::kernel::{AnalyticKernel, CayleyProfile, Kernel};
use crate::graphon::partition::equipartition;
use crate::graphon::step::StepKernel;

pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => match (n.trim().parse::<f64>(), d.trim().parse::<f64>()) {
            (Ok(n), Ok(d)) if d != 0.0 => Some(n / d),
            _ => None,
        },
        None => s.parse::<f64>().ok(),
    };
    parsed
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(format!("'{s}' is not a number")))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

/// Reads a `k × k` matrix of plain decimals, one row per line.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        rows.push(
            record
                .iter()
                .map(parse_number)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(rows)
}

/// Parses a kernel specification; relative matrix paths resolve against `base_dir`.
pub fn parse_kernel(spec: &str, base_dir: &Path) -> Result<Kernel> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "constant" => Ok(Kernel::Constant(parse_number(rest)?)),
        "step" => {
            let (path, breaks) = rest.rsplit_once(':').ok_or_else(|| {
                Error::config(format!("step kernel '{spec}' needs <path>:<breakpoints>"))
            })?;
            let path = base_dir.join(path);
            let values = read_matrix_csv(&path)?;
            let breakpoints = if breaks.trim() == "uniform" {
                equipartition(values.len())
            } else {
                parse_list(breaks)?
            };
            Ok(Kernel::Step(StepKernel::new(breakpoints, values)?))
        }
        "cayley" => {
            let (profile, params) = rest.split_once(':').unwrap_or((rest, ""));
            let p = if params.trim().is_empty() {
                Vec::new()
            } else {
                parse_list(params)?
            };
            let profile = match (profile, p.as_slice()) {
                ("cosine", [mean, amplitude]) => CayleyProfile::Cosine {
                    mean: *mean,
                    amplitude: *amplitude,
                },
                ("band", [half_width]) => CayleyProfile::Band {
                    half_width: *half_width,
                },
                _ => {
                    return Err(Error::config(format!(
                        "unknown Cayley profile or parameters in '{spec}'"
                    )))
                }
            };
            Ok(Kernel::Analytic(AnalyticKernel::cayley(profile)))
        }
        "scalefree" => {
            let exponent = if rest.trim().is_empty() {
                1.0
            } else {
                parse_number(rest)?
            };
            if exponent <= 0.0 {
                return Err(Error::config("scale-free exponent must be positive"));
            }
            Ok(Kernel::Analytic(AnalyticKernel::scale_free(exponent)))
        }
        _ => Err(Error::config(format!(
            "unrecognised kernel specification '{spec}'"
        ))),
    }
}
