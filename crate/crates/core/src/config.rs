//! Text parsers: `key=value` config files, comma-separated float lists,
//! and the energy grammar
//!
//!   linear:c=<floats>
//!   quadratic:m=<floats>,q=<floats>
//!   barrier:alpha=<float>
//!
//! For `quadratic`, `m` fixes the dimension n and `q` may carry 1 value
//! (a multiple of the identity), n values (a diagonal), or n^2 values
//! (a full row-major matrix). Parsing is shape-only; symmetry and
//! positive-semidefiniteness are checked by [`EnergySpec::validate`].

use crate::error::ParseError;
use crate::sde::EnergySpec;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Parses `key=value` lines. Blank lines and `#` comments are skipped;
/// keys and values are trimmed; later duplicates win.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut map = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ParseError::MissingEquals { line: index + 1 })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ParseError::EmptyKey { line: index + 1 });
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Parses a comma-separated list of finite floats.
pub fn parse_float_list(text: &str) -> Result<Vec<f64>, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    text.split(',')
        .map(|part| {
            let part = part.trim();
            let value: f64 = part.parse().map_err(|_| ParseError::InvalidFloat {
                text: part.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ParseError::InvalidFloat {
                    text: part.to_string(),
                });
            }
            Ok(value)
        })
        .collect()
}

fn strip_prefix<'a>(text: &'a str, prefix: &str) -> Result<&'a str, ParseError> {
    text.strip_prefix(prefix)
        .ok_or_else(|| ParseError::BadEnergySpec(format!("expected {prefix:?} in {text:?}")))
}

impl FromStr for EnergySpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseError::Empty);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| ParseError::BadEnergySpec(format!("missing ':' in {s:?}")))?;
        match kind.trim() {
            "linear" => {
                let c = parse_float_list(strip_prefix(rest.trim(), "c=")?)?;
                Ok(EnergySpec::Linear {
                    cost: DVector::from_vec(c),
                })
            }
            "quadratic" => {
                let rest = rest.trim();
                let (m_part, q_part) = rest.split_once(",q=").ok_or_else(|| {
                    ParseError::BadEnergySpec(format!("expected \"m=...,q=...\" in {rest:?}"))
                })?;
                let center = parse_float_list(strip_prefix(m_part.trim(), "m=")?)?;
                let q = parse_float_list(q_part)?;
                let n = center.len();
                let matrix = if q.len() == 1 {
                    DMatrix::identity(n, n) * q[0]
                } else if q.len() == n {
                    DMatrix::from_diagonal(&DVector::from_vec(q))
                } else if q.len() == n * n {
                    DMatrix::from_row_slice(n, n, &q)
                } else {
                    return Err(ParseError::BadEnergySpec(format!(
                        "q has {} entries; expected 1, {n} (diagonal) or {} (full matrix)",
                        q.len(),
                        n * n
                    )));
                };
                Ok(EnergySpec::Quadratic {
                    center: DVector::from_vec(center),
                    matrix,
                })
            }
            "barrier" => {
                let alpha_text = strip_prefix(rest.trim(), "alpha=")?.trim();
                let alpha: f64 = alpha_text.parse().map_err(|_| ParseError::InvalidFloat {
                    text: alpha_text.to_string(),
                })?;
                if !alpha.is_finite() {
                    return Err(ParseError::InvalidFloat {
                        text: alpha_text.to_string(),
                    });
                }
                Ok(EnergySpec::BarrierMultiple { alpha })
            }
            other => Err(ParseError::UnknownEnergyKind {
                kind: other.to_string(),
            }),
        }
    }
}

fn join_floats(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for EnergySpec {
    /// Canonical form; parsing it back yields an equal spec (quadratic
    /// matrices are always written in full).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergySpec::Linear { cost } => {
                write!(f, "linear:c={}", join_floats(cost.iter().copied()))
            }
            EnergySpec::Quadratic { center, matrix } => write!(
                f,
                "quadratic:m={},q={}",
                join_floats(center.iter().copied()),
                join_floats(matrix.transpose().iter().copied())
            ),
            EnergySpec::BarrierMultiple { alpha } => write!(f, "barrier:alpha={alpha}"),
        }
    }
}
