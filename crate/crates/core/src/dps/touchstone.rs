//! Touchstone v1 reader for 2-port S-parameter files.

use std::path::Path;

use num_complex::Complex64;

use super::TwoPortSParams;
use crate::math::{db_to_amplitude, polar_deg};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    RealImag,
    MagAngle,
    DbAngle,
}

impl Format {
    fn pair(self, a: f64, b: f64) -> Complex64 {
        match self {
            Format::RealImag => Complex64::new(a, b),
            Format::MagAngle => polar_deg(a, b),
            Format::DbAngle => polar_deg(db_to_amplitude(a), b),
        }
    }
}

/// Parses a 2-port Touchstone v1 document.
///
/// The option line defaults to `# GHZ S MA R 50` when absent. Data rows
/// carry `f S11 S21 S12 S22` as nine numbers; comments start with `!`.
pub fn parse_touchstone(text: &str) -> Result<Vec<TwoPortSParams>> {
    let mut scale = 1e9;
    let mut format = Format::MagAngle;
    let mut seen_option = false;
    let mut rows = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            return Err(Error::UnsupportedFormat(format!(
                "line {line_no}: Touchstone v2 keyword `{line}`"
            )));
        }
        if let Some(options) = line.strip_prefix('#') {
            if seen_option {
                // Only the first option line counts.
                continue;
            }
            seen_option = true;
            parse_options(options, line_no, &mut scale, &mut format)?;
            continue;
        }

        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::TouchstoneSyntax {
                    line: line_no,
                    message: format!("`{tok}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match values.len() {
            9 => {}
            3 => {
                return Err(Error::UnsupportedFormat(format!(
                    "line {line_no}: one-port data row"
                )))
            }
            n => {
                return Err(Error::TouchstoneSyntax {
                    line: line_no,
                    message: format!("expected 9 values for a 2-port row, found {n}"),
                })
            }
        }
        let frequency_hz = values[0] * scale;
        if !(frequency_hz.is_finite() && frequency_hz >= 0.0) {
            return Err(Error::TouchstoneSyntax {
                line: line_no,
                message: "invalid frequency".into(),
            });
        }
        let s11 = format.pair(values[1], values[2]);
        let s21 = format.pair(values[3], values[4]);
        let s12 = format.pair(values[5], values[6]);
        let s22 = format.pair(values[7], values[8]);
        let row = TwoPortSParams::new(s11, s12, s21, s22, frequency_hz).map_err(|_| {
            Error::TouchstoneSyntax {
                line: line_no,
                message: "non-finite S-parameter".into(),
            }
        })?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_options(options: &str, line_no: usize, scale: &mut f64, format: &mut Format) -> Result<()> {
    let mut tokens = options.split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => *scale = 1.0,
            "KHZ" => *scale = 1e3,
            "MHZ" => *scale = 1e6,
            "GHZ" => *scale = 1e9,
            "S" => {}
            p @ ("Y" | "Z" | "H" | "G") => {
                return Err(Error::UnsupportedFormat(format!(
                    "line {line_no}: {p}-parameters are not supported"
                )))
            }
            "RI" => *format = Format::RealImag,
            "MA" => *format = Format::MagAngle,
            "DB" => *format = Format::DbAngle,
            "R" => {
                let r = tokens.next().ok_or_else(|| Error::TouchstoneSyntax {
                    line: line_no,
                    message: "missing reference impedance after R".into(),
                })?;
                r.parse::<f64>().map_err(|_| Error::TouchstoneSyntax {
                    line: line_no,
                    message: format!("`{r}` is not a reference impedance"),
                })?;
            }
            other => {
                return Err(Error::TouchstoneSyntax {
                    line: line_no,
                    message: format!("unknown option `{other}`"),
                })
            }
        }
    }
    Ok(())
}

pub fn read_touchstone(path: impl AsRef<Path>) -> Result<Vec<TwoPortSParams>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_touchstone(&text)
}
