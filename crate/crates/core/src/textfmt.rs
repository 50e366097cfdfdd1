//! Plain-text exports: dense matrices and reflection cascades.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which is
//! enough for every `f64` to parse back to the identical bit pattern.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::regularity::RegularityCascade;
use crate::transforms::GivensReflection;

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per line, comma separated, no header.
pub fn emit_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&x| format_real(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(lineno, line)| {
            line.split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: '{}': {e}", lineno + 1, field.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

/// CSV lines `k,i,j,theta` with `k` counting from 1 in application order.
pub fn emit_cascade(c: &RegularityCascade) -> String {
    let mut out = String::new();
    for (k, g) in c.reflections().iter().enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, g.i(), g.j(), format_real(g.theta())).unwrap();
    }
    out
}

/// Parses cascade CSV; stages must be consecutive from 1.
pub fn parse_cascade(text: &str, size: usize) -> Result<RegularityCascade> {
    let mut reflections = Vec::new();
    for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields k,i,j,theta"));
        }
        let k: usize = fields[0].parse().map_err(|_| bad("bad stage"))?;
        if k != reflections.len() + 1 {
            return Err(bad("stages must be consecutive from 1"));
        }
        let i: usize = fields[1].parse().map_err(|_| bad("bad index i"))?;
        let j: usize = fields[2].parse().map_err(|_| bad("bad index j"))?;
        let theta: f64 = fields[3].parse().map_err(|_| bad("bad angle"))?;
        reflections.push(GivensReflection::new(i, j, theta)?);
    }
    RegularityCascade::new(reflections, size)
}
