//! Coding gain under an AR(1) model, DC leakage, and frequency responses.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::regularity::dc_response;
use crate::transforms::{OrthonormalTransform, TransformKind};

/// Default correlation coefficient for the image-row model.
pub const DEFAULT_RHO: f64 = 0.95;
/// Default number of frequency samples on `[0, π]`.
pub const DEFAULT_FREQ_POINTS: usize = 512;

const MEAN_VARIANCE_TOL: f64 = 1e-10;

/// Stationary first-order autoregressive source with unit variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ar1Process {
    rho: f64,
    size: usize,
}

impl Ar1Process {
    pub fn new(rho: f64, size: usize) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
        Ok(Self { rho, size })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Toeplitz covariance `R[i][j] = ρ^|i−j|`.
    pub fn covariance(&self) -> Matrix {
        let powers: Vec<f64> = (0..self.size).map(|k| self.rho.powi(k as i32)).collect();
        Matrix::from_fn(self.size, self.size, |i, j| powers[i.abs_diff(j)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodingGainReport {
    pub kind: TransformKind,
    pub size: usize,
    pub rho: f64,
    pub subband_variances: Vec<f64>,
    pub gain_db: f64,
}

impl CodingGainReport {
    /// `kind,M,rho,gain_db` with the gain at two decimals.
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{:.2}", self.kind, self.size, self.rho, self.gain_db)
    }
}

/// Ratio of arithmetic to geometric mean of the subband variances, in dB.
pub fn coding_gain(t: &OrthonormalTransform, rho: f64) -> Result<CodingGainReport> {
    let process = Ar1Process::new(rho, t.size())?;
    let r = process.covariance();
    let m = t.size();

    let subband_variances: Vec<f64> = t
        .matrix()
        .row_iter()
        .map(|row| {
            let r_row = r.mul_vec(row).expect("square sizes match");
            crate::matrix::dot(row, &r_row)
        })
        .collect();

    let mean = subband_variances.iter().sum::<f64>() / m as f64;
    if (mean - 1.0).abs() > MEAN_VARIANCE_TOL {
        return Err(Error::NotOrthonormal {
            residual: (mean - 1.0).abs(),
        });
    }
    let log_geo_mean = subband_variances.iter().map(|v| v.ln()).sum::<f64>() / m as f64;
    let gain_db = 10.0 * (mean.ln() - log_geo_mean) / std::f64::consts::LN_10;

    Ok(CodingGainReport {
        kind: t.kind(),
        size: m,
        rho,
        subband_variances,
        gain_db,
    })
}

/// Energy of `T·1` outside the DC subband.
pub fn dc_leakage_energy(t: &OrthonormalTransform) -> f64 {
    dc_response(t).leakage()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyResponse {
    pub row: usize,
    pub omega: Vec<f64>,
    pub magnitude: Vec<f64>,
}

/// `|H_m(e^{jω})| = |Σ_n t_{m,n} e^{−jωn}|` on `ω_i = iπ/(N−1)`.
pub fn frequency_response(t: &OrthonormalTransform, row: usize, points: usize) -> Result<FrequencyResponse> {
    if row >= t.size() {
        return Err(Error::IndexOutOfRange {
            index: row,
            len: t.size(),
        });
    }
    if points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 frequency points, got {points}")));
    }
    let taps = t.row(row);
    let step = PI / (points - 1) as f64;
    let omega: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
    let magnitude = omega
        .iter()
        .map(|&w| {
            let (re, im) = taps.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, &h)| {
                let phase = w * n as f64;
                (re + h * phase.cos(), im - h * phase.sin())
            });
            re.hypot(im)
        })
        .collect();
    Ok(FrequencyResponse { row, omega, magnitude })
}
