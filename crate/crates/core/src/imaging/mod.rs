//! Separable 2-D block transforms on 8-bit grayscale images.
//!
//! Each `M×M` block `B` maps to `T·B·Tᵀ`: the 1-D operator runs over the
//! block rows, then over the columns of the intermediate result.
//! Coefficients are stored in place, i.e. coefficient `(u, v)` of the
//! block at `(by, bx)` lives at pixel `(by·M + u, bx·M + v)`.

pub mod bench;
pub mod coeff;
pub mod pgm;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rdst::DenseHalfTransform;
use crate::regularity::FastRegularTransform;
use crate::transforms::OrthonormalTransform;

pub use bench::{bench_postprocessing, BenchReport};

/// A 1-D operator usable block-wise. `scratch` always holds at least `M` values.
pub trait BlockTransform: Sync {
    fn block_size(&self) -> usize;
    fn forward_vec(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]);
    /// `y` may be overwritten.
    fn inverse_vec(&self, y: &mut [f64], out: &mut [f64], scratch: &mut [f64]);
}

impl BlockTransform for OrthonormalTransform {
    fn block_size(&self) -> usize {
        self.size()
    }

    fn forward_vec(&self, x: &[f64], out: &mut [f64], _scratch: &mut [f64]) {
        self.matrix().mul_vec_into(x, out);
    }

    fn inverse_vec(&self, y: &mut [f64], out: &mut [f64], _scratch: &mut [f64]) {
        self.matrix().mul_transpose_vec_into(y, out);
    }
}

impl BlockTransform for FastRegularTransform {
    fn block_size(&self) -> usize {
        self.size()
    }

    fn forward_vec(&self, x: &[f64], out: &mut [f64], _scratch: &mut [f64]) {
        self.forward_into(x, out);
    }

    fn inverse_vec(&self, y: &mut [f64], out: &mut [f64], _scratch: &mut [f64]) {
        self.inverse_into(y, out);
    }
}

impl BlockTransform for DenseHalfTransform {
    fn block_size(&self) -> usize {
        self.size()
    }

    fn forward_vec(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.forward_into(x, out, scratch);
    }

    fn inverse_vec(&self, y: &mut [f64], out: &mut [f64], scratch: &mut [f64]) {
        self.inverse_into(y, out, scratch);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn constant(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }
}

/// Block transform coefficients, stored in place per block.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffPlane {
    pub width: usize,
    pub height: usize,
    pub block: usize,
    pub values: Vec<f64>,
}

impl CoeffPlane {
    pub fn new(width: usize, height: usize, block: usize, values: Vec<f64>) -> Result<Self> {
        check_blocks(width, height, block)?;
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            block,
            values,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn total_energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Energy per subband `(u, v)`, row-major `M×M`.
    pub fn subband_energies(&self) -> Vec<f64> {
        let m = self.block;
        let mut energy = vec![0.0; m * m];
        for (y, row) in self.values.chunks_exact(self.width).enumerate() {
            let u = y % m;
            for (x, c) in row.iter().enumerate() {
                energy[u * m + x % m] += c * c;
            }
        }
        energy
    }

    /// Fraction of the total energy held by subband `(0, 0)`.
    pub fn dc_energy_fraction(&self) -> f64 {
        let total = self.total_energy();
        if total == 0.0 {
            return 0.0;
        }
        self.subband_energies()[0] / total
    }
}

/// Real-valued reconstruction produced by [`inverse_2d`].
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlane {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl SamplePlane {
    /// Rounds to the nearest integer and clamps to `0..=255`.
    pub fn to_gray(&self) -> GrayImage {
        let samples = self
            .values
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            samples,
        }
    }

    pub fn max_abs_diff(&self, img: &GrayImage) -> f64 {
        assert_eq!((self.width, self.height), (img.width, img.height));
        self.values
            .iter()
            .zip(&img.samples)
            .map(|(v, &s)| (v - f64::from(s)).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

fn check_blocks(width: usize, height: usize, block: usize) -> Result<()> {
    if block == 0 || width % block != 0 || height % block != 0 {
        return Err(Error::BlockMismatch {
            width,
            height,
            block,
        });
    }
    Ok(())
}

/// Per-thread buffers for one `M×M` block.
struct Workspace {
    block: Vec<f64>,
    mid: Vec<f64>,
    col_in: Vec<f64>,
    col_out: Vec<f64>,
    scratch: Vec<f64>,
}

impl Workspace {
    fn new(m: usize) -> Self {
        Self {
            block: vec![0.0; m * m],
            mid: vec![0.0; m * m],
            col_in: vec![0.0; m],
            col_out: vec![0.0; m],
            scratch: vec![0.0; m],
        }
    }
}

/// Applies `op` to every row of `ws.block`, then to every column, leaving
/// the result in `ws.block`.
fn separable_block(
    m: usize,
    ws: &mut Workspace,
    op: &(impl Fn(&mut [f64], &mut [f64], &mut [f64]) + ?Sized),
) {
    for (src, dst) in ws.block.chunks_exact_mut(m).zip(ws.mid.chunks_exact_mut(m)) {
        op(src, dst, &mut ws.scratch);
    }
    for c in 0..m {
        for r in 0..m {
            ws.col_in[r] = ws.mid[r * m + c];
        }
        op(&mut ws.col_in, &mut ws.col_out, &mut ws.scratch);
        for r in 0..m {
            ws.block[r * m + c] = ws.col_out[r];
        }
    }
}

/// Runs `op` separably over every block of `plane` (in place).
fn process_blocks(
    plane: &mut [f64],
    width: usize,
    m: usize,
    exec: Execution,
    op: &(impl Fn(&mut [f64], &mut [f64], &mut [f64]) + Sync),
) {
    let strip = |rows: &mut [f64]| {
        let mut ws = Workspace::new(m);
        for bx in 0..width / m {
            for r in 0..m {
                let base = r * width + bx * m;
                ws.block[r * m..(r + 1) * m].copy_from_slice(&rows[base..base + m]);
            }
            separable_block(m, &mut ws, op);
            for r in 0..m {
                let base = r * width + bx * m;
                rows[base..base + m].copy_from_slice(&ws.block[r * m..(r + 1) * m]);
            }
        }
    };
    match exec {
        Execution::Serial => plane.chunks_exact_mut(width * m).for_each(strip),
        Execution::Parallel => plane.par_chunks_exact_mut(width * m).for_each(strip),
    }
}

pub fn forward_2d<T: BlockTransform + ?Sized>(img: &GrayImage, t: &T) -> Result<CoeffPlane> {
    forward_2d_with(img, t, Execution::Parallel)
}

pub fn forward_2d_with<T: BlockTransform + ?Sized>(
    img: &GrayImage,
    t: &T,
    exec: Execution,
) -> Result<CoeffPlane> {
    let m = t.block_size();
    check_blocks(img.width, img.height, m)?;
    let mut values: Vec<f64> = img.samples.iter().map(|&s| f64::from(s)).collect();
    process_blocks(&mut values, img.width, m, exec, &|x: &mut [f64], out: &mut [f64], s: &mut [f64]| {
        t.forward_vec(x, out, s)
    });
    Ok(CoeffPlane {
        width: img.width,
        height: img.height,
        block: m,
        values,
    })
}

pub fn inverse_2d<T: BlockTransform + ?Sized>(c: &CoeffPlane, t: &T) -> Result<SamplePlane> {
    inverse_2d_with(c, t, Execution::Parallel)
}

pub fn inverse_2d_with<T: BlockTransform + ?Sized>(
    c: &CoeffPlane,
    t: &T,
    exec: Execution,
) -> Result<SamplePlane> {
    let m = t.block_size();
    if c.block != m {
        return Err(Error::InvalidArgument(format!(
            "coefficient plane uses {}x{} blocks but the transform is {m}x{m}",
            c.block, c.block
        )));
    }
    check_blocks(c.width, c.height, m)?;
    let mut values = c.values.clone();
    process_blocks(&mut values, c.width, m, exec, &|y: &mut [f64], out: &mut [f64], s: &mut [f64]| {
        t.inverse_vec(y, out, s)
    });
    Ok(SamplePlane {
        width: c.width,
        height: c.height,
        values,
    })
}

/// Groups coefficient `(u, v)` of every block into one tile, giving an
/// `M×M` grid of `(W/M)×(H/M)` subband images, then maps magnitudes with
/// `255·ln(1+|c|)/ln(1+c_max)`.
pub fn subband_mosaic(c: &CoeffPlane) -> GrayImage {
    let m = c.block;
    let (tile_w, tile_h) = (c.width / m, c.height / m);
    let c_max = c.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let denom = c_max.ln_1p();
    let mut samples = vec![0u8; c.width * c.height];
    if denom > 0.0 {
        for y in 0..c.height {
            let (by, u) = (y / m, y % m);
            for x in 0..c.width {
                let (bx, v) = (x / m, x % m);
                let level = 255.0 * c.get(x, y).abs().ln_1p() / denom;
                let (ox, oy) = (v * tile_w + bx, u * tile_h + by);
                samples[oy * c.width + ox] = level.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    GrayImage {
        width: c.width,
        height: c.height,
        samples,
    }
}
