//! Single-threaded timing of cascade vs. dense half-size postprocessing.
//!
//! Both variants share the identical dense DST core, so any difference
//! comes from the postprocessing step alone. Runs are interleaved
//! (cascade, dense, cascade, dense, …) so drift in machine load affects
//! both medians alike.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{forward_2d_with, Execution, GrayImage};
use crate::error::{Error, Result};
use crate::rdst::DenseHalfTransform;
use crate::regularity::rfst;

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub block: usize,
    pub image_size: usize,
    pub repeats: usize,
    pub seed: u64,
    pub cascade_secs: Vec<f64>,
    pub dense_half_secs: Vec<f64>,
    pub cascade_median: f64,
    pub dense_half_median: f64,
    /// Largest coefficient difference between the two variants.
    pub max_abs_diff: f64,
}

impl BenchReport {
    /// `dense_half_median − cascade_median`; positive when the cascade is faster.
    pub fn delta(&self) -> f64 {
        self.dense_half_median - self.cascade_median
    }

    pub fn relative_gap(&self) -> f64 {
        self.delta() / self.dense_half_median
    }

    pub const CSV_HEADER: &'static str =
        "M,image_size,repeats,seed,cascade_median_s,dense_half_median_s,delta_s,max_abs_diff";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.9},{:.9},{:.9},{:e}",
            self.block,
            self.image_size,
            self.repeats,
            self.seed,
            self.cascade_median,
            self.dense_half_median,
            self.delta(),
            self.max_abs_diff
        )
    }
}

pub fn random_image(size: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..size * size).map(|_| rng.random::<u8>()).collect();
    GrayImage::new(size, size, samples).expect("length is size²")
}

pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn bench_postprocessing(block: usize, image_size: usize, repeats: usize, seed: u64) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be positive".into()));
    }
    let cascade = rfst(block)?;
    let dense = DenseHalfTransform::new(block)?;
    let img = random_image(image_size, seed);

    // Warm-up, and the equality check between the two operators.
    let a = forward_2d_with(&img, &cascade, Execution::Serial)?;
    let b = forward_2d_with(&img, &dense, Execution::Serial)?;
    let max_abs_diff = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut cascade_secs = Vec::with_capacity(repeats);
    let mut dense_half_secs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        black_box(forward_2d_with(black_box(&img), &cascade, Execution::Serial)?);
        cascade_secs.push(start.elapsed().as_secs_f64());

        let start = Instant::now();
        black_box(forward_2d_with(black_box(&img), &dense, Execution::Serial)?);
        dense_half_secs.push(start.elapsed().as_secs_f64());
    }

    Ok(BenchReport {
        block,
        image_size,
        repeats,
        seed,
        cascade_median: median(&cascade_secs),
        dense_half_median: median(&dense_half_secs),
        cascade_secs,
        dense_half_secs,
        max_abs_diff,
    })
}
