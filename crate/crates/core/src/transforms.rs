//! Classical orthonormal transforms (DCT-II, DST-II, Hadamard) and the
//! planar reflection / signed permutation primitives they are built from.
//!
//! Row index `m` is the output subband, column index `n` the input sample.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::arith::{Arith, Exact};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Orthonormality tolerance for `T·Tᵀ` used when accepting external matrices.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Dct2,
    Dst2,
    Hadamard,
    Rfst,
    Rdst,
    Custom,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Dct2 => "dct",
            TransformKind::Dst2 => "dst",
            TransformKind::Hadamard => "ht",
            TransformKind::Rfst => "rfst",
            TransformKind::Rdst => "rdst",
            TransformKind::Custom => "custom",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dct" | "dct2" => Ok(TransformKind::Dct2),
            "dst" | "dst2" => Ok(TransformKind::Dst2),
            "ht" | "hadamard" => Ok(TransformKind::Hadamard),
            "rfst" | "r-fst" => Ok(TransformKind::Rfst),
            "rdst" | "r-dst" => Ok(TransformKind::Rdst),
            "custom" => Ok(TransformKind::Custom),
            other => Err(Error::InvalidArgument(format!("unknown transform '{other}'"))),
        }
    }
}

/// Rejects anything that is not `2^ℓ` with `ℓ ≥ 1`.
pub fn validate_size(m: usize) -> Result<()> {
    if m >= 2 && m.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidSize(m))
    }
}

/// A dense square orthonormal matrix tagged with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalTransform {
    kind: TransformKind,
    matrix: Matrix,
}

impl OrthonormalTransform {
    /// Accepts an arbitrary matrix after checking shape and orthonormality.
    pub fn from_matrix(kind: TransformKind, matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected_rows: matrix.rows(),
                expected_cols: matrix.rows(),
            });
        }
        validate_size(matrix.rows())?;
        let residual = matrix.gram_residual();
        if !(residual <= ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self { kind, matrix })
    }

    /// For constructions that are orthonormal by derivation.
    pub(crate) fn from_trusted(kind: TransformKind, matrix: Matrix) -> Self {
        debug_assert!(matrix.is_square() && validate_size(matrix.rows()).is_ok());
        Self { kind, matrix }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.matrix[(m, n)]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        self.matrix.row(m)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                actual: y.len(),
            });
        }
        let mut out = vec![0.0; self.size()];
        self.matrix.mul_transpose_vec_into(y, &mut out);
        Ok(out)
    }

    /// `max |T·Tᵀ − I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        self.matrix.gram_residual()
    }

    /// `max_m | ‖t_m‖₂ − 1 |`.
    pub fn row_norm_residual(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (crate::matrix::norm2(r) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn with_kind(mut self, kind: TransformKind) -> Self {
        self.kind = kind;
        self
    }
}

/// `cos(π·num/den)` with the integer argument reduced modulo `2·den`
/// first, so large `num` does not lose precision.
fn cos_pi_frac(num: usize, den: usize) -> f64 {
    let reduced = num % (2 * den);
    (PI * reduced as f64 / den as f64).cos()
}

fn sin_pi_frac(num: usize, den: usize) -> f64 {
    let reduced = num % (2 * den);
    (PI * reduced as f64 / den as f64).sin()
}

/// Orthonormal type-II DCT.
pub fn dct2(m: usize) -> Result<OrthonormalTransform> {
    validate_size(m)?;
    let dc = (1.0 / m as f64).sqrt();
    let ac = (2.0 / m as f64).sqrt();
    // π/M · k · (n + ½) = π · k(2n+1) / 2M
    let matrix = Matrix::from_fn(m, m, |k, n| {
        if k == 0 {
            dc
        } else {
            ac * cos_pi_frac(k * (2 * n + 1), 2 * m)
        }
    });
    Ok(OrthonormalTransform::from_trusted(TransformKind::Dct2, matrix))
}

/// Orthonormal type-II DST with the alternating row last.
///
/// Built directly from the sine formula, then checked entrywise against
/// the order-inverted, sign-flipped DCT `J·C·D`.
pub fn dst2(m: usize) -> Result<OrthonormalTransform> {
    validate_size(m)?;
    let last = (1.0 / m as f64).sqrt();
    let ac = (2.0 / m as f64).sqrt();
    let direct = Matrix::from_fn(m, m, |k, n| {
        if k == m - 1 {
            if n % 2 == 0 {
                last
            } else {
                -last
            }
        } else {
            ac * sin_pi_frac((k + 1) * (2 * n + 1), 2 * m)
        }
    });

    let via_dct = dst2_from_dct(m)?;
    let gap = direct.max_abs_diff(&via_dct);
    assert!(
        gap <= 1e-14,
        "DST-II direct construction disagrees with J·C·D by {gap:e} at M={m}"
    );

    Ok(OrthonormalTransform::from_trusted(TransformKind::Dst2, direct))
}

/// `J · C · D`: order inversion of the DCT rows and sign flip of the odd columns.
pub fn dst2_from_dct(m: usize) -> Result<Matrix> {
    let c = dct2(m)?;
    let j = SignFlipPermutation::reversal(m);
    let d = SignFlipPermutation::alternating_signs(m);
    Ok(d.right_apply(&j.left_apply(c.matrix())))
}

/// Normalized Sylvester-ordered Hadamard matrix.
pub fn hadamard(m: usize) -> Result<OrthonormalTransform> {
    validate_size(m)?;
    let scale = (1.0 / m as f64).sqrt();
    let matrix = Matrix::from_fn(m, m, |r, c| {
        if (r & c).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    });
    Ok(OrthonormalTransform::from_trusted(TransformKind::Hadamard, matrix))
}

/// Planar reflection on coordinates `(i, j)`:
/// `[[cos θ, sin θ], [sin θ, −cos θ]]`, identity elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensReflection {
    i: usize,
    j: usize,
    theta: f64,
    cos: f64,
    sin: f64,
}

impl GivensReflection {
    pub fn new(i: usize, j: usize, theta: f64) -> Result<Self> {
        if i >= j {
            return Err(Error::InvalidArgument(format!(
                "reflection indices must satisfy i < j (got i={i}, j={j})"
            )));
        }
        Ok(Self {
            i,
            j,
            theta,
            cos: theta.cos(),
            sin: theta.sin(),
        })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// In-place application; 4 multiplications and 2 additions.
    #[inline]
    pub fn apply_in_place_with<A: Arith>(&self, v: &mut [f64], ar: &mut A) {
        let (x, y) = (v[self.i], v[self.j]);
        let xc = ar.mul(x, self.cos);
        let ys = ar.mul(y, self.sin);
        let xs = ar.mul(x, self.sin);
        let yc = ar.mul(y, self.cos);
        v[self.i] = ar.add(xc, ys);
        v[self.j] = ar.sub(xs, yc);
    }

    #[inline]
    pub fn apply_in_place(&self, v: &mut [f64]) {
        self.apply_in_place_with(v, &mut Exact);
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if self.j >= len {
            return Err(Error::IndexOutOfRange { index: self.j, len });
        }
        Ok(())
    }

    /// Dense `size × size` form.
    pub fn as_matrix(&self, size: usize) -> Result<Matrix> {
        self.check_len(size)?;
        let mut m = Matrix::identity(size);
        m[(self.i, self.i)] = self.cos;
        m[(self.j, self.j)] = -self.cos;
        m[(self.i, self.j)] = self.sin;
        m[(self.j, self.i)] = self.sin;
        Ok(m)
    }
}

pub fn apply_reflection(g: &GivensReflection, v: &[f64]) -> Result<Vec<f64>> {
    g.check_len(v.len())?;
    let mut out = v.to_vec();
    g.apply_in_place(&mut out);
    Ok(out)
}

/// Dense form of the product `g_K ⋯ g_2 · g_1` (first element applied first).
pub fn cascade_matrix(reflections: &[GivensReflection], size: usize) -> Result<Matrix> {
    let mut acc = Matrix::identity(size);
    for g in reflections {
        g.check_len(size)?;
        // Left-multiplying by g only touches rows i and j.
        let (ri, rj) = (acc.row(g.i).to_vec(), acc.row(g.j).to_vec());
        for c in 0..size {
            acc[(g.i, c)] = g.cos * ri[c] + g.sin * rj[c];
            acc[(g.j, c)] = g.sin * ri[c] - g.cos * rj[c];
        }
    }
    Ok(acc)
}

/// Orthogonal matrix from the full `M(M−1)/2` reflection product, ordered
/// with `i` descending from `M−2` and, within each `i`, `j` descending
/// from `M−1` to `i+1`; the leftmost factor is `(M−2, M−1)`.
///
/// `angles` is consumed in that left-to-right order.
pub fn orthogonal_from_angles(m: usize, angles: &[f64]) -> Result<OrthonormalTransform> {
    validate_size(m)?;
    let expected = m * (m - 1) / 2;
    if angles.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: angles.len(),
        });
    }
    let mut factors = Vec::with_capacity(expected);
    let mut it = angles.iter();
    for i in (0..m - 1).rev() {
        for j in (i + 1..m).rev() {
            factors.push(GivensReflection::new(i, j, *it.next().unwrap())?);
        }
    }
    // cascade_matrix applies its first element first, i.e. rightmost.
    factors.reverse();
    let matrix = cascade_matrix(&factors, m)?;
    Ok(OrthonormalTransform::from_trusted(TransformKind::Custom, matrix))
}

/// Signed permutation `P` with `(P·x)[m] = signs[m] · x[perm[m]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignFlipPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignFlipPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if perm.len() != signs.len() {
            return Err(Error::LengthMismatch {
                expected: perm.len(),
                actual: signs.len(),
            });
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        if let Some(s) = signs.iter().find(|s| !matches!(s, 1 | -1)) {
            return Err(Error::InvalidArgument(format!("sign {s} is not ±1")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            perm: (0..m).collect(),
            signs: vec![1; m],
        }
    }

    /// The order-inversion matrix `J`.
    pub fn reversal(m: usize) -> Self {
        Self {
            perm: (0..m).rev().collect(),
            signs: vec![1; m],
        }
    }

    /// The diagonal sign flip `D = diag((−1)^m)`.
    pub fn alternating_signs(m: usize) -> Self {
        Self {
            perm: (0..m).collect(),
            signs: (0..m).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len(), self.len());
        for (r, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            m[(r, p)] = f64::from(s);
        }
        m
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| f64::from(s) * x[p])
            .collect()
    }

    /// `P · A`: row `r` of the result is `signs[r] · A.row(perm[r])`.
    pub fn left_apply(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.rows(), self.len());
        Matrix::from_fn(a.rows(), a.cols(), |r, c| {
            f64::from(self.signs[r]) * a[(self.perm[r], c)]
        })
    }

    /// `A · P`: column `perm[k]` of the result is `signs[k] · A.col(k)`.
    pub fn right_apply(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.cols(), self.len());
        let mut out = Matrix::zeros(a.rows(), a.cols());
        for r in 0..a.rows() {
            for (k, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
                out[(r, p)] = f64::from(s) * a[(r, k)];
            }
        }
        out
    }
}
