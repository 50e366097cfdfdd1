//! Regularity constraint cascades and the fast regular sine transform.
//!
//! A transform `T` is regular when `T·1 = [√M, 0, …, 0]ᵀ`. Starting from
//! the DC response `a = T·1`, each reflection on `(0, j)` with angle
//! `atan2(a_j, a_0)` folds `a_j` into `a_0`, leaving
//! `a_0 ← √(a_0² + a_j²)` and `a_j ← 0`. Appending the resulting cascade
//! after `T` makes the product regular while keeping it orthonormal.
//!
//! For the DST-II the odd entries of `T·1` already vanish, so only the
//! `M/2 − 1` reflections on `(0, 2k)` are needed.

use crate::arith::{Arith, Exact, OpCounter};
use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::transforms::{
    cascade_matrix, dst2, validate_size, GivensReflection, OrthonormalTransform, TransformKind,
};

/// Below this magnitude (relative to `√M`) the leading DC entry counts as zero.
const LEADING_ENTRY_EPS: f64 = 1e-14;

/// DC response `a⁽ᵏ⁾` after `stage − 1` constraint reflections.
#[derive(Clone, Debug, PartialEq)]
pub struct DcResponse {
    pub values: Vec<f64>,
    pub stage: usize,
}

impl DcResponse {
    /// Energy outside the DC subband.
    pub fn leakage(&self) -> f64 {
        self.values.iter().skip(1).map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }
}

/// `a⁽¹⁾ = T·1`.
pub fn dc_response(t: &OrthonormalTransform) -> DcResponse {
    let m = t.size();
    let values = t.matrix().row_iter().map(|row| row.iter().sum()).collect::<Vec<f64>>();
    debug_assert_eq!(values.len(), m);
    DcResponse { values, stage: 1 }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityCascade {
    reflections: Vec<GivensReflection>,
    size: usize,
}

impl RegularityCascade {
    pub fn new(reflections: Vec<GivensReflection>, size: usize) -> Result<Self> {
        for g in &reflections {
            g.check_len(size)?;
        }
        Ok(Self { reflections, size })
    }

    pub fn reflections(&self) -> &[GivensReflection] {
        &self.reflections
    }

    pub fn len(&self) -> usize {
        self.reflections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflections.is_empty()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Applies the reflections in order (first element first).
    #[inline]
    pub fn apply_in_place_with<A: Arith>(&self, v: &mut [f64], ar: &mut A) {
        for g in &self.reflections {
            g.apply_in_place_with(v, ar);
        }
    }

    /// Inverse action; every reflection is an involution, so reverse the order.
    pub fn unapply_in_place(&self, v: &mut [f64]) {
        for g in self.reflections.iter().rev() {
            g.apply_in_place(v);
        }
    }

    pub fn as_matrix(&self) -> Matrix {
        cascade_matrix(&self.reflections, self.size).expect("indices validated at construction")
    }
}

/// Folds `response[j]` into `response[0]` for every `j` in `targets`,
/// in order, recording one reflection per index.
fn fold_into_leading(
    mut response: Vec<f64>,
    targets: impl IntoIterator<Item = usize>,
) -> Result<(RegularityCascade, DcResponse)> {
    let size = response.len();
    let floor = LEADING_ENTRY_EPS * (size as f64).sqrt();
    let mut reflections = Vec::new();
    for (k, j) in targets.into_iter().enumerate() {
        if response[0].abs() <= floor {
            return Err(Error::DegenerateDcResponse { stage: k + 1 });
        }
        let theta = response[j].atan2(response[0]);
        let g = GivensReflection::new(0, j, theta)?;
        g.apply_in_place(&mut response);
        // The annihilated entry is zero by construction; drop the rounding residue.
        response[j] = 0.0;
        reflections.push(g);
    }
    let stage = reflections.len() + 1;
    Ok((
        RegularityCascade { reflections, size },
        DcResponse {
            values: response,
            stage,
        },
    ))
}

/// Cascade on `(0, j)`, `j = 1..M−1`, that makes any orthonormal `T` regular.
pub fn build_general_cascade(t: &OrthonormalTransform) -> Result<RegularityCascade> {
    let a = dc_response(t);
    let m = t.size();
    fold_into_leading(a.values, 1..m).map(|(c, _)| c)
}

/// The reduced `M/2 − 1` reflection cascade for the DST-II, together with
/// the final DC response.
pub fn build_dst_cascade_with_response(m: usize) -> Result<(RegularityCascade, DcResponse)> {
    validate_size(m)?;
    let a = dc_response(&dst2(m)?);
    fold_into_leading(a.values, (1..m / 2).map(|k| 2 * k))
}

pub fn build_dst_cascade(m: usize) -> Result<RegularityCascade> {
    build_dst_cascade_with_response(m).map(|(c, _)| c)
}

/// A dense core followed by a streaming reflection cascade.
#[derive(Clone, Debug)]
pub struct FastRegularTransform {
    core: OrthonormalTransform,
    cascade: RegularityCascade,
}

/// Arithmetic spent in one [`FastRegularTransform::forward_instrumented`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForwardOps {
    pub core: OpCounter,
    pub extra: OpCounter,
}

impl FastRegularTransform {
    pub fn new(core: OrthonormalTransform, cascade: RegularityCascade) -> Result<Self> {
        if core.size() != cascade.size() {
            return Err(Error::LengthMismatch {
                expected: core.size(),
                actual: cascade.size(),
            });
        }
        Ok(Self { core, cascade })
    }

    /// Regularizes an arbitrary orthonormal transform with the general cascade.
    pub fn regularize(core: OrthonormalTransform) -> Result<Self> {
        let cascade = build_general_cascade(&core)?;
        Self::new(core, cascade)
    }

    pub fn size(&self) -> usize {
        self.core.size()
    }

    pub fn core(&self) -> &OrthonormalTransform {
        &self.core
    }

    pub fn cascade(&self) -> &RegularityCascade {
        &self.cascade
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                actual: len,
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut out = vec![0.0; self.size()];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked forward into `out`.
    #[inline]
    pub fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        self.core.matrix().mul_vec_into(x, out);
        self.cascade.apply_in_place_with(out, &mut Exact);
    }

    pub fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len())?;
        let mut tmp = y.to_vec();
        let mut out = vec![0.0; self.size()];
        self.inverse_into(&mut tmp, &mut out);
        Ok(out)
    }

    /// Unchecked inverse; `y` is used as scratch.
    #[inline]
    pub fn inverse_into(&self, y: &mut [f64], out: &mut [f64]) {
        self.cascade.unapply_in_place(y);
        self.core.matrix().mul_transpose_vec_into(y, out);
    }

    /// Forward pass with every multiplication and addition counted,
    /// separately for the dense core and the cascade.
    pub fn forward_instrumented(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardOps)> {
        self.check_len(x.len())?;
        let mut ops = ForwardOps::default();
        let mut out = Vec::with_capacity(self.size());
        for row in self.core.matrix().row_iter() {
            let mut acc = ops.core.mul(row[0], x[0]);
            for (&t, &v) in row.iter().zip(x).skip(1) {
                let p = ops.core.mul(t, v);
                acc = ops.core.add(acc, p);
            }
            out.push(acc);
        }
        self.cascade.apply_in_place_with(&mut out, &mut ops.extra);
        Ok((out, ops))
    }

    /// Dense `R̃ · core`.
    pub fn as_matrix(&self) -> OrthonormalTransform {
        let dense = self
            .cascade
            .as_matrix()
            .mul(self.core.matrix())
            .expect("sizes checked at construction");
        let kind = if self.core.kind() == TransformKind::Dst2 {
            TransformKind::Rfst
        } else {
            TransformKind::Custom
        };
        OrthonormalTransform::from_trusted(kind, dense)
    }
}

/// The regularity-constrained fast sine transform `R̃ · S`.
pub fn rfst(m: usize) -> Result<FastRegularTransform> {
    let cascade = build_dst_cascade(m)?;
    FastRegularTransform::new(dst2(m)?, cascade)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PostprocessStyle {
    /// `M/2 − 1` reflections, 4 mul + 2 add each.
    Cascade,
    /// Dense `(M/2)×(M/2)` orthogonal matrix on the even coefficients.
    DenseHalf,
}

impl PostprocessStyle {
    pub fn name(self) -> &'static str {
        match self {
            PostprocessStyle::Cascade => "cascade",
            PostprocessStyle::DenseHalf => "dense_half",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpCountReport {
    pub size: usize,
    pub style: PostprocessStyle,
    pub mul: u64,
    pub add: u64,
}

/// Extra arithmetic on top of the DST core for each postprocessing style.
pub fn extra_op_count(m: usize, style: PostprocessStyle) -> Result<OpCountReport> {
    validate_size(m)?;
    if m < 4 {
        return Err(Error::InvalidSize(m));
    }
    let mm = m as u64;
    let (mul, add) = match style {
        PostprocessStyle::Cascade => (2 * (mm - 2), mm - 2),
        PostprocessStyle::DenseHalf => (mm * mm / 4, (mm - 2) * mm / 4),
    };
    Ok(OpCountReport {
        size: m,
        style,
        mul,
        add,
    })
}
