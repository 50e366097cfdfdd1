//! Null-space construction of the regularity-constrained DST.
//!
//! This is deliberately independent of the reflection cascade: it starts
//! from the modified DST (constant row on top, sine rows below), then for
//! each odd row in turn zeroes it and replaces it with the unit vector
//! spanning the null space of what remains, found by SVD. It serves as
//! the equivalence oracle for [`crate::regularity::rfst`].

use nalgebra::DMatrix;

use crate::arith::{Arith, Exact, OpCounter};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::regularity::build_dst_cascade;
use crate::transforms::{dst2, validate_size, OrthonormalTransform, SignFlipPermutation, TransformKind};

/// Relative threshold below which a singular value is treated as zero.
pub const RANK_RTOL: f64 = 1e-10;
/// Default tolerance for row matching in [`signed_perm_equivalent`].
pub const DEFAULT_EQUIV_TOL: f64 = 1e-8;

const NULL_RESIDUAL_TOL: f64 = 1e-10;

fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Singular values of `m`, padded with zero rows to square if it is wide.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    to_nalgebra(&pad_square(m)).singular_values().iter().copied().collect()
}

pub fn numerical_rank(m: &Matrix) -> usize {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_RTOL * max).count()
}

fn pad_square(m: &Matrix) -> Matrix {
    if m.rows() >= m.cols() {
        return m.clone();
    }
    Matrix::from_fn(m.cols(), m.cols(), |r, c| if r < m.rows() { m[(r, c)] } else { 0.0 })
}

/// Unit vector spanning the one-dimensional null space of `s_tilde`.
///
/// The sign is fixed so that the first entry with magnitude above `1e-12`
/// is positive. `stage` is only used for error reporting.
pub fn null_vector(s_tilde: &Matrix, stage: usize) -> Result<Vec<f64>> {
    let square = pad_square(s_tilde);
    let n = square.cols();
    let svd = to_nalgebra(&square).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let zeros: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= RANK_RTOL * max)
        .map(|(i, _)| i)
        .collect();
    if zeros.len() != 1 {
        return Err(Error::NullSpaceDimension {
            stage,
            count: zeros.len(),
        });
    }

    let mut v: Vec<f64> = (0..n).map(|c| v_t[(zeros[0], c)]).collect();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let residual = s_tilde
        .mul_vec(&v)?
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    if residual > NULL_RESIDUAL_TOL {
        return Err(Error::NullResidual { stage, residual });
    }
    Ok(v)
}

/// The modified DST and how many of its odd rows have been replaced.
#[derive(Clone, Debug)]
pub struct ModifiedDst {
    rows: Matrix,
    stage: usize,
}

/// Constant row `√(1/M)` on top, `√(2/M)·sin(π m (n+½)/M)` below.
pub fn modified_dst(m: usize) -> Result<ModifiedDst> {
    validate_size(m)?;
    let dc = (1.0 / m as f64).sqrt();
    let ac = (2.0 / m as f64).sqrt();
    let rows = Matrix::from_fn(m, m, |k, n| {
        if k == 0 {
            dc
        } else {
            let p = (k * (2 * n + 1)) % (4 * m);
            ac * (std::f64::consts::PI * p as f64 / (2 * m) as f64).sin()
        }
    });
    Ok(ModifiedDst { rows, stage: 0 })
}

impl ModifiedDst {
    pub fn size(&self) -> usize {
        self.rows.rows()
    }

    /// Number of completed row replacements.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn is_complete(&self) -> bool {
        self.stage == self.size() / 2
    }

    pub fn numerical_rank(&self) -> usize {
        numerical_rank(&self.rows)
    }

    /// One replacement: zero row `2k+1`, take the null vector of the
    /// result, and write it back into that row.
    pub fn replace_next(&mut self) -> Result<()> {
        assert!(!self.is_complete(), "all odd rows already replaced");
        let target = 2 * self.stage + 1;
        let mut zeroed = self.rows.clone();
        zeroed.row_mut(target).fill(0.0);
        let v = null_vector(&zeroed, self.stage)?;
        self.rows.row_mut(target).copy_from_slice(&v);
        self.stage += 1;
        Ok(())
    }

    pub fn into_transform(self) -> OrthonormalTransform {
        OrthonormalTransform::from_trusted(TransformKind::Rdst, self.rows)
    }
}

/// Regularity-constrained DST via successive null-space row replacement.
pub fn rdst(m: usize) -> Result<OrthonormalTransform> {
    let mut md = modified_dst(m)?;
    while !md.is_complete() {
        md.replace_next()?;
    }
    Ok(md.into_transform())
}

/// Witness that `A = P·B` for a signed permutation `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedPermEquivalence {
    pub witness: SignFlipPermutation,
    pub max_residual: f64,
}

/// Matches every row of `a` to a distinct row of `±b` within `tol`
/// (infinity norm). Returns `Ok(None)` when no perfect matching exists.
pub fn signed_perm_equivalent(a: &Matrix, b: &Matrix, tol: f64) -> Result<Option<SignedPermEquivalence>> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::ShapeMismatch {
            rows: b.rows(),
            cols: b.cols(),
            expected_rows: a.rows(),
            expected_cols: a.cols(),
        });
    }
    let n = a.rows();
    let row_gap = |ra: &[f64], rb: &[f64], sign: f64| {
        ra.iter()
            .zip(rb)
            .fold(0.0f64, |acc, (x, y)| acc.max((x - sign * y).abs()))
    };

    // candidates[m] = (p, sign, residual) for every admissible pairing.
    let candidates: Vec<Vec<(usize, i8, f64)>> = (0..n)
        .map(|m| {
            (0..n)
                .filter_map(|p| {
                    let plus = row_gap(a.row(m), b.row(p), 1.0);
                    let minus = row_gap(a.row(m), b.row(p), -1.0);
                    let (sign, res) = if plus <= minus { (1, plus) } else { (-1, minus) };
                    (res <= tol).then_some((p, sign, res))
                })
                .collect()
        })
        .collect();

    // Kuhn's augmenting paths; owner[p] = row of `a` currently holding `p`.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut choice: Vec<Option<(usize, i8, f64)>> = vec![None; n];
    for m in 0..n {
        let mut visited = vec![false; n];
        if !augment(m, &candidates, &mut owner, &mut choice, &mut visited) {
            return Ok(None);
        }
    }

    let mut perm = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    for c in choice {
        let (p, s, r) = c.expect("perfect matching assigns every row");
        perm.push(p);
        signs.push(s);
        max_residual = max_residual.max(r);
    }
    Ok(Some(SignedPermEquivalence {
        witness: SignFlipPermutation::new(perm, signs)?,
        max_residual,
    }))
}

fn augment(
    m: usize,
    candidates: &[Vec<(usize, i8, f64)>],
    owner: &mut [Option<usize>],
    choice: &mut [Option<(usize, i8, f64)>],
    visited: &mut [bool],
) -> bool {
    for &cand in &candidates[m] {
        let p = cand.0;
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let free = match owner[p] {
            None => true,
            Some(other) => augment(other, candidates, owner, choice, visited),
        };
        if free {
            owner[p] = Some(m);
            choice[m] = Some(cand);
            return true;
        }
    }
    false
}

/// DST core followed by a dense `(M/2)×(M/2)` orthogonal matrix acting on
/// the even-indexed coefficients; the odd ones pass through untouched.
#[derive(Clone, Debug)]
pub struct DenseHalfTransform {
    core: OrthonormalTransform,
    half: Matrix,
}

impl DenseHalfTransform {
    pub fn new(m: usize) -> Result<Self> {
        validate_size(m)?;
        if m < 4 {
            return Err(Error::InvalidSize(m));
        }
        let full = build_dst_cascade(m)?.as_matrix();
        let h = m / 2;
        let half = Matrix::from_fn(h, h, |p, q| full[(2 * p, 2 * q)]);
        Ok(Self { core: dst2(m)?, half })
    }

    pub fn size(&self) -> usize {
        self.core.size()
    }

    pub fn half_matrix(&self) -> &Matrix {
        &self.half
    }

    /// `scratch` must hold at least `M/2` values.
    #[inline]
    pub fn postprocess_with<A: Arith>(&self, v: &mut [f64], scratch: &mut [f64], ar: &mut A) {
        let h = self.half.rows();
        for (s, x) in scratch[..h].iter_mut().zip(v.iter().step_by(2)) {
            *s = *x;
        }
        for (p, row) in self.half.row_iter().enumerate() {
            let mut acc = ar.mul(row[0], scratch[0]);
            for (&w, &s) in row.iter().zip(&scratch[..h]).skip(1) {
                let prod = ar.mul(w, s);
                acc = ar.add(acc, prod);
            }
            v[2 * p] = acc;
        }
    }

    /// Unchecked forward into `out`.
    #[inline]
    pub fn forward_into(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.core.matrix().mul_vec_into(x, out);
        self.postprocess_with(out, scratch, &mut Exact);
    }

    /// Unchecked inverse; `y` is overwritten and `scratch` must hold `M` values.
    pub fn inverse_into(&self, y: &mut [f64], out: &mut [f64], scratch: &mut [f64]) {
        let h = self.half.rows();
        let (gathered, evens) = scratch[..2 * h].split_at_mut(h);
        for (s, x) in gathered.iter_mut().zip(y.iter().step_by(2)) {
            *s = *x;
        }
        self.half.mul_transpose_vec_into(gathered, evens);
        for (p, e) in evens.iter().enumerate() {
            y[2 * p] = *e;
        }
        self.core.matrix().mul_transpose_vec_into(y, out);
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; self.size()];
        let mut scratch = vec![0.0; self.size() / 2];
        self.forward_into(x, &mut out, &mut scratch);
        Ok(out)
    }

    /// Output plus the arithmetic spent in the postprocessing only.
    pub fn forward_instrumented(&self, x: &[f64]) -> Result<(Vec<f64>, OpCounter)> {
        let mut out = self.core.apply(x)?;
        let mut scratch = vec![0.0; self.size() / 2];
        let mut counter = OpCounter::default();
        self.postprocess_with(&mut out, &mut scratch, &mut counter);
        Ok((out, counter))
    }
}

/// One-shot dense-half application; builds the operator each call.
pub fn rdst_fast_apply(m: usize, x: &[f64]) -> Result<Vec<f64>> {
    DenseHalfTransform::new(m)?.forward(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::rfst;
    use crate::transforms::hadamard;

    #[test]
    fn modified_dst_rank_deficient_by_one() {
        for m in [2, 4, 8, 16] {
            assert_eq!(modified_dst(m).unwrap().numerical_rank(), m - 1, "M={m}");
        }
        let sv = singular_values(modified_dst(4).unwrap().rows());
        assert_eq!(sv.iter().filter(|&&s| s < 1e-12).count(), 1);
        assert_eq!(sv.iter().filter(|&&s| s > 0.1).count(), 3);
    }

    #[test]
    fn first_null_vector_is_alternating_row() {
        for m in [2, 4, 8, 32] {
            let mut zeroed = modified_dst(m).unwrap().rows().clone();
            zeroed.row_mut(1).fill(0.0);
            let v = null_vector(&zeroed, 0).unwrap();
            let s = (1.0 / m as f64).sqrt();
            for (n, x) in v.iter().enumerate() {
                let expected = if n % 2 == 0 { s } else { -s };
                assert!((x - expected).abs() < 1e-12, "M={m} n={n}");
            }
        }
    }

    #[test]
    fn null_vector_rejects_wrong_nullity() {
        let mut z = Matrix::identity(4);
        z.row_mut(0).fill(0.0);
        z.row_mut(1).fill(0.0);
        assert!(matches!(
            null_vector(&z, 3),
            Err(Error::NullSpaceDimension { stage: 3, count: 2 })
        ));
        assert!(matches!(
            null_vector(&Matrix::identity(4), 0),
            Err(Error::NullSpaceDimension { count: 0, .. })
        ));
    }

    #[test]
    fn second_replacement_is_orthogonal_to_kept_rows() {
        let mut md = modified_dst(4).unwrap();
        md.replace_next().unwrap();
        md.replace_next().unwrap();
        assert!(md.is_complete());
        let rows = md.rows();
        for kept in [0, 1, 2] {
            assert!(crate::matrix::dot(rows.row(3), rows.row(kept)).abs() < 1e-12);
        }
    }

    #[test]
    fn rdst_is_orthonormal_and_regular() {
        for m in [2, 4, 8, 16, 32] {
            let t = rdst(m).unwrap();
            assert!(t.orthonormality_residual() < 1e-10, "M={m}");
            let a = t.apply(&vec![1.0; m]).unwrap();
            assert!((a[0] - (m as f64).sqrt()).abs() < 1e-9);
            assert!(a[1..].iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn equivalence_identity_and_negative() {
        let h = hadamard(8).unwrap().into_matrix();
        let eq = signed_perm_equivalent(&h, &h, 1e-12).unwrap().unwrap();
        assert_eq!(eq.witness, SignFlipPermutation::identity(8));
        let r8 = rfst(8).unwrap().as_matrix().into_matrix();
        assert!(signed_perm_equivalent(&r8, &h, 1e-8).unwrap().is_none());
        assert!(signed_perm_equivalent(&r8, &Matrix::identity(4), 1e-8).is_err());
    }

    #[test]
    fn equivalence_recovers_permutation() {
        let a = rfst(8).unwrap().as_matrix().into_matrix();
        let p = SignFlipPermutation::new(vec![3, 0, 7, 1, 6, 2, 5, 4], vec![1, -1, -1, 1, 1, -1, 1, -1]).unwrap();
        let b = p.left_apply(&a);
        // b = P·a, so the witness for (b, a) is P itself.
        let eq = signed_perm_equivalent(&b, &a, 1e-12).unwrap().unwrap();
        assert_eq!(eq.witness, p);
        assert_eq!(eq.max_residual, 0.0);
    }

    #[test]
    fn dense_half_structure() {
        for m in [4, 8, 16, 32] {
            let t = DenseHalfTransform::new(m).unwrap();
            assert!(t.half_matrix().gram_residual() < 1e-13);
            let full = build_dst_cascade(m).unwrap().as_matrix();
            for r in 0..m {
                for c in 0..m {
                    if r % 2 == 1 || c % 2 == 1 {
                        let expected = if r == c { 1.0 } else { 0.0 };
                        assert_eq!(full[(r, c)], expected);
                    }
                }
            }
        }
        assert!(DenseHalfTransform::new(2).is_err());
    }

    #[test]
    fn dense_half_matches_cascade_and_counts() {
        for m in [4, 8, 16, 32] {
            let x: Vec<f64> = (0..m).map(|k| ((k * 7 + 3) % 11) as f64 - 5.0).collect();
            let fast = rfst(m).unwrap().forward(&x).unwrap();
            let dense = rdst_fast_apply(m, &x).unwrap();
            assert!(fast.iter().zip(&dense).all(|(a, b)| (a - b).abs() < 1e-12));
            let (_, ops) = DenseHalfTransform::new(m).unwrap().forward_instrumented(&x).unwrap();
            assert_eq!(ops.mul, (m * m / 4) as u64);
            assert_eq!(ops.add, ((m - 2) * m / 4) as u64);

            let t = DenseHalfTransform::new(m).unwrap();
            let mut y = dense.clone();
            let mut back = vec![0.0; m];
            t.inverse_into(&mut y, &mut back, &mut vec![0.0; m]);
            assert!(back.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-12));
        }
        let ones = rdst_fast_apply(8, &[1.0; 8]).unwrap();
        assert!((ones[0] - 8f64.sqrt()).abs() < 1e-12 && ones[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
