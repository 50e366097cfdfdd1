//! Regularity-constrained fast sine transform (R-FST).
//!
//! The type-II DST leaks the DC component of a signal into its even
//! subbands. Appending `M/2 − 1` planar reflections, with angles taken
//! from the DST's response to a constant input, folds that leakage back
//! into subband 0 and yields an orthonormal transform with no DC leakage.
//!
//! Modules:
//! - [`transforms`]: DCT-II, DST-II, Hadamard, reflections, signed permutations
//! - [`regularity`]: constraint cascades and the streaming R-FST operator
//! - [`rdst`]: the SVD/null-space R-DST used as an independent oracle
//! - [`analysis`]: coding gain, DC leakage, frequency responses
//! - [`imaging`]: 2-D block transforms, PGM/coefficient I/O, benchmark
//! - [`cli`]: the `rfst` command line

pub mod analysis;
pub mod arith;
pub mod cli;
pub mod error;
pub mod imaging;
pub mod matrix;
pub mod rdst;
pub mod regularity;
pub mod textfmt;
pub mod transforms;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use regularity::{rfst, FastRegularTransform, RegularityCascade};
pub use transforms::{dct2, dst2, hadamard, GivensReflection, OrthonormalTransform, TransformKind};

/// Dense matrix of the requested kind. R-FST is densified from its cascade.
pub fn build_transform(kind: TransformKind, m: usize) -> Result<OrthonormalTransform> {
    match kind {
        TransformKind::Dct2 => dct2(m),
        TransformKind::Dst2 => dst2(m),
        TransformKind::Hadamard => hadamard(m),
        TransformKind::Rfst => Ok(rfst(m)?.as_matrix()),
        TransformKind::Rdst => rdst::rdst(m),
        TransformKind::Custom => Err(Error::InvalidArgument(
            "custom transforms cannot be built by name".into(),
        )),
    }
}
