//! Dense and sparse linear algebra over `f64` and `Complex64`.

mod arnoldi;
mod band;
mod dense;
mod hessenberg;
mod scalar;
mod sparse;
mod symeig;

pub use arnoldi::{
    fix_sign, shift_invert_arnoldi, ArnoldiOptions, ArnoldiStats, RitzPair, ShiftInvertOperator,
};
pub use band::{BandLu, SparseLu};
pub use dense::{DenseMatrix, LuFactors};
pub use hessenberg::{general_eig, hessenberg_eig, hessenberg_reduce};
pub use scalar::{axpy, dot_bilinear, dot_sesquilinear, norm2, norm_inf, to_complex_vec, Scalar};
pub use sparse::{reverse_cuthill_mckee, SparseMatrix};
pub use symeig::{cholesky, sym_eig_dense, sym_eig_generalized, SymEig};
