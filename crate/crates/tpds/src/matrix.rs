//! Dense matrix aliases and small helpers over the `faer` backend.
//!
//! `RMat`/`CMat` are the real and complex dense matrix types used for
//! block-circulant unfoldings, Fourier blocks, and oracle computations.

use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type RMat = faer::Mat<f64>;
pub type CMat = faer::Mat<C64>;

/// Largest absolute entry; zero for empty matrices.
pub fn max_abs_r(m: &RMat) -> f64 {
    let mut v = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, j)].abs());
        }
    }
    v
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs_c(m: &CMat) -> f64 {
    let mut v = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, j)].norm());
        }
    }
    v
}

/// Frobenius norm of a complex matrix.
pub fn fro_norm_c(m: &CMat) -> f64 {
    let mut s = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Widen a real matrix to complex.
pub fn to_complex(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// Entrywise conjugate.
pub fn conj_mat(m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

/// Largest entry modulus of the difference; both shapes must match.
pub fn max_abs_diff_c(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut v = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            v = v.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    v
}

/// Largest absolute entry of the difference; both shapes must match.
pub fn max_abs_diff_r(a: &RMat, b: &RMat) -> f64 {
    debug_assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut v = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            v = v.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    v
}
