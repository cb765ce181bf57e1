//! Dense third-order tensor type and the T-product algebra built on
//! block-circulant unfoldings.
//!
//! A tensor is stored frontal-slice-major; within a slice, column-major.
//! Slice indices are 0-based in code; the text formats and error messages
//! use the same 0-based frequency indexing as the reports.

use crate::error::{Result, TpdsError};
use crate::fourier;
use crate::linalg;
use crate::matrix::{max_abs_diff_r, RMat};

/// Dense real n×m×r tensor: r frontal slices of shape n×m.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    m: usize,
    r: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    /// Wrap raw data laid out slice-major, column-major within each slice.
    pub fn new(n: usize, m: usize, r: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 || r == 0 {
            return Err(TpdsError::ShapeMismatch(format!(
                "dimensions must be positive, got {n}x{m}x{r}"
            )));
        }
        if data.len() != n * m * r {
            return Err(TpdsError::ShapeMismatch(format!(
                "data length {} does not match {n}x{m}x{r}",
                data.len()
            )));
        }
        Ok(Self { n, m, r, data })
    }

    pub fn zeros(n: usize, m: usize, r: usize) -> Self {
        Self {
            n,
            m,
            r,
            data: vec![0.0; n * m * r],
        }
    }

    pub fn from_fn(n: usize, m: usize, r: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n, m, r);
        for k in 0..r {
            for j in 0..m {
                for i in 0..n {
                    let v = f(i, j, k);
                    t.set(i, j, k, v);
                }
            }
        }
        t
    }

    /// Build from owned frontal slices, all of equal shape.
    pub fn from_slices(slices: &[RMat]) -> Result<Self> {
        let r = slices.len();
        if r == 0 {
            return Err(TpdsError::ShapeMismatch("no slices".into()));
        }
        let (n, m) = (slices[0].nrows(), slices[0].ncols());
        let mut t = Self::zeros(n, m, r);
        for (k, s) in slices.iter().enumerate() {
            if s.nrows() != n || s.ncols() != m {
                return Err(TpdsError::ShapeMismatch(format!(
                    "slice {k} is {}x{}, expected {n}x{m}",
                    s.nrows(),
                    s.ncols()
                )));
            }
            for j in 0..m {
                for i in 0..n {
                    t.set(i, j, k, s[(i, j)]);
                }
            }
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.m, self.r)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.n * self.m + j * self.n + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let ix = self.idx(i, j, k);
        self.data[ix] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Zero-copy view of frontal slice k.
    pub fn slice_ref(&self, k: usize) -> faer::MatRef<'_, f64> {
        let nm = self.n * self.m;
        faer::MatRef::from_column_major_slice(&self.data[k * nm..(k + 1) * nm], self.n, self.m)
    }

    pub fn slice_owned(&self, k: usize) -> RMat {
        self.slice_ref(k).to_owned()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            r: self.r,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(TpdsError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(Self {
            n: self.n,
            m: self.m,
            r: self.r,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(TpdsError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(Self {
            n: self.n,
            m: self.m,
            r: self.r,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    /// Largest absolute difference between two tensors of equal shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dims(), other.dims());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |a, (&x, &y)| a.max((x - y).abs()))
    }

    /// Concatenate along the second mode (columns): [self, other].
    pub fn concat_mode2(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.r != other.r {
            return Err(TpdsError::ShapeMismatch(format!(
                "mode-2 concat needs matching n and r: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        let mut t = Self::zeros(self.n, self.m + other.m, self.r);
        for k in 0..self.r {
            for j in 0..self.m {
                for i in 0..self.n {
                    t.set(i, j, k, self.get(i, j, k));
                }
            }
            for j in 0..other.m {
                for i in 0..self.n {
                    t.set(i, self.m + j, k, other.get(i, j, k));
                }
            }
        }
        Ok(t)
    }
}

/// Block-circulant matrix of `t`: nr×mr, block (i, j) = slice ((i - j) mod r);
/// the first block column stacks the slices in order.
pub fn bcirc(t: &Tensor3) -> RMat {
    let (n, m, r) = t.dims();
    RMat::from_fn(n * r, m * r, |row, col| {
        let (bi, i) = (row / n, row % n);
        let (bj, j) = (col / m, col % m);
        let k = (bi + r - bj) % r;
        t.get(i, j, k)
    })
}

/// Vertical stack of the frontal slices: (nr)×m.
pub fn unfold(t: &Tensor3) -> RMat {
    let (n, m, r) = t.dims();
    RMat::from_fn(n * r, m, |row, col| t.get(row % n, col, row / n))
}

/// Inverse of [`unfold`]: exact round-trip.
pub fn fold(mat: &RMat, n: usize, m: usize, r: usize) -> Result<Tensor3> {
    if mat.nrows() != n * r || mat.ncols() != m {
        return Err(TpdsError::ShapeMismatch(format!(
            "fold expects {}x{m}, got {}x{}",
            n * r,
            mat.nrows(),
            mat.ncols()
        )));
    }
    Ok(Tensor3::from_fn(n, m, r, |i, j, k| mat[(k * n + i, j)]))
}

/// Inverse of [`bcirc`]: reads the first block column as the slices and
/// verifies the full matrix is block-circulant to `tol_circ`
/// (default 1e-9 times the max-abs of the input).
pub fn un_bcirc(mat: &RMat, n: usize, m: usize, r: usize, tol_circ: Option<f64>) -> Result<Tensor3> {
    if mat.nrows() != n * r || mat.ncols() != m * r {
        return Err(TpdsError::ShapeMismatch(format!(
            "un_bcirc expects {}x{}, got {}x{}",
            n * r,
            m * r,
            mat.nrows(),
            mat.ncols()
        )));
    }
    let t = Tensor3::from_fn(n, m, r, |i, j, k| mat[(k * n + i, j)]);
    let mut max_abs = 0.0f64;
    for j in 0..m * r {
        for i in 0..n * r {
            max_abs = max_abs.max(mat[(i, j)].abs());
        }
    }
    let tol = tol_circ.unwrap_or(1e-9 * max_abs);
    let mut max_dev = 0.0f64;
    for bi in 0..r {
        for bj in 0..r {
            let k = (bi + r - bj) % r;
            for j in 0..m {
                for i in 0..n {
                    let dev = (mat[(bi * n + i, bj * m + j)] - t.get(i, j, k)).abs();
                    max_dev = max_dev.max(dev);
                }
            }
        }
    }
    if max_dev > tol {
        return Err(TpdsError::NotCirculant { max_dev, tol });
    }
    Ok(t)
}

fn check_product_dims(a: &Tensor3, b: &Tensor3) -> Result<()> {
    if a.m() != b.n() || a.r() != b.r() {
        return Err(TpdsError::DimensionMismatch(format!(
            "t_product needs a.m == b.n and a.r == b.r, got {:?} * {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

/// T-product via the literal definition: fold(bcirc(a)·unfold(b)).
pub fn t_product_literal(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_product_dims(a, b)?;
    let big = bcirc(a);
    let rhs = unfold(b);
    let prod = &big * &rhs;
    fold(&prod, a.n(), b.m(), a.r())
}

/// T-product via the Fourier path: per-block products, inverse transform.
pub fn t_product_fourier(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_product_dims(a, b)?;
    let fa = fourier::dft_mode3(a);
    let fb = fourier::dft_mode3(b);
    let prod = fa.mul_blocks(&fb)?;
    let (t, _residual) = fourier::idft_mode3(&prod);
    Ok(t)
}

/// T-product a ⋆ b. Dispatches to the Fourier path for r ≥ 4 and to the
/// literal block-circulant path below that, where transform overhead wins.
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    if a.r() >= 4 {
        t_product_fourier(a, b)
    } else {
        t_product_literal(a, b)
    }
}

/// T-identity: slice 0 is the n×n identity, the rest are zero.
pub fn t_identity(n: usize, r: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(n, n, r);
    for i in 0..n {
        t.set(i, i, 0, 1.0);
    }
    t
}

/// T-transpose: slice 0 transposed; slice k of the output is the transpose
/// of slice r-k of the input for k ≥ 1. Satisfies bcirc(tᵀ) = bcirc(t)ᵀ.
pub fn t_transpose(t: &Tensor3) -> Tensor3 {
    let (n, m, r) = t.dims();
    Tensor3::from_fn(m, n, r, |i, j, k| {
        let src = if k == 0 { 0 } else { r - k };
        t.get(j, i, src)
    })
}

/// T-inverse via per-Fourier-block inversion. Exists iff every block is
/// invertible; the error reports the first singular frequency.
pub fn t_inverse(t: &Tensor3) -> Result<Tensor3> {
    if t.n() != t.m() {
        return Err(TpdsError::ShapeMismatch(format!(
            "t_inverse needs square slices, got {:?}",
            t.dims()
        )));
    }
    let n = t.n();
    let tol_rel = crate::default_tol_rank_rel(n, n);
    let f = fourier::dft_mode3(t);
    let inv = f.try_map_blocks(|k, block| {
        let svals = linalg::singular_values_c(block)?;
        let smax = svals[0];
        let smin = svals[n - 1];
        if smin <= tol_rel * smax {
            return Err(TpdsError::Singular {
                block: k,
                min_sv: smin,
            });
        }
        let (pinv, _rank) = linalg::pinv_c(block, tol_rel * smax)?;
        Ok(pinv)
    })?;
    let (out, _residual) = fourier::idft_mode3(&inv);
    Ok(out)
}

/// Per-block Moore-Penrose pseudoinverse, inverse-transformed to a real
/// tensor. When bcirc(t) has full row rank this is a right T-inverse:
/// t ⋆ t_right_pinv(t) = t_identity.
pub fn t_right_pinv(t: &Tensor3) -> Result<Tensor3> {
    Ok(t_right_pinv_with_ranks(t)?.0)
}

/// As [`t_right_pinv`], also returning the per-block numerical ranks.
pub fn t_right_pinv_with_ranks(t: &Tensor3) -> Result<(Tensor3, Vec<usize>)> {
    let (n, m, _) = t.dims();
    let tol_rel = crate::default_tol_rank_rel(n, m);
    let f = fourier::dft_mode3(t);
    let mut ranks = vec![0usize; t.r()];
    let mut blocks = Vec::with_capacity(t.r());
    for (k, block) in f.blocks().iter().enumerate() {
        let svals = linalg::singular_values_c(block)?;
        let smax = svals.first().copied().unwrap_or(0.0);
        let (pinv, rank) = linalg::pinv_c(block, tol_rel * smax)?;
        ranks[k] = rank;
        blocks.push(pinv);
    }
    let fb = fourier::FourierBlocks::new(m, n, blocks)?;
    let (out, _residual) = fourier::idft_mode3(&fb);
    Ok((out, ranks))
}

/// True iff t ⋆ tᵀ and tᵀ ⋆ t are both within `tol` of the T-identity
/// in the max-abs metric.
pub fn is_t_orthogonal(t: &Tensor3, tol: f64) -> Result<bool> {
    if t.n() != t.m() {
        return Err(TpdsError::ShapeMismatch(format!(
            "is_t_orthogonal needs square slices, got {:?}",
            t.dims()
        )));
    }
    let tt = t_transpose(t);
    let id = t_identity(t.n(), t.r());
    let p1 = t_product(t, &tt)?;
    let p2 = t_product(&tt, t)?;
    Ok(p1.max_abs_diff(&id) <= tol && p2.max_abs_diff(&id) <= tol)
}

/// Max-abs residual of `m` against the identity matrix, used in tests.
pub fn identity_residual(m: &RMat) -> f64 {
    let eye = RMat::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { 1.0 } else { 0.0 });
    max_abs_diff_r(m, &eye)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{random_tensor, Dist};
    use crate::matrix::max_abs_diff_r;

    #[test]
    fn bcirc_r1_is_the_slice() {
        let t = random_tensor(3, 2, 1, 1, Dist::StandardNormal);
        let b = bcirc(&t);
        assert_eq!((b.nrows(), b.ncols()), (3, 2));
        for j in 0..2 {
            for i in 0..3 {
                assert_eq!(b[(i, j)], t.get(i, j, 0));
            }
        }
    }

    #[test]
    fn bcirc_r2_pattern() {
        let t = random_tensor(2, 2, 2, 2, Dist::StandardNormal);
        let b = bcirc(&t);
        for j in 0..2 {
            for i in 0..2 {
                assert_eq!(b[(i, j)], t.get(i, j, 0)); // (0,0) block = T1
                assert_eq!(b[(i, 2 + j)], t.get(i, j, 1)); // (0,1) block = T2
                assert_eq!(b[(2 + i, j)], t.get(i, j, 1)); // (1,0) block = T2
                assert_eq!(b[(2 + i, 2 + j)], t.get(i, j, 0)); // (1,1) block = T1
            }
        }
    }

    #[test]
    fn bcirc_r3_column_pattern() {
        // first block column T1,T2,T3; second T3,T1,T2; third T2,T3,T1
        let t = random_tensor(2, 3, 3, 3, Dist::StandardNormal);
        let b = bcirc(&t);
        let expect = [[0, 2, 1], [1, 0, 2], [2, 1, 0]];
        for bi in 0..3 {
            for bj in 0..3 {
                for j in 0..3 {
                    for i in 0..2 {
                        assert_eq!(b[(bi * 2 + i, bj * 3 + j)], t.get(i, j, expect[bi][bj]));
                    }
                }
            }
        }
    }

    #[test]
    fn fold_unfold_round_trip_exact() {
        for seed in 0..50 {
            let t = random_tensor(3, 4, 5, seed, Dist::Uniform);
            let u = unfold(&t);
            let back = fold(&u, 3, 4, 5).unwrap();
            assert_eq!(t, back);
        }
        let t = random_tensor(3, 4, 1, 99, Dist::StandardNormal);
        let u = unfold(&t);
        assert_eq!((u.nrows(), u.ncols()), (3, 4));
    }

    #[test]
    fn fold_rejects_bad_shape() {
        let m = RMat::zeros(5, 3);
        assert!(matches!(
            fold(&m, 2, 3, 2),
            Err(TpdsError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn un_bcirc_round_trip_and_violation() {
        let t = random_tensor(2, 3, 4, 5, Dist::StandardNormal);
        let b = bcirc(&t);
        let back = un_bcirc(&b, 2, 3, 4, None).unwrap();
        assert_eq!(t, back);

        let mut bad = b.clone();
        // entry outside the first block column, off-pattern
        bad[(0, 3)] += 1.0;
        match un_bcirc(&bad, 2, 3, 4, None) {
            Err(TpdsError::NotCirculant { max_dev, .. }) => {
                assert!((max_dev - 1.0).abs() < 1e-12);
            }
            other => panic!("expected NotCirculant, got {other:?}"),
        }
    }

    #[test]
    fn bcirc_product_closure() {
        let a = random_tensor(3, 3, 4, 11, Dist::StandardNormal);
        let b = random_tensor(3, 2, 4, 12, Dist::StandardNormal);
        let prod = &bcirc(&a) * &bcirc(&b);
        let viaun = un_bcirc(&prod, 3, 2, 4, None).unwrap();
        let direct = t_product(&a, &b).unwrap();
        assert!(viaun.max_abs_diff(&direct) < 1e-10 * direct.max_abs().max(1.0));
    }

    #[test]
    fn t_product_literal_matches_fourier() {
        let a = random_tensor(4, 3, 5, 21, Dist::StandardNormal);
        let b = random_tensor(3, 2, 5, 22, Dist::StandardNormal);
        let lit = t_product_literal(&a, &b).unwrap();
        let fou = t_product_fourier(&a, &b).unwrap();
        let scale = lit.max_abs().max(1.0);
        assert!(lit.max_abs_diff(&fou) < 1e-12 * scale.max(1.0) * 100.0);
    }

    #[test]
    fn t_product_r1_is_matrix_product() {
        let a = random_tensor(3, 3, 1, 31, Dist::StandardNormal);
        let b = random_tensor(3, 2, 1, 32, Dist::StandardNormal);
        let p = t_product(&a, &b).unwrap();
        let dense = &a.slice_owned(0) * &b.slice_owned(0);
        for j in 0..2 {
            for i in 0..3 {
                assert!((p.get(i, j, 0) - dense[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn t_identity_laws() {
        let b = random_tensor(2, 3, 4, 41, Dist::StandardNormal);
        let id = t_identity(2, 4);
        let p = t_product(&id, &b).unwrap();
        assert!(p.max_abs_diff(&b) < 1e-14 * b.max_abs().max(1.0) * 10.0);

        let eye = bcirc(&t_identity(3, 5));
        assert_eq!(identity_residual(&eye), 0.0);
    }

    #[test]
    fn t_product_rejects_mismatch() {
        let a = random_tensor(2, 3, 4, 1, Dist::Uniform);
        let b = random_tensor(2, 2, 4, 2, Dist::Uniform);
        assert!(matches!(
            t_product(&a, &b),
            Err(TpdsError::DimensionMismatch(_))
        ));
        let c = random_tensor(3, 2, 3, 3, Dist::Uniform);
        assert!(matches!(
            t_product(&a, &c),
            Err(TpdsError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn t_transpose_properties() {
        let t = random_tensor(3, 2, 4, 51, Dist::StandardNormal);
        // defining identity, exact
        let lhs = bcirc(&t_transpose(&t));
        let rhs = bcirc(&t).transpose().to_owned();
        assert_eq!(max_abs_diff_r(&lhs, &rhs), 0.0);
        // involution
        assert_eq!(t_transpose(&t_transpose(&t)), t);
        // r=1 is the matrix transpose
        let s = random_tensor(2, 3, 1, 52, Dist::Uniform);
        let st = t_transpose(&s);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(st.get(j, i, 0), s.get(i, j, 0));
            }
        }
    }

    #[test]
    fn t_inverse_identity_and_tube() {
        let id = t_identity(2, 3);
        let inv = t_inverse(&id).unwrap();
        assert!(inv.max_abs_diff(&id) < 1e-12);

        // n=1, r=2, tube (0.5, 0.1): Fourier blocks 0.6 and 0.4
        let tube = Tensor3::new(1, 1, 2, vec![0.5, 0.1]).unwrap();
        let inv = t_inverse(&tube).unwrap();
        let expect0 = 0.5 * (1.0 / 0.6 + 1.0 / 0.4);
        let expect1 = 0.5 * (1.0 / 0.6 - 1.0 / 0.4);
        assert!((inv.get(0, 0, 0) - expect0).abs() < 1e-12);
        assert!((inv.get(0, 0, 1) - expect1).abs() < 1e-12);
        let prod = t_product(&tube, &inv).unwrap();
        assert!(prod.max_abs_diff(&t_identity(1, 2)) < 1e-8);
    }

    #[test]
    fn t_inverse_zero_sum_tube_is_singular_at_dc() {
        let tube = Tensor3::new(1, 1, 2, vec![1.0, -1.0]).unwrap();
        match t_inverse(&tube) {
            Err(TpdsError::Singular { block, min_sv }) => {
                assert_eq!(block, 0);
                assert!(min_sv < 1e-14);
            }
            other => panic!("expected Singular, got {other:?}"),
        }
    }

    #[test]
    fn t_right_pinv_properties() {
        let id = t_identity(3, 2);
        let p = t_right_pinv(&id).unwrap();
        assert!(p.max_abs_diff(&id) < 1e-12);

        let x = random_tensor(2, 20, 4, 61, Dist::StandardNormal);
        let xp = t_right_pinv(&x).unwrap();
        let prod = t_product(&x, &xp).unwrap();
        assert!(prod.max_abs_diff(&t_identity(2, 4)) < 1e-8);

        // matches the dense Moore-Penrose pseudoinverse of bcirc(x)
        let big = bcirc(&x);
        let svals = linalg::singular_values_r(&big).unwrap();
        let thresh = crate::default_tol_rank_rel(big.nrows(), big.ncols()) * svals[0];
        let (dense_pinv, _) = linalg::pinv_r(&big, thresh).unwrap();
        let lifted = bcirc(&xp);
        assert!(max_abs_diff_r(&dense_pinv, &lifted) < 1e-8 * svals[0].recip().max(1.0));
    }

    #[test]
    fn t_orthogonality() {
        assert!(is_t_orthogonal(&t_identity(3, 4), 1e-10).unwrap());
        assert!(!is_t_orthogonal(&t_identity(3, 4).scale(2.0), 1e-8).unwrap());
        let rect = random_tensor(2, 3, 2, 71, Dist::Uniform);
        assert!(is_t_orthogonal(&rect, 1e-8).is_err());
    }

    #[test]
    fn associativity_on_random_triples() {
        for seed in 0..10 {
            let a = random_tensor(2, 3, 4, 100 + seed, Dist::StandardNormal);
            let b = random_tensor(3, 2, 4, 200 + seed, Dist::StandardNormal);
            let c = random_tensor(2, 2, 4, 300 + seed, Dist::StandardNormal);
            let left = t_product(&t_product(&a, &b).unwrap(), &c).unwrap();
            let right = t_product(&a, &t_product(&b, &c).unwrap()).unwrap();
            let scale = left.max_abs().max(1.0);
            assert!(left.max_abs_diff(&right) < 1e-9 * scale);
        }
    }
}
