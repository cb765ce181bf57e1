//! Tensor eigendecomposition and SVD through the transform domain, plus
//! dense matrix counterparts used as oracles and by the unfolding method.
//!
//! Both factorizations work block by block: decompose the transformed
//! blocks for frequencies 0..=r/2, then mirror the conjugate frequencies so
//! the assembled factors come back real whenever the mathematics allows it.
//! The spectrum of the block-circulant unfolding is exactly the union of
//! the block spectra, which is what the oracle tests check.

use crate::error::{Result, TpdsError};
use crate::fourier::{dft_mode3, idft_mode3, FourierBlocks};
use crate::linalg;
use crate::matrix::{conj_mat, to_complex, C64, CMat, RMat};
use crate::tensor3::Tensor3;

/// Per-block spectral values: one vector per frequency, in block order.
#[derive(Clone, Debug, PartialEq)]
pub enum TupleSet {
    Eigen(Vec<Vec<C64>>),
    Singular(Vec<Vec<f64>>),
}

impl TupleSet {
    pub fn num_blocks(&self) -> usize {
        match self {
            TupleSet::Eigen(v) => v.len(),
            TupleSet::Singular(v) => v.len(),
        }
    }

    /// All eigenvalues across blocks, flattened in block order.
    pub fn flatten_eigen(&self) -> Option<Vec<C64>> {
        match self {
            TupleSet::Eigen(v) => Some(v.iter().flatten().copied().collect()),
            TupleSet::Singular(_) => None,
        }
    }

    /// All singular values across blocks, flattened in block order.
    pub fn flatten_singular(&self) -> Option<Vec<f64>> {
        match self {
            TupleSet::Singular(v) => Some(v.iter().flatten().copied().collect()),
            TupleSet::Eigen(_) => None,
        }
    }
}

/// Tensor eigendecomposition t = u ⋆ d ⋆ u⁻¹ with d slice-diagonal.
///
/// `u` and `d` hold the real parts of the assembled factors. When some
/// transformed block has eigenvalues off the real axis the factors cannot
/// be real; `complex_factors` flags that case and `u_blocks`/`d_blocks`
/// carry the exact transform-domain factors for verification.
#[derive(Clone, Debug)]
pub struct TEig {
    pub u: Tensor3,
    pub d: Tensor3,
    pub tuples: TupleSet,
    pub u_blocks: FourierBlocks,
    pub d_blocks: FourierBlocks,
    pub complex_factors: bool,
    pub max_imag_residual: f64,
}

/// Tensor SVD t = u ⋆ s ⋆ vᵀ with s slice-diagonal and u, v orthogonal.
/// Factors are always real.
#[derive(Clone, Debug)]
pub struct TSvd {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
    pub tuples: TupleSet,
    pub max_imag_residual: f64,
}

fn require_square(t: &Tensor3, what: &str) -> Result<()> {
    if t.n() != t.m() {
        return Err(TpdsError::DimensionMismatch(format!(
            "{what} requires square slices, got {:?}",
            t.dims()
        )));
    }
    Ok(())
}

/// True for the frequencies whose block is its own conjugate mirror
/// (frequency 0 always, frequency r/2 when r is even).
fn self_conjugate(k: usize, r: usize) -> bool {
    k == 0 || 2 * k == r
}

/// Real part of a (numerically real) self-conjugate block.
fn real_part(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn diag_cmat(vals: &[C64]) -> CMat {
    let n = vals.len();
    CMat::from_fn(n, n, |i, j| if i == j { vals[i] } else { C64::ZERO })
}

/// Eigendecomposition of one transformed block with a deterministic order:
/// |λ| descending, then argument ascending, then real part descending.
fn block_eig_sorted(block: &CMat, k: usize, r: usize) -> Result<(Vec<C64>, CMat)> {
    let (vals, vecs) = if self_conjugate(k, r) {
        linalg::eig_r_pairs(&real_part(block))?
    } else {
        linalg::eig_c(block)?
    };
    let order = linalg::eig_sort_order(&vals);
    let sorted_vals: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = linalg::permute_cols(&vecs, &order);
    Ok((sorted_vals, sorted_vecs))
}

/// Tensor eigendecomposition with the default eigenvector condition limit
/// 1 / default_tol_rank_rel(n, n).
pub fn t_eig(t: &Tensor3) -> Result<TEig> {
    t_eig_with(t, None)
}

/// Tensor eigendecomposition; a block whose eigenvector matrix has
/// condition number above `cond_limit` is rejected as defective.
pub fn t_eig_with(t: &Tensor3, cond_limit: Option<f64>) -> Result<TEig> {
    require_square(t, "t_eig")?;
    let n = t.n();
    let r = t.r();
    let limit = cond_limit.unwrap_or(1.0 / crate::default_tol_rank_rel(n, n));
    let f = dft_mode3(t);

    let mut u_blocks = vec![CMat::zeros(n, n); r];
    let mut d_blocks = vec![CMat::zeros(n, n); r];
    let mut tuples = vec![Vec::new(); r];
    for k in 0..=r / 2 {
        let (vals, vecs) = block_eig_sorted(f.block(k), k, r)?;
        let svals = linalg::singular_values_c(&vecs)?;
        let smin = svals.last().copied().unwrap_or(0.0);
        let cond = if smin > 0.0 { svals[0] / smin } else { f64::INFINITY };
        if cond > limit {
            return Err(TpdsError::DefectiveBlock {
                block: k,
                cond,
                limit,
            });
        }
        // mirrored blocks take the conjugated factors in the same column
        // order; that keeps the assembled tensors real
        if k > 0 && !self_conjugate(k, r) {
            u_blocks[r - k] = conj_mat(&vecs);
            d_blocks[r - k] = diag_cmat(&vals.iter().map(|v| v.conj()).collect::<Vec<_>>());
            tuples[r - k] = vals.iter().map(|v| v.conj()).collect();
        }
        u_blocks[k] = vecs;
        d_blocks[k] = diag_cmat(&vals);
        tuples[k] = vals;
    }

    let u_blocks = FourierBlocks::new(n, n, u_blocks)?;
    let d_blocks = FourierBlocks::new(n, n, d_blocks)?;
    let (u, imag_u) = idft_mode3(&u_blocks);
    let (d, imag_d) = idft_mode3(&d_blocks);
    let max_imag_residual = imag_u.max(imag_d);
    let scale = u_blocks.max_abs().max(d_blocks.max_abs()).max(f64::MIN_POSITIVE);
    let complex_factors = max_imag_residual > 1e-8 * scale;
    Ok(TEig {
        u,
        d,
        tuples: TupleSet::Eigen(tuples),
        u_blocks,
        d_blocks,
        complex_factors,
        max_imag_residual,
    })
}

/// Transform-domain reconstruction residual max_k ‖U_k D_k U_k⁻¹ − T_k‖max.
/// Valid whether or not the assembled factors are real.
pub fn t_eig_residual(te: &TEig, t: &Tensor3) -> Result<f64> {
    let f = dft_mode3(t);
    let mut worst = 0.0f64;
    for k in 0..f.r() {
        let ud = te.u_blocks.block(k) * te.d_blocks.block(k);
        let rec = linalg::solve_right(te.u_blocks.block(k), &ud)?;
        for j in 0..rec.ncols() {
            for i in 0..rec.nrows() {
                worst = worst.max((rec[(i, j)] - f.block(k)[(i, j)]).norm());
            }
        }
    }
    Ok(worst)
}

/// Tensor SVD. Self-conjugate blocks use a real SVD so the assembled
/// factors are real to rounding error for every input.
pub fn t_svd(t: &Tensor3) -> Result<TSvd> {
    let n = t.n();
    let m = t.m();
    let r = t.r();
    let f = dft_mode3(t);

    let mut u_blocks = vec![CMat::zeros(n, n); r];
    let mut s_blocks = vec![CMat::zeros(n, m); r];
    let mut v_blocks = vec![CMat::zeros(m, m); r];
    let mut tuples = vec![Vec::new(); r];
    for k in 0..=r / 2 {
        let (ub, sv, vb) = if self_conjugate(k, r) {
            let (u, s, v) = linalg::svd_r(&real_part(f.block(k)))?;
            (to_complex(&u), s, to_complex(&v))
        } else {
            linalg::svd_c(f.block(k))?
        };
        let sb = CMat::from_fn(n, m, |i, j| {
            if i == j && i < sv.len() {
                C64::new(sv[i], 0.0)
            } else {
                C64::ZERO
            }
        });
        if k > 0 && !self_conjugate(k, r) {
            u_blocks[r - k] = conj_mat(&ub);
            s_blocks[r - k] = sb.clone();
            v_blocks[r - k] = conj_mat(&vb);
            tuples[r - k] = sv.clone();
        }
        u_blocks[k] = ub;
        s_blocks[k] = sb;
        v_blocks[k] = vb;
        tuples[k] = sv;
    }

    let u_blocks = FourierBlocks::new(n, n, u_blocks)?;
    let s_blocks = FourierBlocks::new(n, m, s_blocks)?;
    let v_blocks = FourierBlocks::new(m, m, v_blocks)?;
    let (u, iu) = idft_mode3(&u_blocks);
    let (s, is) = idft_mode3(&s_blocks);
    let (v, iv) = idft_mode3(&v_blocks);
    Ok(TSvd {
        u,
        s,
        v,
        tuples: TupleSet::Singular(tuples),
        max_imag_residual: iu.max(is).max(iv),
    })
}

/// Eigenvalue tuples only; identical values to `t_eig(t)?.tuples`.
pub fn eigentuples(t: &Tensor3) -> Result<TupleSet> {
    require_square(t, "eigentuples")?;
    let r = t.r();
    let f = dft_mode3(t);
    let mut tuples = vec![Vec::new(); r];
    for k in 0..=r / 2 {
        // same decomposition path as t_eig so the values agree exactly
        let (vals, _) = block_eig_sorted(f.block(k), k, r)?;
        if k > 0 && !self_conjugate(k, r) {
            tuples[r - k] = vals.iter().map(|v| v.conj()).collect();
        }
        tuples[k] = vals;
    }
    Ok(TupleSet::Eigen(tuples))
}

/// Singular value tuples only; identical values to `t_svd(t)?.tuples`.
pub fn singular_tuples(t: &Tensor3) -> Result<TupleSet> {
    let r = t.r();
    let f = dft_mode3(t);
    let mut tuples = vec![Vec::new(); r];
    for k in 0..=r / 2 {
        let sv = if self_conjugate(k, r) {
            let (_, s, _) = linalg::svd_r(&real_part(f.block(k)))?;
            s
        } else {
            let (_, s, _) = linalg::svd_c(f.block(k))?;
            s
        };
        if k > 0 && !self_conjugate(k, r) {
            tuples[r - k] = sv.clone();
        }
        tuples[k] = sv;
    }
    Ok(TupleSet::Singular(tuples))
}

/// Spectral radius: the largest eigenvalue modulus across all blocks,
/// which equals the spectral radius of the block-circulant unfolding.
pub fn spectral_radius(t: &Tensor3) -> Result<f64> {
    require_square(t, "spectral_radius")?;
    let r = t.r();
    let f = dft_mode3(t);
    let mut rho = 0.0f64;
    for k in 0..=r / 2 {
        // mirrored blocks have conjugate spectra, same moduli
        let vals = if self_conjugate(k, r) {
            linalg::eigenvalues_r(&real_part(f.block(k)))?
        } else {
            linalg::eigenvalues_c(f.block(k))?
        };
        for v in vals {
            rho = rho.max(v.norm());
        }
    }
    Ok(rho)
}

/// Eigenvalues of a dense real square matrix.
pub fn dense_eig(m: &RMat) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(TpdsError::DimensionMismatch(format!(
            "dense_eig requires a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    linalg::eigenvalues_r(m)
}

/// Singular values of a dense real matrix, descending.
pub fn dense_svd(m: &RMat) -> Result<Vec<f64>> {
    linalg::singular_values_r(m)
}

/// Numerical rank of a dense real matrix: singular values above
/// rel · σ_max count, rel defaulting to max(dims) · ε.
pub fn dense_rank(m: &RMat, tol_rank_rel: Option<f64>) -> Result<usize> {
    let svals = dense_svd(m)?;
    let smax = svals.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let rel = tol_rank_rel.unwrap_or_else(|| crate::default_tol_rank_rel(m.nrows(), m.ncols()));
    Ok(linalg::rank_from_svals(&svals, rel * smax))
}
