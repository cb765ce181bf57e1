//! Dense numerical kernels backing the algebra and the informativity tests.
//!
//! Thin wrappers over faer (SVD, eigendecomposition, pseudoinverse) plus the
//! pencil machinery used by the controllability candidate procedure: a
//! Hessenberg-triangular reduction of square pencil pairs, O(m²) determinant
//! evaluation and linear solves on the reduced form, smallest-singular-value
//! estimation by inverse iteration, and companion-matrix polynomial roots.
//! Heavily rectangular real singular values are reduced by a Householder QR
//! first, as in the classical rectangular-SVD preprocessing.

use crate::error::{Result, TpdsError};
use crate::matrix::{C64, CMat, RMat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Aspect ratio beyond which real singular values go through a Householder
/// QR of the tall orientation first (σ(A) = σ(R), so only the small
/// triangular factor reaches the iterative kernel).
const QR_FIRST_ASPECT: usize = 4;

/// Singular values of a real matrix, descending.
pub fn singular_values_r(m: &RMat) -> Result<Vec<f64>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let small = rows.min(cols);
    if small > 0 && rows.max(cols) >= QR_FIRST_ASPECT * small {
        return qr_first_svals(m);
    }
    m.singular_values()
        .map_err(|e| TpdsError::Numerical(format!("real SVD failed: {e:?}")))
}

/// σ of a heavily rectangular matrix: triangularize the tall orientation
/// with Householder reflections, then take σ of the q×q R factor.
fn qr_first_svals(m: &RMat) -> Result<Vec<f64>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let (p, q) = (rows.max(cols), rows.min(cols));
    let mut buf = vec![0.0f64; p * q];
    if rows >= cols {
        for j in 0..q {
            for (i, slot) in buf[j * p..(j + 1) * p].iter_mut().enumerate() {
                *slot = m[(i, j)];
            }
        }
    } else {
        for j in 0..q {
            for (i, slot) in buf[j * p..(j + 1) * p].iter_mut().enumerate() {
                *slot = m[(j, i)];
            }
        }
    }
    householder_reduce_tall(&mut buf, p, q);
    let rfac = RMat::from_fn(q, q, |i, j| if i <= j { buf[j * p + i] } else { 0.0 });
    rfac.singular_values()
        .map_err(|e| TpdsError::Numerical(format!("real SVD failed: {e:?}")))
}

/// In-place Householder triangularization of a tall column-major p×q
/// buffer (p ≥ q); only the upper triangle is meaningful afterwards.
/// Column norms are computed on rescaled entries so extreme magnitudes
/// cannot overflow the accumulation.
fn householder_reduce_tall(buf: &mut [f64], p: usize, q: usize) {
    debug_assert_eq!(buf.len(), p * q);
    let mut w = vec![0.0f64; p];
    for j in 0..q {
        let (head, tail_cols) = buf.split_at_mut((j + 1) * p);
        let col = &mut head[j * p + j..];
        let amax = col.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        if amax == 0.0 || !amax.is_finite() {
            // nothing to annihilate; non-finite columns propagate through R
            continue;
        }
        let wt = &mut w[..col.len()];
        let mut sumsq = 0.0;
        for (wi, &x) in wt.iter_mut().zip(col.iter()) {
            let s = x / amax;
            *wi = s;
            sumsq += s * s;
        }
        let nw = sumsq.sqrt();
        let alpha_s = if wt[0] >= 0.0 { -nw } else { nw };
        let tau = 1.0 / (nw * (nw + wt[0].abs()));
        wt[0] -= alpha_s;
        col[0] = alpha_s * amax;
        for k in 0..(q - j - 1) {
            let ck = &mut tail_cols[k * p + j..k * p + p];
            let d = tau * dot_unrolled(wt, ck);
            for (ci, &wi) in ck.iter_mut().zip(wt.iter()) {
                *ci -= d * wi;
            }
        }
    }
}

/// Dot product with four accumulators so the reduction vectorizes.
fn dot_unrolled(a: &[f64], b: &[f64]) -> f64 {
    let n4 = a.len() - a.len() % 4;
    let mut acc = [0.0f64; 4];
    for (ca, cb) in a[..n4].chunks_exact(4).zip(b[..n4].chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in a[n4..].iter().zip(&b[n4..]) {
        s += x * y;
    }
    s
}

/// Singular values of a complex matrix, descending.
pub fn singular_values_c(m: &CMat) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| TpdsError::Numerical(format!("complex SVD failed: {e:?}")))
}

/// Full complex SVD: (U, σ descending, V) with `m = U diag(σ) Vᴴ`.
pub fn svd_c(m: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    let svd = m
        .svd()
        .map_err(|e| TpdsError::Numerical(format!("complex SVD failed: {e:?}")))?;
    let k = m.nrows().min(m.ncols());
    let s: Vec<f64> = (0..k).map(|i| svd.S().column_vector()[i].re).collect();
    Ok((svd.U().to_owned(), s, svd.V().to_owned()))
}

/// Full real SVD: (U, σ descending, V) with `m = U diag(σ) Vᵀ`.
pub fn svd_r(m: &RMat) -> Result<(RMat, Vec<f64>, RMat)> {
    let svd = m
        .svd()
        .map_err(|e| TpdsError::Numerical(format!("real SVD failed: {e:?}")))?;
    let k = m.nrows().min(m.ncols());
    let s: Vec<f64> = (0..k).map(|i| svd.S().column_vector()[i]).collect();
    Ok((svd.U().to_owned(), s, svd.V().to_owned()))
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues_r(m: &RMat) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| TpdsError::Numerical(format!("real eigendecomposition failed: {e:?}")))
}

/// Eigenvalues of a complex square matrix.
pub fn eigenvalues_c(m: &CMat) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| TpdsError::Numerical(format!("complex eigendecomposition failed: {e:?}")))
}

/// Complex eigendecomposition with eigenvectors: returns (eigenvalues, V)
/// where `m V = V diag(λ)`, columns matching eigenvalue order.
pub fn eig_c(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let eig = m
        .eigen()
        .map_err(|e| TpdsError::Numerical(format!("complex eigendecomposition failed: {e:?}")))?;
    let n = m.nrows();
    let vals: Vec<C64> = (0..n).map(|i| eig.S().column_vector()[i]).collect();
    Ok((vals, eig.U().to_owned()))
}

/// Eigendecomposition of a real square matrix with complex eigenvectors.
/// Conjugate eigenvalue pairs come out exactly paired, which keeps
/// downstream conjugate-symmetric assemblies real to rounding error.
pub fn eig_r_pairs(m: &RMat) -> Result<(Vec<C64>, CMat)> {
    let eig = faer::linalg::solvers::Eigen::new_from_real(m.as_ref())
        .map_err(|e| TpdsError::Numerical(format!("real eigendecomposition failed: {e:?}")))?;
    let n = m.nrows();
    let vals: Vec<C64> = (0..n).map(|i| eig.S().column_vector()[i]).collect();
    Ok((vals, eig.U().to_owned()))
}

/// Solve X·A = B for X, i.e. X = B·A⁻¹, via LU on Aᵀ.
pub fn solve_right(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() || b.ncols() != a.nrows() {
        return Err(TpdsError::ShapeMismatch(format!(
            "solve_right: A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    use faer::prelude::Solve;
    let at = a.transpose().to_owned();
    let lu = at.partial_piv_lu();
    let xt = lu.solve(b.transpose().to_owned());
    Ok(xt.transpose().to_owned())
}

/// Count of singular values above `thresh` (absolute threshold).
pub fn rank_from_svals(svals: &[f64], thresh: f64) -> usize {
    svals.iter().filter(|&&s| s > thresh).count()
}

/// Moore-Penrose pseudoinverse of a complex matrix.
///
/// Singular values at or below `thresh` (absolute) are treated as zero.
/// Returns the pseudoinverse and the numerical rank.
pub fn pinv_c(m: &CMat, thresh: f64) -> Result<(CMat, usize)> {
    let (u, s, v) = svd_c(m)?;
    let rank = rank_from_svals(&s, thresh);
    // pinv = V Σ⁺ Uᴴ restricted to the retained spectrum
    let mut vs = CMat::zeros(m.ncols(), rank);
    for j in 0..rank {
        let inv = C64::new(1.0 / s[j], 0.0);
        for i in 0..m.ncols() {
            vs[(i, j)] = v[(i, j)] * inv;
        }
    }
    let mut pinv = CMat::zeros(m.ncols(), m.nrows());
    faer::linalg::matmul::matmul(
        pinv.as_mut(),
        faer::Accum::Replace,
        vs.as_ref(),
        u.subcols(0, rank).adjoint(),
        C64::new(1.0, 0.0),
        faer::get_global_parallelism(),
    );
    Ok((pinv, rank))
}

/// Moore-Penrose pseudoinverse of a real matrix; see [`pinv_c`].
pub fn pinv_r(m: &RMat, thresh: f64) -> Result<(RMat, usize)> {
    let (u, s, v) = svd_r(m)?;
    let rank = rank_from_svals(&s, thresh);
    let mut vs = RMat::zeros(m.ncols(), rank);
    for j in 0..rank {
        let inv = 1.0 / s[j];
        for i in 0..m.ncols() {
            vs[(i, j)] = v[(i, j)] * inv;
        }
    }
    let mut pinv = RMat::zeros(m.ncols(), m.nrows());
    faer::linalg::matmul::matmul(
        pinv.as_mut(),
        faer::Accum::Replace,
        vs.as_ref(),
        u.subcols(0, rank).transpose(),
        1.0f64,
        faer::get_global_parallelism(),
    );
    Ok((pinv, rank))
}

/// Sort eigenvalues by (|λ| descending, argument ascending, real part
/// descending) and return the permutation applied.
pub fn eig_sort_order(vals: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (vals[a], vals[b]);
        y.norm()
            .total_cmp(&x.norm())
            .then(x.arg().total_cmp(&y.arg()))
            .then(y.re.total_cmp(&x.re))
    });
    idx
}

/// Permute columns of `m` by `order` (column j of output = column order[j] of input).
pub fn permute_cols(m: &CMat, order: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, order[j])])
}

/// Complex Gaussian matrix with independent N(0,1)+iN(0,1) entries scaled by
/// 1/√2, filled column-major from a ChaCha8 stream seeded with `seed`.
pub fn gaussian_cmat(rows: usize, cols: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = rand_distr::StandardNormal;
    let mut m = CMat::zeros(rows, cols);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = rng.sample(dist);
            let im: f64 = rng.sample(dist);
            m[(i, j)] = C64::new(re * scale, im * scale);
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Givens rotations
// ---------------------------------------------------------------------------

/// Rotation G = [[c, s], [-s̄, c]] with real c ≥ 0 and c²+|s|² = 1 such that
/// G·[a, b]ᵀ = [r, 0]ᵀ.
#[inline]
fn rot_zero_second(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let denom = na.hypot(nb);
    let c = na / denom;
    let s = (a / na) * b.conj() / denom;
    (c, s)
}

/// Apply G to rows (i1, i2) of `m`, columns `from..`.
#[inline]
fn lapply(m: &mut CMat, i1: usize, i2: usize, c: f64, s: C64, from: usize) {
    for j in from..m.ncols() {
        let x = m[(i1, j)];
        let y = m[(i2, j)];
        m[(i1, j)] = c * x + s * y;
        m[(i2, j)] = -s.conj() * x + c * y;
    }
}

/// Apply a column rotation: col j1 ← c·col j1 + s·col j2, col j2 ← -s̄·col j1 + c·col j2.
#[inline]
fn rapply(m: &mut CMat, j1: usize, j2: usize, c: f64, s: C64, upto: usize) {
    for i in 0..upto {
        let x = m[(i, j1)];
        let y = m[(i, j2)];
        m[(i, j1)] = c * x + s * y;
        m[(i, j2)] = -s.conj() * x + c * y;
    }
}

// ---------------------------------------------------------------------------
// Hessenberg-triangular pencil reduction
// ---------------------------------------------------------------------------

/// A square pencil pair (H, T) unitarily equivalent to an input pair (A, B):
/// H = Qᴴ A Z upper Hessenberg, T = Qᴴ B Z upper triangular. The generalized
/// eigenvalues (hence the roots of det(A - λB)) are preserved; det(H - λT)
/// equals det(A - λB) up to a fixed unit-modulus constant, so root finding
/// and identically-zero detection are unaffected.
pub struct PencilHt {
    pub h: CMat,
    pub t: CMat,
}

/// Reduce the square pair (a, b) to Hessenberg-triangular form in O(m³),
/// enabling O(m²) determinant evaluation per λ.
pub fn hess_tri_reduce(a: &CMat, b: &CMat) -> PencilHt {
    let m = a.nrows();
    debug_assert!(a.ncols() == m && b.nrows() == m && b.ncols() == m);
    let mut h = a.clone();
    let mut t = b.clone();

    // Stage 1: triangularize T by left rotations on adjacent rows.
    for j in 0..m {
        for i in (j + 1..m).rev() {
            if t[(i, j)] != C64::new(0.0, 0.0) {
                let (c, s) = rot_zero_second(t[(i - 1, j)], t[(i, j)]);
                lapply(&mut t, i - 1, i, c, s, j);
                t[(i, j)] = C64::new(0.0, 0.0);
                lapply(&mut h, i - 1, i, c, s, 0);
            }
        }
    }

    // Stage 2: reduce H to Hessenberg, restoring T's triangularity after
    // each left rotation with a right rotation.
    if m > 2 {
        for j in 0..m - 2 {
            for i in (j + 2..m).rev() {
                if h[(i, j)] != C64::new(0.0, 0.0) {
                    let (c, s) = rot_zero_second(h[(i - 1, j)], h[(i, j)]);
                    lapply(&mut h, i - 1, i, c, s, j);
                    h[(i, j)] = C64::new(0.0, 0.0);
                    lapply(&mut t, i - 1, i, c, s, i - 1);
                    // the left rotation fills t[i][i-1]; clear it from the right
                    let p = t[(i, i - 1)];
                    let q = t[(i, i)];
                    if p != C64::new(0.0, 0.0) {
                        let (nq, np) = (q.norm(), p.norm());
                        let denom = np.hypot(nq);
                        let (rc, rs) = if nq == 0.0 {
                            (0.0, -p / np)
                        } else {
                            (nq / denom, -p * (q.conj() / (nq * denom)))
                        };
                        rapply(&mut t, i - 1, i, rc, rs, i + 1);
                        t[(i, i - 1)] = C64::new(0.0, 0.0);
                        // columns right of j in H are not yet reduced: rotate all rows
                        rapply(&mut h, i - 1, i, rc, rs, m);
                    }
                }
            }
        }
    }

    PencilHt { h, t }
}

// ---------------------------------------------------------------------------
// Hessenberg factorization at a fixed λ: determinant and solves in O(m²)
// ---------------------------------------------------------------------------

/// Givens-based factorization of the upper Hessenberg matrix M = H - λT:
/// G_{m-1}···G₁ M = R upper triangular, each Gᵢ of determinant one, so
/// det(M) = Π R[k][k]. Exposes the determinant in log-magnitude form (degrees
/// up to nr overflow f64 otherwise), the smallest |R[k][k]| for singularity
/// detection, and O(m²) solves with M and Mᴴ for inverse iteration.
pub struct HessLu {
    r: CMat,
    rots: Vec<(f64, C64)>,
    /// max row 2-norm of M before factorization; the scale for singularity tests
    pub row_scale: f64,
    /// min |R[k][k]|; an upper bound on σ_min(M)
    pub min_diag: f64,
    /// Σ log|R[k][k]| (−∞ when some diagonal is exactly zero)
    pub log_abs_det: f64,
    /// Π R[k][k]/|R[k][k]| over nonzero diagonals
    pub det_phase: C64,
}

/// Factor M = h - λ·t, both operands upper Hessenberg/triangular.
pub fn hess_lu(h: &CMat, t: &CMat, lambda: C64) -> HessLu {
    let m = h.nrows();
    let mut r = CMat::from_fn(m, m, |i, j| h[(i, j)] - lambda * t[(i, j)]);

    let mut row_scale = 0.0f64;
    for i in 0..m {
        let mut nrm = 0.0f64;
        for j in i.saturating_sub(1)..m {
            nrm += r[(i, j)].norm_sqr();
        }
        row_scale = row_scale.max(nrm.sqrt());
    }

    let mut rots = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m.saturating_sub(1) {
        let (c, s) = rot_zero_second(r[(k, k)], r[(k + 1, k)]);
        lapply(&mut r, k, k + 1, c, s, k);
        r[(k + 1, k)] = C64::new(0.0, 0.0);
        rots.push((c, s));
    }

    let mut log_abs_det = 0.0f64;
    let mut det_phase = C64::new(1.0, 0.0);
    let mut min_diag = f64::INFINITY;
    for k in 0..m {
        let d = r[(k, k)];
        let nd = d.norm();
        min_diag = min_diag.min(nd);
        if nd == 0.0 {
            log_abs_det = f64::NEG_INFINITY;
        } else {
            log_abs_det += nd.ln();
            det_phase *= d / nd;
        }
    }

    HessLu {
        r,
        rots,
        row_scale,
        min_diag,
        log_abs_det,
        det_phase,
    }
}

impl HessLu {
    fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// Diagonal floor applied during solves so exactly singular factors
    /// saturate instead of producing NaN; keeps inverse iteration meaningful.
    fn diag_floor(&self) -> f64 {
        (self.row_scale * 1e-300).max(f64::MIN_POSITIVE)
    }

    /// Solve M x = b in place.
    pub fn solve_in_place(&self, x: &mut [C64]) {
        let m = self.dim();
        debug_assert_eq!(x.len(), m);
        for (k, &(c, s)) in self.rots.iter().enumerate() {
            let a = x[k];
            let b = x[k + 1];
            x[k] = c * a + s * b;
            x[k + 1] = -s.conj() * a + c * b;
        }
        let floor = self.diag_floor();
        for k in (0..m).rev() {
            let mut acc = x[k];
            for j in k + 1..m {
                acc -= self.r[(k, j)] * x[j];
            }
            let d = self.r[(k, k)];
            let d = if d.norm() < floor {
                C64::new(floor, 0.0)
            } else {
                d
            };
            x[k] = acc / d;
        }
    }

    /// Solve Mᴴ y = b in place.
    pub fn solve_adjoint_in_place(&self, x: &mut [C64]) {
        let m = self.dim();
        debug_assert_eq!(x.len(), m);
        // Mᴴ = Rᴴ G_{m-1}···G₁; forward-substitute Rᴴ, then apply Gᵢᴴ in reverse.
        let floor = self.diag_floor();
        for k in 0..m {
            let mut acc = x[k];
            for j in 0..k {
                acc -= self.r[(j, k)].conj() * x[j];
            }
            let d = self.r[(k, k)].conj();
            let d = if d.norm() < floor {
                C64::new(floor, 0.0)
            } else {
                d
            };
            x[k] = acc / d;
        }
        for (k, &(c, s)) in self.rots.iter().enumerate().rev() {
            let a = x[k];
            let b = x[k + 1];
            x[k] = c * a - s * b;
            x[k + 1] = s.conj() * a + c * b;
        }
    }

    /// Estimate σ_min(M) by power iteration on M⁻¹M⁻ᴴ; also returns the
    /// approximate right and left singular vectors of the smallest singular
    /// value. The estimate converges to σ_min from above, so thresholds that
    /// accept only when the estimate is comfortably large remain sound.
    pub fn smin_estimate(&self, iters: usize, seed: u64) -> (f64, Vec<C64>, Vec<C64>) {
        let m = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = rand_distr::StandardNormal;
        let mut v: Vec<C64> = (0..m)
            .map(|_| {
                let re: f64 = rng.sample(dist);
                let im: f64 = rng.sample(dist);
                C64::new(re, im)
            })
            .collect();
        normalize(&mut v);
        let mut growth = 0.0f64;
        let mut u = v.clone();
        for _ in 0..iters.max(1) {
            // w = M⁻ᴴ v, z = M⁻¹ w; growth = ‖z‖ → 1/σ_min²
            let mut w = v.clone();
            self.solve_adjoint_in_place(&mut w);
            u = w.clone();
            normalize(&mut u);
            let mut z = w;
            self.solve_in_place(&mut z);
            growth = normalize(&mut z);
            v = z;
        }
        // breakdown (overflowing or collapsing iterates) happens only near
        // exact singularity; report 0 so that callers treat it as singular
        let smin = if growth.is_finite() && growth > 0.0 {
            growth.sqrt().recip()
        } else {
            0.0
        };
        (smin, v, u)
    }
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

// ---------------------------------------------------------------------------
// Polynomial roots via companion matrix
// ---------------------------------------------------------------------------

/// Roots of Σ coeffs[k]·μ^k. Leading coefficients at or below
/// `len·ε·max|coeff|` are trimmed before forming the companion matrix.
/// Returns an empty list for (numerically) constant polynomials.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if maxc == 0.0 {
        return Ok(Vec::new());
    }
    let trim = coeffs.len() as f64 * f64::EPSILON * maxc;
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= trim {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut comp = CMat::zeros(deg, deg);
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
        if i + 1 < deg {
            comp[(i + 1, i)] = C64::new(1.0, 0.0);
        }
    }
    eigenvalues_c(&comp)
}
