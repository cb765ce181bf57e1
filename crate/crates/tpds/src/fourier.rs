//! Mode-3 discrete Fourier transform connecting a tensor to its
//! block-diagonal Fourier representation.
//!
//! Block k holds Σ_j ω^{jk}·slice_j with ω = exp(-2πi/r) (unnormalized
//! forward transform per tube); the inverse carries the 1/r factor. Block
//! index equals frequency: block 0 is the DC block. Power-of-two lengths run
//! on a radix-2 FFT; other lengths fall back to a direct O(r²) transform.

use crate::error::{Result, TpdsError};
use crate::matrix::{C64, CMat};
use crate::tensor3::Tensor3;

/// The r complex n×m matrices block-diagonalizing bcirc of a tensor.
#[derive(Clone, Debug)]
pub struct FourierBlocks {
    n: usize,
    m: usize,
    blocks: Vec<CMat>,
}

impl FourierBlocks {
    /// Wrap per-frequency blocks; all must share the shape n×m.
    pub fn new(n: usize, m: usize, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(TpdsError::ShapeMismatch("no blocks".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() != n || b.ncols() != m {
                return Err(TpdsError::ShapeMismatch(format!(
                    "block {k} is {}x{}, expected {n}x{m}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { n, m, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn r(&self) -> usize {
        self.blocks.len()
    }
    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }
    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    /// Frequency-wise product: block k of the result = self_k · rhs_k.
    pub fn mul_blocks(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.n || self.r() != rhs.r() {
            return Err(TpdsError::DimensionMismatch(format!(
                "block product needs {}x{} * {}x{} with equal r",
                self.n,
                self.m,
                rhs.n,
                rhs.m
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Self::new(self.n, rhs.m, blocks)
    }

    /// Apply `f` to every block; result order preserved.
    pub fn map_blocks(&self, mut f: impl FnMut(usize, &CMat) -> CMat) -> Result<Self> {
        let blocks: Vec<CMat> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| f(k, b))
            .collect();
        let (n, m) = (blocks[0].nrows(), blocks[0].ncols());
        Self::new(n, m, blocks)
    }

    /// Apply a fallible `f` to every block; the closure receives the
    /// frequency index so per-block failures carry it.
    pub fn try_map_blocks(&self, mut f: impl FnMut(usize, &CMat) -> Result<CMat>) -> Result<Self> {
        let mut blocks = Vec::with_capacity(self.r());
        for (k, b) in self.blocks.iter().enumerate() {
            blocks.push(f(k, b)?);
        }
        let (n, m) = (blocks[0].nrows(), blocks[0].ncols());
        Self::new(n, m, blocks)
    }

    /// Max deviation from conjugate symmetry block(k) = conj(block(r-k)).
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let r = self.r();
        let mut dev = 0.0f64;
        for k in 1..r {
            let a = &self.blocks[k];
            let b = &self.blocks[r - k];
            for j in 0..self.m {
                for i in 0..self.n {
                    dev = dev.max((a[(i, j)] - b[(i, j)].conj()).norm());
                }
            }
        }
        // self-paired blocks (DC and, for even r, Nyquist) must be real
        dev = dev.max(imag_mass(&self.blocks[0]));
        if r % 2 == 0 && r > 1 {
            dev = dev.max(imag_mass(&self.blocks[r / 2]));
        }
        dev
    }

    /// Largest block-entry modulus across all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .map(crate::matrix::max_abs_c)
            .fold(0.0f64, f64::max)
    }
}

fn imag_mass(m: &CMat) -> f64 {
    let mut v = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, j)].im.abs());
        }
    }
    v
}

/// Forward transform: unnormalized, ω = exp(-2πi/r).
pub(crate) fn fft_inplace(buf: &mut [C64]) {
    transform(buf, -1.0);
}

/// Inverse transform: ω = exp(+2πi/r), scaled by 1/r.
pub(crate) fn ifft_inplace(buf: &mut [C64]) {
    transform(buf, 1.0);
    let scale = 1.0 / buf.len() as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
}

fn transform(buf: &mut [C64], sign: f64) {
    let r = buf.len();
    if r <= 1 {
        return;
    }
    if r.is_power_of_two() {
        radix2(buf, sign);
    } else {
        naive_dft(buf, sign);
    }
}

fn radix2(buf: &mut [C64], sign: f64) {
    let r = buf.len();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..r {
        let mut bit = r >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= r {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = C64::new(ang.cos(), ang.sin());
        for start in (0..r).step_by(len) {
            let mut w = C64::new(1.0, 0.0);
            for off in 0..len / 2 {
                let u = buf[start + off];
                let v = buf[start + off + len / 2] * w;
                buf[start + off] = u + v;
                buf[start + off + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

fn naive_dft(buf: &mut [C64], sign: f64) {
    let r = buf.len();
    // twiddle table ω^t for t in 0..r; exponent reduced mod r stays exact
    let base = sign * 2.0 * std::f64::consts::PI / r as f64;
    let tw: Vec<C64> = (0..r)
        .map(|t| {
            let a = base * t as f64;
            C64::new(a.cos(), a.sin())
        })
        .collect();
    let snapshot: Vec<C64> = buf.to_vec();
    for (k, out) in buf.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &x) in snapshot.iter().enumerate() {
            acc += x * tw[(j * k) % r];
        }
        *out = acc;
    }
}

/// Forward mode-3 DFT of a real tensor: r complex blocks, block k at
/// frequency k.
pub fn dft_mode3(t: &Tensor3) -> FourierBlocks {
    let (n, m, r) = t.dims();
    let mut blocks: Vec<CMat> = (0..r).map(|_| CMat::zeros(n, m)).collect();
    let mut tube = vec![C64::new(0.0, 0.0); r];
    for j in 0..m {
        for i in 0..n {
            for k in 0..r {
                tube[k] = C64::new(t.get(i, j, k), 0.0);
            }
            fft_inplace(&mut tube);
            for k in 0..r {
                blocks[k][(i, j)] = tube[k];
            }
        }
    }
    FourierBlocks { n, m, blocks }
}

/// Inverse mode-3 DFT: returns the real part and the maximum imaginary
/// residual left behind. The residual is at rounding level whenever the
/// blocks are conjugate-symmetric.
pub fn idft_mode3(b: &FourierBlocks) -> (Tensor3, f64) {
    let (n, m, r) = (b.n, b.m, b.r());
    let mut t = Tensor3::zeros(n, m, r);
    let mut tube = vec![C64::new(0.0, 0.0); r];
    let mut max_imag = 0.0f64;
    for j in 0..m {
        for i in 0..n {
            for k in 0..r {
                tube[k] = b.blocks[k][(i, j)];
            }
            ifft_inplace(&mut tube);
            for k in 0..r {
                t.set(i, j, k, tube[k].re);
                max_imag = max_imag.max(tube[k].im.abs());
            }
        }
    }
    (t, max_imag)
}

/// Strict inverse transform: errors when the imaginary residual reaches
/// `tol_imag` (default 1e-8 times the max block modulus).
pub fn idft_mode3_strict(b: &FourierBlocks, tol_imag: Option<f64>) -> Result<Tensor3> {
    let tol = tol_imag.unwrap_or(1e-8 * b.max_abs());
    let (t, max_imag) = idft_mode3(b);
    if max_imag >= tol && max_imag > 0.0 {
        return Err(TpdsError::ImaginaryResidualExceeded { max_imag, tol });
    }
    Ok(t)
}

/// Named alias for the per-block map: applies `f` to every block.
pub fn block_map(b: &FourierBlocks, f: impl FnMut(usize, &CMat) -> Result<CMat>) -> Result<FourierBlocks> {
    b.try_map_blocks(f)
}
