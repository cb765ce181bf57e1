//! Third-order tensor algebra under the t-product, with data-driven
//! system-analysis tests for tensor dynamical systems x(t+1) = 𝒜 ⋆ x(t).
//!
//! The crate offers two interchangeable computation paths for every
//! decision procedure:
//!
//! * the transform path, which diagonalizes the product into r independent
//!   frequency blocks and works block by block;
//! * the unfolding path, which forms the block-circulant matrix explicitly
//!   and runs the matrix-level procedure on it.
//!
//! Both paths answer the same questions and must agree; the benchmark
//! module measures their scaling gap. Block computations run in parallel
//! via rayon when the `parallel` feature (default) is enabled; the
//! sequential fallback is always available through [`ExecMode`].

pub mod bench;
pub mod datagen;
pub mod decomp;
pub mod error;
pub mod fourier;
pub mod informativity;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod tensor3;

pub use error::{Result, TpdsError};
pub use tensor3::Tensor3;

/// How per-block work is scheduled.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Default relative rank threshold: max(dims) · machine epsilon. Singular
/// values at or below rel · σ_max are treated as zero.
pub fn default_tol_rank_rel(nrows: usize, ncols: usize) -> f64 {
    nrows.max(ncols) as f64 * f64::EPSILON
}

/// Map `f` over indices 0..count, parallel when both the feature and the
/// requested mode allow it.
pub(crate) fn map_exec<U, F>(exec: ExecMode, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    let _ = exec;
    (0..count).map(f).collect()
}

/// Pin the number of threads used by the dense kernels (and, with the
/// `parallel` feature, by per-block scheduling). `Some(1)` forces fully
/// sequential execution; `None` keeps library defaults. Returns the
/// effective thread count.
pub fn init_threads(threads: Option<usize>) -> usize {
    match threads {
        Some(1) => {
            faer::set_global_parallelism(faer::Par::Seq);
            1
        }
        Some(k) => {
            faer::set_global_parallelism(faer::Par::rayon(k));
            #[cfg(feature = "parallel")]
            {
                // a second call to build_global is an error we can ignore:
                // the pool size is then whatever the first caller chose
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            k
        }
        None => std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1),
    }
}

/// Derive a stream seed from a base seed and a salt (splitmix64 step).
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
