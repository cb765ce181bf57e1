//! Tensor dynamical system simulation and seeded random data generation.
//!
//! Reproducibility contract: all randomness flows through ChaCha8 seeded
//! with a caller-provided 64-bit value; tensors are filled in storage order
//! (slice-major, column-major within a slice), so identical (seed, dims,
//! dist) yield identical tensors on every platform.

use crate::decomp;
use crate::error::{Result, TpdsError};
use crate::tensor3::{t_product, Tensor3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sampling distribution for random tensors.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Dist {
    /// Standard normal N(0, 1).
    StandardNormal,
    /// Uniform on (-1, 1).
    Uniform,
}

/// A simulated state sequence 𝒳(0..=l), with inputs when driven.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<Tensor3>,
    pub inputs: Option<Vec<Tensor3>>,
}

/// The data tensors consumed by the informativity tests: states 0..l-1
/// concatenated along mode 2 (x0), states 1..l (x1), inputs 0..l-1 (u0).
#[derive(Clone, Debug)]
pub struct DataTensors {
    pub x0: Tensor3,
    pub x1: Tensor3,
    pub u0: Option<Tensor3>,
}

/// Iterate x(t+1) = a ⋆ x(t) for `steps` steps.
pub fn simulate(a: &Tensor3, x_init: &Tensor3, steps: usize) -> Result<Trajectory> {
    if a.n() != a.m() {
        return Err(TpdsError::DimensionMismatch(format!(
            "transition tensor must have square slices, got {:?}",
            a.dims()
        )));
    }
    if a.m() != x_init.n() || a.r() != x_init.r() {
        return Err(TpdsError::DimensionMismatch(format!(
            "state {:?} does not conform with transition {:?}",
            x_init.dims(),
            a.dims()
        )));
    }
    if steps == 0 {
        return Err(TpdsError::InsufficientData("steps must be >= 1".into()));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x_init.clone());
    for t in 0..steps {
        let next = t_product(a, &states[t])?;
        states.push(next);
    }
    Ok(Trajectory {
        states,
        inputs: None,
    })
}

/// Iterate x(t+1) = a ⋆ x(t) + b ⋆ u(t) over the provided inputs.
pub fn simulate_controlled(
    a: &Tensor3,
    b: &Tensor3,
    x_init: &Tensor3,
    inputs: &[Tensor3],
) -> Result<Trajectory> {
    if a.n() != a.m() || a.n() != b.n() || a.r() != b.r() {
        return Err(TpdsError::DimensionMismatch(format!(
            "transition {:?} and control {:?} do not conform",
            a.dims(),
            b.dims()
        )));
    }
    if a.m() != x_init.n() || a.r() != x_init.r() {
        return Err(TpdsError::DimensionMismatch(format!(
            "state {:?} does not conform with transition {:?}",
            x_init.dims(),
            a.dims()
        )));
    }
    if inputs.is_empty() {
        return Err(TpdsError::InsufficientData("need at least one input".into()));
    }
    let mut states = Vec::with_capacity(inputs.len() + 1);
    states.push(x_init.clone());
    for (t, u) in inputs.iter().enumerate() {
        if u.n() != b.m() || u.m() != x_init.m() || u.r() != b.r() {
            return Err(TpdsError::DimensionMismatch(format!(
                "input {t} has shape {:?}, expected {}x{}x{}",
                u.dims(),
                b.m(),
                x_init.m(),
                b.r()
            )));
        }
        let drift = t_product(a, &states[t])?;
        let forced = t_product(b, u)?;
        states.push(drift.add(&forced)?);
    }
    Ok(Trajectory {
        states,
        inputs: Some(inputs.to_vec()),
    })
}

/// Concatenate a trajectory into the shifted data tensors.
pub fn assemble(traj: &Trajectory) -> Result<DataTensors> {
    let l = traj.states.len().saturating_sub(1);
    if l == 0 {
        return Err(TpdsError::InsufficientData(
            "assemble needs at least two states".into(),
        ));
    }
    let mut x0 = traj.states[0].clone();
    for s in &traj.states[1..l] {
        x0 = x0.concat_mode2(s)?;
    }
    let mut x1 = traj.states[1].clone();
    for s in &traj.states[2..=l] {
        x1 = x1.concat_mode2(s)?;
    }
    let u0 = match &traj.inputs {
        None => None,
        Some(inputs) => {
            let mut u = inputs[0].clone();
            for s in &inputs[1..] {
                u = u.concat_mode2(s)?;
            }
            Some(u)
        }
    };
    Ok(DataTensors { x0, x1, u0 })
}

/// Seeded random tensor; see the module reproducibility contract.
pub fn random_tensor(n: usize, m: usize, r: usize, seed: u64, dist: Dist) -> Tensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::StandardNormal;
    let len = n * m * r;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let v: f64 = match dist {
            Dist::StandardNormal => rng.sample(normal),
            Dist::Uniform => rng.random_range(-1.0..1.0),
        };
        data.push(v);
    }
    Tensor3::new(n, m, r, data).expect("dimensions validated by construction")
}

/// Random transition tensor with square slices; when `target_radius` is
/// given the tensor is rescaled so its spectral radius lands exactly there.
pub fn random_system(n: usize, r: usize, seed: u64, target_radius: Option<f64>) -> Result<Tensor3> {
    let a = random_tensor(n, n, r, seed, Dist::StandardNormal);
    match target_radius {
        None => Ok(a),
        Some(target) => {
            let rho = decomp::spectral_radius(&a)?;
            if rho <= 0.0 {
                return Err(TpdsError::Numerical(
                    "cannot rescale a tensor with zero spectral radius".into(),
                ));
            }
            Ok(a.scale(target / rho))
        }
    }
}
