#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pedreach_core::zonoset::{MatrixZonotope, Zonotope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficient in [-1, 1]; one in five draws lands exactly on a bound so
/// vertices get exercised too.
pub fn coefficient(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.2) {
        if rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    } else {
        rng.gen_range(-1.0..=1.0)
    }
}

pub fn coefficients(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| coefficient(rng))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-scale..scale))
}

pub fn random_zonotope(rng: &mut impl Rng, dim: usize, generators: usize) -> Zonotope {
    let center = DVector::from_fn(dim, |_, _| rng.gen_range(-3.0..3.0));
    Zonotope::new(center, random_matrix(rng, dim, generators, 1.0)).unwrap()
}

pub fn sample_zonotope(rng: &mut impl Rng, z: &Zonotope) -> DVector<f64> {
    z.point_at(&coefficients(rng, z.num_generators()))
}

pub fn sample_matrix_zonotope(rng: &mut impl Rng, m: &MatrixZonotope) -> DMatrix<f64> {
    let beta: Vec<f64> = (0..m.num_generators()).map(|_| coefficient(rng)).collect();
    m.matrix_at(&beta)
}

/// Random 2x2 matrix rescaled so its spectral radius is at most `rho`.
pub fn random_stable_matrix(rng: &mut impl Rng, rho: f64) -> DMatrix<f64> {
    let a = random_matrix(rng, 2, 2, 1.0);
    let radius = a
        .complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    let target = rng.gen_range(0.3..rho);
    if radius > 0.0 {
        a * (target / radius)
    } else {
        a
    }
}

use pedreach_core::reach::StateInputTrajectory;

/// Rolls `x(k+1) = A x + B u + w` forward with uniformly random inputs in
/// `[-input_scale, input_scale]^2` and noise sampled inside `noise`.
pub fn simulate_data(
    rng: &mut impl Rng,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    noise: &Zonotope,
    trajectories: usize,
    steps: usize,
    input_scale: f64,
) -> Vec<StateInputTrajectory> {
    (0..trajectories)
        .map(|_| {
            let mut x = DVector::from_fn(a.nrows(), |_, _| rng.gen_range(-1.0..1.0));
            let mut states = vec![x.clone()];
            let mut inputs = Vec::with_capacity(steps);
            for _ in 0..steps {
                let u = DVector::from_fn(b.ncols(), |_, _| rng.gen_range(-input_scale..input_scale));
                let w = sample_zonotope(rng, noise);
                x = a * &x + b * &u + w;
                states.push(x.clone());
                inputs.push(u);
            }
            StateInputTrajectory::new(states, inputs, 1.0).unwrap()
        })
        .collect()
}

pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut ab = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    ab.columns_mut(0, a.ncols()).copy_from(a);
    ab.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    ab
}

pub fn noise_box(radius: f64) -> Zonotope {
    Zonotope::from_columns(&[0.0, 0.0], &[&[radius, 0.0], &[0.0, radius]]).unwrap()
}
