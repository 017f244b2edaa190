//! Data-driven reachability under bounded process noise.
//!
//! Given state/input trajectories of an unknown linear system
//! `x(k+1) = A x(k) + B u(k) + w(k)` with `w(k)` in a noise zonotope `Z_w`,
//! [`compute_model_set`] returns the matrix zonotope
//! `M = (X+ - M_w) [X-; U-]^+` of all `[A B]` consistent with the data, and
//! [`reach_step`] propagates `R_{k+1} = M (R_k x U_k) + Z_w`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::zonoset::{MatrixZonotope, Sign, ZonoError, Zonotope};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Upper bound on generators of any intermediate set before reduction.
pub const MAX_INTERMEDIATE_GENERATORS: usize = 100_000;

/// Default order cap applied after every propagation step.
pub const DEFAULT_MAX_ORDER: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachError {
    #[error(transparent)]
    Zono(#[from] ZonoError),
    #[error("no trajectories given")]
    NoTrajectories,
    #[error("trajectory {index} has {states} states; at least 2 are needed")]
    TrajectoryTooShort { index: usize, states: usize },
    #[error("trajectory has {states} states but {inputs} inputs; expected states = inputs + 1")]
    LengthMismatch { states: usize, inputs: usize },
    #[error("{what}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("trajectory contains non-finite values")]
    NonFinite,
    #[error("sample period must be positive, got {0}")]
    InvalidSamplePeriod(f64),
    #[error("noise matrix zonotope needs at least one column")]
    ZeroColumns,
    #[error("data matrix [X-; U-] has rank {rank}, needs {required}: data are not exciting enough")]
    RankDeficientData { rank: usize, required: usize },
    #[error("intermediate set would have {count} generators (limit {limit}); reduce data size or max order")]
    GeneratorExplosion { count: usize, limit: usize },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
}

/// One recorded trajectory: `T_i + 1` states and the `T_i` inputs between them.
#[derive(Debug, Clone, PartialEq)]
pub struct StateInputTrajectory {
    states: Vec<DVector<f64>>,
    inputs: Vec<DVector<f64>>,
    sample_period: f64,
}

impl StateInputTrajectory {
    pub fn new(
        states: Vec<DVector<f64>>,
        inputs: Vec<DVector<f64>>,
        sample_period: f64,
    ) -> Result<Self, ReachError> {
        if states.len() != inputs.len() + 1 {
            return Err(ReachError::LengthMismatch {
                states: states.len(),
                inputs: inputs.len(),
            });
        }
        if !sample_period.is_finite() || sample_period <= 0.0 {
            return Err(ReachError::InvalidSamplePeriod(sample_period));
        }
        let all_finite = states
            .iter()
            .chain(inputs.iter())
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !all_finite {
            return Err(ReachError::NonFinite);
        }
        check_uniform(&states, "state")?;
        check_uniform(&inputs, "input")?;
        Ok(Self {
            states,
            inputs,
            sample_period,
        })
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// Number of transitions `T_i`.
    pub fn steps(&self) -> usize {
        self.inputs.len()
    }
}

fn check_uniform(vectors: &[DVector<f64>], what: &'static str) -> Result<(), ReachError> {
    if let Some(first) = vectors.first() {
        if let Some(bad) = vectors.iter().find(|v| v.len() != first.len()) {
            return Err(ReachError::DimensionMismatch {
                what,
                expected: first.len(),
                found: bad.len(),
            });
        }
    }
    Ok(())
}

/// Column-stacked shifted data matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrices {
    pub x_plus: DMatrix<f64>,
    pub x_minus: DMatrix<f64>,
    pub u_minus: DMatrix<f64>,
}

impl DataMatrices {
    /// Total number of transitions `T`.
    pub fn columns(&self) -> usize {
        self.x_minus.ncols()
    }

    pub fn state_dim(&self) -> usize {
        self.x_minus.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.u_minus.nrows()
    }

    /// `[X-; U-]`.
    pub fn stacked_regressor(&self) -> DMatrix<f64> {
        let (m, n) = (self.state_dim(), self.input_dim());
        let mut h = DMatrix::zeros(m + n, self.columns());
        h.rows_mut(0, m).copy_from(&self.x_minus);
        h.rows_mut(m, n).copy_from(&self.u_minus);
        h
    }
}

/// Drops the last state of each trajectory for `X-` and the first for `X+`,
/// concatenating trajectories in order.
pub fn build_data_matrices(trajectories: &[StateInputTrajectory]) -> Result<DataMatrices, ReachError> {
    let first = trajectories.first().ok_or(ReachError::NoTrajectories)?;
    if let Some((index, t)) = trajectories.iter().enumerate().find(|(_, t)| t.states.len() < 2) {
        return Err(ReachError::TrajectoryTooShort {
            index,
            states: t.states.len(),
        });
    }
    let m = first.states[0].len();
    let n = first.inputs[0].len();
    for t in trajectories {
        if t.states[0].len() != m {
            return Err(ReachError::DimensionMismatch {
                what: "state",
                expected: m,
                found: t.states[0].len(),
            });
        }
        if t.inputs[0].len() != n {
            return Err(ReachError::DimensionMismatch {
                what: "input",
                expected: n,
                found: t.inputs[0].len(),
            });
        }
    }

    let total: usize = trajectories.iter().map(|t| t.steps()).sum();
    let mut x_minus = DMatrix::zeros(m, total);
    let mut x_plus = DMatrix::zeros(m, total);
    let mut u_minus = DMatrix::zeros(n, total);
    let mut col = 0;
    for t in trajectories {
        for k in 0..t.steps() {
            x_minus.set_column(col, &t.states[k]);
            x_plus.set_column(col, &t.states[k + 1]);
            u_minus.set_column(col, &t.inputs[k]);
            col += 1;
        }
    }
    Ok(DataMatrices {
        x_plus,
        x_minus,
        u_minus,
    })
}

/// Bounded process noise `w in Z_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    zonotope: Zonotope,
}

impl NoiseSpec {
    pub fn new(zonotope: Zonotope) -> Self {
        Self { zonotope }
    }

    pub fn zonotope(&self) -> &Zonotope {
        &self.zonotope
    }

    pub fn dim(&self) -> usize {
        self.zonotope.dim()
    }
}

/// Noise over `T` columns: centre `[c_w ... c_w]` and, for every noise
/// generator `i` and column `j`, a generator holding `g_w^(i)` in column `j`.
pub fn build_noise_matrix_zonotope(spec: &NoiseSpec, columns: usize) -> Result<MatrixZonotope, ReachError> {
    if columns == 0 {
        return Err(ReachError::ZeroColumns);
    }
    let z = spec.zonotope();
    let m = z.dim();
    let mut center = DMatrix::zeros(m, columns);
    for j in 0..columns {
        center.set_column(j, z.center());
    }
    let mut generators = Vec::with_capacity(z.num_generators() * columns);
    for g in z.generators().column_iter() {
        for j in 0..columns {
            let mut gen = DMatrix::zeros(m, columns);
            gen.set_column(j, &g);
            generators.push(gen);
        }
    }
    Ok(MatrixZonotope::new(center, generators)?)
}

/// Matrix zonotope of all `[A B]` consistent with the data and noise bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    matrix_zonotope: MatrixZonotope,
    state_dim: usize,
    input_dim: usize,
}

impl ModelSet {
    pub fn matrix_zonotope(&self) -> &MatrixZonotope {
        &self.matrix_zonotope
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// Moore-Penrose pseudoinverse of a full-row-rank matrix via SVD.
pub fn pseudo_inverse_full_row_rank(h: &DMatrix<f64>) -> Result<DMatrix<f64>, ReachError> {
    let required = h.nrows();
    if h.ncols() < required {
        return Err(ReachError::RankDeficientData {
            rank: h.ncols(),
            required,
        });
    }
    let svd = h.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let cutoff = RANK_TOL * largest;
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    if rank < required || largest == 0.0 {
        return Err(ReachError::RankDeficientData { rank, required });
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let inv_sigma = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
    Ok(v_t.transpose() * inv_sigma * u.transpose())
}

pub fn compute_model_set(data: &DataMatrices, spec: &NoiseSpec) -> Result<ModelSet, ReachError> {
    if spec.dim() != data.state_dim() {
        return Err(ReachError::DimensionMismatch {
            what: "noise",
            expected: data.state_dim(),
            found: spec.dim(),
        });
    }
    let pinv = pseudo_inverse_full_row_rank(&data.stacked_regressor())?;
    let noise = build_noise_matrix_zonotope(spec, data.columns())?;
    let matrix_zonotope = noise
        .shifted(&data.x_plus, Sign::Minus)?
        .linear_map_right(&pinv)?;
    Ok(ModelSet {
        matrix_zonotope,
        state_dim: data.state_dim(),
        input_dim: data.input_dim(),
    })
}

/// `M (R_k x U_k) + Z_w`, without reduction.
pub fn reach_step(
    model: &ModelSet,
    state_set: &Zonotope,
    input_set: &Zonotope,
    spec: &NoiseSpec,
) -> Result<Zonotope, ReachError> {
    if state_set.dim() != model.state_dim {
        return Err(ReachError::DimensionMismatch {
            what: "state set",
            expected: model.state_dim,
            found: state_set.dim(),
        });
    }
    if input_set.dim() != model.input_dim {
        return Err(ReachError::DimensionMismatch {
            what: "input set",
            expected: model.input_dim,
            found: input_set.dim(),
        });
    }
    if spec.dim() != model.state_dim {
        return Err(ReachError::DimensionMismatch {
            what: "noise",
            expected: model.state_dim,
            found: spec.dim(),
        });
    }
    let joint_generators = state_set.num_generators() + input_set.num_generators();
    let count = model.matrix_zonotope.product_generator_count(joint_generators)
        + spec.zonotope().num_generators();
    if count > MAX_INTERMEDIATE_GENERATORS {
        return Err(ReachError::GeneratorExplosion {
            count,
            limit: MAX_INTERMEDIATE_GENERATORS,
        });
    }
    let joint = state_set.cartesian_product(input_set);
    let mapped = model.matrix_zonotope.times_zonotope(&joint)?;
    Ok(mapped.minkowski_sum(spec.zonotope())?)
}

/// Iterates [`reach_step`] over the given per-step input sets, reducing to
/// `max_order` after each step. Element `k` over-approximates `R_{k+1}`.
pub fn reach_horizon(
    model: &ModelSet,
    initial: &Zonotope,
    inputs: &[Zonotope],
    spec: &NoiseSpec,
    max_order: f64,
) -> Result<Vec<Zonotope>, ReachError> {
    if inputs.is_empty() {
        return Err(ReachError::EmptyHorizon);
    }
    let mut sets = Vec::with_capacity(inputs.len());
    let mut current = initial.clone();
    for input_set in inputs {
        current = reach_step(model, &current, input_set, spec)?.reduce_order(max_order)?;
        sets.push(current.clone());
    }
    Ok(sets)
}
