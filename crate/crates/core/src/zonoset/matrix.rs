use nalgebra::{DMatrix, DVector};

use super::feasibility::solve_box_feasibility;
use super::{ZonoError, Zonotope};

/// Sign applied to a matrix zonotope in [`MatrixZonotope::shifted`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A zonotope over matrices: `{ C + sum_i beta_i G_i : |beta_i| <= 1 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixZonotope {
    center: DMatrix<f64>,
    generators: Vec<DMatrix<f64>>,
}

impl MatrixZonotope {
    pub fn new(center: DMatrix<f64>, generators: Vec<DMatrix<f64>>) -> Result<Self, ZonoError> {
        let shape = center.shape();
        if let Some(bad) = generators.iter().find(|g| g.shape() != shape) {
            return Err(ZonoError::ShapeMismatch {
                op: "matrix zonotope",
                expected: shape,
                found: bad.shape(),
            });
        }
        let finite = center.iter().all(|v| v.is_finite())
            && generators.iter().all(|g| g.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(ZonoError::NonFinite);
        }
        Ok(Self { center, generators })
    }

    pub fn singleton(center: DMatrix<f64>) -> Result<Self, ZonoError> {
        Self::new(center, Vec::new())
    }

    pub fn center(&self) -> &DMatrix<f64> {
        &self.center
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn shape(&self) -> (usize, usize) {
        self.center.shape()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// The matrix `C + sum_i beta_i G_i`.
    pub fn matrix_at(&self, beta: &[f64]) -> DMatrix<f64> {
        assert_eq!(beta.len(), self.generators.len());
        let mut out = self.center.clone();
        for (b, g) in beta.iter().zip(&self.generators) {
            out += g * *b;
        }
        out
    }

    /// Every member multiplied on the right by `p`.
    pub fn linear_map_right(&self, p: &DMatrix<f64>) -> Result<MatrixZonotope, ZonoError> {
        if p.nrows() != self.center.ncols() {
            return Err(ZonoError::DimensionMismatch {
                op: "mz_linear_map_right",
                expected: self.center.ncols(),
                found: p.nrows(),
            });
        }
        MatrixZonotope::new(
            &self.center * p,
            self.generators.iter().map(|g| g * p).collect(),
        )
    }

    /// `offset + sign * self`.
    pub fn shifted(&self, offset: &DMatrix<f64>, sign: Sign) -> Result<MatrixZonotope, ZonoError> {
        if offset.shape() != self.shape() {
            return Err(ZonoError::ShapeMismatch {
                op: "mz_shift",
                expected: self.shape(),
                found: offset.shape(),
            });
        }
        let s = sign.factor();
        MatrixZonotope::new(
            offset + &self.center * s,
            self.generators.iter().map(|g| g * s).collect(),
        )
    }

    /// Over-approximation of `{ X z : X in self, z in zono }`.
    ///
    /// `<C c, [C G, G_1 c, G_1 G, ..., G_k c, G_k G]>`; the products
    /// `beta_i * beta_z` are relaxed to independent factors in `[-1, 1]`.
    pub fn times_zonotope(&self, zono: &Zonotope) -> Result<Zonotope, ZonoError> {
        let (rows, cols) = self.shape();
        if cols != zono.dim() {
            return Err(ZonoError::DimensionMismatch {
                op: "mz_times_zonotope",
                expected: cols,
                found: zono.dim(),
            });
        }
        let gz = zono.num_generators();
        let total = gz + self.generators.len() * (1 + gz);
        let mut generators = DMatrix::zeros(rows, total);
        generators
            .columns_mut(0, gz)
            .copy_from(&(&self.center * zono.generators()));
        let mut offset = gz;
        for g in &self.generators {
            generators.set_column(offset, &(g * zono.center()));
            generators
                .columns_mut(offset + 1, gz)
                .copy_from(&(g * zono.generators()));
            offset += 1 + gz;
        }
        Zonotope::new(&self.center * zono.center(), generators)
    }

    /// Number of generators [`times_zonotope`](Self::times_zonotope) would
    /// produce for a zonotope with `zono_generators` generators.
    pub fn product_generator_count(&self, zono_generators: usize) -> usize {
        zono_generators + self.generators.len() * (1 + zono_generators)
    }

    /// Membership of a concrete matrix, via the vectorized feasibility problem.
    pub fn contains_matrix(&self, x: &DMatrix<f64>) -> Result<bool, ZonoError> {
        Ok(self.find_coefficients(x)?.is_some())
    }

    pub fn find_coefficients(&self, x: &DMatrix<f64>) -> Result<Option<DVector<f64>>, ZonoError> {
        if x.shape() != self.shape() {
            return Err(ZonoError::ShapeMismatch {
                op: "mz_contains_matrix",
                expected: self.shape(),
                found: x.shape(),
            });
        }
        let n = self.center.len();
        let mut a = DMatrix::zeros(n, self.generators.len());
        for (j, g) in self.generators.iter().enumerate() {
            a.column_mut(j).copy_from_slice(g.as_slice());
        }
        let diff = x - &self.center;
        solve_box_feasibility(&a, &DVector::from_column_slice(diff.as_slice()))
    }
}
