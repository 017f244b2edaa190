use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::feasibility::solve_box_feasibility;
use super::interval::IntervalBox;
use super::polygon::Polygon2D;
use super::ZonoError;

/// A zonotope `<c, G> = { c + G beta : |beta|_inf <= 1 }`.
///
/// Each column of `generators` is one generator. A zonotope without
/// generators is the singleton `{c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: DVector<f64>,
    generators: DMatrix<f64>,
}

impl Zonotope {
    pub fn new(center: DVector<f64>, generators: DMatrix<f64>) -> Result<Self, ZonoError> {
        if generators.nrows() != center.len() {
            return Err(ZonoError::DimensionMismatch {
                op: "zonotope",
                expected: center.len(),
                found: generators.nrows(),
            });
        }
        if !center.iter().chain(generators.iter()).all(|v| v.is_finite()) {
            return Err(ZonoError::NonFinite);
        }
        Ok(Self { center, generators })
    }

    pub fn singleton(center: DVector<f64>) -> Result<Self, ZonoError> {
        let dim = center.len();
        Self::new(center, DMatrix::zeros(dim, 0))
    }

    /// Builds `<c, [g_1 ... g_k]>` from plain slices; handy for fixtures.
    pub fn from_columns(center: &[f64], generators: &[&[f64]]) -> Result<Self, ZonoError> {
        let dim = center.len();
        let mut g = DMatrix::zeros(dim, generators.len());
        for (j, col) in generators.iter().enumerate() {
            if col.len() != dim {
                return Err(ZonoError::DimensionMismatch {
                    op: "zonotope",
                    expected: dim,
                    found: col.len(),
                });
            }
            g.column_mut(j).copy_from_slice(col);
        }
        Self::new(DVector::from_column_slice(center), g)
    }

    /// Axis-aligned box `<c, diag(radius)>`.
    pub fn from_center_radius(center: DVector<f64>, radius: &DVector<f64>) -> Result<Self, ZonoError> {
        if radius.len() != center.len() {
            return Err(ZonoError::DimensionMismatch {
                op: "zonotope box",
                expected: center.len(),
                found: radius.len(),
            });
        }
        Self::new(center, DMatrix::from_diagonal(radius))
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.ncols()
    }

    /// Generator count over dimension.
    pub fn order(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.num_generators() as f64 / self.dim() as f64
    }

    pub fn is_singleton(&self) -> bool {
        self.generators.iter().all(|v| *v == 0.0)
    }

    /// The point `c + G beta`.
    pub fn point_at(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.center + &self.generators * beta
    }

    /// `<L c, L G>`.
    pub fn linear_map(&self, map: &DMatrix<f64>) -> Result<Zonotope, ZonoError> {
        if map.ncols() != self.dim() {
            return Err(ZonoError::DimensionMismatch {
                op: "linear_map",
                expected: self.dim(),
                found: map.ncols(),
            });
        }
        Zonotope::new(map * &self.center, map * &self.generators)
    }

    /// `<c1 + c2, [G1 G2]>`.
    pub fn minkowski_sum(&self, other: &Zonotope) -> Result<Zonotope, ZonoError> {
        if other.dim() != self.dim() {
            return Err(ZonoError::DimensionMismatch {
                op: "minkowski_sum",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let (g1, g2) = (self.num_generators(), other.num_generators());
        let mut generators = DMatrix::zeros(self.dim(), g1 + g2);
        generators.columns_mut(0, g1).copy_from(&self.generators);
        generators.columns_mut(g1, g2).copy_from(&other.generators);
        Zonotope::new(&self.center + &other.center, generators)
    }

    /// Stacked centers with block-diagonal generators.
    pub fn cartesian_product(&self, other: &Zonotope) -> Zonotope {
        let (m1, m2) = (self.dim(), other.dim());
        let (g1, g2) = (self.num_generators(), other.num_generators());
        let mut center = DVector::zeros(m1 + m2);
        center.rows_mut(0, m1).copy_from(&self.center);
        center.rows_mut(m1, m2).copy_from(&other.center);
        let mut generators = DMatrix::zeros(m1 + m2, g1 + g2);
        generators.view_mut((0, 0), (m1, g1)).copy_from(&self.generators);
        generators.view_mut((m1, g1), (m2, g2)).copy_from(&other.generators);
        Zonotope { center, generators }
    }

    /// Coefficients `beta` with `|beta|_inf <= 1` reaching `point`, if any.
    pub fn find_coefficients(&self, point: &DVector<f64>) -> Result<Option<DVector<f64>>, ZonoError> {
        if point.len() != self.dim() {
            return Err(ZonoError::DimensionMismatch {
                op: "contains_point",
                expected: self.dim(),
                found: point.len(),
            });
        }
        solve_box_feasibility(&self.generators, &(point - &self.center))
    }

    pub fn contains_point(&self, point: &DVector<f64>) -> Result<bool, ZonoError> {
        Ok(self.find_coefficients(point)?.is_some())
    }

    /// Per coordinate: `c_i +- sum_j |G_ij|`.
    pub fn interval_hull(&self) -> IntervalBox {
        let radius = row_abs_sums(&self.generators, 0..self.num_generators());
        IntervalBox::from_center_radius(&self.center, &radius)
    }

    /// Drops generators that are exactly zero.
    pub fn without_zero_generators(&self) -> Zonotope {
        let keep: Vec<usize> = (0..self.num_generators())
            .filter(|&j| self.generators.column(j).iter().any(|v| *v != 0.0))
            .collect();
        Zonotope {
            center: self.center.clone(),
            generators: self.generators.select_columns(&keep),
        }
    }

    /// Exact vertex enumeration of a planar zonotope.
    pub fn to_polygon(&self) -> Result<Polygon2D, ZonoError> {
        if self.dim() != 2 {
            return Err(ZonoError::NotPlanar(self.dim()));
        }
        Ok(Polygon2D::from_zonotope_parts(
            [self.center[0], self.center[1]],
            self.generators
                .column_iter()
                .map(|g| [g[0], g[1]])
                .collect(),
        ))
    }

    /// Girard-style order reduction.
    ///
    /// Keeps the generators whose boxing would inflate the set the most
    /// (largest `|g|_1 - |g|_inf`) and replaces the rest with their interval
    /// hull. The result has order at most `max_order` and contains `self`.
    pub fn reduce_order(&self, max_order: f64) -> Result<Zonotope, ZonoError> {
        if !max_order.is_finite() || max_order < 1.0 {
            return Err(ZonoError::InvalidOrder(max_order));
        }
        let dim = self.dim();
        let count = self.num_generators();
        if dim == 0 || count as f64 <= max_order * dim as f64 {
            return Ok(self.clone());
        }
        let budget = (max_order * dim as f64).floor() as usize;
        let keep_count = budget - dim;

        let mut ranked: Vec<(usize, f64, f64)> = self
            .generators
            .column_iter()
            .enumerate()
            .map(|(j, g)| (j, g.lp_norm(1) - g.amax(), g.norm()))
            .collect();
        ranked.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then(b.2.total_cmp(&a.2))
                .then(a.0.cmp(&b.0))
        });

        let mut kept = vec![false; count];
        for &(j, _, _) in ranked.iter().take(keep_count) {
            kept[j] = true;
        }
        let kept_idx: Vec<usize> = (0..count).filter(|&j| kept[j]).collect();
        let boxed_idx: Vec<usize> = (0..count).filter(|&j| !kept[j]).collect();

        let radius = row_abs_sums(&self.generators, boxed_idx.into_iter());
        let mut generators = DMatrix::zeros(dim, kept_idx.len() + dim);
        for (k, &j) in kept_idx.iter().enumerate() {
            generators.set_column(k, &self.generators.column(j));
        }
        for i in 0..dim {
            generators[(i, kept_idx.len() + i)] = radius[i];
        }
        Zonotope::new(self.center.clone(), generators)
    }
}

fn row_abs_sums(g: &DMatrix<f64>, columns: impl Iterator<Item = usize> + Clone) -> DVector<f64> {
    DVector::from_fn(g.nrows(), |i, _| {
        columns.clone().fold(0.0, |acc, j| acc + g[(i, j)].abs())
    })
}

/// Textual form used by golden files: center, then one line per generator,
/// every value with 17 significant digits.
impl fmt::Display for Zonotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "zonotope dim={} generators={}", self.dim(), self.num_generators())?;
        write!(f, "c")?;
        for v in self.center.iter() {
            write!(f, " {v:.16e}")?;
        }
        writeln!(f)?;
        for (j, g) in self.generators.column_iter().enumerate() {
            write!(f, "g{j}")?;
            for v in g.iter() {
                write!(f, " {v:.16e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
