use nalgebra::DVector;

use super::{ZonoError, Zonotope};

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl IntervalBox {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self, ZonoError> {
        if lower.len() != upper.len() {
            return Err(ZonoError::DimensionMismatch {
                op: "interval box",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l.partial_cmp(u).is_none_or(|o| o.is_gt())) {
            return Err(ZonoError::InvertedBounds);
        }
        Ok(Self { lower, upper })
    }

    pub(crate) fn from_center_radius(center: &DVector<f64>, radius: &DVector<f64>) -> Self {
        Self {
            lower: center - radius,
            upper: center + radius,
        }
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, point: &DVector<f64>) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(p, (l, u))| *l <= *p && *p <= *u)
    }

    pub fn to_zonotope(&self) -> Zonotope {
        let center = (&self.lower + &self.upper) * 0.5;
        let radius = (&self.upper - &self.lower) * 0.5;
        Zonotope::from_center_radius(center, &radius).expect("box bounds are finite and matched")
    }
}
