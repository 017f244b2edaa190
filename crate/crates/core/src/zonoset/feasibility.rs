//! Box-constrained linear feasibility: find `beta` with `A beta = b` and
//! `|beta_j| <= 1`.
//!
//! Solved with a dense bounded-variable primal simplex on the phase-1
//! problem (one artificial per row). Problems here are tiny (a handful of
//! rows, at most a few thousand columns), so a full tableau is fine.

use nalgebra::{DMatrix, DVector};

use super::ZonoError;

/// Allowed residual `max_i |(A beta - b)_i|` for a point to count as contained.
pub const FEAS_TOL: f64 = 1e-9;
/// Slack on the coefficient bounds: `|beta_j| <= 1 + BOUND_SLACK`.
pub const BOUND_SLACK: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-13;
const MAX_ITERATIONS: usize = 100_000;

/// Returns a coefficient vector certifying feasibility, or `None`.
///
/// The returned vector always satisfies the bound and residual tolerances
/// when checked against the original (unscaled) `a` and `b`.
pub fn solve_box_feasibility(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Result<Option<DVector<f64>>, ZonoError> {
    let rows = a.nrows();
    let cols = a.ncols();
    debug_assert_eq!(rows, b.len());

    if rows == 0 {
        return Ok(Some(DVector::zeros(cols)));
    }
    let b_max = b.amax();
    if b_max <= FEAS_TOL {
        return Ok(Some(DVector::zeros(cols)));
    }

    // Columns with no entries never help.
    let active: Vec<usize> = (0..cols)
        .filter(|&j| a.column(j).iter().any(|v| *v != 0.0))
        .collect();
    if active.is_empty() {
        return Ok(None);
    }

    // Quick rejection: |b_i| cannot exceed the row's absolute sum.
    for i in 0..rows {
        let reach: f64 = active.iter().map(|&j| a[(i, j)].abs()).sum();
        if b[i].abs() > reach * (1.0 + BOUND_SLACK) + FEAS_TOL {
            return Ok(None);
        }
    }

    let scale = active
        .iter()
        .map(|&j| a.column(j).amax())
        .fold(b_max, f64::max);

    let solution = Tableau::phase_one(a, b, &active, scale).solve()?;
    let mut beta = DVector::zeros(cols);
    for (k, &j) in active.iter().enumerate() {
        beta[j] = solution[k].clamp(-1.0 - BOUND_SLACK, 1.0 + BOUND_SLACK);
    }

    let residual = (a * &beta - b).amax();
    if residual <= FEAS_TOL {
        Ok(Some(beta))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    rows: usize,
    structural: usize,
    /// `rows x (structural + rows)`, row-major.
    entries: Vec<f64>,
    basis: Vec<usize>,
    basic_value: Vec<f64>,
    status: Vec<Status>,
    upper: f64,
}

impl Tableau {
    /// Shifted variables `s = beta + (1 + slack)` live in `[0, upper]`.
    fn phase_one(a: &DMatrix<f64>, b: &DVector<f64>, active: &[usize], scale: f64) -> Self {
        let rows = a.nrows();
        let structural = active.len();
        let width = structural + rows;
        let lower = -1.0 - BOUND_SLACK;
        let upper = 2.0 * (1.0 + BOUND_SLACK);

        let mut entries = vec![0.0; rows * width];
        let mut basic_value = vec![0.0; rows];
        for i in 0..rows {
            let mut rhs = b[i] / scale;
            for (k, &j) in active.iter().enumerate() {
                let v = a[(i, j)] / scale;
                entries[i * width + k] = v;
                rhs -= v * lower;
            }
            if rhs < 0.0 {
                for k in 0..structural {
                    entries[i * width + k] = -entries[i * width + k];
                }
                rhs = -rhs;
            }
            entries[i * width + structural + i] = 1.0;
            basic_value[i] = rhs;
        }

        let mut status = vec![Status::AtLower; width];
        for s in status.iter_mut().skip(structural) {
            *s = Status::Basic;
        }

        Self {
            rows,
            structural,
            entries,
            basis: (structural..width).collect(),
            basic_value,
            status,
            upper,
        }
    }

    fn width(&self) -> usize {
        self.structural + self.rows
    }

    fn at(&self, r: usize, j: usize) -> f64 {
        self.entries[r * self.width() + j]
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.structural
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let mut d = if self.is_artificial(j) { 1.0 } else { 0.0 };
        for r in 0..self.rows {
            if self.is_artificial(self.basis[r]) {
                d -= self.at(r, j);
            }
        }
        d
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.structural {
            let dir = match self.status[j] {
                Status::Basic => continue,
                Status::AtLower => 1.0,
                Status::AtUpper => -1.0,
            };
            let d = self.reduced_cost(j);
            let gain = -d * dir;
            if gain <= COST_TOL {
                continue;
            }
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((j, dir, gain));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn solve(mut self) -> Result<Vec<f64>, ZonoError> {
        let degenerate_limit = 4 * self.width();
        let mut degenerate_run = 0usize;

        for _ in 0..MAX_ITERATIONS {
            let bland = degenerate_run > degenerate_limit;
            let Some((entering, dir)) = self.choose_entering(bland) else {
                return Ok(self.structural_values());
            };

            // Ratio test. Entering variable may flip to its opposite bound.
            let mut step = self.upper;
            let mut leaving: Option<(usize, Status)> = None;
            for r in 0..self.rows {
                let delta = -dir * self.at(r, entering);
                let basic = self.basis[r];
                let (limit, bound) = if delta < -PIVOT_TOL {
                    (self.basic_value[r] / -delta, Status::AtLower)
                } else if delta > PIVOT_TOL && !self.is_artificial(basic) {
                    ((self.upper - self.basic_value[r]) / delta, Status::AtUpper)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leaving {
                    None => limit < step,
                    Some((lr, _)) => {
                        limit < step || (limit == step && bland && basic < self.basis[lr])
                    }
                };
                if better {
                    step = limit;
                    leaving = Some((r, bound));
                }
            }

            if step <= 0.0 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            for r in 0..self.rows {
                let delta = -dir * self.at(r, entering);
                self.basic_value[r] += step * delta;
            }

            let entering_value = match self.status[entering] {
                Status::AtLower => step,
                _ => self.upper - step,
            };

            match leaving {
                None => {
                    self.status[entering] = match self.status[entering] {
                        Status::AtLower => Status::AtUpper,
                        _ => Status::AtLower,
                    };
                }
                Some((r, bound)) => {
                    let old = self.basis[r];
                    self.status[old] = bound;
                    self.status[entering] = Status::Basic;
                    self.basis[r] = entering;
                    self.basic_value[r] = entering_value;
                    self.pivot(r, entering);
                }
            }
        }

        Err(ZonoError::SolverStalled {
            iterations: MAX_ITERATIONS,
        })
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.width();
        let p = self.at(row, col);
        for j in 0..width {
            self.entries[row * width + j] /= p;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.entries[row * width + j];
                self.entries[r * width + j] -= factor * v;
            }
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        let lower = -1.0 - BOUND_SLACK;
        let mut values: Vec<f64> = (0..self.structural)
            .map(|j| match self.status[j] {
                Status::AtUpper => self.upper,
                _ => 0.0,
            })
            .collect();
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.structural {
                values[j] = self.basic_value[r];
            }
        }
        values.iter().map(|s| s + lower).collect()
    }
}
