//! Two-dimensional mixed strategies: tabulated joint densities over the
//! (p, q) log-price pair.
//!
//! These model players whose buying and selling dispositions are correlated
//! — the joint density η(p, q) replaces the product of two independent 1-D
//! strategies. Only non-negative densities are representable; signed
//! ("giffen") measures are out of scope. Evaluation is simulation-only:
//! sampling goes inverse-CDF on the exact p-marginal, then inverse-CDF on
//! the conditional q-slice, both of which are closed-form for a bilinear
//! density.

use rand::Rng;
use serde::Deserialize;

use crate::error::{QError, QResult};
use crate::strategies::Tabulated;

/// Bilinear joint density on a rectangular grid: `values[i][j]` is the
/// density at (p_grid[i], q_grid[j]), renormalized at construction so the
/// double trapezoid integral is exactly 1.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "Joint2DRaw")]
pub struct JointStrategy2D {
    p_grid: Vec<f64>,
    q_grid: Vec<f64>,
    values: Vec<Vec<f64>>,
    /// ∫ values[i][·] dq per p-node — the exact p-marginal node values.
    row_q_mass: Vec<f64>,
}

impl JointStrategy2D {
    pub fn new(p_grid: Vec<f64>, q_grid: Vec<f64>, values: Vec<Vec<f64>>) -> QResult<Self> {
        for (name, grid) in [("p_grid", &p_grid), ("q_grid", &q_grid)] {
            if grid.len() < 2 {
                return Err(QError::InvalidStrategy(format!("{name} needs at least 2 points")));
            }
            if grid.iter().any(|x| !x.is_finite()) {
                return Err(QError::InvalidStrategy(format!("{name} entries must be finite")));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(QError::InvalidStrategy(format!("{name} must be strictly increasing")));
            }
        }
        if values.len() != p_grid.len() {
            return Err(QError::InvalidStrategy(format!(
                "values has {} rows but p_grid has {} points",
                values.len(),
                p_grid.len()
            )));
        }
        for row in &values {
            if row.len() != q_grid.len() {
                return Err(QError::InvalidStrategy(format!(
                    "a values row has {} entries but q_grid has {} points",
                    row.len(),
                    q_grid.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(QError::InvalidStrategy("joint density values must be finite and ≥ 0".into()));
            }
        }
        let raw_row_mass: Vec<f64> = values.iter().map(|row| trapezoid(&q_grid, row)).collect();
        let total = trapezoid(&p_grid, &raw_row_mass);
        if total <= 0.0 {
            return Err(QError::InvalidStrategy("joint density has zero total mass".into()));
        }
        let values: Vec<Vec<f64>> = values
            .iter()
            .map(|row| row.iter().map(|v| v / total).collect())
            .collect();
        let row_q_mass: Vec<f64> = raw_row_mass.iter().map(|m| m / total).collect();
        Ok(JointStrategy2D { p_grid, q_grid, values, row_q_mass })
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn q_grid(&self) -> &[f64] {
        &self.q_grid
    }

    /// Bilinear interpolation inside the grid rectangle, zero outside.
    pub fn density(&self, p: f64, q: f64) -> f64 {
        let Some((i, s)) = locate(&self.p_grid, p) else { return 0.0 };
        let Some((j, t)) = locate(&self.q_grid, q) else { return 0.0 };
        let v = &self.values;
        (1.0 - s) * ((1.0 - t) * v[i][j] + t * v[i][j + 1])
            + s * ((1.0 - t) * v[i + 1][j] + t * v[i + 1][j + 1])
    }

    /// The exact marginal density of p: integrating a bilinear patch over q
    /// is linear in p, so the marginal is the piecewise-linear density
    /// through the per-row q-masses.
    pub fn p_marginal(&self) -> Tabulated {
        Tabulated::new(self.p_grid.clone(), self.row_q_mass.clone())
            .expect("marginal of a valid joint density is a valid 1-D density")
    }

    /// The conditional density of q at a fixed p: the row interpolated
    /// between the two bracketing grid rows, renormalized. Where the joint
    /// density vanishes for the whole slice (a probability-zero p under the
    /// marginal), falls back to uniform over the q-grid.
    pub fn conditional_q_at(&self, p: f64) -> Tabulated {
        let row: Vec<f64> = match locate(&self.p_grid, p) {
            Some((i, s)) => (0..self.q_grid.len())
                .map(|j| (1.0 - s) * self.values[i][j] + s * self.values[i + 1][j])
                .collect(),
            None => vec![0.0; self.q_grid.len()],
        };
        match Tabulated::new(self.q_grid.clone(), row) {
            Ok(t) => t,
            Err(_) => Tabulated::new(self.q_grid.clone(), vec![1.0; self.q_grid.len()])
                .expect("uniform over a valid grid is a valid density"),
        }
    }

    /// Draw one (p, q) pair: p from the exact marginal, q from the
    /// conditional slice at that p.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let p = self.p_marginal().sample(rng);
        let q = self.conditional_q_at(p).sample(rng);
        (p, q)
    }

    /// Demand curve: the cumulative slice integral ∫_{−∞}^p η(t, q_const) dt.
    /// Plotted against the supply curve on the common axis ln c = p = −q.
    pub fn demand_cumulative(&self, p: f64, q_const: f64) -> f64 {
        let Some((j, t)) = locate(&self.q_grid, q_const) else { return 0.0 };
        let slice: Vec<f64> = self
            .values
            .iter()
            .map(|row| (1.0 - t) * row[j] + t * row[j + 1])
            .collect();
        cumulative(&self.p_grid, &slice, p)
    }

    /// Supply curve: the cumulative slice integral ∫_{−∞}^q η(p_const, t) dt.
    pub fn supply_cumulative(&self, q: f64, p_const: f64) -> f64 {
        let Some((i, s)) = locate(&self.p_grid, p_const) else { return 0.0 };
        let slice: Vec<f64> = (0..self.q_grid.len())
            .map(|j| (1.0 - s) * self.values[i][j] + s * self.values[i + 1][j])
            .collect();
        cumulative(&self.q_grid, &slice, q)
    }
}

/// Cell index and in-cell fraction for x on a strictly increasing grid.
fn locate(grid: &[f64], x: f64) -> Option<(usize, f64)> {
    if x < grid[0] || x > *grid.last().expect("grids have ≥ 2 points") {
        return None;
    }
    let k = grid.partition_point(|g| *g <= x);
    let i = if k == 0 { 0 } else { (k - 1).min(grid.len() - 2) };
    Some((i, (x - grid[i]) / (grid[i + 1] - grid[i])))
}

fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// ∫_{grid[0]}^{x} of the piecewise-linear function through `values`,
/// clamped to the full integral beyond the grid.
fn cumulative(grid: &[f64], values: &[f64], x: f64) -> f64 {
    if x <= grid[0] {
        return 0.0;
    }
    let Some((i, t)) = locate(grid, x) else {
        return trapezoid(grid, values);
    };
    let before = trapezoid(&grid[..=i], &values[..=i]);
    let h = grid[i + 1] - grid[i];
    let dt = t * h;
    before + values[i] * dt + 0.5 * (values[i + 1] - values[i]) / h * dt * dt
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum Joint2DRaw {
    Joint2d {
        p_grid: Vec<f64>,
        q_grid: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl TryFrom<Joint2DRaw> for JointStrategy2D {
    type Error = QError;

    fn try_from(raw: Joint2DRaw) -> QResult<Self> {
        let Joint2DRaw::Joint2d { p_grid, q_grid, values } = raw;
        JointStrategy2D::new(p_grid, q_grid, values)
    }
}
