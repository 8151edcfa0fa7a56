//! Uniform spatial grids, grid functions and the discrete operators acting
//! on them.
//!
//! Grid functions always carry all M + 1 nodal values. Operators that are
//! only meaningful on interior nodes (δ_x²) write zeros into the boundary
//! slots so every grid function has the same shape.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    a: f64,
    b: f64,
    intervals: usize,
    h: f64,
}

impl SpaceGrid {
    /// Grid on [a, b] with `intervals` = M cells, nodes x_i = a + i h.
    pub fn new(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid endpoints must satisfy a < b, got [{a}, {b}]"
            )));
        }
        if intervals < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 intervals, got {intervals}"
            )));
        }
        Ok(Self {
            a,
            b,
            intervals,
            h: (b - a) / intervals as f64,
        })
    }

    pub fn left(&self) -> f64 {
        self.a
    }

    pub fn right(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Number of intervals M.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes M + 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(|i| self.node(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: SpaceGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: SpaceGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} nodal values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node, boundary included.
    pub fn sample(grid: SpaceGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    /// Samples `f` on interior nodes and pins both boundary values to zero.
    pub fn dirichlet(grid: SpaceGrid, f: impl Fn(f64) -> f64) -> Self {
        let mut u = Self::sample(grid, f);
        u.clear_boundary();
        u
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn clear_boundary(&mut self) {
        self.values[0] = 0.0;
        let last = self.values.len() - 1;
        self.values[last] = 0.0;
    }

    /// u ← u + s·v
    pub fn axpy(&mut self, s: f64, v: &GridFunction) -> Result<()> {
        self.check_grid(v)?;
        for (x, y) in self.values.iter_mut().zip(&v.values) {
            *x += s * y;
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }
}

/// ⟨u, v⟩ = h Σ_{i=1}^{M−1} u_i v_i
pub fn inner(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.check_grid(v)?;
    Ok(inner_slices(u.grid.h, &u.values, &v.values))
}

pub(crate) fn inner_slices(h: f64, u: &[f64], v: &[f64]) -> f64 {
    let m = u.len() - 1;
    h * (1..m).map(|i| u[i] * v[i]).sum::<f64>()
}

/// Discrete L2 norm ‖u‖ over interior nodes.
pub fn norm_l2(u: &GridFunction) -> f64 {
    inner_slices(u.grid.h, &u.values, &u.values).sqrt()
}

/// |u|_1 = sqrt(h Σ_{i=1}^{M} |δ_x u_{i−1/2}|²), boundary-adjacent differences included.
pub fn seminorm_h1(u: &GridFunction) -> f64 {
    let h = u.grid.h;
    let s: f64 = u
        .values
        .windows(2)
        .map(|w| {
            let d = (w[1] - w[0]) / h;
            d * d
        })
        .sum();
    (h * s).sqrt()
}

/// max_{1≤i≤M−1} |u_i|
pub fn norm_inf(u: &GridFunction) -> f64 {
    let m = u.values.len() - 1;
    u.values[1..m].iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Second difference (u_{i+1} − 2u_i + u_{i−1})/h² on interior nodes; boundary slots are zero.
pub fn delta_x2(u: &GridFunction) -> GridFunction {
    let mut out = GridFunction::zeros(u.grid);
    delta_x2_into(u.grid.h, &u.values, &mut out.values);
    out
}

pub(crate) fn delta_x2_into(h: f64, u: &[f64], out: &mut [f64]) {
    let m = u.len() - 1;
    let inv_h2 = 1.0 / (h * h);
    out[0] = 0.0;
    out[m] = 0.0;
    for i in 1..m {
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2;
    }
}

/// Compact averaging (u_{i−1} + 10u_i + u_{i+1})/12 on interior nodes; boundary values copied.
pub fn apply_compact(u: &GridFunction) -> GridFunction {
    let mut out = GridFunction::zeros(u.grid);
    compact_into(&u.values, &mut out.values);
    out
}

pub(crate) fn compact_into(u: &[f64], out: &mut [f64]) {
    let m = u.len() - 1;
    out[0] = u[0];
    out[m] = u[m];
    for i in 1..m {
        out[i] = (u[i - 1] + 10.0 * u[i] + u[i + 1]) / 12.0;
    }
}

/// ‖u‖_A = sqrt(⟨𝒜u, u⟩)
pub fn norm_a(u: &GridFunction) -> f64 {
    let au = apply_compact(u);
    inner_slices(u.grid.h, &au.values, &u.values).max(0.0).sqrt()
}
