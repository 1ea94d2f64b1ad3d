//! Periodic structured grid, ghost-cell management and the finite-difference
//! operators shared by both schemes.
//!
//! A [`ScalarField`] stores one contiguous array covering the interior plus
//! [`GHOST_WIDTH`] ghost layers on every side. Axis 3 is outermost and axis 1
//! is the fastest-varying index:
//!
//! ```text
//! idx(k1, k2, k3) = (k3 * m2 + k2) * m1 + k1,   m_i = n_i + 2 * GHOST_WIDTH
//! ```
//!
//! Padded indices `GHOST_WIDTH..n_i + GHOST_WIDTH` form the interior set `D`.
//! Operators read their input ghosts and return fields whose ghosts are already
//! filled, so they compose without extra bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{ProcaError, Result};

/// Number of ghost layers per side. The widest stencil in use is
/// `diff1 ∘ diff1`, which reaches two cells.
pub const GHOST_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: [usize; 3],
    dx: [f64; 3],
    origin: [f64; 3],
}

impl GridSpec {
    /// Grid with `n` interior cells and spacing `dx` per axis, node-based with
    /// the first interior node at `origin`.
    pub fn new(n: [usize; 3], dx: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if n.iter().any(|&k| k == 0) {
            return Err(ProcaError::InvalidGrid(format!("cell counts must be positive, got {n:?}")));
        }
        if dx.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(ProcaError::InvalidGrid(format!("spacings must be positive, got {dx:?}")));
        }
        Ok(Self { n, dx, origin })
    }

    /// The periodic cell `[-1/2, 1/2)` along axes 1 and 2 with `dx_i = 1/n_i`.
    ///
    /// Along axis 3 the spacing is `dx1` when `n3 > 1`. A single z-plane gets
    /// unit thickness so that `ΔV = dx1·dx2` and the domain volume is one.
    pub fn unit_periodic(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(ProcaError::InvalidGrid(format!(
                "cell counts must be positive, got [{n1}, {n2}, {n3}]"
            )));
        }
        let dx1 = 1.0 / n1 as f64;
        let dx2 = 1.0 / n2 as f64;
        let dx3 = if n3 > 1 { dx1 } else { 1.0 };
        let z0 = if n3 > 1 { -0.5 * dx3 * n3 as f64 } else { 0.0 };
        Self::new([n1, n2, n3], [dx1, dx2, dx3], [-0.5, -0.5, z0])
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn dx(&self) -> [f64; 3] {
        self.dx
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn n_axis(&self, axis: Axis) -> usize {
        self.n[axis.index()]
    }

    pub fn dx_axis(&self, axis: Axis) -> f64 {
        self.dx[axis.index()]
    }

    /// Axes with more than one cell. A single-cell axis wraps onto itself and
    /// every difference along it vanishes.
    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.n[a.index()] > 1)
    }

    pub fn padded(&self) -> [usize; 3] {
        [
            self.n[0] + 2 * GHOST_WIDTH,
            self.n[1] + 2 * GHOST_WIDTH,
            self.n[2] + 2 * GHOST_WIDTH,
        ]
    }

    /// Total stored values including ghosts.
    pub fn storage_len(&self) -> usize {
        let m = self.padded();
        m[0] * m[1] * m[2]
    }

    /// Number of cells in `D`.
    pub fn interior_len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx[0] * self.dx[1] * self.dx[2]
    }

    /// Periodic length of each axis.
    pub fn extent(&self) -> [f64; 3] {
        [
            self.n[0] as f64 * self.dx[0],
            self.n[1] as f64 * self.dx[1],
            self.n[2] as f64 * self.dx[2],
        ]
    }

    pub fn stride(&self, axis: Axis) -> usize {
        let m = self.padded();
        match axis {
            Axis::X => 1,
            Axis::Y => m[0],
            Axis::Z => m[0] * m[1],
        }
    }

    /// Storage index of padded coordinates.
    #[inline]
    pub fn idx(&self, k1: usize, k2: usize, k3: usize) -> usize {
        let m = self.padded();
        (k3 * m[1] + k2) * m[0] + k1
    }

    /// Storage index of 0-based interior coordinates.
    #[inline]
    pub fn interior_idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        self.idx(i1 + GHOST_WIDTH, i2 + GHOST_WIDTH, i3 + GHOST_WIDTH)
    }

    /// Physical coordinate of interior node `i` along `axis`.
    pub fn coord(&self, axis: Axis, i: usize) -> f64 {
        let a = axis.index();
        self.origin[a] + i as f64 * self.dx[a]
    }

    pub fn position(&self, i1: usize, i2: usize, i3: usize) -> [f64; 3] {
        [
            self.coord(Axis::X, i1),
            self.coord(Axis::Y, i2),
            self.coord(Axis::Z, i3),
        ]
    }

    /// Calls `f(storage_index, [i1, i2, i3])` for each interior cell in
    /// storage order.
    pub fn for_each_interior(&self, mut f: impl FnMut(usize, [usize; 3])) {
        for i3 in 0..self.n[2] {
            for i2 in 0..self.n[1] {
                let base = self.interior_idx(0, i2, i3);
                for i1 in 0..self.n[0] {
                    f(base + i1, [i1, i2, i3]);
                }
            }
        }
    }

    /// Storage index ranges of the interior rows along axis 1.
    pub fn interior_rows(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        let n = self.n;
        (0..n[2]).flat_map(move |i3| {
            (0..n[1]).map(move |i2| {
                let base = self.interior_idx(0, i2, i3);
                base..base + n[0]
            })
        })
    }

    #[inline]
    fn wrap(k: usize, n: usize) -> usize {
        // Padded index -> padded index of its interior periodic image.
        (k + n * GHOST_WIDTH - GHOST_WIDTH) % n + GHOST_WIDTH
    }
}

/// One real field over the interior plus ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: *grid,
            values: vec![0.0; grid.storage_len()],
        }
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        Self {
            grid: *grid,
            values: vec![value; grid.storage_len()],
        }
    }

    /// Samples `f` at every interior node and fills ghosts.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        grid.for_each_interior(|idx, [i1, i2, i3]| {
            out.values[idx] = f(grid.position(i1, i2, i3));
        });
        out.fill_ghosts();
        out
    }

    /// Builds a field from interior values given in storage order
    /// (axis 1 fastest).
    pub fn from_interior(grid: &GridSpec, interior: &[f64]) -> Self {
        assert_eq!(interior.len(), grid.interior_len(), "interior length mismatch");
        let mut out = Self::zeros(grid);
        for (row, chunk) in grid.interior_rows().zip(interior.chunks(grid.n[0])) {
            out.values[row].copy_from_slice(chunk);
        }
        out.fill_ghosts();
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Raw storage including ghosts.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.values[self.grid.interior_idx(i1, i2, i3)]
    }

    /// Sets an interior value. Ghosts are stale until the next `fill_ghosts`.
    pub fn set(&mut self, i1: usize, i2: usize, i3: usize, v: f64) {
        let idx = self.grid.interior_idx(i1, i2, i3);
        self.values[idx] = v;
    }

    /// Interior values in storage order.
    pub fn interior(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.interior_len());
        for row in self.grid.interior_rows() {
            out.extend_from_slice(&self.values[row]);
        }
        out
    }

    /// Copies periodic images of the interior into every ghost cell, corners
    /// included. The interior is left untouched.
    pub fn fill_ghosts(&mut self) {
        let g = self.grid;
        let [n1, n2, n3] = g.n;
        let [m1, m2, m3] = g.padded();
        let v = &mut self.values;
        // axis 1, interior rows
        for k3 in GHOST_WIDTH..n3 + GHOST_WIDTH {
            for k2 in GHOST_WIDTH..n2 + GHOST_WIDTH {
                let base = g.idx(0, k2, k3);
                for k1 in (0..GHOST_WIDTH).chain(n1 + GHOST_WIDTH..m1) {
                    v[base + k1] = v[base + GridSpec::wrap(k1, n1)];
                }
            }
        }
        // axis 2, full rows of interior planes
        for k3 in GHOST_WIDTH..n3 + GHOST_WIDTH {
            for k2 in (0..GHOST_WIDTH).chain(n2 + GHOST_WIDTH..m2) {
                let src = g.idx(0, GridSpec::wrap(k2, n2), k3);
                let dst = g.idx(0, k2, k3);
                v.copy_within(src..src + m1, dst);
            }
        }
        // axis 3, full planes
        let plane = m1 * m2;
        for k3 in (0..GHOST_WIDTH).chain(n3 + GHOST_WIDTH..m3) {
            let src = GridSpec::wrap(k3, n3) * plane;
            v.copy_within(src..src + plane, k3 * plane);
        }
    }

    /// Consuming form of [`fill_ghosts`](Self::fill_ghosts).
    pub fn with_ghosts(mut self) -> Self {
        self.fill_ghosts();
        self
    }

    /// Cyclic translation of the interior by `offset` cells per axis.
    pub fn shifted(&self, offset: [isize; 3]) -> Self {
        let g = self.grid;
        let n = g.n;
        let mut out = Self::zeros(&g);
        g.for_each_interior(|idx, [i1, i2, i3]| {
            let s = |i: usize, a: usize| (i as isize - offset[a]).rem_euclid(n[a] as isize) as usize;
            out.values[idx] = self.get(s(i1, 0), s(i2, 1), s(i3, 2));
        });
        out.fill_ghosts();
        out
    }

    /// Applies `f` pointwise to the interior and refills ghosts.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = Self::zeros(&self.grid);
        for row in self.grid.interior_rows() {
            for i in row {
                out.values[i] = f(self.values[i]);
            }
        }
        out.fill_ghosts();
        out
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = Self::zeros(&self.grid);
        for row in self.grid.interior_rows() {
            for i in row {
                out.values[i] = f(self.values[i], other.values[i]);
            }
        }
        out.fill_ghosts();
        out
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|a| s * a)
    }

    /// `self += alpha * other` over all storage (ghosts stay consistent when
    /// both inputs had filled ghosts).
    pub fn axpy(&mut self, alpha: f64, other: &ScalarField) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    /// Interior sum in storage order.
    pub fn sum(&self) -> f64 {
        self.grid.interior_rows().map(|r| self.values[r].iter().sum::<f64>()).sum()
    }

    /// Interior inner product `Σ_D f g` (no volume weight).
    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.grid
            .interior_rows()
            .map(|r| {
                self.values[r.clone()]
                    .iter()
                    .zip(&other.values[r])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `sqrt(Σ_D f² ΔV)`.
    pub fn l2_norm(&self) -> f64 {
        (self.dot(self) * self.grid.cell_volume()).sqrt()
    }

    /// `max_D |f|`.
    pub fn linf_norm(&self) -> f64 {
        self.grid
            .interior_rows()
            .flat_map(|r| self.values[r].iter().copied())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn stencil(&self, axis: Axis, op: impl Fn(f64, f64, f64) -> f64) -> Self {
        let g = self.grid;
        let s = g.stride(axis);
        let v = &self.values;
        let mut out = Self::zeros(&g);
        for row in g.interior_rows() {
            for i in row {
                out.values[i] = op(v[i - s], v[i], v[i + s]);
            }
        }
        out.fill_ghosts();
        out
    }
}

/// Central first difference `(f[k+1] - f[k-1]) / (2 dx)`.
pub fn diff1(f: &ScalarField, axis: Axis) -> ScalarField {
    let h2 = 2.0 * f.grid.dx_axis(axis);
    f.stencil(axis, |m, _, p| (p - m) / h2)
}

/// Forward difference `(f[k+1] - f[k]) / dx`.
pub fn diff_fwd(f: &ScalarField, axis: Axis) -> ScalarField {
    let h = f.grid.dx_axis(axis);
    f.stencil(axis, |_, c, p| (p - c) / h)
}

/// Backward difference `(f[k] - f[k-1]) / dx`.
pub fn diff_bwd(f: &ScalarField, axis: Axis) -> ScalarField {
    let h = f.grid.dx_axis(axis);
    f.stencil(axis, |m, c, _| (c - m) / h)
}

/// Second difference. On the diagonal this is the compact three-point stencil
/// `(f[k+1] - 2 f[k] + f[k-1]) / dx²`; off the diagonal it is
/// `diff1(diff1(f, j), i)`.
pub fn diff2(f: &ScalarField, i: Axis, j: Axis) -> ScalarField {
    if i == j {
        let h = f.grid.dx_axis(i);
        let h2 = h * h;
        f.stencil(i, |m, c, p| (p - 2.0 * c + m) / h2)
    } else {
        diff1(&diff1(f, j), i)
    }
}

/// Free-function form of [`ScalarField::fill_ghosts`].
pub fn fill_ghosts(f: ScalarField) -> ScalarField {
    f.with_ghosts()
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    f.l2_norm()
}

pub fn linf_norm(f: &ScalarField) -> f64 {
    f.linf_norm()
}
